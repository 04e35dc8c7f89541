//! The opposite of stable maps: meet-semilattices with
//! `bar(f) = (− ∧ f(⊤))`. The restriction idempotents on a lattice
//! object recover the lattice itself.

use rescat::builders::{build_jstab_op, build_stab_op};
use rescat::cat::ObjId;
use rescat::restriction::verify_restriction;
use rescat::semilattice::{is_frame, is_open, local_left_adjoint, MeetSemilattice, StableMap};

fn main() {
    let lats = [MeetSemilattice::chain(3), MeetSemilattice::powerset(2)];
    let s = build_stab_op(&lats).unwrap();
    println!(
        "Stab^op fragment on a 3-chain and powerset(2): {} stable maps",
        s.rc.base.n_morphisms()
    );
    println!("R1-R4:\n{}", verify_restriction(&s.rc));
    for (i, l) in lats.iter().enumerate() {
        println!(
            "𝒪(L{i}) has {} idempotents = |L{i}| = {}",
            s.rc.restriction_idempotents(ObjId(i)).len(),
            l.size()
        );
    }

    // Frames and the join-preserving fragment.
    println!("\nframes: chain(3): {}, powerset(2): {}, M3: {}",
        is_frame(&MeetSemilattice::chain(3)),
        is_frame(&MeetSemilattice::powerset(2)),
        is_frame(&MeetSemilattice::diamond_m3()));
    let (js, _) = build_jstab_op(&[MeetSemilattice::powerset(2)]).unwrap();
    println!("jStab^op on powerset(2): {} join-preserving maps", js.rc.base.n_morphisms());

    // Open and non-open stable maps.
    let b2 = MeetSemilattice::powerset(2);
    let meet_with_atom = StableMap::new(
        b2.clone(),
        b2.clone(),
        b2.elements().map(|a| b2.meet(a, 1)).collect(),
    )
    .unwrap();
    let collapse = StableMap::new(b2.clone(), b2.clone(), vec![0, 0, 0, 3]).unwrap();
    println!("\n(− ∧ atom) open: {}", is_open(&meet_with_atom));
    match local_left_adjoint(&collapse) {
        Some(adj) => println!(
            "collapse map has an adjoint candidate but Frobenius = {} -> open: {}",
            adj.frobenius,
            is_open(&collapse)
        ),
        None => println!("collapse map has no local left adjoint"),
    }
}
