//! Every restriction category maps canonically into (a fragment of)
//! `Stab^op`: objects go to their idempotent lattices, morphisms to
//! `e ↦ overline(e∘f)`. The functor is always hyperconnected, and the
//! comparison transformation of any restriction functor is invertible
//! exactly in the hyperconnected case.

use rescat::builders::{build_set_p, total_inclusion_into_set_p};
use rescat::fundamental::{comparison_phi, fundamental_functor, is_hyperconnected, is_localic};
use rescat::CheckConfig;

fn main() {
    let cfg = CheckConfig::default();
    let sp = build_set_p(&[1, 2], &cfg).unwrap();
    let fund = fundamental_functor(&sp.rc).unwrap();
    println!("fundamental functor of set_p[1,2]:");
    for a in sp.rc.base.objects() {
        println!(
            "  𝒪({}) = lattice with {} elements",
            sp.rc.base.obj_label(a),
            fund.lattice_of(a).size()
        );
    }
    println!(
        "  target fragment: {} objects, {} stable maps",
        fund.stab.rc.base.n_objects(),
        fund.stab.rc.base.n_morphisms()
    );
    println!(
        "  hyperconnected: {}",
        is_hyperconnected(&fund.functor, &sp.rc, &fund.stab.rc).unwrap()
    );

    // The comparison transformation of the identity is invertible; of
    // the total-maps inclusion it is not.
    let id = rescat::cat::FinFunctor::identity(&sp.rc.base);
    let phi = comparison_phi(&id, &sp.rc, &sp.rc).unwrap();
    println!("\nφ of the identity functor invertible: {}", phi.invertible);

    let (triv, sp2, incl) = total_inclusion_into_set_p(&[1, 2], &cfg).unwrap();
    println!(
        "total-maps inclusion: hyperconnected {}, localic {}",
        is_hyperconnected(&incl, &triv, &sp2.rc).unwrap(),
        is_localic(&incl, &triv, &sp2.rc).unwrap(),
    );
    let phi2 = comparison_phi(&incl, &triv, &sp2.rc).unwrap();
    println!("φ of the inclusion invertible: {}", phi2.invertible);
    for (a, &comp) in phi2.phi.components.iter().enumerate() {
        let f = phi2.fragment.map_fn(comp);
        println!(
            "  component at object {a}: 𝒪 sizes {} -> {} (image {} elements)",
            f.len(),
            phi2.fund_tgt.lattice_of(incl.on_obj(rescat::cat::ObjId(a))).size(),
            {
                let mut v = f.to_vec();
                v.sort();
                v.dedup();
                v.len()
            }
        );
    }
}
