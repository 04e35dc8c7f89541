//! Sets and partial functions: the motivating restriction category.
//! Builds `set_p` on carriers of sizes 1 and 2 and walks through the
//! restriction operator, the order, totality, and the idempotent
//! lattices.

use rescat::builders::build_set_p;
use rescat::cat::ObjId;
use rescat::restriction::verify_restriction;
use rescat::CheckConfig;

fn main() {
    let sp = build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
    let c = &sp.rc.base;
    println!("set_p on sizes [1, 2]: {} objects, {} morphisms", c.n_objects(), c.n_morphisms());

    println!("\nR1-R4:\n{}", verify_restriction(&sp.rc));

    // bar is the partial identity on the domain of definition.
    let b = ObjId(1);
    for m in c.hom(b, ObjId(0)) {
        println!(
            "bar({}) = {}   total: {}",
            c.mor_label(m),
            c.mor_label(sp.rc.bar(m)),
            sp.rc.is_total(m)
        );
    }

    // The restriction order is inclusion of graphs.
    let hom = c.hom(b, b);
    let below: Vec<String> = hom
        .iter()
        .filter(|&&f| sp.rc.leq_unchecked(f, c.identity(b)))
        .map(|&f| c.mor_label(f))
        .collect();
    println!("\nmaps ⩽ 1 on the 2-element carrier: {below:?}");

    // Restriction idempotents biject with subsets.
    for a in c.objects() {
        let idems = sp.rc.restriction_idempotents(a);
        println!(
            "𝒪({}) has {} elements (2^{} subsets): {:?}",
            c.obj_label(a),
            idems.len(),
            sp.sizes[a.0],
            idems.iter().map(|&e| c.mor_label(e)).collect::<Vec<_>>()
        );
    }

    // Compatibility means agreement on the common domain.
    let f = sp.mor_of_graph(b, b, &vec![Some(0), None]).unwrap();
    let g = sp.mor_of_graph(b, b, &vec![None, Some(1)]).unwrap();
    let h = sp.mor_of_graph(b, b, &vec![Some(1), None]).unwrap();
    println!(
        "\ncompatible({}, {}) = {}",
        c.mor_label(f),
        c.mor_label(g),
        sp.rc.compatible(f, g).unwrap()
    );
    println!(
        "compatible({}, {}) = {}",
        c.mor_label(f),
        c.mor_label(h),
        sp.rc.compatible(f, h).unwrap()
    );
}
