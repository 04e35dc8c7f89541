//! Partial maps as spans: `Par(D, M)` over finite sets and injections
//! reproduces sets-and-partial-functions, with restriction
//! `(m, g) ↦ (m, m)` and composition by pullback.

use rescat::builders::{build_par, build_set_p, finset_category};
use rescat::cat::is_mono;
use rescat::restriction::verify_restriction;
use rescat::CheckConfig;

fn main() {
    let d = finset_category(&[0, 1, 2]);
    let monos: Vec<_> = d.morphisms().filter(|&m| is_mono(&d, m)).collect();
    println!(
        "base: finite sets of sizes 0,1,2 with {} total maps, {} of them monic",
        d.n_morphisms(),
        monos.len()
    );

    let par = build_par(&d, &monos).unwrap();
    println!("Par(D, M) has {} span classes", par.rc.base.n_morphisms());
    println!("R1-R4:\n{}", verify_restriction(&par.rc));

    let sp = build_set_p(&[0, 1, 2], &CheckConfig::default()).unwrap();
    println!(
        "set_p on the same sizes has {} partial functions -- the counts match hom by hom:",
        sp.rc.base.n_morphisms()
    );
    for a in par.rc.base.objects() {
        for b in par.rc.base.objects() {
            let spans = par.rc.base.hom(a, b).len();
            let pfns = sp.rc.base.hom(a, b).len();
            assert_eq!(spans, pfns);
            print!("{spans:3}");
        }
        println!();
    }

    // A span and its restriction.
    let m = par
        .rc
        .base
        .morphisms()
        .find(|&s| !par.rc.is_total(s) && par.rc.base.dom(s) != par.rc.base.cod(s))
        .unwrap();
    println!(
        "\nexample span {}: bar = {} (left leg doubled)",
        par.rc.base.mor_label(m),
        par.rc.base.mor_label(par.rc.bar(m))
    );
}
