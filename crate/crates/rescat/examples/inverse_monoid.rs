//! The symmetric inverse monoid I_2: every partial injection has a
//! unique partial inverse, and the restriction/range structure is
//! x̄ = x*∘x and x̂ = x∘x*.

use rescat::builders::build_inverse_symmetric;
use rescat::range::{derive_range, DeriveRange};

fn main() {
    for n in 1..=3 {
        let inv = build_inverse_symmetric(n).unwrap();
        println!("I_{n}: {} partial injections", inv.rc.base.n_morphisms());
    }

    let inv = build_inverse_symmetric(2).unwrap();
    let c = &inv.rc.base;
    println!("\nI_2 is an inverse category: {}", inv.rc.is_inverse_category());
    for x in c.morphisms() {
        let xs = inv.rc.partial_inverse(x).unwrap();
        println!(
            "x = {:3}  x* = {:3}  x*∘x = {:3}  x∘x* = {:3}",
            c.mor_label(x),
            c.mor_label(xs),
            c.mor_label(c.comp(xs, x)),
            c.mor_label(c.comp(x, xs)),
        );
        assert_eq!(inv.rc.bar(x), c.comp(xs, x));
        assert_eq!(inv.rc.partial_inverse(xs), Some(x));
    }

    match derive_range(&inv.rc).unwrap() {
        DeriveRange::Derived(rs, _) => {
            println!("\nderived range operator (x̂ = x∘x*):");
            for x in c.morphisms() {
                println!("  hat({}) = {}", c.mor_label(x), c.mor_label(rs.hat(x)));
            }
        }
        DeriveRange::NonOpen { .. } => unreachable!("inverse categories have ranges"),
    }
}
