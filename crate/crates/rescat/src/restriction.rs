//! The restriction operator `f ↦ f̄` and everything derived from it:
//! the four axioms R1-R4, the restriction partial order on hom-sets,
//! total maps, restriction idempotents, compatibility of parallel pairs,
//! and partial inverses / inverse-category detection.
//!
//! The axioms, with `f: A -> B`:
//!
//! - R1: `f∘f̄ = f`
//! - R2: `f̄∘ḡ = ḡ∘f̄` for `g: A -> C`
//! - R3: `overline(g∘f̄) = ḡ∘f̄` for `g: A -> C`
//! - R4: `ḡ∘f = f∘overline(g∘f)` for `g: B -> C`
//!
//! Checking is exhaustive over all applicable tuples; the quantification
//! domain is derived from dom/cod typing rather than trying all pairs.

use crate::cat::{FinCat, MorId, ObjId};
use crate::report::AxiomReport;
use crate::{Error, Result};

/// A finite category equipped with a candidate restriction operator.
/// The axioms are checked by [`verify_restriction`], not assumed at
/// construction; only the typing `bar(f): dom(f) -> dom(f)` is enforced
/// structurally there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionCat {
    pub base: FinCat,
    bar: Vec<MorId>,
}

impl RestrictionCat {
    pub fn new(base: FinCat, bar: Vec<MorId>) -> Result<RestrictionCat> {
        if bar.len() != base.n_morphisms() {
            return Err(Error::Structural(format!(
                "bar covers {} of {} morphisms",
                bar.len(),
                base.n_morphisms()
            )));
        }
        for m in &bar {
            if m.0 >= base.n_morphisms() {
                return Err(Error::Structural(format!("dangling MorId {} in bar", m.0)));
            }
        }
        Ok(RestrictionCat { base, bar })
    }

    pub fn bar(&self, f: MorId) -> MorId {
        self.bar[f.0]
    }

    pub fn bar_table(&self) -> &[MorId] {
        &self.bar
    }

    /// The restriction order: `f ⩽ g` iff `g∘f̄ = f`. Rejects
    /// non-parallel inputs.
    pub fn leq(&self, f: MorId, g: MorId) -> Result<bool> {
        if !self.base.parallel(f, g) {
            return Err(Error::Precondition(format!(
                "leq requires parallel morphisms, got {} and {}",
                self.base.mor_label(f),
                self.base.mor_label(g)
            )));
        }
        Ok(self.leq_unchecked(f, g))
    }

    /// `leq` on morphisms already known to be parallel.
    pub fn leq_unchecked(&self, f: MorId, g: MorId) -> bool {
        self.base.comp(g, self.bar(f)) == f
    }

    /// A map is total when its restriction is the identity.
    pub fn is_total(&self, f: MorId) -> bool {
        self.bar(f) == self.base.identity(self.base.dom(f))
    }

    /// The restriction idempotents on `a`: endomorphisms `e` with `ē = e`.
    pub fn restriction_idempotents(&self, a: ObjId) -> Vec<MorId> {
        self.base.endos(a).into_iter().filter(|&e| self.bar(e) == e).collect()
    }

    /// Compatibility of a parallel pair: `f∘ḡ = g∘f̄`.
    pub fn compatible(&self, f: MorId, g: MorId) -> Result<bool> {
        if !self.base.parallel(f, g) {
            return Err(Error::Precondition(
                "compatible requires parallel morphisms".into(),
            ));
        }
        Ok(self.compatible_unchecked(f, g))
    }

    pub fn compatible_unchecked(&self, f: MorId, g: MorId) -> bool {
        self.base.comp(f, self.bar(g)) == self.base.comp(g, self.bar(f))
    }

    /// Is the whole family pairwise compatible?
    pub fn family_compatible(&self, family: &[MorId]) -> bool {
        for (i, &f) in family.iter().enumerate() {
            for &g in &family[i + 1..] {
                if !self.base.parallel(f, g) || !self.compatible_unchecked(f, g) {
                    return false;
                }
            }
        }
        true
    }

    /// The unique `x*` with `x̄ = x*∘x` and `overline(x*) = x∘x*`, if one
    /// exists. Uniqueness holds in any restriction category; the search
    /// is exhaustive over the reverse hom.
    pub fn partial_inverse(&self, x: MorId) -> Option<MorId> {
        let (a, b) = (self.base.dom(x), self.base.cod(x));
        let mut found = None;
        for cand in self.base.hom(b, a) {
            if self.base.comp(cand, x) == self.bar(x)
                && self.base.comp(x, cand) == self.bar(cand)
            {
                debug_assert!(found.is_none(), "partial inverse not unique; axioms violated");
                found = Some(cand);
                if cfg!(not(debug_assertions)) {
                    break;
                }
            }
        }
        found
    }

    /// True iff every morphism is a partial isomorphism.
    pub fn is_inverse_category(&self) -> bool {
        self.base.morphisms().all(|x| self.partial_inverse(x).is_some())
    }
}

/// Checks R1-R4 over all applicable tuples, reporting the first witness
/// per failed axiom. A `bar` that is not endomorphism-valued on domains
/// is a structural failure reported before the axioms.
pub fn verify_restriction(rc: &RestrictionCat) -> AxiomReport {
    let c = &rc.base;
    let mut rep = AxiomReport::default();

    let mut structural = None;
    for f in c.morphisms() {
        let b = rc.bar(f);
        if c.dom(b) != c.dom(f) || c.cod(b) != c.dom(f) {
            structural = Some(f);
            break;
        }
    }
    if let Some(f) = structural {
        rep.fail(
            "structural",
            vec![f.0],
            format!("bar({}) is not an endomorphism of its domain", c.mor_label(f)),
        );
        return rep;
    }
    rep.pass("structural");

    // R1: f∘f̄ = f.
    let mut w = c.morphisms().find(|&f| c.comp(f, rc.bar(f)) != f);
    match w {
        Some(f) => rep.fail("R1", vec![f.0], "f∘f̄ ≠ f"),
        None => rep.pass("R1"),
    }

    // R2/R3 quantify over pairs f: A -> B, g: A -> C sharing a domain.
    let mut r2: Option<Vec<usize>> = None;
    let mut r3: Option<Vec<usize>> = None;
    'outer: for f in c.morphisms() {
        for g in c.morphisms() {
            if c.dom(g) != c.dom(f) {
                continue;
            }
            let (bf, bg) = (rc.bar(f), rc.bar(g));
            if r2.is_none() && c.comp(bf, bg) != c.comp(bg, bf) {
                r2 = Some(vec![f.0, g.0]);
            }
            if r3.is_none() && rc.bar(c.comp(g, bf)) != c.comp(bg, bf) {
                r3 = Some(vec![f.0, g.0]);
            }
            if r2.is_some() && r3.is_some() {
                break 'outer;
            }
        }
    }
    match r2 {
        Some(wit) => rep.fail("R2", wit, "f̄∘ḡ ≠ ḡ∘f̄"),
        None => rep.pass("R2"),
    }
    match r3 {
        Some(wit) => rep.fail("R3", wit, "overline(g∘f̄) ≠ ḡ∘f̄"),
        None => rep.pass("R3"),
    }

    // R4 quantifies over composable pairs f: A -> B, g: B -> C.
    w = None;
    'r4: for f in c.morphisms() {
        for g in c.morphisms() {
            if !c.composable(g, f) {
                continue;
            }
            let lhs = c.comp(rc.bar(g), f);
            let rhs = c.comp(f, rc.bar(c.comp(g, f)));
            if lhs != rhs {
                w = Some(f);
                rep.fail("R4", vec![f.0, g.0], "ḡ∘f ≠ f∘overline(g∘f)");
                break 'r4;
            }
        }
    }
    if w.is_none() {
        rep.pass("R4");
    }
    rep
}

/// A restriction functor preserves bar: `F(f̄) = overline(F f)`.
pub fn is_restriction_functor(
    f: &crate::cat::FinFunctor,
    src: &RestrictionCat,
    tgt: &RestrictionCat,
) -> bool {
    crate::cat::validate_functor(f).ok()
        && src
            .base
            .morphisms()
            .all(|m| f.on_mor(src.bar(m)) == tgt.bar(f.on_mor(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::cat::FinFunctor;
    use proptest::prelude::*;

    fn set_p_12() -> builders::SetPCat {
        builders::build_set_p(&[1, 2], &crate::CheckConfig::default()).unwrap()
    }

    #[test]
    fn set_p_passes_all_axioms() {
        let rc = &set_p_12().rc;
        let rep = verify_restriction(rc);
        assert!(rep.ok(), "{rep}");
    }

    #[test]
    fn trivial_bar_passes_symbolically_and_here() {
        // bar(f) = identity everywhere: R1 f∘1 = f; R2 1∘1 = 1∘1;
        // R3 overline(g∘1) = 1 = 1∘1; R4 1∘f = f = f∘1. Holds for any
        // category; spot-check on the finset base.
        let base = builders::finset_category(&[1, 2]);
        let rc = builders::build_trivial(&base).unwrap();
        assert!(verify_restriction(&rc).ok());
        assert!(rc.base.morphisms().all(|f| rc.is_total(f)));
    }

    #[test]
    fn planted_bar_defect_fails_r1_with_witness() {
        // One object {1, e}, e·e = e, bar(1) = e: then 1∘bar(1) = e ≠ 1.
        let c = crate::cat::FinCat::new(
            1,
            vec![crate::cat::ObjId(0); 2],
            vec![crate::cat::ObjId(0); 2],
            vec![MorId(0)],
            &[
                (MorId(0), MorId(0), MorId(0)),
                (MorId(0), MorId(1), MorId(1)),
                (MorId(1), MorId(0), MorId(1)),
                (MorId(1), MorId(1), MorId(1)),
            ],
        )
        .unwrap();
        let rc = RestrictionCat::new(c, vec![MorId(1), MorId(1)]).unwrap();
        let rep = verify_restriction(&rc);
        assert!(rep.failed("R1"));
        let r1 = rep.axioms.iter().find(|a| a.axiom == "R1").unwrap();
        assert_eq!(r1.witness.as_deref(), Some(&[0][..]));
    }

    #[test]
    fn leq_is_reflexive_by_r1_and_rejects_non_parallel() {
        let sp = set_p_12();
        for f in sp.rc.base.morphisms() {
            assert!(sp.rc.leq(f, f).unwrap());
        }
        let a = sp.rc.base.identity(crate::cat::ObjId(0));
        let cross = sp
            .rc
            .base
            .morphisms()
            .find(|&m| !sp.rc.base.parallel(m, a))
            .unwrap();
        assert!(sp.rc.leq(a, cross).is_err());
    }

    #[test]
    fn empty_map_below_everything_in_its_hom() {
        let sp = set_p_12();
        // hom({a,b} -> {c}): the empty partial map is ⩽ every parallel map;
        // two distinct total maps are incomparable both ways.
        for a in sp.rc.base.objects() {
            for b in sp.rc.base.objects() {
                let hom = sp.rc.base.hom(a, b);
                let bottom = hom
                    .iter()
                    .copied()
                    .find(|&m| sp.graph(m).iter().all(Option::is_none))
                    .unwrap();
                for &g in &hom {
                    assert!(sp.rc.leq(bottom, g).unwrap());
                }
            }
        }
    }

    #[test]
    fn distinct_total_maps_incomparable() {
        let sp = builders::build_set_p(&[2], &crate::CheckConfig::default()).unwrap();
        let a = crate::cat::ObjId(0);
        let totals: Vec<MorId> = sp
            .rc
            .base
            .endos(a)
            .into_iter()
            .filter(|&m| sp.rc.is_total(m))
            .collect();
        assert_eq!(totals.len(), 4);
        for &f in &totals {
            for &g in &totals {
                if f != g {
                    assert!(!sp.rc.leq(f, g).unwrap());
                }
            }
        }
    }

    #[test]
    fn totality_matches_graph_oracle() {
        let sp = set_p_12();
        for m in sp.rc.base.morphisms() {
            let everywhere_defined = sp.graph(m).iter().all(Option::is_some);
            assert_eq!(sp.rc.is_total(m), everywhere_defined);
        }
    }

    #[test]
    fn idempotent_count_is_powerset() {
        let sp = set_p_12();
        for a in sp.rc.base.objects() {
            let n = sp.sizes[a.0];
            assert_eq!(sp.rc.restriction_idempotents(a).len(), 1 << n);
        }
    }

    #[test]
    fn compatibility_matches_agreement_oracle() {
        let sp = set_p_12();
        for f in sp.rc.base.morphisms() {
            for g in sp.rc.base.morphisms() {
                if !sp.rc.base.parallel(f, g) {
                    continue;
                }
                let (gf, gg) = (sp.graph(f), sp.graph(g));
                let agree = gf
                    .iter()
                    .zip(gg.iter())
                    .all(|(x, y)| match (x, y) {
                        (Some(u), Some(v)) => u == v,
                        _ => true,
                    });
                assert_eq!(sp.rc.compatible(f, g).unwrap(), agree);
            }
        }
    }

    #[test]
    fn two_distinct_points_incompatible() {
        // set_p({1} -> {2}): both total points restrict to identities but
        // differ, so they are incompatible.
        let sp = set_p_12();
        let (a, b) = (crate::cat::ObjId(0), crate::cat::ObjId(1));
        let totals: Vec<MorId> = sp
            .rc
            .base
            .hom(a, b)
            .into_iter()
            .filter(|&m| sp.rc.is_total(m))
            .collect();
        assert_eq!(totals.len(), 2);
        assert!(!sp.rc.compatible(totals[0], totals[1]).unwrap());
    }

    #[test]
    fn symmetric_inverse_monoid_is_inverse_category() {
        let inv = builders::build_inverse_symmetric(2).unwrap();
        assert!(inv.rc.is_inverse_category());
        for x in inv.rc.base.morphisms() {
            let xs = inv.rc.partial_inverse(x).unwrap();
            // x̄ = x*∘x and the involution law.
            assert_eq!(inv.rc.bar(x), inv.rc.base.comp(xs, x));
            assert_eq!(inv.rc.partial_inverse(xs), Some(x));
        }
    }

    #[test]
    fn identity_is_its_own_partial_inverse() {
        let inv = builders::build_inverse_symmetric(2).unwrap();
        let id = inv.rc.base.identity(crate::cat::ObjId(0));
        assert_eq!(inv.rc.partial_inverse(id), Some(id));
    }

    #[test]
    fn set_p_is_not_inverse() {
        let sp = builders::build_set_p(&[2], &crate::CheckConfig::default()).unwrap();
        assert!(!sp.rc.is_inverse_category());
        // Witness: a non-injective total map has no partial inverse.
        let bad = sp
            .rc
            .base
            .morphisms()
            .find(|&m| {
                let g = sp.graph(m);
                g.iter().all(Option::is_some) && g[0] == g[1]
            })
            .unwrap();
        assert_eq!(sp.rc.partial_inverse(bad), None);
    }

    #[test]
    fn restriction_functor_check_sees_bar() {
        let sp = set_p_12();
        let ident = FinFunctor::identity(&sp.rc.base);
        assert!(is_restriction_functor(&ident, &sp.rc, &sp.rc));
        let trivial = builders::build_trivial(&sp.rc.base).unwrap();
        // Identity maps, wrong bar on the trivial side.
        assert!(!is_restriction_functor(&ident, &sp.rc, &trivial));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn bar_is_idempotent_and_order_is_transitive(seed in 0u64..1000) {
            let rc = builders::random_restriction_category(
                seed,
                &builders::RandomBounds::default(),
            ).unwrap();
            prop_assert!(verify_restriction(&rc).ok());
            for f in rc.base.morphisms() {
                let b = rc.bar(f);
                prop_assert_eq!(rc.bar(b), b);
                prop_assert_eq!(rc.base.comp(b, b), b);
            }
            // leq transitive + antisymmetric per hom.
            for f in rc.base.morphisms() {
                for g in rc.base.morphisms() {
                    if !rc.base.parallel(f, g) { continue; }
                    if rc.leq_unchecked(f, g) && rc.leq_unchecked(g, f) {
                        prop_assert_eq!(f, g);
                    }
                    for h in rc.base.morphisms() {
                        if rc.base.parallel(g, h)
                            && rc.leq_unchecked(f, g)
                            && rc.leq_unchecked(g, h)
                        {
                            prop_assert!(rc.leq_unchecked(f, h));
                        }
                    }
                }
            }
        }

        #[test]
        fn idempotents_commute_and_totals_compose(seed in 0u64..1000) {
            let rc = builders::random_restriction_category(
                seed,
                &builders::RandomBounds::default(),
            ).unwrap();
            for a in rc.base.objects() {
                let idems = rc.restriction_idempotents(a);
                for &e in &idems {
                    for &e2 in &idems {
                        let m = rc.base.comp(e, e2);
                        prop_assert_eq!(m, rc.base.comp(e2, e));
                        prop_assert!(rc.bar(m) == m, "idempotents closed under composition");
                    }
                }
                prop_assert!(rc.is_total(rc.base.identity(a)));
            }
            for f in rc.base.morphisms() {
                for g in rc.base.morphisms() {
                    if rc.base.composable(g, f) && rc.is_total(f) && rc.is_total(g) {
                        prop_assert!(rc.is_total(rc.base.comp(g, f)));
                    }
                }
            }
        }

        #[test]
        fn order_preserved_by_composition(seed in 0u64..500) {
            let rc = builders::random_restriction_category(
                seed,
                &builders::RandomBounds::default(),
            ).unwrap();
            for f in rc.base.morphisms() {
                for g in rc.base.morphisms() {
                    if !rc.base.parallel(f, g) || !rc.leq_unchecked(f, g) { continue; }
                    for h in rc.base.morphisms() {
                        if rc.base.composable(h, f) {
                            prop_assert!(rc.leq_unchecked(
                                rc.base.comp(h, f), rc.base.comp(h, g)));
                        }
                        if rc.base.composable(f, h) {
                            prop_assert!(rc.leq_unchecked(
                                rc.base.comp(f, h), rc.base.comp(g, h)));
                        }
                    }
                }
            }
        }
    }
}
