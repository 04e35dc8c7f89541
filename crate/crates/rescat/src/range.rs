//! Range operators `f ↦ f̂`: the RR1-RR4 axioms, exhaustive uniqueness,
//! derivation from open fundamental-functor images via
//! `f̂ = f_!(overline(f))`, range-preserving functors, and the
//! Beck-Chevalley characterisation of range preservation.

use crate::cat::{FinFunctor, MorId};
use crate::config::CheckConfig;
use crate::fundamental::{comparison_phi, fundamental_functor, FundamentalResult};
use crate::report::AxiomReport;
use crate::restriction::{is_restriction_functor, RestrictionCat};
use crate::semilattice::{beck_chevalley, local_left_adjoint, StabSquare, StableMap};
use crate::{Error, Result};

/// A restriction category with a candidate range operator. RR1-RR4 are
/// checked by [`verify_range`], not assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeStructure {
    pub host: RestrictionCat,
    hat: Vec<MorId>,
}

impl RangeStructure {
    pub fn new(host: RestrictionCat, hat: Vec<MorId>) -> Result<RangeStructure> {
        if hat.len() != host.base.n_morphisms() {
            return Err(Error::Structural(format!(
                "hat covers {} of {} morphisms",
                hat.len(),
                host.base.n_morphisms()
            )));
        }
        if hat.iter().any(|m| m.0 >= host.base.n_morphisms()) {
            return Err(Error::Structural("dangling MorId in hat".into()));
        }
        Ok(RangeStructure { host, hat })
    }

    pub fn hat(&self, f: MorId) -> MorId {
        self.hat[f.0]
    }

    pub fn hat_table(&self) -> &[MorId] {
        &self.hat
    }
}

/// Checks RR1 (`overline(f̂) = f̂`), RR2 (`f̂∘f = f`), RR3
/// (`hat(ḡ∘f) = ḡ∘f̂`), RR4 (`hat(g∘f̂) = hat(g∘f)`) over all applicable
/// tuples. `hat` not valued in codomain endomorphisms is a structural
/// failure.
pub fn verify_range(rs: &RangeStructure) -> AxiomReport {
    let rc = &rs.host;
    let c = &rc.base;
    let mut rep = AxiomReport::default();
    for f in c.morphisms() {
        let h = rs.hat(f);
        if c.dom(h) != c.cod(f) || c.cod(h) != c.cod(f) {
            rep.fail(
                "structural",
                vec![f.0],
                format!("hat({}) is not an endomorphism of the codomain", c.mor_label(f)),
            );
            return rep;
        }
    }
    rep.pass("structural");

    match c.morphisms().find(|&f| rc.bar(rs.hat(f)) != rs.hat(f)) {
        Some(f) => rep.fail("RR1", vec![f.0], "f̂ is not a restriction idempotent"),
        None => rep.pass("RR1"),
    }
    match c.morphisms().find(|&f| c.comp(rs.hat(f), f) != f) {
        Some(f) => rep.fail("RR2", vec![f.0], "f̂∘f ≠ f"),
        None => rep.pass("RR2"),
    }

    let mut rr3: Option<Vec<usize>> = None;
    let mut rr4: Option<Vec<usize>> = None;
    'outer: for f in c.morphisms() {
        for g in c.morphisms() {
            if !c.composable(g, f) {
                continue;
            }
            if rr3.is_none() {
                let lhs = rs.hat(c.comp(rc.bar(g), f));
                let rhs = c.comp(rc.bar(g), rs.hat(f));
                if lhs != rhs {
                    rr3 = Some(vec![f.0, g.0]);
                }
            }
            if rr4.is_none() {
                let lhs = rs.hat(c.comp(g, rs.hat(f)));
                let rhs = rs.hat(c.comp(g, f));
                if lhs != rhs {
                    rr4 = Some(vec![f.0, g.0]);
                }
            }
            if rr3.is_some() && rr4.is_some() {
                break 'outer;
            }
        }
    }
    match rr3 {
        Some(w) => rep.fail("RR3", w, "hat(ḡ∘f) ≠ ḡ∘f̂"),
        None => rep.pass("RR3"),
    }
    match rr4 {
        Some(w) => rep.fail("RR4", w, "hat(g∘f̂) ≠ hat(g∘f)"),
        None => rep.pass("RR4"),
    }
    rep
}

/// Exhaustively enumerates every range operator on `rc`: assignments
/// `hat: Mor -> Mor` valued in restriction idempotents of the codomain
/// with `f̂∘f = f`, filtered by RR1-RR4 via backtracking. At most one
/// survives.
pub fn enumerate_range_operators(
    rc: &RestrictionCat,
    cfg: &CheckConfig,
) -> Result<Vec<RangeStructure>> {
    let c = &rc.base;
    if c.n_morphisms() > cfg.range_enum_cap {
        return Err(Error::Bounds(format!(
            "{} morphisms exceeds the enumeration bound {}",
            c.n_morphisms(),
            cfg.range_enum_cap
        )));
    }
    // RR1 + RR2 prune the candidate set per morphism.
    let candidates: Vec<Vec<MorId>> = c
        .morphisms()
        .map(|f| {
            rc.restriction_idempotents(c.cod(f))
                .into_iter()
                .filter(|&e| c.comp(e, f) == f)
                .collect()
        })
        .collect();
    let mut found = Vec::new();
    let mut assign: Vec<Option<MorId>> = vec![None; c.n_morphisms()];
    backtrack_hat(rc, &candidates, &mut assign, 0, &mut found);
    for rs in &found {
        debug_assert!(verify_range(rs).ok());
    }
    if found.len() > 1 {
        return Err(Error::Structural(format!(
            "uniqueness violated: {} range operators found",
            found.len()
        )));
    }
    Ok(found)
}

fn backtrack_hat(
    rc: &RestrictionCat,
    candidates: &[Vec<MorId>],
    assign: &mut Vec<Option<MorId>>,
    i: usize,
    found: &mut Vec<RangeStructure>,
) {
    let c = &rc.base;
    let n = c.n_morphisms();
    if i == n {
        let hat: Vec<MorId> = assign.iter().map(|x| x.unwrap()).collect();
        let rs = RangeStructure { host: rc.clone(), hat };
        if verify_range(&rs).ok() {
            found.push(rs);
        }
        return;
    }
    'cand: for &e in &candidates[i] {
        assign[i] = Some(e);
        // Incremental RR3/RR4 on pairs whose hats are all decided.
        for f in 0..=i {
            for g in 0..=i {
                let (fm, gm) = (MorId(f), MorId(g));
                if !c.composable(gm, fm) {
                    continue;
                }
                let hat_f = assign[f].unwrap();
                // RR3 needs hat(ḡ∘f); RR4 needs hat(g∘f̂) and hat(g∘f).
                let bgf = c.comp(rc.bar(gm), fm);
                if bgf.0 <= i {
                    if let Some(h) = assign[bgf.0] {
                        if h != c.comp(rc.bar(gm), hat_f) {
                            continue 'cand;
                        }
                    }
                }
                let ghf = c.comp(gm, hat_f);
                let gf = c.comp(gm, fm);
                if ghf.0 <= i && gf.0 <= i {
                    if let (Some(a), Some(b)) = (assign[ghf.0], assign[gf.0]) {
                        if a != b {
                            continue 'cand;
                        }
                    }
                }
            }
        }
        backtrack_hat(rc, candidates, assign, i + 1, found);
    }
    assign[i] = None;
}

/// Outcome of [`derive_range`].
#[derive(Clone, Debug)]
pub enum DeriveRange {
    /// Every `f*` is open; the operator is `f̂ = f_!(overline(f))`.
    Derived(RangeStructure, FundamentalResult),
    /// Some `f*` is not open; no range operator exists.
    NonOpen { witness: MorId },
}

impl DeriveRange {
    pub fn structure(&self) -> Option<&RangeStructure> {
        match self {
            DeriveRange::Derived(rs, _) => Some(rs),
            DeriveRange::NonOpen { .. } => None,
        }
    }
}

/// Derives the range operator from the fundamental functor: tests every
/// `f*` for openness and, when all are open, sets `f̂` to the host
/// idempotent realising `f_!(overline(f)) ∈ 𝒪(cod f)`.
pub fn derive_range(rc: &RestrictionCat) -> Result<DeriveRange> {
    let fund = fundamental_functor(rc)?;
    let c = &rc.base;
    let mut hat = Vec::with_capacity(c.n_morphisms());
    for f in c.morphisms() {
        let (a, b) = (c.dom(f), c.cod(f));
        let star = fund.stab.stable_map_of(fund.functor.on_mor(f));
        let adj = match local_left_adjoint(&star) {
            Some(adj) if adj.frobenius => adj,
            _ => return Ok(DeriveRange::NonOpen { witness: f }),
        };
        // f̂ = f_!(f̄): f̄ is the top of the downset 𝒪(A)/f̄.
        let bar_pos = fund
            .idem_position(a, rc.bar(f))
            .expect("bar lands in the idempotent lattice");
        let down_pos = adj.downset.position(bar_pos).expect("f̄ bounds its own downset");
        let value = adj.map[down_pos];
        hat.push(fund.idem_of[b.0][value]);
    }
    let rs = RangeStructure { host: rc.clone(), hat };
    let rep = verify_range(&rs);
    if !rep.ok() {
        return Err(Error::Structural(format!(
            "derived operator fails RR1-RR4:\n{rep}"
        )));
    }
    Ok(DeriveRange::Derived(rs, fund))
}

/// Does `F` commute with the range operators everywhere?
pub fn is_range_functor(
    f: &FinFunctor,
    rs_src: &RangeStructure,
    rs_tgt: &RangeStructure,
) -> Result<bool> {
    if !is_restriction_functor(f, &rs_src.host, &rs_tgt.host) {
        return Err(Error::Precondition("not a restriction functor between the hosts".into()));
    }
    Ok(rs_src
        .host
        .base
        .morphisms()
        .all(|m| f.on_mor(rs_src.hat(m)) == rs_tgt.hat(f.on_mor(m))))
}

/// Range preservation through the Beck-Chevalley lens: every naturality
/// square of the comparison transformation, read in `Stab`, must be
/// Beck-Chevalley. For `f: A -> B` the square is
///
/// ```text
///              f*
///     𝒪(B) --------> 𝒪(A)
///       |              |
///   φ_B |              | φ_A
///       v              v
///     𝒪(FB) -------> 𝒪(FA)
///             (Ff)*
/// ```
pub fn range_preservation_via_bc(
    f: &FinFunctor,
    src: &RestrictionCat,
    tgt: &RestrictionCat,
) -> Result<bool> {
    let phi = comparison_phi(f, src, tgt)?;
    let (fund_c, fund_d) = (&phi.fund_src, &phi.fund_tgt);
    let c = &src.base;
    let phi_fn = |a: crate::cat::ObjId| -> StableMap {
        let fa = f.on_obj(a);
        StableMap {
            source: fund_c.lattice_of(a).clone(),
            target: fund_d.lattice_of(fa).clone(),
            map: fund_c.idem_of[a.0]
                .iter()
                .map(|&e| fund_d.idem_position(fa, f.on_mor(e)).unwrap())
                .collect(),
        }
    };
    for m in c.morphisms() {
        let (a, b) = (c.dom(m), c.cod(m));
        let star = fund_c.stab.stable_map_of(fund_c.functor.on_mor(m));
        let fstar = fund_d.stab.stable_map_of(fund_d.functor.on_mor(f.on_mor(m)));
        let sq = StabSquare::new(star, phi_fn(b), phi_fn(a), fstar)?;
        if !beck_chevalley(&sq)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::cat::ObjId;
    use crate::CheckConfig;

    #[test]
    fn set_p_image_formula_passes() {
        let sp = builders::build_set_p(&[2], &CheckConfig::default()).unwrap();
        let rep = verify_range(&sp.range);
        assert!(rep.ok(), "{rep}");
        // hat(1_A) = 1_A, forced by RR1+RR2.
        let id = sp.rc.base.identity(ObjId(0));
        assert_eq!(sp.range.hat(id), id);
    }

    #[test]
    fn planted_hat_defect_fails_rr3() {
        let sp = builders::build_set_p(&[2], &CheckConfig::default()).unwrap();
        // Point hat of a strictly partial map at the identity.
        let partial = sp
            .rc
            .base
            .morphisms()
            .find(|&m| {
                let g = sp.graph(m);
                !sp.rc.is_total(m) && g.iter().any(Option::is_some)
            })
            .unwrap();
        let mut hat: Vec<MorId> = sp.range.hat_table().to_vec();
        hat[partial.0] = sp.rc.base.identity(sp.rc.base.cod(partial));
        let rs = RangeStructure::new(sp.rc.clone(), hat).unwrap();
        let rep = verify_range(&rs);
        assert!(!rep.ok());
        assert!(rep.failed("RR3") || rep.failed("RR4") || rep.failed("RR2"), "{rep}");
    }

    #[test]
    fn derive_range_matches_image_formula_on_set_p() {
        let sp = builders::build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        match derive_range(&sp.rc).unwrap() {
            DeriveRange::Derived(rs, _) => {
                assert_eq!(rs.hat_table(), sp.range.hat_table());
            }
            DeriveRange::NonOpen { .. } => panic!("set_p has a range operator"),
        }
    }

    #[test]
    fn derive_range_on_inverse_monoid_is_corestriction() {
        let inv = builders::build_inverse_symmetric(2).unwrap();
        match derive_range(&inv.rc).unwrap() {
            DeriveRange::Derived(rs, _) => {
                for x in inv.rc.base.morphisms() {
                    let xs = inv.rc.partial_inverse(x).unwrap();
                    assert_eq!(rs.hat(x), inv.rc.base.comp(x, xs));
                }
                assert_eq!(rs.hat_table(), inv.range.hat_table());
            }
            DeriveRange::NonOpen { .. } => panic!("inverse categories have ranges"),
        }
    }

    #[test]
    fn enumeration_finds_exactly_the_derived_operator() {
        let cfg = CheckConfig::default();
        let sp = builders::build_set_p(&[1], &cfg).unwrap();
        let ops = enumerate_range_operators(&sp.rc, &cfg).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].hat_table(), sp.range.hat_table());
        //

        let inv = builders::build_inverse_symmetric(2).unwrap();
        let ops = enumerate_range_operators(&inv.rc, &cfg).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].hat_table(), inv.range.hat_table());
    }

    #[test]
    fn trivial_structure_forces_identity_hat() {
        // On a group-as-category every map is total; hat = 1 everywhere.
        let cfg = CheckConfig::default();
        let base = crate::cat::FinCat::new(
            1,
            vec![ObjId(0); 2],
            vec![ObjId(0); 2],
            vec![MorId(0)],
            &[
                (MorId(0), MorId(0), MorId(0)),
                (MorId(0), MorId(1), MorId(1)),
                (MorId(1), MorId(0), MorId(1)),
                (MorId(1), MorId(1), MorId(0)),
            ],
        )
        .unwrap();
        let rc = builders::build_trivial(&base).unwrap();
        let ops = enumerate_range_operators(&rc, &cfg).unwrap();
        assert_eq!(ops.len(), 1);
        assert!(rc.base.morphisms().all(|m| ops[0].hat(m) == MorId(0)));
    }

    #[test]
    fn bound_rejected() {
        let cfg = CheckConfig::default();
        let sp = builders::build_set_p(&[1, 2, 3], &cfg).unwrap();
        assert!(matches!(
            enumerate_range_operators(&sp.rc, &cfg),
            Err(crate::Error::Bounds(_))
        ));
    }

    #[test]
    fn hat_is_least_idempotent_fixing_f() {
        // Artifact cross-check: f̂ is the least e ∈ 𝒪(cod f) with e∘f = f.
        let sp = builders::build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        for f in sp.rc.base.morphisms() {
            let h = sp.range.hat(f);
            let b = sp.rc.base.cod(f);
            for e in sp.rc.restriction_idempotents(b) {
                if sp.rc.base.comp(e, f) == f {
                    assert!(sp.rc.leq_unchecked(h, e));
                }
            }
        }
    }

    #[test]
    fn identity_functor_preserves_ranges_and_bc_agrees() {
        let sp = builders::build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        let id = crate::cat::FinFunctor::identity(&sp.rc.base);
        assert!(is_range_functor(&id, &sp.range, &sp.range).unwrap());
        assert!(range_preservation_via_bc(&id, &sp.rc, &sp.rc).unwrap());
    }
}
