//! Finite joins of compatible families: the J1-J3 axioms, join
//! restriction functors, the cover topology on hom-posets, etale maps
//! (discrete fibration + unique patching), locally etale 2-functors, and
//! lifting join structure along them.
//!
//! Joins are least upper bounds in the restriction order and are found
//! by search; a [`JoinStructure`] may additionally carry explicit
//! per-family overrides so that defective structures can be represented
//! and caught by [`verify_join`].

use crate::cat::{MorId, ObjId};
use crate::config::CheckConfig;
use crate::fibration::{
    gamma, is_discrete_fibration_map, is_local_discrete_fibration, lift_restriction,
    LocallyPosetal2Cat, TwoFunctor,
};
use crate::report::AxiomReport;
use crate::restriction::{is_restriction_functor, RestrictionCat};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A join structure on a restriction category. With no overrides the
/// join of a compatible family is its least upper bound computed by
/// search; overrides declare the join of specific families instead
/// (normally for planting defects in tests and golden files).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinStructure {
    pub host: RestrictionCat,
    overrides: BTreeMap<(usize, usize, Vec<usize>), MorId>,
}

impl JoinStructure {
    pub fn new(host: RestrictionCat) -> JoinStructure {
        JoinStructure { host, overrides: BTreeMap::new() }
    }

    /// Declares explicit joins for specific families of specific homs;
    /// everything else falls back to the least-upper-bound search.
    pub fn with_overrides(
        host: RestrictionCat,
        overrides: impl IntoIterator<Item = (ObjId, ObjId, Vec<MorId>, MorId)>,
    ) -> JoinStructure {
        let overrides = overrides
            .into_iter()
            .map(|(a, b, fam, j)| ((a.0, b.0, canonical_family(&fam)), j))
            .collect();
        JoinStructure { host, overrides }
    }

    pub fn overrides(&self) -> impl Iterator<Item = (ObjId, ObjId, Vec<MorId>, MorId)> + '_ {
        self.overrides.iter().map(|((a, b, k), &v)| {
            (ObjId(*a), ObjId(*b), k.iter().map(|&i| MorId(i)).collect(), v)
        })
    }

    /// The join of a pairwise-compatible family in `hom(a, b)`; the
    /// empty family yields the bottom (nowhere-defined) map of the hom.
    /// Incompatible families are rejected with a witness pair; a missing
    /// least upper bound is an error.
    pub fn join_of(&self, a: ObjId, b: ObjId, family: &[MorId]) -> Result<MorId> {
        let c = &self.host.base;
        for &f in family {
            if c.dom(f) != a || c.cod(f) != b {
                return Err(Error::Precondition(format!(
                    "family member {} is not in hom({}, {})",
                    c.mor_label(f),
                    c.obj_label(a),
                    c.obj_label(b)
                )));
            }
        }
        for (i, &f) in family.iter().enumerate() {
            for &g in &family[i + 1..] {
                if !self.host.compatible_unchecked(f, g) {
                    return Err(Error::Precondition(format!(
                        "incompatible pair ({}, {})",
                        c.mor_label(f),
                        c.mor_label(g)
                    )));
                }
            }
        }
        if let Some(&j) = self.overrides.get(&(a.0, b.0, canonical_family(family))) {
            return Ok(j);
        }
        let hom = c.hom(a, b);
        let uppers: Vec<MorId> = hom
            .iter()
            .copied()
            .filter(|&h| family.iter().all(|&f| self.host.leq_unchecked(f, h)))
            .collect();
        uppers
            .iter()
            .copied()
            .find(|&h| uppers.iter().all(|&u| self.host.leq_unchecked(h, u)))
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "family of size {} in hom({}, {}) has no least upper bound",
                    family.len(),
                    c.obj_label(a),
                    c.obj_label(b)
                ))
            })
    }
}

fn canonical_family(family: &[MorId]) -> Vec<usize> {
    let mut v: Vec<usize> = family.iter().map(|m| m.0).collect();
    v.sort();
    v.dedup();
    v
}

/// All pairwise-compatible families of a hom, including the empty one.
/// Small homs (up to the configured cap) enumerate every subset;
/// larger homs enumerate families up to the small size plus the full
/// hom when it happens to be compatible.
pub(crate) fn compatible_families(
    rc: &RestrictionCat,
    hom: &[MorId],
    cfg: &CheckConfig,
) -> Vec<Vec<MorId>> {
    let mut out = Vec::new();
    if hom.len() <= cfg.family_full_hom_cap {
        'mask: for mask in 0u32..(1 << hom.len()) {
            let fam: Vec<MorId> =
                (0..hom.len()).filter(|&i| mask & (1 << i) != 0).map(|i| hom[i]).collect();
            for (i, &f) in fam.iter().enumerate() {
                for &g in &fam[i + 1..] {
                    if !rc.compatible_unchecked(f, g) {
                        continue 'mask;
                    }
                }
            }
            out.push(fam);
        }
    } else {
        out.push(Vec::new());
        let k = cfg.family_small_size.min(hom.len());
        let mut stack: Vec<(Vec<MorId>, usize)> =
            vec![(Vec::new(), 0)];
        while let Some((fam, start)) = stack.pop() {
            if fam.len() >= k {
                continue;
            }
            for i in start..hom.len() {
                let cand = hom[i];
                if fam.iter().all(|&f| rc.compatible_unchecked(f, cand)) {
                    let mut next = fam.clone();
                    next.push(cand);
                    out.push(next.clone());
                    stack.push((next, i + 1));
                }
            }
        }
        if rc.family_compatible(hom) {
            out.push(hom.to_vec());
        }
    }
    out
}

/// Checks the least-upper-bound property of every (bounded) compatible
/// family, J1 (`overline(⋁fᵢ) = ⋁overline(fᵢ)`), J2
/// (`(⋁fᵢ)∘g = ⋁(fᵢ∘g)`), and J3 (`h∘(⋁fᵢ) = ⋁(h∘fᵢ)`). J3 follows
/// from the others but is checked, never assumed.
pub fn verify_join(js: &JoinStructure, cfg: &CheckConfig) -> AxiomReport {
    let rc = &js.host;
    let c = &rc.base;
    let mut rep = AxiomReport::default();
    let mut exists: Option<Vec<usize>> = None;
    let mut lub: Option<Vec<usize>> = None;
    let mut j1: Option<Vec<usize>> = None;
    let mut j2: Option<Vec<usize>> = None;
    let mut j3: Option<Vec<usize>> = None;

    for a in c.objects() {
        for b in c.objects() {
            let hom = c.hom(a, b);
            for fam in compatible_families(rc, &hom, cfg) {
                let wit = || fam.iter().map(|m| m.0).collect::<Vec<_>>();
                let j = match js.join_of(a, b, &fam) {
                    Ok(j) => j,
                    Err(_) => {
                        exists.get_or_insert_with(wit);
                        continue;
                    }
                };
                // A declared join outside the hom can never be a lub.
                if c.dom(j) != a || c.cod(j) != b {
                    lub.get_or_insert_with(|| {
                        let mut w = wit();
                        w.push(j.0);
                        w
                    });
                    continue;
                }
                let is_ub = fam.iter().all(|&f| rc.leq_unchecked(f, j));
                let least = hom
                    .iter()
                    .filter(|&&u| fam.iter().all(|&f| rc.leq_unchecked(f, u)))
                    .all(|&u| rc.leq_unchecked(j, u));
                if !is_ub || !least {
                    lub.get_or_insert_with(|| {
                        let mut w = wit();
                        w.push(j.0);
                        w
                    });
                    continue;
                }
                if j1.is_none() {
                    let bars: Vec<MorId> = fam.iter().map(|&f| rc.bar(f)).collect();
                    match js.join_of(a, a, &bars) {
                        Ok(jb) if jb == rc.bar(j) => {}
                        _ => {
                            j1 = Some(wit());
                        }
                    }
                }
                if j2.is_none() {
                    'j2: for x in c.objects() {
                        for g in c.hom(x, a) {
                            let shifted: Vec<MorId> =
                                fam.iter().map(|&f| c.comp(f, g)).collect();
                            let lhs = c.comp(j, g);
                            match js.join_of(x, b, &shifted) {
                                Ok(r) if r == lhs => {}
                                _ => {
                                    let mut w = wit();
                                    w.push(g.0);
                                    j2 = Some(w);
                                    break 'j2;
                                }
                            }
                        }
                    }
                }
                if j3.is_none() {
                    'j3: for y in c.objects() {
                        for h in c.hom(b, y) {
                            let shifted: Vec<MorId> =
                                fam.iter().map(|&f| c.comp(h, f)).collect();
                            let lhs = c.comp(h, j);
                            match js.join_of(a, y, &shifted) {
                                Ok(r) if r == lhs => {}
                                _ => {
                                    let mut w = wit();
                                    w.push(h.0);
                                    j3 = Some(w);
                                    break 'j3;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    match exists {
        Some(w) => rep.fail("exists", w, "compatible family without a join"),
        None => rep.pass("exists"),
    }
    match lub {
        Some(w) => rep.fail("lub", w, "declared join is not the least upper bound"),
        None => rep.pass("lub"),
    }
    match j1 {
        Some(w) => rep.fail("J1", w, "overline(⋁fᵢ) ≠ ⋁overline(fᵢ)"),
        None => rep.pass("J1"),
    }
    match j2 {
        Some(w) => rep.fail("J2", w, "(⋁fᵢ)∘g ≠ ⋁(fᵢ∘g)"),
        None => rep.pass("J2"),
    }
    match j3 {
        Some(w) => rep.fail("J3", w, "h∘(⋁fᵢ) ≠ ⋁(h∘fᵢ)"),
        None => rep.pass("J3"),
    }
    rep
}

/// Does `F` send the join of every (bounded) compatible family to the
/// join of the images? The empty family is included, so bottoms must be
/// preserved too.
pub fn is_join_functor(
    f: &crate::cat::FinFunctor,
    js_src: &JoinStructure,
    js_tgt: &JoinStructure,
    cfg: &CheckConfig,
) -> Result<bool> {
    if !is_restriction_functor(f, &js_src.host, &js_tgt.host) {
        return Err(Error::Precondition("not a restriction functor between the hosts".into()));
    }
    let c = &js_src.host.base;
    for a in c.objects() {
        for b in c.objects() {
            let hom = c.hom(a, b);
            for fam in compatible_families(&js_src.host, &hom, cfg) {
                let j = js_src.join_of(a, b, &fam)?;
                let image: Vec<MorId> = fam.iter().map(|&m| f.on_mor(m)).collect();
                let jt = js_tgt.join_of(f.on_obj(a), f.on_obj(b), &image)?;
                if f.on_mor(j) != jt {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A family `{fᵢ ⩽ f}` covers `f` exactly when its join is `f`.
pub fn is_cover(
    js: &JoinStructure,
    a: ObjId,
    b: ObjId,
    family: &[MorId],
    f: MorId,
) -> Result<bool> {
    for &m in family {
        if !js.host.leq(m, f)? {
            return Err(Error::Precondition(format!(
                "cover member {} is not below {}",
                js.host.base.mor_label(m),
                js.host.base.mor_label(f)
            )));
        }
    }
    Ok(js.join_of(a, b, family)? == f)
}

/// Etale map: postcomposition is a discrete fibration on every hom, and
/// every matching family over every (bounded) cover patches uniquely:
/// for a compatible `{fᵢ}` with `f∘fᵢ = gᵢ` and `g = ⋁gᵢ`, exactly one
/// `h` has `fᵢ ⩽ h` and `f∘h = g`.
pub fn is_etale_map(js: &JoinStructure, f: MorId, cfg: &CheckConfig) -> bool {
    let rc = &js.host;
    let c = &rc.base;
    let k2 = gamma(rc);
    if !is_discrete_fibration_map(&k2, f) {
        return false;
    }
    let (a, b) = (c.dom(f), c.cod(f));
    for x in c.objects() {
        let hom_xa = c.hom(x, a);
        for fam in compatible_families(rc, &hom_xa, cfg) {
            let images: Vec<MorId> = fam.iter().map(|&m| c.comp(f, m)).collect();
            let g = match js.join_of(x, b, &images) {
                Ok(g) => g,
                Err(_) => return false,
            };
            let patchings = hom_xa
                .iter()
                .filter(|&&h| {
                    c.comp(f, h) == g && fam.iter().all(|&m| rc.leq_unchecked(m, h))
                })
                .count();
            if patchings != 1 {
                return false;
            }
        }
    }
    true
}

/// Locally etale 2-functor into the Γ of a join host: every
/// hom-component is a discrete fibration and satisfies unique patching
/// for every (bounded) cover of the target hom. Matching families are
/// identified through the fibration lifts of the pairwise meets
/// `gᵢ ∧ gⱼ = gᵢ∘overline(gⱼ)`.
pub fn is_locally_etale(
    c2: &LocallyPosetal2Cat,
    f2: &TwoFunctor,
    d_js: &JoinStructure,
    cfg: &CheckConfig,
) -> Result<bool> {
    let d_rc = &d_js.host;
    if f2.fun.target != d_rc.base {
        return Err(Error::Structural("F must land in the base of the join host".into()));
    }
    let d2 = gamma(d_rc);
    let f2 = TwoFunctor::new(c2, &d2, f2.fun.clone())?;
    if !is_local_discrete_fibration(c2, &d2, &f2) {
        return Ok(false);
    }
    let c = &c2.base;
    let d = &d_rc.base;
    for a in c.objects() {
        for b in c.objects() {
            let hom_c = c.hom(a, b);
            let (fa, fb) = (f2.fun.on_obj(a), f2.fun.on_obj(b));
            let hom_d = d.hom(fa, fb);
            for cover in compatible_families(d_rc, &hom_d, cfg) {
                let g = d_js.join_of(fa, fb, &cover)?;
                // Matching families over the cover: choices fᵢ over gᵢ
                // agreeing on the lifted pairwise meets.
                let fibers: Vec<Vec<MorId>> = cover
                    .iter()
                    .map(|&gi| {
                        hom_c
                            .iter()
                            .copied()
                            .filter(|&m| f2.fun.on_mor(m) == gi)
                            .collect()
                    })
                    .collect();
                let mut choice = vec![0usize; cover.len()];
                if fibers.iter().any(|f| f.is_empty()) {
                    // no matching family over this cover from these homs
                    continue;
                }
                loop {
                    let fam: Vec<MorId> =
                        choice.iter().enumerate().map(|(i, &k)| fibers[i][k]).collect();
                    if matching_family(c2, &f2, d_rc, &hom_c, &fam, &cover) {
                        let patchings = hom_c
                            .iter()
                            .filter(|&&h| {
                                f2.fun.on_mor(h) == g
                                    && fam.iter().all(|&m| c2.le(m, h))
                            })
                            .count();
                        if patchings != 1 {
                            return Ok(false);
                        }
                    }
                    // odometer over the fiber choices
                    let mut i = 0;
                    loop {
                        if i == cover.len() {
                            break;
                        }
                        choice[i] += 1;
                        if choice[i] < fibers[i].len() {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                    }
                    if i == cover.len() {
                        break;
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `fᵢ|ⱼ = fⱼ|ᵢ` where `fᵢ|ⱼ` is the unique element `⩽ fᵢ` lying over
/// `gᵢ ∧ gⱼ`.
fn matching_family(
    c2: &LocallyPosetal2Cat,
    f2: &TwoFunctor,
    d_rc: &RestrictionCat,
    hom_c: &[MorId],
    fam: &[MorId],
    cover: &[MorId],
) -> bool {
    let d = &d_rc.base;
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            let meet = d.comp(cover[i], d_rc.bar(cover[j]));
            let lift = |over: MorId, below: MorId| -> Option<MorId> {
                let mut it = hom_c
                    .iter()
                    .copied()
                    .filter(|&m| c2.le(m, below) && f2.fun.on_mor(m) == over);
                let first = it.next();
                debug_assert!(it.next().is_none(), "fibration lifts are unique");
                first
            };
            match (lift(meet, fam[i]), lift(meet, fam[j])) {
                (Some(x), Some(y)) if x == y => {}
                _ => return false,
            }
        }
    }
    true
}

/// Lifts restriction structure along a locally etale `F` and equips the
/// result with joins: each (bounded) compatible family's join is the
/// unique patching over the cover of image joins, cross-checked against
/// the least-upper-bound search.
pub fn lift_join(
    c2: &LocallyPosetal2Cat,
    f2: &TwoFunctor,
    d_js: &JoinStructure,
    cfg: &CheckConfig,
) -> Result<(JoinStructure, crate::cat::FinFunctor)> {
    if !is_locally_etale(c2, f2, d_js, cfg)? {
        return Err(Error::Precondition("F is not locally etale".into()));
    }
    let (lifted, fun) = lift_restriction(c2, f2, &d_js.host)?;
    let js = JoinStructure::new(lifted);
    let c = &js.host.base;
    for a in c.objects() {
        for b in c.objects() {
            let hom = c.hom(a, b);
            for fam in compatible_families(&js.host, &hom, cfg) {
                let g = d_js.join_of(
                    f2.fun.on_obj(a),
                    f2.fun.on_obj(b),
                    &fam.iter().map(|&m| f2.fun.on_mor(m)).collect::<Vec<_>>(),
                )?;
                let patchings: Vec<MorId> = hom
                    .iter()
                    .copied()
                    .filter(|&h| {
                        f2.fun.on_mor(h) == g
                            && fam.iter().all(|&m| js.host.leq_unchecked(m, h))
                    })
                    .collect();
                if patchings.len() != 1 {
                    return Err(Error::Structural(format!(
                        "patching not unique ({} found) for a compatible family",
                        patchings.len()
                    )));
                }
                let by_search = js.join_of(a, b, &fam)?;
                if by_search != patchings[0] {
                    return Err(Error::Structural(
                        "patching disagrees with the least upper bound".into(),
                    ));
                }
            }
        }
    }
    let rep = verify_join(&js, cfg);
    if !rep.ok() {
        return Err(Error::Structural(format!("lifted joins fail J1-J3:\n{rep}")));
    }
    if !is_join_functor(&fun, &js, d_js, cfg)? {
        return Err(Error::Structural("lifted functor does not preserve joins".into()));
    }
    Ok((js, fun))
}
