//! Restriction categories as locally posetal 2-categories: the Γ
//! construction equips each hom-set with the restriction order, and the
//! structure can be pulled back again along local discrete fibrations.
//! Discrete fibration checks come in three flavours: of poset maps, of
//! 2-functors (hom by hom), and of single maps (postcomposition on every
//! hom).

use crate::cat::{validate_functor, FinCat, FinFunctor, MorId, ObjId};
use crate::restriction::{verify_restriction, RestrictionCat};
use crate::{Error, Result};

/// A finite poset as an explicit relation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    size: usize,
    leq: Vec<bool>,
}

impl FinPoset {
    pub fn new(size: usize, leq: Vec<bool>) -> Result<FinPoset> {
        if leq.len() != size * size {
            return Err(Error::Structural("poset table has wrong size".into()));
        }
        let p = FinPoset { size, leq };
        for a in 0..size {
            if !p.le(a, a) {
                return Err(Error::Structural("poset order not reflexive".into()));
            }
            for b in 0..size {
                if a != b && p.le(a, b) && p.le(b, a) {
                    return Err(Error::Structural("poset order not antisymmetric".into()));
                }
                for c in 0..size {
                    if p.le(a, b) && p.le(b, c) && !p.le(a, c) {
                        return Err(Error::Structural("poset order not transitive".into()));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }
}

/// A monotone map of finite posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePosetMap {
    pub src: FinPoset,
    pub tgt: FinPoset,
    pub map: Vec<usize>,
}

impl MonotonePosetMap {
    pub fn new(src: FinPoset, tgt: FinPoset, map: Vec<usize>) -> Result<MonotonePosetMap> {
        if map.len() != src.size() || map.iter().any(|&v| v >= tgt.size()) {
            return Err(Error::Structural("poset map table malformed".into()));
        }
        for a in 0..src.size() {
            for b in 0..src.size() {
                if src.le(a, b) && !tgt.le(map[a], map[b]) {
                    return Err(Error::Precondition("map is not monotone".into()));
                }
            }
        }
        Ok(MonotonePosetMap { src, tgt, map })
    }
}

/// Unique lifting of lower bounds: for every `e` and every
/// `b ⩽ p(e)` there is exactly one `e' ⩽ e` with `p(e') = b`.
pub fn is_discrete_fibration_poset(p: &MonotonePosetMap) -> bool {
    for e in 0..p.src.size() {
        for b in 0..p.tgt.size() {
            if !p.tgt.le(b, p.map[e]) {
                continue;
            }
            let lifts =
                (0..p.src.size()).filter(|&x| p.src.le(x, e) && p.map[x] == b).count();
            if lifts != 1 {
                return false;
            }
        }
    }
    true
}

/// A finite category whose hom-sets carry partial orders closed under
/// whiskering on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocallyPosetal2Cat {
    pub base: FinCat,
    /// Order on parallel pairs, flat `n_mor * n_mor`.
    leq: Vec<bool>,
}

impl LocallyPosetal2Cat {
    /// `pairs` lists the related pairs `(f, g)` meaning `f ⩽ g`;
    /// reflexivity is added automatically. Validates poset axioms per
    /// hom and whisker closure.
    pub fn new(base: FinCat, pairs: &[(MorId, MorId)]) -> Result<LocallyPosetal2Cat> {
        let n = base.n_morphisms();
        let mut leq = vec![false; n * n];
        for m in base.morphisms() {
            leq[m.0 * n + m.0] = true;
        }
        for &(f, g) in pairs {
            if f.0 >= n || g.0 >= n {
                return Err(Error::Structural("dangling MorId in hom order".into()));
            }
            if !base.parallel(f, g) {
                return Err(Error::Structural(format!(
                    "hom order relates non-parallel {} ⩽ {}",
                    base.mor_label(f),
                    base.mor_label(g)
                )));
            }
            leq[f.0 * n + g.0] = true;
        }
        let k2 = LocallyPosetal2Cat { base, leq };
        k2.validate()?;
        Ok(k2)
    }

    fn validate(&self) -> Result<()> {
        let c = &self.base;
        for f in c.morphisms() {
            for g in c.morphisms() {
                if f != g && self.le(f, g) && self.le(g, f) {
                    return Err(Error::Structural("hom order not antisymmetric".into()));
                }
                for h in c.morphisms() {
                    if self.le(f, g) && self.le(g, h) && !self.le(f, h) {
                        return Err(Error::Structural("hom order not transitive".into()));
                    }
                }
            }
        }
        // Whisker closure: f ⩽ g implies w∘f∘u ⩽ w∘g∘u when composable.
        for f in c.morphisms() {
            for g in c.morphisms() {
                if f == g || !self.le(f, g) {
                    continue;
                }
                for u in c.morphisms() {
                    if c.composable(f, u) && !self.le(c.comp(f, u), c.comp(g, u)) {
                        return Err(Error::Structural("hom order not closed under precomposition".into()));
                    }
                    if c.composable(u, f) && !self.le(c.comp(u, f), c.comp(u, g)) {
                        return Err(Error::Structural("hom order not closed under postcomposition".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn le(&self, f: MorId, g: MorId) -> bool {
        self.leq[f.0 * self.base.n_morphisms() + g.0]
    }

    /// The hom-poset on `a -> b`: element ids are positions into the
    /// returned morphism list.
    pub fn hom_poset(&self, a: ObjId, b: ObjId) -> (Vec<MorId>, FinPoset) {
        let elems = self.base.hom(a, b);
        let k = elems.len();
        let mut leq = vec![false; k * k];
        for (i, &f) in elems.iter().enumerate() {
            for (j, &g) in elems.iter().enumerate() {
                leq[i * k + j] = self.le(f, g);
            }
        }
        (elems.clone(), FinPoset { size: k, leq })
    }
}

/// Γ: the restriction order `f ⩽ g ⇔ g∘f̄ = f` as a locally posetal
/// 2-category on the same base.
pub fn gamma(rc: &RestrictionCat) -> LocallyPosetal2Cat {
    let c = &rc.base;
    let mut pairs = Vec::new();
    for f in c.morphisms() {
        for g in c.morphisms() {
            if f != g && c.parallel(f, g) && rc.leq_unchecked(f, g) {
                pairs.push((f, g));
            }
        }
    }
    LocallyPosetal2Cat::new(c.clone(), &pairs)
        .expect("the restriction order is always whisker-closed")
}

/// A 2-functor between locally posetal 2-categories: a functor of the
/// bases that is monotone on every hom. Construction validates both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoFunctor {
    pub fun: FinFunctor,
}

impl TwoFunctor {
    pub fn new(
        c2: &LocallyPosetal2Cat,
        d2: &LocallyPosetal2Cat,
        fun: FinFunctor,
    ) -> Result<TwoFunctor> {
        if fun.source != c2.base || fun.target != d2.base {
            return Err(Error::Structural("2-functor endpoints disagree".into()));
        }
        let rep = validate_functor(&fun);
        if !rep.ok() {
            return Err(Error::Precondition(format!("underlying functor invalid:\n{rep}")));
        }
        for f in c2.base.morphisms() {
            for g in c2.base.morphisms() {
                if c2.base.parallel(f, g) && c2.le(f, g) && !d2.le(fun.on_mor(f), fun.on_mor(g)) {
                    return Err(Error::Precondition(format!(
                        "not monotone at {} ⩽ {}",
                        c2.base.mor_label(f),
                        c2.base.mor_label(g)
                    )));
                }
            }
        }
        Ok(TwoFunctor { fun })
    }

    pub fn identity(c2: &LocallyPosetal2Cat) -> TwoFunctor {
        TwoFunctor { fun: FinFunctor::identity(&c2.base) }
    }
}

/// Local discrete fibration: every hom-component is a discrete
/// fibration of posets.
pub fn is_local_discrete_fibration(
    c2: &LocallyPosetal2Cat,
    d2: &LocallyPosetal2Cat,
    f2: &TwoFunctor,
) -> bool {
    for a in c2.base.objects() {
        for b in c2.base.objects() {
            let (src_elems, src_poset) = c2.hom_poset(a, b);
            let (tgt_elems, tgt_poset) =
                d2.hom_poset(f2.fun.on_obj(a), f2.fun.on_obj(b));
            let map: Vec<usize> = src_elems
                .iter()
                .map(|&m| {
                    tgt_elems
                        .iter()
                        .position(|&t| t == f2.fun.on_mor(m))
                        .expect("functor typing was validated")
                })
                .collect();
            let p = MonotonePosetMap { src: src_poset, tgt: tgt_poset, map };
            if !is_discrete_fibration_poset(&p) {
                return false;
            }
        }
    }
    true
}

/// A single map `f` is a discrete fibration in the 2-category when
/// postcomposition by it is a discrete fibration on every hom-poset.
pub fn is_discrete_fibration_map(k2: &LocallyPosetal2Cat, f: MorId) -> bool {
    let c = &k2.base;
    let (a, b) = (c.dom(f), c.cod(f));
    for x in c.objects() {
        let (src_elems, src_poset) = k2.hom_poset(x, a);
        let (tgt_elems, tgt_poset) = k2.hom_poset(x, b);
        let map: Vec<usize> = src_elems
            .iter()
            .map(|&u| tgt_elems.iter().position(|&t| t == c.comp(f, u)).unwrap())
            .collect();
        let p = MonotonePosetMap { src: src_poset, tgt: tgt_poset, map };
        if !is_discrete_fibration_poset(&p) {
            return false;
        }
    }
    true
}

/// Pulls a restriction structure back along a local discrete fibration
/// `F: C2 -> Γ(D)`: `bar(f)` is the unique lift of `overline(Ff)` under
/// the identity. Asserts R1-R4 on the result, that the induced order
/// equals `C2`'s, that `F` lifts to a restriction functor, and that the
/// structure is the only one doing so.
pub fn lift_restriction(
    c2: &LocallyPosetal2Cat,
    f2: &TwoFunctor,
    d_rc: &RestrictionCat,
) -> Result<(RestrictionCat, FinFunctor)> {
    if f2.fun.target != d_rc.base {
        return Err(Error::Structural("F must land in the base of the given host".into()));
    }
    let d2 = gamma(d_rc);
    // Re-validate monotonicity against Γ(D) and require the fibration
    // property.
    let f2 = TwoFunctor::new(c2, &d2, f2.fun.clone())?;
    if !is_local_discrete_fibration(c2, &d2, &f2) {
        return Err(Error::Precondition("F is not a local discrete fibration".into()));
    }
    let c = &c2.base;
    let mut bar = Vec::with_capacity(c.n_morphisms());
    for f in c.morphisms() {
        let a = c.dom(f);
        let target = d_rc.bar(f2.fun.on_mor(f));
        let one = c.identity(a);
        let lifts: Vec<MorId> = c
            .hom(a, a)
            .into_iter()
            .filter(|&u| c2.le(u, one) && f2.fun.on_mor(u) == target)
            .collect();
        if lifts.len() != 1 {
            return Err(Error::Structural(format!(
                "lift of overline(Ff) under 1 not unique at {} ({} found)",
                c.mor_label(f),
                lifts.len()
            )));
        }
        bar.push(lifts[0]);
    }
    let rc = RestrictionCat::new(c.clone(), bar)?;
    let rep = verify_restriction(&rc);
    if !rep.ok() {
        return Err(Error::Structural(format!("lifted structure fails R1-R4:\n{rep}")));
    }
    for f in c.morphisms() {
        for g in c.morphisms() {
            if c.parallel(f, g) && rc.leq_unchecked(f, g) != c2.le(f, g) {
                return Err(Error::Structural(
                    "lifted structure induces a different hom order".into(),
                ));
            }
        }
    }
    if !crate::restriction::is_restriction_functor(&f2.fun, &rc, d_rc) {
        return Err(Error::Structural("F does not lift to a restriction functor".into()));
    }
    Ok((rc, f2.fun))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::CheckConfig;

    #[test]
    fn poset_map_fibration_basics() {
        // Identity is a discrete fibration.
        let p2 = FinPoset::new(2, vec![true, true, false, true]).unwrap(); // 0 < 1
        let id = MonotonePosetMap::new(p2.clone(), p2.clone(), vec![0, 1]).unwrap();
        assert!(is_discrete_fibration_poset(&id));
        // Inclusion of a downset is one.
        let p1 = FinPoset::new(1, vec![true]).unwrap();
        let incl = MonotonePosetMap::new(p1.clone(), p2.clone(), vec![0]).unwrap();
        assert!(is_discrete_fibration_poset(&incl));
        // Collapsing the 2-chain onto a point gives two lifts of the
        // unique lower bound under the top element.
        let collapse = MonotonePosetMap::new(p2, p1, vec![0, 0]).unwrap();
        assert!(!is_discrete_fibration_poset(&collapse));
    }

    #[test]
    fn gamma_orders_set_p_by_graph_inclusion() {
        let sp = builders::build_set_p(&[2], &CheckConfig::default()).unwrap();
        let g = gamma(&sp.rc);
        for f in sp.rc.base.morphisms() {
            for h in sp.rc.base.morphisms() {
                let sub = sp
                    .graph(f)
                    .iter()
                    .zip(sp.graph(h))
                    .all(|(x, y)| x.is_none() || x == y);
                assert_eq!(g.le(f, h), sub, "order must be graph inclusion");
            }
        }
    }

    #[test]
    fn gamma_of_trivial_is_discrete() {
        let base = builders::finset_category(&[1, 2]);
        let rc = builders::build_trivial(&base).unwrap();
        let g = gamma(&rc);
        for f in base.morphisms() {
            for h in base.morphisms() {
                assert_eq!(g.le(f, h), f == h);
            }
        }
    }

    #[test]
    fn totality_equals_map_fibration() {
        let sp = builders::build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        let g = gamma(&sp.rc);
        for f in sp.rc.base.morphisms() {
            assert_eq!(sp.rc.is_total(f), is_discrete_fibration_map(&g, f));
        }
    }

    #[test]
    fn lift_through_gamma_identity_round_trips() {
        let sp = builders::build_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        let g = gamma(&sp.rc);
        let f2 = TwoFunctor::identity(&g);
        let (lifted, _) = lift_restriction(&g, &f2, &sp.rc).unwrap();
        assert_eq!(lifted.bar_table(), sp.rc.bar_table());
    }

    #[test]
    fn non_ldf_rejected() {
        // Total-maps inclusion into set_p is not hyperconnected, so its Γ
        // is not a local discrete fibration and lifting is refused.
        let (triv, sp, incl) =
            builders::total_inclusion_into_set_p(&[1, 2], &CheckConfig::default()).unwrap();
        let c2 = gamma(&triv);
        let d2 = gamma(&sp.rc);
        let f2 = TwoFunctor::new(&c2, &d2, incl).unwrap();
        assert!(!is_local_discrete_fibration(&c2, &d2, &f2));
        assert!(lift_restriction(&c2, &f2, &sp.rc).is_err());
    }
}
