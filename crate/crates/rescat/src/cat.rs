//! Finite categories as explicit object/morphism sets with a total
//! composition table, functors between them, and the brute-force
//! categorical utilities (mono detection, pullback search) the rest of
//! the crate builds on.
//!
//! Composition is written applicatively: `comp(g, f)` is "first `f`,
//! then `g`" and is defined exactly when `cod(f) = dom(g)`.

use crate::report::{Failure, ValidationReport};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Object identifier, dense from 0 within one [`FinCat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjId(pub usize);

/// Morphism identifier, dense from 0 within one [`FinCat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MorId(pub usize);

/// A finite category: objects `0..n_objects`, morphisms `0..dom.len()`,
/// identities per object, and a dense composition table keyed by
/// `(g, f)`. Absent entries on composable pairs are structural errors,
/// not silent failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    n_objects: usize,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<MorId>,
    /// Flat `n_mor * n_mor` table; entry `g * n_mor + f` holds `g∘f`.
    compose: Vec<Option<MorId>>,
    pub label: String,
    /// Optional display names; empty means unnamed.
    pub obj_labels: Vec<String>,
    pub mor_labels: Vec<String>,
}

impl FinCat {
    /// Builds a category from raw tables, checking only that every id is
    /// in range and the table dimensions agree. Laws are checked
    /// separately by [`validate_category`].
    pub fn new(
        n_objects: usize,
        dom: Vec<ObjId>,
        cod: Vec<ObjId>,
        identity: Vec<MorId>,
        entries: &[(MorId, MorId, MorId)],
    ) -> Result<FinCat> {
        let n = dom.len();
        if cod.len() != n {
            return Err(Error::Structural(format!(
                "dom has {} entries but cod has {}",
                n,
                cod.len()
            )));
        }
        if identity.len() != n_objects {
            return Err(Error::Structural(format!(
                "{} objects but {} identity entries",
                n_objects,
                identity.len()
            )));
        }
        for (i, o) in dom.iter().chain(cod.iter()).enumerate() {
            if o.0 >= n_objects {
                return Err(Error::Structural(format!("dangling ObjId {} at entry {}", o.0, i)));
            }
        }
        for m in &identity {
            if m.0 >= n {
                return Err(Error::Structural(format!("dangling identity MorId {}", m.0)));
            }
        }
        let mut compose = vec![None; n * n];
        for &(g, f, h) in entries {
            if g.0 >= n || f.0 >= n || h.0 >= n {
                return Err(Error::Structural(format!(
                    "dangling MorId in compose entry ({}, {}, {})",
                    g.0, f.0, h.0
                )));
            }
            if compose[g.0 * n + f.0].is_some() {
                return Err(Error::Structural(format!(
                    "duplicate compose entry for ({}, {})",
                    g.0, f.0
                )));
            }
            compose[g.0 * n + f.0] = Some(h);
        }
        Ok(FinCat {
            n_objects,
            dom,
            cod,
            identity,
            compose,
            label: String::new(),
            obj_labels: Vec::new(),
            mor_labels: Vec::new(),
        })
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.dom.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.n_objects).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> {
        (0..self.dom.len()).map(MorId)
    }

    pub fn dom(&self, f: MorId) -> ObjId {
        self.dom[f.0]
    }

    pub fn cod(&self, f: MorId) -> ObjId {
        self.cod[f.0]
    }

    pub fn identity(&self, a: ObjId) -> MorId {
        self.identity[a.0]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identity[self.dom(f).0] == f
    }

    /// `g∘f` if `cod(f) = dom(g)` and the table has the entry.
    pub fn try_comp(&self, g: MorId, f: MorId) -> Option<MorId> {
        if self.cod(f) != self.dom(g) {
            return None;
        }
        self.compose[g.0 * self.dom.len() + f.0]
    }

    /// `g∘f` on a composable pair of a validated category.
    ///
    /// Panics if the pair is not composable or the entry is missing;
    /// callers are expected to have validated the category.
    pub fn comp(&self, g: MorId, f: MorId) -> MorId {
        match self.try_comp(g, f) {
            Some(h) => h,
            None => panic!(
                "compose({}, {}) undefined (cod f = {:?}, dom g = {:?})",
                g.0,
                f.0,
                self.cod(f),
                self.dom(g)
            ),
        }
    }

    pub fn composable(&self, g: MorId, f: MorId) -> bool {
        self.cod(f) == self.dom(g)
    }

    pub fn parallel(&self, f: MorId, g: MorId) -> bool {
        self.dom(f) == self.dom(g) && self.cod(f) == self.cod(g)
    }

    /// All morphisms `a -> b`, in id order.
    pub fn hom(&self, a: ObjId, b: ObjId) -> Vec<MorId> {
        self.morphisms().filter(|&f| self.dom(f) == a && self.cod(f) == b).collect()
    }

    /// All endomorphisms of `a`.
    pub fn endos(&self, a: ObjId) -> Vec<MorId> {
        self.hom(a, a)
    }

    pub fn mor_label(&self, f: MorId) -> String {
        match self.mor_labels.get(f.0) {
            Some(l) if !l.is_empty() => l.clone(),
            _ => format!("m{}", f.0),
        }
    }

    pub fn obj_label(&self, a: ObjId) -> String {
        match self.obj_labels.get(a.0) {
            Some(l) if !l.is_empty() => l.clone(),
            _ => format!("A{}", a.0),
        }
    }

    /// The compose table as sorted `(g, f, h)` triples.
    pub fn compose_entries(&self) -> Vec<(MorId, MorId, MorId)> {
        let n = self.dom.len();
        let mut out = Vec::new();
        for g in 0..n {
            for f in 0..n {
                if let Some(h) = self.compose[g * n + f] {
                    out.push((MorId(g), MorId(f), h));
                }
            }
        }
        out
    }
}

/// Checks associativity and the unit laws over every composable
/// triple/pair. Structural problems (missing table entries on composable
/// pairs, mistyped entries or identities) are reported under
/// `structural/...` laws, distinct from law failures.
pub fn validate_category(c: &FinCat) -> ValidationReport {
    let mut rep = ValidationReport::default();

    for a in c.objects() {
        let i = c.identity(a);
        if c.dom(i) != a || c.cod(i) != a {
            rep.push(Failure::new(
                "structural/identity-typing",
                vec![a.0, i.0],
                format!("identity of {} is not an endomorphism of it", c.obj_label(a)),
            ));
        }
    }

    // Table totality and typing on composable pairs.
    for g in c.morphisms() {
        for f in c.morphisms() {
            if !c.composable(g, f) {
                continue;
            }
            match c.try_comp(g, f) {
                None => rep.push(Failure::new(
                    "structural/missing-composite",
                    vec![g.0, f.0],
                    "composable pair has no table entry",
                )),
                Some(h) => {
                    if c.dom(h) != c.dom(f) || c.cod(h) != c.cod(g) {
                        rep.push(Failure::new(
                            "structural/composite-typing",
                            vec![g.0, f.0, h.0],
                            "composite endpoints disagree with its factors",
                        ));
                    }
                }
            }
        }
    }
    if rep.has_structural() {
        return rep;
    }

    for f in c.morphisms() {
        let l = c.comp(c.identity(c.cod(f)), f);
        if l != f {
            rep.push(Failure::new("left-unit", vec![f.0], "1∘f differs from f"));
        }
        let r = c.comp(f, c.identity(c.dom(f)));
        if r != f {
            rep.push(Failure::new("right-unit", vec![f.0], "f∘1 differs from f"));
        }
    }

    'assoc: for h in c.morphisms() {
        for g in c.morphisms() {
            if !c.composable(h, g) {
                continue;
            }
            let hg = c.comp(h, g);
            for f in c.morphisms() {
                if !c.composable(g, f) {
                    continue;
                }
                let gf = c.comp(g, f);
                if c.comp(hg, f) != c.comp(h, gf) {
                    rep.push(Failure::new(
                        "associativity",
                        vec![h.0, g.0, f.0],
                        "h∘(g∘f) differs from (h∘g)∘f",
                    ));
                    break 'assoc; // minimal witness suffices
                }
            }
        }
    }
    rep
}

/// A functor between finite categories, carried as explicit object and
/// morphism maps together with owned copies of its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    pub source: FinCat,
    pub target: FinCat,
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl FinFunctor {
    pub fn new(
        source: FinCat,
        target: FinCat,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<FinFunctor> {
        if obj_map.len() != source.n_objects() {
            return Err(Error::Structural(format!(
                "obj_map covers {} of {} objects",
                obj_map.len(),
                source.n_objects()
            )));
        }
        if mor_map.len() != source.n_morphisms() {
            return Err(Error::Structural(format!(
                "mor_map covers {} of {} morphisms",
                mor_map.len(),
                source.n_morphisms()
            )));
        }
        for o in &obj_map {
            if o.0 >= target.n_objects() {
                return Err(Error::Structural(format!("dangling ObjId {} in obj_map", o.0)));
            }
        }
        for m in &mor_map {
            if m.0 >= target.n_morphisms() {
                return Err(Error::Structural(format!("dangling MorId {} in mor_map", m.0)));
            }
        }
        Ok(FinFunctor { source, target, obj_map, mor_map })
    }

    pub fn identity(c: &FinCat) -> FinFunctor {
        FinFunctor {
            source: c.clone(),
            target: c.clone(),
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
        }
    }

    pub fn on_obj(&self, a: ObjId) -> ObjId {
        self.obj_map[a.0]
    }

    pub fn on_mor(&self, f: MorId) -> MorId {
        self.mor_map[f.0]
    }

    /// `other` after `self`; endpoints must match exactly.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor> {
        if self.target != other.source {
            return Err(Error::Precondition(
                "functor composition: target of first differs from source of second".into(),
            ));
        }
        Ok(FinFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            obj_map: self.obj_map.iter().map(|&a| other.on_obj(a)).collect(),
            mor_map: self.mor_map.iter().map(|&f| other.on_mor(f)).collect(),
        })
    }

    /// Same assignments, ignoring endpoint labels.
    pub fn same_maps(&self, other: &FinFunctor) -> bool {
        self.obj_map == other.obj_map && self.mor_map == other.mor_map
    }

    pub fn is_bijective_on_objects(&self) -> bool {
        if self.source.n_objects() != self.target.n_objects() {
            return false;
        }
        let mut seen = vec![false; self.target.n_objects()];
        for &o in &self.obj_map {
            if seen[o.0] {
                return false;
            }
            seen[o.0] = true;
        }
        true
    }
}

/// Checks that identities and all composites are preserved.
pub fn validate_functor(f: &FinFunctor) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let (c, d) = (&f.source, &f.target);
    for m in c.morphisms() {
        let fm = f.on_mor(m);
        if d.dom(fm) != f.on_obj(c.dom(m)) || d.cod(fm) != f.on_obj(c.cod(m)) {
            rep.push(Failure::new(
                "structural/functor-typing",
                vec![m.0, fm.0],
                "image endpoints disagree with mapped endpoints",
            ));
        }
    }
    if rep.has_structural() {
        return rep;
    }
    for a in c.objects() {
        if f.on_mor(c.identity(a)) != d.identity(f.on_obj(a)) {
            rep.push(Failure::new(
                "functor-identity",
                vec![a.0],
                "identity not mapped to identity",
            ));
        }
    }
    for g in c.morphisms() {
        for m in c.morphisms() {
            if !c.composable(g, m) {
                continue;
            }
            let lhs = f.on_mor(c.comp(g, m));
            let rhs = d.comp(f.on_mor(g), f.on_mor(m));
            if lhs != rhs {
                rep.push(Failure::new(
                    "functor-composition",
                    vec![g.0, m.0],
                    "F(g∘f) differs from F(g)∘F(f)",
                ));
                return rep; // first witness
            }
        }
    }
    rep
}

/// True iff `m` is a monomorphism: `m∘u = m∘v` forces `u = v` for every
/// parallel pair into `dom(m)`.
pub fn is_mono(c: &FinCat, m: MorId) -> bool {
    let a = c.dom(m);
    for u in c.morphisms() {
        if c.cod(u) != a {
            continue;
        }
        for v in c.morphisms() {
            if v.0 <= u.0 || c.cod(v) != a || c.dom(v) != c.dom(u) {
                continue;
            }
            if c.comp(m, u) == c.comp(m, v) {
                return false;
            }
        }
    }
    true
}

/// A span `left: apex -> x`, `right: apex -> y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub apex: ObjId,
    pub left: MorId,
    pub right: MorId,
}

impl Span {
    pub fn new(c: &FinCat, left: MorId, right: MorId) -> Result<Span> {
        if c.dom(left) != c.dom(right) {
            return Err(Error::Structural("span legs have different domains".into()));
        }
        Ok(Span { apex: c.dom(left), left, right })
    }
}

/// Searches for a pullback of the cospan `f: X -> Z <- Y: m` by
/// enumerating every candidate apex and span pair and checking the
/// universal property against every competing cone. Returns the
/// lexicographically least `(apex, left, right)` among the universal
/// spans, or `None` when the category has no pullback for this cospan.
pub fn pullback(c: &FinCat, f: MorId, m: MorId) -> Result<Option<Span>> {
    if c.cod(f) != c.cod(m) {
        return Err(Error::Precondition("pullback of a non-cospan: codomains differ".into()));
    }
    let cones = all_cones(c, f, m);
    'cand: for &(p_f, p_m) in &cones {
        // Universal: every cone factors uniquely through this one.
        for &(q_f, q_m) in &cones {
            let w = c.dom(p_f);
            let v = c.dom(q_f);
            let mut count = 0;
            for u in c.hom(v, w) {
                if c.comp(p_f, u) == q_f && c.comp(p_m, u) == q_m {
                    count += 1;
                }
            }
            if count != 1 {
                continue 'cand;
            }
        }
        return Ok(Some(Span { apex: c.dom(p_f), left: p_f, right: p_m }));
    }
    Ok(None)
}

/// All spans `(p_f: W -> dom f, p_m: W -> dom m)` with `f∘p_f = m∘p_m`,
/// ordered by `(apex, p_f, p_m)`.
fn all_cones(c: &FinCat, f: MorId, m: MorId) -> Vec<(MorId, MorId)> {
    let (x, y) = (c.dom(f), c.dom(m));
    let mut out = Vec::new();
    for w in c.objects() {
        for p_f in c.hom(w, x) {
            for p_m in c.hom(w, y) {
                if c.comp(f, p_f) == c.comp(m, p_m) {
                    out.push((p_f, p_m));
                }
            }
        }
    }
    out
}

/// Do the two spans differ by an isomorphism of apexes commuting with
/// both legs?
pub fn spans_isomorphic(c: &FinCat, s: &Span, t: &Span) -> bool {
    for u in c.hom(s.apex, t.apex) {
        if c.comp(t.left, u) != s.left || c.comp(t.right, u) != s.right {
            continue;
        }
        for v in c.hom(t.apex, s.apex) {
            if c.comp(s.left, v) == t.left
                && c.comp(s.right, v) == t.right
                && c.comp(v, u) == c.identity(s.apex)
                && c.comp(u, v) == c.identity(t.apex)
            {
                return true;
            }
        }
    }
    false
}
