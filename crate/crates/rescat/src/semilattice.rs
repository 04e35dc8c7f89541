//! Finite meet-semilattices and stable maps: the raw material of the
//! `Stab^op` restriction structure. Includes open-map detection via
//! local left adjoints and Frobenius reciprocity, frames (finite
//! distributive lattices), join-preserving maps, and Beck-Chevalley
//! squares.
//!
//! A finite meet-semilattice with a top element automatically has all
//! joins (the join is the meet of the upper bounds), so "frame" here
//! reduces to distributivity plus the always-present bottom.

use crate::cat::{FinCat, MorId, ObjId};
use crate::report::{Failure, ValidationReport};
use crate::restriction::RestrictionCat;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Finite poset with top and binary meets, as explicit tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeetSemilattice {
    size: usize,
    /// Row-major: `leq[a * size + b]` holds iff `a ⩽ b`.
    leq: Vec<bool>,
    top: usize,
    meet: Vec<usize>,
    pub labels: Vec<String>,
}

impl MeetSemilattice {
    pub fn from_tables(
        size: usize,
        leq: Vec<bool>,
        top: usize,
        meet: Vec<usize>,
    ) -> Result<MeetSemilattice> {
        if leq.len() != size * size || meet.len() != size * size || (top >= size && size > 0) {
            return Err(Error::Structural("semilattice table dimensions are wrong".into()));
        }
        if size == 0 {
            return Err(Error::Structural("empty semilattice has no top".into()));
        }
        if meet.iter().any(|&m| m >= size) {
            return Err(Error::Structural("dangling element in meet table".into()));
        }
        Ok(MeetSemilattice { size, leq, top, meet, labels: Vec::new() })
    }

    /// Builds from the order alone; meets are computed as greatest lower
    /// bounds and their existence is required.
    pub fn from_leq(size: usize, leq: Vec<bool>) -> Result<MeetSemilattice> {
        if leq.len() != size * size {
            return Err(Error::Structural("leq table has wrong size".into()));
        }
        let le = |a: usize, b: usize| leq[a * size + b];
        let top = (0..size)
            .find(|&t| (0..size).all(|a| le(a, t)))
            .ok_or_else(|| Error::Structural("no top element".into()))?;
        let mut meet = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                let glb = (0..size)
                    .filter(|&c| le(c, a) && le(c, b))
                    .find(|&c| (0..size).all(|d| !(le(d, a) && le(d, b)) || le(d, c)));
                match glb {
                    Some(c) => meet[a * size + b] = c,
                    None => {
                        return Err(Error::Structural(format!(
                            "elements {a} and {b} have no greatest lower bound"
                        )))
                    }
                }
            }
        }
        Ok(MeetSemilattice { size, leq, top, meet, labels: Vec::new() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    /// Least element: the meet of everything.
    pub fn bottom(&self) -> usize {
        self.elements().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Least upper bound, as the meet of the set of upper bounds. In a
    /// finite meet-semilattice with top this always exists.
    pub fn join(&self, a: usize, b: usize) -> usize {
        let ubs: Vec<usize> =
            self.elements().filter(|&u| self.le(a, u) && self.le(b, u)).collect();
        ubs.iter().skip(1).fold(ubs[0], |acc, &u| self.meet(acc, u))
    }

    pub fn join_all(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.bottom(), |acc, &x| self.join(acc, x))
    }

    pub fn leq_table(&self) -> &[bool] {
        &self.leq
    }

    pub fn meet_table(&self) -> &[usize] {
        &self.meet
    }

    /// The downset `L/b` as an induced sub-semilattice with top `b`.
    /// `elems[i]` is the ambient element at position `i`.
    pub fn downset(&self, b: usize) -> Downset {
        let elems: Vec<usize> = self.elements().filter(|&x| self.le(x, b)).collect();
        let n = elems.len();
        let mut leq = vec![false; n * n];
        let mut meet = vec![0; n * n];
        let pos = |x: usize| elems.binary_search(&x).unwrap();
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                leq[i * n + j] = self.le(x, y);
                meet[i * n + j] = pos(self.meet(x, y));
            }
        }
        let top = pos(b);
        Downset {
            elems,
            lattice: MeetSemilattice { size: n, leq, top, meet, labels: Vec::new() },
        }
    }

    // Standard small lattices used throughout the tests and the CLI.

    /// Chain 0 < 1 < ... < n-1.
    pub fn chain(n: usize) -> MeetSemilattice {
        assert!(n > 0);
        let mut leq = vec![false; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = a <= b;
                meet[a * n + b] = a.min(b);
            }
        }
        MeetSemilattice { size: n, leq, top: n - 1, meet, labels: Vec::new() }
    }

    /// Powerset of an n-element set ordered by inclusion; elements are
    /// bitmasks.
    pub fn powerset(n: usize) -> MeetSemilattice {
        assert!(n <= 4);
        let size = 1 << n;
        let mut leq = vec![false; size * size];
        let mut meet = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                leq[a * size + b] = a & b == a;
                meet[a * size + b] = a & b;
            }
        }
        let labels = (0..size).map(|m| format!("{m:0width$b}", width = n.max(1))).collect();
        MeetSemilattice { size, leq, top: size - 1, meet, labels }
    }

    /// The diamond M3: bottom, three incomparable atoms, top. Modular
    /// but not distributive.
    pub fn diamond_m3() -> MeetSemilattice {
        // 0 = bottom, 1..=3 atoms, 4 = top.
        let mut leq = vec![false; 25];
        let le = |a: usize, b: usize| a == b || a == 0 || b == 4;
        for a in 0..5 {
            for b in 0..5 {
                leq[a * 5 + b] = le(a, b);
            }
        }
        MeetSemilattice::from_leq(5, leq).unwrap()
    }

    /// The pentagon N5: 0 < a < c < 1 and 0 < b < 1 with b incomparable
    /// to a and c. Not modular.
    pub fn pentagon_n5() -> MeetSemilattice {
        // 0 = bottom, 1 = a, 2 = c, 3 = b, 4 = top.
        let pairs: &[(usize, usize)] = &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 4), (3, 4)];
        let mut leq = vec![false; 25];
        for a in 0..5 {
            leq[a * 5 + a] = true;
            leq[a * 5 + 4] = true;
            leq[0 * 5 + a] = true;
        }
        for &(a, b) in pairs {
            leq[a * 5 + b] = true;
        }
        MeetSemilattice::from_leq(5, leq).unwrap()
    }

    /// The 2x3 grid (product of a 2-chain and a 3-chain), a 6-element
    /// distributive lattice.
    pub fn grid_2x3() -> MeetSemilattice {
        let size = 6; // (i, j) with i < 2, j < 3 encoded as 3*i + j
        let mut leq = vec![false; size * size];
        for a in 0..size {
            for b in 0..size {
                let (ai, aj) = (a / 3, a % 3);
                let (bi, bj) = (b / 3, b % 3);
                leq[a * size + b] = ai <= bi && aj <= bj;
            }
        }
        MeetSemilattice::from_leq(size, leq).unwrap()
    }
}

/// A downset `L/b` materialised as a sub-semilattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Downset {
    /// Ambient elements, ascending; position in this list is the element
    /// id inside `lattice`.
    pub elems: Vec<usize>,
    pub lattice: MeetSemilattice,
}

impl Downset {
    pub fn position(&self, ambient: usize) -> Option<usize> {
        self.elems.binary_search(&ambient).ok()
    }
}

/// Order axioms, meet-table correctness (greatest lower bounds), and top
/// maximality.
pub fn validate_semilattice(l: &MeetSemilattice) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n = l.size();
    for a in 0..n {
        if !l.le(a, a) {
            rep.push(Failure::new("order-reflexive", vec![a], "a ⩽̸ a"));
        }
        if !l.le(a, l.top()) {
            rep.push(Failure::new("top-maximal", vec![a], "a ⩽̸ ⊤"));
        }
        for b in 0..n {
            if a != b && l.le(a, b) && l.le(b, a) {
                rep.push(Failure::new("order-antisymmetric", vec![a, b], "a ⩽ b ⩽ a with a ≠ b"));
            }
            for c in 0..n {
                if l.le(a, b) && l.le(b, c) && !l.le(a, c) {
                    rep.push(Failure::new("order-transitive", vec![a, b, c], "transitivity fails"));
                    return rep;
                }
            }
        }
    }
    if !rep.ok() {
        return rep;
    }
    for a in 0..n {
        for b in 0..n {
            let m = l.meet(a, b);
            if !l.le(m, a) || !l.le(m, b) {
                rep.push(Failure::new("meet-lower-bound", vec![a, b, m], "meet not a lower bound"));
                continue;
            }
            for c in 0..n {
                if l.le(c, a) && l.le(c, b) && !l.le(c, m) {
                    rep.push(Failure::new(
                        "meet-greatest",
                        vec![a, b, c],
                        "meet not greatest among lower bounds",
                    ));
                    break;
                }
            }
        }
    }
    rep
}

/// A monotone, binary-meet-preserving map between meet-semilattices.
/// Top preservation is *not* required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableMap {
    pub source: MeetSemilattice,
    pub target: MeetSemilattice,
    pub map: Vec<usize>,
}

impl StableMap {
    pub fn new(
        source: MeetSemilattice,
        target: MeetSemilattice,
        map: Vec<usize>,
    ) -> Result<StableMap> {
        if map.len() != source.size() {
            return Err(Error::Structural("stable map table has wrong length".into()));
        }
        if map.iter().any(|&v| v >= target.size()) {
            return Err(Error::Structural("dangling element in stable map".into()));
        }
        Ok(StableMap { source, target, map })
    }

    pub fn identity(l: &MeetSemilattice) -> StableMap {
        StableMap { source: l.clone(), target: l.clone(), map: l.elements().collect() }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `other` after `self` (ordinary function composition).
    pub fn then(&self, other: &StableMap) -> Result<StableMap> {
        if self.target != other.source {
            return Err(Error::Precondition("stable map composition endpoint mismatch".into()));
        }
        Ok(StableMap {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&v| other.apply(v)).collect(),
        })
    }

    pub fn preserves_top(&self) -> bool {
        self.apply(self.source.top()) == self.target.top()
    }
}

/// Monotonicity and `h(a∧b) = h(a)∧h(b)` for all pairs.
pub fn validate_stable(h: &StableMap) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let (s, t) = (&h.source, &h.target);
    for a in s.elements() {
        for b in s.elements() {
            if s.le(a, b) && !t.le(h.apply(a), h.apply(b)) {
                rep.push(Failure::new("monotone", vec![a, b], "order not preserved"));
            }
            if h.apply(s.meet(a, b)) != t.meet(h.apply(a), h.apply(b)) {
                rep.push(Failure::new("preserves-meets", vec![a, b], "h(a∧b) ≠ h(a)∧h(b)"));
                return rep;
            }
        }
    }
    rep
}

/// The `Stab^op` restriction of `h`: the endomap `a ↦ a ∧ h(⊤)` on the
/// target semilattice of the underlying stable map (the source of the
/// `Stab^op` arrow, read contravariantly).
pub fn stab_op_bar(h: &StableMap) -> StableMap {
    let l = &h.target;
    let c = h.apply(h.source.top());
    StableMap {
        source: l.clone(),
        target: l.clone(),
        map: l.elements().map(|a| l.meet(a, c)).collect(),
    }
}

/// A local left adjoint of `g: A -> B` viewed as `A -> B/g(⊤)`, plus the
/// Frobenius reciprocity verdict. `g` is *open* iff the adjoint exists
/// and Frobenius holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalLeftAdjoint {
    /// The downset `B/g(⊤)` in `g`'s target.
    pub downset: Downset,
    /// Adjoint values, indexed by downset position; values live in `A`.
    pub map: Vec<usize>,
    /// `f(g(a) ∧ b) = a ∧ f(b)` for all `a ∈ A`, `b ⩽ g(⊤)`.
    pub frobenius: bool,
}

/// Computes the candidate `f(b) = ⋀ { a ∈ A | b ⩽ g(a) }` (nonempty
/// because `b ⩽ g(⊤)`) and returns it iff the adjunction
/// `f(b) ⩽ a ⇔ b ⩽ g(a)` holds for all pairs.
pub fn local_left_adjoint(g: &StableMap) -> Option<LocalLeftAdjoint> {
    let (a_lat, b_lat) = (&g.source, &g.target);
    let down = b_lat.downset(g.apply(a_lat.top()));
    let mut f = Vec::with_capacity(down.elems.len());
    for &b in &down.elems {
        let above: Vec<usize> = a_lat.elements().filter(|&a| b_lat.le(b, g.apply(a))).collect();
        debug_assert!(!above.is_empty());
        let cand = above.iter().skip(1).fold(above[0], |acc, &x| a_lat.meet(acc, x));
        f.push(cand);
    }
    // Adjunction both ways.
    for (i, &b) in down.elems.iter().enumerate() {
        for a in a_lat.elements() {
            if a_lat.le(f[i], a) != b_lat.le(b, g.apply(a)) {
                return None;
            }
        }
    }
    let mut frobenius = true;
    'fro: for a in a_lat.elements() {
        for (i, &b) in down.elems.iter().enumerate() {
            let gb = b_lat.meet(g.apply(a), b);
            let pos = down.position(gb).expect("g(a)∧b stays under g(⊤)");
            if f[pos] != a_lat.meet(a, f[i]) {
                frobenius = false;
                break 'fro;
            }
        }
    }
    Some(LocalLeftAdjoint { downset: down, map: f, frobenius })
}

/// Open: local left adjoint exists and satisfies Frobenius reciprocity.
pub fn is_open(g: &StableMap) -> bool {
    local_left_adjoint(g).map(|a| a.frobenius).unwrap_or(false)
}

/// A frame at desk scale is a finite distributive lattice: all joins
/// exist (automatic here, but re-verified as least upper bounds) and
/// binary meets distribute over binary joins.
pub fn is_frame(l: &MeetSemilattice) -> bool {
    for a in l.elements() {
        for b in l.elements() {
            let j = l.join(a, b);
            if !l.le(a, j) || !l.le(b, j) {
                return false;
            }
            if l.elements().any(|u| l.le(a, u) && l.le(b, u) && !l.le(j, u)) {
                return false;
            }
        }
    }
    let bot = l.bottom();
    if l.elements().any(|a| !l.le(bot, a)) {
        return false;
    }
    for a in l.elements() {
        for b in l.elements() {
            for c in l.elements() {
                if l.meet(a, l.join(b, c)) != l.join(l.meet(a, b), l.meet(a, c)) {
                    return false;
                }
            }
        }
    }
    true
}

/// `h(⋁S) = ⋁h(S)` for every subset `S` of the source, empty set
/// included. Endpoints must be frames.
pub fn preserves_joins(h: &StableMap) -> Result<bool> {
    if !is_frame(&h.source) || !is_frame(&h.target) {
        return Err(Error::Precondition("preserves_joins requires frame endpoints".into()));
    }
    let n = h.source.size();
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let lhs = h.apply(h.source.join_all(&subset));
        let images: Vec<usize> = subset.iter().map(|&x| h.apply(x)).collect();
        if lhs != h.target.join_all(&images) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A commuting square of stable maps
///
/// ```text
///        h
///    A -----> B
///    |        |
///  f |        | g
///    v        v
///    C -----> D
///        k
/// ```
///
/// with `f, g` the vertical legs and `h, k` the horizontal ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabSquare {
    pub h: StableMap,
    pub f: StableMap,
    pub g: StableMap,
    pub k: StableMap,
}

impl StabSquare {
    pub fn new(h: StableMap, f: StableMap, g: StableMap, k: StableMap) -> Result<StabSquare> {
        if h.source != f.source || h.target != g.source || f.target != k.source
            || g.target != k.target
        {
            return Err(Error::Structural("square endpoints do not match up".into()));
        }
        let sq = StabSquare { h, f, g, k };
        if !sq.commutes() {
            return Err(Error::Precondition("square does not commute".into()));
        }
        Ok(sq)
    }

    pub fn commutes(&self) -> bool {
        self.h
            .source
            .elements()
            .all(|a| self.g.apply(self.h.apply(a)) == self.k.apply(self.f.apply(a)))
    }
}

/// Beck-Chevalley: the vertical legs are total (top-preserving), the
/// horizontal legs are open, and the mate square
///
/// ```text
///         h_!
///    A <------ B/h(⊤)
///    |            |
///  f |            | g restricted
///    v            v
///    C <------ D/k(⊤)
///         k_!
/// ```
///
/// commutes elementwise on `B/h(⊤)`: `f(h_!(b)) = k_!(g(b))`.
pub fn beck_chevalley(sq: &StabSquare) -> Result<bool> {
    if !sq.commutes() {
        return Err(Error::Precondition("square does not commute".into()));
    }
    if !sq.f.preserves_top() || !sq.g.preserves_top() {
        return Ok(false);
    }
    let h_adj = match local_left_adjoint(&sq.h) {
        Some(a) if a.frobenius => a,
        _ => return Ok(false),
    };
    let k_adj = match local_left_adjoint(&sq.k) {
        Some(a) if a.frobenius => a,
        _ => return Ok(false),
    };
    for (i, &b) in h_adj.downset.elems.iter().enumerate() {
        let lhs = sq.f.apply(h_adj.map[i]);
        let gb = sq.g.apply(b);
        let pos = match k_adj.downset.position(gb) {
            Some(p) => p,
            // g(b) ⩽ k(⊤) follows from commutation and totality of f;
            // treat a miss as a failed square rather than panicking.
            None => return Ok(false),
        };
        if lhs != k_adj.map[pos] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Horizontal pasting: glue two squares along the shared vertical leg
/// (`left.g` must equal `right.f`).
pub fn compose_squares_horizontally(left: &StabSquare, right: &StabSquare) -> Result<StabSquare> {
    if left.g != right.f {
        return Err(Error::Precondition("squares do not share the middle leg".into()));
    }
    StabSquare::new(
        left.h.then(&right.h)?,
        left.f.clone(),
        right.g.clone(),
        left.k.then(&right.k)?,
    )
}

/// All stable maps `src -> dst` by backtracking over a linear extension
/// of `src`; optionally restricted to top-preserving ones.
pub fn enumerate_stable_maps(
    src: &MeetSemilattice,
    dst: &MeetSemilattice,
    top_preserving: bool,
) -> Vec<Vec<usize>> {
    let order = linear_extension(src);
    let mut out = Vec::new();
    let mut img = vec![usize::MAX; src.size()];
    backtrack_stable(src, dst, &order, 0, &mut img, top_preserving, &mut out);
    out
}

fn backtrack_stable(
    src: &MeetSemilattice,
    dst: &MeetSemilattice,
    order: &[usize],
    i: usize,
    img: &mut Vec<usize>,
    top_preserving: bool,
    out: &mut Vec<Vec<usize>>,
) {
    if i == order.len() {
        out.push(img.clone());
        return;
    }
    let x = order[i];
    'cand: for v in dst.elements() {
        if top_preserving && x == src.top() && v != dst.top() {
            continue;
        }
        for &u in &order[..i] {
            let m = src.meet(x, u);
            let fu = img[u];
            let expected = dst.meet(v, fu);
            let actual = if m == x {
                v
            } else if m == u {
                fu
            } else {
                img[m]
            };
            if actual != expected {
                continue 'cand;
            }
        }
        img[x] = v;
        backtrack_stable(src, dst, order, i + 1, img, top_preserving, out);
        img[x] = usize::MAX;
    }
}

/// All monotone maps `src -> dst` (no meet requirement); used as the
/// candidate space for exhaustive adjoint searches.
pub fn enumerate_monotone_maps(src: &MeetSemilattice, dst: &MeetSemilattice) -> Vec<Vec<usize>> {
    let order = linear_extension(src);
    let mut out = Vec::new();
    let mut img = vec![usize::MAX; src.size()];
    fn go(
        src: &MeetSemilattice,
        dst: &MeetSemilattice,
        order: &[usize],
        i: usize,
        img: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == order.len() {
            out.push(img.clone());
            return;
        }
        let x = order[i];
        'cand: for v in dst.elements() {
            for &u in &order[..i] {
                if src.le(u, x) && !dst.le(img[u], v) {
                    continue 'cand;
                }
                if src.le(x, u) && !dst.le(v, img[u]) {
                    continue 'cand;
                }
            }
            img[x] = v;
            go(src, dst, order, i + 1, img, out);
            img[x] = usize::MAX;
        }
    }
    go(src, dst, &order, 0, &mut img, &mut out);
    out
}

/// Elements in an order compatible with ⩽ (all strict predecessors of an
/// element come before it).
fn linear_extension(l: &MeetSemilattice) -> Vec<usize> {
    let mut order: Vec<usize> = l.elements().collect();
    let rank = |x: usize| l.elements().filter(|&y| l.le(y, x)).count();
    order.sort_by_key(|&x| (rank(x), x));
    order
}

/// A materialised finite fragment of `Stab^op`: a restriction category
/// whose objects carry semilattices and whose morphisms carry their
/// underlying stable functions. A morphism `m: X -> Y` holds a stable
/// function `lat(Y) -> lat(X)` (the contravariant reading), composition
/// is function composition the other way round, and
/// `bar(m) = (− ∧ u_m(⊤))` on `lat(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabOpCat {
    pub rc: RestrictionCat,
    pub lattices: Vec<MeetSemilattice>,
    maps: Vec<Vec<usize>>,
    index: BTreeMap<(usize, usize, Vec<usize>), usize>,
}

impl StabOpCat {
    /// The full fragment on the given lattices: every stable map (or
    /// every join-preserving one, when `join_preserving` is set).
    pub fn full(lattices: Vec<MeetSemilattice>, join_preserving: bool) -> Result<StabOpCat> {
        let n = lattices.len();
        let mut gens = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for f in enumerate_stable_maps(&lattices[y], &lattices[x], false) {
                    if join_preserving {
                        let sm = StableMap::new(
                            lattices[y].clone(),
                            lattices[x].clone(),
                            f.clone(),
                        )?;
                        if !preserves_joins(&sm)? {
                            continue;
                        }
                    }
                    gens.push((x, y, f));
                }
            }
        }
        StabOpCat::close(lattices, &gens)
    }

    /// The smallest fragment on the given lattices containing the
    /// generators and closed under identities, composition, and bar.
    /// A generator `(x, y, f)` is a morphism `x -> y` with underlying
    /// function `f: lat(y) -> lat(x)`.
    pub fn close(
        lattices: Vec<MeetSemilattice>,
        generators: &[(usize, usize, Vec<usize>)],
    ) -> Result<StabOpCat> {
        let n = lattices.len();
        let mut set: std::collections::BTreeSet<(usize, usize, Vec<usize>)> =
            std::collections::BTreeSet::new();
        for x in 0..n {
            set.insert((x, x, lattices[x].elements().collect()));
        }
        for (x, y, f) in generators {
            if *x >= n || *y >= n || f.len() != lattices[*y].size() {
                return Err(Error::Structural("generator endpoints out of range".into()));
            }
            if f.iter().any(|&v| v >= lattices[*x].size()) {
                return Err(Error::Structural("generator function out of range".into()));
            }
            set.insert((*x, *y, f.clone()));
        }
        // Worklist closure: only newly added morphisms are composed
        // against the accumulated set.
        let mut frontier: Vec<(usize, usize, Vec<usize>)> = set.iter().cloned().collect();
        while let Some((x, y, f)) = frontier.pop() {
            // bar: a ↦ a ∧ f(⊤) on lat(x).
            let c = f[lattices[y].top()];
            let bar: Vec<usize> =
                lattices[x].elements().map(|a| lattices[x].meet(a, c)).collect();
            if set.insert((x, x, bar.clone())) {
                frontier.push((x, x, bar));
            }
            let known: Vec<_> = set.iter().cloned().collect();
            for (x2, y2, g) in &known {
                // (x,y,f) then (x2,y2,g) composable when y == x2;
                // composite function: lat(y2) -> lat(x): f ∘ g.
                if *x2 == y {
                    let comp: Vec<usize> = g.iter().map(|&v| f[v]).collect();
                    if set.insert((x, *y2, comp.clone())) {
                        frontier.push((x, *y2, comp));
                    }
                }
                // and the other way round: (x2,y2,g) then (x,y,f).
                if *y2 == x {
                    let comp: Vec<usize> = f.iter().map(|&v| g[v]).collect();
                    if set.insert((*x2, y, comp.clone())) {
                        frontier.push((*x2, y, comp));
                    }
                }
            }
        }
        let maps_sorted: Vec<(usize, usize, Vec<usize>)> = set.into_iter().collect();
        let index: BTreeMap<(usize, usize, Vec<usize>), usize> = maps_sorted
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let dom: Vec<ObjId> = maps_sorted.iter().map(|(x, _, _)| ObjId(*x)).collect();
        let cod: Vec<ObjId> = maps_sorted.iter().map(|(_, y, _)| ObjId(*y)).collect();
        let identity: Vec<MorId> = (0..n)
            .map(|x| MorId(index[&(x, x, lattices[x].elements().collect::<Vec<_>>())]))
            .collect();
        let mut entries = Vec::new();
        for (j, (x2, y2, g)) in maps_sorted.iter().enumerate() {
            for (i, (x1, y1, f)) in maps_sorted.iter().enumerate() {
                // table entry (g∘f) for f: x1 -> y1, g: x2 -> y2 with y1 == x2.
                if *x2 != *y1 {
                    continue;
                }
                let comp: Vec<usize> = g.iter().map(|&v| f[v]).collect();
                let h = index
                    .get(&(*x1, *y2, comp))
                    .ok_or_else(|| Error::Structural("closure missed a composite".into()))?;
                entries.push((MorId(j), MorId(i), MorId(*h)));
            }
        }
        let mut base = FinCat::new(n, dom, cod, identity, &entries)?;
        base.label = "stab_op fragment".into();
        base.obj_labels = lattices.iter().enumerate().map(|(i, l)| format!("L{i}({})", l.size())).collect();
        base.mor_labels = maps_sorted
            .iter()
            .map(|(_, _, f)| f.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        let bar: Vec<MorId> = maps_sorted
            .iter()
            .map(|(x, y, f)| {
                let c = f[lattices[*y].top()];
                let b: Vec<usize> =
                    lattices[*x].elements().map(|a| lattices[*x].meet(a, c)).collect();
                MorId(index[&(*x, *x, b)])
            })
            .collect();
        let maps = maps_sorted.into_iter().map(|(_, _, f)| f).collect();
        let rc = RestrictionCat::new(base, bar)?;
        Ok(StabOpCat { rc, lattices, maps, index })
    }

    /// The underlying stable function of `m: X -> Y`, a table over
    /// `lat(Y)` with values in `lat(X)`.
    pub fn map_fn(&self, m: MorId) -> &[usize] {
        &self.maps[m.0]
    }

    pub fn mor_of(&self, x: ObjId, y: ObjId, f: &[usize]) -> Option<MorId> {
        self.index.get(&(x.0, y.0, f.to_vec())).copied().map(MorId)
    }

    pub fn lattice(&self, x: ObjId) -> &MeetSemilattice {
        &self.lattices[x.0]
    }

    /// As a [`StableMap`] from `lat(cod m)` to `lat(dom m)`.
    pub fn stable_map_of(&self, m: MorId) -> StableMap {
        StableMap {
            source: self.lattices[self.rc.base.cod(m).0].clone(),
            target: self.lattices[self.rc.base.dom(m).0].clone(),
            map: self.maps[m.0].clone(),
        }
    }
}
