//! Constructors for the standard example restriction categories: sets
//! and partial functions, symmetric inverse monoids, span categories
//! over a stable class of monics, full `Stab^op` fragments on chosen
//! semilattices, trivial (everything-total) structures, and a seeded
//! generator of random closed sub-restriction-categories used by the
//! property tests.

use crate::cat::{is_mono, pullback, validate_category, FinCat, FinFunctor, MorId, ObjId, Span};
use crate::config::CheckConfig;
use crate::join::JoinStructure;
use crate::range::RangeStructure;
use crate::restriction::RestrictionCat;
use crate::semilattice::{MeetSemilattice, StabOpCat};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// A partial function between finite sets: `graph[i]` is the image of
/// `i`, or `None` where undefined.
pub type Graph = Vec<Option<usize>>;

fn compose_graphs(f: &Graph, g: &Graph) -> Graph {
    f.iter().map(|x| x.and_then(|v| g[v])).collect()
}

fn graph_label(g: &Graph) -> String {
    if g.is_empty() {
        return "()".into();
    }
    g.iter().map(|x| x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())).collect::<Vec<_>>()
        .join("")
}

/// All partial functions from an `m`-element set to an `n`-element set,
/// in lexicographic order of their graphs (None first).
fn all_partial_fns(m: usize, n: usize) -> Vec<Graph> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * (n + 1));
        for g in &out {
            for v in std::iter::once(None).chain((0..n).map(Some)) {
                let mut g2 = g.clone();
                g2.push(v);
                next.push(g2);
            }
        }
        out = next;
    }
    out
}

fn all_total_fns(m: usize, n: usize) -> Vec<Graph> {
    all_partial_fns(m, n).into_iter().filter(|g| g.iter().all(Option::is_some)).collect()
}

/// The category of finite sets of the given sizes and *total* functions.
pub fn finset_category(sizes: &[usize]) -> FinCat {
    build_graph_category(sizes, all_total_fns, "finset")
}

fn build_graph_category(
    sizes: &[usize],
    homs: impl Fn(usize, usize) -> Vec<Graph>,
    label: &str,
) -> FinCat {
    let n_obj = sizes.len();
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    let mut graphs: Vec<Graph> = Vec::new();
    let mut index: BTreeMap<(usize, usize, Graph), usize> = BTreeMap::new();
    for a in 0..n_obj {
        for b in 0..n_obj {
            for g in homs(sizes[a], sizes[b]) {
                index.insert((a, b, g.clone()), graphs.len());
                dom.push(ObjId(a));
                cod.push(ObjId(b));
                graphs.push(g);
            }
        }
    }
    let identity: Vec<MorId> = (0..n_obj)
        .map(|a| MorId(index[&(a, a, (0..sizes[a]).map(Some).collect())]))
        .collect();
    let mut entries = Vec::new();
    for (gi, _) in graphs.iter().enumerate() {
        for (fi, _) in graphs.iter().enumerate() {
            if cod[fi] != dom[gi] {
                continue;
            }
            let comp = compose_graphs(&graphs[fi], &graphs[gi]);
            let h = index[&(dom[fi].0, cod[gi].0, comp)];
            entries.push((MorId(gi), MorId(fi), MorId(h)));
        }
    }
    let mut c = FinCat::new(n_obj, dom, cod, identity, &entries).expect("graph category tables");
    c.label = format!("{label} {sizes:?}");
    c.obj_labels = sizes.iter().map(|s| s.to_string()).collect();
    c.mor_labels = graphs.iter().map(graph_label).collect();
    c
}

/// Sets and partial functions on the given sizes, with its restriction,
/// join, and range structure.
#[derive(Clone, Debug)]
pub struct SetPCat {
    pub rc: RestrictionCat,
    pub join: JoinStructure,
    pub range: RangeStructure,
    pub sizes: Vec<usize>,
    graphs: Vec<Graph>,
    index: BTreeMap<(usize, usize, Graph), usize>,
}

impl SetPCat {
    pub fn graph(&self, m: MorId) -> &Graph {
        &self.graphs[m.0]
    }

    pub fn mor_of_graph(&self, a: ObjId, b: ObjId, g: &Graph) -> Option<MorId> {
        self.index.get(&(a.0, b.0, g.clone())).copied().map(MorId)
    }
}

/// `Set_p` on the given sizes: all partial functions, with
/// `bar` = partial identity on the domain of definition,
/// joins = unions of compatible graphs, and `hat` = partial identity on
/// the image.
pub fn build_set_p(sizes: &[usize], cfg: &CheckConfig) -> Result<SetPCat> {
    if sizes.iter().any(|&s| s > 4) {
        return Err(Error::Bounds(format!("set sizes must be ⩽ 4, got {sizes:?}")));
    }
    let est: usize = sizes
        .iter()
        .flat_map(|&a| sizes.iter().map(move |&b| (b + 1).pow(a as u32)))
        .sum();
    if est > cfg.morphism_bound {
        return Err(Error::Bounds(format!(
            "set_p on {sizes:?} would have {est} morphisms (bound {})",
            cfg.morphism_bound
        )));
    }
    let base = build_graph_category(sizes, all_partial_fns, "set_p");
    let mut graphs = Vec::with_capacity(base.n_morphisms());
    let mut index = BTreeMap::new();
    // Rebuild the graph table in id order (same enumeration as the category).
    for a in 0..sizes.len() {
        for b in 0..sizes.len() {
            for g in all_partial_fns(sizes[a], sizes[b]) {
                index.insert((a, b, g.clone()), graphs.len());
                graphs.push(g);
            }
        }
    }
    let bar: Vec<MorId> = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let a = base.dom(MorId(i)).0;
            let dom_id: Graph =
                g.iter().enumerate().map(|(x, v)| v.map(|_| x)).collect();
            MorId(index[&(a, a, dom_id)])
        })
        .collect();
    let hat: Vec<MorId> = graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let b = base.cod(MorId(i)).0;
            let image: BTreeSet<usize> = g.iter().flatten().copied().collect();
            let img_id: Graph =
                (0..sizes[b]).map(|y| image.contains(&y).then_some(y)).collect();
            MorId(index[&(b, b, img_id)])
        })
        .collect();
    let rc = RestrictionCat::new(base, bar)?;
    let join = JoinStructure::new(rc.clone());
    let range = RangeStructure::new(rc.clone(), hat)?;
    Ok(SetPCat { rc, join, range, sizes: sizes.to_vec(), graphs, index })
}

/// The symmetric inverse monoid on an n-element set, as a one-object
/// restriction category with a range structure.
#[derive(Clone, Debug)]
pub struct InverseSymmetricCat {
    pub rc: RestrictionCat,
    pub range: RangeStructure,
    graphs: Vec<Graph>,
}

impl InverseSymmetricCat {
    pub fn graph(&self, m: MorId) -> &Graph {
        &self.graphs[m.0]
    }
}

/// All partial injections on an n-set; `bar(x) = x∘x*` is the partial
/// identity on the domain, `hat(x) = x∘x*` read at the codomain is the
/// partial identity on the image.
pub fn build_inverse_symmetric(n: usize) -> Result<InverseSymmetricCat> {
    if n > 4 {
        return Err(Error::Bounds(format!("partial injections on {n} elements exceed desk scale")));
    }
    let graphs: Vec<Graph> = all_partial_fns(n, n)
        .into_iter()
        .filter(|g| {
            let defined: Vec<usize> = g.iter().flatten().copied().collect();
            let distinct: BTreeSet<usize> = defined.iter().copied().collect();
            defined.len() == distinct.len()
        })
        .collect();
    let index: BTreeMap<Graph, usize> =
        graphs.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let k = graphs.len();
    let identity: Graph = (0..n).map(Some).collect();
    let mut entries = Vec::new();
    for gi in 0..k {
        for fi in 0..k {
            let comp = compose_graphs(&graphs[fi], &graphs[gi]);
            entries.push((MorId(gi), MorId(fi), MorId(index[&comp])));
        }
    }
    let mut base = FinCat::new(
        1,
        vec![ObjId(0); k],
        vec![ObjId(0); k],
        vec![MorId(index[&identity])],
        &entries,
    )?;
    base.label = format!("inverse_symmetric {n}");
    base.obj_labels = vec![n.to_string()];
    base.mor_labels = graphs.iter().map(graph_label).collect();
    let bar: Vec<MorId> = graphs
        .iter()
        .map(|g| {
            let d: Graph = g.iter().enumerate().map(|(x, v)| v.map(|_| x)).collect();
            MorId(index[&d])
        })
        .collect();
    let hat: Vec<MorId> = graphs
        .iter()
        .map(|g| {
            let image: BTreeSet<usize> = g.iter().flatten().copied().collect();
            let im: Graph = (0..n).map(|y| image.contains(&y).then_some(y)).collect();
            MorId(index[&im])
        })
        .collect();
    let rc = RestrictionCat::new(base, bar)?;
    let range = RangeStructure::new(rc.clone(), hat)?;
    Ok(InverseSymmetricCat { rc, range, graphs })
}

/// `Par(D, M)`: spans with M-leg on the left, up to isomorphism.
#[derive(Clone, Debug)]
pub struct ParCat {
    pub rc: RestrictionCat,
    pub base: FinCat,
    pub monics: Vec<MorId>,
    /// Canonical representative span for each Par morphism.
    pub spans: Vec<Span>,
}

/// Builds the span category over `d` with left legs in `m_class`.
/// Rejects the class unless it contains the identities, is closed under
/// composition, consists of monos, and is stable under pullback (a
/// universal span with M-left-leg exists for every cospan with an M
/// side).
pub fn build_par(d: &FinCat, m_class: &[MorId]) -> Result<ParCat> {
    let rep = validate_category(d);
    if !rep.ok() {
        return Err(Error::Precondition(format!("base category invalid:\n{rep}")));
    }
    let mset: BTreeSet<MorId> = m_class.iter().copied().collect();
    for a in d.objects() {
        if !mset.contains(&d.identity(a)) {
            return Err(Error::Precondition(format!(
                "M misses the identity of {}",
                d.obj_label(a)
            )));
        }
    }
    for &m in &mset {
        if !is_mono(d, m) {
            return Err(Error::Precondition(format!("{} in M is not monic", d.mor_label(m))));
        }
        for &m2 in &mset {
            if d.composable(m2, m) && !mset.contains(&d.comp(m2, m)) {
                return Err(Error::Precondition(format!(
                    "M not closed under composition at ({}, {})",
                    d.mor_label(m2),
                    d.mor_label(m)
                )));
            }
        }
    }
    for f in d.morphisms() {
        for &m in &mset {
            if d.cod(f) != d.cod(m) {
                continue;
            }
            if pullback_with_m_leg(d, f, m, &mset).is_none() {
                return Err(Error::Precondition(format!(
                    "M not stable: no pullback of {} along {} with M-leg",
                    d.mor_label(m),
                    d.mor_label(f)
                )));
            }
        }
    }

    // Enumerate spans hom by hom and group into iso classes; the
    // canonical representative is the least (apex, left, right).
    let mut spans: Vec<Span> = Vec::new(); // class representatives, in id order
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    let mut class_of: BTreeMap<(MorId, MorId), usize> = BTreeMap::new(); // (left, right) -> id
    for x in d.objects() {
        for y in d.objects() {
            let mut all: Vec<Span> = Vec::new();
            for z in d.objects() {
                for m in d.hom(z, x) {
                    if !mset.contains(&m) {
                        continue;
                    }
                    for g in d.hom(z, y) {
                        all.push(Span { apex: z, left: m, right: g });
                    }
                }
            }
            all.sort();
            let mut reps: Vec<Span> = Vec::new();
            for s in &all {
                let found = reps
                    .iter()
                    .position(|r| crate::cat::spans_isomorphic(d, r, s));
                let id = match found {
                    Some(i) => spans.len() - reps.len() + i,
                    None => {
                        reps.push(*s);
                        dom.push(x);
                        cod.push(y);
                        spans.push(*s);
                        spans.len() - 1
                    }
                };
                class_of.insert((s.left, s.right), id);
            }
        }
    }

    let identity: Vec<MorId> = d
        .objects()
        .map(|x| MorId(class_of[&(d.identity(x), d.identity(x))]))
        .collect();
    let mut entries = Vec::new();
    for (j, s2) in spans.iter().enumerate() {
        for (i, s1) in spans.iter().enumerate() {
            if cod[i] != dom[j] {
                continue;
            }
            // s2 ∘ s1: pull the left leg of s2 back along the right leg of s1.
            let pb = pullback_with_m_leg(d, s1.right, s2.left, &mset)
                .expect("stability was verified");
            let left = d.comp(s1.left, pb.left);
            let right = d.comp(s2.right, pb.right);
            entries.push((MorId(j), MorId(i), MorId(class_of[&(left, right)])));
        }
    }
    let n = spans.len();
    let mut base = FinCat::new(d.n_objects(), dom, cod, identity, &entries)?;
    base.label = format!("par({})", d.label);
    base.obj_labels = d.objects().map(|o| d.obj_label(o)).collect();
    base.mor_labels = spans
        .iter()
        .map(|s| format!("<{}|{}>", d.mor_label(s.left), d.mor_label(s.right)))
        .collect();
    let bar: Vec<MorId> = (0..n).map(|i| MorId(class_of[&(spans[i].left, spans[i].left)])).collect();
    let rc = RestrictionCat::new(base, bar)?;
    Ok(ParCat { rc, base: d.clone(), monics: mset.into_iter().collect(), spans })
}

/// Least universal span for the cospan `(f, m)` whose left leg lies in
/// `mset`.
fn pullback_with_m_leg(
    d: &FinCat,
    f: MorId,
    m: MorId,
    mset: &BTreeSet<MorId>,
) -> Option<Span> {
    // `pullback` returns the least universal span; all universal spans
    // are isomorphic, but M need not be closed under isomorphism, so
    // search the isomorphism class for an M-legged representative.
    let canonical = pullback(d, f, m).ok().flatten()?;
    if mset.contains(&canonical.left) {
        return Some(canonical);
    }
    for w in d.objects() {
        for left in d.hom(w, d.dom(f)) {
            if !mset.contains(&left) {
                continue;
            }
            for right in d.hom(w, d.dom(m)) {
                if d.comp(f, left) != d.comp(m, right) {
                    continue;
                }
                let s = Span { apex: w, left, right };
                if crate::cat::spans_isomorphic(d, &canonical, &s) {
                    return Some(s);
                }
            }
        }
    }
    None
}

/// The full sub-restriction-category of `Stab^op` on the given
/// semilattices: all stable maps, restriction via `a ↦ a ∧ u(⊤)`.
pub fn build_stab_op(lattices: &[MeetSemilattice]) -> Result<StabOpCat> {
    check_stab_bounds(lattices)?;
    StabOpCat::full(lattices.to_vec(), false)
}

/// The `jStab^op` fragment: objects must be frames and the morphisms are
/// the stable maps preserving all joins. Comes with its join structure.
pub fn build_jstab_op(lattices: &[MeetSemilattice]) -> Result<(StabOpCat, JoinStructure)> {
    check_stab_bounds(lattices)?;
    for (i, l) in lattices.iter().enumerate() {
        if !crate::semilattice::is_frame(l) {
            return Err(Error::Precondition(format!("lattice {i} is not a frame")));
        }
    }
    let s = StabOpCat::full(lattices.to_vec(), true)?;
    let js = JoinStructure::new(s.rc.clone());
    Ok((s, js))
}

fn check_stab_bounds(lattices: &[MeetSemilattice]) -> Result<()> {
    if lattices.is_empty() || lattices.len() > 3 {
        return Err(Error::Bounds("build_stab_op takes 1..=3 lattices".into()));
    }
    if lattices.iter().any(|l| l.size() > 6) {
        return Err(Error::Bounds("build_stab_op lattices must have ⩽ 6 elements".into()));
    }
    Ok(())
}

/// The trivial restriction structure: `bar(f)` is the identity on
/// `dom(f)`, so every map is total.
pub fn build_trivial(c: &FinCat) -> Result<RestrictionCat> {
    let rep = validate_category(c);
    if !rep.ok() {
        return Err(Error::Precondition(format!("base category invalid:\n{rep}")));
    }
    let bar = c.morphisms().map(|f| c.identity(c.dom(f))).collect();
    RestrictionCat::new(c.clone(), bar)
}

/// The inclusion of total maps into partial maps on the same sizes: the
/// trivial restriction structure on the finset category, `set_p`, and
/// the (non-hyperconnected, non-localic for sizes ⩾ 1) inclusion
/// restriction functor between them.
pub fn total_inclusion_into_set_p(
    sizes: &[usize],
    cfg: &CheckConfig,
) -> Result<(RestrictionCat, SetPCat, FinFunctor)> {
    let finset = finset_category(sizes);
    let triv = build_trivial(&finset)?;
    let sp = build_set_p(sizes, cfg)?;
    let mut mor_map = Vec::with_capacity(finset.n_morphisms());
    for a in 0..sizes.len() {
        for b in 0..sizes.len() {
            for g in all_total_fns(sizes[a], sizes[b]) {
                mor_map.push(
                    sp.mor_of_graph(ObjId(a), ObjId(b), &g)
                        .ok_or_else(|| Error::Structural("total map missing from set_p".into()))?,
                );
            }
        }
    }
    let inclusion = FinFunctor::new(
        finset.clone(),
        sp.rc.base.clone(),
        finset.objects().collect(),
        mor_map,
    )?;
    Ok((triv, sp, inclusion))
}

/// Bounds for the random fragment generator.
#[derive(Clone, Debug)]
pub struct RandomBounds {
    /// Reject closures larger than this; the generator then retries with
    /// fewer seed morphisms.
    pub max_morphisms: usize,
    /// Ambient `set_p` size vectors to draw from.
    pub ambient_pool: Vec<Vec<usize>>,
    /// Also close under joins of compatible pairs, producing a join
    /// restriction subcategory of the ambient.
    pub join_closed: bool,
    /// Keep every restriction idempotent of the kept objects (makes
    /// inclusions hyperconnected).
    pub keep_idempotents: bool,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            max_morphisms: 40,
            ambient_pool: vec![vec![1, 2], vec![2, 2], vec![1, 1, 2], vec![2], vec![1, 3]],
            join_closed: false,
            keep_idempotents: false,
        }
    }
}

/// A random closed fragment together with its inclusion into the
/// ambient instance it was carved from.
#[derive(Clone, Debug)]
pub struct RandomFragment {
    pub rc: RestrictionCat,
    pub ambient: RestrictionCat,
    pub inclusion: FinFunctor,
    /// True when the requested seed set had to be shrunk to fit the
    /// morphism bound.
    pub shrunk: bool,
}

/// Deterministically (per seed) selects a sub-restriction-category of a
/// `set_p` ambient: a subset of objects and a morphism subset closed
/// under composition, identities, and bar (and joins when asked).
pub fn random_restriction_category(seed: u64, bounds: &RandomBounds) -> Result<RestrictionCat> {
    random_fragment(seed, bounds).map(|f| f.rc)
}

pub fn random_fragment(seed: u64, bounds: &RandomBounds) -> Result<RandomFragment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = bounds.ambient_pool[rng.gen_range(0..bounds.ambient_pool.len())].clone();
    let cfg = CheckConfig::default();
    let ambient = build_set_p(&sizes, &cfg)?;
    let n_obj = ambient.rc.base.n_objects();
    let mut objs: Vec<ObjId> = (0..n_obj).filter(|_| rng.gen_bool(0.7)).map(ObjId).collect();
    if objs.is_empty() {
        objs.push(ObjId(rng.gen_range(0..n_obj)));
    }
    let in_objs = |m: MorId, c: &FinCat| {
        objs.contains(&c.dom(m)) && objs.contains(&c.cod(m))
    };
    let candidates: Vec<MorId> = ambient
        .rc
        .base
        .morphisms()
        .filter(|&m| in_objs(m, &ambient.rc.base))
        .collect();
    let mut n_seeds = rng.gen_range(1..=4usize);
    let mut seeds: Vec<MorId> = (0..n_seeds)
        .map(|_| candidates[rng.gen_range(0..candidates.len())])
        .collect();
    let join = bounds.join_closed.then_some(&ambient.join);
    let mut shrunk = false;
    loop {
        if bounds.keep_idempotents {
            for &a in &objs {
                seeds.extend(ambient.rc.restriction_idempotents(a));
            }
            seeds.sort();
            seeds.dedup();
        }
        let closed = close_morphism_set(&ambient.rc, &objs, &seeds, join);
        if closed.len() <= bounds.max_morphisms {
            let (rc, inclusion) = reindex_fragment(&ambient.rc, &objs, &closed);
            return Ok(RandomFragment { rc, ambient: ambient.rc.clone(), inclusion, shrunk });
        }
        if n_seeds == 0 {
            return Err(Error::Bounds(format!(
                "identity closure alone has {} morphisms (bound {})",
                closed.len(),
                bounds.max_morphisms
            )));
        }
        n_seeds -= 1;
        seeds.truncate(n_seeds);
        shrunk = true;
    }
}

/// Closes a seed set under identities, bar, composition, and optionally
/// joins of compatible pairs, inside the full subcategory on `objs`.
pub fn close_morphism_set(
    rc: &RestrictionCat,
    objs: &[ObjId],
    seeds: &[MorId],
    join: Option<&JoinStructure>,
) -> Vec<MorId> {
    let mut set: BTreeSet<MorId> = seeds.iter().copied().collect();
    for &a in objs {
        set.insert(rc.base.identity(a));
    }
    loop {
        let cur: Vec<MorId> = set.iter().copied().collect();
        let before = set.len();
        for &f in &cur {
            set.insert(rc.bar(f));
            for &g in &cur {
                if rc.base.composable(g, f) {
                    set.insert(rc.base.comp(g, f));
                }
            }
        }
        if let Some(js) = join {
            let cur2: Vec<MorId> = set.iter().copied().collect();
            for &f in &cur2 {
                for &g in &cur2 {
                    if f < g
                        && rc.base.parallel(f, g)
                        && rc.compatible_unchecked(f, g)
                    {
                        if let Ok(j) =
                            js.join_of(rc.base.dom(f), rc.base.cod(f), &[f, g])
                        {
                            set.insert(j);
                        }
                    }
                }
            }
            // The empty join (bottom of each kept hom) as well.
            for &a in objs {
                for &b in objs {
                    if let Ok(bot) = js.join_of(a, b, &[]) {
                        set.insert(bot);
                    }
                }
            }
        }
        if set.len() == before {
            return set.into_iter().collect();
        }
    }
}

/// Reindexes a closed morphism set as a standalone restriction category
/// plus its inclusion functor.
pub fn reindex_fragment(
    rc: &RestrictionCat,
    objs: &[ObjId],
    morphisms: &[MorId],
) -> (RestrictionCat, FinFunctor) {
    let mut objs = objs.to_vec();
    objs.sort();
    objs.dedup();
    let obj_pos = |a: ObjId| ObjId(objs.binary_search(&a).unwrap());
    let mor_pos = |m: MorId| MorId(morphisms.binary_search(&m).unwrap());
    let dom = morphisms.iter().map(|&m| obj_pos(rc.base.dom(m))).collect();
    let cod = morphisms.iter().map(|&m| obj_pos(rc.base.cod(m))).collect();
    let identity = objs.iter().map(|&a| mor_pos(rc.base.identity(a))).collect();
    let mut entries = Vec::new();
    for &g in morphisms {
        for &f in morphisms {
            if rc.base.composable(g, f) {
                entries.push((mor_pos(g), mor_pos(f), mor_pos(rc.base.comp(g, f))));
            }
        }
    }
    let mut base =
        FinCat::new(objs.len(), dom, cod, identity, &entries).expect("fragment tables");
    base.label = format!("fragment of {}", rc.base.label);
    base.obj_labels = objs.iter().map(|&a| rc.base.obj_label(a)).collect();
    base.mor_labels = morphisms.iter().map(|&m| rc.base.mor_label(m)).collect();
    let bar = morphisms.iter().map(|&m| mor_pos(rc.bar(m))).collect();
    let fragment = RestrictionCat::new(base, bar).expect("fragment bar");
    let inclusion = FinFunctor::new(
        fragment.base.clone(),
        rc.base.clone(),
        objs.clone(),
        morphisms.to_vec(),
    )
    .expect("inclusion");
    (fragment, inclusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restriction::verify_restriction;

    #[test]
    fn set_p_morphism_counts() {
        let cfg = CheckConfig::default();
        // (n+1)^m partial functions per hom.
        let sp = build_set_p(&[1, 2], &cfg).unwrap();
        assert_eq!(sp.rc.base.hom(ObjId(1), ObjId(0)).len(), 4); // (1+1)^2
        assert_eq!(sp.rc.base.n_morphisms(), 2 + 3 + 4 + 9);
        let sp0 = build_set_p(&[0], &cfg).unwrap();
        assert_eq!(sp0.rc.base.n_morphisms(), 1);
        assert!(sp0.rc.is_total(MorId(0)));
        assert_eq!(sp0.range.hat(MorId(0)), MorId(0));
    }

    #[test]
    fn set_p_bounds_rejected_with_estimate() {
        let cfg = CheckConfig::default();
        match build_set_p(&[4, 4], &cfg) {
            Err(Error::Bounds(msg)) => assert!(msg.contains("2500")),
            other => panic!("expected bounds rejection, got {other:?}"),
        }
        assert!(build_set_p(&[5], &cfg).is_err());
    }

    #[test]
    fn inverse_symmetric_counts() {
        // Σ_k C(n,k)^2 k! partial injections.
        assert_eq!(build_inverse_symmetric(1).unwrap().rc.base.n_morphisms(), 2);
        assert_eq!(build_inverse_symmetric(2).unwrap().rc.base.n_morphisms(), 7);
        assert_eq!(build_inverse_symmetric(3).unwrap().rc.base.n_morphisms(), 34);
        let inv = build_inverse_symmetric(2).unwrap();
        let id = inv.rc.base.identity(ObjId(0));
        assert_eq!(inv.rc.bar(id), id);
    }

    #[test]
    fn par_over_finsets_matches_partial_function_count() {
        let d = finset_category(&[0, 1, 2]);
        let monos: Vec<MorId> = d.morphisms().filter(|&m| is_mono(&d, m)).collect();
        let par = build_par(&d, &monos).unwrap();
        // Span iso-classes biject with graphs of partial functions.
        let cfg = CheckConfig::default();
        let sp = build_set_p(&[0, 1, 2], &cfg).unwrap();
        assert_eq!(par.rc.base.n_morphisms(), sp.rc.base.n_morphisms());
        for a in par.rc.base.objects() {
            for b in par.rc.base.objects() {
                assert_eq!(par.rc.base.hom(a, b).len(), sp.rc.base.hom(a, b).len());
            }
        }
        assert!(verify_restriction(&par.rc).ok());
    }

    #[test]
    fn par_with_identities_only_is_trivial() {
        let d = finset_category(&[1, 2]);
        let ids: Vec<MorId> = d.objects().map(|a| d.identity(a)).collect();
        let par = build_par(&d, &ids).unwrap();
        // Spans (1, g) up to iso are just morphisms g; everything total.
        assert_eq!(par.rc.base.n_morphisms(), d.n_morphisms());
        assert!(par.rc.base.morphisms().all(|m| par.rc.is_total(m)));
    }

    #[test]
    fn par_rejects_bad_classes() {
        let d = finset_category(&[1, 2]);
        // Missing identities.
        assert!(build_par(&d, &[]).is_err());
        // A non-mono: the constant map 2 -> 1 is not monic.
        let non_mono = d.morphisms().find(|&m| !is_mono(&d, m)).unwrap();
        let mut cls: Vec<MorId> = d.objects().map(|a| d.identity(a)).collect();
        cls.push(non_mono);
        assert!(build_par(&d, &cls).is_err());
    }

    #[test]
    fn stab_op_on_two_chain_has_three_endomaps() {
        let s = build_stab_op(&[MeetSemilattice::chain(2)]).unwrap();
        assert_eq!(s.rc.base.n_morphisms(), 3);
        assert!(verify_restriction(&s.rc).ok());
    }

    #[test]
    fn stab_op_single_point() {
        let s = build_stab_op(&[MeetSemilattice::chain(1)]).unwrap();
        assert_eq!(s.rc.base.n_objects(), 1);
        assert_eq!(s.rc.base.n_morphisms(), 1);
    }

    #[test]
    fn stab_op_idempotents_mirror_the_lattice() {
        let lats = [MeetSemilattice::chain(3), MeetSemilattice::powerset(2)];
        let s = build_stab_op(&lats).unwrap();
        for (i, l) in lats.iter().enumerate() {
            assert_eq!(s.rc.restriction_idempotents(ObjId(i)).len(), l.size());
        }
    }

    #[test]
    fn jstab_requires_frames() {
        assert!(build_jstab_op(&[MeetSemilattice::diamond_m3()]).is_err());
        let (s, _js) = build_jstab_op(&[MeetSemilattice::powerset(2)]).unwrap();
        assert!(verify_restriction(&s.rc).ok());
    }

    #[test]
    fn trivial_builder() {
        let c = finset_category(&[1, 2]);
        let rc = build_trivial(&c).unwrap();
        assert!(verify_restriction(&rc).ok());
        for a in rc.base.objects() {
            assert_eq!(rc.restriction_idempotents(a), vec![rc.base.identity(a)]);
        }
    }

    #[test]
    fn random_fragments_are_deterministic_and_valid() {
        let bounds = RandomBounds::default();
        for seed in 0..30 {
            let f1 = random_fragment(seed, &bounds).unwrap();
            let f2 = random_fragment(seed, &bounds).unwrap();
            assert_eq!(f1.rc, f2.rc);
            assert!(validate_category(&f1.rc.base).ok());
            assert!(verify_restriction(&f1.rc).ok());
            assert!(crate::cat::validate_functor(&f1.inclusion).ok());
        }
    }

    #[test]
    fn forcing_full_closure_recovers_ambient() {
        let cfg = CheckConfig::default();
        let sp = build_set_p(&[1, 2], &cfg).unwrap();
        let objs: Vec<ObjId> = sp.rc.base.objects().collect();
        let all: Vec<MorId> = sp.rc.base.morphisms().collect();
        let closed = close_morphism_set(&sp.rc, &objs, &all, None);
        let (frag, _) = reindex_fragment(&sp.rc, &objs, &closed);
        assert_eq!(frag.base.n_morphisms(), sp.rc.base.n_morphisms());
        assert_eq!(frag.bar_table(), sp.rc.bar_table());
    }
}
