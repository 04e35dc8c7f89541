//! The standard instance and functor suite, plus the selftest battery
//! the CLI exposes. Everything here is deterministic; randomized parts
//! are seeded.

use crate::builders::{self, RandomBounds};
use crate::cat::{FinCat, FinFunctor, MorId, ObjId};
use crate::config::CheckConfig;
use crate::fibration::{gamma, is_discrete_fibration_map, is_local_discrete_fibration, TwoFunctor};
use crate::fundamental::{
    factorize, fundamental_functor, is_hyperconnected, terminal_transformation,
};
use crate::join::{is_etale_map, is_join_functor, is_locally_etale, verify_join, JoinStructure};
use crate::range::{
    derive_range, enumerate_range_operators, is_range_functor, range_preservation_via_bc,
    DeriveRange,
};
use crate::restriction::{verify_restriction, RestrictionCat};
use crate::semilattice::{
    beck_chevalley, compose_squares_horizontally, enumerate_monotone_maps, enumerate_stable_maps,
    is_open, local_left_adjoint, MeetSemilattice, StabSquare, StableMap,
};
use crate::Result;

/// A suite instance: a restriction category with whatever join/range
/// structure it is known to carry at desk scale.
pub struct NamedInstance {
    pub name: &'static str,
    pub rc: RestrictionCat,
    pub join: Option<JoinStructure>,
    pub range: Option<crate::range::RangeStructure>,
}

/// A suite restriction functor with its hosts.
pub struct NamedFunctor {
    pub name: &'static str,
    pub f: FinFunctor,
    pub src: RestrictionCat,
    pub tgt: RestrictionCat,
}

fn z2_category() -> FinCat {
    FinCat::new(
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
    .unwrap()
}

/// A 7-endomorphism fragment of `Stab^op` on powerset(2) containing the
/// collapse map (atoms to bottom, top to top), whose `f*` is not open;
/// it therefore carries no range operator.
pub fn non_open_fragment() -> RestrictionCat {
    let b2 = MeetSemilattice::powerset(2);
    let s = builders::build_stab_op(&[b2]).unwrap();
    let collapse = s.mor_of(ObjId(0), ObjId(0), &[0, 0, 0, 3]).expect("collapse map exists");
    let objs: Vec<ObjId> = s.rc.base.objects().collect();
    let mut seeds = s.rc.restriction_idempotents(ObjId(0));
    seeds.push(collapse);
    let closed = builders::close_morphism_set(&s.rc, &objs, &seeds, None);
    let (rc, _) = builders::reindex_fragment(&s.rc, &objs, &closed);
    rc
}

/// The definedness-collapse functor: a join restriction functor-shaped
/// map that squashes the 2-element set onto a point, sending even the
/// empty map of `hom(A, B)` to the total one. It is a restriction
/// functor between join hosts but does not preserve (empty) joins.
pub fn definedness_collapse() -> (NamedFunctor, JoinStructure, JoinStructure) {
    let cfg = CheckConfig::default();
    let ambient = builders::build_set_p(&[2, 1], &cfg).unwrap();
    let (a, b) = (ObjId(0), ObjId(1));
    let full = ambient.mor_of_graph(a, b, &vec![Some(0), Some(0)]).unwrap();
    let empty_ba = ambient.mor_of_graph(b, a, &vec![None]).unwrap();
    let objs: Vec<ObjId> = ambient.rc.base.objects().collect();
    let closed =
        builders::close_morphism_set(&ambient.rc, &objs, &[full, empty_ba], Some(&ambient.join));
    let (c_rc, incl) = builders::reindex_fragment(&ambient.rc, &objs, &closed);
    let d = builders::build_set_p(&[1, 1], &cfg).unwrap();
    let k = d.mor_of_graph(a, b, &vec![Some(0)]).unwrap();
    let back = d.mor_of_graph(b, a, &vec![Some(0)]).unwrap();
    let mor_map: Vec<MorId> = c_rc
        .base
        .morphisms()
        .map(|m| {
            let amb = incl.on_mor(m);
            let (x, y) = (ambient.rc.base.dom(amb), ambient.rc.base.cod(amb));
            match (x.0, y.0) {
                (0, 0) => d.rc.base.identity(a),
                (0, 1) => k,
                (1, 1) => d.rc.base.identity(b),
                (1, 0) => back,
                _ => unreachable!(),
            }
        })
        .collect();
    let f = FinFunctor::new(c_rc.base.clone(), d.rc.base.clone(), vec![a, b], mor_map).unwrap();
    let js_c = JoinStructure::new(c_rc.clone());
    let js_d = d.join.clone();
    (
        NamedFunctor { name: "definedness_collapse", f, src: c_rc, tgt: d.rc.clone() },
        js_c,
        js_d,
    )
}

/// The instances exercised by the acceptance criteria: partial
/// functions on sizes up to [1,2,3], partial injections up to degree 3,
/// the span category over finite sets ⩽ 2 with all monos, `Stab^op` on
/// chains and powerset(2), trivial structures on two sample categories,
/// and the range-free fragment.
pub fn standard_instances() -> Vec<NamedInstance> {
    let cfg = CheckConfig::default();
    let mut out = Vec::new();
    for sizes in [vec![1], vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 2, 3]] {
        let sp = builders::build_set_p(&sizes, &cfg).unwrap();
        let name: &'static str = match sizes.len() {
            1 if sizes[0] == 1 => "set_p[1]",
            2 if sizes == [1, 1] => "set_p[1,1]",
            2 if sizes == [1, 2] => "set_p[1,2]",
            2 => "set_p[2,2]",
            _ => "set_p[1,2,3]",
        };
        out.push(NamedInstance {
            name,
            rc: sp.rc.clone(),
            join: Some(sp.join),
            range: Some(sp.range),
        });
    }
    for n in 1..=3usize {
        let inv = builders::build_inverse_symmetric(n).unwrap();
        let name: &'static str = ["inverse_symmetric(1)", "inverse_symmetric(2)", "inverse_symmetric(3)"][n - 1];
        out.push(NamedInstance { name, rc: inv.rc, join: None, range: Some(inv.range) });
    }
    {
        let d = builders::finset_category(&[0, 1, 2]);
        let monos: Vec<MorId> =
            d.morphisms().filter(|&m| crate::cat::is_mono(&d, m)).collect();
        let par = builders::build_par(&d, &monos).unwrap();
        let join = JoinStructure::new(par.rc.clone());
        out.push(NamedInstance { name: "par(finset⩽2)", rc: par.rc, join: Some(join), range: None });
    }
    {
        let s = builders::build_stab_op(&[
            MeetSemilattice::chain(2),
            MeetSemilattice::chain(3),
            MeetSemilattice::powerset(2),
        ])
        .unwrap();
        out.push(NamedInstance { name: "stab_op[c2,c3,B2]", rc: s.rc, join: None, range: None });
    }
    {
        let (s, js) = builders::build_jstab_op(&[
            MeetSemilattice::powerset(2),
            MeetSemilattice::chain(3),
        ])
        .unwrap();
        out.push(NamedInstance { name: "jstab_op[B2,c3]", rc: s.rc, join: Some(js), range: None });
    }
    out.push(NamedInstance {
        name: "trivial(finset[1,2])",
        rc: builders::build_trivial(&builders::finset_category(&[1, 2])).unwrap(),
        join: None,
        range: None,
    });
    out.push(NamedInstance {
        name: "trivial(Z2)",
        rc: builders::build_trivial(&z2_category()).unwrap(),
        join: None,
        range: None,
    });
    out.push(NamedInstance {
        name: "non_open_fragment",
        rc: non_open_fragment(),
        join: None,
        range: None,
    });
    {
        let (nf, js_c, _) = definedness_collapse();
        out.push(NamedInstance {
            name: "definedness_collapse_source",
            rc: nf.src,
            join: Some(js_c),
            range: None,
        });
    }
    out
}

/// At least ten restriction functors covering hyperconnected, localic,
/// both, and neither.
pub fn standard_functors() -> Vec<NamedFunctor> {
    let cfg = CheckConfig::default();
    let mut out = Vec::new();
    {
        let sp = builders::build_set_p(&[1, 2], &cfg).unwrap();
        out.push(NamedFunctor {
            name: "id(set_p[1,2])",
            f: FinFunctor::identity(&sp.rc.base),
            src: sp.rc.clone(),
            tgt: sp.rc,
        });
    }
    {
        let inv = builders::build_inverse_symmetric(2).unwrap();
        out.push(NamedFunctor {
            name: "id(inverse_symmetric(2))",
            f: FinFunctor::identity(&inv.rc.base),
            src: inv.rc.clone(),
            tgt: inv.rc,
        });
    }
    for sizes in [vec![1, 1], vec![1, 2]] {
        let (triv, sp, incl) = builders::total_inclusion_into_set_p(&sizes, &cfg).unwrap();
        let name: &'static str =
            if sizes == [1, 1] { "totals[1,1]↪set_p" } else { "totals[1,2]↪set_p" };
        out.push(NamedFunctor { name, f: incl, src: triv, tgt: sp.rc });
    }
    for (name, rc) in [
        ("fundamental(set_p[2])", builders::build_set_p(&[2], &cfg).unwrap().rc),
        ("fundamental(inverse_symmetric(2))", builders::build_inverse_symmetric(2).unwrap().rc),
        ("fundamental(trivial finset)", builders::build_trivial(&builders::finset_category(&[1, 2])).unwrap()),
    ] {
        let fund = fundamental_functor(&rc).unwrap();
        out.push(NamedFunctor { name, f: fund.functor, src: rc, tgt: fund.stab.rc });
    }
    {
        let (triv, sp, incl) = builders::total_inclusion_into_set_p(&[1, 2], &cfg).unwrap();
        let fac = factorize(&incl, &triv, &sp.rc, &cfg).unwrap();
        out.push(NamedFunctor {
            name: "H(totals[1,2]↪set_p)",
            f: fac.h,
            src: triv,
            tgt: fac.e.clone(),
        });
        out.push(NamedFunctor { name: "K(totals[1,2]↪set_p)", f: fac.k, src: fac.e, tgt: sp.rc });
    }
    {
        // Non-identity hyperconnected endofunctor: swap the two equal
        // lattice objects of the fundamental fragment of set_p[1,1].
        let sp = builders::build_set_p(&[1, 1], &cfg).unwrap();
        let fund = fundamental_functor(&sp.rc).unwrap();
        let s = fund.stab;
        let swap_obj = vec![ObjId(1), ObjId(0)];
        let swap_mor: Vec<MorId> = s
            .rc
            .base
            .morphisms()
            .map(|m| {
                s.mor_of(swap_obj[s.rc.base.dom(m).0], swap_obj[s.rc.base.cod(m).0], s.map_fn(m))
                    .unwrap()
            })
            .collect();
        let f =
            FinFunctor::new(s.rc.base.clone(), s.rc.base.clone(), swap_obj, swap_mor).unwrap();
        out.push(NamedFunctor { name: "swap(𝒪 set_p[1,1])", f, src: s.rc.clone(), tgt: s.rc });
    }
    {
        let (nf, _, _) = definedness_collapse();
        out.push(nf);
    }
    {
        // A constant functor to the trivial point.
        let sp = builders::build_set_p(&[1], &cfg).unwrap();
        let point = builders::build_trivial(&crate::cat::FinCat::new(
            1,
            vec![ObjId(0)],
            vec![ObjId(0)],
            vec![MorId(0)],
            &[(MorId(0), MorId(0), MorId(0))],
        )
        .unwrap())
        .unwrap();
        let f = FinFunctor::new(
            sp.rc.base.clone(),
            point.base.clone(),
            vec![ObjId(0)],
            vec![MorId(0); sp.rc.base.n_morphisms()],
        )
        .unwrap();
        out.push(NamedFunctor { name: "collapse_to_point", f, src: sp.rc, tgt: point });
    }
    {
        let (nf, _, _) = chain_into_set_p();
        out.push(nf);
    }
    out
}

/// The embedding of the trivial 2-chain into `set_p[1,2]` sending the
/// generator to a non-surjective total injection. Both hosts carry
/// range operators but the functor shrinks images: `F(hat u) = 1` while
/// `hat(Fu)` is the strictly smaller image idempotent. Also neither
/// hyperconnected nor localic (one fiber is empty).
pub fn chain_into_set_p() -> (
    NamedFunctor,
    crate::range::RangeStructure,
    crate::range::RangeStructure,
) {
    let cfg = CheckConfig::default();
    let base = FinCat::new(
        2,
        vec![ObjId(0), ObjId(1), ObjId(0)],
        vec![ObjId(0), ObjId(1), ObjId(1)],
        vec![MorId(0), MorId(1)],
        &[
            (MorId(0), MorId(0), MorId(0)),
            (MorId(1), MorId(1), MorId(1)),
            (MorId(2), MorId(0), MorId(2)),
            (MorId(1), MorId(2), MorId(2)),
        ],
    )
    .unwrap();
    let c = builders::build_trivial(&base).unwrap();
    // Everything is total, so the range operator is identity-valued.
    let hat_c: Vec<MorId> =
        c.base.morphisms().map(|m| c.base.identity(c.base.cod(m))).collect();
    let rs_c = crate::range::RangeStructure::new(c.clone(), hat_c).unwrap();
    let sp = builders::build_set_p(&[1, 2], &cfg).unwrap();
    let u = sp.mor_of_graph(ObjId(0), ObjId(1), &vec![Some(0)]).unwrap();
    let f = FinFunctor::new(
        c.base.clone(),
        sp.rc.base.clone(),
        vec![ObjId(0), ObjId(1)],
        vec![sp.rc.base.identity(ObjId(0)), sp.rc.base.identity(ObjId(1)), u],
    )
    .unwrap();
    (
        NamedFunctor { name: "chain↪set_p (image-shrinking)", f, src: c, tgt: sp.rc.clone() },
        rs_c,
        sp.range,
    )
}

/// Random inclusion functors (fragment into its set_p ambient), half of
/// them idempotent-complete so that both hyperconnected verdicts occur.
pub fn random_inclusions(seed_base: u64, count: usize) -> Vec<NamedFunctor> {
    let mut out = Vec::new();
    for i in 0..count {
        let bounds = RandomBounds {
            keep_idempotents: i % 2 == 0,
            ..RandomBounds::default()
        };
        let frag = builders::random_fragment(seed_base + i as u64, &bounds).unwrap();
        out.push(NamedFunctor {
            name: "random_inclusion",
            f: frag.inclusion,
            src: frag.rc,
            tgt: frag.ambient,
        });
    }
    out
}

/// The lattice catalog for the open-map checks: every lattice has at
/// most 6 elements.
pub fn lattice_catalog() -> Vec<MeetSemilattice> {
    vec![
        MeetSemilattice::chain(1),
        MeetSemilattice::chain(2),
        MeetSemilattice::chain(3),
        MeetSemilattice::chain(4),
        MeetSemilattice::chain(6),
        MeetSemilattice::powerset(2),
        MeetSemilattice::diamond_m3(),
        MeetSemilattice::pentagon_n5(),
        MeetSemilattice::grid_2x3(),
    ]
}

/// One selftest check outcome.
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl std::fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:38} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn push(checks: &mut Vec<Check>, name: &str, pass: bool, detail: String) {
    checks.push(Check { name: name.to_string(), pass, detail });
}

/// Runs the full property battery. `cases` scales the randomized parts
/// (functor pairs and join fragments).
pub fn run_selftest(seed: u64, cases: usize, cfg: &CheckConfig) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    let instances = standard_instances();
    let functors = standard_functors();

    // Axioms on every instance.
    {
        let mut all = true;
        let mut detail = String::new();
        for inst in &instances {
            let rep = verify_restriction(&inst.rc);
            if !rep.ok() {
                all = false;
                detail = format!("{} fails R1-R4", inst.name);
                break;
            }
        }
        push(&mut checks, "axioms/R1-R4 on suite", all, detail);
    }

    // Hyperconnected ⇔ local discrete fibration, randomized + named.
    {
        let mut agree = 0usize;
        let mut total = 0usize;
        let mut trues = 0usize;
        let mut fail = String::new();
        let mut run = |nf: &NamedFunctor| -> Result<()> {
            let hyper = is_hyperconnected(&nf.f, &nf.src, &nf.tgt)?;
            let c2 = gamma(&nf.src);
            let d2 = gamma(&nf.tgt);
            let f2 = TwoFunctor::new(&c2, &d2, nf.f.clone())?;
            let ldf = is_local_discrete_fibration(&c2, &d2, &f2);
            total += 1;
            if hyper == ldf {
                agree += 1;
                if hyper {
                    trues += 1;
                }
            } else if fail.is_empty() {
                fail = format!("disagreement on {}", nf.name);
            }
            Ok(())
        };
        for nf in &functors {
            run(nf)?;
        }
        for nf in &random_inclusions(seed, cases) {
            run(nf)?;
        }
        push(
            &mut checks,
            "hyperconnected ⇔ locally-discrete-fibration",
            agree == total && trues > 0 && trues < total,
            format!("{agree}/{total} agree ({trues} hyperconnected). {fail}"),
        );
    }

    // Totality characterisations.
    {
        let mut ok = true;
        let mut detail = String::new();
        for inst in &instances {
            let k2 = gamma(&inst.rc);
            for m in inst.rc.base.morphisms() {
                if inst.rc.is_total(m) != is_discrete_fibration_map(&k2, m) {
                    ok = false;
                    detail = format!("df mismatch in {}", inst.name);
                }
            }
            if let Some(js) = &inst.join {
                if inst.rc.base.n_morphisms() <= 40 {
                    for m in inst.rc.base.morphisms() {
                        if inst.rc.is_total(m) != is_etale_map(js, m, cfg) {
                            ok = false;
                            detail = format!("etale mismatch in {}", inst.name);
                        }
                    }
                }
            }
        }
        push(&mut checks, "total ⇔ fibration ⇔ etale", ok, detail);
    }

    // J1 ∧ J2 ⇒ J3 on random join-closed fragments.
    {
        let bounds = RandomBounds { join_closed: true, max_morphisms: 24, ..Default::default() };
        let mut never_falsified = true;
        let mut tested = 0usize;
        for i in 0..cases {
            let frag = builders::random_fragment(seed.wrapping_add(1000 + i as u64), &bounds)?;
            let js = JoinStructure::new(frag.rc);
            let rep = verify_join(&js, cfg);
            tested += 1;
            let j12 = !rep.failed("J1") && !rep.failed("J2") && !rep.failed("exists");
            if j12 && rep.failed("J3") {
                never_falsified = false;
            }
        }
        push(
            &mut checks,
            "J1 ∧ J2 ⇒ J3 on random fragments",
            never_falsified,
            format!("{tested} fragments"),
        );
    }

    // Join functor ⇔ locally etale for hyperconnected functors between
    // join hosts; and the collapse functor breaks joins.
    {
        let mut ok = true;
        let mut detail = String::new();
        for inst in &instances {
            let Some(js) = &inst.join else { continue };
            if inst.rc.base.n_morphisms() > 40 {
                continue;
            }
            let id = FinFunctor::identity(&inst.rc.base);
            let jf = is_join_functor(&id, js, js, cfg)?;
            let c2 = gamma(&inst.rc);
            let f2 = TwoFunctor::identity(&c2);
            let et = is_locally_etale(&c2, &f2, js, cfg)?;
            if jf != et {
                ok = false;
                detail = format!("identity disagreement on {}", inst.name);
            }
        }
        let (nf, js_c, js_d) = definedness_collapse();
        let breaking = !is_join_functor(&nf.f, &js_c, &js_d, cfg)?;
        if !breaking {
            ok = false;
            detail = "collapse functor unexpectedly preserves joins".into();
        }
        push(&mut checks, "join functor ⇔ locally etale", ok, detail);
    }

    // Range: derive ⇔ enumerate on small instances; Beck-Chevalley
    // characterises range preservation.
    {
        let mut ok = true;
        let mut detail = String::new();
        for inst in &instances {
            if inst.rc.base.n_morphisms() > cfg.range_enum_cap {
                continue;
            }
            let derived = derive_range(&inst.rc)?;
            let listed = enumerate_range_operators(&inst.rc, cfg)?;
            match (&derived, listed.as_slice()) {
                (DeriveRange::Derived(rs, _), [only]) => {
                    if rs.hat_table() != only.hat_table() {
                        ok = false;
                        detail = format!("operator mismatch on {}", inst.name);
                    }
                }
                (DeriveRange::NonOpen { .. }, []) => {}
                _ => {
                    ok = false;
                    detail = format!("derive/enumerate disagree on {}", inst.name);
                }
            }
        }
        for inst in &instances {
            let Some(rs) = &inst.range else { continue };
            if inst.rc.base.n_morphisms() > 40 {
                continue;
            }
            let id = FinFunctor::identity(&inst.rc.base);
            let a = is_range_functor(&id, rs, rs)?;
            let b = range_preservation_via_bc(&id, &inst.rc, &inst.rc)?;
            if a != b {
                ok = false;
                detail = format!("BC mismatch on {}", inst.name);
            }
        }
        push(&mut checks, "range: derive ⇔ enumerate ⇔ BC", ok, detail);
    }

    // Open maps: canonical adjoint agrees with the exhaustive monotone
    // search; openness is downward closed.
    {
        let catalog = lattice_catalog();
        let mut ok = true;
        let mut count = 0usize;
        'outer: for src in &catalog {
            for tgt in &catalog {
                if src.size() * tgt.size() > 24 {
                    continue; // the full sweep lives in the acceptance suite
                }
                for map in enumerate_stable_maps(src, tgt, false) {
                    let g = StableMap::new(src.clone(), tgt.clone(), map).unwrap();
                    count += 1;
                    if !adjoint_agrees_with_search(&g) {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        push(&mut checks, "open maps: formula = search", ok, format!("{count} maps"));
        let mut closed = true;
        for l in [MeetSemilattice::powerset(2), MeetSemilattice::chain(3)] {
            let maps = enumerate_stable_maps(&l, &l, false);
            for m1 in &maps {
                for m2 in &maps {
                    let g = StableMap::new(l.clone(), l.clone(), m1.clone()).unwrap();
                    let g2 = StableMap::new(l.clone(), l.clone(), m2.clone()).unwrap();
                    // g2 ⩽ g in Stab^op: g2(b) = g(b) ∧ g2(⊤).
                    let below = l
                        .elements()
                        .all(|b| g2.apply(b) == l.meet(g.apply(b), g2.apply(l.top())));
                    if below && is_open(&g) && !is_open(&g2) {
                        closed = false;
                    }
                }
            }
        }
        push(&mut checks, "open maps: downward closed", closed, String::new());
    }

    // Factorisation and terminality on the named functors.
    {
        let mut ok = true;
        let mut detail = String::new();
        for nf in &functors {
            if nf.src.base.n_morphisms() > 40 || nf.tgt.base.n_morphisms() > 60 {
                continue;
            }
            match factorize(&nf.f, &nf.src, &nf.tgt, cfg) {
                Ok(fac) => {
                    if !fac.h.then(&fac.k).unwrap().same_maps(&nf.f) {
                        ok = false;
                        detail = format!("K∘H ≠ F for {}", nf.name);
                    }
                }
                Err(e) => {
                    ok = false;
                    detail = format!("factorize failed on {}: {e}", nf.name);
                }
            }
        }
        push(&mut checks, "factorisation K∘H = F, localic/hyper", ok, detail);

        let mut okt = true;
        let mut detail_t = String::new();
        for inst in &instances {
            if inst.rc.base.n_morphisms() > 40 {
                continue;
            }
            let fund = fundamental_functor(&inst.rc)?;
            match terminal_transformation(&inst.rc, &fund.functor, &fund.stab, cfg) {
                Ok(t) => {
                    if t.uniqueness != Some(1) {
                        okt = false;
                        detail_t = format!("terminality count on {}", inst.name);
                    }
                }
                Err(e) => {
                    okt = false;
                    detail_t = format!("terminal transformation failed on {}: {e}", inst.name);
                }
            }
        }
        push(&mut checks, "fundamental terminality", okt, detail_t);
    }

    // Beck-Chevalley squares compose horizontally.
    {
        let (pairs, ok) = bc_square_composition_sample(40);
        push(&mut checks, "BC squares compose", ok, format!("{pairs} composable pairs"));
    }

    // Serialization canonical round trips.
    {
        let mut ok = true;
        for inst in &instances {
            if inst.rc.base.n_morphisms() > 40 {
                continue;
            }
            let doc = crate::doc::Document::Restriction(inst.rc.clone());
            let text = crate::doc::serialize(&doc);
            match crate::doc::parse(&text) {
                Ok(parsed) => {
                    if crate::doc::serialize(&parsed) != text {
                        ok = false;
                    }
                }
                Err(_) => ok = false,
            }
        }
        push(&mut checks, "serialization round trip", ok, String::new());
    }

    Ok(SelftestReport { checks })
}

/// Compares the canonical local-left-adjoint formula against the
/// exhaustive search over monotone candidates.
pub fn adjoint_agrees_with_search(g: &StableMap) -> bool {
    let canonical = local_left_adjoint(g);
    let down = g.target.downset(g.apply(g.source.top()));
    let mut found: Vec<Vec<usize>> = Vec::new();
    for cand in enumerate_monotone_maps(&down.lattice, &g.source) {
        let adjunction = down.elems.iter().enumerate().all(|(i, &b)| {
            g.source.elements().all(|a| g.source.le(cand[i], a) == g.target.le(b, g.apply(a)))
        });
        if adjunction {
            found.push(cand);
        }
    }
    match canonical {
        Some(adj) => found == vec![adj.map],
        None => found.is_empty(),
    }
}

/// Generates Beck-Chevalley squares on powerset(2) and composes
/// horizontally compatible pairs; returns the number of pairs tried and
/// whether every composite was again Beck-Chevalley.
pub fn bc_square_composition_sample(max_squares: usize) -> (usize, bool) {
    let l = MeetSemilattice::powerset(2);
    let maps = enumerate_stable_maps(&l, &l, false);
    let mk = |m: &Vec<usize>| StableMap::new(l.clone(), l.clone(), m.clone()).unwrap();
    let mut squares: Vec<StabSquare> = Vec::new();
    'search: for h in &maps {
        for f in &maps {
            for g in &maps {
                for k in &maps {
                    let (h, f, g, k) = (mk(h), mk(f), mk(g), mk(k));
                    if !f.preserves_top() || !g.preserves_top() || !is_open(&h) || !is_open(&k) {
                        continue;
                    }
                    let Ok(sq) = StabSquare::new(h, f, g, k) else { continue };
                    if beck_chevalley(&sq).unwrap() {
                        squares.push(sq);
                        if squares.len() >= max_squares {
                            break 'search;
                        }
                    }
                }
            }
        }
    }
    let mut pairs = 0usize;
    let mut all_ok = true;
    for s1 in &squares {
        for s2 in &squares {
            if s1.g != s2.f {
                continue;
            }
            pairs += 1;
            let composite = compose_squares_horizontally(s1, s2).unwrap();
            if !beck_chevalley(&composite).unwrap() {
                all_ok = false;
            }
        }
    }
    (pairs, all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::is_localic;

    #[test]
    fn suite_instances_verify() {
        for inst in standard_instances() {
            assert!(
                crate::cat::validate_category(&inst.rc.base).ok(),
                "{} base invalid",
                inst.name
            );
            assert!(verify_restriction(&inst.rc).ok(), "{} fails R1-R4", inst.name);
        }
    }

    #[test]
    fn suite_functors_are_restriction_functors() {
        for nf in standard_functors() {
            assert!(
                crate::restriction::is_restriction_functor(&nf.f, &nf.src, &nf.tgt),
                "{} is not a restriction functor",
                nf.name
            );
        }
        assert!(standard_functors().len() >= 10);
    }

    #[test]
    fn non_open_fragment_has_no_range_operator() {
        let cfg = CheckConfig::default();
        let rc = non_open_fragment();
        assert_eq!(rc.base.n_morphisms(), 7);
        match derive_range(&rc).unwrap() {
            DeriveRange::NonOpen { .. } => {}
            DeriveRange::Derived(..) => panic!("collapse fragment must not carry a range"),
        }
        assert!(enumerate_range_operators(&rc, &cfg).unwrap().is_empty());
    }

    #[test]
    fn collapse_functor_breaks_joins_only_through_bottoms() {
        let cfg = CheckConfig::default();
        let (nf, js_c, js_d) = definedness_collapse();
        assert!(crate::restriction::is_restriction_functor(&nf.f, &nf.src, &nf.tgt));
        assert!(verify_join(&js_c, &cfg).ok());
        assert!(verify_join(&js_d, &cfg).ok());
        assert!(!is_join_functor(&nf.f, &js_c, &js_d, &cfg).unwrap());
        assert!(!is_hyperconnected(&nf.f, &nf.src, &nf.tgt).unwrap());
    }

    #[test]
    fn selftest_small_run_passes() {
        let cfg = CheckConfig::default();
        let rep = run_selftest(7, 8, &cfg).unwrap();
        assert!(rep.ok(), "{rep}");
    }

    #[test]
    fn image_shrinking_functor_breaks_ranges_both_ways() {
        let (nf, rs_c, rs_d) = chain_into_set_p();
        assert!(crate::range::verify_range(&rs_c).ok());
        assert!(crate::range::verify_range(&rs_d).ok());
        assert!(!is_range_functor(&nf.f, &rs_c, &rs_d).unwrap());
        assert!(!range_preservation_via_bc(&nf.f, &nf.src, &nf.tgt).unwrap());
        assert!(!is_hyperconnected(&nf.f, &nf.src, &nf.tgt).unwrap());
        assert!(!is_localic(&nf.f, &nf.src, &nf.tgt).unwrap());
    }
}
