//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Everything is exact (no tolerances anywhere in this domain); the
//! randomized parts are seeded and the counts meet the stated minimums.

use rescat::builders::{self, RandomBounds};
use rescat::cat::{FinFunctor, MorId, ObjId};
use rescat::doc::{functor_document, parse, serialize, Document, ReportDoc};
use rescat::fibration::{gamma, is_discrete_fibration_map, is_local_discrete_fibration, TwoFunctor};
use rescat::fundamental::{
    diagonal_filler, factorize, fundamental_functor, is_hyperconnected, is_localic,
    terminal_transformation, Factorisation, FunctorSquare,
};
use rescat::join::{is_etale_map, is_join_functor, is_locally_etale, verify_join, JoinStructure};
use rescat::range::{
    derive_range, enumerate_range_operators, is_range_functor, range_preservation_via_bc,
    DeriveRange, RangeStructure,
};
use rescat::restriction::verify_restriction;
use rescat::semilattice::{
    enumerate_stable_maps, is_open, MeetSemilattice, StableMap,
};
use rescat::suite;
use rescat::CheckConfig;
use std::time::Instant;

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

fn pass(n: usize, name: &str, detail: &str) {
    println!("ACCEPTANCE {n:2} ({name}): PASS  {detail}");
}

#[test]
fn criterion_01_axiom_suites() {
    let start = Instant::now();
    let c = cfg();
    let mut checked = 0usize;

    let sp = builders::build_set_p(&[1, 2, 3], &c).unwrap();
    assert!(rescat::cat::validate_category(&sp.rc.base).ok());
    assert!(verify_restriction(&sp.rc).ok());
    checked += 1;

    for n in 1..=3 {
        let inv = builders::build_inverse_symmetric(n).unwrap();
        assert!(rescat::cat::validate_category(&inv.rc.base).ok());
        assert!(verify_restriction(&inv.rc).ok(), "inverse_symmetric({n})");
        checked += 1;
    }

    let d = builders::finset_category(&[0, 1, 2]);
    let monos: Vec<MorId> = d.morphisms().filter(|&m| rescat::cat::is_mono(&d, m)).collect();
    let par = builders::build_par(&d, &monos).unwrap();
    assert!(rescat::cat::validate_category(&par.rc.base).ok());
    assert!(verify_restriction(&par.rc).ok());
    checked += 1;

    let stab = builders::build_stab_op(&[
        MeetSemilattice::chain(2),
        MeetSemilattice::chain(3),
        MeetSemilattice::powerset(2),
    ])
    .unwrap();
    assert!(rescat::cat::validate_category(&stab.rc.base).ok());
    assert!(verify_restriction(&stab.rc).ok());
    checked += 1;

    for rc in [
        builders::build_trivial(&builders::finset_category(&[1, 2])).unwrap(),
        builders::build_trivial(&builders::finset_category(&[2, 2])).unwrap(),
    ] {
        assert!(rescat::cat::validate_category(&rc.base).ok());
        assert!(verify_restriction(&rc).ok());
        checked += 1;
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "axiom suites took {elapsed:?} (budget 30 s)");
    pass(1, "axiom suites", &format!("{checked} instances in {elapsed:?}"));
}

#[test]
fn criterion_02_powerset_law() {
    let c = cfg();
    let mut isos = 0usize;
    for sizes in [vec![1, 2, 3], vec![2, 2]] {
        let sp = builders::build_set_p(&sizes, &c).unwrap();
        let fund = fundamental_functor(&sp.rc).unwrap();
        for a in sp.rc.base.objects() {
            let n = sp.sizes[a.0];
            let idems = sp.rc.restriction_idempotents(a);
            assert_eq!(idems.len(), 1 << n, "|𝒪(A)| = 2^|A|");
            // Explicit lattice isomorphism onto powerset(n): idempotent
            // position ↦ bitmask of its domain of definition.
            let l = fund.lattice_of(a);
            let ps = MeetSemilattice::powerset(n);
            let mask = |pos: usize| -> usize {
                sp.graph(fund.idem_of[a.0][pos])
                    .iter()
                    .enumerate()
                    .fold(0, |m, (i, v)| if v.is_some() { m | 1 << i } else { m })
            };
            let masks: Vec<usize> = (0..l.size()).map(mask).collect();
            let mut uniq = masks.clone();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), 1 << n, "bijection");
            for i in 0..l.size() {
                for j in 0..l.size() {
                    assert_eq!(l.le(i, j), ps.le(masks[i], masks[j]), "order iso");
                    assert_eq!(masks[l.meet(i, j)], ps.meet(masks[i], masks[j]), "meet iso");
                }
            }
            assert_eq!(masks[l.top()], ps.top());
            isos += 1;
        }
    }
    pass(2, "power-set law", &format!("{isos} explicit lattice isomorphisms"));
}

#[test]
fn criterion_03_fundamental_hyperconnected_and_terminal() {
    let c = cfg();
    let instances = suite::standard_instances();
    let mut terminal_checked = 0usize;
    for inst in &instances {
        let fund = fundamental_functor(&inst.rc).unwrap();
        assert!(
            is_hyperconnected(&fund.functor, &inst.rc, &fund.stab.rc).unwrap(),
            "fundamental of {} must be hyperconnected",
            inst.name
        );
        assert!(inst.rc.base.n_morphisms() <= c.exhaustive_cap, "{}", inst.name);
        let t = terminal_transformation(&inst.rc, &fund.functor, &fund.stab, &c).unwrap();
        assert_eq!(t.uniqueness, Some(1), "terminality on {}", inst.name);
        terminal_checked += 1;
    }
    pass(
        3,
        "fundamental functor",
        &format!(
            "{} instances hyperconnected, {terminal_checked} exhaustive terminality searches",
            instances.len()
        ),
    );
}

/// The factorisation list shared by criteria 4 and 6.
fn factorisations() -> Vec<(String, rescat::suite::NamedFunctor, Factorisation)> {
    let c = cfg();
    suite::standard_functors()
        .into_iter()
        .map(|nf| {
            let fac = factorize(&nf.f, &nf.src, &nf.tgt, &c)
                .unwrap_or_else(|e| panic!("factorize failed on {}: {e}", nf.name));
            (nf.name.to_string(), nf, fac)
        })
        .collect()
}

#[test]
fn criterion_04_factorisation_and_fillers() {
    let c = cfg();
    let facs = factorisations();
    assert!(facs.len() >= 10, "need at least 10 suite functors, got {}", facs.len());
    let mut non_hyper = 0usize;
    let mut non_localic = 0usize;
    let mut fillers_unique = 0usize;
    for (name, nf, fac) in &facs {
        if !is_hyperconnected(&nf.f, &nf.src, &nf.tgt).unwrap() {
            non_hyper += 1;
        }
        if !is_localic(&nf.f, &nf.src, &nf.tgt).unwrap() {
            non_localic += 1;
        }
        assert!(fac.h.then(&fac.k).unwrap().same_maps(&nf.f), "K∘H = F exactly on {name}");
        assert!(is_localic(&fac.h, &nf.src, &fac.e).unwrap(), "H localic on {name}");
        assert!(is_hyperconnected(&fac.k, &fac.e, &nf.tgt).unwrap(), "K hyperconnected on {name}");
        let sq = FunctorSquare {
            c: nf.src.clone(),
            d: fac.e.clone(),
            e: fac.e.clone(),
            f: nf.tgt.clone(),
            top: fac.h.clone(),
            left: fac.h.clone(),
            bottom: fac.k.clone(),
            right: fac.k.clone(),
        };
        let filler = diagonal_filler(&sq, &c).unwrap();
        assert!(filler.j.same_maps(&FinFunctor::identity(&fac.e.base)), "filler on {name}");
        if fac.e.base.n_morphisms().max(nf.tgt.base.n_morphisms()) <= c.exhaustive_cap {
            assert_eq!(filler.uniqueness, Some(1), "filler uniqueness on {name}");
            fillers_unique += 1;
        }
    }
    assert!(non_hyper > 0, "suite must include non-hyperconnected functors");
    assert!(non_localic > 0, "suite must include non-localic functors");
    pass(
        4,
        "factorisation",
        &format!(
            "{} functors ({non_hyper} non-hyperconnected, {non_localic} non-localic), {fillers_unique} exhaustive filler searches",
            facs.len()
        ),
    );
}

#[test]
fn criterion_05_hyperconnected_iff_local_discrete_fibration() {
    let mut total = 0usize;
    let mut hyper_true = 0usize;
    let mut run = |f: &FinFunctor, src: &rescat::RestrictionCat, tgt: &rescat::RestrictionCat, name: &str| {
        let hyper = is_hyperconnected(f, src, tgt).unwrap();
        let c2 = gamma(src);
        let d2 = gamma(tgt);
        let f2 = TwoFunctor::new(&c2, &d2, f.clone()).unwrap();
        let ldf = is_local_discrete_fibration(&c2, &d2, &f2);
        assert_eq!(hyper, ldf, "Prop 4.1 disagreement on {name}");
        total += 1;
        if hyper {
            hyper_true += 1;
        }
    };
    for nf in suite::standard_functors() {
        run(&nf.f, &nf.src, &nf.tgt, nf.name);
    }
    for nf in suite::random_inclusions(2026, 200) {
        run(&nf.f, &nf.src, &nf.tgt, "random inclusion");
    }
    assert!(total >= 200);
    assert!(hyper_true > 0 && hyper_true < total, "both verdicts must occur");
    pass(
        5,
        "hyperconnected ⇔ ldf",
        &format!("{total} functors, 100% agreement ({hyper_true} hyperconnected)"),
    );
}

#[test]
fn criterion_06_lift_round_trips() {
    let mut lifts = 0usize;
    for inst in suite::standard_instances() {
        let c2 = gamma(&inst.rc);
        let f2 = TwoFunctor::identity(&c2);
        let (lifted, _) = rescat::fibration::lift_restriction(&c2, &f2, &inst.rc).unwrap();
        assert_eq!(lifted.bar_table(), inst.rc.bar_table(), "Γ-id round trip on {}", inst.name);
        lifts += 1;
    }
    for (name, nf, fac) in factorisations() {
        let c2 = gamma(&fac.e);
        let d2 = gamma(&nf.tgt);
        let f2 = TwoFunctor::new(&c2, &d2, fac.k.clone()).unwrap();
        let (lifted, _) = rescat::fibration::lift_restriction(&c2, &f2, &nf.tgt).unwrap();
        assert_eq!(lifted.bar_table(), fac.e.bar_table(), "Γ(K) lift reproduces E on {name}");
        lifts += 1;
    }
    pass(6, "lift round trips", &format!("{lifts} lifts reproduce bar exactly"));
}

#[test]
fn criterion_07_totality_characterisations() {
    let c = cfg();
    let mut df_checked = 0usize;
    let mut etale_checked = 0usize;
    for inst in suite::standard_instances() {
        let k2 = gamma(&inst.rc);
        for m in inst.rc.base.morphisms() {
            assert_eq!(
                inst.rc.is_total(m),
                is_discrete_fibration_map(&k2, m),
                "Prop 4.3 disagreement in {}",
                inst.name
            );
            df_checked += 1;
        }
        if let Some(js) = &inst.join {
            if inst.rc.base.n_morphisms() <= 40 {
                for m in inst.rc.base.morphisms() {
                    assert_eq!(
                        inst.rc.is_total(m),
                        is_etale_map(js, m, &c),
                        "etale disagreement in {}",
                        inst.name
                    );
                    etale_checked += 1;
                }
            }
        }
    }
    assert!(etale_checked > 0);
    pass(
        7,
        "totality ⇔ fibration ⇔ etale",
        &format!("{df_checked} fibration checks, {etale_checked} etale checks, 100% agreement"),
    );
}

#[test]
fn criterion_08_join_laws() {
    let c = cfg();
    // Full J1-J3 verification on the join-carrying suite instances.
    let mut verified = 0usize;
    for inst in suite::standard_instances() {
        let Some(js) = &inst.join else { continue };
        if inst.rc.base.n_morphisms() > 40 {
            continue;
        }
        let rep = verify_join(js, &c);
        assert!(rep.ok(), "verify_join on {}:\n{rep}", inst.name);
        verified += 1;
    }
    assert!(verified >= 4);

    // J1 ∧ J2 ⇒ J3 across ⩾ 500 randomized join-hosting fragments.
    let bounds = RandomBounds { join_closed: true, max_morphisms: 24, ..Default::default() };
    let mut fragments = 0usize;
    for seed in 0..500u64 {
        let frag = builders::random_fragment(30_000 + seed, &bounds).unwrap();
        let js = JoinStructure::new(frag.rc);
        let rep = verify_join(&js, &c);
        let j12 = !rep.failed("exists") && !rep.failed("J1") && !rep.failed("J2");
        if j12 {
            assert!(!rep.failed("J3"), "J1∧J2 without J3 at seed {seed}");
        }
        fragments += 1;
    }

    // Hyperconnected functors between join hosts: join functor ⇔
    // locally etale, with 100% agreement.
    let mut agreements = 0usize;
    for inst in suite::standard_instances() {
        let Some(js) = &inst.join else { continue };
        if inst.rc.base.n_morphisms() > 40 {
            continue;
        }
        let id = FinFunctor::identity(&inst.rc.base);
        assert!(is_hyperconnected(&id, &inst.rc, &inst.rc).unwrap());
        let jf = is_join_functor(&id, js, js, &c).unwrap();
        let c2 = gamma(&inst.rc);
        let f2 = TwoFunctor::identity(&c2);
        let le = is_locally_etale(&c2, &f2, js, &c).unwrap();
        assert_eq!(jf, le, "join/etale disagreement on identity of {}", inst.name);
        agreements += 1;
    }
    {
        // The fundamental functor of a join host, viewed into its
        // fragment, is hyperconnected and join-preserving.
        let sp = builders::build_set_p(&[1, 2], &c).unwrap();
        let fund = fundamental_functor(&sp.rc).unwrap();
        let js_fragment = JoinStructure::new(fund.stab.rc.clone());
        assert!(verify_join(&js_fragment, &c).ok(), "fragment hosts joins");
        assert!(is_hyperconnected(&fund.functor, &sp.rc, &fund.stab.rc).unwrap());
        let jf = is_join_functor(&fund.functor, &sp.join, &js_fragment, &c).unwrap();
        let c2 = gamma(&sp.rc);
        let d2 = gamma(&fund.stab.rc);
        let f2 = TwoFunctor::new(&c2, &d2, fund.functor.clone()).unwrap();
        let le = is_locally_etale(&c2, &f2, &js_fragment, &c).unwrap();
        assert!(jf && le, "fundamental of a join host preserves joins and is locally etale");
        agreements += 1;
    }
    pass(
        8,
        "join laws",
        &format!("{verified} full J1-J3 suites, {fragments} random fragments, {agreements} join/etale agreements"),
    );
}

#[test]
fn criterion_09_ranges() {
    let c = cfg();
    // derive_range(set_p) equals the image formula morphism by morphism.
    for sizes in [vec![2], vec![1, 2], vec![1, 2, 3]] {
        let sp = builders::build_set_p(&sizes, &c).unwrap();
        match derive_range(&sp.rc).unwrap() {
            DeriveRange::Derived(rs, _) => {
                assert_eq!(rs.hat_table(), sp.range.hat_table(), "image formula, sizes {sizes:?}");
            }
            DeriveRange::NonOpen { .. } => panic!("set_p must carry a range operator"),
        }
    }
    // derive_range(I_n) gives hat(x) = x∘x*.
    for n in 1..=3 {
        let inv = builders::build_inverse_symmetric(n).unwrap();
        match derive_range(&inv.rc).unwrap() {
            DeriveRange::Derived(rs, _) => {
                for x in inv.rc.base.morphisms() {
                    let xs = inv.rc.partial_inverse(x).unwrap();
                    assert_eq!(rs.hat(x), inv.rc.base.comp(x, xs), "hat = x∘x* in I_{n}");
                }
            }
            DeriveRange::NonOpen { .. } => panic!("I_{n} must carry a range operator"),
        }
    }
    // Enumeration on every instance within the bound: at most one
    // operator, and exactly the derived one when derivation succeeds.
    let mut enumerated = 0usize;
    for inst in suite::standard_instances() {
        if inst.rc.base.n_morphisms() > c.range_enum_cap {
            continue;
        }
        let listed = enumerate_range_operators(&inst.rc, &c).unwrap();
        assert!(listed.len() <= 1, "{}", inst.name);
        match derive_range(&inst.rc).unwrap() {
            DeriveRange::Derived(rs, _) => {
                assert_eq!(listed.len(), 1, "{}", inst.name);
                assert_eq!(listed[0].hat_table(), rs.hat_table(), "{}", inst.name);
            }
            DeriveRange::NonOpen { .. } => {
                assert!(listed.is_empty(), "{}", inst.name);
            }
        }
        enumerated += 1;
    }
    assert!(enumerated >= 5);
    pass(9, "ranges", &format!("image formula + x∘x* exact; {enumerated} exhaustive enumerations"));
}

#[test]
fn criterion_10_beck_chevalley() {
    let c = cfg();
    // Range-functor candidates: identity functors on range hosts, the
    // sub-inverse-monoid inclusion, and the image-shrinking embedding.
    let mut candidates: Vec<(String, FinFunctor, rescat::RestrictionCat, rescat::RestrictionCat, RangeStructure, RangeStructure)> =
        Vec::new();
    for inst in suite::standard_instances() {
        let Some(rs) = &inst.range else { continue };
        if inst.rc.base.n_morphisms() > 40 {
            continue;
        }
        candidates.push((
            format!("id({})", inst.name),
            FinFunctor::identity(&inst.rc.base),
            inst.rc.clone(),
            inst.rc.clone(),
            rs.clone(),
            rs.clone(),
        ));
    }
    {
        // Inclusion of the symmetric inverse monoid into set_p on the
        // same carrier, closed under x∘x*.
        let sp = builders::build_set_p(&[2], &c).unwrap();
        let swap = sp.mor_of_graph(ObjId(0), ObjId(0), &vec![Some(1), Some(0)]).unwrap();
        let mut seeds = sp.rc.restriction_idempotents(ObjId(0));
        seeds.push(swap);
        let closed = builders::close_morphism_set(&sp.rc, &[ObjId(0)], &seeds, None);
        let (frag, incl) = builders::reindex_fragment(&sp.rc, &[ObjId(0)], &closed);
        assert_eq!(frag.base.n_morphisms(), 7, "I_2 inside set_p[2]");
        let hat_frag: Vec<MorId> = closed
            .iter()
            .map(|&m| MorId(closed.binary_search(&sp.range.hat(m)).unwrap()))
            .collect();
        let rs_frag = RangeStructure::new(frag.clone(), hat_frag).unwrap();
        assert!(rescat::range::verify_range(&rs_frag).ok());
        candidates.push((
            "I_2 ↪ set_p[2]".into(),
            incl,
            frag,
            sp.rc.clone(),
            rs_frag,
            sp.range.clone(),
        ));
    }
    {
        let (nf, rs_c, rs_d) = suite::chain_into_set_p();
        candidates.push((nf.name.to_string(), nf.f, nf.src, nf.tgt, rs_c, rs_d));
    }
    let mut trues = 0usize;
    let mut falses = 0usize;
    for (name, f, src, tgt, rs_src, rs_tgt) in &candidates {
        let direct = is_range_functor(f, rs_src, rs_tgt).unwrap();
        let via_bc = range_preservation_via_bc(f, src, tgt).unwrap();
        assert_eq!(direct, via_bc, "range/BC disagreement on {name}");
        if direct {
            trues += 1;
        } else {
            falses += 1;
        }
    }
    assert!(trues > 0 && falses > 0, "both verdicts must occur");

    let (pairs, all_ok) = suite::bc_square_composition_sample(40);
    assert!(pairs >= 100, "need ⩾ 100 composable BC pairs, got {pairs}");
    assert!(all_ok, "BC squares must compose horizontally");
    pass(
        10,
        "Beck-Chevalley",
        &format!(
            "{} range candidates 100% agreement ({trues} true, {falses} false); {pairs} composed squares",
            candidates.len()
        ),
    );
}

#[test]
fn criterion_11_open_maps() {
    let catalog = suite::lattice_catalog();
    let mut maps_checked = 0usize;
    for src in &catalog {
        for tgt in &catalog {
            for map in enumerate_stable_maps(src, tgt, false) {
                let g = StableMap::new(src.clone(), tgt.clone(), map).unwrap();
                assert!(
                    suite::adjoint_agrees_with_search(&g),
                    "adjoint formula/search disagreement"
                );
                maps_checked += 1;
            }
        }
    }
    // Downward closure of openness in the Stab^op order.
    let mut closure_pairs = 0usize;
    for l in &catalog {
        if l.size() > 4 {
            continue;
        }
        let maps = enumerate_stable_maps(l, l, false);
        for m1 in &maps {
            let g = StableMap::new(l.clone(), l.clone(), m1.clone()).unwrap();
            if !is_open(&g) {
                continue;
            }
            for m2 in &maps {
                let g2 = StableMap::new(l.clone(), l.clone(), m2.clone()).unwrap();
                let below =
                    l.elements().all(|b| g2.apply(b) == l.meet(g.apply(b), g2.apply(l.top())));
                if below {
                    closure_pairs += 1;
                    assert!(is_open(&g2), "openness must be downward closed");
                }
            }
        }
    }
    pass(
        11,
        "open maps",
        &format!("{maps_checked} stable maps formula = search; {closure_pairs} downward-closure pairs"),
    );
}

#[test]
fn criterion_12_serialization() {
    let c = cfg();
    let mut docs = Vec::new();
    for inst in suite::standard_instances() {
        docs.push(Document::Restriction(inst.rc.clone()));
        if let Some(js) = &inst.join {
            docs.push(Document::Join(js.clone()));
        }
        if let Some(rs) = &inst.range {
            docs.push(Document::Range(rs.clone()));
        }
    }
    for nf in suite::standard_functors() {
        docs.push(Document::Functor(functor_document(&[(nf.name, &nf.f, &nf.src, &nf.tgt)])));
    }
    docs.push(Document::Semilattice(MeetSemilattice::grid_2x3()));
    docs.push(Document::Report(ReportDoc::from_axioms(
        "sample",
        &verify_restriction(&builders::build_set_p(&[1], &c).unwrap().rc),
    )));
    let n = docs.len();
    for doc in docs {
        let text = serialize(&doc);
        let parsed = parse(&text).unwrap();
        assert_eq!(parsed, doc, "value round trip");
        assert_eq!(serialize(&parsed), text, "byte-exact canonical form");
    }
    pass(12, "serialization", &format!("{n} documents round-trip byte-exactly"));
}
