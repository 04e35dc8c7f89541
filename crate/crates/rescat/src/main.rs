//! Thin command-line front end. Every verdict is computed by the
//! library; this file only parses arguments, reads/writes documents,
//! and prints reports.
//!
//! Exit codes: 0 = all checks pass, 1 = a check reported a
//! counterexample (or a verdict is false), 2 = usage or structural
//! error.

use clap::{Parser, Subcommand};
use rescat::cat::{FinFunctor, MorId};
use rescat::doc::{
    functor_document, parse, serialize, Document, FunctorDoc, PoolEntry, ReportDoc,
};
use rescat::fibration::{LocallyPosetal2Cat, TwoFunctor};
use rescat::fundamental::{
    diagonal_filler, factorize, fundamental_functor, hyperconnected_failure, localic_failure,
    FunctorSquare, LocalicFailure,
};
use rescat::join::verify_join;
use rescat::range::{derive_range, verify_range, DeriveRange};
use rescat::report::AxiomReport;
use rescat::restriction::{verify_restriction, RestrictionCat};
use rescat::semilattice::{beck_chevalley, is_open, MeetSemilattice, StabSquare};
use rescat::{builders, suite, CheckConfig, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rescat", about = "Finite restriction categories: build, check, transform")]
struct Cli {
    /// Emit machine-readable JSON reports instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a standard instance and write its document.
    Build {
        /// set_p | inverse_symmetric | par | stab_op | jstab_op | trivial | random
        variant: String,
        /// Variant parameters: sizes for set_p/par/trivial, n for
        /// inverse_symmetric, lattice specs (chain:N, powerset:N,
        /// diamond, pentagon, grid2x3) for stab_op/jstab_op.
        params: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
        /// Seed for the random variant.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Close the random fragment under joins too.
        #[arg(long)]
        join_closed: bool,
    },
    /// Verify axioms of a document: restriction (R1-R4), join (J1-J3),
    /// or range (RR1-RR4).
    Check {
        /// restriction | join | range
        what: String,
        file: PathBuf,
    },
    /// Compute the fundamental functor of a restriction document.
    Fundamental {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Factor a functor document as localic ∘ hyperconnected; writes
    /// h.doc, e.doc, k.doc into the output directory.
    Factorize {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Is the functor hyperconnected?
    Hyperconnected { file: PathBuf },
    /// Is the functor localic?
    Localic { file: PathBuf },
    /// Solve the lifting problem of a square document (functors named
    /// top, left, bottom, right) for localic left / hyperconnected
    /// right legs.
    Filler {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift restriction structure along a local discrete fibration: the
    /// functor's source must be a category document with an explicit
    /// hom order, its target a restriction document.
    Lift {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Derive the range operator from the fundamental functor.
    DeriveRange {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the Beck-Chevalley condition of a stable-map square
    /// document (maps named h, f, g, k).
    BeckChevalley { file: PathBuf },
    /// Run the full property suite.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        cases: usize,
    },
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (e.g. `rescat ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Precondition(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn read_doc(path: &Path) -> rescat::Result<Document> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

fn write_doc(path: &Path, doc: &Document) -> rescat::Result<()> {
    std::fs::write(path, serialize(doc))?;
    Ok(())
}

fn emit_report(json: bool, rd: &ReportDoc) {
    if json {
        let failures: Vec<serde_json::Value> = rd
            .failures
            .iter()
            .map(|f| {
                serde_json::json!({
                    "law": f.law,
                    "witness": f.witness,
                    "note": f.note,
                })
            })
            .collect();
        let v = serde_json::json!({
            "subject": rd.subject,
            "ok": rd.ok,
            "failures": failures,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{}: {}", rd.subject, if rd.ok { "ok" } else { "FAIL" });
        for f in &rd.failures {
            println!("  {}  witness {:?}  {}", f.law, f.witness, f.note);
        }
    }
}

fn verdict(json: bool, subject: &str, rep: &AxiomReport) -> ExitCode {
    let rd = ReportDoc::from_axioms(subject, rep);
    emit_report(json, &rd);
    if rd.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Checks that the host category and bar are sound before any deeper
/// verdict; malformed input is a structural error (exit 2).
fn require_valid_host(rc: &RestrictionCat) -> rescat::Result<()> {
    let rep = rescat::cat::validate_category(&rc.base);
    if !rep.ok() {
        return Err(Error::Structural(format!("host category invalid:\n{rep}")));
    }
    Ok(())
}

fn parse_lattice_spec(spec: &str) -> rescat::Result<MeetSemilattice> {
    let bad = || Error::Structural(format!("unknown lattice spec `{spec}`"));
    if let Some(n) = spec.strip_prefix("chain:") {
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 || n > 6 {
            return Err(Error::Bounds("chain length must be 1..=6".into()));
        }
        return Ok(MeetSemilattice::chain(n));
    }
    if let Some(n) = spec.strip_prefix("powerset:") {
        let n: usize = n.parse().map_err(|_| bad())?;
        if n > 2 {
            return Err(Error::Bounds("powerset exponent must be ⩽ 2 (⩽ 6 elements)".into()));
        }
        return Ok(MeetSemilattice::powerset(n));
    }
    match spec {
        "diamond" => Ok(MeetSemilattice::diamond_m3()),
        "pentagon" => Ok(MeetSemilattice::pentagon_n5()),
        "grid2x3" => Ok(MeetSemilattice::grid_2x3()),
        _ => Err(bad()),
    }
}

fn parse_sizes(params: &[String]) -> rescat::Result<Vec<usize>> {
    params
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::Structural(format!("size parameter `{p}` is not a number")))
        })
        .collect()
}

/// A functor document's item together with its restriction hosts.
fn functor_with_hosts(
    fd: &FunctorDoc,
    idx: usize,
) -> rescat::Result<(FinFunctor, RestrictionCat, RestrictionCat)> {
    let f = fd.functor(idx)?;
    let nf = &fd.functors[idx];
    let src = fd.pool[nf.source].restriction()?.clone();
    let tgt = fd.pool[nf.target].restriction()?.clone();
    Ok((f, src, tgt))
}

fn named_or_first(fd: &FunctorDoc, name: &str) -> rescat::Result<usize> {
    if let Some(i) = fd.by_name(name) {
        return Ok(i);
    }
    if fd.functors.len() == 1 {
        return Ok(0);
    }
    Err(Error::Structural(format!("document has no functor named `{name}`")))
}

fn run(cli: &Cli) -> rescat::Result<ExitCode> {
    let cfg = CheckConfig::from_env();
    match &cli.cmd {
        Cmd::Build { variant, params, output, seed, join_closed } => {
            let doc = match variant.as_str() {
                "set_p" => {
                    let sp = builders::build_set_p(&parse_sizes(params)?, &cfg)?;
                    Document::Range(sp.range)
                }
                "inverse_symmetric" => {
                    let sizes = parse_sizes(params)?;
                    if sizes.len() != 1 {
                        return Err(Error::Structural(
                            "inverse_symmetric takes exactly one degree".into(),
                        ));
                    }
                    Document::Range(builders::build_inverse_symmetric(sizes[0])?.range)
                }
                "par" => {
                    let d = builders::finset_category(&parse_sizes(params)?);
                    let monos: Vec<MorId> =
                        d.morphisms().filter(|&m| rescat::cat::is_mono(&d, m)).collect();
                    Document::Restriction(builders::build_par(&d, &monos)?.rc)
                }
                "stab_op" => {
                    let lats: Vec<MeetSemilattice> =
                        params.iter().map(|p| parse_lattice_spec(p)).collect::<rescat::Result<_>>()?;
                    Document::Restriction(builders::build_stab_op(&lats)?.rc)
                }
                "jstab_op" => {
                    let lats: Vec<MeetSemilattice> =
                        params.iter().map(|p| parse_lattice_spec(p)).collect::<rescat::Result<_>>()?;
                    let (_, js) = builders::build_jstab_op(&lats)?;
                    Document::Join(js)
                }
                "trivial" => {
                    let base = builders::finset_category(&parse_sizes(params)?);
                    Document::Restriction(builders::build_trivial(&base)?)
                }
                "random" => {
                    let bounds = builders::RandomBounds {
                        join_closed: *join_closed,
                        ..Default::default()
                    };
                    Document::Restriction(builders::random_restriction_category(*seed, &bounds)?)
                }
                other => {
                    return Err(Error::Structural(format!("unknown build variant `{other}`")))
                }
            };
            write_doc(output, &doc)?;
            println!("wrote {} document to {}", doc.kind(), output.display());
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Check { what, file } => {
            let doc = read_doc(file)?;
            match what.as_str() {
                "restriction" => {
                    let rc = doc.as_restriction()?;
                    let base_rep = rescat::cat::validate_category(&rc.base);
                    if !base_rep.ok() {
                        let rd = ReportDoc::from_validation("check restriction", &base_rep);
                        emit_report(cli.json, &rd);
                        return Ok(ExitCode::from(if base_rep.has_structural() { 2 } else { 1 }));
                    }
                    Ok(verdict(cli.json, "check restriction", &verify_restriction(rc)))
                }
                "join" => {
                    let js = doc.as_join()?;
                    require_valid_host(&js.host)?;
                    let host = verify_restriction(&js.host);
                    if !host.ok() {
                        return Ok(verdict(cli.json, "check join (host)", &host));
                    }
                    Ok(verdict(cli.json, "check join", &verify_join(&js, &cfg)))
                }
                "range" => {
                    let rs = doc.as_range()?;
                    require_valid_host(&rs.host)?;
                    let host = verify_restriction(&rs.host);
                    if !host.ok() {
                        return Ok(verdict(cli.json, "check range (host)", &host));
                    }
                    Ok(verdict(cli.json, "check range", &verify_range(rs)))
                }
                other => Err(Error::Structural(format!("unknown check `{other}`"))),
            }
        }

        Cmd::Fundamental { file, output } => {
            let doc = read_doc(file)?;
            let rc = doc.as_restriction()?;
            require_valid_host(rc)?;
            let axioms = verify_restriction(rc);
            if !axioms.ok() {
                return Err(Error::Precondition(format!(
                    "input is not a restriction category:\n{axioms}"
                )));
            }
            let fund = fundamental_functor(rc)?;
            let fd = functor_document(&[("fundamental", &fund.functor, rc, &fund.stab.rc)]);
            write_doc(output, &Document::Functor(fd))?;
            for a in rc.base.objects() {
                println!(
                    "𝒪({}) has {} elements",
                    rc.base.obj_label(a),
                    fund.lattice_of(a).size()
                );
            }
            println!("wrote fundamental functor to {}", output.display());
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Factorize { file, output } => {
            let doc = read_doc(file)?;
            let Document::Functor(fd) = &doc else {
                return Err(Error::Structural("factorize expects a functor document".into()));
            };
            let idx = named_or_first(fd, "F")?;
            let (f, src, tgt) = functor_with_hosts(fd, idx)?;
            let fac = factorize(&f, &src, &tgt, &cfg)?;
            std::fs::create_dir_all(output)?;
            write_doc(
                &output.join("h.doc"),
                &Document::Functor(functor_document(&[("H", &fac.h, &src, &fac.e)])),
            )?;
            write_doc(&output.join("e.doc"), &Document::Restriction(fac.e.clone()))?;
            write_doc(
                &output.join("k.doc"),
                &Document::Functor(functor_document(&[("K", &fac.k, &fac.e, &tgt)])),
            )?;
            println!("H localic, K hyperconnected, K∘H = F");
            println!("wrote h.doc, e.doc, k.doc to {}", output.display());
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Hyperconnected { file } => {
            let doc = read_doc(file)?;
            let Document::Functor(fd) = &doc else {
                return Err(Error::Structural("expected a functor document".into()));
            };
            let (f, src, tgt) = functor_with_hosts(fd, named_or_first(fd, "F")?)?;
            match hyperconnected_failure(&f, &src, &tgt)? {
                None => {
                    println!("hyperconnected: true");
                    Ok(ExitCode::SUCCESS)
                }
                Some(a) => {
                    println!(
                        "hyperconnected: false  witness object {} (𝒪 not bijective)",
                        src.base.obj_label(a)
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }

        Cmd::Localic { file } => {
            let doc = read_doc(file)?;
            let Document::Functor(fd) = &doc else {
                return Err(Error::Structural("expected a functor document".into()));
            };
            let (f, src, tgt) = functor_with_hosts(fd, named_or_first(fd, "F")?)?;
            match localic_failure(&f, &src, &tgt)? {
                None => {
                    println!("localic: true");
                    Ok(ExitCode::SUCCESS)
                }
                Some(why) => {
                    let msg = match why {
                        LocalicFailure::NotBijectiveOnObjects => {
                            "not bijective on objects".to_string()
                        }
                        LocalicFailure::EmptyFiber(g) => {
                            format!("empty fiber over {}", tgt.base.mor_label(g))
                        }
                        LocalicFailure::UndirectedFiber(g, f1, f2) => format!(
                            "fiber over {} has no lower bound for ({}, {})",
                            tgt.base.mor_label(g),
                            src.base.mor_label(f1),
                            src.base.mor_label(f2)
                        ),
                    };
                    println!("localic: false  {msg}");
                    Ok(ExitCode::from(1))
                }
            }
        }

        Cmd::Filler { file, output } => {
            let doc = read_doc(file)?;
            let Document::Functor(fd) = &doc else {
                return Err(Error::Structural("filler expects a functor document".into()));
            };
            let (top, c, e) = functor_with_hosts(fd, named_or_first(fd, "top")?)?;
            let (left, _, d) = functor_with_hosts(fd, named_or_first(fd, "left")?)?;
            let (bottom, _, fcat) = functor_with_hosts(fd, named_or_first(fd, "bottom")?)?;
            let (right, _, _) = functor_with_hosts(fd, named_or_first(fd, "right")?)?;
            let sq = FunctorSquare {
                c,
                d: d.clone(),
                e: e.clone(),
                f: fcat,
                top,
                left,
                bottom,
                right,
            };
            let filler = diagonal_filler(&sq, &cfg)?;
            println!(
                "filler J found{}",
                match filler.uniqueness {
                    Some(_) => ", unique by exhaustive search",
                    None => " (uniqueness search skipped: above cap)",
                }
            );
            if let Some(path) = output {
                write_doc(
                    path,
                    &Document::Functor(functor_document(&[("J", &filler.j, &d, &e)])),
                )?;
                println!("wrote J to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Lift { file, output } => {
            let doc = read_doc(file)?;
            let Document::Functor(fd) = &doc else {
                return Err(Error::Structural("lift expects a functor document".into()));
            };
            let idx = named_or_first(fd, "F")?;
            let f = fd.functor(idx)?;
            let nf = &fd.functors[idx];
            let PoolEntry::Category(src_cd) = &fd.pool[nf.source] else {
                return Err(Error::Structural(
                    "lift source must be a category document with an explicit order".into(),
                ));
            };
            let d_rc = fd.pool[nf.target].restriction()?.clone();
            let pairs: Vec<(MorId, MorId)> =
                src_cd.order.iter().map(|&(a, b)| (MorId(a), MorId(b))).collect();
            let c2 = LocallyPosetal2Cat::new(src_cd.cat.clone(), &pairs)?;
            let d2 = rescat::fibration::gamma(&d_rc);
            let f2 = TwoFunctor::new(&c2, &d2, f).map_err(|e| match e {
                Error::Precondition(m) => Error::Precondition(format!("not a 2-functor: {m}")),
                other => other,
            })?;
            let (lifted, _) = rescat::fibration::lift_restriction(&c2, &f2, &d_rc)?;
            println!("lifted restriction structure:");
            for m in lifted.base.morphisms() {
                println!(
                    "  bar({}) = {}",
                    lifted.base.mor_label(m),
                    lifted.base.mor_label(lifted.bar(m))
                );
            }
            if let Some(path) = output {
                write_doc(path, &Document::Restriction(lifted))?;
                println!("wrote lifted structure to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::DeriveRange { file, output } => {
            let doc = read_doc(file)?;
            let rc = doc.as_restriction()?;
            require_valid_host(rc)?;
            let axioms = verify_restriction(rc);
            if !axioms.ok() {
                return Err(Error::Precondition(format!(
                    "input is not a restriction category:\n{axioms}"
                )));
            }
            match derive_range(rc)? {
                DeriveRange::Derived(rs, _) => {
                    println!("range operator derived: f̂ = f_!(overline(f))");
                    for m in rc.base.morphisms() {
                        println!(
                            "  hat({}) = {}",
                            rc.base.mor_label(m),
                            rc.base.mor_label(rs.hat(m))
                        );
                    }
                    if let Some(path) = output {
                        write_doc(path, &Document::Range(rs))?;
                        println!("wrote range document to {}", path.display());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                DeriveRange::NonOpen { witness } => {
                    println!(
                        "no range operator: {}* is not open",
                        rc.base.mor_label(witness)
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }

        Cmd::BeckChevalley { file } => {
            let doc = read_doc(file)?;
            let Document::StableMap(sd) = &doc else {
                return Err(Error::Structural(
                    "beck-chevalley expects a stable_map document with maps h, f, g, k".into(),
                ));
            };
            let get = |name: &str| -> rescat::Result<_> {
                sd.by_name(name)
                    .ok_or_else(|| Error::Structural(format!("missing stable map `{name}`")))
                    .and_then(|i| sd.stable_map(i))
            };
            let (h, f, g, k) = (get("h")?, get("f")?, get("g")?, get("k")?);
            let sq = StabSquare::new(h, f, g, k)?;
            if beck_chevalley(&sq)? {
                println!("beck-chevalley: true");
                Ok(ExitCode::SUCCESS)
            } else {
                let why = if !sq.f.preserves_top() || !sq.g.preserves_top() {
                    "a vertical leg is not total"
                } else if !is_open(&sq.h) || !is_open(&sq.k) {
                    "a horizontal leg is not open"
                } else {
                    "the mate square does not commute"
                };
                println!("beck-chevalley: false  ({why})");
                Ok(ExitCode::from(1))
            }
        }

        Cmd::Selftest { seed, cases } => {
            let rep = suite::run_selftest(*seed, *cases, &cfg)?;
            if cli.json {
                let checks: Vec<serde_json::Value> = rep
                    .checks
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "name": c.name,
                            "pass": c.pass,
                            "detail": c.detail,
                        })
                    })
                    .collect();
                let v = serde_json::json!({ "ok": rep.ok(), "checks": checks });
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                print!("{rep}");
            }
            Ok(if rep.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
