use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use graph_invariants::compare::{compare_bundles, for_each_lattice_iso, invariant_bundle, ktheory_tail_crosscheck};
use graph_invariants::corpus::{corpus_scan, CorpusConfig};
use graph_invariants::diagrams::{cochain_complex_over, ext_groups, k_diagrams, pullback_diagram, IndexPoset};
use graph_invariants::fd::{lift_monoid_hom_fd, verify_ck, FdTarget, UnitaryChoice};
use graph_invariants::io::{
    format_monoid_literal, parse_dims, parse_graph, parse_monoid_literal, parse_usize_list, parse_vertex_set,
};
use graph_invariants::ktheory::k_groups;
use graph_invariants::lattice::{enumerate_lattice, maximal_tails};
use graph_invariants::monoid::{congruence_oracle, equal_in_p, leq_in_p, prec, LeqAnswer, OracleAnswer};
use graph_invariants::report::{
    envelope, ext_json, fd_json, graph_json, k_diagrams_json, kdata_json, lattice_json, render, set_json, tail_json,
    tails_json, verdict_json,
};
use graph_invariants::{Error, Graph, Limits};

#[derive(Parser)]
#[command(name = "ginv", version, about = "Invariants of graph C*-algebras")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MonoidOp {
    Eq,
    Leq,
    Prec,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice of hereditary saturated sets.
    Ideals { file: PathBuf },
    /// K-theory of every ideal, or of the ideal given by `--set`.
    Ktheory {
        file: PathBuf,
        /// Comma-separated vertices of a hereditary saturated set.
        #[arg(long)]
        set: Option<String>,
    },
    /// Compare two elements of the projection monoid, written `v1:2,v3:1`.
    Monoid {
        op: MonoidOp,
        file: PathBuf,
        c1: String,
        c2: String,
    },
    /// Maximal tails with their classification.
    Tails { file: PathBuf },
    /// Ext groups against the K1 diagram of the graph or of a target graph.
    Ext {
        file: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        /// Target lattice index for each lattice index of FILE, comma-separated.
        #[arg(long, requires = "target")]
        psi: Option<String>,
        /// Compute over join-irreducible ideals.
        #[arg(long)]
        irreducible: bool,
    },
    /// Compare the invariants of two graphs.
    Compare { file1: PathBuf, file2: PathBuf },
    /// Build a correspondence into a finite-dimensional algebra.
    Fd {
        file: PathBuf,
        /// Block sizes of the target, comma-separated.
        #[arg(long)]
        blocks: String,
        /// Ranks per vertex, `v:2/1,w:4/2`, one rank per block.
        #[arg(long)]
        dims: String,
        /// Draw Haar-random unitaries from this seed instead of identities.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Scan seeded random graphs and bucket them by invariant digest.
    Corpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        max_vertices: usize,
        #[arg(long)]
        max_edges: usize,
        /// Run a full comparison on every flagged pair.
        #[arg(long)]
        compare: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TooLarge { .. } | Error::CapExceeded { .. } | Error::CycleOverflow(_) => 2,
        Error::Internal(_) | Error::InconsistentClassifiers { .. } => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<(Vec<u8>, Graph), Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
        line: 0,
        msg: format!("{}: not UTF-8", path.display()),
    })?;
    let g = parse_graph(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })?;
    Ok((bytes, g))
}

fn sections(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn run(cli: Cli) -> Result<Value, Error> {
    let limits = Limits::from_env();
    match cli.command {
        Command::Ideals { file } => {
            let (bytes, g) = read(&file)?;
            let l = enumerate_lattice(&g, &limits)?;
            let s = sections(vec![("graph", graph_json(&g)), ("lattice", lattice_json(&g, &l))]);
            Ok(envelope("ideals", &[&bytes], s))
        }
        Command::Ktheory { file, set } => {
            let (bytes, g) = read(&file)?;
            let kdata = match set {
                Some(s) => kdata_json(&g, &k_groups(&g, parse_vertex_set(&g, &s)?)?),
                None => {
                    let l = enumerate_lattice(&g, &limits)?;
                    let kd = k_diagrams(&g, &l)?;
                    json!({
                        "nodes": kd.data.iter().map(|d| kdata_json(&g, d)).collect::<Vec<_>>(),
                        "diagrams": k_diagrams_json(&g, &kd),
                    })
                }
            };
            Ok(envelope(
                "ktheory",
                &[&bytes],
                sections(vec![("graph", graph_json(&g)), ("kdata", kdata)]),
            ))
        }
        Command::Monoid { op, file, c1, c2 } => {
            let (bytes, g) = read(&file)?;
            let a = parse_monoid_literal(&g, &c1)?;
            let b = parse_monoid_literal(&g, &c2)?;
            let mut out = json!({
                "c1": format_monoid_literal(&g, &a),
                "c2": format_monoid_literal(&g, &b),
            });
            match op {
                MonoidOp::Eq => {
                    let eq = equal_in_p(&g, &a, &b);
                    out["relation"] = json!("eq");
                    out["answer"] = json!(if eq { "equal" } else { "not_equal" });
                    out["oracle"] = match congruence_oracle(&g, &a, &b, usize::MAX, limits.bfs_states) {
                        OracleAnswer::Equal(k) => json!({"result": "equal", "chain_length": k.to_string()}),
                        OracleAnswer::Distinct => json!({"result": "distinct"}),
                        OracleAnswer::Inconclusive => json!({"result": "inconclusive"}),
                    };
                }
                MonoidOp::Leq => {
                    out["relation"] = json!("leq");
                    match leq_in_p(&g, &a, &b, &limits) {
                        LeqAnswer::Yes(c) => {
                            out["answer"] = json!("yes");
                            out["complement"] = json!(format_monoid_literal(&g, &c));
                        }
                        LeqAnswer::No => out["answer"] = json!("no"),
                        LeqAnswer::Unknown(n) => {
                            out["answer"] = json!("unknown");
                            out["searched"] = json!(n.to_string());
                        }
                    }
                }
                MonoidOp::Prec => {
                    out["relation"] = json!("prec");
                    out["answer"] = json!(if prec(&g, &a, &b) { "yes" } else { "no" });
                }
            }
            Ok(envelope(
                "monoid",
                &[&bytes],
                sections(vec![("graph", graph_json(&g)), ("monoid", out)]),
            ))
        }
        Command::Tails { file } => {
            let (bytes, g) = read(&file)?;
            let l = enumerate_lattice(&g, &limits)?;
            let mut tails = Vec::new();
            for t in maximal_tails(&g, &l)? {
                let check = ktheory_tail_crosscheck(&g, &t)?;
                tails.push(tail_json(&g, &t, Some(&check)));
            }
            let tails = Value::Array(tails);
            Ok(envelope(
                "tails",
                &[&bytes],
                sections(vec![("graph", graph_json(&g)), ("tails", tails)]),
            ))
        }
        Command::Ext {
            file,
            target,
            psi,
            irreducible,
        } => {
            let (bytes, g) = read(&file)?;
            let l = enumerate_lattice(&g, &limits)?;
            let poset = if irreducible {
                IndexPoset::Irreducible
            } else {
                IndexPoset::Ideals
            };
            let mut inputs = vec![bytes];
            let (y, psi_json) = match target {
                None => (k_diagrams(&g, &l)?.k1, Value::Null),
                Some(t) => {
                    let (b2, g2) = read(&t)?;
                    inputs.push(b2);
                    let l2 = enumerate_lattice(&g2, &limits)?;
                    let k2 = k_diagrams(&g2, &l2)?;
                    let map = match psi {
                        Some(s) => parse_usize_list(&s)?,
                        None => {
                            let mut first = None;
                            for_each_lattice_iso(&l, &l2, &mut |p| {
                                first = Some(p.to_vec());
                                false
                            });
                            first.ok_or_else(|| Error::Parse {
                                line: 0,
                                msg: "lattices are not isomorphic; pass --psi".into(),
                            })?
                        }
                    };
                    let y = pullback_diagram(l.elements(), &map, &k2.k1)?;
                    let pj = Value::Array(
                        map.iter()
                            .enumerate()
                            .map(|(i, &j)| json!([set_json(&g, l.element(i)), set_json(&g2, l2.element(j))]))
                            .collect(),
                    );
                    (y, pj)
                }
            };
            let cc = cochain_complex_over(&g, &l, &y, poset)?;
            let ext = ext_groups(&cc);
            let mut e = ext_json(&ext);
            e["poset"] = json!(if irreducible { "join_irreducible" } else { "ideals" });
            e["psi"] = psi_json;
            let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
            Ok(envelope(
                "ext",
                &refs,
                sections(vec![("graph", graph_json(&g)), ("ext", e)]),
            ))
        }
        Command::Compare { file1, file2 } => {
            let (b1, g1) = read(&file1)?;
            let (b2, g2) = read(&file2)?;
            let x = invariant_bundle(&g1, &limits)?;
            let y = invariant_bundle(&g2, &limits)?;
            let v = compare_bundles(&x, &y, &limits, None)?;
            let s = sections(vec![
                ("graph", json!([graph_json(&g1), graph_json(&g2)])),
                (
                    "lattice",
                    json!([lattice_json(&g1, &x.lattice), lattice_json(&g2, &y.lattice)]),
                ),
                ("kdata", json!([k_diagrams_json(&g1, &x.k), k_diagrams_json(&g2, &y.k)])),
                ("tails", json!([tails_json(&x), tails_json(&y)])),
                ("ext", json!([ext_json(&x.ext_self), ext_json(&y.ext_self)])),
                ("verdict", verdict_json(&x, &y, &v)),
            ]);
            Ok(envelope("compare", &[&b1, &b2], s))
        }
        Command::Fd {
            file,
            blocks,
            dims,
            seed,
        } => {
            let (bytes, g) = read(&file)?;
            let target = FdTarget::new(parse_usize_list(&blocks)?)?;
            let dims = parse_dims(&g, target.len(), &dims)?;
            let choice = seed.map_or(UnitaryChoice::Identity, UnitaryChoice::Haar);
            let f = lift_monoid_hom_fd(&g, &target, dims, choice)?;
            let ck = verify_ck(&f, &g);
            Ok(envelope(
                "fd",
                &[&bytes],
                sections(vec![("graph", graph_json(&g)), ("fd", fd_json(&g, &f, &ck))]),
            ))
        }
        Command::Corpus {
            seed,
            count,
            max_vertices,
            max_edges,
            compare,
        } => {
            let cfg = CorpusConfig {
                seed,
                count,
                max_vertices,
                max_edges,
                compare_pairs: compare,
            };
            let r = corpus_scan(&cfg, &limits)?;
            let Value::Object(m) = r.to_json(&cfg) else {
                unreachable!("corpus reports are objects")
            };
            Ok(envelope("corpus", &[], m))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(v) => {
            print!("{}", render(&v));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
