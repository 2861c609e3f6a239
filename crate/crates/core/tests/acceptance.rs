//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graph_invariants::compare::{
    compare_verdict, find_diagram_isos, find_lattice_isos, invariant_bundle, ktheory_tail_crosscheck, tau_matching,
    Conclusion,
};
use graph_invariants::corpus::{corpus_graph, corpus_scan, CorpusConfig};
use graph_invariants::diagrams::{
    cochain_complex, ext_groups, is_natural, k_diagrams, represents_zero_ext2, DiagramMorphism,
};
use graph_invariants::fd::{lift_monoid_hom_fd, verify_ck, FdTarget, UnitaryChoice};
use graph_invariants::group::{FgGroup, GroupHom, GroupType};
use graph_invariants::ktheory::k_groups;
use graph_invariants::lattice::{enumerate_lattice, join_irreducibles, maximal_tails, TailKind};
use graph_invariants::monoid::{congruence_oracle, equal_in_p, MonoidElement, OracleAnswer};
use graph_invariants::report::render;
use graph_invariants::{Error, Graph, Limits};

const CK_TOLERANCE: f64 = 1e-12;
const SUITE_SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = budget.is_none_or(|b| took <= b);
    let pass = out.pass && in_time;
    let budget_text = budget.map_or(String::new(), |b| format!(" budget {:.1}s", b.as_secs_f64()));
    println!(
        "{} criterion {id:>2} {name}: {} [{:.3}s{budget_text}]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64()
    );
    pass
}

fn suite(stream_seed: u64, count: usize, max_vertices: usize, max_edges: usize) -> Vec<Graph> {
    (0..count)
        .map(|i| corpus_graph(stream_seed, i, max_vertices, max_edges))
        .collect()
}

fn remark() -> Graph {
    Graph::from_edges(
        &["1", "2", "3"],
        &[("a", "1", "1"), ("b", "2", "2"), ("c", "1", "3"), ("d", "2", "3")],
    )
    .unwrap()
}

fn loops(n: usize) -> Graph {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let edges: Vec<(&str, &str, &str)> = names.iter().map(|e| (e.as_str(), "v", "v")).collect();
    Graph::from_edges(&["v"], &edges).unwrap()
}

fn criterion_1() -> Outcome {
    let g = remark();
    let l = enumerate_lattice(&g, &Limits::default()).unwrap();
    let names: Vec<Vec<String>> = l.elements().iter().map(|&h| g.names(h)).collect();
    let expected: Vec<Vec<String>> = vec![
        vec![],
        vec!["1".into()],
        vec!["2".into()],
        vec!["1".into(), "2".into(), "3".into()],
    ];
    let ji: Vec<Vec<String>> = join_irreducibles(&l)
        .into_iter()
        .map(|i| g.names(l.element(i)))
        .collect();
    let top = l.principal(g.vertex_index("3").unwrap()) == l.top();
    let pass = names == expected && ji == vec![vec!["1".to_string()], vec!["2".to_string()]] && top;
    Outcome {
        pass,
        detail: format!("elements {names:?}, join-irreducibles {ji:?}, <3> = top: {top}"),
    }
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=9usize {
        let g = loops(n);
        let kd = k_groups(&g, g.all_vertices()).unwrap();
        let k0 = kd.k0.group_type();
        let expected = GroupType {
            free_rank: 0,
            torsion: if n == 2 { vec![] } else { vec![BigInt::from(n - 1)] },
        };
        if k0 != expected || !kd.k1.group_type().is_trivial() {
            bad.push(format!("n={n}: K0={k0}, K1={}", kd.k1.group_type()));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "K0 = Z/(n-1), K1 = 0 for n = 2..9".into()
        } else {
            bad.join("; ")
        },
    }
}

fn criterion_3(graphs: &[Graph]) -> Outcome {
    let limits = Limits::default();
    let mut nodes = 0usize;
    let mut failures = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let l = enumerate_lattice(g, &limits).unwrap();
        for &w in l.elements() {
            nodes += 1;
            let kd = k_groups(g, w).unwrap();
            let pi_zero = kd.matrix.columns().iter().all(|c| kd.k0.is_zero(c));
            let kappa = GroupHom::new(
                FgGroup::free(kd.k1_rank()),
                FgGroup::free(kd.regs.len()),
                kd.k1_basis.clone(),
            );
            let kappa_injective = kappa.is_injective();
            let composite_zero = kd
                .k1_basis
                .columns()
                .iter()
                .all(|c| kd.matrix.mul_vec(c).iter().all(Zero::is_zero));
            // 0 → K1 → Z[W_reg] → Z[W] → K0 → 0
            let ranks = kd.k1_rank() + kd.verts.len() == kd.regs.len() + kd.k0.free_rank();
            if !(pi_zero && kappa_injective && composite_zero && ranks) {
                failures.push(format!("graph {gi} W={:?}", g.names(w)));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} graphs, {nodes} lattice elements, {} failures {:?}",
            graphs.len(),
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

/// A random walk of relation moves `δ_v ↔ Σ_{e ∈ E^v} δ_{s(e)}` from `c`.
fn rewrite(g: &Graph, c: &MonoidElement, steps: usize, rng: &mut ChaCha8Rng) -> MonoidElement {
    let mut c = c.clone();
    for _ in 0..steps {
        let regs: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.is_regular(v)).collect();
        if regs.is_empty() {
            break;
        }
        let v = regs[rng.random_range(0..regs.len())];
        let srcs: Vec<usize> = g.incoming(v).iter().map(|&e| g.src(e)).collect();
        if rng.random_bool(0.5) {
            if c.coeffs[v] > 0 {
                c.coeffs[v] -= 1;
                for &s in &srcs {
                    c.coeffs[s] += 1;
                }
            }
        } else {
            let mut need = vec![0u64; g.vertex_count()];
            for &s in &srcs {
                need[s] += 1;
            }
            if (0..g.vertex_count()).all(|u| c.coeffs[u] >= need[u]) {
                for (x, n) in c.coeffs.iter_mut().zip(&need) {
                    *x -= n;
                }
                c.coeffs[v] += 1;
            }
        }
    }
    c
}

fn criterion_4(graphs: &[Graph]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 4);
    let (mut conclusive, mut total, mut equal_cases) = (0usize, 0usize, 0usize);
    let mut disagreements = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let n = g.vertex_count();
        for k in 0..6 {
            let c1 = MonoidElement {
                coeffs: (0..n).map(|_| rng.random_range(0..=3)).collect(),
            };
            let c2 = if k % 2 == 0 {
                let steps = rng.random_range(1..=6);
                let mut c2 = rewrite(g, &c1, steps, &mut rng);
                if c2.coeffs.iter().any(|&x| x > 3) {
                    c2 = c1.clone();
                }
                c2
            } else {
                MonoidElement {
                    coeffs: (0..n).map(|_| rng.random_range(0..=3)).collect(),
                }
            };
            total += 1;
            let eq = equal_in_p(g, &c1, &c2);
            let oracle = congruence_oracle(g, &c1, &c2, usize::MAX, 20_000);
            let agrees = match oracle {
                OracleAnswer::Equal(_) => {
                    conclusive += 1;
                    equal_cases += 1;
                    eq
                }
                OracleAnswer::Distinct => {
                    conclusive += 1;
                    !eq
                }
                OracleAnswer::Inconclusive => true,
            };
            if !agrees {
                disagreements.push(format!("graph {gi}: {:?} vs {:?}", c1.coeffs, c2.coeffs));
            }
        }
    }
    Outcome {
        pass: disagreements.is_empty() && conclusive > 0,
        detail: format!(
            "{conclusive}/{total} conclusive ({equal_cases} equal), {} disagreements {:?}",
            disagreements.len(),
            disagreements.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_5(graphs: &[Graph]) -> Outcome {
    let limits = Limits::default();
    let (mut tails, mut inconsistent) = (0usize, Vec::new());
    let (mut af_literal, mut circle_literal) = (0usize, 0usize);
    let mut kinds = [0usize; 3];
    for (gi, g) in graphs.iter().enumerate() {
        let l = enumerate_lattice(g, &limits).unwrap();
        for t in maximal_tails(g, &l).unwrap() {
            tails += 1;
            kinds[t.kind as usize] += 1;
            match ktheory_tail_crosscheck(g, &t) {
                Ok(c) => {
                    let inj_surj = c.i0_injective && c.i1_surjective;
                    if inj_surj != (t.kind == TailKind::Af) {
                        af_literal += 1;
                    }
                    let z = GroupType {
                        free_rank: 1,
                        torsion: vec![],
                    };
                    if t.kind == TailKind::Circle && !(c.ker_i0.is_trivial() && c.coker_i1 == z) {
                        circle_literal += 1;
                    }
                }
                Err(e @ Error::InconsistentClassifiers { .. }) => inconsistent.push(format!("graph {gi}: {e}")),
                Err(e) => inconsistent.push(format!("graph {gi}: unexpected {e}")),
            }
        }
    }
    Outcome {
        pass: inconsistent.is_empty(),
        detail: format!(
            "{tails} tails (AF {}, PI {}, circle {}), {} inconsistent {:?}; informational: {af_literal} tails deviate from \
             'AF iff i0 inj and i1 surj', {circle_literal} circle tails deviate from 'ker i0 = 0, coker i1 = Z'",
            kinds[0],
            kinds[1],
            kinds[2],
            inconsistent.len(),
            inconsistent.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

/// A random acyclic multigraph: every edge runs from a lower to a higher
/// vertex index.
fn random_dag(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> Graph {
    let n = rng.random_range(2..=max_vertices);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let m = rng.random_range(0..=max_edges);
    let edges: Vec<(String, String, String)> = (0..m)
        .map(|k| {
            let a = rng.random_range(0..n - 1);
            let b = rng.random_range(a + 1..n);
            (format!("e{k}"), names[a].clone(), names[b].clone())
        })
        .collect();
    let vs: Vec<&str> = names.iter().map(String::as_str).collect();
    let es: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(e, s, r)| (e.as_str(), s.as_str(), r.as_str()))
        .collect();
    Graph::from_edges(&vs, &es).unwrap()
}

fn criterion_6(graphs: &[Graph]) -> Outcome {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 6);
    let dags: Vec<Graph> = (0..100).map(|_| random_dag(&mut rng, 8, 12)).collect();
    let (mut complexes, mut acyclic) = (0usize, 0usize);
    let mut failures = Vec::new();
    for (gi, g) in graphs.iter().chain(&dags).enumerate() {
        let l = enumerate_lattice(g, &limits).unwrap();
        let kd = k_diagrams(g, &l).unwrap();
        match cochain_complex(g, &l, &kd.k1) {
            Ok(cc) => {
                complexes += 1;
                if !cc.d1.compose(&cc.d0).is_zero() {
                    failures.push(format!("graph {gi}: d1 d0 != 0"));
                }
                if !g.has_cycle() {
                    acyclic += 1;
                    if !ext_groups(&cc).ext2.is_trivial() {
                        failures.push(format!("graph {gi}: acyclic with Ext2 != 0"));
                    }
                }
            }
            Err(e) => failures.push(format!("graph {gi}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{complexes} complexes, {acyclic} acyclic with Ext2 = 0, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_7() -> Outcome {
    let g = loops(1);
    let l = enumerate_lattice(&g, &Limits::default()).unwrap();
    let kd = k_diagrams(&g, &l).unwrap();
    let cc = cochain_complex(&g, &l, &kd.k1).unwrap();
    let ext = ext_groups(&cc);
    let types = (
        ext.ext0.group.group_type().to_string(),
        ext.ext1.group.group_type().to_string(),
        ext.ext2.group_type().to_string(),
    );
    let beta = represents_zero_ext2(&cc, &DiagramMorphism::identity(&kd.k1)).unwrap();
    let pass = types == ("Z".to_string(), "0".to_string(), "0".to_string()) && beta == Some(vec![BigInt::one()]);
    Outcome {
        pass,
        detail: format!("(Ext0, Ext1, Ext2) = {types:?}, beta = {beta:?}"),
    }
}

fn criterion_8(graphs: &[Graph]) -> Outcome {
    let limits = Limits::default();
    let mut failures = Vec::new();
    let mut conclusions = std::collections::BTreeMap::new();
    for (gi, g) in graphs.iter().enumerate() {
        let v = match compare_verdict(g, g, &limits) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("graph {gi}: {e}"));
                continue;
            }
        };
        *conclusions.entry(v.conclusion.as_str()).or_insert(0usize) += 1;
        let b = invariant_bundle(g, &limits).unwrap();
        let id: Vec<usize> = (0..b.lattice.len()).collect();
        let witness_is_identity = v.witness.as_ref().is_some_and(|(psi, p0, p1)| {
            *psi == id && *p0 == DiagramMorphism::identity(&b.k.k0) && *p1 == DiagramMorphism::identity(&b.k.k1)
        });
        if v.conclusion == Conclusion::InvariantsDiffer || !witness_is_identity {
            failures.push(format!(
                "graph {gi}: {} (identity witness {witness_is_identity})",
                v.conclusion.as_str()
            ));
            continue;
        }
        // the algebraic search alone, without the graph isomorphism shortcut
        let isos = find_lattice_isos(&b.lattice, &b.lattice, limits.lattice_isos);
        let has_id = isos.as_ref().map_or(true, |v| v.contains(&id));
        let tau = tau_matching(&b, &b, &id).map(|t| t.matched).unwrap_or(false);
        let natural = is_natural(&b.k.k0, &b.k.k0, &DiagramMorphism::identity(&b.k.k0))
            && is_natural(&b.k.k1, &b.k.k1, &DiagramMorphism::identity(&b.k.k1));
        let not_refuted = [0u8, 1]
            .iter()
            .all(|&d| find_diagram_isos(&b, &b, &id, d, 1, &limits).is_ok_and(|s| !s.proves_none()));
        if !(has_id && tau && natural && not_refuted) {
            failures.push(format!(
                "graph {gi}: identity psi {has_id}, tau {tau}, natural {natural}, search not refuted {not_refuted}"
            ));
        }
    }
    let mut asymmetric = Vec::new();
    for (gi, pair) in graphs.chunks(2).enumerate() {
        if let [g, h] = pair {
            let a = compare_verdict(g, h, &limits).map(|v| v.conclusion);
            let b = compare_verdict(h, g, &limits).map(|v| v.conclusion);
            if a != b {
                asymmetric.push(format!("pair {gi}: {a:?} vs {b:?}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && asymmetric.is_empty(),
        detail: format!(
            "{} self-comparisons {conclusions:?}, {} failures {:?}; {} swapped pairs, {} asymmetric {:?}",
            graphs.len(),
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>(),
            graphs.len() / 2,
            asymmetric.len(),
            asymmetric.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

/// All dimension vectors in `[0, bound]^n` satisfying the dimension
/// equation for a one-block target.
fn admissible_dims(g: &Graph, bound: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut d = vec![0usize; n];
    loop {
        let ok = (0..n)
            .filter(|&v| g.is_regular(v))
            .all(|v| g.incoming(v).iter().map(|&e| d[g.src(e)]).sum::<usize>() == d[v]);
        if ok {
            out.push(d.clone());
        }
        let mut k = 0;
        while k < n && d[k] == bound {
            d[k] = 0;
            k += 1;
        }
        if k == n {
            return out;
        }
        d[k] += 1;
    }
}

fn criterion_9(graphs: &[Graph]) -> Outcome {
    let mut families = 0usize;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let sols = admissible_dims(g, 3);
        for (k, a) in sols.iter().enumerate() {
            let b = &sols[(k * 7 + 1) % sols.len()];
            let dims: Vec<Vec<usize>> = a.iter().zip(b).map(|(&x, &y)| vec![x, y]).collect();
            let target = FdTarget::new(vec![2, 3]).unwrap();
            for choice in [
                UnitaryChoice::Identity,
                UnitaryChoice::Haar(gi as u64 * 1000 + k as u64),
            ] {
                match lift_monoid_hom_fd(g, &target, dims.clone(), choice) {
                    Ok(f) => {
                        families += 1;
                        let r = verify_ck(&f, g).max_residual;
                        worst = worst.max(r);
                        if r > CK_TOLERANCE {
                            failures.push(format!("graph {gi}: residual {r:e}"));
                        }
                    }
                    Err(e) => failures.push(format!("graph {gi}: {e}")),
                }
            }
        }
    }
    let o2 = loops(2);
    let one = FdTarget::new(vec![1]).unwrap();
    let rejected = (1..=20).all(|d| {
        matches!(
            lift_monoid_hom_fd(&o2, &one, vec![vec![d]], UnitaryChoice::Identity),
            Err(Error::DimensionEquationViolated { .. })
        )
    });
    let zero_ok = lift_monoid_hom_fd(&o2, &one, vec![vec![0]], UnitaryChoice::Identity).is_ok();
    Outcome {
        pass: failures.is_empty() && rejected && zero_ok && families > 0,
        detail: format!(
            "{families} families, max residual {worst:e} (tolerance {CK_TOLERANCE:e}), O2 rejects d = 1..20: {rejected}, \
             {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    }
}

fn criterion_10() -> Outcome {
    let cfg = CorpusConfig {
        seed: 42,
        count: 100,
        max_vertices: 5,
        max_edges: 8,
        compare_pairs: false,
    };
    let limits = Limits::default();
    let a = render(&corpus_scan(&cfg, &limits).unwrap().to_json(&cfg));
    let b = render(&corpus_scan(&cfg, &limits).unwrap().to_json(&cfg));
    Outcome {
        pass: a == b,
        detail: format!("two scans of {} bytes, identical: {}", a.len(), a == b),
    }
}

fn main() {
    let large = suite(SUITE_SEED, 500, 8, 12);
    let small = suite(SUITE_SEED + 1, 200, 5, 7);
    let medium = suite(SUITE_SEED + 2, 200, 7, 10);
    let compare_suite = suite(SUITE_SEED + 3, 120, 6, 9);
    let fd_suite = suite(SUITE_SEED + 4, 60, 4, 6);
    let secs = Duration::from_secs_f64;
    let results = [
        run(
            1,
            "ideal lattice of the three-vertex example",
            Some(secs(0.1)),
            criterion_1,
        ),
        run(2, "Cuntz K-theory", Some(secs(1.0)), criterion_2),
        run(3, "exactness of the K-theory sequence", Some(secs(60.0)), || {
            criterion_3(&large)
        }),
        run(4, "monoid oracle agreement", Some(secs(120.0)), || criterion_4(&small)),
        run(5, "tail classifier cross-check", Some(secs(120.0)), || {
            criterion_5(&medium)
        }),
        run(6, "cochain contract", None, || criterion_6(&large)),
        run(7, "Ext of the single loop", None, criterion_7),
        run(8, "self-classification", None, || criterion_8(&compare_suite)),
        run(9, "finite-dimensional residuals", Some(secs(5.0)), || {
            criterion_9(&fd_suite)
        }),
        run(10, "corpus determinism", None, criterion_10),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
