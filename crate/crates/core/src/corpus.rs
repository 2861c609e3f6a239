//! Seeded random multigraphs and invariant-digest bucketing.
//!
//! Graph `i` of a scan is drawn from its own ChaCha8 stream, so results do
//! not depend on the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::compare::{compare_verdict, order_signature, Conclusion};
use crate::diagrams::k_diagrams;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::serialize_graph;
use crate::lattice::{enumerate_lattice, maximal_tails};
use crate::limits::Limits;
use crate::report::sha256_hex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Run a full comparison on every pair sharing a bucket.
    pub compare_pairs: bool,
}

/// A multigraph with `1..=max_vertices` vertices and `0..=max_edges` edges
/// whose endpoints are uniform.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Graph {
    let n = if max_vertices == 0 {
        0
    } else {
        rng.random_range(1..=max_vertices)
    };
    let m = if n == 0 { 0 } else { rng.random_range(0..=max_edges) };
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..m)
        .map(|k| {
            let s = rng.random_range(0..n);
            let r = rng.random_range(0..n);
            (format!("e{k}"), names[s].clone(), names[r].clone())
        })
        .collect();
    let vs: Vec<&str> = names.iter().map(String::as_str).collect();
    let es: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(e, s, r)| (e.as_str(), s.as_str(), r.as_str()))
        .collect();
    Graph::from_edges(&vs, &es).expect("generated ids are distinct")
}

/// Graph `index` of the corpus for `seed`.
pub fn corpus_graph(seed: u64, index: usize, max_vertices: usize, max_edges: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    random_graph(&mut rng, max_vertices, max_edges)
}

/// Order signature of a lattice element with its K0 and K1 types.
pub type NodeDigest = ((usize, usize, usize, usize), String, String);

/// Conservative digest: equal invariants give equal digests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InvariantDigest {
    /// Sorted order signatures of the lattice elements.
    pub lattice_shape: Vec<(usize, usize, usize, usize)>,
    /// Sorted `(signature, K0, K1)` per lattice element.
    pub nodes: Vec<NodeDigest>,
    pub tail_kinds: Vec<String>,
}

impl InvariantDigest {
    pub fn canonical(&self) -> String {
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(|(s, k0, k1)| format!("{s:?}:{k0}|{k1}"))
            .collect();
        format!(
            "lattice={:?};nodes=[{}];tails={:?}",
            self.lattice_shape,
            nodes.join(","),
            self.tail_kinds
        )
    }

    pub fn key(&self) -> String {
        sha256_hex(self.canonical().as_bytes())[..16].to_string()
    }
}

pub fn invariant_digest(g: &Graph, limits: &Limits) -> Result<InvariantDigest> {
    let l = enumerate_lattice(g, limits)?;
    let kd = k_diagrams(g, &l)?;
    let tails = maximal_tails(g, &l)?;
    let mut lattice_shape: Vec<_> = (0..l.len()).map(|i| order_signature(&l, i)).collect();
    lattice_shape.sort();
    let mut nodes: Vec<_> = (0..l.len())
        .map(|i| {
            (
                order_signature(&l, i),
                kd.data[i].k0.group_type().to_string(),
                kd.data[i].k1.group_type().to_string(),
            )
        })
        .collect();
    nodes.sort();
    let mut tail_kinds: Vec<String> = tails.iter().map(|t| t.kind.as_str().to_string()).collect();
    tail_kinds.sort();
    Ok(InvariantDigest {
        lattice_shape,
        nodes,
        tail_kinds,
    })
}

#[derive(Debug, Clone)]
pub struct Bucket {
    pub digest: InvariantDigest,
    pub members: Vec<usize>,
    /// Conclusions for pairs `(i, j)`, `i < j`, when comparisons were run.
    pub verdicts: Vec<(usize, usize, std::result::Result<Conclusion, String>)>,
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub graphs: Vec<Graph>,
    pub buckets: Vec<Bucket>,
    /// Graphs whose invariants hit a cap.
    pub failures: Vec<(usize, String)>,
}

/// Buckets `graphs` by invariant digest; buckets are ordered by digest key.
pub fn scan_graphs(graphs: Vec<Graph>, compare_pairs: bool, limits: &Limits) -> CorpusReport {
    let digests: Vec<Result<InvariantDigest>> = graphs.par_iter().map(|g| invariant_digest(g, limits)).collect();
    let mut by_key: BTreeMap<String, Bucket> = BTreeMap::new();
    let mut failures = Vec::new();
    for (i, d) in digests.into_iter().enumerate() {
        match d {
            Ok(d) => by_key
                .entry(d.key())
                .or_insert_with(|| Bucket {
                    digest: d,
                    members: Vec::new(),
                    verdicts: Vec::new(),
                })
                .members
                .push(i),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let mut buckets: Vec<Bucket> = by_key.into_values().collect();
    if compare_pairs {
        buckets.par_iter_mut().for_each(|b| {
            for (x, &i) in b.members.iter().enumerate() {
                for &j in &b.members[x + 1..] {
                    let v = compare_verdict(&graphs[i], &graphs[j], limits)
                        .map(|v| v.conclusion)
                        .map_err(|e| e.to_string());
                    b.verdicts.push((i, j, v));
                }
            }
        });
    }
    CorpusReport {
        graphs,
        buckets,
        failures,
    }
}

pub fn corpus_scan(cfg: &CorpusConfig, limits: &Limits) -> Result<CorpusReport> {
    if cfg.max_vertices > limits.lattice_vertices {
        return Err(Error::TooLarge {
            what: "max vertices",
            size: cfg.max_vertices,
            limit: limits.lattice_vertices,
        });
    }
    let graphs: Vec<Graph> = (0..cfg.count)
        .into_par_iter()
        .map(|i| corpus_graph(cfg.seed, i, cfg.max_vertices, cfg.max_edges))
        .collect();
    Ok(scan_graphs(graphs, cfg.compare_pairs, limits))
}

impl CorpusReport {
    pub fn to_json(&self, cfg: &CorpusConfig) -> Value {
        let s = |x: usize| Value::String(x.to_string());
        let buckets: Vec<Value> = self
            .buckets
            .iter()
            .map(|b| {
                let mut pairs = Vec::new();
                for (x, &i) in b.members.iter().enumerate() {
                    for &j in &b.members[x + 1..] {
                        pairs.push(json!([s(i), s(j)]));
                    }
                }
                let mut v = json!({
                    "digest": b.digest.key(),
                    "invariants": b.digest.canonical(),
                    "members": b.members.iter().map(|&i| s(i)).collect::<Vec<_>>(),
                    "flagged_pairs": pairs,
                });
                if cfg.compare_pairs {
                    v["verdicts"] = Value::Array(
                        b.verdicts
                            .iter()
                            .map(|(i, j, r)| match r {
                                Ok(c) => json!({"pair": [s(*i), s(*j)], "conclusion": c.as_str()}),
                                Err(e) => json!({"pair": [s(*i), s(*j)], "error": e}),
                            })
                            .collect(),
                    );
                }
                v
            })
            .collect();
        let mut m = Map::new();
        m.insert(
            "config".into(),
            json!({
                "seed": cfg.seed.to_string(),
                "count": s(cfg.count),
                "max_vertices": s(cfg.max_vertices),
                "max_edges": s(cfg.max_edges),
            }),
        );
        m.insert("buckets".into(), Value::Array(buckets));
        m.insert(
            "graphs".into(),
            Value::Array(self.graphs.iter().map(|g| json!(serialize_graph(g))).collect()),
        );
        m.insert(
            "failures".into(),
            Value::Array(
                self.failures
                    .iter()
                    .map(|(i, e)| json!({"graph": s(*i), "error": e}))
                    .collect(),
            ),
        );
        Value::Object(m)
    }
}
