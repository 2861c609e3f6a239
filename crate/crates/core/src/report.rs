//! JSON reports. Every integer is written as a decimal string and object
//! keys are sorted, so equal inputs give byte-identical output.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::compare::{InvariantBundle, IsoSearch, Obstruction, TailCrosscheck, Verdict};
use crate::diagrams::{DiagramMorphism, ExtGroups, KDiagrams};
use crate::fd::{CkReport, CorrespondenceFamily};
use crate::graph::Graph;
use crate::group::GroupType;
use crate::intmat::IntMatrix;
use crate::ktheory::KData;
use crate::lattice::{join_irreducibles, IdealLattice, MaximalTail};
use crate::vset::VertexSet;

pub const TOOL: &str = "ginv";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn n(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

/// Wraps command sections with the tool version and input digests.
pub fn envelope(command: &str, inputs: &[&[u8]], sections: Map<String, Value>) -> Value {
    let mut m = sections;
    m.insert("tool".into(), json!(TOOL));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert(
        "input_sha256".into(),
        Value::Array(inputs.iter().map(|b| json!(sha256_hex(b))).collect()),
    );
    Value::Object(m)
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn set_json(g: &Graph, s: VertexSet) -> Value {
    json!(g.names(s))
}

pub fn bigs_json(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(n).collect())
}

pub fn matrix_json(m: &IntMatrix) -> Value {
    json!({
        "shape": [n(m.rows()), n(m.cols())],
        "rows": m.to_string_rows(),
    })
}

pub fn group_json(t: &GroupType) -> Value {
    json!({
        "free_rank": n(t.free_rank),
        "torsion": bigs_json(&t.torsion),
        "display": t.to_string(),
    })
}

pub fn graph_json(g: &Graph) -> Value {
    let d = g.description();
    json!({
        "vertices": d.vertices,
        "edges": d.edges.iter().map(|(e, s, r)| json!({"id": e, "source": s, "range": r})).collect::<Vec<_>>(),
    })
}

pub fn lattice_json(g: &Graph, l: &IdealLattice) -> Value {
    json!({
        "size": n(l.len()),
        "elements": l.elements().iter().enumerate()
            .map(|(i, &h)| json!({"index": n(i), "vertices": set_json(g, h)}))
            .collect::<Vec<_>>(),
        "covers": l.covers().iter().map(|&(i, j)| json!([n(i), n(j)])).collect::<Vec<_>>(),
        "join_irreducibles": join_irreducibles(l).into_iter().map(n).collect::<Vec<_>>(),
        "primes": l.primes().into_iter().map(n).collect::<Vec<_>>(),
        "principal": (0..g.vertex_count())
            .map(|v| (g.vertex_id(v).to_string(), n(l.principal(v))))
            .collect::<Map<_, _>>(),
        "bottom": n(l.bottom()),
        "top": n(l.top()),
    })
}

pub fn kdata_json(g: &Graph, kd: &KData) -> Value {
    json!({
        "ideal": set_json(g, kd.w),
        "generators": kd.verts.iter().map(|&v| g.vertex_id(v)).collect::<Vec<_>>(),
        "regular": kd.regs.iter().map(|&v| g.vertex_id(v)).collect::<Vec<_>>(),
        "id_minus_m": matrix_json(&kd.matrix),
        "k0": group_json(&kd.k0.group_type()),
        "k1": group_json(&kd.k1.group_type()),
        "k1_basis": matrix_json(&kd.k1_basis),
    })
}

pub fn k_diagrams_json(g: &Graph, kd: &KDiagrams) -> Value {
    let nodes: Vec<Value> = kd
        .data
        .iter()
        .map(|d| {
            json!({
                "ideal": set_json(g, d.w),
                "k0": group_json(&d.k0.group_type()),
                "k1": group_json(&d.k1.group_type()),
            })
        })
        .collect();
    let maps: Vec<Value> = kd
        .k0
        .covers()
        .into_iter()
        .map(|(i, j)| {
            json!({
                "from": n(i),
                "to": n(j),
                "k0": matrix_json(&kd.k0.map(i, j).matrix),
                "k1": matrix_json(&kd.k1.map(i, j).matrix),
            })
        })
        .collect();
    json!({"nodes": nodes, "cover_maps": maps})
}

pub fn tail_json(g: &Graph, t: &MaximalTail, check: Option<&TailCrosscheck>) -> Value {
    let mut v = json!({
        "members": set_json(g, t.members),
        "omega": set_json(g, t.omega),
        "successor": set_json(g, t.successor),
        "kind": t.kind.as_str(),
        "tau_cycle": t.tau_cycle.as_ref().map(|c| c.edges.iter().map(|&e| g.edge_id(e)).collect::<Vec<_>>()),
    });
    if let Some(c) = check {
        v["ktheory"] = json!({
            "kind": c.k_kind.as_str(),
            "i0_injective": c.i0_injective,
            "i1_surjective": c.i1_surjective,
            "cone_is_group": c.cone_is_group,
            "k0_subquotient": group_json(&c.k0_sub),
            "ker_i0": group_json(&c.ker_i0),
            "coker_i1": group_json(&c.coker_i1),
        });
    }
    v
}

pub fn tails_json(b: &InvariantBundle) -> Value {
    Value::Array(
        b.tails
            .iter()
            .zip(&b.tail_checks)
            .map(|(t, c)| tail_json(&b.graph, t, Some(c)))
            .collect(),
    )
}

pub fn ext_json(e: &ExtGroups) -> Value {
    json!({
        "ext0": group_json(&e.ext0.group.group_type()),
        "ext1": group_json(&e.ext1.group.group_type()),
        "ext2": group_json(&e.ext2.group_type()),
    })
}

pub fn morphism_json(m: &DiagramMorphism) -> Value {
    Value::Array(m.components.iter().map(matrix_json).collect())
}

fn psi_json(g: &Graph, l: &IdealLattice, g2: &Graph, l2: &IdealLattice, psi: &[usize]) -> Value {
    Value::Array(
        psi.iter()
            .enumerate()
            .map(|(i, &j)| json!([set_json(g, l.element(i)), set_json(g2, l2.element(j))]))
            .collect(),
    )
}

fn search_json(s: &Option<IsoSearch>) -> Value {
    match s {
        None => Value::Null,
        Some(s) => json!({
            "found": n(s.found.len()),
            "unconfirmed": n(s.unconfirmed.len()),
            "complete": s.complete,
            "obstruction": s.obstruction,
        }),
    }
}

pub fn verdict_json(b: &InvariantBundle, b2: &InvariantBundle, v: &Verdict) -> Value {
    let (g, l, g2, l2) = (&b.graph, &b.lattice, &b2.graph, &b2.lattice);
    // a reversed verdict stores maps from G' to G
    let (ga, la, gb, lb) = if v.reversed { (g2, l2, g, l) } else { (g, l, g2, l2) };
    let obstruction = match &v.obstruction {
        None => Value::Null,
        Some(Obstruction::ExtVanishes) => json!({"status": "ext2_vanishes"}),
        Some(Obstruction::GraphIsomorphism) => json!({"status": "graph_isomorphism"}),
        Some(Obstruction::SuppliedZero(beta)) => json!({"status": "supplied_zero", "beta": bigs_json(beta)}),
        Some(Obstruction::SuppliedNonzero) => json!({"status": "supplied_nonzero"}),
        Some(Obstruction::Unresolved) => json!({"status": "unresolved"}),
    };
    json!({
        "conclusion": v.conclusion.as_str(),
        "reason": v.reason,
        "notes": v.notes,
        "reversed": v.reversed,
        "lattice_search_complete": v.lattice_search_complete,
        "graph_isomorphism": v.graph_isomorphism.as_ref().map(|s| {
            s.iter().enumerate().map(|(a, &b)| json!([g.vertex_id(a), g2.vertex_id(b)])).collect::<Vec<_>>()
        }),
        "tau_matched": v.tau_matched,
        "pi_proxy": [v.pi_proxy.0, v.pi_proxy.1],
        "ext2": [group_json(&v.ext2.0), group_json(&v.ext2.1)],
        "obstruction": obstruction,
        "psi": v.outcomes.iter().map(|o| json!({
            "map": psi_json(ga, la, gb, lb, &o.psi),
            "tau_matched": o.tau.matched,
            "degree0": search_json(&o.degree0),
            "degree1": search_json(&o.degree1),
            "rejected": o.rejected,
        })).collect::<Vec<_>>(),
        "witness": v.witness.as_ref().map(|(psi, phi0, phi1)| json!({
            "psi": psi_json(ga, la, gb, lb, psi),
            "phi0": morphism_json(phi0),
            "phi1": morphism_json(phi1),
        })),
    })
}

fn complex_json(m: &nalgebra::DMatrix<num_complex::Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([format!("{:e}", m[(i, j)].re), format!("{:e}", m[(i, j)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn fd_json(g: &Graph, f: &CorrespondenceFamily, ck: &CkReport) -> Value {
    json!({
        "blocks": f.target.blocks.iter().map(n).collect::<Vec<_>>(),
        "seed": f.seed.map(n),
        "dims": (0..g.vertex_count())
            .map(|v| (g.vertex_id(v).to_string(), Value::Array(f.dims[v].iter().map(n).collect())))
            .collect::<Map<_, _>>(),
        "unitaries": (0..g.vertex_count())
            .filter_map(|v| f.unitaries[v].as_ref().map(|us| {
                (g.vertex_id(v).to_string(), Value::Array(us.iter().map(complex_json).collect()))
            }))
            .collect::<Map<_, _>>(),
        "max_residual": format!("{:e}", ck.max_residual),
        "residuals": ck.residuals.iter()
            .map(|(r, b, x)| json!({"relation": r, "block": n(b), "residual": format!("{:e}", x)}))
            .collect::<Vec<_>>(),
    })
}
