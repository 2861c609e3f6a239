use serde_json::{Map, Value};

use graph_invariants::compare::{compare_bundles, compare_verdict, invariant_bundle, Conclusion};
use graph_invariants::fd::{align_af, lift_monoid_hom_fd, unitary_difference, verify_ck, FdTarget, UnitaryChoice};
use graph_invariants::io::{parse_graph, parse_monoid_literal};
use graph_invariants::lattice::TailKind;
use graph_invariants::monoid::{equal_in_p, leq_in_p, LeqAnswer};
use graph_invariants::report::{envelope, render, verdict_json};
use graph_invariants::{Graph, Limits};

const REMARK: &str = "vertex 1\nvertex 2\nvertex 3\nedge a 1 1\nedge b 2 2\nedge c 1 3\nedge d 2 3\n";
const O2: &str = "vertex v\nedge e1 v v\nedge e2 v v\n";
const LOOP: &str = "vertex v\nedge e v v\n";

fn g(text: &str) -> Graph {
    parse_graph(text).unwrap()
}

#[test]
fn remark_graph_invariants() {
    let b = invariant_bundle(&g(REMARK), &Limits::default()).unwrap();
    assert_eq!(b.lattice.len(), 4);
    assert!(b.tails.iter().all(|t| t.kind == TailKind::Circle));
    assert_eq!(b.tails.len(), 2);
    assert!(!b.pi_proxy());
    let types: Vec<String> = b.k.data.iter().map(|d| d.k0.group_type().to_string()).collect();
    assert_eq!(types, vec!["0", "Z", "Z", "Z^2"]);
}

#[test]
fn verdicts_between_small_graphs() {
    let limits = Limits::default();
    let v = compare_verdict(&g(LOOP), &g(O2), &limits).unwrap();
    assert_eq!(v.conclusion, Conclusion::InvariantsDiffer);
    let v = compare_verdict(&g(O2), &g(O2), &limits).unwrap();
    assert_eq!(v.conclusion, Conclusion::StablyIsomorphic);
    let relabelled = "vertex z\nvertex y\nvertex x\nedge p y y\nedge q x x\nedge r y z\nedge s x z\n";
    let v = compare_verdict(&g(REMARK), &g(relabelled), &limits).unwrap();
    assert!(v.conclusion >= Conclusion::HomotopyEquivalentIfObstructionVanishes);
    assert!(v.graph_isomorphism.is_some());
}

#[test]
fn verdict_report_is_deterministic() {
    let limits = Limits::default();
    let (x, y) = (g(REMARK), g(O2));
    let bx = invariant_bundle(&x, &limits).unwrap();
    let by = invariant_bundle(&y, &limits).unwrap();
    let render_once = || {
        let v = compare_bundles(&bx, &by, &limits, None).unwrap();
        let mut m = Map::new();
        m.insert("verdict".into(), verdict_json(&bx, &by, &v));
        render(&envelope("compare", &[REMARK.as_bytes(), O2.as_bytes()], m))
    };
    let a = render_once();
    assert_eq!(a, render_once());
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["verdict"]["conclusion"], "invariants_differ");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn monoid_literals_through_the_api() {
    let o2 = g(O2);
    let a = parse_monoid_literal(&o2, "v:1").unwrap();
    let b = parse_monoid_literal(&o2, "v:5").unwrap();
    assert!(equal_in_p(&o2, &a, &b));
    let l = g(LOOP);
    let one = parse_monoid_literal(&l, "v").unwrap();
    let three = parse_monoid_literal(&l, "v:3").unwrap();
    assert_eq!(
        leq_in_p(&l, &one, &three, &Limits::default()),
        LeqAnswer::Yes(parse_monoid_literal(&l, "v:2").unwrap())
    );
    assert_eq!(leq_in_p(&l, &three, &one, &Limits::default()), LeqAnswer::No);
}

#[test]
fn af_families_align() {
    // x and y feed m, which feeds r twice
    let text = "vertex r\nvertex m\nvertex x\nvertex y\nedge e1 m r\nedge e2 m r\nedge e3 x m\nedge e4 y m\n";
    let gr = g(text);
    let t = FdTarget::new(vec![2, 1]).unwrap();
    // vertices in index order: m, r, x, y
    let dims = vec![vec![2, 3], vec![4, 6], vec![1, 1], vec![1, 2]];
    let f1 = lift_monoid_hom_fd(&gr, &t, dims.clone(), UnitaryChoice::Haar(1)).unwrap();
    let f2 = lift_monoid_hom_fd(&gr, &t, dims, UnitaryChoice::Haar(2)).unwrap();
    assert!(verify_ck(&f1, &gr).max_residual <= 1e-12);
    let diff = unitary_difference(&f1, &f2).unwrap();
    assert!(diff.roundtrip_error <= 1e-12);
    let a = align_af(&gr, &f1, &f2, gr.all_vertices()).unwrap();
    assert!(a.residual <= 1e-10);
}
