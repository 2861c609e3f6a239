use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graph_invariants::diagrams::{
    cochain_complex_over, ext_groups, hom_free_diagram, k_diagrams, pullback_diagram, IndexPoset,
};
use graph_invariants::fd::{haar_unitary, op_norm, CMatrix};
use graph_invariants::intmat::{smith_normal_form, IntMatrix};
use graph_invariants::io::{format_monoid_literal, parse_graph, parse_monoid_literal, serialize_graph};
use graph_invariants::lattice::{enumerate_lattice, hs_closure, is_hereditary_saturated};
use graph_invariants::monoid::{equal_in_p, supp_ideal, MonoidElement};
use graph_invariants::{Graph, Limits, VertexSet};

fn build(n: usize, edges: &[(usize, usize)], perm: Option<&[usize]>) -> Graph {
    let name = |v: usize| format!("v{}", perm.map_or(v, |p| p[v]));
    let names: Vec<String> = (0..n).map(name).collect();
    let es: Vec<(String, String, String)> = edges
        .iter()
        .enumerate()
        .map(|(k, &(s, r))| (format!("e{k}"), name(s), name(r)))
        .collect();
    let vs: Vec<&str> = names.iter().map(String::as_str).collect();
    let er: Vec<(&str, &str, &str)> = es
        .iter()
        .map(|(e, s, r)| (e.as_str(), s.as_str(), r.as_str()))
        .collect();
    Graph::from_edges(&vs, &er).unwrap()
}

fn graph_parts(max_n: usize, max_e: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=max_e)))
}

fn graph(max_n: usize, max_e: usize) -> impl Strategy<Value = Graph> {
    graph_parts(max_n, max_e).prop_map(|(n, e)| build(n, &e, None))
}

fn element(n: usize) -> impl Strategy<Value = MonoidElement> {
    prop::collection::vec(0u64..4, n).prop_map(|coeffs| MonoidElement { coeffs })
}

fn with_elements(k: usize) -> impl Strategy<Value = (Graph, Vec<MonoidElement>)> {
    graph(5, 7).prop_flat_map(move |g| {
        let n = g.vertex_count();
        (Just(g), prop::collection::vec(element(n), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_round_trip(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-6i64..7, 16)) {
        let a = IntMatrix::from_i64(rows, cols, &seed[..rows * cols]);
        let s = smith_normal_form(&a);
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        prop_assert_eq!(&s.u * &s.u_inv, IntMatrix::identity(rows));
        let diag = s.diagonal();
        for w in diag.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
        prop_assert!(diag.iter().all(|d| *d > BigInt::from(0)));
    }

    #[test]
    fn closure_is_idempotent((g, mask) in graph(6, 9).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), 0u64..(1u64 << n))
    })) {
        let s = VertexSet::from_iter((0..g.vertex_count()).filter(|&v| mask >> v & 1 == 1));
        let c = hs_closure(&g, s);
        prop_assert!(s.is_subset(c));
        prop_assert!(is_hereditary_saturated(&g, c));
        prop_assert_eq!(hs_closure(&g, c), c);
    }

    #[test]
    fn lattice_laws(g in graph(6, 9)) {
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        for i in 0..l.len() {
            prop_assert!(is_hereditary_saturated(&g, l.element(i)));
            for j in 0..l.len() {
                let (join, meet) = (l.join(i, j), l.meet(i, j));
                prop_assert_eq!(join, l.join(j, i));
                prop_assert_eq!(meet, l.meet(j, i));
                prop_assert_eq!(l.join(i, meet), i);
                prop_assert_eq!(l.meet(i, join), i);
                prop_assert!(l.leq(i, join) && l.leq(meet, j));
                prop_assert_eq!(l.element(meet), l.element(i).intersection(l.element(j)));
                prop_assert_eq!(l.element(join), hs_closure(&g, l.element(i).union(l.element(j))));
            }
        }
    }

    #[test]
    fn support_is_additive((g, cs) in with_elements(2)) {
        let sum = cs[0].add(&cs[1]);
        let expected = hs_closure(&g, supp_ideal(&g, &cs[0]).union(supp_ideal(&g, &cs[1])));
        prop_assert_eq!(supp_ideal(&g, &sum), expected);
    }

    #[test]
    fn equality_is_a_congruence((g, cs) in with_elements(3)) {
        if equal_in_p(&g, &cs[0], &cs[1]) {
            prop_assert!(equal_in_p(&g, &cs[0].add(&cs[2]), &cs[1].add(&cs[2])));
        }
        prop_assert!(equal_in_p(&g, &cs[0], &cs[0]));
        prop_assert_eq!(equal_in_p(&g, &cs[0], &cs[1]), equal_in_p(&g, &cs[1], &cs[0]));
        // δ_v = Σ_{e ∈ E^v} δ_{s(e)}
        for v in (0..g.vertex_count()).filter(|&v| g.is_regular(v)) {
            let mut rhs = cs[2].clone();
            for &e in g.incoming(v) {
                rhs.coeffs[g.src(e)] += 1;
            }
            let lhs = cs[2].add(&MonoidElement::delta(g.vertex_count(), v));
            prop_assert!(equal_in_p(&g, &lhs, &rhs));
        }
    }

    #[test]
    fn cochain_complexes_compose_to_zero(g in graph(5, 7)) {
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let kd = k_diagrams(&g, &l).unwrap();
        for poset in [IndexPoset::Ideals, IndexPoset::Irreducible] {
            let cc = cochain_complex_over(&g, &l, &kd.k1, poset).unwrap();
            prop_assert!(cc.d1.compose(&cc.d0).is_zero());
            let y0 = cochain_complex_over(&g, &l, &kd.k0, poset).unwrap();
            prop_assert!(y0.d1.compose(&y0.d0).is_zero());
        }
    }

    #[test]
    fn ext_is_relabelling_invariant(
        (n, edges, perm) in graph_parts(5, 7).prop_flat_map(|(n, e)| {
            (Just(n), Just(e), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let types = |g: &Graph| {
            let l = enumerate_lattice(g, &Limits::default()).unwrap();
            let kd = k_diagrams(g, &l).unwrap();
            let e = ext_groups(&cochain_complex_over(g, &l, &kd.k1, IndexPoset::Ideals).unwrap());
            (e.ext0.group.group_type(), e.ext1.group.group_type(), e.ext2.group_type())
        };
        prop_assert_eq!(types(&build(n, &edges, None)), types(&build(n, &edges, Some(&perm))));
    }

    #[test]
    fn pullbacks_compose((g, a, b) in graph(5, 7).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), 0u64..(1u64 << n), 0u64..(1u64 << n))
    })) {
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let kd = k_diagrams(&g, &l).unwrap();
        let pick = |m: u64| l.generated(VertexSet::from_iter((0..g.vertex_count()).filter(|&v| m >> v & 1 == 1)));
        let (a, b) = (pick(a), pick(b));
        let psi: Vec<usize> = (0..l.len()).map(|i| l.join(i, a)).collect();
        let phi: Vec<usize> = (0..l.len()).map(|i| l.join(i, b)).collect();
        let composite: Vec<usize> = psi.iter().map(|&i| phi[i]).collect();
        for y in [&kd.k0, &kd.k1] {
            let once = pullback_diagram(l.elements(), &composite, y).unwrap();
            let twice = pullback_diagram(l.elements(), &psi, &pullback_diagram(l.elements(), &phi, y).unwrap()).unwrap();
            prop_assert_eq!(&once.groups, &twice.groups);
            for i in 0..l.len() {
                for j in 0..l.len() {
                    if l.leq(i, j) {
                        prop_assert_eq!(&once.map(i, j).matrix, &twice.map(i, j).matrix);
                    }
                }
            }
        }
        let identity: Vec<usize> = (0..l.len()).collect();
        let same = pullback_diagram(l.elements(), &identity, &kd.k1).unwrap();
        prop_assert_eq!(&same.groups, &kd.k1.groups);
    }

    #[test]
    fn free_hom_round_trip((g, seed) in graph(4, 6).prop_flat_map(|g| (Just(g), prop::collection::vec(-5i64..6, 64)))) {
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let kd = k_diagrams(&g, &l).unwrap();
        let s = g.all_vertices();
        for y in [&kd.k0, &kd.k1] {
            let fh = hom_free_diagram(&l, s, y).unwrap();
            let fam: Vec<BigInt> = (0..fh.group.ngens()).map(|i| BigInt::from(seed[i % seed.len()])).collect();
            let m = fh.family_to_morphism(y, s, &fam);
            let back = fh.morphism_to_family(y, s, &m);
            prop_assert!(fh.group.equal(&fam, &back));
        }
    }

    #[test]
    fn graph_files_round_trip(g in graph(6, 9)) {
        let text = serialize_graph(&g);
        let h = parse_graph(&text).unwrap();
        prop_assert_eq!(&h, &g);
        prop_assert_eq!(serialize_graph(&h), text);
    }

    #[test]
    fn monoid_literals_round_trip((g, cs) in with_elements(1)) {
        let s = format_monoid_literal(&g, &cs[0]);
        prop_assert_eq!(&parse_monoid_literal(&g, &s).unwrap(), &cs[0]);
    }

    #[test]
    fn haar_unitaries_are_unitary(n in 0usize..7, seed in any::<u64>()) {
        let u = haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(op_norm(&(u.adjoint() * &u - CMatrix::identity(n, n))) <= 1e-12);
    }
}
