//! Hereditary saturated vertex sets, the lattice they form, its prime
//! elements, and maximal tails with their AF / purely infinite / circle
//! classification.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ancestors, Cycle, Graph};
use crate::limits::Limits;
use crate::vset::VertexSet;

/// Edge-source masks used for closure computations.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ClosureData {
    preds: Vec<VertexSet>,
    regular: VertexSet,
}

impl ClosureData {
    fn new(g: &Graph) -> Self {
        ClosureData {
            preds: (0..g.vertex_count()).map(|v| g.sources_into(v)).collect(),
            regular: crate::graph::regular_vertices(g),
        }
    }

    fn close(&self, s: VertexSet) -> VertexSet {
        let mut h = s;
        loop {
            let mut next = h;
            for v in h.iter() {
                next = next.union(self.preds[v]);
            }
            for v in self.regular.difference(next).iter() {
                if self.preds[v].is_subset(next) {
                    next.insert(v);
                }
            }
            if next == h {
                return h;
            }
            h = next;
        }
    }

    fn is_hereditary(&self, h: VertexSet) -> bool {
        h.iter().all(|v| self.preds[v].is_subset(h))
    }

    fn is_saturated(&self, h: VertexSet) -> bool {
        self.regular.difference(h).iter().all(|v| !self.preds[v].is_subset(h))
    }
}

pub fn is_hereditary(g: &Graph, h: VertexSet) -> bool {
    ClosureData::new(g).is_hereditary(h)
}

pub fn is_saturated(g: &Graph, h: VertexSet) -> bool {
    ClosureData::new(g).is_saturated(h)
}

pub fn is_hereditary_saturated(g: &Graph, h: VertexSet) -> bool {
    let c = ClosureData::new(g);
    c.is_hereditary(h) && c.is_saturated(h)
}

/// `⟨S⟩`, the smallest hereditary saturated set containing `S`.
pub fn hs_closure(g: &Graph, s: VertexSet) -> VertexSet {
    ClosureData::new(g).close(s)
}

/// All hereditary saturated sets of a graph, ordered by size and then by
/// their sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    elements: Vec<VertexSet>,
    index: HashMap<VertexSet, usize>,
    closure: ClosureData,
    vertex_count: usize,
}

/// Enumerates the lattice by closing `{∅}` under joins with principal
/// sets `⟨v⟩`; every element is the join of the principal sets below it.
pub fn enumerate_lattice(g: &Graph, limits: &Limits) -> Result<IdealLattice> {
    let n = g.vertex_count();
    if n > limits.lattice_vertices {
        return Err(Error::TooLarge {
            what: "vertex count for lattice enumeration",
            size: n,
            limit: limits.lattice_vertices,
        });
    }
    let closure = ClosureData::new(g);
    let principal: Vec<VertexSet> = (0..n).map(|v| closure.close(VertexSet::singleton(v))).collect();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![VertexSet::EMPTY];
    seen.insert(VertexSet::EMPTY);
    while let Some(h) = stack.pop() {
        for (v, p) in principal.iter().enumerate() {
            if h.contains(v) {
                continue;
            }
            let j = closure.close(h.union(*p));
            if seen.insert(j) {
                stack.push(j);
            }
        }
    }
    let mut elements: Vec<VertexSet> = seen.into_iter().collect();
    elements.sort_by(|a, b| a.canonical_cmp(b));
    let index = elements.iter().enumerate().map(|(i, &h)| (h, i)).collect();
    Ok(IdealLattice {
        elements,
        index,
        closure,
        vertex_count: n,
    })
}

impl IdealLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[VertexSet] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> VertexSet {
        self.elements[i]
    }

    pub fn index_of(&self, h: VertexSet) -> Option<usize> {
        self.index.get(&h).copied()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.elements[i].is_subset(self.elements[j])
    }

    pub fn closure(&self, s: VertexSet) -> VertexSet {
        self.closure.close(s)
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        let h = self.closure.close(self.elements[i].union(self.elements[j]));
        self.index[&h]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[&self.elements[i].intersection(self.elements[j])]
    }

    /// Index of `⟨v⟩`.
    pub fn principal(&self, v: usize) -> usize {
        self.index[&self.closure.close(VertexSet::singleton(v))]
    }

    /// Index of `⟨S⟩`.
    pub fn generated(&self, s: VertexSet) -> usize {
        self.index[&self.closure.close(s)]
    }

    /// Pairs `(i, j)` where `j` covers `i`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if i == j || !self.leq(i, j) {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Lattice-prime elements: proper `H` such that `H1 ∧ H2 ≤ H` forces
    /// `H1 ≤ H` or `H2 ≤ H`.
    pub fn primes(&self) -> Vec<usize> {
        let n = self.len();
        (0..n)
            .filter(|&h| h != self.top())
            .filter(|&h| {
                (0..n).all(|a| self.leq(a, h) || (0..n).all(|b| self.leq(b, h) || !self.leq(self.meet(a, b), h)))
            })
            .collect()
    }

    /// Elements strictly above `i` that are minimal among those.
    pub fn upper_covers(&self, i: usize) -> Vec<usize> {
        self.covers()
            .into_iter()
            .filter(|&(a, _)| a == i)
            .map(|(_, b)| b)
            .collect()
    }

    pub fn down_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.leq(k, i)).collect()
    }

    pub fn up_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.leq(i, k)).collect()
    }

    /// Length of the longest chain from the bottom to `i`.
    pub fn height(&self, i: usize) -> usize {
        // elements are sorted by size, so strict predecessors come first
        let mut h = vec![0usize; self.len()];
        for j in 0..=i {
            h[j] = (0..j)
                .filter(|&k| self.leq(k, j) && k != j)
                .map(|k| h[k] + 1)
                .max()
                .unwrap_or(0);
        }
        h[i]
    }
}

/// Join-irreducible elements: nonzero `H` that are not the join of the
/// elements strictly below them.
pub fn join_irreducibles(l: &IdealLattice) -> Vec<usize> {
    (1..l.len())
        .filter(|&h| {
            let below = (0..l.len())
                .filter(|&k| k != h && l.leq(k, h))
                .fold(l.bottom(), |acc, k| l.join(acc, k));
            below != h
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    Af,
    PurelyInfiniteSimple,
    Circle,
}

impl TailKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TailKind::Af => "AF",
            TailKind::PurelyInfiniteSimple => "purely_infinite_simple",
            TailKind::Circle => "circle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalTail {
    pub members: VertexSet,
    /// `Ω(M) = V ∖ M`.
    pub omega: VertexSet,
    /// The unique lattice element covering `Ω(M)`.
    pub successor: VertexSet,
    pub kind: TailKind,
    pub tau_cycle: Option<Cycle>,
}

/// MT1–MT3.
pub fn is_maximal_tail(g: &Graph, m: VertexSet) -> bool {
    if m.is_empty() {
        return false;
    }
    let mt1 = (0..g.edge_count()).all(|e| !m.contains(g.src(e)) || m.contains(g.rng(e)));
    let mt2 = m
        .iter()
        .filter(|&v| g.is_regular(v))
        .all(|v| g.incoming(v).iter().any(|&e| m.contains(g.src(e))));
    if !(mt1 && mt2) {
        return false;
    }
    let anc: Vec<VertexSet> = m.iter().map(|v| ancestors(g, v).intersection(m)).collect();
    anc.iter().all(|a| anc.iter().all(|b| !a.intersection(*b).is_empty()))
}

/// Cycles of `G|_M` without entry in `G|_M`. On such a cycle every vertex
/// receives exactly one edge from inside `M`, so following the unique
/// incoming edge finds them all.
pub fn entryless_cycles(g: &Graph, m: VertexSet) -> Vec<Cycle> {
    let inner_in = |v: usize| -> Vec<usize> {
        g.incoming(v)
            .iter()
            .copied()
            .filter(|&e| m.contains(g.src(e)))
            .collect()
    };
    let mut out = Vec::new();
    let mut done = VertexSet::EMPTY;
    for start in m.iter() {
        if done.contains(start) {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        let mut visited = VertexSet::EMPTY;
        loop {
            let ins = inner_in(v);
            if ins.len() != 1 || visited.contains(v) {
                break;
            }
            visited.insert(v);
            path.push(ins[0]);
            v = g.src(ins[0]);
            if v == start {
                let mut edges: Vec<usize> = path.iter().rev().copied().collect();
                let k = edges
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &e)| e)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                edges.rotate_left(k);
                done = done.union(visited);
                out.push(Cycle {
                    edges,
                    has_entry: false,
                });
                break;
            }
        }
    }
    out.sort();
    out
}

fn has_cycle_within(g: &Graph, s: VertexSet) -> bool {
    // repeatedly strip vertices without incoming edges from inside `s`
    let mut rest = s;
    loop {
        let strip: Vec<usize> = rest
            .iter()
            .filter(|&v| !g.incoming(v).iter().any(|&e| rest.contains(g.src(e))))
            .collect();
        if strip.is_empty() {
            return !rest.is_empty();
        }
        for v in strip {
            rest.remove(v);
        }
    }
}

/// The unique minimal element strictly above a prime `H`:
/// `⋂_{u ∉ H} ⟨H ∪ {u}⟩`.
pub fn minimal_cover(l: &IdealLattice, h: VertexSet) -> Result<VertexSet> {
    let m = VertexSet::full(l.vertex_count()).difference(h);
    let mut h2 = VertexSet::full(l.vertex_count());
    for u in m.iter() {
        let mut s = h;
        s.insert(u);
        h2 = h2.intersection(l.closure(s));
    }
    let ok = h2 != h
        && l.index_of(h2).is_some()
        && l.elements()
            .iter()
            .all(|&k| !(h.is_subset(k) && k != h) || h2.is_subset(k));
    if !ok {
        return Err(Error::NotATail);
    }
    Ok(h2)
}

/// Full classification of a maximal tail. The kind is read off the
/// gauge-simple subquotient `S = H2 ∖ Ω(M)`: no cycle gives AF, a cycle
/// without entry in `G|_S` gives a circle, anything else is purely
/// infinite simple.
pub fn tail_info(g: &Graph, l: &IdealLattice, m: VertexSet) -> Result<MaximalTail> {
    if !is_maximal_tail(g, m) {
        return Err(Error::NotATail);
    }
    let omega = g.all_vertices().difference(m);
    if l.index_of(omega).is_none() {
        return Err(Error::NotATail);
    }
    let successor = minimal_cover(l, omega)?;
    let s = successor.difference(omega);
    let in_s = entryless_cycles(g, s);
    let in_m = entryless_cycles(g, m);
    let kind = if !has_cycle_within(g, s) {
        TailKind::Af
    } else if !in_s.is_empty() {
        TailKind::Circle
    } else {
        TailKind::PurelyInfiniteSimple
    };
    let tau_cycle = if kind == TailKind::Circle {
        if in_s.len() != 1 || in_m != in_s {
            return Err(Error::Internal(format!(
                "circle tail {:?} should carry exactly one cycle without entry",
                g.names(m)
            )));
        }
        Some(in_s[0].clone())
    } else {
        if !in_m.is_empty() {
            return Err(Error::Internal(format!(
                "tail {:?} has a cycle without entry but is not a circle",
                g.names(m)
            )));
        }
        None
    };
    Ok(MaximalTail {
        members: m,
        omega,
        successor,
        kind,
        tau_cycle,
    })
}

pub fn classify_tail(g: &Graph, l: &IdealLattice, m: VertexSet) -> Result<TailKind> {
    tail_info(g, l, m).map(|t| t.kind)
}

/// All maximal tails, as complements of the prime lattice elements, in
/// lattice order of their complements.
pub fn maximal_tails(g: &Graph, l: &IdealLattice) -> Result<Vec<MaximalTail>> {
    l.primes()
        .into_iter()
        .map(|h| tail_info(g, l, g.all_vertices().difference(l.element(h))))
        .collect()
}

/// `H2 = ⟨Ω(M) ∪ {v}⟩` for the least vertex `v` on the circle of `M`,
/// checked against the minimal cover of `Ω(M)`.
pub fn tau_successor(g: &Graph, l: &IdealLattice, tail: &MaximalTail) -> Result<VertexSet> {
    let cycle = match (&tail.kind, &tail.tau_cycle) {
        (TailKind::Circle, Some(c)) => c,
        _ => return Err(Error::NotCircle),
    };
    let v = cycle.vertex_set(g).min().expect("cycles are nonempty");
    let mut s = tail.omega;
    s.insert(v);
    let h2 = l.closure(s);
    if h2 != minimal_cover(l, tail.omega)? {
        return Err(Error::Internal(
            "circle successor differs from the minimal cover".into(),
        ));
    }
    Ok(h2)
}

/// Checks that `psi` (indices of `l` to indices of `l2`) is an order
/// isomorphism and extends it by `U ↦ ⋃{ψ(W) : W ⊆ U}`. For finite
/// lattices every element is compact, so the extension agrees with `psi`.
pub fn extend_order_iso(l: &IdealLattice, l2: &IdealLattice, psi: &[usize]) -> Result<Vec<usize>> {
    if psi.len() != l.len() || l.len() != l2.len() {
        return Err(Error::NotMonotone);
    }
    let mut hit = vec![false; l2.len()];
    for &p in psi {
        if p >= l2.len() || hit[p] {
            return Err(Error::NotMonotone);
        }
        hit[p] = true;
    }
    for a in 0..l.len() {
        for b in 0..l.len() {
            if l.leq(a, b) != l2.leq(psi[a], psi[b]) {
                return Err(Error::NotMonotone);
            }
        }
    }
    let ext: Vec<usize> = (0..l.len())
        .map(|u| {
            let set = (0..l.len())
                .filter(|&w| l.leq(w, u))
                .fold(VertexSet::EMPTY, |acc, w| acc.union(l2.element(psi[w])));
            l2.index_of(set).ok_or(())
        })
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Internal("extension left the lattice".into()))?;
    if ext != psi {
        return Err(Error::Internal("extension differs on compact elements".into()));
    }
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn remark() -> Graph {
        Graph::from_edges(
            &["1", "2", "3"],
            &[("a", "1", "1"), ("b", "2", "2"), ("c", "1", "3"), ("d", "2", "3")],
        )
        .unwrap()
    }

    fn set(g: &Graph, names: &[&str]) -> VertexSet {
        g.set_from_names(names).unwrap()
    }

    #[test]
    fn closure_examples() {
        let g = remark();
        assert_eq!(hs_closure(&g, set(&g, &["3"])), g.all_vertices());
        assert_eq!(hs_closure(&g, VertexSet::EMPTY), VertexSet::EMPTY);
        assert_eq!(hs_closure(&g, set(&g, &["1"])), set(&g, &["1"]));
    }

    #[test]
    fn remark_lattice() {
        let g = remark();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let names: Vec<Vec<String>> = l.elements().iter().map(|&h| g.names(h)).collect();
        assert_eq!(
            names,
            vec![
                vec![],
                vec!["1".to_string()],
                vec!["2".to_string()],
                vec!["1".to_string(), "2".to_string(), "3".to_string()]
            ]
        );
        let ji: Vec<VertexSet> = join_irreducibles(&l).iter().map(|&i| l.element(i)).collect();
        assert_eq!(ji, vec![set(&g, &["1"]), set(&g, &["2"])]);
    }

    #[test]
    fn small_lattices() {
        let lim = Limits::default();
        let g = Graph::from_edges(&["v"], &[("e", "v", "v")]).unwrap();
        assert_eq!(enumerate_lattice(&g, &lim).unwrap().len(), 2);
        // b → a: saturation forces a into {b}, so the lattice is {∅, V}
        let h = Graph::from_edges(&["a", "b"], &[("e", "b", "a")]).unwrap();
        let l = enumerate_lattice(&h, &lim).unwrap();
        assert_eq!(l.elements(), &[VertexSet::EMPTY, h.all_vertices()]);
        let c = Graph::from_edges(&["x", "y"], &[("e", "x", "y"), ("f", "y", "y")]).unwrap();
        let l = enumerate_lattice(&c, &lim).unwrap();
        assert_eq!(l.elements(), &[VertexSet::EMPTY, set(&c, &["x"]), c.all_vertices()]);
        assert_eq!(join_irreducibles(&l), vec![1, 2]);
        let e = Graph::from_edges(&[], &[]).unwrap();
        let le = enumerate_lattice(&e, &lim).unwrap();
        assert_eq!(le.len(), 1);
        assert!(join_irreducibles(&le).is_empty());
        let big = Limits {
            lattice_vertices: 0,
            ..Limits::default()
        };
        assert!(matches!(enumerate_lattice(&g, &big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn remark_tails_are_circles() {
        let g = remark();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let tails = maximal_tails(&g, &l).unwrap();
        let members: Vec<VertexSet> = tails.iter().map(|t| t.members).collect();
        assert_eq!(members.len(), 2);
        assert!(members.contains(&set(&g, &["2", "3"])));
        assert!(members.contains(&set(&g, &["1", "3"])));
        for t in &tails {
            assert_eq!(t.kind, TailKind::Circle);
            assert_eq!(tau_successor(&g, &l, t).unwrap(), g.all_vertices());
        }
    }

    #[test]
    fn two_loops_is_purely_infinite() {
        let g = Graph::from_edges(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let tails = maximal_tails(&g, &l).unwrap();
        assert_eq!(tails.len(), 1);
        assert_eq!(tails[0].kind, TailKind::PurelyInfiniteSimple);
        assert_eq!(tau_successor(&g, &l, &tails[0]), Err(Error::NotCircle));
    }

    #[test]
    fn chain_tail_is_af_and_single_loop_successor() {
        let g = Graph::from_edges(&["a", "b"], &[("e", "a", "b")]).unwrap();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        let tails = maximal_tails(&g, &l).unwrap();
        assert!(tails.iter().all(|t| t.kind == TailKind::Af));
        assert_eq!(classify_tail(&g, &l, set(&g, &["a"])), Err(Error::NotATail));
        let c = Graph::from_edges(&["v"], &[("e", "v", "v")]).unwrap();
        let lc = enumerate_lattice(&c, &Limits::default()).unwrap();
        let t = &maximal_tails(&c, &lc).unwrap()[0];
        assert_eq!(tau_successor(&c, &lc, t).unwrap(), c.all_vertices());
    }

    #[test]
    fn tail_classified_on_its_subquotient() {
        // x → y with a loop at y: the tail {x, y} sits over ∅ with
        // successor ⟨x⟩ = {x}, an AF subquotient, while {y} is the circle
        let g = Graph::from_edges(&["x", "y"], &[("e", "x", "y"), ("f", "y", "y")]).unwrap();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        assert_eq!(classify_tail(&g, &l, g.all_vertices()).unwrap(), TailKind::Af);
        assert_eq!(classify_tail(&g, &l, set(&g, &["y"])).unwrap(), TailKind::Circle);
    }

    #[test]
    fn order_iso_extension() {
        let g = remark();
        let l = enumerate_lattice(&g, &Limits::default()).unwrap();
        assert_eq!(extend_order_iso(&l, &l, &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(extend_order_iso(&l, &l, &[0, 2, 1, 3]).unwrap(), vec![0, 2, 1, 3]);
        assert_eq!(extend_order_iso(&l, &l, &[0, 3, 2, 1]), Err(Error::NotMonotone));
    }
}
