//! Finite directed multigraphs. An edge `e` runs from `s(e)` to `r(e)`.
//! Vertices and edges are indexed by the lexicographic order of their
//! identifiers.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

/// Unvalidated graph data, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDescription {
    pub vertices: Vec<String>,
    /// `(id, source, range)`
    pub edges: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_ids: Vec<String>,
    edge_ids: Vec<String>,
    src: Vec<usize>,
    rng: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

/// A closed path `e1 … ek` with `s(e_{i+1}) = r(e_i)` and `s(e1) = r(ek)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    pub edges: Vec<usize>,
    pub has_entry: bool,
}

impl Cycle {
    /// Source vertices `s(e1), …, s(ek)` in path order.
    pub fn vertices(&self, g: &Graph) -> Vec<usize> {
        self.edges.iter().map(|&e| g.src(e)).collect()
    }

    pub fn vertex_set(&self, g: &Graph) -> VertexSet {
        VertexSet::from_iter(self.vertices(g))
    }

    pub fn is_simple(&self, g: &Graph) -> bool {
        let vs = self.vertices(g);
        let set: BTreeSet<_> = vs.iter().collect();
        set.len() == vs.len()
    }
}

/// Checks a description and builds the indexed graph.
pub fn validate(desc: &GraphDescription) -> Result<Graph> {
    let mut seen = BTreeSet::new();
    for v in &desc.vertices {
        if !seen.insert(v.as_str()) {
            return Err(Error::DuplicateId(v.clone()));
        }
    }
    if desc.vertices.len() > MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "vertex count",
            size: desc.vertices.len(),
            limit: MAX_VERTICES,
        });
    }
    for (e, s, r) in &desc.edges {
        if !seen.insert(e.as_str()) {
            return Err(Error::DuplicateId(e.clone()));
        }
        for x in [s, r] {
            if !desc.vertices.contains(x) {
                return Err(Error::UnknownVertex(x.clone()));
            }
        }
    }
    let mut vertex_ids = desc.vertices.clone();
    vertex_ids.sort();
    let index: HashMap<String, usize> = vertex_ids.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let mut edges = desc.edges.clone();
    edges.sort();
    let n = vertex_ids.len();
    let mut g = Graph {
        vertex_ids,
        edge_ids: edges.iter().map(|e| e.0.clone()).collect(),
        src: edges.iter().map(|e| index[&e.1]).collect(),
        rng: edges.iter().map(|e| index[&e.2]).collect(),
        incoming: vec![Vec::new(); n],
        outgoing: vec![Vec::new(); n],
        index,
    };
    for e in 0..g.edge_count() {
        g.incoming[g.rng[e]].push(e);
        g.outgoing[g.src[e]].push(e);
    }
    Ok(g)
}

impl Graph {
    /// Convenience constructor for tests and generators.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph> {
        validate(&GraphDescription {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(e, s, r)| (e.to_string(), s.to_string(), r.to_string()))
                .collect(),
        })
    }

    pub fn description(&self) -> GraphDescription {
        GraphDescription {
            vertices: self.vertex_ids.clone(),
            edges: (0..self.edge_count())
                .map(|e| {
                    (
                        self.edge_ids[e].clone(),
                        self.vertex_ids[self.src[e]].clone(),
                        self.vertex_ids[self.rng[e]].clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn src(&self, e: usize) -> usize {
        self.src[e]
    }

    pub fn rng(&self, e: usize) -> usize {
        self.rng[e]
    }

    /// `E^v`: edges with range `v`, in identifier order.
    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn is_regular(&self, v: usize) -> bool {
        !self.incoming[v].is_empty()
    }

    /// Sources of the edges into `v`.
    pub fn sources_into(&self, v: usize) -> VertexSet {
        VertexSet::from_iter(self.incoming[v].iter().map(|&e| self.src[e]))
    }

    pub fn names(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.vertex_ids[v].clone()).collect()
    }

    pub fn set_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet> {
        let mut s = VertexSet::EMPTY;
        for n in names {
            s.insert(self.vertex_index(n.as_ref())?);
        }
        Ok(s)
    }

    /// Graph with every edge reversed.
    pub fn reversed(&self) -> Graph {
        let mut d = self.description();
        for e in &mut d.edges {
            std::mem::swap(&mut e.1, &mut e.2);
        }
        validate(&d).expect("reversal of a valid graph is valid")
    }

    /// Number of edges from `u` to `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.outgoing[u].iter().filter(|&&e| self.rng[e] == v).count()
    }

    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.incoming[v].len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &e in &self.outgoing[u] {
                let w = self.rng[e];
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen < n
    }

    /// Topological order (sources first), or `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.incoming[v].len()).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &e in &self.outgoing[u] {
                let w = self.rng[e];
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// `V_reg`: vertices receiving at least one edge.
pub fn regular_vertices(g: &Graph) -> VertexSet {
    VertexSet::from_iter((0..g.vertex_count()).filter(|&v| g.is_regular(v)))
}

/// Whether a (possibly empty) path runs from `w` to `v`.
pub fn reaches(g: &Graph, w: usize, v: usize) -> bool {
    descendants(g, w).contains(v)
}

/// All vertices reachable from `w`, including `w`.
pub fn descendants(g: &Graph, w: usize) -> VertexSet {
    let mut seen = VertexSet::singleton(w);
    let mut stack = vec![w];
    while let Some(u) = stack.pop() {
        for &e in g.outgoing(u) {
            let x = g.rng(e);
            if !seen.contains(x) {
                seen.insert(x);
                stack.push(x);
            }
        }
    }
    seen
}

/// All vertices from which `v` can be reached, including `v`.
pub fn ancestors(g: &Graph, v: usize) -> VertexSet {
    let mut seen = VertexSet::singleton(v);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &e in g.incoming(u) {
            let x = g.src(e);
            if !seen.contains(x) {
                seen.insert(x);
                stack.push(x);
            }
        }
    }
    seen
}

/// All simple cycles of the full subgraph on `m`, each rotated so that its
/// least edge comes first, sorted. Fails with `CycleOverflow` above `cap`.
pub fn simple_cycles_within(g: &Graph, m: VertexSet, cap: usize) -> Result<Vec<Cycle>> {
    let mut out = Vec::new();
    let flow = for_each_cycle(g, m, &mut |c| {
        if out.len() >= cap {
            return ControlFlow::Break(());
        }
        out.push(c);
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(Error::CycleOverflow(cap));
    }
    out.sort();
    Ok(out)
}

/// Counts simple cycles of `G|_M`, stopping once `limit` is reached.
pub fn count_simple_cycles_upto(g: &Graph, m: VertexSet, limit: usize) -> usize {
    let mut n = 0;
    let _ = for_each_cycle(g, m, &mut |_| {
        n += 1;
        if n >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    n
}

/// Simple cycles of `G|_M` that have no entry in `G|_M`.
pub fn cycles_without_entry(g: &Graph, m: VertexSet, cap: usize) -> Result<Vec<Cycle>> {
    Ok(simple_cycles_within(g, m, cap)?
        .into_iter()
        .filter(|c| !c.has_entry)
        .collect())
}

fn has_entry(g: &Graph, m: VertexSet, edges: &[usize]) -> bool {
    let on_cycle = VertexSet::from_iter(edges.iter().map(|&e| g.rng(e)));
    (0..g.edge_count())
        .any(|f| m.contains(g.src(f)) && m.contains(g.rng(f)) && on_cycle.contains(g.rng(f)) && !edges.contains(&f))
}

fn canonical_rotation(mut edges: Vec<usize>) -> Vec<usize> {
    let k = edges
        .iter()
        .enumerate()
        .min_by_key(|(_, &e)| e)
        .map(|(i, _)| i)
        .unwrap_or(0);
    edges.rotate_left(k);
    edges
}

/// Johnson's circuit enumeration on the vertex level, expanded over
/// parallel edges.
fn for_each_cycle(g: &Graph, m: VertexSet, f: &mut dyn FnMut(Cycle) -> ControlFlow<()>) -> ControlFlow<()> {
    let n = g.vertex_count();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            let mut s: Vec<usize> = if m.contains(u) {
                g.outgoing(u)
                    .iter()
                    .map(|&e| g.rng(e))
                    .filter(|&w| m.contains(w))
                    .collect()
            } else {
                Vec::new()
            };
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();

    struct State<'a> {
        g: &'a Graph,
        m: VertexSet,
        succ: &'a [Vec<usize>],
        start: usize,
        blocked: Vec<bool>,
        b: Vec<Vec<usize>>,
        stack: Vec<usize>,
    }

    fn unblock(st: &mut State, u: usize) {
        st.blocked[u] = false;
        let list = std::mem::take(&mut st.b[u]);
        for w in list {
            if st.blocked[w] {
                unblock(st, w);
            }
        }
    }

    fn emit(st: &State, f: &mut dyn FnMut(Cycle) -> ControlFlow<()>) -> ControlFlow<()> {
        // expand the vertex cycle over every choice of parallel edges
        let hops: Vec<Vec<usize>> = (0..st.stack.len())
            .map(|i| {
                let u = st.stack[i];
                let w = st.stack[(i + 1) % st.stack.len()];
                st.g.outgoing(u).iter().copied().filter(|&e| st.g.rng(e) == w).collect()
            })
            .collect();
        let mut pick = vec![0usize; hops.len()];
        loop {
            let edges: Vec<usize> = pick.iter().zip(&hops).map(|(&i, h)| h[i]).collect();
            let entry = has_entry(st.g, st.m, &edges);
            f(Cycle {
                edges: canonical_rotation(edges),
                has_entry: entry,
            })?;
            let mut i = 0;
            loop {
                if i == pick.len() {
                    return ControlFlow::Continue(());
                }
                pick[i] += 1;
                if pick[i] < hops[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    fn circuit(st: &mut State, v: usize, f: &mut dyn FnMut(Cycle) -> ControlFlow<()>) -> ControlFlow<(), bool> {
        let mut found = false;
        st.stack.push(v);
        st.blocked[v] = true;
        let succ = st.succ;
        for &w in &succ[v] {
            if w < st.start {
                continue;
            }
            if w == st.start {
                if emit(st, f).is_break() {
                    return ControlFlow::Break(());
                }
                found = true;
            } else if !st.blocked[w] && circuit(st, w, f)? {
                found = true;
            }
        }
        if found {
            unblock(st, v);
        } else {
            for &w in &succ[v] {
                if w >= st.start && !st.b[w].contains(&v) {
                    st.b[w].push(v);
                }
            }
        }
        st.stack.pop();
        ControlFlow::Continue(found)
    }

    for s in m.iter() {
        let mut st = State {
            g,
            m,
            succ: &succ,
            start: s,
            blocked: vec![false; n],
            b: vec![Vec::new(); n],
            stack: Vec::new(),
        };
        if circuit(&mut st, s, f).is_break() {
            return ControlFlow::Break(());
        }
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn remark() -> Graph {
        Graph::from_edges(
            &["1", "2", "3"],
            &[("a", "1", "1"), ("b", "2", "2"), ("c", "1", "3"), ("d", "2", "3")],
        )
        .unwrap()
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Graph::from_edges(&["a"], &[("e", "a", "x")]),
            Err(Error::UnknownVertex("x".into()))
        );
        assert_eq!(Graph::from_edges(&["a", "a"], &[]), Err(Error::DuplicateId("a".into())));
        assert_eq!(
            Graph::from_edges(&["a"], &[("a", "a", "a")]),
            Err(Error::DuplicateId("a".into()))
        );
        let empty = Graph::from_edges(&[], &[]).unwrap();
        assert_eq!(empty.vertex_count(), 0);
        assert!(regular_vertices(&empty).is_empty());
    }

    #[test]
    fn regular_vertices_examples() {
        let g = remark();
        assert_eq!(regular_vertices(&g), g.all_vertices());
        let h = Graph::from_edges(&["a", "b"], &[("e", "b", "a")]).unwrap();
        assert_eq!(regular_vertices(&h), VertexSet::singleton(0));
    }

    #[test]
    fn reachability() {
        let g = remark();
        assert!(reaches(&g, 1, 2));
        assert!(!reaches(&g, 2, 0));
        assert!(reaches(&g, 2, 2));
    }

    #[test]
    fn cycles_in_remark_graph() {
        let g = remark();
        let m = g.set_from_names(&["2", "3"]).unwrap();
        let cs = simple_cycles_within(&g, m, 100).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].edges, vec![1]);
        assert!(!cs[0].has_entry);
    }

    #[test]
    fn parallel_loops_enter_each_other() {
        let g = Graph::from_edges(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap();
        let cs = simple_cycles_within(&g, g.all_vertices(), 100).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.has_entry));
    }

    #[test]
    fn acyclic_has_no_cycles() {
        let g = Graph::from_edges(&["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c")]).unwrap();
        assert!(simple_cycles_within(&g, g.all_vertices(), 10).unwrap().is_empty());
        assert!(!g.has_cycle());
    }

    #[test]
    fn rotation_and_overflow() {
        let g = Graph::from_edges(&["a", "b"], &[("z", "a", "b"), ("y", "b", "a"), ("x", "b", "a")]).unwrap();
        let cs = simple_cycles_within(&g, g.all_vertices(), 10).unwrap();
        assert_eq!(cs.len(), 2);
        for c in &cs {
            assert_eq!(c.edges[0], *c.edges.iter().min().unwrap());
            assert!(c.is_simple(&g));
        }
        assert_eq!(
            simple_cycles_within(&g, g.all_vertices(), 1),
            Err(Error::CycleOverflow(1))
        );
        assert_eq!(count_simple_cycles_upto(&g, g.all_vertices(), 1), 1);
    }
}
