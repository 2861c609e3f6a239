//! Invariant bundles, isomorphism search between the invariants of two
//! graphs, and classification verdicts.
//!
//! The invariant of `C*(G)` is the ideal lattice `𝕀_p(G)` together with the
//! diagrams `K0⁺(C*(G), 𝕀_p)` and `K1(C*(G), 𝕀_p)`. Isomorphic invariants
//! plus a vanishing obstruction class in `Ext²(G, K1)` give a stable
//! homotopy equivalence, and a stable isomorphism in the purely infinite
//! case.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cone::{cone_is_group, cone_member, ConeAnswer};
use crate::diagrams::{
    cochain_complex, ext_groups, hom_diagram, hom_free_diagram, k_diagrams, pullback_diagram, represents_zero_ext2,
    CochainComplex, DiagramMorphism, ExtGroups, GroupDiagram, KDiagrams,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{GroupHom, GroupType};
use crate::intmat::{solve, IntMatrix};
use crate::ktheory::{k_groups, subquotient_k};
use crate::lattice::{
    enumerate_lattice, extend_order_iso, hs_closure, maximal_tails, IdealLattice, MaximalTail, TailKind,
};
use crate::limits::Limits;
use crate::vset::VertexSet;

/// Everything needed to compare `G` with another graph.
#[derive(Debug, Clone)]
pub struct InvariantBundle {
    pub graph: Graph,
    pub lattice: IdealLattice,
    pub k: KDiagrams,
    pub tails: Vec<MaximalTail>,
    pub tail_checks: Vec<TailCrosscheck>,
    /// The complex for `Y = K1(C*(G), 𝕀_p)`.
    pub complex: CochainComplex,
    pub ext_self: ExtGroups,
}

impl InvariantBundle {
    /// All maximal tails have purely infinite simple subquotients.
    pub fn pi_proxy(&self) -> bool {
        self.tails.iter().all(|t| t.kind == TailKind::PurelyInfiniteSimple)
    }

    pub fn has_circle_tails(&self) -> bool {
        self.tails.iter().any(|t| t.kind == TailKind::Circle)
    }

    /// The tail whose complement is the lattice element `h`, if any.
    pub fn tail_with_omega(&self, h: VertexSet) -> Option<&MaximalTail> {
        self.tails.iter().find(|t| t.omega == h)
    }
}

pub fn invariant_bundle(g: &Graph, limits: &Limits) -> Result<InvariantBundle> {
    let lattice = enumerate_lattice(g, limits)?;
    let k = k_diagrams(g, &lattice)?;
    let tails = maximal_tails(g, &lattice)?;
    let tail_checks = tails
        .iter()
        .map(|t| ktheory_tail_crosscheck(g, t))
        .collect::<Result<Vec<_>>>()?;
    let complex = cochain_complex(g, &lattice, &k.k1)?;
    let ext_self = ext_groups(&complex);
    Ok(InvariantBundle {
        graph: g.clone(),
        lattice,
        k,
        tails,
        tail_checks,
        complex,
        ext_self,
    })
}

/// K-theoretic reading of a tail, from the inclusion `Ω(M) ⊂ H2` of the
/// complement into its unique cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCrosscheck {
    pub members: VertexSet,
    pub kind: TailKind,
    pub k_kind: TailKind,
    pub i0_injective: bool,
    pub i1_surjective: bool,
    /// The image of `K0⁺(H2)` in `K0` of the subquotient is a group.
    pub cone_is_group: bool,
    pub k0_sub: GroupType,
    pub ker_i0: GroupType,
    pub coker_i1: GroupType,
}

/// Reads the tail kind off the K-theory of `Ω(M) ⊂ H2`: the positive cone
/// of the subquotient is a group exactly in the purely infinite case;
/// otherwise `i0` injective and `i1` surjective means AF, and the remaining
/// case is the circle, where `K0 = ℤ` and `K1 = ℤ` for the subquotient.
pub fn ktheory_tail_crosscheck(g: &Graph, tail: &MaximalTail) -> Result<TailCrosscheck> {
    let h = k_groups(g, tail.omega)?;
    let h2 = k_groups(g, tail.successor)?;
    let sq = subquotient_k(&h, &h2)?;
    let i0_injective = sq.i0.is_injective();
    let i1_surjective = sq.i1.is_surjective();
    let group = cone_is_group(&sq.k0);
    let k_kind = if group {
        TailKind::PurelyInfiniteSimple
    } else if i0_injective && i1_surjective {
        TailKind::Af
    } else {
        TailKind::Circle
    };
    let report = TailCrosscheck {
        members: tail.members,
        kind: tail.kind,
        k_kind,
        i0_injective,
        i1_surjective,
        cone_is_group: group,
        k0_sub: sq.k0.group_type(),
        ker_i0: sq.ker_i0.group_type(),
        coker_i1: sq.coker_i1.group_type(),
    };
    let fail = |detail: String| Error::InconsistentClassifiers {
        tail: format!("{:?}", g.names(tail.members)),
        detail,
    };
    if k_kind != tail.kind {
        return Err(fail(format!(
            "graph says {}, K-theory says {}",
            tail.kind.as_str(),
            k_kind.as_str()
        )));
    }
    if tail.kind == TailKind::Circle {
        let z = GroupType {
            free_rank: 1,
            torsion: vec![],
        };
        if report.k0_sub != z
            || !report.coker_i1.torsion.is_empty()
            || report.ker_i0.free_rank + report.coker_i1.free_rank != 1
        {
            return Err(fail(format!(
                "circle pattern violated: coker i0 = {}, ker i0 = {}, coker i1 = {}",
                report.k0_sub, report.ker_i0, report.coker_i1
            )));
        }
    }
    Ok(report)
}

/// Relabelling-invariant data of a lattice element: height, down-set size,
/// up-set size and number of upper covers.
pub fn order_signature(l: &IdealLattice, i: usize) -> (usize, usize, usize, usize) {
    let down = l.down_set(i).len();
    let up = l.up_set(i).len();
    (l.height(i), down, up, l.upper_covers(i).len())
}

/// Calls `visit` on every order isomorphism `L → L'` (as an index map)
/// until it returns `false`. Returns whether the enumeration finished.
pub fn for_each_lattice_iso(l: &IdealLattice, l2: &IdealLattice, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if l.len() != l2.len() {
        return true;
    }
    let sig1: Vec<_> = (0..l.len()).map(|i| order_signature(l, i)).collect();
    let sig2: Vec<_> = (0..l2.len()).map(|i| order_signature(l2, i)).collect();
    let mut psi = vec![usize::MAX; l.len()];
    let mut used = vec![false; l2.len()];
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        l: &IdealLattice,
        l2: &IdealLattice,
        sig1: &[(usize, usize, usize, usize)],
        sig2: &[(usize, usize, usize, usize)],
        psi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == l.len() {
            return visit(psi);
        }
        for j in 0..l2.len() {
            if used[j] || sig1[i] != sig2[j] {
                continue;
            }
            let ok = (0..i).all(|a| l.leq(a, i) == l2.leq(psi[a], j) && l.leq(i, a) == l2.leq(j, psi[a]));
            if !ok {
                continue;
            }
            psi[i] = j;
            used[j] = true;
            let cont = go(i + 1, l, l2, sig1, sig2, psi, used, visit);
            used[j] = false;
            if !cont {
                return false;
            }
        }
        true
    }
    go(0, l, l2, &sig1, &sig2, &mut psi, &mut used, visit)
}

pub fn find_lattice_isos(l: &IdealLattice, l2: &IdealLattice, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut over = false;
    for_each_lattice_iso(l, l2, &mut |psi| {
        if out.len() == cap {
            over = true;
            return false;
        }
        out.push(psi.to_vec());
        true
    });
    if over {
        return Err(Error::CapExceeded {
            what: "lattice isomorphisms",
            cap,
        });
    }
    Ok(out)
}

/// A vertex bijection `σ` with `#edges(u → w) = #edges(σu → σw)`.
pub fn graph_isomorphism(g: &Graph, g2: &Graph, node_cap: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n != g2.vertex_count() || g.edge_count() != g2.edge_count() {
        return None;
    }
    let sig = |g: &Graph, v: usize| (g.incoming(v).len(), g.outgoing(v).len(), g.multiplicity(v, v));
    let s1: Vec<_> = (0..n).map(|v| sig(g, v)).collect();
    let s2: Vec<_> = (0..n).map(|v| sig(g2, v)).collect();
    let mut sorted1 = s1.clone();
    let mut sorted2 = s2.clone();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return None;
    }
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut nodes = 0usize;
    #[allow(clippy::too_many_arguments)]
    fn go(
        v: usize,
        g: &Graph,
        g2: &Graph,
        s1: &[(usize, usize, usize)],
        s2: &[(usize, usize, usize)],
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
        nodes: &mut usize,
        cap: usize,
    ) -> bool {
        if v == sigma.len() {
            return true;
        }
        for w in 0..sigma.len() {
            *nodes += 1;
            if *nodes > cap {
                return false;
            }
            if used[w] || s1[v] != s2[w] {
                continue;
            }
            let ok = (0..v).all(|u| {
                g.multiplicity(u, v) == g2.multiplicity(sigma[u], w)
                    && g.multiplicity(v, u) == g2.multiplicity(w, sigma[u])
            });
            if !ok {
                continue;
            }
            sigma[v] = w;
            used[w] = true;
            if go(v + 1, g, g2, s1, s2, sigma, used, nodes, cap) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    go(0, g, g2, &s1, &s2, &mut sigma, &mut used, &mut nodes, node_cap).then_some(sigma)
}

fn map_set(sigma: &[usize], w: VertexSet) -> VertexSet {
    VertexSet::from_iter(w.iter().map(|v| sigma[v]))
}

/// The invariant isomorphism induced by a graph isomorphism `σ`.
pub fn isos_from_graph_iso(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    sigma: &[usize],
) -> Result<(Vec<usize>, DiagramMorphism, DiagramMorphism)> {
    let l = &b.lattice;
    let psi: Vec<usize> = l
        .elements()
        .iter()
        .map(|&w| {
            b2.lattice
                .index_of(map_set(sigma, w))
                .ok_or_else(|| Error::Internal("graph isomorphism does not preserve the lattice".into()))
        })
        .collect::<Result<_>>()?;
    let mut c0 = Vec::new();
    let mut c1 = Vec::new();
    for (i, d) in b.k.data.iter().enumerate() {
        let d2 = &b2.k.data[psi[i]];
        let mut p0 = IntMatrix::zeros(d2.verts.len(), d.verts.len());
        for (j, &v) in d.verts.iter().enumerate() {
            p0[(d2.position(sigma[v]).expect("mapped vertex"), j)] = BigInt::one();
        }
        c0.push(p0);
        let mut cols = Vec::new();
        for j in 0..d.k1_rank() {
            let mut x = vec![BigInt::zero(); d2.regs.len()];
            for (p, &v) in d.regs.iter().enumerate() {
                x[d2.reg_position(sigma[v]).expect("regular image")] = d.k1_basis[(p, j)].clone();
            }
            cols.push(solve(&d2.k1_basis, &x).ok_or_else(|| Error::Internal("K1 basis not preserved".into()))?);
        }
        c1.push(IntMatrix::from_columns(d2.k1_rank(), &cols));
    }
    Ok((
        psi,
        DiagramMorphism { components: c0 },
        DiagramMorphism { components: c1 },
    ))
}

/// Result of a search for diagram isomorphisms under a fixed `ψ`.
#[derive(Debug, Clone, Default)]
pub struct IsoSearch {
    pub found: Vec<DiagramMorphism>,
    /// Group isomorphisms of the nodes whose inverse could not be shown to
    /// preserve the positive cones within the search bound.
    pub unconfirmed: Vec<DiagramMorphism>,
    /// `found` lists every isomorphism.
    pub complete: bool,
    /// Why the search space was empty from the start, if it was.
    pub obstruction: Option<String>,
}

impl IsoSearch {
    fn impossible(reason: String) -> Self {
        IsoSearch {
            complete: true,
            obstruction: Some(reason),
            ..Default::default()
        }
    }

    /// Proves that no isomorphism exists.
    pub fn proves_none(&self) -> bool {
        self.complete && self.found.is_empty() && self.unconfirmed.is_empty()
    }
}

fn node_types_match(b: &InvariantBundle, b2: &InvariantBundle, psi: &[usize], degree: u8) -> Option<String> {
    let (d1, d2) = if degree == 0 {
        (&b.k.k0, &b2.k.k0)
    } else {
        (&b.k.k1, &b2.k.k1)
    };
    for (i, &p) in psi.iter().enumerate() {
        let (t1, t2) = (d1.groups[i].group_type(), d2.groups[p].group_type());
        if t1 != t2 {
            return Some(format!(
                "K{degree} at {:?} is {t1} but at {:?} is {t2}",
                b.graph.names(b.lattice.element(i)),
                b2.graph.names(b2.lattice.element(p)),
            ));
        }
    }
    None
}

/// Searches for isomorphisms `K_degree(C*(G), 𝕀_p) → ψ*K_degree(C*(G'), 𝕀_p)`,
/// keeping at most `max` of them. In degree 0 the isomorphism must map
/// positive cones onto positive cones.
pub fn find_diagram_isos(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    psi: &[usize],
    degree: u8,
    max: usize,
    limits: &Limits,
) -> Result<IsoSearch> {
    extend_order_iso(&b.lattice, &b2.lattice, psi)?;
    if let Some(reason) = node_types_match(b, b2, psi, degree) {
        return Ok(IsoSearch::impossible(reason));
    }
    if degree == 0 {
        degree0_isos(b, b2, psi, max, limits)
    } else {
        degree1_isos(b, b2, psi, max, limits)
    }
}

fn is_unimodular_component(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && (m.rows() == 0 || m.determinant().abs().is_one())
}

fn degree1_isos(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    psi: &[usize],
    max: usize,
    limits: &Limits,
) -> Result<IsoSearch> {
    let y = pullback_diagram(b.lattice.elements(), psi, &b2.k.k1)?;
    let hom = hom_diagram(&b.k.k1, &y)?;
    let k = hom.hom.inclusion.cols();
    let mut out = IsoSearch::default();
    if k == 0 {
        let zero = DiagramMorphism::zero(&b.k.k1, &y);
        if zero.components.iter().all(is_unimodular_component) {
            out.found.push(zero);
        }
        out.complete = true;
        return Ok(out);
    }
    let bound = limits.iso_coeff as i64;
    let mut examined = 0usize;
    let mut coeffs = vec![0i64; k];
    'outer: for total in 1..=(bound as usize * k) {
        let mut stop = false;
        enumerate_signed(total as i64, bound, 0, &mut coeffs, &mut |c| {
            examined += 1;
            if examined > limits.diagram_candidates {
                stop = true;
                return false;
            }
            let z: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let m = hom.morphism(&z);
            if m.components.iter().all(is_unimodular_component) {
                out.found.push(m);
                if out.found.len() >= max {
                    stop = true;
                    return false;
                }
            }
            true
        });
        if stop {
            break 'outer;
        }
    }
    Ok(out)
}

/// Visits integer vectors with entries in `[-bound, bound]` and ℓ1 norm
/// `total`, in lexicographic order. Stops when `visit` returns `false`.
fn enumerate_signed(total: i64, bound: i64, i: usize, c: &mut [i64], visit: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    if i == c.len() {
        return total != 0 || visit(c);
    }
    let rest = bound * (c.len() - i - 1) as i64;
    for x in -bound.min(total)..=bound.min(total) {
        let left = total - x.abs();
        if left > rest {
            continue;
        }
        c[i] = x;
        if !enumerate_signed(left, bound, i + 1, c, visit) {
            return false;
        }
    }
    c[i] = 0;
    true
}

/// Candidate images `[p_v] ↦ y_v`: classes in `K0(ψ⟨v⟩)` of elements of
/// `ℕ[ψ⟨v⟩]` whose support generates `ψ⟨v⟩`. Returns whether the list is
/// exhaustive.
fn degree0_candidates(b2: &InvariantBundle, node: usize, limits: &Limits) -> (Vec<Vec<BigInt>>, bool) {
    let d = &b2.k.data[node];
    let w = b2.lattice.element(node);
    if d.k0.free_rank() == 0 {
        if let Some(all) = d.k0.finite_elements(limits.diagram_candidates) {
            return (all, true);
        }
    }
    let bound = limits.iso_coeff as u64;
    let m = d.verts.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut c = vec![0u64; m];
    let mut count = 0usize;
    loop {
        // odometer over [0, bound]^m
        let mut i = 0;
        while i < m && c[i] == bound {
            c[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
        c[i] += 1;
        count += 1;
        if count > limits.diagram_candidates {
            break;
        }
        let supp = VertexSet::from_iter(d.verts.iter().zip(&c).filter(|(_, &x)| x > 0).map(|(&v, _)| v));
        if hs_closure(&b2.graph, supp) != w {
            continue;
        }
        let x: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        if seen.insert(d.k0.coords(&x)) {
            out.push(x);
        }
    }
    (out, false)
}

fn degree0_isos(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    psi: &[usize],
    max: usize,
    limits: &Limits,
) -> Result<IsoSearch> {
    let g = &b.graph;
    let l = &b.lattice;
    let n = g.vertex_count();
    let y = pullback_diagram(l.elements(), psi, &b2.k.k0)?;
    let free = hom_free_diagram(l, g.all_vertices(), &y)?;
    let mut complete = true;
    let mut cands = Vec::with_capacity(n);
    for v in 0..n {
        let (c, exhaustive) = degree0_candidates(b2, psi[l.principal(v)], limits);
        complete &= exhaustive;
        cands.push(c);
    }
    // relation at regular w is checked once w and all its sources are set
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for w in (0..n).filter(|&w| g.is_regular(w)) {
        let last = g
            .incoming(w)
            .iter()
            .map(|&e| g.src(e))
            .chain([w])
            .max()
            .expect("nonempty");
        checks[last].push(w);
    }
    let relation_holds = |fam: &[Vec<BigInt>], w: usize| -> bool {
        let node = l.principal(w);
        let mut acc = fam[w].clone();
        for &e in g.incoming(w) {
            let s = g.src(e);
            let img = y.map(l.principal(s), node).apply(&fam[s]);
            for (a, b) in acc.iter_mut().zip(img) {
                *a -= b;
            }
        }
        y.groups[node].is_zero(&acc)
    };
    let mut out = IsoSearch::default();
    let mut fam: Vec<Vec<BigInt>> = vec![Vec::new(); n];
    let mut nodes = 0usize;
    let mut capped = false;
    let mut stack: Vec<usize> = vec![0; n + 1];
    // iterative backtracking over candidate indices
    let mut v = 0usize;
    loop {
        if v == n {
            let flat: Vec<BigInt> = fam.iter().flatten().cloned().collect();
            let m = free.family_to_morphism(&y, g.all_vertices(), &flat);
            match check_degree0_iso(b, &y, &m, limits) {
                Some(true) => out.found.push(m),
                Some(false) => out.unconfirmed.push(m),
                None => {}
            }
            if out.found.len() >= max {
                complete = false;
                break;
            }
            if v == 0 {
                break;
            }
            v -= 1;
            continue;
        }
        if stack[v] >= cands[v].len() {
            stack[v] = 0;
            if v == 0 {
                break;
            }
            v -= 1;
            continue;
        }
        nodes += 1;
        if nodes > limits.search_nodes {
            capped = true;
            break;
        }
        fam[v] = cands[v][stack[v]].clone();
        stack[v] += 1;
        if checks[v].iter().all(|&w| relation_holds(&fam, w)) {
            v += 1;
        }
    }
    out.complete = complete && !capped;
    Ok(out)
}

/// `Some(true)` for a confirmed isomorphism of positive cones, `Some(false)`
/// if only the cone preservation of the inverse is undecided, `None` if it
/// is not an isomorphism.
fn check_degree0_iso(b: &InvariantBundle, y: &GroupDiagram, m: &DiagramMorphism, limits: &Limits) -> Option<bool> {
    let mut confirmed = true;
    for (i, d) in b.k.data.iter().enumerate() {
        let comp = GroupHom::new(d.k0.clone(), y.groups[i].clone(), m.components[i].clone());
        if !comp.is_well_defined() {
            return None;
        }
        let inv = comp.inverse()?;
        for j in 0..inv.matrix.cols() {
            match cone_member(&d.k0, &inv.matrix.column(j), limits.cone_bound, limits.cone_search_cap) {
                ConeAnswer::Yes(_) => {}
                ConeAnswer::No(_) => return None,
                ConeAnswer::Unknown(_) => confirmed = false,
            }
        }
    }
    Some(confirmed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauMatch {
    pub matched: bool,
    /// A tail of `G` whose image has a different kind or is not a tail.
    pub offending: Option<VertexSet>,
}

/// Whether `ψ` carries each tail of `G` (through its complement, a prime
/// element) to a tail of `G'` of the same kind.
pub fn tau_matching(b: &InvariantBundle, b2: &InvariantBundle, psi: &[usize]) -> Result<TauMatch> {
    let full = extend_order_iso(&b.lattice, &b2.lattice, psi)?;
    for t in &b.tails {
        let h = b
            .lattice
            .index_of(t.omega)
            .expect("complement of a tail is in the lattice");
        let image = b2.lattice.element(full[h]);
        let ok = b2.tail_with_omega(image).is_some_and(|t2| t2.kind == t.kind);
        if !ok {
            return Ok(TauMatch {
                matched: false,
                offending: Some(t.members),
            });
        }
    }
    if b.tails.len() != b2.tails.len() {
        return Ok(TauMatch {
            matched: false,
            offending: None,
        });
    }
    Ok(TauMatch {
        matched: true,
        offending: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    InvariantsDiffer,
    /// Search caps were reached before either an isomorphism or a proof of
    /// non-isomorphism was found.
    Undetermined,
    /// Invariants are isomorphic but a supplied obstruction class is
    /// nonzero for the chosen pair of isomorphisms.
    InvariantsIsomorphicObstructionUnresolved,
    HomotopyEquivalentIfObstructionVanishes,
    StablyIsomorphicIfObstructionVanishes,
    HomotopyEquivalent,
    StablyIsomorphic,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::InvariantsDiffer => "invariants_differ",
            Conclusion::Undetermined => "undetermined",
            Conclusion::InvariantsIsomorphicObstructionUnresolved => "invariants_isomorphic_obstruction_unresolved",
            Conclusion::HomotopyEquivalentIfObstructionVanishes => "homotopy_equivalent_if_obstruction_vanishes",
            Conclusion::StablyIsomorphicIfObstructionVanishes => "stably_isomorphic_if_obstruction_vanishes",
            Conclusion::HomotopyEquivalent => "homotopy_equivalent",
            Conclusion::StablyIsomorphic => "stably_isomorphic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// `Ext²(G, K1(G)) = 0` or `Ext²(G', K1(G')) = 0`, so every pair lifts.
    ExtVanishes,
    /// The invariants come from a graph isomorphism, whose `*`-isomorphism
    /// is a lift with zero obstruction.
    GraphIsomorphism,
    /// A supplied difference morphism `η` equals `d1(β)`.
    SuppliedZero(Vec<BigInt>),
    SuppliedNonzero,
    Unresolved,
}

/// A user-supplied obstruction representative for the pair found under `psi`.
#[derive(Debug, Clone)]
pub struct SuppliedObstruction {
    pub psi: Vec<usize>,
    pub eta: DiagramMorphism,
}

#[derive(Debug, Clone)]
pub struct PsiOutcome {
    pub psi: Vec<usize>,
    pub tau: TauMatch,
    pub degree0: Option<IsoSearch>,
    pub degree1: Option<IsoSearch>,
    /// Proof that no invariant isomorphism lies over this `ψ`.
    pub rejected: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub conclusion: Conclusion,
    pub outcomes: Vec<PsiOutcome>,
    /// Every lattice isomorphism was examined.
    pub lattice_search_complete: bool,
    pub graph_isomorphism: Option<Vec<usize>>,
    /// The `ψ`, `φ0` and `φ1` witnessing isomorphic invariants.
    pub witness: Option<(Vec<usize>, DiagramMorphism, DiagramMorphism)>,
    pub tau_matched: bool,
    pub pi_proxy: (bool, bool),
    pub ext2: (GroupType, GroupType),
    pub obstruction: Option<Obstruction>,
    pub reason: String,
    pub notes: Vec<String>,
    /// The comparison was decided from `G'` to `G`.
    pub reversed: bool,
}

impl Verdict {
    pub fn psi_found(&self) -> Vec<Vec<usize>> {
        self.outcomes.iter().map(|o| o.psi.clone()).collect()
    }
}

/// Textual form of the hypotheses behind each conclusion.
pub const PI_PROXY_NOTE: &str = "pi_proxy: every maximal tail has a purely infinite simple gauge-simple subquotient";
const STABLE_NOTE: &str = "purely infinite graph algebras with isomorphic ideal lattices and isomorphic K0/K1 diagrams over them are stably isomorphic once the obstruction class in Ext^2(G, K1) vanishes";
const HOMOTOPY_NOTE: &str = "isomorphic invariants with vanishing obstruction class give a stable homotopy equivalence inducing them; the homotopies preserve gauge-invariant ideals";
const CIRCLE_NOTE: &str = "circle tails present: the correspondence can be chosen to induce Morita-Rieffel equivalences between matching circle subquotients";
const OBSTRUCTION_NOTE: &str = "the obstruction class depends on the K1 action of a lift, which is not computed; it vanishes automatically when Ext^2 = 0";

pub fn compare_verdict(g: &Graph, g2: &Graph, limits: &Limits) -> Result<Verdict> {
    compare_verdict_with(g, g2, limits, None)
}

pub fn compare_verdict_with(
    g: &Graph,
    g2: &Graph,
    limits: &Limits,
    supplied: Option<&SuppliedObstruction>,
) -> Result<Verdict> {
    let b = invariant_bundle(g, limits)?;
    let b2 = invariant_bundle(g2, limits)?;
    compare_bundles(&b, &b2, limits, supplied)
}

pub fn compare_bundles(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    limits: &Limits,
    supplied: Option<&SuppliedObstruction>,
) -> Result<Verdict> {
    let forward = one_direction(b, b2, limits, supplied)?;
    if forward.conclusion != Conclusion::Undetermined {
        return Ok(forward);
    }
    let mut back = one_direction(b2, b, limits, None)?;
    if back.conclusion == Conclusion::Undetermined {
        return Ok(forward);
    }
    back.reversed = true;
    back.pi_proxy = (back.pi_proxy.1, back.pi_proxy.0);
    back.ext2 = (back.ext2.1.clone(), back.ext2.0.clone());
    Ok(back)
}

fn one_direction(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    limits: &Limits,
    supplied: Option<&SuppliedObstruction>,
) -> Result<Verdict> {
    let pi_proxy = (b.pi_proxy(), b2.pi_proxy());
    let ext2 = (b.ext_self.ext2.group_type(), b2.ext_self.ext2.group_type());
    let mut v = Verdict {
        conclusion: Conclusion::InvariantsDiffer,
        outcomes: Vec::new(),
        lattice_search_complete: true,
        graph_isomorphism: None,
        witness: None,
        tau_matched: false,
        pi_proxy,
        ext2,
        obstruction: None,
        reason: String::new(),
        notes: vec![PI_PROXY_NOTE.to_string()],
        reversed: false,
    };
    if b.lattice.len() != b2.lattice.len() {
        v.reason = format!(
            "ideal lattices have {} and {} elements",
            b.lattice.len(),
            b2.lattice.len()
        );
        return Ok(v);
    }
    if let Some(sigma) = graph_isomorphism(&b.graph, &b2.graph, limits.search_nodes) {
        let (psi, phi0, phi1) = isos_from_graph_iso(b, b2, &sigma)?;
        let tau = tau_matching(b, b2, &psi)?;
        if !tau.matched {
            return Err(Error::Internal("graph isomorphism does not match tails".into()));
        }
        v.tau_matched = true;
        v.graph_isomorphism = Some(sigma);
        v.outcomes.push(PsiOutcome {
            psi: psi.clone(),
            tau,
            degree0: None,
            degree1: None,
            rejected: None,
        });
        v.witness = Some((psi, phi0, phi1));
        v.reason = "the graphs are isomorphic".into();
        return finish_isomorphic(b, b2, v, Some(Obstruction::GraphIsomorphism), supplied);
    }

    let mut undecided = false;
    let mut error = None;
    let mut seen = 0usize;
    let complete = for_each_lattice_iso(&b.lattice, &b2.lattice, &mut |psi| {
        seen += 1;
        if seen > limits.lattice_isos {
            return false;
        }
        match examine_psi(b, b2, psi, limits) {
            Ok((outcome, witness)) => {
                if outcome.rejected.is_none() && witness.is_none() {
                    undecided = true;
                }
                v.outcomes.push(outcome);
                if let Some(w) = witness {
                    v.witness = Some(w);
                    return false;
                }
                true
            }
            Err(e) => {
                error = Some(e);
                false
            }
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    v.lattice_search_complete = complete && seen <= limits.lattice_isos;
    if v.witness.is_some() {
        v.tau_matched = true;
        v.reason = "isomorphic invariants found".into();
        return finish_isomorphic(b, b2, v, None, supplied);
    }
    if v.outcomes.is_empty() && v.lattice_search_complete {
        v.reason = "ideal lattices are not order isomorphic".into();
        return Ok(v);
    }
    if undecided || !v.lattice_search_complete {
        v.conclusion = Conclusion::Undetermined;
        v.reason = if v.lattice_search_complete {
            "isomorphism search reached its bounds".into()
        } else {
            format!("more than {} lattice isomorphisms", limits.lattice_isos)
        };
        return Ok(v);
    }
    v.reason = v
        .outcomes
        .iter()
        .filter_map(|o| o.rejected.clone())
        .next()
        .unwrap_or_default();
    Ok(v)
}

type Witness = (Vec<usize>, DiagramMorphism, DiagramMorphism);

fn examine_psi(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    psi: &[usize],
    limits: &Limits,
) -> Result<(PsiOutcome, Option<Witness>)> {
    let tau = tau_matching(b, b2, psi)?;
    let mut outcome = PsiOutcome {
        psi: psi.to_vec(),
        tau: tau.clone(),
        degree0: None,
        degree1: None,
        rejected: None,
    };
    if !tau.matched {
        outcome.rejected = Some(match tau.offending {
            Some(m) => format!("tail {:?} changes kind", b.graph.names(m)),
            None => "tail counts differ".into(),
        });
        return Ok((outcome, None));
    }
    for degree in [0u8, 1] {
        if let Some(reason) = node_types_match(b, b2, psi, degree) {
            outcome.rejected = Some(reason);
            return Ok((outcome, None));
        }
    }
    let d1 = find_diagram_isos(b, b2, psi, 1, 1, limits)?;
    if d1.proves_none() {
        outcome.rejected = Some("no isomorphism of K1 diagrams".into());
        outcome.degree1 = Some(d1);
        return Ok((outcome, None));
    }
    let d0 = find_diagram_isos(b, b2, psi, 0, 1, limits)?;
    if d0.proves_none() {
        outcome.rejected = Some("no isomorphism of ordered K0 diagrams".into());
    }
    let witness = match (d0.found.first(), d1.found.first()) {
        (Some(a), Some(c)) => Some((psi.to_vec(), a.clone(), c.clone())),
        _ => None,
    };
    outcome.degree0 = Some(d0);
    outcome.degree1 = Some(d1);
    Ok((outcome, witness))
}

fn finish_isomorphic(
    b: &InvariantBundle,
    b2: &InvariantBundle,
    mut v: Verdict,
    known: Option<Obstruction>,
    supplied: Option<&SuppliedObstruction>,
) -> Result<Verdict> {
    let mut obstruction = known.unwrap_or(Obstruction::Unresolved);
    if obstruction == Obstruction::Unresolved && (v.ext2.0.is_trivial() || v.ext2.1.is_trivial()) {
        obstruction = Obstruction::ExtVanishes;
    }
    if obstruction == Obstruction::Unresolved {
        if let Some(s) = supplied {
            extend_order_iso(&b.lattice, &b2.lattice, &s.psi)?;
            let y = pullback_diagram(b.lattice.elements(), &s.psi, &b2.k.k1)?;
            let cc = cochain_complex(&b.graph, &b.lattice, &y)?;
            obstruction = match represents_zero_ext2(&cc, &s.eta)? {
                Some(beta) => Obstruction::SuppliedZero(beta),
                None => Obstruction::SuppliedNonzero,
            };
        }
    }
    let pi = v.pi_proxy.0 && v.pi_proxy.1;
    v.conclusion = match (&obstruction, pi) {
        (Obstruction::Unresolved, true) => Conclusion::StablyIsomorphicIfObstructionVanishes,
        (Obstruction::Unresolved, false) => Conclusion::HomotopyEquivalentIfObstructionVanishes,
        (Obstruction::SuppliedNonzero, _) => Conclusion::InvariantsIsomorphicObstructionUnresolved,
        (_, true) => Conclusion::StablyIsomorphic,
        (_, false) => Conclusion::HomotopyEquivalent,
    };
    if pi {
        v.notes.push(STABLE_NOTE.into());
    }
    v.notes.push(HOMOTOPY_NOTE.into());
    if b.has_circle_tails() || b2.has_circle_tails() {
        v.notes.push(CIRCLE_NOTE.into());
    }
    if matches!(obstruction, Obstruction::Unresolved | Obstruction::SuppliedNonzero) {
        v.notes.push(OBSTRUCTION_NOTE.into());
    }
    v.obstruction = Some(obstruction);
    Ok(v)
}

/// Node-by-node group types of a diagram, keyed by the sorted vertex names.
pub fn diagram_types(g: &Graph, d: &GroupDiagram) -> BTreeMap<Vec<String>, GroupType> {
    d.index
        .iter()
        .zip(&d.groups)
        .map(|(w, grp)| (g.names(*w), grp.group_type()))
        .collect()
}
