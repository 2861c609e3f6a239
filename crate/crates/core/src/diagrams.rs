//! Diagrams of finitely generated abelian groups over a poset of vertex
//! sets, natural transformations between them, and the three-term cochain
//! complex computing `Ext^n(K0(C*(G), 𝕀_p), Y)` for `n = 0, 1, 2`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{subquotient, Embedded, FgGroup, GroupHom};
use crate::intmat::IntMatrix;
use crate::ktheory::{induced_k_maps, k_groups, KData};
use crate::lattice::{join_irreducibles, IdealLattice};
use crate::vset::VertexSet;

/// A functor from a poset of vertex sets (ordered by inclusion) to
/// finitely generated abelian groups. Maps are stored for every comparable
/// pair, identities included.
#[derive(Debug, Clone)]
pub struct GroupDiagram {
    pub index: Vec<VertexSet>,
    pub groups: Vec<FgGroup>,
    maps: HashMap<(usize, usize), GroupHom>,
}

impl GroupDiagram {
    /// Builds a diagram from its nodes and a map for every comparable pair
    /// `i ≤ j`, supplied by `map(i, j)`.
    pub fn from_fn(
        index: Vec<VertexSet>,
        groups: Vec<FgGroup>,
        mut map: impl FnMut(usize, usize) -> Result<GroupHom>,
    ) -> Result<Self> {
        let mut maps = HashMap::new();
        for i in 0..index.len() {
            for j in 0..index.len() {
                if index[i].is_subset(index[j]) {
                    maps.insert((i, j), map(i, j)?);
                }
            }
        }
        Ok(GroupDiagram { index, groups, maps })
    }

    pub fn zero(index: Vec<VertexSet>) -> Self {
        let groups = vec![FgGroup::trivial(); index.len()];
        Self::from_fn(index, groups, |_, _| {
            Ok(GroupHom::zero(&FgGroup::trivial(), &FgGroup::trivial()))
        })
        .expect("zero maps")
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.index[i].is_subset(self.index[j])
    }

    pub fn position(&self, w: VertexSet) -> Option<usize> {
        self.index.iter().position(|&x| x == w)
    }

    /// The structure map `ι_{j,i}: Y_i → Y_j` for `i ≤ j`.
    pub fn map(&self, i: usize, j: usize) -> &GroupHom {
        self.maps
            .get(&(i, j))
            .unwrap_or_else(|| panic!("nodes {i} and {j} are not comparable"))
    }

    /// Pairs `(i, j)` with `j` covering `i` in the index poset.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq(i, j) || self.index[i] == self.index[j] {
                    continue;
                }
                let between = (0..n).any(|k| {
                    self.index[k] != self.index[i] && self.index[k] != self.index[j] && self.leq(i, k) && self.leq(k, j)
                });
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Identity on each node, and `ι_{k,i} = ι_{k,j} ∘ ι_{j,i}` whenever
    /// `k` covers `j ≥ i`. Coherence along covers implies it for all chains.
    pub fn is_coherent(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if !self.map(i, i).equals(&GroupHom::identity(&self.groups[i])) {
                return false;
            }
        }
        for (j, k) in self.covers() {
            for i in 0..n {
                if self.leq(i, j) && !self.map(i, k).equals(&self.map(j, k).compose(self.map(i, j))) {
                    return false;
                }
            }
        }
        true
    }

    /// The subdiagram on the nodes listed in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> GroupDiagram {
        let index = keep.iter().map(|&i| self.index[i]).collect();
        let groups = keep.iter().map(|&i| self.groups[i].clone()).collect();
        GroupDiagram::from_fn(index, groups, |a, b| Ok(self.map(keep[a], keep[b]).clone())).expect("restriction")
    }

    /// Whether every node is free on its generators.
    pub fn is_free(&self) -> bool {
        self.groups.iter().all(|g| g.relations().is_zero())
    }
}

/// Components `Φ_W`, each a matrix from the generators of `X_W` to those of
/// `Y_W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramMorphism {
    pub components: Vec<IntMatrix>,
}

impl DiagramMorphism {
    pub fn identity(x: &GroupDiagram) -> Self {
        DiagramMorphism {
            components: x.groups.iter().map(|g| IntMatrix::identity(g.ngens())).collect(),
        }
    }

    pub fn zero(x: &GroupDiagram, y: &GroupDiagram) -> Self {
        DiagramMorphism {
            components: x
                .groups
                .iter()
                .zip(&y.groups)
                .map(|(a, b)| IntMatrix::zeros(b.ngens(), a.ngens()))
                .collect(),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &DiagramMorphism) -> DiagramMorphism {
        DiagramMorphism {
            components: self
                .components
                .iter()
                .zip(&first.components)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn component(&self, x: &GroupDiagram, y: &GroupDiagram, i: usize) -> GroupHom {
        GroupHom::new(x.groups[i].clone(), y.groups[i].clone(), self.components[i].clone())
    }
}

/// Checks shapes, that each component is well defined, and that every
/// naturality square over a cover commutes.
pub fn is_natural(x: &GroupDiagram, y: &GroupDiagram, m: &DiagramMorphism) -> bool {
    if x.index != y.index || m.components.len() != x.len() {
        return false;
    }
    for i in 0..x.len() {
        if m.components[i].shape() != (y.groups[i].ngens(), x.groups[i].ngens()) {
            return false;
        }
        if !m.component(x, y, i).is_well_defined() {
            return false;
        }
    }
    x.covers().into_iter().all(|(i, j)| {
        let left = y.map(i, j).compose(&m.component(x, y, i));
        let right = m.component(x, y, j).compose(x.map(i, j));
        left.equals(&right)
    })
}

/// Per-node K-theory of `C*(G)_W` over the whole lattice, together with the
/// K0 and K1 diagrams.
#[derive(Debug, Clone)]
pub struct KDiagrams {
    pub data: Vec<KData>,
    pub k0: GroupDiagram,
    pub k1: GroupDiagram,
}

pub fn k_diagrams(g: &Graph, l: &IdealLattice) -> Result<KDiagrams> {
    let data: Vec<KData> = l.elements().iter().map(|&w| k_groups(g, w)).collect::<Result<_>>()?;
    let mut maps = HashMap::new();
    for i in 0..l.len() {
        for j in 0..l.len() {
            if l.leq(i, j) {
                maps.insert((i, j), induced_k_maps(&data[i], &data[j])?);
            }
        }
    }
    let index = l.elements().to_vec();
    let k0 = GroupDiagram::from_fn(index.clone(), data.iter().map(|d| d.k0.clone()).collect(), |i, j| {
        Ok(maps[&(i, j)].0.clone())
    })?;
    let k1 = GroupDiagram::from_fn(index, data.iter().map(|d| d.k1.clone()).collect(), |i, j| {
        Ok(maps[&(i, j)].1.clone())
    })?;
    if !k0.is_coherent() || !k1.is_coherent() {
        return Err(Error::Internal("K-theory diagram is not coherent".into()));
    }
    Ok(KDiagrams { data, k0, k1 })
}

/// `K0(C*(G), 𝕀_p)` for degree 0, `K1(C*(G), 𝕀_p)` otherwise.
pub fn build_k_diagram(g: &Graph, l: &IdealLattice, degree: u8) -> Result<GroupDiagram> {
    let kd = k_diagrams(g, l)?;
    Ok(if degree == 0 { kd.k0 } else { kd.k1 })
}

/// The diagram `W ↦ ℤ[W ∩ S]` with inclusion maps.
pub fn free_vertex_diagram(l: &IdealLattice, s: VertexSet) -> GroupDiagram {
    let index = l.elements().to_vec();
    let groups = index.iter().map(|w| FgGroup::free(w.intersection(s).len())).collect();
    let idx = index.clone();
    GroupDiagram::from_fn(index, groups, |i, j| {
        let a = idx[i].intersection(s).to_vec();
        let b = idx[j].intersection(s).to_vec();
        let mut m = IntMatrix::zeros(b.len(), a.len());
        for (c, v) in a.iter().enumerate() {
            m[(b.binary_search(v).expect("nested"), c)] = BigInt::one();
        }
        Ok(GroupHom::new(FgGroup::free(a.len()), FgGroup::free(b.len()), m))
    })
    .expect("inclusions")
}

/// `ψ*Y`: the node at `domain[i]` is `Y` at `psi[i]`.
pub fn pullback_diagram(domain: &[VertexSet], psi: &[usize], y: &GroupDiagram) -> Result<GroupDiagram> {
    if psi.len() != domain.len() || psi.iter().any(|&p| p >= y.len()) {
        return Err(Error::IndexMismatch("map does not cover the domain poset".into()));
    }
    for i in 0..domain.len() {
        for j in 0..domain.len() {
            if domain[i].is_subset(domain[j]) && !y.leq(psi[i], psi[j]) {
                return Err(Error::NotMonotone);
            }
        }
    }
    let groups = psi.iter().map(|&p| y.groups[p].clone()).collect();
    GroupDiagram::from_fn(domain.to_vec(), groups, |i, j| Ok(y.map(psi[i], psi[j]).clone()))
}

/// `Hom(ℤ[V ∩ S, 𝕀_p], Y) ≅ Π_{v ∈ S} Y_{⟨v⟩}`.
#[derive(Debug, Clone)]
pub struct FreeHom {
    pub verts: Vec<usize>,
    /// Node of `⟨v⟩` for each vertex in `verts`.
    pub nodes: Vec<usize>,
    pub group: FgGroup,
    offsets: Vec<usize>,
}

impl FreeHom {
    /// Generator range of `y_v` within the product.
    pub fn slot(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// `ξ_W(δ_v) = ι_{W,⟨v⟩}(y_v)`.
    pub fn family_to_morphism(&self, y: &GroupDiagram, s: VertexSet, fam: &[BigInt]) -> DiagramMorphism {
        let components = y
            .index
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let vs = w.intersection(s).to_vec();
                let cols: Vec<Vec<BigInt>> = vs
                    .iter()
                    .map(|v| {
                        let k = self.verts.binary_search(v).expect("vertex in S");
                        y.map(self.nodes[k], i).apply(&fam[self.slot(k)])
                    })
                    .collect();
                IntMatrix::from_columns(y.groups[i].ngens(), &cols)
            })
            .collect();
        DiagramMorphism { components }
    }

    /// `y_v = ξ_{⟨v⟩}(δ_v)`.
    pub fn morphism_to_family(&self, y: &GroupDiagram, s: VertexSet, m: &DiagramMorphism) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.group.ngens());
        for (k, &v) in self.verts.iter().enumerate() {
            let node = self.nodes[k];
            let col = y.index[node]
                .intersection(s)
                .to_vec()
                .binary_search(&v)
                .expect("v generates its own ideal");
            out.extend(m.components[node].column(col));
        }
        out
    }
}

pub fn hom_free_diagram(l: &IdealLattice, s: VertexSet, y: &GroupDiagram) -> Result<FreeHom> {
    check_index(l, y)?;
    let verts = s.to_vec();
    let nodes: Vec<usize> = verts.iter().map(|&v| l.principal(v)).collect();
    let parts: Vec<&FgGroup> = nodes.iter().map(|&i| &y.groups[i]).collect();
    let mut offsets = vec![0];
    for p in &parts {
        offsets.push(offsets.last().unwrap() + p.ngens());
    }
    Ok(FreeHom {
        group: FgGroup::direct_sum(&parts),
        verts,
        nodes,
        offsets,
    })
}

fn check_index(l: &IdealLattice, y: &GroupDiagram) -> Result<()> {
    if y.index != l.elements() {
        return Err(Error::IndexMismatch(
            "diagram is not indexed by the ideal lattice of the graph".into(),
        ));
    }
    Ok(())
}

/// `Hom(X, Y)` for a diagram `X` of free groups, as the kernel of the
/// naturality constraints inside `⊕_W Y_W^{rank X_W}`.
#[derive(Debug, Clone)]
pub struct HomDiagram {
    pub ambient: FgGroup,
    pub hom: Embedded,
    ranks: Vec<usize>,
    ngens: Vec<usize>,
    offsets: Vec<usize>,
}

impl HomDiagram {
    pub fn group(&self) -> &FgGroup {
        &self.hom.group
    }

    pub fn to_ambient(&self, m: &DiagramMorphism) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.ambient.ngens());
        for (i, c) in m.components.iter().enumerate() {
            for j in 0..self.ranks[i] {
                out.extend(c.column(j));
            }
        }
        out
    }

    pub fn from_ambient(&self, a: &[BigInt]) -> DiagramMorphism {
        let components = (0..self.ranks.len())
            .map(|i| {
                let cols: Vec<Vec<BigInt>> = (0..self.ranks[i])
                    .map(|j| {
                        let o = self.offsets[i] + j * self.ngens[i];
                        a[o..o + self.ngens[i]].to_vec()
                    })
                    .collect();
                IntMatrix::from_columns(self.ngens[i], &cols)
            })
            .collect();
        DiagramMorphism { components }
    }

    /// The natural transformation with the given coordinates on the
    /// generators of the Hom group.
    pub fn morphism(&self, coords: &[BigInt]) -> DiagramMorphism {
        self.from_ambient(&self.hom.inclusion.mul_vec(coords))
    }

    /// Coordinates on the generators of the Hom group; `None` when `a` is
    /// not natural.
    pub fn coords_of_ambient(&self, a: &[BigInt]) -> Option<Vec<BigInt>> {
        self.ambient.in_span(&self.hom.inclusion, a)
    }

    pub fn coords_of(&self, m: &DiagramMorphism) -> Option<Vec<BigInt>> {
        self.coords_of_ambient(&self.to_ambient(m))
    }

    pub fn generators(&self) -> Vec<DiagramMorphism> {
        (0..self.hom.inclusion.cols())
            .map(|j| self.from_ambient(&self.hom.inclusion.column(j)))
            .collect()
    }
}

pub fn hom_diagram(x: &GroupDiagram, y: &GroupDiagram) -> Result<HomDiagram> {
    if x.index != y.index {
        return Err(Error::IndexMismatch("diagrams have different index posets".into()));
    }
    if !x.is_free() {
        return Err(Error::Internal("source diagram must be free on its generators".into()));
    }
    let n = x.len();
    let ranks: Vec<usize> = x.groups.iter().map(|g| g.ngens()).collect();
    let ngens: Vec<usize> = y.groups.iter().map(|g| g.ngens()).collect();
    let mut offsets = vec![0];
    let mut blocks = Vec::new();
    for i in 0..n {
        offsets.push(offsets[i] + ranks[i] * ngens[i]);
        for _ in 0..ranks[i] {
            blocks.push(y.groups[i].relations());
        }
    }
    let ambient = FgGroup::new(IntMatrix::block_diag(&blocks));
    let total = offsets[n];

    // one block Y_j^{rank X_i} per cover i ⋖ j
    let covers = x.covers();
    let mut cod_blocks = Vec::new();
    let mut rows = 0;
    let mut row_offsets = Vec::new();
    for &(i, j) in &covers {
        row_offsets.push(rows);
        rows += ranks[i] * ngens[j];
        for _ in 0..ranks[i] {
            cod_blocks.push(y.groups[j].relations());
        }
    }
    let mut c = IntMatrix::zeros(rows, total);
    let one = BigInt::one();
    for (&(i, j), &r0) in covers.iter().zip(&row_offsets) {
        let iy = &y.map(i, j).matrix;
        let ix = &x.map(i, j).matrix;
        let eye = IntMatrix::identity(ngens[j]);
        for col in 0..ranks[i] {
            let r = r0 + col * ngens[j];
            c.add_block(r, offsets[i] + col * ngens[i], iy, &one);
            for k in 0..ranks[j] {
                let coef = &ix[(k, col)];
                if !coef.is_zero() {
                    c.add_block(r, offsets[j] + k * ngens[j], &eye, &-coef);
                }
            }
        }
    }
    let constraint = GroupHom::new(ambient.clone(), FgGroup::new(IntMatrix::block_diag(&cod_blocks)), c);
    let hom = constraint.kernel();
    Ok(HomDiagram {
        ambient,
        hom,
        ranks,
        ngens,
        offsets,
    })
}

/// Precomposition `Hom(X2, Y) → Hom(X1, Y)`, `Φ ↦ Φ ∘ f`.
pub fn precompose(src: &HomDiagram, dst: &HomDiagram, f: &DiagramMorphism) -> Result<GroupHom> {
    let mut cols = Vec::new();
    for phi in src.generators() {
        let m = phi.compose(f);
        let z = dst
            .coords_of(&m)
            .ok_or_else(|| Error::Internal("precomposition left the natural transformations".into()))?;
        cols.push(z);
    }
    Ok(GroupHom::new(
        src.group().clone(),
        dst.group().clone(),
        IntMatrix::from_columns(dst.group().ngens(), &cols),
    ))
}

/// Index poset for the Ext computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexPoset {
    /// All gauge-invariant ideals.
    #[default]
    Ideals,
    /// Join-irreducible ideals only.
    Irreducible,
}

/// `C0 → C1 → C2` with `d1 ∘ d0 = 0`.
///
/// Over the ideal lattice, `C0 = Π_{v} Y_{⟨v⟩}` and `C1 = Π_{v regular}
/// Y_{⟨v⟩}` are families of elements. Over the join-irreducibles all three
/// terms are groups of natural transformations.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    pub poset: IndexPoset,
    pub c0: FgGroup,
    pub c1: FgGroup,
    pub c2: HomDiagram,
    pub d0: GroupHom,
    pub d1: GroupHom,
    /// `d1` followed by the inclusion of `C2` into its ambient group.
    pub d1_ambient: IntMatrix,
    /// Families over the ideal lattice: vertices of `C1` and their nodes.
    pub c1_family: Option<FreeHom>,
    pub c0_family: Option<FreeHom>,
}

pub fn cochain_complex(g: &Graph, l: &IdealLattice, y: &GroupDiagram) -> Result<CochainComplex> {
    cochain_complex_over(g, l, y, IndexPoset::Ideals)
}

pub fn cochain_complex_over(
    g: &Graph,
    l: &IdealLattice,
    y: &GroupDiagram,
    poset: IndexPoset,
) -> Result<CochainComplex> {
    check_index(l, y)?;
    let kd = k_diagrams(g, l)?;
    match poset {
        IndexPoset::Ideals => family_complex(g, l, y, &kd),
        IndexPoset::Irreducible => generic_complex(g, l, y, &kd, &join_irreducibles(l)),
    }
}

fn family_complex(g: &Graph, l: &IdealLattice, y: &GroupDiagram, kd: &KDiagrams) -> Result<CochainComplex> {
    let all = g.all_vertices();
    let regs = crate::graph::regular_vertices(g);
    let f0 = hom_free_diagram(l, all, y)?;
    let f1 = hom_free_diagram(l, regs, y)?;
    let one = BigInt::one();

    let mut d0 = IntMatrix::zeros(f1.group.ngens(), f0.group.ngens());
    for (k, &w) in f1.verts.iter().enumerate() {
        let r0 = f1.slot(k).start;
        let kw = f0.verts.binary_search(&w).expect("regular vertex");
        d0.add_block(r0, f0.slot(kw).start, &IntMatrix::identity(f1.slot(k).len()), &one);
        for &e in g.incoming(w) {
            let s = f0.verts.binary_search(&g.src(e)).expect("vertex");
            let iota = &y.map(f0.nodes[s], f1.nodes[k]).matrix;
            d0.add_block(r0, f0.slot(s).start, iota, &-&one);
        }
    }
    let d0 = GroupHom::new(f0.group.clone(), f1.group.clone(), d0);

    let c2 = hom_diagram(&kd.k1, y)?;
    let mut d1a = IntMatrix::zeros(c2.ambient.ngens(), f1.group.ngens());
    for (i, data) in kd.data.iter().enumerate() {
        for j in 0..data.k1_rank() {
            let r0 = c2.offsets[i] + j * c2.ngens[i];
            for (p, &v) in data.regs.iter().enumerate() {
                let coef = &data.k1_basis[(p, j)];
                if coef.is_zero() {
                    continue;
                }
                let k = f1.verts.binary_search(&v).expect("regular vertex");
                let iota = &y.map(f1.nodes[k], i).matrix;
                d1a.add_block(r0, f1.slot(k).start, iota, coef);
            }
        }
    }
    let d1 = factor_d1(&c2, &f1.group, &d1a)?;
    let cc = CochainComplex {
        poset: IndexPoset::Ideals,
        c0: f0.group.clone(),
        c1: f1.group.clone(),
        c2,
        d0,
        d1,
        d1_ambient: d1a,
        c1_family: Some(f1),
        c0_family: Some(f0),
    };
    check_complex(&cc)?;
    Ok(cc)
}

fn factor_d1(c2: &HomDiagram, c1: &FgGroup, d1a: &IntMatrix) -> Result<GroupHom> {
    let mut cols = Vec::new();
    for j in 0..d1a.cols() {
        cols.push(
            c2.coords_of_ambient(&d1a.column(j))
                .ok_or_else(|| Error::Internal("d1 produced a non-natural family".into()))?,
        );
    }
    Ok(GroupHom::new(
        c1.clone(),
        c2.group().clone(),
        IntMatrix::from_columns(c2.group().ngens(), &cols),
    ))
}

fn check_complex(cc: &CochainComplex) -> Result<()> {
    if !cc.d1.compose(&cc.d0).is_zero() {
        return Err(Error::Internal("d1 ∘ d0 is not zero".into()));
    }
    Ok(())
}

/// `κ: K1 → ℤ[V_reg]` and `id − M: ℤ[V_reg] → ℤ[V]` as diagram morphisms.
pub fn exact_sequence_morphisms(kd: &KDiagrams) -> (DiagramMorphism, DiagramMorphism) {
    let kappa = DiagramMorphism {
        components: kd.data.iter().map(|d| d.k1_basis.clone()).collect(),
    };
    let diff = DiagramMorphism {
        components: kd.data.iter().map(|d| d.matrix.clone()).collect(),
    };
    (kappa, diff)
}

fn generic_complex(
    g: &Graph,
    l: &IdealLattice,
    y: &GroupDiagram,
    kd: &KDiagrams,
    keep: &[usize],
) -> Result<CochainComplex> {
    let zv = free_vertex_diagram(l, g.all_vertices()).restrict(keep);
    let zreg = free_vertex_diagram(l, crate::graph::regular_vertices(g)).restrict(keep);
    let k1 = kd.k1.restrict(keep);
    let yr = y.restrict(keep);
    let (kappa, diff) = exact_sequence_morphisms(kd);
    let pick = |m: DiagramMorphism| DiagramMorphism {
        components: keep.iter().map(|&i| m.components[i].clone()).collect(),
    };
    let (kappa, diff) = (pick(kappa), pick(diff));
    let h0 = hom_diagram(&zv, &yr)?;
    let h1 = hom_diagram(&zreg, &yr)?;
    let c2 = hom_diagram(&k1, &yr)?;
    let d0 = precompose(&h0, &h1, &diff)?;
    let mut cols = Vec::new();
    for phi in h1.generators() {
        cols.push(c2.to_ambient(&phi.compose(&kappa)));
    }
    let d1a = IntMatrix::from_columns(c2.ambient.ngens(), &cols);
    let d1 = factor_d1(&c2, h1.group(), &d1a)?;
    let cc = CochainComplex {
        poset: IndexPoset::Irreducible,
        c0: h0.group().clone(),
        c1: h1.group().clone(),
        c2,
        d0,
        d1,
        d1_ambient: d1a,
        c1_family: None,
        c0_family: None,
    };
    check_complex(&cc)?;
    Ok(cc)
}

#[derive(Debug, Clone)]
pub struct ExtGroups {
    /// `ker d0 ⊆ C0`.
    pub ext0: Embedded,
    /// `ker d1 / im d0`, with representing cocycles in `C1`.
    pub ext1: Embedded,
    /// `coker d1`, presented on the generators of `C2`.
    pub ext2: FgGroup,
}

pub fn ext_groups(cc: &CochainComplex) -> ExtGroups {
    let ext0 = cc.d0.kernel();
    let ker1 = cc.d1.kernel();
    let ext1 = subquotient(&cc.c1, &ker1, &cc.d0.matrix);
    let ext2 = cc.d1.cokernel();
    ExtGroups { ext0, ext1, ext2 }
}

/// Decides whether `η ∈ Hom(K1, Y)` lies in the image of `κ*`, i.e.
/// represents zero in `Ext²`. Returns `β ∈ C1` with `d1(β) = η` on success.
pub fn represents_zero_ext2(cc: &CochainComplex, eta: &DiagramMorphism) -> Result<Option<Vec<BigInt>>> {
    let a = cc.c2.to_ambient_checked(eta)?;
    if cc.c2.coords_of_ambient(&a).is_none() {
        return Err(Error::NotNatural);
    }
    Ok(cc.c2.ambient.in_span(&cc.d1_ambient, &a))
}

impl HomDiagram {
    fn to_ambient_checked(&self, m: &DiagramMorphism) -> Result<Vec<BigInt>> {
        let shapes_ok = m.components.len() == self.ranks.len()
            && m.components
                .iter()
                .enumerate()
                .all(|(i, c)| c.shape() == (self.ngens[i], self.ranks[i]));
        if !shapes_ok {
            return Err(Error::NotNatural);
        }
        Ok(self.to_ambient(m))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ext1Class {
    /// Invariant-factor coordinates of the class in `Ext¹`.
    pub coords: Vec<BigInt>,
    pub is_zero: bool,
    /// `y ∈ C0` with `d0(y) = Υ` when the class is zero.
    pub witness: Option<Vec<BigInt>>,
}

pub fn ext1_class(cc: &CochainComplex, ext: &ExtGroups, upsilon: &[BigInt]) -> Result<Ext1Class> {
    if upsilon.len() != cc.c1.ngens() {
        return Err(Error::IndexMismatch("family has the wrong length".into()));
    }
    if !cc.c2.ambient.is_zero(&cc.d1_ambient.mul_vec(upsilon)) {
        return Err(Error::NotACocycle);
    }
    let z = cc
        .c1
        .in_span(&ext.ext1.inclusion, upsilon)
        .ok_or_else(|| Error::Internal("cocycle outside the kernel of d1".into()))?;
    let coords = ext.ext1.group.coords(&z);
    let is_zero = ext.ext1.group.is_zero(&z);
    let witness = cc.c1.in_span(&cc.d0.matrix, upsilon);
    if is_zero != witness.is_some() {
        return Err(Error::Internal("Ext¹ zero test disagrees with its witness".into()));
    }
    Ok(Ext1Class {
        coords,
        is_zero,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::to_bigs;
    use crate::lattice::enumerate_lattice;
    use crate::limits::Limits;

    fn loops(n: usize) -> Graph {
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let edges: Vec<(&str, &str, &str)> = names.iter().map(|e| (e.as_str(), "v", "v")).collect();
        Graph::from_edges(&["v"], &edges).unwrap()
    }

    fn remark() -> Graph {
        Graph::from_edges(
            &["1", "2", "3"],
            &[("a", "1", "1"), ("b", "2", "2"), ("c", "1", "3"), ("d", "2", "3")],
        )
        .unwrap()
    }

    fn lat(g: &Graph) -> IdealLattice {
        enumerate_lattice(g, &Limits::default()).unwrap()
    }

    #[test]
    fn k_diagrams_of_examples() {
        let g = loops(1);
        let l = lat(&g);
        let k1 = build_k_diagram(&g, &l, 1).unwrap();
        assert_eq!(k1.len(), 2);
        assert!(k1.groups[0].is_trivial());
        assert_eq!(k1.groups[1].to_string(), "Z");
        assert_eq!(k1.covers(), vec![(0, 1)]);

        let empty = Graph::from_edges(&[], &[]).unwrap();
        let k0 = build_k_diagram(&empty, &lat(&empty), 0).unwrap();
        assert_eq!(k0.len(), 1);
        assert!(k0.groups[0].is_trivial());

        let r = remark();
        let rl = lat(&r);
        let k0 = build_k_diagram(&r, &rl, 0).unwrap();
        let types: Vec<String> = k0.groups.iter().map(|g| g.to_string()).collect();
        assert_eq!(types, vec!["0", "Z", "Z", "Z^2"]);
        assert!(k0.is_coherent());
    }

    #[test]
    fn pullbacks() {
        let r = remark();
        let l = lat(&r);
        let k1 = build_k_diagram(&r, &l, 1).unwrap();
        let id: Vec<usize> = (0..l.len()).collect();
        let same = pullback_diagram(l.elements(), &id, &k1).unwrap();
        assert_eq!(same.groups, k1.groups);
        let top = vec![l.top(); l.len()];
        let constant = pullback_diagram(l.elements(), &top, &k1).unwrap();
        assert!(constant.is_coherent());
        assert!(constant.map(0, 3).equals(&GroupHom::identity(&k1.groups[3])));
        let swap = vec![0, 2, 1, 3];
        let swapped = pullback_diagram(l.elements(), &swap, &k1).unwrap();
        assert_eq!(swapped.groups[1], k1.groups[2]);
        assert!(swapped.map(1, 3).equals(k1.map(2, 3)));
        let bad = vec![3, 0, 0, 0];
        assert_eq!(
            pullback_diagram(l.elements(), &bad, &k1).unwrap_err(),
            Error::NotMonotone
        );
    }

    #[test]
    fn free_hom_round_trip() {
        let r = remark();
        let l = lat(&r);
        let k0 = build_k_diagram(&r, &l, 0).unwrap();
        let f = hom_free_diagram(&l, r.all_vertices(), &k0).unwrap();
        let fam = to_bigs(&[2, -1, 3, 0, 1]);
        assert_eq!(f.group.ngens(), fam.len());
        let m = f.family_to_morphism(&k0, r.all_vertices(), &fam);
        assert!(is_natural(&free_vertex_diagram(&l, r.all_vertices()), &k0, &m));
        assert_eq!(f.morphism_to_family(&k0, r.all_vertices(), &m), fam);

        let g = loops(1);
        let gl = lat(&g);
        let k1 = build_k_diagram(&g, &gl, 1).unwrap();
        assert_eq!(
            hom_free_diagram(&gl, g.all_vertices(), &k1).unwrap().group.to_string(),
            "Z"
        );
        let z = GroupDiagram::zero(gl.elements().to_vec());
        assert!(hom_free_diagram(&gl, g.all_vertices(), &z).unwrap().group.is_trivial());
    }

    #[test]
    fn hom_groups() {
        let g = loops(1);
        let l = lat(&g);
        let k1 = build_k_diagram(&g, &l, 1).unwrap();
        let h = hom_diagram(&k1, &k1).unwrap();
        assert_eq!(h.group().to_string(), "Z");
        let z = GroupDiagram::zero(l.elements().to_vec());
        assert!(hom_diagram(&z, &k1).unwrap().group().is_trivial());
        let acyclic = Graph::from_edges(&["a", "b"], &[("e", "a", "b")]).unwrap();
        let al = lat(&acyclic);
        let ak1 = build_k_diagram(&acyclic, &al, 1).unwrap();
        let ak0 = build_k_diagram(&acyclic, &al, 0).unwrap();
        assert!(hom_diagram(&ak1, &ak0).unwrap().group().is_trivial());

        let r = remark();
        let rl = lat(&r);
        let rk1 = build_k_diagram(&r, &rl, 1).unwrap();
        let rh = hom_diagram(&rk1, &rk1).unwrap();
        for m in rh.generators() {
            assert!(is_natural(&rk1, &rk1, &m));
        }
        assert!(rh.coords_of(&DiagramMorphism::identity(&rk1)).is_some());
    }

    #[test]
    fn single_loop_complex() {
        let g = loops(1);
        let l = lat(&g);
        let k1 = build_k_diagram(&g, &l, 1).unwrap();
        let cc = cochain_complex(&g, &l, &k1).unwrap();
        assert_eq!(cc.c0.to_string(), "Z");
        assert_eq!(cc.c1.to_string(), "Z");
        assert!(cc.d0.is_zero());
        assert!(cc.d1.is_isomorphism());
        let ext = ext_groups(&cc);
        assert_eq!(ext.ext0.group.to_string(), "Z");
        assert!(ext.ext1.group.is_trivial());
        assert!(ext.ext2.is_trivial());

        let id = DiagramMorphism::identity(&k1);
        let beta = represents_zero_ext2(&cc, &id).unwrap().unwrap();
        assert_eq!(beta, to_bigs(&[1]));
        let zero = DiagramMorphism::zero(&k1, &k1);
        assert_eq!(represents_zero_ext2(&cc, &zero).unwrap(), Some(to_bigs(&[0])));
        assert_eq!(ext1_class(&cc, &ext, &to_bigs(&[1])).unwrap_err(), Error::NotACocycle);
        let c = ext1_class(&cc, &ext, &to_bigs(&[0])).unwrap();
        assert!(c.is_zero);
    }

    #[test]
    fn acyclic_and_zero_targets() {
        let g = Graph::from_edges(&["a", "b", "c"], &[("e", "a", "b"), ("f", "b", "c")]).unwrap();
        let l = lat(&g);
        let k0 = build_k_diagram(&g, &l, 0).unwrap();
        let cc = cochain_complex(&g, &l, &k0).unwrap();
        assert!(cc.c2.group().is_trivial());
        assert!(ext_groups(&cc).ext2.is_trivial());

        let r = remark();
        let rl = lat(&r);
        let z = GroupDiagram::zero(rl.elements().to_vec());
        let ext = ext_groups(&cochain_complex(&r, &rl, &z).unwrap());
        assert!(ext.ext0.group.is_trivial() && ext.ext1.group.is_trivial() && ext.ext2.is_trivial());
    }

    #[test]
    fn coboundaries_are_zero_classes() {
        let r = remark();
        let l = lat(&r);
        let k1 = build_k_diagram(&r, &l, 1).unwrap();
        let cc = cochain_complex(&r, &l, &k1).unwrap();
        let ext = ext_groups(&cc);
        let y = to_bigs(&[1, -2, 1, 0, 3, 1][..cc.c0.ngens()]);
        let ups = cc.d0.apply(&y);
        let c = ext1_class(&cc, &ext, &ups).unwrap();
        assert!(c.is_zero);
        assert_eq!(cc.d0.apply(&c.witness.unwrap()), ups);
    }

    #[test]
    fn irreducible_variant_matches_on_chains() {
        // on a chain every nonzero element is join-irreducible, so both
        // posets give the same Ext groups
        let g = Graph::from_edges(&["x", "y"], &[("e", "x", "y"), ("f", "y", "y")]).unwrap();
        let l = lat(&g);
        let k1 = build_k_diagram(&g, &l, 1).unwrap();
        let a = ext_groups(&cochain_complex(&g, &l, &k1).unwrap());
        let b = ext_groups(&cochain_complex_over(&g, &l, &k1, IndexPoset::Irreducible).unwrap());
        assert_eq!(a.ext0.group.group_type(), b.ext0.group.group_type());
        assert_eq!(a.ext1.group.group_type(), b.ext1.group.group_type());
        assert_eq!(a.ext2.group_type(), b.ext2.group_type());
    }
}
