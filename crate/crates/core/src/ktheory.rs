//! K-theory of the ideals `C*(G)_W` for hereditary saturated `W`, from the
//! exact sequence `0 → K1 → ℤ[W_reg] → ℤ[W] → K0 → 0` whose middle map is
//! `id − M` with `M δ_w = Σ_{e ∈ E^w} δ_{s(e)}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{FgGroup, GroupHom};
use crate::intmat::{hermite_basis, kernel_basis, solve, IntMatrix};
use crate::lattice::{hs_closure, is_hereditary_saturated};
use crate::vset::VertexSet;

#[derive(Debug, Clone)]
pub struct KData {
    pub w: VertexSet,
    /// Vertices of `W` in index order; these index the generators of K0.
    pub verts: Vec<usize>,
    /// Regular vertices of `W`.
    pub regs: Vec<usize>,
    /// `id − M`, a `|W| × |W_reg|` matrix.
    pub matrix: IntMatrix,
    pub k0: FgGroup,
    /// Columns form a basis of `ker(id − M) ⊆ ℤ[W_reg]`, in Hermite form.
    pub k1_basis: IntMatrix,
    pub k1: FgGroup,
}

impl KData {
    pub fn position(&self, v: usize) -> Option<usize> {
        self.verts.binary_search(&v).ok()
    }

    pub fn reg_position(&self, v: usize) -> Option<usize> {
        self.regs.binary_search(&v).ok()
    }

    /// Restricts a vector over all vertices to the generators of `K0(W)`.
    /// Fails if it is supported outside `W`.
    pub fn restrict(&self, c: &[BigInt]) -> Result<Vec<BigInt>> {
        for (v, x) in c.iter().enumerate() {
            if !x.is_zero() && !self.w.contains(v) {
                return Err(Error::NotSupportedInW);
            }
        }
        Ok(self.verts.iter().map(|&v| c[v].clone()).collect())
    }

    /// Class of `δ_v`.
    pub fn delta(&self, v: usize) -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); self.verts.len()];
        x[self.position(v).expect("vertex lies in W")] = BigInt::one();
        x
    }

    pub fn k1_rank(&self) -> usize {
        self.k1_basis.cols()
    }
}

/// `id − M_G^W` as a matrix from `ℤ[W_reg]` to `ℤ[W]`.
pub fn adjacency_difference(g: &Graph, w: VertexSet) -> IntMatrix {
    let verts = w.to_vec();
    let regs: Vec<usize> = verts.iter().copied().filter(|&v| g.is_regular(v)).collect();
    let pos = |v: usize| verts.binary_search(&v).expect("hereditary set contains sources");
    let mut a = IntMatrix::zeros(verts.len(), regs.len());
    for (j, &r) in regs.iter().enumerate() {
        a[(pos(r), j)] += 1;
        for &e in g.incoming(r) {
            a[(pos(g.src(e)), j)] -= 1;
        }
    }
    a
}

pub fn k_groups(g: &Graph, w: VertexSet) -> Result<KData> {
    if !is_hereditary_saturated(g, w) {
        return Err(Error::NotHereditarySaturated);
    }
    let verts = w.to_vec();
    let regs: Vec<usize> = verts.iter().copied().filter(|&v| g.is_regular(v)).collect();
    let matrix = adjacency_difference(g, w);
    let k0 = FgGroup::new(matrix.clone());
    let k1_basis = hermite_basis(&kernel_basis(&matrix));
    let k1 = FgGroup::free(k1_basis.cols());
    Ok(KData {
        w,
        verts,
        regs,
        matrix,
        k0,
        k1_basis,
        k1,
    })
}

/// Maps induced by `W1 ⊆ W2`: on K0 by the inclusion `ℤ[W1] → ℤ[W2]`, on
/// K1 by extending kernel vectors by zero.
pub fn induced_k_maps(a: &KData, b: &KData) -> Result<(GroupHom, GroupHom)> {
    if !a.w.is_subset(b.w) {
        return Err(Error::NotNested);
    }
    let mut inc0 = IntMatrix::zeros(b.verts.len(), a.verts.len());
    for (j, &v) in a.verts.iter().enumerate() {
        inc0[(b.position(v).expect("nested"), j)] = BigInt::one();
    }
    let mut inc1 = IntMatrix::zeros(b.regs.len(), a.regs.len());
    for (j, &v) in a.regs.iter().enumerate() {
        inc1[(b.reg_position(v).expect("nested"), j)] = BigInt::one();
    }
    let extended = &inc1 * &a.k1_basis;
    if !(&b.matrix * &extended).is_zero() {
        return Err(Error::Internal("extension by zero left the kernel of id - M".into()));
    }
    let mut cols = Vec::with_capacity(extended.cols());
    for j in 0..extended.cols() {
        let z = solve(&b.k1_basis, &extended.column(j))
            .ok_or_else(|| Error::Internal("K1 vector not in the kernel basis span".into()))?;
        cols.push(z);
    }
    let m1 = IntMatrix::from_columns(b.k1_basis.cols(), &cols);
    Ok((
        GroupHom::new(a.k0.clone(), b.k0.clone(), inc0),
        GroupHom::new(a.k1.clone(), b.k1.clone(), m1),
    ))
}

/// Whether `c ∈ ℕ[W]` is an order unit of `K0⁺(W)`: its support generates
/// `W` as a hereditary saturated set.
pub fn is_order_unit(g: &Graph, kd: &KData, c: &[BigInt]) -> Result<bool> {
    kd.restrict(c)?;
    let supp = VertexSet::from_iter(c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(v, _)| v));
    Ok(hs_closure(g, supp) == kd.w)
}

/// K-theory of the subquotient `C*(G)_{H2} / C*(G)_H`. The exponential map
/// vanishes for graph algebras, so `K0(sub) = coker i0` and `K1(sub)` is an
/// extension of `ker i0` by `coker i1`.
#[derive(Debug, Clone)]
pub struct SubquotientK {
    pub i0: GroupHom,
    pub i1: GroupHom,
    pub k0: FgGroup,
    pub ker_i0: FgGroup,
    pub coker_i1: FgGroup,
}

impl SubquotientK {
    pub fn k1_rank(&self) -> usize {
        self.ker_i0.free_rank() + self.coker_i1.free_rank()
    }
}

pub fn subquotient_k(h: &KData, h2: &KData) -> Result<SubquotientK> {
    let (i0, i1) = induced_k_maps(h, h2)?;
    let k0 = i0.cokernel();
    let ker_i0 = i0.kernel().group;
    let coker_i1 = i1.cokernel();
    Ok(SubquotientK {
        i0,
        i1,
        k0,
        ker_i0,
        coker_i1,
    })
}
