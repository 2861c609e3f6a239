//! Proper correspondences from `C*(G)` into finite-dimensional targets
//! `B = ⊕ M_{n_i}`, given as families `((ℋ_v), (U_v))` with
//! `U_v: ⊕_{e ∈ E^v} ℋ_{s(e)} → ℋ_v` unitary.
//!
//! A Hilbert module over `M_n` with rank `d` has compact operators `M_d`,
//! so each `U_v` is a list of `d_{v,i} × d_{v,i}` unitaries, one per block.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::vset::VertexSet;

pub type CMatrix = DMatrix<Complex64>;

pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdTarget {
    pub blocks: Vec<usize>,
}

impl FdTarget {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.contains(&0) {
            return Err(Error::Parse {
                line: 0,
                msg: "block sizes must be positive".into(),
            });
        }
        Ok(FdTarget { blocks })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitaryChoice {
    /// Each `U_v` is the identity in the edge order of `E^v`.
    Identity,
    /// Haar-distributed unitaries from a seeded generator.
    Haar(u64),
}

#[derive(Debug, Clone)]
pub struct CorrespondenceFamily {
    pub target: FdTarget,
    /// `dims[v][i]`: rank of `ℋ_v` over the `i`-th block.
    pub dims: Vec<Vec<usize>>,
    /// Per regular vertex, one unitary per block.
    pub unitaries: Vec<Option<Vec<CMatrix>>>,
    pub seed: Option<u64>,
}

fn check_dims(g: &Graph, target: &FdTarget, dims: &[Vec<usize>]) -> Result<()> {
    if dims.len() != g.vertex_count() || dims.iter().any(|d| d.len() != target.len()) {
        return Err(Error::DimsMismatch);
    }
    for v in (0..g.vertex_count()).filter(|&v| g.is_regular(v)) {
        for (i, &d) in dims[v].iter().enumerate() {
            let sum: usize = g.incoming(v).iter().map(|&e| dims[g.src(e)][i]).sum();
            if sum != d {
                return Err(Error::DimensionEquationViolated {
                    vertex: g.vertex_id(v).to_string(),
                    block: i,
                });
            }
        }
    }
    Ok(())
}

/// A Haar-random `n × n` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Builds a family realising the monoid homomorphism `[p_v] ↦ dims[v]`
/// into `𝒫(B) = ℕ^k`.
pub fn lift_monoid_hom_fd(
    g: &Graph,
    target: &FdTarget,
    dims: Vec<Vec<usize>>,
    choice: UnitaryChoice,
) -> Result<CorrespondenceFamily> {
    check_dims(g, target, &dims)?;
    let mut rng = match choice {
        UnitaryChoice::Haar(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        UnitaryChoice::Identity => None,
    };
    let unitaries = (0..g.vertex_count())
        .map(|v| {
            g.is_regular(v).then(|| {
                (0..target.len())
                    .map(|i| match rng.as_mut() {
                        Some(r) => haar_unitary(dims[v][i], r),
                        None => CMatrix::identity(dims[v][i], dims[v][i]),
                    })
                    .collect()
            })
        })
        .collect();
    Ok(CorrespondenceFamily {
        target: target.clone(),
        dims,
        unitaries,
        seed: match choice {
            UnitaryChoice::Haar(s) => Some(s),
            UnitaryChoice::Identity => None,
        },
    })
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `T_e = U_v J_e`, where `J_e` includes `ℋ_{s(e)}` as the `e`-th summand.
pub fn edge_operator(g: &Graph, f: &CorrespondenceFamily, e: usize, block: usize) -> CMatrix {
    let v = g.rng(e);
    let u = &f.unitaries[v].as_ref().expect("range of an edge is regular")[block];
    let mut offset = 0;
    for &x in g.incoming(v) {
        if x == e {
            break;
        }
        offset += f.dims[g.src(x)][block];
    }
    let width = f.dims[g.src(e)][block];
    u.columns(offset, width).into_owned()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CkReport {
    /// `(relation, block, residual)` for every relation checked.
    pub residuals: Vec<(String, usize, f64)>,
    pub max_residual: f64,
}

/// Operator-norm residuals of `T_e* T_e = P_{s(e)}` and
/// `Σ_{e ∈ E^v} T_e T_e* = P_v`.
pub fn verify_ck(f: &CorrespondenceFamily, g: &Graph) -> CkReport {
    let mut residuals = Vec::new();
    for i in 0..f.target.len() {
        for e in 0..g.edge_count() {
            let t = edge_operator(g, f, e, i);
            let d = f.dims[g.src(e)][i];
            let r = op_norm(&(t.adjoint() * &t - CMatrix::identity(d, d)));
            residuals.push((format!("ck1 {}", g.edge_id(e)), i, r));
        }
        for v in (0..g.vertex_count()).filter(|&v| g.is_regular(v)) {
            let d = f.dims[v][i];
            let mut sum = CMatrix::zeros(d, d);
            for &e in g.incoming(v) {
                let t = edge_operator(g, f, e, i);
                sum += &t * t.adjoint();
            }
            let r = op_norm(&(sum - CMatrix::identity(d, d)));
            residuals.push((format!("ck2 {}", g.vertex_id(v)), i, r));
        }
    }
    let max_residual = residuals.iter().map(|r| r.2).fold(0.0, f64::max);
    CkReport {
        residuals,
        max_residual,
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryDifference {
    /// `Υ_v = U'_v U_v*` per regular vertex and block.
    pub upsilon: Vec<Option<Vec<CMatrix>>>,
    /// `max ‖Υ_v U_v − U'_v‖`.
    pub roundtrip_error: f64,
}

pub fn unitary_difference(f1: &CorrespondenceFamily, f2: &CorrespondenceFamily) -> Result<UnitaryDifference> {
    if f1.dims != f2.dims || f1.unitaries.len() != f2.unitaries.len() {
        return Err(Error::DimsMismatch);
    }
    let mut err: f64 = 0.0;
    let upsilon = f1
        .unitaries
        .iter()
        .zip(&f2.unitaries)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .zip(b)
                    .map(|(u, u2)| {
                        let y = u2 * u.adjoint();
                        err = err.max(op_norm(&(&y * u - u2)));
                        y
                    })
                    .collect(),
            ),
            _ => None,
        })
        .collect();
    Ok(UnitaryDifference {
        upsilon,
        roundtrip_error: err,
    })
}

#[derive(Debug, Clone)]
pub struct Alignment {
    /// `W_v` per vertex and block.
    pub w: Vec<Vec<CMatrix>>,
    /// `U''_v = W_v U'_v (⊕ W_{s(e)})*` for every regular vertex.
    pub conjugated: Vec<Option<Vec<CMatrix>>>,
    /// `max_{v ∈ F} ‖U''_v − U_v‖`.
    pub residual: f64,
}

/// Block-diagonal sum `⊕_{e ∈ E^v} W_{s(e)}` in the edge order of `E^v`.
fn incoming_sum(g: &Graph, w: &[Vec<CMatrix>], dims: &[Vec<usize>], v: usize, block: usize) -> CMatrix {
    let d = dims[v][block];
    let mut m = CMatrix::zeros(d, d);
    let mut offset = 0;
    for &e in g.incoming(v) {
        let s = g.src(e);
        let k = dims[s][block];
        m.view_mut((offset, offset), (k, k)).copy_from(&w[s][block]);
        offset += k;
    }
    m
}

/// For acyclic `G`, an isomorphism `(W_v)` from `f2` to a family agreeing
/// with `f1` on the regular vertices in `F`: in topological order,
/// `W_v = U_v (⊕ W_{s(e)}) U'_v*` for `v ∈ F` and `W_v = 1` elsewhere.
pub fn align_af(g: &Graph, f1: &CorrespondenceFamily, f2: &CorrespondenceFamily, f: VertexSet) -> Result<Alignment> {
    let order = g.topological_order().ok_or(Error::HasCycle)?;
    if f1.dims != f2.dims || f1.target != f2.target {
        return Err(Error::DimsMismatch);
    }
    let k = f1.target.len();
    let dims = &f1.dims;
    let mut w: Vec<Vec<CMatrix>> = (0..g.vertex_count())
        .map(|v| (0..k).map(|i| CMatrix::identity(dims[v][i], dims[v][i])).collect())
        .collect();
    for &v in &order {
        if !f.contains(v) || !g.is_regular(v) {
            continue;
        }
        let u = f1.unitaries[v].as_ref().expect("regular");
        let u2 = f2.unitaries[v].as_ref().expect("regular");
        for i in 0..k {
            let sum = incoming_sum(g, &w, dims, v, i);
            w[v][i] = &u[i] * sum * u2[i].adjoint();
        }
    }
    let conjugated: Vec<Option<Vec<CMatrix>>> = (0..g.vertex_count())
        .map(|v| {
            f2.unitaries[v].as_ref().map(|u2| {
                (0..k)
                    .map(|i| &w[v][i] * &u2[i] * incoming_sum(g, &w, dims, v, i).adjoint())
                    .collect()
            })
        })
        .collect();
    let mut residual: f64 = 0.0;
    for v in f.iter().filter(|&v| g.is_regular(v)) {
        let u = f1.unitaries[v].as_ref().expect("regular");
        let c = conjugated[v].as_ref().expect("regular");
        for i in 0..k {
            residual = residual.max(op_norm(&(&c[i] - &u[i])));
        }
    }
    Ok(Alignment {
        w,
        conjugated,
        residual,
    })
}

/// Largest `‖U* U − 1‖` over all unitaries of the family.
pub fn unitarity_defect(f: &CorrespondenceFamily) -> f64 {
    f.unitaries
        .iter()
        .flatten()
        .flatten()
        .map(|u| op_norm(&(u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols()))))
        .fold(0.0, f64::max)
}
