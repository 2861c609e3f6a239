//! Finitely generated abelian groups given by presentations `ℤ^n / R`,
//! and homomorphisms between them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::intmat::{hermite_basis, kernel_basis, smith_normal_form, solve, IntMatrix, Smith};

/// Isomorphism type: free rank plus torsion invariant factors `d1 | d2 | …`,
/// each greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupType {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl GroupType {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The group `ℤ^n / im(rels)`, where `rels` is `n × r`.
#[derive(Clone, Debug)]
pub struct FgGroup {
    rels: IntMatrix,
    smith: Smith,
}

impl PartialEq for FgGroup {
    fn eq(&self, other: &Self) -> bool {
        self.rels == other.rels
    }
}

impl FgGroup {
    pub fn new(rels: IntMatrix) -> Self {
        let smith = smith_normal_form(&rels);
        FgGroup { rels, smith }
    }

    pub fn free(n: usize) -> Self {
        Self::new(IntMatrix::zeros(n, 0))
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// `⊕ ℤ/d_i ⊕ ℤ^r`.
    pub fn from_type(t: &GroupType) -> Self {
        let n = t.torsion.len() + t.free_rank;
        let mut rels = IntMatrix::zeros(n, t.torsion.len());
        for (i, d) in t.torsion.iter().enumerate() {
            rels[(i, i)] = d.clone();
        }
        Self::new(rels)
    }

    /// Direct sum, with generators concatenated.
    pub fn direct_sum(parts: &[&FgGroup]) -> Self {
        let blocks: Vec<&IntMatrix> = parts.iter().map(|g| &g.rels).collect();
        Self::new(IntMatrix::block_diag(&blocks))
    }

    pub fn ngens(&self) -> usize {
        self.rels.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.rels
    }

    pub fn smith(&self) -> &Smith {
        &self.smith
    }

    pub fn group_type(&self) -> GroupType {
        let torsion = self.smith.diagonal().into_iter().filter(|d| !d.is_one()).collect();
        GroupType {
            free_rank: self.ngens() - self.smith.rank,
            torsion,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.ngens() - self.smith.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.group_type().is_trivial()
    }

    /// Largest torsion invariant factor (1 if torsion-free).
    pub fn exponent(&self) -> BigInt {
        self.smith.diagonal().last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Canonical coordinates of `x`: torsion residues in `[0, d_i)` for
    /// each nontrivial factor, then the free coordinates.
    pub fn coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ngens(), "element length mismatch");
        let y = self.smith.u.mul_vec(x);
        let mut out = Vec::new();
        for (i, yi) in y.into_iter().enumerate() {
            if i < self.smith.rank {
                let d = &self.smith.d[(i, i)];
                if !d.is_one() {
                    out.push(yi.mod_floor(d));
                }
            } else {
                out.push(yi);
            }
        }
        out
    }

    /// Free coordinates only.
    pub fn free_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.smith.u.mul_vec(x);
        y[self.smith.rank..].to_vec()
    }

    /// Linear map to free coordinates, as an `r × n` matrix.
    pub fn free_projection(&self) -> IntMatrix {
        self.smith.u.row_range(self.smith.rank, self.ngens())
    }

    /// Inverse of [`coords`](Self::coords): an integer vector with the given
    /// canonical coordinates.
    pub fn from_coords(&self, c: &[BigInt]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.ngens()];
        let mut k = 0;
        for (i, yi) in y.iter_mut().enumerate() {
            if i < self.smith.rank && self.smith.d[(i, i)].is_one() {
                continue;
            }
            *yi = c[k].clone();
            k += 1;
        }
        assert_eq!(k, c.len(), "coordinate length mismatch");
        self.smith.u_inv.mul_vec(&y)
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.coords(x).iter().all(Zero::is_zero)
    }

    pub fn equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let d: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&d)
    }

    /// Whether `x` lies in the subgroup generated by the columns of `gens`.
    pub fn in_span(&self, gens: &IntMatrix, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let a = gens.hcat(&self.rels);
        solve(&a, x).map(|z| z[..gens.cols()].to_vec())
    }

    /// Enumerates all elements when the group is finite and has at most
    /// `cap` elements; each is given by an integer representative.
    pub fn finite_elements(&self, cap: usize) -> Option<Vec<Vec<BigInt>>> {
        let t = self.group_type();
        if t.free_rank > 0 {
            return None;
        }
        let mut order = BigInt::one();
        for d in &t.torsion {
            order *= d;
        }
        if order > BigInt::from(cap) {
            return None;
        }
        let mut out = Vec::new();
        let mut c = vec![BigInt::zero(); t.torsion.len()];
        loop {
            out.push(self.from_coords(&c));
            let mut i = 0;
            loop {
                if i == c.len() {
                    return Some(out);
                }
                c[i] += 1;
                if c[i] < t.torsion[i] {
                    break;
                }
                c[i] = BigInt::zero();
                i += 1;
            }
        }
    }
}

impl fmt::Display for FgGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.group_type())
    }
}

/// A homomorphism given by its matrix on generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub domain: FgGroup,
    pub codomain: FgGroup,
    pub matrix: IntMatrix,
}

/// A subgroup or subquotient realised as its own presented group, together
/// with the matrix sending its generators into the ambient generators.
#[derive(Clone, Debug)]
pub struct Embedded {
    pub group: FgGroup,
    pub inclusion: IntMatrix,
}

impl GroupHom {
    pub fn new(domain: FgGroup, codomain: FgGroup, matrix: IntMatrix) -> Self {
        assert_eq!(
            matrix.shape(),
            (codomain.ngens(), domain.ngens()),
            "hom matrix shape mismatch"
        );
        GroupHom {
            domain,
            codomain,
            matrix,
        }
    }

    pub fn identity(g: &FgGroup) -> Self {
        Self::new(g.clone(), g.clone(), IntMatrix::identity(g.ngens()))
    }

    pub fn zero(domain: &FgGroup, codomain: &FgGroup) -> Self {
        Self::new(
            domain.clone(),
            codomain.clone(),
            IntMatrix::zeros(codomain.ngens(), domain.ngens()),
        )
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// A matrix `C` with `matrix · rels_dom = rels_cod · C`, proving the map
    /// is well defined; `None` if it is not.
    pub fn well_definedness_certificate(&self) -> Option<IntMatrix> {
        let image = &self.matrix * self.domain.relations();
        let cod = self.codomain.relations();
        let mut cols = Vec::new();
        for j in 0..image.cols() {
            cols.push(solve(cod, &image.column(j))?);
        }
        Some(IntMatrix::from_columns(cod.cols(), &cols))
    }

    pub fn is_well_defined(&self) -> bool {
        self.well_definedness_certificate().is_some()
    }

    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        GroupHom::new(
            first.domain.clone(),
            self.codomain.clone(),
            &self.matrix * &first.matrix,
        )
    }

    /// Equality as maps of groups.
    pub fn equals(&self, other: &GroupHom) -> bool {
        assert_eq!(self.matrix.shape(), other.matrix.shape());
        let d = self.matrix.sub(&other.matrix);
        (0..d.cols()).all(|j| self.codomain.is_zero(&d.column(j)))
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.codomain.is_zero(&self.matrix.column(j)))
    }

    /// The kernel, presented on a basis of the lattice
    /// `{x : matrix · x ∈ im rels_cod}`.
    pub fn kernel(&self) -> Embedded {
        let n = self.domain.ngens();
        let big = self.matrix.hcat(self.codomain.relations());
        let k = kernel_basis(&big);
        let span = k.row_range(0, n);
        let basis = hermite_basis(&span);
        let rels_dom = self.domain.relations();
        let mut cols = Vec::new();
        for j in 0..rels_dom.cols() {
            let z = solve(&basis, &rels_dom.column(j)).expect("domain relations lie in the kernel lattice");
            cols.push(z);
        }
        Embedded {
            group: FgGroup::new(IntMatrix::from_columns(basis.cols(), &cols)),
            inclusion: basis,
        }
    }

    /// The cokernel, presented on the codomain generators.
    pub fn cokernel(&self) -> FgGroup {
        FgGroup::new(self.codomain.relations().hcat(&self.matrix))
    }

    /// The image, as a subgroup of the codomain.
    pub fn image(&self) -> Embedded {
        let cod = self.codomain.relations();
        let span = hermite_basis(&self.matrix.hcat(cod));
        let mut cols = Vec::new();
        for j in 0..cod.cols() {
            cols.push(solve(&span, &cod.column(j)).expect("relations lie in the span"));
        }
        Embedded {
            group: FgGroup::new(IntMatrix::from_columns(span.cols(), &cols)),
            inclusion: span,
        }
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_isomorphism() {
            return None;
        }
        let full = self.matrix.hcat(self.codomain.relations());
        let mut cols = Vec::new();
        for j in 0..self.codomain.ngens() {
            let target = crate::intmat::unit_vec(self.codomain.ngens(), j);
            let z = solve(&full, &target)?;
            cols.push(z[..self.domain.ngens()].to_vec());
        }
        Some(GroupHom::new(
            self.codomain.clone(),
            self.domain.clone(),
            IntMatrix::from_columns(self.domain.ngens(), &cols),
        ))
    }
}

/// The subquotient `S / T` of a presented group, where `sub` spans a
/// subgroup `S` of the ambient group and `quot` spans a subgroup `T ⊆ S`.
/// Both are given as integer columns in ambient generators.
pub fn subquotient(ambient: &FgGroup, sub: &Embedded, quot: &IntMatrix) -> Embedded {
    let mut rels = sub.group.relations().clone();
    let extra = sub.inclusion.hcat(ambient.relations());
    let k = sub.inclusion.cols();
    for j in 0..quot.cols() {
        let z = solve(&extra, &quot.column(j)).expect("quotient lies in the subgroup");
        let col = IntMatrix::from_columns(k, &[z[..k].to_vec()]);
        rels = rels.hcat(&col);
    }
    Embedded {
        group: FgGroup::new(rels),
        inclusion: sub.inclusion.clone(),
    }
}

/// Determinant-free invertibility test of an integer square matrix.
pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && m.determinant().abs().is_one()
}

/// Smallest absolute-value first, then lexicographic: a deterministic
/// order on small integer vectors.
pub fn vec_key(v: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let l1 = v.iter().map(|x| x.abs()).fold(BigInt::zero(), |a, b| a + b);
    (l1, v.to_vec())
}
