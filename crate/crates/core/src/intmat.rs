//! Dense matrices over arbitrary-precision integers, Smith and Hermite
//! normal forms, and integer linear system solving.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        IntMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Block-diagonal sum of a list of matrices.
    pub fn block_diag(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Rows `r0..r1` as a new matrix.
    pub fn row_range(&self, r0: usize, r1: usize) -> Self {
        IntMatrix {
            rows: r1 - r0,
            cols: self.cols,
            data: self.data[r0 * self.cols..r1 * self.cols].to_vec(),
        }
    }

    /// Columns `c0..c1` as a new matrix.
    pub fn col_range(&self, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(self.rows, c1 - c0);
        for i in 0..self.rows {
            for j in c0..c1 {
                m[(i, j - c0)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Adds `block` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &IntMatrix, scale: &BigInt) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                let v = &block[(i, j)] * scale;
                self[(r0 + i, c0 + j)] += v;
            }
        }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.shape(), other.shape());
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.shape(), other.shape());
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row_i += c * row_j`
    fn add_row_multiple(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let v = &self[(j, k)] * c;
            if !v.is_zero() {
                self[(i, k)] += v;
            }
        }
    }

    /// `col_i += c * col_j`
    fn add_col_multiple(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.rows {
            let v = &self[(k, j)] * c;
            if !v.is_zero() {
                self[(k, i)] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -&self[(i, k)];
            self[(i, k)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let v = -&self[(k, j)];
            self[(k, j)] = v;
        }
    }

    /// Rendering as nested decimal strings, row-major.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Result of a Smith normal form computation: `u * a * v = d`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl Smith {
    /// Nonzero diagonal entries, in order; each divides the next.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form with least-absolute-value pivoting.
///
/// Returns unimodular `u` (with its inverse) and `v` so that `u * a * v`
/// is diagonal, with positive diagonal entries forming a divisibility chain.
pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = a.shape();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&d, t) else {
            break;
        };
        if pi != t {
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
        }
        if pj != t {
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
        }
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                let neg_q = -q;
                d.add_row_multiple(i, t, &neg_q);
                u.add_row_multiple(i, t, &neg_q);
                // inverse of row_i += c row_t is col_t -= c col_i on the right
                u_inv.add_col_multiple(t, i, &-&neg_q);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                let neg_q = -q;
                d.add_col_multiple(j, t, &neg_q);
                v.add_col_multiple(j, t, &neg_q);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is smaller than the pivot: re-pivot inside row/column t
                let mut best: Option<(usize, usize)> = None;
                let mut best_abs = d[(t, t)].abs();
                for i in t + 1..m {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < best_abs {
                        best_abs = d[(i, t)].abs();
                        best = Some((i, t));
                    }
                }
                for j in t + 1..n {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < best_abs {
                        best_abs = d[(t, j)].abs();
                        best = Some((t, j));
                    }
                }
                if let Some((i, j)) = best {
                    if i != t {
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        u_inv.swap_cols(t, i);
                    }
                    if j != t {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                    }
                }
                continue;
            }
            // divisibility: pivot must divide the remaining block
            let mut bad_row = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                        bad_row = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-&one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    Smith {
        u,
        u_inv,
        d,
        v,
        rank: t,
    }
}

fn min_abs_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.is_none() || a < best_abs {
                best_abs = a;
                best = Some((i, j));
            }
        }
    }
    best
}

/// A basis of the integer kernel `{x : a x = 0}`, as columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    s.v.col_range(s.rank, a.cols())
}

/// Solves `a x = b` over the integers. Returns `None` when no integer
/// solution exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    solve_with(&smith_normal_form(a), a.cols(), b)
}

/// Like [`solve`], reusing a precomputed Smith form of `a`.
pub fn solve_with(s: &Smith, ncols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); ncols];
    for (i, ubi) in ub.iter().enumerate() {
        if i < s.rank {
            let (q, r) = ubi.div_rem(&s.d[(i, i)]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ubi.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Column-style Hermite normal form of the lattice spanned by the columns
/// of `a`: returns a basis (as columns) in echelon form with positive
/// pivots and reduced entries in pivot rows. Zero columns are dropped.
pub fn hermite_basis(a: &IntMatrix) -> IntMatrix {
    // work on rows of the transpose
    let mut t = a.transpose();
    let (m, n) = t.shape();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        // Euclid on column c among rows r..m
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if !t[(i, c)].is_zero() && best.is_none_or(|b| t[(i, c)].abs() < t[(b, c)].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            t.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if t[(i, c)].is_zero() {
                    continue;
                }
                let q = t[(i, c)].div_floor(&t[(r, c)]);
                t.add_row_multiple(i, r, &-q);
                if !t[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if t[(r, c)].is_zero() {
            continue;
        }
        if t[(r, c)].is_negative() {
            t.negate_row(r);
        }
        for i in 0..r {
            let q = t[(i, c)].div_floor(&t[(r, c)]);
            t.add_row_multiple(i, r, &-q);
        }
        pivots.push(c);
        r += 1;
    }
    t.row_range(0, r).transpose()
}

/// Integer vector helpers.
pub fn vec_is_zero(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn unit_vec(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

pub fn to_bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
