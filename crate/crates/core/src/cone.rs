//! The submonoid of a presented group generated by its generators, i.e.
//! `K0⁺ = π(ℕ[W])` when the group is `K0(W)` on the generators `δ_v`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::group::FgGroup;
use crate::intmat::IntMatrix;
use crate::lp::{nonneg_solution, Feasibility};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeAnswer {
    /// A witness `c ∈ ℕ^n` with the same class.
    Yes(Vec<BigInt>),
    No(ConeCertificate),
    /// Bounded search gave up; carries the bound used.
    Unknown(usize),
}

impl ConeAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, ConeAnswer::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, ConeAnswer::No(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeCertificate {
    /// An integer functional on generators, vanishing on relations, that is
    /// nonnegative on every generator and negative on the element.
    Functional(Vec<BigInt>),
    /// A complete search found no witness.
    Exhausted,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

fn rationals_to_ints(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

/// A strictly positive integer combination of the generators whose class
/// is zero, if one exists. Its existence is equivalent to the monoid being
/// a group.
pub fn positive_zero_combination(g: &FgGroup) -> Option<Vec<BigInt>> {
    let n = g.ngens();
    let f = g.free_projection();
    // n = 1 + m with F m = -F·1, m ≥ 0
    let ones = vec![BigInt::one(); n];
    let rhs: Vec<BigInt> = f.mul_vec(&ones).into_iter().map(|x| -x).collect();
    match nonneg_solution(&f, &rhs) {
        Feasibility::Feasible(m) => {
            let shifted: Vec<BigRational> = m.iter().map(|x| x + BigRational::one()).collect();
            let e = g.exponent();
            let out: Vec<BigInt> = rationals_to_ints(&shifted).into_iter().map(|x| x * &e).collect();
            debug_assert!(g.is_zero(&out));
            Some(out)
        }
        Feasibility::Infeasible(_) => None,
    }
}

/// Whether the generated monoid is all of the group. Complete: decided by
/// rational linear programming on the free part.
pub fn cone_is_group(g: &FgGroup) -> bool {
    positive_zero_combination(g).is_some()
}

/// Decides whether `x` lies in the monoid generated by the generators.
///
/// Complete when the monoid is a group, and when the rational cone of the
/// free parts of the generators is pointed (then a positive functional
/// bounds every witness). Otherwise a bounded search with coefficients up to
/// `bound` is used. `cap` limits the number of candidates examined.
pub fn cone_member(g: &FgGroup, x: &[BigInt], bound: usize, cap: usize) -> ConeAnswer {
    let n = g.ngens();
    if g.is_zero(x) {
        return ConeAnswer::Yes(vec![BigInt::zero(); n]);
    }
    let f = g.free_projection();
    let fx = f.mul_vec(x);
    if let Feasibility::Infeasible(z) = nonneg_solution(&f, &fx) {
        // pull the certificate back to generator space
        let lambda = f.transpose().mul_vec(&z);
        return ConeAnswer::No(ConeCertificate::Functional(lambda));
    }
    if let Some(p) = positive_zero_combination(g) {
        let mut t = BigInt::zero();
        for (xi, pi) in x.iter().zip(&p) {
            if xi.is_negative() {
                t = t.max(ceil_div(&-xi, pi));
            }
        }
        let c: Vec<BigInt> = x.iter().zip(&p).map(|(xi, pi)| xi + &t * pi).collect();
        debug_assert!(g.equal(&c, x));
        return ConeAnswer::Yes(c);
    }
    // generators with zero free part are torsion; their ℕ-span is their ℤ-span
    let free_cols = f.columns();
    let zero_set: Vec<usize> = (0..n).filter(|&v| free_cols[v].iter().all(Zero::is_zero)).collect();
    let active: Vec<usize> = (0..n).filter(|v| !zero_set.contains(v)).collect();
    let torsion_gens = IntMatrix::from_columns(
        n,
        &zero_set
            .iter()
            .map(|&v| crate::intmat::unit_vec(n, v))
            .collect::<Vec<_>>(),
    );
    let e = g.exponent();
    let finish = |c_active: &[BigInt]| -> Option<Vec<BigInt>> {
        let mut c = vec![BigInt::zero(); n];
        for (&v, cv) in active.iter().zip(c_active) {
            c[v] = cv.clone();
        }
        let rest: Vec<BigInt> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        if f.mul_vec(&rest).iter().any(|y| !y.is_zero()) {
            return None;
        }
        let z = g.in_span(&torsion_gens, &rest)?;
        for (&v, zv) in zero_set.iter().zip(&z) {
            c[v] = zv.mod_floor(&e);
        }
        debug_assert!(g.equal(&c, x));
        Some(c)
    };
    let weights = pointed_functional(&f, &active);
    let mut examined = 0usize;
    match weights {
        Some((lambda, w)) => {
            // Σ w_v c_v = λ·f(x) bounds every witness
            let target: BigInt = lambda.iter().zip(&fx).map(|(a, b)| a * b).sum();
            let mut c = vec![BigInt::zero(); active.len()];
            let mut found = None;
            let walk = enumerate_weighted(&w, &target, 0, &mut c, &mut examined, cap, &mut |c| {
                if let Some(w) = finish(c) {
                    found = Some(w);
                    true
                } else {
                    false
                }
            });
            match found {
                Some(c) => ConeAnswer::Yes(c),
                None if walk == Walk::Continue => ConeAnswer::No(ConeCertificate::Exhausted),
                None => ConeAnswer::Unknown(bound),
            }
        }
        None => {
            // bounded search by increasing ℓ1 norm
            for total in 0..=bound * active.len() {
                let mut c = vec![BigInt::zero(); active.len()];
                let mut found = None;
                let walk = enumerate_l1(total, bound, 0, &mut c, &mut examined, cap, &mut |c| {
                    if let Some(w) = finish(c) {
                        found = Some(w);
                        true
                    } else {
                        false
                    }
                });
                if let Some(c) = found {
                    return ConeAnswer::Yes(c);
                }
                if walk == Walk::Capped {
                    break;
                }
            }
            ConeAnswer::Unknown(bound)
        }
    }
}

/// A functional `λ` with `λ·a_v ≥ 1` on the free parts of the active
/// generators, scaled to integers, together with the weights `λ·a_v`.
fn pointed_functional(f: &IntMatrix, active: &[usize]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let r = f.rows();
    let k = active.len();
    if k == 0 {
        return Some((vec![BigInt::zero(); r], Vec::new()));
    }
    // a_vᵀ(λ⁺ − λ⁻) − s_v = 1
    let mut a = IntMatrix::zeros(k, 2 * r + k);
    for (i, &v) in active.iter().enumerate() {
        for j in 0..r {
            a[(i, j)] = f[(j, v)].clone();
            a[(i, r + j)] = -&f[(j, v)];
        }
        a[(i, 2 * r + i)] = -BigInt::one();
    }
    let ones = vec![BigInt::one(); k];
    match nonneg_solution(&a, &ones) {
        Feasibility::Feasible(sol) => {
            let lam: Vec<BigRational> = (0..r).map(|j| &sol[j] - &sol[r + j]).collect();
            let lam = rationals_to_ints(&lam);
            let w: Vec<BigInt> = active
                .iter()
                .map(|&v| (0..r).map(|j| &lam[j] * &f[(j, v)]).sum())
                .collect();
            Some((lam, w))
        }
        Feasibility::Infeasible(_) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Walk {
    Continue,
    Found,
    Capped,
}

/// Enumerates `c ≥ 0` with `Σ w_i c_i = target`; the visitor returns true
/// to stop at a witness.
fn enumerate_weighted(
    w: &[BigInt],
    target: &BigInt,
    i: usize,
    c: &mut Vec<BigInt>,
    examined: &mut usize,
    cap: usize,
    visit: &mut dyn FnMut(&[BigInt]) -> bool,
) -> Walk {
    if i == w.len() {
        if !target.is_zero() {
            return Walk::Continue;
        }
        *examined += 1;
        if *examined > cap {
            return Walk::Capped;
        }
        return if visit(c) { Walk::Found } else { Walk::Continue };
    }
    let max = target / &w[i];
    let mut k = BigInt::zero();
    while k <= max {
        c[i] = k.clone();
        let rest = target - &w[i] * &k;
        match enumerate_weighted(w, &rest, i + 1, c, examined, cap, visit) {
            Walk::Continue => {}
            stop => return stop,
        }
        k += 1;
    }
    c[i] = BigInt::zero();
    Walk::Continue
}

/// Enumerates `c` with entries in `[0, bound]` and `Σ c_i = total`, in
/// lexicographic order.
fn enumerate_l1(
    total: usize,
    bound: usize,
    i: usize,
    c: &mut Vec<BigInt>,
    examined: &mut usize,
    cap: usize,
    visit: &mut dyn FnMut(&[BigInt]) -> bool,
) -> Walk {
    if i == c.len() {
        if total != 0 {
            return Walk::Continue;
        }
        *examined += 1;
        if *examined > cap {
            return Walk::Capped;
        }
        return if visit(c) { Walk::Found } else { Walk::Continue };
    }
    let rest_cap = bound * (c.len() - i - 1);
    let lo = total.saturating_sub(rest_cap);
    for k in lo..=total.min(bound) {
        c[i] = BigInt::from(k);
        match enumerate_l1(total - k, bound, i + 1, c, examined, cap, visit) {
            Walk::Continue => {}
            stop => return stop,
        }
    }
    c[i] = BigInt::zero();
    Walk::Continue
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intmat::to_bigs;

    fn z() -> FgGroup {
        FgGroup::free(1)
    }

    #[test]
    fn single_loop_cone_is_naturals() {
        let g = z();
        assert_eq!(
            cone_member(&g, &to_bigs(&[2]), 12, 1000),
            ConeAnswer::Yes(to_bigs(&[2]))
        );
        match cone_member(&g, &to_bigs(&[-1]), 12, 1000) {
            ConeAnswer::No(ConeCertificate::Functional(l)) => assert!(l[0].is_positive()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(!cone_is_group(&g));
    }

    #[test]
    fn trivial_group_contains_zero() {
        // O2: K0 = ℤ/(−1) = 0
        let g = FgGroup::new(IntMatrix::from_i64(1, 1, &[-1]));
        assert!(cone_member(&g, &to_bigs(&[0]), 12, 1000).is_yes());
        assert!(cone_is_group(&g));
    }

    #[test]
    fn finite_group_is_all_positive() {
        let g = FgGroup::new(IntMatrix::from_i64(1, 1, &[5]));
        match cone_member(&g, &to_bigs(&[-7]), 12, 1000) {
            ConeAnswer::Yes(c) => {
                assert!(c.iter().all(|x| !x.is_negative()));
                assert!(g.equal(&c, &to_bigs(&[-7])));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mixed_signs_make_a_group() {
        // ℤ^2 / (1, 1): generators map to 1 and -1
        let g = FgGroup::new(IntMatrix::from_i64(2, 1, &[1, 1]));
        assert!(cone_is_group(&g));
        assert!(cone_member(&g, &to_bigs(&[-3, 0]), 12, 1000).is_yes());
    }

    #[test]
    fn pointed_cone_with_torsion_is_decided() {
        // ℤ ⊕ ℤ/2 with generators (1, 0) and (0, 1)
        let g = FgGroup::new(IntMatrix::from_i64(2, 1, &[0, 2]));
        assert!(!cone_is_group(&g));
        assert!(cone_member(&g, &to_bigs(&[3, -1]), 12, 1000).is_yes());
        // free coordinate 2 with only one generator (1,0) carrying it, torsion
        // generator supplies the rest: always reachable
        assert!(cone_member(&g, &to_bigs(&[2, 1]), 12, 1000).is_yes());
        assert!(cone_member(&g, &to_bigs(&[-1, 0]), 12, 1000).is_no());
    }

    #[test]
    fn exhausted_search_proves_absence() {
        // ℤ generated by the generator 2 (as a presentation of 2ℤ ⊕ torsion):
        // group ℤ^2/(2, -1) ≅ ℤ, generators map to 1 and 2
        let g = FgGroup::new(IntMatrix::from_i64(2, 1, &[2, -1]));
        assert!(!cone_is_group(&g));
        assert!(cone_member(&g, &to_bigs(&[0, 1]), 12, 1000).is_yes());
        // ℤ^2/(3, -2) ≅ ℤ with generators 2 and 3: the class 1 is missed
        let h = FgGroup::new(IntMatrix::from_i64(2, 1, &[3, -2]));
        assert_eq!(
            cone_member(&h, &to_bigs(&[-1, 1]), 12, 1000),
            ConeAnswer::No(ConeCertificate::Exhausted)
        );
        assert!(cone_member(&h, &to_bigs(&[-1, 2]), 12, 1000).is_yes());
    }
}
