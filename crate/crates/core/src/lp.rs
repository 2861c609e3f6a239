//! Exact feasibility of `A λ = b, λ ≥ 0` over the rationals, by phase-one
//! simplex with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::intmat::IntMatrix;

/// Either a nonnegative rational solution, or a Farkas certificate `z`
/// with `zᵀA ≥ 0` and `zᵀb < 0` (scaled to integers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    Infeasible(Vec<BigInt>),
}

pub fn nonneg_solution(a: &IntMatrix, b: &[BigInt]) -> Feasibility {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let sign: Vec<BigInt> = b
        .iter()
        .map(|x| if x.is_negative() { -BigInt::one() } else { BigInt::one() })
        .collect();
    let width = n + m;
    // rows: [A | I | b], with rows flipped so b ≥ 0
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| q(&(&a[(i, j)] * &sign[i]))).collect();
            row.extend((0..m).map(|k| {
                if k == i {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row.push(q(&(&b[i] * &sign[i])));
            row
        })
        .collect();
    let cost = |j: usize| -> BigRational {
        if j >= n {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    };
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let reduced: Vec<BigRational> = (0..width)
            .map(|j| {
                let mut d = cost(j);
                for i in 0..m {
                    d -= cost(basis[i]) * &t[i][j];
                }
                d
            })
            .collect();
        let Some(enter) = (0..width).find(|&j| reduced[j].is_negative()) else {
            let objective: BigRational = (0..m).map(|i| cost(basis[i]) * &t[i][width]).sum();
            if objective.is_zero() {
                let mut lambda = vec![BigRational::zero(); n];
                for i in 0..m {
                    if basis[i] < n {
                        lambda[basis[i]] = t[i][width].clone();
                    }
                }
                return Feasibility::Feasible(lambda);
            }
            // multipliers y_i = 1 - reduced cost of artificial i
            let y: Vec<BigRational> = (0..m).map(|i| BigRational::one() - &reduced[n + i]).collect();
            let z: Vec<BigRational> = y.iter().zip(&sign).map(|(yi, s)| -(yi * q(s))).collect();
            return Feasibility::Infeasible(clear_denominators(&z));
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width] / &t[i][enter];
            match leave {
                None => leave = Some(i),
                Some(l) => {
                    let best = &t[l][width] / &t[l][enter];
                    if ratio < best || (ratio == best && basis[i] < basis[l]) {
                        leave = Some(i);
                    }
                }
            }
        }
        let r = leave.expect("phase-one objective is bounded below");
        let p = t[r][enter].clone();
        for x in t[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, pr) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * pr;
            }
        }
        basis[r] = enter;
    }
}

fn clear_denominators(z: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = z.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    z.iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Whether `b` lies in the rational cone spanned by the columns of `a`.
pub fn in_rational_cone(a: &IntMatrix, b: &[BigInt]) -> bool {
    matches!(nonneg_solution(a, b), Feasibility::Feasible(_))
}
