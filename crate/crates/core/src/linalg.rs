//! Scalar-generic power series and determinants over `f64` and `BigRational`.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

/// Field elements usable by the kernel and determinant code.
pub trait Scalar: Clone + Debug + Num + Signed + PartialOrd + FromPrimitive {
    fn of_usize(k: usize) -> Self {
        <Self as FromPrimitive>::from_usize(k).expect("representable integer")
    }

    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// First `len` coefficients of `a · b`.
pub fn series_mul<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let mut out = vec![T::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// First `len` coefficients of `1/a`; `a[0]` must be nonzero.
pub fn series_inverse<T: Scalar>(a: &[T], len: usize) -> Option<Vec<T>> {
    let a0 = a.first()?;
    if a0.is_zero() {
        return None;
    }
    let inv0 = T::one() / a0.clone();
    let mut c: Vec<T> = Vec::with_capacity(len);
    for m in 0..len {
        if m == 0 {
            c.push(inv0.clone());
            continue;
        }
        let mut s = T::zero();
        for k in 1..=m.min(a.len() - 1) {
            s = s + a[k].clone() * c[m - k].clone();
        }
        c.push(-(s * inv0.clone()));
    }
    Some(c)
}

/// Index of the lowest nonzero coefficient.
pub fn valuation<T: Scalar>(a: &[T]) -> Option<usize> {
    a.iter().position(|x| !x.is_zero())
}

/// Determinant by Gaussian elimination with full pivoting.
pub fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut det = T::one();
    for col in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for r in col..n {
            for c in col..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((br, bc)) => m[r][c].abs() > m[br][bc].abs(),
                };
                if better {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else {
            return T::zero();
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        if pc != col {
            for row in m.iter_mut() {
                row.swap(pc, col);
            }
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let v = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
    }
    det
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn inverse_of_geometric() {
        let a = vec![1.0, -1.0];
        let c = series_inverse(&a, 6).unwrap();
        assert!(c.iter().all(|&x| x == 1.0));
        assert!(series_inverse(&[0.0, 1.0], 3).is_none());
    }

    #[test]
    fn inverse_round_trip_rational() {
        let a: Vec<BigRational> = (1..8).map(|k| rational(k, k + 2)).collect();
        let c = series_inverse(&a, 7).unwrap();
        let p = series_mul(&a, &c, 7);
        assert!(p[0].is_one());
        assert!(p[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant::<f64>(vec![]), 1.0);
        let m = vec![vec![2.0, 1.0], vec![4.0, 3.0]];
        assert!((determinant(m) - 2.0).abs() < 1e-15);
        let sing = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(determinant(sing), 0.0);
        let r = vec![
            vec![rational(0, 1), rational(1, 2), rational(1, 3)],
            vec![rational(1, 1), rational(0, 1), rational(2, 1)],
            vec![rational(3, 1), rational(1, 1), rational(0, 1)],
        ];
        // 0·(0−2) − 1/2·(0−6) + 1/3·(1−0)
        assert_eq!(determinant(r), rational(10, 3));
    }

    #[test]
    fn determinant_matches_permutation_expansion() {
        use crate::perm::Permutation;
        let m: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| ((i * 7 + j * 3) % 11) as f64 - 5.0).collect())
            .collect();
        let mut leibniz = 0.0;
        for p in Permutation::all(5) {
            let sign = if (5 - p.cycle_count()) % 2 == 0 { 1.0 } else { -1.0 };
            leibniz += sign * (0..5).map(|i| m[i][p.apply(i + 1) - 1]).product::<f64>();
        }
        assert!((determinant(m) - leibniz).abs() < 1e-9);
    }
}
