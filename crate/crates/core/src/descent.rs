//! Descent processes of conjugation-invariant permutations.
//!
//! The limiting descent set is determinantal with Toeplitz kernel
//! `K(i, j) = k(j − i)`, where `Σ k(i) zⁱ = 1/(1 − (1 + x₀z)e^{(1−x₀)z})`.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{determinant, series_inverse, series_mul, valuation, Scalar};
use crate::perm::Permutation;
use crate::samplers::StickVector;

/// `â_l(x₀) = (1−x₀)^{l+1}/(l+1)! + x₀(1−x₀)^l/l!`, the probability that a
/// block of `l` consecutive positions lies in the limiting descent set.
pub fn a_hat(l: usize, x0: f64) -> f64 {
    a_hat_generic(l, &x0)
}

pub fn a_hat_exact(l: usize, x0: &BigRational) -> BigRational {
    a_hat_generic(l, x0)
}

pub fn a_hat_generic<T: Scalar>(l: usize, x0: &T) -> T {
    let y = T::one() - x0.clone();
    // p = y^l / l!
    let mut p = T::one();
    for k in 1..=l {
        p = p * y.clone() / T::of_usize(k);
    }
    let next = p.clone() * y / T::of_usize(l + 1);
    next + x0.clone() * p
}

/// Coefficients `k(−1), k(0), …, k(M)` of the descent kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentKernel<T = f64> {
    x0: T,
    coeffs: Vec<T>,
}

impl<T: Scalar> LaurentKernel<T> {
    pub fn x0(&self) -> &T {
        &self.x0
    }

    /// Largest index with a stored coefficient.
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 2
    }

    /// `k(i)`; zero below `−1`.
    pub fn k(&self, i: i64) -> T {
        if i < -1 {
            return T::zero();
        }
        let at = (i + 1) as usize;
        assert!(at < self.coeffs.len(), "k({i}) beyond band {}", self.max_index());
        self.coeffs[at].clone()
    }

    /// `(i, k(i))` for `i = −1 … M`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().enumerate().map(|(j, c)| (j as i64 - 1, c))
    }
}

/// Kernel from the block-correlation form `−z⁻¹ (1 + Σ_l â_l zˡ)⁻¹`.
pub fn kernel_coeffs_generic<T: Scalar>(x0: &T, max: usize) -> LaurentKernel<T> {
    let len = max + 2;
    let denom: Vec<T> = (0..len)
        .map(|l| if l == 0 { T::one() } else { a_hat_generic(l, x0) })
        .collect();
    let c = series_inverse(&denom, len).expect("unit constant term");
    LaurentKernel {
        x0: x0.clone(),
        coeffs: c.into_iter().map(|v| -v).collect(),
    }
}

/// Kernel expanded from the closed form `1/(1 − (1 + x₀z)e^{(1−x₀)z})`.
///
/// Fails if the denominator does not vanish to exactly first order at `z = 0`,
/// which is what makes `k(i) = 0` for `i ≤ −2`.
pub fn kernel_coeffs_closed_form<T: Scalar>(x0: &T, max: usize) -> Result<LaurentKernel<T>> {
    let len = max + 3;
    let y = T::one() - x0.clone();
    let mut exp = Vec::with_capacity(len);
    let mut term = T::one();
    for m in 0..len {
        if m > 0 {
            term = term * y.clone() / T::of_usize(m);
        }
        exp.push(term.clone());
    }
    let linear = vec![T::one(), x0.clone()];
    let product = series_mul(&linear, &exp, len);
    let denom: Vec<T> = product
        .iter()
        .enumerate()
        .map(|(m, v)| if m == 0 { T::one() - v.clone() } else { -v.clone() })
        .collect();
    if valuation(&denom) != Some(1) {
        return Err(Error::InvalidParameter(format!(
            "kernel generating function has a pole of order {:?} at 0",
            valuation(&denom)
        )));
    }
    let c = series_inverse(&denom[1..], max + 2).expect("nonzero leading term");
    Ok(LaurentKernel {
        x0: x0.clone(),
        coeffs: c,
    })
}

/// Floating-point kernel with both expansions required to agree.
pub fn kernel_coeffs(x0: f64, max: usize) -> Result<LaurentKernel<f64>> {
    check_x0(x0)?;
    let a = kernel_coeffs_generic(&x0, max);
    let b = kernel_coeffs_closed_form(&x0, max)?;
    for ((i, u), (_, v)) in a.entries().zip(b.entries()) {
        if (u - v).abs() > 1e-12 * (1.0 + u.abs()) {
            return Err(Error::InvalidParameter(format!(
                "kernel expansions disagree at k({i}): {u} vs {v}"
            )));
        }
    }
    Ok(a)
}

/// Exact kernel for rational `x₀`; both expansions must agree identically.
pub fn kernel_coeffs_exact(x0: &BigRational, max: usize) -> Result<LaurentKernel<BigRational>> {
    if x0 < &BigRational::from_integer(0.into()) || x0 > &BigRational::from_integer(1.into()) {
        return Err(Error::InvalidParameter(format!("x0 = {x0} outside [0, 1]")));
    }
    let a = kernel_coeffs_generic(x0, max);
    let b = kernel_coeffs_closed_form(x0, max)?;
    if a != b {
        return Err(Error::InvalidParameter(
            "exact kernel expansions disagree".into(),
        ));
    }
    Ok(a)
}

fn check_x0(x0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("x0 = {x0} outside [0, 1]")))
    }
}

/// A finite set of positive integers, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrelationQuery {
    set: Vec<usize>,
}

impl CorrelationQuery {
    pub fn new(mut set: Vec<usize>) -> Result<Self> {
        set.sort_unstable();
        if set.is_empty() {
            return Err(Error::InvalidParameter("empty correlation set".into()));
        }
        if set[0] == 0 {
            return Err(Error::InvalidParameter(
                "correlation set must contain positive integers".into(),
            ));
        }
        if set.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "repeated element in {set:?}"
            )));
        }
        Ok(Self { set })
    }

    pub fn elements(&self) -> &[usize] {
        &self.set
    }

    pub fn max(&self) -> usize {
        *self.set.last().expect("nonempty")
    }

    /// `max(A) − min(A)`.
    pub fn span(&self) -> usize {
        self.max() - self.set[0]
    }

    pub fn shifted(&self, k: usize) -> Self {
        Self {
            set: self.set.iter().map(|a| a + k).collect(),
        }
    }

    /// Maximal runs of consecutive integers.
    pub fn blocks(&self) -> Vec<&[usize]> {
        self.set.chunk_by(|a, b| b - a == 1).collect()
    }

    /// Band needed by [`correlation`] when none is given.
    pub fn default_band(&self) -> usize {
        self.span() + 4
    }
}

impl std::str::FromStr for CorrelationQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let set = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("set element {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(set)
    }
}

impl std::fmt::Display for CorrelationQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.set.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `det[k(j − i)]_{i,j ∈ A}`.
pub fn correlation<T: Scalar>(kernel: &LaurentKernel<T>, query: &CorrelationQuery) -> Result<T> {
    if query.span() > kernel.max_index() {
        return Err(Error::InvalidParameter(format!(
            "kernel band {} too small for span {} of {query}",
            kernel.max_index(),
            query.span()
        )));
    }
    let a = query.elements();
    let m = a
        .iter()
        .map(|&i| a.iter().map(|&j| kernel.k(j as i64 - i as i64)).collect())
        .collect();
    Ok(determinant(m))
}

/// `∏ â_{|B|}(x₀)` over maximal runs `B` of `A`.
pub fn block_product_correlation(x0: f64, query: &CorrelationQuery) -> f64 {
    block_product_generic(&x0, query)
}

pub fn block_product_generic<T: Scalar>(x0: &T, query: &CorrelationQuery) -> T {
    query
        .blocks()
        .iter()
        .fold(T::one(), |acc, b| acc * a_hat_generic(b.len(), x0))
}

/// Fraction of samples whose descent set contains `A`, with a Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalCorrelation {
    pub hits: usize,
    pub total: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl EmpiricalCorrelation {
    /// `z` is the interval half-width in standard deviations.
    pub fn from_counts(hits: usize, total: usize, z: f64) -> Self {
        let n = total as f64;
        let p = if total == 0 { 0.0 } else { hits as f64 / n };
        let std_error = if total == 0 { 0.0 } else { (p * (1.0 - p) / n).sqrt() };
        let (wilson_low, wilson_high) = wilson_interval(hits, total, z);
        Self {
            hits,
            total,
            estimate: p,
            std_error,
            wilson_low,
            wilson_high,
        }
    }

    /// Whether `value` lies within `z` standard errors, using the Wilson
    /// interval so that estimates at 0 or 1 still get a positive width.
    pub fn consistent_with(&self, value: f64, z: f64) -> bool {
        let (lo, hi) = wilson_interval(self.hits, self.total, z);
        (lo..=hi).contains(&value)
    }
}

pub fn wilson_interval(hits: usize, total: usize, z: f64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Wilson half-width used by [`empirical_correlation`].
pub const DEFAULT_WILSON_Z: f64 = 1.96;

pub fn empirical_correlation(
    samples: &[Permutation],
    query: &CorrelationQuery,
) -> Result<EmpiricalCorrelation> {
    let mut hits = 0;
    for s in samples {
        if query.max() + 1 > s.len() {
            return Err(Error::InvalidParameter(format!(
                "{query} out of range for n = {}",
                s.len()
            )));
        }
        hits += usize::from(contains_descents(s, query));
    }
    Ok(EmpiricalCorrelation::from_counts(hits, samples.len(), DEFAULT_WILSON_Z))
}

/// `A ⊆ D(σ)` without building the descent set.
pub fn contains_descents(sigma: &Permutation, query: &CorrelationQuery) -> bool {
    let w = sigma.word();
    query.elements().iter().all(|&i| w[i - 1] > w[i])
}

/// `½(1 − E[x₀²])` over the given stick vectors.
pub fn limit_descent_density(nu_samples: &[StickVector]) -> Result<f64> {
    if nu_samples.is_empty() {
        return Err(Error::InvalidParameter("no stick vectors given".into()));
    }
    let m: f64 = nu_samples.iter().map(|x| x.dust().powi(2)).sum::<f64>() / nu_samples.len() as f64;
    Ok(0.5 * (1.0 - m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational;

    fn all_subsets(max: usize) -> impl Iterator<Item = CorrelationQuery> {
        (1u32..(1 << max)).map(move |mask| {
            CorrelationQuery::new((1..=max).filter(|i| mask >> (i - 1) & 1 == 1).collect()).unwrap()
        })
    }

    #[test]
    fn a_hat_values() {
        assert!((a_hat(1, 0.0) - 0.5).abs() < 1e-15);
        assert!((a_hat(2, 0.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((a_hat(1, 0.5) - 0.375).abs() < 1e-15);
        assert_eq!(a_hat_exact(2, &rational(0, 1)), rational(1, 6));
        assert_eq!(a_hat(3, 1.0), 0.0);
    }

    #[test]
    fn uniform_kernel_exact() {
        let k = kernel_coeffs_exact(&rational(0, 1), 6).unwrap();
        assert_eq!(k.k(-1), rational(-1, 1));
        assert_eq!(k.k(0), rational(1, 2));
        assert_eq!(k.k(1), rational(-1, 12));
        assert_eq!(k.k(2), rational(0, 1));
        assert_eq!(k.k(3), rational(1, 720));
        assert_eq!(k.k(-2), rational(0, 1));
        assert_eq!(k.max_index(), 6);
    }

    #[test]
    fn empty_process_at_full_dust() {
        let k = kernel_coeffs(1.0, 5).unwrap();
        assert_eq!(k.k(-1), -1.0);
        for i in 0..=5 {
            assert_eq!(k.k(i), 0.0);
        }
        let q = CorrelationQuery::new(vec![2]).unwrap();
        assert_eq!(correlation(&k, &q).unwrap(), 0.0);
    }

    #[test]
    fn expansions_agree() {
        for (p, q) in [(0, 1), (1, 3), (7, 10)] {
            let x0 = rational(p, q);
            let a = kernel_coeffs_generic(&x0, 12);
            let b = kernel_coeffs_closed_form(&x0, 12).unwrap();
            assert_eq!(a, b);
        }
        for step in 0..20 {
            let x0 = step as f64 / 19.0;
            let k = kernel_coeffs(x0, 8).unwrap();
            assert_eq!(k.k(-1), -1.0);
            assert!((k.k(0) - a_hat(1, x0)).abs() < 1e-15);
            let b = kernel_coeffs_closed_form(&x0, 8).unwrap();
            assert!((b.k(-1) + 1.0).abs() < 1e-15);
            assert!((b.k(0) - a_hat(1, x0)).abs() < 1e-14);
        }
    }

    #[test]
    fn correlation_examples() {
        let k = kernel_coeffs_exact(&rational(0, 1), 6).unwrap();
        let c = |v: Vec<usize>| correlation(&k, &CorrelationQuery::new(v).unwrap()).unwrap();
        assert_eq!(c(vec![1]), rational(1, 2));
        assert_eq!(c(vec![1, 2]), rational(1, 6));
        assert_eq!(c(vec![1, 3]), rational(1, 4));
        let short = kernel_coeffs(0.0, 1).unwrap();
        assert!(correlation(&short, &CorrelationQuery::new(vec![1, 3]).unwrap()).is_err());
    }

    #[test]
    fn blocks_of_example_set() {
        let q = CorrelationQuery::new(vec![12, 1, 2, 3, 5, 6, 8, 11]).unwrap();
        let lens: Vec<usize> = q.blocks().iter().map(|b| b.len()).collect();
        assert_eq!(lens, vec![3, 2, 1, 2]);
        let x0 = 0.3;
        let expect = a_hat(3, x0) * a_hat(2, x0) * a_hat(1, x0) * a_hat(2, x0);
        assert!((block_product_correlation(x0, &q) - expect).abs() < 1e-16);
        let single = CorrelationQuery::new(vec![4]).unwrap();
        assert_eq!(block_product_correlation(x0, &single), a_hat(1, x0));
    }

    #[test]
    fn determinant_equals_block_product_exact() {
        for (p, q) in [(0, 1), (1, 3), (7, 10)] {
            let x0 = rational(p, q);
            let k = kernel_coeffs_exact(&x0, 10).unwrap();
            for a in all_subsets(8) {
                assert_eq!(correlation(&k, &a).unwrap(), block_product_generic(&x0, &a), "{a}");
            }
        }
    }

    #[test]
    fn determinant_equals_block_product_float() {
        for x0 in [0.0, 1.0 / 3.0, 0.7, 0.95] {
            let k = kernel_coeffs(x0, 10).unwrap();
            for a in all_subsets(8) {
                let d = correlation(&k, &a).unwrap();
                assert!((d - block_product_correlation(x0, &a)).abs() < 1e-12, "{a}: {d}");
            }
        }
    }

    #[test]
    fn stationarity() {
        let k = kernel_coeffs_exact(&rational(2, 5), 10).unwrap();
        for a in all_subsets(6) {
            let base = correlation(&k, &a).unwrap();
            for shift in 1..4 {
                assert_eq!(correlation(&k, &a.shifted(shift)).unwrap(), base);
            }
        }
    }

    #[test]
    fn query_validation() {
        assert!(CorrelationQuery::new(vec![]).is_err());
        assert!(CorrelationQuery::new(vec![0, 1]).is_err());
        assert!(CorrelationQuery::new(vec![2, 2]).is_err());
        let q: CorrelationQuery = "3, 1,2".parse().unwrap();
        assert_eq!(q.elements(), &[1, 2, 3]);
        assert_eq!(q.to_string(), "{1,2,3}");
        assert!("1,x".parse::<CorrelationQuery>().is_err());
    }

    #[test]
    fn empirical_counts() {
        let id = Permutation::identity(5);
        let rev = Permutation::reversal(5);
        let q = CorrelationQuery::new(vec![1, 2]).unwrap();
        let e = empirical_correlation(&[id.clone(), rev.clone(), rev], &q).unwrap();
        assert_eq!((e.hits, e.total), (2, 3));
        assert!(e.wilson_low < 2.0 / 3.0 && 2.0 / 3.0 < e.wilson_high);
        let far = CorrelationQuery::new(vec![5]).unwrap();
        assert!(empirical_correlation(&[id], &far).is_err());
        let (lo, hi) = wilson_interval(0, 100, 2.0);
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0);
    }

    #[test]
    fn limit_density() {
        let full = StickVector::new(vec![0.7, 0.3]).unwrap();
        assert!((limit_descent_density(&[full]).unwrap() - 0.5).abs() < 1e-15);
        let half = StickVector::new(vec![0.3, 0.2]).unwrap();
        assert!((limit_descent_density(&[half]).unwrap() - 0.375).abs() < 1e-15);
        let zero = StickVector::new(vec![]).unwrap();
        assert_eq!(limit_descent_density(&[zero]).unwrap(), 0.0);
        assert!(limit_descent_density(&[]).is_err());
    }
}
