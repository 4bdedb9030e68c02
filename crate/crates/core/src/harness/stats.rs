use crate::error::{Error, Result};

/// Right-continuous empirical distribution function of a finite sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("NaN in sample".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{xᵢ ≤ x}/N`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `#{xᵢ < x}/N`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance; zero for a single value.
    pub fn variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.sorted.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64
    }

    /// Distinct values with right-continuous CDF levels and left limits.
    fn jumps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.len() as f64;
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.sorted.len() {
                return None;
            }
            let v = self.sorted[i];
            let left = i as f64 / n;
            while i < self.sorted.len() && self.sorted[i] == v {
                i += 1;
            }
            Some((v, left, i as f64 / n))
        })
    }
}

/// `sup_x |F̂(x) − F(x)|` for a continuous `F`, evaluated at the jumps of `F̂`.
pub fn ks_one_sample(cdf: &EmpiricalCdf, f: impl Fn(f64) -> f64) -> f64 {
    cdf.jumps()
        .map(|(v, left, right)| {
            let fv = f(v);
            (right - fv).abs().max((fv - left).abs())
        })
        .fold(0.0, f64::max)
}

/// `sup_x |F̂_a(x) − F̂_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (xa, xb) = (a.values(), b.values());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0f64;
    while i < xa.len() || j < xb.len() {
        let v = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] == v {
            i += 1;
        }
        while j < xb.len() && xb[j] == v {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Two-sample KS level exceeded with probability `alpha` under the null,
/// from the asymptotic Kolmogorov distribution.
pub fn ks_two_sample_critical(na: usize, nb: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}
