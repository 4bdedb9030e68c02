//! Deterministic limit objects: the limit shape `Ω`, Airy functions, and `F₂`.

mod airy;
mod f2;

pub use airy::{airy_ai, airy_ai_prime, AIRY_MAX_ABS_X};
pub use f2::{
    airy_kernel, f2_cdf, F2Evaluator, QuadratureRule, DEFAULT_F2_ORDER, F2_ORDER_RANGE, F2_S_RANGE,
};

use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::rsk::YoungDiagram;

/// `Ω(s) = (2/π)(s·arcsin s + √(1 − s²))` on `|s| < 1`, `|s|` elsewhere.
pub fn omega(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        s.abs()
    } else {
        FRAC_2_PI * (s * s.asin() + (1.0 - s * s).sqrt())
    }
}

/// `(value − 2√n)/n^{1/6}`.
pub fn rescale_edge(value: usize, n: usize) -> f64 {
    rescale_edge_real(value, n as f64)
}

/// [`rescale_edge`] at the effective size `(1 − x₀)n`.
pub fn rescale_edge_diluted(value: usize, n: usize, x0: f64) -> f64 {
    rescale_edge_real(value, (1.0 - x0) * n as f64)
}

/// `(value − 2√m)/m^{1/6}` for a real size `m > 0`.
pub fn rescale_edge_real(value: usize, m: f64) -> f64 {
    (value as f64 - 2.0 * m.sqrt()) / m.powf(1.0 / 6.0)
}

/// `sup_s |L_λ(s√(2n))/√(2n) − Ω(s)|`.
///
/// Between consecutive breakpoints the rescaled profile has slope `±1`
/// while `|Ω′| < 1` on `(−1, 1)`, so the supremum is attained at a
/// breakpoint or at `s = ±1`.
pub fn vkls_sup_distance(lambda: &YoungDiagram, n: usize) -> Result<f64> {
    if lambda.size() != n {
        return Err(Error::SizeMismatch {
            left: lambda.size(),
            right: n,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty diagram".into()));
    }
    let h = lambda.height_function();
    let scale = (2.0 * n as f64).sqrt();
    let half_root = 2.0 * (n as f64).sqrt();
    let (lo, hi) = h.breakpoint_range();
    let mut best = 0.0f64;
    for i in lo..=hi {
        let s = i as f64 / half_root;
        let v = h.doubled_height(i) as f64 / half_root;
        best = best.max((v - omega(s)).abs());
    }
    for s in [-1.0, 1.0] {
        let v = h.eval(s * scale) / scale;
        best = best.max((v - omega(s)).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        assert!((omega(0.0) - FRAC_2_PI).abs() < 1e-16);
        assert_eq!(omega(1.0), 1.0);
        assert!((omega(1.0 - 1e-12) - 1.0).abs() < 1e-6);
        for i in -300..=300 {
            let s = i as f64 / 100.0;
            assert_eq!(omega(s), omega(-s));
            if s.abs() < 1.0 {
                assert!(omega(s) > s.abs());
                let h = 1e-6;
                let d = (omega(s + h) - omega(s - h)) / (2.0 * h);
                assert!(d.abs() <= 1.0);
            } else {
                assert_eq!(omega(s), s.abs());
            }
        }
    }

    #[test]
    fn omega_area() {
        // ∫(Ω − |s|) = 1/2 matches unit area of the rescaled diagram
        let m = 200_000;
        let area: f64 = (0..m)
            .map(|k| {
                let s = -1.0 + 2.0 * (k as f64 + 0.5) / m as f64;
                omega(s) - s.abs()
            })
            .sum::<f64>()
            * 2.0
            / m as f64;
        assert!((area - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rescaling() {
        assert_eq!(rescale_edge(200, 10_000), 0.0);
        assert!((rescale_edge(210, 10_000) - 10.0 / 10f64.powf(4.0 / 6.0)).abs() < 1e-12);
        assert!((rescale_edge(210, 10_000) - 2.154).abs() < 1e-3);
        assert!(rescale_edge(11, 25) > rescale_edge(10, 25));
        assert_eq!(rescale_edge_diluted(100, 5000, 0.5), rescale_edge(100, 2500));
    }

    #[test]
    fn vkls_small_cases() {
        let one = YoungDiagram::new(vec![1]).unwrap();
        let d = vkls_sup_distance(&one, 1).unwrap();
        assert!(d.is_finite() && d > 0.0);
        for n in [16, 50, 400] {
            let row = YoungDiagram::new(vec![n]).unwrap();
            assert!(vkls_sup_distance(&row, n).unwrap() > 0.2);
        }
        assert!(vkls_sup_distance(&one, 2).is_err());
    }

    #[test]
    fn vkls_matches_dense_grid() {
        let lambda = YoungDiagram::new(vec![9, 7, 4, 4, 2, 1, 1]).unwrap();
        let n = lambda.size();
        let exact = vkls_sup_distance(&lambda, n).unwrap();
        let h = lambda.height_function();
        let scale = (2.0 * n as f64).sqrt();
        let mut grid = 0.0f64;
        for k in -40_000..=40_000 {
            let s = k as f64 / 10_000.0;
            grid = grid.max((h.eval(s * scale) / scale - omega(s)).abs());
        }
        assert!(grid <= exact + 1e-12);
        assert!(exact - grid < 1e-3);
    }

    #[test]
    fn staircase_is_close_to_omega() {
        let rows: Vec<usize> = (1..=60).rev().collect();
        let lambda = YoungDiagram::new(rows).unwrap();
        let n = lambda.size();
        // a staircase is a triangle, not Ω, but stays within a bounded distance
        let d = vkls_sup_distance(&lambda, n).unwrap();
        assert!(d < 0.5);
    }
}
