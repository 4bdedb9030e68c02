//! Tracy–Widom `F₂` as the Fredholm determinant of the Airy kernel.

use nalgebra::DMatrix;

use super::airy::ai_and_prime;
use crate::error::{guard, Result};

/// Default Nyström order.
pub const DEFAULT_F2_ORDER: usize = 60;
pub const F2_ORDER_RANGE: (usize, usize) = (20, 200);
pub const F2_S_RANGE: (f64, f64) = (-10.0, 6.0);

/// Scale of the map `t ↦ s + c·ln(2/(1−t))` from `(−1, 1)` onto `(s, ∞)`.
const MAP_SCALE: f64 = 3.0;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize) -> Self {
        assert!(order >= 1);
        let m = order;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            // Chebyshev-like initial guess for the i-th largest root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights on `(s, ∞)` under the logarithmic map.
    pub fn mapped_to_half_line(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| (s + MAP_SCALE * (2.0 / (1.0 - t)).ln(), w * MAP_SCALE / (1.0 - t)))
            .unzip()
    }
}

/// `(P_m(x), P_m′(x))`.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `(Ai(x)Ai′(y) − Ai′(x)Ai(y))/(x − y)`, with the diagonal limit
/// `Ai′(x)² − x·Ai(x)²` when `|x − y| < 10⁻⁶`.
pub fn airy_kernel(x: f64, y: f64) -> Result<f64> {
    super::airy::airy_ai(x)?;
    super::airy::airy_ai(y)?;
    let ax = ai_and_prime(x);
    let ay = ai_and_prime(y);
    Ok(kernel_from_values(x, ax, y, ay))
}

fn kernel_from_values(x: f64, (ai_x, aip_x): (f64, f64), y: f64, (ai_y, aip_y): (f64, f64)) -> f64 {
    if (x - y).abs() < 1e-6 {
        aip_x * aip_x - x * ai_x * ai_x
    } else {
        (ai_x * aip_y - aip_x * ai_y) / (x - y)
    }
}

/// `F₂(s) = det(I − K_Ai)` on `L²(s, ∞)` with `order` Gauss–Legendre nodes.
pub fn f2_cdf(s: f64, order: usize) -> Result<f64> {
    check(s, order)?;
    Ok(F2Evaluator::new(order).eval_unchecked(s))
}

fn check(s: f64, order: usize) -> Result<()> {
    if !(F2_ORDER_RANGE.0..=F2_ORDER_RANGE.1).contains(&order) {
        return Err(guard(
            "F2 quadrature order",
            format!("{} <= order <= {}", F2_ORDER_RANGE.0, F2_ORDER_RANGE.1),
            order,
        ));
    }
    if !(s >= F2_S_RANGE.0 && s <= F2_S_RANGE.1) {
        return Err(guard(
            "F2 argument",
            format!("{} <= s <= {}", F2_S_RANGE.0, F2_S_RANGE.1),
            s,
        ));
    }
    Ok(())
}

/// Reusable `F₂` evaluator holding one quadrature rule.
#[derive(Clone, Debug)]
pub struct F2Evaluator {
    rule: QuadratureRule,
}

impl F2Evaluator {
    pub fn new(order: usize) -> Self {
        Self {
            rule: QuadratureRule::gauss_legendre(order),
        }
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        check(s, self.order())?;
        Ok(self.eval_unchecked(s))
    }

    /// Clamps below the lower guard to 0 and above the upper guard to 1.
    pub fn cdf(&self, s: f64) -> f64 {
        if s < F2_S_RANGE.0 {
            0.0
        } else if s > F2_S_RANGE.1 {
            1.0
        } else {
            self.eval_unchecked(s)
        }
    }

    fn eval_unchecked(&self, s: f64) -> f64 {
        let (x, w) = self.rule.mapped_to_half_line(s);
        let m = x.len();
        let vals: Vec<(f64, f64)> = x
            .iter()
            .map(|&xi| if xi > super::airy::AIRY_MAX_ABS_X { (0.0, 0.0) } else { ai_and_prime(xi) })
            .collect();
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let a = DMatrix::from_fn(m, m, |i, j| {
            let k = kernel_from_values(x[i], vals[i], x[j], vals[j]);
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - sw[i] * k * sw[j]
        });
        a.determinant().clamp(0.0, 1.0)
    }
}
