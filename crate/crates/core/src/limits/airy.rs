//! Airy function `Ai` and its derivative.
//!
//! Maclaurin series in double-double arithmetic for `|x| ≤ 8`, where the two
//! series cancel by up to fifteen digits near `x = 8`; Poincaré asymptotic
//! expansions beyond.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{guard, Result};

/// Largest accepted `|x|`.
pub const AIRY_MAX_ABS_X: f64 = 200.0;

const SERIES_LIMIT: f64 = 8.0;

/// `Ai(0)` split into leading and trailing doubles.
const AI0: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
/// `−Ai′(0)`.
const MINUS_AIP0: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = (self.hi - p - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn check_range(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= AIRY_MAX_ABS_X {
        Ok(())
    } else {
        Err(guard("Airy argument", format!("|x| <= {AIRY_MAX_ABS_X}"), x))
    }
}

/// `Ai(x)` for `|x| ≤ 200`.
pub fn airy_ai(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(ai_and_prime(x).0)
}

/// `Ai′(x)` for `|x| ≤ 200`.
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(ai_and_prime(x).1)
}

/// `(Ai(x), Ai′(x))` without the range check.
pub(crate) fn ai_and_prime(x: f64) -> (f64, f64) {
    if x.abs() <= SERIES_LIMIT {
        series(x)
    } else if x > 0.0 {
        asymptotic_positive(x)
    } else {
        asymptotic_negative(-x)
    }
}

/// `Ai = Ai(0)·f − (−Ai′(0))·g`, with `f, g` the even-type power series.
fn series(x: f64) -> (f64, f64) {
    let xd = Dd::from_f64(x);
    let x3 = xd.mul(xd).mul(xd);
    // f = Σ t_k, t_k = t_{k−1} x³/((3k−1)3k)
    // g = Σ u_k, u_0 = x, u_k = u_{k−1} x³/(3k(3k+1))
    // f′ = Σ p_k, p_1 = x²/2, p_k = p_{k−1} x³/((3k−3)(3k−1))
    // g′ = Σ q_k, q_0 = 1, q_k = q_{k−1} x³/((3k−2)3k)
    let mut t = Dd::from_f64(1.0);
    let mut u = xd;
    let mut p = xd.mul(xd).div_f64(2.0);
    let mut q = Dd::from_f64(1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, u, p, q);
    for k in 1..200 {
        let kf = k as f64;
        t = t.mul(x3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        u = u.mul(x3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        q = q.mul(x3).div_f64((3.0 * kf - 2.0) * (3.0 * kf));
        f = f.add(t);
        g = g.add(u);
        gp = gp.add(q);
        if k >= 2 {
            p = p.mul(x3).div_f64((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp = fp.add(p);
        }
        let small = |term: Dd, sum: Dd| term.hi.abs() <= 1e-34 * sum.hi.abs().max(1e-300);
        if k > 2 && small(t, f) && small(u, g) && small(p, fp) && small(q, gp) {
            break;
        }
        if x == 0.0 {
            break;
        }
    }
    if x == 0.0 {
        fp = Dd::from_f64(0.0);
    }
    let ai = AI0.mul(f).add(MINUS_AIP0.mul(g).neg());
    let aip = AI0.mul(fp).add(MINUS_AIP0.mul(gp).neg());
    (ai.to_f64(), aip.to_f64())
}

/// Coefficients `u_k` of the Airy asymptotic series; `v_k = −(6k+1)/(6k−1)·u_k`.
fn asymptotic_coeffs(terms: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..terms {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

const ASYMPTOTIC_TERMS: usize = 40;

/// Sums `Σ (sign)^k c_k / ζ^k` until terms stop decreasing.
fn truncated(c: &[f64], zeta: f64, alternate: bool, start: usize, step: usize) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut j = 0usize;
    let mut k = start;
    while k < c.len() {
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() >= prev {
            break;
        }
        sum += sign * term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        prev = term.abs();
        j += 1;
        k += step;
    }
    sum
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coeffs(ASYMPTOTIC_TERMS);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    let x4 = x.powf(0.25);
    let su = truncated(&u, zeta, true, 0, 1);
    let sv = truncated(&v, zeta, true, 0, 1);
    (pref / x4 * su, -pref * x4 * sv)
}

fn asymptotic_negative(x: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coeffs(ASYMPTOTIC_TERMS);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let x4 = x.powf(0.25);
    let pref = 1.0 / PI.sqrt();
    let ue = truncated(&u, zeta, true, 0, 2);
    let uo = truncated(&u, zeta, true, 1, 2);
    let ve = truncated(&v, zeta, true, 0, 2);
    let vo = truncated(&v, zeta, true, 1, 2);
    let ai = pref / x4 * (c * ue + s * uo);
    let aip = pref * x4 * (s * ve - c * vo);
    (ai, aip)
}
