use std::collections::HashMap;

use super::{check_theta, GenEwensParams, GenEwensSampler, StickVector};
use crate::error::{guard, Result};
use crate::perm::Permutation;

/// Largest `n` accepted by [`central_pmf`].
pub const CENTRAL_PMF_MAX_N: usize = 10;

/// `θ^{#(σ)−1} / ∏_{i=1}^{n−1} (θ + i)`.
pub fn ewens_pmf(sigma: &Permutation, theta: f64) -> Result<f64> {
    check_theta(theta, false)?;
    let n = sigma.len();
    let cycles = sigma.cycle_count();
    let denom: f64 = (1..n).map(|i| theta + i as f64).product();
    Ok(theta.powi(cycles as i32 - 1) / denom)
}

/// `∏ θ̂ᵢ^{rᵢ(σ)}` normalized over `S_n`.
pub fn gen_ewens_pmf(sigma: &Permutation, params: &GenEwensParams) -> Result<f64> {
    let n = sigma.len();
    let sampler = GenEwensSampler::new(params, n)?;
    let log_weight: f64 = sigma
        .cycle_type()
        .iter()
        .map(|&len| params.log_weight(len))
        .sum();
    let log_fact: f64 = (1..=n).map(|i| (i as f64).ln()).sum();
    Ok((log_weight - log_fact - sampler.log_normalization(n)).exp())
}

/// Exact mass of the central measure with sticks `x` at `σ`.
pub fn central_pmf(sigma: &Permutation, x: &StickVector) -> Result<f64> {
    let n = sigma.len();
    if n > CENTRAL_PMF_MAX_N {
        return Err(guard("central_pmf size", format!("n <= {CENTRAL_PMF_MAX_N}"), n));
    }
    let mass = x.mass();
    // mult[j] = number of cycles of length j
    let mut mult = vec![0usize; n + 1];
    for len in sigma.cycle_type() {
        mult[len] += 1;
    }
    if mass <= 0.0 {
        return Ok(if sigma.is_identity() { 1.0 } else { 0.0 });
    }
    let x0 = x.dust();
    let y: Vec<f64> = x.sticks().iter().map(|s| s / mass).collect();
    let fixed = mult[1];
    let mut total = 0.0;
    for j in 0..=fixed {
        let mut reduced = mult.clone();
        reduced[1] -= j;
        let weight = binomial(fixed, j) * x0.powi(j as i32) * (1.0 - x0).powi((n - j) as i32);
        if weight == 0.0 {
            continue;
        }
        total += weight * pure_central_mass(&reduced, &y);
    }
    Ok(total)
}

/// Mass at a permutation with cycle multiplicities `mult` for sticks summing to one.
fn pure_central_mass(mult: &[usize], y: &[f64]) -> f64 {
    if mult.iter().all(|&m| m == 0) {
        return 1.0;
    }
    let mut prefactor = 1.0;
    for (j, &r) in mult.iter().enumerate().skip(1) {
        prefactor *= factorial(r) / factorial(j - 1).powi(r as i32);
    }
    let mut memo = HashMap::new();
    prefactor * assignments(0, &mut mult.to_vec(), y, &mut memo)
}

/// Sum over ways to give each stick from `stick` onward one unused cycle
/// length or nothing, of `∏ yᵢ^{mᵢ}`, until every cycle is placed.
fn assignments(
    stick: usize,
    mult: &mut Vec<usize>,
    y: &[f64],
    memo: &mut HashMap<(usize, Vec<usize>), f64>,
) -> f64 {
    if mult.iter().all(|&m| m == 0) {
        return 1.0;
    }
    if stick == y.len() {
        return 0.0;
    }
    let key = (stick, mult.clone());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut sum = assignments(stick + 1, mult, y, memo);
    for len in 1..mult.len() {
        if mult[len] == 0 {
            continue;
        }
        mult[len] -= 1;
        sum += y[stick].powi(len as i32) * assignments(stick + 1, mult, y, memo);
        mult[len] += 1;
    }
    memo.insert(key, sum);
    sum
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
