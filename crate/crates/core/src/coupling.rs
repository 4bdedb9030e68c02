//! The cycle-merging operator `T` and its exact law on small symmetric groups.
//!
//! One step of `T` picks two distinct cycles uniformly, one point in each,
//! and right-multiplies by the transposition of those points, which merges
//! the two cycles into one.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{guard, Error, Result};
use crate::perm::Permutation;
use crate::rng::RngStream;

/// Largest `n` for exact transition matrices.
pub const EXACT_MAX_N: usize = 6;

/// A permutation with its cycle supports, for repeated applications of `T`.
#[derive(Clone, Debug)]
pub struct CycleMerger {
    sigma: Permutation,
    /// Point sets of the cycles; order inside a set is irrelevant.
    cycles: Vec<Vec<usize>>,
}

impl CycleMerger {
    pub fn new(sigma: Permutation) -> Self {
        let cycles = sigma.cycles().cycles().to_vec();
        Self { sigma, cycles }
    }

    pub fn permutation(&self) -> &Permutation {
        &self.sigma
    }

    pub fn into_permutation(self) -> Permutation {
        self.sigma
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// One application of `T`. Returns the transposition used, if any.
    pub fn step(&mut self, rng: &mut impl Rng) -> Option<(usize, usize)> {
        let c = self.cycles.len();
        if c < 2 {
            return None;
        }
        let a = rng.random_range(0..c);
        let mut b = rng.random_range(0..c - 1);
        if b >= a {
            b += 1;
        }
        let i = self.cycles[a][rng.random_range(0..self.cycles[a].len())];
        let j = self.cycles[b][rng.random_range(0..self.cycles[b].len())];
        self.sigma.right_multiply_transposition(i, j);
        let (keep, gone) = if self.cycles[a].len() >= self.cycles[b].len() { (a, b) } else { (b, a) };
        let moved = std::mem::take(&mut self.cycles[gone]);
        self.cycles[keep].extend(moved);
        self.cycles.swap_remove(gone);
        Some((i.min(j), i.max(j)))
    }
}

/// `T(σ)`; a single-cycle `σ` is returned unchanged.
pub fn apply_t(sigma: &Permutation, rng: &mut RngStream) -> Permutation {
    let before = sigma.cycle_count();
    let mut m = CycleMerger::new(sigma.clone());
    m.step(rng);
    let out = m.into_permutation();
    assert_eq!(out.cycle_count(), before.saturating_sub(1).max(1), "T must merge two cycles");
    out
}

/// `T^k(σ)`.
pub fn apply_t_power(sigma: &Permutation, k: usize, rng: &mut RngStream) -> Permutation {
    let before = sigma.cycle_count();
    let mut m = CycleMerger::new(sigma.clone());
    for _ in 0..k {
        if m.step(rng).is_none() {
            break;
        }
    }
    let out = m.into_permutation();
    assert_eq!(out.cycle_count(), before.saturating_sub(k).max(1), "cycle count after T^{k}");
    out
}

/// `T^{#(σ)−1}(σ)`, a single-cycle permutation.
pub fn merge_all(sigma: &Permutation, rng: &mut RngStream) -> Permutation {
    apply_t_power(sigma, sigma.cycle_count() - 1, rng)
}

/// Exact one-step law of `T` on `S_n`, rows indexed by lexicographic rank.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    n: usize,
    rows: Vec<Vec<(usize, BigRational)>>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// `P(T(σ) = ρ)` for ranks of `σ` and `ρ`.
    pub fn prob(&self, from: usize, to: usize) -> BigRational {
        self.rows[from]
            .iter()
            .find(|(j, _)| *j == to)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn row(&self, from: usize) -> &[(usize, BigRational)] {
        &self.rows[from]
    }
}

pub fn transition_matrix_t(n: usize) -> Result<TransitionMatrix> {
    if n == 0 || n > EXACT_MAX_N {
        return Err(guard("transition matrix size", format!("1 <= n <= {EXACT_MAX_N}"), n));
    }
    let mut rows = Vec::new();
    for sigma in Permutation::all(n) {
        let cycles = sigma.cycles();
        let cs = cycles.cycles();
        let c = cs.len();
        let mut row: HashMap<usize, BigRational> = HashMap::new();
        if c == 1 {
            row.insert(sigma.lex_rank(), BigRational::one());
        } else {
            let pairs = (c * (c - 1) / 2) as i64;
            for a in 0..c {
                for b in a + 1..c {
                    let weight = BigRational::new(
                        BigInt::from(1),
                        BigInt::from(pairs * (cs[a].len() * cs[b].len()) as i64),
                    );
                    for &i in &cs[a] {
                        for &j in &cs[b] {
                            let mut next = sigma.clone();
                            next.right_multiply_transposition(i, j);
                            *row.entry(next.lex_rank()).or_insert_with(BigRational::zero) +=
                                weight.clone();
                        }
                    }
                }
            }
        }
        let mut row: Vec<_> = row.into_iter().collect();
        row.sort_by_key(|(j, _)| *j);
        rows.push(row);
    }
    Ok(TransitionMatrix { n, rows })
}

/// An exact probability law on `S_n`, indexed by lexicographic rank.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLaw {
    n: usize,
    probs: Vec<BigRational>,
}

impl ExactLaw {
    pub fn from_fn(n: usize, f: impl Fn(&Permutation) -> BigRational) -> Result<Self> {
        if n == 0 || n > EXACT_MAX_N {
            return Err(guard("exact law size", format!("1 <= n <= {EXACT_MAX_N}"), n));
        }
        let probs: Vec<_> = Permutation::all(n).map(|p| f(&p)).collect();
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::InvalidParameter("negative probability".into()));
        }
        let total: BigRational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!("law sums to {total}")));
        }
        Ok(Self { n, probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        let size: i64 = (1..=n as i64).product();
        Self::from_fn(n, |_| BigRational::new(1.into(), size.into()))
    }

    /// `θ^{#(σ)−1}/∏_{i<n}(θ + i)` for rational `θ ≥ 0`.
    pub fn ewens(n: usize, theta: &BigRational) -> Result<Self> {
        if theta.is_negative() {
            return Err(Error::InvalidParameter(format!("theta = {theta}")));
        }
        let denom: BigRational = (1..n)
            .map(|i| theta + BigRational::from_integer(BigInt::from(i)))
            .product();
        Self::from_fn(n, |p| {
            let mut num = BigRational::one();
            for _ in 1..p.cycle_count() {
                num *= theta;
            }
            num / denom.clone()
        })
    }

    pub fn point_mass(sigma: &Permutation) -> Result<Self> {
        let target = sigma.word().to_vec();
        Self::from_fn(sigma.len(), |p| {
            if p.word() == target.as_slice() {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    /// Uniform on the `(n−1)!` single-cycle permutations.
    pub fn single_cycle_uniform(n: usize) -> Result<Self> {
        let count: i64 = (1..n as i64).product();
        Self::from_fn(n, |p| {
            if p.cycle_count() == 1 {
                BigRational::new(1.into(), count.into())
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn prob(&self, sigma: &Permutation) -> BigRational {
        self.probs[sigma.lex_rank()].clone()
    }

    /// Whether the mass depends on the cycle type only.
    pub fn is_conjugation_invariant(&self) -> bool {
        let mut by_type: HashMap<Vec<usize>, &BigRational> = HashMap::new();
        Permutation::all(self.n).zip(&self.probs).all(|(p, q)| {
            let t = p.cycle_type();
            match by_type.get(&t) {
                Some(r) => *r == q,
                None => {
                    by_type.insert(t, q);
                    true
                }
            }
        })
    }

    /// Law after one step of the chain.
    pub fn step(&self, matrix: &TransitionMatrix) -> Result<Self> {
        if matrix.n() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: matrix.n(),
            });
        }
        let mut next = vec![BigRational::zero(); self.probs.len()];
        for (from, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (to, q) in matrix.row(from) {
                next[*to] += p * q;
            }
        }
        Ok(Self {
            n: self.n,
            probs: next,
        })
    }

    pub fn total_variation(&self, other: &Self) -> Result<BigRational> {
        if other.n != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let sum: BigRational = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sum / BigRational::from_integer(2.into()))
    }
}

/// Exact TV distance between the law of `T^{n−1}(σ)`, with `σ` drawn from
/// `start`, and the uniform law on single-cycle permutations.
pub fn verify_single_cycle_uniformization(n: usize, start: &ExactLaw) -> Result<BigRational> {
    if start.n() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: start.n(),
        });
    }
    if !start.is_conjugation_invariant() {
        return Err(Error::InvalidParameter(
            "start law is not constant on conjugacy classes".into(),
        ));
    }
    let matrix = transition_matrix_t(n)?;
    let mut law = start.clone();
    for _ in 1..n {
        law = law.step(&matrix)?;
    }
    law.total_variation(&ExactLaw::single_cycle_uniform(n)?)
}
