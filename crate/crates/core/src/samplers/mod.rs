//! Exact samplers for conjugation-invariant permutation laws.
//!
//! Every sampler is a pure function of its parameters and an [`RngStream`].
//! Circle-insertion samplers build the permutation one element at a time, so
//! the prefix of a run is itself a sample at the smaller size.

mod pmf;

pub use pmf::{central_pmf, ewens_pmf, gen_ewens_pmf};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rng::RngStream;

/// Tolerance on `Σxᵢ ≤ 1`.
pub const STICK_SUM_SLACK: f64 = 1e-12;

/// A point of `Σ`: decreasing nonnegative sticks with total mass at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct StickVector {
    sticks: Vec<f64>,
}

impl StickVector {
    pub fn new(sticks: Vec<f64>) -> Result<Self> {
        if sticks.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sticks {sticks:?} must be finite and nonnegative"
            )));
        }
        if sticks.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!(
                "sticks {sticks:?} must be decreasing"
            )));
        }
        let total: f64 = sticks.iter().sum();
        if total > 1.0 + STICK_SUM_SLACK {
            return Err(Error::InvalidParameter(format!(
                "stick mass {total} exceeds 1"
            )));
        }
        Ok(Self { sticks })
    }

    /// Sorts the input first.
    pub fn from_unsorted(mut sticks: Vec<f64>) -> Result<Self> {
        sticks.sort_by(|a, b| b.total_cmp(a));
        Self::new(sticks)
    }

    pub fn sticks(&self) -> &[f64] {
        &self.sticks
    }

    pub fn mass(&self) -> f64 {
        self.sticks.iter().sum()
    }

    /// `x₀ = 1 − Σxᵢ`, clamped to `[0, 1]`.
    pub fn dust(&self) -> f64 {
        (1.0 - self.mass()).clamp(0.0, 1.0)
    }
}

/// Weights `θ̂₁, …, θ̂_N` of a generalized Ewens law, stored as logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct GenEwensParams {
    log_weights: Vec<f64>,
}

impl GenEwensParams {
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "generalized Ewens weights must be positive and finite".into(),
            ));
        }
        Ok(Self {
            log_weights: weights.iter().map(|w| w.ln()).collect(),
        })
    }

    /// For weights too large for `f64`, such as `θ̂ᵢ = exp(i^γ)`.
    pub fn from_log_weights(log_weights: Vec<f64>) -> Result<Self> {
        if log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "log weights must be finite".into(),
            ));
        }
        Ok(Self { log_weights })
    }

    /// Constant weights `θ̂ᵢ = θ`, which give the Ewens law.
    pub fn constant(theta: f64, len: usize) -> Result<Self> {
        Self::from_weights(&vec![theta; len])
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    /// `ln θ̂_k`, `k ≥ 1`.
    pub fn log_weight(&self, k: usize) -> f64 {
        self.log_weights[k - 1]
    }
}

/// Declarative description of a permutation law.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Uniform,
    Ewens { theta: f64 },
    GenEwens(GenEwensParams),
    Central(StickVector),
    /// Central measure mixed over Poisson–Dirichlet(θ) sticks.
    PdEwens { theta: f64 },
    /// Independent fixed points with probability `x0`, `base` on the rest.
    Diluted { x0: f64, base: Box<Distribution> },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Uniform | Self::GenEwens(_) | Self::Central(_) => Ok(()),
            Self::Ewens { theta } => check_theta(*theta, false),
            Self::PdEwens { theta } => check_theta(*theta, true),
            Self::Diluted { x0, base } => {
                if !(0.0..1.0).contains(x0) {
                    return Err(Error::InvalidParameter(format!(
                        "dilution x0 = {x0} must lie in [0, 1)"
                    )));
                }
                base.validate()
            }
        }
    }

    /// Precomputes whatever the law needs for sizes up to `n_max`.
    pub fn sampler(&self, n_max: usize) -> Result<Sampler> {
        self.validate()?;
        Ok(match self {
            Self::Uniform => Sampler::Uniform,
            Self::Ewens { theta } => Sampler::Ewens(*theta),
            Self::GenEwens(p) => Sampler::GenEwens(GenEwensSampler::new(p, n_max)?),
            Self::Central(x) => Sampler::Central(CentralSampler::new(x)),
            Self::PdEwens { theta } => Sampler::PdEwens(*theta),
            Self::Diluted { x0, base } => Sampler::Diluted {
                x0: *x0,
                base: Box::new(base.sampler(n_max)?),
            },
        })
    }

    /// Dust mass `x₀` governing the limiting descent kernel of this law.
    pub fn limiting_dust(&self) -> f64 {
        match self {
            Self::Uniform | Self::Ewens { .. } | Self::GenEwens(_) | Self::PdEwens { .. } => 0.0,
            Self::Central(x) => x.dust(),
            Self::Diluted { x0, base } => x0 + (1.0 - x0) * base.limiting_dust(),
        }
    }
}

fn check_theta(theta: f64, strictly_positive: bool) -> Result<()> {
    let ok = theta.is_finite() && if strictly_positive { theta > 0.0 } else { theta >= 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("theta = {theta}")))
    }
}

/// A law ready for repeated sampling.
pub trait PermutationSampler: Sync {
    fn sample(&self, n: usize, rng: &mut RngStream) -> Permutation;
}

impl<F> PermutationSampler for F
where
    F: Fn(usize, &mut RngStream) -> Permutation + Sync,
{
    fn sample(&self, n: usize, rng: &mut RngStream) -> Permutation {
        self(n, rng)
    }
}

/// Prepared form of a [`Distribution`].
#[derive(Clone, Debug)]
pub enum Sampler {
    Uniform,
    Ewens(f64),
    GenEwens(GenEwensSampler),
    Central(CentralSampler),
    PdEwens(f64),
    Diluted { x0: f64, base: Box<Sampler> },
}

impl PermutationSampler for Sampler {
    fn sample(&self, n: usize, rng: &mut RngStream) -> Permutation {
        match self {
            Self::Uniform => uniform_word(n, rng),
            Self::Ewens(theta) => ewens_word(n, *theta, rng),
            Self::GenEwens(s) => s.sample(n, rng),
            Self::Central(s) => s.sample(n, rng),
            Self::PdEwens(theta) => pd_word(n, *theta, rng),
            Self::Diluted { x0, base } => diluted_word(n, *x0, base.as_ref(), rng),
        }
    }
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Fisher–Yates.
pub fn sample_uniform(n: usize, rng: &mut RngStream) -> Result<Permutation> {
    require_n(n)?;
    Ok(uniform_word(n, rng))
}

fn uniform_word(n: usize, rng: &mut RngStream) -> Permutation {
    let mut word: Vec<usize> = (1..=n).collect();
    word.shuffle(rng);
    Permutation::from_word_unchecked(word)
}

/// Chinese restaurant construction of the Ewens(θ) law.
///
/// Element `k + 1` opens a cycle with probability `θ/(θ + k)`, otherwise it is
/// placed right after a uniformly chosen earlier element.
pub fn sample_ewens(n: usize, theta: f64, rng: &mut RngStream) -> Result<Permutation> {
    require_n(n)?;
    check_theta(theta, false)?;
    Ok(ewens_word(n, theta, rng))
}

fn ewens_word(n: usize, theta: f64, rng: &mut RngStream) -> Permutation {
    let mut word = vec![0usize; n];
    for k in 0..n {
        let new = k + 1;
        let opens = k == 0 || rng.random::<f64>() * (theta + k as f64) < theta;
        if opens {
            word[k] = new;
        } else {
            let j = rng.random_range(0..k);
            word[k] = word[j];
            word[j] = new;
        }
    }
    Permutation::from_word_unchecked(word)
}

/// Generalized Ewens sampler with the normalizations `h_m` cached.
///
/// `h_m = (1/m!) Σ_{σ∈S_m} Π θ̂ᵢ^{rᵢ(σ)}` satisfies `m·h_m = Σ_k θ̂_k h_{m−k}`;
/// the cycle through the smallest unplaced point has length `k` with
/// probability `θ̂_k h_{m−k} / (m h_m)`.
#[derive(Clone, Debug)]
pub struct GenEwensSampler {
    params: GenEwensParams,
    log_h: Vec<f64>,
}

impl GenEwensSampler {
    pub fn new(params: &GenEwensParams, n_max: usize) -> Result<Self> {
        if params.len() < n_max {
            return Err(Error::InvalidParameter(format!(
                "{} weights given, {n_max} needed",
                params.len()
            )));
        }
        let mut log_h = Vec::with_capacity(n_max + 1);
        log_h.push(0.0);
        let mut terms = Vec::with_capacity(n_max);
        for m in 1..=n_max {
            terms.clear();
            terms.extend((1..=m).map(|k| params.log_weight(k) + log_h[m - k]));
            log_h.push(log_sum_exp(&terms) - (m as f64).ln());
        }
        Ok(Self {
            params: params.clone(),
            log_h,
        })
    }

    pub fn max_n(&self) -> usize {
        self.log_h.len() - 1
    }

    /// `ln h_m`.
    pub fn log_normalization(&self, m: usize) -> f64 {
        self.log_h[m]
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Permutation {
        assert!(n <= self.max_n(), "sampler prepared for n <= {}", self.max_n());
        let mut word = vec![0usize; n];
        // unplaced points except the current leader, with their slots
        let mut pool: Vec<usize> = (1..=n).collect();
        let mut slot: Vec<usize> = (0..n).collect();
        let mut remaining = n;
        let mut next_leader = 1;
        while remaining > 0 {
            while word[next_leader - 1] != 0 {
                next_leader += 1;
            }
            let leader = next_leader;
            remove_from_pool(&mut pool, &mut slot, leader);
            let m = remaining;
            let k = self.draw_cycle_length(m, rng);
            let mut prev = leader;
            for _ in 1..k {
                let pick = pool[rng.random_range(0..pool.len())];
                remove_from_pool(&mut pool, &mut slot, pick);
                word[prev - 1] = pick;
                prev = pick;
            }
            word[prev - 1] = leader;
            remaining -= k;
        }
        Permutation::from_word_unchecked(word)
    }

    fn draw_cycle_length(&self, m: usize, rng: &mut RngStream) -> usize {
        let u: f64 = rng.random();
        let base = (m as f64).ln() + self.log_h[m];
        let mut acc = 0.0;
        let mut last_positive = 1;
        for k in 1..=m {
            let p = (self.params.log_weight(k) + self.log_h[m - k] - base).exp();
            if p > 0.0 {
                last_positive = k;
            }
            acc += p;
            if u < acc {
                return k;
            }
        }
        last_positive
    }
}

fn remove_from_pool(pool: &mut Vec<usize>, slot: &mut [usize], v: usize) {
    let at = slot[v - 1];
    let last = *pool.last().expect("nonempty pool");
    pool.swap_remove(at);
    if last != v {
        slot[last - 1] = at;
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Exact generalized Ewens sample; prepares the normalizations on each call.
pub fn sample_gen_ewens(
    n: usize,
    params: &GenEwensParams,
    rng: &mut RngStream,
) -> Result<Permutation> {
    require_n(n)?;
    Ok(GenEwensSampler::new(params, n)?.sample(n, rng))
}

/// Circles read counterclockwise as cycles; the state of a circle-insertion run.
#[derive(Clone, Debug, Default)]
pub struct CircleInsertion {
    word: Vec<usize>,
    circles: Vec<Vec<usize>>,
}

impl CircleInsertion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Inserts the next element on circle `pos` (1-based), or on a fresh
    /// private circle when `pos == 0`.
    pub fn insert(&mut self, pos: usize, rng: &mut impl Rng) {
        let new = self.word.len() + 1;
        if pos == 0 {
            self.word.push(new);
            return;
        }
        if self.circles.len() < pos {
            self.circles.resize_with(pos, Vec::new);
        }
        let circle = &mut self.circles[pos - 1];
        if circle.is_empty() {
            self.word.push(new);
        } else {
            let j = circle[rng.random_range(0..circle.len())];
            self.word.push(self.word[j - 1]);
            self.word[j - 1] = new;
        }
        circle.push(new);
    }

    pub fn permutation(&self) -> Permutation {
        Permutation::from_word_unchecked(self.word.clone())
    }

    pub fn into_permutation(self) -> Permutation {
        Permutation::from_word_unchecked(self.word)
    }
}

/// Circle-insertion sampler for the central measure of a fixed stick vector.
#[derive(Clone, Debug)]
pub struct CentralSampler {
    cumulative: Vec<f64>,
}

impl CentralSampler {
    pub fn new(x: &StickVector) -> Self {
        let cumulative = x
            .sticks()
            .iter()
            .scan(0.0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        Self { cumulative }
    }

    /// Stick index for the next element, 0 for dust.
    pub fn draw_position(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let j = self.cumulative.partition_point(|&c| c <= u);
        if j < self.cumulative.len() {
            j + 1
        } else {
            0
        }
    }

    /// A lazily extended run whose successive states project onto each other.
    pub fn process<'a>(&'a self, rng: &'a mut RngStream) -> CentralProcess<'a> {
        CentralProcess {
            sampler: self,
            state: CircleInsertion::new(),
            rng,
        }
    }

    fn sample(&self, n: usize, rng: &mut RngStream) -> Permutation {
        let mut state = CircleInsertion::new();
        for _ in 0..n {
            let pos = self.draw_position(rng);
            state.insert(pos, rng);
        }
        state.into_permutation()
    }
}

/// Virtual permutation `σ₁, σ₂, …` produced by successive circle insertions.
pub struct CentralProcess<'a> {
    sampler: &'a CentralSampler,
    state: CircleInsertion,
    rng: &'a mut RngStream,
}

impl CentralProcess<'_> {
    /// Grows the permutation by one element and returns it.
    pub fn step(&mut self) -> Permutation {
        let pos = self.sampler.draw_position(self.rng);
        self.state.insert(pos, self.rng);
        self.state.permutation()
    }
}

pub fn sample_central(n: usize, x: &StickVector, rng: &mut RngStream) -> Result<Permutation> {
    require_n(n)?;
    Ok(CentralSampler::new(x).sample(n, rng))
}

/// Central measure mixed over Poisson–Dirichlet(θ) sticks, sampled lazily:
/// sticks are broken off in size-biased order with `Beta(1, θ)` fractions
/// of the remaining mass the first time a uniform draw lands beyond them.
pub fn sample_pd_ewens_equivalent(
    n: usize,
    theta: f64,
    rng: &mut RngStream,
) -> Result<Permutation> {
    require_n(n)?;
    check_theta(theta, true)?;
    Ok(pd_word(n, theta, rng))
}

fn pd_word(n: usize, theta: f64, rng: &mut RngStream) -> Permutation {
    let mut cumulative: Vec<f64> = Vec::new();
    let mut broken = 0.0f64;
    let mut state = CircleInsertion::new();
    for _ in 0..n {
        let u: f64 = rng.random();
        while u >= broken {
            let rest = 1.0 - broken;
            if rest <= f64::EPSILON {
                // remaining mass below resolution: absorb into the last stick
                if let Some(last) = cumulative.last_mut() {
                    *last = 1.0;
                }
                broken = 1.0;
                if cumulative.is_empty() {
                    cumulative.push(1.0);
                }
                break;
            }
            let v: f64 = rng.random();
            // 1 − U^{1/θ} ~ Beta(1, θ)
            let frac = -f64::exp_m1(v.ln() / theta);
            broken += rest * frac;
            cumulative.push(broken);
        }
        let j = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        state.insert(j + 1, rng);
    }
    state.into_permutation()
}

/// Fixed points added independently with probability `x0`; `base` permutes the
/// remaining points, relabeled in increasing order.
pub fn sample_diluted(
    n: usize,
    x0: f64,
    base: &impl PermutationSampler,
    rng: &mut RngStream,
) -> Result<Permutation> {
    require_n(n)?;
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::InvalidParameter(format!("x0 = {x0}")));
    }
    Ok(diluted_word(n, x0, base, rng))
}

fn diluted_word<S: PermutationSampler + ?Sized>(
    n: usize,
    x0: f64,
    base: &S,
    rng: &mut RngStream,
) -> Permutation {
    let free: Vec<usize> = (1..=n).filter(|_| rng.random::<f64>() >= x0).collect();
    let mut word: Vec<usize> = (1..=n).collect();
    if !free.is_empty() {
        let tau = base.sample(free.len(), rng);
        for (i, &c) in free.iter().enumerate() {
            word[c - 1] = free[tau.apply(i + 1) - 1];
        }
    }
    Permutation::from_word_unchecked(word)
}
