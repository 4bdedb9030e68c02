//! Young diagrams, Robinson–Schensted shapes and the rotated height profile.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{guard, Error, Result};
use crate::perm::Permutation;

/// A partition `λ₁ ≥ λ₂ ≥ … ≥ λ_r > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    /// Accepts trailing zeros and drops them.
    pub fn new(mut rows: Vec<usize>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.contains(&0) || rows.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter(format!(
                "rows {rows:?} are not a partition"
            )));
        }
        Ok(Self { rows })
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// `λ_i` (1-based), zero past the last row.
    pub fn row(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.rows.get(i - 1).copied().unwrap_or(0)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// `λ′_i = |{ j : λ_j ≥ i }|`.
    pub fn conjugate(&self) -> Self {
        let width = self.row(1);
        let rows = (1..=width)
            .map(|i| self.rows.partition_point(|&r| r >= i))
            .collect();
        Self { rows }
    }

    /// First `k` rows, padded with zeros.
    pub fn top_rows(&self, k: usize) -> Vec<usize> {
        (1..=k).map(|i| self.row(i)).collect()
    }

    pub fn height_function(&self) -> HeightFunction {
        HeightFunction::new(self.clone())
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let rows = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }
}

/// Shape of the Robinson–Schensted insertion tableau of `sigma`.
pub fn rsk_shape(sigma: &Permutation) -> YoungDiagram {
    rsk_shape_of_word(sigma.word())
}

/// Row insertion of a word of distinct values, keeping only the tableau rows.
pub fn rsk_shape_of_word(word: &[usize]) -> YoungDiagram {
    let mut tableau: Vec<Vec<u32>> = Vec::new();
    for &v in word {
        let mut bumped = v as u32;
        let mut placed = false;
        for row in tableau.iter_mut() {
            let pos = row.partition_point(|&t| t < bumped);
            if pos == row.len() {
                row.push(bumped);
                placed = true;
                break;
            }
            bumped = std::mem::replace(&mut row[pos], bumped);
        }
        if !placed {
            tableau.push(vec![bumped]);
        }
    }
    YoungDiagram {
        rows: tableau.iter().map(Vec::len).collect(),
    }
}

/// Largest union of `k` increasing subsequences, by exhaustive search.
///
/// A set of positions is a union of `k` increasing subsequences exactly when it
/// has no decreasing subsequence of length `k + 1`, so the oracle scans all
/// `2ⁿ` position subsets. Test oracle only; `n ≤ 12`.
pub fn greene_invariant(sigma: &Permutation, k: usize) -> Result<usize> {
    let profile = greene_profile(sigma)?;
    Ok(match k {
        0 => 0,
        k => profile[(k - 1).min(profile.len() - 1)],
    })
}

/// Same as [`greene_invariant`] for decreasing subsequences.
pub fn greene_invariant_decreasing(sigma: &Permutation, k: usize) -> Result<usize> {
    greene_invariant(&sigma.value_reversed(), k)
}

/// `[g(1), …, g(n)]` with `g(k)` the largest union of `k` increasing subsequences.
pub fn greene_profile(sigma: &Permutation) -> Result<Vec<usize>> {
    const MAX_N: usize = 12;
    let n = sigma.len();
    if n > MAX_N {
        return Err(guard("greene oracle", format!("n <= {MAX_N}"), n));
    }
    let w = sigma.word();
    let mut best = vec![0usize; n + 1];
    let mut vals = Vec::with_capacity(n);
    for mask in 0u32..1 << n {
        vals.clear();
        vals.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| w[i]));
        let d = longest_decreasing_quadratic(&vals);
        let size = vals.len();
        if size > best[d] {
            best[d] = size;
        }
    }
    // a set with longest decreasing run d is a union of k increasing runs for every k ≥ d
    let mut profile = Vec::with_capacity(n);
    let mut running = 0;
    for &b in best.iter().skip(1) {
        running = running.max(b);
        profile.push(running);
    }
    Ok(profile)
}

fn longest_decreasing_quadratic(vals: &[usize]) -> usize {
    let mut len = vec![1usize; vals.len()];
    let mut best = 0;
    for j in 0..vals.len() {
        for i in 0..j {
            if vals[i] > vals[j] && len[i] + 1 > len[j] {
                len[j] = len[i] + 1;
            }
        }
        best = best.max(len[j]);
    }
    best
}

/// Boundary of a diagram drawn with unit boxes, rotated so that the first row
/// runs toward positive `s`, and extended by `|s|`.
///
/// Breakpoints sit at `s = (√2/2)·i`, `i ∈ ℤ`; at those points the height is
/// `(√2/2)·(|i| + 2·dᵢ)` where `dᵢ` counts boxes of content `i`.
#[derive(Clone, Debug)]
pub struct HeightFunction {
    diagram: YoungDiagram,
    // λ_k − k for k = 1..=r, strictly decreasing
    shifted: Vec<i64>,
}

impl HeightFunction {
    pub fn new(diagram: YoungDiagram) -> Self {
        let shifted = diagram
            .rows
            .iter()
            .enumerate()
            .map(|(k, &r)| r as i64 - (k as i64 + 1))
            .collect();
        Self { diagram, shifted }
    }

    pub fn diagram(&self) -> &YoungDiagram {
        &self.diagram
    }

    /// Number of boxes with content `j − k = i`.
    pub fn diagonal_count(&self, i: i64) -> i64 {
        let r = self.shifted.len() as i64;
        let above = self.shifted.partition_point(|&c| c >= i) as i64;
        let n_i = above + (-i - r).max(0);
        n_i - (-i).max(0)
    }

    /// `√2 · L(√2/2 · i)`, always an integer.
    pub fn doubled_height(&self, i: i64) -> i64 {
        i.abs() + 2 * self.diagonal_count(i)
    }

    /// `L` at the breakpoint `s = √2/2 · i`.
    pub fn at_breakpoint(&self, i: i64) -> f64 {
        FRAC_1_SQRT_2 * self.doubled_height(i) as f64
    }

    /// Breakpoint indices outside of which `L(s) = |s|`.
    pub fn breakpoint_range(&self) -> (i64, i64) {
        (-(self.diagram.num_rows() as i64), self.diagram.row(1) as i64)
    }

    pub fn eval(&self, s: f64) -> f64 {
        let t = s * std::f64::consts::SQRT_2;
        let i = t.floor();
        let frac = t - i;
        let i = i as i64;
        let a = self.at_breakpoint(i);
        if frac == 0.0 {
            return a;
        }
        let b = self.at_breakpoint(i + 1);
        a + (b - a) * frac
    }
}

/// Convenience wrapper for [`HeightFunction::eval`].
pub fn height_eval(lambda: &YoungDiagram, s: f64) -> f64 {
    lambda.height_function().eval(s)
}

/// `sup_s |L_λ(s) − L_μ(s)|`, exact because both are affine between breakpoints.
pub fn diagram_sup_distance(lambda: &YoungDiagram, mu: &YoungDiagram) -> f64 {
    let (hl, hm) = (lambda.height_function(), mu.height_function());
    let lo = -(lambda.num_rows().max(mu.num_rows()) as i64);
    let hi = lambda.row(1).max(mu.row(1)) as i64;
    let max_gap = (lo..=hi)
        .map(|i| (hl.diagonal_count(i) - hm.diagonal_count(i)).abs())
        .max()
        .unwrap_or(0);
    std::f64::consts::SQRT_2 * max_gap as f64
}

/// `max_i |Σ_{k≤i} (λ_k − μ_k)|`.
pub fn max_partial_sum_gap(lambda: &YoungDiagram, mu: &YoungDiagram) -> usize {
    let r = lambda.num_rows().max(mu.num_rows());
    let mut acc: i64 = 0;
    let mut best: i64 = 0;
    for i in 1..=r {
        acc += lambda.row(i) as i64 - mu.row(i) as i64;
        best = best.max(acc.abs());
    }
    best as usize
}
