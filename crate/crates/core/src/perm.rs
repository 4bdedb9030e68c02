//! Permutations of `{1, …, n}` stored as one-line words.
//!
//! Composition follows `(σ∘τ)(i) = σ(τ(i))`: the right operand acts first.
//! Cycle form is computed on demand; everything else works on the word.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{1, …, n}` given by its word `(σ(1), …, σ(n))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    /// Validates that `word` is a bijection of `{1, …, n}` with `n ≥ 1`.
    pub fn new(word: Vec<usize>) -> Result<Self> {
        let n = word.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty word".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &word {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
        }
        Ok(Self { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<usize>) -> Self {
        debug_assert!(Self::new(word.clone()).is_ok());
        Self { word }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            word: (1..=n).collect(),
        }
    }

    /// The value reversal `(n, n−1, …, 1)`.
    pub fn reversal(n: usize) -> Self {
        Self {
            word: (1..=n).rev().collect(),
        }
    }

    /// The single n-cycle `(2, 3, …, n, 1)`.
    pub fn long_cycle(n: usize) -> Self {
        Self {
            word: (1..=n).map(|i| i % n + 1).collect(),
        }
    }

    /// The transposition exchanging `i` and `j` in `S_n`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Error::InvalidParameter(format!(
                "transposition ({i} {j}) in S_{n}"
            )));
        }
        let mut word: Vec<usize> = (1..=n).collect();
        word.swap(i - 1, j - 1);
        Ok(Self { word })
    }

    /// Builds a permutation of size `n` from disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut word = vec![0usize; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a > n {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle element {a} outside 1..={n}"
                    )));
                }
                if word[a - 1] != 0 {
                    return Err(Error::InvalidPermutation(format!(
                        "element {a} appears in two cycles"
                    )));
                }
                word[a - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        for (i, v) in word.iter_mut().enumerate() {
            if *v == 0 {
                *v = i + 1;
            }
        }
        Self::new(word)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn into_word(self) -> Vec<usize> {
        self.word
    }

    /// `σ(i)` for `1 ≤ i ≤ n`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.word[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.word.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Self { word: inv }
    }

    /// `self ∘ tau`, i.e. `i ↦ self(tau(i))`.
    pub fn compose(&self, tau: &Permutation) -> Result<Self> {
        check_sizes(self, tau)?;
        Ok(Self {
            word: tau.word.iter().map(|&t| self.word[t - 1]).collect(),
        })
    }

    /// `rho ∘ self ∘ rho⁻¹`: relabels every cycle element `a` as `rho(a)`.
    pub fn conjugate(&self, rho: &Permutation) -> Result<Self> {
        check_sizes(self, rho)?;
        let mut word = vec![0; self.len()];
        for (i, &v) in self.word.iter().enumerate() {
            word[rho.word[i] - 1] = rho.word[v - 1];
        }
        Ok(Self { word })
    }

    /// Swaps the images of `i` and `j`, i.e. `self ∘ (i j)` in place.
    pub(crate) fn right_multiply_transposition(&mut self, i: usize, j: usize) {
        self.word.swap(i - 1, j - 1);
    }

    pub fn cycles(&self) -> CycleDecomposition {
        let n = self.len();
        let mut visited = vec![false; n + 1];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut a = start;
            while !visited[a] {
                visited[a] = true;
                cycle.push(a);
                a = self.word[a - 1];
            }
            cycles.push(cycle);
        }
        CycleDecomposition { cycles, n }
    }

    /// `#(σ)`, the number of cycles.
    pub fn cycle_count(&self) -> usize {
        let n = self.len();
        let mut visited = vec![false; n + 1];
        let mut count = 0;
        for start in 1..=n {
            if visited[start] {
                continue;
            }
            count += 1;
            let mut a = start;
            while !visited[a] {
                visited[a] = true;
                a = self.word[a - 1];
            }
        }
        count
    }

    /// Cycle lengths sorted in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        self.cycles().cycle_type()
    }

    pub fn fixed_point_count(&self) -> usize {
        self.word
            .iter()
            .enumerate()
            .filter(|(i, &v)| v == i + 1)
            .count()
    }

    pub fn descent_set(&self) -> DescentSet {
        let positions = self
            .word
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] < w[0])
            .map(|(i, _)| i + 1)
            .collect();
        DescentSet {
            positions,
            n: self.len(),
        }
    }

    pub fn descent_count(&self) -> usize {
        self.word.windows(2).filter(|w| w[1] < w[0]).count()
    }

    /// `i ↦ n + 1 − σ(i)`: turns decreasing subsequences into increasing ones.
    pub fn value_reversed(&self) -> Self {
        let n = self.len();
        Self {
            word: self.word.iter().map(|&v| n + 1 - v).collect(),
        }
    }

    /// `ℓ(σ)`, the longest increasing subsequence, by patience sorting.
    pub fn lis_length(&self) -> usize {
        lis_length(&self.word)
    }

    /// `ℓ̄(σ)`, computed as `ℓ` of the value-reversed word.
    pub fn lds_length(&self) -> usize {
        let n = self.len();
        lis_length_by(&self.word, |v| n + 1 - v)
    }

    /// Removes `n` from its cycle: its predecessor is sent to its successor.
    pub fn project(&self) -> Result<Self> {
        let n = self.len();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "projection needs n >= 2".into(),
            ));
        }
        let mut word = self.word[..n - 1].to_vec();
        let succ = self.word[n - 1];
        if succ != n {
            let pred = word.iter().position(|&v| v == n).expect("n has a preimage");
            word[pred] = succ;
        }
        Ok(Self { word })
    }

    /// All permutations of `S_n` in lexicographic order of their words.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((1..=n).collect()),
        }
    }

    /// Position of this word in the lexicographic enumeration of `S_n`.
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller_after = self.word[i + 1..]
                .iter()
                .filter(|&&v| v < self.word[i])
                .count();
            rank = rank * (n - i) + smaller_after;
        }
        rank
    }
}

fn check_sizes(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Longest strictly increasing subsequence of `word` in `O(n log n)`.
pub fn lis_length(word: &[usize]) -> usize {
    lis_length_by(word, |v| v)
}

fn lis_length_by(word: &[usize], key: impl Fn(usize) -> usize) -> usize {
    // tops[k] = smallest possible tail of an increasing subsequence of length k + 1
    let mut tops: Vec<usize> = Vec::with_capacity(64);
    for &v in word {
        let v = key(v);
        let pos = tops.partition_point(|&t| t < v);
        if pos == tops.len() {
            tops.push(v);
        } else {
            tops[pos] = v;
        }
    }
    tops.len()
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.word {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(word)
    }
}

/// Lexicographic iterator over `S_n`.
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        if current.is_empty() {
            return None;
        }
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { word: current })
    }
}

fn next_lexicographic(w: &mut [usize]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Canonical cycle form: each cycle starts at its minimum, cycles sorted by minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
    n: usize,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// `r[j]` = number of cycles of length `j` (index 0 unused).
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut r = vec![0; self.n + 1];
        for c in &self.cycles {
            r[c.len()] += 1;
        }
        r
    }

    /// Length of the cycle containing `i`.
    pub fn cycle_length_of(&self, i: usize) -> usize {
        self.cycles
            .iter()
            .find(|c| c.contains(&i))
            .map_or(0, Vec::len)
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.n, &self.cycles).expect("canonical decomposition")
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            f.write_str("(")?;
            for (k, a) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// `D(σ) = { i : σ(i+1) < σ(i) }`, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentSet {
    positions: Vec<usize>,
    n: usize,
}

impl DescentSet {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.positions.binary_search(&i).is_ok()
    }

    /// Whether every element of `set` is a descent.
    pub fn contains_all(&self, set: &[usize]) -> bool {
        set.iter().all(|&i| self.contains(i))
    }
}
