use permlab::samplers::{sample_ewens, sample_uniform};
use permlab::{Permutation, RngStream};

const DRAWS: u64 = 100_000;

#[test]
fn descent_marginal_is_position_free() {
    let n = 50;
    let mut counts = vec![0u64; n - 1];
    for i in 0..DRAWS {
        let p = sample_ewens(n, 2.0, &mut RngStream::new(50, i)).unwrap();
        for d in p.descent_set().positions() {
            counts[d - 1] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let p = total as f64 / ((n - 1) as f64 * DRAWS as f64);
    let var = DRAWS as f64 * p * (1.0 - p);
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - DRAWS as f64 * p).powi(2) / var).sum();
    let dof = (n - 2) as f64;
    assert!(chi2 <= dof + 4.0 * (2.0 * dof).sqrt(), "chi2 = {chi2}");
    assert!((p - 0.5).abs() < 0.01);
}

/// Estimate of `P(A ⊆ D(σ) | σ(A′) ∩ A′ = ∅)` with `A′ = {1..m}`.
fn conditioned(
    draw: impl Fn(&mut RngStream) -> Permutation,
    seed: u64,
    m: usize,
    descents: &[usize],
) -> (f64, f64) {
    let (mut kept, mut hits) = (0u64, 0u64);
    for i in 0..2 * DRAWS {
        let p = draw(&mut RngStream::new(seed, i));
        if (1..=m).any(|j| p.apply(j) <= m) {
            continue;
        }
        kept += 1;
        hits += u64::from(descents.iter().all(|&d| p.apply(d) > p.apply(d + 1)));
    }
    let est = hits as f64 / kept as f64;
    (est, (est * (1.0 - est) / kept as f64).sqrt())
}

#[test]
fn conditioned_descents_do_not_see_the_law() {
    let n = 30;
    for (m, set, exact) in [(3, vec![1, 2], 1.0 / 6.0), (4, vec![1, 3], 0.25), (4, vec![2], 0.5)] {
        let (a, sa) = conditioned(|r| sample_ewens(n, 3.0, r).unwrap(), 31, m, &set);
        let (b, sb) = conditioned(|r| sample_uniform(n, r).unwrap(), 32, m, &set);
        let z = (a - b).abs() / (sa * sa + sb * sb).sqrt();
        assert!(z <= 4.0, "{set:?}: {a} vs {b}");
        assert!((a - exact).abs() <= 4.0 * sa && (b - exact).abs() <= 4.0 * sb, "{set:?}: {a}, {b}");
    }
}
