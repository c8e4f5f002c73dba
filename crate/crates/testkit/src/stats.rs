//! Small statistical helpers for distributional checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square goodness-of-fit p-value of `counts` against the
/// cell probabilities `probs` (must sum to 1).
pub fn chi_square_p_value(counts: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), probs.len());
    assert!(counts.len() >= 2);
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let expected = n as f64 * p;
            assert!(expected > 0.0);
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = (counts.len() - 1) as f64;
    let dist = ChiSquared::new(dof).expect("valid dof");
    1.0 - dist.cdf(stat)
}

/// Uniform-cell convenience wrapper.
pub fn chi_square_uniform_p_value(counts: &[u64]) -> f64 {
    let k = counts.len();
    chi_square_p_value(counts, &vec![1.0 / k as f64; k])
}
