//! Markov-chain absorption oracle for the pure-noise game (α = 0): exact
//! survival probabilities from powers of the substochastic interior
//! transition, against which empirical termination fractions are checked.

use pharmonious::ProblemInstance;

/// P(the first `cap` moves all stay interior | start at `x0`), i.e. the
/// exact probability that a noise-only path is capped.
pub fn noise_survival_probability(inst: &ProblemInstance, x0: usize, cap: usize) -> f64 {
    assert_eq!(inst.alpha(), 0.0, "the absorption oracle covers alpha = 0");
    let grid = inst.grid();
    assert!(grid.is_interior(x0));
    let mut curr: Vec<f64> = (0..grid.len())
        .map(|i| if grid.is_interior(i) { 1.0 } else { 0.0 })
        .collect();
    let mut next = vec![0.0; grid.len()];
    for _ in 0..cap {
        for node in 0..grid.len() {
            next[node] = if grid.is_interior(node) {
                let members = inst.neighborhoods().members(node);
                let sum: f64 = members.iter().map(|&m| curr[m as usize]).sum();
                sum / members.len() as f64
            } else {
                0.0
            };
        }
        std::mem::swap(&mut curr, &mut next);
    }
    curr[x0]
}
