//! Tug-of-war with noise on the instance lattice.
//!
//! One game step from an interior node draws two uniform variates: the
//! first selects the branch with thresholds `[0, α/2)` (Player I),
//! `[α/2, α)` (Player II), `[α, 1)` (noise), the second picks the noise
//! node uniformly from the ε-ball. The game stops at the exit time from Ω
//! at the latest; the payoff is `G = F on Γ, Ψ on Ω` evaluated where the
//! stopping rule fired. Value functions are estimated by averaging
//! independent paths whose RNG streams are keyed by `(seed, path index)`,
//! so estimates are reproducible bit-for-bit regardless of scheduling.

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dpp::ProblemInstance;
use crate::field::ScalarField;
use crate::geometry::Grid;
use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub enum GameError {
    /// A strategy proposed a node outside the current ε-ball.
    IllegalMove { from: usize, chosen: usize },
    /// Pull target coincides with the domain closure.
    DegeneratePull,
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::IllegalMove { from, chosen } => {
                write!(
                    f,
                    "strategy moved from node {from} to {chosen}, outside the eps-ball"
                )
            }
            GameError::DegeneratePull => {
                write!(f, "pull target must lie outside the closure of the domain")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GameError {}

/// The optimal-stopping reward `G = χ_Γ F + χ_Ω Ψ`, copied bit-exactly
/// from the instance data.
#[derive(Clone, Debug)]
pub struct PayoffSpec {
    g: ScalarField,
}

impl PayoffSpec {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let grid = inst.grid();
        let values = (0..grid.len())
            .map(|i| {
                if grid.is_interior(i) {
                    inst.obstacle().value(i)
                } else {
                    inst.boundary_data().value(i)
                }
            })
            .collect();
        PayoffSpec {
            g: ScalarField::from_values(values),
        }
    }

    pub fn g(&self) -> &ScalarField {
        &self.g
    }

    pub fn value(&self, node: usize) -> f64 {
        self.g.value(node)
    }
}

/// A player: deterministic given the full history (`history` ends with
/// the current node). Implementations must return a member of the
/// current ε-ball; the engine validates every move it materializes.
pub trait Strategy: Sync {
    fn choose(&self, history: &[usize], current: usize) -> usize;
}

/// Decides, before each move, whether the token stops where it stands.
/// The engine additionally enforces stopping on Γ (τ ≤ τ₀).
pub trait StoppingRule: Sync {
    fn should_stop(&self, history: &[usize], current: usize) -> bool;
}

/// Markovian strategy with one precomputed move per node.
#[derive(Clone, Debug)]
pub struct TableStrategy {
    moves: Vec<u32>,
}

impl Strategy for TableStrategy {
    fn choose(&self, _history: &[usize], current: usize) -> usize {
        self.moves[current] as usize
    }
}

/// Exact argmax selection of `field` over the ε-ball; ties resolve to the
/// lowest node index. On a finite grid this is an optimal selection.
pub fn greedy_sup(field: &ScalarField, inst: &ProblemInstance) -> TableStrategy {
    greedy(field, inst, true)
}

/// Exact argmin selection, tie-broken like [`greedy_sup`].
pub fn greedy_inf(field: &ScalarField, inst: &ProblemInstance) -> TableStrategy {
    greedy(field, inst, false)
}

fn greedy(field: &ScalarField, inst: &ProblemInstance, maximize: bool) -> TableStrategy {
    let grid = inst.grid();
    assert_eq!(field.len(), grid.len());
    let moves = (0..grid.len())
        .map(|node| {
            if !grid.is_interior(node) {
                return node as u32;
            }
            let members = inst.neighborhoods().members(node);
            let mut best = members[0];
            let mut best_val = field.value(best as usize);
            for &j in &members[1..] {
                let val = field.value(j as usize);
                if (maximize && val > best_val) || (!maximize && val < best_val) {
                    best = j;
                    best_val = val;
                }
            }
            best
        })
        .collect();
    TableStrategy { moves }
}

/// Pull strategy: from an interior node `x` the target is
/// `x + (ε − ε³)·(z0 − x)/|z0 − x|` and the move is the ball node nearest
/// to it (ties to the lowest index); boundary nodes map to themselves.
pub fn pull_toward(z0: &[f64], inst: &ProblemInstance) -> Result<TableStrategy, GameError> {
    let grid = inst.grid();
    assert_eq!(z0.len(), grid.dim());
    if grid.domain().distance_to_domain(z0) == 0.0 {
        return Err(GameError::DegeneratePull);
    }
    let eps = inst.eps();
    let reach = eps - eps * eps * eps;
    let dim = grid.dim();
    let mut target = alloc::vec![0.0; dim];
    let moves = (0..grid.len())
        .map(|node| {
            if !grid.is_interior(node) {
                return node as u32;
            }
            let x = grid.coords(node);
            let dist = math::dist(x, z0);
            debug_assert!(dist > 0.0);
            for d in 0..dim {
                target[d] = x[d] + reach * (z0[d] - x[d]) / dist;
            }
            let members = inst.neighborhoods().members(node);
            let mut best = members[0];
            let mut best_d2 = math::dist2(grid.coords(best as usize), &target);
            for &j in &members[1..] {
                let d2 = math::dist2(grid.coords(j as usize), &target);
                if d2 < best_d2 {
                    best = j;
                    best_d2 = d2;
                }
            }
            best
        })
        .collect();
    Ok(TableStrategy { moves })
}

/// The passive strategy: the player leaves the token in place (the
/// center belongs to the strict ball). Paired with itself the game is
/// driven by noise alone.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandStill;

impl Strategy for StandStill {
    fn choose(&self, _history: &[usize], current: usize) -> usize {
        current
    }
}

/// τ₀: stop exactly when the token sits on Γ.
#[derive(Clone, Copy, Debug)]
pub struct ExitRule<'g> {
    grid: &'g Grid,
}

pub fn exit_time_rule(grid: &Grid) -> ExitRule<'_> {
    ExitRule { grid }
}

impl StoppingRule for ExitRule<'_> {
    fn should_stop(&self, _history: &[usize], current: usize) -> bool {
        !self.grid.is_interior(current)
    }
}

/// τ̄: stop on Γ or wherever `field ≤ Ψ + tol` (the contact set of the
/// solved instance when `field` is the fixed point).
#[derive(Clone, Copy, Debug)]
pub struct ContactRule<'a> {
    grid: &'a Grid,
    field: &'a ScalarField,
    psi: &'a ScalarField,
    tol: f64,
}

pub fn contact_rule<'a>(
    field: &'a ScalarField,
    psi: &'a ScalarField,
    tol: f64,
    grid: &'a Grid,
) -> ContactRule<'a> {
    assert!(tol >= 0.0);
    assert_eq!(field.len(), grid.len());
    assert_eq!(psi.len(), grid.len());
    assert!(
        field
            .values()
            .iter()
            .zip(psi.values())
            .all(|(u, p)| *u >= *p - tol),
        "contact rule requires field >= Psi - tol everywhere"
    );
    ContactRule {
        grid,
        field,
        psi,
        tol,
    }
}

impl StoppingRule for ContactRule<'_> {
    fn should_stop(&self, _history: &[usize], current: usize) -> bool {
        !self.grid.is_interior(current)
            || self.field.value(current) <= self.psi.value(current) + self.tol
    }
}

/// One realized game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameOutcome {
    pub payoff: f64,
    /// Number of moves made (the stopping index τ).
    pub length: usize,
    /// True when the cap fired before the stopping rule; the payoff then
    /// falls back to `G` at the current node, a documented bias source.
    pub capped: bool,
    pub terminal: usize,
}

/// Sample statistics of a batch of independent games.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √n (zero for n = 1).
    pub stderr: f64,
    pub n_paths: usize,
    pub n_capped: usize,
    pub mean_length: f64,
}

/// Termination diagnostics: fraction of paths that stopped before the
/// cap, and the distribution of stopping indices (`histogram[k]` counts
/// paths of length `k`; capped paths land in the last bucket).
#[derive(Clone, Debug, PartialEq)]
pub struct TerminationStats {
    pub fraction_terminated: f64,
    pub histogram: Vec<u64>,
}

/// Default path cap `ceil(factor/ε²)`; the supermartingale bound on the
/// expected stopping time is C/ε² with an unspecified constant, and
/// `factor = 50` is the shipped engineering choice.
pub fn default_cap(eps: f64, factor: f64) -> usize {
    assert!(eps > 0.0 && factor > 0.0);
    math::ceil(factor / (eps * eps)) as usize
}

/// The per-path RNG stream: one ChaCha stream per `(seed, path index)`.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one u64.
pub fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Game engine bound to one instance: transition law, path runner, and
/// Monte Carlo estimators.
#[derive(Clone, Debug)]
pub struct Game<'a> {
    instance: &'a ProblemInstance,
    payoff: PayoffSpec,
}

impl<'a> Game<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        Game {
            instance,
            payoff: PayoffSpec::from_instance(instance),
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        self.instance
    }

    pub fn payoff(&self) -> &PayoffSpec {
        &self.payoff
    }

    /// One transition from an interior node. `draws` supplies the branch
    /// variate and the noise-node variate, in that order.
    pub fn step(
        &self,
        history: &[usize],
        current: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        draws: (f64, f64),
    ) -> Result<usize, GameError> {
        assert!(
            self.instance.grid().is_interior(current),
            "step requires an interior node"
        );
        let members = self.instance.neighborhoods().members(current);
        let alpha = self.instance.alpha();
        let (u_branch, u_node) = draws;
        let chosen = if u_branch < 0.5 * alpha {
            self.validate(current, sigma_i.choose(history, current), members)?
        } else if u_branch < alpha {
            self.validate(current, sigma_ii.choose(history, current), members)?
        } else {
            let mut idx = (u_node * members.len() as f64) as usize;
            if idx >= members.len() {
                idx = members.len() - 1;
            }
            members[idx] as usize
        };
        Ok(chosen)
    }

    fn validate(&self, from: usize, chosen: usize, members: &[u32]) -> Result<usize, GameError> {
        if members.binary_search(&(chosen as u32)).is_ok() {
            Ok(chosen)
        } else {
            Err(GameError::IllegalMove { from, chosen })
        }
    }

    /// Runs one game, evaluating the stopping rule before every move
    /// (stopping at time 0 is possible) and enforcing τ ≤ τ₀.
    #[allow(clippy::too_many_arguments)]
    pub fn run(
        &self,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        rng: &mut ChaCha8Rng,
        cap: usize,
    ) -> Result<GameOutcome, GameError> {
        self.run_traced(x0, sigma_i, sigma_ii, stop, rng, cap, None)
    }

    /// Like [`Game::run`], recording the visited nodes.
    #[allow(clippy::too_many_arguments)]
    pub fn run_recorded(
        &self,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        rng: &mut ChaCha8Rng,
        cap: usize,
        path: &mut Vec<usize>,
    ) -> Result<GameOutcome, GameError> {
        self.run_traced(x0, sigma_i, sigma_ii, stop, rng, cap, Some(path))
    }

    #[allow(clippy::too_many_arguments)]
    fn run_traced(
        &self,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        rng: &mut ChaCha8Rng,
        cap: usize,
        trace: Option<&mut Vec<usize>>,
    ) -> Result<GameOutcome, GameError> {
        assert!(cap >= 1);
        let grid = self.instance.grid();
        let mut history: Vec<usize> = Vec::with_capacity(32);
        history.push(x0);
        let mut current = x0;
        let mut moves = 0usize;
        let capped = loop {
            if !grid.is_interior(current) || stop.should_stop(&history, current) {
                break false;
            }
            if moves == cap {
                break true;
            }
            let draws = (uniform_unit(rng), uniform_unit(rng));
            current = self.step(&history, current, sigma_i, sigma_ii, draws)?;
            history.push(current);
            moves += 1;
        };
        if let Some(t) = trace {
            *t = history;
        }
        Ok(GameOutcome {
            payoff: self.payoff.value(current),
            length: moves,
            capped,
            terminal: current,
        })
    }

    /// One path of the estimator, on its own `(seed, path_index)` stream.
    #[allow(clippy::too_many_arguments)]
    pub fn play_path(
        &self,
        seed: u64,
        path_index: u64,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        cap: usize,
    ) -> Result<GameOutcome, GameError> {
        let mut rng = path_rng(seed, path_index);
        self.run(x0, sigma_i, sigma_ii, stop, &mut rng, cap)
    }

    /// Sample mean and standard error of the stopped payoff over
    /// `n_paths` independent games.
    #[allow(clippy::too_many_arguments)]
    pub fn estimate_value(
        &self,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        n_paths: usize,
        seed: u64,
        cap: usize,
    ) -> Result<MonteCarloEstimate, GameError> {
        assert!(n_paths >= 1);
        let mut outcomes = Vec::with_capacity(n_paths);
        for i in 0..n_paths {
            outcomes.push(self.play_path(seed, i as u64, x0, sigma_i, sigma_ii, stop, cap)?);
        }
        Ok(aggregate_outcomes(&outcomes))
    }

    /// Stop-before-cap fraction and path-length distribution.
    #[allow(clippy::too_many_arguments)]
    pub fn termination_stats(
        &self,
        x0: usize,
        sigma_i: &dyn Strategy,
        sigma_ii: &dyn Strategy,
        stop: &dyn StoppingRule,
        n_paths: usize,
        seed: u64,
        cap: usize,
    ) -> Result<TerminationStats, GameError> {
        assert!(n_paths >= 1);
        let mut histogram = alloc::vec![0u64; cap + 1];
        let mut terminated = 0usize;
        for i in 0..n_paths {
            let out = self.play_path(seed, i as u64, x0, sigma_i, sigma_ii, stop, cap)?;
            histogram[out.length] += 1;
            if !out.capped {
                terminated += 1;
            }
        }
        Ok(TerminationStats {
            fraction_terminated: terminated as f64 / n_paths as f64,
            histogram,
        })
    }
}

/// Fixed-order reduction of per-path outcomes; parallel drivers compute
/// the outcome vector in path order and reuse this to stay bit-identical
/// with the sequential estimator.
pub fn aggregate_outcomes(outcomes: &[GameOutcome]) -> MonteCarloEstimate {
    let n = outcomes.len();
    assert!(n >= 1);
    let mut sum = 0.0;
    let mut len_sum = 0.0;
    let mut n_capped = 0usize;
    for out in outcomes {
        sum += out.payoff;
        len_sum += out.length as f64;
        if out.capped {
            n_capped += 1;
        }
    }
    let mean = sum / n as f64;
    let stderr = if n > 1 {
        let ss: f64 = outcomes
            .iter()
            .map(|o| (o.payoff - mean) * (o.payoff - mean))
            .sum();
        math::sqrt(ss / (n - 1) as f64) / math::sqrt(n as f64)
    } else {
        0.0
    };
    MonteCarloEstimate {
        mean,
        stderr,
        n_paths: n,
        n_capped,
        mean_length: len_sum / n as f64,
    }
}
