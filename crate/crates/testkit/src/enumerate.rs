//! Exhaustive probability-tree expansion of the game expectation,
//! mirroring the engine's semantics exactly: the stopping rule is
//! evaluated before each move, τ ≤ τ₀ is enforced, and paths that reach
//! the cap fall back to the payoff where they stand. Branch weights are
//! α/2, α/2 for the players and β/|B| per ball node. Feasible only for
//! tiny grids and caps.

use pharmonious::game::{Game, StoppingRule, Strategy};

pub fn exact_game_value(
    game: &Game<'_>,
    x0: usize,
    sigma_i: &dyn Strategy,
    sigma_ii: &dyn Strategy,
    stop: &dyn StoppingRule,
    cap: usize,
) -> f64 {
    let mut history = vec![x0];
    expectation(game, &mut history, sigma_i, sigma_ii, stop, cap)
}

fn expectation(
    game: &Game<'_>,
    history: &mut Vec<usize>,
    sigma_i: &dyn Strategy,
    sigma_ii: &dyn Strategy,
    stop: &dyn StoppingRule,
    cap: usize,
) -> f64 {
    let current = *history.last().unwrap();
    let grid = game.instance().grid();
    if !grid.is_interior(current) || stop.should_stop(history, current) {
        return game.payoff().value(current);
    }
    if history.len() - 1 == cap {
        return game.payoff().value(current);
    }
    let alpha = game.instance().alpha();
    let beta = game.instance().beta();
    let members: Vec<usize> = game
        .instance()
        .neighborhoods()
        .members(current)
        .iter()
        .map(|&m| m as usize)
        .collect();
    let mut total = 0.0;
    if alpha > 0.0 {
        for mv in [
            sigma_i.choose(history, current),
            sigma_ii.choose(history, current),
        ] {
            history.push(mv);
            total += 0.5 * alpha * expectation(game, history, sigma_i, sigma_ii, stop, cap);
            history.pop();
        }
    }
    let w = beta / members.len() as f64;
    for &y in &members {
        history.push(y);
        total += w * expectation(game, history, sigma_i, sigma_ii, stop, cap);
        history.pop();
    }
    total
}
