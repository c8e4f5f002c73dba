//! Subcommand implementations. Every command writes a resolved copy of
//! its configuration next to the outputs, so a run directory is a
//! self-contained, replayable artifact.

use std::path::Path;

use pharmonious::dpp::NoConvergence;
use pharmonious::game::{
    self, contact_rule, exit_time_rule, greedy_inf, greedy_sup, pull_toward, Game, GameError,
    GameOutcome, StandStill, StoppingRule, Strategy,
};
use pharmonious::geometry::build_grid;
use pharmonious::harness::{
    reference_1d_obstacle, reference_radial_pharmonic, run_convergence, ExperimentConfig,
    HarnessError,
};
use pharmonious::{calculus, ProblemInstance, ScalarField, SolveReport};
use rayon::prelude::*;

use crate::config::{McConfig, ReferenceConfig, RunConfig, StopName, StrategyName};
use crate::formats::{
    write_contact_csv, write_error_table_csv, write_json, write_meanvalue_csv, write_paths_csv,
    EstimateDoc, FieldDoc, GridDoc, ReportDoc,
};
use crate::CliError;

pub struct CommandContext {
    pub config: RunConfig,
    pub stamp: bool,
    pub workers: Option<usize>,
}

impl CommandContext {
    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = self.config.output.dir.as_path();
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }

    fn write_resolved(&self, dir: &Path) -> Result<(), CliError> {
        write_json(&dir.join("resolved_config.json"), &self.config)
    }
}

fn build_instance(config: &RunConfig) -> Result<ProblemInstance, CliError> {
    let domain = config.domain.to_domain();
    let dim = domain.dim();
    let eps = config.eps.expect("resolved config");
    let h = config.h.expect("resolved config");
    let eps0 = config.eps0.expect("resolved config");
    let grid = build_grid(&domain, h, eps0).map_err(|e| CliError::config(e.to_string()))?;
    let f_fn = config.boundary.to_fn(dim);
    let f = ScalarField::from_fn(&grid, |x| f_fn(x));
    let alpha = config.alpha.expect("resolved config");
    let beta = config.beta.expect("resolved config");
    let inst = match &config.obstacle {
        Some(spec) => {
            let psi_fn = spec.to_fn(dim);
            let psi = ScalarField::from_fn(&grid, |x| psi_fn(x));
            ProblemInstance::with_weights(grid, eps, alpha, beta, f, psi)
        }
        None => {
            let floor = grid
                .boundary_nodes()
                .map(|i| f.value(i))
                .fold(f64::INFINITY, f64::min)
                - 1.0;
            let psi = ScalarField::constant(&grid, floor);
            ProblemInstance::with_weights(grid, eps, alpha, beta, f, psi)
        }
    };
    inst.map_err(|e| CliError::config(e.to_string()))
}

fn solve(
    config: &RunConfig,
    inst: &ProblemInstance,
) -> Result<(ScalarField, SolveReport), NoConvergence> {
    let s = &config.solver;
    if s.accelerated {
        inst.solve_dpp_gs(s.tol, s.max_iter, s.init.to_mode())
    } else {
        inst.solve_dpp(s.tol, s.max_iter, s.init.to_mode())
    }
}

pub fn cmd_solve(ctx: &CommandContext) -> Result<(), CliError> {
    let dir = ctx.out_dir()?;
    let inst = build_instance(&ctx.config)?;
    let (u, report, converged) = match solve(&ctx.config, &inst) {
        Ok((u, report)) => (u, report, true),
        Err(err) => (err.field, err.report, false),
    };
    write_json(
        &dir.join("field.json"),
        &FieldDoc {
            grid: GridDoc::from_grid(inst.grid()),
            values: u.values().to_vec(),
        },
    )?;
    let threshold = ctx.config.solver.tol
        * ctx
            .config
            .mc
            .as_ref()
            .map_or(10.0, |mc| mc.contact_tol_factor);
    write_contact_csv(&dir.join("contact.csv"), &inst, &u, threshold)?;
    write_json(
        &dir.join("solve_report.json"),
        &ReportDoc::new(&report, converged, ctx.stamp),
    )?;
    ctx.write_resolved(dir)?;
    if converged {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "solver did not reach tol {} within {} iterations (residual {:.3e})",
            ctx.config.solver.tol, ctx.config.solver.max_iter, report.final_residual
        )))
    }
}

fn make_strategy<'a>(
    name: StrategyName,
    u: &ScalarField,
    inst: &'a ProblemInstance,
    mc: &McConfig,
) -> Result<Box<dyn Strategy + 'a>, CliError> {
    Ok(match name {
        StrategyName::GreedySup => Box::new(greedy_sup(u, inst)),
        StrategyName::GreedyInf => Box::new(greedy_inf(u, inst)),
        StrategyName::NoiseOnly => Box::new(StandStill),
        StrategyName::PullToward => {
            let z0 = mc.pull_target.as_ref().expect("validated");
            Box::new(pull_toward(z0, inst).map_err(|e| CliError::config(e.to_string()))?)
        }
    })
}

/// Parallel path driver: per-path streams are keyed by `(seed, index)`
/// and the outcome vector is reduced in path order, so the estimate is
/// bit-identical for every worker count.
#[allow(clippy::too_many_arguments)]
pub fn run_paths(
    game: &Game<'_>,
    x0: usize,
    sigma_i: &dyn Strategy,
    sigma_ii: &dyn Strategy,
    stop: &dyn StoppingRule,
    n_paths: usize,
    seed: u64,
    cap: usize,
    workers: Option<usize>,
) -> Result<Vec<GameOutcome>, GameError> {
    let play = || {
        (0..n_paths)
            .into_par_iter()
            .map(|i| game.play_path(seed, i as u64, x0, sigma_i, sigma_ii, stop, cap))
            .collect::<Result<Vec<_>, _>>()
    };
    match workers {
        None => play(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(play),
    }
}

pub fn cmd_simulate(ctx: &CommandContext) -> Result<(), CliError> {
    let dir = ctx.out_dir()?;
    let mc = ctx
        .config
        .mc
        .as_ref()
        .ok_or_else(|| CliError::config("simulate needs an mc section"))?;
    let inst = build_instance(&ctx.config)?;
    let (u, _report) = solve(&ctx.config, &inst).map_err(|e| CliError::Numeric(e.to_string()))?;

    let sigma_i = make_strategy(mc.sigma_i, &u, &inst, mc)?;
    let sigma_ii = make_strategy(mc.sigma_ii, &u, &inst, mc)?;
    let contact_tol = mc.contact_tol_factor * ctx.config.solver.tol;
    let exit = exit_time_rule(inst.grid());
    let contact;
    let stop: &dyn StoppingRule = match mc.stop {
        StopName::Exit => &exit,
        StopName::Contact => {
            contact = contact_rule(&u, inst.obstacle(), contact_tol, inst.grid());
            &contact
        }
    };

    let game = Game::new(&inst);
    let x0 = inst.grid().nearest_node(&mc.x0);
    let cap = game::default_cap(inst.eps(), mc.cap_factor);
    let outcomes = run_paths(
        &game,
        x0,
        sigma_i.as_ref(),
        sigma_ii.as_ref(),
        stop,
        mc.n_paths,
        mc.seed,
        cap,
        ctx.workers,
    )
    .map_err(|e| match e {
        GameError::DegeneratePull => CliError::config(e.to_string()),
        GameError::IllegalMove { .. } => CliError::Numeric(e.to_string()),
    })?;
    let estimate = game::aggregate_outcomes(&outcomes);
    if estimate.n_capped > 0 {
        // Reported, not an error: capped paths fall back to G at the
        // current node, which biases the mean.
        eprintln!(
            "warning: {} of {} paths hit the cap of {cap} moves",
            estimate.n_capped, estimate.n_paths
        );
    }
    write_json(
        &dir.join("estimate.json"),
        &EstimateDoc::new(&estimate, mc.seed),
    )?;
    if ctx.config.output.write_paths {
        write_paths_csv(&dir.join("paths.csv"), inst.grid(), &outcomes)?;
    }
    ctx.write_resolved(dir)
}

pub fn cmd_converge(ctx: &CommandContext) -> Result<(), CliError> {
    let dir = ctx.out_dir()?;
    let section = ctx
        .config
        .converge
        .as_ref()
        .ok_or_else(|| CliError::config("converge needs a converge section"))?;
    let p = ctx
        .config
        .p
        .ok_or_else(|| CliError::config("converge runs need the exponent p"))?;
    let domain = ctx.config.domain.to_domain();
    let dim = domain.dim();

    let mut experiment = ExperimentConfig::new(domain.clone(), p, section.eps_ladder.clone());
    experiment.h_ratio = ctx.config.h_ratio;
    experiment.solver_tol = ctx.config.solver.tol;
    experiment.solver_max_iter = ctx.config.solver.max_iter;
    experiment.accelerated = ctx.config.solver.accelerated;
    experiment.osc_radius = section.osc_radius;
    if let Some(mc) = &ctx.config.mc {
        experiment.mc_paths = mc.n_paths;
        experiment.mc_seed = mc.seed;
        experiment.cap_factor = mc.cap_factor;
        experiment.contact_tol_factor = mc.contact_tol_factor;
    }

    let boundary = ctx.config.boundary.to_fn(dim);
    let obstacle = ctx.config.obstacle.as_ref().map(|s| s.to_fn(dim));
    type RefFn = Box<dyn Fn(&[f64]) -> f64>;
    let reference: RefFn = match &section.reference {
        ReferenceConfig::RadialPharmonic => {
            let family = reference_radial_pharmonic(p, dim);
            Box::new(move |x: &[f64]| family.eval(x))
        }
        ReferenceConfig::Constant { value } => {
            let value = *value;
            Box::new(move |_x: &[f64]| value)
        }
        ReferenceConfig::Obstacle1d { fine_m } => {
            let (a, b) = match &domain {
                pharmonious::DomainSpec::Interval { a, b } => (*a, *b),
                _ => unreachable!("validated in resolve"),
            };
            let psi_fn = ctx
                .config
                .obstacle
                .as_ref()
                .ok_or_else(|| {
                    CliError::config("the obstacle_1d reference needs an obstacle section")
                })?
                .to_fn(1);
            let f_left = boundary(&[a]);
            let f_right = boundary(&[b]);
            let sampled = reference_1d_obstacle(a, b, f_left, f_right, &|x| psi_fn(&[x]), *fine_m)
                .map_err(|e| match e {
                    HarnessError::OracleDisagreement { .. } => CliError::Numeric(e.to_string()),
                    HarnessError::IncompatibleData => CliError::config(e.to_string()),
                })?;
            Box::new(move |x: &[f64]| sampled.eval(x[0]))
        }
    };

    let obstacle_ref = obstacle.as_deref().map(|f| f as &dyn Fn(&[f64]) -> f64);
    let table = run_convergence(&experiment, &|x| boundary(x), obstacle_ref, &|x| {
        reference(x)
    });
    write_error_table_csv(&dir.join("error_table.csv"), &table)?;
    ctx.write_resolved(dir)?;
    if table.rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(CliError::Numeric(
            "one or more ladder entries did not converge (rows kept in the table)".to_string(),
        ))
    }
}

pub fn cmd_meanvalue(ctx: &CommandContext) -> Result<(), CliError> {
    let dir = ctx.out_dir()?;
    let mv = ctx
        .config
        .meanvalue
        .as_ref()
        .ok_or_else(|| CliError::config("meanvalue needs a meanvalue section"))?;
    let n = mv.b.len();
    let phi = calculus::QuadraticTest::new(&mv.a, &mv.b, mv.c);
    let (alpha, beta) =
        pharmonious::alpha_beta(mv.p, n).map_err(|e| CliError::config(e.to_string()))?;
    let check = calculus::expansion_limit_check(&phi, &mv.x, mv.p, n, &mv.eps_list)
        .map_err(|e| CliError::config(e.to_string()))?;
    let rows: Vec<(f64, f64, f64, f64)> = mv
        .eps_list
        .iter()
        .map(|&eps| {
            let defect = calculus::mean_value_defect(&phi, &mv.x, eps, alpha, beta);
            (eps, defect, defect / (eps * eps), check.reference)
        })
        .collect();
    write_meanvalue_csv(&dir.join("meanvalue.csv"), &rows)?;
    ctx.write_resolved(dir)
}
