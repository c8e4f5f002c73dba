//! Convergence experiments toward the viscosity solution, reference
//! solutions to compare against, and boundary-oscillation diagnostics.
//!
//! The ε → 0 experiments tie the lattice spacing to the ball radius
//! (`h = ε·h_ratio`, default ratio 1/6) so one ladder varies a single
//! scale, and compare each solve in sup norm against a continuum
//! reference sampled at the grid nodes.

use alloc::vec::Vec;
use core::fmt;

use crate::dpp::{InitMode, ProblemInstance};
use crate::field::ScalarField;
use crate::geometry::{build_grid, DomainSpec, Grid};
use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub enum HarnessError {
    /// The two independent 1D reference constructions disagree.
    OracleDisagreement { max_diff: f64 },
    /// Obstacle above the boundary data at an endpoint.
    IncompatibleData,
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::OracleDisagreement { max_diff } => write!(
                f,
                "independent 1D obstacle references disagree by {max_diff:.3e} (tolerance 1e-6)"
            ),
            HarnessError::IncompatibleData => {
                write!(f, "obstacle exceeds the boundary data at an endpoint")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HarnessError {}

/// Radial p-harmonic family `u(x) = |x|^{(p−N)/(p−1)}` (and `log|x|` when
/// `p = N`), restricted by callers to annuli avoiding the origin. Used as
/// exact boundary data and reference for the no-obstacle experiments.
#[derive(Clone, Copy, Debug)]
pub struct RadialPHarmonic {
    p: f64,
    n: usize,
}

pub fn reference_radial_pharmonic(p: f64, n: usize) -> RadialPHarmonic {
    assert!(p >= 2.0, "p >= 2 required");
    assert!(n >= 1);
    RadialPHarmonic { p, n }
}

impl RadialPHarmonic {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = math::norm(x);
        debug_assert!(r > 0.0, "the radial family is singular at the origin");
        if (self.p - self.n as f64).abs() < 1e-12 {
            math::ln(r)
        } else {
            math::powf(r, (self.p - self.n as f64) / (self.p - 1.0))
        }
    }
}

/// The continuum 1D obstacle solution sampled on a fine uniform grid.
#[derive(Clone, Debug)]
pub struct Sampled1d {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl Sampled1d {
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.values.len() - 1;
        let t = ((x - self.a) / (self.b - self.a) * m as f64).clamp(0.0, m as f64);
        let i = (math::floor(t) as usize).min(m - 1);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Solution of the continuum 1D obstacle problem on `(a, b)` with
/// boundary values `(f_left, f_right)`, computed two independent ways
/// that must agree within 1e-6:
///
/// 1. projected successive over-relaxation for the discrete nodal
///    complementarity system `u_i = max(Ψ_i, (u_{i−1}+u_{i+1})/2)`; the
///    two-point nodal solve is the neighbor average for every `p ≥ 2`
///    because `s ↦ |s|^{p−2}s` is odd and strictly increasing;
/// 2. the least concave majorant of the sampled data (1D p-superharmonic
///    functions are exactly the concave ones), built as an upper hull.
pub fn reference_1d_obstacle(
    a: f64,
    b: f64,
    f_left: f64,
    f_right: f64,
    psi: &dyn Fn(f64) -> f64,
    fine_m: usize,
) -> Result<Sampled1d, HarnessError> {
    assert!(a < b);
    assert!(fine_m >= 10_000, "the reference grid must be fine");
    if psi(a) > f_left || psi(b) > f_right {
        return Err(HarnessError::IncompatibleData);
    }
    let m = fine_m;
    let xs: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    let mut data: Vec<f64> = xs.iter().map(|&x| psi(x)).collect();
    data[0] = f_left;
    data[m] = f_right;

    let hull = concave_majorant(&xs, &data);
    let psor = projected_sor(&xs, &data, f_left, f_right);

    let max_diff = hull
        .iter()
        .zip(&psor)
        .map(|(x, y)| math::abs(x - y))
        .fold(0.0, f64::max);
    if max_diff > 1e-6 {
        return Err(HarnessError::OracleDisagreement { max_diff });
    }
    Ok(Sampled1d { a, b, values: hull })
}

/// Least concave majorant of `(xs, data)` evaluated at every sample:
/// upper convex hull plus piecewise-linear interpolation.
fn concave_majorant(xs: &[f64], data: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross =
                (xs[a] - xs[o]) * (data[i] - data[o]) - (data[a] - data[o]) * (xs[i] - xs[o]);
            // Pop while the middle point lies on or below the chord.
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // The first and last sample always sit on the hull, so every index
    // falls into some hull segment.
    let mut out = alloc::vec![0.0; n];
    let mut seg = 0usize;
    for i in 0..n {
        while hull[seg + 1] < i {
            seg += 1;
        }
        let (l, r) = (hull[seg], hull[seg + 1]);
        out[i] = if i == l {
            data[l]
        } else if i == r {
            data[r]
        } else {
            let t = (xs[i] - xs[l]) / (xs[r] - xs[l]);
            data[l] * (1.0 - t) + data[r] * t
        };
    }
    out
}

/// Projected SOR (Cryer) for `u_i = max(Ψ_i, (u_{i−1}+u_{i+1})/2)` with
/// fixed boundary values; ω = 1 is plain projected Gauss–Seidel, the
/// near-optimal ω below makes the fine grid tractable.
fn projected_sor(xs: &[f64], data: &[f64], f_left: f64, f_right: f64) -> Vec<f64> {
    let n = xs.len();
    let m = n - 1;
    let omega = 2.0 / (1.0 + math::sin(core::f64::consts::PI / m as f64));
    let mut u: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / m as f64;
            (f_left * (1.0 - t) + f_right * t).max(data[i])
        })
        .collect();
    u[0] = f_left;
    u[m] = f_right;
    let scale = data.iter().fold(
        math::abs(f_left).max(math::abs(f_right)).max(1.0),
        |acc, v| acc.max(math::abs(*v)),
    );
    let tol = 1e-12 * scale;
    let max_sweeps = 60 * m;
    for _ in 0..max_sweeps {
        let mut change: f64 = 0.0;
        for i in 1..m {
            let gs = 0.5 * (u[i - 1] + u[i + 1]);
            let new = (u[i] + omega * (gs - u[i])).max(data[i]);
            change = change.max(math::abs(new - u[i]));
            u[i] = new;
        }
        if change <= tol {
            break;
        }
    }
    u
}

/// One ε → 0 experiment: instance family, ladder, and solver knobs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub p: f64,
    /// Strictly decreasing ball radii.
    pub eps_ladder: Vec<f64>,
    /// `h = ε·h_ratio`; must not exceed 1/6 (quadrature-bias control).
    pub h_ratio: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    /// Gauss–Seidel accelerator (Jacobi-residual certified) vs plain Jacobi.
    pub accelerated: bool,
    /// Contact flag threshold, as a multiple of the solver tolerance.
    pub contact_tol_factor: f64,
    /// Radius probed by the boundary-oscillation diagnostic.
    pub osc_radius: f64,
    /// Monte Carlo settings for probe cross-checks.
    pub mc_paths: usize,
    pub mc_seed: u64,
    pub cap_factor: f64,
}

impl ExperimentConfig {
    pub fn new(domain: DomainSpec, p: f64, eps_ladder: Vec<f64>) -> Self {
        ExperimentConfig {
            domain,
            p,
            eps_ladder,
            h_ratio: 1.0 / 6.0,
            solver_tol: 1e-10,
            solver_max_iter: 1_000_000,
            accelerated: true,
            contact_tol_factor: 10.0,
            osc_radius: 0.2,
            mc_paths: 100_000,
            mc_seed: 0,
            cap_factor: 50.0,
        }
    }

    pub fn validate(&self) {
        assert!(!self.eps_ladder.is_empty(), "eps ladder must be nonempty");
        assert!(
            self.eps_ladder
                .windows(2)
                .all(|w| w[0] > w[1] && w[1] > 0.0),
            "eps ladder must be strictly decreasing and positive"
        );
        assert!(
            self.h_ratio > 0.0 && self.h_ratio <= 1.0 / 6.0 + 1e-12,
            "h_ratio must lie in (0, 1/6]"
        );
        assert!(self.solver_tol > 0.0);
    }

    /// Fattening for a ladder entry: ε plus one lattice layer.
    pub fn eps0_for(&self, eps: f64) -> f64 {
        let h = eps * self.h_ratio;
        eps + h * math::sqrt(self.domain.dim() as f64)
    }
}

/// One ladder entry of an experiment.
#[derive(Clone, Copy, Debug)]
pub struct ErrorRow {
    pub eps: f64,
    pub h: f64,
    pub sup_error: f64,
    pub residual: f64,
    pub iterations: usize,
    pub contact_nodes: usize,
    pub osc_r: f64,
    /// False marks a NoConvergence row; the experiment continues.
    pub converged: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
}

/// Scalar data as a function of the node coordinates.
pub type PointFn<'a> = &'a dyn Fn(&[f64]) -> f64;

/// Builds, solves, and scores every ladder entry against a continuum
/// reference sampled at the grid nodes (sup norm over interior nodes).
///
/// `boundary` supplies F, `obstacle` supplies Ψ (`None` encodes the
/// never-binding obstacle), `reference` is the continuum target.
pub fn run_convergence(
    config: &ExperimentConfig,
    boundary: PointFn<'_>,
    obstacle: Option<PointFn<'_>>,
    reference: PointFn<'_>,
) -> ErrorTable {
    config.validate();
    let mut rows = Vec::with_capacity(config.eps_ladder.len());
    for &eps in &config.eps_ladder {
        let h = eps * config.h_ratio;
        let grid = build_grid(&config.domain, h, config.eps0_for(eps)).expect("valid ladder grid");
        let f = ScalarField::from_fn(&grid, boundary);
        let inst = match obstacle {
            Some(psi) => {
                let psi = ScalarField::from_fn(&grid, psi);
                ProblemInstance::with_p(grid, eps, config.p, f, psi)
            }
            None => ProblemInstance::without_obstacle(grid, eps, config.p, f),
        }
        .expect("valid ladder instance");
        let solved = if config.accelerated {
            inst.solve_dpp_gs(config.solver_tol, config.solver_max_iter, InitMode::Lower)
        } else {
            inst.solve_dpp(config.solver_tol, config.solver_max_iter, InitMode::Lower)
        };
        let (u, report, converged) = match solved {
            Ok((u, report)) => (u, report, true),
            Err(err) => (err.field, err.report, false),
        };
        let grid = inst.grid();
        let sup_error = grid
            .interior_nodes()
            .map(|i| math::abs(u.value(i) - reference(grid.coords(i))))
            .fold(0.0, f64::max);
        let contact_threshold = config.contact_tol_factor * config.solver_tol;
        let contact_nodes = grid
            .interior_nodes()
            .filter(|&i| u.value(i) - inst.obstacle().value(i) <= contact_threshold)
            .count();
        let osc = boundary_oscillation(&u, grid, config.osc_radius);
        rows.push(ErrorRow {
            eps,
            h,
            sup_error,
            residual: report.final_residual,
            iterations: report.iterations,
            contact_nodes,
            osc_r: osc,
            converged,
        });
    }
    ErrorTable { rows }
}

/// Largest jump of `field` between any node and any boundary node within
/// strict distance `r`: the lattice analog of the oscillation of u_ε
/// close to ∂Ω.
pub fn boundary_oscillation(field: &ScalarField, grid: &Grid, r: f64) -> f64 {
    assert!(r > 0.0);
    assert_eq!(field.len(), grid.len());
    let dim = grid.dim();
    let offsets = crate::geometry::lattice_ball_offsets(dim, grid.h(), r);
    let mut osc: f64 = 0.0;
    let mut target = alloc::vec![0i64; dim];
    for y0 in grid.boundary_nodes() {
        let fy = field.value(y0);
        let center = grid.ik(y0);
        for off in offsets.chunks_exact(dim) {
            for d in 0..dim {
                target[d] = center[d] + off[d];
            }
            if let Some(j) = grid.node_at(&target) {
                osc = osc.max(math::abs(field.value(j) - fy));
            }
        }
    }
    osc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::QuadraticTest;

    #[test]
    fn radial_family_special_cases() {
        let newton = reference_radial_pharmonic(2.0, 3);
        assert!((newton.eval(&[0.5, 0.0, 0.0]) - 2.0).abs() < 1e-14);
        let p4 = reference_radial_pharmonic(4.0, 2);
        assert!((p4.eval(&[1.0, 0.0]) - 1.0).abs() < 1e-14);
        assert!((p4.eval(&[8.0, 0.0]) - 4.0).abs() < 1e-12);
        let log = reference_radial_pharmonic(2.0, 2);
        assert!((log.eval(&[1.0, 0.0])).abs() < 1e-14);
    }

    /// Finite-difference p-Laplacian residual of the radial family,
    /// via the |∇u|^{p-2}(Δu + (p-2)Δ_∞u) decomposition.
    fn fd_p_laplacian(u: &dyn Fn(&[f64]) -> f64, x: &[f64], p: f64) -> f64 {
        let n = x.len();
        let step = 1e-4;
        let mut grad = alloc::vec![0.0; n];
        let mut hess = alloc::vec![0.0; n * n];
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += step;
            xm[i] -= step;
            grad[i] = (u(&xp) - u(&xm)) / (2.0 * step);
            hess[i * n + i] = (u(&xp) - 2.0 * u(x) + u(&xm)) / (step * step);
            for j in 0..i {
                let mut xpp = x.to_vec();
                let mut xpm = x.to_vec();
                let mut xmp = x.to_vec();
                let mut xmm = x.to_vec();
                xpp[i] += step;
                xpp[j] += step;
                xpm[i] += step;
                xpm[j] -= step;
                xmp[i] -= step;
                xmp[j] += step;
                xmm[i] -= step;
                xmm[j] -= step;
                let v = (u(&xpp) - u(&xpm) - u(&xmp) + u(&xmm)) / (4.0 * step * step);
                hess[i * n + j] = v;
                hess[j * n + i] = v;
            }
        }
        let gn = math::norm(&grad);
        let lap: f64 = (0..n).map(|i| hess[i * n + i]).sum();
        let mut inf = 0.0;
        for i in 0..n {
            for j in 0..n {
                inf += grad[i] * hess[i * n + j] * grad[j];
            }
        }
        inf /= gn * gn;
        math::powf(gn, p - 2.0) * (lap + (p - 2.0) * inf)
    }

    #[test]
    fn radial_family_is_p_harmonic_by_finite_differences() {
        for (p, n) in [(2.0, 3usize), (4.0, 2), (2.0, 2), (3.0, 2)] {
            let family = reference_radial_pharmonic(p, n);
            let mut x = alloc::vec![0.0; n];
            for r in [1.1, 1.5, 1.9] {
                x[0] = r * 0.6;
                x[1] = r * 0.8;
                let residual = fd_p_laplacian(&|y: &[f64]| family.eval(y), &x, p);
                assert!(
                    residual.abs() <= 1e-6,
                    "p = {p}, N = {n}, r = {r}: residual {residual}"
                );
            }
        }
    }

    #[test]
    fn obstacle_below_the_chord_yields_the_affine_solution() {
        let reference = reference_1d_obstacle(0.0, 1.0, 0.0, 1.0, &|_x| -1.0, 10_000).unwrap();
        for i in 0..10 {
            let x = i as f64 / 10.0;
            assert!((reference.eval(x) - x).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn parabola_obstacle_matches_the_tangency_construction() {
        // Psi(x) = 0.5 - 4(x-1/2)^2, F = 0 at both ends: tangency points
        // at t = 1/(2*sqrt(2)) and 1 - t, lines through the origin and
        // (1, 0) tangent to the parabola, parabola in between.
        let psi = |x: f64| 0.5 - 4.0 * (x - 0.5) * (x - 0.5);
        let reference = reference_1d_obstacle(0.0, 1.0, 0.0, 0.0, &psi, 20_000).unwrap();
        let t = 0.5 / math::sqrt(2.0);
        let slope = -8.0 * (t - 0.5);
        for i in 1..40 {
            let x = i as f64 / 40.0;
            let exact = if x < t {
                slope * x
            } else if x > 1.0 - t {
                slope * (1.0 - x)
            } else {
                psi(x)
            };
            assert!(
                (reference.eval(x) - exact).abs() < 1e-6,
                "x = {x}: {} vs {exact}",
                reference.eval(x)
            );
        }
    }

    #[test]
    fn incompatible_endpoint_is_rejected() {
        let err = reference_1d_obstacle(0.0, 1.0, 0.0, 0.0, &|_x| 0.25, 10_000).unwrap_err();
        assert_eq!(err, HarnessError::IncompatibleData);
    }

    #[test]
    fn oscillation_of_a_constant_field_vanishes_and_grows_with_r() {
        let grid = build_grid(&DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.02, 0.1).unwrap();
        let constant = ScalarField::constant(&grid, 3.0);
        assert_eq!(boundary_oscillation(&constant, &grid, 0.2), 0.0);
        let ramp = ScalarField::from_fn(&grid, |x| x[0] * x[0]);
        let small = boundary_oscillation(&ramp, &grid, 0.1);
        let large = boundary_oscillation(&ramp, &grid, 0.2);
        assert!(small <= large);
        assert!(small > 0.0);
    }

    #[test]
    fn constant_family_converges_to_machine_zero() {
        let config = ExperimentConfig::new(
            DomainSpec::Interval { a: 0.0, b: 1.0 },
            3.0,
            alloc::vec![0.3, 0.2],
        );
        let table = run_convergence(&config, &|_x| 2.0, None, &|_x| 2.0);
        for row in &table.rows {
            assert!(row.converged);
            assert!(row.sup_error <= config.solver_tol * 10.0);
            assert_eq!(row.contact_nodes, 0);
        }
    }

    #[test]
    fn quadratic_calculus_and_radial_family_share_conventions() {
        // Spot check: the fd residual machinery above agrees with the
        // closed-form quadratic p-Laplacian.
        let phi = QuadraticTest::new(&[2.0, 0.0, 0.0, 1.0], &[1.0, 0.0], 0.0);
        let x = [0.3, -0.2];
        let direct = crate::calculus::p_laplacian_quadratic(&phi, &x, 3.0).unwrap();
        let fd = fd_p_laplacian(&|y: &[f64]| phi.eval(y), &x, 3.0);
        assert!((direct - fd).abs() < 1e-5);
    }
}
