//! The obstacle dynamic programming operator and its fixed point.
//!
//! At interior nodes the operator is
//!
//! ```text
//! (Tv)(x) = max{ Ψ(x), (α/2)·max_B v + (α/2)·min_B v + β·avg_B v }
//! ```
//!
//! over the strict ε-ball `B = B_ε(x) ∩ X`; boundary nodes are left
//! unchanged. With the iteration started at `F on Γ, inf_X Ψ on Ω` the
//! sequence `u_{n+1} = T u_n` is pointwise nondecreasing and converges to
//! the unique bounded fixed point; starting from above it is
//! nonincreasing toward the same limit, which the two init modes let
//! tests confirm.

use core::fmt;

use crate::field::ScalarField;
use crate::geometry::{GeometryError, Grid, NeighborhoodTable, NodeClass};

/// Mean-value mixing weights `α = (p−2)/(N+p)`, `β = (2+N)/(N+p)`.
pub fn alpha_beta(p: f64, n: usize) -> Result<(f64, f64), InstanceError> {
    assert!(n >= 1, "dimension must be positive");
    if p.is_nan() || p < 2.0 {
        return Err(InstanceError::InvalidExponent { p });
    }
    let denom = n as f64 + p;
    Ok(((p - 2.0) / denom, (2.0 + n as f64) / denom))
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceError {
    /// `p < 2` is outside the degenerate-elliptic range handled here.
    InvalidExponent {
        p: f64,
    },
    /// Weights must satisfy `α ∈ [0, 1)`, `β = 1 − α > 0`.
    InvalidWeights {
        alpha: f64,
        beta: f64,
    },
    /// The compatibility hypothesis `Ψ ≤ F in Γ̄` fails at a node.
    ObstacleAboveBoundaryData {
        node: usize,
        psi: f64,
        f: f64,
    },
    /// A field does not cover the grid's node set.
    FieldLengthMismatch {
        expected: usize,
        got: usize,
    },
    Geometry(GeometryError),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::InvalidExponent { p } => {
                write!(f, "exponent p = {p} is invalid: p >= 2 is required")
            }
            InstanceError::InvalidWeights { alpha, beta } => write!(
                f,
                "weights (alpha = {alpha}, beta = {beta}) must satisfy alpha in [0,1), beta = 1 - alpha > 0"
            ),
            InstanceError::ObstacleAboveBoundaryData { node, psi, f: fv } => write!(
                f,
                "data violate the hypothesis Ψ ≤ F in Γ̄: at boundary node {node}, Ψ = {psi} > F = {fv}"
            ),
            InstanceError::FieldLengthMismatch { expected, got } => {
                write!(f, "field has {got} values but the grid has {expected} nodes")
            }
            InstanceError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InstanceError {}

impl From<GeometryError> for InstanceError {
    fn from(e: GeometryError) -> Self {
        InstanceError::Geometry(e)
    }
}

/// Which constant extension the monotone iteration starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// `F` on Γ, `inf_X Ψ` on Ω; iterates are nondecreasing.
    Lower,
    /// `F` on Γ, `max{sup_Γ F, sup_X Ψ}` on Ω; iterates are nonincreasing.
    Upper,
}

fn non_negative(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Diagnostics of one solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    /// Operator applications (Jacobi) or in-place sweeps (Gauss–Seidel).
    pub iterations: usize,
    /// Sup-norm of `v − Tv` certified for the returned field.
    pub final_residual: f64,
    /// Largest pointwise move against the expected monotone direction.
    pub monotone_violation: f64,
    pub init_mode: InitMode,
}

/// Returned when the residual is still above tolerance after `max_iter`;
/// the last iterate and its report remain available for inspection.
#[derive(Clone, Debug)]
pub struct NoConvergence {
    pub field: ScalarField,
    pub report: SolveReport,
}

impl fmt::Display for NoConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no convergence after {} iterations (residual {:.3e})",
            self.report.iterations, self.report.final_residual
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NoConvergence {}

/// A validated obstacle problem on a grid: weights, ball radius, boundary
/// data `F` and obstacle `Ψ`, plus the cached ε-ball table shared by the
/// solver and the game engine.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    grid: Grid,
    eps: f64,
    p: Option<f64>,
    alpha: f64,
    beta: f64,
    f: ScalarField,
    psi: ScalarField,
    nbrs: NeighborhoodTable,
}

impl ProblemInstance {
    /// Instance with weights derived from the exponent `p ≥ 2`.
    pub fn with_p(
        grid: Grid,
        eps: f64,
        p: f64,
        f: ScalarField,
        psi: ScalarField,
    ) -> Result<Self, InstanceError> {
        let (alpha, _) = alpha_beta(p, grid.dim())?;
        let mut inst = Self::with_weights(grid, eps, alpha, 1.0 - alpha, f, psi)?;
        inst.p = Some(p);
        Ok(inst)
    }

    /// Instance with explicit weights; `β` is normalized to `1 − α` after
    /// checking `|α + β − 1| ≤ 1e-12`.
    pub fn with_weights(
        grid: Grid,
        eps: f64,
        alpha: f64,
        beta: f64,
        f: ScalarField,
        psi: ScalarField,
    ) -> Result<Self, InstanceError> {
        if !(0.0..1.0).contains(&alpha)
            || beta.is_nan()
            || beta <= 0.0
            || (alpha + beta - 1.0).abs() > 1e-12
        {
            return Err(InstanceError::InvalidWeights { alpha, beta });
        }
        for (field, name) in [(&f, "F"), (&psi, "Psi")] {
            let _ = name;
            if field.len() != grid.len() {
                return Err(InstanceError::FieldLengthMismatch {
                    expected: grid.len(),
                    got: field.len(),
                });
            }
        }
        for node in grid.boundary_nodes() {
            if psi.value(node) > f.value(node) {
                return Err(InstanceError::ObstacleAboveBoundaryData {
                    node,
                    psi: psi.value(node),
                    f: f.value(node),
                });
            }
        }
        let nbrs = NeighborhoodTable::build(&grid, eps)?;
        Ok(ProblemInstance {
            grid,
            eps,
            p: None,
            alpha,
            beta: 1.0 - alpha,
            f,
            psi,
            nbrs,
        })
    }

    /// No-obstacle instance: `Ψ ≡ min_Γ F − 1`, which never binds.
    pub fn without_obstacle(
        grid: Grid,
        eps: f64,
        p: f64,
        f: ScalarField,
    ) -> Result<Self, InstanceError> {
        let floor = grid
            .boundary_nodes()
            .map(|i| f.value(i))
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        let psi = ScalarField::constant(&grid, floor);
        Self::with_p(grid, eps, p, f, psi)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The exponent this instance was derived from, when applicable.
    pub fn p(&self) -> Option<f64> {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn boundary_data(&self) -> &ScalarField {
        &self.f
    }

    pub fn obstacle(&self) -> &ScalarField {
        &self.psi
    }

    pub fn neighborhoods(&self) -> &NeighborhoodTable {
        &self.nbrs
    }

    /// The operator value at one interior node, reading `v` as the
    /// previous iterate. Summation runs in ascending node order, so the
    /// result does not depend on how nodes are distributed over workers.
    #[inline]
    pub fn t_at(&self, v: &[f64], node: usize) -> f64 {
        let members = self.nbrs.members(node);
        debug_assert!(!members.is_empty(), "t_at requires an interior node");
        let game = if self.alpha == 0.0 {
            let mut sum = 0.0;
            for &j in members {
                sum += v[j as usize];
            }
            self.beta * sum / members.len() as f64
        } else {
            let mut mx = f64::NEG_INFINITY;
            let mut mn = f64::INFINITY;
            let mut sum = 0.0;
            for &j in members {
                let val = v[j as usize];
                mx = mx.max(val);
                mn = mn.min(val);
                sum += val;
            }
            0.5 * self.alpha * (mx + mn) + self.beta * sum / members.len() as f64
        };
        self.psi.value(node).max(game)
    }

    fn apply_t_into(&self, v: &[f64], out: &mut [f64]) {
        for node in 0..self.grid.len() {
            out[node] = match self.grid.class(node) {
                NodeClass::Interior => self.t_at(v, node),
                NodeClass::Boundary => v[node],
            };
        }
    }

    /// One application of the operator `T`.
    pub fn apply_t(&self, v: &ScalarField) -> ScalarField {
        assert_eq!(v.len(), self.grid.len());
        let mut out = alloc::vec![0.0; v.len()];
        self.apply_t_into(v.values(), &mut out);
        ScalarField::from_values(out)
    }

    /// Sup-norm of `v − Tv` over interior nodes.
    pub fn residual(&self, v: &ScalarField) -> f64 {
        assert_eq!(v.len(), self.grid.len());
        let vals = v.values();
        let mut r: f64 = 0.0;
        for node in self.grid.interior_nodes() {
            r = r.max((self.t_at(vals, node) - vals[node]).abs());
        }
        r
    }

    /// `F` on Γ, `inf_X Ψ` on Ω.
    pub fn initial_lower(&self) -> ScalarField {
        let floor = self.psi.min();
        self.initial_with(floor)
    }

    /// `F` on Γ, `max{sup_Γ F, sup_X Ψ}` on Ω.
    pub fn initial_upper(&self) -> ScalarField {
        let sup_f = self
            .grid
            .boundary_nodes()
            .map(|i| self.f.value(i))
            .fold(f64::NEG_INFINITY, f64::max);
        self.initial_with(sup_f.max(self.psi.max()))
    }

    fn initial_with(&self, interior_value: f64) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|i| match self.grid.class(i) {
                NodeClass::Interior => interior_value,
                NodeClass::Boundary => self.f.value(i),
            })
            .collect();
        ScalarField::from_values(values)
    }

    fn initial(&self, init: InitMode) -> ScalarField {
        match init {
            InitMode::Lower => self.initial_lower(),
            InitMode::Upper => self.initial_upper(),
        }
    }

    /// Fixed point of `T` by plain Jacobi iteration `u_{n+1} = T u_n`.
    ///
    /// The returned field has Jacobi residual at most `tol` (the operator
    /// is sup-norm nonexpansive, so the final step size bounds it).
    pub fn solve_dpp(
        &self,
        tol: f64,
        max_iter: usize,
        init: InitMode,
    ) -> Result<(ScalarField, SolveReport), NoConvergence> {
        assert!(tol > 0.0 && max_iter >= 1);
        let mut prev = self.initial(init).values().to_vec();
        let mut curr = alloc::vec![0.0; prev.len()];
        let mut monotone_violation: f64 = 0.0;
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        while iterations < max_iter {
            self.apply_t_into(&prev, &mut curr);
            iterations += 1;
            let mut step: f64 = 0.0;
            for node in self.grid.interior_nodes() {
                let delta = curr[node] - prev[node];
                step = step.max(delta.abs());
                let against = match init {
                    InitMode::Lower => -delta,
                    InitMode::Upper => delta,
                };
                monotone_violation = monotone_violation.max(against);
            }
            residual = step;
            if residual <= tol {
                let report = SolveReport {
                    iterations,
                    final_residual: residual,
                    monotone_violation: non_negative(monotone_violation),
                    init_mode: init,
                };
                return Ok((ScalarField::from_values(curr), report));
            }
            core::mem::swap(&mut prev, &mut curr);
        }
        Err(NoConvergence {
            field: ScalarField::from_values(prev),
            report: SolveReport {
                iterations,
                final_residual: residual,
                monotone_violation: non_negative(monotone_violation),
                init_mode: init,
            },
        })
    }

    /// Gauss–Seidel accelerator: in-place ascending sweeps, certified by
    /// the Jacobi residual of the returned field. Sweeps from `Lower`
    /// stay pointwise nondecreasing like the reference iteration; the
    /// fixed point is the same, only the route differs.
    pub fn solve_dpp_gs(
        &self,
        tol: f64,
        max_iter: usize,
        init: InitMode,
    ) -> Result<(ScalarField, SolveReport), NoConvergence> {
        assert!(tol > 0.0 && max_iter >= 1);
        let mut v = self.initial(init).values().to_vec();
        let mut scratch = alloc::vec![0.0; v.len()];
        let mut monotone_violation: f64 = 0.0;
        let mut sweeps = 0;
        let mut threshold = 0.5 * tol;
        let mut last_residual = f64::INFINITY;
        while sweeps < max_iter {
            let mut step: f64 = 0.0;
            for node in self.grid.interior_nodes() {
                let new = self.t_at(&v, node);
                let delta = new - v[node];
                step = step.max(delta.abs());
                let against = match init {
                    InitMode::Lower => -delta,
                    InitMode::Upper => delta,
                };
                monotone_violation = monotone_violation.max(against);
                v[node] = new;
            }
            sweeps += 1;
            if step <= threshold {
                self.apply_t_into(&v, &mut scratch);
                last_residual = v
                    .iter()
                    .zip(&scratch)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                if last_residual <= tol {
                    let report = SolveReport {
                        iterations: sweeps,
                        final_residual: last_residual,
                        monotone_violation: non_negative(monotone_violation),
                        init_mode: init,
                    };
                    return Ok((ScalarField::from_values(v), report));
                }
                // In-place steps can undershoot the true residual.
                threshold *= 0.25;
            }
        }
        Err(NoConvergence {
            field: ScalarField::from_values(v),
            report: SolveReport {
                iterations: sweeps,
                final_residual: last_residual,
                monotone_violation: non_negative(monotone_violation),
                init_mode: init,
            },
        })
    }
}
