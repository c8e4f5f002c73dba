//! Run configuration: one JSON document per run, flags only for
//! overrides. The resolved form (defaults filled in) is written next to
//! the outputs and re-parses to an equivalent run.

use std::path::{Path, PathBuf};

use pharmonious::geometry::DomainSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        a: f64,
        b: f64,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Disc {
        center: Vec<f64>,
        radius: f64,
    },
    Annulus {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
}

impl DomainConfig {
    pub fn to_domain(&self) -> DomainSpec {
        match self {
            DomainConfig::Interval { a, b } => DomainSpec::Interval { a: *a, b: *b },
            DomainConfig::Box { lo, hi } => DomainSpec::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            DomainConfig::Disc { center, radius } => DomainSpec::Disc {
                center: center.clone(),
                radius: *radius,
            },
            DomainConfig::Annulus {
                center,
                r_in,
                r_out,
            } => DomainSpec::Annulus {
                center: center.clone(),
                r_in: *r_in,
                r_out: *r_out,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainConfig::Interval { .. } => 1,
            DomainConfig::Box { lo, .. } => lo.len(),
            DomainConfig::Disc { center, .. } | DomainConfig::Annulus { center, .. } => {
                center.len()
            }
        }
    }
}

/// Closed-form scalar data usable as boundary values F or obstacles Ψ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        value: f64,
    },
    Affine {
        gradient: Vec<f64>,
        offset: f64,
    },
    /// `height − curvature·|x − center|²`.
    QuadBump {
        center: Vec<f64>,
        height: f64,
        curvature: f64,
    },
    /// The radial p-harmonic family `|x|^{(p−N)/(p−1)}` (`log|x|` at p = N).
    #[serde(rename = "radial_pharmonic")]
    RadialPHarmonic {
        p: f64,
    },
}

/// Boxed scalar data evaluated at node coordinates.
pub type FieldFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

impl FieldSpec {
    pub fn validate(&self, dim: usize) -> Result<(), CliError> {
        let ok = match self {
            FieldSpec::Constant { .. } => true,
            FieldSpec::Affine { gradient, .. } => gradient.len() == dim,
            FieldSpec::QuadBump { center, .. } => center.len() == dim,
            FieldSpec::RadialPHarmonic { p } => {
                if *p < 2.0 {
                    return Err(CliError::config("radial_pharmonic requires p >= 2"));
                }
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::config("field parameter dimension mismatch"))
        }
    }

    pub fn to_fn(&self, dim: usize) -> FieldFn {
        match self.clone() {
            FieldSpec::Constant { value } => Box::new(move |_x| value),
            FieldSpec::Affine { gradient, offset } => Box::new(move |x| {
                offset + gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>()
            }),
            FieldSpec::QuadBump {
                center,
                height,
                curvature,
            } => Box::new(move |x| {
                let d2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
                height - curvature * d2
            }),
            FieldSpec::RadialPHarmonic { p } => {
                let family = pharmonious::harness::reference_radial_pharmonic(p, dim);
                Box::new(move |x| family.eval(x))
            }
        }
    }
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    1_000_000
}
fn default_h_ratio() -> f64 {
    1.0 / 6.0
}
fn default_n_paths() -> usize {
    100_000
}
fn default_cap_factor() -> f64 {
    50.0
}
fn default_contact_tol_factor() -> f64 {
    10.0
}
fn default_osc_radius() -> f64 {
    0.2
}
fn default_fine_m() -> usize {
    10_000
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub init: InitConfig,
    /// In-place Gauss–Seidel accelerator (result still certified by the
    /// Jacobi residual); default is the plain Jacobi reference iteration.
    #[serde(default)]
    pub accelerated: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: default_tol(),
            max_iter: default_max_iter(),
            init: InitConfig::Lower,
            accelerated: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    #[default]
    Lower,
    Upper,
}

impl InitConfig {
    pub fn to_mode(self) -> pharmonious::InitMode {
        match self {
            InitConfig::Lower => pharmonious::InitMode::Lower,
            InitConfig::Upper => pharmonious::InitMode::Upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyName {
    GreedySup,
    GreedyInf,
    PullToward,
    NoiseOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopName {
    Exit,
    Contact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct McConfig {
    /// Start point; snapped to the nearest grid node.
    pub x0: Vec<f64>,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default)]
    pub seed: u64,
    /// Path cap is `ceil(cap_factor/ε²)`.
    #[serde(default = "default_cap_factor")]
    pub cap_factor: f64,
    pub sigma_i: StrategyName,
    pub sigma_ii: StrategyName,
    pub stop: StopName,
    /// Target of `pull_toward`; must lie outside the domain closure.
    #[serde(default)]
    pub pull_target: Option<Vec<f64>>,
    /// Contact threshold = factor · solver tol.
    #[serde(default = "default_contact_tol_factor")]
    pub contact_tol_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    /// Compare against the radial family with the run's exponent p.
    RadialPharmonic,
    /// Dual-oracle 1D obstacle reference (PSOR vs concave majorant).
    #[serde(rename = "obstacle_1d")]
    Obstacle1d {
        #[serde(default = "default_fine_m")]
        fine_m: usize,
    },
    Constant {
        value: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct ConvergeConfig {
    /// Strictly decreasing ball radii.
    pub eps_ladder: Vec<f64>,
    pub reference: ReferenceConfig,
    #[serde(default = "default_osc_radius")]
    pub osc_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct MeanValueConfig {
    /// Row-major N×N Hessian of the quadratic test function.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
    pub x: Vec<f64>,
    pub p: f64,
    pub eps_list: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Also export per-path statistics from `simulate`.
    #[serde(default)]
    pub write_paths: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            write_paths: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    /// Exponent p ≥ 2; mutually exclusive with (alpha, beta).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default = "default_h_ratio")]
    pub h_ratio: f64,
    /// Fattening width; default ε + h·√N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    pub boundary: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<FieldSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meanvalue: Option<MeanValueConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    /// Fills derived defaults so the emitted config is self-contained:
    /// explicit weights, lattice spacing, and fattening width.
    pub fn resolve(&mut self) -> Result<(), CliError> {
        let dim = self.domain.dim();
        self.boundary.validate(dim)?;
        if let Some(psi) = &self.obstacle {
            psi.validate(dim)?;
        }

        match (self.p, self.alpha, self.beta) {
            (Some(p), None, None) => {
                let (alpha, beta) =
                    pharmonious::alpha_beta(p, dim).map_err(|e| CliError::config(e.to_string()))?;
                self.alpha = Some(alpha);
                self.beta = Some(beta);
            }
            // A resolved config carries all three; accept it when they
            // are the derived values, so resolving is idempotent.
            (Some(p), Some(alpha), Some(beta)) => {
                let (da, db) =
                    pharmonious::alpha_beta(p, dim).map_err(|e| CliError::config(e.to_string()))?;
                if (alpha - da).abs() > 1e-12 || (beta - db).abs() > 1e-12 {
                    return Err(CliError::config(
                        "(alpha, beta) disagree with the values derived from p; give one or the other",
                    ));
                }
            }
            (None, Some(alpha), Some(beta)) => {
                if (alpha + beta - 1.0).abs() > 1e-12 {
                    return Err(CliError::config(format!(
                        "weights must satisfy alpha + beta = 1 (got alpha = {alpha}, beta = {beta})"
                    )));
                }
            }
            _ => {
                return Err(CliError::config(
                    "either p or the (alpha, beta) pair is required",
                ));
            }
        }

        if self.converge.is_none() {
            let eps = self
                .eps
                .ok_or_else(|| CliError::config("eps is required outside converge runs"))?;
            if eps <= 0.0 {
                return Err(CliError::config("eps must be positive"));
            }
            let h = match self.h {
                Some(h) if h > 0.0 => h,
                Some(_) => return Err(CliError::config("h must be positive")),
                None => eps * self.h_ratio,
            };
            self.h = Some(h);
            if self.eps0.is_none() {
                self.eps0 = Some(eps + h * (dim as f64).sqrt());
            }
        }
        if let Some(converge) = &self.converge {
            if converge.eps_ladder.is_empty()
                || !converge
                    .eps_ladder
                    .windows(2)
                    .all(|w| w[0] > w[1] && w[1] > 0.0)
            {
                return Err(CliError::config(
                    "converge.eps_ladder must be strictly decreasing and positive",
                ));
            }
            if let ReferenceConfig::Obstacle1d { .. } = converge.reference {
                if dim != 1 {
                    return Err(CliError::config(
                        "the obstacle_1d reference needs a one-dimensional domain",
                    ));
                }
            }
        }
        if !(self.h_ratio > 0.0 && self.h_ratio <= 1.0 / 6.0 + 1e-12) {
            return Err(CliError::config("h_ratio must lie in (0, 1/6]"));
        }
        if let Some(mc) = &self.mc {
            if mc.x0.len() != dim {
                return Err(CliError::config("mc.x0 dimension mismatch"));
            }
            if mc.n_paths == 0 {
                return Err(CliError::config("mc.n_paths must be at least 1"));
            }
            let needs_pull =
                mc.sigma_i == StrategyName::PullToward || mc.sigma_ii == StrategyName::PullToward;
            match &mc.pull_target {
                Some(z0) if z0.len() != dim => {
                    return Err(CliError::config("mc.pull_target dimension mismatch"));
                }
                None if needs_pull => {
                    return Err(CliError::config(
                        "pull_toward strategies need mc.pull_target",
                    ));
                }
                _ => {}
            }
        }
        if let Some(mv) = &self.meanvalue {
            let n = mv.b.len();
            if mv.a.len() != n * n || mv.x.len() != n {
                return Err(CliError::config("meanvalue matrix/vector sizes disagree"));
            }
            if mv.p < 2.0 {
                return Err(CliError::config("meanvalue.p must be at least 2"));
            }
            if mv.eps_list.len() < 3 || !mv.eps_list.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0) {
                return Err(CliError::config(
                    "meanvalue.eps_list needs at least 3 strictly decreasing entries",
                ));
            }
        }
        Ok(())
    }
}
