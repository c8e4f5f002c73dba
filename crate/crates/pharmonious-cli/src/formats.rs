//! On-disk formats: JSON documents for grids, fields, reports and
//! estimates, plus the CSV tables. All writers are deterministic: no
//! timestamps unless explicitly requested, fixed field order, shortest
//! round-trip float formatting.

use std::io::Write;
use std::path::Path;

use pharmonious::game::{GameOutcome, MonteCarloEstimate};
use pharmonious::harness::ErrorTable;
use pharmonious::{Grid, NodeClass, ProblemInstance, ScalarField, SolveReport};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridDoc {
    pub h: f64,
    pub eps0: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub nodes: Vec<Vec<f64>>,
    /// "I" for interior, "B" for boundary, aligned with `nodes`.
    pub class: Vec<String>,
}

impl GridDoc {
    pub fn from_grid(grid: &Grid) -> Self {
        GridDoc {
            h: grid.h(),
            eps0: grid.eps0(),
            n: grid.dim(),
            nodes: (0..grid.len()).map(|i| grid.coords(i).to_vec()).collect(),
            class: (0..grid.len())
                .map(|i| match grid.class(i) {
                    NodeClass::Interior => "I".to_string(),
                    NodeClass::Boundary => "B".to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldDoc {
    pub grid: GridDoc,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDoc {
    pub iterations: usize,
    pub final_residual: f64,
    pub monotone_violation: f64,
    pub init_mode: String,
    pub converged: bool,
    /// Wall-clock seconds since the epoch; present only with `--stamp`
    /// and excluded from reproducibility comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stamp: Option<u64>,
}

impl ReportDoc {
    pub fn new(report: &SolveReport, converged: bool, stamp: bool) -> Self {
        ReportDoc {
            iterations: report.iterations,
            final_residual: report.final_residual,
            monotone_violation: report.monotone_violation,
            init_mode: match report.init_mode {
                pharmonious::InitMode::Lower => "lower".to_string(),
                pharmonious::InitMode::Upper => "upper".to_string(),
            },
            converged,
            stamp: stamp.then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateDoc {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub n_capped: usize,
    pub mean_length: f64,
    pub seed: u64,
}

impl EstimateDoc {
    pub fn new(estimate: &MonteCarloEstimate, seed: u64) -> Self {
        EstimateDoc {
            mean: estimate.mean,
            stderr: estimate.stderr,
            n_paths: estimate.n_paths,
            n_capped: estimate.n_capped,
            mean_length: estimate.mean_length,
            seed,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("cannot write {}: {e}", path.display()))
}

/// Per-node solution export: coordinates, class, u, Ψ, and the contact
/// flag `u − Ψ ≤ threshold`.
pub fn write_contact_csv(
    path: &Path,
    inst: &ProblemInstance,
    u: &ScalarField,
    threshold: f64,
) -> Result<(), CliError> {
    let grid = inst.grid();
    let mut w = create(path)?;
    let head: Vec<String> = (0..grid.dim()).map(|d| format!("x{d}")).collect();
    writeln!(w, "{},class,u,psi,contact", head.join(",")).map_err(io_err(path))?;
    for node in 0..grid.len() {
        let coords: Vec<String> = grid.coords(node).iter().map(|c| c.to_string()).collect();
        let class = match grid.class(node) {
            NodeClass::Interior => "I",
            NodeClass::Boundary => "B",
        };
        let psi = inst.obstacle().value(node);
        let contact = grid.is_interior(node) && u.value(node) - psi <= threshold;
        writeln!(
            w,
            "{},{},{},{},{}",
            coords.join(","),
            class,
            u.value(node),
            psi,
            u8::from(contact)
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Per-path statistics: id, stopping index, cap flag, payoff, terminal
/// node coordinates.
pub fn write_paths_csv(path: &Path, grid: &Grid, outcomes: &[GameOutcome]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let coords: Vec<String> = (0..grid.dim()).map(|d| format!("terminal_x{d}")).collect();
    writeln!(w, "path_id,length,capped,payoff,{}", coords.join(",")).map_err(io_err(path))?;
    for (id, out) in outcomes.iter().enumerate() {
        let terminal: Vec<String> = grid
            .coords(out.terminal)
            .iter()
            .map(|c| c.to_string())
            .collect();
        writeln!(
            w,
            "{id},{},{},{},{}",
            out.length,
            u8::from(out.capped),
            out.payoff,
            terminal.join(",")
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_error_table_csv(path: &Path, table: &ErrorTable) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "eps,h,sup_error,residual,iterations,contact_nodes,osc_r").map_err(io_err(path))?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.eps,
            row.h,
            row.sup_error,
            row.residual,
            row.iterations,
            row.contact_nodes,
            row.osc_r
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Mean-value expansion table: one row per ladder radius.
pub fn write_meanvalue_csv(path: &Path, rows: &[(f64, f64, f64, f64)]) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "eps,defect,defect_over_eps2,reference").map_err(io_err(path))?;
    for (eps, defect, scaled, reference) in rows {
        writeln!(w, "{eps},{defect},{scaled},{reference}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
