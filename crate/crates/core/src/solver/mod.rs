//! Uniform solve interface with two implementations: an exact internal
//! branch-and-bound for desk-scale verification, and an external-process
//! bridge that talks to any MIP solver through MPS and solution files.

pub mod branch_bound;
pub mod external;
pub mod simplex;
pub mod solfile;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelIR, WarmStart};
pub use external::{ExternalSolver, SOLVER_CMD_ENV, SOLVER_DIALECT_ENV};
pub use solfile::SolutionDialect;

/// Backend choice for a solve call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Internal,
    /// Bridge over an external command; the command template comes from
    /// the config or the `BINLOC_SOLVER_CMD` environment variable.
    External,
}

/// Solver configuration shared by all backends.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    /// Stop when the relative gap falls at or below this target.
    pub mip_gap_target: f64,
    /// Worker threads; the internal solver is single-threaded per call.
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<WarmStart>,
    pub backend: BackendKind,
    /// Node budget of the internal solver.
    pub max_nodes: usize,
    /// Guard against accidentally feeding large models to the internal
    /// solver; `None` disables the guard.
    pub max_int_vars: Option<usize>,
    /// External command template with `{mps}`, `{sol}`, `{timelimit}`
    /// placeholders; `None` reads `BINLOC_SOLVER_CMD`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_command: Option<String>,
    /// Solution-file dialect for the external bridge.
    pub solution_dialect: SolutionDialect,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            time_limit: 1200.0,
            mip_gap_target: 0.0,
            threads: 1,
            warm_start: None,
            backend: BackendKind::Internal,
            max_nodes: 2_000_000,
            max_int_vars: Some(80),
            external_command: None,
            solution_dialect: SolutionDialect::GurobiSol,
        }
    }
}

impl SolveConfig {
    pub fn internal() -> Self {
        Self::default()
    }

    pub fn with_warm_start(mut self, ws: Option<WarmStart>) -> Self {
        self.warm_start = ws;
        self
    }
}

/// Outcome classification of a solve call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unbounded,
    TimeoutNoSolution,
    Error,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeoutNoSolution => "timeout-no-solution",
            SolveStatus::Error => "error",
        }
    }
}

/// Result of one solve: status, objective in the objective's own sense,
/// variable values (present iff a solution exists), relative gap when
/// known, and wall time.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: HashMap<String, f64>,
    pub gap: Option<f64>,
    pub wall_time: f64,
    pub nodes: usize,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("objective index {0} does not exist")]
    BadObjectiveIndex(usize),
    #[error("model has {count} integral variables, above the internal guard {guard}; raise max_int_vars to override")]
    TooManyIntegers { count: usize, guard: usize },
    #[error("LP relaxation failed: {0}")]
    Lp(#[from] simplex::LpError),
    #[error("invalid warm start: {0}")]
    WarmStart(ModelError),
    #[error("no external solver command; set {SOLVER_CMD_ENV} or pass one explicitly")]
    MissingCommand,
    #[error("external solver failed to start `{command}`: {source}")]
    SpawnFailed {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("external solver exited with {status}: {stderr}")]
    ExternalFailed { status: String, stderr: String },
    #[error("solution file error: {0}")]
    SolutionFile(#[from] solfile::SolFileError),
    #[error("temp workspace error: {0}")]
    Workspace(std::io::Error),
    #[error("MPS export failed: {0}")]
    Export(#[from] crate::mps::MpsError),
}

/// A solve implementation behind the uniform interface.
pub trait SolverBackend {
    fn solve(
        &self,
        model: &ModelIR,
        objective_index: usize,
        config: &SolveConfig,
    ) -> Result<SolveResult, SolverError>;
}

/// The bundled exact branch-and-bound.
#[derive(Debug, Clone, Copy, Default)]
pub struct InternalSolver;

impl SolverBackend for InternalSolver {
    fn solve(
        &self,
        model: &ModelIR,
        objective_index: usize,
        config: &SolveConfig,
    ) -> Result<SolveResult, SolverError> {
        branch_bound::solve_internal(model, objective_index, config)
    }
}

/// Dispatches on the backend selected in `config`.
pub fn solve(
    model: &ModelIR,
    objective_index: usize,
    config: &SolveConfig,
) -> Result<SolveResult, SolverError> {
    match config.backend {
        BackendKind::Internal => InternalSolver.solve(model, objective_index, config),
        BackendKind::External => {
            ExternalSolver::from_config(config)?.solve(model, objective_index, config)
        }
    }
}
