//! External-process solver bridge.
//!
//! The toolkit stays solver-agnostic by talking to any MIP solver through
//! files: the selected objective is exported as free MPS into a private
//! temp directory, the configured command runs with `{mps}`, `{sol}` and
//! `{timelimit}` placeholders substituted, and the solution file is parsed
//! back in the configured dialect.

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use crate::model::ModelIR;
use crate::mps;
use crate::solver::solfile::{parse_solution_file, SolutionDialect};
use crate::solver::{SolveConfig, SolveResult, SolveStatus, SolverBackend, SolverError};

/// Environment variable holding the command template.
pub const SOLVER_CMD_ENV: &str = "BINLOC_SOLVER_CMD";
/// Environment variable selecting the solution-file dialect.
pub const SOLVER_DIALECT_ENV: &str = "BINLOC_SOLVER_DIALECT";

/// Bridge over an external solve command.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub command_template: String,
    pub dialect: SolutionDialect,
}

impl ExternalSolver {
    pub fn new(command_template: impl Into<String>, dialect: SolutionDialect) -> Self {
        Self {
            command_template: command_template.into(),
            dialect,
        }
    }

    /// Resolves the command template from the config or the environment.
    pub fn from_config(config: &SolveConfig) -> Result<Self, SolverError> {
        let template = config
            .external_command
            .clone()
            .or_else(|| std::env::var(SOLVER_CMD_ENV).ok())
            .ok_or(SolverError::MissingCommand)?;
        let dialect = std::env::var(SOLVER_DIALECT_ENV)
            .ok()
            .and_then(|name| SolutionDialect::parse_name(&name))
            .unwrap_or(config.solution_dialect);
        Ok(Self::new(template, dialect))
    }
}

impl SolverBackend for ExternalSolver {
    fn solve(
        &self,
        model: &ModelIR,
        objective_index: usize,
        config: &SolveConfig,
    ) -> Result<SolveResult, SolverError> {
        let started = Instant::now();
        let objective = model
            .objectives
            .get(objective_index)
            .ok_or(SolverError::BadObjectiveIndex(objective_index))?;

        let workdir = std::env::temp_dir().join(format!(
            "binloc-solve-{}-{}",
            std::process::id(),
            nonce()
        ));
        std::fs::create_dir_all(&workdir).map_err(SolverError::Workspace)?;
        let mps_path = workdir.join("model.mps");
        let sol_path = workdir.join("model.sol");

        let text = mps::export_mps(model, objective_index)?;
        std::fs::write(&mps_path, text).map_err(SolverError::Workspace)?;

        let command = self
            .command_template
            .replace("{mps}", &mps_path.display().to_string())
            .replace("{sol}", &sol_path.display().to_string())
            .replace("{timelimit}", &format!("{}", config.time_limit));

        log::info!("external solve: {command}");
        let output = Command::new("sh")
            .arg("-c")
            .arg(&command)
            .current_dir(&workdir)
            .output()
            .map_err(|source| SolverError::SpawnFailed {
                command: command.clone(),
                source,
            })?;

        if !output.status.success() && !sol_path.exists() {
            return Err(SolverError::ExternalFailed {
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
            });
        }
        if !sol_path.exists() {
            // Exit success but nothing written: treat as no solution found.
            let _ = std::fs::remove_dir_all(&workdir);
            return Ok(SolveResult {
                status: SolveStatus::TimeoutNoSolution,
                objective: None,
                values: HashMap::new(),
                gap: None,
                wall_time: started.elapsed().as_secs_f64(),
                nodes: 0,
            });
        }

        let parsed = parse_solution_file(&sol_path, self.dialect)?;
        for warning in &parsed.warnings {
            log::warn!("solution file: {warning}");
        }
        let _ = std::fs::remove_dir_all(&workdir);

        let declared_infeasible = parsed
            .declared_status
            .as_deref()
            .map(|s| s.contains("infeasible"))
            .unwrap_or(false);
        if declared_infeasible {
            return Ok(SolveResult {
                status: SolveStatus::Infeasible,
                objective: None,
                values: HashMap::new(),
                gap: None,
                wall_time: started.elapsed().as_secs_f64(),
                nodes: 0,
            });
        }

        // Missing variables default to zero, with a warning per name kept in
        // the log; the objective is recomputed from the model's own terms so
        // it never depends on dialect-specific headers.
        let mut values = HashMap::with_capacity(model.variables.len());
        let mut missing = 0usize;
        for var in &model.variables {
            match parsed.values.get(&var.name) {
                Some(&v) => {
                    values.insert(var.name.clone(), v);
                }
                None => {
                    missing += 1;
                    values.insert(var.name.clone(), 0.0);
                }
            }
        }
        if missing > 0 {
            log::warn!("{missing} variables missing from solution file; defaulted to 0");
        }
        let objective_value: f64 = objective
            .terms
            .iter()
            .map(|&(j, c)| c * values[&model.variables[j].name])
            .sum();

        let status = match parsed.declared_status.as_deref() {
            Some(s) if s.contains("optimal") => SolveStatus::Optimal,
            // Without a recognizable proof of optimality the bridge only
            // claims feasibility.
            _ => SolveStatus::Feasible,
        };
        Ok(SolveResult {
            status,
            objective: Some(objective_value),
            values,
            gap: None,
            wall_time: started.elapsed().as_secs_f64(),
            nodes: 0,
        })
    }
}

fn nonce() -> u128 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        ConstraintSense, LinearConstraint, ModelIR, Objective, ObjectiveSense, VariableDef,
    };
    use std::io::Write;

    fn tiny_model() -> ModelIR {
        let mut m = ModelIR::new("tiny");
        let x = m.add_variable(VariableDef::integer("x", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "c".into(),
            terms: vec![(x, 1.0)],
            sense: ConstraintSense::Ge,
            rhs: 3.0,
        });
        m.add_objective(Objective {
            name: "obj".into(),
            sense: ObjectiveSense::Min,
            terms: vec![(x, 1.0)],
        });
        m
    }

    #[test]
    fn missing_binary_is_reported() {
        let solver = ExternalSolver::new(
            "/nonexistent/solver-binary {mps} {sol}",
            SolutionDialect::GurobiSol,
        );
        // `sh -c` exits non-zero without creating the solution file.
        let err = solver
            .solve(&tiny_model(), 0, &SolveConfig::internal())
            .unwrap_err();
        assert!(matches!(err, SolverError::ExternalFailed { .. }));
    }

    #[test]
    fn fake_solver_round_trip() {
        // A stand-in solver script that returns x = 3.
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("fake-solver.sh");
        {
            let mut f = std::fs::File::create(&script).unwrap();
            writeln!(f, "#!/bin/sh").unwrap();
            writeln!(f, "echo \"# Objective value = 3\" > \"$2\"").unwrap();
            writeln!(f, "echo \"x 3\" >> \"$2\"").unwrap();
        }
        let solver = ExternalSolver::new(
            format!("sh {} {{mps}} {{sol}}", script.display()),
            SolutionDialect::GurobiSol,
        );
        let result = solver
            .solve(&tiny_model(), 0, &SolveConfig::internal())
            .unwrap();
        assert!(result.status.has_solution());
        assert_eq!(result.values["x"], 3.0);
        assert_eq!(result.objective, Some(3.0));
    }
}
