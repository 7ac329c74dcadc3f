//! Bi-objective orchestration: payoff tables via lexicographic strategies,
//! the augmented epsilon-constraint grid, Pareto filtering, compromise
//! selection and robust-vs-deterministic comparison metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{decode, DecodeError, Solution, VariableIndex};
use crate::instance::{Instance, ScenarioConfig};
use crate::model::{
    ConstraintSense, LinearConstraint, ModelIR, Objective, ObjectiveSense, VariableDef, WarmStart,
};
use crate::robust::{transform, RobustError};
use crate::solver::{solve, SolveConfig, SolveStatus, SolverError};

/// Index of the cost objective in built models.
pub const COST_OBJECTIVE: usize = 0;
/// Index of the frequency objective in built models.
pub const FREQUENCY_OBJECTIVE: usize = 1;

/// Augmentation weight on the normalized slack in grid objectives.
pub const AUGMENTATION_COEFFICIENT: f64 = 1e-3;
/// Relaxation applied to the stage-1 bound by the `LR`/`LRWS` strategies.
pub const DEFAULT_RELAXATION: f64 = 0.05;

/// Second-stage enhancement strategy for the lexicographic payoff runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Straightforward lexicographic.
    L,
    /// Lexicographic with a relaxed stage-1 bound.
    Lr,
    /// Relaxed bound plus warm start.
    Lrws,
    /// Warm start with an exact stage-1 bound.
    Lws,
}

impl Strategy {
    pub fn relaxation(self) -> f64 {
        match self {
            Strategy::L | Strategy::Lws => 0.0,
            Strategy::Lr | Strategy::Lrws => DEFAULT_RELAXATION,
        }
    }

    pub fn warm_starts(self) -> bool {
        matches!(self, Strategy::Lrws | Strategy::Lws)
    }

    pub fn parse_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "L" => Some(Self::L),
            "LR" => Some(Self::Lr),
            "LRWS" => Some(Self::Lrws),
            "LWS" => Some(Self::Lws),
            _ => None,
        }
    }
}

/// Which objective the first lexicographic stage optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveOrder {
    CostFirst,
    FreqFirst,
}

/// One stage of a payoff run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayoffRecord {
    pub strategy: Strategy,
    pub order: ObjectiveOrder,
    pub stage: u8,
    pub status: SolveStatus,
    pub cost: Option<f64>,
    pub frequency: Option<f64>,
    pub gap: Option<f64>,
    pub wall_time: f64,
}

/// Lexicographic extremes of both objectives plus the per-stage records
/// that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayoffTable {
    pub best_cost: f64,
    pub freq_at_best_cost: f64,
    pub best_freq: f64,
    pub cost_at_best_freq: f64,
    pub records: Vec<PayoffRecord>,
}

/// One frontier point: the decoded design plus per-run solver metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub solution: Solution,
    pub cost: f64,
    pub frequency: f64,
    pub gap: Option<f64>,
    pub status: SolveStatus,
}

/// Mutually non-dominated solutions of one scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParetoSet {
    pub solutions: Vec<ParetoPoint>,
    pub scenario: ScenarioConfig,
    /// Grid points attempted / that produced a solution.
    pub runs_attempted: usize,
    pub runs_solved: usize,
    /// Mean relative gap over solved grid runs with a known gap.
    pub avg_gap: Option<f64>,
    pub warnings: Vec<String>,
}

impl ParetoSet {
    pub fn min_cost(&self) -> Option<&ParetoPoint> {
        self.solutions
            .iter()
            .min_by(|a, b| a.cost.total_cmp(&b.cost))
    }

    pub fn max_frequency(&self) -> Option<&ParetoPoint> {
        self.solutions
            .iter()
            .max_by(|a, b| a.frequency.total_cmp(&b.frequency))
    }

    /// Best values of each objective across the set (cost minimized,
    /// frequency maximized).
    pub fn ideal(&self) -> Option<(f64, f64)> {
        let cost = self.min_cost()?.cost;
        let freq = self.max_frequency()?.frequency;
        Some((cost, freq))
    }
}

#[derive(Debug, Error)]
pub enum MooError {
    #[error("solver error: {0}")]
    Solver(#[from] SolverError),
    #[error("decode error: {0}")]
    Decode(#[from] DecodeError),
    #[error("robust transform error: {0}")]
    Robust(#[from] RobustError),
    #[error("model error: {0}")]
    Model(#[from] crate::model::ModelError),
    #[error("stage-1 {order:?} run ended {status:?}; cannot anchor the payoff table")]
    StageOneFailed {
        order: ObjectiveOrder,
        status: SolveStatus,
    },
    #[error("epsilon grid needs at least 2 runs, got {0}")]
    TooFewRuns(usize),
    #[error("frontier is empty")]
    EmptyFrontier,
    #[error("ideal vector component `{0}` is zero; normalized distance undefined")]
    ZeroIdealComponent(&'static str),
    #[error("reference objective `{0}` is zero; relative delta undefined")]
    ZeroReference(&'static str),
    #[error("instance error: {0}")]
    Build(#[from] crate::builder::BuildError),
}

fn objective_pair(order: ObjectiveOrder) -> (usize, usize) {
    match order {
        ObjectiveOrder::CostFirst => (COST_OBJECTIVE, FREQUENCY_OBJECTIVE),
        ObjectiveOrder::FreqFirst => (FREQUENCY_OBJECTIVE, COST_OBJECTIVE),
    }
}

/// Runs one two-stage lexicographic payoff: stage 1 optimizes the leading
/// objective alone; stage 2 optimizes the other subject to a bound on the
/// stage-1 value (relaxed for `LR`/`LRWS`), warm-started from the stage-1
/// solution for `LWS`/`LRWS`.
pub fn payoff(
    model: &ModelIR,
    index: &VariableIndex,
    instance: &Instance,
    strategy: Strategy,
    order: ObjectiveOrder,
    config: &SolveConfig,
) -> Result<(Vec<PayoffRecord>, Option<Solution>), MooError> {
    let (first, second) = objective_pair(order);
    let mut records = Vec::with_capacity(2);

    let stage1 = solve(model, first, config)?;
    if !stage1.status.has_solution() {
        records.push(PayoffRecord {
            strategy,
            order,
            stage: 1,
            status: stage1.status,
            cost: None,
            frequency: None,
            gap: stage1.gap,
            wall_time: stage1.wall_time,
        });
        return Err(MooError::StageOneFailed {
            order,
            status: stage1.status,
        });
    }
    let stage1_solution = decode(&stage1.values, index, instance)?;
    records.push(PayoffRecord {
        strategy,
        order,
        stage: 1,
        status: stage1.status,
        cost: Some(stage1_solution.cost),
        frequency: Some(stage1_solution.frequency_objective),
        gap: stage1.gap,
        wall_time: stage1.wall_time,
    });

    let stage1_value = match first {
        COST_OBJECTIVE => stage1_solution.cost,
        _ => stage1_solution.frequency_objective,
    };
    let bounded = model.fix_objective_bound(first, stage1_value, strategy.relaxation())?;
    let mut stage2_config = config.clone();
    if strategy.warm_starts() {
        stage2_config.warm_start = Some(WarmStart {
            values: stage1
                .values
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        });
    }
    let stage2 = solve(&bounded, second, &stage2_config)?;
    let stage2_solution = if stage2.status.has_solution() {
        Some(decode(&stage2.values, index, instance)?)
    } else {
        None
    };
    records.push(PayoffRecord {
        strategy,
        order,
        stage: 2,
        status: stage2.status,
        cost: stage2_solution.as_ref().map(|s| s.cost),
        frequency: stage2_solution.as_ref().map(|s| s.frequency_objective),
        gap: stage2.gap,
        wall_time: stage2.wall_time,
    });

    Ok((records, stage2_solution.or(Some(stage1_solution))))
}

/// Builds the full payoff table by running both objective orders with the
/// same strategy.
pub fn payoff_table(
    model: &ModelIR,
    index: &VariableIndex,
    instance: &Instance,
    strategy: Strategy,
    config: &SolveConfig,
) -> Result<PayoffTable, MooError> {
    let (cost_records, cost_solution) = payoff(
        model,
        index,
        instance,
        strategy,
        ObjectiveOrder::CostFirst,
        config,
    )?;
    let (freq_records, freq_solution) = payoff(
        model,
        index,
        instance,
        strategy,
        ObjectiveOrder::FreqFirst,
        config,
    )?;

    let cost_solution = cost_solution.expect("stage-1 success implies a solution");
    let freq_solution = freq_solution.expect("stage-1 success implies a solution");
    let best_cost = cost_records[0].cost.expect("stage-1 cost");
    let best_freq = freq_records[0].frequency.expect("stage-1 frequency");

    let mut records = cost_records;
    records.extend(freq_records);
    Ok(PayoffTable {
        best_cost,
        freq_at_best_cost: cost_solution.frequency_objective,
        best_freq,
        cost_at_best_freq: freq_solution.cost,
        records,
    })
}

/// Augmented epsilon-constraint run over an evenly spaced frequency grid.
///
/// For each epsilon the model minimizes
/// `cost - delta_aug * (slack / range)` subject to
/// `frequency - slack = epsilon`, `slack >= 0`. Infeasible or timed-out
/// grid points are skipped and counted; the survivors are filtered to the
/// non-dominated set.
pub fn epsilon_constraint(
    model: &ModelIR,
    index: &VariableIndex,
    instance: &Instance,
    table: &PayoffTable,
    scenario: &ScenarioConfig,
    n_runs: usize,
    config: &SolveConfig,
) -> Result<ParetoSet, MooError> {
    if n_runs < 2 {
        return Err(MooError::TooFewRuns(n_runs));
    }
    let lo = table.freq_at_best_cost;
    let hi = table.best_freq;
    let range = hi - lo;
    let mut warnings = Vec::new();

    if range <= 0.0 {
        // Single-point frontier: solve the cost end once.
        warnings.push(format!(
            "degenerate payoff range [{lo}, {hi}]; returning a singleton frontier"
        ));
        let result = solve(model, COST_OBJECTIVE, config)?;
        let mut solutions = Vec::new();
        let solved = usize::from(result.status.has_solution());
        if result.status.has_solution() {
            let solution = decode(&result.values, index, instance)?;
            solutions.push(ParetoPoint {
                cost: solution.cost,
                frequency: solution.frequency_objective,
                gap: result.gap,
                status: result.status,
                solution,
            });
        }
        let avg_gap = solutions.first().and_then(|p| p.gap);
        return Ok(ParetoSet {
            solutions,
            scenario: scenario.clone(),
            runs_attempted: 1,
            runs_solved: solved,
            avg_gap,
            warnings,
        });
    }

    let mut points: Vec<ParetoPoint> = Vec::new();
    let mut runs_solved = 0usize;
    let mut gaps: Vec<f64> = Vec::new();

    // Walk the grid from the high-frequency end down: a solution stays
    // feasible when epsilon decreases, so each run warm-starts the next.
    let mut carry: Option<(std::collections::HashMap<String, f64>, f64)> = None;
    for k in (0..n_runs).rev() {
        let epsilon = lo + range * k as f64 / (n_runs - 1) as f64;
        let augmented = augment_for_epsilon(model, epsilon, range);
        let mut run_config = config.clone();
        if let Some((values, frequency)) = &carry {
            let mut ws: std::collections::BTreeMap<String, f64> =
                values.iter().map(|(k, v)| (k.clone(), *v)).collect();
            ws.insert("eps_slack".into(), frequency - epsilon);
            run_config.warm_start = Some(WarmStart { values: ws });
        }
        let result = solve(&augmented, 0, &run_config)?;
        if !result.status.has_solution() {
            warnings.push(format!(
                "grid point epsilon={epsilon:.6} ended {}",
                result.status.as_str()
            ));
            continue;
        }
        runs_solved += 1;
        if let Some(gap) = result.gap {
            gaps.push(gap);
        }
        let solution = decode(&result.values, index, instance)?;
        carry = Some((result.values.clone(), solution.frequency_objective));
        points.push(ParetoPoint {
            cost: solution.cost,
            frequency: solution.frequency_objective,
            gap: result.gap,
            status: result.status,
            solution,
        });
    }

    let filtered = non_dominated(points);
    Ok(ParetoSet {
        solutions: filtered,
        scenario: scenario.clone(),
        runs_attempted: n_runs,
        runs_solved,
        avg_gap: if gaps.is_empty() {
            None
        } else {
            Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
        },
        warnings,
    })
}

/// Clones the model into the single-objective epsilon subproblem.
fn augment_for_epsilon(model: &ModelIR, epsilon: f64, range: f64) -> ModelIR {
    let mut out = model.clone();
    out.name = format!("{}_eps", model.name);
    let slack = out.add_variable(VariableDef::continuous(
        "eps_slack",
        0.0,
        f64::INFINITY,
    ));
    let freq = out.objectives[FREQUENCY_OBJECTIVE].clone();
    let mut row_terms = freq.terms.clone();
    row_terms.push((slack, -1.0));
    out.add_constraint(LinearConstraint {
        name: "eps_row".into(),
        terms: row_terms,
        sense: ConstraintSense::Eq,
        rhs: epsilon,
    });
    let mut objective_terms = out.objectives[COST_OBJECTIVE].terms.clone();
    objective_terms.push((slack, -AUGMENTATION_COEFFICIENT / range));
    out.objectives = vec![Objective {
        name: "augmented_cost".into(),
        sense: ObjectiveSense::Min,
        terms: objective_terms,
    }];
    out.annotations
        .insert("epsilon".into(), format!("{epsilon}"));
    out
}

/// Filters to the non-dominated subset (cost minimized, frequency
/// maximized); duplicate objective pairs keep their first representative.
pub fn non_dominated(points: Vec<ParetoPoint>) -> Vec<ParetoPoint> {
    let mut kept: Vec<ParetoPoint> = Vec::with_capacity(points.len());
    for candidate in points {
        let dominated = kept.iter().any(|other| {
            other.cost <= candidate.cost
                && other.frequency >= candidate.frequency
                && (other.cost < candidate.cost || other.frequency > candidate.frequency)
        });
        let duplicate = kept
            .iter()
            .any(|other| other.cost == candidate.cost && other.frequency == candidate.frequency);
        if dominated || duplicate {
            continue;
        }
        kept.retain(|other| {
            !(candidate.cost <= other.cost
                && candidate.frequency >= other.frequency
                && (candidate.cost < other.cost || candidate.frequency > other.frequency))
        });
        kept.push(candidate);
    }
    kept.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    kept
}

/// Picks the frontier point minimizing the normalized Euclidean distance to
/// the ideal vector; ties break toward lower cost, then lower index.
pub fn compromise<'a>(
    pareto: &'a ParetoSet,
    ideal: (f64, f64),
) -> Result<&'a ParetoPoint, MooError> {
    if pareto.solutions.is_empty() {
        return Err(MooError::EmptyFrontier);
    }
    let (ideal_cost, ideal_freq) = ideal;
    if ideal_cost == 0.0 {
        return Err(MooError::ZeroIdealComponent("cost"));
    }
    if ideal_freq == 0.0 {
        return Err(MooError::ZeroIdealComponent("frequency"));
    }
    let distance = |p: &ParetoPoint| {
        let dc = (p.cost - ideal_cost) / ideal_cost;
        let df = (p.frequency - ideal_freq) / ideal_freq;
        (dc * dc + df * df).sqrt()
    };
    let mut best = &pareto.solutions[0];
    let mut best_d = distance(best);
    for p in &pareto.solutions[1..] {
        let d = distance(p);
        if d < best_d - 1e-12 || ((d - best_d).abs() <= 1e-12 && p.cost < best.cost) {
            best = p;
            best_d = d;
        }
    }
    Ok(best)
}

/// Relative per-objective distances and their Euclidean aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub delta: f64,
    pub delta_cost: f64,
    pub delta_freq: f64,
}

/// Aggregates per-objective relative deltas into the overall distance.
pub fn euclidean_delta(deltas: &[f64]) -> f64 {
    deltas.iter().map(|d| d * d).sum::<f64>().sqrt()
}

/// Compares a robust design against a deterministic reference point:
/// `delta_o = (robust_o - reference_o) / reference_o` per objective and
/// their Euclidean aggregate.
pub fn compare_objectives(
    robust: (f64, f64),
    reference: (f64, f64),
) -> Result<Distances, MooError> {
    let (ref_cost, ref_freq) = reference;
    if ref_cost == 0.0 {
        return Err(MooError::ZeroReference("cost"));
    }
    if ref_freq == 0.0 {
        return Err(MooError::ZeroReference("frequency"));
    }
    let delta_cost = (robust.0 - ref_cost) / ref_cost;
    let delta_freq = (robust.1 - ref_freq) / ref_freq;
    Ok(Distances {
        delta: euclidean_delta(&[delta_cost, delta_freq]),
        delta_cost,
        delta_freq,
    })
}

/// Compares two decoded solutions objective-wise.
pub fn compare(robust: &Solution, reference: &Solution) -> Result<Distances, MooError> {
    compare_objectives(
        (robust.cost, robust.frequency_objective),
        (reference.cost, reference.frequency_objective),
    )
}

/// One row of the three-block comparison report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub comparison: ComparisonKind,
    pub gamma_fraction: f64,
    pub rho: f64,
    /// Distances stored as magnitudes.
    pub delta: f64,
    pub delta_cost: f64,
    pub delta_freq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    MinCost,
    MaxFrequency,
    CompromiseVsIdeal,
}

impl ComparisonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComparisonKind::MinCost => "min_cost",
            ComparisonKind::MaxFrequency => "max_frequency",
            ComparisonKind::CompromiseVsIdeal => "compromise_vs_ideal",
        }
    }
}

/// Per-scenario gap/count summary plus the representative-solution
/// comparison rows, in budget-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub effort: Vec<EffortRow>,
    pub distances: Vec<ComparisonRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffortRow {
    pub gamma_fraction: f64,
    pub rho: f64,
    pub avg_gap: Option<f64>,
    pub solutions: usize,
}

/// Everything a scenario sweep produces.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub deterministic: ParetoSet,
    /// One frontier per (gamma, rho) cell, gamma-major.
    pub scenarios: Vec<ParetoSet>,
    pub report: ComparisonReport,
    /// Scenario cells that failed outright, with the error text.
    pub failures: Vec<(ScenarioConfig, String)>,
}

/// Runs the deterministic pipeline once, then one robust pipeline per
/// (gamma, rho) cell, and assembles the effort and distance reports.
///
/// Individual cell failures are recorded and the sweep continues.
pub fn scenario_sweep(
    instance: &Instance,
    gammas: &[f64],
    rhos: &[f64],
    n_runs: usize,
    strategy: Strategy,
    config: &SolveConfig,
) -> Result<SweepOutcome, MooError> {
    let (det_model, index) = crate::builder::build_deterministic(instance)?;
    let det_table = payoff_table(&det_model, &index, instance, strategy, config)?;
    let det_scenario = ScenarioConfig::deterministic();
    let deterministic = epsilon_constraint(
        &det_model,
        &index,
        instance,
        &det_table,
        &det_scenario,
        n_runs,
        config,
    )?;
    let det_ideal = deterministic.ideal().ok_or(MooError::EmptyFrontier)?;
    let det_min_cost = deterministic.min_cost().cloned();
    let det_max_freq = deterministic.max_frequency().cloned();

    let mut scenarios = Vec::new();
    let mut failures = Vec::new();
    let mut effort = Vec::new();
    let mut distances = Vec::new();

    for &gamma in gammas {
        for &rho in rhos {
            let scenario = ScenarioConfig::new(rho, gamma);
            let outcome = run_scenario(
                &det_model, &index, instance, &scenario, n_runs, strategy, config,
            );
            match outcome {
                Err(error) => {
                    failures.push((scenario.clone(), error.to_string()));
                }
                Ok(set) => {
                    effort.push(EffortRow {
                        gamma_fraction: gamma,
                        rho,
                        avg_gap: set.avg_gap,
                        solutions: set.runs_solved,
                    });
                    let mut push_row = |kind: ComparisonKind, d: Distances| {
                        distances.push(ComparisonRow {
                            comparison: kind,
                            gamma_fraction: gamma,
                            rho,
                            delta: d.delta.abs(),
                            delta_cost: d.delta_cost.abs(),
                            delta_freq: d.delta_freq.abs(),
                        });
                    };
                    if let (Some(rob), Some(det)) = (set.min_cost(), det_min_cost.as_ref()) {
                        if let Ok(d) = compare(&rob.solution, &det.solution) {
                            push_row(ComparisonKind::MinCost, d);
                        }
                    }
                    if let (Some(rob), Some(det)) = (set.max_frequency(), det_max_freq.as_ref())
                    {
                        if let Ok(d) = compare(&rob.solution, &det.solution) {
                            push_row(ComparisonKind::MaxFrequency, d);
                        }
                    }
                    if let Ok(comp) = compromise(&set, det_ideal) {
                        if let Ok(d) =
                            compare_objectives((comp.cost, comp.frequency), det_ideal)
                        {
                            push_row(ComparisonKind::CompromiseVsIdeal, d);
                        }
                    }
                    scenarios.push(set);
                }
            }
        }
    }

    // Distance rows grouped by comparison kind, budget-major inside.
    distances.sort_by(|a, b| {
        (a.comparison as u8)
            .cmp(&(b.comparison as u8))
            .then(a.gamma_fraction.total_cmp(&b.gamma_fraction))
            .then(a.rho.total_cmp(&b.rho))
    });

    Ok(SweepOutcome {
        deterministic,
        scenarios,
        report: ComparisonReport { effort, distances },
        failures,
    })
}

/// One robust cell: transform, payoff, epsilon grid.
pub fn run_scenario(
    det_model: &ModelIR,
    index: &VariableIndex,
    instance: &Instance,
    scenario: &ScenarioConfig,
    n_runs: usize,
    strategy: Strategy,
    config: &SolveConfig,
) -> Result<ParetoSet, MooError> {
    let (robust_model, _) = transform(det_model, index, instance, scenario, false)?;
    let table = payoff_table(&robust_model, index, instance, strategy, config)?;
    epsilon_constraint(
        &robust_model,
        index,
        instance,
        &table,
        scenario,
        n_runs,
        config,
    )
}
