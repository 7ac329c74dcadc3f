//! Budget-of-uncertainty robust counterpart of the deterministic model.
//!
//! Waste rates vary symmetrically within `[b - rho*b, b + rho*b]`. Each
//! deterministic capacity row is replaced by a protected row whose extra
//! terms bound the worst case over any `Gamma` simultaneous deviations in
//! the row's neighbor set; the protection enters linearly through the dual
//! of a small packing LP. Three independent routes to the protection value
//! are provided for cross-checking: the combinatorial optimum, the packing
//! LP itself, and the dual evaluated at its optimum.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::builder::{VariableIndex, BUILDER_ANNOTATION, DETERMINISTIC_BUILDER};
use crate::instance::{Instance, NeighborSets, ScenarioConfig, ScenarioError};
use crate::model::{
    ConstraintSense, LinearConstraint, ModelIR, Objective, ObjectiveSense, VariableDef,
};
use crate::solver::{SolveConfig, SolverBackend, SolverError};

/// Annotation value marking a transformed model.
pub const ROBUST_ANNOTATION: &str = "robust";

/// Bookkeeping of the robust rewrite: deviations, effective budgets and the
/// names of the added dual variables.
#[derive(Debug, Clone)]
pub struct RobustArtifacts {
    /// `(point, fraction) -> rho * nominal rate`.
    pub deviations: BTreeMap<(usize, usize), f64>,
    /// `(point, fraction) -> effective budget` in `[0, |J_im|]`.
    pub gammas: BTreeMap<(usize, usize), f64>,
    pub z_names: BTreeMap<(usize, usize), String>,
    pub p_names: BTreeMap<(usize, usize), String>,
    /// `(generator, point, fraction, frequency) -> name`.
    pub y_names: BTreeMap<(usize, usize, usize, usize), String>,
}

#[derive(Debug, Error)]
pub enum RobustError {
    #[error("model `{0}` was not produced by the deterministic builder")]
    NotDeterministic(String),
    #[error("model `{0}` is already a robust counterpart")]
    AlreadyRobust(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Rewrites a deterministic model into its robust counterpart.
///
/// Each capacity row is replaced by its protected version, one dual row is
/// added per (point, generator, fraction) and the auxiliary magnitude
/// variables are tied to the linearization variables by an absolute-value
/// envelope. The `p` duals are indexed per (generator, fraction) and
/// shared across capacity rows, which tightens but never weakens the
/// protection; `strict_dual_indexing` switches to textbook per-row duals.
pub fn transform(
    model: &ModelIR,
    index: &VariableIndex,
    instance: &Instance,
    scenario: &ScenarioConfig,
    strict_dual_indexing: bool,
) -> Result<(ModelIR, RobustArtifacts), RobustError> {
    match model.annotations.get(BUILDER_ANNOTATION).map(String::as_str) {
        Some(DETERMINISTIC_BUILDER) => {}
        _ => return Err(RobustError::NotDeterministic(model.name.clone())),
    }
    if model.annotations.contains_key(ROBUST_ANNOTATION) {
        return Err(RobustError::AlreadyRobust(model.name.clone()));
    }
    let neighbors = instance.neighbor_sets();
    scenario.validate(&neighbors)?;

    let (np, nm, nf) = (index.n_points, index.n_fractions, index.n_frequencies);
    let acc: Vec<f64> = instance
        .frequencies
        .iter()
        .map(|f| f.accumulation_days as f64)
        .collect();

    let mut out = model.clone();
    out.name = format!("{}_robust", model.name);

    // Drop the deterministic capacity rows; everything else stays.
    out.constraints.retain(|c| !c.name.starts_with("cap_"));

    let mut artifacts = RobustArtifacts {
        deviations: BTreeMap::new(),
        gammas: BTreeMap::new(),
        z_names: BTreeMap::new(),
        p_names: BTreeMap::new(),
        y_names: BTreeMap::new(),
    };

    let mut z_idx = BTreeMap::new();
    for i in 0..np {
        for m in 0..nm {
            let name = format!("z_{i}_{m}");
            let idx = out.add_variable(VariableDef::continuous(&name, 0.0, f64::INFINITY));
            z_idx.insert((i, m), idx);
            artifacts.z_names.insert((i, m), name);
            artifacts
                .deviations
                .insert((i, m), scenario.rho * instance.waste_rate(i, m));
            artifacts
                .gammas
                .insert((i, m), scenario.gamma(i, m, &neighbors));
        }
    }

    // Shared duals p[(j, m)], or per-row p[(i, j, m)] in strict mode.
    let mut p_idx: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    if strict_dual_indexing {
        for i in 0..np {
            for j in 0..np {
                for m in 0..nm {
                    let name = format!("p_{i}_{j}_{m}");
                    let idx =
                        out.add_variable(VariableDef::continuous(&name, 0.0, f64::INFINITY));
                    p_idx.insert((i, j, m), idx);
                }
            }
        }
    } else {
        for j in 0..np {
            for m in 0..nm {
                let name = format!("p_{j}_{m}");
                let idx = out.add_variable(VariableDef::continuous(&name, 0.0, f64::INFINITY));
                for i in 0..np {
                    p_idx.insert((i, j, m), idx);
                }
                artifacts.p_names.insert((j, m), name);
            }
        }
    }

    let mut y_idx = BTreeMap::new();
    for j in 0..np {
        for i in 0..np {
            for m in 0..nm {
                for f in 0..nf {
                    let name = format!("y_{j}_{i}_{m}_{f}");
                    let idx =
                        out.add_variable(VariableDef::continuous(&name, 0.0, f64::INFINITY));
                    y_idx.insert((j, i, m, f), idx);
                    artifacts.y_names.insert((j, i, m, f), name);
                }
            }
        }
    }

    // Protected capacity rows.
    for i in 0..np {
        for m in 0..nm {
            let mut terms: Vec<(usize, f64)> = Vec::new();
            for j in 0..np {
                let rate = instance.waste_rate(j, m);
                for f in 0..nf {
                    terms.push((index.linv(j, i, m, f), rate * acc[f]));
                }
            }
            terms.push((z_idx[&(i, m)], artifacts.gammas[&(i, m)]));
            for &j in neighbors.get(i, m) {
                terms.push((p_idx[&(i, j, m)], 1.0));
            }
            for (h, bin) in instance.bin_types.iter().enumerate() {
                terms.push((index.v(h, m, i), -bin.capacity));
            }
            out.add_constraint(LinearConstraint {
                name: format!("rcap_{i}_{m}"),
                terms,
                sense: ConstraintSense::Le,
                rhs: 0.0,
            });
        }
    }

    // Dual feasibility rows: one per (point, generator, fraction).
    for i in 0..np {
        for j in 0..np {
            for m in 0..nm {
                let dev = scenario.rho * instance.waste_rate(j, m);
                let mut terms: Vec<(usize, f64)> =
                    vec![(z_idx[&(i, m)], 1.0), (p_idx[&(i, j, m)], 1.0)];
                for f in 0..nf {
                    terms.push((y_idx[&(j, i, m, f)], -dev * acc[f]));
                }
                out.add_constraint(LinearConstraint {
                    name: format!("dual_{i}_{j}_{m}"),
                    terms,
                    sense: ConstraintSense::Ge,
                    rhs: 0.0,
                });
            }
        }
    }

    // Absolute-value envelope tying y to the linearization variables.
    for j in 0..np {
        for i in 0..np {
            for m in 0..nm {
                for f in 0..nf {
                    let y = y_idx[&(j, i, m, f)];
                    let lv = index.linv(j, i, m, f);
                    out.add_constraint(LinearConstraint {
                        name: format!("abs1_{j}_{i}_{m}_{f}"),
                        terms: vec![(lv, 1.0), (y, -1.0)],
                        sense: ConstraintSense::Le,
                        rhs: 0.0,
                    });
                    out.add_constraint(LinearConstraint {
                        name: format!("abs2_{j}_{i}_{m}_{f}"),
                        terms: vec![(lv, -1.0), (y, -1.0)],
                        sense: ConstraintSense::Le,
                        rhs: 0.0,
                    });
                }
            }
        }
    }

    out.annotations.insert(
        ROBUST_ANNOTATION.into(),
        format!(
            "rho={} gamma_fraction={} strict_dual_indexing={}",
            scenario.rho, scenario.gamma_fraction, strict_dual_indexing
        ),
    );

    Ok((out, artifacts))
}

/// Deviation contributions of one capacity row: for each neighbor `j`, its
/// worst extra load `dev_jm * sum_f acc_f * linv[j][i][m][f]`.
pub fn row_contributions(
    point: usize,
    fraction: usize,
    linv: &dyn Fn(usize, usize) -> f64,
    instance: &Instance,
    scenario: &ScenarioConfig,
    neighbors: &NeighborSets,
) -> Vec<f64> {
    let acc: Vec<f64> = instance
        .frequencies
        .iter()
        .map(|f| f.accumulation_days as f64)
        .collect();
    neighbors
        .get(point, fraction)
        .iter()
        .map(|&j| {
            let dev = scenario.rho * instance.waste_rate(j, fraction);
            let weighted: f64 = (0..acc.len()).map(|f| acc[f] * linv(j, f)).sum();
            dev * weighted
        })
        .collect()
}

/// Exact combinatorial protection value: the sum of the `floor(gamma)`
/// largest contributions plus the fractional remainder times the next one.
pub fn protection_value(contributions: &[f64], gamma: f64) -> f64 {
    if contributions.is_empty() || gamma <= 0.0 {
        return 0.0;
    }
    let gamma = gamma.min(contributions.len() as f64);
    let mut sorted = contributions.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let whole = gamma.floor() as usize;
    let fraction = gamma - gamma.floor();
    let mut value: f64 = sorted[..whole].iter().sum();
    if fraction > 0.0 && whole < sorted.len() {
        value += fraction * sorted[whole];
    }
    value
}

/// Protection of one capacity row under the scenario, combinatorial route.
pub fn protection_oracle(
    point: usize,
    fraction: usize,
    linv: &dyn Fn(usize, usize) -> f64,
    instance: &Instance,
    scenario: &ScenarioConfig,
) -> f64 {
    let neighbors = instance.neighbor_sets();
    let contributions =
        row_contributions(point, fraction, linv, instance, scenario, &neighbors);
    protection_value(&contributions, scenario.gamma(point, fraction, &neighbors))
}

/// Protection via the packing LP: maximize `sum(alpha_j * c_j)` subject to
/// `sum(alpha) <= gamma`, `0 <= alpha <= 1`.
pub fn protection_lp_value(
    contributions: &[f64],
    gamma: f64,
    backend: &dyn SolverBackend,
) -> Result<f64, SolverError> {
    let mut model = ModelIR::new("protection_primal");
    let alphas: Vec<usize> = (0..contributions.len())
        .map(|j| model.add_variable(VariableDef::continuous(format!("alpha_{j}"), 0.0, 1.0)))
        .collect();
    if !alphas.is_empty() {
        model.add_constraint(LinearConstraint {
            name: "budget".into(),
            terms: alphas.iter().map(|&a| (a, 1.0)).collect(),
            sense: ConstraintSense::Le,
            rhs: gamma,
        });
    }
    model.add_objective(Objective {
        name: "protection".into(),
        sense: ObjectiveSense::Max,
        terms: alphas
            .iter()
            .zip(contributions)
            .map(|(&a, &c)| (a, c))
            .collect(),
    });
    if contributions.is_empty() {
        return Ok(0.0);
    }
    let result = backend.solve(&model, 0, &SolveConfig::internal())?;
    Ok(result.objective.unwrap_or(0.0))
}

/// Protection via the dual of the packing LP: minimize
/// `gamma*z + sum(p_j)` subject to `z + p_j >= c_j`, `z, p >= 0`, evaluated
/// at the dual optimum.
pub fn protection_dual_value(
    contributions: &[f64],
    gamma: f64,
    backend: &dyn SolverBackend,
) -> Result<f64, SolverError> {
    if contributions.is_empty() {
        return Ok(0.0);
    }
    let mut model = ModelIR::new("protection_dual");
    let z = model.add_variable(VariableDef::continuous("z", 0.0, f64::INFINITY));
    let ps: Vec<usize> = (0..contributions.len())
        .map(|j| model.add_variable(VariableDef::continuous(format!("p_{j}"), 0.0, f64::INFINITY)))
        .collect();
    for (j, (&p, &c)) in ps.iter().zip(contributions).enumerate() {
        model.add_constraint(LinearConstraint {
            name: format!("cover_{j}"),
            terms: vec![(z, 1.0), (p, 1.0)],
            sense: ConstraintSense::Ge,
            rhs: c,
        });
    }
    let mut terms: Vec<(usize, f64)> = vec![(z, gamma)];
    terms.extend(ps.iter().map(|&p| (p, 1.0)));
    model.add_objective(Objective {
        name: "dual".into(),
        sense: ObjectiveSense::Min,
        terms,
    });
    let result = backend.solve(&model, 0, &SolveConfig::internal())?;
    // Evaluate gamma*z + sum(p) at the returned optimum explicitly.
    let z_value = result.values.get("z").copied().unwrap_or(0.0);
    let p_sum: f64 = (0..contributions.len())
        .map(|j| result.values.get(&format!("p_{j}")).copied().unwrap_or(0.0))
        .sum();
    Ok(gamma * z_value + p_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::build_deterministic;
    use crate::generator::{generate, GenerationProfile};
    use crate::solver::InternalSolver;

    #[test]
    fn oracle_handles_fractional_budget() {
        let c = [4.0, 3.0, 1.0];
        assert_eq!(protection_value(&c, 0.0), 0.0);
        assert!((protection_value(&c, 1.5) - 5.5).abs() < 1e-12);
        assert!((protection_value(&c, 3.0) - 8.0).abs() < 1e-12);
        // Budget beyond the set size saturates at the full sum.
        assert!((protection_value(&c, 7.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_integer_budget_with_ties() {
        assert!((protection_value(&[5.0, 5.0, 2.0], 2.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn lp_and_dual_match_oracle() {
        let backend = InternalSolver;
        let c = [4.0, 3.0, 1.0];
        for gamma in [0.0, 0.5, 1.5, 2.0, 3.0] {
            let oracle = protection_value(&c, gamma);
            let lp = protection_lp_value(&c, gamma, &backend).unwrap();
            let dual = protection_dual_value(&c, gamma, &backend).unwrap();
            assert!((oracle - lp).abs() < 1e-6, "gamma {gamma}: {oracle} vs {lp}");
            assert!((oracle - dual).abs() < 1e-6, "gamma {gamma}: {oracle} vs {dual}");
        }
    }

    #[test]
    fn zero_contributions_protect_nothing() {
        let backend = InternalSolver;
        let c = [0.0, 0.0];
        assert_eq!(protection_value(&c, 1.5), 0.0);
        assert_eq!(protection_lp_value(&c, 1.5, &backend).unwrap(), 0.0);
    }

    #[test]
    fn transform_matches_published_size_increments() {
        let inst = generate(1, 16, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (det, idx) = build_deterministic(&inst).unwrap();
        let scenario = ScenarioConfig::new(0.1, 0.1);
        let (robust, artifacts) = transform(&det, &idx, &inst, &scenario, false).unwrap();
        let stats = robust.stats();
        assert_eq!(stats.n_variables, 3568);
        assert_eq!(stats.n_constraints, 8576);
        assert_eq!(artifacts.z_names.len(), 32);
        assert_eq!(artifacts.p_names.len(), 32);
        assert_eq!(artifacts.y_names.len(), 1536);
        robust.validate().unwrap();
    }

    #[test]
    fn transform_requires_builder_annotation() {
        let inst = generate(1, 4, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (det, idx) = build_deterministic(&inst).unwrap();
        let mut stripped = det.clone();
        stripped.annotations.clear();
        let scenario = ScenarioConfig::new(0.1, 0.1);
        assert!(matches!(
            transform(&stripped, &idx, &inst, &scenario, false),
            Err(RobustError::NotDeterministic(_))
        ));
        let (robust, _) = transform(&det, &idx, &inst, &scenario, false).unwrap();
        assert!(matches!(
            transform(&robust, &idx, &inst, &scenario, false),
            Err(RobustError::AlreadyRobust(_))
        ));
    }

    #[test]
    fn strict_dual_indexing_adds_per_row_duals() {
        let inst = generate(1, 4, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (det, idx) = build_deterministic(&inst).unwrap();
        let scenario = ScenarioConfig::new(0.1, 0.1);
        let (shared, _) = transform(&det, &idx, &inst, &scenario, false).unwrap();
        let (strict, _) = transform(&det, &idx, &inst, &scenario, true).unwrap();
        // Strict mode has |I|^2*M p-variables instead of |I|*M.
        let extra = 4 * 4 * 2 - 4 * 2;
        assert_eq!(
            strict.stats().n_variables,
            shared.stats().n_variables + extra
        );
    }

    #[test]
    fn gamma_override_out_of_range_rejected() {
        let inst = generate(1, 4, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (det, idx) = build_deterministic(&inst).unwrap();
        let mut scenario = ScenarioConfig::new(0.1, 0.1);
        scenario.gamma_overrides.push(crate::instance::GammaOverride {
            point: 0,
            fraction: 0,
            gamma: 99.0,
        });
        assert!(matches!(
            transform(&det, &idx, &inst, &scenario, false),
            Err(RobustError::Scenario(_))
        ));
    }
}
