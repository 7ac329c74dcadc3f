//! Deterministic bi-objective model construction and solution decoding.
//!
//! The model locates collection points, sizes their bin stock per waste
//! fraction and picks a collection frequency per (point, fraction), under
//! assignment, area, capacity, linearization, walking-distance and coupling
//! constraints. Objectives: minimize network cost, maximize accumulation
//! days (a proxy for collection effort).
//!
//! Index conventions: `x[i][j] = 1` iff generator `i` is assigned to
//! collection point `j`; `linv[j][i][m][f]` linearizes the product
//! `x[j][i] * fr[i][m][f]` (generator `j` served at point `i` under the
//! frequency chosen at `i` for fraction `m`).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, Violation};
use crate::model::{
    ConstraintSense, LinearConstraint, ModelIR, Objective, ObjectiveSense, VariableDef,
};

/// Annotation key carrying builder provenance.
pub const BUILDER_ANNOTATION: &str = "builder";
/// Annotation value of models produced by [`build_deterministic`].
pub const DETERMINISTIC_BUILDER: &str = "bin-location-deterministic";

/// Absolute tolerance when rounding integral variables during decoding.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-6;
/// Relative tolerance between solver-reported and recomputed objectives.
pub const OBJECTIVE_RECOMPUTE_TOLERANCE: f64 = 1e-4;

/// Maps the structured variable families onto the flat variable list of the
/// deterministic model. Variables are laid out in fixed blocks:
/// `x`, `q`, `fr`, `v`, `linv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableIndex {
    pub n_points: usize,
    pub n_fractions: usize,
    pub n_bin_types: usize,
    pub n_frequencies: usize,
}

impl VariableIndex {
    pub fn new(instance: &Instance) -> Self {
        Self {
            n_points: instance.points.len(),
            n_fractions: instance.fractions.len(),
            n_bin_types: instance.bin_types.len(),
            n_frequencies: instance.frequencies.len(),
        }
    }

    pub fn x(&self, i: usize, j: usize) -> usize {
        i * self.n_points + j
    }

    pub fn q(&self, i: usize) -> usize {
        self.n_points * self.n_points + i
    }

    pub fn fr(&self, i: usize, m: usize, f: usize) -> usize {
        self.q_end() + (i * self.n_fractions + m) * self.n_frequencies + f
    }

    pub fn v(&self, h: usize, m: usize, i: usize) -> usize {
        self.fr_end() + (h * self.n_fractions + m) * self.n_points + i
    }

    pub fn linv(&self, j: usize, i: usize, m: usize, f: usize) -> usize {
        self.v_end()
            + ((j * self.n_points + i) * self.n_fractions + m) * self.n_frequencies
            + f
    }

    fn q_end(&self) -> usize {
        self.n_points * self.n_points + self.n_points
    }

    fn fr_end(&self) -> usize {
        self.q_end() + self.n_points * self.n_fractions * self.n_frequencies
    }

    fn v_end(&self) -> usize {
        self.fr_end() + self.n_bin_types * self.n_fractions * self.n_points
    }

    /// Total number of deterministic variables.
    pub fn n_variables(&self) -> usize {
        self.v_end()
            + self.n_points * self.n_points * self.n_fractions * self.n_frequencies
    }

    pub fn x_name(&self, i: usize, j: usize) -> String {
        format!("x_{i}_{j}")
    }

    pub fn q_name(&self, i: usize) -> String {
        format!("q_{i}")
    }

    pub fn fr_name(&self, i: usize, m: usize, f: usize) -> String {
        format!("fr_{i}_{m}_{f}")
    }

    pub fn v_name(&self, h: usize, m: usize, i: usize) -> String {
        format!("v_{h}_{m}_{i}")
    }

    pub fn linv_name(&self, j: usize, i: usize, m: usize, f: usize) -> String {
        format!("linv_{j}_{i}_{m}_{f}")
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("instance is invalid: {}", .0.iter().map(|v| v.0.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),
}

/// Builds the deterministic bi-objective MILP for an instance.
///
/// Row blocks are emitted in fixed order: assignment, area, capacity,
/// linearization, walking-distance, frequency coupling, opening coupling.
/// Walking-distance rows exist for every (generator, point) pair; far pairs
/// are forced to zero by the row rather than removed.
pub fn build_deterministic(
    instance: &Instance,
) -> Result<(ModelIR, VariableIndex), BuildError> {
    let violations = instance.validate();
    if !violations.is_empty() {
        return Err(BuildError::InvalidInstance(violations));
    }

    let idx = VariableIndex::new(instance);
    let (np, nm, nh, nf) = (
        idx.n_points,
        idx.n_fractions,
        idx.n_bin_types,
        idx.n_frequencies,
    );
    let acc: Vec<f64> = instance
        .frequencies
        .iter()
        .map(|f| f.accumulation_days as f64)
        .collect();

    let mut model = ModelIR::new(format!("binloc_det_{np}"));
    model.variables.reserve(idx.n_variables());

    for i in 0..np {
        for j in 0..np {
            model.add_variable(VariableDef::binary(idx.x_name(i, j)));
        }
    }
    for i in 0..np {
        model.add_variable(VariableDef::binary(idx.q_name(i)));
    }
    for i in 0..np {
        for m in 0..nm {
            for f in 0..nf {
                model.add_variable(VariableDef::binary(idx.fr_name(i, m, f)));
            }
        }
    }
    for h in 0..nh {
        for m in 0..nm {
            for i in 0..np {
                model.add_variable(VariableDef::integer(
                    idx.v_name(h, m, i),
                    0.0,
                    f64::INFINITY,
                ));
            }
        }
    }
    for j in 0..np {
        for i in 0..np {
            for m in 0..nm {
                for f in 0..nf {
                    model.add_variable(VariableDef::continuous(
                        idx.linv_name(j, i, m, f),
                        0.0,
                        f64::INFINITY,
                    ));
                }
            }
        }
    }
    debug_assert_eq!(model.variables.len(), idx.n_variables());

    // Each generator is assigned to exactly one collection point.
    for i in 0..np {
        model.add_constraint(LinearConstraint {
            name: format!("assign_{i}"),
            terms: (0..np).map(|j| (idx.x(i, j), 1.0)).collect(),
            sense: ConstraintSense::Eq,
            rhs: 1.0,
        });
    }

    // Installed bins fit in the available area of an opened point; the
    // footprint is shared across fractions.
    for j in 0..np {
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(nh * nm + 1);
        for m in 0..nm {
            for (h, bin) in instance.bin_types.iter().enumerate() {
                terms.push((idx.v(h, m, j), bin.area));
            }
        }
        terms.push((idx.q(j), -instance.max_area));
        model.add_constraint(LinearConstraint {
            name: format!("area_{j}"),
            terms,
            sense: ConstraintSense::Le,
            rhs: 0.0,
        });
    }

    // Accumulated waste per (point, fraction) stays within installed
    // capacity.
    for i in 0..np {
        for m in 0..nm {
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(np * nf + nh);
            for j in 0..np {
                let rate = instance.waste_rate(j, m);
                for f in 0..nf {
                    terms.push((idx.linv(j, i, m, f), rate * acc[f]));
                }
            }
            for (h, bin) in instance.bin_types.iter().enumerate() {
                terms.push((idx.v(h, m, i), -bin.capacity));
            }
            model.add_constraint(LinearConstraint {
                name: format!("cap_{i}_{m}"),
                terms,
                sense: ConstraintSense::Le,
                rhs: 0.0,
            });
        }
    }

    // Linearization of x[j][i] * fr[i][m][f].
    for j in 0..np {
        for i in 0..np {
            for m in 0..nm {
                for f in 0..nf {
                    let lv = idx.linv(j, i, m, f);
                    model.add_constraint(LinearConstraint {
                        name: format!("lin1_{j}_{i}_{m}_{f}"),
                        terms: vec![(lv, 1.0), (idx.x(j, i), -1.0)],
                        sense: ConstraintSense::Le,
                        rhs: 0.0,
                    });
                    model.add_constraint(LinearConstraint {
                        name: format!("lin2_{j}_{i}_{m}_{f}"),
                        terms: vec![(lv, 1.0), (idx.fr(i, m, f), -1.0)],
                        sense: ConstraintSense::Le,
                        rhs: 0.0,
                    });
                    model.add_constraint(LinearConstraint {
                        name: format!("lin3_{j}_{i}_{m}_{f}"),
                        terms: vec![(idx.x(j, i), 1.0), (idx.fr(i, m, f), 1.0), (lv, -1.0)],
                        sense: ConstraintSense::Le,
                        rhs: 1.0,
                    });
                }
            }
        }
    }

    // Walking-distance quality of service.
    for i in 0..np {
        for j in 0..np {
            model.add_constraint(LinearConstraint {
                name: format!("qos_{i}_{j}"),
                terms: vec![(idx.x(i, j), instance.distance[i][j])],
                sense: ConstraintSense::Le,
                rhs: instance.max_distance,
            });
        }
    }

    // Every generator lands on a point with a set frequency.
    for g in 0..np {
        for m in 0..nm {
            let terms: Vec<(usize, f64)> = (0..np)
                .flat_map(|i| (0..nf).map(move |f| (i, f)))
                .map(|(i, f)| (idx.linv(g, i, m, f), 1.0))
                .collect();
            model.add_constraint(LinearConstraint {
                name: format!("freqsel_{g}_{m}"),
                terms,
                sense: ConstraintSense::Eq,
                rhs: 1.0,
            });
        }
    }

    // A point carries exactly one frequency per fraction iff opened.
    for i in 0..np {
        for m in 0..nm {
            let mut terms: Vec<(usize, f64)> =
                (0..nf).map(|f| (idx.fr(i, m, f), 1.0)).collect();
            terms.push((idx.q(i), -1.0));
            model.add_constraint(LinearConstraint {
                name: format!("open_{i}_{m}"),
                terms,
                sense: ConstraintSense::Eq,
                rhs: 0.0,
            });
        }
    }

    // Objective 1: network cost (bins plus opened points).
    let mut cost_terms: Vec<(usize, f64)> = Vec::with_capacity(nh * nm * np + np);
    for (h, bin) in instance.bin_types.iter().enumerate() {
        for m in 0..nm {
            for i in 0..np {
                cost_terms.push((idx.v(h, m, i), bin.unit_cost));
            }
        }
    }
    for (i, p) in instance.points.iter().enumerate() {
        cost_terms.push((idx.q(i), p.opening_cost));
    }
    model.add_objective(Objective {
        name: "cost".into(),
        sense: ObjectiveSense::Min,
        terms: cost_terms,
    });

    // Objective 2: total accumulation days across chosen frequencies.
    let freq_terms: Vec<(usize, f64)> = (0..np)
        .flat_map(|i| (0..nm).map(move |m| (i, m)))
        .flat_map(|(i, m)| (0..nf).map(move |f| (i, m, f)))
        .map(|(i, m, f)| (idx.fr(i, m, f), acc[f]))
        .collect();
    model.add_objective(Objective {
        name: "frequency".into(),
        sense: ObjectiveSense::Max,
        terms: freq_terms,
    });

    model
        .annotations
        .insert(BUILDER_ANNOTATION.into(), DETERMINISTIC_BUILDER.into());

    Ok((model, idx))
}

/// A decoded network design with both objective values recomputed from the
/// structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// `assignment[i]` is the collection point serving generator `i`.
    pub assignment: Vec<usize>,
    /// Opened collection points, ascending.
    pub open: Vec<usize>,
    /// One entry per (open point, fraction).
    pub frequency: Vec<FrequencyChoice>,
    /// Installed bins with non-zero count.
    pub bins: Vec<BinPlacement>,
    pub cost: f64,
    pub frequency_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyChoice {
    pub point: usize,
    pub fraction: usize,
    pub accumulation_days: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinPlacement {
    pub point: usize,
    pub fraction: usize,
    pub bin_type: usize,
    pub count: u32,
}

impl Solution {
    pub fn is_open(&self, point: usize) -> bool {
        self.open.binary_search(&point).is_ok()
    }

    /// Accumulation days chosen at (point, fraction), if the point is open.
    pub fn accumulation_days(&self, point: usize, fraction: usize) -> Option<u32> {
        self.frequency
            .iter()
            .find(|c| c.point == point && c.fraction == fraction)
            .map(|c| c.accumulation_days)
    }

    /// Installed capacity at (point, fraction) in cubic meters.
    pub fn capacity(&self, point: usize, fraction: usize, instance: &Instance) -> f64 {
        self.bins
            .iter()
            .filter(|b| b.point == point && b.fraction == fraction)
            .map(|b| instance.bin_types[b.bin_type].capacity * b.count as f64)
            .sum()
    }

    /// Total bins installed at a point, all fractions and types.
    pub fn bins_total(&self, point: usize) -> u32 {
        self.bins
            .iter()
            .filter(|b| b.point == point)
            .map(|b| b.count)
            .sum()
    }
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("variable `{name}` = {value} is not integral within {INTEGRALITY_TOLERANCE}")]
    Fractional { name: String, value: f64 },
    #[error("generator {generator} is assigned to {count} points, expected exactly 1")]
    AssignmentRow { generator: usize, count: usize },
    #[error("generator {generator} assigned to closed point {point}")]
    ClosedPoint { generator: usize, point: usize },
    #[error("generator {generator} assigned to point {point} at distance {distance} > {max}")]
    TooFar {
        generator: usize,
        point: usize,
        distance: f64,
        max: f64,
    },
    #[error("point {point}, fraction {fraction} carries {count} frequency flags, expected {expected}")]
    FrequencyRow {
        point: usize,
        fraction: usize,
        count: usize,
        expected: usize,
    },
    #[error("recomputed {objective} {recomputed} differs from solver value {reported} beyond relative {OBJECTIVE_RECOMPUTE_TOLERANCE}")]
    ObjectiveMismatch {
        objective: &'static str,
        recomputed: f64,
        reported: f64,
    },
}

fn rounded_int(values: &HashMap<String, f64>, name: &str) -> Result<i64, DecodeError> {
    let value = values.get(name).copied().unwrap_or(0.0);
    let nearest = value.round();
    if (value - nearest).abs() > INTEGRALITY_TOLERANCE {
        return Err(DecodeError::Fractional {
            name: name.to_string(),
            value,
        });
    }
    Ok(nearest as i64)
}

/// Decodes raw solver values into a [`Solution`], rounding integral
/// variables, checking structural feasibility and recomputing both
/// objectives from the decoded design.
pub fn decode(
    values: &HashMap<String, f64>,
    index: &VariableIndex,
    instance: &Instance,
) -> Result<Solution, DecodeError> {
    let np = index.n_points;
    let nm = index.n_fractions;
    let nh = index.n_bin_types;
    let nf = index.n_frequencies;

    let mut open = Vec::new();
    for i in 0..np {
        if rounded_int(values, &index.q_name(i))? == 1 {
            open.push(i);
        }
    }

    let mut assignment = Vec::with_capacity(np);
    for i in 0..np {
        let targets: Vec<usize> = (0..np)
            .map(|j| rounded_int(values, &index.x_name(i, j)).map(|b| (j, b)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|&(_, b)| b == 1)
            .map(|(j, _)| j)
            .collect();
        if targets.len() != 1 {
            return Err(DecodeError::AssignmentRow {
                generator: i,
                count: targets.len(),
            });
        }
        let j = targets[0];
        if open.binary_search(&j).is_err() {
            return Err(DecodeError::ClosedPoint {
                generator: i,
                point: j,
            });
        }
        if instance.distance[i][j] > instance.max_distance {
            return Err(DecodeError::TooFar {
                generator: i,
                point: j,
                distance: instance.distance[i][j],
                max: instance.max_distance,
            });
        }
        assignment.push(j);
    }

    let mut frequency = Vec::new();
    for i in 0..np {
        let expected = usize::from(open.binary_search(&i).is_ok());
        for m in 0..nm {
            let chosen: Vec<usize> = (0..nf)
                .map(|f| rounded_int(values, &index.fr_name(i, m, f)).map(|b| (f, b)))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|&(_, b)| b == 1)
                .map(|(f, _)| f)
                .collect();
            if chosen.len() != expected {
                return Err(DecodeError::FrequencyRow {
                    point: i,
                    fraction: m,
                    count: chosen.len(),
                    expected,
                });
            }
            if let Some(&f) = chosen.first() {
                frequency.push(FrequencyChoice {
                    point: i,
                    fraction: m,
                    accumulation_days: instance.frequencies[f].accumulation_days,
                });
            }
        }
    }

    let mut bins = Vec::new();
    for i in 0..np {
        for m in 0..nm {
            for h in 0..nh {
                let count = rounded_int(values, &index.v_name(h, m, i))?;
                if count > 0 {
                    bins.push(BinPlacement {
                        point: i,
                        fraction: m,
                        bin_type: h,
                        count: count as u32,
                    });
                }
            }
        }
    }

    let mut solution = Solution {
        assignment,
        open,
        frequency,
        bins,
        cost: 0.0,
        frequency_objective: 0.0,
    };
    let evaluated = evaluate(&solution, instance);
    solution.cost = evaluated.cost;
    solution.frequency_objective = evaluated.frequency_objective;

    // Cross-check against the solver's view of the two objectives.
    let reported_cost: f64 = (0..nh)
        .flat_map(|h| (0..nm).map(move |m| (h, m)))
        .flat_map(|(h, m)| (0..np).map(move |i| (h, m, i)))
        .map(|(h, m, i)| {
            instance.bin_types[h].unit_cost
                * values.get(&index.v_name(h, m, i)).copied().unwrap_or(0.0)
        })
        .sum::<f64>()
        + (0..np)
            .map(|i| {
                instance.points[i].opening_cost
                    * values.get(&index.q_name(i)).copied().unwrap_or(0.0)
            })
            .sum::<f64>();
    let reported_freq: f64 = (0..np)
        .flat_map(|i| (0..nm).map(move |m| (i, m)))
        .flat_map(|(i, m)| (0..nf).map(move |f| (i, m, f)))
        .map(|(i, m, f)| {
            instance.frequencies[f].accumulation_days as f64
                * values.get(&index.fr_name(i, m, f)).copied().unwrap_or(0.0)
        })
        .sum();

    for (objective, recomputed, reported) in [
        ("cost", solution.cost, reported_cost),
        ("frequency", solution.frequency_objective, reported_freq),
    ] {
        let scale = reported.abs().max(1.0);
        if (recomputed - reported).abs() / scale > OBJECTIVE_RECOMPUTE_TOLERANCE {
            return Err(DecodeError::ObjectiveMismatch {
                objective,
                recomputed,
                reported,
            });
        }
    }

    Ok(solution)
}

/// Pure recomputation of both objectives plus per-(point, fraction)
/// capacity slack; negative slack flags a violated capacity row.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    pub frequency_objective: f64,
    /// `capacity_slack[i][m]` in cubic meters.
    pub capacity_slack: Vec<Vec<f64>>,
}

pub fn evaluate(solution: &Solution, instance: &Instance) -> Evaluation {
    let np = instance.points.len();
    let nm = instance.fractions.len();

    let cost: f64 = solution
        .bins
        .iter()
        .map(|b| instance.bin_types[b.bin_type].unit_cost * b.count as f64)
        .sum::<f64>()
        + solution
            .open
            .iter()
            .map(|&i| instance.points[i].opening_cost)
            .sum::<f64>();

    let frequency_objective: f64 = solution
        .frequency
        .iter()
        .map(|c| c.accumulation_days as f64)
        .sum();

    let mut capacity_slack = vec![vec![0.0; nm]; np];
    for i in 0..np {
        for m in 0..nm {
            let acc = solution.accumulation_days(i, m).unwrap_or(0) as f64;
            let load: f64 = solution
                .assignment
                .iter()
                .enumerate()
                .filter(|&(_, &target)| target == i)
                .map(|(j, _)| instance.waste_rate(j, m) * acc)
                .sum();
            capacity_slack[i][m] = solution.capacity(i, m, instance) - load;
        }
    }

    Evaluation {
        cost,
        frequency_objective,
        capacity_slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GenerationProfile};
    use crate::instance::SCHEMA_VERSION;
    use crate::instance::{default_bin_catalog, default_frequencies, GenerationPoint};
    use std::collections::BTreeMap;

    pub(crate) fn tiny_instance(n: usize) -> Instance {
        let points: Vec<GenerationPoint> = (0..n)
            .map(|i| GenerationPoint {
                id: format!("p{i}"),
                coordinates: [100.0 * i as f64, 0.0],
                waste_rate: BTreeMap::from([
                    ("recyclable".to_string(), 0.5 + 0.1 * i as f64),
                    ("mixed".to_string(), 0.2),
                ]),
                opening_cost: 493.0,
            })
            .collect();
        let distance: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| 100.0 * (i as f64 - j as f64).abs())
                    .collect()
            })
            .collect();
        Instance {
            points,
            fractions: vec!["recyclable".into(), "mixed".into()],
            bin_types: default_bin_catalog(),
            frequencies: default_frequencies(),
            distance,
            max_distance: 300.0,
            max_area: 5.0,
            schema_version: SCHEMA_VERSION,
        }
    }

    fn expected_variables(i: usize, m: usize, f: usize, h: usize) -> usize {
        i * i + i + i * m * f + h * m * i + i * i * m * f
    }

    fn expected_rows(i: usize, m: usize, f: usize) -> usize {
        2 * i + 3 * i * m + i * i * (3 * m * f + 1)
    }

    #[test]
    fn variable_and_row_counts_for_i16() {
        let inst = generate(1, 16, &GenerationProfile::named("i16").unwrap()).unwrap();
        let (model, _) = build_deterministic(&inst).unwrap();
        let stats = model.stats();
        assert_eq!(stats.n_variables, 1968);
        assert_eq!(stats.n_constraints, 4992);
        assert_eq!(stats.n_variables, expected_variables(16, 2, 3, 2));
        assert_eq!(stats.n_constraints, expected_rows(16, 2, 3));
    }

    #[test]
    fn variable_count_formula_for_single_point() {
        let inst = tiny_instance(1);
        let (model, _) = build_deterministic(&inst).unwrap();
        let stats = model.stats();
        // x 1 + q 1 + fr 6 + v 4 + linv 6
        assert_eq!(stats.n_variables, 18);
        assert_eq!(stats.n_constraints, expected_rows(1, 2, 3));
    }

    #[test]
    fn model_is_well_formed() {
        let inst = tiny_instance(3);
        let (model, idx) = build_deterministic(&inst).unwrap();
        model.validate().unwrap();
        assert_eq!(model.objectives.len(), 2);
        assert_eq!(model.objectives[0].sense, ObjectiveSense::Min);
        assert_eq!(model.objectives[1].sense, ObjectiveSense::Max);
        // Index arithmetic is bijective onto the variable list.
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(model.variables[idx.x(i, j)].name, idx.x_name(i, j));
            }
        }
        assert_eq!(model.variables[idx.q(2)].name, "q_2");
        assert_eq!(model.variables[idx.fr(1, 1, 2)].name, "fr_1_1_2");
        assert_eq!(model.variables[idx.v(1, 0, 2)].name, "v_1_0_2");
        assert_eq!(model.variables[idx.linv(2, 1, 0, 1)].name, "linv_2_1_0_1");
        assert_eq!(model.variables.len(), idx.n_variables());
    }

    #[test]
    fn decode_identity_assignment() {
        let inst = tiny_instance(2);
        let (_, idx) = build_deterministic(&inst).unwrap();
        let mut values = HashMap::new();
        for i in 0..2 {
            values.insert(idx.x_name(i, i), 1.0);
            values.insert(idx.q_name(i), 1.0);
            for m in 0..2 {
                values.insert(idx.fr_name(i, m, 0), 1.0);
                values.insert(idx.v_name(0, m, i), 1.0);
                values.insert(idx.linv_name(i, i, m, 0), 1.0);
            }
        }
        let solution = decode(&values, &idx, &inst).unwrap();
        assert_eq!(solution.assignment, vec![0, 1]);
        assert_eq!(solution.open, vec![0, 1]);
        // One bin per (point, fraction) at 493 plus two openings.
        assert_eq!(solution.cost, 4.0 * 493.0 + 2.0 * 493.0);
        assert_eq!(solution.frequency_objective, 4.0);
    }

    #[test]
    fn decode_rejects_unassigned_generator() {
        let inst = tiny_instance(2);
        let (_, idx) = build_deterministic(&inst).unwrap();
        let mut values = HashMap::new();
        values.insert(idx.x_name(0, 0), 1.0);
        values.insert(idx.q_name(0), 1.0);
        for m in 0..2 {
            values.insert(idx.fr_name(0, m, 0), 1.0);
        }
        let err = decode(&values, &idx, &inst).unwrap_err();
        assert!(matches!(
            err,
            DecodeError::AssignmentRow { generator: 1, count: 0 }
        ));
    }

    #[test]
    fn decode_rejects_fractional_binary() {
        let inst = tiny_instance(2);
        let (_, idx) = build_deterministic(&inst).unwrap();
        let mut values = HashMap::new();
        values.insert(idx.x_name(0, 0), 0.4);
        let err = decode(&values, &idx, &inst).unwrap_err();
        assert!(matches!(err, DecodeError::Fractional { .. }));
    }

    #[test]
    fn evaluate_empty_network() {
        let solution = Solution {
            assignment: vec![],
            open: vec![],
            frequency: vec![],
            bins: vec![],
            cost: 0.0,
            frequency_objective: 0.0,
        };
        let inst = tiny_instance(1);
        let e = evaluate(&solution, &inst);
        assert_eq!(e.cost, 0.0);
        assert_eq!(e.frequency_objective, 0.0);
    }

    #[test]
    fn evaluate_single_point_defaults() {
        // One point, one CTB-1100 per fraction, daily collection.
        let inst = tiny_instance(1);
        let solution = Solution {
            assignment: vec![0],
            open: vec![0],
            frequency: vec![
                FrequencyChoice {
                    point: 0,
                    fraction: 0,
                    accumulation_days: 1,
                },
                FrequencyChoice {
                    point: 0,
                    fraction: 1,
                    accumulation_days: 1,
                },
            ],
            bins: vec![
                BinPlacement {
                    point: 0,
                    fraction: 0,
                    bin_type: 0,
                    count: 1,
                },
                BinPlacement {
                    point: 0,
                    fraction: 1,
                    bin_type: 0,
                    count: 1,
                },
            ],
            cost: 0.0,
            frequency_objective: 0.0,
        };
        let e = evaluate(&solution, &inst);
        assert_eq!(e.cost, 493.0 * 2.0 + 493.0);
        assert_eq!(e.frequency_objective, 2.0);
        // Slack: capacity 1.1 minus daily loads (0.5, 0.2).
        assert!((e.capacity_slack[0][0] - 0.6).abs() < 1e-12);
        assert!((e.capacity_slack[0][1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn frequency_objective_upper_bound() {
        for (n, expected) in [(16, 96.0), (58, 348.0), (73, 438.0), (126, 756.0), (190, 1140.0)] {
            let max_acc = 3.0;
            assert_eq!(n as f64 * 2.0 * max_acc, expected);
        }
    }
}
