//! Exact branch-and-bound for desk-scale models.
//!
//! Best-first search on LP-relaxation bounds computed by the bundled dense
//! simplex; branching picks the most fractional integral variable, ties by
//! declaration order. A feasible warm start seeds the incumbent, and a
//! rounding pass at each fractional node tries to improve it early.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;
use std::time::Instant;

use crate::model::{ConstraintSense, ModelIR, ObjectiveSense};
use crate::solver::simplex::{solve_dense_lp, DenseLp, LpRow, LpStatus};
use crate::solver::{SolveConfig, SolveResult, SolveStatus, SolverError};

const INT_TOL: f64 = 1e-6;
const ROW_TOL: f64 = 1e-6;
const IMPROVE_TOL: f64 = 1e-9;

struct BoundChange {
    var: usize,
    lower: f64,
    upper: f64,
    parent: Option<Rc<BoundChange>>,
}

struct Node {
    /// LP bound of the parent relaxation (minimized sense).
    bound: f64,
    depth: u32,
    seq: u64,
    changes: Option<Rc<BoundChange>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap pops the maximum; prefer smaller bounds, then deeper
        // nodes, then earlier creation.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn materialize(
    root: &[(f64, f64)],
    changes: &Option<Rc<BoundChange>>,
    scratch: &mut Vec<(f64, f64)>,
    seen: &mut Vec<bool>,
) {
    scratch.clear();
    scratch.extend_from_slice(root);
    seen.clear();
    seen.resize(root.len(), false);
    let mut cursor = changes.as_ref();
    while let Some(change) = cursor {
        if !seen[change.var] {
            seen[change.var] = true;
            scratch[change.var] = (change.lower, change.upper);
        }
        cursor = change.parent.as_ref();
    }
}

/// Checks a candidate point against all rows, bounds and integrality.
fn is_feasible(model: &ModelIR, int_vars: &[usize], values: &[f64]) -> bool {
    for (j, var) in model.variables.iter().enumerate() {
        if values[j] < var.lower - ROW_TOL || values[j] > var.upper + ROW_TOL {
            return false;
        }
    }
    for &j in int_vars {
        if (values[j] - values[j].round()).abs() > INT_TOL {
            return false;
        }
    }
    for row in &model.constraints {
        let lhs: f64 = row.terms.iter().map(|&(j, a)| a * values[j]).sum();
        let ok = match row.sense {
            ConstraintSense::Le => lhs <= row.rhs + ROW_TOL,
            ConstraintSense::Ge => lhs >= row.rhs - ROW_TOL,
            ConstraintSense::Eq => (lhs - row.rhs).abs() <= ROW_TOL,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Solves `model` on the selected objective with the internal exact solver.
pub fn solve_internal(
    model: &ModelIR,
    objective_index: usize,
    config: &SolveConfig,
) -> Result<SolveResult, SolverError> {
    let started = Instant::now();
    let objective = model
        .objectives
        .get(objective_index)
        .ok_or(SolverError::BadObjectiveIndex(objective_index))?;

    let n = model.variables.len();
    let minimize = objective.sense == ObjectiveSense::Min;
    let mut costs = vec![0.0_f64; n];
    for &(j, c) in &objective.terms {
        costs[j] += if minimize { c } else { -c };
    }

    let int_vars: Vec<usize> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_integral())
        .map(|(j, _)| j)
        .collect();
    if let Some(guard) = config.max_int_vars {
        if int_vars.len() > guard {
            return Err(SolverError::TooManyIntegers {
                count: int_vars.len(),
                guard,
            });
        }
    }

    let root_bounds: Vec<(f64, f64)> = model
        .variables
        .iter()
        .map(|v| (v.lower, v.upper))
        .collect();
    let integral_flags: Vec<bool> = model.variables.iter().map(|v| v.is_integral()).collect();
    let rows: Vec<LpRow> = model
        .constraints
        .iter()
        .map(|c| LpRow {
            terms: c.terms.clone(),
            sense: c.sense,
            rhs: c.rhs,
        })
        .collect();
    // With an all-integral objective every attainable value is integral, so
    // fractional relaxation bounds round up.
    let integral_objective = objective
        .terms
        .iter()
        .all(|&(j, c)| integral_flags[j] && c.fract() == 0.0);
    let sharpen = |bound: f64| {
        if integral_objective {
            (bound - 1e-6).ceil()
        } else {
            bound
        }
    };

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    if let Some(ws) = &config.warm_start {
        ws.validate(model).map_err(SolverError::WarmStart)?;
        let mut values = vec![0.0_f64; n];
        for (j, var) in model.variables.iter().enumerate() {
            values[j] = ws.values.get(&var.name).copied().unwrap_or(0.0);
        }
        if is_feasible(model, &int_vars, &values) {
            let obj: f64 = costs.iter().zip(&values).map(|(c, v)| c * v).sum();
            incumbent = Some((obj, values));
        } else {
            log::warn!("warm start is infeasible for `{}`; ignored", model.name);
        }
    }

    let mut queue: BinaryHeap<Node> = BinaryHeap::new();
    queue.push(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        changes: None,
    });
    let mut seq = 1u64;
    let mut nodes_explored = 0usize;
    let mut scratch_bounds: Vec<(f64, f64)> = Vec::new();
    let mut seen: Vec<bool> = Vec::new();
    let mut hit_limit = false;
    let mut best_open_bound = f64::NEG_INFINITY;

    while let Some(node) = queue.pop() {
        if let Some((inc_obj, _)) = &incumbent {
            if node.bound >= inc_obj - IMPROVE_TOL {
                continue;
            }
            // Remaining nodes cannot close the gap below the target.
            let gap = gap_of(*inc_obj, node.bound);
            if config.mip_gap_target > 0.0 && gap <= config.mip_gap_target {
                best_open_bound = node.bound;
                hit_limit = false;
                break;
            }
        }
        if nodes_explored >= config.max_nodes
            || started.elapsed().as_secs_f64() > config.time_limit
        {
            best_open_bound = node.bound;
            hit_limit = true;
            break;
        }
        nodes_explored += 1;

        materialize(&root_bounds, &node.changes, &mut scratch_bounds, &mut seen);
        // An incumbent caps the objective; the cutoff row lets the
        // preprocessing propagate it into variable bounds.
        let mut node_rows = rows.clone();
        if let Some((inc_obj, _)) = &incumbent {
            // Only strictly better solutions matter; integral objectives
            // must improve by at least one.
            let cutoff = if integral_objective {
                inc_obj - 1.0
            } else {
                *inc_obj
            };
            node_rows.push(LpRow {
                terms: costs
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(j, &c)| (j, c))
                    .collect(),
                sense: ConstraintSense::Le,
                rhs: cutoff,
            });
        }
        let lp = DenseLp {
            n_vars: n,
            costs: costs.clone(),
            bounds: scratch_bounds.clone(),
            integral: integral_flags.clone(),
            rows: node_rows,
        };
        let relaxation = solve_dense_lp(&lp).map_err(SolverError::Lp)?;
        match relaxation.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(SolveResult {
                    status: SolveStatus::Unbounded,
                    objective: None,
                    values: HashMap::new(),
                    gap: None,
                    wall_time: started.elapsed().as_secs_f64(),
                    nodes: nodes_explored,
                });
            }
            LpStatus::Optimal => {}
        }
        let lp_obj = sharpen(relaxation.objective);
        if let Some((inc_obj, _)) = &incumbent {
            if lp_obj >= inc_obj - IMPROVE_TOL {
                continue;
            }
        }

        let fractional = int_vars
            .iter()
            .map(|&j| (j, (relaxation.values[j] - relaxation.values[j].round()).abs()))
            .filter(|&(_, d)| d > INT_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)));

        match fractional {
            None => {
                // Integral relaxation: candidate incumbent.
                if incumbent
                    .as_ref()
                    .map(|(obj, _)| lp_obj < obj - IMPROVE_TOL)
                    .unwrap_or(true)
                {
                    incumbent = Some((lp_obj, relaxation.values));
                }
            }
            Some((var, _)) => {
                // Cheap rounding pass before branching.
                let mut rounded = relaxation.values.clone();
                for &j in &int_vars {
                    rounded[j] = rounded[j].round();
                }
                if is_feasible(model, &int_vars, &rounded) {
                    let obj: f64 = costs.iter().zip(&rounded).map(|(c, v)| c * v).sum();
                    if incumbent
                        .as_ref()
                        .map(|(inc, _)| obj < inc - IMPROVE_TOL)
                        .unwrap_or(true)
                    {
                        incumbent = Some((obj, rounded));
                    }
                }

                let value = relaxation.values[var];
                let (lb, ub) = scratch_bounds[var];
                let floor = value.floor();
                let ceil = value.ceil();
                if floor >= lb - 1e-12 {
                    queue.push(Node {
                        bound: lp_obj,
                        depth: node.depth + 1,
                        seq,
                        changes: Some(Rc::new(BoundChange {
                            var,
                            lower: lb,
                            upper: floor,
                            parent: node.changes.clone(),
                        })),
                    });
                    seq += 1;
                }
                if ceil <= ub + 1e-12 {
                    queue.push(Node {
                        bound: lp_obj,
                        depth: node.depth + 1,
                        seq,
                        changes: Some(Rc::new(BoundChange {
                            var,
                            lower: ceil,
                            upper: ub,
                            parent: node.changes.clone(),
                        })),
                    });
                    seq += 1;
                }
            }
        }
    }

    let wall_time = started.elapsed().as_secs_f64();
    match incumbent {
        Some((obj, values)) => {
            let gap = if hit_limit || config.mip_gap_target > 0.0 {
                let open = queue
                    .peek()
                    .map(|n| n.bound)
                    .unwrap_or(obj)
                    .min(if best_open_bound.is_finite() {
                        best_open_bound
                    } else {
                        obj
                    });
                // An unexplored root carries no usable bound.
                open.is_finite().then(|| gap_of(obj, open))
            } else {
                Some(0.0)
            };
            let status = if hit_limit {
                SolveStatus::Feasible
            } else {
                SolveStatus::Optimal
            };
            let named: HashMap<String, f64> = model
                .variables
                .iter()
                .zip(&values)
                .map(|(v, &x)| (v.name.clone(), x))
                .collect();
            let objective = if minimize { obj } else { -obj };
            Ok(SolveResult {
                status,
                objective: Some(objective),
                values: named,
                gap,
                wall_time,
                nodes: nodes_explored,
            })
        }
        None => Ok(SolveResult {
            status: if hit_limit {
                SolveStatus::TimeoutNoSolution
            } else {
                SolveStatus::Infeasible
            },
            objective: None,
            values: HashMap::new(),
            gap: None,
            wall_time,
            nodes: nodes_explored,
        }),
    }
}

fn gap_of(incumbent: f64, bound: f64) -> f64 {
    if !bound.is_finite() {
        return f64::INFINITY;
    }
    (bound - incumbent).abs() / f64::max(1e-10, incumbent.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearConstraint, ModelIR, Objective, VariableDef};

    fn knapsack() -> ModelIR {
        // max 4x + 3y s.t. 2x + y <= 3, x and y binary.
        let mut m = ModelIR::new("knapsack");
        let x = m.add_variable(VariableDef::binary("x"));
        let y = m.add_variable(VariableDef::binary("y"));
        m.add_constraint(LinearConstraint {
            name: "c".into(),
            terms: vec![(x, 2.0), (y, 1.0)],
            sense: ConstraintSense::Le,
            rhs: 3.0,
        });
        m.add_objective(Objective {
            name: "profit".into(),
            sense: ObjectiveSense::Max,
            terms: vec![(x, 4.0), (y, 3.0)],
        });
        m
    }

    #[test]
    fn single_integer_variable() {
        // min x s.t. x >= 3, x integer.
        let mut m = ModelIR::new("single");
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
        let r = solve_internal(&m, 0, &SolveConfig::internal()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut m = ModelIR::new("inf");
        let x = m.add_variable(VariableDef::integer("x", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "lo".into(),
            terms: vec![(x, 1.0)],
            sense: ConstraintSense::Ge,
            rhs: 2.0,
        });
        m.add_constraint(LinearConstraint {
            name: "hi".into(),
            terms: vec![(x, 1.0)],
            sense: ConstraintSense::Le,
            rhs: 1.0,
        });
        m.add_objective(Objective {
            name: "obj".into(),
            sense: ObjectiveSense::Min,
            terms: vec![(x, 1.0)],
        });
        let r = solve_internal(&m, 0, &SolveConfig::internal()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn binary_knapsack() {
        let r = solve_internal(&knapsack(), 0, &SolveConfig::internal()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() - 7.0).abs() < 1e-9);
        assert!((r.values["x"] - 1.0).abs() < 1e-6);
        assert!((r.values["y"] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pure_lp_solves_without_branching() {
        let mut m = ModelIR::new("lp");
        let x = m.add_variable(VariableDef::continuous("x", 0.0, f64::INFINITY));
        let y = m.add_variable(VariableDef::continuous("y", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "c".into(),
            terms: vec![(x, 1.0), (y, 2.0)],
            sense: ConstraintSense::Ge,
            rhs: 3.0,
        });
        m.add_objective(Objective {
            name: "obj".into(),
            sense: ObjectiveSense::Min,
            terms: vec![(x, 1.0), (y, 1.0)],
        });
        let r = solve_internal(&m, 0, &SolveConfig::internal()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.nodes, 1);
        assert!((r.objective.unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn warm_start_never_degrades() {
        use crate::model::WarmStart;
        let mut config = SolveConfig::internal();
        config.warm_start = Some(WarmStart::from_values([
            ("x".to_string(), 1.0),
            ("y".to_string(), 1.0),
        ]));
        let r = solve_internal(&knapsack(), 0, &config).unwrap();
        // The warm start is optimal; the result must be at least as good.
        assert!(r.objective.unwrap() >= 7.0 - 1e-9);
    }

    #[test]
    fn integer_guard_is_enforced() {
        let mut config = SolveConfig::internal();
        config.max_int_vars = Some(1);
        let err = solve_internal(&knapsack(), 0, &config).unwrap_err();
        assert!(matches!(err, SolverError::TooManyIntegers { count: 2, guard: 1 }));
    }

    #[test]
    fn unbounded_integer_model() {
        let mut m = ModelIR::new("unb");
        let x = m.add_variable(VariableDef::integer("x", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "c".into(),
            terms: vec![(x, 1.0)],
            sense: ConstraintSense::Ge,
            rhs: 0.0,
        });
        m.add_objective(Objective {
            name: "obj".into(),
            sense: ObjectiveSense::Max,
            terms: vec![(x, 1.0)],
        });
        let r = solve_internal(&m, 0, &SolveConfig::internal()).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded);
    }
}
