//! Dense two-phase tableau simplex for the internal backend.
//!
//! A preprocessing pass substitutes fixed variables, folds singleton rows
//! into bounds and drops rows that can never bind under the current
//! bounds, which keeps node relaxations small as branching fixes binaries.
//! Entering columns follow Dantzig's rule, switching to Bland's rule after
//! `10 * (rows + cols)` iterations to guarantee termination.

use crate::model::ConstraintSense;
use thiserror::Error;

const EPS_PIVOT: f64 = 1e-8;
const EPS_COST: f64 = 1e-7;
const EPS_FEAS: f64 = 1e-7;
const EPS_BOUND: f64 = 1e-9;
/// Entries below this magnitude are treated as accumulated noise during
/// periodic sweeps.
const EPS_NOISE: f64 = 1e-11;

/// A linear program in terms of the owning model's variable indices.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub n_vars: usize,
    /// Minimized cost vector, dense over variables.
    pub costs: Vec<f64>,
    /// Effective (lower, upper) bounds per variable.
    pub bounds: Vec<(f64, f64)>,
    /// Integrality markers; preprocessing rounds tightened bounds of
    /// integral variables inward.
    pub integral: Vec<bool>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Minimized objective value; meaningful only when optimal.
    pub objective: f64,
    /// One value per problem variable; meaningful only when optimal.
    pub values: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("simplex iteration limit reached after {0} pivots")]
    IterationLimit(usize),
}

/// How each original variable is represented in the tableau.
#[derive(Debug, Clone, Copy)]
enum VarState {
    /// Pinned by equal bounds; no column.
    Fixed(f64),
    /// `x = lb + column`.
    Shifted { col: usize, lb: f64 },
    /// `x = ub - column` (no finite lower bound).
    Mirrored { col: usize, ub: f64 },
    /// `x = pos - neg` (free variable).
    Split { pos: usize, neg: usize },
}

struct Prepared {
    states: Vec<VarState>,
    n_cols: usize,
    /// Cost per tableau column.
    col_costs: Vec<f64>,
    /// Finite upper bound per tableau column, if any.
    col_uppers: Vec<Option<f64>>,
    rows: Vec<(Vec<(usize, f64)>, ConstraintSense, f64)>,
    infeasible: bool,
}

/// Inward rounding of tightened bounds for integral variables.
fn round_ub(v: f64, integral: bool) -> f64 {
    if integral && v.is_finite() {
        (v + EPS_FEAS).floor()
    } else {
        v
    }
}

fn round_lb(v: f64, integral: bool) -> f64 {
    if integral && v.is_finite() {
        (v - EPS_FEAS).ceil()
    } else {
        v
    }
}

/// Substitute fixed variables, fold singleton rows into bounds, propagate
/// interval activity through every row and discard rows that cannot bind.
/// Iterates because each reduction can enable the others.
fn preprocess(lp: &DenseLp) -> Result<Prepared, LpError> {
    let n = lp.n_vars;
    let mut lower: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();
    let mut upper: Vec<f64> = lp.bounds.iter().map(|b| b.1).collect();
    let mut active: Vec<bool> = vec![true; lp.rows.len()];

    let mut infeasible = (0..n).any(|j| lower[j] > upper[j] + EPS_BOUND);

    let mut changed = true;
    let mut passes = 0;
    // Scratch for per-term interval contributions.
    let mut contribs: Vec<(f64, f64)> = Vec::new();
    while changed && !infeasible && passes < 64 {
        changed = false;
        passes += 1;
        for (r, row) in lp.rows.iter().enumerate() {
            if !active[r] {
                continue;
            }
            // Live terms and the constant folded out of fixed variables.
            let mut constant = 0.0;
            let mut live: Vec<(usize, f64)> = Vec::new();
            for &(j, a) in &row.terms {
                if a == 0.0 {
                    continue;
                }
                if upper[j] - lower[j] <= EPS_BOUND {
                    constant += a * lower[j];
                } else {
                    live.push((j, a));
                }
            }
            let rhs = row.rhs - constant;

            if live.is_empty() {
                let ok = match row.sense {
                    ConstraintSense::Le => 0.0 <= rhs + EPS_FEAS,
                    ConstraintSense::Ge => 0.0 >= rhs - EPS_FEAS,
                    ConstraintSense::Eq => rhs.abs() <= EPS_FEAS,
                };
                if ok {
                    active[r] = false;
                    changed = true;
                } else {
                    infeasible = true;
                    break;
                }
                continue;
            }

            if live.len() == 1 {
                let (j, a) = live[0];
                let bound = rhs / a;
                let integral = lp.integral[j];
                let le_like = matches!(
                    (row.sense, a > 0.0),
                    (ConstraintSense::Le, true) | (ConstraintSense::Ge, false)
                );
                if le_like || row.sense == ConstraintSense::Eq {
                    let ub = round_ub(bound, integral);
                    if ub < upper[j] - EPS_BOUND {
                        upper[j] = ub;
                        changed = true;
                    }
                }
                if !le_like || row.sense == ConstraintSense::Eq {
                    let lb = round_lb(bound, integral);
                    if lb > lower[j] + EPS_BOUND {
                        lower[j] = lb;
                        changed = true;
                    }
                }
                if lower[j] > upper[j] + EPS_BOUND {
                    infeasible = true;
                    break;
                }
                active[r] = false;
                continue;
            }

            // Interval activity: `contribs[t]` holds the (min, max)
            // contribution of term t; infinite parts are counted so that
            // "sum of the others" stays well-defined.
            contribs.clear();
            let (mut lo_sum, mut hi_sum) = (0.0_f64, 0.0_f64);
            let (mut lo_inf, mut hi_inf) = (0usize, 0usize);
            for &(j, a) in &live {
                let (l, u) = (lower[j], upper[j]);
                let (lo_c, hi_c) = if a > 0.0 { (a * l, a * u) } else { (a * u, a * l) };
                if lo_c == f64::NEG_INFINITY {
                    lo_inf += 1;
                } else {
                    lo_sum += lo_c;
                }
                if hi_c == f64::INFINITY {
                    hi_inf += 1;
                } else {
                    hi_sum += hi_c;
                }
                contribs.push((lo_c, hi_c));
            }
            let lo_total = if lo_inf > 0 { f64::NEG_INFINITY } else { lo_sum };
            let hi_total = if hi_inf > 0 { f64::INFINITY } else { hi_sum };

            let le_side = row.sense != ConstraintSense::Ge;
            let ge_side = row.sense != ConstraintSense::Le;
            if le_side && lo_total > rhs + EPS_FEAS {
                infeasible = true;
                break;
            }
            if ge_side && hi_total < rhs - EPS_FEAS {
                infeasible = true;
                break;
            }
            let le_slack = hi_total <= rhs + EPS_BOUND;
            let ge_slack = lo_total >= rhs - EPS_BOUND;
            if (le_slack || !le_side) && (ge_slack || !ge_side) {
                active[r] = false;
                changed = true;
                continue;
            }

            // Coefficient-wise propagation: each variable is bounded by
            // what the row leaves over when every other term sits at its
            // extreme.
            for (t, &(j, a)) in live.iter().enumerate() {
                let integral = lp.integral[j];
                if le_side {
                    let lo_others = if lo_inf == 0 {
                        lo_sum - contribs[t].0
                    } else if lo_inf == 1 && contribs[t].0 == f64::NEG_INFINITY {
                        lo_sum
                    } else {
                        f64::NEG_INFINITY
                    };
                    if lo_others.is_finite() {
                        let cand = (rhs - lo_others) / a;
                        if a > 0.0 {
                            let ub = round_ub(cand, integral);
                            if ub < upper[j] - 1e-7 {
                                upper[j] = ub;
                                changed = true;
                            }
                        } else {
                            let lb = round_lb(cand, integral);
                            if lb > lower[j] + 1e-7 {
                                lower[j] = lb;
                                changed = true;
                            }
                        }
                    }
                }
                if ge_side {
                    let hi_others = if hi_inf == 0 {
                        hi_sum - contribs[t].1
                    } else if hi_inf == 1 && contribs[t].1 == f64::INFINITY {
                        hi_sum
                    } else {
                        f64::INFINITY
                    };
                    if hi_others.is_finite() {
                        let cand = (rhs - hi_others) / a;
                        if a > 0.0 {
                            let lb = round_lb(cand, integral);
                            if lb > lower[j] + 1e-7 {
                                lower[j] = lb;
                                changed = true;
                            }
                        } else {
                            let ub = round_ub(cand, integral);
                            if ub < upper[j] - 1e-7 {
                                upper[j] = ub;
                                changed = true;
                            }
                        }
                    }
                }
                if lower[j] > upper[j] + EPS_BOUND {
                    infeasible = true;
                    break;
                }
            }
            if infeasible {
                break;
            }
        }
    }

    if infeasible {
        return Ok(Prepared {
            states: Vec::new(),
            n_cols: 0,
            col_costs: Vec::new(),
            col_uppers: Vec::new(),
            rows: Vec::new(),
            infeasible: true,
        });
    }

    // Column assignment for the surviving variables.
    let mut states = Vec::with_capacity(n);
    let mut col_costs = Vec::new();
    let mut col_uppers = Vec::new();
    for j in 0..n {
        let (l, u) = (lower[j], upper[j]);
        let c = lp.costs[j];
        if u - l <= EPS_BOUND {
            states.push(VarState::Fixed(l));
        } else if l.is_finite() {
            let col = col_costs.len();
            col_costs.push(c);
            col_uppers.push(u.is_finite().then_some(u - l));
            states.push(VarState::Shifted { col, lb: l });
        } else if u.is_finite() {
            let col = col_costs.len();
            col_costs.push(-c);
            col_uppers.push(None);
            states.push(VarState::Mirrored { col, ub: u });
        } else {
            let pos = col_costs.len();
            col_costs.push(c);
            col_uppers.push(None);
            let neg = col_costs.len();
            col_costs.push(-c);
            col_uppers.push(None);
            states.push(VarState::Split { pos, neg });
        }
    }

    // Rewrite surviving rows in column space.
    let mut rows = Vec::new();
    for (r, row) in lp.rows.iter().enumerate() {
        if !active[r] {
            continue;
        }
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(row.terms.len());
        let mut rhs = row.rhs;
        for &(j, a) in &row.terms {
            if a == 0.0 {
                continue;
            }
            match states[j] {
                VarState::Fixed(v) => rhs -= a * v,
                VarState::Shifted { col, lb } => {
                    rhs -= a * lb;
                    terms.push((col, a));
                }
                VarState::Mirrored { col, ub } => {
                    rhs -= a * ub;
                    terms.push((col, -a));
                }
                VarState::Split { pos, neg } => {
                    terms.push((pos, a));
                    terms.push((neg, -a));
                }
            }
        }
        rows.push((terms, row.sense, rhs));
    }

    Ok(Prepared {
        states,
        n_cols: col_costs.len(),
        col_costs,
        col_uppers,
        rows,
        infeasible: false,
    })
}

/// Solves `min costs . x` over the rows and bounds of `lp`.
pub fn solve_dense_lp(lp: &DenseLp) -> Result<LpSolution, LpError> {
    let prep = preprocess(lp)?;
    if prep.infeasible {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            values: Vec::new(),
        });
    }

    // Structural rows plus one upper-bound row per bounded column.
    let n_struct = prep.n_cols;
    let mut all_rows = prep.rows.clone();
    for (col, ub) in prep.col_uppers.iter().enumerate() {
        if let Some(u) = ub {
            all_rows.push((vec![(col, 1.0)], ConstraintSense::Le, *u));
        }
    }

    let m = all_rows.len();
    // Column layout: structural | slack/surplus | artificial | rhs.
    let mut n_slack = 0;
    let mut n_art = 0;
    for (_, sense, rhs) in &all_rows {
        let flipped = *rhs < 0.0;
        let sense = effective_sense(*sense, flipped);
        match sense {
            ConstraintSense::Le => n_slack += 1,
            ConstraintSense::Ge => {
                n_slack += 1;
                n_art += 1;
            }
            ConstraintSense::Eq => n_art += 1,
        }
    }
    let n_total = n_struct + n_slack + n_art;
    let width = n_total + 1;
    let rhs_col = n_total;

    let mut tableau = vec![0.0_f64; m * width];
    let mut basis = vec![usize::MAX; m];
    let mut is_artificial = vec![false; n_total];

    let mut slack_cursor = n_struct;
    let mut art_cursor = n_struct + n_slack;
    for (i, (terms, sense, rhs)) in all_rows.iter().enumerate() {
        let flipped = *rhs < 0.0;
        let sign = if flipped { -1.0 } else { 1.0 };
        let row = &mut tableau[i * width..(i + 1) * width];
        for &(col, a) in terms {
            row[col] += sign * a;
        }
        row[rhs_col] = sign * rhs;
        match effective_sense(*sense, flipped) {
            ConstraintSense::Le => {
                row[slack_cursor] = 1.0;
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            ConstraintSense::Ge => {
                row[slack_cursor] = -1.0;
                slack_cursor += 1;
                row[art_cursor] = 1.0;
                is_artificial[art_cursor] = true;
                basis[i] = art_cursor;
                art_cursor += 1;
            }
            ConstraintSense::Eq => {
                row[art_cursor] = 1.0;
                is_artificial[art_cursor] = true;
                basis[i] = art_cursor;
                art_cursor += 1;
            }
        }
    }

    // z-rows hold `c_B B^-1 A_j - c_j`; an entry > 0 improves the objective.
    let mut z1 = vec![0.0_f64; width];
    let mut z2 = vec![0.0_f64; width];
    for i in 0..m {
        if is_artificial[basis[i]] {
            let row = &tableau[i * width..(i + 1) * width];
            for j in 0..width {
                z1[j] += row[j];
            }
        }
    }
    for j in 0..n_total {
        if is_artificial[j] {
            z1[j] = 0.0;
        }
    }
    for (col, &c) in prep.col_costs.iter().enumerate() {
        z2[col] = -c;
    }

    let bland_after = 10 * (m + n_total);
    let hard_limit = 1000 * (m + n_total) + 100_000;
    let mut iterations = 0usize;

    let mut phase_one = n_art > 0;
    let mut banned = vec![false; n_total];

    loop {
        // Periodic sweep: flush accumulated rounding noise so degenerate
        // vertices do not feed the ratio test with phantom residues.
        if iterations > 0 && iterations % 256 == 0 {
            for v in tableau.iter_mut() {
                if v.abs() < EPS_NOISE {
                    *v = 0.0;
                }
            }
        }

        let bland = iterations >= bland_after;
        let z = if phase_one { &z1 } else { &z2 };
        let entering = if bland {
            (0..n_total).find(|&j| !banned[j] && z[j] > EPS_COST)
        } else {
            // Dantzig: most positive z entry.
            let mut best = EPS_COST;
            let mut pick = None;
            for j in 0..n_total {
                if banned[j] {
                    continue;
                }
                if z[j] > best {
                    best = z[j];
                    pick = Some(j);
                }
            }
            pick
        };

        let Some(col) = entering else {
            if phase_one {
                if z1[rhs_col] > EPS_FEAS {
                    return Ok(LpSolution {
                        status: LpStatus::Infeasible,
                        objective: f64::INFINITY,
                        values: Vec::new(),
                    });
                }
                // Ban artificials and neutralize rows where one remains
                // basic at level zero.
                for j in 0..n_total {
                    if is_artificial[j] {
                        banned[j] = true;
                    }
                }
                for i in 0..m {
                    if !is_artificial[basis[i]] {
                        continue;
                    }
                    let pivot_col = {
                        let row = &tableau[i * width..(i + 1) * width];
                        // A generous threshold: pivoting on a near-zero
                        // element here only trades one redundancy for
                        // numerical noise.
                        (0..n_total).find(|&j| !banned[j] && row[j].abs() > 1e-7)
                    };
                    match pivot_col {
                        Some(j) => {
                            pivot(&mut tableau, &mut z1, &mut z2, width, i, j);
                            basis[i] = j;
                        }
                        None => {
                            // Redundant row; blank it out so it never
                            // participates again.
                            for v in &mut tableau[i * width..(i + 1) * width] {
                                *v = 0.0;
                            }
                        }
                    }
                }
                phase_one = false;
                continue;
            }
            break;
        };

        // Two-pass ratio test on the clamped rhs: tiny negative entries are
        // rounding noise and count as zero (degenerate pivot).
        let mut min_ratio = f64::INFINITY;
        for i in 0..m {
            let a = tableau[i * width + col];
            if a > EPS_PIVOT {
                let ratio = tableau[i * width + rhs_col].max(0.0) / a;
                if ratio < min_ratio {
                    min_ratio = ratio;
                }
            }
        }
        let mut leave: Option<usize> = None;
        if min_ratio.is_finite() {
            // Among near-tied rows pick the numerically stabler pivot, or
            // the smallest basic index once Bland's rule is active.
            for i in 0..m {
                let a = tableau[i * width + col];
                if a > EPS_PIVOT {
                    let ratio = tableau[i * width + rhs_col].max(0.0) / a;
                    if ratio <= min_ratio + 1e-9 {
                        let better = match leave {
                            None => true,
                            Some(li) => {
                                if bland {
                                    basis[i] < basis[li]
                                } else {
                                    a > tableau[li * width + col]
                                }
                            }
                        };
                        if better {
                            leave = Some(i);
                        }
                    }
                }
            }
        }
        let Some(row) = leave else {
            if phase_one {
                // The phase-1 objective is bounded below by zero, so an
                // unbounded ray here is numerical noise.
                return Err(LpError::IterationLimit(iterations));
            }
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: f64::NEG_INFINITY,
                values: Vec::new(),
            });
        };

        pivot(&mut tableau, &mut z1, &mut z2, width, row, col);
        basis[row] = col;

        iterations += 1;
        if iterations >= hard_limit {
            return Err(LpError::IterationLimit(iterations));
        }
    }

    // Column values, then map back to problem variables.
    let mut col_values = vec![0.0_f64; n_struct];
    for i in 0..m {
        let b = basis[i];
        if b < n_struct {
            col_values[b] = tableau[i * width + rhs_col];
        }
    }
    let mut values = vec![0.0_f64; lp.n_vars];
    for (j, state) in prep.states.iter().enumerate() {
        values[j] = match *state {
            VarState::Fixed(v) => v,
            VarState::Shifted { col, lb } => lb + col_values[col],
            VarState::Mirrored { col, ub } => ub - col_values[col],
            VarState::Split { pos, neg } => col_values[pos] - col_values[neg],
        };
    }
    let objective = lp
        .costs
        .iter()
        .zip(&values)
        .map(|(c, v)| c * v)
        .sum::<f64>();

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        values,
    })
}

fn effective_sense(sense: ConstraintSense, flipped: bool) -> ConstraintSense {
    if !flipped {
        return sense;
    }
    match sense {
        ConstraintSense::Le => ConstraintSense::Ge,
        ConstraintSense::Ge => ConstraintSense::Le,
        ConstraintSense::Eq => ConstraintSense::Eq,
    }
}

fn pivot(
    tableau: &mut [f64],
    z1: &mut [f64],
    z2: &mut [f64],
    width: usize,
    row: usize,
    col: usize,
) {
    let pivot_value = tableau[row * width + col];
    let inv = 1.0 / pivot_value;
    for v in &mut tableau[row * width..(row + 1) * width] {
        *v *= inv;
    }
    // Split the tableau around the pivot row to update the others in place.
    let (before, rest) = tableau.split_at_mut(row * width);
    let (pivot_row, after) = rest.split_at_mut(width);
    for chunk in before
        .chunks_exact_mut(width)
        .chain(after.chunks_exact_mut(width))
    {
        let factor = chunk[col];
        if factor != 0.0 {
            for (t, p) in chunk.iter_mut().zip(pivot_row.iter()) {
                *t -= factor * p;
            }
        }
    }
    for z in [z1, z2] {
        let factor = z[col];
        if factor != 0.0 {
            for (t, p) in z.iter_mut().zip(pivot_row.iter()) {
                *t -= factor * p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        n: usize,
        costs: Vec<f64>,
        bounds: Vec<(f64, f64)>,
        rows: Vec<(Vec<(usize, f64)>, ConstraintSense, f64)>,
    ) -> DenseLp {
        DenseLp {
            n_vars: n,
            costs,
            bounds,
            integral: vec![false; n],
            rows: rows
                .into_iter()
                .map(|(terms, sense, rhs)| LpRow { terms, sense, rhs })
                .collect(),
        }
    }

    #[test]
    fn one_variable_lower_bound() {
        // min x s.t. x >= 3
        let p = lp(
            1,
            vec![1.0],
            vec![(0.0, f64::INFINITY)],
            vec![(vec![(0, 1.0)], ConstraintSense::Ge, 3.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.values[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn textbook_two_variable() {
        // min x + y s.t. x + 2y >= 3, x, y >= 0 -> (0, 1.5), objective 1.5
        let p = lp(
            2,
            vec![1.0, 1.0],
            vec![(0.0, f64::INFINITY); 2],
            vec![(vec![(0, 1.0), (1, 2.0)], ConstraintSense::Ge, 3.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x >= 2 and x <= 1
        let p = lp(
            1,
            vec![0.0],
            vec![(0.0, f64::INFINITY)],
            vec![
                (vec![(0, 1.0)], ConstraintSense::Ge, 2.0),
                (vec![(0, 1.0)], ConstraintSense::Le, 1.0),
            ],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        // min -x, x >= 0, no other rows
        let p = lp(1, vec![-1.0], vec![(0.0, f64::INFINITY)], vec![]);
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn maximization_via_negated_costs() {
        // max 4x + 3y s.t. 2x + y <= 3, binaries relaxed to [0, 1]
        let p = lp(
            2,
            vec![-4.0, -3.0],
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![(vec![(0, 2.0), (1, 1.0)], ConstraintSense::Le, 3.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 7.0).abs() < 1e-9, "objective {}", s.objective);
        assert!((s.values[0] - 1.0).abs() < 1e-9);
        assert!((s.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_degeneracy() {
        // min x + y + z s.t. x + y = 1, y + z = 1, x + z = 1; symmetric
        // optimum at (0.5, 0.5, 0.5), objective 1.5.
        let p = lp(
            3,
            vec![1.0, 1.0, 1.0],
            vec![(0.0, f64::INFINITY); 3],
            vec![
                (vec![(0, 1.0), (1, 1.0)], ConstraintSense::Eq, 1.0),
                (vec![(1, 1.0), (2, 1.0)], ConstraintSense::Eq, 1.0),
                (vec![(0, 1.0), (2, 1.0)], ConstraintSense::Eq, 1.0),
            ],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_survive_phase_one() {
        // Same row three times; redundancy must not break the basis.
        let p = lp(
            2,
            vec![1.0, 2.0],
            vec![(0.0, f64::INFINITY); 2],
            vec![
                (vec![(0, 1.0), (1, 1.0)], ConstraintSense::Eq, 2.0),
                (vec![(0, 1.0), (1, 1.0)], ConstraintSense::Eq, 2.0),
                (vec![(0, 2.0), (1, 2.0)], ConstraintSense::Eq, 4.0),
            ],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_rows() {
        // min x - y with -x - y >= -4, x, y in [0, 3]: optimum x=0, y=3.
        let p = lp(
            2,
            vec![1.0, -1.0],
            vec![(0.0, 3.0), (0.0, 3.0)],
            vec![(vec![(0, -1.0), (1, -1.0)], ConstraintSense::Ge, -4.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn free_variable_split() {
        // min x with x free and x >= -5 as a row.
        let p = lp(
            1,
            vec![1.0],
            vec![(f64::NEG_INFINITY, f64::INFINITY)],
            vec![(vec![(0, 1.0)], ConstraintSense::Ge, -5.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[0] + 5.0).abs() < 1e-9, "values {:?}", s.values);
    }

    #[test]
    fn fixed_variables_substituted() {
        // x fixed at 2 by bounds; min y s.t. y >= x.
        let p = lp(
            2,
            vec![0.0, 1.0],
            vec![(2.0, 2.0), (0.0, f64::INFINITY)],
            vec![(vec![(1, 1.0), (0, -1.0)], ConstraintSense::Ge, 0.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.values[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn interval_preprocessing_detects_infeasible_row() {
        // x + y >= 5 with x, y in [0, 1].
        let p = lp(
            2,
            vec![1.0, 1.0],
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![(vec![(0, 1.0), (1, 1.0)], ConstraintSense::Ge, 5.0)],
        );
        let s = solve_dense_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }
}
