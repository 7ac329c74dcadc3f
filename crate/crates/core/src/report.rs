//! Deterministic CSV and JSON emission of sweep artifacts: per-scenario
//! frontiers, the effort summary, the distance table and the simulated
//! violation table. Numbers use shortest round-trip formatting so reruns
//! with identical seeds produce byte-identical files.

use std::fmt::Write as _;

use crate::evaluation::PriceRow;
use crate::moo::{ComparisonReport, ParetoSet};

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// `cost,frequency,gap,status` rows in ascending cost order.
pub fn frontier_csv(set: &ParetoSet) -> String {
    let mut out = String::from("cost,frequency,gap,status\n");
    for p in &set.solutions {
        writeln!(
            out,
            "{},{},{},{}",
            fmt(p.cost),
            fmt(p.frequency),
            fmt_opt(p.gap),
            p.status.as_str()
        )
        .unwrap();
    }
    out
}

/// Per-scenario effort summary: `gamma,rho,avg_gap,solutions`, budget-major.
pub fn effort_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("gamma,rho,avg_gap,solutions\n");
    for row in &report.effort {
        writeln!(
            out,
            "{},{},{},{}",
            fmt(row.gamma_fraction),
            fmt(row.rho),
            fmt_opt(row.avg_gap),
            row.solutions
        )
        .unwrap();
    }
    out
}

/// Representative-solution distances:
/// `comparison,gamma,rho,delta,delta_cost,delta_freq`, one block per
/// comparison kind, budget-major inside each block.
pub fn distance_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("comparison,gamma,rho,delta,delta_cost,delta_freq\n");
    for row in &report.distances {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.comparison.as_str(),
            fmt(row.gamma_fraction),
            fmt(row.rho),
            fmt(row.delta),
            fmt(row.delta_cost),
            fmt(row.delta_freq)
        )
        .unwrap();
    }
    out
}

/// Simulated trade-off table, one row per scenario and representative.
pub fn violations_csv(rows: &[PriceRow]) -> String {
    let mut out = String::from(
        "gamma,rho,representative,robust_cost,robust_frequency,reference_cost,\
         reference_frequency,delta,delta_cost,delta_freq,violation_robust,violation_reference\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt(r.gamma_fraction),
            fmt(r.rho),
            r.representative.as_str(),
            fmt(r.robust_cost),
            fmt(r.robust_frequency),
            fmt(r.reference_cost),
            fmt(r.reference_frequency),
            fmt(r.delta),
            fmt(r.delta_cost),
            fmt(r.delta_freq),
            fmt(r.violation_robust),
            fmt(r.violation_reference)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ScenarioConfig;
    use crate::moo::{ComparisonKind, ComparisonRow, EffortRow};
    use crate::solver::SolveStatus;

    #[test]
    fn frontier_csv_shape() {
        let set = ParetoSet {
            solutions: vec![],
            scenario: ScenarioConfig::deterministic(),
            runs_attempted: 0,
            runs_solved: 0,
            avg_gap: None,
            warnings: vec![],
        };
        assert_eq!(frontier_csv(&set), "cost,frequency,gap,status\n");
    }

    #[test]
    fn distance_csv_orders_rows_as_given() {
        let report = ComparisonReport {
            effort: vec![EffortRow {
                gamma_fraction: 0.05,
                rho: 0.1,
                avg_gap: Some(0.0),
                solutions: 10,
            }],
            distances: vec![ComparisonRow {
                comparison: ComparisonKind::MinCost,
                gamma_fraction: 0.05,
                rho: 0.1,
                delta: 0.2312,
                delta_cost: 0.0369,
                delta_freq: 0.228,
            }],
        };
        let csv = distance_csv(&report);
        assert!(csv.starts_with("comparison,gamma,rho,"));
        assert!(csv.contains("min_cost,0.05,0.1,0.2312,0.0369,0.228"));
        let effort = effort_csv(&report);
        assert!(effort.contains("0.05,0.1,0,10"));
    }

    #[test]
    fn status_column_uses_kebab_names() {
        assert_eq!(SolveStatus::TimeoutNoSolution.as_str(), "timeout-no-solution");
    }
}
