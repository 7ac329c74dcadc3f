//! Monte Carlo stress-testing of fixed designs under sampled waste
//! realizations: the empirical side of the conservatism trade-off.
//!
//! Each sample draws every (generator, fraction) rate independently and
//! uniformly in `[b - rho*b, b + rho*b]`. Draws depend only on
//! (seed, sample index, generator, fraction), so two designs evaluated
//! under the same seed see identical realizations (common random numbers)
//! and the result is reproducible under any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::Solution;
use crate::instance::Instance;
use crate::moo::{compromise, compare, compare_objectives, ComparisonKind, MooError, ParetoSet};

/// Monte Carlo configuration. Sampling is independent uniform per
/// (generator, fraction).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Relative half-width of the sampling interval.
    pub rho: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            seed: 0,
            rho: 0.1,
        }
    }
}

/// Violation statistics of one design over the sampled realizations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationReport {
    /// Fraction of samples in which at least one capacity row overflowed.
    pub violation_probability: f64,
    /// Per-(point, fraction) violation rates, only rows that can bind
    /// (open points).
    pub per_row: Vec<RowRate>,
    /// Largest observed overflow in cubic meters.
    pub worst_overflow: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowRate {
    pub point: usize,
    pub fraction: usize,
    pub rate: f64,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("frontier is empty")]
    EmptyFrontier,
    #[error(transparent)]
    Moo(#[from] MooError),
}

/// Simulates capacity feasibility of a fixed design under `mc.n_samples`
/// sampled realizations.
pub fn simulate(
    solution: &Solution,
    instance: &Instance,
    mc: &McConfig,
) -> Result<ViolationReport, EvalError> {
    if mc.n_samples == 0 {
        return Err(EvalError::NoSamples);
    }
    let np = instance.points.len();
    let nm = instance.fractions.len();

    // Static per-row data: assigned generators, accumulation days,
    // installed capacity.
    struct Row {
        point: usize,
        fraction: usize,
        generators: Vec<usize>,
        acc: f64,
        capacity: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for &i in &solution.open {
        for m in 0..nm {
            let generators: Vec<usize> = solution
                .assignment
                .iter()
                .enumerate()
                .filter(|&(_, &t)| t == i)
                .map(|(j, _)| j)
                .collect();
            rows.push(Row {
                point: i,
                fraction: m,
                generators,
                acc: solution.accumulation_days(i, m).unwrap_or(0) as f64,
                capacity: solution.capacity(i, m, instance),
            });
        }
    }

    let mut violations = vec![0usize; rows.len()];
    let mut any_violation = 0usize;
    let mut worst_overflow = 0.0_f64;
    let mut rates = vec![0.0_f64; np * nm];

    for sample in 0..mc.n_samples {
        // One substream per sample index; draw order is fixed over
        // (generator, fraction), so realizations are design-independent.
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        rng.set_stream(sample as u64);
        for j in 0..np {
            for m in 0..nm {
                let nominal = instance.waste_rate(j, m);
                let half = mc.rho * nominal;
                rates[j * nm + m] = if half > 0.0 {
                    rng.gen_range(nominal - half..=nominal + half)
                } else {
                    // Keep the stream aligned across rho values.
                    let _: f64 = rng.gen();
                    nominal
                };
            }
        }

        let mut violated_here = false;
        for (r, row) in rows.iter().enumerate() {
            let load: f64 = row
                .generators
                .iter()
                .map(|&j| rates[j * nm + row.fraction] * row.acc)
                .sum();
            let overflow = load - row.capacity;
            if overflow > 0.0 {
                violations[r] += 1;
                violated_here = true;
                worst_overflow = worst_overflow.max(overflow);
            }
        }
        if violated_here {
            any_violation += 1;
        }
    }

    Ok(ViolationReport {
        violation_probability: any_violation as f64 / mc.n_samples as f64,
        per_row: rows
            .iter()
            .zip(&violations)
            .map(|(row, &count)| RowRate {
                point: row.point,
                fraction: row.fraction,
                rate: count as f64 / mc.n_samples as f64,
            })
            .collect(),
        worst_overflow,
        n_samples: mc.n_samples,
    })
}

/// One row of the conservatism trade-off table: objective deterioration of
/// a representative robust design next to the simulated violation rates of
/// both designs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceRow {
    pub gamma_fraction: f64,
    pub rho: f64,
    pub representative: ComparisonKind,
    pub robust_cost: f64,
    pub robust_frequency: f64,
    pub reference_cost: f64,
    pub reference_frequency: f64,
    pub delta: f64,
    pub delta_cost: f64,
    pub delta_freq: f64,
    pub violation_robust: f64,
    pub violation_reference: f64,
}

/// Builds the trade-off table for matched representative solutions
/// (min-cost, max-frequency, compromise) of each scenario frontier,
/// simulating every design under common random numbers at the scenario's
/// uncertainty level.
pub fn price_of_robustness(
    det: &ParetoSet,
    robust_by_scenario: &[ParetoSet],
    instance: &Instance,
    mc: &McConfig,
) -> Result<Vec<PriceRow>, EvalError> {
    let det_min = det.min_cost().ok_or(EvalError::EmptyFrontier)?;
    let det_max = det.max_frequency().ok_or(EvalError::EmptyFrontier)?;
    let det_ideal = det.ideal().ok_or(EvalError::EmptyFrontier)?;
    let det_compromise = compromise(det, det_ideal)?;

    let mut out = Vec::new();
    for set in robust_by_scenario {
        let scenario = &set.scenario;
        let mc_here = McConfig {
            rho: scenario.rho,
            ..*mc
        };
        let pairs = [
            (ComparisonKind::MinCost, set.min_cost(), det_min),
            (ComparisonKind::MaxFrequency, set.max_frequency(), det_max),
            (
                ComparisonKind::CompromiseVsIdeal,
                compromise(set, det_ideal).ok(),
                det_compromise,
            ),
        ];
        for (kind, robust_point, det_point) in pairs {
            let Some(robust_point) = robust_point else {
                continue;
            };
            let distances = match kind {
                ComparisonKind::CompromiseVsIdeal => compare_objectives(
                    (robust_point.cost, robust_point.frequency),
                    det_ideal,
                )?,
                _ => compare(&robust_point.solution, &det_point.solution)?,
            };
            let robust_sim = simulate(&robust_point.solution, instance, &mc_here)?;
            let det_sim = simulate(&det_point.solution, instance, &mc_here)?;
            out.push(PriceRow {
                gamma_fraction: scenario.gamma_fraction,
                rho: scenario.rho,
                representative: kind,
                robust_cost: robust_point.cost,
                robust_frequency: robust_point.frequency,
                reference_cost: det_point.cost,
                reference_frequency: det_point.frequency,
                delta: distances.delta.abs(),
                delta_cost: distances.delta_cost.abs(),
                delta_freq: distances.delta_freq.abs(),
                violation_robust: robust_sim.violation_probability,
                violation_reference: det_sim.violation_probability,
            });
        }
    }
    Ok(out)
}
