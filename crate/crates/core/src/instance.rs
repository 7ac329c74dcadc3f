//! Problem instance data model: generation points, waste fractions, bin
//! catalog, collection frequencies, distances and siting limits.
//!
//! Instances are immutable after construction and safe to share across
//! concurrent workers. Persistence is a versioned JSON document.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current instance file schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// A bin model from the catalog: footprint, volume and installation cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinType {
    pub id: String,
    /// Occupied area in square meters.
    pub area: f64,
    /// Storage volume in cubic meters.
    pub capacity: f64,
    /// Installation cost per bin (maintenance and prorated installment
    /// included).
    pub unit_cost: f64,
}

/// A collection frequency profile: maximum days between consecutive visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub id: String,
    pub accumulation_days: u32,
}

/// An aggregated waste generator (a city block) that is also a candidate
/// collection point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationPoint {
    pub id: String,
    /// Planar coordinates in meters, kept for export only.
    pub coordinates: [f64; 2],
    /// Daily waste volume per fraction, cubic meters.
    pub waste_rate: BTreeMap<String, f64>,
    /// Cost of conditioning the point as a collection point.
    pub opening_cost: f64,
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub points: Vec<GenerationPoint>,
    pub fractions: Vec<String>,
    pub bin_types: Vec<BinType>,
    pub frequencies: Vec<FrequencyProfile>,
    /// Walking distance matrix in meters; `distance[i][j]` is the distance
    /// from generator `i` to candidate point `j`.
    pub distance: Vec<Vec<f64>>,
    /// Maximum allowable walking distance from a generator to its assigned
    /// collection point.
    pub max_distance: f64,
    /// Available area for installing bins at any point, square meters.
    pub max_area: f64,
    pub schema_version: u32,
}

/// A named validation violation; validation returns all of them instead of
/// failing on the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("failed to read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse `{path}`: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("`{path}` has schema version {found}, expected {expected}")]
    SchemaVersion {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("instance is invalid: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.0.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Instance {
    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_fractions(&self) -> usize {
        self.fractions.len()
    }

    /// Nominal waste rate of point `i` for fraction index `m`; absent map
    /// entries count as zero.
    pub fn waste_rate(&self, i: usize, m: usize) -> f64 {
        self.points[i]
            .waste_rate
            .get(&self.fractions[m])
            .copied()
            .unwrap_or(0.0)
    }

    /// Checks every instance invariant and returns the list of violations,
    /// empty iff the instance is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.points.len();

        if self.schema_version != SCHEMA_VERSION {
            out.push(Violation(format!(
                "schema_version is {}, expected {}",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        if n == 0 {
            out.push(Violation("instance has no generation points".into()));
        }
        if self.fractions.is_empty() {
            out.push(Violation("instance has no waste fractions".into()));
        }
        if self.bin_types.is_empty() {
            out.push(Violation("instance has no bin types".into()));
        }
        if self.frequencies.is_empty() {
            out.push(Violation("instance has no frequency profiles".into()));
        }

        let mut ids = HashSet::new();
        for p in &self.points {
            if !ids.insert(p.id.as_str()) {
                out.push(Violation(format!("duplicate point id `{}`", p.id)));
            }
            if p.opening_cost < 0.0 {
                out.push(Violation(format!(
                    "point `{}` has negative opening_cost {}",
                    p.id, p.opening_cost
                )));
            }
            for (fraction, &rate) in &p.waste_rate {
                if rate < 0.0 {
                    out.push(Violation(format!(
                        "point `{}` has negative waste_rate[{fraction}] = {rate}",
                        p.id
                    )));
                }
                if !self.fractions.contains(fraction) {
                    out.push(Violation(format!(
                        "point `{}` rates unknown fraction `{fraction}`",
                        p.id
                    )));
                }
            }
        }

        for b in &self.bin_types {
            if b.area <= 0.0 || b.capacity <= 0.0 || b.unit_cost <= 0.0 {
                out.push(Violation(format!(
                    "bin type `{}` must have positive area, capacity and unit_cost",
                    b.id
                )));
            }
        }

        let mut acc_days = HashSet::new();
        for f in &self.frequencies {
            if f.accumulation_days < 1 {
                out.push(Violation(format!(
                    "frequency `{}` has accumulation_days {} < 1",
                    f.id, f.accumulation_days
                )));
            }
            if !acc_days.insert(f.accumulation_days) {
                out.push(Violation(format!(
                    "frequency `{}` duplicates accumulation_days {}",
                    f.id, f.accumulation_days
                )));
            }
        }

        if self.distance.len() != n {
            out.push(Violation(format!(
                "distance matrix has {} rows, expected {}",
                self.distance.len(),
                n
            )));
        } else {
            for (i, row) in self.distance.iter().enumerate() {
                if row.len() != n {
                    out.push(Violation(format!(
                        "distance row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                    continue;
                }
                for (j, &d) in row.iter().enumerate() {
                    if d < 0.0 {
                        out.push(Violation(format!("distance[{i}][{j}] = {d} is negative")));
                    }
                }
                if row[i] != 0.0 {
                    out.push(Violation(format!(
                        "distance[{i}][{i}] = {} but the diagonal must be zero",
                        row[i]
                    )));
                }
            }
            // Every generator needs at least one reachable candidate point,
            // otherwise the assignment constraints are infeasible by
            // construction.
            for i in 0..n {
                if !(0..n).any(|j| self.distance[i][j] <= self.max_distance) {
                    out.push(Violation(format!(
                        "point {i} (`{}`) has no candidate within max_distance {}",
                        self.points[i].id, self.max_distance
                    )));
                }
            }
        }

        if self.max_distance < 0.0 {
            out.push(Violation(format!(
                "max_distance {} is negative",
                self.max_distance
            )));
        }
        let min_bin_area = self
            .bin_types
            .iter()
            .map(|b| b.area)
            .fold(f64::INFINITY, f64::min);
        if self.max_area < min_bin_area {
            out.push(Violation(format!(
                "max_area {} is smaller than the smallest bin footprint {min_bin_area}",
                self.max_area
            )));
        }

        out
    }

    /// For each pair (point `i`, fraction `m`), the ordered set of
    /// generators `j` whose waste can reach `i`: those with
    /// `distance[j][i] <= max_distance`. Membership depends only on the
    /// distances, so the sets coincide across fractions; they are kept
    /// per-(i, m) because the uncertainty budget is indexed that way.
    pub fn neighbor_sets(&self) -> NeighborSets {
        let n = self.points.len();
        let per_point: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| self.distance[j][i] <= self.max_distance)
                    .collect()
            })
            .collect();
        NeighborSets {
            per_point,
            n_fractions: self.fractions.len(),
        }
    }

    /// Loads and validates an instance file.
    pub fn load(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
        let path = path.as_ref();
        let display = path.display().to_string();
        let raw = fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: display.clone(),
            source,
        })?;
        let instance: Instance =
            serde_json::from_str(&raw).map_err(|source| InstanceError::Parse {
                path: display.clone(),
                source,
            })?;
        if instance.schema_version != SCHEMA_VERSION {
            return Err(InstanceError::SchemaVersion {
                path: display,
                found: instance.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let violations = instance.validate();
        if !violations.is_empty() {
            return Err(InstanceError::Invalid(violations));
        }
        Ok(instance)
    }

    /// Writes the instance as pretty-printed JSON. Field order is fixed, so
    /// identical instances serialize to identical bytes.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InstanceError> {
        let path = path.as_ref();
        let body = serde_json::to_string_pretty(self).expect("instance serialization");
        fs::write(path, body).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// The uncertainty neighbor sets `J_im`, ordered by ascending generator
/// index.
#[derive(Debug, Clone)]
pub struct NeighborSets {
    per_point: Vec<Vec<usize>>,
    n_fractions: usize,
}

impl NeighborSets {
    pub fn get(&self, point: usize, fraction: usize) -> &[usize] {
        debug_assert!(fraction < self.n_fractions);
        &self.per_point[point]
    }

    pub fn len(&self, point: usize, fraction: usize) -> usize {
        self.get(point, fraction).len()
    }

    pub fn n_points(&self) -> usize {
        self.per_point.len()
    }
}

/// Uncertainty/conservatism scenario: relative deviation `rho` and the
/// budget expressed as a fraction of each neighbor set's size, with
/// optional per-(point, fraction) overrides in absolute units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub rho: f64,
    pub gamma_fraction: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gamma_overrides: Vec<GammaOverride>,
}

/// Absolute budget override for one capacity row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaOverride {
    pub point: usize,
    pub fraction: usize,
    pub gamma: f64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("rho {0} outside [0, 1]")]
    BadRho(f64),
    #[error("gamma_fraction {0} outside [0, 1]")]
    BadGammaFraction(f64),
    #[error("gamma override {gamma} for point {point}, fraction {fraction} outside [0, {max}]")]
    BadOverride {
        point: usize,
        fraction: usize,
        gamma: f64,
        max: usize,
    },
}

impl ScenarioConfig {
    pub fn new(rho: f64, gamma_fraction: f64) -> Self {
        Self {
            rho,
            gamma_fraction,
            gamma_overrides: Vec::new(),
        }
    }

    pub fn deterministic() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn validate(&self, neighbors: &NeighborSets) -> Result<(), ScenarioError> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(ScenarioError::BadRho(self.rho));
        }
        if !(0.0..=1.0).contains(&self.gamma_fraction) {
            return Err(ScenarioError::BadGammaFraction(self.gamma_fraction));
        }
        for o in &self.gamma_overrides {
            let max = neighbors.len(o.point, o.fraction);
            if o.gamma < 0.0 || o.gamma > max as f64 {
                return Err(ScenarioError::BadOverride {
                    point: o.point,
                    fraction: o.fraction,
                    gamma: o.gamma,
                    max,
                });
            }
        }
        Ok(())
    }

    /// The effective budget for one capacity row:
    /// `gamma_fraction * |J_im|` unless overridden. Real-valued, no
    /// rounding.
    pub fn gamma(&self, point: usize, fraction: usize, neighbors: &NeighborSets) -> f64 {
        self.gamma_overrides
            .iter()
            .find(|o| o.point == point && o.fraction == fraction)
            .map(|o| o.gamma)
            .unwrap_or_else(|| self.gamma_fraction * neighbors.len(point, fraction) as f64)
    }

    /// Compact label used in report and output file names.
    pub fn label(&self) -> String {
        format!("g{:.3}_r{:.3}", self.gamma_fraction, self.rho)
    }
}

/// The catalog used throughout the experiments: a 1.38 m² / 1.1 m³ bin at
/// 493 and a 1.00 m² / 1.0 m³ rear-loading bin at 528.
pub fn default_bin_catalog() -> Vec<BinType> {
    vec![
        BinType {
            id: "CTB-1100".into(),
            area: 1.38,
            capacity: 1.1,
            unit_cost: 493.0,
        },
        BinType {
            id: "REAR-LOADING".into(),
            area: 1.00,
            capacity: 1.0,
            unit_cost: 528.0,
        },
    ]
}

/// Visits every day, every two days or every three days.
pub fn default_frequencies() -> Vec<FrequencyProfile> {
    vec![
        FrequencyProfile {
            id: "daily".into(),
            accumulation_days: 1,
        },
        FrequencyProfile {
            id: "every-2-days".into(),
            accumulation_days: 2,
        },
        FrequencyProfile {
            id: "every-3-days".into(),
            accumulation_days: 3,
        },
    ]
}

/// Default walking-distance threshold in meters.
pub const DEFAULT_MAX_DISTANCE: f64 = 300.0;
/// Default available bin area per point in square meters; fits three to
/// five bins of the default catalog.
pub const DEFAULT_MAX_AREA: f64 = 5.0;
/// Default opening cost: the unit cost of one CTB-1100 bin.
pub const DEFAULT_OPENING_COST: f64 = 493.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GenerationProfile};

    fn two_point_instance() -> Instance {
        Instance {
            points: vec![
                GenerationPoint {
                    id: "p0".into(),
                    coordinates: [0.0, 0.0],
                    waste_rate: BTreeMap::from([
                        ("mixed".to_string(), 0.2),
                        ("recyclable".to_string(), 0.5),
                    ]),
                    opening_cost: 493.0,
                },
                GenerationPoint {
                    id: "p1".into(),
                    coordinates: [100.0, 0.0],
                    waste_rate: BTreeMap::from([
                        ("mixed".to_string(), 0.1),
                        ("recyclable".to_string(), 0.4),
                    ]),
                    opening_cost: 493.0,
                },
            ],
            fractions: vec!["recyclable".into(), "mixed".into()],
            bin_types: default_bin_catalog(),
            frequencies: default_frequencies(),
            distance: vec![vec![0.0, 100.0], vec![100.0, 0.0]],
            max_distance: 300.0,
            max_area: 5.0,
            schema_version: SCHEMA_VERSION,
        }
    }

    #[test]
    fn well_formed_instance_has_no_violations() {
        assert!(two_point_instance().validate().is_empty());
    }

    #[test]
    fn negative_distance_entry_is_named() {
        let mut inst = two_point_instance();
        inst.distance[0][1] = -5.0;
        let violations = inst.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].0.contains("distance[0][1]"));
    }

    #[test]
    fn far_apart_points_remain_self_reachable() {
        // A zero diagonal means every point can serve itself, so spreading
        // points beyond the threshold alone violates nothing.
        let mut inst = two_point_instance();
        inst.distance = vec![vec![0.0, 400.0], vec![400.0, 0.0]];
        inst.max_distance = 300.0;
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn unreachable_point_is_named() {
        // Unreachability requires a broken diagonal; both violations are
        // reported and name the offending entries.
        let mut inst = two_point_instance();
        inst.distance[1][0] = 400.0;
        inst.distance[1][1] = 400.0;
        let violations = inst.validate();
        assert!(violations.iter().any(|v| v.0.contains("distance[1][1]")));
        assert!(violations.iter().any(|v| v.0.contains("point 1")));
    }

    #[test]
    fn neighbor_sets_zero_threshold_is_self_only() {
        let mut inst = two_point_instance();
        inst.max_distance = 0.0;
        let sets = inst.neighbor_sets();
        for i in 0..2 {
            for m in 0..2 {
                assert_eq!(sets.get(i, m), &[i]);
            }
        }
    }

    #[test]
    fn neighbor_sets_three_in_line() {
        let mut inst = two_point_instance();
        inst.points.push(GenerationPoint {
            id: "p2".into(),
            coordinates: [200.0, 0.0],
            waste_rate: BTreeMap::from([("mixed".to_string(), 0.1)]),
            opening_cost: 493.0,
        });
        inst.distance = vec![
            vec![0.0, 100.0, 200.0],
            vec![100.0, 0.0, 100.0],
            vec![200.0, 100.0, 0.0],
        ];
        inst.max_distance = 150.0;
        assert!(inst.validate().is_empty());
        let sets = inst.neighbor_sets();
        assert_eq!(sets.get(1, 0), &[0, 1, 2]);
        assert_eq!(sets.get(0, 1), &[0, 1]);
    }

    #[test]
    fn neighbor_sets_cover_everything_with_large_threshold() {
        let mut inst = two_point_instance();
        inst.max_distance = 1e6;
        let sets = inst.neighbor_sets();
        assert_eq!(sets.len(0, 0), 2);
        assert_eq!(sets.len(1, 1), 2);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let inst = generate(1, 16, &GenerationProfile::named("i16").unwrap()).unwrap();
        inst.save(&path).unwrap();
        let loaded = Instance::load(&path).unwrap();
        assert_eq!(inst, loaded);
    }

    #[test]
    fn load_reports_missing_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        let mut value: serde_json::Value =
            serde_json::to_value(two_point_instance()).unwrap();
        value.as_object_mut().unwrap().remove("max_distance");
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        let err = Instance::load(&path).unwrap_err();
        assert!(err.to_string().contains("max_distance"), "{err}");
    }

    #[test]
    fn load_reports_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dims.json");
        let mut inst = two_point_instance();
        inst.distance.pop();
        std::fs::write(&path, serde_json::to_string(&inst).unwrap()).unwrap();
        let err = Instance::load(&path).unwrap_err();
        assert!(err.to_string().contains("distance matrix has 1 rows"), "{err}");
    }

    #[test]
    fn load_rejects_schema_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ver.json");
        let mut inst = two_point_instance();
        inst.schema_version = 99;
        std::fs::write(&path, serde_json::to_string(&inst).unwrap()).unwrap();
        assert!(matches!(
            Instance::load(&path),
            Err(InstanceError::SchemaVersion { found: 99, .. })
        ));
    }

    #[test]
    fn scenario_gamma_resolution() {
        let inst = two_point_instance();
        let sets = inst.neighbor_sets();
        let mut scenario = ScenarioConfig::new(0.1, 0.5);
        assert_eq!(scenario.gamma(0, 0, &sets), 1.0);
        scenario.gamma_overrides.push(GammaOverride {
            point: 0,
            fraction: 0,
            gamma: 1.7,
        });
        assert!(scenario.validate(&sets).is_ok());
        assert_eq!(scenario.gamma(0, 0, &sets), 1.7);
        assert_eq!(scenario.gamma(1, 0, &sets), 1.0);
        scenario.gamma_overrides[0].gamma = 2.5;
        assert!(matches!(
            scenario.validate(&sets),
            Err(ScenarioError::BadOverride { .. })
        ));
    }
}
