//! Synthetic instance generation.
//!
//! Points are placed on a jittered square grid and distances are rectilinear
//! planar distances. Waste rates are drawn per fraction from a normal
//! distribution truncated at zero, using the per-size moment profiles of the
//! field data the toolkit was calibrated against.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::instance::{
    default_bin_catalog, default_frequencies, GenerationPoint, Instance, DEFAULT_MAX_AREA,
    DEFAULT_MAX_DISTANCE, DEFAULT_OPENING_COST, SCHEMA_VERSION,
};

/// Mean and standard deviation of one fraction's daily volume per point.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionMoments {
    pub fraction: String,
    pub mean: f64,
    pub std_dev: f64,
}

/// Per-fraction waste statistics plus siting defaults for generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationProfile {
    pub moments: Vec<FractionMoments>,
    pub max_distance: f64,
    pub max_area: f64,
    pub opening_cost: f64,
    /// Grid pitch in meters before jitter; one point per block.
    pub grid_spacing: f64,
    /// Maximum absolute jitter applied to each coordinate, meters.
    pub jitter: f64,
}

impl Default for GenerationProfile {
    fn default() -> Self {
        Self {
            moments: Vec::new(),
            max_distance: DEFAULT_MAX_DISTANCE,
            max_area: DEFAULT_MAX_AREA,
            opening_cost: DEFAULT_OPENING_COST,
            grid_spacing: 100.0,
            jitter: 20.0,
        }
    }
}

/// Names of the built-in moment profiles, in instance-size order.
pub const PROFILE_NAMES: [&str; 5] = ["i16", "i58", "i73", "i126", "i190"];

impl GenerationProfile {
    /// Builds a profile with recyclable and mixed fraction moments.
    pub fn with_moments(
        recyclable: (f64, f64),
        mixed: (f64, f64),
    ) -> Self {
        Self {
            moments: vec![
                FractionMoments {
                    fraction: "recyclable".into(),
                    mean: recyclable.0,
                    std_dev: recyclable.1,
                },
                FractionMoments {
                    fraction: "mixed".into(),
                    mean: mixed.0,
                    std_dev: mixed.1,
                },
            ],
            ..Self::default()
        }
    }

    /// The built-in per-size profiles. The default point count for each is
    /// given by [`default_points`].
    pub fn named(name: &str) -> Option<Self> {
        let (recyclable, mixed) = match name {
            "i16" => ((0.554, 0.34), (0.143, 0.072)),
            "i58" => ((0.556, 0.465), (0.227, 0.121)),
            "i73" => ((0.783, 0.467), (0.208, 0.123)),
            "i126" => ((0.656, 0.436), (0.178, 0.117)),
            "i190" => ((0.341, 0.359), (0.149, 0.112)),
            _ => return None,
        };
        Some(Self::with_moments(recyclable, mixed))
    }
}

/// Default point count of each built-in profile.
pub fn default_points(name: &str) -> Option<usize> {
    match name {
        "i16" => Some(16),
        "i58" => Some(58),
        "i73" => Some(73),
        "i126" => Some(126),
        "i190" => Some(190),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("n_points must be at least 1")]
    NoPoints,
    #[error("profile has no fraction moments")]
    NoMoments,
    #[error("fraction `{fraction}` has non-positive {what} {value}")]
    BadMoment {
        fraction: String,
        what: &'static str,
        value: f64,
    },
}

/// Generates a deterministic synthetic instance: `n_points` on a jittered
/// grid, rectilinear distances, waste rates from the profile's truncated
/// normals, and the default bin catalog and frequency set.
pub fn generate(
    seed: u64,
    n_points: usize,
    profile: &GenerationProfile,
) -> Result<Instance, GenerateError> {
    if n_points == 0 {
        return Err(GenerateError::NoPoints);
    }
    if profile.moments.is_empty() {
        return Err(GenerateError::NoMoments);
    }
    for m in &profile.moments {
        if m.mean <= 0.0 {
            return Err(GenerateError::BadMoment {
                fraction: m.fraction.clone(),
                what: "mean",
                value: m.mean,
            });
        }
        if m.std_dev <= 0.0 {
            return Err(GenerateError::BadMoment {
                fraction: m.fraction.clone(),
                what: "std-dev",
                value: m.std_dev,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n_points as f64).sqrt().ceil() as usize;

    let mut points = Vec::with_capacity(n_points);
    for idx in 0..n_points {
        let (row, col) = (idx / side, idx % side);
        let x = col as f64 * profile.grid_spacing
            + rng.gen_range(-profile.jitter..=profile.jitter);
        let y = row as f64 * profile.grid_spacing
            + rng.gen_range(-profile.jitter..=profile.jitter);

        let mut waste_rate = BTreeMap::new();
        for m in &profile.moments {
            let normal = Normal::new(m.mean, m.std_dev).expect("positive std-dev");
            // Truncated at zero: negative draws clamp to zero rather than
            // being resampled.
            let rate: f64 = normal.sample(&mut rng).max(0.0);
            waste_rate.insert(m.fraction.clone(), rate);
        }
        points.push(GenerationPoint {
            id: format!("p{idx}"),
            coordinates: [x, y],
            waste_rate,
            opening_cost: profile.opening_cost,
        });
    }

    let distance: Vec<Vec<f64>> = (0..n_points)
        .map(|i| {
            (0..n_points)
                .map(|j| {
                    let [xi, yi] = points[i].coordinates;
                    let [xj, yj] = points[j].coordinates;
                    if i == j {
                        0.0
                    } else {
                        (xi - xj).abs() + (yi - yj).abs()
                    }
                })
                .collect()
        })
        .collect();

    Ok(Instance {
        points,
        fractions: profile.moments.iter().map(|m| m.fraction.clone()).collect(),
        bin_types: default_bin_catalog(),
        frequencies: default_frequencies(),
        distance,
        max_distance: profile.max_distance,
        max_area: profile.max_area,
        schema_version: SCHEMA_VERSION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_is_byte_identical() {
        let profile = GenerationProfile::named("i16").unwrap();
        let a = generate(7, 16, &profile).unwrap();
        let b = generate(7, 16, &profile).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn single_point_instance_is_degenerate() {
        let profile = GenerationProfile::named("i16").unwrap();
        let inst = generate(3, 1, &profile).unwrap();
        assert_eq!(inst.points.len(), 1);
        assert_eq!(inst.distance, vec![vec![0.0]]);
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn sample_means_track_profile_targets() {
        // Target moments per built-in profile; sample means must land
        // within 20% for every fraction at the profile's default size.
        for name in PROFILE_NAMES {
            let profile = GenerationProfile::named(name).unwrap();
            let n = default_points(name).unwrap();
            let inst = generate(18, n, &profile).unwrap();
            for m in &profile.moments {
                let mean: f64 = inst
                    .points
                    .iter()
                    .map(|p| p.waste_rate[&m.fraction])
                    .sum::<f64>()
                    / n as f64;
                let rel = (mean - m.mean).abs() / m.mean;
                assert!(
                    rel <= 0.20,
                    "{name}/{}: sample mean {mean:.4} vs target {:.4} (rel {rel:.3})",
                    m.fraction,
                    m.mean
                );
            }
        }
    }

    #[test]
    fn rejects_bad_moments() {
        let mut profile = GenerationProfile::with_moments((0.5, 0.1), (0.2, 0.05));
        profile.moments[0].std_dev = 0.0;
        assert!(matches!(
            generate(1, 4, &profile),
            Err(GenerateError::BadMoment { what: "std-dev", .. })
        ));
        let mut profile = GenerationProfile::with_moments((0.5, 0.1), (0.2, 0.05));
        profile.moments[1].mean = -0.1;
        assert!(matches!(
            generate(1, 4, &profile),
            Err(GenerateError::BadMoment { what: "mean", .. })
        ));
    }

    #[test]
    fn generated_instances_validate() {
        let profile = GenerationProfile::named("i58").unwrap();
        let inst = generate(11, 58, &profile).unwrap();
        assert!(inst.validate().is_empty());
        assert_eq!(inst.fractions, vec!["recyclable", "mixed"]);
        assert_eq!(inst.bin_types.len(), 2);
        assert_eq!(inst.frequencies.len(), 3);
    }
}
