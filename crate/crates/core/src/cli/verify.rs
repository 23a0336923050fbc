//! Verification suites behind `chained-bell verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BellError, Result};
use crate::lhv::{lhv_minimum, polygon_check, DeterministicStrategy};
use crate::loss::{binomial_thin, LossSpec};
use crate::oracle::{mc_thin, oracle_joint_distribution, ORACLE_MAX_PHOTONS};
use crate::singlet::{joint_distribution, Angle};

pub const ORACLE_TOLERANCE: f64 = 1e-10;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
pub const SEMIGROUP_TOLERANCE: f64 = 1e-10;
/// Monte-Carlo cells must lie within this many binomial standard deviations.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub oracle_max_photons: usize,
    pub seed: u64,
    pub samples: u64,
    pub polygon_samples: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            oracle_max_photons: 8,
            seed: 0,
            samples: 1_000_000,
            polygon_samples: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: u64,
    /// Largest observed error, in the suite's own unit.
    pub max_error: f64,
    pub tolerance: f64,
}

/// The six angles covered by the oracle suite.
pub fn oracle_angles() -> [f64; 6] {
    [0.0, PI / 16.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, PI / 2.0]
}

pub fn run_verification(config: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    if config.oracle_max_photons > ORACLE_MAX_PHOTONS {
        return Err(BellError::invalid(format!(
            "oracle budget N <= {ORACLE_MAX_PHOTONS}, got {}",
            config.oracle_max_photons
        )));
    }
    if config.samples == 0 {
        return Err(BellError::invalid("need at least one Monte-Carlo sample"));
    }
    Ok(vec![
        oracle_equivalence(config.oracle_max_photons)?,
        rotation_invariance(config.oracle_max_photons.min(6))?,
        normalization(config.seed)?,
        lhv_enumeration()?,
        polygon_random(config.seed, config.polygon_samples)?,
        loss_monte_carlo(config.seed, config.samples)?,
        loss_semigroup()?,
    ])
}

fn oracle_equivalence(max_photons: usize) -> Result<SuiteResult> {
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for n in 0..=max_photons {
        for theta in oracle_angles() {
            let theta = Angle::new(theta)?;
            let closed = joint_distribution(n, theta)?;
            let brute = oracle_joint_distribution(n, Angle::ZERO, theta)?;
            for ((_, _, p), (_, _, q)) in closed.iter().zip(brute.iter()) {
                worst = worst.max((p - q).abs());
                checks += 1;
            }
        }
    }
    Ok(SuiteResult {
        suite: "oracle_equivalence",
        passed: worst <= ORACLE_TOLERANCE,
        checks,
        max_error: worst,
        tolerance: ORACLE_TOLERANCE,
    })
}

fn rotation_invariance(max_photons: usize) -> Result<SuiteResult> {
    let settings = [(0.3, 0.5), (1.0, 2.2), (-0.7, 0.1), (2.5, 3.9)];
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for n in 0..=max_photons {
        for (a, b) in settings {
            let relative = joint_distribution(n, Angle::new(b - a)?)?;
            let absolute = oracle_joint_distribution(n, Angle::new(a)?, Angle::new(b)?)?;
            for ((_, _, p), (_, _, q)) in relative.iter().zip(absolute.iter()) {
                worst = worst.max((p - q).abs());
                checks += 1;
            }
        }
    }
    Ok(SuiteResult {
        suite: "rotation_invariance",
        passed: worst <= ORACLE_TOLERANCE,
        checks,
        max_error: worst,
        tolerance: ORACLE_TOLERANCE,
    })
}

fn normalization(seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for n in 0..=20 {
        for _ in 0..50 {
            let theta = Angle::new(rng.random_range(0.0..=PI / 2.0))?;
            let d = joint_distribution(n, theta)?;
            worst = worst.max((d.mass() - 1.0).abs());
            checks += 1;
        }
    }
    Ok(SuiteResult {
        suite: "normalization",
        passed: worst <= NORMALIZATION_TOLERANCE,
        checks,
        max_error: worst,
        tolerance: NORMALIZATION_TOLERANCE,
    })
}

fn lhv_enumeration() -> Result<SuiteResult> {
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for l in 1..=3 {
        for cap in 0..=4 {
            worst = worst.max(lhv_minimum(l, cap)?.abs());
            checks += 1;
        }
    }
    Ok(SuiteResult {
        suite: "lhv_minimum",
        passed: worst == 0.0,
        checks,
        max_error: worst,
        tolerance: 0.0,
    })
}

fn polygon_random(seed: u64, samples: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut lowest = f64::INFINITY;
    for _ in 0..samples {
        let l = rng.random_range(2..=6);
        let alice = (0..l).map(|_| rng.random_range(0..=12)).collect();
        let bob = (0..l).map(|_| rng.random_range(0..=12)).collect();
        let s = DeterministicStrategy::new(alice, bob)?;
        lowest = lowest.min(polygon_check(&s));
    }
    let violation = if samples == 0 {
        0.0
    } else {
        (-lowest).max(0.0)
    };
    Ok(SuiteResult {
        suite: "polygon_random",
        passed: violation == 0.0,
        checks: samples,
        max_error: violation,
        tolerance: 0.0,
    })
}

fn loss_monte_carlo(seed: u64, samples: u64) -> Result<SuiteResult> {
    let theta = Angle::new(PI / 8.0)?;
    let mut checks = 0;
    // largest |deviation| / sigma over cells
    let mut worst: f64 = 0.0;
    let mut stream = 0u64;
    for n in 0..=4 {
        for eta in [0.5, 0.83, 0.95] {
            let ideal = joint_distribution(n, theta)?;
            let exact = binomial_thin(&ideal, LossSpec::new(eta)?);
            let sampled = mc_thin(&ideal, eta, samples, seed.wrapping_add(stream))?;
            stream += 1;
            for ((_, _, p), (_, _, q)) in exact.iter().zip(sampled.iter()) {
                let sigma = (p * (1.0 - p) / samples as f64).sqrt();
                let score = if sigma > 0.0 {
                    (p - q).abs() / sigma
                } else if p == q {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(score);
                checks += 1;
            }
        }
    }
    Ok(SuiteResult {
        suite: "loss_monte_carlo",
        passed: worst <= MC_SIGMAS,
        checks,
        max_error: worst,
        tolerance: MC_SIGMAS,
    })
}

fn loss_semigroup() -> Result<SuiteResult> {
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for n in [1, 3, 6] {
        let ideal = joint_distribution(n, Angle::new(0.4)?)?;
        for (e1, e2) in [(0.9, 0.8), (0.5, 0.5), (0.99, 0.3)] {
            let twice = binomial_thin(
                &binomial_thin(&ideal, LossSpec::new(e1)?),
                LossSpec::new(e2)?,
            );
            let once = binomial_thin(&ideal, LossSpec::new(e1 * e2)?);
            for ((_, _, p), (_, _, q)) in twice.iter().zip(once.iter()) {
                worst = worst.max((p - q).abs());
                checks += 1;
            }
        }
    }
    Ok(SuiteResult {
        suite: "loss_semigroup",
        passed: worst <= SEMIGROUP_TOLERANCE,
        checks,
        max_error: worst,
        tolerance: SEMIGROUP_TOLERANCE,
    })
}
