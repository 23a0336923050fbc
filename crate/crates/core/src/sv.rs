//! Four-mode squeezed vacuum as a mixture of singlet components.
//!
//! The state is `sum_N lambda_N |psi_N>` with
//! `lambda_N^2 = cosh^-4(G) (N + 1) tanh^(2N)(G)`. Counting statistics are
//! the `lambda_N^2`-weighted mixture of the per-`N` tables, truncated at the
//! smallest `N_max` whose cumulative weight reaches the mass threshold. The
//! truncated weights are not renormalized.

use crate::error::{BellError, Result};
use crate::loss::{binomial_thin, LossSpec};
use crate::numerics::MAX_PHOTONS;
use crate::singlet::{joint_distribution, Angle, JointCountDistribution};

pub const DEFAULT_MASS_THRESHOLD: f64 = 0.99;

/// Gain plus truncation policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvSpec {
    gamma: f64,
    mass_threshold: f64,
    n_max_cap: usize,
}

impl SvSpec {
    pub fn new(gamma: f64) -> Result<SvSpec> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(BellError::invalid(format!("gain {gamma} must be positive")));
        }
        Ok(SvSpec {
            gamma,
            mass_threshold: DEFAULT_MASS_THRESHOLD,
            n_max_cap: MAX_PHOTONS,
        })
    }

    pub fn with_mass_threshold(mut self, threshold: f64) -> Result<SvSpec> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(BellError::invalid(format!(
                "mass threshold {threshold} outside (0, 1]"
            )));
        }
        self.mass_threshold = threshold;
        Ok(self)
    }

    pub fn with_cap(mut self, cap: usize) -> Result<SvSpec> {
        if cap > MAX_PHOTONS {
            return Err(BellError::invalid(format!(
                "cap {cap} exceeds {MAX_PHOTONS}"
            )));
        }
        self.n_max_cap = cap;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mass_threshold(&self) -> f64 {
        self.mass_threshold
    }

    pub fn n_max_cap(&self) -> usize {
        self.n_max_cap
    }
}

/// Weight of the `N`-photon-per-beam singlet.
pub fn lambda_sq(photons: usize, gamma: f64) -> f64 {
    let c = gamma.cosh();
    let t = gamma.tanh();
    (photons + 1) as f64 * t.powi(2 * photons as i32) / (c * c * c * c)
}

/// Smallest `N_max` with `sum_{N <= N_max} lambda_N^2 >= threshold`.
pub fn n_max_for(spec: &SvSpec) -> Result<usize> {
    truncation(spec).map(|(n_max, _)| n_max)
}

/// `(N_max, retained mass)`.
pub fn truncation(spec: &SvSpec) -> Result<(usize, f64)> {
    let mut acc = 0.0;
    for n in 0..=spec.n_max_cap {
        acc += lambda_sq(n, spec.gamma);
        if acc >= spec.mass_threshold {
            return Ok((n, acc));
        }
    }
    Err(BellError::CapExceeded {
        threshold: spec.mass_threshold,
        cap: spec.n_max_cap,
        reached: acc,
    })
}

/// Truncated weights `lambda_0^2 ..= lambda_{N_max}^2`.
pub fn weights(spec: &SvSpec) -> Result<Vec<f64>> {
    let n_max = n_max_for(spec)?;
    Ok((0..=n_max).map(|n| lambda_sq(n, spec.gamma)).collect())
}

/// Observed joint counts for the squeezed vacuum at relative angle `theta`.
pub fn sv_mixture(theta: Angle, spec: &SvSpec, loss: LossSpec) -> Result<JointCountDistribution> {
    theta.check_relative()?;
    let weights = weights(spec)?;
    let mut mixture = JointCountDistribution::zeros(weights.len() - 1);
    for (n, &w) in weights.iter().enumerate() {
        let observed = binomial_thin(&joint_distribution(n, theta)?, loss);
        mixture.accumulate(&observed, w);
    }
    Ok(mixture)
}

/// `<a_i^dag a_i b_j^dag b_j> = sinh^2 cosh^2 cos^2(theta_a - theta_b) + sinh^4`.
pub fn intensity_correlation(theta_a: Angle, theta_b: Angle, gamma: f64) -> f64 {
    let s2 = gamma.sinh().powi(2);
    let c2 = gamma.cosh().powi(2);
    let rel = (theta_a.radians() - theta_b.radians()).cos().powi(2);
    s2 * c2 * rel + s2 * s2
}

/// Fringe visibility `(max - min) / (max + min)` of the intensity correlation
/// over the relative angle. Equals `cosh^2 / (cosh^2 + 2 sinh^2)`.
pub fn intensity_visibility(gamma: f64) -> f64 {
    let hi = intensity_correlation(Angle::ZERO, Angle::ZERO, gamma);
    let lo = intensity_correlation(Angle::ZERO, Angle::RIGHT, gamma);
    (hi - lo) / (hi + lo)
}

/// Mean photon number per beam, `sum_N lambda_N^2 N = 2 sinh^2(G)`.
/// Both beams together carry twice that.
pub fn mean_photon_number(gamma: f64) -> f64 {
    2.0 * gamma.sinh().powi(2)
}
