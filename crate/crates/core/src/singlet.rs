//! Photon-count statistics of the 2N-photon polarization singlet.
//!
//! Alice counts `n` photons in her `H` output, Bob counts `m` in his
//! `V + theta` output. Each beam carries exactly `N` photons, so the joint
//! table is `(N + 1) x (N + 1)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{BellError, Result};
use crate::numerics::{
    check_photon_number, log_binomial, log_factorial, signed_log_sum, Sign, SignedLogReal,
};

/// Polarizer angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const RIGHT: Angle = Angle(FRAC_PI_2);

    pub fn new(radians: f64) -> Result<Angle> {
        if radians.is_finite() {
            Ok(Angle(radians))
        } else {
            Err(BellError::invalid(format!("angle {radians} is not finite")))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Relative angles fed to the singlet formulas must lie in `[0, pi/2]`.
    pub fn check_relative(self) -> Result<Angle> {
        if (0.0..=FRAC_PI_2).contains(&self.0) {
            Ok(self)
        } else {
            Err(BellError::invalid(format!(
                "relative angle {} outside [0, pi/2]",
                self.0
            )))
        }
    }

    /// `(cos, sin)` with exact values at `0` and `pi/2`.
    pub fn cos_sin(self) -> (f64, f64) {
        if self.0 == 0.0 {
            (1.0, 0.0)
        } else if self.0 == FRAC_PI_2 {
            (0.0, 1.0)
        } else {
            (self.0.cos(), self.0.sin())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SingletIndex {
    photons: usize,
    alice: usize,
    bob: usize,
}

impl SingletIndex {
    pub fn new(photons: usize, alice: usize, bob: usize) -> Result<SingletIndex> {
        if alice > photons || bob > photons {
            return Err(BellError::invalid(format!(
                "counts ({alice}, {bob}) outside [0, {photons}]"
            )));
        }
        Ok(SingletIndex {
            photons,
            alice,
            bob,
        })
    }

    pub fn photons(self) -> usize {
        self.photons
    }

    pub fn alice(self) -> usize {
        self.alice
    }

    pub fn bob(self) -> usize {
        self.bob
    }
}

/// Probability table `p(n, m)` for `0 <= n, m <= max_count`, row-major in `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointCountDistribution {
    max_count: usize,
    entries: Vec<f64>,
    mass: f64,
}

impl JointCountDistribution {
    const MASS_SLACK: f64 = 1e-9;

    pub fn zeros(max_count: usize) -> Self {
        JointCountDistribution {
            max_count,
            entries: vec![0.0; (max_count + 1) * (max_count + 1)],
            mass: 0.0,
        }
    }

    /// Builds a table from row-major entries, checking shape, sign and mass.
    pub fn from_entries(max_count: usize, entries: Vec<f64>) -> Result<Self> {
        let side = max_count + 1;
        if entries.len() != side * side {
            return Err(BellError::LengthMismatch {
                left: entries.len(),
                right: side * side,
            });
        }
        if let Some(bad) = entries.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(BellError::invalid(format!("invalid probability {bad}")));
        }
        let mass = entries.iter().sum::<f64>();
        if mass > 1.0 + Self::MASS_SLACK {
            return Err(BellError::invalid(format!("total mass {mass} exceeds 1")));
        }
        Ok(JointCountDistribution {
            max_count,
            entries,
            mass,
        })
    }

    /// A point mass at `(n, m)`.
    pub fn point(max_count: usize, n: usize, m: usize) -> Result<Self> {
        if n > max_count || m > max_count {
            return Err(BellError::invalid(format!(
                "point ({n}, {m}) outside [0, {max_count}]"
            )));
        }
        let mut dist = Self::zeros(max_count);
        dist.entries[n * (max_count + 1) + m] = 1.0;
        dist.mass = 1.0;
        Ok(dist)
    }

    pub fn max_count(&self) -> usize {
        self.max_count
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `p(n, m)`, zero outside the table.
    pub fn get(&self, n: usize, m: usize) -> f64 {
        if n > self.max_count || m > self.max_count {
            0.0
        } else {
            self.entries[n * (self.max_count + 1) + m]
        }
    }

    /// `(n, m, p)` triples in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let side = self.max_count + 1;
        self.entries
            .iter()
            .enumerate()
            .map(move |(i, &p)| (i / side, i % side, p))
    }

    pub fn mean_abs_difference(&self) -> f64 {
        self.iter().map(|(n, m, p)| n.abs_diff(m) as f64 * p).sum()
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        let side = self.max_count + 1;
        self.entries
            .chunks(side)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        let side = self.max_count + 1;
        (0..side)
            .map(|m| (0..side).map(|n| self.entries[n * side + m]).sum())
            .collect()
    }

    /// `self += weight * other`, growing the table if `other` is larger.
    pub(crate) fn accumulate(&mut self, other: &JointCountDistribution, weight: f64) {
        if other.max_count > self.max_count {
            *self = self.embedded(other.max_count);
        }
        let side = self.max_count + 1;
        for (n, m, p) in other.iter() {
            self.entries[n * side + m] += weight * p;
        }
        self.mass = self.entries.iter().sum();
    }

    pub(crate) fn embedded(&self, max_count: usize) -> JointCountDistribution {
        debug_assert!(max_count >= self.max_count);
        let mut out = Self::zeros(max_count);
        let side = max_count + 1;
        for (n, m, p) in self.iter() {
            out.entries[n * side + m] = p;
        }
        out.mass = self.mass;
        out
    }

    pub(crate) fn from_raw(max_count: usize, entries: Vec<f64>) -> Self {
        let mass = entries.iter().sum();
        JointCountDistribution {
            max_count,
            entries,
            mass,
        }
    }
}

/// `ln(x^k)` with `0^0 = 1`; `None` when the power vanishes.
fn log_power(x: f64, k: usize) -> Option<f64> {
    if k == 0 {
        Some(0.0)
    } else if x == 0.0 {
        None
    } else {
        Some(k as f64 * x.ln())
    }
}

/// Amplitude of `|n_H, (N-n)_V>_a |(N-m)_{H+theta}, m_{V+theta}>_b` in the
/// `N`-photon singlet.
///
/// Uses `cos^(N-K) sin^K` rather than `cos^N tan^K`, so `theta = pi/2` is
/// handled without a singularity. Terms with a vanishing binomial or power
/// are dropped, and an amplitude with no surviving term is exact zero.
pub fn singlet_amplitude(index: SingletIndex, theta: Angle) -> Result<SignedLogReal> {
    let big_n = index.photons;
    check_photon_number(big_n)?;
    let theta = theta.check_relative()?;
    let (n, m) = (index.alice, index.bob);
    let (cos, sin) = theta.cos_sin();

    // xi = (N-n)! n! / ((N+1) (N-m)! m!)
    let log_xi = log_factorial((big_n - n) as u64) + log_factorial(n as u64)
        - ((big_n + 1) as f64).ln()
        - log_factorial((big_n - m) as u64)
        - log_factorial(m as u64);
    let half_log_xi = 0.5 * log_xi;

    let q_lo = m.saturating_sub(n);
    let q_hi = (big_n - n).min(m);
    let mut terms = Vec::with_capacity(q_hi.saturating_sub(q_lo) + 1);
    for q in q_lo..=q_hi {
        let sin_power = 2 * q + n - m;
        let cos_power = big_n - sin_power;
        let logs = (
            log_binomial((big_n - m) as u64, (big_n - n) as i64 - q as i64),
            log_binomial(m as u64, q as i64),
            log_power(cos, cos_power),
            log_power(sin, sin_power),
        );
        if let (Some(b1), Some(b2), Some(c), Some(s)) = logs {
            let sign = if q % 2 == 0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            terms.push(SignedLogReal::new(sign, half_log_xi + b1 + b2 + c + s));
        }
    }

    let sum = signed_log_sum(&terms);
    Ok(if n % 2 == 0 { sum } else { -sum })
}

/// `p(n, m | theta) = |amplitude|^2` over `[0, N]^2`.
pub fn joint_distribution(photons: usize, theta: Angle) -> Result<JointCountDistribution> {
    check_photon_number(photons)?;
    theta.check_relative()?;
    let side = photons + 1;
    let mut entries = Vec::with_capacity(side * side);
    for n in 0..side {
        for m in 0..side {
            let index = SingletIndex::new(photons, n, m)?;
            entries.push(singlet_amplitude(index, theta)?.squared());
        }
    }
    Ok(JointCountDistribution::from_raw(photons, entries))
}

/// `sum_{n,m} |m - n| p(n, m)`.
pub fn mean_abs_difference(dist: &JointCountDistribution) -> f64 {
    dist.mean_abs_difference()
}
