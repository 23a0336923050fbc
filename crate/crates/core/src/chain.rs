//! Chained distance inequality for `L` settings per side.
//!
//! Adjacent settings are separated by `theta = pi / 4L`, and the closing pair
//! by `theta' = (2L - 1) pi / 4L`. Since the statistics depend only on the
//! relative angle, the `2L - 1` adjacent terms collapse into one table scaled
//! by `2L - 1`:
//!
//! ```text
//! LHS = (2L - 1) sum |x - y| P(x, y | theta)
//! RHS =          sum |x - y| P(x, y | theta')
//! ```
//!
//! Local models give `LHS - RHS >= 0`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BellError, Result};
use crate::loss::{binomial_thin, LossSpec};
use crate::numerics::check_photon_number;
use crate::singlet::{joint_distribution, Angle};
use crate::sv::{lambda_sq, truncation, SvSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSpec {
    settings: usize,
    theta: Angle,
    theta_prime: Angle,
}

impl ChainSpec {
    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn theta(&self) -> Angle {
        self.theta
    }

    pub fn theta_prime(&self) -> Angle {
        self.theta_prime
    }

    /// Number of adjacent terms, `2L - 1`.
    pub fn adjacent_terms(&self) -> f64 {
        (2 * self.settings - 1) as f64
    }
}

pub fn make_chain(settings: usize) -> Result<ChainSpec> {
    if settings < 2 {
        return Err(BellError::invalid(format!(
            "need at least 2 settings per side, got {settings}"
        )));
    }
    let quarter = (4 * settings) as f64;
    Ok(ChainSpec {
        settings,
        theta: Angle::new(PI / quarter)?,
        theta_prime: Angle::new((2 * settings - 1) as f64 * PI / quarter)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellBreakdown {
    pub lhs: f64,
    pub rhs: f64,
    pub bell: f64,
    /// `(N, contribution to bell)`; for a mixture the contribution carries
    /// the `lambda_N^2` weight.
    pub per_n: Vec<(usize, f64)>,
    pub settings: usize,
    pub eta: f64,
    pub gamma: Option<f64>,
    pub n_max: Option<usize>,
    pub mass: Option<f64>,
}

impl BellBreakdown {
    pub fn violates(&self) -> bool {
        self.bell < 0.0
    }
}

/// Bell parameter of the `N`-photon-per-beam singlet.
pub fn bell_fixed_n(photons: usize, chain: &ChainSpec, loss: LossSpec) -> Result<BellBreakdown> {
    check_photon_number(photons)?;
    let near = binomial_thin(&joint_distribution(photons, chain.theta)?, loss);
    let far = binomial_thin(&joint_distribution(photons, chain.theta_prime)?, loss);
    let lhs = chain.adjacent_terms() * near.mean_abs_difference();
    let rhs = far.mean_abs_difference();
    let bell = lhs - rhs;
    Ok(BellBreakdown {
        lhs,
        rhs,
        bell,
        per_n: vec![(photons, bell)],
        settings: chain.settings,
        eta: loss.eta(),
        gamma: None,
        n_max: None,
        mass: None,
    })
}

/// Weighted combination `sum_N w_N B^N` of per-`N` results, `N = 0, 1, ...`.
pub fn combine_weighted(
    weights: &[f64],
    components: &[BellBreakdown],
    chain: &ChainSpec,
    loss: LossSpec,
) -> BellBreakdown {
    debug_assert_eq!(weights.len(), components.len());
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let mut per_n = Vec::with_capacity(weights.len());
    for (n, (w, c)) in weights.iter().zip(components).enumerate() {
        lhs += w * c.lhs;
        rhs += w * c.rhs;
        per_n.push((n, w * c.bell));
    }
    BellBreakdown {
        lhs,
        rhs,
        bell: lhs - rhs,
        per_n,
        settings: chain.settings,
        eta: loss.eta(),
        gamma: None,
        n_max: weights.len().checked_sub(1),
        mass: Some(weights.iter().sum()),
    }
}

/// Bell parameter of the truncated squeezed vacuum.
pub fn bell_sv(chain: &ChainSpec, spec: &SvSpec, loss: LossSpec) -> Result<BellBreakdown> {
    let (n_max, _) = truncation(spec)?;
    let components = (0..=n_max)
        .into_par_iter()
        .map(|n| bell_fixed_n(n, chain, loss))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = (0..=n_max).map(|n| lambda_sq(n, spec.gamma())).collect();
    let mut out = combine_weighted(&weights, &components, chain, loss);
    out.gamma = Some(spec.gamma());
    Ok(out)
}

/// `L -> infinity` right-hand side for fixed `N` as a reduced fraction:
/// `(N^2/2 + N + 1/2) / (N + 1)` for odd `N`, `(N^2/2 + N) / (N + 1)` for even.
pub fn asymptotic_rhs_fraction(photons: u64) -> (u64, u64) {
    let (num, den) = if photons % 2 == 1 {
        ((photons + 1) * (photons + 1), 2 * (photons + 1))
    } else {
        (photons * (photons + 2), 2 * (photons + 1))
    };
    let g = gcd(num, den);
    (num / g, den / g)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `lim_{L -> inf} B^N`; the left-hand side vanishes in the limit.
pub fn asymptotic_bell_fixed_n(photons: u64) -> f64 {
    let (num, den) = asymptotic_rhs_fraction(photons);
    -(num as f64) / (den as f64)
}

/// `lim_{L -> inf}` right-hand side for the squeezed vacuum,
/// `sinh^3(2G) / sinh(4G)`, evaluated as `sinh(2G) tanh(2G) / 2`.
pub fn rhs_sv_asymptotic(gamma: f64) -> f64 {
    let x = 2.0 * gamma;
    0.5 * x.sinh() * x.tanh()
}
