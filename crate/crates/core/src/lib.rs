//! Photon-number-resolved chained Bell tests on the four-mode squeezed vacuum.
//!
//! Alice and Bob count photons behind polarizing beam splitters. For `L`
//! settings per side the chained distance inequality reads
//! `(2L - 1) <|m - n|>_theta >= <|m - n|>_theta'`, which every local model
//! satisfies. The crate computes exact quantum predictions for the multiphoton
//! singlet components of the squeezed vacuum, optionally with Bernoulli
//! detector loss, and checks them against brute-force references.
//!
//! Module map:
//! - [`numerics`]: log-domain factorials, binomials and signed sums
//! - [`singlet`]: closed-form amplitudes and joint count tables
//! - [`loss`]: binomial thinning of counts
//! - [`sv`]: squeezed-vacuum weights, truncation and mixtures
//! - [`chain`]: settings geometry and Bell parameters
//! - [`lhv`]: deterministic local strategies
//! - [`oracle`]: Fock-space and Monte-Carlo references
//! - [`cli`]: the `chained-bell` command line

pub mod chain;
pub mod cli;
pub mod error;
pub mod lhv;
pub mod loss;
pub mod numerics;
pub mod oracle;
pub mod singlet;
pub mod sv;

pub use chain::{
    asymptotic_bell_fixed_n, bell_fixed_n, bell_sv, make_chain, rhs_sv_asymptotic, BellBreakdown,
    ChainSpec,
};
pub use error::{BellError, Result};
pub use loss::{binomial_thin, LossSpec};
pub use singlet::{joint_distribution, mean_abs_difference, Angle, JointCountDistribution};
pub use sv::{intensity_correlation, lambda_sq, n_max_for, sv_mixture, SvSpec};
