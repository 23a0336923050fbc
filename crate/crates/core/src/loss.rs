//! Bernoulli detector loss applied to Alice's and Bob's counts.

use crate::error::{BellError, Result};
use crate::numerics::binomial_exact;
use crate::singlet::JointCountDistribution;

/// Per-photon detection efficiency, shared by both observers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossSpec {
    eta: f64,
}

impl LossSpec {
    pub const LOSSLESS: LossSpec = LossSpec { eta: 1.0 };

    pub fn new(eta: f64) -> Result<LossSpec> {
        if (0.0..=1.0).contains(&eta) {
            Ok(LossSpec { eta })
        } else {
            Err(BellError::invalid(format!(
                "efficiency {eta} outside [0, 1]"
            )))
        }
    }

    /// Only equal efficiencies are modelled.
    pub fn per_observer(alice: f64, bob: f64) -> Result<LossSpec> {
        if alice != bob {
            return Err(BellError::invalid(format!(
                "asymmetric efficiencies ({alice}, {bob}) are not supported"
            )));
        }
        LossSpec::new(alice)
    }

    pub fn eta(self) -> f64 {
        self.eta
    }
}

/// `kernel[x][n] = C(n, x) eta^x (1 - eta)^(n - x)`.
fn thinning_kernel(max_count: usize, eta: f64) -> Vec<Vec<f64>> {
    (0..=max_count)
        .map(|x| {
            (0..=max_count)
                .map(|n| {
                    if n < x {
                        0.0
                    } else {
                        let c = binomial_exact(n as u64, x as u64)
                            .expect("binomial fits in u128 for supported counts")
                            as f64;
                        c * eta.powi(x as i32) * (1.0 - eta).powi((n - x) as i32)
                    }
                })
                .collect()
        })
        .collect()
}

/// Observed-count distribution after independent binomial thinning of both
/// counts. The table keeps its size; mass is preserved.
pub fn binomial_thin(ideal: &JointCountDistribution, spec: LossSpec) -> JointCountDistribution {
    let eta = spec.eta();
    if eta == 1.0 {
        return ideal.clone();
    }
    let top = ideal.max_count();
    let side = top + 1;
    let kernel = thinning_kernel(top, eta);

    // half[x][m] = sum_n kernel[x][n] p(n, m)
    let mut half = vec![0.0; side * side];
    for (x, row) in kernel.iter().enumerate() {
        for (n, &k) in row.iter().enumerate().skip(x) {
            if k == 0.0 {
                continue;
            }
            for m in 0..side {
                half[x * side + m] += k * ideal.get(n, m);
            }
        }
    }
    let mut out = vec![0.0; side * side];
    for x in 0..side {
        for (y, row) in kernel.iter().enumerate() {
            out[x * side + y] = row
                .iter()
                .enumerate()
                .skip(y)
                .map(|(m, &k)| k * half[x * side + m])
                .sum();
        }
    }
    JointCountDistribution::from_raw(top, out)
}
