//! Local side of the argument: deterministic strategies and the polygon bound.
//!
//! A deterministic strategy fixes every count `n_i` (Alice, setting `i`) and
//! `m_i` (Bob, setting `i`). Any local model is a convex mixture of such
//! strategies, so the minimum of the polygon expression over them bounds all
//! local models.

use rayon::prelude::*;

use crate::error::{BellError, Result};

/// Largest `L` and outcome cap accepted by [`lhv_minimum`].
pub const ENUMERATION_MAX_SETTINGS: usize = 4;
pub const ENUMERATION_MAX_CAP: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    alice: Vec<u32>,
    bob: Vec<u32>,
}

impl DeterministicStrategy {
    pub fn new(alice: Vec<u32>, bob: Vec<u32>) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(BellError::LengthMismatch {
                left: alice.len(),
                right: bob.len(),
            });
        }
        if alice.is_empty() {
            return Err(BellError::invalid("strategy needs at least one setting"));
        }
        Ok(DeterministicStrategy { alice, bob })
    }

    pub fn settings(&self) -> usize {
        self.alice.len()
    }

    pub fn alice(&self) -> &[u32] {
        &self.alice
    }

    pub fn bob(&self) -> &[u32] {
        &self.bob
    }
}

fn polygon_value(alice: &[u32], bob: &[u32]) -> i64 {
    let d = |a: u32, b: u32| (a as i64 - b as i64).abs();
    let last = alice.len() - 1;
    let same: i64 = alice.iter().zip(bob).map(|(&n, &m)| d(m, n)).sum();
    let shifted: i64 = (0..last).map(|i| d(bob[i + 1], alice[i])).sum();
    same + shifted - d(bob[0], alice[last])
}

/// `sum_i |m_i - n_i| + sum_{i<L} |m_{i+1} - n_i| - |m_1 - n_L|`, never negative.
pub fn polygon_check(strategy: &DeterministicStrategy) -> f64 {
    polygon_value(&strategy.alice, &strategy.bob) as f64
}

/// `D(V, W)`: mean absolute difference of paired samples.
pub fn empirical_distance(v: &[i64], w: &[i64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(BellError::LengthMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    if v.is_empty() {
        return Err(BellError::invalid("no samples"));
    }
    let total: i64 = v.iter().zip(w).map(|(a, b)| (a - b).abs()).sum();
    Ok(total as f64 / v.len() as f64)
}

/// Minimum of [`polygon_check`] over all `(cap + 1)^(2L)` deterministic
/// strategies with outcomes in `0..=cap`.
pub fn lhv_minimum(settings: usize, cap: u32) -> Result<f64> {
    if settings == 0 || settings > ENUMERATION_MAX_SETTINGS || cap > ENUMERATION_MAX_CAP {
        return Err(BellError::BudgetExceeded {
            strategies: (cap as u128 + 1).saturating_pow(2 * settings as u32),
            max_settings: ENUMERATION_MAX_SETTINGS,
            max_cap: ENUMERATION_MAX_CAP,
        });
    }
    let base = cap as u64 + 1;
    let slots = 2 * settings;
    let total = base.pow(slots as u32);
    // partitioned on the leading outcome; each worker walks the rest
    let min = (0..base)
        .into_par_iter()
        .map(|lead| {
            let rest = total / base;
            let mut outcomes = vec![0u32; slots];
            let mut best = i64::MAX;
            for code in 0..rest {
                outcomes[0] = lead as u32;
                let mut c = code;
                for slot in outcomes.iter_mut().skip(1) {
                    *slot = (c % base) as u32;
                    c /= base;
                }
                let (alice, bob) = outcomes.split_at(settings);
                best = best.min(polygon_value(alice, bob));
            }
            best
        })
        .min()
        .unwrap_or(0);
    Ok(min as f64)
}
