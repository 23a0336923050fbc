//! Log-domain combinatorics and signed accumulation.
//!
//! Probabilities for multiphoton singlets are built from alternating sums of
//! binomial products whose individual terms can be many orders of magnitude
//! larger than the result. Everything here works on `ln|x|` plus a sign, and
//! the final accumulation is done in double-double arithmetic after factoring
//! out the largest magnitude.

use std::ops::{Mul, Neg};

use once_cell::sync::Lazy;

use crate::error::{BellError, Result};

/// Largest photon number per beam accepted by the production path.
pub const MAX_PHOTONS: usize = 60;

pub(crate) fn check_photon_number(n: usize) -> Result<()> {
    if n > MAX_PHOTONS {
        Err(BellError::Range {
            requested: n,
            max: MAX_PHOTONS,
        })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Zero is represented by `Sign::Zero`; its log magnitude is `-inf` and is
/// never consulted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogReal {
    sign: Sign,
    log_magnitude: f64,
}

impl SignedLogReal {
    pub const ZERO: SignedLogReal = SignedLogReal {
        sign: Sign::Zero,
        log_magnitude: f64::NEG_INFINITY,
    };

    pub const ONE: SignedLogReal = SignedLogReal {
        sign: Sign::Positive,
        log_magnitude: 0.0,
    };

    pub fn new(sign: Sign, log_magnitude: f64) -> Self {
        debug_assert!(!log_magnitude.is_nan(), "NaN log magnitude");
        if sign == Sign::Zero || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLogReal {
                sign,
                log_magnitude,
            }
        }
    }

    pub fn positive(log_magnitude: f64) -> Self {
        Self::new(Sign::Positive, log_magnitude)
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(Sign::of(x), x.abs().ln())
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.log_magnitude.exp(),
        }
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// `None` for zero.
    pub fn log_magnitude(self) -> Option<f64> {
        match self.sign {
            Sign::Zero => None,
            _ => Some(self.log_magnitude),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    /// The square, returned as a plain float.
    pub fn squared(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            _ => (2.0 * self.log_magnitude).exp(),
        }
    }
}

impl Mul for SignedLogReal {
    type Output = SignedLogReal;

    fn mul(self, rhs: SignedLogReal) -> SignedLogReal {
        SignedLogReal::new(self.sign * rhs.sign, self.log_magnitude + rhs.log_magnitude)
    }
}

impl Neg for SignedLogReal {
    type Output = SignedLogReal;

    fn neg(self) -> SignedLogReal {
        SignedLogReal {
            sign: -self.sign,
            log_magnitude: self.log_magnitude,
        }
    }
}

const LOG_FACTORIAL_TABLE_LEN: usize = 4096;

static LOG_FACTORIAL_TABLE: Lazy<Vec<f64>> = Lazy::new(|| {
    let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE_LEN);
    let mut acc = DoubleDouble::ZERO;
    table.push(0.0);
    for i in 1..LOG_FACTORIAL_TABLE_LEN {
        acc = acc.add(DoubleDouble::from((i as f64).ln()));
        table.push(acc.value());
    }
    table
});

/// `ln(k!)`.
pub fn log_factorial(k: u64) -> f64 {
    if (k as usize) < LOG_FACTORIAL_TABLE_LEN {
        return LOG_FACTORIAL_TABLE[k as usize];
    }
    // Stirling series; the first omitted term is below 1e-25 for k >= 4096.
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// `ln C(n, k)`, or `None` when the binomial vanishes (`k < 0` or `k > n`).
pub fn log_binomial(n: u64, k: i64) -> Option<f64> {
    if k < 0 || k as u64 > n {
        return None;
    }
    let k = k as u64;
    Some(log_factorial(n) - log_factorial(k) - log_factorial(n - k))
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Sum of signed log-domain terms.
///
/// Terms are rescaled by the largest magnitude and reduced pairwise in
/// double-double arithmetic. A scaled result below `1e-300` is returned as
/// exact zero.
pub fn signed_log_sum(terms: &[SignedLogReal]) -> SignedLogReal {
    let max_log = terms
        .iter()
        .filter_map(|t| t.log_magnitude())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_log == f64::NEG_INFINITY {
        return SignedLogReal::ZERO;
    }
    let scaled: Vec<f64> = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.sign.as_f64() * (t.log_magnitude - max_log).exp())
        .collect();
    let total = pairwise(&scaled).value();
    if total.abs() < 1e-300 {
        SignedLogReal::ZERO
    } else {
        SignedLogReal::new(Sign::of(total), max_log + total.abs().ln())
    }
}

fn pairwise(values: &[f64]) -> DoubleDouble {
    if values.len() <= 16 {
        values
            .iter()
            .fold(DoubleDouble::ZERO, |acc, &v| acc.add(DoubleDouble::from(v)))
    } else {
        let (left, right) = values.split_at(values.len() / 2);
        pairwise(left).add(pairwise(right))
    }
}

#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    fn add(self, other: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = fast_two_sum(s, e);
        DoubleDouble { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        DoubleDouble { hi, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    if a.abs() < b.abs() {
        return fast_two_sum(b, a);
    }
    let s = a + b;
    (s, b - (s - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr(sign: Sign, log: f64) -> SignedLogReal {
        SignedLogReal::new(sign, log)
    }

    #[test]
    fn small_factorials() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let expected = 3_628_800f64.ln();
        assert!((log_factorial(10) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn stirling_branch_joins_table() {
        // ln(4096!) = ln(4095!) + ln(4096)
        let joined = log_factorial(4095) + 4096f64.ln();
        let stirling = log_factorial(4096);
        assert!((joined - stirling).abs() <= 1e-12 * stirling);
    }

    #[test]
    fn binomial_edges() {
        assert!((log_binomial(5, 2).unwrap() - 10f64.ln()).abs() < 1e-14);
        assert_eq!(log_binomial(5, 7), None);
        assert_eq!(log_binomial(5, -1), None);
        assert_eq!(log_binomial(0, 0), Some(0.0));
        assert_eq!(binomial_exact(60, 30), Some(118_264_581_564_861_424));
        assert_eq!(binomial_exact(3, 5), Some(0));
    }

    #[test]
    fn exact_cancellation_is_zero() {
        let s = signed_log_sum(&[lr(Sign::Positive, 0.0), lr(Sign::Negative, 0.0)]);
        assert!(s.is_zero());
        assert_eq!(s.to_f64(), 0.0);
    }

    #[test]
    fn single_term_identity() {
        let s = signed_log_sum(&[SignedLogReal::ONE]);
        assert_eq!(s.sign(), Sign::Positive);
        assert!(s.log_magnitude().unwrap().abs() < 1e-15);
        assert!(signed_log_sum(&[]).is_zero());
    }

    #[test]
    fn mixed_sum() {
        let s = signed_log_sum(&[
            lr(Sign::Positive, 2.0),
            lr(Sign::Positive, 2.0),
            lr(Sign::Negative, 1.0),
        ]);
        let expected = 2.0 * 2f64.exp() - 1f64.exp();
        assert_eq!(s.sign(), Sign::Positive);
        assert!((s.to_f64() - expected).abs() < 1e-12 * expected);
        assert!((s.to_f64() - 12.0598).abs() < 1e-4);
    }

    #[test]
    fn zero_terms_are_ignored() {
        let s = signed_log_sum(&[SignedLogReal::ZERO, lr(Sign::Negative, 3.0)]);
        assert_eq!(s.sign(), Sign::Negative);
        assert!((s.log_magnitude().unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn product_and_negation() {
        let a = SignedLogReal::from_f64(-3.0);
        let b = SignedLogReal::from_f64(2.0);
        assert!(((a * b).to_f64() + 6.0).abs() < 1e-14);
        assert!(((-a).to_f64() - 3.0).abs() < 1e-14);
        assert!((a * SignedLogReal::ZERO).is_zero());
        assert!((a.squared() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn photon_range_guard() {
        assert!(check_photon_number(MAX_PHOTONS).is_ok());
        assert_eq!(
            check_photon_number(61),
            Err(BellError::Range {
                requested: 61,
                max: 60
            })
        );
    }
}
