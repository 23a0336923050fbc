//! Brute-force reference computations.
//!
//! Nothing here touches the log-domain kernels or the closed-form amplitude.
//! The singlet is written out as a sparse four-mode Fock vector, measurement
//! projectors are expanded from rotated creation operators with exact integer
//! binomials, and overlaps are plain sparse inner products. Loss is checked by
//! seeded Monte-Carlo sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{BellError, Result};
use crate::singlet::{Angle, JointCountDistribution};

pub const ORACLE_MAX_PHOTONS: usize = 10;

/// Occupations `(a_H, a_V, b_H, b_V)`.
pub type Occupation = [u32; 4];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    amplitudes: BTreeMap<Occupation, f64>,
}

impl FockVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, occupation: Occupation, amplitude: f64) {
        *self.amplitudes.entry(occupation).or_insert(0.0) += amplitude;
    }

    pub fn get(&self, occupation: &Occupation) -> f64 {
        self.amplitudes.get(occupation).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &f64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.values().map(|a| a * a).sum()
    }

    pub fn inner(&self, other: &FockVector) -> f64 {
        self.amplitudes.iter().map(|(k, a)| a * other.get(k)).sum()
    }
}

fn check_oracle_scale(photons: usize) -> Result<()> {
    if photons > ORACLE_MAX_PHOTONS {
        Err(BellError::Range {
            requested: photons,
            max: ORACLE_MAX_PHOTONS,
        })
    } else {
        Ok(())
    }
}

/// Pascal's triangle row `n`.
fn pascal_row(n: u32) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

/// `|n, N-n>_a |N-n, n>_b` with amplitude `(-1)^n / sqrt(N + 1)`.
pub fn build_singlet(photons: usize) -> Result<FockVector> {
    check_oracle_scale(photons)?;
    let big_n = photons as u32;
    let amp = 1.0 / ((big_n + 1) as f64).sqrt();
    let mut state = FockVector::new();
    for n in 0..=big_n {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        state.add([n, big_n - n, big_n - n, n], sign * amp);
    }
    Ok(state)
}

/// One beam holding `first` photons polarized along `phi` and `second` along
/// `phi + pi/2`, written in the fixed `(H, V)` Fock basis.
///
/// `c_phi^dag = cos b_H^dag + sin b_V^dag`, `c_perp^dag = -sin b_H^dag + cos b_V^dag`.
fn rotated_beam(first: u32, second: u32, phi: f64) -> BTreeMap<(u32, u32), f64> {
    let (c, s) = (phi.cos(), phi.sin());
    let row_first = pascal_row(first);
    let row_second = pascal_row(second);
    let norm = ((factorial(first) * factorial(second)) as f64).sqrt();
    let mut out = BTreeMap::new();
    for p in 0..=first {
        // p horizontal creators from the first factor
        let from_first =
            row_first[p as usize] as f64 * c.powi(p as i32) * s.powi((first - p) as i32);
        for q in 0..=second {
            let from_second =
                row_second[q as usize] as f64 * (-s).powi(q as i32) * c.powi((second - q) as i32);
            let h = p + q;
            let v = first + second - h;
            let ladder = ((factorial(h) * factorial(v)) as f64).sqrt();
            *out.entry((h, v)).or_insert(0.0) += from_first * from_second * ladder / norm;
        }
    }
    out
}

/// `<n_{H+theta_a}, (N-n)_{V+theta_a}|_a <(N-m)_{H+theta_b}, m_{V+theta_b}|_b |state>`
/// for absolute polarizer angles on both sides.
pub fn projection_amplitude(
    state: &FockVector,
    photons: usize,
    n: usize,
    m: usize,
    theta_a: Angle,
    theta_b: Angle,
) -> Result<f64> {
    check_oracle_scale(photons)?;
    if n > photons || m > photons {
        return Err(BellError::invalid(format!(
            "counts ({n}, {m}) outside [0, {photons}]"
        )));
    }
    let big_n = photons as u32;
    let alice = rotated_beam(n as u32, big_n - n as u32, theta_a.radians());
    let bob = rotated_beam(big_n - m as u32, m as u32, theta_b.radians());
    let mut overlap = 0.0;
    for (&(ah, av), &x) in &alice {
        for (&(bh, bv), &y) in &bob {
            overlap += x * y * state.get(&[ah, av, bh, bv]);
        }
    }
    Ok(overlap)
}

/// Alice at `H`, Bob rotated by `theta`.
pub fn rotated_projection_amplitude(
    state: &FockVector,
    photons: usize,
    n: usize,
    m: usize,
    theta: Angle,
) -> Result<f64> {
    projection_amplitude(state, photons, n, m, Angle::ZERO, theta)
}

/// Joint count table of the singlet for absolute settings `(theta_a, theta_b)`.
pub fn oracle_joint_distribution(
    photons: usize,
    theta_a: Angle,
    theta_b: Angle,
) -> Result<JointCountDistribution> {
    let state = build_singlet(photons)?;
    let mut entries = Vec::with_capacity((photons + 1) * (photons + 1));
    for n in 0..=photons {
        for m in 0..=photons {
            let a = projection_amplitude(&state, photons, n, m, theta_a, theta_b)?;
            entries.push(a * a);
        }
    }
    JointCountDistribution::from_entries(photons, entries)
}

const MC_CHUNK: u64 = 1 << 16;

/// Empirical observed-count table from `samples` draws of `dist`, each count
/// thinned photon by photon with success probability `eta`.
///
/// Chunk `k` draws from its own ChaCha stream `k` under `seed`, so the result
/// does not depend on how chunks are scheduled. Entries are scaled by the
/// input mass.
pub fn mc_thin(
    dist: &JointCountDistribution,
    eta: f64,
    samples: u64,
    seed: u64,
) -> Result<JointCountDistribution> {
    if samples == 0 {
        return Err(BellError::invalid("need at least one sample"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(BellError::invalid(format!(
            "efficiency {eta} outside [0, 1]"
        )));
    }
    let mass = dist.mass();
    if mass <= 0.0 {
        return Err(BellError::invalid(
            "cannot sample from an empty distribution",
        ));
    }
    let side = dist.max_count() + 1;
    let cumulative: Vec<f64> = dist
        .entries()
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("non-empty table");

    let chunks = samples.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let start = chunk * MC_CHUNK;
            let len = MC_CHUNK.min(samples - start);
            let mut local = vec![0u64; side * side];
            for _ in 0..len {
                let u = rng.random::<f64>() * total;
                let cell = cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1);
                let (n, m) = (cell / side, cell % side);
                let x = (0..n).filter(|_| rng.random::<f64>() < eta).count();
                let y = (0..m).filter(|_| rng.random::<f64>() < eta).count();
                local[x * side + y] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; side * side],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let entries = counts
        .into_iter()
        .map(|c| c as f64 / samples as f64 * mass)
        .collect();
    JointCountDistribution::from_entries(dist.max_count(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_singlet() {
        let s = build_singlet(0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&[0, 0, 0, 0]), 1.0);
    }

    #[test]
    fn two_photon_singlet() {
        let s = build_singlet(1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((s.get(&[0, 1, 1, 0]) - h).abs() < 1e-15);
        assert!((s.get(&[1, 0, 0, 1]) + h).abs() < 1e-15);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn six_photon_singlet() {
        let s = build_singlet(3).unwrap();
        assert_eq!(s.len(), 4);
        for (occ, a) in s.iter() {
            assert!((a.abs() - 0.5).abs() < 1e-15);
            assert_eq!(occ[0] + occ[1], 3);
            assert_eq!(occ[2] + occ[3], 3);
        }
    }

    #[test]
    fn norms() {
        for n in 0..=ORACLE_MAX_PHOTONS {
            assert!((build_singlet(n).unwrap().norm_sq() - 1.0).abs() < 1e-12);
        }
        assert!(build_singlet(11).is_err());
    }

    #[test]
    fn rotated_beam_is_normalized() {
        for (first, second) in [(0, 0), (1, 0), (2, 3), (5, 5)] {
            let beam = rotated_beam(first, second, 0.37);
            let norm: f64 = beam.values().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_photon_by_hand() {
        let s = build_singlet(1).unwrap();
        for &theta in &[0.0, 0.3, 1.1] {
            let a = rotated_projection_amplitude(&s, 1, 0, 0, Angle::new(theta).unwrap()).unwrap();
            assert!((a.abs() - theta.cos() / 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_rotation_recovers_coefficients() {
        let s = build_singlet(4).unwrap();
        for n in 0..=4 {
            for m in 0..=4 {
                let a = rotated_projection_amplitude(&s, 4, n, m, Angle::ZERO).unwrap();
                let expected = if n == m {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign / 5f64.sqrt()
                } else {
                    0.0
                };
                assert!((a - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mc_is_deterministic() {
        let d = oracle_joint_distribution(2, Angle::ZERO, Angle::new(0.4).unwrap()).unwrap();
        let a = mc_thin(&d, 0.7, 100_000, 42).unwrap();
        let b = mc_thin(&d, 0.7, 100_000, 42).unwrap();
        assert_eq!(a, b);
        let c = mc_thin(&d, 0.7, 100_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mc_without_loss_tracks_input() {
        let d = oracle_joint_distribution(2, Angle::ZERO, Angle::new(0.6).unwrap()).unwrap();
        let samples = 200_000u64;
        let e = mc_thin(&d, 1.0, samples, 7).unwrap();
        let band = 4.0 / (samples as f64).sqrt();
        for (n, m, p) in d.iter() {
            assert!((e.get(n, m) - p).abs() < band);
        }
    }

    #[test]
    fn mc_rejects_bad_input() {
        let d = JointCountDistribution::point(1, 1, 1).unwrap();
        assert!(mc_thin(&d, 0.5, 0, 1).is_err());
        assert!(mc_thin(&d, 1.5, 10, 1).is_err());
        assert!(mc_thin(&JointCountDistribution::zeros(1), 0.5, 10, 1).is_err());
    }
}
