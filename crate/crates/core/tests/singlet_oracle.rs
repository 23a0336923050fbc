//! Closed-form singlet statistics against the Fock-space oracle.

use std::f64::consts::{FRAC_PI_2, PI};

use chained_bell::oracle::{
    build_singlet, oracle_joint_distribution, projection_amplitude, rotated_projection_amplitude,
};
use chained_bell::singlet::{joint_distribution, singlet_amplitude, Angle, SingletIndex};
use proptest::prelude::*;

const GRID: [f64; 6] = [
    0.0,
    PI / 16.0,
    PI / 8.0,
    PI / 4.0,
    3.0 * PI / 8.0,
    FRAC_PI_2,
];

fn angle(x: f64) -> Angle {
    Angle::new(x).unwrap()
}

#[test]
fn squared_amplitudes_match_oracle() {
    for big_n in 0..=8 {
        let state = build_singlet(big_n).unwrap();
        for theta in GRID {
            for n in 0..=big_n {
                for m in 0..=big_n {
                    let closed =
                        singlet_amplitude(SingletIndex::new(big_n, n, m).unwrap(), angle(theta))
                            .unwrap()
                            .squared();
                    let brute =
                        rotated_projection_amplitude(&state, big_n, n, m, angle(theta)).unwrap();
                    assert!(
                        (closed - brute * brute).abs() <= 1e-10,
                        "N={big_n} n={n} m={m} theta={theta}: {closed} vs {}",
                        brute * brute
                    );
                }
            }
        }
    }
}

#[test]
fn signed_amplitudes_match_oracle() {
    // The oracle also reproduces the sign, not only the probability.
    for big_n in 0..=6 {
        let state = build_singlet(big_n).unwrap();
        for theta in [0.2, 0.9, 1.4] {
            for n in 0..=big_n {
                for m in 0..=big_n {
                    let closed =
                        singlet_amplitude(SingletIndex::new(big_n, n, m).unwrap(), angle(theta))
                            .unwrap()
                            .to_f64();
                    let brute =
                        rotated_projection_amplitude(&state, big_n, n, m, angle(theta)).unwrap();
                    assert!((closed - brute).abs() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn two_photon_table_at_eighth_turn() {
    let closed = joint_distribution(2, angle(PI / 8.0)).unwrap();
    let brute = oracle_joint_distribution(2, Angle::ZERO, angle(PI / 8.0)).unwrap();
    for ((_, _, p), (_, _, q)) in closed.iter().zip(brute.iter()) {
        assert!((p - q).abs() <= 1e-10);
    }
}

#[test]
fn aligned_support_is_exactly_diagonal() {
    for big_n in 0..=20 {
        let d = joint_distribution(big_n, Angle::ZERO).unwrap();
        for (n, m, p) in d.iter() {
            if n != m {
                assert_eq!(p, 0.0, "N={big_n} ({n},{m})");
            }
        }
    }
}

#[test]
fn crossed_support_is_antidiagonal() {
    for big_n in 0..=20 {
        let d = joint_distribution(big_n, Angle::RIGHT).unwrap();
        let expected = 1.0 / (big_n + 1) as f64;
        for (n, m, p) in d.iter() {
            if n + m == big_n {
                assert!((p - expected).abs() <= 1e-12);
            } else {
                assert_eq!(p, 0.0);
            }
        }
    }
}

#[test]
fn crossed_mean_difference_closed_form() {
    for big_n in 0..=30usize {
        let d = joint_distribution(big_n, Angle::RIGHT).unwrap();
        let nf = big_n as f64;
        let expected = if big_n % 2 == 1 {
            (nf * nf / 2.0 + nf + 0.5) / (nf + 1.0)
        } else {
            (nf * nf / 2.0 + nf) / (nf + 1.0)
        };
        assert!((d.mean_abs_difference() - expected).abs() <= 1e-12);
    }
}

#[test]
fn large_photon_numbers_stay_normalized() {
    for big_n in [30, 45, 60] {
        for theta in [0.05, 0.4, FRAC_PI_2 / 2.0, 1.3] {
            let d = joint_distribution(big_n, angle(theta)).unwrap();
            assert!(
                (d.mass() - 1.0).abs() <= 1e-9,
                "N={big_n} theta={theta}: {}",
                d.mass()
            );
            assert!(d.entries().iter().all(|&p| p >= 0.0));
        }
    }
}

#[test]
fn rotation_invariance_with_absolute_settings() {
    for big_n in 0..=6 {
        for (a, b) in [
            (0.3, 0.5),
            (1.0, 2.2),
            (-0.7, 0.1),
            (2.5, 3.9),
            (0.4, 0.4 + FRAC_PI_2),
        ] {
            let relative = joint_distribution(big_n, angle(b - a)).unwrap();
            let absolute = oracle_joint_distribution(big_n, angle(a), angle(b)).unwrap();
            for ((_, _, p), (_, _, q)) in relative.iter().zip(absolute.iter()) {
                assert!((p - q).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn oracle_rejects_out_of_scale() {
    let state = build_singlet(3).unwrap();
    assert!(projection_amplitude(&state, 11, 0, 0, Angle::ZERO, Angle::ZERO).is_err());
    assert!(projection_amplitude(&state, 3, 4, 0, Angle::ZERO, Angle::ZERO).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn normalization(big_n in 0usize..=20, theta in 0.0f64..=FRAC_PI_2) {
        let d = joint_distribution(big_n, angle(theta)).unwrap();
        prop_assert!((d.mass() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn exchange_symmetry(big_n in 0usize..=12, theta in 0.0f64..=FRAC_PI_2) {
        let d = joint_distribution(big_n, angle(theta)).unwrap();
        for n in 0..=big_n {
            for m in 0..=big_n {
                prop_assert!((d.get(n, m) - d.get(m, n)).abs() <= 1e-12);
            }
        }
    }
}
