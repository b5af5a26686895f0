mod common;

use num_complex::Complex64;

use tma_haar::array::{array_factor, dynamic_excitations, steering_delays, ArrayGeometry};
use tma_haar::haar::{hdwt_forward, sample_sine, HaarIndex};
use tma_haar::hardware::plan_bfn;
use tma_haar::metrics::efficiencies;
use tma_haar::spectrum::{pulse_coefficient, waveform_spectrum};

#[test]
fn coefficients_match_inner_products() {
    for m in [4usize, 8, 16, 32, 64, 128] {
        let samples = common::sine_samples(m);
        let w = hdwt_forward(&sample_sine(m).unwrap());
        let (mean, degrees) = common::haar_by_inner_products(&samples);
        assert!((w.mean() - mean).abs() < 1e-14);
        for (l, row) in degrees.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                let got = w.detail(HaarIndex::new(l as u32, j as u32 + 1).unwrap()).unwrap();
                assert!((got - want).abs() < 1e-14, "M={m} ({l},{})", j + 1);
            }
        }
    }
}

#[test]
fn stairstep_spectrum_matches_zoh_closed_form() {
    for m in [8usize, 16, 32, 64] {
        let w = hdwt_forward(&sample_sine(m).unwrap());
        let samples = common::sine_samples(m);
        let scale = common::zoh_coefficient(&samples, 1).norm();
        for q in -(4 * m as i64)..=4 * m as i64 {
            let got = waveform_spectrum(&w, q).unwrap();
            let want = common::zoh_coefficient(&samples, q);
            assert!((got - want).norm() <= 1e-12 * scale, "M={m} q={q}");
        }
    }
}

#[test]
fn spectrum_matches_oversampled_dft() {
    let m = 16;
    let w = hdwt_forward(&sample_sine(m).unwrap());
    let samples = common::sine_samples(m);
    let scale = common::zoh_coefficient(&samples, 1).norm();
    for q in [-17i64, -15, -1, 0, 1, 2, 15, 17, 33] {
        let got = waveform_spectrum(&w, q).unwrap();
        let want = common::dft_coefficient(&samples, q, 1024);
        assert!((got - want).norm() <= 1e-11 * scale, "q={q}");
    }
}

#[test]
fn sine_lines_sit_at_replicas_only() {
    // Sampled sine: the DFT is nonzero only at q = +-1 (mod M).
    let m = 32;
    let samples = common::sine_samples(m);
    let w = hdwt_forward(&sample_sine(m).unwrap());
    for q in -100i64..=100 {
        let c = pulse_coefficient(&w, q).unwrap();
        let on_replica = q.rem_euclid(m as i64) == 1 || q.rem_euclid(m as i64) == m as i64 - 1;
        if !on_replica {
            assert!(c.norm() < 1e-14, "q={q}");
        } else {
            let want = common::pulse_oracle(&samples, q);
            assert!((c - want).norm() < 1e-14, "q={q}");
        }
    }
}

#[test]
fn replica_magnitudes_fall_as_inverse_order() {
    // |c_q| / |c_1| = 1 / |q| on the replicas of the useful line.
    let w = hdwt_forward(&sample_sine(32).unwrap());
    let c1 = pulse_coefficient(&w, 1).unwrap().norm();
    for q in [-31i64, 33, -63, 65] {
        let c = pulse_coefficient(&w, q).unwrap().norm();
        assert!((c / c1 - 1.0 / q.abs() as f64).abs() < 1e-13, "q={q}");
    }
}

#[test]
fn useful_harmonic_efficiency_is_sinc_squared() {
    for m in [8usize, 16, 32, 64] {
        let e = efficiencies(&hdwt_forward(&sample_sine(m).unwrap()), 1.0).unwrap();
        let x = std::f64::consts::PI / m as f64;
        let want = (x.sin() / x).powi(2);
        assert!((e.eta_tma - want).abs() < 1e-13, "M={m}");
    }
}

#[test]
fn array_factor_matches_direct_sum() {
    let m = 8;
    let w = hdwt_forward(&sample_sine(m).unwrap());
    let samples = common::sine_samples(m);
    let geometry = ArrayGeometry::new(10, 0.7, 2.4e9).unwrap();
    let steering = steering_delays(63.0, 10, 1e6).unwrap();
    let delays = common::normalized_delays(63.0, 10);
    for q in [-7i64, 1, 9, 17] {
        let e = dynamic_excitations(&w, &steering, q).unwrap();
        for theta in [0.0, 33.3, 63.0, 90.0, 145.0, 180.0] {
            let got = array_factor(&e, &geometry, theta).unwrap();
            let c = theta.to_radians().cos();
            let want: Complex64 = delays
                .iter()
                .enumerate()
                .map(|(n, u)| {
                    common::pulse_oracle(&samples, q)
                        * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * q as f64 * u)
                        * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * n as f64 * 0.7 * c)
                })
                .sum();
            assert!((got - want).norm() < 1e-12, "q={q} theta={theta}");
        }
    }
}

#[test]
fn attenuator_levels_from_continuous_integrals() {
    for m in [8usize, 16, 32] {
        let plan = plan_bfn(&hdwt_forward(&sample_sine(m).unwrap()), 1e6).unwrap();
        let reference = common::continuous_sine_coefficient(0, 1).abs();
        for network in plan.networks.iter().filter(|n| n.active) {
            for (j, db) in network.slot_attenuation_db.iter().enumerate() {
                let w = common::continuous_sine_coefficient(network.degree, j as u32 + 1);
                let want = 20.0 * (w.abs() / reference).log10();
                assert!((db - want).abs() < 1e-9, "M={m} degree {} slot {}", network.degree, j + 1);
            }
        }
    }
}
