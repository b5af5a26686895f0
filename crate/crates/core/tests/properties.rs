mod common;

use proptest::prelude::*;

use tma_haar::array::{steering_delays, ArrayGeometry};
use tma_haar::export::{coefficients_json, fmt_number, parse_coefficients, to_json_text};
use tma_haar::haar::{
    hdwt_forward, hdwt_forward_dense, hdwt_forward_fast, hdwt_inverse, sample_sine, sine_squared_error,
    stairstep_eval, HaarCoefficients, SamplingGrid, WaveformSamples,
};
use tma_haar::hardware::{plan_bfn, switching_schedule};
use tma_haar::spectrum::{pulse_coefficient, ssb_gate};

fn samples_strategy() -> impl Strategy<Value = Vec<f64>> {
    (2u32..=8).prop_flat_map(|p| prop::collection::vec(-10.0f64..10.0, 1usize << p))
}

fn zero_mean(mut v: Vec<f64>) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    v
}

proptest! {
    #[test]
    fn round_trip(values in samples_strategy()) {
        let samples = WaveformSamples::new(values.clone(), SamplingGrid::Midpoint).unwrap();
        let back = hdwt_inverse(&hdwt_forward(&samples));
        for (a, b) in values.iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * 10.0);
        }
    }

    #[test]
    fn parseval(values in samples_strategy()) {
        let samples = WaveformSamples::new(values.clone(), SamplingGrid::Midpoint).unwrap();
        let w = hdwt_forward(&samples);
        let energy = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
        let coeff: f64 = w.to_vector().iter().map(|c| c * c).sum();
        prop_assert!((energy - coeff).abs() <= 1e-12 * energy.max(1.0));
    }

    #[test]
    fn dense_and_fast_agree(values in samples_strategy()) {
        let samples = WaveformSamples::new(values, SamplingGrid::Midpoint).unwrap();
        let a = hdwt_forward_dense(&samples).to_vector();
        let b = hdwt_forward_fast(&samples).to_vector();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * 10.0);
        }
    }

    #[test]
    fn stairstep_holds_each_sample(values in samples_strategy(), frac in 0.0f64..1.0) {
        let m = values.len();
        let samples = WaveformSamples::new(values.clone(), SamplingGrid::Midpoint).unwrap();
        let w = hdwt_forward(&samples);
        let k = ((frac * m as f64) as usize).min(m - 1);
        let t = (k as f64 + 0.5) / m as f64;
        prop_assert!((stairstep_eval(&w, t) - values[k]).abs() <= 1e-11);
    }

    #[test]
    fn pulse_matches_zoh_oracle(values in samples_strategy().prop_filter("quarter grid", |v| v.len() % 4 == 0), q in -300i64..300) {
        let values = zero_mean(values);
        let samples = WaveformSamples::new(values.clone(), SamplingGrid::Midpoint).unwrap();
        let w = hdwt_forward(&samples);
        let got = pulse_coefficient(&w, q).unwrap();
        let want = common::pulse_oracle(&values, q);
        prop_assert!((got - want).norm() <= 1e-11);
    }

    #[test]
    fn gate_kills_three_mod_four(k in -10_000i64..10_000) {
        let q = 4 * k + 3;
        let g = ssb_gate(q);
        prop_assert!(g.re == 0.0 && g.im == 0.0);
        prop_assert!((ssb_gate(4 * k + 1).re - 2.0).abs() == 0.0);
    }

    #[test]
    fn delays_are_normalized(theta in 0.0f64..=180.0, n in 1usize..64, f0 in 1e3f64..1e9) {
        let s = steering_delays(theta, n, f0).unwrap();
        prop_assert!(s.normalized_delays().iter().all(|u| (0.0..1.0).contains(u)));
        prop_assert_eq!(s.normalized_delays()[0], 0.0);
    }

    #[test]
    fn schedule_reconstruction(p in 2u32..=6, theta in 0.0f64..=180.0, t in 0.0f64..1.0, n in 0usize..8) {
        let m = 1usize << p;
        let w = hdwt_forward(&sample_sine(m).unwrap());
        let plan = plan_bfn(&w, 1e6).unwrap();
        let steering = steering_delays(theta, 8, 1e6).unwrap();
        let schedules = switching_schedule(&plan, &steering).unwrap();
        let t_s = t * 1e-6;
        let got = schedules[n].waveform_at(plan.reference_amplitude, t_s);
        let want = common::hold(&common::sine_samples(m), 1e6 * t_s - steering.normalized_delays()[n]);
        prop_assert!((got - want).abs() <= 1e-9);
    }

    #[test]
    fn coefficient_file_is_lossless(values in samples_strategy()) {
        let samples = WaveformSamples::new(values, SamplingGrid::LeftEndpoint).unwrap();
        let w = hdwt_forward(&samples);
        let back = parse_coefficients(&to_json_text(&coefficients_json(&w, "sine"))).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn number_text_keeps_fifteen_digits(x in prop::num::f64::NORMAL) {
        let text = fmt_number(x);
        let back: f64 = text.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-15 * x.abs());
        let digits = text.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 15, "{}", text);
    }
}

#[test]
fn squared_error_decreases_with_resolution() {
    let errors: Vec<f64> = (2..=10)
        .map(|p| sine_squared_error(&hdwt_forward(&sample_sine(1 << p).unwrap())))
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    // second-order convergence: halving the cell quarters the error
    for pair in errors.windows(2).skip(2) {
        assert!((pair[0] / pair[1] - 4.0).abs() < 0.05);
    }
}

#[test]
fn orthogonality_up_to_256() {
    let mut m = 4;
    while m <= 256 {
        let h = tma_haar::haar::haar_matrix(m).unwrap();
        let gram = h.entries() * h.entries().transpose();
        let identity = nalgebra::DMatrix::<f64>::identity(m, m);
        assert!((gram - identity).amax() <= 1e-12, "M={m}");
        m *= 2;
    }
}

#[test]
fn geometry_and_coefficient_validation() {
    assert!(ArrayGeometry::new(0, 0.5, 1e9).is_err());
    assert!(HaarCoefficients::from_vector(&[0.0; 12], SamplingGrid::Midpoint).is_err());
    assert!(WaveformSamples::new(vec![0.0; 2], SamplingGrid::Midpoint).is_err());
}
