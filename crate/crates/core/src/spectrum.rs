//! Fourier series of periodic Haar wavelets and of the single-sideband pulse.
//!
//! All series are over the normalized period `T0 = 1` with kernel
//! `exp(-j 2 pi q t)`. The SSB pulse is `h(t) = f(t) + j f(t - 1/4)`; its
//! harmonics are `(1 - (-j)^(q+1)) c_q`, where `c_q` are the harmonics of the
//! stair-step `f`. Harmonics reported by [`pulse_spectrum`] carry the extra
//! `1/sqrt(2)` of the array-factor normalization.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::haar::{hdwt_inverse, stairstep_eval, HaarCoefficients, HaarIndex};
use crate::{Result, TmaError};

/// Largest `|W0|` accepted as a zero-mean waveform.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// `exp(-j 2 pi q x)` for a dyadic `x = num / den`, reduced exactly in
/// integers so large `q` does not lose phase accuracy.
fn dyadic_phasor(q: i64, num: u64, den: u64) -> Complex64 {
    let r = (q as i128 * num as i128).rem_euclid(den as i128) as f64 / den as f64;
    Complex64::from_polar(1.0, -2.0 * PI * r)
}

/// Fourier coefficient `G_q` of the periodic wavelet `h(l,m)`.
///
/// `G_q = sqrt(2^l) [int_a^b - int_b^c] exp(-j 2 pi q t) dt`, evaluated
/// through the antiderivative; `G_0 = 0`.
pub fn haar_fourier_coeff(index: HaarIndex, q: i64) -> Complex64 {
    if q == 0 {
        return Complex64::new(0.0, 0.0);
    }
    // a, b, c = (2m-2, 2m-1, 2m) / 2^(l+1)
    let den = 1u64 << (index.degree() + 1);
    let m = index.order() as u64;
    let ea = dyadic_phasor(q, 2 * m - 2, den);
    let eb = dyadic_phasor(q, 2 * m - 1, den);
    let ec = dyadic_phasor(q, 2 * m, den);
    let numerator = (ea - eb) - (eb - ec);
    numerator * index.amplitude() / Complex64::new(0.0, 2.0 * PI * q as f64)
}

fn require_zero_mean(coeffs: &HaarCoefficients) -> Result<()> {
    if coeffs.mean().abs() > MEAN_TOLERANCE {
        return Err(TmaError::domain(format!(
            "waveform has a dc term W0 = {:e}; only zero-mean waveforms are supported",
            coeffs.mean()
        )));
    }
    Ok(())
}

/// `c_q = sum_l sum_m W(l,m) G_q(l,m)`, the harmonics of the stair-step.
pub fn waveform_spectrum(coeffs: &HaarCoefficients, q: i64) -> Result<Complex64> {
    require_zero_mean(coeffs)?;
    Ok(waveform_spectrum_unchecked(coeffs, q))
}

fn waveform_spectrum_unchecked(coeffs: &HaarCoefficients, q: i64) -> Complex64 {
    coeffs
        .details()
        .filter(|(_, w)| *w != 0.0)
        .map(|(index, w)| haar_fourier_coeff(index, q) * w)
        .sum()
}

/// `1 - (-j)^(q+1)`, computed exactly.
///
/// Equals 2 for `q = 4k - 3`, 0 for `q = 3 (mod 4)`, and `1 -/+ j` for even q.
pub fn ssb_gate(q: i64) -> Complex64 {
    match (q + 1).rem_euclid(4) {
        0 => Complex64::new(0.0, 0.0),
        1 => Complex64::new(1.0, 1.0),
        2 => Complex64::new(2.0, 0.0),
        _ => Complex64::new(1.0, -1.0),
    }
}

/// Default symmetric harmonic window `|q| <= 2M + 2`.
pub fn default_q_limit(count: usize) -> i64 {
    2 * count as i64 + 2
}

fn require_quarter_grid(coeffs: &HaarCoefficients) -> Result<()> {
    if !coeffs.count().is_multiple_of(4) {
        return Err(TmaError::domain(format!(
            "m = {} is not divisible by 4; the quarter-period delay falls off the sample grid",
            coeffs.count()
        )));
    }
    Ok(())
}

/// Harmonic `q` of `h(t) / sqrt(2)`.
pub fn pulse_coefficient(coeffs: &HaarCoefficients, q: i64) -> Result<Complex64> {
    require_quarter_grid(coeffs)?;
    let gate = ssb_gate(q);
    if gate.re == 0.0 && gate.im == 0.0 {
        require_zero_mean(coeffs)?;
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(gate * waveform_spectrum(coeffs, q)? * FRAC_1_SQRT_2)
}

/// Harmonics of the normalized SSB pulse over a window of orders.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpectrum {
    fundamental_hz: f64,
    q_min: i64,
    coefficients: Vec<Complex64>,
}

impl PulseSpectrum {
    pub fn fundamental_hz(&self) -> f64 {
        self.fundamental_hz
    }

    /// `tau` with `omega0 tau = pi / 2`.
    pub fn quarter_delay_s(&self) -> f64 {
        0.25 / self.fundamental_hz
    }

    pub fn q_range(&self) -> RangeInclusive<i64> {
        self.q_min..=self.q_min + self.coefficients.len() as i64 - 1
    }

    pub fn get(&self, q: i64) -> Option<Complex64> {
        let offset = q.checked_sub(self.q_min)?;
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.coefficients.get(i).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.q_range().zip(self.coefficients.iter().copied())
    }

    /// `sum |coefficient|^2` over the window.
    pub fn power(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Computes `ssb_gate(q) c_q / sqrt(2)` for every `q` in `q_range`.
pub fn pulse_spectrum(
    coeffs: &HaarCoefficients,
    fundamental_hz: f64,
    q_range: RangeInclusive<i64>,
) -> Result<PulseSpectrum> {
    if !(fundamental_hz.is_finite() && fundamental_hz > 0.0) {
        return Err(TmaError::domain(format!(
            "fundamental frequency must be positive, got {fundamental_hz}"
        )));
    }
    if q_range.is_empty() {
        return Err(TmaError::domain("empty harmonic range"));
    }
    require_quarter_grid(coeffs)?;
    require_zero_mean(coeffs)?;
    let q_min = *q_range.start();
    let coefficients = q_range
        .map(|q| pulse_coefficient(coeffs, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(PulseSpectrum {
        fundamental_hz,
        q_min,
        coefficients,
    })
}

/// `h(s) = f(s) + j f(s - 1/4)` at normalized time `s`.
pub fn ssb_pulse_eval(coeffs: &HaarCoefficients, s: f64) -> Complex64 {
    Complex64::new(stairstep_eval(coeffs, s), stairstep_eval(coeffs, s - 0.25))
}

/// Exact time average of `|h(t)|^2 / 2`, integrating the piecewise-constant
/// pulse cell by cell.
pub fn pulse_mean_power(coeffs: &HaarCoefficients) -> Result<f64> {
    require_quarter_grid(coeffs)?;
    let samples = hdwt_inverse(coeffs);
    let f = samples.values();
    let count = f.len();
    let shift = count / 4;
    let total: f64 = (0..count)
        .map(|k| {
            let delayed = f[(k + count - shift) % count];
            0.5 * (f[k] * f[k] + delayed * delayed)
        })
        .sum();
    Ok(total / count as f64)
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use crate::haar::{hdwt_forward, sample_sine, SamplingGrid, WaveformSamples};

    fn sine(count: usize) -> HaarCoefficients {
        hdwt_forward(&sample_sine(count).unwrap())
    }

    fn sinc(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            x.sin() / x
        }
    }

    /// Midpoint quadrature of the wavelet against the Fourier kernel.
    fn quadrature(index: HaarIndex, q: i64) -> Complex64 {
        let n = 1 << 16;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64;
                let h = crate::haar::haar_wavelet_eval(index, t).unwrap();
                Complex64::from_polar(h, -2.0 * PI * q as f64 * t)
            })
            .sum::<Complex64>()
            / n as f64
    }

    #[test]
    fn wavelet_harmonics() {
        let h01 = HaarIndex::new(0, 1).unwrap();
        assert_eq!(haar_fourier_coeff(h01, 0), Complex64::new(0.0, 0.0));
        let g1 = haar_fourier_coeff(h01, 1);
        assert!((g1 - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-15);
        assert!(haar_fourier_coeff(h01, 2).norm() < 1e-15);
        assert!((g1.im + 0.63662).abs() < 1e-5);
    }

    #[test]
    fn wavelet_harmonics_match_quadrature() {
        for index in HaarIndex::all(4) {
            for q in [-9i64, -3, -1, 1, 2, 5, 13] {
                let a = haar_fourier_coeff(index, q);
                let b = quadrature(index, q);
                assert!((a - b).norm() < 1e-6, "{index:?} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sine_waveform_harmonics() {
        let w = sine(32);
        let c1 = waveform_spectrum(&w, 1).unwrap();
        assert!((c1.norm() - sinc(PI / 32.0) / 2.0).abs() < 1e-12);
        assert!((c1.norm() - 0.49920).abs() < 1e-5);
        assert!(waveform_spectrum(&w, 2).unwrap().norm() < 1e-12);
        let c31 = waveform_spectrum(&w, 31).unwrap();
        assert!((c31.norm() - 0.0161033).abs() < 5e-7);
        assert!((c31.norm() / c1.norm() - 1.0 / 31.0).abs() < 1e-12);
    }

    #[test]
    fn dc_waveform_rejected() {
        let ones = hdwt_forward(&WaveformSamples::new(vec![1.0; 8], SamplingGrid::Midpoint).unwrap());
        assert!(waveform_spectrum(&ones, 1).is_err());
        assert!(pulse_spectrum(&ones, 1.0, -3..=3).is_err());
    }

    #[test]
    fn gate_values() {
        assert_eq!(ssb_gate(1), Complex64::new(2.0, 0.0));
        assert_eq!(ssb_gate(5), Complex64::new(2.0, 0.0));
        assert_eq!(ssb_gate(-3), Complex64::new(2.0, 0.0));
        assert_eq!(ssb_gate(-1), Complex64::new(0.0, 0.0));
        assert_eq!(ssb_gate(3), Complex64::new(0.0, 0.0));
        assert_eq!(ssb_gate(2), Complex64::new(1.0, -1.0));
        for q in -20i64..=20 {
            // direct complex power as a cross-check
            let mut p = Complex64::new(1.0, 0.0);
            let base = Complex64::new(0.0, -1.0);
            let e = q + 1;
            let step = if e >= 0 { base } else { base.inv() };
            for _ in 0..e.unsigned_abs() {
                p *= step;
            }
            assert!((Complex64::new(1.0, 0.0) - p - ssb_gate(q)).norm() < 1e-15);
        }
    }

    #[test]
    fn pulse_harmonics() {
        let w = sine(32);
        let spec = pulse_spectrum(&w, 1e6, -66..=66).unwrap();
        assert!((spec.get(1).unwrap().norm() - 0.70598).abs() < 1e-5);
        assert_eq!(spec.get(-1).unwrap(), Complex64::new(0.0, 0.0));
        assert!((spec.get(-31).unwrap().norm() - 0.022773).abs() < 1e-6);
        assert!((spec.quarter_delay_s() - 0.25e-6).abs() < 1e-18);
        assert_eq!(spec.get(67), None);
        assert_eq!(spec.get(-67), None);
        for (q, c) in spec.iter() {
            if q.rem_euclid(4) == 3 {
                assert_eq!(c, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn pulse_parseval_within_truncation() {
        for count in [8, 16, 32] {
            let w = sine(count);
            let spec = pulse_spectrum(&w, 1.0, -1024..=1024).unwrap();
            let exact = pulse_mean_power(&w).unwrap();
            assert!((exact - 0.5).abs() < 1e-12);
            assert!(((spec.power() - exact) / exact).abs() < 1e-3, "M={count}");
        }
    }

    #[test]
    fn pulse_eval_is_quarter_shifted() {
        let w = sine(16);
        let s = 0.3;
        let h = ssb_pulse_eval(&w, s);
        assert_eq!(h.re, stairstep_eval(&w, 0.3));
        assert_eq!(h.im, stairstep_eval(&w, 0.05));
    }
}
