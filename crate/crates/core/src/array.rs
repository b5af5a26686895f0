//! Linear array geometry, harmonic beamsteering and array factors.
//!
//! Angles are measured from the array axis in degrees; broadside is 90.
//! Element `n` sits at `z_n = n d lambda_c` and its pulse is delayed by
//! `D_n`, which puts a progressive phase `-q omega0 D_n` on harmonic `q`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::haar::HaarCoefficients;
use crate::spectrum::{default_q_limit, pulse_coefficient, ssb_pulse_eval};
use crate::{Result, TmaError};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_CARRIER_HZ: f64 = 1e9;
pub const DEFAULT_SPACING_WAVELENGTHS: f64 = 0.5;
pub const DEFAULT_THETA_STEP_DEG: f64 = 0.1;

/// Uniform linear array of isotropic elements along `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    element_count: usize,
    spacing_wavelengths: f64,
    carrier_hz: f64,
}

impl ArrayGeometry {
    pub fn new(element_count: usize, spacing_wavelengths: f64, carrier_hz: f64) -> Result<Self> {
        if element_count == 0 {
            return Err(TmaError::domain("array needs at least one element"));
        }
        if !(spacing_wavelengths.is_finite() && spacing_wavelengths > 0.0) {
            return Err(TmaError::domain(format!(
                "element spacing must be positive, got {spacing_wavelengths}"
            )));
        }
        if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
            return Err(TmaError::domain(format!(
                "carrier frequency must be positive, got {carrier_hz}"
            )));
        }
        Ok(ArrayGeometry {
            element_count,
            spacing_wavelengths,
            carrier_hz,
        })
    }

    /// Half-wavelength spacing at the default carrier.
    pub fn half_wavelength(element_count: usize) -> Result<Self> {
        Self::new(element_count, DEFAULT_SPACING_WAVELENGTHS, DEFAULT_CARRIER_HZ)
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }

    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    /// `lambda_c = 2 pi c / omega_c`.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// `k = 2 pi / lambda_c`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength_m()
    }

    pub fn positions_m(&self) -> Vec<f64> {
        let pitch = self.spacing_wavelengths * self.wavelength_m();
        (0..self.element_count).map(|n| n as f64 * pitch).collect()
    }

    /// `exp(j k z_n cos(theta))` for every element.
    fn steering_vector(&self, theta_deg: f64) -> impl Iterator<Item = Complex64> + '_ {
        let step = 2.0 * PI * self.spacing_wavelengths * theta_deg.to_radians().cos();
        (0..self.element_count).map(move |n| Complex64::from_polar(1.0, n as f64 * step))
    }
}

/// Steering target and the per-element pulse delays that realize it.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringConfig {
    target_angle_deg: f64,
    fundamental_hz: f64,
    /// `f0 D_n`, each in `[0, 1)`.
    normalized_delays: Vec<f64>,
}

impl SteeringConfig {
    pub fn target_angle_deg(&self) -> f64 {
        self.target_angle_deg
    }

    pub fn fundamental_hz(&self) -> f64 {
        self.fundamental_hz
    }

    pub fn period_s(&self) -> f64 {
        1.0 / self.fundamental_hz
    }

    pub fn element_count(&self) -> usize {
        self.normalized_delays.len()
    }

    /// `D_n` in seconds, within `[0, T0)`.
    pub fn delays_s(&self) -> Vec<f64> {
        self.normalized_delays
            .iter()
            .map(|u| u / self.fundamental_hz)
            .collect()
    }

    /// `D_n / T0`, within `[0, 1)`.
    pub fn normalized_delays(&self) -> &[f64] {
        &self.normalized_delays
    }
}

/// Delays with `omega0 D_n = pi n cos(theta0)`, wrapped into `[0, T0)`.
pub fn steering_delays(theta0_deg: f64, element_count: usize, fundamental_hz: f64) -> Result<SteeringConfig> {
    if !(0.0..=180.0).contains(&theta0_deg) {
        return Err(TmaError::domain(format!(
            "steering angle {theta0_deg} outside [0, 180] degrees"
        )));
    }
    if element_count == 0 {
        return Err(TmaError::domain("array needs at least one element"));
    }
    if !(fundamental_hz.is_finite() && fundamental_hz > 0.0) {
        return Err(TmaError::domain(format!(
            "fundamental frequency must be positive, got {fundamental_hz}"
        )));
    }
    let cos0 = theta0_deg.to_radians().cos();
    let normalized_delays = (0..element_count)
        .map(|n| wrap_unit(0.5 * n as f64 * cos0))
        .collect();
    Ok(SteeringConfig {
        target_angle_deg: theta0_deg,
        fundamental_hz,
        normalized_delays,
    })
}

fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Complex weights `I_nq` of every element at harmonic `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicExcitations {
    harmonic: i64,
    values: Vec<Complex64>,
}

impl DynamicExcitations {
    /// Wraps externally computed weights; `label` identifies the row in a
    /// [`Pattern`].
    pub fn from_values(label: i64, values: Vec<Complex64>) -> Self {
        DynamicExcitations {
            harmonic: label,
            values,
        }
    }

    pub fn harmonic(&self) -> i64 {
        self.harmonic
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `I_nq = [ssb_gate(q) / sqrt(2)] c_q exp(-j q omega0 D_n)`.
pub fn dynamic_excitations(
    coeffs: &HaarCoefficients,
    steering: &SteeringConfig,
    q: i64,
) -> Result<DynamicExcitations> {
    let pulse = pulse_coefficient(coeffs, q)?;
    let values = steering
        .normalized_delays
        .iter()
        .map(|&u| pulse * Complex64::from_polar(1.0, -2.0 * PI * wrap_unit(q as f64 * u)))
        .collect();
    Ok(DynamicExcitations { harmonic: q, values })
}

/// `F_q(theta) = sum_n I_nq exp(j k z_n cos(theta))`, summed in ascending `n`.
pub fn array_factor(
    excitations: &DynamicExcitations,
    geometry: &ArrayGeometry,
    theta_deg: f64,
) -> Result<Complex64> {
    check_elements(geometry.element_count(), excitations.values.len())?;
    Ok(excitations
        .values
        .iter()
        .zip(geometry.steering_vector(theta_deg))
        .map(|(i, a)| i * a)
        .sum())
}

fn check_elements(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(TmaError::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Sampled harmonic patterns, normalized to the strongest sample of any
/// harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    angles_deg: Vec<f64>,
    harmonics: Vec<i64>,
    /// `fields[h][a]` is `F_{harmonics[h]}(angles_deg[a])`.
    fields: Vec<Vec<Complex64>>,
    peak_power: f64,
}

impl Pattern {
    /// Builds a pattern from precomputed fields, one row per harmonic.
    pub fn from_fields(angles_deg: Vec<f64>, harmonics: Vec<i64>, fields: Vec<Vec<Complex64>>) -> Result<Self> {
        check_elements(harmonics.len(), fields.len())?;
        for row in &fields {
            check_elements(angles_deg.len(), row.len())?;
        }
        let peak_power = fields
            .iter()
            .flatten()
            .map(|f| f.norm_sqr())
            .fold(0.0, f64::max);
        Ok(Pattern {
            angles_deg,
            harmonics,
            fields,
            peak_power,
        })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn harmonics(&self) -> &[i64] {
        &self.harmonics
    }

    pub fn field(&self, q: i64) -> Option<&[Complex64]> {
        let h = self.harmonics.iter().position(|&x| x == q)?;
        Some(&self.fields[h])
    }

    /// Largest `|F_q(theta)|^2` over all harmonics and angles.
    pub fn peak_power(&self) -> f64 {
        self.peak_power
    }

    /// `10 log10(|F_q|^2 / peak)`; `-inf` where the field vanishes.
    pub fn power_db(&self, q: i64) -> Option<Vec<f64>> {
        let field = self.field(q)?;
        Some(field.iter().map(|f| power_db(f.norm_sqr(), self.peak_power)).collect())
    }
}

pub(crate) fn power_db(power: f64, reference: f64) -> f64 {
    if power == 0.0 || reference == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (power / reference).log10()
    }
}

/// `0, step, 2 step, ...` up to 180 degrees.
pub fn theta_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg.is_finite() && step_deg > 0.0 && step_deg <= 180.0) {
        return Err(TmaError::domain(format!(
            "theta step must lie in (0, 180] degrees, got {step_deg}"
        )));
    }
    let count = (180.0 / step_deg + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| (i as f64 * step_deg * 1e9).round() / 1e9)
        .collect())
}

/// Harmonic 1 plus every harmonic in `|q| <= 2M + 2` whose pulse
/// coefficient is not suppressed.
pub fn default_q_list(coeffs: &HaarCoefficients) -> Result<Vec<i64>> {
    let limit = default_q_limit(coeffs.count());
    let reference = pulse_coefficient(coeffs, 1)?.norm();
    let mut list = Vec::new();
    for q in -limit..=limit {
        let c = pulse_coefficient(coeffs, q)?;
        if q == 1 || c.norm() > 1e-12 * reference {
            list.push(q);
        }
    }
    Ok(list)
}

/// Evaluates `F_q` over `theta_grid` for every `q` in `q_list`.
pub fn compute_pattern(
    coeffs: &HaarCoefficients,
    steering: &SteeringConfig,
    geometry: &ArrayGeometry,
    q_list: &[i64],
    theta_grid: &[f64],
) -> Result<Pattern> {
    if q_list.is_empty() {
        return Err(TmaError::domain("empty harmonic list"));
    }
    validate_grid(theta_grid)?;
    check_elements(geometry.element_count(), steering.element_count())?;
    let excitations = q_list
        .iter()
        .map(|&q| dynamic_excitations(coeffs, steering, q))
        .collect::<Result<Vec<_>>>()?;
    pattern_from_excitations(&excitations, geometry, theta_grid)
}

/// Pattern of a precomputed set of excitations, one row per entry.
pub fn pattern_from_excitations(
    excitations: &[DynamicExcitations],
    geometry: &ArrayGeometry,
    theta_grid: &[f64],
) -> Result<Pattern> {
    validate_grid(theta_grid)?;
    for e in excitations {
        check_elements(geometry.element_count(), e.values.len())?;
    }
    let per_angle: Vec<Vec<Complex64>> = theta_grid
        .par_iter()
        .map(|&theta| {
            excitations
                .iter()
                .map(|e| array_factor(e, geometry, theta).expect("lengths checked"))
                .collect()
        })
        .collect();
    let fields = (0..excitations.len())
        .map(|h| per_angle.iter().map(|row| row[h]).collect())
        .collect();
    Pattern::from_fields(
        theta_grid.to_vec(),
        excitations.iter().map(|e| e.harmonic).collect(),
        fields,
    )
}

fn validate_grid(theta_grid: &[f64]) -> Result<()> {
    if theta_grid.is_empty() {
        return Err(TmaError::domain("empty angle grid"));
    }
    if theta_grid.iter().any(|t| !(0.0..=180.0).contains(t)) {
        return Err(TmaError::domain("angle grid must lie within [0, 180] degrees"));
    }
    if theta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TmaError::domain("angle grid must be strictly increasing"));
    }
    Ok(())
}

/// Baseband field `(1/sqrt(2)) sum_n h(t - D_n) exp(j k z_n cos(theta))`,
/// evaluated directly from the stair-step.
pub fn time_domain_field(
    coeffs: &HaarCoefficients,
    steering: &SteeringConfig,
    geometry: &ArrayGeometry,
    theta_deg: f64,
    t_s: f64,
) -> Result<Complex64> {
    check_elements(geometry.element_count(), steering.element_count())?;
    let s = t_s * steering.fundamental_hz;
    let sum: Complex64 = steering
        .normalized_delays
        .iter()
        .zip(geometry.steering_vector(theta_deg))
        .map(|(&u, a)| ssb_pulse_eval(coeffs, s - u) * a)
        .sum();
    Ok(sum * FRAC_1_SQRT_2)
}

/// `sum_q F_q(theta) exp(j q omega0 t)` over every harmonic.
///
/// Harmonics are grouped into replica families `q0 + r M`. Within a family
/// the pulse coefficients differ only by the sample-and-hold kernel
/// `K(q) = exp(-j pi q / M) sinc(pi q / M)`, and the series
/// `sum_r K(q0 + r M) exp(j 2 pi (q0 + r M) x)` sums in closed form to
/// `exp(j 2 pi q0 floor(M x) / M)`. The family amplitudes come from the
/// baseband pulse coefficients `q0 = 0..M`.
pub fn harmonic_field(
    coeffs: &HaarCoefficients,
    steering: &SteeringConfig,
    geometry: &ArrayGeometry,
    theta_deg: f64,
    t_s: f64,
) -> Result<Complex64> {
    check_elements(geometry.element_count(), steering.element_count())?;
    let count = coeffs.count();
    let family = (0..count as i64)
        .map(|q0| Ok(pulse_coefficient(coeffs, q0)? / hold_kernel(q0, count)))
        .collect::<Result<Vec<_>>>()?;
    let s = t_s * steering.fundamental_hz;
    let sum: Complex64 = steering
        .normalized_delays
        .iter()
        .zip(geometry.steering_vector(theta_deg))
        .map(|(&u, a)| {
            let cell = ((s - u) * count as f64).floor().rem_euclid(count as f64) as i64;
            let value: Complex64 = family
                .iter()
                .zip(0i64..)
                .map(|(amp, q0)| {
                    let r = (q0 * cell).rem_euclid(count as i64) as f64 / count as f64;
                    amp * Complex64::from_polar(1.0, 2.0 * PI * r)
                })
                .sum();
            value * a
        })
        .sum();
    Ok(sum)
}

/// `M int_0^{1/M} exp(-j 2 pi q v) dv`.
fn hold_kernel(q: i64, count: usize) -> Complex64 {
    if q == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let x = PI * q as f64 / count as f64;
    Complex64::from_polar(x.sin() / x, -x)
}

/// `sum_{|q| <= q_max} F_q(theta) exp(j q omega0 t)`, a plain truncated series.
pub fn partial_harmonic_field(
    coeffs: &HaarCoefficients,
    steering: &SteeringConfig,
    geometry: &ArrayGeometry,
    theta_deg: f64,
    t_s: f64,
    q_max: i64,
) -> Result<Complex64> {
    let s = t_s * steering.fundamental_hz;
    let mut sum = Complex64::new(0.0, 0.0);
    for q in -q_max..=q_max {
        let e = dynamic_excitations(coeffs, steering, q)?;
        let f = array_factor(&e, geometry, theta_deg)?;
        sum += f * Complex64::from_polar(1.0, 2.0 * PI * wrap_unit(q as f64 * s));
    }
    Ok(sum)
}
