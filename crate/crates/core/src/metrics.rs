//! Harmonic levels, peak sideband radiation, efficiencies and pattern
//! statistics.
//!
//! Harmonic 1 is the only useful harmonic. Every level here depends on
//! `|I_nq|` alone, which the steering delays do not change, so the metrics
//! are independent of the steering angle.

use std::ops::RangeInclusive;

use crate::array::{power_db, Pattern};
use crate::haar::HaarCoefficients;
use crate::spectrum::{default_q_limit, pulse_coefficient, pulse_mean_power};
use crate::{Result, TmaError};

/// Pulse coefficients below this fraction of the `q = 1` magnitude are
/// reported as suppressed.
pub const SUPPRESSION_FLOOR: f64 = 1e-12;

/// Level of one harmonic relative to the useful harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarmonicLevel {
    Db(f64),
    Suppressed,
}

impl HarmonicLevel {
    pub fn db(self) -> f64 {
        match self {
            HarmonicLevel::Db(v) => v,
            HarmonicLevel::Suppressed => f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicLevelReport {
    /// `|pulse coefficient at q = 1|^2`.
    pub reference_power: f64,
    pub rows: Vec<(i64, HarmonicLevel)>,
}

impl HarmonicLevelReport {
    pub fn level(&self, q: i64) -> Option<HarmonicLevel> {
        self.rows.iter().find(|(k, _)| *k == q).map(|(_, l)| *l)
    }
}

/// `20 log10(|c_q| / |c_1|)` for every `q` in the window.
pub fn harmonic_levels(coeffs: &HaarCoefficients, q_range: RangeInclusive<i64>) -> Result<HarmonicLevelReport> {
    let reference = pulse_coefficient(coeffs, 1)?.norm();
    if reference == 0.0 {
        return Err(TmaError::domain("no useful harmonic: the q = 1 coefficient is zero"));
    }
    let rows = q_range
        .map(|q| {
            let c = pulse_coefficient(coeffs, q)?.norm();
            let level = if c <= SUPPRESSION_FLOOR * reference {
                HarmonicLevel::Suppressed
            } else {
                HarmonicLevel::Db(20.0 * (c / reference).log10())
            };
            Ok((q, level))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HarmonicLevelReport {
        reference_power: reference * reference,
        rows,
    })
}

/// Symmetric default window `|q| <= 2M + 2`.
pub fn default_q_range(coeffs: &HaarCoefficients) -> RangeInclusive<i64> {
    let limit = default_q_limit(coeffs.count());
    -limit..=limit
}

/// Strongest unwanted harmonic in the window, in dB below harmonic 1.
/// Returns `-inf` when every other harmonic is suppressed.
pub fn peak_sideband_level(coeffs: &HaarCoefficients, q_range: RangeInclusive<i64>) -> Result<f64> {
    let report = harmonic_levels(coeffs, q_range)?;
    Ok(report
        .rows
        .iter()
        .filter(|(q, _)| *q != 1)
        .map(|(_, l)| l.db())
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    /// Useful-harmonic power over total pulse power.
    pub eta_tma: f64,
    /// Mean pulse power against a unit static excitation.
    pub eta_mod: f64,
    pub eta_total: f64,
    pub b_max_hz: f64,
}

/// Efficiencies of the switched feeding network.
///
/// Total power is the exact time average of `|h(t)|^2 / 2`, so no harmonic
/// truncation enters `eta_tma`.
pub fn efficiencies(coeffs: &HaarCoefficients, fundamental_hz: f64) -> Result<EfficiencyReport> {
    if !(fundamental_hz.is_finite() && fundamental_hz > 0.0) {
        return Err(TmaError::domain(format!(
            "fundamental frequency must be positive, got {fundamental_hz}"
        )));
    }
    let total = pulse_mean_power(coeffs)?;
    if total == 0.0 {
        return Err(TmaError::domain("pulse carries no power"));
    }
    let useful = pulse_coefficient(coeffs, 1)?.norm_sqr();
    let eta_tma = useful / total;
    let eta_mod = total;
    Ok(EfficiencyReport {
        eta_tma,
        eta_mod,
        eta_total: eta_tma * eta_mod,
        b_max_hz: max_bandwidth(coeffs.count(), fundamental_hz),
    })
}

/// Replica spacing `M f0` of the stair-step spectrum.
pub fn max_bandwidth(count: usize, fundamental_hz: f64) -> f64 {
    count as f64 * fundamental_hz
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternStats {
    pub main_lobe_deg: f64,
    /// Highest sidelobe relative to the main peak, dB.
    pub msll_db: f64,
}

/// Main-lobe direction and maximum sidelobe level of harmonic `q`.
///
/// The main lobe spans from the peak down to the nearest local minimum on
/// each side; sidelobes are the local maxima outside that span, grid ends
/// included.
pub fn pattern_stats(pattern: &Pattern, q: i64) -> Result<PatternStats> {
    let field = pattern
        .field(q)
        .ok_or_else(|| TmaError::domain(format!("harmonic {q} not present in pattern")))?;
    let power: Vec<f64> = field.iter().map(|f| f.norm_sqr()).collect();
    let (main, peak) = power
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, p)| if p > acc.1 { (i, p) } else { acc });
    if peak == 0.0 {
        return Err(TmaError::domain(format!("harmonic {q} pattern is identically zero")));
    }
    let mut left = main;
    while left > 0 && power[left - 1] <= power[left] {
        left -= 1;
    }
    let mut right = main;
    while right + 1 < power.len() && power[right + 1] <= power[right] {
        right += 1;
    }
    let last = power.len() - 1;
    let is_local_max = |i: usize| {
        (i == 0 || power[i] >= power[i - 1]) && (i == last || power[i] >= power[i + 1])
    };
    let sidelobe = (0..left)
        .chain(right + 1..power.len())
        .filter(|&i| is_local_max(i))
        .map(|i| power[i])
        .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))));
    let sidelobe = sidelobe.ok_or_else(|| {
        TmaError::domain(format!("harmonic {q} pattern has no sidelobe structure"))
    })?;
    Ok(PatternStats {
        main_lobe_deg: pattern.angles_deg()[main],
        msll_db: power_db(sidelobe, peak),
    })
}
