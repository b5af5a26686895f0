//! CSV and JSON renderings of coefficients, spectra, patterns, metrics and
//! schedules. Shared by the CLI and the C interface.
//!
//! Numbers are written with 15 significant digits and a decimal point;
//! infinite levels become the string `"-inf"`. Coefficient files are the
//! exception: they carry the shortest exact representation so that a file
//! read back yields bit-identical coefficients.

use serde_json::{json, Map, Value};

use crate::array::{ArrayGeometry, Pattern};
use crate::hardware::{BeamSummary, BfnPlan, MultibeamPlan, SwitchSchedule};
use crate::haar::{HaarCoefficients, HaarIndex, SamplingGrid};
use crate::metrics::{EfficiencyReport, HarmonicLevel, HarmonicLevelReport};
use crate::spectrum::PulseSpectrum;
use crate::{Result, TmaError};

const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to 15 significant digits; `-0.0` becomes `0.0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Text form with at most 15 significant digits, plain notation for
/// moderate exponents and `1.5e-7` style otherwise.
pub fn fmt_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = round_sig(x);
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// JSON value of a rounded number, or a string for non-finite values.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::String(fmt_number(x))
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

fn grid_name(grid: SamplingGrid) -> &'static str {
    match grid {
        SamplingGrid::Midpoint => "midpoint",
        SamplingGrid::LeftEndpoint => "left",
    }
}

/// `{waveform, m, grid, resolution, mean, detail: {"l.m": value}}`.
pub fn coefficients_json(coeffs: &HaarCoefficients, waveform: &str) -> Value {
    let detail: Map<String, Value> = coeffs
        .details()
        .map(|(index, value)| {
            (
                format!("{}.{}", index.degree(), index.order()),
                json!(clean_zero(value)),
            )
        })
        .collect();
    json!({
        "waveform": waveform,
        "m": coeffs.count(),
        "grid": grid_name(coeffs.grid()),
        "resolution": coeffs.resolution(),
        "mean": clean_zero(coeffs.mean()),
        "detail": detail,
    })
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Reads a document written by [`coefficients_json`].
pub fn parse_coefficients(text: &str) -> Result<HaarCoefficients> {
    let bad = |msg: String| TmaError::domain(format!("coefficients file: {msg}"));
    let value: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| bad("expected a JSON object".into()))?;
    for key in object.keys() {
        if !["waveform", "m", "grid", "resolution", "mean", "detail"].contains(&key.as_str()) {
            return Err(bad(format!("unknown key \"{key}\"")));
        }
    }
    let number = |key: &str| -> Result<f64> {
        object
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| bad(format!("\"{key}\" must be a number")))
    };
    let resolution = object
        .get("resolution")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("\"resolution\" must be a non-negative integer".into()))?;
    let resolution = u32::try_from(resolution).map_err(|_| bad("\"resolution\" too large".into()))?;
    let grid = match object.get("grid") {
        None => SamplingGrid::Midpoint,
        Some(g) => serde_json::from_value(g.clone())
            .map_err(|_| bad("\"grid\" must be \"midpoint\" or \"left\"".into()))?,
    };
    let detail = object
        .get("detail")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("\"detail\" must be an object".into()))?;
    let pairs = detail
        .iter()
        .map(|(key, value)| {
            let (l, m) = key
                .split_once('.')
                .ok_or_else(|| bad(format!("detail key \"{key}\" is not of the form l.m")))?;
            let l: u32 = l.parse().map_err(|_| bad(format!("detail key \"{key}\"")))?;
            let m: u32 = m.parse().map_err(|_| bad(format!("detail key \"{key}\"")))?;
            let v = value
                .as_f64()
                .ok_or_else(|| bad(format!("detail \"{key}\" must be a number")))?;
            Ok((HaarIndex::new(l, m)?, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs = HaarCoefficients::from_parts(number("mean")?, pairs, resolution, grid)?;
    if let Some(m) = object.get("m") {
        if m.as_u64() != Some(coeffs.count() as u64) {
            return Err(bad(format!("\"m\" = {m} disagrees with resolution {resolution}")));
        }
    }
    Ok(coeffs)
}

/// `q,re,im,magnitude,power_db_rel_q1`.
pub fn spectrum_csv(spectrum: &PulseSpectrum, levels: &HarmonicLevelReport) -> String {
    let mut out = String::from("q,re,im,magnitude,power_db_rel_q1\n");
    for (q, c) in spectrum.iter() {
        let level = levels
            .level(q)
            .map(HarmonicLevel::db)
            .unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{q},{},{},{},{}\n",
            fmt_number(c.re),
            fmt_number(c.im),
            fmt_number(c.norm()),
            fmt_number(level)
        ));
    }
    out
}

/// `theta_deg,q,re,im,power_db_norm`, harmonic-major.
pub fn pattern_csv(pattern: &Pattern) -> String {
    let mut out = String::from("theta_deg,q,re,im,power_db_norm\n");
    for &q in pattern.harmonics() {
        let field = pattern.field(q).expect("harmonic listed in pattern");
        let db = pattern.power_db(q).expect("harmonic listed in pattern");
        for ((theta, f), level) in pattern.angles_deg().iter().zip(field).zip(db) {
            out.push_str(&format!(
                "{},{q},{},{},{}\n",
                fmt_number(*theta),
                fmt_number(f.re),
                fmt_number(f.im),
                fmt_number(level)
            ));
        }
    }
    out
}

pub fn metrics_json(
    count: usize,
    fundamental_hz: f64,
    peak_sr_db: f64,
    efficiency: &EfficiencyReport,
    levels: &HarmonicLevelReport,
) -> Value {
    let table: Vec<Value> = levels
        .rows
        .iter()
        .map(|(q, level)| json!({"q": q, "level_db": json_number(level.db())}))
        .collect();
    json!({
        "m": count,
        "f0_hz": json_number(fundamental_hz),
        "peak_sr_db": json_number(peak_sr_db),
        "eta_tma": json_number(efficiency.eta_tma),
        "eta_mod": json_number(efficiency.eta_mod),
        "eta_total": json_number(efficiency.eta_total),
        "b_max_hz": json_number(efficiency.b_max_hz),
        "harmonic_levels": table,
    })
}

pub fn plan_json(plan: &BfnPlan) -> Value {
    let networks: Vec<Value> = plan
        .networks
        .iter()
        .map(|n| {
            json!({
                "degree": n.degree,
                "active": n.active,
                "square_wave_hz": json_number(n.square_wave_hz),
                "attenuator": n.attenuator.as_str(),
                "levels_db": n.distinct_levels().into_iter().map(json_number).collect::<Vec<_>>(),
                "slots": n.slot_attenuation_db.iter().zip(&n.slot_polarity).enumerate().map(|(i, (db, p))| {
                    json!({"m": i + 1, "attenuation_db": json_number(*db), "polarity": p.as_str()})
                }).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "f0_hz": json_number(plan.fundamental_hz),
        "resolution": plan.resolution,
        "reference_amplitude": json_number(plan.reference_amplitude),
        "networks": networks,
    })
}

fn schedules_value(schedules: &[SwitchSchedule]) -> Vec<Value> {
    schedules
        .iter()
        .map(|s| {
            let networks: Vec<Value> = s
                .networks
                .iter()
                .map(|n| {
                    let slots: Vec<Value> = n
                        .half_slots
                        .iter()
                        .map(|h| {
                            json!({
                                "t_start_s": json_number(h.t_start_s),
                                "t_end_s": json_number(h.t_end_s),
                                "attenuation_db": json_number(h.attenuation_db),
                                "polarity": h.polarity.as_str(),
                            })
                        })
                        .collect();
                    json!({
                        "degree": n.degree,
                        "square_wave_hz": json_number(n.square_wave_hz),
                        "half_slots": slots,
                    })
                })
                .collect();
            json!({
                "n": s.element,
                "start_offset_s": json_number(s.start_offset_s),
                "networks": networks,
            })
        })
        .collect()
}

/// `{f0_hz, elements: [...], plan}`.
pub fn schedule_json(plan: &BfnPlan, schedules: &[SwitchSchedule]) -> Value {
    json!({
        "f0_hz": json_number(plan.fundamental_hz),
        "elements": schedules_value(schedules),
        "plan": plan_json(plan),
    })
}

pub fn multibeam_json(
    plan: &MultibeamPlan,
    geometry: &ArrayGeometry,
    summaries: &[BeamSummary; 2],
    schedules: [&[SwitchSchedule]; 2],
) -> Value {
    let beams: Vec<Value> = plan
        .beams()
        .iter()
        .zip(summaries)
        .zip(schedules)
        .enumerate()
        .map(|(i, ((beam, summary), schedules))| {
            json!({
                "beam": if i == 0 { "a" } else { "b" },
                "theta_deg": json_number(beam.request.theta_deg),
                "f0_hz": json_number(beam.request.fundamental_hz),
                "amplitude": json_number(beam.request.amplitude),
                "physical_degrees": beam.physical_degrees,
                "logical_degrees": beam.logical_degrees,
                "offset_hz": json_number(summary.offset_hz),
                "main_lobe_deg": json_number(summary.main_lobe_deg),
                "peak_sr_db": json_number(summary.peak_sr_db),
                "elements": schedules_value(schedules),
            })
        })
        .collect();
    json!({
        "m": crate::hardware::MULTIBEAM_COUNT,
        "elements": geometry.element_count(),
        "spacing_wavelengths": json_number(geometry.spacing_wavelengths()),
        "beams": beams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{hdwt_forward, sample_sine};

    #[test]
    fn number_text() {
        assert_eq!(fmt_number(0.0), "0");
        assert_eq!(fmt_number(-0.0), "0");
        assert_eq!(fmt_number(110.0), "110");
        assert_eq!(fmt_number(0.1), "0.1");
        assert_eq!(fmt_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_number(3.2e7), "32000000");
        assert_eq!(fmt_number(1.5e-7), "1.5e-7");
        assert_eq!(fmt_number(-2.0e20), "-2e20");
        assert_eq!(fmt_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_number(0.1 + 0.2), "0.3");
    }

    #[test]
    fn rounding_keeps_fifteen_digits() {
        let x = std::f64::consts::PI;
        assert_eq!(round_sig(x).to_string(), "3.14159265358979");
        assert_eq!(json_number(f64::NEG_INFINITY), Value::String("-inf".into()));
    }

    #[test]
    fn coefficient_file_round_trip() {
        let w = hdwt_forward(&sample_sine(32).unwrap());
        let text = to_json_text(&coefficients_json(&w, "sine"));
        let back = parse_coefficients(&text).unwrap();
        assert_eq!(back, w);
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["resolution"], 5);
        assert!(value["detail"].get("4.16").is_some());
    }

    #[test]
    fn coefficient_file_errors() {
        assert!(parse_coefficients("[]").is_err());
        assert!(parse_coefficients(r#"{"resolution": 2, "mean": 0, "detail": {"0.1": 1, "1.1": 0}}"#).is_err());
        assert!(parse_coefficients(r#"{"resolution": 2, "mean": 0, "bogus": 1, "detail": {}}"#).is_err());
        let ok = r#"{"resolution": 2, "mean": 0, "detail": {"0.1": 1, "1.1": 0, "1.2": 0}}"#;
        assert_eq!(parse_coefficients(ok).unwrap().count(), 4);
    }
}
