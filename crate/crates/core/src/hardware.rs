//! Compilation of Haar coefficients into feeding-network hardware.
//!
//! Each degree `l` of the Haar series is realized by one SPDT network driven
//! by a unit square wave at `2^l f0`. Slot `m` of that network carries the
//! attenuation `20 log10(|W(l,m)| / |W(0,1)|)` and the polarity of `W(l,m)`;
//! the `sqrt(2^l)` wavelet amplitude stays outside the attenuator.
//!
//! For a sine the slot ratios are the same whether the coefficients come
//! from the midpoint sums or from the continuous integrals: every midpoint
//! sum over a cell of width `1/M` equals the cell integral times the common
//! factor `sinc(pi / M)`. Plans therefore use the discrete coefficients,
//! which keeps schedule reconstruction exact.

use num_complex::Complex64;

use crate::array::{dynamic_excitations, pattern_from_excitations, steering_delays, ArrayGeometry, DynamicExcitations, SteeringConfig};
use crate::haar::{hdwt_forward, sample_sine, HaarCoefficients};
use crate::spectrum::{pulse_coefficient, ssb_pulse_eval, MEAN_TOLERANCE};
use crate::{Result, TmaError};

/// Coefficients at or below this magnitude leave their slot switched off.
pub const ACTIVITY_THRESHOLD: f64 = 1e-12;

/// Attenuation levels closer than this are the same attenuator setting.
pub const LEVEL_TOLERANCE_DB: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttenuatorKind {
    None,
    Fixed,
    Variable,
}

impl AttenuatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttenuatorKind::None => "none",
            AttenuatorKind::Fixed => "fixed",
            AttenuatorKind::Variable => "variable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Positive => 1.0,
            Polarity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        }
    }
}

/// The SPDT network realizing one degree of the Haar series.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeNetwork {
    pub degree: u32,
    pub active: bool,
    pub square_wave_hz: f64,
    pub attenuator: AttenuatorKind,
    /// Indexed by `m - 1`; empty when the network is inactive.
    pub slot_attenuation_db: Vec<f64>,
    pub slot_polarity: Vec<Polarity>,
}

impl DegreeNetwork {
    /// Distinct finite attenuation settings, strongest first.
    pub fn distinct_levels(&self) -> Vec<f64> {
        distinct_levels(&self.slot_attenuation_db)
    }
}

fn distinct_levels(levels: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = levels.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup_by(|a, b| (*a - *b).abs() <= LEVEL_TOLERANCE_DB);
    sorted
}

/// Feeding-network plan for one element type.
#[derive(Debug, Clone, PartialEq)]
pub struct BfnPlan {
    pub fundamental_hz: f64,
    pub resolution: u32,
    /// `|W(0,1)|`, the 0 dB reference.
    pub reference_amplitude: f64,
    pub networks: Vec<DegreeNetwork>,
}

impl BfnPlan {
    pub fn active_degrees(&self) -> Vec<u32> {
        self.networks
            .iter()
            .filter(|n| n.active)
            .map(|n| n.degree)
            .collect()
    }

    pub fn network(&self, degree: u32) -> Option<&DegreeNetwork> {
        self.networks.iter().find(|n| n.degree == degree)
    }
}

/// One network per degree, with activity, attenuator kind and slot levels.
pub fn plan_bfn(coeffs: &HaarCoefficients, fundamental_hz: f64) -> Result<BfnPlan> {
    if !(fundamental_hz.is_finite() && fundamental_hz > 0.0) {
        return Err(TmaError::domain(format!(
            "fundamental frequency must be positive, got {fundamental_hz}"
        )));
    }
    if !coeffs.count().is_multiple_of(4) {
        return Err(TmaError::domain("m must be divisible by 4"));
    }
    if coeffs.mean().abs() > MEAN_TOLERANCE {
        return Err(TmaError::domain(format!(
            "waveform has a dc term W0 = {:e}; the network has no dc branch",
            coeffs.mean()
        )));
    }
    let reference = coeffs.degree(0)[0].abs();
    if reference <= ACTIVITY_THRESHOLD {
        return Err(TmaError::domain("W(0,1) vanishes; no reference branch for attenuation levels"));
    }
    let networks = (0..coeffs.resolution())
        .map(|degree| {
            let weights = coeffs.degree(degree);
            let active = weights.iter().any(|w| w.abs() > ACTIVITY_THRESHOLD);
            let square_wave_hz = (1u64 << degree) as f64 * fundamental_hz;
            if !active {
                return DegreeNetwork {
                    degree,
                    active,
                    square_wave_hz,
                    attenuator: AttenuatorKind::None,
                    slot_attenuation_db: Vec::new(),
                    slot_polarity: Vec::new(),
                };
            }
            let (slot_attenuation_db, slot_polarity): (Vec<f64>, Vec<Polarity>) = weights
                .iter()
                .map(|&w| {
                    if w.abs() <= ACTIVITY_THRESHOLD {
                        (f64::NEG_INFINITY, Polarity::Positive)
                    } else {
                        let polarity = if w > 0.0 { Polarity::Positive } else { Polarity::Negative };
                        (20.0 * (w.abs() / reference).log10(), polarity)
                    }
                })
                .unzip();
            let levels = distinct_levels(&slot_attenuation_db);
            let attenuator = if levels.iter().all(|l| l.abs() <= LEVEL_TOLERANCE_DB) {
                AttenuatorKind::None
            } else if levels.len() == 1 {
                AttenuatorKind::Fixed
            } else {
                AttenuatorKind::Variable
            };
            DegreeNetwork {
                degree,
                active,
                square_wave_hz,
                attenuator,
                slot_attenuation_db,
                slot_polarity,
            }
        })
        .collect();
    Ok(BfnPlan {
        fundamental_hz,
        resolution: coeffs.resolution(),
        reference_amplitude: reference,
        networks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSlot {
    pub t_start_s: f64,
    /// May exceed the period for the one slot that wraps past `T0`.
    pub t_end_s: f64,
    pub attenuation_db: f64,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTimeline {
    pub degree: u32,
    pub square_wave_hz: f64,
    /// `2^(l+1)` half-slots sorted by start time.
    pub half_slots: Vec<HalfSlot>,
}

/// Switch timeline of one array element.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSchedule {
    pub element: usize,
    pub start_offset_s: f64,
    pub period_s: f64,
    pub networks: Vec<NetworkTimeline>,
}

impl SwitchSchedule {
    /// Rebuilds the modulating waveform at `t_s` from the timeline:
    /// `sum_l polarity 10^(dB/20) |W(0,1)| sqrt(2^l)` over the slots that
    /// contain `t_s`.
    pub fn waveform_at(&self, reference_amplitude: f64, t_s: f64) -> f64 {
        let mut value = 0.0;
        for network in &self.networks {
            let amp = ((1u64 << network.degree) as f64).sqrt();
            let slot = network.half_slots.iter().find(|slot| {
                (t_s - slot.t_start_s).rem_euclid(self.period_s) < slot.t_end_s - slot.t_start_s
            });
            if let Some(slot) = slot {
                value += slot.polarity.sign()
                    * 10f64.powf(slot.attenuation_db / 20.0)
                    * reference_amplitude
                    * amp;
            }
        }
        value
    }
}

/// Per-element timelines: every active network's half-slots delayed by
/// `D_n` and wrapped into one period.
pub fn switching_schedule(plan: &BfnPlan, steering: &SteeringConfig) -> Result<Vec<SwitchSchedule>> {
    let f0 = plan.fundamental_hz;
    if (steering.fundamental_hz() - f0).abs() > 1e-9 * f0 {
        return Err(TmaError::domain(format!(
            "plan fundamental {f0} Hz differs from steering fundamental {} Hz",
            steering.fundamental_hz()
        )));
    }
    let period = 1.0 / f0;
    Ok(steering
        .normalized_delays()
        .iter()
        .enumerate()
        .map(|(element, &delay)| {
            let networks = plan
                .networks
                .iter()
                .filter(|n| n.active)
                .map(|network| {
                    let halves = 1usize << (network.degree + 1);
                    let width = 1.0 / halves as f64;
                    let mut half_slots: Vec<HalfSlot> = (0..halves)
                        .map(|i| {
                            let m = i / 2;
                            let polarity = if i % 2 == 0 {
                                network.slot_polarity[m]
                            } else {
                                network.slot_polarity[m].flipped()
                            };
                            let start = (i as f64 * width + delay).rem_euclid(1.0);
                            let start = if start >= 1.0 { 0.0 } else { start };
                            HalfSlot {
                                t_start_s: start * period,
                                t_end_s: (start + width) * period,
                                attenuation_db: network.slot_attenuation_db[m],
                                polarity,
                            }
                        })
                        .collect();
                    half_slots.sort_by(|a, b| a.t_start_s.total_cmp(&b.t_start_s));
                    NetworkTimeline {
                        degree: network.degree,
                        square_wave_hz: network.square_wave_hz,
                        half_slots,
                    }
                })
                .collect();
            SwitchSchedule {
                element,
                start_offset_s: delay * period,
                period_s: period,
                networks,
            }
        })
        .collect())
}

/// Stair-step resolution of each beam in dual-beam mode.
pub const MULTIBEAM_COUNT: usize = 8;

/// Network degrees a dual-beam plan uses inside each beam.
pub const MULTIBEAM_LOGICAL_DEGREES: [u32; 2] = [0, 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamRequest {
    pub theta_deg: f64,
    pub fundamental_hz: f64,
    /// Relative drive level of this beam's pulse.
    pub amplitude: f64,
}

impl BeamRequest {
    pub fn new(theta_deg: f64, fundamental_hz: f64) -> Self {
        BeamRequest {
            theta_deg,
            fundamental_hz,
            amplitude: 1.0,
        }
    }
}

/// One beam of a dual-beam plan and the physical networks it occupies.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamAssignment {
    pub request: BeamRequest,
    pub coeffs: HaarCoefficients,
    pub plan: BfnPlan,
    pub steering: SteeringConfig,
    /// Networks of the `M = 32` hardware this beam runs on.
    pub physical_degrees: [u32; 2],
    /// Degrees those networks play inside the beam's `M = 8` plan.
    pub logical_degrees: [u32; 2],
}

/// Two independent `M = 8` beams sharing the `M = 32` feeding hardware:
/// beam A on networks `{0, 2}`, beam B on networks `{3, 4}` re-tasked as
/// degrees `{0, 2}` at its own fundamental.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibeamPlan {
    pub beam_a: BeamAssignment,
    pub beam_b: BeamAssignment,
}

/// A spectral line of the composite pulse at `offset_hz` from the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeLine {
    pub offset_hz: f64,
    /// `(beam index, harmonic of that beam)` for each contributing beam.
    pub sources: Vec<(usize, i64)>,
    pub excitations: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSummary {
    pub offset_hz: f64,
    pub main_lobe_deg: f64,
    /// Strongest other line carrying this beam, dB below its main beam.
    pub peak_sr_db: f64,
}

pub fn multibeam_plan(a: BeamRequest, b: BeamRequest, element_count: usize) -> Result<MultibeamPlan> {
    let scale = a.fundamental_hz.abs().max(b.fundamental_hz.abs());
    if (a.fundamental_hz - b.fundamental_hz).abs() <= 1e-12 * scale {
        return Err(TmaError::domain(
            "beams share a fundamental frequency and cannot be separated",
        ));
    }
    let coeffs = hdwt_forward(&sample_sine(MULTIBEAM_COUNT)?);
    let assign = |request: BeamRequest, physical_degrees: [u32; 2]| -> Result<BeamAssignment> {
        if !(request.amplitude.is_finite() && request.amplitude > 0.0) {
            return Err(TmaError::domain(format!(
                "beam amplitude must be positive, got {}",
                request.amplitude
            )));
        }
        let plan = plan_bfn(&coeffs, request.fundamental_hz)?;
        debug_assert_eq!(plan.active_degrees(), MULTIBEAM_LOGICAL_DEGREES);
        Ok(BeamAssignment {
            request,
            coeffs: coeffs.clone(),
            plan,
            steering: steering_delays(request.theta_deg, element_count, request.fundamental_hz)?,
            physical_degrees,
            logical_degrees: MULTIBEAM_LOGICAL_DEGREES,
        })
    };
    Ok(MultibeamPlan {
        beam_a: assign(a, [0, 2])?,
        beam_b: assign(b, [3, 4])?,
    })
}

impl MultibeamPlan {
    pub fn beams(&self) -> [&BeamAssignment; 2] {
        [&self.beam_a, &self.beam_b]
    }

    /// Composite baseband pulse of element `n`:
    /// `sum_beams amplitude h(f0 t - f0 D_n) / sqrt(2)`.
    pub fn element_pulse(&self, element: usize, t_s: f64) -> Complex64 {
        self.beams()
            .iter()
            .map(|beam| {
                let f0 = beam.request.fundamental_hz;
                let u = beam.steering.normalized_delays()[element];
                ssb_pulse_eval(&beam.coeffs, f0 * t_s - u)
                    * (beam.request.amplitude * std::f64::consts::FRAC_1_SQRT_2)
            })
            .sum()
    }

    /// Spectral lines of the composite pulse from each beam's harmonics in
    /// `|q| <= q_limit`; coincident lines are merged.
    pub fn composite_lines(&self, q_limit: i64) -> Result<Vec<CompositeLine>> {
        let mut lines: Vec<CompositeLine> = Vec::new();
        let scale = self.beam_a.request.fundamental_hz.max(self.beam_b.request.fundamental_hz);
        for (index, beam) in self.beams().iter().enumerate() {
            let reference = pulse_coefficient(&beam.coeffs, 1)?.norm();
            for q in -q_limit..=q_limit {
                if pulse_coefficient(&beam.coeffs, q)?.norm() <= 1e-12 * reference {
                    continue;
                }
                let offset_hz = q as f64 * beam.request.fundamental_hz;
                let excitations: Vec<Complex64> = dynamic_excitations(&beam.coeffs, &beam.steering, q)?
                    .values()
                    .iter()
                    .map(|v| v * beam.request.amplitude)
                    .collect();
                match lines
                    .iter_mut()
                    .find(|l| (l.offset_hz - offset_hz).abs() <= 1e-9 * scale)
                {
                    Some(line) => {
                        line.sources.push((index, q));
                        for (acc, v) in line.excitations.iter_mut().zip(excitations) {
                            *acc += v;
                        }
                    }
                    None => lines.push(CompositeLine {
                        offset_hz,
                        sources: vec![(index, q)],
                        excitations,
                    }),
                }
            }
        }
        lines.sort_by(|a, b| a.offset_hz.total_cmp(&b.offset_hz));
        Ok(lines)
    }

    /// Main-lobe direction and peak sideband level of each beam, read from
    /// the composite patterns.
    pub fn beam_summaries(
        &self,
        geometry: &ArrayGeometry,
        theta_grid: &[f64],
        q_limit: i64,
    ) -> Result<[BeamSummary; 2]> {
        let lines = self.composite_lines(q_limit)?;
        let excitations: Vec<DynamicExcitations> = lines
            .iter()
            .enumerate()
            .map(|(i, line)| DynamicExcitations::from_values(i as i64, line.excitations.clone()))
            .collect();
        let pattern = pattern_from_excitations(&excitations, geometry, theta_grid)?;
        let peak = |i: usize| -> (usize, f64) {
            pattern
                .field(i as i64)
                .expect("line present")
                .iter()
                .map(|f| f.norm_sqr())
                .enumerate()
                .fold((0, 0.0), |acc, (a, p)| if p > acc.1 { (a, p) } else { acc })
        };
        let summary = |beam: usize| -> Result<BeamSummary> {
            let main = lines
                .iter()
                .position(|l| l.sources.contains(&(beam, 1)))
                .ok_or_else(|| TmaError::domain("beam has no useful harmonic"))?;
            let (angle, main_power) = peak(main);
            let sr = lines
                .iter()
                .enumerate()
                .filter(|(i, l)| *i != main && l.sources.iter().any(|(b, _)| *b == beam))
                .map(|(i, _)| peak(i).1)
                .fold(0.0, f64::max);
            Ok(BeamSummary {
                offset_hz: lines[main].offset_hz,
                main_lobe_deg: theta_grid[angle],
                peak_sr_db: crate::array::power_db(sr, main_power),
            })
        };
        Ok([summary(0)?, summary(1)?])
    }
}
