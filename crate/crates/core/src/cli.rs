//! Command-line front end.
//!
//! Every command reads a flat JSON config file (`--config`) and/or flags
//! that mirror its keys one to one; flags win. Output goes to `--out` (via
//! a temporary file renamed on success) or to stdout.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3
//! numerical-domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::array::{
    compute_pattern, default_q_list, steering_delays, theta_grid, ArrayGeometry, DEFAULT_CARRIER_HZ,
    DEFAULT_SPACING_WAVELENGTHS, DEFAULT_THETA_STEP_DEG,
};
use crate::export;
use crate::hardware::{multibeam_plan, plan_bfn, switching_schedule, BeamRequest};
use crate::haar::{hdwt_forward, resolution_of, sample_sine_on, HaarCoefficients, SamplingGrid};
use crate::metrics::{default_q_range, efficiencies, harmonic_levels, peak_sideband_level};
use crate::spectrum::pulse_spectrum;
use crate::TmaError;

pub const DEFAULT_M: usize = 32;
pub const DEFAULT_ELEMENTS: usize = 16;
pub const DEFAULT_THETA0_DEG: f64 = 110.0;
pub const DEFAULT_F0_HZ: f64 = 1e6;
pub const DEFAULT_THETA_B_DEG: f64 = 70.0;
/// Beam B's fundamental relative to beam A's when `f0_b` is not given.
pub const DEFAULT_F0_B_RATIO: f64 = 4.0;
/// Harmonic window of the composite dual-beam spectrum.
pub const MULTIBEAM_Q_LIMIT: i64 = 18;

#[derive(Debug, Parser)]
#[command(name = "tma-haar", version, about = "Haar stair-step time-modulated array simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Haar coefficients of the sampled waveform (JSON).
    Synthesize(Flags),
    /// SSB pulse spectrum (CSV).
    Spectrum(Flags),
    /// Harmonic array patterns (CSV).
    Pattern(Flags),
    /// Sideband levels, efficiencies and bandwidth (JSON).
    Metrics(Flags),
    /// Feeding-network plan and per-element switch timelines (JSON).
    Schedule(Flags),
    /// Two independent beams on shared hardware (JSON).
    Multibeam(Flags),
}

/// Flags mirror the config-file keys; hyphens stand for underscores.
#[derive(Debug, Default, Clone, Args)]
#[command(allow_negative_numbers = true)]
struct Flags {
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    waveform: Option<String>,
    #[arg(long)]
    elements: Option<usize>,
    /// Element spacing in carrier wavelengths.
    #[arg(long)]
    spacing: Option<f64>,
    /// Steering angle, degrees from the array axis.
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    carrier: Option<f64>,
    #[arg(long)]
    q_min: Option<i64>,
    #[arg(long)]
    q_max: Option<i64>,
    /// Comma-separated harmonics for `pattern`.
    #[arg(long, value_delimiter = ',')]
    q_list: Option<Vec<i64>>,
    #[arg(long)]
    theta_step: Option<f64>,
    /// `midpoint` or `left`.
    #[arg(long)]
    grid: Option<String>,
    /// Coefficients file from `synthesize`, used instead of sampling.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    theta_b: Option<f64>,
    #[arg(long)]
    f0_b: Option<f64>,
    #[arg(long)]
    amplitude_a: Option<f64>,
    #[arg(long)]
    amplitude_b: Option<f64>,
}

/// Config values before defaults, from a file or from flags.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct PartialConfig {
    pub m: Option<usize>,
    pub waveform: Option<String>,
    pub elements: Option<usize>,
    pub spacing: Option<f64>,
    pub theta0: Option<f64>,
    pub f0: Option<f64>,
    pub carrier: Option<f64>,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
    pub q_list: Option<Vec<i64>>,
    pub theta_step: Option<f64>,
    pub grid: Option<String>,
    pub coeffs: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub theta_b: Option<f64>,
    pub f0_b: Option<f64>,
    pub amplitude_a: Option<f64>,
    pub amplitude_b: Option<f64>,
}

impl From<Flags> for PartialConfig {
    fn from(f: Flags) -> Self {
        PartialConfig {
            m: f.m,
            waveform: f.waveform,
            elements: f.elements,
            spacing: f.spacing,
            theta0: f.theta0,
            f0: f.f0,
            carrier: f.carrier,
            q_min: f.q_min,
            q_max: f.q_max,
            q_list: f.q_list,
            theta_step: f.theta_step,
            grid: f.grid,
            coeffs: f.coeffs,
            out: f.out,
            theta_b: f.theta_b,
            f0_b: f.f0_b,
            amplitude_a: f.amplitude_a,
            amplitude_b: f.amplitude_b,
        }
    }
}

fn key_error(key: &str, what: &str) -> CliError {
    CliError::Config(format!("config key \"{key}\": expected {what}"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| key_error(key, "a number"))
}

fn as_usize(key: &str, v: &Value) -> Result<usize, CliError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| key_error(key, "a non-negative integer"))
}

fn as_i64(key: &str, v: &Value) -> Result<i64, CliError> {
    v.as_i64().ok_or_else(|| key_error(key, "an integer"))
}

fn as_string(key: &str, v: &Value) -> Result<String, CliError> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| key_error(key, "a string"))
}

impl PartialConfig {
    /// Parses a flat JSON object; unknown keys and mistyped values are
    /// rejected by name.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("config file is not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(CliError::Config("config file must hold a JSON object".into()));
        };
        Self::from_map(&map)
    }

    fn from_map(map: &Map<String, Value>) -> Result<Self, CliError> {
        let mut c = PartialConfig::default();
        for (key, v) in map {
            let k = key.as_str();
            match k {
                "m" => c.m = Some(as_usize(k, v)?),
                "waveform" => c.waveform = Some(as_string(k, v)?),
                "elements" => c.elements = Some(as_usize(k, v)?),
                "spacing" => c.spacing = Some(as_f64(k, v)?),
                "theta0" => c.theta0 = Some(as_f64(k, v)?),
                "f0" => c.f0 = Some(as_f64(k, v)?),
                "carrier" => c.carrier = Some(as_f64(k, v)?),
                "q_min" => c.q_min = Some(as_i64(k, v)?),
                "q_max" => c.q_max = Some(as_i64(k, v)?),
                "q_list" => {
                    let list = v.as_array().ok_or_else(|| key_error(k, "an array of integers"))?;
                    c.q_list = Some(list.iter().map(|q| as_i64(k, q)).collect::<Result<_, _>>()?);
                }
                "theta_step" => c.theta_step = Some(as_f64(k, v)?),
                "grid" => c.grid = Some(as_string(k, v)?),
                "coeffs" => c.coeffs = Some(as_string(k, v)?.into()),
                "out" => c.out = Some(as_string(k, v)?.into()),
                "theta_b" => c.theta_b = Some(as_f64(k, v)?),
                "f0_b" => c.f0_b = Some(as_f64(k, v)?),
                "amplitude_a" => c.amplitude_a = Some(as_f64(k, v)?),
                "amplitude_b" => c.amplitude_b = Some(as_f64(k, v)?),
                _ => return Err(CliError::Config(format!("unknown config key \"{key}\""))),
            }
        }
        Ok(c)
    }

    /// Values set in `overrides` replace those in `self`.
    pub fn merge(self, overrides: PartialConfig) -> PartialConfig {
        PartialConfig {
            m: overrides.m.or(self.m),
            waveform: overrides.waveform.or(self.waveform),
            elements: overrides.elements.or(self.elements),
            spacing: overrides.spacing.or(self.spacing),
            theta0: overrides.theta0.or(self.theta0),
            f0: overrides.f0.or(self.f0),
            carrier: overrides.carrier.or(self.carrier),
            q_min: overrides.q_min.or(self.q_min),
            q_max: overrides.q_max.or(self.q_max),
            q_list: overrides.q_list.or(self.q_list),
            theta_step: overrides.theta_step.or(self.theta_step),
            grid: overrides.grid.or(self.grid),
            coeffs: overrides.coeffs.or(self.coeffs),
            out: overrides.out.or(self.out),
            theta_b: overrides.theta_b.or(self.theta_b),
            f0_b: overrides.f0_b.or(self.f0_b),
            amplitude_a: overrides.amplitude_a.or(self.amplitude_a),
            amplitude_b: overrides.amplitude_b.or(self.amplitude_b),
        }
    }

    /// Applies defaults and validates every field.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let m = self.m.unwrap_or(DEFAULT_M);
        if resolution_of(m).is_err() {
            return Err(CliError::Config("m must be a power of two ≥ 4".into()));
        }
        let waveform = self.waveform.unwrap_or_else(|| "sine".into());
        if waveform != "sine" {
            return Err(CliError::Config(format!(
                "waveform: unsupported waveform \"{waveform}\" (only \"sine\")"
            )));
        }
        let grid = match self.grid.as_deref() {
            None | Some("midpoint") => SamplingGrid::Midpoint,
            Some("left") => SamplingGrid::LeftEndpoint,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "grid: expected \"midpoint\" or \"left\", got \"{other}\""
                )))
            }
        };
        let elements = self.elements.unwrap_or(DEFAULT_ELEMENTS);
        if elements == 0 {
            return Err(CliError::Config("elements must be at least 1".into()));
        }
        let positive = |key: &str, v: f64| -> Result<f64, CliError> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(CliError::Config(format!("{key} must be a positive number, got {v}")))
            }
        };
        let angle = |key: &str, v: f64| -> Result<f64, CliError> {
            if (0.0..=180.0).contains(&v) {
                Ok(v)
            } else {
                Err(CliError::Config(format!("{key} must lie in [0, 180] degrees, got {v}")))
            }
        };
        let spacing = positive("spacing", self.spacing.unwrap_or(DEFAULT_SPACING_WAVELENGTHS))?;
        let theta0 = angle("theta0", self.theta0.unwrap_or(DEFAULT_THETA0_DEG))?;
        let f0 = positive("f0", self.f0.unwrap_or(DEFAULT_F0_HZ))?;
        let carrier = positive("carrier", self.carrier.unwrap_or(DEFAULT_CARRIER_HZ))?;
        let theta_step = positive("theta_step", self.theta_step.unwrap_or(DEFAULT_THETA_STEP_DEG))?;
        if theta_step > 180.0 {
            return Err(CliError::Config(format!(
                "theta_step must not exceed 180 degrees, got {theta_step}"
            )));
        }
        if let (Some(lo), Some(hi)) = (self.q_min, self.q_max) {
            if lo > hi {
                return Err(CliError::Config(format!("q_min ({lo}) exceeds q_max ({hi})")));
            }
        }
        if matches!(&self.q_list, Some(list) if list.is_empty()) {
            return Err(CliError::Config("q_list must not be empty".into()));
        }
        let theta_b = angle("theta_b", self.theta_b.unwrap_or(DEFAULT_THETA_B_DEG))?;
        let f0_b = positive("f0_b", self.f0_b.unwrap_or(DEFAULT_F0_B_RATIO * f0))?;
        let amplitude_a = positive("amplitude_a", self.amplitude_a.unwrap_or(1.0))?;
        let amplitude_b = positive("amplitude_b", self.amplitude_b.unwrap_or(1.0))?;
        Ok(RunConfig {
            m,
            m_explicit: self.m.is_some(),
            waveform,
            elements,
            spacing_wavelengths: spacing,
            theta0_deg: theta0,
            f0_hz: f0,
            carrier_hz: carrier,
            q_min: self.q_min,
            q_max: self.q_max,
            q_list: self.q_list,
            theta_step_deg: theta_step,
            grid,
            coeffs_path: self.coeffs,
            output_path: self.out,
            theta_b_deg: theta_b,
            f0_b_hz: f0_b,
            amplitude_a,
            amplitude_b,
        })
    }
}

/// Fully defaulted and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    m_explicit: bool,
    pub waveform: String,
    pub elements: usize,
    pub spacing_wavelengths: f64,
    pub theta0_deg: f64,
    pub f0_hz: f64,
    pub carrier_hz: f64,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
    pub q_list: Option<Vec<i64>>,
    pub theta_step_deg: f64,
    pub grid: SamplingGrid,
    pub coeffs_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub theta_b_deg: f64,
    pub f0_b_hz: f64,
    pub amplitude_a: f64,
    pub amplitude_b: f64,
}

/// Reads the optional config file and lays `flags` over it.
pub fn load_config(path: Option<&Path>, flags: PartialConfig) -> Result<RunConfig, CliError> {
    let base = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config file {}: {e}", p.display()))
            })?;
            PartialConfig::from_json(&text)?
        }
        None => PartialConfig::default(),
    };
    base.merge(flags).resolve()
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] TmaError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr as one line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{line}");
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("TMA_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "TMA_THREADS must be a positive integer, got \"{v}\""
            ))),
        },
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let (kind, flags) = match command {
        Command::Synthesize(f) => (Kind::Synthesize, f),
        Command::Spectrum(f) => (Kind::Spectrum, f),
        Command::Pattern(f) => (Kind::Pattern, f),
        Command::Metrics(f) => (Kind::Metrics, f),
        Command::Schedule(f) => (Kind::Schedule, f),
        Command::Multibeam(f) => (Kind::Multibeam, f),
    };
    let path = flags.config.clone();
    let config = load_config(path.as_deref(), flags.into())?;
    let cap = thread_cap()?;
    let output = match cap {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))?
            .install(|| render(kind, &config))?,
        None => render(kind, &config)?,
    };
    write_output(config.output_path.as_deref(), &output)
}

/// The six commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Synthesize,
    Spectrum,
    Pattern,
    Metrics,
    Schedule,
    Multibeam,
}

/// Coefficients from `--coeffs` or from sampling the configured waveform.
pub fn obtain_coefficients(config: &RunConfig) -> Result<HaarCoefficients, CliError> {
    match &config.coeffs_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read coefficients file {}: {e}", path.display()))
            })?;
            let coeffs = export::parse_coefficients(&text)
                .map_err(|e| CliError::Config(format!("coeffs: {e}")))?;
            if config.m_explicit && coeffs.count() != config.m {
                return Err(CliError::Config(format!(
                    "m = {} conflicts with the coefficients file (m = {})",
                    config.m,
                    coeffs.count()
                )));
            }
            Ok(coeffs)
        }
        None => Ok(hdwt_forward(&sample_sine_on(config.m, config.grid)?)),
    }
}

fn q_window(config: &RunConfig, coeffs: &HaarCoefficients) -> std::ops::RangeInclusive<i64> {
    let default = default_q_range(coeffs);
    let lo = config.q_min.unwrap_or(*default.start());
    let hi = config.q_max.unwrap_or(*default.end());
    lo..=hi.max(lo)
}

/// Output text of `kind` for `config`.
pub fn render(kind: Kind, config: &RunConfig) -> Result<String, CliError> {
    if kind == Kind::Multibeam {
        return render_multibeam(config);
    }
    let coeffs = obtain_coefficients(config)?;
    let text = match kind {
        Kind::Synthesize => export::to_json_text(&export::coefficients_json(&coeffs, &config.waveform)),
        Kind::Spectrum => {
            let window = q_window(config, &coeffs);
            let spectrum = pulse_spectrum(&coeffs, config.f0_hz, window.clone())?;
            let levels = harmonic_levels(&coeffs, window)?;
            export::spectrum_csv(&spectrum, &levels)
        }
        Kind::Pattern => {
            let geometry = ArrayGeometry::new(config.elements, config.spacing_wavelengths, config.carrier_hz)?;
            let steering = steering_delays(config.theta0_deg, config.elements, config.f0_hz)?;
            let q_list = match &config.q_list {
                Some(list) => list.clone(),
                None => default_q_list(&coeffs)?,
            };
            let grid = theta_grid(config.theta_step_deg)?;
            let pattern = compute_pattern(&coeffs, &steering, &geometry, &q_list, &grid)?;
            export::pattern_csv(&pattern)
        }
        Kind::Metrics => {
            let window = q_window(config, &coeffs);
            let levels = harmonic_levels(&coeffs, window.clone())?;
            let peak = peak_sideband_level(&coeffs, window)?;
            let efficiency = efficiencies(&coeffs, config.f0_hz)?;
            export::to_json_text(&export::metrics_json(
                coeffs.count(),
                config.f0_hz,
                peak,
                &efficiency,
                &levels,
            ))
        }
        Kind::Schedule => {
            let plan = plan_bfn(&coeffs, config.f0_hz)?;
            let steering = steering_delays(config.theta0_deg, config.elements, config.f0_hz)?;
            let schedules = switching_schedule(&plan, &steering)?;
            export::to_json_text(&export::schedule_json(&plan, &schedules))
        }
        Kind::Multibeam => unreachable!("handled above"),
    };
    Ok(text)
}

fn render_multibeam(config: &RunConfig) -> Result<String, CliError> {
    let a = BeamRequest {
        theta_deg: config.theta0_deg,
        fundamental_hz: config.f0_hz,
        amplitude: config.amplitude_a,
    };
    let b = BeamRequest {
        theta_deg: config.theta_b_deg,
        fundamental_hz: config.f0_b_hz,
        amplitude: config.amplitude_b,
    };
    let plan = multibeam_plan(a, b, config.elements)?;
    let geometry = ArrayGeometry::new(config.elements, config.spacing_wavelengths, config.carrier_hz)?;
    let grid = theta_grid(config.theta_step_deg)?;
    let summaries = plan.beam_summaries(&geometry, &grid, MULTIBEAM_Q_LIMIT)?;
    let schedule_a = switching_schedule(&plan.beam_a.plan, &plan.beam_a.steering)?;
    let schedule_b = switching_schedule(&plan.beam_b.plan, &plan.beam_b.steering)?;
    Ok(export::to_json_text(&export::multibeam_json(
        &plan,
        &geometry,
        &summaries,
        [&schedule_a, &schedule_b],
    )))
}

/// Writes to `path` through a sibling temporary file, or to stdout.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let io = |what: &str, e: std::io::Error| CliError::Io(format!("{what}: {e}"));
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(contents.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| io("cannot write to stdout", e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let target = path.display().to_string();
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(&format!("cannot write {target}"), e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.flush())
        .map_err(|e| io(&format!("cannot write {target}"), e))?;
    tmp.persist(path)
        .map_err(|e| io(&format!("cannot write {target}"), e.error))?;
    Ok(())
}
