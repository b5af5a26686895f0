//! C interface to `tma_haar`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`TmaStatus`]; on failure `tma_last_error()` describes the
//! problem for the calling thread. Strings returned through out-pointers
//! are owned by the caller and released with `tma_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tma_haar::array::{array_factor, dynamic_excitations, steering_delays, ArrayGeometry, SteeringConfig};
use tma_haar::export;
use tma_haar::haar::{hdwt_forward, sample_sine, HaarCoefficients, SamplingGrid, WaveformSamples};
use tma_haar::hardware::{plan_bfn, switching_schedule};
use tma_haar::metrics::{default_q_range, efficiencies, peak_sideband_level};
use tma_haar::spectrum::pulse_coefficient;
use tma_haar::TmaError;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    LengthMismatch = 4,
    Panic = 5,
}

/// Haar coefficients of one modulating waveform.
pub struct TmaCoefficients {
    inner: HaarCoefficients,
    waveform: &'static str,
}

/// A waveform bound to an array and a steering direction.
pub struct TmaScene {
    coeffs: HaarCoefficients,
    geometry: ArrayGeometry,
    steering: SteeringConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TmaComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TmaEfficiency {
    pub eta_tma: f64,
    pub eta_mod: f64,
    pub eta_total: f64,
    pub b_max_hz: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

struct Failure(TmaStatus, String);

impl From<TmaError> for Failure {
    fn from(e: TmaError) -> Self {
        let status = match e {
            TmaError::LengthMismatch { .. } => TmaStatus::LengthMismatch,
            _ => TmaStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TmaStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TmaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            TmaStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TmaStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text)
        .expect("serialized text has no nul bytes")
        .into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tma_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Coefficients of `sin(2 pi t)` sampled at `m` cell midpoints.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_sine(m: usize, out: *mut *mut TmaCoefficients) -> TmaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = hdwt_forward(&sample_sine(m)?);
        let handle = TmaCoefficients {
            inner,
            waveform: "sine",
        };
        write(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Coefficients of an arbitrary midpoint-sampled waveform of `len` values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be valid for
/// a pointer write.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_from_samples(
    values: *const f64,
    len: usize,
    out: *mut *mut TmaCoefficients,
) -> TmaStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let slice = std::slice::from_raw_parts(values, len);
        let samples = WaveformSamples::new(slice.to_vec(), SamplingGrid::Midpoint)?;
        let handle = TmaCoefficients {
            inner: hdwt_forward(&samples),
            waveform: "custom",
        };
        write(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Releases a coefficient handle; null is ignored.
///
/// # Safety
/// `coeffs` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_free(coeffs: *mut TmaCoefficients) {
    if !coeffs.is_null() {
        drop(Box::from_raw(coeffs));
    }
}

/// Number of samples `M` the coefficients describe.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_count(coeffs: *const TmaCoefficients, out: *mut usize) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        write(out, c.inner.count(), "out")
    })
}

/// Copies `[W0, W(0,1), W(1,1), W(1,2), ...]` into `out`, which must hold
/// exactly `M` doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_vector(
    coeffs: *const TmaCoefficients,
    out: *mut f64,
    len: usize,
) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let vector = c.inner.to_vector();
        if vector.len() != len {
            return Err(TmaError::LengthMismatch {
                expected: vector.len(),
                actual: len,
            }
            .into());
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&vector);
        Ok(())
    })
}

/// Coefficients as a JSON document, written to `*out`.
///
/// # Safety
/// Pointers must be valid; free the string with `tma_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tma_coefficients_json(coeffs: *const TmaCoefficients, out: *mut *mut c_char) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = export::to_json_text(&export::coefficients_json(&c.inner, c.waveform));
        write(out, into_c_string(text), "out")
    })
}

/// Harmonic `q` of the normalized single-sideband pulse.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tma_pulse_coefficient(
    coeffs: *const TmaCoefficients,
    q: i64,
    out: *mut TmaComplex,
) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        let v = pulse_coefficient(&c.inner, q)?;
        write(out, TmaComplex { re: v.re, im: v.im }, "out")
    })
}

/// Strongest unwanted harmonic in `|q| <= 2M + 2`, dB below harmonic 1;
/// `-INFINITY` when all are suppressed.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tma_peak_sideband_db(coeffs: *const TmaCoefficients, out: *mut f64) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        let level = peak_sideband_level(&c.inner, default_q_range(&c.inner))?;
        write(out, level, "out")
    })
}

/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tma_efficiencies(
    coeffs: *const TmaCoefficients,
    f0_hz: f64,
    out: *mut TmaEfficiency,
) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        let e = efficiencies(&c.inner, f0_hz)?;
        write(
            out,
            TmaEfficiency {
                eta_tma: e.eta_tma,
                eta_mod: e.eta_mod,
                eta_total: e.eta_total,
                b_max_hz: e.b_max_hz,
            },
            "out",
        )
    })
}

/// Binds a copy of `coeffs` to a linear array steered to `theta0_deg`.
///
/// # Safety
/// `coeffs` must be a valid handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn tma_scene_new(
    coeffs: *const TmaCoefficients,
    elements: usize,
    spacing_wavelengths: f64,
    carrier_hz: f64,
    theta0_deg: f64,
    f0_hz: f64,
    out: *mut *mut TmaScene,
) -> TmaStatus {
    guard(|| {
        let c = deref(coeffs, "coeffs")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let geometry = ArrayGeometry::new(elements, spacing_wavelengths, carrier_hz)?;
        let steering = steering_delays(theta0_deg, elements, f0_hz)?;
        let scene = TmaScene {
            coeffs: c.inner.clone(),
            geometry,
            steering,
        };
        write(out, Box::into_raw(Box::new(scene)), "out")
    })
}

/// # Safety
/// `scene` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tma_scene_free(scene: *mut TmaScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Per-element switching delays in seconds; `len` must equal the element
/// count.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tma_scene_delays(scene: *const TmaScene, out: *mut f64, len: usize) -> TmaStatus {
    guard(|| {
        let s = deref(scene, "scene")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let delays = s.steering.delays_s();
        if delays.len() != len {
            return Err(TmaError::LengthMismatch {
                expected: delays.len(),
                actual: len,
            }
            .into());
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&delays);
        Ok(())
    })
}

/// Array factor of harmonic `q` toward `theta_deg`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tma_scene_array_factor(
    scene: *const TmaScene,
    q: i64,
    theta_deg: f64,
    out: *mut TmaComplex,
) -> TmaStatus {
    guard(|| {
        let s = deref(scene, "scene")?;
        if !(0.0..=180.0).contains(&theta_deg) {
            return Err(Failure(
                TmaStatus::InvalidArgument,
                format!("theta must lie in [0, 180] degrees, got {theta_deg}"),
            ));
        }
        let excitations = dynamic_excitations(&s.coeffs, &s.steering, q)?;
        let f = array_factor(&excitations, &s.geometry, theta_deg)?;
        write(out, TmaComplex { re: f.re, im: f.im }, "out")
    })
}

/// Feeding-network plan and per-element switch timelines as JSON.
///
/// # Safety
/// Pointers must be valid; free the string with `tma_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tma_scene_schedule_json(scene: *const TmaScene, out: *mut *mut c_char) -> TmaStatus {
    guard(|| {
        let s = deref(scene, "scene")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let plan = plan_bfn(&s.coeffs, s.steering.fundamental_hz())?;
        let schedules = switching_schedule(&plan, &s.steering)?;
        let text = export::to_json_text(&export::schedule_json(&plan, &schedules));
        write(out, into_c_string(text), "out")
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `text` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tma_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
