//! Haar wavelets, the Haar matrix and the discrete Haar transform.
//!
//! Wavelets live on the normalized period `[0, 1)`. A wavelet of degree `l`
//! and order `m` is `+sqrt(2^l)` on the first half of
//! `[(m-1)/2^l, m/2^l]`, `-sqrt(2^l)` on the second half and zero elsewhere.
//!
//! Coefficients follow the finite-sum definition
//! `W0 = mean(f)` and `W(l,m) = mean(f * h(l,m))` over the `M = 2^p` sample
//! points, so a coefficient set of resolution `p` holds degrees `0..p`.
//! With rows of the Haar matrix scaled by `1/sqrt(M)`, the coefficient
//! vector is `H_M f / sqrt(M)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Result, TmaError};

/// Largest transform length computed through the dense matrix.
const DENSE_LIMIT: usize = 64;

/// Largest supported degree; keeps `2^degree` well inside `usize`.
pub const MAX_DEGREE: u32 = 30;

/// Degree and order of a Haar wavelet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HaarIndex {
    degree: u32,
    order: u32,
}

impl HaarIndex {
    /// Validates `1 <= order <= 2^degree`.
    pub fn new(degree: u32, order: u32) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(TmaError::domain(format!(
                "haar degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        if order == 0 || order > (1u32 << degree) {
            return Err(TmaError::domain(format!(
                "haar order {order} out of range 1..={} for degree {degree}",
                1u32 << degree
            )));
        }
        Ok(HaarIndex { degree, order })
    }

    pub fn degree(self) -> u32 {
        self.degree
    }

    pub fn order(self) -> u32 {
        self.order
    }

    /// Peak magnitude `sqrt(2^degree)`.
    pub fn amplitude(self) -> f64 {
        ((1u64 << self.degree) as f64).sqrt()
    }

    /// Start, midpoint and end of the support.
    pub fn support(self) -> (f64, f64, f64) {
        let scale = (1u64 << self.degree) as f64;
        let m = self.order as f64;
        ((m - 1.0) / scale, (m - 0.5) / scale, m / scale)
    }

    /// Position in the flattened coefficient vector `[W0, W01, W11, W12, ...]`.
    pub fn position(self) -> usize {
        (1usize << self.degree) + self.order as usize - 1
    }

    /// Every index of degree `0..resolution`, in coefficient-vector order.
    pub fn all(resolution: u32) -> impl Iterator<Item = HaarIndex> {
        (0..resolution).flat_map(|degree| {
            (1..=(1u32 << degree)).map(move |order| HaarIndex { degree, order })
        })
    }

    fn from_position(position: usize) -> HaarIndex {
        debug_assert!(position >= 1);
        let degree = usize::BITS - 1 - position.leading_zeros();
        let order = (position - (1usize << degree)) as u32 + 1;
        HaarIndex { degree, order }
    }
}

/// Evaluates a Haar wavelet at `t` in `[0, 1)`.
///
/// The first half of the support is closed on both ends and the second half
/// is left-open, so the midpoint of the support takes the positive value.
pub fn haar_wavelet_eval(index: HaarIndex, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(TmaError::domain(format!(
            "wavelet argument {t} outside [0, 1); reduce modulo the period first"
        )));
    }
    let (a, b, c) = index.support();
    let amp = index.amplitude();
    Ok(if a <= t && t <= b {
        amp
    } else if b < t && t <= c {
        -amp
    } else {
        0.0
    })
}

/// Where the `M` sample points sit inside each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingGrid {
    /// `x_k = (k - 1/2) / M`.
    #[default]
    Midpoint,
    /// `x_k = (k - 1) / M`.
    #[serde(rename = "left")]
    LeftEndpoint,
}

impl SamplingGrid {
    fn offset(self) -> f64 {
        match self {
            SamplingGrid::Midpoint => 0.5,
            SamplingGrid::LeftEndpoint => 0.0,
        }
    }

    /// Zero-based sample point `k` of an `M`-point grid.
    pub fn point(self, k: usize, count: usize) -> f64 {
        (k as f64 + self.offset()) / count as f64
    }
}

/// Returns `p` for `count = 2^p`, requiring `count >= 4`.
pub fn resolution_of(count: usize) -> Result<u32> {
    if count < 4 || !count.is_power_of_two() {
        return Err(TmaError::domain(format!(
            "m must be a power of two >= 4, got {count}"
        )));
    }
    Ok(count.trailing_zeros())
}

/// One period of a waveform sampled on an `M = 2^p` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSamples {
    values: Vec<f64>,
    grid: SamplingGrid,
}

impl WaveformSamples {
    pub fn new(values: Vec<f64>, grid: SamplingGrid) -> Result<Self> {
        resolution_of(values.len())?;
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(TmaError::domain(format!("non-finite sample value {bad}")));
        }
        Ok(WaveformSamples { values, grid })
    }

    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn resolution(&self) -> u32 {
        self.values.len().trailing_zeros()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> SamplingGrid {
        self.grid
    }

    /// Sample point `x_k` for zero-based `k`.
    pub fn point(&self, k: usize) -> f64 {
        self.grid.point(k, self.count())
    }

    /// Sample-and-hold value: cell `[k/M, (k+1)/M)` holds `values[k]`.
    pub fn hold(&self, t: f64) -> f64 {
        self.values[cell_of(t, self.count())]
    }
}

/// Zero-based cell index of `t mod 1` on an `M`-cell grid.
pub(crate) fn cell_of(t: f64, count: usize) -> usize {
    let s = t.rem_euclid(1.0);
    ((s * count as f64).floor() as usize).min(count - 1)
}

/// Samples `f` on the `M`-point grid.
pub fn sample_waveform(
    count: usize,
    grid: SamplingGrid,
    f: impl Fn(f64) -> f64,
) -> Result<WaveformSamples> {
    resolution_of(count)?;
    let values = (0..count).map(|k| f(grid.point(k, count))).collect();
    WaveformSamples::new(values, grid)
}

/// `sin(2 pi x_k)` on the midpoint grid.
pub fn sample_sine(count: usize) -> Result<WaveformSamples> {
    sample_sine_on(count, SamplingGrid::Midpoint)
}

pub fn sample_sine_on(count: usize, grid: SamplingGrid) -> Result<WaveformSamples> {
    sample_waveform(count, grid, |x| (2.0 * PI * x).sin())
}

/// Discrete Haar transform of one period: `W0` plus every `W(l,m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    mean: f64,
    /// `W(l,m)` at `position() - 1`.
    detail: Vec<f64>,
    resolution: u32,
    grid: SamplingGrid,
}

impl HaarCoefficients {
    /// Builds a coefficient set from `(index, value)` pairs; every index of
    /// degree `0..resolution` must appear exactly once.
    pub fn from_parts(
        mean: f64,
        detail: impl IntoIterator<Item = (HaarIndex, f64)>,
        resolution: u32,
        grid: SamplingGrid,
    ) -> Result<Self> {
        if !(2..=MAX_DEGREE).contains(&resolution) {
            return Err(TmaError::domain(format!(
                "resolution {resolution} outside 2..={MAX_DEGREE}"
            )));
        }
        let len = (1usize << resolution) - 1;
        let mut slots: Vec<Option<f64>> = vec![None; len];
        for (index, value) in detail {
            if index.degree() >= resolution {
                return Err(TmaError::domain(format!(
                    "coefficient {}.{} exceeds resolution {resolution}",
                    index.degree(),
                    index.order()
                )));
            }
            let slot = &mut slots[index.position() - 1];
            if slot.is_some() {
                return Err(TmaError::domain(format!(
                    "duplicate coefficient {}.{}",
                    index.degree(),
                    index.order()
                )));
            }
            *slot = Some(value);
        }
        let detail = slots
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    let index = HaarIndex::from_position(i + 1);
                    TmaError::domain(format!(
                        "missing coefficient {}.{}",
                        index.degree(),
                        index.order()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::checked(mean, detail, resolution, grid)
    }

    /// Builds from the flattened vector `[W0, W01, W11, W12, ...]`.
    pub fn from_vector(vector: &[f64], grid: SamplingGrid) -> Result<Self> {
        let resolution = resolution_of(vector.len())?;
        Self::checked(vector[0], vector[1..].to_vec(), resolution, grid)
    }

    fn checked(mean: f64, detail: Vec<f64>, resolution: u32, grid: SamplingGrid) -> Result<Self> {
        if !mean.is_finite() || detail.iter().any(|v| !v.is_finite()) {
            return Err(TmaError::domain("non-finite haar coefficient"));
        }
        Ok(HaarCoefficients {
            mean,
            detail,
            resolution,
            grid,
        })
    }

    /// `W0`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `p`; the highest degree present is `p - 1`.
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of samples `M = 2^p`.
    pub fn count(&self) -> usize {
        1usize << self.resolution
    }

    pub fn grid(&self) -> SamplingGrid {
        self.grid
    }

    /// `W(l,m)`, or `None` when the degree exceeds the resolution.
    pub fn detail(&self, index: HaarIndex) -> Option<f64> {
        (index.degree() < self.resolution).then(|| self.detail[index.position() - 1])
    }

    /// All coefficients of one degree, ordered by `m`.
    pub fn degree(&self, degree: u32) -> &[f64] {
        assert!(degree < self.resolution, "degree {degree} beyond resolution");
        let start = (1usize << degree) - 1;
        &self.detail[start..start + (1usize << degree)]
    }

    pub fn details(&self) -> impl Iterator<Item = (HaarIndex, f64)> + '_ {
        HaarIndex::all(self.resolution).zip(self.detail.iter().copied())
    }

    /// `[W0, W01, W11, W12, ...]`.
    pub fn to_vector(&self) -> Vec<f64> {
        std::iter::once(self.mean)
            .chain(self.detail.iter().copied())
            .collect()
    }
}

/// Orthogonal Haar matrix of order `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarMatrix {
    entries: DMatrix<f64>,
}

impl HaarMatrix {
    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Builds `H_M` by the Kronecker recursion
/// `H_M = [H_{M/2} (x) (1, 1) ; I_{M/2} (x) (1, -1)] / sqrt(2)`, `H_1 = [1]`.
pub fn haar_matrix(order: usize) -> Result<HaarMatrix> {
    if order == 0 || !order.is_power_of_two() || order > (1usize << MAX_DEGREE) {
        return Err(TmaError::domain(format!(
            "haar matrix order must be a power of two, got {order}"
        )));
    }
    let sum = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let diff = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
    let mut h = DMatrix::from_element(1, 1, 1.0);
    let mut size = 1;
    while size < order {
        let top = h.kronecker(&sum);
        let bottom = DMatrix::<f64>::identity(size, size).kronecker(&diff);
        let mut next = DMatrix::zeros(2 * size, 2 * size);
        next.rows_mut(0, size).copy_from(&top);
        next.rows_mut(size, size).copy_from(&bottom);
        h = next * std::f64::consts::FRAC_1_SQRT_2;
        size *= 2;
    }
    Ok(HaarMatrix { entries: h })
}

/// Forward transform; dense matrix product up to `M = 64`, pyramid above.
pub fn hdwt_forward(samples: &WaveformSamples) -> HaarCoefficients {
    if samples.count() <= DENSE_LIMIT {
        hdwt_forward_dense(samples)
    } else {
        hdwt_forward_fast(samples)
    }
}

/// `W = H_M f / sqrt(M)`.
pub fn hdwt_forward_dense(samples: &WaveformSamples) -> HaarCoefficients {
    let count = samples.count();
    let h = haar_matrix(count).expect("sample count is a power of two");
    let f = DVector::from_column_slice(samples.values());
    let w = (h.entries * f) / (count as f64).sqrt();
    HaarCoefficients {
        mean: w[0],
        detail: w.as_slice()[1..].to_vec(),
        resolution: samples.resolution(),
        grid: samples.grid(),
    }
}

/// `O(M)` pyramid of pairwise block means and half-differences.
pub fn hdwt_forward_fast(samples: &WaveformSamples) -> HaarCoefficients {
    let resolution = samples.resolution();
    let mut detail = vec![0.0; samples.count() - 1];
    let mut means = samples.values().to_vec();
    for degree in (0..resolution).rev() {
        let scale = 2.0 * ((1u64 << degree) as f64).sqrt();
        let base = (1usize << degree) - 1;
        let next: Vec<f64> = means
            .chunks_exact(2)
            .enumerate()
            .map(|(m, pair)| {
                detail[base + m] = (pair[0] - pair[1]) / scale;
                0.5 * (pair[0] + pair[1])
            })
            .collect();
        means = next;
    }
    HaarCoefficients {
        mean: means[0],
        detail,
        resolution,
        grid: samples.grid(),
    }
}

/// Inverse transform; exact inverse of [`hdwt_forward`].
pub fn hdwt_inverse(coeffs: &HaarCoefficients) -> WaveformSamples {
    if coeffs.count() <= DENSE_LIMIT {
        hdwt_inverse_dense(coeffs)
    } else {
        hdwt_inverse_fast(coeffs)
    }
}

/// `f = sqrt(M) H_M^T W`.
pub fn hdwt_inverse_dense(coeffs: &HaarCoefficients) -> WaveformSamples {
    let count = coeffs.count();
    let h = haar_matrix(count).expect("coefficient count is a power of two");
    let w = DVector::from_vec(coeffs.to_vector());
    let f = h.entries.tr_mul(&w) * (count as f64).sqrt();
    WaveformSamples {
        values: f.as_slice().to_vec(),
        grid: coeffs.grid,
    }
}

pub fn hdwt_inverse_fast(coeffs: &HaarCoefficients) -> WaveformSamples {
    let mut means = vec![coeffs.mean];
    for degree in 0..coeffs.resolution {
        let amp = ((1u64 << degree) as f64).sqrt();
        means = means
            .iter()
            .zip(coeffs.degree(degree))
            .flat_map(|(&mu, &w)| [mu + amp * w, mu - amp * w])
            .collect();
    }
    WaveformSamples {
        values: means,
        grid: coeffs.grid,
    }
}

/// Truncated Haar series `W0 + sum W(l,m) h(l,m)(t mod 1)`.
///
/// Half-supports are taken as `[a, b)` and `[b, c)` so the value on each
/// cell `[k/M, (k+1)/M)` is the held sample `f(x_k)`.
pub fn stairstep_eval(coeffs: &HaarCoefficients, t: f64) -> f64 {
    let s = t.rem_euclid(1.0);
    let s = if s >= 1.0 { 0.0 } else { s };
    let mut value = coeffs.mean;
    for degree in 0..coeffs.resolution {
        let scale = (1u64 << (degree + 1)) as f64;
        let half = (s * scale).floor() as usize;
        let w = coeffs.degree(degree)[half / 2];
        let amp = ((1u64 << degree) as f64).sqrt();
        value += if half.is_multiple_of(2) { amp * w } else { -amp * w };
    }
    value
}

/// `int_0^1 (sin(2 pi t) - stairstep(t))^2 dt`, in closed form per cell.
pub fn sine_squared_error(coeffs: &HaarCoefficients) -> f64 {
    let samples = hdwt_inverse(coeffs);
    let count = samples.count() as f64;
    let width = 1.0 / count;
    samples
        .values()
        .iter()
        .enumerate()
        .map(|(k, &level)| {
            let a = k as f64 * width;
            let b = a + width;
            let sin_sq = 0.5 * width - ((4.0 * PI * b).sin() - (4.0 * PI * a).sin()) / (8.0 * PI);
            let sin = ((2.0 * PI * a).cos() - (2.0 * PI * b).cos()) / (2.0 * PI);
            sin_sq - 2.0 * level * sin + level * level * width
        })
        .sum()
}

/// Continuous coefficient `int_0^1 sin(2 pi t) h(l,m)(t) dt`.
pub fn sine_haar_integral(index: HaarIndex) -> f64 {
    let (a, b, c) = index.support();
    let integral = |x: f64, y: f64| ((2.0 * PI * x).cos() - (2.0 * PI * y).cos()) / (2.0 * PI);
    index.amplitude() * (integral(a, b) - integral(b, c))
}
