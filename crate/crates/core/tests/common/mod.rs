//! Reference computations built from raw samples and textbook formulas,
//! without going through the library's Haar machinery.

#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

/// `sin(2 pi x_k)` on the midpoint grid.
pub fn sine_samples(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| (2.0 * PI * (k as f64 + 0.5) / count as f64).sin())
        .collect()
}

/// Value held on the cell containing `s mod 1`.
pub fn hold(samples: &[f64], s: f64) -> f64 {
    let m = samples.len();
    let r = s.rem_euclid(1.0);
    samples[((r * m as f64).floor() as usize).min(m - 1)]
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Zero-order-hold Fourier coefficient of the stair-step:
/// `(1/M) exp(-j pi q / M) sinc(pi q / M) sum_k f_k exp(-j 2 pi q k / M)`.
pub fn zoh_coefficient(samples: &[f64], q: i64) -> Complex64 {
    let m = samples.len() as i64;
    let dft: Complex64 = samples
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let r = (q * k as i64).rem_euclid(m) as f64 / m as f64;
            f * Complex64::from_polar(1.0, -2.0 * PI * r)
        })
        .sum();
    let x = PI * q as f64 / m as f64;
    dft * Complex64::from_polar(sinc(x), -x) / m as f64
}

/// Fourier coefficient from an `L = oversample * M` point DFT of the
/// stair-step sampled at sub-cell midpoints. Midpoint sampling of a
/// piecewise-constant signal multiplies each line by `1 / sinc(pi q / L)`,
/// which is undone here.
pub fn dft_coefficient(samples: &[f64], q: i64, oversample: usize) -> Complex64 {
    let l = samples.len() * oversample;
    let two_l = 2 * l as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..l {
        let f = samples[i / oversample];
        // exp(-j 2 pi q (i + 1/2) / L) with the phase reduced in integers
        let r = (q * (2 * i as i64 + 1)).rem_euclid(two_l) as f64 / two_l as f64;
        sum += f * Complex64::from_polar(1.0, -2.0 * PI * r);
    }
    sum / l as f64 * sinc(PI * q as f64 / l as f64)
}

/// `1 - (-j)^(q+1)` by complex powers.
pub fn gate(q: i64) -> Complex64 {
    Complex64::new(1.0, 0.0) - Complex64::new(0.0, -1.0).powi((q + 1) as i32)
}

/// Normalized SSB pulse harmonic `gate(q) c_q / sqrt(2)` of the stair-step.
pub fn pulse_oracle(samples: &[f64], q: i64) -> Complex64 {
    gate(q) * zoh_coefficient(samples, q) * FRAC_1_SQRT_2
}

/// `u_n = (n cos(theta0) / 2) mod 1`.
pub fn normalized_delays(theta0_deg: f64, count: usize) -> Vec<f64> {
    let c = theta0_deg.to_radians().cos();
    (0..count)
        .map(|n| (n as f64 * c / 2.0).rem_euclid(1.0))
        .collect()
}

/// `(1/sqrt(2)) sum_n [f(s - u_n) + j f(s - u_n - 1/4)] exp(j 2 pi n d cos(theta))`.
pub fn time_field(samples: &[f64], delays: &[f64], spacing: f64, theta_deg: f64, s: f64) -> Complex64 {
    let c = theta_deg.to_radians().cos();
    delays
        .iter()
        .enumerate()
        .map(|(n, &u)| {
            let h = Complex64::new(hold(samples, s - u), hold(samples, s - u - 0.25));
            h * Complex64::from_polar(1.0, 2.0 * PI * n as f64 * spacing * c)
        })
        .sum::<Complex64>()
        * FRAC_1_SQRT_2
}

/// Normalized Dirichlet kernel `|sin(N psi / 2) / (N sin(psi / 2))|^2`,
/// `psi = 2 pi d (cos theta - cos theta0)`.
pub fn dirichlet_power(count: usize, spacing: f64, theta_deg: f64, theta0_deg: f64) -> f64 {
    let psi = 2.0 * PI * spacing * (theta_deg.to_radians().cos() - theta0_deg.to_radians().cos());
    let den = count as f64 * (psi / 2.0).sin();
    if den.abs() < 1e-15 {
        return 1.0;
    }
    let v = (count as f64 * psi / 2.0).sin() / den;
    v * v
}

/// Highest sidelobe of the Dirichlet kernel, dB, from its first null
/// `2 / N` away from the peak in `psi / (2 pi)` units, scanned finely.
pub fn dirichlet_msll_db(count: usize) -> f64 {
    let n = count as f64;
    let steps = 200_000;
    let mut best: f64 = 0.0;
    for i in 0..=steps {
        let x = 1.0 / n + (0.5 - 1.0 / n) * i as f64 / steps as f64;
        let v = (n * PI * x).sin() / (n * (PI * x).sin());
        best = best.max(v * v);
    }
    10.0 * best.log10()
}

/// `sqrt(2^l) [int_a^b - int_b^c] sin(2 pi t) dt` in closed form.
pub fn continuous_sine_coefficient(degree: u32, order: u32) -> f64 {
    let w = 1.0 / (1u64 << degree) as f64;
    let a = (order - 1) as f64 * w;
    let b = a + w / 2.0;
    let c = a + w;
    let cos = |t: f64| (2.0 * PI * t).cos();
    let first = (cos(a) - cos(b)) / (2.0 * PI);
    let second = (cos(b) - cos(c)) / (2.0 * PI);
    ((1u64 << degree) as f64).sqrt() * (first - second)
}

/// Orthonormal Haar analysis by explicit inner products against the
/// wavelet cell values.
pub fn haar_by_inner_products(samples: &[f64]) -> (f64, Vec<Vec<f64>>) {
    let m = samples.len();
    let p = m.trailing_zeros();
    let mean = samples.iter().sum::<f64>() / m as f64;
    let mut degrees = Vec::new();
    for l in 0..p {
        let width = m >> l;
        let amp = ((1u64 << l) as f64).sqrt();
        let row = (0..1usize << l)
            .map(|j| {
                let lo = j * width;
                let first: f64 = samples[lo..lo + width / 2].iter().sum();
                let second: f64 = samples[lo + width / 2..lo + width].iter().sum();
                amp * (first - second) / m as f64
            })
            .collect();
        degrees.push(row);
    }
    (mean, degrees)
}
