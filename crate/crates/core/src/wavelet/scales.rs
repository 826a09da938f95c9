//! Center frequency of a wavelet and the depth rule that puts the coarsest
//! scale's pseudo-frequency closest to a target rhythm.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

/// Refinement iterations of the cascade algorithm.
pub const CASCADE_ITERATIONS: u32 = 10;

/// Canine slow-wave target: 5 cycles per minute, the middle of the 4–6 cpm band.
pub const DEFAULT_TARGET_HZ: f64 = 5.0 / 60.0;

/// Upper bound on depths considered when no signal length is known.
pub const DEFAULT_MAX_SCALE: usize = 24;

/// Samples of the wavelet function approximated by the cascade algorithm,
/// on a uniform grid of spacing `step` (in units of the sampling period).
pub struct CascadeWavelet {
    pub samples: Vec<f64>,
    pub step: f64,
}

pub fn cascade_wavelet(filter: &FilterPair, iterations: u32) -> CascadeWavelet {
    let lowpass: Vec<f64> = filter.lowpass().iter().map(|h| h * std::f64::consts::SQRT_2).collect();
    let highpass: Vec<f64> = filter.highpass().iter().map(|g| g * std::f64::consts::SQRT_2).collect();

    // phi = Π_i H(z^(2^i)); psi = phi · G(z^(2^iterations)).
    let mut phi = vec![1.0];
    for i in 0..iterations {
        phi = convolve_dilated(&phi, &lowpass, 1 << i);
    }
    let psi = convolve_dilated(&phi, &highpass, 1 << iterations);
    CascadeWavelet {
        samples: psi,
        step: 1.0 / f64::from(1u32 << (iterations + 1)),
    }
}

fn convolve_dilated(x: &[f64], taps: &[f64], dilation: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + (taps.len() - 1) * dilation];
    for (m, &t) in taps.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let offset = m * dilation;
        for (o, &v) in out[offset..].iter_mut().zip(x) {
            *o += t * v;
        }
    }
    out
}

/// Frequency, in cycles per sample, at which the magnitude of the wavelet's
/// Fourier transform peaks.
///
/// The wavelet is sampled by the cascade algorithm and transformed with an
/// unpadded DFT, so the answer is the peak bin `k / T` for a support of
/// width `T` samples (2/3 for Daubechies-2, 4/5 for Daubechies-3).
pub fn center_frequency(filter: &FilterPair) -> f64 {
    let wavelet = cascade_wavelet(filter, CASCADE_ITERATIONS);
    let n = wavelet.samples.len();
    let fft = plan(n);
    let mut buffer: Vec<Complex<f64>> = wavelet
        .samples
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fft.process(&mut buffer);

    let mut best_bin = 1;
    let mut best_mag = f64::NEG_INFINITY;
    for (k, c) in buffer.iter().enumerate().take(n / 2 + 1).skip(1) {
        let mag = c.norm();
        if mag > best_mag {
            best_mag = mag;
            best_bin = k;
        }
    }
    best_bin as f64 / (n as f64 * wavelet.step)
}

fn plan(n: usize) -> Arc<dyn rustfft::Fft<f64>> {
    FftPlanner::new().plan_fft_forward(n)
}

/// Pseudo-frequency in hertz of dyadic scale `j` for a wavelet whose center
/// frequency is `center` cycles per sample: `center / (2^j · ts)`.
pub fn pseudo_frequency_from_center(center: f64, scale: usize, ts: f64) -> Result<f64> {
    if scale == 0 {
        return Err(Error::invalid("scale indices start at 1"));
    }
    if !(ts.is_finite() && ts > 0.0) {
        return Err(Error::invalid(format!("sample period must be positive, got {ts}")));
    }
    let exponent = i32::try_from(scale).map_err(|_| Error::invalid("scale index too large"))?;
    Ok(center / (2f64.powi(exponent) * ts))
}

pub fn pseudo_frequency(filter: &FilterPair, scale: usize, ts: f64) -> Result<f64> {
    pseudo_frequency_from_center(center_frequency(filter), scale, ts)
}

/// Depth whose pseudo-frequency is closest to `target_hz`, searched over
/// `1..=DEFAULT_MAX_SCALE`.
pub fn select_scales(filter: &FilterPair, ts: f64, target_hz: f64) -> Result<usize> {
    select_scales_up_to(filter, ts, target_hz, DEFAULT_MAX_SCALE)
}

/// As [`select_scales`], restricted to `1..=max_scale`. Ties go to the
/// smaller depth.
pub fn select_scales_up_to(
    filter: &FilterPair,
    ts: f64,
    target_hz: f64,
    max_scale: usize,
) -> Result<usize> {
    if !(target_hz.is_finite() && target_hz > 0.0) {
        return Err(Error::invalid(format!(
            "target frequency must be positive, got {target_hz}"
        )));
    }
    if max_scale == 0 {
        return Err(Error::invalid("no admissible decomposition depth"));
    }
    let center = center_frequency(filter);
    let mut best = (1, f64::INFINITY);
    for j in 1..=max_scale {
        let gap = (pseudo_frequency_from_center(center, j, ts)? - target_hz).abs();
        if gap < best.1 {
            best = (j, gap);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::named_wavelet;

    #[test]
    fn center_frequencies_of_named_wavelets() {
        let cf = |name| center_frequency(&named_wavelet(name).unwrap());
        assert!((cf("haar") - 1.0).abs() < 0.05);
        assert!((cf("daubechies-2") - 0.667).abs() < 0.02);
        assert!((cf("daubechies-3") - 0.8).abs() < 0.02);
        assert!((cf("coiflet-1") - 0.8).abs() < 0.02);
    }

    #[test]
    fn cascade_support_matches_filter_length() {
        let w = cascade_wavelet(&named_wavelet("daubechies-2").unwrap(), 10);
        let width = w.samples.len() as f64 * w.step;
        assert!((width - 3.0).abs() < 1e-2, "{width}");
        let w = cascade_wavelet(&named_wavelet("haar").unwrap(), 4);
        assert_eq!(w.samples.len(), 32);
        assert!(w.samples[..16].iter().all(|&v| v > 0.0));
        assert!(w.samples[16..].iter().all(|&v| v < 0.0));
    }

    #[test]
    fn pseudo_frequency_examples() {
        let db2 = named_wavelet("daubechies-2").unwrap();
        let f = pseudo_frequency(&db2, 6, 0.1).unwrap();
        assert!((f - 0.104).abs() < 0.003, "{f}");
        let db3 = named_wavelet("daubechies-3").unwrap();
        let f = pseudo_frequency(&db3, 7, 0.1).unwrap();
        assert!((f * 60.0 - 3.75).abs() < 0.1, "{f}");
        assert!(pseudo_frequency(&db3, 0, 0.1).is_err());
        assert!(pseudo_frequency(&db3, 3, 0.0).is_err());
    }

    #[test]
    fn depth_table_for_canine_rhythm() {
        let pick = |name| select_scales(&named_wavelet(name).unwrap(), 0.1, DEFAULT_TARGET_HZ).unwrap();
        assert_eq!(pick("daubechies-2"), 6);
        assert_eq!(pick("daubechies-3"), 7);
        assert_eq!(pick("coiflet-1"), 7);
    }

    #[test]
    fn bounded_search_and_bad_targets() {
        let f = named_wavelet("daubechies-3").unwrap();
        assert_eq!(select_scales_up_to(&f, 0.1, DEFAULT_TARGET_HZ, 4).unwrap(), 4);
        assert!(select_scales(&f, 0.1, 0.0).is_err());
        assert!(select_scales_up_to(&f, 0.1, 1.0, 0).is_err());
    }
}
