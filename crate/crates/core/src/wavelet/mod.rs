//! Orthonormal wavelet filters and the discrete wavelet transform.

mod dwt;
mod filters;
mod scales;

pub use dwt::{dwt_forward, dwt_inverse, max_depth, subband_lengths, DwtCoefficients};
pub use filters::{
    double_shift_product, named_wavelet, pollen_filter, FilterPair, NamedWavelet, WaveletSpec,
    FILTER_TOLERANCE,
};
pub use scales::{
    cascade_wavelet, center_frequency, pseudo_frequency, pseudo_frequency_from_center,
    select_scales, select_scales_up_to, CascadeWavelet, CASCADE_ITERATIONS, DEFAULT_MAX_SCALE,
    DEFAULT_TARGET_HZ,
};

use crate::error::{Error, Result};

/// Default sampling period of the recordings: 10 Hz.
pub const DEFAULT_SAMPLE_PERIOD_S: f64 = 0.1;

/// A uniformly sampled, finite, non-empty signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_period_s: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_period_s: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("signal is empty"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        if !(sample_period_s.is_finite() && sample_period_s > 0.0) {
            return Err(Error::invalid(format!(
                "sample period must be positive, got {sample_period_s}"
            )));
        }
        Ok(Signal {
            samples,
            sample_period_s,
        })
    }

    /// Signal sampled at the default 10 Hz.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        Signal::new(samples, DEFAULT_SAMPLE_PERIOD_S)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_period_s(&self) -> f64 {
        self.sample_period_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
