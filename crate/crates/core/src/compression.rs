//! Keep-M hard-threshold compression in the wavelet domain, scored by the
//! percent root-mean-square difference (PRD) of the reconstruction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::wavelet::{
    dwt_forward, dwt_inverse, max_depth, select_scales_up_to, DwtCoefficients, FilterPair, Signal,
    WaveletSpec, DEFAULT_TARGET_HZ,
};

/// Number of decomposition scales, fixed or chosen from the wavelet's
/// pseudo-frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Depth {
    #[default]
    Auto,
    Fixed(usize),
}

impl FromStr for Depth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Depth::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::invalid(format!(
                "depth must be `auto` or a positive integer, got `{s}`"
            ))),
            Ok(n) => Ok(Depth::Fixed(n)),
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Auto => f.write_str("auto"),
            Depth::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl Depth {
    /// Concrete depth for a signal of `len` samples taken every `ts` seconds.
    pub fn resolve(self, filter: &FilterPair, len: usize, ts: f64, target_hz: f64) -> Result<usize> {
        match self {
            Depth::Fixed(n) => Ok(n),
            Depth::Auto => select_scales_up_to(filter, ts, target_hz, max_depth(len)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionConfig {
    pub wavelet: WaveletSpec,
    pub depth: Depth,
    /// Compression ratio `total coefficients / kept coefficients`, at least 1.
    pub cr: f64,
    /// Rhythm the automatic depth is tuned to, in hertz.
    pub target_hz: f64,
}

impl Default for CompressionConfig {
    fn default() -> Self {
        CompressionConfig {
            wavelet: WaveletSpec::default(),
            depth: Depth::Auto,
            cr: 3.0,
            target_hz: DEFAULT_TARGET_HZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub reconstruction: Vec<f64>,
    /// `M`, the number of retained coefficients.
    pub kept: usize,
    pub total_coefficients: usize,
    pub prd_percent: f64,
    /// Flat indices (see [`DwtCoefficients::iter_flat`]) of the retained
    /// coefficients, ascending.
    pub kept_indices: Vec<usize>,
    pub depth: usize,
}

/// `M = max(1, floor(total / cr))`.
pub fn kept_count(total: usize, cr: f64) -> Result<usize> {
    check_cr(cr)?;
    let m = (total as f64 / cr).floor() as usize;
    Ok(m.clamp(1, total.max(1)))
}

fn check_cr(cr: f64) -> Result<()> {
    if !(cr.is_finite() && cr >= 1.0) {
        return Err(Error::OutOfRange {
            name: "compression ratio",
            value: cr,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

/// Orders flat indices by decreasing magnitude, then increasing index.
fn by_magnitude(flat: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&i, &j| {
        flat[j]
            .abs()
            .total_cmp(&flat[i].abs())
            .then_with(|| i.cmp(&j))
    }
}

/// Indices of the `m` largest-magnitude entries, ties to the smaller index;
/// returned ascending.
pub fn largest_indices(flat: &[f64], m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > flat.len() {
        return Err(Error::OutOfRange {
            name: "kept coefficients",
            value: m as f64,
            min: 1.0,
            max: flat.len() as f64,
        });
    }
    let mut order: Vec<usize> = (0..flat.len()).collect();
    if m < order.len() {
        order.select_nth_unstable_by(m - 1, by_magnitude(flat));
        order.truncate(m);
    }
    order.sort_unstable();
    Ok(order)
}

/// Hard threshold keeping the `m` largest-magnitude coefficients.
pub fn keep_largest(coeffs: &DwtCoefficients, m: usize) -> Result<DwtCoefficients> {
    let flat = coeffs.to_flat();
    let kept = largest_indices(&flat, m)?;
    coeffs.with_flat(&mask(&flat, &kept))
}

fn mask(flat: &[f64], kept: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; flat.len()];
    for &i in kept {
        out[i] = flat[i];
    }
    out
}

/// Percent root-mean-square difference between `reference` and `other`.
pub fn prd(reference: &[f64], other: &[f64]) -> Result<f64> {
    if reference.len() != other.len() {
        return Err(Error::LengthMismatch {
            what: "PRD operands",
            left: reference.len(),
            right: other.len(),
        });
    }
    let energy: f64 = reference.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let error: f64 = reference
        .iter()
        .zip(other)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((error / energy).sqrt() * 100.0)
}

pub fn compress(signal: &Signal, config: &CompressionConfig) -> Result<CompressionResult> {
    let filter = config.wavelet.filter()?;
    let depth = config.depth.resolve(
        &filter,
        signal.len(),
        signal.sample_period_s(),
        config.target_hz,
    )?;
    compress_with_filter(signal.samples(), &filter, depth, config.cr)
}

/// Forward transform, keep `floor(total / cr)` coefficients, invert, score.
pub fn compress_with_filter(
    x: &[f64],
    filter: &FilterPair,
    depth: usize,
    cr: f64,
) -> Result<CompressionResult> {
    check_cr(cr)?;
    let coeffs = dwt_forward(x, filter, depth)?;
    let flat = coeffs.to_flat();
    let total = flat.len();
    let kept = kept_count(total, cr)?;
    let kept_indices = largest_indices(&flat, kept)?;
    let thresholded = coeffs.with_flat(&mask(&flat, &kept_indices))?;
    let reconstruction = dwt_inverse(&thresholded, filter)?;
    let prd_percent = prd(x, &reconstruction)?;
    Ok(CompressionResult {
        reconstruction,
        kept,
        total_coefficients: total,
        prd_percent,
        kept_indices,
        depth,
    })
}

/// PRD only; skips assembling a [`CompressionResult`].
pub(crate) fn compressed_prd(x: &[f64], filter: &FilterPair, depth: usize, cr: f64) -> Result<f64> {
    compress_with_filter(x, filter, depth, cr).map(|r| r.prd_percent)
}
