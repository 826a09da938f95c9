//! Orthonormal two-channel filter pairs: the four named families used for
//! electrogastrogram work and the two-angle Pollen plane of 6-tap filters.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Absolute tolerance for admissibility and double-shift orthonormality.
pub const FILTER_TOLERANCE: f64 = 1e-10;

/// Low-pass/high-pass analysis pair of an orthonormal wavelet.
///
/// The high-pass filter is always the quadrature mirror of the low-pass one,
/// `g[n] = (-1)^n h[L-1-n]`, so only `h` is ever supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl FilterPair {
    /// Builds a pair from a low-pass filter, checking that it is admissible
    /// (`sum(h) = √2`) and orthonormal to its own even shifts.
    pub fn new(lowpass: Vec<f64>) -> Result<Self> {
        if !matches!(lowpass.len(), 2 | 4 | 6) {
            return Err(Error::invalid(format!(
                "filter length must be 2, 4 or 6, got {}",
                lowpass.len()
            )));
        }
        if lowpass.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("filter taps must be finite"));
        }
        let sum: f64 = lowpass.iter().sum();
        if (sum - SQRT_2).abs() > FILTER_TOLERANCE {
            return Err(Error::invalid(format!(
                "low-pass taps sum to {sum}, expected √2"
            )));
        }
        for shift in 0..lowpass.len() / 2 {
            let dot = double_shift_product(&lowpass, shift);
            let expected = if shift == 0 { 1.0 } else { 0.0 };
            if (dot - expected).abs() > FILTER_TOLERANCE {
                return Err(Error::invalid(format!(
                    "low-pass filter is not orthonormal at shift {}: {dot}",
                    2 * shift
                )));
            }
        }
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|n| {
                let tap = lowpass[len - 1 - n];
                if n % 2 == 0 {
                    tap
                } else {
                    -tap
                }
            })
            .collect();
        Ok(FilterPair { lowpass, highpass })
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Number of low-pass taps whose magnitude exceeds `eps`.
    pub fn support(&self, eps: f64) -> usize {
        self.lowpass.iter().filter(|v| v.abs() > eps).count()
    }
}

/// `Σ_n h[n] h[n + 2·shift]`.
pub fn double_shift_product(h: &[f64], shift: usize) -> f64 {
    let offset = 2 * shift;
    h.iter()
        .zip(h.iter().skip(offset))
        .map(|(x, y)| x * y)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedWavelet {
    Haar,
    Daubechies2,
    Daubechies3,
    Coiflet1,
}

impl NamedWavelet {
    pub const ALL: [NamedWavelet; 4] = [
        NamedWavelet::Haar,
        NamedWavelet::Daubechies2,
        NamedWavelet::Daubechies3,
        NamedWavelet::Coiflet1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedWavelet::Haar => "haar",
            NamedWavelet::Daubechies2 => "daubechies-2",
            NamedWavelet::Daubechies3 => "daubechies-3",
            NamedWavelet::Coiflet1 => "coiflet-1",
        }
    }

    /// Published scaling-filter taps, normalized to `sum(h) = √2`.
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            NamedWavelet::Haar => vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            NamedWavelet::Daubechies2 => {
                let s3 = 3f64.sqrt();
                let norm = 4.0 * SQRT_2;
                vec![
                    (1.0 + s3) / norm,
                    (3.0 + s3) / norm,
                    (3.0 - s3) / norm,
                    (1.0 - s3) / norm,
                ]
            }
            NamedWavelet::Daubechies3 => {
                let s10 = 10f64.sqrt();
                let r = (5.0 + 2.0 * s10).sqrt();
                let norm = 16.0 * SQRT_2;
                vec![
                    (1.0 + s10 + r) / norm,
                    (5.0 + s10 + 3.0 * r) / norm,
                    (10.0 - 2.0 * s10 + 2.0 * r) / norm,
                    (10.0 - 2.0 * s10 - 2.0 * r) / norm,
                    (5.0 + s10 - 3.0 * r) / norm,
                    (1.0 + s10 - r) / norm,
                ]
            }
            NamedWavelet::Coiflet1 => {
                let s7 = 7f64.sqrt();
                let norm = 16.0 * SQRT_2;
                vec![
                    (1.0 - s7) / norm,
                    (5.0 + s7) / norm,
                    (14.0 + 2.0 * s7) / norm,
                    (14.0 - 2.0 * s7) / norm,
                    (1.0 - s7) / norm,
                    (-3.0 + s7) / norm,
                ]
            }
        }
    }

    /// Point `(a, b)` of the Pollen plane whose filter equals this wavelet's
    /// low-pass filter (Daubechies-2 padded with two trailing zero taps).
    pub fn pollen_position(self) -> (f64, f64) {
        match self {
            NamedWavelet::Haar => (FRAC_PI_2, FRAC_PI_2),
            NamedWavelet::Daubechies2 => (FRAC_PI_2, -FRAC_PI_3),
            NamedWavelet::Daubechies3 => (1.359_803_732_444_363_7, -0.782_106_384_742_773),
            NamedWavelet::Coiflet1 => (1.146_765_287_304_693_6, 0.424_031_039_490_202_6),
        }
    }

    pub fn filter(self) -> FilterPair {
        FilterPair::new(self.lowpass()).expect("published coefficients are orthonormal")
    }
}

impl fmt::Display for NamedWavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedWavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let named = match key.as_str() {
            "haar" | "db1" => NamedWavelet::Haar,
            "daubechies-2" | "db2" => NamedWavelet::Daubechies2,
            "daubechies-3" | "db3" => NamedWavelet::Daubechies3,
            "coiflet-1" | "coif1" => NamedWavelet::Coiflet1,
            _ => return Err(Error::UnknownWavelet(s.to_string())),
        };
        Ok(named)
    }
}

/// Looks up one of the supported named families.
pub fn named_wavelet(name: &str) -> Result<FilterPair> {
    Ok(name.parse::<NamedWavelet>()?.filter())
}

/// Which wavelet to use: a named family or a point of the Pollen plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveletSpec {
    Named(NamedWavelet),
    /// Angles in radians, each within `[-π, π]`.
    Pollen { a: f64, b: f64 },
}

impl WaveletSpec {
    pub fn filter(&self) -> Result<FilterPair> {
        match *self {
            WaveletSpec::Named(named) => Ok(named.filter()),
            WaveletSpec::Pollen { a, b } => pollen_filter(a, b),
        }
    }
}

impl Default for WaveletSpec {
    fn default() -> Self {
        WaveletSpec::Named(NamedWavelet::Daubechies3)
    }
}

impl From<NamedWavelet> for WaveletSpec {
    fn from(named: NamedWavelet) -> Self {
        WaveletSpec::Named(named)
    }
}

impl fmt::Display for WaveletSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveletSpec::Named(named) => write!(f, "{named}"),
            WaveletSpec::Pollen { a, b } => write!(f, "pollen:{a},{b}"),
        }
    }
}

impl FromStr for WaveletSpec {
    type Err = Error;

    /// Accepts a family name or `pollen:<a>,<b>` with angles in radians.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if let Some(rest) = trimmed.strip_prefix("pollen:") {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| Error::UnknownWavelet(s.to_string()))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownWavelet(s.to_string()))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            check_angle("a", a)?;
            check_angle("b", b)?;
            return Ok(WaveletSpec::Pollen { a, b });
        }
        Ok(WaveletSpec::Named(trimmed.parse()?))
    }
}

const ANGLE_SLACK: f64 = 1e-12;

fn check_angle(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value.abs() <= PI + ANGLE_SLACK) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: -PI,
            max: PI,
        });
    }
    Ok(())
}

/// 6-tap orthonormal low-pass filter of the Pollen parameterization.
///
/// Every `(a, b)` yields an admissible, double-shift orthonormal filter. The
/// diagonal `a = b` and the points `(±π/2, ±π/2)`, `(±π/2, 0)` give Haar
/// filters (two adjacent taps of `1/√2`, possibly shifted).
pub fn pollen_filter(a: f64, b: f64) -> Result<FilterPair> {
    check_angle("a", a)?;
    check_angle("b", b)?;
    FilterPair::new(pollen_lowpass(a, b).to_vec())
}

pub(crate) fn pollen_lowpass(a: f64, b: f64) -> [f64; 6] {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sd, cd) = (a - b).sin_cos();
    // Taps for the sum-2 normalization, rescaled to sum √2 at the end.
    let h0 = ((1.0 + ca + sa) * (1.0 - cb - sb) + 2.0 * sb * ca) / 4.0;
    let h1 = ((1.0 - ca + sa) * (1.0 + cb - sb) - 2.0 * sb * ca) / 4.0;
    let h2 = (1.0 + cd + sd) / 2.0;
    let h3 = (1.0 + cd - sd) / 2.0;
    let h4 = 1.0 - h0 - h2;
    let h5 = 1.0 - h1 - h3;
    [h0, h1, h2, h3, h4, h5].map(|h| h * FRAC_1_SQRT_2)
}
