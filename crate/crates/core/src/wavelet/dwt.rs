//! Forward and inverse discrete wavelet transform by the Mallat pyramid.
//!
//! Each level filters with the periodized analysis pair and keeps every second
//! output. A level whose input has odd length is first extended by repeating
//! its last sample; the recorded per-level input lengths let the inverse drop
//! that sample again, so reconstruction is exact for any signal length.

use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

/// Subband vectors `{d_1, …, d_J0, a_J0}` of one decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtCoefficients {
    /// `details[j - 1]` holds `d_j`, finest scale first.
    details: Vec<Vec<f64>>,
    approximation: Vec<f64>,
    /// Input length of every level: `lengths[0]` is the signal length.
    lengths: Vec<usize>,
}

impl DwtCoefficients {
    /// Assembles coefficients from parts, checking the length bookkeeping.
    pub fn from_parts(
        details: Vec<Vec<f64>>,
        approximation: Vec<f64>,
        lengths: Vec<usize>,
    ) -> Result<Self> {
        let coeffs = DwtCoefficients {
            details,
            approximation,
            lengths,
        };
        coeffs.validate()?;
        Ok(coeffs)
    }

    pub fn depth(&self) -> usize {
        self.details.len()
    }

    /// Detail vector `d_j` for `j` in `1..=depth`.
    pub fn detail(&self, j: usize) -> &[f64] {
        &self.details[j - 1]
    }

    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    pub fn approximation(&self) -> &[f64] {
        &self.approximation
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn signal_len(&self) -> usize {
        self.lengths.first().copied().unwrap_or(0)
    }

    pub fn total_len(&self) -> usize {
        self.approximation.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn energy(&self) -> f64 {
        self.iter_flat().map(|c| c * c).sum()
    }

    /// Coefficients in flat order: `a_J0`, then `d_J0` down to `d_1`, each
    /// left to right.
    pub fn iter_flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.approximation
            .iter()
            .chain(self.details.iter().rev().flatten())
            .copied()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter_flat().collect()
    }

    /// Copy of `self` with coefficients replaced by `flat` (same flat order).
    pub fn with_flat(&self, flat: &[f64]) -> Result<Self> {
        if flat.len() != self.total_len() {
            return Err(Error::LengthMismatch {
                what: "flat coefficient count",
                left: flat.len(),
                right: self.total_len(),
            });
        }
        let mut rest = flat;
        let mut take = |n: usize| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head.to_vec()
        };
        let approximation = take(self.approximation.len());
        let mut details: Vec<Vec<f64>> = self
            .details
            .iter()
            .rev()
            .map(|d| take(d.len()))
            .collect();
        details.reverse();
        Ok(DwtCoefficients {
            details,
            approximation,
            lengths: self.lengths.clone(),
        })
    }

    fn validate(&self) -> Result<()> {
        let depth = self.details.len();
        if depth == 0 {
            return Err(Error::invalid("decomposition depth must be at least 1"));
        }
        if self.lengths.len() != depth {
            return Err(Error::LengthMismatch {
                what: "recorded level lengths vs detail vectors",
                left: self.lengths.len(),
                right: depth,
            });
        }
        for (j, (&n, d)) in self.lengths.iter().zip(&self.details).enumerate() {
            if n == 0 {
                return Err(Error::invalid(format!("level {} input length is zero", j + 1)));
            }
            if d.len() != n.div_ceil(2) {
                return Err(Error::LengthMismatch {
                    what: "detail vector length vs recorded level length",
                    left: d.len(),
                    right: n.div_ceil(2),
                });
            }
            if let Some(&next) = self.lengths.get(j + 1) {
                if next != d.len() {
                    return Err(Error::LengthMismatch {
                        what: "level length vs previous approximation",
                        left: next,
                        right: d.len(),
                    });
                }
            }
        }
        let last = self.details[depth - 1].len();
        if self.approximation.len() != last {
            return Err(Error::LengthMismatch {
                what: "approximation length vs coarsest detail",
                left: self.approximation.len(),
                right: last,
            });
        }
        Ok(())
    }
}

/// Largest admissible depth for a signal of `len` samples, `floor(log2(len))`.
pub fn max_depth(len: usize) -> usize {
    if len == 0 {
        0
    } else {
        len.ilog2() as usize
    }
}

/// Subband lengths `ceil`-halved per level for a signal of `len` samples.
pub fn subband_lengths(len: usize, depth: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(depth);
    let mut n = len;
    for _ in 0..depth {
        n = n.div_ceil(2);
        out.push(n);
    }
    out
}

pub fn dwt_forward(x: &[f64], filter: &FilterPair, depth: usize) -> Result<DwtCoefficients> {
    let max = max_depth(x.len());
    if depth == 0 {
        return Err(Error::invalid("decomposition depth must be at least 1"));
    }
    if depth > max {
        return Err(Error::DepthTooLarge {
            depth,
            len: x.len(),
            max,
        });
    }
    let mut details = Vec::with_capacity(depth);
    let mut lengths = Vec::with_capacity(depth);
    let mut current = x.to_vec();
    let mut extended = Vec::with_capacity(x.len() + 1);
    for _ in 0..depth {
        lengths.push(current.len());
        extended.clear();
        extended.extend_from_slice(&current);
        if extended.len() % 2 == 1 {
            extended.push(*current.last().expect("non-empty level"));
        }
        let (approx, detail) = analysis_step(&extended, filter);
        details.push(detail);
        current = approx;
    }
    Ok(DwtCoefficients {
        details,
        approximation: current,
        lengths,
    })
}

pub fn dwt_inverse(coeffs: &DwtCoefficients, filter: &FilterPair) -> Result<Vec<f64>> {
    coeffs.validate()?;
    let mut current = coeffs.approximation.clone();
    for (detail, &len) in coeffs.details.iter().zip(&coeffs.lengths).rev() {
        let mut level = synthesis_step(&current, detail, filter);
        level.truncate(len);
        current = level;
    }
    Ok(current)
}

/// One periodized filter-and-decimate step on an even-length input.
fn analysis_step(x: &[f64], filter: &FilterPair) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        let mut idx = (2 * k) % n;
        for (&hm, &gm) in h.iter().zip(g) {
            a += hm * x[idx];
            d += gm * x[idx];
            idx += 1;
            if idx == n {
                idx = 0;
            }
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

/// Transpose of [`analysis_step`]: upsample and filter back to `2 * len`.
fn synthesis_step(approx: &[f64], detail: &[f64], filter: &FilterPair) -> Vec<f64> {
    let half = approx.len();
    let n = 2 * half;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut out = vec![0.0; n];
    for k in 0..half {
        let (a, d) = (approx[k], detail[k]);
        let mut idx = (2 * k) % n;
        for (&hm, &gm) in h.iter().zip(g) {
            out[idx] += hm * a + gm * d;
            idx += 1;
            if idx == n {
                idx = 0;
            }
        }
    }
    out
}
