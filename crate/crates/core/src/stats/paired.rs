//! Paired Student t test and the Wilcoxon signed-rank test on differences.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use super::{mean_and_sd, TestKind, TestOutcome};
use crate::error::{Error, Result};

/// Exact Wilcoxon null distribution is used up to this many nonzero pairs.
pub const WILCOXON_EXACT_MAX: usize = 20;

/// Differences `second - first` of a paired sample, at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    differences: Vec<f64>,
}

impl PairedSample {
    pub fn new(differences: Vec<f64>) -> Result<Self> {
        if differences.len() < 2 {
            return Err(Error::invalid(format!(
                "a paired test needs at least 2 pairs, got {}",
                differences.len()
            )));
        }
        if differences.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("paired differences must be finite"));
        }
        Ok(PairedSample { differences })
    }

    pub fn from_pairs(first: &[f64], second: &[f64]) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::LengthMismatch {
                what: "paired groups",
                left: first.len(),
                right: second.len(),
            });
        }
        Self::new(second.iter().zip(first).map(|(b, a)| b - a).collect())
    }

    pub fn differences(&self) -> &[f64] {
        &self.differences
    }

    pub fn len(&self) -> usize {
        self.differences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.differences.is_empty()
    }
}

/// Two-sided one-sample t test of mean difference zero.
pub fn paired_t(sample: &PairedSample) -> Result<TestOutcome> {
    let d = sample.differences();
    let (mean, sd) = mean_and_sd(d);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("paired differences have zero variance".into()));
    }
    let n = d.len() as f64;
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::invalid(format!("t distribution: {e}")))?;
    let p_value = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(TestOutcome {
        kind: TestKind::PairedT,
        statistic: t,
        p_value,
    })
}

/// Wilcoxon signed-rank test. Zero differences are dropped and tied
/// magnitudes get mid-ranks. The statistic is `W+`, the rank sum of the
/// positive differences. Up to [`WILCOXON_EXACT_MAX`] nonzero pairs the
/// p-value is exact; above that a normal approximation with tie and
/// continuity corrections is used.
pub fn wilcoxon_signed_rank(sample: &PairedSample) -> Result<TestOutcome> {
    let nonzero: Vec<f64> = sample
        .differences()
        .iter()
        .copied()
        .filter(|&d| d != 0.0)
        .collect();
    if nonzero.is_empty() {
        return Err(Error::Degenerate("no differences".into()));
    }
    let doubled = doubled_midranks(&nonzero);
    let w2: u64 = nonzero
        .iter()
        .zip(&doubled)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let statistic = w2 as f64 / 2.0;
    let p_value = if nonzero.len() <= WILCOXON_EXACT_MAX {
        exact_p(&doubled, w2)
    } else {
        normal_p(&nonzero, &doubled, statistic)
    };
    Ok(TestOutcome {
        kind: TestKind::Wilcoxon,
        statistic,
        p_value,
    })
}

/// Twice the mid-rank of each |d|, which is always an integer.
fn doubled_midranks(d: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()));
    let mut ranks = vec![0; d.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && d[order[end]].abs() == d[order[start]].abs() {
            end += 1;
        }
        // Ranks start+1..=end share (start + 1 + end) / 2.
        let r2 = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = r2;
        }
        start = end;
    }
    ranks
}

fn exact_p(doubled: &[u64], w2: u64) -> f64 {
    let total: u64 = doubled.iter().sum();
    // counts[s] = number of sign patterns with doubled positive-rank sum s.
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all = (1u64 << doubled.len()) as f64;
    let w2 = w2 as usize;
    let lower: u64 = counts[..=w2].iter().sum();
    let upper: u64 = counts[w2..].iter().sum();
    (2.0 * lower.min(upper) as f64 / all).min(1.0)
}

fn normal_p(d: &[f64], doubled: &[u64], w: f64) -> f64 {
    let n = d.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = doubled.to_vec();
    sorted.sort_unstable();
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let gap = (w - mean).abs();
    if gap <= 0.5 || !(var > 0.0) {
        return 1.0;
    }
    let z = (gap - 0.5) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}
