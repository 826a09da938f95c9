//! Paired comparisons of PRD between physiological states.
//!
//! For each channel, per-subject PRD differences are checked for normality
//! with a Lilliefors test. Normal differences go to a paired t test,
//! otherwise to a Wilcoxon signed-rank test.

mod normality;
mod paired;
mod report;

use std::collections::BTreeMap;
use std::fmt;

pub use normality::{
    lilliefors, lilliefors_statistic, lilliefors_with, LillieforsConfig, LILLIEFORS_DRAWS,
    LILLIEFORS_MIN_SAMPLES, LILLIEFORS_SEED,
};
pub use paired::{paired_t, wilcoxon_signed_rank, PairedSample, WILCOXON_EXACT_MAX};
pub use report::{detection_rate, render_csv, render_text, write_csv};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    Lilliefors,
    PairedT,
    Wilcoxon,
}

impl TestKind {
    /// Label used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            TestKind::Lilliefors => "Lilliefors",
            TestKind::PairedT => "Student",
            TestKind::Wilcoxon => "Wilcoxon",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub kind: TestKind,
    pub statistic: f64,
    pub p_value: f64,
}

/// Mean and sample standard deviation (n - 1 denominator).
pub(crate) fn mean_and_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub alpha: f64,
    pub lilliefors: LillieforsConfig,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            alpha: DEFAULT_ALPHA,
            lilliefors: LillieforsConfig::default(),
        }
    }
}

impl CompareOptions {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(())
    }
}

/// One row of a state comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelComparison {
    pub channel: u32,
    pub test: TestOutcome,
    /// Normality check on the differences. `None` when the differences are
    /// constant and the check cannot run.
    pub normality: Option<TestOutcome>,
    pub mean_delta: f64,
    pub sd_delta: f64,
    pub significant: bool,
    pub subjects: usize,
}

impl ChannelComparison {
    pub fn p_value(&self) -> f64 {
        self.test.p_value
    }
}

/// Compares per-subject PRDs of two states on one channel. Differences are
/// `second - first`, so a positive mean means the second state compresses
/// worse. Both maps must cover the same subjects.
pub fn compare_paired(
    first: &BTreeMap<u32, f64>,
    second: &BTreeMap<u32, f64>,
    channel: u32,
    options: &CompareOptions,
) -> Result<ChannelComparison> {
    options.validate()?;
    let unmatched: Vec<u32> = first
        .keys()
        .filter(|s| !second.contains_key(s))
        .chain(second.keys().filter(|s| !first.contains_key(s)))
        .copied()
        .collect();
    if !unmatched.is_empty() {
        return Err(Error::invalid(format!(
            "channel {channel}: subjects without a pair: {unmatched:?}"
        )));
    }
    let diffs: Vec<f64> = first.iter().map(|(s, a)| second[s] - a).collect();
    if diffs.len() < LILLIEFORS_MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "channel {channel}: need at least {LILLIEFORS_MIN_SAMPLES} paired subjects, got {}",
            diffs.len()
        )));
    }
    if diffs.iter().all(|&d| d == 0.0) {
        return Err(Error::Degenerate(format!("channel {channel}: no differences")));
    }
    let sample = PairedSample::new(diffs)?;

    let normality = match lilliefors_with(sample.differences(), options.lilliefors) {
        Ok(outcome) => Some(outcome),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let test = match normality {
        Some(n) if n.p_value >= options.alpha => paired_t(&sample)?,
        _ => wilcoxon_signed_rank(&sample)?,
    };
    let (mean_delta, sd_delta) = mean_and_sd(sample.differences());
    Ok(ChannelComparison {
        channel,
        test,
        normality,
        mean_delta,
        sd_delta,
        significant: test.p_value < options.alpha,
        subjects: sample.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(values: &[f64]) -> BTreeMap<u32, f64> {
        values.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v)).collect()
    }

    #[test]
    fn sample_sd_uses_n_minus_one() {
        let (m, sd) = mean_and_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn routes_normal_differences_to_t() {
        let a = group(&[10.0; 8]);
        let b = group(&[11.1, 10.7, 11.4, 10.9, 11.0, 11.3, 10.8, 11.2]);
        let row = compare_paired(&a, &b, 7, &CompareOptions::default()).unwrap();
        assert_eq!(row.test.kind, TestKind::PairedT);
        assert!(row.significant);
        assert!(row.mean_delta > 0.0);
        assert_eq!(row.subjects, 8);
    }

    #[test]
    fn constant_shift_goes_to_wilcoxon() {
        let a = group(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = group(&[2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let row = compare_paired(&a, &b, 9, &CompareOptions::default()).unwrap();
        assert_eq!(row.test.kind, TestKind::Wilcoxon);
        assert!(row.normality.is_none());
        assert!((row.p_value() - 2.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_groups() {
        let a = group(&[1.0, 2.0, 3.0, 4.0]);
        let opts = CompareOptions::default();
        assert!(matches!(compare_paired(&a, &a, 7, &opts), Err(Error::Degenerate(_))));
        let mut b = group(&[1.0, 2.0, 3.0, 5.0]);
        b.insert(9, 1.0);
        assert!(compare_paired(&a, &b, 7, &opts).is_err());
        let short = group(&[1.0, 2.0, 3.0]);
        assert!(compare_paired(&short, &group(&[2.0, 2.0, 4.0]), 7, &opts).is_err());
        let bad = CompareOptions { alpha: 1.5, ..opts };
        assert!(compare_paired(&a, &group(&[2.0, 2.0, 4.0, 4.0]), 7, &bad).is_err());
    }
}
