//! Lilliefors test: Kolmogorov-Smirnov distance to a normal law whose mean
//! and variance are estimated from the sample, with a Monte Carlo p-value.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::{mean_and_sd, TestKind, TestOutcome};
use crate::error::{Error, Result};
use crate::rng;

pub const LILLIEFORS_DRAWS: usize = 50_000;
pub const LILLIEFORS_SEED: u64 = 0x4C49_4C4C_4945_464F;
pub const LILLIEFORS_MIN_SAMPLES: usize = 4;

const CHUNK: usize = 1_000;

/// Size and seed of the simulated null distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LillieforsConfig {
    pub draws: usize,
    pub seed: u64,
}

impl Default for LillieforsConfig {
    fn default() -> Self {
        LillieforsConfig {
            draws: LILLIEFORS_DRAWS,
            seed: LILLIEFORS_SEED,
        }
    }
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `D = sup |F_n - Φ((x - mean) / sd)|` with the sample mean and SD.
pub fn lilliefors_statistic(samples: &[f64]) -> Result<f64> {
    if samples.len() < LILLIEFORS_MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "Lilliefors test needs at least {LILLIEFORS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    distance(&mut sorted)
}

/// Distance for an already sorted sample.
fn distance(sorted: &mut [f64]) -> Result<f64> {
    let (mean, sd) = mean_and_sd(sorted);
    if !(sd > 0.0) || sd <= f64::EPSILON * mean.abs() {
        return Err(Error::Degenerate("sample has zero variance".into()));
    }
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = normal_cdf((x - mean) / sd);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// Simulated null distances for sample size `n`, sorted ascending.
fn null_distances(n: usize, config: LillieforsConfig) -> Arc<Vec<f64>> {
    type Cache = Mutex<HashMap<(usize, LillieforsConfig), Arc<Vec<f64>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&(n, config)) {
        return Arc::clone(hit);
    }

    let chunks = config.draws.div_ceil(CHUNK);
    let mut null: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = rng::stream(config.seed, &[n as u64, c as u64]);
            let count = CHUNK.min(config.draws - c * CHUNK);
            let mut buf = vec![0.0; n];
            (0..count)
                .map(|_| {
                    for v in buf.iter_mut() {
                        *v = StandardNormal.sample(&mut rng);
                    }
                    buf.sort_by(f64::total_cmp);
                    distance(&mut buf).unwrap_or(0.0)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    null.sort_by(f64::total_cmp);
    let null = Arc::new(null);
    cache
        .lock()
        .expect("cache lock")
        .entry((n, config))
        .or_insert_with(|| Arc::clone(&null));
    null
}

pub fn lilliefors(samples: &[f64]) -> Result<TestOutcome> {
    lilliefors_with(samples, LillieforsConfig::default())
}

/// Lilliefors test with p-value `(1 + #{D_null >= D}) / (draws + 1)`.
pub fn lilliefors_with(samples: &[f64], config: LillieforsConfig) -> Result<TestOutcome> {
    if config.draws == 0 {
        return Err(Error::invalid("Monte Carlo draws must be positive"));
    }
    let d = lilliefors_statistic(samples)?;
    let null = null_distances(samples.len(), config);
    let below = null.partition_point(|&v| v < d);
    let exceed = null.len() - below;
    let p_value = (1 + exceed) as f64 / (null.len() + 1) as f64;
    Ok(TestOutcome {
        kind: TestKind::Lilliefors,
        statistic: d,
        p_value,
    })
}
