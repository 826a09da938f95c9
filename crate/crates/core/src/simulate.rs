//! Seeded synthetic multichannel EGG cohorts.
//!
//! Each state is a sum of slow-wave generators mixed into every channel plus
//! white noise of fixed absolute level. The basal stomach has one generator
//! near 5 cpm. Uncoupling splits it into two (mild) or three (severe)
//! generators at distinct frequencies whose combined power is lower, so the
//! compressed signal loses a larger share of its energy.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use rayon::prelude::*;

use crate::dataset::{Dataset, Recording, State};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_SUBJECTS: u32 = 16;
pub const DEFAULT_CHANNELS: u32 = 8;
pub const DEFAULT_DURATION_S: f64 = 600.0;
pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 10.0;
pub const DEFAULT_SEED: u64 = 7;
/// Channels are numbered from here, as on the recording montage.
pub const FIRST_CHANNEL_ID: u32 = 7;

/// Basal rhythm range in cpm.
pub const BASAL_CPM: (f64, f64) = (4.5, 5.5);
/// Band every generator must stay in, in cpm.
pub const GENERATOR_BAND_CPM: (f64, f64) = (3.0, 8.0);
/// Amplitudes of the 2nd and 3rd harmonic relative to the fundamental.
pub const HARMONICS: [f64; 2] = [0.3, 0.1];
/// Standard deviation of the additive noise, in signal units.
pub const NOISE_SD: f64 = 0.25;
/// Range of the per-channel coupling to the stomach.
pub const CHANNEL_WEIGHT: (f64, f64) = (0.6, 1.0);
/// Range of the per-generator attenuation on each channel after splitting.
pub const SPLIT_MIXING: (f64, f64) = (0.8, 1.0);
/// Range of a subject's slow-wave amplitude, shared by its states.
pub const SUBJECT_AMPLITUDE: (f64, f64) = (0.8, 1.2);
/// Log-scale spread of the electrode coupling of one channel in one
/// recording session.
pub const SESSION_GAIN_SD: f64 = 0.4;
/// Relative spread of each split generator's frequency around its nominal
/// multiple of the basal rhythm.
pub const FREQUENCY_JITTER: f64 = 0.03;

/// Nominal generator layout of one state: frequency multiples of the basal
/// rhythm, relative amplitudes, and total power relative to basal.
struct Layout {
    multiples: &'static [f64],
    amplitudes: &'static [f64],
    power: f64,
}

fn layout(state: State) -> Layout {
    match state {
        State::Basal => Layout {
            multiples: &[1.0],
            amplitudes: &[1.0],
            power: 1.0,
        },
        State::Mild => Layout {
            multiples: &[0.8, 1.2],
            amplitudes: &[1.0, 0.9],
            power: 0.55,
        },
        State::Severe => Layout {
            multiples: &[0.7, 1.0, 1.35],
            amplitudes: &[1.0, 0.85, 0.7],
            power: 0.3,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSpec {
    pub subjects: u32,
    pub channels: u32,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            subjects: DEFAULT_SUBJECTS,
            channels: DEFAULT_CHANNELS,
            duration_s: DEFAULT_DURATION_S,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            seed: DEFAULT_SEED,
        }
    }
}

impl CohortSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subjects == 0 || self.channels == 0 {
            return Err(Error::invalid("cohort needs at least one subject and one channel"));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::invalid(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        let n = self.duration_s * self.sample_rate_hz;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
            return Err(Error::invalid(format!(
                "duration {} s at {} Hz is not a whole number of samples",
                self.duration_s, self.sample_rate_hz
            )));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }

    pub fn channel_ids(&self) -> Vec<u32> {
        (0..self.channels).map(|c| FIRST_CHANNEL_ID + c).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    pub frequency_cpm: f64,
    pub amplitude: f64,
    /// Phase of the fundamental, radians.
    pub phase: f64,
    /// Phases of the 2nd and 3rd harmonics, radians.
    pub harmonic_phases: [f64; 2],
}

impl Generator {
    fn value(&self, t: f64) -> f64 {
        let theta = 2.0 * PI * self.frequency_cpm / 60.0 * t + self.phase;
        let mut v = theta.sin();
        for (k, (&rel, &ph)) in HARMONICS.iter().zip(&self.harmonic_phases).enumerate() {
            v += rel * ((k + 2) as f64 * theta + ph).sin();
        }
        self.amplitude * v
    }

    /// Mean power over whole periods.
    pub fn power(&self) -> f64 {
        let rel: f64 = 1.0 + HARMONICS.iter().map(|h| h * h).sum::<f64>();
        self.amplitude * self.amplitude * rel / 2.0
    }
}

/// Generators and mixing of one subject in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateModel {
    pub state: State,
    pub generators: Vec<Generator>,
    /// `weights[channel][generator]`: the channel's coupling to the stomach
    /// in this session times the generator's attenuation on that channel.
    pub weights: Vec<Vec<f64>>,
    pub noise_sd: f64,
}

impl StateModel {
    /// The model of `subject` in `state` for a cohort. Quantities tied to the
    /// subject alone (basal rhythm, channel coupling) are shared by its states.
    pub fn for_subject(spec: &CohortSpec, state: State, subject: u32) -> Result<Self> {
        spec.validate()?;
        let mut subj = rng::stream(spec.seed, &[u64::from(subject)]);
        let basal_cpm = subj.random_range(BASAL_CPM.0..=BASAL_CPM.1);
        let amplitude = subj.random_range(SUBJECT_AMPLITUDE.0..=SUBJECT_AMPLITUDE.1);
        let channel_weight: Vec<f64> = (0..spec.channels)
            .map(|_| subj.random_range(CHANNEL_WEIGHT.0..=CHANNEL_WEIGHT.1))
            .collect();

        let mut st = rng::stream(spec.seed, &[u64::from(subject), state_key(state)]);
        let spec_layout = layout(state);
        let norm: f64 = spec_layout.amplitudes.iter().map(|a| a * a).sum::<f64>();
        let scale = (spec_layout.power / norm).sqrt() * amplitude;
        let generators: Vec<Generator> = spec_layout
            .multiples
            .iter()
            .zip(spec_layout.amplitudes)
            .map(|(&mult, &amp)| {
                let spread = if spec_layout.multiples.len() > 1 {
                    1.0 + st.random_range(-FREQUENCY_JITTER..=FREQUENCY_JITTER)
                } else {
                    1.0
                };
                Generator {
                    frequency_cpm: (basal_cpm * mult * spread)
                        .clamp(GENERATOR_BAND_CPM.0, GENERATOR_BAND_CPM.1),
                    amplitude: amp * scale,
                    phase: st.random_range(0.0..2.0 * PI),
                    harmonic_phases: [st.random_range(0.0..2.0 * PI), st.random_range(0.0..2.0 * PI)],
                }
            })
            .collect();
        let session = LogNormal::new(0.0, SESSION_GAIN_SD)
            .map_err(|e| Error::invalid(format!("session gain: {e}")))?;
        let weights = channel_weight
            .iter()
            .map(|&w| {
                let w = w * session.sample(&mut st);
                generators
                    .iter()
                    .map(|_| {
                        if generators.len() == 1 {
                            w
                        } else {
                            w * st.random_range(SPLIT_MIXING.0..=SPLIT_MIXING.1)
                        }
                    })
                    .collect()
            })
            .collect();
        let model = StateModel {
            state,
            generators,
            weights,
            noise_sd: NOISE_SD,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.len() != self.state.generators() {
            return Err(Error::invalid(format!(
                "{} state needs {} generators, got {}",
                self.state,
                self.state.generators(),
                self.generators.len()
            )));
        }
        for g in &self.generators {
            let ok_freq = (GENERATOR_BAND_CPM.0..=GENERATOR_BAND_CPM.1).contains(&g.frequency_cpm);
            if !ok_freq || !(g.amplitude.is_finite() && g.amplitude >= 0.0) {
                return Err(Error::invalid(format!("invalid generator {g:?}")));
            }
        }
        if self.weights.is_empty() || self.weights.iter().any(|w| w.len() != self.generators.len()) {
            return Err(Error::invalid("mixing weights do not match the generators"));
        }
        if self.weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::invalid("mixing weights must be finite"));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::invalid("noise level must be finite and non-negative"));
        }
        Ok(())
    }

    /// Total generator power, before channel mixing.
    pub fn power(&self) -> f64 {
        self.generators.iter().map(Generator::power).sum()
    }
}

fn state_key(state: State) -> u64 {
    match state {
        State::Basal => 1,
        State::Mild => 2,
        State::Severe => 3,
    }
}

/// Samples every channel of one recording.
pub fn simulate_recording(spec: &CohortSpec, model: &StateModel, subject: u32) -> Result<Recording> {
    spec.validate()?;
    model.validate()?;
    if model.weights.len() != spec.channels as usize {
        return Err(Error::LengthMismatch {
            what: "model channels vs cohort channels",
            left: model.weights.len(),
            right: spec.channels as usize,
        });
    }
    let n = spec.samples();
    let ts = 1.0 / spec.sample_rate_hz;
    let sources: Vec<Vec<f64>> = model
        .generators
        .iter()
        .map(|g| (0..n).map(|i| g.value(i as f64 * ts)).collect())
        .collect();
    let noise = Normal::new(0.0, model.noise_sd)
        .map_err(|e| Error::invalid(format!("noise level: {e}")))?;
    let ids = spec.channel_ids();
    let channels = ids
        .iter()
        .zip(&model.weights)
        .map(|(&id, w)| {
            let mut r = rng::stream(
                spec.seed,
                &[u64::from(subject), state_key(model.state), u64::from(id)],
            );
            (0..n)
                .map(|i| {
                    let clean: f64 = sources.iter().zip(w).map(|(s, wg)| wg * s[i]).sum();
                    clean + noise.sample(&mut r)
                })
                .collect()
        })
        .collect();
    Recording::new(subject, model.state, spec.sample_rate_hz, ids, channels)
}

/// All subjects of the cohort in the given states.
pub fn simulate_states(spec: &CohortSpec, states: &[State]) -> Result<Dataset> {
    spec.validate()?;
    let jobs: Vec<(u32, State)> = (1..=spec.subjects)
        .flat_map(|s| states.iter().map(move |&st| (s, st)))
        .collect();
    let recordings = jobs
        .par_iter()
        .map(|&(subject, state)| {
            let model = StateModel::for_subject(spec, state, subject)?;
            simulate_recording(spec, &model, subject)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut dataset = Dataset::new(Some(spec.seed));
    for r in recordings {
        dataset.insert(r)?;
    }
    Ok(dataset)
}

/// Basal, mild and severe recordings for subjects `1..=subjects`.
pub fn simulate_cohort(spec: &CohortSpec) -> Result<Dataset> {
    simulate_states(spec, &State::ALL)
}

/// Length and block size of the square-wave test signal.
pub const SQUARE_WAVE_LEN: usize = 2048;
pub const SQUARE_WAVE_BLOCK: usize = 4;

/// Piecewise-constant ±1 signal: `len` samples in blocks of `block` equal
/// values, each block's sign drawn from `seed`.
pub fn square_wave(len: usize, block: usize, seed: u64) -> Result<Vec<f64>> {
    if len == 0 || block == 0 {
        return Err(Error::invalid("square wave needs positive length and block size"));
    }
    let mut r = rng::stream(seed, &[]);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let v = if r.random::<bool>() { 1.0 } else { -1.0 };
        out.extend(std::iter::repeat_n(v, block.min(len - out.len())));
    }
    Ok(out)
}
