//! In-memory cohort: per-subject, per-state multichannel recordings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::wavelet::Signal;

/// Physiological state of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    Basal,
    /// Mild uncoupling: the gastric generator split in two.
    Mild,
    /// Severe uncoupling: the gastric generator split in three.
    Severe,
}

impl State {
    pub const ALL: [State; 3] = [State::Basal, State::Mild, State::Severe];

    pub fn as_str(self) -> &'static str {
        match self {
            State::Basal => "basal",
            State::Mild => "mild",
            State::Severe => "severe",
        }
    }

    /// Number of independent gastric generators in this state.
    pub fn generators(self) -> usize {
        match self {
            State::Basal => 1,
            State::Mild => 2,
            State::Severe => 3,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "basal" => Ok(State::Basal),
            "mild" => Ok(State::Mild),
            "severe" => Ok(State::Severe),
            other => Err(Error::invalid(format!(
                "unknown state `{other}` (expected basal, mild or severe)"
            ))),
        }
    }
}

/// Two states compared subject by subject; differences are `second - first`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatePair {
    pub first: State,
    pub second: State,
}

impl StatePair {
    pub const BASAL_MILD: StatePair = StatePair {
        first: State::Basal,
        second: State::Mild,
    };
    pub const BASAL_SEVERE: StatePair = StatePair {
        first: State::Basal,
        second: State::Severe,
    };
    pub const MILD_SEVERE: StatePair = StatePair {
        first: State::Mild,
        second: State::Severe,
    };
}

impl fmt::Display for StatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.first, self.second)
    }
}

impl FromStr for StatePair {
    type Err = Error;

    /// Parses `first:second`, e.g. `basal:severe`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("state pair must look like basal:severe, got `{s}`")))?;
        let pair = StatePair {
            first: a.parse()?,
            second: b.parse()?,
        };
        if pair.first == pair.second {
            return Err(Error::invalid(format!("state pair `{s}` compares a state with itself")));
        }
        Ok(pair)
    }
}

/// One synchronized multichannel recording of a subject in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject: u32,
    pub state: State,
    pub sample_rate_hz: f64,
    pub channel_ids: Vec<u32>,
    /// `channels[c][t]`: one sample vector per channel, all the same length.
    pub channels: Vec<Vec<f64>>,
}

impl Recording {
    pub fn new(
        subject: u32,
        state: State,
        sample_rate_hz: f64,
        channel_ids: Vec<u32>,
        channels: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let rec = Recording {
            subject,
            state,
            sample_rate_hz,
            channel_ids,
            channels,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if self.channel_ids.is_empty() {
            return Err(Error::invalid("recording has no channels"));
        }
        if self.channel_ids.len() != self.channels.len() {
            return Err(Error::LengthMismatch {
                what: "channel ids vs channel columns",
                left: self.channel_ids.len(),
                right: self.channels.len(),
            });
        }
        let mut seen = self.channel_ids.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("channel ids are not unique"));
        }
        let len = self.channels[0].len();
        for ch in &self.channels {
            if ch.len() != len {
                return Err(Error::LengthMismatch {
                    what: "channel lengths",
                    left: ch.len(),
                    right: len,
                });
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("recording contains non-finite samples"));
            }
        }
        Ok(())
    }

    pub fn samples_per_channel(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn duration_s(&self) -> f64 {
        self.samples_per_channel() as f64 / self.sample_rate_hz
    }

    pub fn channel(&self, id: u32) -> Option<&[f64]> {
        self.channel_ids
            .iter()
            .position(|&c| c == id)
            .map(|i| self.channels[i].as_slice())
    }

    pub fn signal(&self, index: usize) -> Result<Signal> {
        Signal::new(self.channels[index].clone(), 1.0 / self.sample_rate_hz)
    }
}

/// Recordings keyed by `(subject, state)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    /// Seed of the simulator, when the cohort is synthetic.
    pub seed: Option<u64>,
    recordings: BTreeMap<(u32, State), Recording>,
}

impl Dataset {
    pub fn new(seed: Option<u64>) -> Self {
        Dataset {
            seed,
            recordings: BTreeMap::new(),
        }
    }

    /// Adds a recording; a second recording for the same subject and state
    /// is rejected.
    pub fn insert(&mut self, recording: Recording) -> Result<()> {
        let key = (recording.subject, recording.state);
        if self.recordings.contains_key(&key) {
            return Err(Error::invalid(format!(
                "duplicate recording for subject {} in state {}",
                key.0, key.1
            )));
        }
        self.recordings.insert(key, recording);
        Ok(())
    }

    pub fn get(&self, subject: u32, state: State) -> Option<&Recording> {
        self.recordings.get(&(subject, state))
    }

    pub fn recordings(&self) -> impl Iterator<Item = &Recording> {
        self.recordings.values()
    }

    pub fn len(&self) -> usize {
        self.recordings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recordings.is_empty()
    }

    /// Subjects that have a recording in `state`, ascending.
    pub fn subjects_in(&self, state: State) -> Vec<u32> {
        self.recordings
            .keys()
            .filter(|(_, s)| *s == state)
            .map(|(subject, _)| *subject)
            .collect()
    }

    pub fn subjects(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.recordings.keys().map(|(s, _)| *s).collect();
        out.dedup();
        out
    }

    /// Channel ids shared by every recording, in the order of the first one.
    pub fn channel_ids(&self) -> Vec<u32> {
        let mut iter = self.recordings.values();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let rest: Vec<&Recording> = iter.collect();
        first
            .channel_ids
            .iter()
            .copied()
            .filter(|id| rest.iter().all(|r| r.channel_ids.contains(id)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(subject: u32, state: State) -> Recording {
        Recording::new(subject, state, 10.0, vec![7, 8], vec![vec![0.0; 20], vec![1.0; 20]]).unwrap()
    }

    #[test]
    fn state_pair_parsing() {
        assert_eq!("basal:severe".parse::<StatePair>().unwrap(), StatePair::BASAL_SEVERE);
        assert!("basal".parse::<StatePair>().is_err());
        assert!("basal:basal".parse::<StatePair>().is_err());
        assert!("basal:gone".parse::<StatePair>().is_err());
        assert_eq!(StatePair::MILD_SEVERE.to_string(), "mild:severe");
    }

    #[test]
    fn recording_invariants() {
        assert!(Recording::new(0, State::Basal, 10.0, vec![7, 7], vec![vec![0.0], vec![0.0]]).is_err());
        assert!(Recording::new(0, State::Basal, 0.0, vec![7], vec![vec![0.0]]).is_err());
        assert!(Recording::new(0, State::Basal, 10.0, vec![7, 8], vec![vec![0.0], vec![]]).is_err());
        assert!(Recording::new(0, State::Basal, 10.0, vec![7], vec![vec![f64::NAN]]).is_err());
        let r = Recording::new(0, State::Basal, 10.0, vec![7], vec![vec![0.0; 6000]]).unwrap();
        assert_eq!(r.duration_s(), 600.0);
    }

    #[test]
    fn dataset_rejects_duplicates() {
        let mut d = Dataset::new(None);
        d.insert(rec(0, State::Basal)).unwrap();
        d.insert(rec(0, State::Severe)).unwrap();
        d.insert(rec(1, State::Basal)).unwrap();
        assert!(d.insert(rec(0, State::Basal)).is_err());
        assert_eq!(d.subjects(), vec![0, 1]);
        assert_eq!(d.subjects_in(State::Severe), vec![0]);
        assert_eq!(d.channel_ids(), vec![7, 8]);
    }
}
