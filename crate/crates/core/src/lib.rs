//! Detection of gastric electrical uncoupling in multichannel
//! electrogastrograms from the reconstruction error of wavelet-compressed
//! recordings.
//!
//! The crate is organized bottom-up:
//!
//! - [`wavelet`]: named and Pollen-parameterized 6-tap filters, the Mallat
//!   pyramid transform and the depth rule based on pseudo-frequency.
//! - [`compression`]: keep-M hard thresholding and the PRD distortion score.
//! - [`matcher`]: PRD surfaces over the Pollen plane and their minima.
//! - [`stats`]: Lilliefors-gated paired tests and per-channel comparison
//!   tables.
//! - [`pipeline`]: PRD tables over a cohort, state comparisons and
//!   compression-ratio sweeps.
//! - [`simulate`]: a seeded synthetic cohort built on generator splitting.
//! - [`dataset`] and [`io`]: in-memory cohorts and their on-disk format.
//! - [`cli`]: the `eggwave` command line.

pub mod cli;
pub mod compression;
pub mod dataset;
pub mod io;
mod error;
pub mod matcher;
pub mod pipeline;
pub mod simulate;
mod rng;
pub mod stats;
pub mod wavelet;

pub use error::{Error, Result};
