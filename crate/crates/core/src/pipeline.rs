//! Cohort-level analysis: PRD of every recorded channel, per-channel state
//! comparisons and compression-ratio sweeps.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::compression::{compress_with_filter, CompressionConfig};
use crate::dataset::{Dataset, State, StatePair};
use crate::error::{Error, Result};
use crate::stats::{compare_paired, detection_rate, ChannelComparison, CompareOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrdEntry {
    pub subject: u32,
    pub state: State,
    pub channel: u32,
    pub prd_percent: f64,
    pub kept: usize,
    pub total_coefficients: usize,
    pub depth: usize,
}

/// PRD keyed by `(subject, state, channel)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrdTable {
    entries: BTreeMap<(u32, State, u32), PrdEntry>,
}

impl PrdTable {
    pub fn get(&self, subject: u32, state: State, channel: u32) -> Option<&PrdEntry> {
        self.entries.get(&(subject, state, channel))
    }

    pub fn entries(&self) -> impl Iterator<Item = &PrdEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn channels(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.entries.keys().map(|k| k.2).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// PRD by subject for one state and channel.
    pub fn group(&self, state: State, channel: u32) -> BTreeMap<u32, f64> {
        self.entries
            .values()
            .filter(|e| e.state == state && e.channel == channel)
            .map(|e| (e.subject, e.prd_percent))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "subject,state,channel,depth,kept,total,prd")?;
        for e in self.entries.values() {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.6}",
                e.subject, e.state, e.channel, e.depth, e.kept, e.total_coefficients, e.prd_percent
            )?;
        }
        Ok(())
    }
}

/// Compresses every channel of every recording.
pub fn prd_table(dataset: &Dataset, config: &CompressionConfig) -> Result<PrdTable> {
    if dataset.is_empty() {
        return Err(Error::invalid("dataset has no recordings"));
    }
    let filter = config.wavelet.filter()?;
    let jobs: Vec<_> = dataset
        .recordings()
        .flat_map(|r| (0..r.channel_ids.len()).map(move |c| (r, c)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(rec, c)| {
            let x = &rec.channels[c];
            let ts = 1.0 / rec.sample_rate_hz;
            let depth = config.depth.resolve(&filter, x.len(), ts, config.target_hz)?;
            let out = compress_with_filter(x, &filter, depth, config.cr)?;
            let channel = rec.channel_ids[c];
            Ok((
                (rec.subject, rec.state, channel),
                PrdEntry {
                    subject: rec.subject,
                    state: rec.state,
                    channel,
                    prd_percent: out.prd_percent,
                    kept: out.kept,
                    total_coefficients: out.total_coefficients,
                    depth,
                },
            ))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(PrdTable { entries })
}

/// One comparison row per channel, in channel order.
pub fn compare_states(
    table: &PrdTable,
    pair: StatePair,
    options: &CompareOptions,
) -> Result<Vec<ChannelComparison>> {
    let channels = table.channels();
    if channels.is_empty() {
        return Err(Error::invalid("PRD table is empty"));
    }
    channels
        .into_iter()
        .map(|ch| {
            compare_paired(
                &table.group(pair.first, ch),
                &table.group(pair.second, ch),
                ch,
                options,
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub cr: f64,
    pub pair: StatePair,
    pub significant: usize,
    pub channels: usize,
    pub detection_percent: f64,
}

/// Detection rate of each state pair at each compression ratio.
pub fn cr_sweep(
    dataset: &Dataset,
    base: &CompressionConfig,
    crs: &[f64],
    pairs: &[StatePair],
    options: &CompareOptions,
) -> Result<Vec<SweepPoint>> {
    if crs.is_empty() || pairs.is_empty() {
        return Err(Error::invalid("sweep needs at least one ratio and one state pair"));
    }
    let mut points = Vec::with_capacity(crs.len() * pairs.len());
    for &cr in crs {
        let config = CompressionConfig { cr, ..base.clone() };
        let table = prd_table(dataset, &config)?;
        for &pair in pairs {
            let rows = compare_states(&table, pair, options)?;
            points.push(SweepPoint {
                cr,
                pair,
                significant: rows.iter().filter(|r| r.significant).count(),
                channels: rows.len(),
                detection_percent: detection_rate(&rows)?,
            });
        }
    }
    Ok(points)
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "cr,comparison,significant,channels,detection_percent")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{:.2}",
            p.cr, p.pair, p.significant, p.channels, p.detection_percent
        )?;
    }
    Ok(())
}
