//! On-disk cohorts: one CSV per recording plus a TOML manifest.
//!
//! Recording layout:
//!
//! ```text
//! # eggwave recording v1
//! # subject: 3
//! # state: severe
//! # sample_rate_hz: 10
//! # channels: 7,8,9
//! # samples: 6000
//! # duration_s: 600
//! time_s,ch7,ch8,ch9
//! 0.0000000000000000e0,1.2345678901234567e-1,...
//! ```
//!
//! Samples are written with 17 significant digits, so reading a file back
//! reproduces every value exactly. Header lines may appear in any order, but
//! all of them are required.
//!
//! Manifest layout (paths relative to the manifest's directory):
//!
//! ```toml
//! format = "eggwave-manifest-1"
//! seed = 7
//! sample_rate_hz = 10.0
//!
//! [[recordings]]
//! subject = 1
//! state = "basal"
//! path = "subject01_basal.csv"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Recording, State};
use crate::error::{Error, Result};

pub const RECORDING_MAGIC: &str = "eggwave recording v1";
pub const MANIFEST_FORMAT: &str = "eggwave-manifest-1";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Serializes a recording to the CSV layout above.
pub fn recording_to_string(r: &Recording) -> Result<String> {
    r.validate()?;
    let n = r.samples_per_channel();
    let ids: Vec<String> = r.channel_ids.iter().map(u32::to_string).collect();
    let mut out = String::with_capacity(n * (r.channels.len() + 1) * 24 + 256);
    let _ = writeln!(out, "# {RECORDING_MAGIC}");
    let _ = writeln!(out, "# subject: {}", r.subject);
    let _ = writeln!(out, "# state: {}", r.state);
    let _ = writeln!(out, "# sample_rate_hz: {}", r.sample_rate_hz);
    let _ = writeln!(out, "# channels: {}", ids.join(","));
    let _ = writeln!(out, "# samples: {n}");
    let _ = writeln!(out, "# duration_s: {}", r.duration_s());
    out.push_str("time_s");
    for id in &r.channel_ids {
        let _ = write!(out, ",ch{id}");
    }
    out.push('\n');
    for i in 0..n {
        let _ = write!(out, "{:.16e}", i as f64 / r.sample_rate_hz);
        for ch in &r.channels {
            let _ = write!(out, ",{:.16e}", ch[i]);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_recording(path: &Path, r: &Recording) -> Result<()> {
    let text = recording_to_string(r)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_recording(path: &Path) -> Result<Recording> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_recording(&text, path)
}

/// Parses the CSV layout; `path` is used only in diagnostics.
pub fn parse_recording(text: &str, path: &Path) -> Result<Recording> {
    let err = |line: usize, column: Option<usize>, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut magic = false;
    let (columns_line, columns) = loop {
        let Some((no, line)) = lines.next() else {
            return Err(err(text.lines().count().max(1), None, "missing column header row".into()));
        };
        let Some(comment) = line.strip_prefix('#') else {
            break (no, line);
        };
        let comment = comment.trim();
        if no == 1 {
            if comment != RECORDING_MAGIC {
                return Err(err(no, None, format!("expected `# {RECORDING_MAGIC}`")));
            }
            magic = true;
            continue;
        }
        let Some((key, value)) = comment.split_once(':') else {
            return Err(err(no, None, format!("malformed header line `{line}`")));
        };
        let key = key.trim().to_string();
        if header.insert(key.clone(), (no, value.trim().to_string())).is_some() {
            return Err(err(no, None, format!("repeated header field `{key}`")));
        }
    };
    if !magic {
        return Err(err(1, None, format!("expected `# {RECORDING_MAGIC}`")));
    }

    let field = |key: &str| {
        header
            .get(key)
            .ok_or_else(|| err(columns_line, None, format!("missing header field `{key}`")))
    };
    fn parse_field<T: std::str::FromStr>(
        (no, value): &(usize, String),
        key: &str,
        err: &dyn Fn(usize, Option<usize>, String) -> Error,
    ) -> Result<T> {
        value
            .parse()
            .map_err(|_| err(*no, None, format!("bad value `{value}` for `{key}`")))
    }
    let subject: u32 = parse_field(field("subject")?, "subject", &err)?;
    let state_field = field("state")?;
    let state: State = state_field
        .1
        .parse()
        .map_err(|_| err(state_field.0, None, format!("unknown state `{}`", state_field.1)))?;
    let rate_field = field("sample_rate_hz")?;
    let sample_rate_hz: f64 = parse_field(rate_field, "sample_rate_hz", &err)?;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(err(rate_field.0, None, "sample rate must be positive".into()));
    }
    let ch_field = field("channels")?;
    let channel_ids = ch_field
        .1
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| err(ch_field.0, None, format!("bad channel list `{}`", ch_field.1)))?;
    let samples_field = field("samples")?;
    let samples: usize = parse_field(samples_field, "samples", &err)?;
    let dur_field = field("duration_s")?;
    let duration_s: f64 = parse_field(dur_field, "duration_s", &err)?;
    let expected = samples as f64 / sample_rate_hz;
    if (duration_s - expected).abs() > 1e-9 * expected.max(1.0) {
        return Err(err(
            dur_field.0,
            None,
            format!("duration {duration_s} s disagrees with {samples} samples at {sample_rate_hz} Hz"),
        ));
    }

    let mut expected_cols = vec!["time_s".to_string()];
    expected_cols.extend(channel_ids.iter().map(|id| format!("ch{id}")));
    let names: Vec<&str> = columns.split(',').map(str::trim).collect();
    if names != expected_cols {
        return Err(err(
            columns_line,
            None,
            format!("column header `{columns}` does not match `{}`", expected_cols.join(",")),
        ));
    }

    let width = channel_ids.len();
    let mut channels = vec![Vec::with_capacity(samples); width];
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0;
        for (col, cell) in line.split(',').enumerate() {
            count += 1;
            if col > width {
                continue;
            }
            let cell = cell.trim();
            if cell.is_empty() {
                return Err(err(no, Some(col + 1), "missing value".into()));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| err(no, Some(col + 1), format!("non-numeric value `{cell}`")))?;
            if !v.is_finite() {
                return Err(err(no, Some(col + 1), format!("non-finite value `{cell}`")));
            }
            if col > 0 {
                channels[col - 1].push(v);
            }
        }
        if count != width + 1 {
            // Point at the first missing or first surplus cell.
            let col = if count <= width { count + 1 } else { width + 2 };
            return Err(err(no, Some(col), format!("expected {} cells, found {count}", width + 1)));
        }
    }
    let rows = channels.first().map_or(0, Vec::len);
    if rows != samples {
        return Err(err(
            samples_field.0,
            None,
            format!("header declares {samples} samples but the file has {rows} rows"),
        ));
    }
    Recording::new(subject, state, sample_rate_hz, channel_ids, channels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    sample_rate_hz: f64,
    #[serde(default)]
    recordings: Vec<ManifestRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRow {
    subject: u32,
    state: String,
    path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub subject: u32,
    pub state: State,
    /// Resolved against the manifest's directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub seed: Option<u64>,
    pub sample_rate_hz: f64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn subjects(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.entries.iter().map(|e| e.subject).collect();
        set.into_iter().collect()
    }
}

/// Accepts a manifest file or a directory containing `manifest.toml`.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let path = manifest_path(path);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let raw: ManifestFile =
        toml::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    if raw.format != MANIFEST_FORMAT {
        return Err(Error::Manifest(format!(
            "{}: unsupported format `{}` (expected `{MANIFEST_FORMAT}`)",
            path.display(),
            raw.format
        )));
    }
    if !(raw.sample_rate_hz.is_finite() && raw.sample_rate_hz > 0.0) {
        return Err(Error::Manifest(format!(
            "{}: sample rate must be positive",
            path.display()
        )));
    }
    if raw.recordings.is_empty() {
        return Err(Error::Manifest(format!("{}: no recordings listed", path.display())));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.recordings.len());
    for row in raw.recordings {
        let state: State = row
            .state
            .parse()
            .map_err(|_| Error::Manifest(format!("unknown state `{}`", row.state)))?;
        if !seen.insert((row.subject, state)) {
            return Err(Error::Manifest(format!(
                "duplicate entry for subject {} in state {state}",
                row.subject
            )));
        }
        entries.push(ManifestEntry {
            subject: row.subject,
            state,
            path: base.join(row.path),
        });
    }
    let missing: Vec<PathBuf> = entries
        .iter()
        .filter(|e| !e.path.is_file())
        .map(|e| e.path.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFiles(missing));
    }
    Ok(Manifest {
        seed: raw.seed,
        sample_rate_hz: raw.sample_rate_hz,
        entries,
    })
}

/// Reads a manifest and every recording it lists.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let manifest = read_manifest(path)?;
    let recordings = manifest
        .entries
        .par_iter()
        .map(|e| {
            let r = read_recording(&e.path)?;
            if r.subject != e.subject || r.state != e.state {
                return Err(Error::Manifest(format!(
                    "{} holds subject {} / {} but is listed as subject {} / {}",
                    e.path.display(),
                    r.subject,
                    r.state,
                    e.subject,
                    e.state
                )));
            }
            if r.sample_rate_hz != manifest.sample_rate_hz {
                return Err(Error::Manifest(format!(
                    "{} is sampled at {} Hz, manifest says {} Hz",
                    e.path.display(),
                    r.sample_rate_hz,
                    manifest.sample_rate_hz
                )));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut dataset = Dataset::new(manifest.seed);
    for r in recordings {
        dataset.insert(r)?;
    }
    Ok(dataset)
}

pub fn recording_file_name(subject: u32, state: State) -> String {
    format!("subject{subject:02}_{state}.csv")
}

/// Writes every recording and a manifest into `dir`, which is created if
/// needed. Returns the manifest path.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<PathBuf> {
    let Some(first) = dataset.recordings().next() else {
        return Err(Error::invalid("dataset has no recordings"));
    };
    let rate = first.sample_rate_hz;
    if dataset.recordings().any(|r| r.sample_rate_hz != rate) {
        return Err(Error::invalid("recordings have different sample rates"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let recs: Vec<&Recording> = dataset.recordings().collect();
    recs.par_iter()
        .map(|r| write_recording(&dir.join(recording_file_name(r.subject, r.state)), r))
        .collect::<Result<()>>()?;
    let manifest = ManifestFile {
        format: MANIFEST_FORMAT.into(),
        seed: dataset.seed,
        sample_rate_hz: rate,
        recordings: recs
            .iter()
            .map(|r| ManifestRow {
                subject: r.subject,
                state: r.state.to_string(),
                path: recording_file_name(r.subject, r.state).into(),
            })
            .collect(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Recording {
        Recording::new(
            2,
            State::Mild,
            10.0,
            vec![7, 8],
            vec![vec![0.1, -1.0 / 3.0, 1e-300, 5.0], vec![f64::MAX, -0.0, 2.5e-7, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let r = sample();
        let text = recording_to_string(&r).unwrap();
        let back = parse_recording(&text, Path::new("x.csv")).unwrap();
        assert_eq!(back, r);
        assert!(text.contains("# duration_s: 0.4\n"));
    }

    #[test]
    fn missing_cell_reports_position() {
        let text = recording_to_string(&sample()).unwrap();
        let broken = text.replacen(",-3.3333333333333331e-1,", ",,", 1);
        let e = parse_recording(&broken, Path::new("x.csv")).unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 10);
                assert_eq!(column, Some(2));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_non_finite_and_ragged_rows() {
        let text = recording_to_string(&sample()).unwrap();
        let nan = text.replacen("5.0000000000000000e0", "NaN", 1);
        assert!(matches!(
            parse_recording(&nan, Path::new("x")),
            Err(Error::Parse { column: Some(2), .. })
        ));
        let mut lines: Vec<&str> = text.lines().collect();
        lines[9] = "0.0,1.0";
        let ragged = lines.join("\n");
        assert!(matches!(
            parse_recording(&ragged, Path::new("x")),
            Err(Error::Parse { line: 10, .. })
        ));
        let short = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(parse_recording(&short, Path::new("x")).is_err());
    }

    #[test]
    fn header_errors() {
        let text = recording_to_string(&sample()).unwrap();
        assert!(parse_recording(&text.replace("# state: mild", "# state: calm"), Path::new("x")).is_err());
        assert!(parse_recording(&text.replace("# duration_s: 0.4", "# duration_s: 1"), Path::new("x")).is_err());
        assert!(parse_recording(&text.replace("ch8", "ch9"), Path::new("x")).is_err());
        assert!(parse_recording(&text[text.find('\n').unwrap() + 1..], Path::new("x")).is_err());
    }
}
