//! The `eggwave` command line.
//!
//! ```text
//! eggwave simulate --out cohort --subjects 16 --seed 7
//! eggwave compress --data cohort --cr 3
//! eggwave surface  --square-wave --out stair
//! eggwave match    --data cohort --state basal --channel 7
//! eggwave stats    --data cohort --pair basal:severe
//! eggwave sweep    --data cohort --crs 2,3,4,5,8
//! ```
//!
//! Bad flags print usage and exit with status 2. Data errors print one line
//! and exit with status 1.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::compression::{CompressionConfig, Depth};
use crate::dataset::{Dataset, State, StatePair};
use crate::error::{Error, Result};
use crate::io::{load_dataset, write_dataset};
use crate::matcher::{
    match_recordings, prd_surface, refine_surface, surface_minima, write_surface_csv,
    write_surface_pgm, GridSpec, MatchOptions, DEFAULT_GRID_RESOLUTION,
};
use crate::pipeline::{compare_states, cr_sweep, prd_table, write_sweep_csv};
use crate::simulate::{self, simulate_cohort, square_wave, CohortSpec};
use crate::stats::{render_csv, render_text, CompareOptions, LillieforsConfig, DEFAULT_ALPHA};
use crate::wavelet::{WaveletSpec, DEFAULT_TARGET_HZ};

/// Depth of the square-wave surface.
const SQUARE_DEPTH: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "eggwave", version, about = "Wavelet-compression analysis of multichannel EGG recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic cohort (CSV recordings and a manifest).
    Simulate(SimulateArgs),
    /// PRD of every recorded channel at one compression ratio.
    Compress(CompressArgs),
    /// PRD surface over the Pollen plane for one signal (CSV and PGM).
    Surface(SurfaceArgs),
    /// Best Pollen wavelet averaged over recordings.
    Match(MatchArgs),
    /// Per-channel paired comparison of two states.
    Stats(StatsArgs),
    /// Detection rate against compression ratio.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = simulate::DEFAULT_SUBJECTS)]
    subjects: u32,
    #[arg(long, default_value_t = simulate::DEFAULT_CHANNELS)]
    channels: u32,
    /// Recording length in seconds.
    #[arg(long, default_value_t = simulate::DEFAULT_DURATION_S)]
    duration: f64,
    /// Sampling rate in hertz.
    #[arg(long, default_value_t = simulate::DEFAULT_SAMPLE_RATE_HZ)]
    rate: f64,
    #[arg(long, default_value_t = simulate::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompressionFlags {
    /// haar, daubechies-2, daubechies-3, coiflet-1 or pollen:<a>,<b>.
    #[arg(long, default_value_t = WaveletSpec::default())]
    wavelet: WaveletSpec,
    /// Compression ratio (total / kept coefficients).
    #[arg(long, default_value_t = 3.0)]
    cr: f64,
    /// Decomposition depth, or `auto` to match the slow-wave rhythm.
    #[arg(long, default_value_t = Depth::Auto)]
    depth: Depth,
}

impl CompressionFlags {
    fn config(&self) -> CompressionConfig {
        CompressionConfig {
            wavelet: self.wavelet,
            depth: self.depth,
            cr: self.cr,
            target_hz: DEFAULT_TARGET_HZ,
        }
    }
}

#[derive(Debug, Args)]
struct CompressArgs {
    /// Cohort directory or manifest file.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    compression: CompressionFlags,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Cohort directory or manifest file.
    #[arg(long, required_unless_present = "square_wave", conflicts_with = "square_wave")]
    data: Option<PathBuf>,
    #[arg(long, required_unless_present = "square_wave")]
    subject: Option<u32>,
    #[arg(long, required_unless_present = "square_wave")]
    state: Option<State>,
    #[arg(long, required_unless_present = "square_wave")]
    channel: Option<u32>,
    /// Use a 2048-sample ±1 square wave with 4-sample blocks instead of data.
    #[arg(long)]
    square_wave: bool,
    /// Seed of the square wave.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Nodes per axis.
    #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
    grid: usize,
    #[arg(long, default_value_t = 3.0)]
    cr: f64,
    /// Depth; `auto` uses the daubechies-3 rule (6 for the square wave).
    #[arg(long, default_value_t = Depth::Auto)]
    depth: Depth,
    /// Also evaluate an 8×8 grid around the minimum.
    #[arg(long)]
    refine: bool,
    /// Output prefix: writes <prefix>.csv and <prefix>.pgm.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MatchArgs {
    /// Cohort directory or manifest file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = State::Basal)]
    state: State,
    /// Restrict to one channel; all channels when omitted.
    #[arg(long)]
    channel: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
    grid: usize,
    #[arg(long, default_value_t = 3.0)]
    cr: f64,
    /// Depth; `auto` uses the daubechies-3 rule.
    #[arg(long, default_value_t = Depth::Auto)]
    depth: Depth,
    #[arg(long)]
    refine: bool,
    /// CSV of per-recording minima.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Cohort directory or manifest file.
    #[arg(long)]
    data: PathBuf,
    /// States to compare, `first:second`; differences are second - first.
    #[arg(long, default_value_t = StatePair::BASAL_SEVERE)]
    pair: StatePair,
    #[command(flatten)]
    compression: CompressionFlags,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// CSV output of the table.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Cohort directory or manifest file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 3.0, 4.0, 5.0, 8.0])]
    crs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [StatePair::BASAL_MILD, StatePair::BASAL_SEVERE])]
    pairs: Vec<StatePair>,
    #[arg(long, default_value_t = WaveletSpec::default())]
    wavelet: WaveletSpec,
    #[arg(long, default_value_t = Depth::Auto)]
    depth: Depth,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the command line with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the command line; returns the exit status.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{}", text.ansi())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "eggwave: {line}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate_cmd(a, out),
        Command::Compress(a) => compress_cmd(a, out),
        Command::Surface(a) => surface_cmd(a, out),
        Command::Match(a) => match_cmd(a, out),
        Command::Stats(a) => stats_cmd(a, out),
        Command::Sweep(a) => sweep_cmd(a, out),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => say(out, &String::from_utf8_lossy(bytes)),
    }
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let spec = CohortSpec {
        subjects: a.subjects,
        channels: a.channels,
        duration_s: a.duration,
        sample_rate_hz: a.rate,
        seed: a.seed,
    };
    let dataset = simulate_cohort(&spec)?;
    let manifest = write_dataset(&a.out, &dataset)?;
    say(
        out,
        &format!(
            "wrote {} recordings ({} subjects x {} states x {} channels x {} samples) to {}\n",
            dataset.len(),
            spec.subjects,
            State::ALL.len(),
            spec.channels,
            spec.samples(),
            manifest.display()
        ),
    )
}

fn compress_cmd(a: CompressArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&a.data)?;
    let table = prd_table(&dataset, &a.compression.config())?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf).map_err(|e| Error::io("<buffer>", e))?;
    emit(a.out.as_deref(), &buf, out)
}

/// Depth for Pollen-plane work, where the wavelet varies across the grid.
fn plane_depth(depth: Depth, len: usize, ts: f64) -> Result<usize> {
    depth.resolve(&WaveletSpec::default().filter()?, len, ts, DEFAULT_TARGET_HZ)
}

fn channel_signal(dataset: &Dataset, subject: u32, state: State, channel: u32) -> Result<(Vec<f64>, f64)> {
    let rec = dataset.get(subject, state).ok_or_else(|| {
        Error::invalid(format!("no recording for subject {subject} in state {state}"))
    })?;
    let x = rec.channel(channel).ok_or_else(|| {
        Error::invalid(format!("subject {subject} / {state} has no channel {channel}"))
    })?;
    Ok((x.to_vec(), 1.0 / rec.sample_rate_hz))
}

fn surface_cmd(a: SurfaceArgs, out: &mut dyn Write) -> Result<()> {
    let (x, depth) = if a.square_wave {
        let depth = match a.depth {
            Depth::Auto => SQUARE_DEPTH,
            Depth::Fixed(d) => d,
        };
        (square_wave(simulate::SQUARE_WAVE_LEN, simulate::SQUARE_WAVE_BLOCK, a.seed)?, depth)
    } else {
        let data = a.data.as_deref().expect("required by clap");
        let dataset = load_dataset(data)?;
        let (subject, state, channel) = (
            a.subject.expect("required by clap"),
            a.state.expect("required by clap"),
            a.channel.expect("required by clap"),
        );
        let (x, ts) = channel_signal(&dataset, subject, state, channel)?;
        let depth = plane_depth(a.depth, x.len(), ts)?;
        (x, depth)
    };
    let surface = prd_surface(&x, &GridSpec::full(a.grid), a.cr, depth)?;
    let mut csv = Vec::new();
    write_surface_csv(&surface, &mut csv).map_err(|e| Error::io("<buffer>", e))?;
    let mut pgm = Vec::new();
    write_surface_pgm(&surface, &mut pgm).map_err(|e| Error::io("<buffer>", e))?;
    let csv_path = a.out.with_extension("csv");
    let pgm_path = a.out.with_extension("pgm");
    write_file(&csv_path, &csv)?;
    write_file(&pgm_path, &pgm)?;

    let mut report = format!(
        "surface {0}x{0}, CR {1}, depth {2}: PRD {3:.6}..{4:.6} %\n",
        a.grid,
        a.cr,
        depth,
        surface.min_value(),
        surface.max_value()
    );
    for (k, p) in surface_minima(&surface).iter().take(5).enumerate() {
        let (ap, bp) = p.over_pi();
        let tag = if k == 0 { "global" } else { "local" };
        report += &format!("{tag} minimum: a = {ap:.4}pi, b = {bp:.4}pi, PRD {:.6} %\n", p.prd);
    }
    if a.refine {
        let fine = refine_surface(&x, &surface)?.argmin();
        let (ap, bp) = fine.over_pi();
        report += &format!("refined minimum: a = {ap:.4}pi, b = {bp:.4}pi, PRD {:.6} %\n", fine.prd);
    }
    report += &format!("wrote {} and {}\n", csv_path.display(), pgm_path.display());
    say(out, &report)
}

fn match_cmd(a: MatchArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&a.data)?;
    let mut labels = Vec::new();
    let mut signals = Vec::new();
    let mut depth = None;
    for subject in dataset.subjects_in(a.state) {
        let rec = dataset.get(subject, a.state).expect("listed subject");
        for (id, x) in rec.channel_ids.iter().zip(&rec.channels) {
            if a.channel.is_some_and(|c| c != *id) {
                continue;
            }
            let d = plane_depth(a.depth, x.len(), 1.0 / rec.sample_rate_hz)?;
            if *depth.get_or_insert(d) != d {
                return Err(Error::invalid("recordings resolve to different depths; pass --depth"));
            }
            labels.push((subject, *id));
            signals.push(x.as_slice());
        }
    }
    let Some(depth) = depth else {
        return Err(Error::invalid(format!("no recordings match state {}", a.state)));
    };
    let options = MatchOptions {
        grid: GridSpec::full(a.grid),
        cr: a.cr,
        depth,
        refine: a.refine,
    };
    let result = match_recordings(&signals, &options)?;
    if let Some(path) = &a.out {
        let mut csv = String::from("subject,channel,a,b,a_over_pi,b_over_pi,prd\n");
        for ((s, c), p) in labels.iter().zip(&result.minima) {
            let (ap, bp) = p.over_pi();
            csv += &format!("{s},{c},{:.12},{:.12},{ap:.6},{bp:.6},{:.6}\n", p.a, p.b, p.prd);
        }
        write_file(path, csv.as_bytes())?;
    }
    let (a_star, b_star) = result.best;
    let (ap, bp) = result.best_over_pi();
    say(
        out,
        &format!(
            "matched {} recordings ({} state, depth {depth}, CR {})\n(a*, b*) = ({a_star:.6}, {b_star:.6}) rad = ({ap:.4}pi, {bp:.4}pi)\n",
            signals.len(),
            a.state,
            a.cr
        ),
    )
}

fn compare_options(alpha: f64) -> CompareOptions {
    CompareOptions {
        alpha,
        lilliefors: LillieforsConfig::default(),
    }
}

fn stats_cmd(a: StatsArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&a.data)?;
    let config = a.compression.config();
    let table = prd_table(&dataset, &config)?;
    let options = compare_options(a.alpha);
    let rows = compare_states(&table, a.pair, &options)?;
    if let Some(path) = &a.out {
        write_file(path, render_csv(&rows).as_bytes())?;
    }
    let significant = rows.iter().filter(|r| r.significant).count();
    let text = format!(
        "{} vs {} ({}, CR {}, alpha {})\n{}\n{significant} of {} channels significant\nLilliefors p-values: {} Monte Carlo draws, seed {:#x}\n",
        a.pair.first,
        a.pair.second,
        config.wavelet,
        config.cr,
        a.alpha,
        render_text(&rows).trim_end(),
        rows.len(),
        options.lilliefors.draws,
        options.lilliefors.seed
    );
    say(out, &text)
}

fn sweep_cmd(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&a.data)?;
    let base = CompressionConfig {
        wavelet: a.wavelet,
        depth: a.depth,
        ..CompressionConfig::default()
    };
    let points = cr_sweep(&dataset, &base, &a.crs, &a.pairs, &compare_options(a.alpha))?;
    let mut buf = Vec::new();
    write_sweep_csv(&points, &mut buf).map_err(|e| Error::io("<buffer>", e))?;
    emit(a.out.as_deref(), &buf, out)
}
