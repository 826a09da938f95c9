//! Matched wavelet for one channel over the basal recordings of a cohort,
//! compared against daubechies-3.

use eggwave::compression::compress_with_filter;
use eggwave::dataset::State;
use eggwave::matcher::{match_recordings, GridSpec, MatchOptions};
use eggwave::simulate::{simulate_cohort, CohortSpec};
use eggwave::wavelet::{pollen_filter, NamedWavelet};

fn main() -> eggwave::Result<()> {
    let cohort = simulate_cohort(&CohortSpec::default())?;
    let signals: Vec<&[f64]> = cohort
        .subjects_in(State::Basal)
        .into_iter()
        .filter_map(|s| cohort.get(s, State::Basal))
        .map(|r| r.channels[0].as_slice())
        .collect();
    let options = MatchOptions {
        grid: GridSpec::full(32),
        cr: 3.0,
        depth: 7,
        refine: false,
    };
    let result = match_recordings(&signals, &options)?;
    let (a, b) = result.best;
    println!("(a*, b*) = ({a:.4}, {b:.4}) over {} recordings", result.minima.len());

    let matched = pollen_filter(a, b)?;
    let db3 = NamedWavelet::Daubechies3.filter();
    for (name, f) in [("matched", &matched), ("daubechies-3", &db3)] {
        let mean = signals
            .iter()
            .map(|x| compress_with_filter(x, f, 7, 3.0).map(|c| c.prd_percent))
            .sum::<eggwave::Result<f64>>()?
            / signals.len() as f64;
        println!("{name:<13} mean PRD {mean:.3} %");
    }
    Ok(())
}
