//! Detection rate against compression ratio; prints the sweep CSV.

use eggwave::compression::CompressionConfig;
use eggwave::dataset::StatePair;
use eggwave::pipeline::{cr_sweep, write_sweep_csv};
use eggwave::simulate::{simulate_cohort, CohortSpec};
use eggwave::stats::CompareOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cohort = simulate_cohort(&CohortSpec::default())?;
    let points = cr_sweep(
        &cohort,
        &CompressionConfig::default(),
        &[2.0, 3.0, 4.0, 5.0, 8.0],
        &[StatePair::BASAL_MILD, StatePair::BASAL_SEVERE],
        &CompareOptions::default(),
    )?;
    write_sweep_csv(&points, std::io::stdout().lock())?;
    Ok(())
}
