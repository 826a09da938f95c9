//! Per-channel paired comparison of basal and severe PRD values.

use eggwave::compression::CompressionConfig;
use eggwave::dataset::StatePair;
use eggwave::pipeline::{compare_states, prd_table};
use eggwave::simulate::{simulate_cohort, CohortSpec};
use eggwave::stats::{detection_rate, render_text, CompareOptions};

fn main() -> eggwave::Result<()> {
    let cohort = simulate_cohort(&CohortSpec::default())?;
    let table = prd_table(&cohort, &CompressionConfig::default())?;
    for pair in [StatePair::BASAL_MILD, StatePair::BASAL_SEVERE] {
        let rows = compare_states(&table, pair, &CompareOptions::default())?;
        println!("{pair}");
        print!("{}", render_text(&rows));
        println!("detection {:.1} %\n", detection_rate(&rows)?);
    }
    Ok(())
}
