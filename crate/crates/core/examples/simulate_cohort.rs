//! Simulates a small cohort, writes it with a manifest and loads it back.

use eggwave::io::{load_dataset, write_dataset};
use eggwave::simulate::{simulate_cohort, CohortSpec};

fn main() -> eggwave::Result<()> {
    let spec = CohortSpec {
        subjects: 4,
        seed: 11,
        ..CohortSpec::default()
    };
    let cohort = simulate_cohort(&spec)?;
    let dir = std::env::temp_dir().join("eggwave-example-cohort");
    let manifest = write_dataset(&dir, &cohort)?;
    println!("wrote {} recordings, manifest {}", cohort.len(), manifest.display());
    let back = load_dataset(&dir)?;
    assert_eq!(back, cohort);
    for r in back.recordings().take(3) {
        println!(
            "subject {} {}: {} channels x {} samples ({} s)",
            r.subject,
            r.state,
            r.channel_ids.len(),
            r.samples_per_channel(),
            r.duration_s()
        );
    }
    println!("round trip exact");
    Ok(())
}
