//! Keep-largest compression of one simulated channel at several ratios.

use eggwave::compression::{compress, CompressionConfig};
use eggwave::dataset::State;
use eggwave::simulate::{simulate_recording, CohortSpec, StateModel};
use eggwave::wavelet::{NamedWavelet, WaveletSpec};

fn main() -> eggwave::Result<()> {
    let spec = CohortSpec::default();
    let model = StateModel::for_subject(&spec, State::Basal, 1)?;
    let rec = simulate_recording(&spec, &model, 1)?;
    let signal = rec.signal(0)?;
    for w in NamedWavelet::ALL {
        print!("{:<14}", w.name());
        for cr in [1.0, 2.0, 3.0, 5.0, 8.0] {
            let config = CompressionConfig {
                wavelet: WaveletSpec::Named(w),
                cr,
                ..CompressionConfig::default()
            };
            let out = compress(&signal, &config)?;
            print!("  CR {cr}: {:6.2}%", out.prd_percent);
        }
        println!();
    }
    Ok(())
}
