//! Center frequency and scale choice for the four named wavelets and a few
//! points of the Pollen plane, at the 10 Hz electrogastrogram rate.

use eggwave::wavelet::{
    center_frequency, pollen_filter, pseudo_frequency, select_scales, NamedWavelet,
    DEFAULT_SAMPLE_PERIOD_S, DEFAULT_TARGET_HZ,
};

fn main() -> eggwave::Result<()> {
    let ts = DEFAULT_SAMPLE_PERIOD_S;
    println!("{:<14} {:>8} {:>6} {:>10}", "wavelet", "Fc", "J", "Fa (cpm)");
    for w in NamedWavelet::ALL {
        let f = w.filter();
        let j = select_scales(&f, ts, DEFAULT_TARGET_HZ)?;
        let fa = pseudo_frequency(&f, j, ts)? * 60.0;
        println!("{:<14} {:>8.4} {:>6} {:>10.3}", w.name(), center_frequency(&f), j, fa);
    }
    for (a, b) in [(0.43, -0.26), (1.0, 2.0), (-2.5, 0.7)] {
        let f = pollen_filter(a, b)?;
        let j = select_scales(&f, ts, DEFAULT_TARGET_HZ)?;
        println!("pollen({a:>5}, {b:>5}) Fc {:.4} J {j}", center_frequency(&f));
    }
    Ok(())
}
