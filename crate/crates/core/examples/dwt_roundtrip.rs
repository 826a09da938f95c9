//! Forward and inverse transform of an odd-length signal: subband lengths,
//! energy and reconstruction error.

use eggwave::compression::prd;
use eggwave::wavelet::{dwt_forward, dwt_inverse, max_depth, NamedWavelet};

fn main() -> eggwave::Result<()> {
    let x: Vec<f64> = (0..1001)
        .map(|n| (n as f64 * 0.05).sin() + 0.3 * (n as f64 * 0.71).cos())
        .collect();
    let filter = NamedWavelet::Coiflet1.filter();
    let depth = max_depth(x.len()).min(6);
    let coeffs = dwt_forward(&x, &filter, depth)?;
    println!("N = {}, depth {depth}", x.len());
    for j in 1..=depth {
        println!("  d{j}: {} coefficients", coeffs.detail(j).len());
    }
    println!("  a{depth}: {} coefficients", coeffs.approximation().len());
    let ex: f64 = x.iter().map(|v| v * v).sum();
    println!("energy: signal {ex:.6}, coefficients {:.6}", coeffs.energy());
    let y = dwt_inverse(&coeffs, &filter)?;
    println!("reconstruction PRD: {:.3e} %", prd(&x, &y)?);
    Ok(())
}
