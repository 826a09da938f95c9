//! PRD surface of a piecewise-constant signal over the Pollen plane. Writes
//! `square_wave.pgm` to the working directory when given `--write`.

use std::f64::consts::PI;

use eggwave::matcher::{prd_surface, refine_surface, GridSpec};
use eggwave::simulate::{square_wave, SQUARE_WAVE_BLOCK, SQUARE_WAVE_LEN};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = square_wave(SQUARE_WAVE_LEN, SQUARE_WAVE_BLOCK, 1)?;
    let surface = prd_surface(&x, &GridSpec::full(48), 3.0, 6)?;
    let best = surface.argmin();
    let (a, b) = best.over_pi();
    println!("grid minimum at ({a:.3}π, {b:.3}π), PRD {:.3e} %", best.prd);
    let fine = refine_surface(&x, &surface)?.argmin();
    println!("refined minimum at ({:.4}, {:.4}), PRD {:.3e} %", fine.a, fine.b, fine.prd);
    println!("Haar sits at (π/2, π/2) = ({:.4}, {:.4})", PI / 2.0, PI / 2.0);
    println!("PRD range {:.3e} .. {:.2} %", surface.min_value(), surface.max_value());

    if std::env::args().any(|a| a == "--write") {
        let (lo, hi) = (surface.min_value(), surface.max_value());
        let n = surface.a_values().len();
        let m = surface.b_values().len();
        let mut pgm = format!("P5\n{m} {n}\n255\n").into_bytes();
        for i in 0..n {
            for j in 0..m {
                let t = (surface.value(i, j) - lo) / (hi - lo).max(f64::MIN_POSITIVE);
                pgm.push((t * 255.0).round() as u8);
            }
        }
        std::fs::write("square_wave.pgm", pgm)?;
        println!("wrote square_wave.pgm");
    }
    Ok(())
}
