//! Wavelet matching on the Pollen plane.
//!
//! Every node `(a, b)` of a grid generates a 6-tap wavelet; compressing a
//! signal with it gives one PRD value, and the nodes with the lowest PRD mark
//! the wavelets that represent the signal with the fewest coefficients.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::compression::compressed_prd;
use crate::error::{Error, Result};
use crate::wavelet::{max_depth, pollen_filter};

pub const DEFAULT_GRID_RESOLUTION: usize = 64;
pub const MIN_GRID_RESOLUTION: usize = 8;
/// Nodes per axis of the optional refinement pass.
pub const REFINE_RESOLUTION: usize = 8;

const RANGE_SLACK: f64 = 1e-12;

/// Rectangular grid on the Pollen plane.
///
/// A range spanning the whole period `[-π, π]` is sampled with `resolution`
/// nodes and no duplicated endpoint (`a = -π` and `a = π` are the same
/// filter), which puts `0` and `±π/2` exactly on the grid when the resolution
/// is a multiple of 4. Narrower ranges include both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub resolution: usize,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::full(DEFAULT_GRID_RESOLUTION)
    }
}

impl GridSpec {
    pub fn full(resolution: usize) -> Self {
        GridSpec {
            resolution,
            a_range: (-PI, PI),
            b_range: (-PI, PI),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_GRID_RESOLUTION {
            return Err(Error::invalid(format!(
                "grid resolution must be at least {MIN_GRID_RESOLUTION}, got {}",
                self.resolution
            )));
        }
        for (name, (lo, hi)) in [("a", self.a_range), ("b", self.b_range)] {
            for v in [lo, hi] {
                if !(v.is_finite() && v.abs() <= PI + RANGE_SLACK) {
                    return Err(Error::OutOfRange {
                        name,
                        value: v,
                        min: -PI,
                        max: PI,
                    });
                }
            }
            if lo >= hi {
                return Err(Error::invalid(format!("empty range for {name}: [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn a_values(&self) -> Vec<f64> {
        axis_values(self.a_range, self.resolution)
    }

    pub fn b_values(&self) -> Vec<f64> {
        axis_values(self.b_range, self.resolution)
    }

    /// Whether both axes wrap around (full-period ranges).
    pub fn is_periodic(&self) -> bool {
        is_full_period(self.a_range) && is_full_period(self.b_range)
    }
}

fn is_full_period((lo, hi): (f64, f64)) -> bool {
    (hi - lo - TAU).abs() < 1e-9
}

fn axis_values((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if is_full_period((lo, hi)) {
        (0..n).map(|i| lo + TAU * i as f64 / n as f64).collect()
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub a: f64,
    pub b: f64,
    pub prd: f64,
}

impl SurfacePoint {
    /// Coordinates as fractions of π, the unit of the plane's usual plots.
    pub fn over_pi(&self) -> (f64, f64) {
        (self.a / PI, self.b / PI)
    }
}

/// PRD values on a grid of the Pollen plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PrdSurface {
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    /// Row-major in `a`: `prd[i * b_values.len() + j]` is node `(a_i, b_j)`.
    prd: Vec<f64>,
    periodic: bool,
    pub cr: f64,
    pub depth: usize,
}

impl PrdSurface {
    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn values(&self) -> &[f64] {
        &self.prd
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.prd[i * self.b_values.len() + j]
    }

    pub fn point(&self, i: usize, j: usize) -> SurfacePoint {
        SurfacePoint {
            a: self.a_values[i],
            b: self.b_values[j],
            prd: self.value(i, j),
        }
    }

    /// Grid node with the smallest PRD; ties resolve to the lexicographically
    /// first `(a, b)`.
    pub fn argmin(&self) -> SurfacePoint {
        let (i, j) = self.argmin_index();
        self.point(i, j)
    }

    pub fn argmin_index(&self) -> (usize, usize) {
        let nb = self.b_values.len();
        let mut best = 0;
        for (k, &v) in self.prd.iter().enumerate() {
            if v < self.prd[best] {
                best = k;
            }
        }
        (best / nb, best % nb)
    }

    pub fn min_value(&self) -> f64 {
        self.prd.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.prd.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid indices of the node nearest to `(a, b)`, measuring distance
    /// around the period on periodic grids.
    pub fn nearest(&self, a: f64, b: f64) -> (usize, usize) {
        (
            nearest_on_axis(&self.a_values, a, self.periodic),
            nearest_on_axis(&self.b_values, b, self.periodic),
        )
    }

    /// Up to 8 neighbours of node `(i, j)`; wraps on periodic grids.
    pub fn neighbours(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let (na, nb) = (self.a_values.len() as isize, self.b_values.len() as isize);
        let mut out = Vec::with_capacity(8);
        for di in -1isize..=1 {
            for dj in -1isize..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (mut ii, mut jj) = (i as isize + di, j as isize + dj);
                if self.periodic {
                    ii = ii.rem_euclid(na);
                    jj = jj.rem_euclid(nb);
                } else if ii < 0 || jj < 0 || ii >= na || jj >= nb {
                    continue;
                }
                let node = (ii as usize, jj as usize);
                if node != (i, j) && !out.contains(&node) {
                    out.push(node);
                }
            }
        }
        out
    }
}

fn wrapped_distance(x: f64, y: f64, periodic: bool) -> f64 {
    let d = (x - y).abs();
    if periodic {
        d.min(TAU - d)
    } else {
        d
    }
}

fn nearest_on_axis(values: &[f64], target: f64, periodic: bool) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if wrapped_distance(v, target, periodic) < wrapped_distance(values[best], target, periodic) {
            best = k;
        }
    }
    best
}

/// How grid nodes are scheduled. Both produce bit-identical surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    #[default]
    Parallel,
    Serial,
}

pub fn prd_surface(x: &[f64], grid: &GridSpec, cr: f64, depth: usize) -> Result<PrdSurface> {
    prd_surface_with(x, grid, cr, depth, Evaluation::Parallel)
}

pub fn prd_surface_with(
    x: &[f64],
    grid: &GridSpec,
    cr: f64,
    depth: usize,
    evaluation: Evaluation,
) -> Result<PrdSurface> {
    grid.validate()?;
    if depth == 0 || depth > max_depth(x.len()) {
        return Err(Error::DepthTooLarge {
            depth,
            len: x.len(),
            max: max_depth(x.len()),
        });
    }
    let a_values = grid.a_values();
    let b_values = grid.b_values();
    let nodes: Vec<(f64, f64)> = a_values
        .iter()
        .flat_map(|&a| b_values.iter().map(move |&b| (a, b)))
        .collect();
    let eval = |&(a, b): &(f64, f64)| -> Result<f64> {
        let filter = pollen_filter(a.clamp(-PI, PI), b.clamp(-PI, PI))?;
        compressed_prd(x, &filter, depth, cr)
    };
    let prd: Vec<f64> = match evaluation {
        Evaluation::Parallel => nodes.par_iter().map(eval).collect::<Result<_>>()?,
        Evaluation::Serial => nodes.iter().map(eval).collect::<Result<_>>()?,
    };
    Ok(PrdSurface {
        a_values,
        b_values,
        prd,
        periodic: grid.is_periodic(),
        cr,
        depth,
    })
}

/// Re-samples an 8×8 grid at a quarter of the coarse step around the
/// surface's global minimum. The minimum itself is one of the nodes, so the
/// refined minimum is never worse than the coarse one.
pub fn refine_surface(x: &[f64], coarse: &PrdSurface) -> Result<PrdSurface> {
    let best = coarse.argmin();
    let step = |values: &[f64]| {
        if values.len() > 1 {
            (values[1] - values[0]).abs()
        } else {
            TAU
        }
    };
    let half = (REFINE_RESOLUTION / 2) as f64;
    let span = |center: f64, d: f64| {
        let h = d / half;
        let width = h * (REFINE_RESOLUTION - 1) as f64;
        let mut lo = center - h * half;
        if lo < -PI {
            lo = -PI;
        }
        if lo + width > PI {
            lo = (PI - width).max(-PI);
        }
        (lo, (lo + width).min(PI))
    };
    let grid = GridSpec {
        resolution: REFINE_RESOLUTION,
        a_range: span(best.a, step(&coarse.a_values)),
        b_range: span(best.b, step(&coarse.b_values)),
    };
    prd_surface(x, &grid, coarse.cr, coarse.depth)
}

/// The global minimum first, then every other strict local minimum (below
/// all of its grid neighbours), by increasing PRD and then `(a, b)`.
pub fn surface_minima(surface: &PrdSurface) -> Vec<SurfacePoint> {
    let global = surface.argmin_index();
    let mut local = Vec::new();
    for i in 0..surface.a_values.len() {
        for j in 0..surface.b_values.len() {
            if (i, j) == global {
                continue;
            }
            let v = surface.value(i, j);
            let neighbours = surface.neighbours(i, j);
            if !neighbours.is_empty() && neighbours.iter().all(|&(p, q)| v < surface.value(p, q)) {
                local.push(surface.point(i, j));
            }
        }
    }
    local.sort_by(|p, q| {
        p.prd
            .total_cmp(&q.prd)
            .then(p.a.total_cmp(&q.a))
            .then(p.b.total_cmp(&q.b))
    });
    let mut out = Vec::with_capacity(local.len() + 1);
    out.push(surface.point(global.0, global.1));
    out.extend(local);
    out
}

/// Component-wise mean of per-recording minima.
pub fn aggregate_best(minima: &[(f64, f64)]) -> Result<(f64, f64)> {
    if minima.is_empty() {
        return Err(Error::invalid("no minima to aggregate"));
    }
    let n = minima.len() as f64;
    let (sa, sb) = minima
        .iter()
        .fold((0.0, 0.0), |(sa, sb), &(a, b)| (sa + a, sb + b));
    Ok((sa / n, sb / n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchOptions {
    pub grid: GridSpec,
    pub cr: f64,
    pub depth: usize,
    pub refine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// Global minimum of every recording's surface, as found.
    pub minima: Vec<SurfacePoint>,
    /// `(a*, b*)` in radians, the mean of the folded minima.
    pub best: (f64, f64),
}

impl MatchResult {
    pub fn best_over_pi(&self) -> (f64, f64) {
        (self.best.0 / PI, self.best.1 / PI)
    }
}

/// Representative of `(a, b)` and its mirror `(-a, -b)` with `a >= 0`.
///
/// `(-a, -b)` generates the time-reversed filter, which compresses a
/// stationary signal equally well, so a surface has twin minima.
pub fn canonical_point(a: f64, b: f64) -> (f64, f64) {
    if a < 0.0 || (a == 0.0 && b < 0.0) {
        (-a, -b)
    } else {
        (a, b)
    }
}

/// Locates each recording's PRD minimum and averages them after folding
/// mirror twins onto `a >= 0` (see [`canonical_point`]).
pub fn match_recordings<S: AsRef<[f64]> + Sync>(
    recordings: &[S],
    options: &MatchOptions,
) -> Result<MatchResult> {
    let minima = recordings
        .iter()
        .map(|x| best_point(x.as_ref(), options))
        .collect::<Result<Vec<_>>>()?;
    let coords: Vec<(f64, f64)> = minima.iter().map(|p| canonical_point(p.a, p.b)).collect();
    let best = aggregate_best(&coords)?;
    Ok(MatchResult { minima, best })
}

fn best_point(x: &[f64], options: &MatchOptions) -> Result<SurfacePoint> {
    let surface = prd_surface(x, &options.grid, options.cr, options.depth)?;
    let coarse = surface.argmin();
    if !options.refine {
        return Ok(coarse);
    }
    let fine = refine_surface(x, &surface)?.argmin();
    Ok(if fine.prd < coarse.prd { fine } else { coarse })
}

/// CSV with columns `a,b,prd` (radians, percent), one row per node.
pub fn write_surface_csv<W: Write>(surface: &PrdSurface, mut out: W) -> io::Result<()> {
    writeln!(out, "a,b,prd")?;
    for (i, a) in surface.a_values.iter().enumerate() {
        for (j, b) in surface.b_values.iter().enumerate() {
            writeln!(out, "{a},{b},{}", surface.value(i, j))?;
        }
    }
    Ok(())
}

/// Binary 8-bit PGM: columns follow `a` left to right, rows follow `b` from
/// top (largest) to bottom. Dark pixels are low PRD.
pub fn write_surface_pgm<W: Write>(surface: &PrdSurface, mut out: W) -> io::Result<()> {
    let (na, nb) = (surface.a_values.len(), surface.b_values.len());
    let (lo, hi) = (surface.min_value(), surface.max_value());
    let span = hi - lo;
    write!(out, "P5\n{na} {nb}\n255\n")?;
    let mut row = Vec::with_capacity(na);
    for j in (0..nb).rev() {
        row.clear();
        for i in 0..na {
            let level = if span > 0.0 {
                ((surface.value(i, j) - lo) / span * 255.0).round()
            } else {
                0.0
            };
            row.push(level as u8);
        }
        out.write_all(&row)?;
    }
    Ok(())
}
