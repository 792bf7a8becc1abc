//! Width, moment and peak diagnostics of density snapshots.

use rayon::prelude::*;

use crate::propagator::WaveField;

/// Half-maximum crossings flanking the global density peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fwhm {
    pub x_minus: f64,
    pub x_plus: f64,
}

impl Fwhm {
    pub fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }
}

/// Index of the largest density sample; ties go to the sample nearest x = 0.
fn peak_index(coords: &[f64], rho: &[f64]) -> usize {
    let mut best = 0;
    for j in 1..rho.len() {
        if rho[j] > rho[best] || (rho[j] == rho[best] && coords[j].abs() < coords[best].abs()) {
            best = j;
        }
    }
    best
}

/// FWHM of the density threaded through the nearest crossings on each side
/// of the peak. `None` when a side never drops below half maximum.
pub fn fwhm(field: &WaveField) -> Option<Fwhm> {
    fwhm_of_density(field.grid().coords(), &field.density())
}

pub fn fwhm_of_density(coords: &[f64], rho: &[f64]) -> Option<Fwhm> {
    let jm = peak_index(coords, rho);
    let half = 0.5 * rho[jm];
    if !(half > 0.0) {
        return None;
    }
    let dx = coords[1] - coords[0];
    let cross = |lo: usize, hi: usize| {
        // rho[lo] and rho[hi] bracket the half level, hi = lo + 1
        let (a, b) = (rho[lo], rho[hi]);
        coords[lo] + (half - a) / (b - a) * dx
    };
    let left = (0..jm)
        .rev()
        .find(|&j| rho[j] < half)
        .map(|j| cross(j, j + 1))?;
    let right = (jm + 1..rho.len())
        .find(|&j| rho[j] < half)
        .map(|j| cross(j - 1, j))?;
    Some(Fwhm {
        x_minus: left,
        x_plus: right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord {
    pub time: f64,
    pub norm: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub peak_density: f64,
    pub peak_position: f64,
}

impl MomentRecord {
    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }
}

/// Grid moments of the density, trapezoid rule on [-L/2, L/2]. The sample
/// at -L/2 doubles as the periodic image at +L/2, so its half weights
/// cancel in the first moment. Mean and second moment are per unit norm.
pub fn moments(field: &WaveField) -> MomentRecord {
    let grid = field.grid();
    let dx = grid.spacing();
    let xs = grid.coords();
    let rho = field.density();
    let edge = 0.5 * grid.length();
    let (mut s0, mut s1, mut s2) = (rho[0], 0.0, edge * edge * rho[0]);
    for (&x, &r) in xs.iter().zip(&rho).skip(1) {
        s0 += r;
        s1 += x * r;
        s2 += x * x * r;
    }
    let norm = s0 * dx;
    let (peak_position, peak_density) = refine_peak(xs, &rho);
    MomentRecord {
        time: field.time(),
        norm,
        mean: s1 / s0,
        second_moment: s2 / s0,
        peak_density,
        peak_position,
    }
}

/// Argmax refined by a parabola through the log-density of the three
/// samples around it.
fn refine_peak(xs: &[f64], rho: &[f64]) -> (f64, f64) {
    let j = peak_index(xs, rho);
    let n = rho.len();
    if j == 0 || j + 1 == n || rho[j - 1] <= 0.0 || rho[j + 1] <= 0.0 {
        return (xs[j], rho[j]);
    }
    let (lm, l0, lp) = (rho[j - 1].ln(), rho[j].ln(), rho[j + 1].ln());
    let curvature = lm - 2.0 * l0 + lp;
    if !(curvature < 0.0) {
        return (xs[j], rho[j]);
    }
    let delta = 0.5 * (lm - lp) / curvature;
    let dx = xs[1] - xs[0];
    (xs[j] + delta * dx, (l0 - 0.25 * (lm - lp) * delta).exp())
}

/// min(rho, fraction * max rho), for display only.
pub fn clip_density(field: &WaveField, fraction: f64) -> Vec<f64> {
    clip_values(&field.density(), fraction)
}

pub fn clip_values(rho: &[f64], fraction: f64) -> Vec<f64> {
    let cap = fraction * rho.iter().copied().fold(0.0, f64::max);
    rho.iter().map(|&r| r.min(cap)).collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FwhmSeries {
    pub times: Vec<f64>,
    pub entries: Vec<Option<Fwhm>>,
}

impl FwhmSeries {
    pub fn from_fields(fields: &[WaveField]) -> Self {
        Self {
            times: fields.iter().map(WaveField::time).collect(),
            entries: fields.par_iter().map(fwhm).collect(),
        }
    }

    /// Widths with NaN where undefined.
    pub fn widths(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| e.map_or(f64::NAN, |f| f.width()))
            .collect()
    }

    /// Time and value of the smallest defined width.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.entries)
            .filter_map(|(&t, e)| e.map(|f| (t, f.width())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

pub fn moment_series(fields: &[WaveField]) -> Vec<MomentRecord> {
    fields.par_iter().map(moments).collect()
}
