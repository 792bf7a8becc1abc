//! Free-particle evolution on a periodic grid.
//!
//! Each Fourier mode of the free Schrödinger equation (hbar = m = 1)
//! evolves by the unimodular factor exp(-i k^2 dt / 2), so spectral
//! stepping is exact up to round-off. A direct Riemann-sum evaluation of
//! the free-space propagator integral is kept alongside as an O(N^2)
//! cross-check.

mod field;
mod grid;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub use field::WaveField;
pub use grid::SpatialGrid;

/// Default cap on the total number of complex samples held by a snapshot
/// series (2^26 samples, 1 GiB).
pub const DEFAULT_SAMPLE_CAP: usize = 1 << 26;

/// FFT plans bound to one grid.
#[derive(Clone)]
pub struct Propagator {
    grid: Arc<SpatialGrid>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    sample_cap: usize,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("grid", &self.grid)
            .field("sample_cap", &self.sample_cap)
            .finish()
    }
}

impl Propagator {
    pub fn new(grid: Arc<SpatialGrid>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.count());
        let inverse = planner.plan_fft_inverse(grid.count());
        Self {
            grid,
            forward,
            inverse,
            sample_cap: DEFAULT_SAMPLE_CAP,
        }
    }

    pub fn with_sample_cap(mut self, cap: usize) -> Self {
        self.sample_cap = cap;
        self
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    /// Unnormalized forward DFT of the samples.
    pub fn to_spectrum(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`Propagator::to_spectrum`].
    pub fn from_spectrum(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / buf.len() as f64;
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    /// d/dx of periodic samples via the spectrum; the Nyquist mode is
    /// dropped.
    pub fn derivative(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let spectrum = self.to_spectrum(samples);
        self.from_spectrum(&self.derivative_spectrum(&spectrum))
    }

    fn derivative_spectrum(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let nyq = self.grid.nyquist_index();
        spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .enumerate()
            .map(|(j, (c, &k))| {
                if j == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, k)
                }
            })
            .collect()
    }

    fn kinetic_phase(&self, spectrum: &mut [Complex64], dt: f64) {
        for (c, &k) in spectrum.iter_mut().zip(self.grid.wavenumbers()) {
            *c *= Complex64::from_polar(1.0, -0.5 * k * k * dt);
        }
    }

    /// Exact free evolution by dt (any sign).
    pub fn free_evolve(&self, field: &WaveField, dt: f64) -> WaveField {
        let mut spectrum = self.to_spectrum(field.amplitudes());
        self.kinetic_phase(&mut spectrum, dt);
        WaveField::new(
            self.grid.clone(),
            field.time() + dt,
            self.from_spectrum(&spectrum),
        )
    }

    /// Snapshots at each requested time, each obtained by spectral stepping
    /// from the previous one. The first snapshot is reached from the input's
    /// own time.
    pub fn evolve_series(&self, psi0: &WaveField, times: &[f64]) -> Result<Vec<WaveField>> {
        if let Some(index) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::TimeOrder { index: index + 1 });
        }
        let requested = times.len().saturating_mul(self.grid.count());
        if requested > self.sample_cap {
            return Err(Error::MemoryCap {
                requested,
                cap: self.sample_cap,
            });
        }
        let mut out = Vec::with_capacity(times.len());
        let mut spectrum = self.to_spectrum(psi0.amplitudes());
        let mut now = psi0.time();
        for &t in times {
            if t == now && out.is_empty() {
                out.push(psi0.clone());
                continue;
            }
            self.kinetic_phase(&mut spectrum, t - now);
            now = t;
            out.push(WaveField::new(
                self.grid.clone(),
                t,
                self.from_spectrum(&spectrum),
            ));
        }
        Ok(out)
    }

    /// Momentum-space density |psi~(k)|^2 with psi~ = dx/sqrt(2 pi) * DFT,
    /// so that sum |psi~|^2 dk equals the position-space discrete norm.
    pub fn momentum_density(&self, field: &WaveField) -> MomentumDensity {
        let spectrum = self.to_spectrum(field.amplitudes());
        let n = self.grid.count();
        let scale = self.grid.spacing().powi(2) / (2.0 * PI);
        // ascending k: the negative half of FFT order comes first
        let order = (n / 2..n).chain(0..n / 2);
        let (k, density) = order
            .map(|j| (self.grid.wavenumbers()[j], spectrum[j].norm_sqr() * scale))
            .unzip();
        MomentumDensity {
            time: field.time(),
            dk: self.grid.dk(),
            k,
            density,
        }
    }

    /// Spectral source of fields psi(t) starting from `psi0`.
    pub fn evolver(&self, psi0: &WaveField) -> SpectralEvolver {
        SpectralEvolver {
            propagator: self.clone(),
            t0: psi0.time(),
            spectrum: self.to_spectrum(psi0.amplitudes()),
        }
    }
}

/// |psi~(k)|^2 on ascending wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDensity {
    pub time: f64,
    pub dk: f64,
    pub k: Vec<f64>,
    pub density: Vec<f64>,
}

impl MomentumDensity {
    pub fn norm(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.dk
    }

    pub fn mean(&self) -> f64 {
        self.k
            .iter()
            .zip(&self.density)
            .map(|(k, d)| k * d)
            .sum::<f64>()
            * self.dk
            / self.norm()
    }

    pub fn rms_width(&self) -> f64 {
        let m = self.mean();
        let var = self
            .k
            .iter()
            .zip(&self.density)
            .map(|(k, d)| (k - m).powi(2) * d)
            .sum::<f64>()
            * self.dk
            / self.norm();
        var.sqrt()
    }

    pub fn peak_k(&self) -> f64 {
        let (j, _) = self
            .density
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (j, &d)| if d > acc.1 { (j, d) } else { acc },
            );
        self.k[j]
    }
}

/// Something that can hand out the wave function at arbitrary times.
pub trait FieldSource: Sync {
    fn grid(&self) -> &Arc<SpatialGrid>;

    fn field_at(&self, t: f64) -> WaveField;

    /// Field and its spatial derivative at time t.
    fn field_and_gradient_at(&self, t: f64) -> (WaveField, Vec<Complex64>);
}

/// Exact spectral evolution from a fixed initial spectrum.
#[derive(Debug, Clone)]
pub struct SpectralEvolver {
    propagator: Propagator,
    t0: f64,
    spectrum: Vec<Complex64>,
}

impl SpectralEvolver {
    fn spectrum_at(&self, t: f64) -> Vec<Complex64> {
        let mut s = self.spectrum.clone();
        self.propagator.kinetic_phase(&mut s, t - self.t0);
        s
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }
}

impl FieldSource for SpectralEvolver {
    fn grid(&self) -> &Arc<SpatialGrid> {
        self.propagator.grid()
    }

    fn field_at(&self, t: f64) -> WaveField {
        let s = self.spectrum_at(t);
        WaveField::new(
            self.propagator.grid.clone(),
            t,
            self.propagator.from_spectrum(&s),
        )
    }

    fn field_and_gradient_at(&self, t: f64) -> (WaveField, Vec<Complex64>) {
        let s = self.spectrum_at(t);
        let psi = self.propagator.from_spectrum(&s);
        let dpsi = self
            .propagator
            .from_spectrum(&self.propagator.derivative_spectrum(&s));
        (WaveField::new(self.propagator.grid.clone(), t, psi), dpsi)
    }
}

/// Riemann-sum evaluation of the free-space propagator integral at one
/// target point, elapsed time t after `psi0`. O(N) per point.
pub fn direct_propagator(psi0: &WaveField, x: f64, t: f64) -> Result<Complex64> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain {
            function: "direct_propagator",
            value: t,
            reason: "elapsed time must be nonzero and finite",
        });
    }
    let grid = psi0.grid();
    let prefactor = (Complex64::new(0.0, 2.0 * PI * t)).inv().sqrt();
    let sum: Complex64 = grid
        .coords()
        .iter()
        .zip(psi0.amplitudes())
        .map(|(&xp, &a)| {
            let d = x - xp;
            a * Complex64::from_polar(1.0, 0.5 * d * d / t)
        })
        .sum();
    Ok(prefactor * sum * grid.spacing())
}

/// [`direct_propagator`] on every grid point, evaluated in parallel.
pub fn direct_propagate_field(psi0: &WaveField, t: f64) -> Result<WaveField> {
    let amplitudes = psi0
        .grid()
        .coords()
        .par_iter()
        .map(|&x| direct_propagator(psi0, x, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveField::new(
        psi0.grid().clone(),
        psi0.time() + t,
        amplitudes,
    ))
}
