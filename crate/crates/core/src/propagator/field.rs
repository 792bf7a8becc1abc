use std::sync::Arc;

use num_complex::Complex64;

use super::grid::SpatialGrid;

/// Complex samples of psi on a grid at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Arc<SpatialGrid>,
    time: f64,
    amplitudes: Vec<Complex64>,
}

impl WaveField {
    /// Panics if the amplitude count does not match the grid.
    pub fn new(grid: Arc<SpatialGrid>, time: f64, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(
            grid.count(),
            amplitudes.len(),
            "amplitude count must match the grid"
        );
        Self {
            grid,
            time,
            amplitudes,
        }
    }

    pub fn from_fn(grid: Arc<SpatialGrid>, time: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.coords().iter().map(|&x| f(x)).collect();
        Self::new(grid, time, amplitudes)
    }

    pub fn grid(&self) -> &Arc<SpatialGrid> {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Discrete norm sum |psi_j|^2 dx.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rescales to unit discrete norm and returns the factor applied.
    pub fn normalize(&mut self) -> f64 {
        let factor = 1.0 / self.norm().sqrt();
        for a in &mut self.amplitudes {
            *a *= factor;
        }
        factor
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Largest |psi_j - phi_j| over the grid.
    pub fn max_abs_diff(&self, other: &WaveField) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
