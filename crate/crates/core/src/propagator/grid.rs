use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic 1-D mesh, x_j = -L/2 + j dx for j = 0..N, with the
/// conjugate wavenumbers in standard FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    spacing: f64,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(length: f64, count: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Grid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if count < 4 || !count.is_power_of_two() {
            return Err(Error::Grid(format!(
                "point count must be a power of two >= 4, got {count}"
            )));
        }
        let spacing = length / count as f64;
        let coords = (0..count)
            .map(|j| -0.5 * length + j as f64 * spacing)
            .collect();
        let dk = 2.0 * PI / length;
        let half = count / 2;
        let wavenumbers = (0..count)
            .map(|j| {
                if j < half {
                    j as f64 * dk
                } else {
                    (j as f64 - count as f64) * dk
                }
            })
            .collect();
        Ok(Self {
            length,
            spacing,
            coords,
            wavenumbers,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn count(&self) -> usize {
        self.coords.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Wavenumbers in FFT order: 0, dk, ..., -(N/2) dk, ..., -dk.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn k_nyquist(&self) -> f64 {
        PI / self.spacing
    }

    /// Index of the Nyquist mode in FFT order.
    pub fn nyquist_index(&self) -> usize {
        self.count() / 2
    }

    /// Index of the sample at x = 0.
    pub fn origin_index(&self) -> usize {
        self.count() / 2
    }

    /// Smallest and largest coordinates (the right edge x = L/2 is the
    /// periodic image of the left one and is not a sample).
    pub fn bounds(&self) -> (f64, f64) {
        (self.coords[0], self.coords[self.count() - 1])
    }

    /// Fractional index of position x (0 at the first sample).
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x + 0.5 * self.length) / self.spacing
    }
}
