//! Probability current, the guiding velocity field v = J / rho, and RK4
//! integration of Bohmian trajectory ensembles over evolving fields.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::propagator::{FieldSource, Propagator, SpatialGrid, WaveField};

/// J_j = Im(conj(psi_j) dpsi_j), hbar = m = 1.
pub fn current_from_gradient(psi: &[Complex64], dpsi: &[Complex64]) -> Vec<f64> {
    psi.iter()
        .zip(dpsi)
        .map(|(p, d)| (p.conj() * d).im)
        .collect()
}

/// Probability current with a spectral derivative.
pub fn probability_current(propagator: &Propagator, field: &WaveField) -> Vec<f64> {
    let dpsi = propagator.derivative(field.amplitudes());
    current_from_gradient(field.amplitudes(), &dpsi)
}

/// Guiding velocity on the grid. Points whose density lies below
/// `rho_floor * max(rho)` are masked out.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub grid: Arc<SpatialGrid>,
    pub time: f64,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl VelocityField {
    pub fn from_gradient(field: &WaveField, dpsi: &[Complex64], rho_floor: f64) -> Self {
        let current = current_from_gradient(field.amplitudes(), dpsi);
        let rho = field.density();
        let threshold = rho_floor * rho.iter().copied().fold(0.0, f64::max);
        let mut values = Vec::with_capacity(rho.len());
        let mut valid = Vec::with_capacity(rho.len());
        for (j, r) in current.iter().zip(&rho) {
            if *r >= threshold && *r > 0.0 {
                values.push(j / r);
                valid.push(true);
            } else {
                values.push(0.0);
                valid.push(false);
            }
        }
        Self {
            grid: field.grid().clone(),
            time: field.time(),
            values,
            valid,
        }
    }

    /// Velocity at an off-grid position with 4-point cubic interpolation.
    /// Returns the value and whether node regularization was needed, i.e.
    /// the bracketing cell was masked and the nearest valid grid value was
    /// used. A valid cell next to a masked one is interpolated from a
    /// stencil shifted onto valid samples, or linearly if none fits.
    pub fn interpolate(&self, x: f64) -> (f64, bool) {
        let n = self.values.len() as isize;
        let fi = self.grid.fractional_index(x);
        let j = fi.floor() as isize;
        let s = fi - j as f64;
        let idx = |k: isize| k.rem_euclid(n) as usize;
        if self.valid[idx(j)] && self.valid[idx(j + 1)] {
            for first in [-1, -2, 0] {
                let nodes = [first, first + 1, first + 2, first + 3];
                if nodes.iter().all(|&o| self.valid[idx(j + o)]) {
                    return (lagrange(&nodes, s, |o| self.values[idx(j + o)]), false);
                }
            }
            let (a, b) = (self.values[idx(j)], self.values[idx(j + 1)]);
            return (a + s * (b - a), false);
        }
        let nearest = fi.round() as isize;
        for offset in 0..n {
            for cand in [nearest - offset, nearest + offset] {
                let k = idx(cand);
                if self.valid[k] {
                    return (self.values[k], true);
                }
            }
        }
        (0.0, true)
    }
}

/// Lagrange interpolant through integer nodes, evaluated at s.
fn lagrange(nodes: &[isize; 4], s: f64, value: impl Fn(isize) -> f64) -> f64 {
    let mut sum = 0.0;
    for &a in nodes {
        let mut w = 1.0;
        for &b in nodes {
            if a != b {
                w *= (s - b as f64) / (a - b) as f64;
            }
        }
        sum += w * value(a);
    }
    sum
}

pub fn velocity_field(propagator: &Propagator, field: &WaveField, rho_floor: f64) -> VelocityField {
    let dpsi = propagator.derivative(field.amplitudes());
    VelocityField::from_gradient(field, &dpsi, rho_floor)
}

/// m equidistant points on [-half_range, half_range], endpoints included.
pub fn seed_positions(m: usize, half_range: f64) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::Domain {
            function: "seed_positions",
            value: m as f64,
            reason: "need at least two seeds",
        });
    }
    let span = (m - 1) as f64;
    Ok((0..m)
        .map(|i| half_range * (2.0 * i as f64 - span) / span)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryStatus {
    Ok,
    NodeRegularized,
    LeftDomain,
}

/// Per-trajectory bookkeeping of regularization and domain exits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryFlags {
    pub node_events: usize,
    pub first_node_time: Option<f64>,
    pub last_node_time: Option<f64>,
    pub left_domain_time: Option<f64>,
}

impl TrajectoryFlags {
    pub fn status(&self) -> TrajectoryStatus {
        if self.left_domain_time.is_some() {
            TrajectoryStatus::LeftDomain
        } else if self.node_events > 0 {
            TrajectoryStatus::NodeRegularized
        } else {
            TrajectoryStatus::Ok
        }
    }

    fn note_node(&mut self, t: f64) {
        self.node_events += 1;
        self.first_node_time.get_or_insert(t);
        self.last_node_time = Some(t);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBundle {
    pub seeds: Vec<f64>,
    pub times: Vec<f64>,
    /// positions[i][k]: trajectory i at times[k].
    pub positions: Vec<Vec<f64>>,
    pub flags: Vec<TrajectoryFlags>,
}

impl TrajectoryBundle {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Positions of every trajectory at output index k.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.positions.iter().map(|p| p[k]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Density floor relative to the instantaneous peak.
    pub rho_floor: f64,
    /// Store every n-th step (the final time is always stored).
    pub store_every: usize,
    /// Up to 2^max_halvings substeps when |v| dt exceeds the grid spacing.
    pub max_halvings: u32,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rho_floor: 1e-8,
            store_every: 10,
            max_halvings: 3,
        }
    }
}

#[derive(Debug, Clone)]
struct Walker {
    x: f64,
    flags: TrajectoryFlags,
    frozen: bool,
}

/// RK4 integration of x' = v(x, t) from t0 to t1 with nominal step dt.
///
/// Velocities come from fields evaluated exactly at every RK4 stage time
/// and are interpolated in x; all trajectories advance in lockstep and
/// share the stage fields.
pub fn integrate_trajectories<S: FieldSource + ?Sized>(
    source: &S,
    seeds: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
    options: &IntegrationOptions,
) -> Result<TrajectoryBundle> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain {
            function: "integrate_trajectories",
            value: dt,
            reason: "time step must be positive",
        });
    }
    if !(t1 > t0) {
        return Err(Error::Domain {
            function: "integrate_trajectories",
            value: t1,
            reason: "end time must exceed start time",
        });
    }
    let grid = source.grid().clone();
    let half = 0.5 * grid.length();
    let margin = 2.0 * grid.spacing();
    let inside = |x: f64| x > -half + margin && x < half - margin;
    if let Some(&bad) = seeds.iter().find(|&&x| !inside(x)) {
        return Err(Error::Domain {
            function: "integrate_trajectories",
            value: bad,
            reason: "seed outside the grid interior",
        });
    }

    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let store_every = options.store_every.max(1);
    let velocity_at = |t: f64| {
        let (f, d) = source.field_and_gradient_at(t);
        VelocityField::from_gradient(&f, &d, options.rho_floor)
    };

    let mut walkers: Vec<Walker> = seeds
        .iter()
        .map(|&x| Walker {
            x,
            flags: TrajectoryFlags::default(),
            frozen: false,
        })
        .collect();
    let mut times = vec![t0];
    let mut positions: Vec<Vec<f64>> = seeds.iter().map(|&x| vec![x]).collect();

    let mut v_now = velocity_at(t0);
    for step in 0..steps {
        let t_start = t0 + step as f64 * h;
        let fastest = walkers
            .iter()
            .filter(|w| !w.frozen)
            .map(|w| v_now.interpolate(w.x).0.abs())
            .fold(0.0, f64::max);
        let mut level = 0;
        while level < options.max_halvings
            && fastest * h / f64::from(1u32 << level) > grid.spacing()
        {
            level += 1;
        }
        let sub = 1usize << level;
        let hs = h / sub as f64;
        for s in 0..sub {
            let ta = t_start + s as f64 * hs;
            let tb = if s + 1 == sub {
                t0 + (step + 1) as f64 * h
            } else {
                ta + hs
            };
            let v_mid = velocity_at(ta + 0.5 * hs);
            let v_end = velocity_at(tb);
            let va = &v_now;
            walkers.par_iter_mut().filter(|w| !w.frozen).for_each(|w| {
                let mut regularized = false;
                let mut eval = |field: &VelocityField, x: f64| {
                    let (v, r) = field.interpolate(x);
                    regularized |= r;
                    v
                };
                let x = w.x;
                let k1 = eval(va, x);
                let k2 = eval(&v_mid, x + 0.5 * hs * k1);
                let k3 = eval(&v_mid, x + 0.5 * hs * k2);
                let k4 = eval(&v_end, x + hs * k3);
                w.x = x + hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if regularized {
                    w.flags.note_node(ta);
                }
                if !inside(w.x) {
                    w.frozen = true;
                    w.flags.left_domain_time = Some(tb);
                }
            });
            v_now = v_end;
        }
        if (step + 1) % store_every == 0 || step + 1 == steps {
            times.push(t0 + (step + 1) as f64 * h);
            for (p, w) in positions.iter_mut().zip(&walkers) {
                p.push(w.x);
            }
        }
    }

    Ok(TrajectoryBundle {
        seeds: seeds.to_vec(),
        times,
        positions,
        flags: walkers.into_iter().map(|w| w.flags).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_equidistant_and_symmetric() {
        assert_eq!(seed_positions(3, 1.0).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(seed_positions(2, 5.0).unwrap(), vec![-5.0, 5.0]);
        let s = seed_positions(51, 15.0).unwrap();
        assert_eq!(s.len(), 51);
        assert_eq!(s[25], 0.0);
        for i in 0..51 {
            assert_eq!(s[i], -s[50 - i]);
        }
        for w in s.windows(2) {
            assert!((w[1] - w[0] - 0.6).abs() < 1e-12);
        }
        assert!(seed_positions(1, 1.0).is_err());
    }

    #[test]
    fn stencil_shifts_away_from_masked_neighbours() {
        let grid = Arc::new(SpatialGrid::new(20.0, 128).unwrap());
        let values: Vec<f64> = grid.coords().iter().map(|&x| 3.0 * x - 1.0).collect();
        let o = grid.origin_index();
        let mut valid = vec![true; values.len()];
        valid[o + 2] = false;
        valid[o - 2] = false;
        let vf = VelocityField {
            grid: grid.clone(),
            time: 0.0,
            values,
            valid,
        };
        let dx = grid.spacing();
        // cell [o, o+1] is valid but its centred stencil touches o+2
        let (v, r) = vf.interpolate(0.3 * dx);
        assert!(!r && (v - (0.9 * dx - 1.0)).abs() < 1e-12);
        // both shifts are blocked: linear between the bracketing samples
        let (v, r) = vf.interpolate(-0.6 * dx);
        assert!(!r && (v - (-1.8 * dx - 1.0)).abs() < 1e-12);
        // inside the masked cell the nearest valid sample is used
        let (v, r) = vf.interpolate(2.2 * dx);
        assert!(r && (v - vf.values[o + 1]).abs() < 1e-15);
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let grid = Arc::new(SpatialGrid::new(20.0, 128).unwrap());
        let values: Vec<f64> = grid
            .coords()
            .iter()
            .map(|&x| 0.5 * x * x * x - x + 2.0)
            .collect();
        let vf = VelocityField {
            grid: grid.clone(),
            time: 0.0,
            valid: vec![true; values.len()],
            values,
        };
        for &x in &[-3.21, 0.0, 0.017, 4.5] {
            let (v, r) = vf.interpolate(x);
            assert!(!r);
            assert!((v - (0.5 * x * x * x - x + 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn masked_stencil_uses_nearest_valid_value() {
        let grid = Arc::new(SpatialGrid::new(8.0, 8).unwrap());
        let vf = VelocityField {
            grid: grid.clone(),
            time: 0.0,
            values: vec![0.0, 1.0, 2.0, 3.0, 0.0, 5.0, 6.0, 7.0],
            valid: vec![true, true, true, true, false, true, true, true],
        };
        // x = 0.4 sits next to the masked origin sample (index 4)
        let (v, r) = vf.interpolate(0.4);
        assert!(r);
        assert!(v == 3.0 || v == 5.0);
    }
}
