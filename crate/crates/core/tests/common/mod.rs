#![allow(dead_code)]

use std::sync::Arc;

use blowup_core::packets::{sample_initial, waist_solutions};
use blowup_core::{
    GaussianSpec, PacketSpec, Propagator, SingularSpec, SpatialGrid, SpectralEvolver,
    TruncatedSingularSpec, UnitSystem, WaveField,
};

pub fn grid(length: f64, count: usize) -> Arc<SpatialGrid> {
    Arc::new(SpatialGrid::new(length, count).unwrap())
}

pub fn default_grid() -> Arc<SpatialGrid> {
    grid(50.0, 1024)
}

/// Initial Gaussian width shared by both waist solutions.
pub fn sigma_g0() -> f64 {
    ((10.0 * 10f64.sqrt() - 1.0) / (2.0 * 10f64.ln())).sqrt()
}

/// (sigma0_plus, sigma0_minus) Gaussians focusing at tau = 1.
pub fn waist_pair() -> (GaussianSpec, GaussianSpec) {
    let (p, m) = waist_solutions(sigma_g0(), 1.0, &UnitSystem::default()).unwrap();
    (
        GaussianSpec::new(p, 1.0).unwrap(),
        GaussianSpec::new(m, 1.0).unwrap(),
    )
}

pub fn truncated_third() -> PacketSpec {
    let base = SingularSpec::new(1.0 / 3.0, 1.0, 1.0).unwrap();
    PacketSpec::TruncatedSingular(TruncatedSingularSpec::new(base, 22.5).unwrap())
}

pub fn evolver(
    spec: &PacketSpec,
    grid: &Arc<SpatialGrid>,
) -> (Propagator, WaveField, SpectralEvolver) {
    let prop = Propagator::new(grid.clone());
    let psi0 = sample_initial(spec, grid).unwrap();
    let ev = prop.evolver(&psi0);
    (prop, psi0, ev)
}

/// Standard normal CDF via the complementary error function identity
/// erf(x) = -i erfi(i x).
pub fn normal_cdf(x: f64) -> f64 {
    let z = num_complex::Complex64::new(0.0, x / std::f64::consts::SQRT_2);
    let erf = blowup_core::specfun::erfi_complex(z).unwrap().im;
    0.5 * (1.0 + erf)
}

/// Inverse of the standard normal CDF by bisection.
pub fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-12.0, 12.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
