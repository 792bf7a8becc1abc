//! Initial wave packets, their normalization, closed-form evolutions and
//! the Gaussian waist algebra.
//!
//! Internally hbar = m = 1; lengths are measured in units of sigma and
//! times in units of tau. [`UnitSystem`] converts at the boundaries.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{SpatialGrid, WaveField};
use crate::specfun::{bessel_k, erfi_complex, gamma};

/// Physical scales used to rescale input and output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            sigma: 1.0,
            tau: 1.0,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64, sigma: f64, tau: f64) -> Result<Self> {
        for (name, v) in [
            ("hbar", hbar),
            ("mass", mass),
            ("sigma", sigma),
            ("tau", tau),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(vec![format!(
                    "units.{name} must be positive, got {v}"
                )]));
            }
        }
        Ok(Self {
            hbar,
            mass,
            sigma,
            tau,
        })
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.sigma
    }

    pub fn length_to_internal(&self, x: f64) -> f64 {
        x / self.sigma
    }

    pub fn time_to_physical(&self, t: f64) -> f64 {
        t * self.tau
    }

    pub fn time_to_internal(&self, t: f64) -> f64 {
        t / self.tau
    }
}

/// psi(x, 0) ~ exp(-i x^2 / 2 tau) / (1 + x^2/sigma^2)^nu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSpec {
    pub nu: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl SingularSpec {
    pub fn new(nu: f64, sigma: f64, tau: f64) -> Result<Self> {
        if !(nu > 0.25) {
            return Err(Error::NonNormalizable { nu });
        }
        positive("sigma", sigma)?;
        positive("tau", tau)?;
        Ok(Self { nu, sigma, tau })
    }

    fn profile(&self, x: f64) -> Complex64 {
        let env = (1.0 + (x / self.sigma).powi(2)).powf(-self.nu);
        Complex64::from_polar(env, -0.5 * x * x / self.tau)
    }
}

/// Singular packet multiplied by a pair of soft tanh steps at +-x_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSingularSpec {
    pub base: SingularSpec,
    pub x_b: f64,
}

impl TruncatedSingularSpec {
    pub fn new(base: SingularSpec, x_b: f64) -> Result<Self> {
        positive("x_b", x_b)?;
        Ok(Self { base, x_b })
    }

    /// [1 + tanh((x + x_b)/sigma)] [1 - tanh((x - x_b)/sigma)], equal to 4
    /// deep inside the aperture.
    pub fn aperture(&self, x: f64) -> f64 {
        let s = self.base.sigma;
        (1.0 + ((x + self.x_b) / s).tanh()) * (1.0 - ((x - self.x_b) / s).tanh())
    }
}

/// Gaussian whose minimum width sigma0 is reached at t = tau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub sigma0: f64,
    pub tau: f64,
}

impl GaussianSpec {
    pub fn new(sigma0: f64, tau: f64) -> Result<Self> {
        positive("sigma0", sigma0)?;
        if !tau.is_finite() {
            return Err(Error::Config(vec![format!(
                "tau must be finite, got {tau}"
            )]));
        }
        Ok(Self { sigma0, tau })
    }

    /// sigma~_g(t) = sigma0 (1 + i (t - tau) / (2 sigma0^2)).
    pub fn sigma_tilde(&self, t: f64) -> Complex64 {
        Complex64::new(self.sigma0, (t - self.tau) / (2.0 * self.sigma0))
    }

    /// sigma_g(t) = |sigma~_g(t)|.
    pub fn width(&self, t: f64) -> f64 {
        self.sigma_tilde(t).norm()
    }

    /// theta_g(t) = arctan[(t - tau) / (2 sigma0^2)].
    pub fn phase(&self, t: f64) -> f64 {
        ((t - self.tau) / (2.0 * self.sigma0 * self.sigma0)).atan()
    }

    /// t_s = 2 sigma0^2.
    pub fn spreading_time(&self) -> f64 {
        2.0 * self.sigma0 * self.sigma0
    }

    pub fn amplitude(&self, x: f64, t: f64) -> Complex64 {
        let st = self.sigma_tilde(t);
        let norm = (2.0 * PI * self.sigma0 * self.sigma0).powf(-0.25);
        let s0 = Complex64::new(self.sigma0, 0.0);
        (s0 / st).sqrt() * norm * (-(x * x) / (4.0 * self.sigma0 * st)).exp()
    }

    /// Bohmian velocity v(x, t) = (t - tau) / (4 sigma0^2 sigma_g(t)^2) x.
    pub fn velocity(&self, x: f64, t: f64) -> f64 {
        let w = self.width(t);
        (t - self.tau) / (4.0 * self.sigma0 * self.sigma0 * w * w) * x
    }

    pub fn density(&self, x: f64, t: f64) -> f64 {
        let w = self.width(t);
        (-(x * x) / (2.0 * w * w)).exp() / ((2.0 * PI).sqrt() * w)
    }
}

/// Chirped rectangle of full width a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangularSpec {
    pub a: f64,
    pub tau: f64,
}

impl RectangularSpec {
    pub fn new(a: f64, tau: f64) -> Result<Self> {
        positive("a", a)?;
        positive("tau", tau)?;
        Ok(Self { a, tau })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PacketSpec {
    Singular(SingularSpec),
    TruncatedSingular(TruncatedSingularSpec),
    Gaussian(GaussianSpec),
    Rectangular(RectangularSpec),
}

impl PacketSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PacketSpec::Singular(_) => "singular",
            PacketSpec::TruncatedSingular(_) => "truncated_singular",
            PacketSpec::Gaussian(_) => "gaussian",
            PacketSpec::Rectangular(_) => "rectangular",
        }
    }

    /// Time at which the initial chirp focuses the packet.
    pub fn focus_time(&self) -> f64 {
        match self {
            PacketSpec::Singular(s) => s.tau,
            PacketSpec::TruncatedSingular(s) => s.base.tau,
            PacketSpec::Gaussian(g) => g.tau,
            PacketSpec::Rectangular(r) => r.tau,
        }
    }

    /// Half-width beyond which the initial data is negligible, and the
    /// largest local wavenumber carried inside it.
    fn bandwidth(&self, grid: &SpatialGrid) -> (f64, f64) {
        let half = 0.5 * grid.length();
        match self {
            PacketSpec::Singular(s) => (half, half / s.tau),
            PacketSpec::TruncatedSingular(s) => {
                let edge = (s.x_b + 2.0 * s.base.sigma).min(half);
                (edge, edge / s.base.tau)
            }
            PacketSpec::Gaussian(g) => {
                // density below 1e-16 of the peak; momentum spread is 1/(2 sigma0)
                let reach = (2.0 * 16.0 * std::f64::consts::LN_10).sqrt();
                let edge = (reach * g.width(0.0)).min(half);
                (edge, reach / (2.0 * g.sigma0))
            }
            PacketSpec::Rectangular(r) => (0.5 * r.a, 0.5 * r.a / r.tau),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(vec![format!(
            "{name} must be positive and finite, got {v}"
        )]))
    }
}

/// N_nu = sqrt(pi) sigma Gamma(2 nu - 1/2) / Gamma(2 nu).
pub fn normalization_singular(spec: &SingularSpec) -> Result<f64> {
    if !(spec.nu > 0.25) {
        return Err(Error::NonNormalizable { nu: spec.nu });
    }
    Ok(PI.sqrt() * spec.sigma * gamma(2.0 * spec.nu - 0.5)? / gamma(2.0 * spec.nu)?)
}

/// Samples the initial packet on the grid and renormalizes it to unit
/// discrete norm.
pub fn sample_initial(spec: &PacketSpec, grid: &Arc<SpatialGrid>) -> Result<WaveField> {
    let (edge, local_k) = spec.bandwidth(grid);
    let nyquist = grid.k_nyquist();
    if local_k > 0.8 * nyquist {
        return Err(Error::Aliasing {
            local_k,
            nyquist,
            at: edge,
        });
    }
    let mut field = match spec {
        PacketSpec::Singular(s) => {
            let n = normalization_singular(s)?;
            WaveField::from_fn(grid.clone(), 0.0, |x| s.profile(x) / n.sqrt())
        }
        PacketSpec::TruncatedSingular(s) => {
            let n = normalization_singular(&s.base)?;
            WaveField::from_fn(grid.clone(), 0.0, |x| {
                s.base.profile(x) * s.aperture(x) / n.sqrt()
            })
        }
        PacketSpec::Gaussian(g) => WaveField::from_fn(grid.clone(), 0.0, |x| g.amplitude(x, 0.0)),
        PacketSpec::Rectangular(r) => {
            let dx = grid.spacing();
            let half = 0.5 * r.a;
            WaveField::from_fn(grid.clone(), 0.0, |x| {
                // cell-averaged density: edge cells carry their covered fraction
                let lo = (x - 0.5 * dx).max(-half);
                let hi = (x + 0.5 * dx).min(half);
                let frac = ((hi - lo) / dx).clamp(0.0, 1.0);
                Complex64::from_polar((frac / r.a).sqrt(), -0.5 * x * x / r.tau)
            })
        }
    };
    field.normalize();
    warn_on_edge_leakage(&field);
    Ok(field)
}

fn warn_on_edge_leakage(field: &WaveField) {
    let amps = field.amplitudes();
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let edge = amps[0].norm().max(amps[amps.len() - 1].norm());
    if edge > 1e-6 * peak {
        log::warn!(
            "|psi| at the domain edge is {:.3e} of the peak; periodic images may interfere",
            edge / peak
        );
    }
}

/// Closed-form field where one is known: Gaussian at any time, rectangle
/// for t > 0 (experimental, see [`rect_analytic`]), singular packet at
/// t = tau. `None` means no closed form; fall back to numerics.
///
/// The singular field at x = 0 is infinite for nu <= 1/2.
pub fn analytic_field(spec: &PacketSpec, grid: &Arc<SpatialGrid>, t: f64) -> Option<WaveField> {
    match spec {
        PacketSpec::Gaussian(g) => Some(WaveField::from_fn(grid.clone(), t, |x| g.amplitude(x, t))),
        PacketSpec::Rectangular(r) => {
            let amps: Result<Vec<_>> = grid
                .coords()
                .iter()
                .map(|&x| rect_analytic(r, x, t))
                .collect();
            amps.ok().map(|a| WaveField::new(grid.clone(), t, a))
        }
        PacketSpec::Singular(s) if t == s.tau => {
            let n = normalization_singular(s).ok()?;
            let amps: Option<Vec<_>> = grid
                .coords()
                .iter()
                .map(|&x| singular_at_focus(s, n, x))
                .collect();
            amps.map(|a| WaveField::new(grid.clone(), t, a))
        }
        _ => None,
    }
}

/// psi(x, tau) of the ideal singular packet, in terms of K_{nu - 1/2}.
pub fn singular_at_focus(spec: &SingularSpec, norm: f64, x: f64) -> Option<Complex64> {
    let SingularSpec { nu, sigma, tau } = *spec;
    let order = nu - 0.5;
    let prefactor = (Complex64::new(0.0, tau * norm).inv() * sigma * sigma).sqrt()
        / (2f64.powf(nu - 1.0) * gamma(nu).ok()?);
    let chirp = Complex64::from_polar(1.0, 0.5 * x * x / tau);
    let z = sigma * x.abs() / tau;
    let radial = if z == 0.0 {
        if order > 0.0 {
            gamma(order).ok()? * 2f64.powf(order - 1.0)
        } else {
            f64::INFINITY
        }
    } else {
        z.powf(order) * bessel_k(order, z).ok()?
    };
    Some(prefactor * chirp * radial)
}

/// Singularity and moment classification of the singular family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    NotSquareIntegrable,
    Singular,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    pub mean_exists: bool,
    pub variance_exists: bool,
}

impl SingularityClass {
    /// 0, 1, 2 for the three kinds in order of increasing nu.
    pub fn index(&self) -> u8 {
        match self.kind {
            SingularityKind::NotSquareIntegrable => 0,
            SingularityKind::Singular => 1,
            SingularityKind::Bounded => 2,
        }
    }
}

/// nu = 1/2 counts as singular (K_0 diverges logarithmically at the origin).
pub fn classify(nu: f64) -> SingularityClass {
    let kind = if nu > 0.5 {
        SingularityKind::Bounded
    } else if nu > 0.25 {
        SingularityKind::Singular
    } else {
        SingularityKind::NotSquareIntegrable
    };
    SingularityClass {
        kind,
        mean_exists: nu > 0.5,
        variance_exists: nu > 0.75,
    }
}

pub fn gaussian_sigma_tilde(spec: &GaussianSpec, t: f64) -> Complex64 {
    spec.sigma_tilde(t)
}

/// The two waist widths (sigma0_plus, sigma0_minus) whose Gaussians have
/// width `sigma_g0` at t = 0 and focus at t = tau: the positive roots of
/// s^4 - sigma_g0^2 s^2 + (hbar tau / 2m)^2 = 0.
pub fn waist_solutions(sigma_g0: f64, tau: f64, units: &UnitSystem) -> Result<(f64, f64)> {
    positive("sigma_g0", sigma_g0)?;
    let b = units.hbar * tau.abs() / units.mass;
    let sg2 = sigma_g0 * sigma_g0;
    let disc = sg2 * sg2 - b * b;
    if disc < 0.0 {
        return Err(Error::NoWaist {
            sigma_g0_pow4: sg2 * sg2,
            bound: b * b,
        });
    }
    let plus2 = 0.5 * (sg2 + disc.sqrt());
    let plus = plus2.sqrt();
    // product of the roots is b/2
    let minus = 0.5 * b / plus;
    Ok((plus, minus))
}

/// Initial Gaussian width sigma_g(0) whose density falls to `fraction` of
/// its peak at the same |x| as the singular packet's density.
pub fn matched_gaussian_width(spec: &SingularSpec, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Domain {
            function: "matched_gaussian_width",
            value: fraction,
            reason: "fraction must lie in (0, 1)",
        });
    }
    let s2 = fraction.powf(-1.0 / (2.0 * spec.nu)) - 1.0;
    Ok(spec.sigma * (s2 / (2.0 * (1.0 / fraction).ln())).sqrt())
}

/// Bohmian trajectory of a Gaussian seeded at x0 at t = 0.
pub fn gaussian_trajectory(spec: &GaussianSpec, x0: f64, t: f64) -> f64 {
    x0 * spec.width(t) / spec.width(0.0)
}

/// Closed-form rectangle evolution in the erfi form
///
///   (-1)^(3/4) / sqrt(4 i a) exp(i x^2 / 2 tau)
///     { erfi[(-1)^(1/4) (x - a/2) / sqrt(2t)] - erfi[(-1)^(1/4) (x + a/2) / sqrt(2t)] }.
///
/// Experimental: it reproduces the unchirped (tau -> infinity) evolution
/// exactly, but for finite tau it disagrees with direct quadrature. Use
/// numerical evolution for anything quantitative.
pub fn rect_analytic(spec: &RectangularSpec, x: f64, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain {
            function: "rect_analytic",
            value: t,
            reason: "closed form holds for t > 0 only",
        });
    }
    let eighth = Complex64::from_polar(1.0, PI / 4.0);
    let pre =
        Complex64::from_polar(1.0, 3.0 * PI / 4.0) / (Complex64::new(0.0, 4.0 * spec.a)).sqrt();
    let scale = (1.0 / (2.0 * t)).sqrt();
    let lo = erfi_complex(eighth * (scale * (x - 0.5 * spec.a)))?;
    let hi = erfi_complex(eighth * (scale * (x + 0.5 * spec.a)))?;
    Ok(pre * Complex64::from_polar(1.0, 0.5 * x * x / spec.tau) * (lo - hi))
}
