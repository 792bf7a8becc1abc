//! Special functions needed by the closed-form packets: Gamma, the
//! modified Bessel function of the second kind for real order, and the
//! imaginary error function of a complex argument.
//!
//! All routines are pure functions of their arguments.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Gamma function for real arguments.
///
/// Negative non-integer arguments go through the reflection formula;
/// zero and the negative integers are poles.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            function: "gamma",
            value: x,
            reason: "argument must be finite",
        });
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Domain {
            function: "gamma",
            value: x,
            reason: "pole at a nonpositive integer",
        });
    }
    if (1.0..=171.0).contains(&x) && x == x.round() {
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // t^(z+1/2) split in two halves so large arguments stay finite.
    let half = t.powf(0.5 * (z + 0.5));
    SQRT_2PI * half * (half * (-t).exp()) * series
}

// Taylor coefficients of 1/Gamma(1 + x) about x = 0.
const RECIP_GAMMA_TAYLOR: [f64; 15] = [
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -0.000_001_250_493_482_142_670_657,
    0.000_001_133_027_231_981_695_882,
    -0.000_000_205_633_841_697_760_710_3,
];

/// Temme's auxiliary pair for |mu| <= 1/2:
/// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2,
/// along with 1/G(1+mu) and 1/G(1-mu).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = 1.0 / gamma_unchecked(1.0 + mu);
    let gammi = 1.0 / gamma_unchecked(1.0 - mu);
    let gam2 = 0.5 * (gammi + gampl);
    let gam1 = if mu.abs() < 0.1 {
        let mu2 = mu * mu;
        let mut acc = 0.0;
        for k in (1..RECIP_GAMMA_TAYLOR.len()).step_by(2).rev() {
            acc = acc * mu2 + RECIP_GAMMA_TAYLOR[k];
        }
        -acc
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    (gam1, gam2, gampl, gammi)
}

const BESSEL_EPS: f64 = 1e-16;
const BESSEL_MAX_ITER: usize = 10_000;

/// Ascending (Temme) series. Returns (K_mu(x), K_{mu+1}(x)) for |mu| <= 1/2.
pub(crate) fn k_pair_series(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < BESSEL_EPS {
        1.0
    } else {
        pimu / pimu.sin()
    };
    let mut d = -x2.ln();
    let mut e = mu * d;
    let fact2 = if e.abs() < BESSEL_EPS {
        1.0
    } else {
        e.sinh() / e
    };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    e = e.exp();
    let mut p = 0.5 * e / gampl;
    let mut q = 0.5 / (e * gammi);
    let mut c = 1.0;
    d = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..BESSEL_MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= d / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * BESSEL_EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

/// Steed's continued fraction. Returns (K_mu(x), K_{mu+1}(x)) for |mu| <= 1/2.
pub(crate) fn k_pair_continued_fraction(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..BESSEL_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < BESSEL_EPS {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

/// Crossover between the ascending series and the continued fraction.
pub const BESSEL_K_SWITCH: f64 = 2.0;

/// Modified Bessel function of the second kind, K_nu(x), for real order
/// and x > 0.
///
/// The order is reduced to |mu| <= 1/2, K_mu and K_{mu+1} come from the
/// ascending series (x <= 2) or Steed's continued fraction (x > 2), and
/// upward recurrence in the order finishes the job.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "bessel_k",
            value: x,
            reason: "argument must be positive and finite",
        });
    }
    if !nu.is_finite() {
        return Err(Error::Domain {
            function: "bessel_k",
            value: nu,
            reason: "order must be finite",
        });
    }
    let order = nu.abs();
    let steps = (order + 0.5).floor();
    let mu = order - steps;
    let (mut k_lo, mut k_hi) = if x <= BESSEL_K_SWITCH {
        k_pair_series(mu, x)
    } else {
        k_pair_continued_fraction(mu, x)
    };
    for i in 1..=(steps as usize) {
        let next = (mu + i as f64) * (2.0 / x) * k_hi + k_lo;
        k_lo = k_hi;
        k_hi = next;
    }
    Ok(k_lo)
}

/// Inside this ellipse the Maclaurin series is used directly.
fn in_series_region(x: f64, y: f64) -> bool {
    let xs = x / 6.3;
    let ys = y / 4.4;
    xs * xs + ys * ys < 0.085_264
}

fn erfi_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for k in 1..200 {
        let fk = k as f64;
        term *= z2 / fk;
        let contrib = term / (2.0 * fk + 1.0);
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Re z >= 0, Im z >= 0,
/// outside the small-|z| ellipse. Gautschi's truncated Taylor/Laplace
/// continued fraction scheme with the Poppe-Wijers parameter choices.
fn faddeeva_first_quadrant(x: f64, y: f64) -> Complex64 {
    let xs = x / 6.3;
    let ys = y / 4.4;
    let mut rho = xs * xs + ys * ys;
    let (h, kapn, nu) = if rho > 1.0 {
        rho = rho.sqrt();
        (0.0, 0usize, (3.0 + 1442.0 / (26.0 * rho + 77.0)) as usize)
    } else {
        rho = (1.0 - ys) * (1.0 - rho).sqrt();
        (
            1.88 * rho,
            (7.0 + 34.0 * rho).round() as usize,
            (16.0 + 26.0 * rho).round() as usize,
        )
    };
    let h2 = 2.0 * h;
    let use_taylor = h > 0.0;
    let mut qlambda = if use_taylor {
        h2.powi(kapn as i32)
    } else {
        0.0
    };
    let (mut rx, mut ry, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for n in (0..=nu).rev() {
        let np1 = (n + 1) as f64;
        let tx = y + h + np1 * rx;
        let ty = x - np1 * ry;
        let c = 0.5 / (tx * tx + ty * ty);
        rx = c * tx;
        ry = c * ty;
        if use_taylor && n <= kapn {
            let tx = qlambda + sx;
            let new_sx = rx * tx - ry * sy;
            sy = ry * tx + rx * sy;
            sx = new_sx;
            qlambda /= h2;
        }
    }
    let (mut u, v) = if use_taylor {
        (FRAC_2_SQRT_PI * sx, FRAC_2_SQRT_PI * sy)
    } else {
        (FRAC_2_SQRT_PI * rx, FRAC_2_SQRT_PI * ry)
    };
    if y == 0.0 {
        u = (-x * x).exp();
    }
    Complex64::new(u, v)
}

/// Largest log-magnitude of exp(z^2) w(z) before the result is reported as
/// an overflow.
const LOG_OVERFLOW: f64 = 709.0;

/// Imaginary error function erfi(z) = -i erf(iz) for complex z.
///
/// Exactly odd and conjugate-symmetric: the value is always computed in
/// the first quadrant and mapped back.
pub fn erfi_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            function: "erfi_complex",
            value: z.norm(),
            reason: "argument must be finite",
        });
    }
    let negate = z.re < 0.0 || (z.re == 0.0 && z.im < 0.0);
    let zz = if negate { -z } else { z };
    let conj = zz.im < 0.0;
    let q = if conj { zz.conj() } else { zz };

    let value = if q.re == 0.0 && q.im == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if in_series_region(q.re, q.im) {
        erfi_series(q)
    } else {
        // erfi(z) = i (1 - exp(z^2) w(z)) in the upper half-plane.
        let w = faddeeva_first_quadrant(q.re, q.im);
        let exponent = q * q + w.ln();
        if exponent.re > LOG_OVERFLOW {
            return Err(Error::Range {
                function: "erfi_complex",
                magnitude: z.norm(),
            });
        }
        let i = Complex64::new(0.0, 1.0);
        i * (Complex64::new(1.0, 0.0) - exponent.exp())
    };

    let value = if conj { value.conj() } else { value };
    Ok(if negate { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_simple_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-15);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma(1.0 / 6.0).unwrap(), 5.566_316_001_780_235_5) < 1e-13);
    }

    #[test]
    fn gamma_poles_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma(x), Err(Error::Domain { .. })));
        }
        let g = gamma(-0.5).unwrap();
        assert!(rel(g, -2.0 * PI.sqrt()) < 1e-14);
    }

    #[test]
    fn bessel_k_half_integer_closed_form() {
        let exact = (PI / 4.0).sqrt() * (-2.0f64).exp();
        assert!(rel(bessel_k(0.5, 2.0).unwrap(), exact) < 1e-14);
        let x = 0.7;
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
        assert!(rel(bessel_k(1.5, x).unwrap(), exact) < 1e-14);
    }

    #[test]
    fn bessel_k_rejects_nonpositive_argument() {
        assert!(bessel_k(0.3, 0.0).is_err());
        assert!(bessel_k(0.3, -1.0).is_err());
    }

    #[test]
    fn bessel_branches_agree_at_switch() {
        for &mu in &[-0.5, -1.0 / 6.0, 0.0, 1e-4, 1.0 / 6.0, 0.25, 0.5] {
            let mut x = 1.5;
            while x <= 3.0 {
                let (a0, a1) = k_pair_series(mu, x);
                let (b0, b1) = k_pair_continued_fraction(mu, x);
                assert!(rel(a0, b0) < 1e-9, "mu={mu} x={x}");
                assert!(rel(a1, b1) < 1e-9, "mu={mu} x={x}");
                x += 0.05;
            }
        }
    }

    #[test]
    fn erfi_zero_and_real_axis() {
        assert_eq!(
            erfi_complex(Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let v = erfi_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel(v.re, 1.650_425_758_797_542_9) < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn erfi_overflow_is_range_error() {
        let err = erfi_complex(Complex64::new(29.0, 0.0)).unwrap_err();
        match err {
            Error::Range { magnitude, .. } => assert_eq!(magnitude, 29.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn erfi_is_exactly_odd() {
        for &(re, im) in &[
            (0.3, 0.2),
            (2.0, -1.5),
            (-4.0, 3.0),
            (10.0, 10.0),
            (0.0, 5.0),
        ] {
            let z = Complex64::new(re, im);
            let a = erfi_complex(z).unwrap();
            let b = erfi_complex(-z).unwrap();
            assert_eq!(a, -b);
        }
    }
}
