//! Special functions and the two derived constants the bounds depend on.
//!
//! Everything here is implemented in-house (series, continued fractions,
//! asymptotic expansions) so the numerical core carries no external
//! dependencies. Accuracy targets:
//!
//! | function   | target                                   |
//! |------------|------------------------------------------|
//! | `erfc`     | absolute 1e-12 on [-6, 6]                |
//! | `digamma`  | 1e-10 for x > 0                          |
//! | `ln_gamma` | ~1e-14 relative for x > 0                |
//! | λ          | residual of the tangency equation < 1e-12|
//! | \|z_A\|    | 1e-9                                     |

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Triangle function `max(1 - |z|, 0)`.
#[inline]
pub fn triangle(z: f64) -> f64 {
    (1.0 - z.abs()).max(0.0)
}

/// Unnormalized sinc, `sin(x)/x` with the removable singularity filled in.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

/// Reduces an angle to the half-open interval (-π, π].
#[inline]
pub fn modulo_2pi(eps: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = eps + two_pi * (0.5 - eps / two_pi).floor();
    // floor() can land one period off when eps/2π rounds across an integer.
    if r <= -PI {
        r + two_pi
    } else if r > PI {
        r - two_pi
    } else {
        r
    }
}

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Complementary error function.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z < 2.5 {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// erf(z) = 2/√π · exp(-z²) · Σ 2ⁿ z^{2n+1} / (2n+1)!!, all terms positive.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * z2 / (2.0 * n + 1.0);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-z2).exp() * sum
}

/// Laplace continued fraction evaluated with the modified Lentz method.
fn erfc_continued_fraction(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..1000 {
        let a = k as f64 / 2.0;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (f * PI.sqrt())
}

/// ln Γ(x) for x > 0 via Stirling's series after shifting x above 15.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut xx = x;
    while xx < 15.0 {
        shift += xx.ln();
        xx += 1.0;
    }
    let inv = 1.0 / xx;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360_360.0)))));
    Ok((xx - 0.5) * xx.ln() - xx + 0.5 * (2.0 * PI).ln() + series - shift)
}

/// Γ(x) for real x away from the poles at non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let g = gamma(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g));
    }
    let mut xx = x;
    let mut prod = 1.0;
    while xx < 15.0 {
        prod *= xx;
        xx += 1.0;
    }
    Ok(ln_gamma(xx)?.exp() / prod)
}

/// B_{2k}/(2k) for k = 1..7, the coefficients of ψ's asymptotic series.
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Digamma ψ(x) = Γ'(x)/Γ(x) for x > 0.
///
/// Upward recurrence ψ(x) = ψ(x+1) - 1/x until x ≥ 10, then the
/// asymptotic series ln x - 1/(2x) - Σ B_{2k}/(2k x^{2k}).
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut acc = 0.0;
    let mut xx = x;
    while xx < 10.0 {
        acc -= 1.0 / xx;
        xx += 1.0;
    }
    let inv2 = 1.0 / (xx * xx);
    let mut term = inv2;
    let mut series = 0.0;
    for c in DIGAMMA_ASYMPTOTIC {
        series += c * term;
        term *= inv2;
    }
    Ok(acc + xx.ln() - 0.5 / xx - series)
}

/// Residual of the cosine tangency condition λ(π - arcsin λ) = 1 + √(1-λ²).
pub fn lambda_residual(lambda: f64) -> f64 {
    lambda * (PI - lambda.asin()) - 1.0 - (1.0 - lambda * lambda).sqrt()
}

/// Slope λ of the tightest linear bound cos θ ≥ 1 - λ|θ|.
///
/// The residual is -2 at 0 and π/2 - 1 at 1, and increasing in between,
/// so plain bisection converges to the unique root.
pub fn solve_lambda() -> f64 {
    bisect(lambda_residual, 0.0, 1.0, 1e-16)
}

/// Airy function Ai(x) from its Maclaurin series. Intended for |x| ≲ 5.
pub fn airy_ai(x: f64) -> f64 {
    // Ai(0) = 1/(3^{2/3} Γ(2/3)), -Ai'(0) = 1/(3^{1/3} Γ(1/3))
    let g13 = gamma(1.0 / 3.0).expect("Γ(1/3) is finite");
    let g23 = gamma(2.0 / 3.0).expect("Γ(2/3) is finite");
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * g23);
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * g13);

    let x3 = x * x * x;
    let mut f_term = 1.0;
    let mut g_term = x;
    let mut f_sum = f_term;
    let mut g_sum = g_term;
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        f_term *= x3 / ((k3 - 1.0) * k3);
        g_term *= x3 / (k3 * (k3 + 1.0));
        f_sum += f_term;
        g_sum += g_term;
        if f_term.abs() < 1e-18 * f_sum.abs().max(1.0) && g_term.abs() < 1e-18 * g_sum.abs().max(1.0)
        {
            break;
        }
    }
    c1 * f_sum - c2 * g_sum
}

/// Magnitude of the first negative zero of Ai, bracketed on (-3, -2).
pub fn airy_root_magnitude() -> f64 {
    -bisect(airy_ai, -3.0, -2.0, 1e-15)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0, "root not bracketed");
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two transcendental constants the bounds are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Slope of the cosine lower bound, ≈ 0.7246.
    pub lambda: f64,
    /// |z_A|, magnitude of the first negative Airy zero, ≈ 2.3381.
    pub airy_root_mag: f64,
}

impl Constants {
    /// Computes both constants from scratch.
    pub fn compute() -> Self {
        Self {
            lambda: solve_lambda(),
            airy_root_mag: airy_root_magnitude(),
        }
    }

    /// Process-wide cached instance.
    pub fn get() -> &'static Constants {
        static CONSTANTS: OnceLock<Constants> = OnceLock::new();
        CONSTANTS.get_or_init(Constants::compute)
    }

    /// Per-pulse canonical phase variance numerator (4/27)|z_A|³.
    pub fn canonical_phase_factor(&self) -> f64 {
        4.0 / 27.0 * self.airy_root_mag.powi(3)
    }
}
