//! Power-law prior spectra Σ̃(ω) = κ^{p-1}/(|ω|^p + γ^p) and the covariance
//! functionals built on them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{gamma, triangle};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct PowerLawSpectrum {
    p: f64,
    kappa: f64,
    gamma: f64,
}

#[derive(Deserialize)]
struct RawSpectrum {
    p: f64,
    kappa: f64,
    gamma: f64,
}

impl TryFrom<RawSpectrum> for PowerLawSpectrum {
    type Error = Error;
    fn try_from(r: RawSpectrum) -> Result<Self> {
        PowerLawSpectrum::new(r.p, r.kappa, r.gamma)
    }
}

/// (p+1)(p+2)(p+3)
pub fn p3(p: f64) -> f64 {
    (p + 1.0) * (p + 2.0) * (p + 3.0)
}

impl PowerLawSpectrum {
    pub fn new(p: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid("p", format!("must satisfy p > 1, got {p}")));
        }
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(invalid(
                "gamma",
                format!("must be > 0 so the spectrum is bounded at zero frequency, got {gamma}"),
            ));
        }
        Ok(Self { p, kappa, gamma })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn density(&self, omega: f64) -> f64 {
        self.kappa.powf(self.p - 1.0) / (omega.abs().powf(self.p) + self.gamma.powf(self.p))
    }

    /// Prior variance Σ(0) in closed form, κ^{p-1} γ^{1-p} / (p sin(π/p)).
    pub fn variance(&self) -> f64 {
        let p = self.p;
        (self.kappa / self.gamma).powf(p - 1.0) / (p * (PI / p).sin())
    }

    // ∫_0^∞ Σ̃, used to scale absolute tolerances.
    fn total_power(&self) -> f64 {
        PI * self.variance()
    }

    /// Frequency beyond which the density is essentially a pure power law.
    fn knee(&self) -> f64 {
        20.0 * self.gamma
    }

    /// Σ(τ) = (1/π) ∫_0^∞ Σ̃(ω) cos(ωτ) dω, relative tolerance 1e-8.
    pub fn autocovariance(&self, tau: f64) -> Result<f64> {
        let tol = Tolerance::new(1e-12 * self.total_power(), 1e-10);
        let v = quad::cosine_transform(|w| self.density(w), tau, self.knee(), tol)?;
        Ok(v / PI)
    }

    /// E[(X(t+δ) - X(t))²] = (2/π) ∫_0^∞ Σ̃(ω)(1 - cos ωδ) dω.
    ///
    /// The integral is split at W, a multiple of π/δ: the head is integrated
    /// directly, the tail as ∫_W^∞ Σ̃ - ∫_W^∞ Σ̃ cos ωδ, so the small-δ case does
    /// not suffer the cancellation of Σ(0) - Σ(δ).
    pub fn increment_variance(&self, delta: f64) -> Result<f64> {
        if delta < 0.0 || !delta.is_finite() {
            return Err(invalid("delta", format!("must be finite and >= 0, got {delta}")));
        }
        if delta == 0.0 {
            return Ok(0.0);
        }
        let h = PI / delta;
        let k0 = ((self.knee() / h).ceil() as usize).clamp(4, 4000);
        let w = k0 as f64 * h;
        let head_tol = Tolerance::new(0.0, 1e-11);
        let mut head = 0.0;
        for k in 0..k0 {
            let a = k as f64 * h;
            head += quad::integrate(
                |x| {
                    let s = (0.5 * x * delta).sin();
                    2.0 * self.density(x) * s * s
                },
                a,
                a + h,
                head_tol,
                400,
            )?
            .value;
        }
        let tail_tol = Tolerance::new(1e-10 * head, 1e-10);
        let plain = quad::integrate_to_infinity(|x| self.density(x), w, w, tail_tol, 2000)?.value;
        let osc = quad::oscillatory_tail(|x| self.density(x), delta, k0, tail_tol)?;
        Ok(2.0 / PI * (head + plain - osc))
    }

    /// Closed form of v^T Σ^{-1} v for the sinc² test function of width T.
    pub fn inverse_quadratic_form(&self, period: f64) -> Result<QuadraticForm> {
        if !(period > 0.0) {
            return Err(invalid("period", format!("must be > 0, got {period}")));
        }
        let p = self.p;
        let k = self.kappa.powf(p - 1.0);
        let p3 = p3(p);
        let leading = 8.0 * PI / (p3 * k * period.powf(p - 1.0));
        let full = leading + 4.0 * PI * self.gamma.powf(p) * period / (3.0 * k);
        Ok(QuadraticForm { leading, full, p3 })
    }

    /// Upper bound on the increment variance at separation δ.
    ///
    /// * 1 < p < 3: the γ = 0 value -(κδ)^{p-1} / (Γ(p) cos(πp/2)), which is
    ///   κδ at p = 2.
    /// * p = 3 (γδ < 1): (κδ)²/π · ln(1/(γδ)) + 7/(3π) (κδ)².
    /// * 3 < p < 5 (γδ < 1): quadratic low-frequency part, the γ = 0 power law
    ///   and a quartic correction.
    ///
    /// For p ≥ 3 the constants come from splitting the integral at ω = γ and
    /// bounding 1 - cos x by its Taylor polynomials on each side.
    pub fn increment_variance_bound(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(invalid("delta", format!("must be > 0, got {delta}")));
        }
        let p = self.p;
        let kd = self.kappa * delta;
        let gd = self.gamma * delta;
        if p < 3.0 {
            if p == 2.0 {
                return Ok(kd);
            }
            return Ok(-kd.powf(p - 1.0) / (gamma(p)? * (PI * p / 2.0).cos()));
        }
        if p >= 5.0 {
            return Err(Error::Domain(format!(
                "increment variance bound is only available for p < 5, got {p}"
            )));
        }
        if gd >= 1.0 {
            return Err(Error::Domain(format!(
                "bound for p >= 3 needs gamma*delta < 1, got {gd}"
            )));
        }
        if p == 3.0 {
            return Ok(kd * kd / PI * (1.0 / gd).ln() + 7.0 / (3.0 * PI) * kd * kd);
        }
        let gk = self.gamma / self.kappa;
        let low = kd * kd * gk.powf(3.0 - p) * p / (3.0 * PI * (p - 3.0));
        let high = -kd.powf(p - 1.0) / (gamma(p)? * (PI * p / 2.0).cos());
        let quartic = kd.powi(4) * gk.powf(5.0 - p) / (12.0 * PI * (5.0 - p));
        Ok(low + high + quartic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticForm {
    pub leading: f64,
    pub full: f64,
    pub p3: f64,
}

/// Brute-force 2πT² ∫ Λ(ωT)² / Σ̃(ω) dω over |ω| ≤ 1/T for any density.
pub fn quadratic_form_numeric(density: impl Fn(f64) -> f64, period: f64) -> Result<f64> {
    let tol = Tolerance::new(0.0, 1e-12);
    let half = quad::integrate(
        |w| {
            let l = triangle(w * period);
            l * l / density(w)
        },
        0.0,
        1.0 / period,
        tol,
        500,
    )?;
    Ok(4.0 * PI * period * period * half.value)
}

/// Lower envelope G/κ below κw₀ and κ^{p-1}/|ω|^p above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSpectrumBound {
    pub p: f64,
    pub kappa: f64,
    pub w0: f64,
    pub g: f64,
}

impl TailSpectrumBound {
    pub fn new(p: f64, kappa: f64, w0: f64, g: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(invalid("p", format!("must satisfy p > 1, got {p}")));
        }
        if !(kappa > 0.0) {
            return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        if !(w0 > 0.0) {
            return Err(invalid("w0", format!("must be > 0, got {w0}")));
        }
        if !(g > 0.0) {
            return Err(invalid("G", format!("must be > 0, got {g}")));
        }
        Ok(Self { p, kappa, w0, g })
    }

    pub fn profile(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w < self.kappa * self.w0 {
            self.g / self.kappa
        } else {
            self.kappa.powf(self.p - 1.0) / w.powf(self.p)
        }
    }

    /// 4πT²κ²w₀/G + 8π/(p₃ κ^{p-1} T^{p-1}), valid when κw₀ ≤ 1/T.
    pub fn quadratic_form_bound(&self, period: f64) -> Result<f64> {
        if !(period > 0.0) {
            return Err(invalid("period", format!("must be > 0, got {period}")));
        }
        if self.kappa * self.w0 > 1.0 / period {
            return Err(Error::Domain(format!(
                "crossover kappa*w0 = {} lies outside the band 1/T = {}",
                self.kappa * self.w0,
                1.0 / period
            )));
        }
        let p = self.p;
        Ok(4.0 * PI * period * period * self.kappa * self.kappa * self.w0 / self.g
            + 8.0 * PI / (p3(p) * self.kappa.powf(p - 1.0) * period.powf(p - 1.0)))
    }
}
