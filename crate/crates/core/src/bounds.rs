//! Fidelity and prior-overlap bounds, the piecewise Z functions and the
//! waveform lower bound with its coefficient c_Z.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{erfc, triangle, Constants};
use crate::spectrum::{p3, PowerLawSpectrum};

/// Photon flux 𝒩 and pulse period T of the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub flux: f64,
    pub pulse_period: f64,
}

impl ProbeConfig {
    pub fn new(flux: f64, pulse_period: f64) -> Result<Self> {
        if !(flux > 0.0) || !flux.is_finite() {
            return Err(invalid("flux", format!("must be > 0, got {flux}")));
        }
        if !(pulse_period > 0.0) || !pulse_period.is_finite() {
            return Err(invalid("pulse_period", format!("must be > 0, got {pulse_period}")));
        }
        Ok(Self { flux, pulse_period })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// τ_F ≤ √π τ₀/2: the fidelity bound closes first.
    NoiseLimited,
    /// τ_F > √π τ₀/2: the prior overlap closes first.
    PriorLimited,
    /// both supports extend past π and the integral is cut there.
    PiCapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub tau0: f64,
    pub tau_f: f64,
    pub branch: Branch,
    pub z_value: f64,
    pub scaling_bound: f64,
    pub t_star: f64,
    pub c_z: f64,
    pub exponent: f64,
    /// γ·t*, compared against `gamma_t_limit`.
    pub gamma_t_star: f64,
    pub gamma_t_limit: f64,
    /// γ-term of the quadratic form relative to its leading term at t*.
    pub gamma_term_ratio: f64,
}

/// γ-term / leading term of the quadratic form above which the asymptotic
/// form of the bound is refused.
pub const GAMMA_TERM_LIMIT: f64 = 0.1;

/// τ₀ = √(8/Q) with Q the leading term of the quadratic form, and
/// τ_F = 1/(4πλT𝒩).
pub fn characteristic_times(spec: &PowerLawSpectrum, probe: &ProbeConfig) -> (f64, f64) {
    let q = spec
        .inverse_quadratic_form(probe.pulse_period)
        .expect("validated period");
    let tau0 = (8.0 / q.leading).sqrt();
    let lambda = Constants::get().lambda;
    let tau_f = 1.0 / (4.0 * PI * lambda * probe.pulse_period * probe.flux);
    (tau0, tau_f)
}

/// F ≥ Λ(τ/τ_F).
pub fn fidelity_lower_bound(tau: f64, tau_f: f64) -> f64 {
    triangle(tau / tau_f)
}

/// Exact |⟨exp(iτ v·n̂)⟩|² for a product of coherent states.
pub fn coherent_fidelity(mean_photons: &[f64], v: &[f64], tau: f64) -> Result<f64> {
    if mean_photons.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: mean_photons.len(),
            right: v.len(),
        });
    }
    if let Some(n) = mean_photons.iter().find(|n| !(**n >= 0.0)) {
        return Err(invalid("mean_photons", format!("must be >= 0, got {n}")));
    }
    let exponent: f64 = mean_photons
        .iter()
        .zip(v)
        .map(|(n, vj)| {
            let s = (0.5 * tau * vj).sin();
            // 1 - cos x = 2 sin²(x/2)
            n * 2.0 * s * s
        })
        .sum();
    Ok((-2.0 * exponent).exp())
}

/// τ_F for which Λ(τ/τ_F) bounds the fidelity of any state with these mean
/// photon numbers: 1/(2λ Σ n̄_j |v_j|).
pub fn fidelity_time(mean_photons: &[f64], v: &[f64]) -> Result<f64> {
    if mean_photons.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: mean_photons.len(),
            right: v.len(),
        });
    }
    let s: f64 = mean_photons.iter().zip(v).map(|(n, vj)| n * vj.abs()).sum();
    Ok(1.0 / (2.0 * Constants::get().lambda * s))
}

/// ∫ min(P(x), P(x + vτ)) dx for the Gaussian prior, erfc(τ/τ₀).
pub fn gaussian_min_overlap(tau: f64, tau0: f64) -> f64 {
    erfc(tau / tau0)
}

/// Piecewise closed form of ½∫₀^∞ τ Λ(2τ/(√π τ₀)) Λ(√(τ/τ_F)) dτ.
pub fn z_bound(tau0: f64, tau_f: f64) -> (f64, Branch) {
    let a = PI.sqrt() * tau0 / 2.0;
    if tau_f <= a {
        let v = tau_f * tau_f * (1.0 / 20.0 - tau_f / (21.0 * PI.sqrt() * tau0));
        (v.max(0.0), Branch::NoiseLimited)
    } else {
        let v = PI * tau0 * tau0 / 4.0 * (1.0 / 12.0 - 2.0 / 35.0 * (a / tau_f).sqrt());
        (v.max(0.0), Branch::PriorLimited)
    }
}

/// Z with the τ integral capped at π, for modulo-2π phase errors.
pub fn z_bound_periodic(tau0: f64, tau_f: f64) -> (f64, Branch) {
    let a = PI.sqrt() * tau0 / 2.0;
    if a.min(tau_f) <= PI {
        return z_bound(tau0, tau_f);
    }
    let sp = PI.sqrt();
    let v = PI
        * PI
        * (0.25 - sp / (3.0 * tau0) - sp / (5.0 * tau_f.sqrt())
            + 2.0 * PI / (7.0 * tau0 * tau_f.sqrt()));
    (v.max(0.0), Branch::PiCapped)
}

/// Brute-force quadrature of the Z integrand up to `tau_max` (may be ∞).
pub fn z_numeric_oracle(tau0: f64, tau_f: f64, tau_max: f64) -> Result<f64> {
    let a = PI.sqrt() * tau0 / 2.0;
    let upper = a.min(tau_f).min(tau_max);
    let q = quad::integrate(
        |t| 0.5 * t * triangle(t / a) * triangle((t / tau_f).sqrt()),
        0.0,
        upper,
        Tolerance::new(0.0, 1e-13),
        1000,
    )?;
    Ok(q.value)
}

/// Optimal pulse period of the bound, [1/(4π²λ²p₃κ^{p-1}𝒩²)]^{1/(p+1)}.
pub fn bound_pulse_period(spec: &PowerLawSpectrum, flux: f64) -> f64 {
    let p = spec.p();
    let lambda = Constants::get().lambda;
    (1.0 / (4.0 * PI * PI * lambda * lambda * p3(p) * spec.kappa().powf(p - 1.0) * flux * flux))
        .powf(1.0 / (p + 1.0))
}

/// c_Z = (11/420)(p₃/4)^{2/(p+1)} (4πλ)^{-2(p-1)/(p+1)}.
pub fn lower_bound_coefficient(p: f64) -> f64 {
    let lambda = Constants::get().lambda;
    11.0 / 420.0
        * (p3(p) / 4.0).powf(2.0 / (p + 1.0))
        * (4.0 * PI * lambda).powf(-2.0 * (p - 1.0) / (p + 1.0))
}

/// Heisenberg exponent 2(p-1)/(p+1).
pub fn scaling_exponent(p: f64) -> f64 {
    2.0 * (p - 1.0) / (p + 1.0)
}

/// Σ̄ ≥ c_Z (κ/𝒩)^{2(p-1)/(p+1)}, evaluated at the optimizing pulse period.
///
/// Refuses with a regime error when the γ-term of the quadratic form exceeds
/// [`GAMMA_TERM_LIMIT`] of the leading term at t*.
pub fn waveform_lower_bound(spec: &PowerLawSpectrum, flux: f64) -> Result<BoundReport> {
    if !(flux > 0.0) || !flux.is_finite() {
        return Err(invalid("flux", format!("must be > 0, got {flux}")));
    }
    let p = spec.p();
    let t_star = bound_pulse_period(spec, flux);
    let probe = ProbeConfig::new(flux, t_star)?;
    let (tau0, tau_f) = characteristic_times(spec, &probe);
    let (z_value, branch) = z_bound(tau0, tau_f);

    let q = spec.inverse_quadratic_form(t_star)?;
    let gamma_term_ratio = (q.full - q.leading) / q.leading;
    let gamma_t_star = spec.gamma() * t_star;
    let gamma_t_limit = (GAMMA_TERM_LIMIT * 6.0 / q.p3).powf(1.0 / p);

    let c_z = lower_bound_coefficient(p);
    let exponent = scaling_exponent(p);
    let report = BoundReport {
        tau0,
        tau_f,
        branch,
        z_value,
        scaling_bound: c_z * (spec.kappa() / flux).powf(exponent),
        t_star,
        c_z,
        exponent,
        gamma_t_star,
        gamma_t_limit,
        gamma_term_ratio,
    };
    if gamma_t_star >= gamma_t_limit {
        return Err(Error::Regime(format!(
            "gamma*t_star = {gamma_t_star:.4} is not below {gamma_t_limit:.4}; \
             the gamma term is {:.1}% of the leading term",
            100.0 * gamma_term_ratio
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::achievable_coefficient;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn characteristic_time_examples() {
        let s = PowerLawSpectrum::new(2.0, 1.0, 1e-12).unwrap();
        let (tau0, tau_f) = characteristic_times(&s, &ProbeConfig::new(1.0, 1.0).unwrap());
        assert!(rel(tau0, (60.0 / PI).sqrt()) < 1e-14);
        assert!((tau0 - 4.3702).abs() < 1e-4);
        assert!((tau_f - 0.10982).abs() < 1e-5);
        let (tau0b, _) = characteristic_times(&s, &ProbeConfig::new(1.0, 2.0).unwrap());
        assert!(rel(tau0b, tau0 * 2f64.sqrt()) < 1e-14);
        let (_, tau_fb) = characteristic_times(&s, &ProbeConfig::new(2.0, 1.0).unwrap());
        assert!(rel(tau_fb, tau_f / 2.0) < 1e-14);
    }

    #[test]
    fn fidelity_bound_examples() {
        assert_eq!(fidelity_lower_bound(0.0, 0.3), 1.0);
        assert_eq!(fidelity_lower_bound(0.3, 0.3), 0.0);
        assert_eq!(fidelity_lower_bound(0.15, 0.3), 0.5);
    }

    #[test]
    fn coherent_fidelity_examples() {
        assert_eq!(coherent_fidelity(&[1.0, 2.0], &[1.0, -1.0], 0.0).unwrap(), 1.0);
        let f = coherent_fidelity(&[1.0], &[1.0], PI).unwrap();
        assert!((f - (-4.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            coherent_fidelity(&[1.0], &[1.0, 2.0], 0.1),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(gaussian_min_overlap(0.0, 1.3), 1.0);
        assert!((gaussian_min_overlap(2.0, 2.0) - 0.157_299_207_050_285).abs() < 1e-13);
    }

    #[test]
    fn z_boundary_value() {
        let (v1, b1) = z_bound(2.0, PI.sqrt());
        assert_eq!(b1, Branch::NoiseLimited);
        assert!((v1 - 11.0 * PI / 420.0).abs() < 1e-15);
        let o = z_numeric_oracle(2.0, PI.sqrt(), f64::INFINITY).unwrap();
        assert!(rel(o, 11.0 * PI / 420.0) < 1e-9);
        // the other branch evaluated at the same point
        let a = PI.sqrt();
        let other = PI * 4.0 / 4.0 * (1.0 / 12.0 - 2.0 / 35.0 * (a / PI.sqrt()).sqrt());
        assert!((other - 11.0 * PI / 420.0).abs() < 1e-15);
    }

    #[test]
    fn z_limits() {
        assert!(z_bound(1.0, 1e-9).0 < 1e-18);
        let tau_f = 0.7;
        assert!(rel(z_bound(1e9, tau_f).0, tau_f * tau_f / 20.0) < 1e-9);
    }

    #[test]
    fn z_matches_oracle() {
        let o = z_numeric_oracle(1.0, 10.0, f64::INFINITY).unwrap();
        let (v, b) = z_bound(1.0, 10.0);
        assert_eq!(b, Branch::PriorLimited);
        assert!(rel(v, o) < 1e-9);
        let (v, b) = z_bound_periodic(100.0, 100.0);
        assert_eq!(b, Branch::PiCapped);
        assert!(rel(v, z_numeric_oracle(100.0, 100.0, PI).unwrap()) < 1e-9);
        assert_eq!(z_bound_periodic(0.5, 0.3), z_bound(0.5, 0.3));
    }

    #[test]
    fn periodic_continuity() {
        // τ_F = π with a > π, and a = π with τ_F > π
        let tau0 = 10.0;
        let inside = z_bound_periodic(tau0, PI).0;
        let capped = z_bound_periodic(tau0, PI * (1.0 + 1e-15)).0;
        assert!((inside - capped).abs() < 1e-10);
        let tau0 = 2.0 * PI / PI.sqrt();
        let inside = z_bound_periodic(tau0, 50.0).0;
        let capped = z_bound_periodic(tau0 * (1.0 + 1e-15), 50.0).0;
        assert!((inside - capped).abs() < 1e-10);
    }

    #[test]
    fn c_z_example() {
        let c = lower_bound_coefficient(2.0);
        let lambda = Constants::get().lambda;
        let direct = 11.0 / 420.0 * 15f64.powf(2.0 / 3.0) * (4.0 * PI * lambda).powf(-2.0 / 3.0);
        assert!(rel(c, direct) < 1e-14);
        assert!((c - 0.0365).abs() < 1e-4);
        assert_eq!(scaling_exponent(2.0), 2.0 / 3.0);
    }

    #[test]
    fn waveform_bound_examples() {
        let s = PowerLawSpectrum::new(2.0, 1.0, 1e-6).unwrap();
        let r = waveform_lower_bound(&s, 1.0).unwrap();
        assert!(rel(r.z_value, r.c_z) < 1e-10);
        let r = waveform_lower_bound(&s, 100.0).unwrap();
        assert!(rel(r.scaling_bound, r.c_z * 100f64.powf(-2.0 / 3.0)) < 1e-14);
        assert!((r.scaling_bound - 1.70e-3).abs() < 1e-5);
    }

    #[test]
    fn regime_violation() {
        let s = PowerLawSpectrum::new(2.0, 1.0, 10.0).unwrap();
        assert!(matches!(waveform_lower_bound(&s, 10.0), Err(Error::Regime(_))));
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.01).unwrap();
        assert!(waveform_lower_bound(&s, 10.0).is_ok());
    }

    #[test]
    fn lower_below_achievable() {
        for &p in &[1.2, 1.5, 2.0, 3.0, 4.0, 6.0] {
            let cz = lower_bound_coefficient(p);
            let ca = achievable_coefficient(p).unwrap();
            assert!(cz < ca, "p={p}: {cz} >= {ca}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn z_equals_oracle(l0 in -2.0f64..2.0, lf in -2.0f64..2.0) {
            let (tau0, tau_f) = (10f64.powf(l0), 10f64.powf(lf));
            let o = z_numeric_oracle(tau0, tau_f, f64::INFINITY).unwrap();
            prop_assert!(rel(z_bound(tau0, tau_f).0, o) < 1e-8);
            let o = z_numeric_oracle(tau0, tau_f, PI).unwrap();
            prop_assert!(rel(z_bound_periodic(tau0, tau_f).0, o) < 1e-8);
        }

        #[test]
        fn z_monotone(l0 in -2.0f64..2.0, lf in -2.0f64..2.0, step in 1.0f64..1.5) {
            let (tau0, tau_f) = (10f64.powf(l0), 10f64.powf(lf));
            prop_assert!(z_bound(tau0, tau_f * step).0 >= z_bound(tau0, tau_f).0 * (1.0 - 1e-14));
            prop_assert!(z_bound(tau0 * step, tau_f).0 >= z_bound(tau0, tau_f).0 * (1.0 - 1e-14));
        }

        #[test]
        fn coherent_dominates_triangle(
            n in proptest::collection::vec(0.1f64..100.0, 1..5),
            tau_scale in 0.0f64..3.0,
        ) {
            let v: Vec<f64> = (0..n.len()).map(|j| 1.0 + j as f64 * 0.5).collect();
            let tau_f = fidelity_time(&n, &v).unwrap();
            let tau = tau_scale * tau_f;
            let f = coherent_fidelity(&n, &v, tau).unwrap();
            prop_assert!(f >= fidelity_lower_bound(tau, tau_f) - 1e-15);
        }

        #[test]
        fn report_on_branch_boundary(p in 1.2f64..4.5, flux in 1.0f64..1e5) {
            let s = PowerLawSpectrum::new(p, 1.0, 1e-9).unwrap();
            let r = waveform_lower_bound(&s, flux).unwrap();
            prop_assert!(rel(r.tau_f, PI.sqrt() * r.tau0 / 2.0) < 1e-10);
            prop_assert!(rel(r.z_value, r.scaling_bound) < 1e-10);
            prop_assert!(r.tau0 > 0.0 && r.tau_f > 0.0 && r.z_value >= 0.0);
        }
    }
}
