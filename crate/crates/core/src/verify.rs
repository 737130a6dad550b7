//! Brute-force oracles for the closed forms used elsewhere in the crate, and
//! a registry of checks that compares the two.
//!
//! Every check is deterministic. A check that errors out is reported as a
//! failed row with a NaN computed value rather than aborting the suite.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    bound_pulse_period, characteristic_times, coherent_fidelity, fidelity_lower_bound,
    fidelity_time, gaussian_min_overlap, lower_bound_coefficient, scaling_exponent, z_bound,
    z_bound_periodic, z_numeric_oracle, ProbeConfig,
};
use crate::error::{invalid, Error, Result};
use crate::estimator::{
    achievable_coefficient, aliasing_error_closed_form, measurement_noise_std,
    optimal_pulse_period, predicted_total_error, truncation_bound, wrap_error_bound,
    yovits_jackson_error,
};
use crate::quad::{self, Tolerance};
use crate::specfun::{airy_ai, digamma, erfc, sinc, triangle, Constants};
use crate::spectrum::{quadratic_form_numeric, PowerLawSpectrum, TailSpectrumBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |computed - reference| ≤ tolerance
    Absolute,
    /// |computed - reference| ≤ tolerance·|reference|
    Relative,
    /// computed ≥ reference - tolerance
    AtLeast,
    /// computed ≤ reference + tolerance
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl VerificationResult {
    pub fn new(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let passed = match comparison {
            Comparison::Absolute => (computed - reference).abs() <= tolerance,
            Comparison::Relative => (computed - reference).abs() <= tolerance * reference.abs(),
            Comparison::AtLeast => computed >= reference - tolerance,
            Comparison::AtMost => computed <= reference + tolerance,
        };
        Self {
            name: name.into(),
            computed,
            reference,
            tolerance,
            comparison,
            passed,
        }
    }
}

fn check_fraction(t_over_t: f64) -> Result<()> {
    if !t_over_t.is_finite() {
        return Err(invalid("t_over_T", format!("must be finite, got {t_over_t}")));
    }
    if t_over_t.fract() == 0.0 {
        return Err(Error::Domain(format!(
            "t/T = {t_over_t} is a sample time"
        )));
    }
    if !(t_over_t > 0.0 && t_over_t < 1.0) {
        return Err(invalid("t_over_T", format!("must lie in (0, 1), got {t_over_t}")));
    }
    Ok(())
}

/// a_m = 2π Σ_{n≥m} sinc(πt/T - πn) for m > 0 and 2π Σ_{n<m} for m ≤ 0, in
/// closed form through the digamma function.
pub fn digamma_tail_coefficient(m: i64, t_over_t: f64) -> Result<f64> {
    check_fraction(t_over_t)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let s = sign * (PI * t_over_t).sin();
    let mf = m as f64;
    let h = 0.5 * t_over_t;
    let d = if m > 0 {
        digamma(0.5 * mf - h)? - digamma(0.5 + 0.5 * mf - h)?
    } else {
        digamma(0.5 - 0.5 * mf + h)? - digamma(1.0 - 0.5 * mf + h)?
    };
    Ok(s * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SincTailSum {
    /// 2π times the first `n_terms` terms.
    pub partial: f64,
    /// Magnitude of the first omitted term; the alternating remainder is
    /// smaller than this.
    pub tail_bound: f64,
    /// Partial sum plus half the first omitted term.
    pub corrected: f64,
}

/// Direct summation of the sinc tail that defines a_m.
pub fn sinc_tail_sum(m: i64, t_over_t: f64, n_terms: usize) -> Result<SincTailSum> {
    if n_terms == 0 {
        return Err(invalid("n_terms", "must be >= 1"));
    }
    let x = PI * t_over_t;
    // n runs m, m+1, … for m > 0 and m-1, m-2, … otherwise
    let term = |k: usize| {
        let n = if m > 0 { m + k as i64 } else { m - 1 - k as i64 };
        2.0 * PI * sinc(x - PI * n as f64)
    };
    let partial: f64 = (0..n_terms).map(term).sum();
    let next = term(n_terms);
    Ok(SincTailSum {
        partial,
        tail_bound: next.abs(),
        corrected: partial + 0.5 * next,
    })
}

fn wrap_bracket(a: &[f64]) -> f64 {
    let squares: f64 = a.iter().map(|v| v * v).sum();
    let cross: f64 = a.windows(2).map(|w| (w[0] * w[1]).abs()).sum();
    squares + 2.0 * cross
}

/// (1/4π²)[Σ a_m² + 2Σ |a_m a_{m+1}|] over 1-M ≤ m ≤ M, plus the tail
/// beyond M from a_m ≈ ∓sin(πt/T)/|m|.
///
/// The wrap count is only defined modulo 2π, so it may be referenced to
/// either neighbouring sample. Referencing K(t) to K_1 instead of K_0 turns
/// a_1 into a_1 - 2π; the smaller of the two brackets is returned, which makes
/// the value symmetric about t/T = 1/2.
///
/// Each of the three sums loses ≈ s²/(M+½) per side to truncation, so the
/// corrected value has an O(M⁻²) error.
pub fn wrap_constant(t_over_t: f64, truncation: usize) -> Result<f64> {
    check_fraction(t_over_t)?;
    if truncation < 2 {
        return Err(invalid("truncation", format!("must be >= 2, got {truncation}")));
    }
    let m = truncation as i64;
    let mut a: Vec<f64> = (1 - m..=m)
        .map(|k| digamma_tail_coefficient(k, t_over_t))
        .collect::<Result<_>>()?;
    let from_left = wrap_bracket(&a);
    // index of m = 1
    let i1 = truncation;
    a[i1] -= 2.0 * PI;
    let from_right = wrap_bracket(&a);
    let s = (PI * t_over_t).sin();
    let tail = 6.0 * s * s / (truncation as f64 + 0.5);
    Ok((from_left.min(from_right) + tail) / (4.0 * PI * PI))
}

/// Evaluates [`wrap_constant`] on every grid point; returns (max, argmax).
pub fn wrap_constant_scan(grid: &[f64], truncation: usize) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(invalid("grid", "must not be empty"));
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| wrap_constant(x, truncation))
        .collect::<Result<_>>()?;
    let (i, v) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        });
    Ok((v, grid[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceVn {
    pub value: f64,
    pub bound: f64,
}

/// Covariance of increments n periods apart, E[C_n C_0] with
/// C_n = (X((n-1)T) - X(nT))/2π, and its 1/n closed-form bound.
///
/// The value is 2Σ(nT) - Σ((n+1)T) - Σ((n-1)T) by quadrature.
pub fn covariance_vn(spec: &PowerLawSpectrum, period: f64, n: usize) -> Result<CovarianceVn> {
    if n < 2 {
        return Err(invalid("n", format!("must be >= 2, got {n}")));
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(invalid("period", format!("must be > 0, got {period}")));
    }
    let nf = n as f64;
    let sig = |k: f64| spec.autocovariance(k * period);
    let value = 2.0 * sig(nf)? - sig(nf + 1.0)? - sig(nf - 1.0)?;
    let bound = spec.density(0.0) / PI
        * (1.0 / (nf * period)
            + 1.0 / (2.0 * (nf - 1.0) * period)
            + 1.0 / (2.0 * (nf + 1.0) * period));
    let norm = 4.0 * PI * PI;
    Ok(CovarianceVn {
        value: value / norm,
        bound: bound / norm,
    })
}

/// ζ(3/2) by direct summation with an Euler–Maclaurin remainder.
pub fn zeta_three_halves() -> f64 {
    let n = 1000usize;
    let head: f64 = (1..n).map(|k| (k as f64).powf(-1.5)).sum();
    let x = n as f64;
    head + 2.0 / x.sqrt() + 0.5 * x.powf(-1.5) + 0.125 * x.powf(-2.5)
}

/// Smallest value of cos θ - (1 - λ|θ|) on a grid of step 1e-5 over [0, 2π].
pub fn cosine_bound_margin(lambda: f64) -> f64 {
    let n = 628_319;
    (0..=n)
        .map(|i| {
            let th = i as f64 * 1e-5;
            th.cos() - (1.0 - lambda * th)
        })
        .fold(f64::INFINITY, f64::min)
}

/// A named oracle comparison. `covers` lists the closed forms it exercises.
pub struct Check {
    pub name: &'static str,
    pub covers: &'static [&'static str],
    run: fn(&'static str) -> Result<VerificationResult>,
}

impl Check {
    pub fn run(&self) -> VerificationResult {
        match (self.run)(self.name) {
            Ok(r) => r,
            Err(_) => VerificationResult {
                name: self.name.to_string(),
                computed: f64::NAN,
                reference: f64::NAN,
                tolerance: f64::NAN,
                comparison: Comparison::Absolute,
                passed: false,
            },
        }
    }
}

/// Closed forms that must each be exercised by at least one registered check.
pub const CLOSED_FORMS: &[&str] = &[
    "specfun::solve_lambda",
    "specfun::airy_root_magnitude",
    "specfun::erfc",
    "specfun::digamma",
    "spectrum::variance",
    "spectrum::autocovariance",
    "spectrum::increment_variance",
    "spectrum::inverse_quadratic_form",
    "spectrum::quadratic_form_bound",
    "spectrum::increment_variance_bound",
    "bounds::fidelity_lower_bound",
    "bounds::coherent_fidelity",
    "bounds::gaussian_min_overlap",
    "bounds::z_bound",
    "bounds::z_bound_periodic",
    "bounds::lower_bound_coefficient",
    "bounds::bound_pulse_period",
    "estimator::optimal_pulse_period",
    "estimator::measurement_noise_std",
    "estimator::aliasing_error_closed_form",
    "estimator::achievable_coefficient",
    "estimator::truncation_bound",
    "estimator::wrap_error_bound",
    "estimator::yovits_jackson_error",
    "verify::digamma_tail_coefficient",
    "verify::wrap_constant",
    "verify::covariance_vn",
];

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NAN } else { a.min(b) })
}

fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

/// Golden-section minimum of a unimodal f on [lo, hi].
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

fn z_grid() -> Vec<(f64, f64)> {
    let g: Vec<f64> = log_grid(1e-2, 1e2, 20).collect();
    g.iter()
        .flat_map(|&a| g.iter().map(move |&b| (a, b)))
        .collect()
}

const WRAP_M: usize = 100_000;
const WRAP_REFERENCE: f64 = 0.68169;

fn wrap_scan_two_stage() -> Result<(f64, f64)> {
    let coarse: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let (_, x0) = wrap_constant_scan(&coarse, WRAP_M)?;
    let fine: Vec<f64> = (-100..=100)
        .map(|i| x0 + i as f64 * 1e-4)
        .filter(|x| *x > 0.0 && *x < 1.0)
        .collect();
    wrap_constant_scan(&fine, WRAP_M)
}

fn c_z_at_optimum(p: f64) -> Result<f64> {
    let spec = PowerLawSpectrum::new(p, 1.0, 1e-12)?;
    let t = bound_pulse_period(&spec, 1.0);
    let (tau0, tau_f) = characteristic_times(&spec, &ProbeConfig::new(1.0, t)?);
    Ok(z_bound(tau0, tau_f).0)
}

macro_rules! check {
    ($name:literal, [$($c:literal),* $(,)?], $body:expr) => {
        Check { name: $name, covers: &[$($c),*], run: $body }
    };
}

pub static CHECKS: &[Check] = &[
    check!("lambda_value", ["specfun::solve_lambda"], |n| {
        Ok(VerificationResult::new(n, Constants::get().lambda, 0.7246, 5e-5, Comparison::Absolute))
    }),
    check!("airy_root", ["specfun::airy_root_magnitude"], |n| {
        Ok(VerificationResult::new(
            n,
            Constants::get().airy_root_mag,
            2.338107410,
            1e-8,
            Comparison::Absolute,
        ))
    }),
    check!("airy_root_residual", ["specfun::airy_root_magnitude"], |n| {
        let v = airy_ai(-Constants::get().airy_root_mag).abs();
        Ok(VerificationResult::new(n, v, 0.0, 1e-12, Comparison::Absolute))
    }),
    check!("cosine_bound", ["specfun::solve_lambda"], |n| {
        let m = cosine_bound_margin(Constants::get().lambda);
        Ok(VerificationResult::new(n, m, 0.0, 1e-12, Comparison::AtLeast))
    }),
    check!("cosine_bound_canary", ["specfun::solve_lambda"], |n| {
        // a slightly smaller slope must break the bound
        let m = cosine_bound_margin(Constants::get().lambda - 1e-3);
        Ok(VerificationResult::new(n, m, -1e-6, 0.0, Comparison::AtMost))
    }),
    check!("erfc_quadrature", ["specfun::erfc"], |n| {
        let mut worst: f64 = 0.0;
        for z in [0.0, 0.3, 1.0, 2.5, 4.0, 6.0] {
            let q = quad::integrate_to_infinity(
                |t| (-t * t).exp(),
                z,
                1.0,
                Tolerance::new(0.0, 1e-14),
                4000,
            )?;
            worst = worst.max(rel_err(erfc(z), 2.0 / PI.sqrt() * q.value));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-11, Comparison::Absolute))
    }),
    check!("erfc_triangle_bound", ["specfun::erfc", "bounds::gaussian_min_overlap"], |n| {
        let m = min_of((0..=20_000).map(|i| {
            let z = i as f64 * 2.5e-4;
            erfc(z) - triangle(2.0 * z / PI.sqrt())
        }));
        Ok(VerificationResult::new(n, m, 0.0, 1e-15, Comparison::AtLeast))
    }),
    check!("digamma_reflection", ["specfun::digamma"], |n| {
        let v = digamma(0.25)? - digamma(0.75)?;
        Ok(VerificationResult::new(n, v, -PI, 1e-12, Comparison::Absolute))
    }),
    check!("gaussian_min_overlap", ["bounds::gaussian_min_overlap"], |n| {
        // shift τ between two Gaussians of width σ = τ₀/(2√2)
        let tau0 = 1.7;
        let sigma = tau0 / (2.0 * 2f64.sqrt());
        let phi = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
        let mut worst: f64 = 0.0;
        for tau in [0.1, 0.5, 1.0, 2.0, 4.0] {
            // min(φ(x), φ(x - τ)) is φ(x - τ) left of τ/2 and φ(x) right of it
            let half = quad::integrate_to_infinity(phi, 0.5 * tau, sigma, Tolerance::new(0.0, 1e-13), 4000)?;
            worst = worst.max((2.0 * half.value - gaussian_min_overlap(tau, tau0)).abs());
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-11, Comparison::Absolute))
    }),
    check!("fidelity_chain", ["bounds::coherent_fidelity", "bounds::fidelity_lower_bound"], |n| {
        let mut worst = f64::INFINITY;
        for nbar in log_grid(0.1, 100.0, 32) {
            let tf = fidelity_time(&[nbar], &[1.0])?;
            for j in 0..32 {
                let tau = 1.2 * tf * j as f64 / 31.0;
                let f = coherent_fidelity(&[nbar], &[1.0], tau)?;
                worst = worst.min(f - fidelity_lower_bound(tau, tf));
            }
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-15, Comparison::AtLeast))
    }),
    check!("z_bound_oracle", ["bounds::z_bound"], |n| {
        let errs = z_grid()
            .into_iter()
            .map(|(a, b)| Ok(rel_err(z_bound(a, b).0, z_numeric_oracle(a, b, f64::INFINITY)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VerificationResult::new(n, max_of(errs.into_iter()), 0.0, 1e-8, Comparison::Absolute))
    }),
    check!("z_bound_periodic_oracle", ["bounds::z_bound_periodic"], |n| {
        let errs = z_grid()
            .into_iter()
            .map(|(a, b)| Ok(rel_err(z_bound_periodic(a, b).0, z_numeric_oracle(a, b, PI)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VerificationResult::new(n, max_of(errs.into_iter()), 0.0, 1e-8, Comparison::Absolute))
    }),
    check!("z_boundary_value", ["bounds::z_bound"], |n| {
        let v = z_bound(2.0, PI.sqrt()).0;
        Ok(VerificationResult::new(n, v, 11.0 * PI / 420.0, 1e-14, Comparison::Absolute))
    }),
    check!("z_branch_continuity", ["bounds::z_bound", "bounds::z_bound_periodic"], |n| {
        let eps = 1e-12;
        let mut worst: f64 = 0.0;
        for tau0 in log_grid(0.05, 50.0, 12) {
            let a = PI.sqrt() * tau0 / 2.0;
            let hi = z_bound(tau0, a * (1.0 + eps)).0;
            let lo = z_bound(tau0, a * (1.0 - eps)).0;
            worst = worst.max(rel_err(hi, lo));
        }
        // periodic cap switching on at τ_F = π with the prior edge beyond π
        for tau0 in [4.0, 10.0, 100.0] {
            let hi = z_bound_periodic(tau0, PI * (1.0 + eps)).0;
            let lo = z_bound_periodic(tau0, PI * (1.0 - eps)).0;
            worst = worst.max(rel_err(hi, lo));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-10, Comparison::Absolute))
    }),
    check!("lower_bound_coefficient", ["bounds::lower_bound_coefficient", "bounds::bound_pulse_period"], |n| {
        let worst = max_of([1.5, 2.0, 3.0, 4.0].into_iter().map(|p| {
            c_z_at_optimum(p).map_or(f64::NAN, |z| rel_err(lower_bound_coefficient(p), z))
        }));
        Ok(VerificationResult::new(n, worst, 0.0, 1e-10, Comparison::Absolute))
    }),
    check!("lower_bound_below_best_period", ["bounds::lower_bound_coefficient"], |n| {
        // t* is not the maximizer of Z over T, so c_Z sits below the best Z
        let spec = PowerLawSpectrum::new(2.0, 1.0, 1e-12)?;
        let t = bound_pulse_period(&spec, 1.0);
        let (_, neg) = golden_min(
            |lt| {
                let probe = ProbeConfig::new(1.0, t * lt.exp()).expect("positive period");
                let (a, b) = characteristic_times(&spec, &probe);
                -z_bound(a, b).0
            },
            -3.0,
            3.0,
        );
        Ok(VerificationResult::new(n, lower_bound_coefficient(2.0), -neg, 0.0, Comparison::AtMost))
    }),
    check!("lower_bound_coefficient_value", ["bounds::lower_bound_coefficient"], |n| {
        Ok(VerificationResult::new(n, lower_bound_coefficient(2.0), 0.0365, 5e-5, Comparison::Absolute))
    }),
    check!("variance_closed_form", ["spectrum::variance", "spectrum::autocovariance"], |n| {
        let mut worst: f64 = 0.0;
        for (p, g) in [(1.5, 0.3), (2.0, 0.01), (3.0, 0.2), (4.5, 1.0)] {
            let s = PowerLawSpectrum::new(p, 1.3, g)?;
            worst = worst.max(rel_err(s.autocovariance(0.0)?, s.variance()));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-8, Comparison::Absolute))
    }),
    check!("autocovariance_ou", ["spectrum::autocovariance"], |n| {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.5)?;
        let mut worst: f64 = 0.0;
        for i in 0..=20 {
            let tau = i as f64 * 0.5;
            worst = worst.max(rel_err(s.autocovariance(tau)?, (-0.5 * tau).exp()));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-6, Comparison::Absolute))
    }),
    check!("increment_variance_ou", ["spectrum::increment_variance"], |n| {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.01)?;
        let mut worst: f64 = 0.0;
        for d in log_grid(1e-3, 10.0, 9) {
            let exact = -100.0 * (-0.01 * d).exp_m1();
            worst = worst.max(rel_err(s.increment_variance(d)?, exact));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-7, Comparison::Absolute))
    }),
    check!("quadratic_form", ["spectrum::inverse_quadratic_form"], |n| {
        let mut worst: f64 = 0.0;
        for p in [1.2, 2.0, 2.7, 4.0] {
            for t in [0.05, 0.5, 3.0] {
                let s = PowerLawSpectrum::new(p, 0.8, 0.3)?;
                let q = s.inverse_quadratic_form(t)?;
                worst = worst.max(rel_err(q.full, quadratic_form_numeric(|w| s.density(w), t)?));
            }
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-6, Comparison::Absolute))
    }),
    check!("tail_quadratic_form_bound", ["spectrum::quadratic_form_bound"], |n| {
        // a density lying above the tail profile everywhere
        let mut worst = f64::INFINITY;
        for p in [1.5, 2.0, 3.0] {
            let tb = TailSpectrumBound::new(p, 1.0, 0.5, 2.0)?;
            let density = |w: f64| tb.kappa.powf(p - 1.0) / w.abs().powf(p) + tb.g / tb.kappa;
            for t in log_grid(0.01, 1.9, 8) {
                let numeric = quadratic_form_numeric(density, t)?;
                let bound = tb.quadratic_form_bound(t)?;
                worst = worst.min((bound - numeric) / bound);
            }
        }
        Ok(VerificationResult::new(n, worst, 0.0, 0.0, Comparison::AtLeast))
    }),
    check!("increment_variance_dominance", ["spectrum::increment_variance_bound", "spectrum::increment_variance"], |n| {
        let mut worst: f64 = 0.0;
        for p in [1.5, 2.0, 2.5, 3.0, 4.0] {
            for g in [0.01, 0.1] {
                let s = PowerLawSpectrum::new(p, 1.0, g)?;
                for d in log_grid(1e-3, 0.3, 10) {
                    worst = worst.max(s.increment_variance(d)? / s.increment_variance_bound(d)?);
                }
            }
        }
        Ok(VerificationResult::new(n, worst, 1.0, 0.0, Comparison::AtMost))
    }),
    check!("increment_variance_small_delta", ["spectrum::increment_variance_bound"], |n| {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.01)?;
        let r = s.increment_variance(1e-3)? / s.increment_variance_bound(1e-3)?;
        Ok(VerificationResult::new(n, r, 1.0, 0.05, Comparison::Relative))
    }),
    check!("aliasing_closed_form", ["estimator::aliasing_error_closed_form"], |n| {
        let mut worst: f64 = 0.0;
        for p in [1.5, 2.0, 3.0] {
            let s = PowerLawSpectrum::new(p, 1.0, 0.01)?;
            let a = aliasing_error_closed_form(&s, 0.1)?;
            worst = worst.max(rel_err(a.approx, a.exact));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-3, Comparison::Absolute))
    }),
    check!("optimal_pulse_period", ["estimator::optimal_pulse_period"], |n| {
        let mut worst: f64 = 0.0;
        for p in [1.5, 2.0, 3.0] {
            let t = optimal_pulse_period(p, 1.0, 1e3)?;
            let (lt, _) = golden_min(|lt| predicted_total_error(p, 1.0, 1e3, t * lt.exp()), -2.0, 2.0);
            worst = worst.max(lt.abs());
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-6, Comparison::Absolute))
    }),
    check!("achievable_coefficient", ["estimator::achievable_coefficient"], |n| {
        let mut worst: f64 = 0.0;
        for p in [1.5, 2.0, 3.0] {
            let flux = 1e3;
            let t = optimal_pulse_period(p, 1.0, flux)?;
            let (_, best) = golden_min(|lt| predicted_total_error(p, 1.0, flux, t * lt.exp()), -2.0, 2.0);
            let c = best * flux.powf(scaling_exponent(p));
            worst = worst.max(rel_err(achievable_coefficient(p)?, c));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-9, Comparison::Absolute))
    }),
    check!("canonical_noise", ["estimator::measurement_noise_std", "specfun::airy_root_magnitude"], |n| {
        let s = measurement_noise_std(250.0, 0.2)?;
        let v = s * s * 50.0 * 50.0;
        Ok(VerificationResult::new(n, v, 4.0 / 27.0 * 2.338107410f64.powi(3), 1e-8, Comparison::Relative))
    }),
    check!("truncation_bound", ["estimator::truncation_bound"], |n| {
        // constant samples: the truncated sinc series misses 1 - Σ_{|k|≤M} sinc
        let m = 64i64;
        let worst = max_of((1..200).map(|i| {
            let x = i as f64 / 200.0;
            let s: f64 = (-m..=m).map(|k| sinc(PI * (x - k as f64))).sum();
            (1.0 - s).abs()
        }));
        Ok(VerificationResult::new(n, worst, truncation_bound(m as usize), 0.0, Comparison::AtMost))
    }),
    check!("yovits_jackson_ou", ["estimator::yovits_jackson_error"], |n| {
        // R(√(γ² + κ/R) - γ) for the Lorentzian
        let s = PowerLawSpectrum::new(2.0, 1.3, 0.4)?;
        let mut worst: f64 = 0.0;
        for r in [1e-3, 0.1, 1.0, 10.0] {
            let exact = r * ((0.16f64 + 1.3 / r).sqrt() - 0.4);
            worst = worst.max(rel_err(yovits_jackson_error(&s, r)?, exact));
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-8, Comparison::Absolute))
    }),
    check!("digamma_tail_half", ["verify::digamma_tail_coefficient"], |n| {
        Ok(VerificationResult::new(n, digamma_tail_coefficient(1, 0.5)?, PI, 1e-12, Comparison::Absolute))
    }),
    check!("digamma_tail_vs_sum", ["verify::digamma_tail_coefficient", "specfun::digamma"], |n| {
        let mut worst: f64 = 0.0;
        for m in -5..=5 {
            for x in [0.1, 0.25, 0.5] {
                let direct = sinc_tail_sum(m, x, 1_000_000)?;
                worst = worst.max((digamma_tail_coefficient(m, x)? - direct.corrected).abs());
            }
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-6, Comparison::Absolute))
    }),
    check!("digamma_tail_decay", ["verify::digamma_tail_coefficient"], |n| {
        // |a_m| < 2π/|m| beyond |m| = 10
        let mut worst: f64 = 0.0;
        for x in [0.1, 0.5, 0.9] {
            for m in (10..=1000).chain(-1000..=-10) {
                let a = digamma_tail_coefficient(m, x)?;
                worst = worst.max(a.abs() * (m as f64).abs() / (2.0 * PI));
            }
        }
        Ok(VerificationResult::new(n, worst, 1.0, 0.0, Comparison::AtMost))
    }),
    check!("wrap_constant", ["verify::wrap_constant", "estimator::wrap_error_bound"], |n| {
        let (v, _) = wrap_scan_two_stage()?;
        Ok(VerificationResult::new(n, v, WRAP_REFERENCE, 1e-4, Comparison::Absolute))
    }),
    check!("wrap_constant_argmax", ["verify::wrap_constant"], |n| {
        let (_, x) = wrap_scan_two_stage()?;
        Ok(VerificationResult::new(n, x, 0.5, 1e-3, Comparison::Absolute))
    }),
    check!("wrap_constant_symmetry", ["verify::wrap_constant"], |n| {
        let mut worst: f64 = 0.0;
        for x in [0.05, 0.2, 0.37] {
            worst = worst.max((wrap_constant(x, 20_000)? - wrap_constant(1.0 - x, 20_000)?).abs());
        }
        Ok(VerificationResult::new(n, worst, 0.0, 1e-10, Comparison::Absolute))
    }),
    check!("wrap_bound_constant", ["estimator::wrap_error_bound"], |n| {
        let w = wrap_error_bound(100.0, 1.0)?;
        Ok(VerificationResult::new(n, w.mse / w.p_err, WRAP_REFERENCE, 1e-4, Comparison::Absolute))
    }),
    check!("covariance_vn_bound", ["verify::covariance_vn"], |n| {
        let mut worst: f64 = 0.0;
        for p in [2.0, 3.0] {
            for gt in [0.01, 0.1] {
                let s = PowerLawSpectrum::new(p, 1.0, gt)?;
                for k in 2..=50 {
                    let c = covariance_vn(&s, 1.0, k)?;
                    worst = worst.max(c.value.abs() / c.bound);
                }
            }
        }
        Ok(VerificationResult::new(n, worst, 1.0, 0.0, Comparison::AtMost))
    }),
    check!("covariance_vn_scaling", ["verify::covariance_vn"], |n| {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.1)?;
        let r = covariance_vn(&s, 1.0, 40)?.bound / covariance_vn(&s, 1.0, 20)?.bound;
        Ok(VerificationResult::new(n, r, 0.5, 0.02, Comparison::Absolute))
    }),
    check!("covariance_vn_ou", ["verify::covariance_vn"], |n| {
        // Σ(τ) = (κ/2γ) e^{-γτ}
        let (kappa, gamma, t) = (1.0, 0.1, 1.0);
        let s = PowerLawSpectrum::new(2.0, kappa, gamma)?;
        let sig = |tau: f64| kappa / (2.0 * gamma) * (-gamma * tau).exp();
        let exact = (2.0 * sig(2.0 * t) - sig(t) - sig(3.0 * t)) / (4.0 * PI * PI);
        Ok(VerificationResult::new(n, covariance_vn(&s, t, 2)?.value, exact, 1e-6, Comparison::Relative))
    }),
    check!("zeta_three_halves", [], |n| {
        let z = zeta_three_halves();
        Ok(VerificationResult::new(n, z * z, 7.0, 0.0, Comparison::AtMost))
    }),
];

pub fn check_names() -> Vec<&'static str> {
    let mut v: Vec<_> = CHECKS.iter().map(|c| c.name).collect();
    v.sort_unstable();
    v
}

/// Runs every registered check; results sorted by name.
pub fn run_verification_suite() -> Vec<VerificationResult> {
    let mut out: Vec<_> = CHECKS.par_iter().map(Check::run).collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Runs the named checks only. Unknown names are an error.
pub fn run_checks(names: &[String]) -> Result<Vec<VerificationResult>> {
    let selected = names
        .iter()
        .map(|n| {
            CHECKS
                .iter()
                .find(|c| c.name == n)
                .ok_or_else(|| invalid("only", format!("no check named {n:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<_> = selected.par_iter().map(|c| c.run()).collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
