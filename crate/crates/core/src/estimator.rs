//! Pulsed phase sampling, sinc interpolation, unwrapping and the closed-form
//! error budget of the sampling estimator.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bounds::{scaling_exponent, ProbeConfig};
use crate::error::{invalid, Error, Result};
use crate::gp::WaveformTrace;
use crate::quad::{self, Tolerance};
use crate::specfun::{modulo_2pi, Constants};
use crate::spectrum::PowerLawSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Periodic,
}

/// Phase estimates Y_n at times t0 + nT and their unwrapped values X̌_n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub t0: f64,
    pub period: f64,
    pub raw: Vec<f64>,
    pub unwrapped: Vec<f64>,
    pub noise_std: f64,
}

/// Per-pulse phase variance numerator (4/27)|z_A|³.
fn canonical_factor() -> f64 {
    Constants::get().canonical_phase_factor()
}

/// T = ((4/27)|z_A|³ π^p / (𝒩² κ^{p-1}))^{1/(p+1)}.
pub fn optimal_pulse_period(p: f64, kappa: f64, flux: f64) -> Result<f64> {
    check_positive("p", p - 1.0, p)?;
    check_positive("kappa", kappa, kappa)?;
    check_positive("flux", flux, flux)?;
    Ok((canonical_factor() * PI.powf(p) / (flux * flux * kappa.powf(p - 1.0))).powf(1.0 / (p + 1.0)))
}

fn check_positive(name: &'static str, test: f64, value: f64) -> Result<()> {
    if test > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("out of range: {value}")))
    }
}

/// √((4/27)|z_A|³)/(𝒩T).
pub fn measurement_noise_std(flux: f64, period: f64) -> Result<f64> {
    let nt = flux * period;
    check_positive("flux*period", nt, nt)?;
    Ok(canonical_factor().sqrt() / nt)
}

/// X̌_0 = Y_0, X̌_n = X̌_{n-1} + [Y_n - Y_{n-1}]_{2π}.
pub fn unwrap_estimates(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev_raw = match raw.first() {
        Some(&r) => r,
        None => return out,
    };
    let mut acc = prev_raw;
    out.push(acc);
    for &r in &raw[1..] {
        acc += modulo_2pi(r - prev_raw);
        out.push(acc);
        prev_raw = r;
    }
    out
}

/// Samples X at each pulse time and adds Gaussian noise of the given width.
///
/// The trace must contain the pulse times t0 + nT as grid points.
pub fn simulate_measurements_with_noise<R: Rng + ?Sized>(
    trace: &WaveformTrace,
    period: f64,
    noise_std: f64,
    rng: &mut R,
    mode: Mode,
) -> Result<MeasurementRecord> {
    let step = period / trace.dt;
    let stride = step.round();
    if !(stride >= 1.0) || (step - stride).abs() > 1e-9 * stride {
        return Err(Error::GridMismatch(format!(
            "pulse period {period} is not a multiple of the trace step {}",
            trace.dt
        )));
    }
    if !(noise_std >= 0.0) {
        return Err(invalid("noise_std", format!("must be >= 0, got {noise_std}")));
    }
    let stride = stride as usize;
    let normal = Normal::new(0.0, noise_std).expect("finite, non-negative std");
    let noisy: Vec<f64> = trace
        .values
        .iter()
        .step_by(stride)
        .map(|x| x + normal.sample(rng))
        .collect();
    let (raw, unwrapped) = match mode {
        Mode::Plain => (noisy.clone(), noisy),
        Mode::Periodic => {
            let raw: Vec<f64> = noisy.into_iter().map(modulo_2pi).collect();
            let unwrapped = unwrap_estimates(&raw);
            (raw, unwrapped)
        }
    };
    Ok(MeasurementRecord {
        t0: trace.t0,
        period,
        raw,
        unwrapped,
        noise_std,
    })
}

/// Measurement record with the canonical-phase noise level of `probe`.
pub fn simulate_measurements<R: Rng + ?Sized>(
    trace: &WaveformTrace,
    probe: &ProbeConfig,
    rng: &mut R,
    mode: Mode,
) -> Result<MeasurementRecord> {
    let std = measurement_noise_std(probe.flux, probe.pulse_period)?;
    simulate_measurements_with_noise(trace, probe.pulse_period, std, rng, mode)
}

/// Truncated Whittaker–Shannon sum Σ x_n sinc(πt/T - πn) over the 2M+1
/// samples nearest t.
pub fn interpolate_samples(
    values: &[f64],
    t0: f64,
    period: f64,
    t: f64,
    truncation: usize,
) -> Result<f64> {
    if truncation == 0 {
        return Err(invalid("truncation", "must be >= 1"));
    }
    let u = (t - t0) / period;
    let c = u.round();
    let m = truncation as f64;
    if c - m < 0.0 || c + m > values.len() as f64 - 1.0 {
        return Err(Error::InsufficientSupport(format!(
            "t = {t} needs samples {}..={} but the record has {}",
            c - m,
            c + m,
            values.len()
        )));
    }
    let c = c as usize;
    let r = u - c as f64;
    if r == 0.0 {
        return Ok(values[c]);
    }
    // sin(π(u - n)) = (-1)^{c-n} sin(πr)
    let s = (PI * r).sin() / PI;
    let mut acc = 0.0;
    for k in -(truncation as i64)..=truncation as i64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let n = (c as i64 + k) as usize;
        acc += sign * values[n] / (r - k as f64);
    }
    Ok(s * acc)
}

/// Interpolates the unwrapped record at time t.
pub fn interpolate(record: &MeasurementRecord, t: f64, truncation: usize) -> Result<f64> {
    interpolate_samples(&record.unwrapped, record.t0, record.period, t, truncation)
}

/// Time-averaged squared errors of one record against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseSample {
    pub plain: f64,
    pub modulo: f64,
}

/// Evaluation points: `phases` uniformly spaced offsets in each of the
/// periods `first..first + periods`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalWindow {
    pub first: usize,
    pub periods: usize,
    pub phases: usize,
}

impl EvalWindow {
    /// Sample-time offsets (in units of T) of all evaluation points.
    pub fn offsets(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.periods).flat_map(move |c| {
            (0..self.phases).map(move |j| (self.first + c) as f64 + j as f64 / self.phases as f64)
        })
    }

    /// Centred window leaving `truncation` samples on each side of an
    /// n-pulse record.
    pub fn centred(n_pulses: usize, truncation: usize, phases: usize) -> Result<Self> {
        if n_pulses < 2 * truncation + 2 {
            return Err(Error::InsufficientSupport(format!(
                "{n_pulses} pulses cannot support truncation {truncation}; need at least {}",
                2 * truncation + 2
            )));
        }
        Ok(Self {
            first: truncation,
            periods: n_pulses - 2 * truncation - 1,
            phases,
        })
    }
}

/// Truth value at offset u·T, read from the dense trace grid.
fn truth_at(truth: &WaveformTrace, record: &MeasurementRecord, u: f64) -> Result<f64> {
    let idx = (record.t0 - truth.t0 + u * record.period) / truth.dt;
    let i = idx.round();
    if (idx - i).abs() > 1e-6 || i < 0.0 || i as usize >= truth.len() {
        return Err(Error::GridMismatch(format!(
            "evaluation time at offset {u} is not on the truth grid"
        )));
    }
    Ok(truth.values[i as usize])
}

/// Time-averaged [X̌(t) - X(t)]² and [X̌(t) - X(t)]²_{2π} over the window.
pub fn mse_summary(
    record: &MeasurementRecord,
    truth: &WaveformTrace,
    truncation: usize,
    window: &EvalWindow,
) -> Result<MseSample> {
    let mut plain = 0.0;
    let mut modulo = 0.0;
    let mut count = 0usize;
    for u in window.offsets() {
        let t = record.t0 + u * record.period;
        let e = interpolate(record, t, truncation)? - truth_at(truth, record, u)?;
        plain += e * e;
        modulo += modulo_2pi(e).powi(2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::InsufficientSupport("empty evaluation window".into()));
    }
    Ok(MseSample {
        plain: plain / count as f64,
        modulo: modulo / count as f64,
    })
}

/// Size of the truncation error per unit sample amplitude for slowly
/// varying samples: the paired alternating sinc tail beyond M is below
/// 1/(πM).
pub fn truncation_bound(truncation: usize) -> f64 {
    1.0 / (PI * truncation as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AliasingError {
    /// (2/π)∫_{π/T}^∞ Σ̃(ω) dω by quadrature.
    pub exact: f64,
    /// 2(κT)^{p-1}/(π^p (p-1)).
    pub approx: f64,
}

/// Time-averaged aliasing error of noiseless sinc interpolation.
pub fn aliasing_error_closed_form(spec: &PowerLawSpectrum, period: f64) -> Result<AliasingError> {
    check_positive("period", period, period)?;
    let gt = spec.gamma() * period;
    if gt >= PI / 10.0 {
        return Err(Error::Regime(format!(
            "gamma*T = {gt} is not small compared with pi"
        )));
    }
    let p = spec.p();
    let nyquist = PI / period;
    let q = quad::integrate_to_infinity(
        |w| spec.density(w),
        nyquist,
        nyquist,
        Tolerance::new(0.0, 1e-11),
        2000,
    )?;
    Ok(AliasingError {
        exact: 2.0 / PI * q.value,
        approx: 2.0 * (spec.kappa() * period).powf(p - 1.0) / (PI.powf(p) * (p - 1.0)),
    })
}

/// 2(κT)^{p-1}/(π^p(p-1)) + (4/27)|z_A|³/(𝒩T)².
pub fn predicted_total_error(p: f64, kappa: f64, flux: f64, period: f64) -> f64 {
    aliasing_term(p, kappa, period) + noise_term(flux, period)
}

pub fn aliasing_term(p: f64, kappa: f64, period: f64) -> f64 {
    2.0 * (kappa * period).powf(p - 1.0) / (PI.powf(p) * (p - 1.0))
}

pub fn noise_term(flux: f64, period: f64) -> f64 {
    canonical_factor() / (flux * period).powi(2)
}

/// c_A = (p+1)/(p-1) (4|z_A|³/27)^{(p-1)/(p+1)} π^{-2p/(p+1)}.
pub fn achievable_coefficient(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("c_A needs p > 1, got {p}")));
    }
    Ok((p + 1.0) / (p - 1.0)
        * canonical_factor().powf((p - 1.0) / (p + 1.0))
        * PI.powf(-2.0 * p / (p + 1.0)))
}

/// c_A (κ/𝒩)^{2(p-1)/(p+1)}.
pub fn achievable_error(p: f64, kappa: f64, flux: f64) -> Result<f64> {
    Ok(achievable_coefficient(p)? * (kappa / flux).powf(scaling_exponent(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WrapBound {
    /// Per-pulse probability of a wrap event.
    pub p_err: f64,
    /// Time-averaged E[[2πK(t)]²_{2π}], p_err·(1 - 1/π).
    pub mse: f64,
}

pub fn wrap_error_bound(flux: f64, period: f64) -> Result<WrapBound> {
    let nt = flux * period;
    check_positive("flux*period", nt, nt)?;
    let p_err = 8.0 / (PI * PI) * canonical_factor() / (nt * nt);
    Ok(WrapBound {
        p_err,
        mse: p_err * (1.0 - 1.0 / PI),
    })
}

/// Steady-state causal filtering error R∫dω/2π ln(1 + Σ̃(ω)/R).
pub fn yovits_jackson_error(spec: &PowerLawSpectrum, r: f64) -> Result<f64> {
    check_positive("R", r, r)?;
    let p = spec.p();
    // where Σ̃ crosses R, the integrand turns from logarithmic to Σ̃ itself
    let crossover = spec.gamma().max((spec.kappa().powf(p - 1.0) / r).powf(1.0 / p));
    let q = quad::integrate_to_infinity(
        |w| r * (spec.density(w) / r).ln_1p(),
        0.0,
        crossover,
        Tolerance::new(0.0, 1e-10),
        4000,
    )?;
    Ok(q.value / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::lower_bound_coefficient;
    use crate::gp::{sample_waveform, trace_rng, SynthesisConfig, TimeGrid};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn optimal_period_examples() {
        let t = optimal_pulse_period(2.0, 1.0, 100.0).unwrap();
        assert!((t - 0.1232).abs() < 1e-4, "{t}");
        let t8 = optimal_pulse_period(2.0, 1.0, 800.0).unwrap();
        assert!(rel(t8, t / 4.0) < 1e-14);
        assert!(optimal_pulse_period(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn optimal_period_minimizes_prediction() {
        for &p in &[1.5, 2.0, 3.0] {
            let t = optimal_pulse_period(p, 1.0, 1e3).unwrap();
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..20_001 {
                let tt = t * (0.5 + i as f64 * 1e-4);
                let v = predicted_total_error(p, 1.0, 1e3, tt);
                if v < best.0 {
                    best = (v, tt);
                }
            }
            assert!(rel(best.1, t) < 1e-3, "p={p}");
        }
    }

    #[test]
    fn noise_std_examples() {
        let s = measurement_noise_std(10.0, 1.0).unwrap();
        assert!((s - 0.13761).abs() < 1e-5);
        assert!(rel(measurement_noise_std(20.0, 1.0).unwrap(), s / 2.0) < 1e-14);
        assert!(measurement_noise_std(1e300, 1e8).unwrap() < 1e-300);
        assert!(measurement_noise_std(0.0, 1.0).is_err());
    }

    #[test]
    fn unwrap_examples() {
        let u = unwrap_estimates(&[0.1, 3.0, -3.0]);
        assert_eq!(&u[..2], &[0.1, 3.0]);
        assert!((u[2] - (2.0 * PI - 3.0)).abs() < 1e-12);
        assert!((u[2] - 3.2832).abs() < 1e-4);
        assert_eq!(unwrap_estimates(&[0.7; 5]), vec![0.7; 5]);
        assert_eq!(unwrap_estimates(&[0.0, PI, PI]), vec![0.0, PI, PI]);
        assert!(unwrap_estimates(&[]).is_empty());
    }

    #[test]
    fn interpolation_examples() {
        let rec = MeasurementRecord {
            t0: 0.0,
            period: 0.5,
            raw: vec![],
            unwrapped: (0..5000).map(|n| (n as f64 * 0.37).sin()).collect(),
            noise_std: 0.0,
        };
        assert_eq!(interpolate(&rec, 2600.0 * 0.5, 3).unwrap(), rec.unwrapped[2600]);

        let flat = vec![2.5; 5000];
        let v = interpolate_samples(&flat, 0.0, 1.0, 2003.5, 2000).unwrap();
        assert!((v - 2.5).abs() < 1e-3);

        // linear phase αnT at t = T/2 in the middle of a long symmetric record
        let alpha = 0.3;
        let tt = 0.1;
        let centre = 4000usize;
        let lin: Vec<f64> = (0..=2 * centre).map(|n| alpha * (n as f64 - centre as f64) * tt).collect();
        let t = (centre as f64 + 0.5) * tt;
        let v = interpolate_samples(&lin, 0.0, tt, t, 3000).unwrap();
        // truncating a linear ramp leaves an O(αT) oscillating remainder
        assert!((v - alpha * tt / 2.0).abs() < alpha * tt / PI + 1e-9, "{v}");

        assert!(matches!(
            interpolate_samples(&flat, 0.0, 1.0, 10.2, 20),
            Err(Error::InsufficientSupport(_))
        ));
        assert!(interpolate_samples(&flat, 0.0, 1.0, 100.2, 0).is_err());
    }

    #[test]
    fn bandlimited_signal_reconstructed() {
        // band-limited truth sampled noiselessly: only truncation error remains
        let period = 1.0;
        let dt = period / 8.0;
        let n = 8 * 600;
        let f = |t: f64| 0.3 * (0.9 * t).sin() + 0.2 * (2.1 * t + 0.4).cos();
        let truth = WaveformTrace {
            t0: 0.0,
            dt,
            values: (0..n).map(|i| f(i as f64 * dt)).collect(),
            underresolved: false,
        };
        let rec = simulate_measurements_with_noise(&truth, period, 0.0, &mut trace_rng(0, 0), Mode::Plain)
            .unwrap();
        let window = EvalWindow { first: 250, periods: 50, phases: 8 };
        let m = mse_summary(&rec, &truth, 240, &window).unwrap();
        assert!(m.plain < (0.5 * truncation_bound(240)).powi(2), "{}", m.plain);
        assert!(m.modulo <= m.plain + 1e-12);
    }

    fn ou_trace(period: f64, n_pulses: usize, k: usize, seed: u64) -> WaveformTrace {
        let spec = PowerLawSpectrum::new(2.0, 1.0, 0.01).unwrap();
        let grid = TimeGrid { t0: 0.0, dt: period / k as f64, n: n_pulses * k };
        let cfg = SynthesisConfig::matched(&grid, seed).unwrap();
        sample_waveform(&spec, grid, &cfg, 0).unwrap()
    }

    #[test]
    fn noiseless_periodic_record_is_wrapped_truth() {
        let trace = ou_trace(0.5, 200, 4, 2);
        let rec = simulate_measurements_with_noise(&trace, 0.5, 0.0, &mut trace_rng(0, 1), Mode::Periodic)
            .unwrap();
        for (n, y) in rec.raw.iter().enumerate() {
            assert_eq!(*y, modulo_2pi(trace.values[4 * n]));
            assert!(*y > -PI && *y <= PI);
        }
        assert_eq!(rec.unwrapped[0], rec.raw[0]);
        for n in 1..rec.raw.len() {
            assert!((rec.unwrapped[n] - rec.unwrapped[n - 1]).abs() <= PI);
            let k = (rec.unwrapped[n] - rec.raw[n]) / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-9);
        }
        let again = simulate_measurements_with_noise(&trace, 0.5, 0.0, &mut trace_rng(0, 1), Mode::Periodic)
            .unwrap();
        assert_eq!(rec, again);
    }

    #[test]
    fn measurement_noise_variance() {
        let trace = ou_trace(0.1, 10_000, 1, 4);
        let probe = ProbeConfig::new(50.0, 0.1).unwrap();
        let rec = simulate_measurements(&trace, &probe, &mut trace_rng(4, 99), Mode::Plain).unwrap();
        let n = rec.raw.len() as f64;
        let var = rec
            .raw
            .iter()
            .zip(trace.values.iter())
            .map(|(y, x)| (y - x).powi(2))
            .sum::<f64>()
            / n;
        let s2 = rec.noise_std.powi(2);
        assert!((var - s2).abs() < 4.0 * s2 * (2.0 / n).sqrt());
    }

    #[test]
    fn grid_alignment_error() {
        let trace = ou_trace(0.1, 10, 1, 4);
        assert!(matches!(
            simulate_measurements_with_noise(&trace, 0.15, 0.0, &mut trace_rng(0, 0), Mode::Plain),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn aliasing_examples() {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.01).unwrap();
        let a = aliasing_error_closed_form(&s, 0.1).unwrap();
        assert!((a.approx - 0.020264).abs() < 1e-6);
        for &p in &[2.0, 3.0] {
            let s = PowerLawSpectrum::new(p, 1.0, 1e-3 / 0.1).unwrap();
            let a = aliasing_error_closed_form(&s, 0.1).unwrap();
            assert!(rel(a.exact, a.approx) < 0.01, "p={p}");
        }
        let s3 = PowerLawSpectrum::new(3.0, 1.0, 1e-3).unwrap();
        let a1 = aliasing_error_closed_form(&s3, 0.1).unwrap().approx;
        let a2 = aliasing_error_closed_form(&s3, 0.2).unwrap().approx;
        assert!(rel(a2, 4.0 * a1) < 1e-14);
        let hot = PowerLawSpectrum::new(2.0, 1.0, 5.0).unwrap();
        assert!(matches!(aliasing_error_closed_form(&hot, 0.1), Err(Error::Regime(_))));
    }

    #[test]
    fn prediction_at_optimum_is_achievable_error() {
        for &p in &[1.5, 2.0, 3.0, 4.0] {
            for &flux in &[10.0, 1e3, 1e5] {
                let t = optimal_pulse_period(p, 0.7, flux).unwrap();
                let pred = predicted_total_error(p, 0.7, flux, t);
                let ach = achievable_error(p, 0.7, flux).unwrap();
                assert!(rel(pred, ach) < 1e-10, "p={p} N={flux}");
            }
        }
        assert_eq!(predicted_total_error(2.0, 1.0, f64::INFINITY, 0.2), aliasing_term(2.0, 1.0, 0.2));
    }

    #[test]
    fn prediction_terms_monotone() {
        let mut prev = (0.0, f64::INFINITY);
        for i in 1..100 {
            let t = i as f64 * 0.01;
            let a = aliasing_term(2.0, 1.0, t);
            let n = noise_term(100.0, t);
            assert!(a > prev.0 && n < prev.1);
            prev = (a, n);
        }
    }

    #[test]
    fn c_a_examples() {
        let c = achievable_coefficient(2.0).unwrap();
        assert!((c - 0.807).abs() < 1e-3, "{c}");
        assert!(achievable_coefficient(1.0).is_err());
        assert!(achievable_coefficient(1.0 + 1e-9).unwrap() > 1e6);
        assert!(c > lower_bound_coefficient(2.0));
    }

    #[test]
    fn wrap_bound_examples() {
        let w = wrap_error_bound(100.0, 1.0).unwrap();
        assert!((w.p_err - 1.535e-4).abs() < 1e-7);
        assert!((w.mse / w.p_err - (1.0 - 1.0 / PI)).abs() < 1e-15);
        assert!(wrap_error_bound(1e200, 1e100).unwrap().mse < 1e-300);
    }

    #[test]
    fn yovits_jackson_limits() {
        let s = PowerLawSpectrum::new(2.0, 1.0, 0.5).unwrap();
        let s0 = s.density(0.0);
        let big = yovits_jackson_error(&s, 1e6 * s0).unwrap();
        assert!(rel(big, s.variance()) < 1e-3);
        let small = yovits_jackson_error(&s, 1e-9 * s0).unwrap();
        assert!(small < 1e-3 * s.variance());
        let mut prev = 0.0;
        for i in -8..=6 {
            let v = yovits_jackson_error(&s, s0 * 10f64.powi(i)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unwrap_invariants(raw in proptest::collection::vec((-PI + 1e-5)..(PI - 1e-5), 1..60)) {
            let u = unwrap_estimates(&raw);
            prop_assert_eq!(u[0], raw[0]);
            for n in 1..u.len() {
                let d = u[n] - u[n - 1];
                prop_assert!(d > -PI - 1e-12 && d <= PI + 1e-12);
                let k = (u[n] - raw[n]) / (2.0 * PI);
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
            // idempotent on compliant sequences
            let again = unwrap_estimates(&u);
            for (a, b) in u.iter().zip(&again) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn modulo_error_bounded(e in -100.0f64..100.0) {
            prop_assert!(modulo_2pi(e).powi(2) <= PI * PI);
            prop_assert!(modulo_2pi(e).powi(2) <= e * e + 1e-12);
        }
    }
}
