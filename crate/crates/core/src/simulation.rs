//! Monte Carlo runs of the sampling estimator with paired noiseless, noisy
//! and modulo-2π passes over the same waveform.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{lower_bound_coefficient, scaling_exponent};
use crate::error::{invalid, Error, Result};
use crate::estimator::{
    achievable_error, aliasing_error_closed_form, interpolate_samples, measurement_noise_std,
    mse_summary, optimal_pulse_period, predicted_total_error, simulate_measurements_with_noise,
    truncation_bound, wrap_error_bound, AliasingError, EvalWindow, MeasurementRecord, Mode,
    WrapBound,
};
use crate::gp::{sample_waveform, trace_rng, SynthesisConfig, TimeGrid, WaveformTrace};
use crate::specfun::modulo_2pi;
use crate::spectrum::PowerLawSpectrum;

pub const DEFAULT_TRUNCATION: usize = 512;
pub const DEFAULT_EVAL_PERIODS: usize = 64;
pub const DEFAULT_EVAL_PHASES: usize = 16;
/// Dense-grid points per pulse period used to synthesize the truth.
pub const DEFAULT_OVERSAMPLE: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub spectrum: PowerLawSpectrum,
    pub flux: f64,
    pub period: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    pub truncation: usize,
    pub pulses: usize,
    pub eval_phases: usize,
    pub oversample: usize,
}

impl SimulationConfig {
    /// Defaults: optimal pulse period and a record just long enough for
    /// [`DEFAULT_EVAL_PERIODS`] evaluation periods.
    pub fn new(spectrum: PowerLawSpectrum, flux: f64, trials: usize, seed: u64) -> Result<Self> {
        let period = optimal_pulse_period(spectrum.p(), spectrum.kappa(), flux)?;
        Ok(Self {
            spectrum,
            flux,
            period,
            trials,
            seed,
            mode: Mode::Periodic,
            truncation: DEFAULT_TRUNCATION,
            pulses: 2 * DEFAULT_TRUNCATION + 1 + DEFAULT_EVAL_PERIODS,
            eval_phases: DEFAULT_EVAL_PHASES,
            oversample: DEFAULT_OVERSAMPLE,
        })
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.pulses = 2 * truncation + 1 + DEFAULT_EVAL_PERIODS;
        self.truncation = truncation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.flux > 0.0) || !self.flux.is_finite() {
            return Err(invalid("flux", format!("must be > 0, got {}", self.flux)));
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            return Err(invalid("period", format!("must be > 0, got {}", self.period)));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be >= 1"));
        }
        if self.truncation == 0 {
            return Err(invalid("truncation", "must be >= 1"));
        }
        if self.eval_phases == 0 || self.oversample % self.eval_phases != 0 {
            return Err(invalid(
                "eval_phases",
                format!(
                    "must divide the oversampling factor {}, got {}",
                    self.oversample, self.eval_phases
                ),
            ));
        }
        EvalWindow::centred(self.pulses, self.truncation, self.eval_phases)?;
        Ok(())
    }

    fn grid(&self) -> TimeGrid {
        TimeGrid {
            t0: 0.0,
            dt: self.period / self.oversample as f64,
            n: self.pulses * self.oversample,
        }
    }
}

/// Mean and 95% confidence half-width of one error component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci: f64,
}

impl Estimate {
    fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let ci = if xs.len() > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            1.96 * (var / n).sqrt()
        } else {
            0.0
        };
        Self { mean, ci }
    }
}

/// Time-averaged error components; every field is in rad².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub aliasing: f64,
    pub noise: f64,
    pub wrap: f64,
    pub total_plain: f64,
    pub total_modulo: f64,
    /// 95% half-width of the headline error (modulo in periodic mode).
    pub ci_halfwidth: f64,
    pub aliasing_ci: f64,
    pub noise_ci: f64,
    pub total_plain_ci: f64,
    pub total_modulo_ci: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub budget: ErrorBudget,
    /// headline MSE: total_modulo in periodic mode, total_plain otherwise.
    pub mse: f64,
    pub noise_std: f64,
    pub predicted_total: f64,
    pub lower_bound: f64,
    pub achievable: f64,
    pub aliasing_closed_form: Option<AliasingError>,
    pub wrap_bound: WrapBound,
    pub wrap_event_rate: f64,
    pub truncation_bound: f64,
    pub underresolved: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct TrialResult {
    aliasing: f64,
    noise: f64,
    wrap: f64,
    total_plain: f64,
    total_modulo: f64,
    wrap_events: usize,
    underresolved: bool,
}

fn run_trial(cfg: &SimulationConfig, trial: u64) -> Result<TrialResult> {
    let grid = cfg.grid();
    let synth = SynthesisConfig::matched(&grid, cfg.seed)?;
    let truth = sample_waveform(&cfg.spectrum, grid, &synth, 2 * trial)?;
    let window = EvalWindow::centred(cfg.pulses, cfg.truncation, cfg.eval_phases)?;
    let noise_std = measurement_noise_std(cfg.flux, cfg.period)?;
    let noise_rng = trace_rng(cfg.seed, 2 * trial + 1);

    let clean = simulate_measurements_with_noise(
        &truth,
        cfg.period,
        0.0,
        &mut noise_rng.clone(),
        Mode::Plain,
    )?;
    let noisy = simulate_measurements_with_noise(
        &truth,
        cfg.period,
        noise_std,
        &mut noise_rng.clone(),
        Mode::Plain,
    )?;
    let aliasing = mse_summary(&clean, &truth, cfg.truncation, &window)?.plain;
    let total_plain = mse_summary(&noisy, &truth, cfg.truncation, &window)?.plain;

    // the noise alone, interpolated: difference of the noisy and clean records
    let xi: Vec<f64> = noisy.raw.iter().zip(&clean.raw).map(|(y, x)| y - x).collect();
    let noise = mean_square_interpolant(&xi, cfg, &window)?;

    let mut result = TrialResult {
        aliasing,
        noise,
        total_plain,
        total_modulo: mse_summary(&noisy, &truth, cfg.truncation, &window)?.modulo,
        underresolved: truth.underresolved,
        ..Default::default()
    };

    if cfg.mode == Mode::Periodic {
        let wrapped = simulate_measurements_with_noise(
            &truth,
            cfg.period,
            noise_std,
            &mut noise_rng.clone(),
            Mode::Periodic,
        )?;
        result.total_modulo = mse_summary(&wrapped, &truth, cfg.truncation, &window)?.modulo;
        let (wrap, events) = wrap_component(&wrapped, &noisy, cfg, &window)?;
        result.wrap = wrap;
        result.wrap_events = events;
    }
    Ok(result)
}

fn mean_square_interpolant(
    values: &[f64],
    cfg: &SimulationConfig,
    window: &EvalWindow,
) -> Result<f64> {
    let mut acc = 0.0;
    let mut count = 0usize;
    for u in window.offsets() {
        let v = interpolate_samples(values, 0.0, 1.0, u, cfg.truncation)?;
        acc += v * v;
        count += 1;
    }
    Ok(acc / count as f64)
}

// K_n = (X̌_n - X_n - ξ_n)/2π is an integer; the wrap error is the
// interpolated [2π(K(t) - K_ref)]²_{2π}. A record with a single K has none.
fn wrap_component(
    wrapped: &MeasurementRecord,
    noisy: &MeasurementRecord,
    cfg: &SimulationConfig,
    window: &EvalWindow,
) -> Result<(f64, usize)> {
    let k: Vec<f64> = wrapped
        .unwrapped
        .iter()
        .zip(&noisy.raw)
        .map(|(u, y)| ((u - y) / (2.0 * PI)).round())
        .collect();
    let events = k.windows(2).filter(|w| w[0] != w[1]).count();
    if events == 0 {
        return Ok((0.0, 0));
    }
    let base = k[0];
    let shifted: Vec<f64> = k.iter().map(|v| 2.0 * PI * (v - base)).collect();
    let mut acc = 0.0;
    let mut count = 0usize;
    for u in window.offsets() {
        // remove the level at the nearest sample so only the jumps remain
        let local = shifted[u.round() as usize];
        let v = interpolate_samples(&shifted, 0.0, 1.0, u, cfg.truncation)?;
        let reference = local * sinc_mass(u, cfg.truncation);
        acc += modulo_2pi(v - reference).powi(2);
        count += 1;
    }
    Ok((acc / count as f64, events))
}

// Σ_{|n-c|≤M} sinc(π(u-n)), the weight a constant record receives.
fn sinc_mass(u: f64, truncation: usize) -> f64 {
    let c = u.round();
    let r = u - c;
    if r == 0.0 {
        return 1.0;
    }
    let s = (PI * r).sin() / PI;
    let m = truncation as i64;
    (-m..=m)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (r - k as f64))
        .sum::<f64>()
        * s
}

/// Runs `cfg.trials` independent trials on `jobs` worker threads.
///
/// Trials are keyed by (seed, index) and reduced in index order, so the
/// report does not depend on `jobs`.
pub fn run_simulation(cfg: &SimulationConfig, jobs: usize) -> Result<SimulationReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid("jobs", e.to_string()))?;
    let trials: Vec<Result<TrialResult>> =
        pool.install(|| (0..cfg.trials as u64).into_par_iter().map(|i| run_trial(cfg, i)).collect());
    let trials: Vec<TrialResult> = trials.into_iter().collect::<Result<_>>()?;

    let col = |f: fn(&TrialResult) -> f64| -> Estimate {
        Estimate::from_samples(&trials.iter().map(f).collect::<Vec<_>>())
    };
    let aliasing = col(|t| t.aliasing);
    let noise = col(|t| t.noise);
    let wrap = col(|t| t.wrap);
    let plain = col(|t| t.total_plain);
    let modulo = col(|t| t.total_modulo);
    let headline = if cfg.mode == Mode::Periodic { modulo } else { plain };
    let budget = ErrorBudget {
        aliasing: aliasing.mean,
        noise: noise.mean,
        wrap: wrap.mean,
        total_plain: plain.mean,
        total_modulo: modulo.mean,
        ci_halfwidth: headline.ci,
        aliasing_ci: aliasing.ci,
        noise_ci: noise.ci,
        total_plain_ci: plain.ci,
        total_modulo_ci: modulo.ci,
    };

    let spec = &cfg.spectrum;
    let p = spec.p();
    let events: usize = trials.iter().map(|t| t.wrap_events).sum();
    let wrap_event_rate = if cfg.mode == Mode::Periodic {
        events as f64 / (trials.len() * (cfg.pulses - 1)) as f64
    } else {
        0.0
    };
    Ok(SimulationReport {
        config: cfg.clone(),
        budget,
        mse: headline.mean,
        noise_std: measurement_noise_std(cfg.flux, cfg.period)?,
        predicted_total: predicted_total_error(p, spec.kappa(), cfg.flux, cfg.period),
        lower_bound: lower_bound_coefficient(p) * (spec.kappa() / cfg.flux).powf(scaling_exponent(p)),
        achievable: achievable_error(p, spec.kappa(), cfg.flux)?,
        aliasing_closed_form: aliasing_error_closed_form(spec, cfg.period).ok(),
        wrap_bound: wrap_error_bound(cfg.flux, cfg.period)?,
        wrap_event_rate,
        truncation_bound: truncation_bound(cfg.truncation),
        underresolved: trials.iter().any(|t| t.underresolved),
    })
}

/// Least-squares slope of ln y against ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(invalid("points", "need at least two points for a slope"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Noiseless truth traces used by the aliasing check, exposed for tests.
pub fn synthesize_truth(cfg: &SimulationConfig, trial: u64) -> Result<WaveformTrace> {
    let grid = cfg.grid();
    let synth = SynthesisConfig::matched(&grid, cfg.seed)?;
    sample_waveform(&cfg.spectrum, grid, &synth, 2 * trial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> SimulationConfig {
        let spec = PowerLawSpectrum::new(2.0, 1.0, 0.01).unwrap();
        let mut cfg = SimulationConfig::new(spec, 1e3, 8, 42).unwrap().with_truncation(64);
        cfg.mode = mode;
        cfg
    }

    #[test]
    fn validation() {
        let mut c = small(Mode::Plain);
        c.trials = 0;
        assert!(matches!(run_simulation(&c, 1), Err(Error::InvalidParameter { name: "trials", .. })));
        let mut c = small(Mode::Plain);
        c.pulses = 2 * c.truncation + 1;
        assert!(matches!(run_simulation(&c, 1), Err(Error::InsufficientSupport(_))));
        let mut c = small(Mode::Plain);
        c.eval_phases = 5;
        assert!(run_simulation(&c, 1).is_err());
    }

    #[test]
    fn budget_invariants() {
        let r = run_simulation(&small(Mode::Periodic), 2).unwrap();
        let b = r.budget;
        for v in [b.aliasing, b.noise, b.wrap, b.total_plain, b.total_modulo] {
            assert!(v >= 0.0);
        }
        assert!(b.total_modulo <= PI * PI);
        let ci = b.total_plain_ci + b.aliasing_ci + b.noise_ci;
        assert!((b.aliasing + b.noise - b.total_plain).abs() <= ci, "{b:?}");
        assert!(r.wrap_event_rate <= r.wrap_bound.p_err);
        assert!(r.mse >= r.lower_bound);
    }

    #[test]
    fn deterministic_across_jobs() {
        let c = small(Mode::Periodic);
        let a = run_simulation(&c, 1).unwrap();
        let b = run_simulation(&c, 3).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn sinc_mass_is_constant_weight() {
        let ones = vec![1.0; 301];
        for &u in &[150.0, 150.25, 150.5, 150.9] {
            let v = interpolate_samples(&ones, 0.0, 1.0, u, 100).unwrap();
            assert!((v - sinc_mass(u, 100)).abs() < 1e-14);
        }
    }

    #[test]
    fn slope_fit() {
        let x = [1e2, 1e3, 1e4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0 / 3.0)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 2.0 / 3.0).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_err());
    }
}
