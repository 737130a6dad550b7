//! Stationary Gaussian phase waveforms by random-phase spectral synthesis.
//!
//! X(t) = Σ_j √(Σ̃(ω_j)Δω/π) [A_j cos ω_j t + B_j sin ω_j t] on the midpoint
//! grid ω_j = (j + ½)Δω, Δω = ω_max / n_modes. When the time grid satisfies
//! Δω·dt = 2π/N for an integer N ≥ max(n, n_modes), the sum is evaluated with
//! one length-N FFT; otherwise it is summed directly. Both paths draw the
//! same normals in the same order.

use std::f64::consts::PI;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::{self, Tolerance};
use crate::spectrum::PowerLawSpectrum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveformTrace {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    /// Set when ω_max is below the recommended 20·max(γ, π/(n·dt)).
    pub underresolved: bool,
}

impl WaveformTrace {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `t,x` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x"])?;
        for (i, x) in self.values.iter().enumerate() {
            w.write_record([self.time(i).to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SynthesisConfig {
    pub omega_max: f64,
    pub n_modes: usize,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn new(omega_max: f64, n_modes: usize, seed: u64) -> Result<Self> {
        if !(omega_max > 0.0) || !omega_max.is_finite() {
            return Err(invalid("omega_max", format!("must be > 0, got {omega_max}")));
        }
        if n_modes < 2 {
            return Err(invalid("n_modes", format!("must be >= 2, got {n_modes}")));
        }
        Ok(Self {
            omega_max,
            n_modes,
            seed,
        })
    }

    /// Configuration that puts the modes on the FFT grid of `grid`:
    /// Δω = 2π/(N·dt) and ω_max = N·Δω = 2π/dt.
    pub fn matched(grid: &TimeGrid, seed: u64) -> Result<Self> {
        Self::new(2.0 * PI / grid.dt, grid.n.max(2), seed)
    }
}

/// Generator for one trace: `seed` picks the key, `stream` the independent
/// ChaCha stream, so traces can be generated in any order.
pub fn trace_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Tail mass (1/π)∫_{ω_max}^∞ Σ̃ the synthesis leaves out of the variance.
pub fn spectral_deficit(spec: &PowerLawSpectrum, omega_max: f64) -> Result<f64> {
    let q = quad::integrate_to_infinity(
        |w| spec.density(w),
        omega_max,
        omega_max,
        Tolerance::new(0.0, 1e-10),
        2000,
    )?;
    Ok(q.value / PI)
}

pub fn sample_waveform(
    spec: &PowerLawSpectrum,
    grid: TimeGrid,
    cfg: &SynthesisConfig,
    stream: u64,
) -> Result<WaveformTrace> {
    if grid.n == 0 {
        return Err(Error::InvalidGrid("need at least one time point".into()));
    }
    if !(grid.dt > 0.0) || !grid.dt.is_finite() || !grid.t0.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "dt must be positive and finite, got dt={} t0={}",
            grid.dt, grid.t0
        )));
    }
    let dw = cfg.omega_max / cfg.n_modes as f64;
    let mut rng = trace_rng(cfg.seed, stream);
    let coeffs: Vec<Complex64> = (0..cfg.n_modes)
        .map(|j| {
            let w = (j as f64 + 0.5) * dw;
            let amp = (spec.density(w) * dw / PI).sqrt();
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(amp * a, -amp * b)
        })
        .collect();

    let recommended = 20.0 * spec.gamma().max(PI / (grid.n as f64 * grid.dt));
    let underresolved = cfg.omega_max < recommended;

    let n_fft = 2.0 * PI / (dw * grid.dt);
    let rounded = n_fft.round();
    let values = if (n_fft - rounded).abs() < 1e-9 * rounded
        && rounded as usize >= grid.n.max(cfg.n_modes)
    {
        synthesize_fft(&coeffs, grid, dw, rounded as usize)
    } else {
        synthesize_direct(&coeffs, grid, dw)
    };
    Ok(WaveformTrace {
        t0: grid.t0,
        dt: grid.dt,
        values,
        underresolved,
    })
}

// X(t_k) = Re[e^{iω₀t_k} Σ_j c_j e^{ijΔω t_k}], with ω₀ = Δω/2 and the
// starting phase t0 folded into the coefficients.
fn synthesize_fft(coeffs: &[Complex64], grid: TimeGrid, dw: f64, n_fft: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for (j, c) in coeffs.iter().enumerate() {
        let phase = (j as f64 + 0.5) * dw * grid.t0;
        buf[j] = c * Complex64::from_polar(1.0, phase);
    }
    thread_local! {
        static PLANNER: std::cell::RefCell<FftPlanner<f64>> = std::cell::RefCell::new(FftPlanner::new());
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n_fft));
    fft.process(&mut buf);
    (0..grid.n)
        .map(|k| {
            let twiddle = Complex64::from_polar(1.0, PI * k as f64 / n_fft as f64);
            (buf[k] * twiddle).re
        })
        .collect()
}

fn synthesize_direct(coeffs: &[Complex64], grid: TimeGrid, dw: f64) -> Vec<f64> {
    (0..grid.n)
        .map(|k| {
            let t = grid.t0 + k as f64 * grid.dt;
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let (s, co) = ((j as f64 + 0.5) * dw * t).sin_cos();
                    c.re * co - c.im * s
                })
                .sum()
        })
        .collect()
}

/// Ensemble covariance E[X(t)X(t+k·dt)] with its jackknife standard error.
///
/// Each trace contributes the average of x_t·x_{t+|k|} over its valid t; the
/// process mean is known to be zero and is not re-estimated.
pub fn empirical_autocovariance(traces: &[WaveformTrace], lag_steps: i64) -> Result<(f64, f64)> {
    let first = traces
        .first()
        .ok_or_else(|| Error::GridMismatch("no traces".into()))?;
    for t in traces {
        if t.len() != first.len() || t.dt != first.dt || t.t0 != first.t0 {
            return Err(Error::GridMismatch(format!(
                "trace grid (t0={}, dt={}, n={}) differs from (t0={}, dt={}, n={})",
                t.t0,
                t.dt,
                t.len(),
                first.t0,
                first.dt,
                first.len()
            )));
        }
    }
    let lag = lag_steps.unsigned_abs() as usize;
    if lag >= first.len() {
        return Err(Error::InvalidGrid(format!(
            "lag {lag} exceeds trace length {}",
            first.len()
        )));
    }
    let per_trace: Vec<f64> = traces
        .iter()
        .map(|t| {
            let m = t.len() - lag;
            (0..m).map(|i| t.values[i] * t.values[i + lag]).sum::<f64>() / m as f64
        })
        .collect();
    let n = per_trace.len() as f64;
    let mean = per_trace.iter().sum::<f64>() / n;
    if per_trace.len() < 2 {
        return Ok((mean, 0.0));
    }
    // delete-one jackknife of the mean
    let total: f64 = per_trace.iter().sum();
    let loo: Vec<f64> = per_trace.iter().map(|y| (total - y) / (n - 1.0)).collect();
    let loo_mean = loo.iter().sum::<f64>() / n;
    let var = (n - 1.0) / n * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>();
    Ok((mean, var.sqrt()))
}
