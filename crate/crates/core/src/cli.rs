//! Command-line front end. `run` does all the work and returns the process
//! exit code so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{waveform_lower_bound, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::estimator::Mode;
use crate::simulation::{log_log_slope, run_simulation, SimulationConfig, SimulationReport};
use crate::spectrum::PowerLawSpectrum;
use crate::verify::{run_checks, run_verification_suite, VerificationResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_INSUFFICIENT: i32 = 4;

pub const JOBS_ENV: &str = "WAVEBOUND_JOBS";

#[derive(Debug, Parser)]
#[command(name = "wavebound", version, about = "Phase waveform estimation bounds and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Evaluate the waveform lower bound
    Bound,
    /// Monte Carlo run of the sampling estimator
    Simulate,
    /// Simulate over several flux values and fit the scaling exponent
    Sweep,
    /// Run the verification suite
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Plain,
    Periodic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Periodic => Mode::Periodic,
        }
    }
}

#[derive(Debug, Default, Args)]
struct Common {
    /// Spectral exponent, p > 1
    #[arg(long = "p", global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Photon flux 𝒩
    #[arg(long, global = true, allow_negative_numbers = true)]
    flux: Option<f64>,
    /// Pulse period; defaults to the optimal period for the flux
    #[arg(long, global = true, allow_negative_numbers = true)]
    period: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Sinc interpolation truncation M
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Record length in pulses; defaults to 2M + 1 + 64
    #[arg(long, global = true)]
    pulses: Option<usize>,
    /// Comma-separated flux values for `sweep`
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    fluxes: Option<Vec<f64>>,
    /// Run only these checks in `verify`
    #[arg(long, global = true, value_delimiter = ',')]
    only: Option<Vec<String>>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON file with RunConfig fields; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; falls back to WAVEBOUND_JOBS, then all cores
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

/// Optional fields read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    p: Option<f64>,
    kappa: Option<f64>,
    gamma: Option<f64>,
    flux: Option<f64>,
    period: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    mode: Option<Mode>,
    truncation: Option<usize>,
    pulses: Option<usize>,
    fluxes: Option<Vec<f64>>,
    output_format: Option<OutputFormat>,
    output_path: Option<PathBuf>,
}

/// Effective configuration after merging defaults, the config file and flags.
/// Echoed in every bound/simulate/sweep report. The thread count is left out
/// because it does not affect results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub p: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub flux: f64,
    pub period: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    pub truncation: usize,
    pub pulses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fluxes: Option<Vec<f64>>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    fn spectrum(&self) -> Result<PowerLawSpectrum> {
        PowerLawSpectrum::new(self.p, self.kappa, self.gamma)
    }

    fn simulation(&self, flux: f64) -> Result<SimulationConfig> {
        let mut cfg = SimulationConfig::new(self.spectrum()?, flux, self.trials, self.seed)?
            .with_truncation(self.truncation);
        cfg.mode = self.mode;
        if let Some(t) = self.period {
            cfg.period = t;
        }
        if let Some(n) = self.pulses {
            cfg.pulses = n;
        }
        Ok(cfg)
    }
}

fn merge(command: Command, c: &Common) -> Result<RunConfig> {
    let file = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let name = match command {
        Command::Bound => "bound",
        Command::Simulate => "simulate",
        Command::Sweep => "sweep",
        Command::Verify => "verify",
    };
    Ok(RunConfig {
        command: name,
        p: c.p.or(file.p).unwrap_or(2.0),
        kappa: c.kappa.or(file.kappa).unwrap_or(1.0),
        gamma: c.gamma.or(file.gamma).unwrap_or(0.01),
        flux: c.flux.or(file.flux).unwrap_or(1e3),
        period: c.period.or(file.period),
        trials: c.trials.or(file.trials).unwrap_or(100),
        seed: c.seed.or(file.seed).unwrap_or(0),
        mode: c.mode.map(Mode::from).or(file.mode).unwrap_or(Mode::Periodic),
        truncation: c.truncation.or(file.truncation).unwrap_or(crate::simulation::DEFAULT_TRUNCATION),
        pulses: c.pulses.or(file.pulses),
        fluxes: c.fluxes.clone().or(file.fluxes),
        output_format: c.format.or(file.output_format).unwrap_or(OutputFormat::Json),
        output_path: c.output.clone().or(file.output_path),
    })
}

fn jobs(c: &Common) -> Result<usize> {
    if let Some(j) = c.jobs {
        return if j == 0 { Err(invalid("jobs", "must be >= 1")) } else { Ok(j) };
    }
    if let Ok(v) = std::env::var(JOBS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(j) if j > 0 => Ok(j),
            _ => Err(invalid("jobs", format!("{JOBS_ENV}={v:?} is not a positive integer"))),
        };
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Regime(_) => EXIT_REGIME,
        Error::InsufficientSupport(_) => EXIT_INSUFFICIENT,
        Error::InvalidParameter { .. }
        | Error::Domain(_)
        | Error::InvalidGrid(_)
        | Error::GridMismatch(_)
        | Error::LengthMismatch { .. } => EXIT_INVALID,
        Error::Quadrature { .. } => EXIT_VERIFY_FAILED,
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a RunConfig,
    result: T,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub flux: f64,
    pub lower_bound: f64,
    pub predicted_total: f64,
    pub simulated_mse: f64,
    pub ci: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub slope: f64,
    pub expected_slope: f64,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

pub fn cmd_bound(cfg: &RunConfig) -> Result<BoundReport> {
    waveform_lower_bound(&cfg.spectrum()?, cfg.flux)
}

pub fn cmd_simulate(cfg: &RunConfig, jobs: usize) -> Result<SimulationReport> {
    run_simulation(&cfg.simulation(cfg.flux)?, jobs)
}

pub fn cmd_sweep(cfg: &RunConfig, jobs: usize) -> Result<SweepReport> {
    let fluxes = cfg
        .fluxes
        .as_ref()
        .ok_or_else(|| invalid("fluxes", "sweep needs --fluxes with at least two values"))?;
    if fluxes.len() < 2 {
        return Err(invalid("fluxes", format!("need at least two values, got {}", fluxes.len())));
    }
    if let Some(f) = fluxes.iter().find(|f| !(**f > 0.0) || !f.is_finite()) {
        return Err(invalid("fluxes", format!("must be positive and finite, got {f}")));
    }
    let mut rows = Vec::with_capacity(fluxes.len());
    for &flux in fluxes {
        let r = run_simulation(&cfg.simulation(flux)?, jobs)?;
        rows.push(SweepRow {
            flux,
            lower_bound: r.lower_bound,
            predicted_total: r.predicted_total,
            simulated_mse: r.mse,
            ci: r.budget.ci_halfwidth,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.flux).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.simulated_mse).collect();
    Ok(SweepReport {
        slope: log_log_slope(&x, &y)?,
        expected_slope: -crate::bounds::scaling_exponent(cfg.p),
        rows,
    })
}

pub fn cmd_verify(only: Option<&[String]>) -> Result<Vec<VerificationResult>> {
    match only {
        Some(names) => run_checks(names),
        None => Ok(run_verification_suite()),
    }
}

fn render_bound(cfg: &RunConfig, r: &BoundReport) -> String {
    match cfg.output_format {
        OutputFormat::Json => to_json(&Envelope { config: cfg, result: r }),
        OutputFormat::Csv => csv_string(
            &[
                "p", "kappa", "gamma", "flux", "tau0", "tau_f", "branch", "t_star", "c_z",
                "exponent", "scaling_bound", "gamma_t_star", "gamma_t_limit",
            ],
            &[vec![
                cfg.p.to_string(),
                cfg.kappa.to_string(),
                cfg.gamma.to_string(),
                cfg.flux.to_string(),
                r.tau0.to_string(),
                r.tau_f.to_string(),
                serde_json::to_value(r.branch).expect("enum").as_str().unwrap_or("").to_string(),
                r.t_star.to_string(),
                r.c_z.to_string(),
                r.exponent.to_string(),
                r.scaling_bound.to_string(),
                r.gamma_t_star.to_string(),
                r.gamma_t_limit.to_string(),
            ]],
        ),
    }
}

fn render_simulate(cfg: &RunConfig, r: &SimulationReport) -> String {
    match cfg.output_format {
        OutputFormat::Json => to_json(&Envelope { config: cfg, result: r }),
        OutputFormat::Csv => {
            let b = &r.budget;
            let c = &r.config;
            csv_string(
                &[
                    "seed", "trials", "flux", "period", "mode", "aliasing", "noise", "wrap",
                    "total_plain", "total_modulo", "mse", "ci", "lower_bound", "predicted_total",
                    "achievable",
                ],
                &[vec![
                    c.seed.to_string(),
                    c.trials.to_string(),
                    c.flux.to_string(),
                    c.period.to_string(),
                    serde_json::to_value(c.mode).expect("enum").as_str().unwrap_or("").to_string(),
                    b.aliasing.to_string(),
                    b.noise.to_string(),
                    b.wrap.to_string(),
                    b.total_plain.to_string(),
                    b.total_modulo.to_string(),
                    r.mse.to_string(),
                    b.ci_halfwidth.to_string(),
                    r.lower_bound.to_string(),
                    r.predicted_total.to_string(),
                    r.achievable.to_string(),
                ]],
            )
        }
    }
}

fn render_sweep(cfg: &RunConfig, r: &SweepReport) -> String {
    match cfg.output_format {
        OutputFormat::Json => to_json(&Envelope { config: cfg, result: r }),
        OutputFormat::Csv => {
            let mut rows: Vec<Vec<String>> = r
                .rows
                .iter()
                .map(|x| {
                    vec![
                        x.flux.to_string(),
                        x.lower_bound.to_string(),
                        x.predicted_total.to_string(),
                        x.simulated_mse.to_string(),
                        x.ci.to_string(),
                    ]
                })
                .collect();
            rows.push(vec![
                "slope".into(),
                String::new(),
                String::new(),
                r.slope.to_string(),
                String::new(),
            ]);
            csv_string(&["flux", "lower_bound", "predicted_total", "simulated_mse", "ci"], &rows)
        }
    }
}

fn render_verify(format: OutputFormat, results: &[VerificationResult]) -> String {
    match format {
        OutputFormat::Json => to_json(&results),
        OutputFormat::Csv => csv_string(
            &["name", "computed", "reference", "tolerance", "passed"],
            &results
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.computed.to_string(),
                        r.reference.to_string(),
                        r.tolerance.to_string(),
                        r.passed.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    }
}

fn verify_table(results: &[VerificationResult]) -> String {
    let mut s = String::new();
    for r in results {
        s += &format!(
            "{:<4} {:<34} computed={:<24e} reference={:<14e} tol={:e}\n",
            if r.passed { "ok" } else { "FAIL" },
            r.name,
            r.computed,
            r.reference,
            r.tolerance
        );
    }
    s
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| invalid("output", format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| invalid("output", e.to_string())),
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = merge(cli.command, &cli.common)?;
    let path = cfg.output_path.as_ref();
    match cli.command {
        Command::Bound => {
            let r = cmd_bound(&cfg)?;
            emit(&render_bound(&cfg, &r), path, out)?;
        }
        Command::Simulate => {
            let r = cmd_simulate(&cfg, jobs(&cli.common)?)?;
            emit(&render_simulate(&cfg, &r), path, out)?;
        }
        Command::Sweep => {
            let r = cmd_sweep(&cfg, jobs(&cli.common)?)?;
            emit(&render_sweep(&cfg, &r), path, out)?;
        }
        Command::Verify => {
            let results = cmd_verify(cli.common.only.as_deref())?;
            let _ = err.write_all(verify_table(&results).as_bytes());
            emit(&render_verify(cfg.output_format, &results), path, out)?;
            if results.iter().any(|r| !r.passed) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["wavebound"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bound_example() {
        let (code, out, _) = call(&["bound", "--p", "2", "--kappa", "1", "--gamma", "0.01", "--flux", "1e4"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let b = v["result"]["scaling_bound"].as_f64().unwrap();
        let exact = crate::bounds::lower_bound_coefficient(2.0) * 1e-4f64.powf(2.0 / 3.0);
        assert!(((b - exact) / exact).abs() < 1e-12, "{b}");
        // 0.0365·(1e-4)^{2/3} with c_Z rounded to three figures
        assert!(((b - 7.86e-5) / 7.86e-5).abs() < 5e-3, "{b}");
        assert_eq!(v["config"]["p"].as_f64(), Some(2.0));
    }

    #[test]
    fn bound_exit_codes() {
        let (code, _, err) = call(&["bound", "--p", "0.9"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("p > 1"), "{err}");
        let (code, _, _) = call(&["bound", "--p", "2", "--gamma", "10", "--flux", "10"]);
        assert_eq!(code, EXIT_REGIME);
        let (code, _, _) = call(&["bound", "--flux", "-3"]);
        assert_eq!(code, EXIT_INVALID);
        let (code, _, _) = call(&["frobnicate"]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn simulate_validation_codes() {
        assert_eq!(call(&["simulate", "--trials", "0"]).0, EXIT_INVALID);
        assert_eq!(
            call(&["simulate", "--trials", "1", "--truncation", "8", "--pulses", "10"]).0,
            EXIT_INSUFFICIENT
        );
    }

    #[test]
    fn sweep_needs_two_fluxes() {
        assert_eq!(call(&["sweep", "--fluxes", "100"]).0, EXIT_INVALID);
        assert_eq!(call(&["sweep"]).0, EXIT_INVALID);
        assert_eq!(call(&["sweep", "--fluxes", "100,-1"]).0, EXIT_INVALID);
    }

    #[test]
    fn verify_only_csv() {
        let (code, out, _) = call(&["verify", "--only", "zeta_three_halves", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "name,computed,reference,tolerance,passed");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("zeta_three_halves,") && lines[1].ends_with(",true"));
        assert_eq!(call(&["verify", "--only", "no_such_check"]).0, EXIT_INVALID);
    }

    #[test]
    fn config_file_merges_under_flags() {
        let dir = std::env::temp_dir().join(format!("wavebound-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.json");
        fs::write(&path, r#"{"p": 3.0, "kappa": 2.0, "flux": 500.0}"#).unwrap();
        let (code, out, _) = call(&["bound", "--config", path.to_str().unwrap(), "--kappa", "1.5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["config"]["p"].as_f64(), Some(3.0));
        assert_eq!(v["config"]["kappa"].as_f64(), Some(1.5));
        assert_eq!(v["config"]["flux"].as_f64(), Some(500.0));
        fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert_eq!(call(&["bound", "--config", path.to_str().unwrap()]).0, EXIT_INVALID);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn error_mapping() {
        assert_eq!(exit_code(&Error::Regime("x".into())), 3);
        assert_eq!(exit_code(&Error::InsufficientSupport("x".into())), 4);
        assert_eq!(exit_code(&invalid("p", "x")), 2);
    }
}
