mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use divlab_core::export::{format_g12, write_csv};
use divlab_core::{
    decay_amplitude, decay_rate, measure_record, sweep, verify, JCParams, Summary, SweepConfig,
    VerdictRecord,
};

use config::{parse_family, FamilySpec, Overrides, RunConfig};

/// Exit status when a bound fails at some non-singular grid point.
const EXIT_VIOLATION: u8 = 1;
/// Exit status for configuration and I/O errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "divlab", version, about = "Indivisibility and resourcefulness measures for amplitude-damping dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every measure on a time grid and check both bounds.
    Sweep(SweepArgs),
    /// Evaluate every measure at one time and print it as JSON.
    Probe(ProbeArgs),
    /// Tabulate the decay rate and survival amplitude on a time grid.
    Gamma(GammaArgs),
}

#[derive(Args, Clone, Debug, Default)]
struct ModelArgs {
    /// Target coupling strength.
    #[arg(long, allow_negative_numbers = true)]
    gamma0: Option<f64>,
    /// Target spectral width (also used by the free family).
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Window length.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Free family as min:max:n over gamma0.
    #[arg(long, value_parser = parse_family)]
    family: Option<FamilySpec>,
    #[arg(long)]
    grid_theta: Option<usize>,
    #[arg(long)]
    grid_phi: Option<usize>,
    #[arg(long)]
    grid_r: Option<usize>,
    /// Relative tolerance of the state refinements.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key=value file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_negative_numbers = true)]
    t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Directory for sweep.csv, summary.json and manifest.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Recorded in the manifest; results do not depend on it.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long, default_value_t = 2.0)]
    gamma0: f64,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 5.0)]
    t_max: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.01)]
    dt: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            gamma0: self.gamma0,
            lambda: self.lambda,
            tau: self.tau,
            family: self.family,
            grid_theta: self.grid_theta,
            grid_phi: self.grid_phi,
            grid_r: self.grid_r,
            tol: self.tol,
            ..Overrides::default()
        }
    }
}

/// Failure carrying its exit status and a one-line message.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_ERROR, format!("error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("divlab: error: {msg}");
        return ExitCode::from(EXIT_ERROR);
    }
    let outcome = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Probe(a) => cmd_probe(a),
        Command::Gamma(a) => cmd_gamma(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("divlab: {}", msg.replace('\n', " "));
            ExitCode::from(code)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("DIVLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("DIVLAB_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn config_error(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_ERROR, format!("error: {msg}"))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    summary: &'a Summary,
    records: &'a [VerdictRecord],
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    duration_seconds: f64,
    records: usize,
    singular: usize,
    p_failures: usize,
    cp_failures: usize,
    /// SHA-256 of each emitted file.
    digests: BTreeMap<&'static str, String>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<String, Failure> {
    fs::write(path, bytes).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let flags = Overrides {
        t_min: a.t_min,
        t_max: a.t_max,
        dt: a.dt,
        out_dir: a.out_dir,
        seed: a.seed,
        ..a.model.overrides()
    };
    let file = match &a.config {
        Some(p) => Overrides::from_file(p).map_err(config_error)?,
        None => Overrides::default(),
    };
    let cfg = flags.or(file).resolve().map_err(config_error)?;
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| config_error(format!("cannot create {}: {e}", cfg.out_dir.display())))?;

    let start = Instant::now();
    let records = sweep(&cfg.sweep).map_err(config_error)?;
    let summary = verify(&records).map_err(config_error)?;
    let duration = start.elapsed().as_secs_f64();

    let mut csv = Vec::new();
    write_csv(&mut csv, &records).map_err(config_error)?;
    let mut json = serde_json::to_vec_pretty(&SummaryFile {
        summary: &summary,
        records: &records,
    })?;
    json.push(b'\n');

    let mut digests = BTreeMap::new();
    digests.insert("sweep.csv", write_file(&cfg.out_dir.join("sweep.csv"), &csv)?);
    digests.insert("summary.json", write_file(&cfg.out_dir.join("summary.json"), &json)?);
    let manifest = RunManifest {
        tool: "divlab",
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        duration_seconds: duration,
        records: records.len(),
        singular: summary.singular,
        p_failures: summary.p_inequality.fail,
        cp_failures: summary.cp_inequality.fail,
        digests,
    };
    let mut m = serde_json::to_vec_pretty(&manifest)?;
    m.push(b'\n');
    write_file(&cfg.out_dir.join("manifest.json"), &m)?;

    eprintln!(
        "divlab: {} records ({} singular) in {:.1}s; P bound: {} pass / {} fail; CP bound: {} pass / {} fail",
        records.len(),
        summary.singular,
        duration,
        summary.p_inequality.pass,
        summary.p_inequality.fail,
        summary.cp_inequality.pass,
        summary.cp_inequality.fail,
    );
    if summary.all_pass() {
        Ok(())
    } else {
        Err(Failure(
            EXIT_VIOLATION,
            format!(
                "bound violated at t = {:?} (P) and t = {:?} (CP)",
                summary.p_inequality.failures, summary.cp_inequality.failures
            ),
        ))
    }
}

fn cmd_probe(a: ProbeArgs) -> Result<(), Failure> {
    let cfg = a.model.overrides().resolve().map_err(config_error)?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(config_error(format!("t = {} must be >= 0", a.t)));
    }
    let s = &cfg.sweep;
    let p = s.params().map_err(config_error)?;
    let family = s.family().map_err(config_error)?;
    let rec = measure_record(&p, &family, a.t, s.tau, &s.opt).map_err(config_error)?;
    let mut out = serde_json::to_string_pretty(&VerdictRecord::from_measures(rec))?;
    out.push('\n');
    to_stdout(out.as_bytes())
}

fn cmd_gamma(a: GammaArgs) -> Result<(), Failure> {
    let p = JCParams::new(a.gamma0, a.lambda).map_err(config_error)?;
    let grid = SweepConfig {
        t_min: a.t_min,
        t_max: a.t_max,
        dt: a.dt,
        ..SweepConfig::default()
    };
    if !(a.t_min >= 0.0 && a.t_max >= a.t_min && a.dt > 0.0 && a.t_max.is_finite()) {
        return Err(config_error(format!(
            "need 0 <= t_min <= t_max and dt > 0, got t_min = {}, t_max = {}, dt = {}",
            a.t_min, a.t_max, a.dt
        )));
    }
    let mut out = String::from("t,gamma,G\n");
    for t in grid.times() {
        let gamma = decay_rate(t, &p).map(format_g12).unwrap_or_default();
        out.push_str(&format!("{},{gamma},{}\n", format_g12(t), format_g12(decay_amplitude(t, &p))));
    }
    match a.out {
        Some(path) => {
            write_file(&path, out.as_bytes())?;
        }
        None => to_stdout(out.as_bytes())?,
    }
    Ok(())
}

/// A closed downstream pipe is not an error.
fn to_stdout(bytes: &[u8]) -> Result<(), Failure> {
    match std::io::stdout().write_all(bytes) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
