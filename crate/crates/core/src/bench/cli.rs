use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::{performance_profile, tau_grid, write_profile_csv};
use super::suite::{read_records_csv, run_suite, summarize, write_records_csv, SuiteConfig};
use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, Method};
use crate::lowerbound::active_certificate;
use crate::oracle::{read_transcript_jsonl, NoiseModel, ReplayOracle};
use crate::signals::{hinf_norm, Field, FirFilter};

#[derive(Parser, Debug)]
#[command(name = "hinf", version, about = "H-infinity norm estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a benchmark suite and write records.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallelism: Option<usize>,
        /// Comma-separated method labels to keep.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Write measured wall times into the records CSV.
        #[arg(long)]
        timing: bool,
    },
    /// Turn a records CSV into performance-profile points.
    Profile {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        tau_max: f64,
        #[arg(long, default_value_t = 101)]
        tau_points: usize,
    },
    /// Active two-point lower-bound certificate as JSON.
    Certify {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
    },
    /// Certified H-infinity norm of a filter given as JSON.
    Truth {
        #[arg(long)]
        filter: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Re-run an estimator against a recorded transcript.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sigma: f64,
        /// Defaults to real when every recorded sample is real.
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        input_cap: Option<f64>,
        /// Plugin model order.
        #[arg(long)]
        model_order: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Entry point of the `hinf` binary. Exit codes: 0 success, 1 usage error,
/// 2 runtime failure.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`cli_main`] with explicit output streams.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn open(path: &Path) -> std::result::Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            out: dir,
            seed,
            parallelism,
            methods,
            timing,
        } => {
            let mut cfg: SuiteConfig = serde_json::from_reader(open(&config)?)
                .map_err(|e| usage(format!("config {}: {e}", config.display())))?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(p) = parallelism {
                cfg.parallelism = p;
            }
            if let Some(names) = methods {
                cfg.retain_methods(&names).map_err(usage)?;
            }
            cfg.validate().map_err(usage)?;
            let records = run_suite(&cfg)?;
            fs::create_dir_all(&dir).map_err(Error::from)?;
            write_records_csv(create(&dir.join("records.csv"))?, &records, timing)?;
            let summary = summarize(&cfg, &records);
            let mut w = create(&dir.join("summary.json"))?;
            serde_json::to_writer_pretty(&mut w, &summary).map_err(Error::from)?;
            w.flush().map_err(Error::from)?;
            writeln!(
                out,
                "{} records written to {}",
                records.len(),
                dir.display()
            )
            .map_err(Error::from)?;
        }
        Command::Profile {
            records,
            out: path,
            tau_max,
            tau_points,
        } => {
            if !(tau_max >= 0.0) || tau_points == 0 {
                return Err(usage("need tau_max >= 0 and tau_points >= 1"));
            }
            let recs = read_records_csv(open(&records)?)?;
            let curves = performance_profile(&recs, &tau_grid(tau_max, tau_points))?;
            write_profile_csv(create(&path)?, &curves)?;
        }
        Command::Certify { r, n, sigma, m } => {
            let cert = active_certificate(r, n, sigma, m).map_err(usage)?;
            serde_json::to_writer_pretty(&mut *out, &cert).map_err(Error::from)?;
            writeln!(out).map_err(Error::from)?;
        }
        Command::Truth { filter, tol } => {
            let spec: FilterFile = serde_json::from_reader(open(&filter)?)
                .map_err(|e| usage(format!("filter {}: {e}", filter.display())))?;
            let g = spec.into_filter().map_err(usage)?;
            let res = hinf_norm(&g, tol)?;
            serde_json::to_writer_pretty(&mut *out, &res).map_err(Error::from)?;
            writeln!(out).map_err(Error::from)?;
        }
        Command::Replay {
            transcript,
            method,
            seed,
            sigma,
            field,
            input_cap,
            model_order,
        } => {
            let variant = Method::parse(&method)
                .filter(|m| *m != Method::GridMab)
                .ok_or_else(|| usage(format!("unknown time-domain method `{method}`")))?;
            let entries = read_transcript_jsonl(open(&transcript)?)?;
            let field = match field.as_deref() {
                Some("real") => Field::Real,
                Some("complex") => Field::Complex,
                Some(other) => {
                    return Err(usage(format!("field must be real or complex, got {other}")))
                }
                None if entries.iter().all(|e| e.u.is_real() && e.y.is_real()) => Field::Real,
                None => Field::Complex,
            };
            let mut oracle = ReplayOracle::new(entries, NoiseModel { sigma, field }, input_cap)?;
            let mut cfg = EstimatorConfig::new(variant).with_seed(seed);
            cfg.model_order = model_order;
            let trace = estimate(&mut oracle, &cfg)?;
            serde_json::to_writer_pretty(&mut *out, &trace).map_err(Error::from)?;
            writeln!(out).map_err(Error::from)?;
        }
    }
    Ok(())
}

/// Filter file: real taps, `[re, im]` pairs, or either under `"coeffs"`.
#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum FilterFile {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
    Wrapped { coeffs: Box<FilterFile> },
}

impl FilterFile {
    fn into_filter(self) -> Result<FirFilter> {
        match self {
            FilterFile::Real(v) => FirFilter::from_real(&v),
            FilterFile::Complex(v) => {
                FirFilter::from_complex(v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
            }
            FilterFile::Wrapped { coeffs } => coeffs.into_filter(),
        }
    }
}
