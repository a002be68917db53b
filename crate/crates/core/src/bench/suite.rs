use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plants::{random_plant, PlantSpec};
use crate::error::{Error, Result};
use crate::estimators::{estimate, grid_mab_estimate, EstimatorConfig, Method};
use crate::oracle::{FreqQuerySession, NoiseModel, QuerySession};
use crate::rng;
use crate::signals::{hinf_norm, Field, FirFilter};

pub const RECORDS_HEADER: [&str; 9] = [
    "plant_id",
    "noise_id",
    "method",
    "estimate",
    "truth",
    "rel_error",
    "queries",
    "wall_ms",
    "flags",
];
const TRUTH_TOL: f64 = 1e-10;

fn one() -> f64 {
    1.0
}

fn real_field() -> Field {
    Field::Real
}

fn default_parallelism() -> usize {
    1
}

/// Benchmark configuration; the JSON config file mirrors it field for field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// `||u||_2 / sigma`; the noise level is `sigma = M / snr`.
    pub snr: f64,
    pub budget: usize,
    pub plant_length: usize,
    pub data_length: usize,
    pub decay: f64,
    pub n_plants: usize,
    pub n_noise_per_plant: usize,
    pub methods: Vec<EstimatorConfig>,
    pub master_seed: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default = "one")]
    pub input_cap: f64,
    #[serde(default = "real_field")]
    pub field: Field,
}

impl SuiteConfig {
    /// The reference protocol: `r = 10`, `r' = 50`, `N = 200`, 100 plants
    /// with 10 noise instances each, and the four time-domain estimators.
    pub fn paper_default(snr: f64, decay: f64) -> Self {
        Self {
            snr,
            budget: 200,
            plant_length: 10,
            data_length: 50,
            decay,
            n_plants: 100,
            n_noise_per_plant: 10,
            methods: vec![
                EstimatorConfig::new(Method::Plugin),
                EstimatorConfig::power_a(),
                EstimatorConfig::power_b(),
                EstimatorConfig::wts(),
            ],
            master_seed: 0,
            parallelism: 8,
            input_cap: 1.0,
            field: Field::Real,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.input_cap / self.snr
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("budget", self.budget),
            ("plant_length", self.plant_length),
            ("data_length", self.data_length),
            ("n_plants", self.n_plants),
            ("n_noise_per_plant", self.n_noise_per_plant),
            ("parallelism", self.parallelism),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if self.data_length < self.plant_length {
            return Err(Error::invalid(
                "data_length",
                "must be at least plant_length",
            ));
        }
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return Err(Error::invalid("snr", "must be positive and finite"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::invalid("decay", "must lie in (0, 1]"));
        }
        if !(self.input_cap > 0.0) || !self.input_cap.is_finite() {
            return Err(Error::invalid("input_cap", "must be positive and finite"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "need at least one method"));
        }
        let mut labels: Vec<String> = self.methods.iter().map(|m| m.label()).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("methods", "method labels must be distinct"));
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }

    pub fn from_json_reader<R: Read>(reader: R) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(reader)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Keeps only the methods whose label or variant name is listed.
    pub fn retain_methods(&mut self, names: &[String]) -> Result<()> {
        let unknown: Vec<&String> = names
            .iter()
            .filter(|n| {
                !self
                    .methods
                    .iter()
                    .any(|m| &m.label() == *n || m.variant.name() == n.as_str())
            })
            .collect();
        if !unknown.is_empty() {
            return Err(Error::invalid(
                "methods",
                format!("not in the config: {unknown:?}"),
            ));
        }
        self.methods.retain(|m| {
            names
                .iter()
                .any(|n| *n == m.label() || n == m.variant.name())
        });
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub plant_id: usize,
    pub noise_id: usize,
    pub method: String,
    pub estimate: f64,
    pub truth: f64,
    /// `|estimate - truth| / truth`; NaN for failed runs.
    pub rel_error: f64,
    pub queries: usize,
    pub wall_ms: f64,
    pub flags: Vec<String>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with("error:"))
    }
}

/// `seed = hash(master_seed, plant_id, noise_id, method_name)`.
pub fn session_seed(master: u64, plant_id: usize, noise_id: usize, method: &str) -> u64 {
    rng::derive_seed(&[
        master,
        plant_id as u64,
        noise_id as u64,
        rng::hash_str(method),
    ])
}

pub fn plant_seed(master: u64, plant_id: usize) -> u64 {
    rng::derive_seed(&[master, 0x706c_616e_74, plant_id as u64])
}

fn run_one(
    cfg: &SuiteConfig,
    plant: &FirFilter,
    truth: f64,
    plant_id: usize,
    noise_id: usize,
    method: &EstimatorConfig,
) -> RunRecord {
    let label = method.label();
    let seed = session_seed(cfg.master_seed, plant_id, noise_id, &label);
    let mut est_cfg = method
        .clone()
        .with_seed(rng::derive_seed(&[seed, 0x6573_74]));
    if est_cfg.variant == Method::Plugin && est_cfg.model_order.is_none() {
        est_cfg.model_order = Some(cfg.plant_length);
    }
    if est_cfg.variant == Method::Wts && est_cfg.cyclic_prefix.is_none() {
        est_cfg.cyclic_prefix = Some(cfg.plant_length - 1);
    }
    let start = Instant::now();
    let result = if est_cfg.variant == Method::GridMab {
        // Unit-amplitude sinusoid queries see noise sigma / M.
        FreqQuerySession::new(
            plant.clone(),
            cfg.budget - cfg.budget % 2,
            cfg.sigma() / cfg.input_cap,
            seed,
        )
        .and_then(|mut s| grid_mab_estimate(&mut s, &est_cfg))
    } else {
        QuerySession::new(
            plant.clone(),
            cfg.data_length,
            cfg.input_cap,
            cfg.budget,
            NoiseModel {
                sigma: cfg.sigma(),
                field: cfg.field,
            },
            seed,
        )
        .and_then(|mut s| estimate(&mut s, &est_cfg))
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(trace) => RunRecord {
            plant_id,
            noise_id,
            method: label,
            estimate: trace.final_estimate,
            truth,
            rel_error: (trace.final_estimate - truth).abs() / truth,
            queries: trace.queries_used,
            wall_ms,
            flags: trace.flags,
        },
        Err(e) => RunRecord {
            plant_id,
            noise_id,
            method: label,
            estimate: f64::NAN,
            truth,
            rel_error: f64::NAN,
            queries: 0,
            wall_ms,
            flags: vec![format!("error:{e}")],
        },
    }
}

/// Runs every `(plant, noise instance, method)` triple on a pool of
/// `cfg.parallelism` threads. Records come back sorted by
/// `(plant_id, noise_id, method)` and do not depend on the thread count.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::invalid("parallelism", e.to_string()))?;
    pool.install(|| {
        let plants = (0..cfg.n_plants)
            .into_par_iter()
            .map(|p| {
                let g = random_plant(&PlantSpec {
                    r: cfg.plant_length,
                    decay: cfg.decay,
                    seed: plant_seed(cfg.master_seed, p),
                })?;
                let truth = hinf_norm(&g, TRUTH_TOL)?.value;
                Ok((g, truth))
            })
            .collect::<Result<Vec<_>>>()?;
        let tasks: Vec<(usize, usize, usize)> = (0..cfg.n_plants)
            .flat_map(|p| {
                (0..cfg.n_noise_per_plant)
                    .flat_map(move |n| (0..cfg.methods.len()).map(move |m| (p, n, m)))
            })
            .collect();
        let mut records: Vec<RunRecord> = tasks
            .par_iter()
            .map(|&(p, n, m)| run_one(cfg, &plants[p].0, plants[p].1, p, n, &cfg.methods[m]))
            .collect();
        records.sort_by(|a, b| {
            (a.plant_id, a.noise_id, &a.method).cmp(&(b.plant_id, b.noise_id, &b.method))
        });
        Ok(records)
    })
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes the records CSV. Unless `timing` is set the `wall_ms` column is 0,
/// which keeps the file byte-identical across runs.
pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record([
            r.plant_id.to_string(),
            r.noise_id.to_string(),
            r.method.clone(),
            format_sig(r.estimate),
            format_sig(r.truth),
            format_sig(r.rel_error),
            r.queries.to_string(),
            if timing {
                format_sig(r.wall_ms)
            } else {
                "0".into()
            },
            r.flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct CsvRow {
    plant_id: usize,
    noise_id: usize,
    method: String,
    estimate: f64,
    truth: f64,
    rel_error: f64,
    queries: usize,
    wall_ms: f64,
    flags: String,
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RECORDS_HEADER) {
        return Err(Error::invalid(
            "records",
            format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        ));
    }
    rdr.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(RunRecord {
                plant_id: row.plant_id,
                noise_id: row.noise_id,
                method: row.method,
                estimate: row.estimate,
                truth: row.truth,
                rel_error: row.rel_error,
                queries: row.queries,
                wall_ms: row.wall_ms,
                flags: row
                    .flags
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub failures: usize,
    pub mean_rel_error: f64,
    pub median_rel_error: f64,
    pub mean_wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    pub records: usize,
    pub methods: Vec<MethodSummary>,
}

pub fn summarize(cfg: &SuiteConfig, records: &[RunRecord]) -> SuiteSummary {
    let methods = cfg
        .methods
        .iter()
        .map(|m| {
            let label = m.label();
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.method == label).collect();
            let mut errs: Vec<f64> = mine
                .iter()
                .map(|r| r.rel_error)
                .filter(|e| e.is_finite())
                .collect();
            errs.sort_by(f64::total_cmp);
            let mean = |v: &[f64]| {
                if v.is_empty() {
                    f64::NAN
                } else {
                    v.iter().sum::<f64>() / v.len() as f64
                }
            };
            let median = if errs.is_empty() {
                f64::NAN
            } else if errs.len() % 2 == 1 {
                errs[errs.len() / 2]
            } else {
                0.5 * (errs[errs.len() / 2 - 1] + errs[errs.len() / 2])
            };
            MethodSummary {
                method: label,
                runs: mine.len(),
                failures: mine.iter().filter(|r| r.failed()).count(),
                mean_rel_error: mean(&errs),
                median_rel_error: median,
                mean_wall_ms: mean(&mine.iter().map(|r| r.wall_ms).collect::<Vec<_>>()),
            }
        })
        .collect();
    SuiteSummary {
        config: cfg.clone(),
        records: records.len(),
        methods,
    }
}
