//! Subcommand bodies. Each returns the process exit code on success.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use halfspace::geometry::{self, UnitVector};
use halfspace::learner::{OracleAnswer, PoolSource, StopReason};
use halfspace::stats;
use halfspace::synthetic::{self, Dataset};
use halfspace::warmstart::{self, WarmStartConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, GridPoint};
use crate::metrics::{MetricsRow, OrderedCsv};
use crate::run::{self, RunOutput};
use crate::{exit, CliError, WORKERS_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DataFormat {
    Text,
    Binary,
}

fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            writeln!(std::io::stdout().lock(), "{text}")?;
            Ok(())
        }
    }
}

/// `<file>.config.toml` next to a single-file output.
fn dump_config_beside(out: &Path, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.toml");
    fs::write(PathBuf::from(name), cfg.to_toml())?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct Timestamps {
    started_unix_ms: u128,
    finished_unix_ms: u128,
    runs: Vec<RunTiming>,
}

#[derive(Debug, Clone, Serialize)]
struct RunTiming {
    point: usize,
    repeat: usize,
    wall_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerateSummary {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub flip_rate: f64,
}

pub fn cmd_generate(
    cfg: &ExperimentConfig,
    n: usize,
    format: DataFormat,
    out: &Path,
) -> Result<GenerateSummary, CliError> {
    if n == 0 {
        return Err(CliError::InvalidConfig("n must be positive".into()));
    }
    let spec = cfg.instance.instance(cfg.seed)?;
    let ds = synthetic::sample_batch(&spec, n);
    let flips = ds.iter().filter(|(x, y)| synthetic::clean_label(spec.target.as_slice(), x) != *y).count();
    let mut w = BufWriter::new(File::create(out)?);
    match format {
        DataFormat::Text => synthetic::write_text(&ds, cfg.seed, &mut w)?,
        DataFormat::Binary => synthetic::write_binary(&ds, &mut w)?,
    }
    w.flush()?;
    dump_config_beside(out, cfg)?;
    Ok(GenerateSummary { dim: ds.dim(), n, seed: cfg.seed, flip_rate: flips as f64 / n as f64 })
}

/// Reads either dataset format, sniffing the binary magic.
pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(b"THSD1") {
        Ok(synthetic::read_binary(bytes.as_slice())?)
    } else {
        Ok(synthetic::read_text(BufReader::new(bytes.as_slice()))?.0)
    }
}

/// Parses "a,b,c" (or whitespace separated) into a unit vector; a
/// non-unit input is normalized with a warning on stderr.
pub fn parse_direction(text: &str, dim: usize) -> Result<UnitVector, CliError> {
    let vals: Result<Vec<f64>, _> =
        text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse::<f64>).collect();
    let vals = vals.map_err(|e| CliError::Usage(format!("malformed vector {text:?}: {e}")))?;
    if vals.len() != dim {
        return Err(CliError::Usage(format!("vector has {} entries, data has dimension {dim}", vals.len())));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!("non-finite entry in {text:?}")));
    }
    let n = geometry::norm(&vals);
    if (n - 1.0).abs() > 1e-9 {
        eprintln!("warning: direction has norm {n}, normalizing");
    }
    UnitVector::normalize(vals).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub certified: bool,
    pub w: UnitVector,
    pub n_train: usize,
    pub n_holdout: usize,
    pub certificate: Option<halfspace::learner::Certificate>,
}

/// Certifies `w` on `data` (or on a fresh sample of `n` from the config's
/// instance). Exit 0 with a witness, 3 on an honest failure.
pub fn cmd_certify(
    cfg: &ExperimentConfig,
    data: Option<&Path>,
    n: usize,
    w_text: &str,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let ds = match data {
        Some(p) => read_dataset(p)?,
        None => {
            if n == 0 {
                return Err(CliError::InvalidConfig("n must be positive".into()));
            }
            synthetic::sample_batch(&cfg.instance.instance(cfg.seed)?, n)
        }
    };
    let mut icfg = cfg.instance.clone();
    icfg.dim = ds.dim();
    if matches!(icfg.target, crate::config::TargetConfig::Explicit(_)) {
        icfg.target = Default::default();
    }
    let w = parse_direction(w_text, ds.dim())?;
    let spec = icfg.instance(cfg.seed)?;
    let params = synthetic::well_behaved_params(&spec.marginal)?;
    let n_train = ds.len() * 2 / 3;
    let n_holdout = ds.len() - n_train;
    if n_train == 0 || n_holdout == 0 {
        return Err(CliError::InvalidConfig("dataset too small to split".into()));
    }
    let mut source = PoolSource::new(ds.slice(0..n_train), ds.slice(n_train..ds.len()), Dataset::with_dim(ds.dim()));
    let mut oracle = run::build_oracle(cfg, &spec, &params, cfg.seed, n_train, n_holdout);
    let answer = oracle.query(&w, cfg.learner.epsilon, cfg.learner.delta, &mut source)?;
    let certificate = match answer {
        OracleAnswer::Refuted(c) => Some(c),
        OracleAnswer::Fail => None,
    };
    let report = CertifyReport { certified: certificate.is_some(), w, n_train, n_holdout, certificate };
    emit_json(out, &report)?;
    if let Some(p) = out {
        dump_config_beside(p, cfg)?;
    }
    Ok(if report.certified { exit::OK } else { exit::FAIL })
}

#[derive(Debug, Clone, Serialize)]
pub struct WarmStartReport {
    pub ok: bool,
    pub w: UnitVector,
    pub result: Option<warmstart::WarmStartResult>,
    pub error: Option<String>,
    /// ⟨v, (w*)^{⊥_w}⟩ against the instance's ground truth.
    pub correlation: Option<f64>,
}

pub fn cmd_warmstart(
    cfg: &ExperimentConfig,
    n: usize,
    w_text: Option<&str>,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let family = cfg.instance.family()?;
    if !family.is_log_concave() {
        return Err(CliError::InvalidConfig(format!("{family:?} is not log-concave")));
    }
    if n == 0 {
        return Err(CliError::InvalidConfig("n must be positive".into()));
    }
    let spec = cfg.instance.instance(cfg.seed)?;
    let w = match w_text {
        Some(t) => parse_direction(t, spec.dim())?,
        None => UnitVector::basis(spec.dim(), 0)?,
    };
    let samples = synthetic::sample_batch(&spec, n);
    let wcfg = WarmStartConfig::new(spec.noise.alpha, spec.noise.big_a, cfg.learner.epsilon, cfg.seed);
    let perp = geometry::orth_component(&spec.target, &w).ok();
    let report = match warmstart::warm_start(&samples, &w, &wcfg) {
        Ok(r) => {
            let correlation = perp.as_ref().map(|p| r.v.dot(p.as_slice()));
            WarmStartReport { ok: true, w, result: Some(r), error: None, correlation }
        }
        Err(e) => WarmStartReport { ok: false, w, result: None, error: Some(e.to_string()), correlation: None },
    };
    emit_json(out, &report)?;
    if let Some(p) = out {
        dump_config_beside(p, cfg)?;
    }
    Ok(if report.ok { exit::OK } else { exit::FAIL })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelFile {
    pub w: UnitVector,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub config_hash: String,
}

fn suffix(repeats: usize, r: usize) -> String {
    if repeats == 1 {
        String::new()
    } else {
        format!("_{r}")
    }
}

/// Runs every repeat, writing model, trace, metrics, effective config and
/// the timing sidecar under `output_dir`.
pub fn cmd_learn(cfg: &ExperimentConfig) -> Result<(i32, Vec<MetricsRow>), CliError> {
    cfg.validate()?;
    let started = unix_ms();
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("effective_config.toml"), cfg.to_toml())?;
    let hash = cfg.hash();
    let mut csv = OrderedCsv::create(&dir.join("metrics.csv"))?;
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut code = exit::OK;
    for r in 0..cfg.repeats {
        let sfx = suffix(cfg.repeats, r);
        let mut trace_out = BufWriter::new(File::create(dir.join(format!("trace{sfx}.jsonl")))?);
        let mut io_err = None;
        let result = run::run_once(cfg, 0, r, &mut |rec| {
            let line = serde_json::to_string(rec).map_err(std::io::Error::other);
            let res = line.and_then(|l| writeln!(trace_out, "{l}")).and_then(|_| trace_out.flush());
            if let Err(e) = res {
                io_err.get_or_insert(e);
            }
        });
        trace_out.flush()?;
        if let Some(e) = io_err {
            return Err(e.into());
        }
        let RunOutput { w, trace, row, wall_ms } = result?;
        if trace.stop_reason == StopReason::ContractViolation {
            eprintln!("repeat {r}: certificate failed re-validation on the loss batch");
            code = exit::CONTRACT;
        }
        let model = ModelFile {
            w,
            epsilon: cfg.learner.epsilon,
            delta: cfg.learner.delta,
            seed: row.seed,
            config_hash: hash.clone(),
        };
        write_json(&dir.join(format!("model{sfx}.json")), &model)?;
        csv.submit(r, row.clone())?;
        timings.push(RunTiming { point: 0, repeat: r, wall_ms });
        rows.push(row);
    }
    write_json(
        &dir.join("timestamps.json"),
        &Timestamps { started_unix_ms: started, finished_unix_ms: unix_ms(), runs: timings },
    )?;
    Ok((code, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummaryRow {
    pub point: usize,
    pub alpha: Option<f64>,
    pub big_a: Option<f64>,
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub runs: usize,
    pub median_final_angle: f64,
    pub median_final_01_error: f64,
}

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// One row per (grid point × repeat) in metrics.csv, plus per-point medians
/// in summary.csv.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepSummaryRow>, CliError> {
    cfg.validate()?;
    let grid = cfg.sweep.as_ref().ok_or_else(|| CliError::InvalidConfig("config has no [sweep] table".into()))?;
    let points = grid.points()?;
    let configs: Vec<ExperimentConfig> = points.iter().map(|p| cfg.at(p)).collect();
    for c in &configs {
        c.validate()?;
    }
    let started = unix_ms();
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("effective_config.toml"), cfg.to_toml())?;
    let mut csv = OrderedCsv::create(&dir.join("metrics.csv"))?;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..cfg.repeats).map(move |r| (p, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<(usize, Result<(MetricsRow, u128), CliError>)>();
    let mut rows: Vec<Option<MetricsRow>> = vec![None; jobs.len()];
    let mut timings = Vec::new();
    let mut first_err = None;
    std::thread::scope(|s| {
        let configs = &configs;
        let jobs = &jobs;
        let pool = &pool;
        s.spawn(move || {
            pool.install(|| {
                jobs.par_iter().enumerate().for_each_with(tx, |tx, (i, &(p, r))| {
                    let out = run::run_once(&configs[p], p, r, &mut |_| {}).map(|o| (o.row, o.wall_ms));
                    let _ = tx.send((i, out));
                });
            });
        });
        for (i, out) in rx {
            match out {
                Ok((row, ms)) => {
                    timings.push(RunTiming { point: row.point, repeat: row.repeat, wall_ms: ms });
                    if let Err(e) = csv.submit(i, row.clone()) {
                        first_err.get_or_insert(e);
                    }
                    rows[i] = Some(row);
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
    });
    if let Some(e) = first_err {
        return Err(e);
    }
    timings.sort_by_key(|t| (t.point, t.repeat));
    write_json(
        &dir.join("timestamps.json"),
        &Timestamps { started_unix_ms: started, finished_unix_ms: unix_ms(), runs: timings },
    )?;
    let rows: Vec<MetricsRow> = rows.into_iter().flatten().collect();
    let summary = summarize(&points, &rows);
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for s in &summary {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(summary)
}

pub fn summarize(points: &[GridPoint], rows: &[MetricsRow]) -> Vec<SweepSummaryRow> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let angles: Vec<f64> = rows.iter().filter(|r| r.point == i).map(|r| r.final_angle).collect();
            let errs: Vec<f64> = rows.iter().filter(|r| r.point == i).map(|r| r.final_01_error).collect();
            SweepSummaryRow {
                point: i,
                alpha: p.alpha,
                big_a: p.big_a,
                dim: p.dim,
                n: p.n,
                epsilon: p.epsilon,
                runs: angles.len(),
                median_final_angle: stats::median(&angles).unwrap_or(f64::NAN),
                median_final_01_error: stats::median(&errs).unwrap_or(f64::NAN),
            }
        })
        .collect()
}
