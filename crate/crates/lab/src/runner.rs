//! Trial scheduling, persistence and resumption.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Loaded};
use crate::experiments::{run_trial, Context};
use crate::record::{read_records, write_sorted, RecordSink, TrialRecord, RECORDS_FILE};
use crate::report::{build_report, emit, Format, Manifest, ReportBundle, MANIFEST_FILE};

pub const CONFIG_FILE: &str = "config.json";
pub const THREADS_ENV: &str = "WIGNER_LAB_THREADS";

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .context("building thread pool")
}

fn keys(config: &ExperimentConfig) -> Vec<(usize, u64)> {
    config
        .dims()
        .into_iter()
        .flat_map(|n| (0..config.trials as u64).map(move |t| (n, t)))
        .collect()
}

/// Runs every trial in memory; the result is sorted by `(N, trial)` and
/// does not depend on `threads`.
pub fn execute(config: &ExperimentConfig, threads: usize) -> Result<Vec<TrialRecord>> {
    let ctx = Context::new(config.clone())?;
    let todo = keys(config);
    let mut out: Vec<TrialRecord> =
        pool(threads)?.install(|| todo.par_iter().map(|&(n, t)| run_trial(&ctx, n, t)).collect());
    out.sort_by_key(TrialRecord::key);
    Ok(out)
}

/// Runs `loaded.config` into `dir`, resuming from any records already there.
pub fn run_to_dir(loaded: &Loaded, dir: &Path, threads: usize) -> Result<ReportBundle> {
    let config = &loaded.config;
    let start = Instant::now();
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let cfg_path = dir.join(CONFIG_FILE);
    let canonical = config.canonical_json();
    if cfg_path.exists() {
        let prev = std::fs::read_to_string(&cfg_path)?;
        let prev: ExperimentConfig =
            serde_json::from_str(&prev).with_context(|| format!("reading {}", cfg_path.display()))?;
        if prev.hash() != config.hash() {
            bail!(
                "{} holds results for a different config (hash {}); choose another --out",
                dir.display(),
                prev.hash()
            );
        }
    } else {
        std::fs::write(&cfg_path, format!("{canonical}\n"))?;
    }

    let rec_path = dir.join(RECORDS_FILE);
    let mut done = read_records(&rec_path)?;
    let todo: Vec<(usize, u64)> = keys(config).into_iter().filter(|k| !done.contains_key(k)).collect();
    if !todo.is_empty() {
        let ctx = Context::new(config.clone())?;
        let sink = Mutex::new(RecordSink::open(&rec_path)?);
        let fresh: Vec<TrialRecord> = pool(threads)?.install(|| {
            todo.par_iter()
                .map(|&(n, t)| {
                    let r = run_trial(&ctx, n, t);
                    sink.lock().expect("record sink").push(&r).map(|_| r)
                })
                .collect::<std::io::Result<_>>()
        })?;
        for r in fresh {
            done.entry(r.key()).or_insert(r);
        }
    }
    // Drop keys outside the current plan (none in practice) and normalize order.
    let wanted: BTreeMap<_, _> = keys(config)
        .into_iter()
        .filter_map(|k| done.remove(&k).map(|r| (k, r)))
        .collect();
    write_sorted(&rec_path, &wanted)?;

    let records: Vec<TrialRecord> = wanted.into_values().collect();
    let mut bundle = build_report(config, records, start.elapsed().as_secs_f64(), loaded.warnings.clone());
    emit(&mut bundle, dir, &Format::ALL)?;
    Ok(bundle)
}

/// Re-evaluates a results directory and writes the requested formats.
/// The manifest keeps the wall time of the run that produced the records.
pub fn report_dir(dir: &Path, formats: &[Format]) -> Result<ReportBundle> {
    let cfg_path = dir.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&cfg_path).with_context(|| format!("reading {}", cfg_path.display()))?;
    let loaded = crate::config::parse_config(&text)?;
    let prev: Option<Manifest> = std::fs::read_to_string(dir.join(MANIFEST_FILE))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok());
    let wall = prev.map(|m| m.wall_time_seconds).unwrap_or(0.0);
    let records: Vec<TrialRecord> = read_records(&dir.join(RECORDS_FILE))?.into_values().collect();
    let mut bundle = build_report(&loaded.config, records, wall, loaded.warnings);
    emit(&mut bundle, dir, formats)?;
    Ok(bundle)
}

/// `--out`, then the config's `output_dir`, then `results/<experiment>-<hash prefix>`.
pub fn output_dir(config: &ExperimentConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(format!("{}-{}", config.experiment.name(), &config.hash()[..12])))
}
