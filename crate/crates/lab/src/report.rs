use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::evaluate::{evaluate, Status, SummaryRow, Verdict};
use crate::plot::Plot;
use crate::record::TrialRecord;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRIALS_FILE: &str = "trials.csv";
pub const CSV_HEADER: &str = "trial,N,seed,block,eig_index,lambda,rho,scaled_fluct,prop1_residual";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub versions: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    pub trials_requested: usize,
    pub trials_completed: usize,
    pub failure_count: usize,
    pub warnings: Vec<String>,
    pub verdicts: Vec<Verdict>,
    /// Paths relative to the results directory.
    pub artifacts: Vec<String>,
}

impl Manifest {
    /// True iff every verdict is PASS or SKIPPED.
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(Verdict::passed)
    }
}

#[derive(Clone, Debug)]
pub struct ReportBundle {
    pub manifest: Manifest,
    pub summaries: Vec<SummaryRow>,
    pub plots: Vec<(String, Plot)>,
    /// Sorted by `(N, trial)`.
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Svg];
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("deformed-wigner".to_string(), deformed_wigner::VERSION.to_string()),
        ("wigner-lab".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ])
}

pub fn build_report(
    config: &ExperimentConfig,
    mut records: Vec<TrialRecord>,
    wall_time_seconds: f64,
    warnings: Vec<String>,
) -> ReportBundle {
    records.sort_by_key(TrialRecord::key);
    let ev = evaluate(config, &records);
    let failure_count = records.iter().filter(|r| !r.ok()).count();
    let manifest = Manifest {
        experiment: config.experiment.name().to_string(),
        config_hash: config.hash(),
        config: serde_json::from_str(&config.canonical_json()).expect("canonical JSON parses"),
        versions: versions(),
        wall_time_seconds,
        trials_requested: config.trials * config.dims().len(),
        trials_completed: records.len(),
        failure_count,
        warnings,
        verdicts: ev.verdicts,
        artifacts: Vec::new(),
    };
    ReportBundle {
        manifest,
        summaries: ev.summaries,
        plots: ev.plots,
        records,
    }
}

/// 17 significant digits with `.` as decimal separator.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        if r.rows.is_empty() {
            let _ = writeln!(s, "{},{},{},,,,,,", r.trial, r.n, r.seed);
        }
        for row in &r.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.trial,
                r.n,
                r.seed,
                row.block,
                row.eig_index,
                fmt17(row.lambda),
                fmt17(row.rho),
                fmt17(row.scaled_fluct),
                row.prop1_residual.map(fmt17).unwrap_or_default()
            );
        }
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(
        "N,quantity,count,mean,variance,se_mean,se_variance,q05,q25,q50,q75,q95,mean_ci_lo,mean_ci_hi,variance_ci_lo,variance_ci_hi\n",
    );
    for r in rows {
        let st = &r.stats;
        let mut vals = vec![st.mean, st.variance, st.se_mean, st.se_variance];
        vals.extend(st.quantiles);
        vals.extend([st.mean_ci.lo, st.mean_ci.hi, st.variance_ci.lo, st.variance_ci.hi]);
        let vals: Vec<String> = vals.into_iter().map(fmt17).collect();
        let _ = writeln!(s, "{},{},{},{}", r.n, r.quantity, st.n, vals.join(","));
    }
    s
}

/// Pretty JSON with keys sorted at every level.
pub fn sorted_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

/// Writes the requested artifacts and then `manifest.json`. A report
/// without records gets the manifest only.
pub fn emit(bundle: &mut ReportBundle, dir: &Path, formats: &[Format]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written: Vec<String> = Vec::new();
    let mut put = |rel: String, body: &str| -> std::io::Result<()> {
        let path = dir.join(&rel);
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        std::fs::write(path, body)?;
        written.push(rel);
        Ok(())
    };
    if !bundle.records.is_empty() {
        if formats.contains(&Format::Csv) {
            put(TRIALS_FILE.into(), &trials_csv(&bundle.records))?;
            put("summary.csv".into(), &summary_csv(&bundle.summaries))?;
        }
        if formats.contains(&Format::Json) {
            put("summary.json".into(), &sorted_json(&bundle.summaries))?;
        }
        if formats.contains(&Format::Svg) {
            for (stem, plot) in &bundle.plots {
                put(format!("plots/{stem}.svg"), &plot.to_svg())?;
            }
        }
    }
    written.sort();
    bundle.manifest.artifacts = written.clone();
    std::fs::write(dir.join(MANIFEST_FILE), sorted_json(&bundle.manifest))?;
    let mut out: Vec<PathBuf> = written.iter().map(|r| dir.join(r)).collect();
    out.push(dir.join(MANIFEST_FILE));
    Ok(out)
}

/// One `PASS`/`FAIL`/`SKIPPED` line per verdict.
pub fn verdict_lines(verdicts: &[Verdict]) -> Vec<String> {
    verdicts
        .iter()
        .map(|v| format!("{:<7} {}: {}", v.status.label(), v.name, v.detail))
        .collect()
}

pub fn count_status(verdicts: &[Verdict], s: Status) -> usize {
    verdicts.iter().filter(|v| v.status == s).count()
}
