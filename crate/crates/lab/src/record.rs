use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One eigenvalue of one outlier group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Position of the spike in the configuration.
    pub block: usize,
    /// Index within the group, descending.
    pub eig_index: usize,
    pub lambda: f64,
    pub rho: f64,
    /// `c_θ √N (λ − ρ)`.
    pub scaled_fluct: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop1_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, f64>,
    /// Full spectrum, kept only where the experiment needs it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn key(&self) -> (usize, u64) {
        (self.n, self.trial)
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn aux(&self, name: &str) -> Option<f64> {
        self.aux.get(name).copied()
    }
}

pub const RECORDS_FILE: &str = "records.jsonl";

/// Reads persisted records, keyed by `(N, trial)`. A torn final line from an
/// interrupted run is ignored; the first copy of a duplicated key wins.
pub fn read_records(path: &Path) -> std::io::Result<BTreeMap<(usize, u64), TrialRecord>> {
    let mut out = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Ok(r) = serde_json::from_str::<TrialRecord>(&line) {
            out.entry(r.key()).or_insert(r);
        }
    }
    Ok(out)
}

/// Appends records one line at a time, flushing after each.
pub struct RecordSink {
    file: File,
}

impl RecordSink {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        // Terminate a torn line so the next record starts cleanly.
        let len = file.metadata()?.len();
        if len > 0 {
            let text = std::fs::read(path)?;
            if text.last() != Some(&b'\n') {
                file.write_all(b"\n")?;
            }
        }
        Ok(Self { file })
    }

    pub fn push(&mut self, r: &TrialRecord) -> std::io::Result<()> {
        let mut line = serde_json::to_string(r).map_err(std::io::Error::other)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()
    }
}

/// Rewrites the record file sorted by key, through a temporary file.
pub fn write_sorted(path: &Path, records: &BTreeMap<(usize, u64), TrialRecord>) -> std::io::Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = File::create(&tmp)?;
        for r in records.values() {
            let line = serde_json::to_string(r).map_err(std::io::Error::other)?;
            writeln!(f, "{line}")?;
        }
        f.sync_all()?;
    }
    std::fs::rename(tmp, path)
}
