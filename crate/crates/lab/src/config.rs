use std::fmt;
use std::path::{Path, PathBuf};

use deformed_wigner::ensemble::{
    build_deformation, resolve_entry_law, DeformationMode, EntryLaw, LawKind, RowProfile, Spike, WignerSpec,
    WindowOverride, DEFAULT_MAX_N,
};
use deformed_wigner::funcalc::TestFunction;
use deformed_wigner::rng::{stream, Purpose};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "semicircle")]
    Semicircle,
    #[serde(rename = "outlier_location")]
    OutlierLocation,
    #[serde(rename = "tightness")]
    Tightness,
    #[serde(rename = "caseA_law")]
    CaseALaw,
    #[serde(rename = "caseA1_law")]
    CaseA1Law,
    #[serde(rename = "caseB_law")]
    CaseBLaw,
    #[serde(rename = "prop1_reduction")]
    Prop1Reduction,
    #[serde(rename = "det_characterization")]
    DetCharacterization,
    #[serde(rename = "bilinear_variance")]
    BilinearVariance,
    #[serde(rename = "zeta_bound")]
    ZetaBound,
    #[serde(rename = "local_l2")]
    LocalL2,
    #[serde(rename = "validators")]
    Validators,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Semicircle => "semicircle",
            Experiment::OutlierLocation => "outlier_location",
            Experiment::Tightness => "tightness",
            Experiment::CaseALaw => "caseA_law",
            Experiment::CaseA1Law => "caseA1_law",
            Experiment::CaseBLaw => "caseB_law",
            Experiment::Prop1Reduction => "prop1_reduction",
            Experiment::DetCharacterization => "det_characterization",
            Experiment::BilinearVariance => "bilinear_variance",
            Experiment::ZetaBound => "zeta_bound",
            Experiment::LocalL2 => "local_l2",
            Experiment::Validators => "validators",
        }
    }

    /// Experiments whose trials look at the outliers of `M`.
    pub fn uses_outliers(self) -> bool {
        matches!(
            self,
            Experiment::OutlierLocation
                | Experiment::Tightness
                | Experiment::CaseALaw
                | Experiment::CaseA1Law
                | Experiment::CaseBLaw
                | Experiment::Prop1Reduction
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailComponent {
    pub weight: f64,
    pub law: LawKind,
}

/// Per-position laws on the leading `size × size` corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub size: usize,
    /// Row-major, `size²` entries; only the upper triangle is used.
    pub laws: Vec<LawKind>,
    /// One mixture per window row for the entries to the right of the window.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_tails: Vec<Vec<TailComponent>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default = "default_beta")]
    pub beta: u8,
    #[serde(default = "default_law")]
    pub offdiag: LawKind,
    /// Defaults to a real Gaussian of variance `2σ²` (β = 1) or `σ²` (β = 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<LawKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowConfig>,
}

fn default_beta() -> u8 {
    1
}

fn default_law() -> LawKind {
    LawKind::gaussian(1.0)
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            beta: 1,
            offdiag: default_law(),
            diag: None,
            window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationConfig {
    #[serde(default)]
    pub spikes: Vec<Spike>,
    #[serde(default = "default_layout")]
    pub layout: DeformationMode,
}

fn default_layout() -> DeformationMode {
    DeformationMode::CanonicalLocalized { block: None }
}

impl Default for DeformationConfig {
    fn default() -> Self {
        Self {
            spikes: Vec::new(),
            layout: default_layout(),
        }
    }
}

/// Acceptance thresholds. Unset entries take the experiment's default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iqr_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_eig: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_mid: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoupling: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_independence: Option<f64>,
}

impl Thresholds {
    fn fields(&self) -> [(&'static str, Option<f64>); 16] {
        [
            ("ks", self.ks),
            ("variance_rel", self.variance_rel),
            ("location_tol", self.location_tol),
            ("edge_tol", self.edge_tol),
            ("iqr_ratio", self.iqr_ratio),
            ("variance_ratio", self.variance_ratio),
            ("bias_factor", self.bias_factor),
            ("det_eig", self.det_eig),
            ("det_mid", self.det_mid),
            ("frequency", self.frequency),
            ("decoupling", self.decoupling),
            ("identity", self.identity),
            ("derivative", self.derivative),
            ("block_factor", self.block_factor),
            ("hs_error", self.hs_error),
            ("hs_independence", self.hs_independence),
        ]
    }

    /// Thresholds with every unset entry filled from the defaults of `e`.
    pub fn resolved(&self, e: Experiment) -> Resolved {
        let ks = match e {
            Experiment::Semicircle => 0.03,
            Experiment::LocalL2 => 0.1,
            _ => 0.08,
        };
        Resolved {
            ks: self.ks.unwrap_or(ks),
            variance_rel: self.variance_rel.unwrap_or(0.2),
            location_tol: self.location_tol.unwrap_or(0.05),
            edge_tol: self.edge_tol.unwrap_or(0.1),
            iqr_ratio: self.iqr_ratio.unwrap_or(2.0),
            variance_ratio: self.variance_ratio.unwrap_or(3.0),
            bias_factor: self.bias_factor.unwrap_or(5.0),
            det_eig: self.det_eig.unwrap_or(1e-8),
            det_mid: self.det_mid.unwrap_or(1e-4),
            frequency: self.frequency.unwrap_or(0.95),
            decoupling: self.decoupling.unwrap_or(1e-12),
            identity: self.identity.unwrap_or(1e-10),
            derivative: self.derivative.unwrap_or(1e-6),
            block_factor: self.block_factor.unwrap_or(2.0),
            hs_error: self.hs_error.unwrap_or(1e-3),
            hs_independence: self.hs_independence.unwrap_or(2.0),
        }
    }
}

/// [`Thresholds`] after defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub ks: f64,
    pub variance_rel: f64,
    pub location_tol: f64,
    pub edge_tol: f64,
    pub iqr_ratio: f64,
    pub variance_ratio: f64,
    pub bias_factor: f64,
    pub det_eig: f64,
    pub det_mid: f64,
    pub frequency: f64,
    pub decoupling: f64,
    pub identity: f64,
    pub derivative: f64,
    pub block_factor: f64,
    pub hs_error: f64,
    pub hs_independence: f64,
}

/// Experiment-specific parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Evaluation point for `local_l2` (default 2.5σ).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    /// Window offset for `zeta_bound` (default σ/4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Test function for `bilinear_variance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<TestFunction>,
    /// `u_k ∝ ratio^k` for `local_l2` (default 0.5).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Truncation `K` of the limiting field for `local_l2` (default 12).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Number of draws from the limit law used as reference sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_draws: Option<usize>,
    /// Dimension of the functional-calculus comparison in `validators`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_dim: Option<usize>,
}

impl Params {
    pub fn test_function(&self) -> TestFunction {
        self.test_function
            .clone()
            .unwrap_or_else(|| TestFunction::poly_bump(0.5, 1.5, 6))
    }

    pub fn limit_draws(&self, e: Experiment) -> usize {
        self.limit_draws
            .unwrap_or(if e == Experiment::LocalL2 { 20_000 } else { 50_000 })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio.unwrap_or(0.5)
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(12)
    }

    pub fn hs_dim(&self) -> usize {
        self.hs_dim.unwrap_or(50)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub deformation: DeformationConfig,
    pub n_list: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid field `{field}`: {message}")]
    Schema { field: String, message: String },
}

impl ConfigError {
    /// Dotted path of the offending field, when known.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Io { .. } => None,
            ConfigError::Parse { field, .. } | ConfigError::Schema { field, .. } => Some(field),
        }
    }
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

/// Entry laws after resolution, shared by every trial.
#[derive(Clone, Debug)]
pub struct ResolvedEnsemble {
    pub beta: u8,
    pub offdiag: EntryLaw,
    pub diag: EntryLaw,
    pub window: Option<WindowOverride>,
}

impl ResolvedEnsemble {
    pub fn sigma(&self) -> f64 {
        self.offdiag.variance.sqrt()
    }

    pub fn spec(&self, n: usize) -> WignerSpec {
        let mut s = WignerSpec::new(n, self.beta, self.offdiag.clone()).with_diag(self.diag.clone());
        if let Some(w) = &self.window {
            s = s.with_window(w.clone());
        }
        s
    }
}

fn law_at(kind: &LawKind, beta: u8, field: &str) -> Result<EntryLaw, ConfigError> {
    resolve_entry_law(kind, beta).map_err(|e| schema(field, e.to_string()))
}

impl EnsembleConfig {
    pub fn resolve(&self) -> Result<ResolvedEnsemble, ConfigError> {
        if self.beta != 1 && self.beta != 2 {
            return Err(schema("ensemble.beta", format!("must be 1 or 2, got {}", self.beta)));
        }
        let offdiag = law_at(&self.offdiag, self.beta, "ensemble.offdiag")?;
        if !(offdiag.variance > 0.0) {
            return Err(schema("ensemble.offdiag", "variance must be positive"));
        }
        let diag = match &self.diag {
            Some(k) => law_at(k, 1, "ensemble.diag")?,
            None => WignerSpec::new(1, self.beta, offdiag.clone()).diag,
        };
        let window = match &self.window {
            None => None,
            Some(w) => {
                if w.size == 0 {
                    return Err(schema("ensemble.window.size", "must be positive"));
                }
                if w.laws.len() != w.size * w.size {
                    return Err(schema(
                        "ensemble.window.laws",
                        format!("needs {} entries, got {}", w.size * w.size, w.laws.len()),
                    ));
                }
                let mut laws = Vec::with_capacity(w.laws.len());
                for (p, k) in w.laws.iter().enumerate() {
                    let beta = if p / w.size == p % w.size { 1 } else { self.beta };
                    laws.push(law_at(k, beta, &format!("ensemble.window.laws[{p}]"))?);
                }
                if !w.row_tails.is_empty() && w.row_tails.len() != w.size {
                    return Err(schema(
                        "ensemble.window.row_tails",
                        format!("needs {} rows, got {}", w.size, w.row_tails.len()),
                    ));
                }
                let mut row_tails = Vec::new();
                for (i, row) in w.row_tails.iter().enumerate() {
                    if row.is_empty() {
                        return Err(schema(format!("ensemble.window.row_tails[{i}]"), "empty mixture"));
                    }
                    let mut components = Vec::new();
                    for (c, t) in row.iter().enumerate() {
                        let field = format!("ensemble.window.row_tails[{i}][{c}]");
                        if !(t.weight > 0.0 && t.weight.is_finite()) {
                            return Err(schema(format!("{field}.weight"), "must be positive"));
                        }
                        components.push((t.weight, law_at(&t.law, self.beta, &format!("{field}.law"))?));
                    }
                    row_tails.push(RowProfile { components });
                }
                Some(WindowOverride {
                    size: w.size,
                    laws,
                    row_tails,
                })
            }
        };
        let r = ResolvedEnsemble {
            beta: self.beta,
            offdiag,
            diag,
            window,
        };
        // Variance and mode checks live in the sampler spec.
        let n = r.window.as_ref().map_or(1, |w| w.size);
        r.spec(n).validate().map_err(|e| schema("ensemble", e.to_string()))?;
        Ok(r)
    }
}

/// A validated configuration together with its advisory warnings.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

/// Reads and validates a JSON config.
pub fn load_config(path: &Path) -> Result<Loaded, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Loaded, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ConfigError::Parse {
            field: if field.is_empty() { ".".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })?;
    let warnings = config.validate()?;
    Ok(Loaded { config, warnings })
}

impl ExperimentConfig {
    /// Minimal config with default ensemble, deformation and thresholds.
    pub fn new(experiment: Experiment, n_list: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        Self {
            experiment,
            ensemble: EnsembleConfig::default(),
            deformation: DeformationConfig::default(),
            n_list,
            trials,
            master_seed,
            thresholds: Thresholds::default(),
            params: Params::default(),
            output_dir: None,
        }
    }

    pub fn thresholds(&self) -> Resolved {
        self.thresholds.resolved(self.experiment)
    }

    /// Sorted distinct dimensions.
    pub fn dims(&self) -> Vec<usize> {
        let mut v = self.n_list.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Canonical JSON (sorted keys, no output directory).
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let v = serde_json::to_value(&c).expect("config serializes");
        serde_json::to_string(&v).expect("value serializes")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        let d = Sha256::digest(self.canonical_json().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks the schema and returns warnings about violated hypotheses.
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = Vec::new();
        let e = self.experiment;
        if self.n_list.is_empty() {
            return Err(schema("n_list", "must list at least one dimension"));
        }
        for (i, &n) in self.n_list.iter().enumerate() {
            if n < 2 || n > DEFAULT_MAX_N {
                return Err(schema(format!("n_list[{i}]"), format!("must lie in [2, {DEFAULT_MAX_N}], got {n}")));
            }
        }
        for (name, v) in self.thresholds.fields() {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(schema(format!("thresholds.{name}"), format!("must be positive, got {v}")));
                }
            }
        }
        let ens = self.ensemble.resolve()?;
        let sigma = ens.sigma();
        for (i, s) in self.deformation.spikes.iter().enumerate() {
            if !(s.theta.is_finite() && s.theta != 0.0) {
                return Err(schema(
                    format!("deformation.spikes[{i}].theta"),
                    format!("must be finite and nonzero, got {}", s.theta),
                ));
            }
            if s.multiplicity == 0 {
                return Err(schema(format!("deformation.spikes[{i}].multiplicity"), "must be at least 1"));
            }
        }
        let distinct = self.dims().len();
        let need_dims = match e {
            Experiment::Tightness | Experiment::BilinearVariance => 2,
            Experiment::Prop1Reduction => 3,
            _ => 1,
        };
        if distinct < need_dims {
            return Err(schema("n_list", format!("{e} needs at least {need_dims} distinct dimensions")));
        }
        let supercritical = self.deformation.spikes.iter().any(|s| s.theta > sigma);
        let needs_spikes = e.uses_outliers() && e != Experiment::OutlierLocation
            || matches!(e, Experiment::DetCharacterization | Experiment::ZetaBound);
        if needs_spikes && self.deformation.spikes.is_empty() {
            return Err(schema("deformation.spikes", format!("{e} needs at least one spike")));
        }
        if matches!(
            e,
            Experiment::Tightness
                | Experiment::CaseALaw
                | Experiment::CaseA1Law
                | Experiment::CaseBLaw
                | Experiment::Prop1Reduction
        ) && !supercritical
        {
            return Err(schema("deformation.spikes", format!("{e} needs a spike with θ > σ = {sigma}")));
        }
        if matches!(e, Experiment::CaseALaw | Experiment::CaseA1Law)
            && !matches!(self.deformation.layout, DeformationMode::CanonicalLocalized { .. })
        {
            return Err(schema("deformation.layout", format!("{e} needs canonical_localized eigenvectors")));
        }
        if e == Experiment::CaseA1Law {
            let size = match &ens.window {
                None => return Err(schema("ensemble.window", "caseA1_law needs per-position laws")),
                Some(w) => w.size,
            };
            let rows = match &self.deformation.layout {
                DeformationMode::CanonicalLocalized { block: Some(b) } => b.len(),
                _ => self.deformation.spikes.iter().map(|s| s.multiplicity).sum(),
            };
            if size < rows {
                return Err(schema(
                    "ensemble.window.size",
                    format!("must cover the {rows} coordinates carrying the spikes"),
                ));
            }
        }
        if e == Experiment::LocalL2 {
            let x = self.params.point.unwrap_or(2.5 * sigma);
            if !(x > 2.0 * sigma) {
                return Err(schema("params.point", format!("must exceed 2σ = {}", 2.0 * sigma)));
            }
            let r = self.params.ratio();
            if !(r > 0.0 && r < 1.0) {
                return Err(schema("params.ratio", "must lie in (0, 1)"));
            }
            if self.params.truncation() == 0 {
                return Err(schema("params.truncation", "must be positive"));
            }
        }
        if let Some(d) = self.params.delta {
            if !(d > 0.0) {
                return Err(schema("params.delta", "must be positive"));
            }
        }
        if let Some(f) = &self.params.test_function {
            f.validate().map_err(|err| schema("params.test_function", err.to_string()))?;
        }
        if self.params.limit_draws == Some(0) {
            return Err(schema("params.limit_draws", "must be positive"));
        }
        if !self.deformation.spikes.is_empty() {
            // Building U at the largest N catches layout errors up front.
            let n = *self.dims().last().expect("nonempty");
            let d = build_deformation(
                &self.deformation.spikes,
                &self.deformation.layout,
                n,
                &mut stream(self.master_seed, 0, Purpose::Deformation),
            )
            .map_err(|err| schema("deformation", err.to_string()))?;
            if e == Experiment::CaseBLaw {
                let k = d.span_count_above(sigma);
                if k as f64 >= (n as f64).sqrt() {
                    warnings.push(format!(
                        "k = o(√N) hypothesis violated: the supercritical eigenvectors span {k} coordinates at N = {n}"
                    ));
                }
            }
        }
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_semicircle_config() {
        let l = parse_config(r#"{"experiment": "semicircle", "n_list": [500], "trials": 1}"#).unwrap();
        assert_eq!(l.config.experiment, Experiment::Semicircle);
        assert!(l.warnings.is_empty());
        assert_eq!(l.config.thresholds().ks, 0.03);
    }

    #[test]
    fn zero_spike_points_at_the_field() {
        let e = parse_config(
            r#"{"experiment": "outlier_location", "n_list": [50], "trials": 1,
                "deformation": {"spikes": [{"theta": 0.0}]}}"#,
        )
        .unwrap_err();
        assert_eq!(e.field(), Some("deformation.spikes[0].theta"));
    }

    #[test]
    fn unknown_experiment_and_fields() {
        let e = parse_config(r#"{"experiment": "nope", "n_list": [5], "trials": 1}"#).unwrap_err();
        assert_eq!(e.field(), Some("experiment"));
        let e = parse_config(r#"{"experiment": "semicircle", "n_list": [5], "trials": 1, "extra": 1}"#).unwrap_err();
        assert!(matches!(e, ConfigError::Parse { .. }));
        let e = parse_config(r#"{"experiment": "semicircle", "n_list": [5]}"#).unwrap_err();
        assert!(e.to_string().contains("trials"));
    }

    #[test]
    fn thresholds_must_be_positive() {
        let e = parse_config(r#"{"experiment": "semicircle", "n_list": [5], "trials": 1, "thresholds": {"ks": -1}}"#)
            .unwrap_err();
        assert_eq!(e.field(), Some("thresholds.ks"));
    }

    #[test]
    fn hash_ignores_output_dir_and_key_order() {
        let a = parse_config(r#"{"experiment": "semicircle", "n_list": [5], "trials": 1, "master_seed": 3}"#).unwrap();
        let b = parse_config(r#"{"master_seed": 3, "trials": 1, "n_list": [5], "experiment": "semicircle", "output_dir": "x"}"#)
            .unwrap();
        assert_eq!(a.config.hash(), b.config.hash());
        assert_eq!(a.config.hash().len(), 64);
    }
}
