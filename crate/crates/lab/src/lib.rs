//! Experiment runner for deformed Wigner matrices: configuration, trials,
//! statistical verdicts and report artifacts.

pub mod checks;
pub mod config;
pub mod evaluate;
pub mod experiments;
pub mod plot;
pub mod record;
pub mod report;
pub mod runner;

pub use config::{load_config, parse_config, ConfigError, Experiment, ExperimentConfig, Loaded};
pub use evaluate::{Status, Verdict};
pub use report::{Manifest, ReportBundle};

/// Configuration used by `wigner-lab validate`.
pub fn validation_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(Experiment::Validators, vec![20], 20, seed)
}

/// Verdicts belonging to a validation suite (`appendix`, `hs`, `blocks` or `all`).
pub fn suite_filter(verdicts: &[Verdict], suite: &str) -> Vec<Verdict> {
    verdicts
        .iter()
        .filter(|v| suite == "all" || v.name.split('.').next() == Some(suite))
        .cloned()
        .collect()
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/semicircle.md")]
    pub struct Semicircle;
    #[doc = include_str!("../../../book/src/outliers.md")]
    pub struct Outliers;
    #[doc = include_str!("../../../book/src/fluctuations.md")]
    pub struct Fluctuations;
    #[doc = include_str!("../../../book/src/functional-calculus.md")]
    pub struct FunctionalCalculus;
    #[doc = include_str!("../../../book/src/lab.md")]
    pub struct Lab;
}
