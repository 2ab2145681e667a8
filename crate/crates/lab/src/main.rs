use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use wigner_lab::report::{verdict_lines, Format};
use wigner_lab::runner::{self, THREADS_ENV};
use wigner_lab::{load_config, suite_filter, validation_config, Loaded, Verdict};

#[derive(Parser)]
#[command(name = "wigner-lab", version, about = "Deformed Wigner matrix experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment config, resuming from existing records.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = THREADS_ENV, default_value_t = default_threads())]
        threads: usize,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Deterministic numerical checks of the analytic identities.
    Validate {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = THREADS_ENV, default_value_t = default_threads())]
        threads: usize,
    },
    /// Re-evaluate a results directory.
    Report {
        dir: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Fmt>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Appendix,
    Hs,
    Blocks,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Csv,
    Json,
    Svg,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn print_verdicts(v: &[Verdict]) -> bool {
    for line in verdict_lines(v) {
        println!("{line}");
    }
    v.iter().all(Verdict::passed)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    match Cli::parse().cmd {
        Cmd::Run { config, out, threads, seed } => {
            let mut loaded: Loaded = load_config(&config)?;
            if let Some(s) = seed {
                loaded.config.master_seed = s;
            }
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let dir = runner::output_dir(&loaded.config, out);
            let bundle = runner::run_to_dir(&loaded, &dir, threads)?;
            println!("results: {}", dir.display());
            Ok(print_verdicts(&bundle.manifest.verdicts))
        }
        Cmd::Validate { suite, seed, threads } => {
            let cfg = validation_config(seed);
            let records = runner::execute(&cfg, threads)?;
            let bundle = wigner_lab::report::build_report(&cfg, records, 0.0, Vec::new());
            let name = match suite {
                Suite::Appendix => "appendix",
                Suite::Hs => "hs",
                Suite::Blocks => "blocks",
                Suite::All => "all",
            };
            Ok(print_verdicts(&suite_filter(&bundle.manifest.verdicts, name)))
        }
        Cmd::Report { dir, format } => {
            let formats: Vec<Format> = match format {
                None => Format::ALL.to_vec(),
                Some(Fmt::Csv) => vec![Format::Csv],
                Some(Fmt::Json) => vec![Format::Json],
                Some(Fmt::Svg) => vec![Format::Svg],
            };
            let bundle = runner::report_dir(&dir, &formats)?;
            Ok(print_verdicts(&bundle.manifest.verdicts))
        }
    }
}
