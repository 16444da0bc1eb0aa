//! Batch front end: index building, neighbor precomputation, retrieval
//! runs, μ sweeps, evaluation and run comparison.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod topics;

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use config::{ExperimentConfig, FileConfig, ModelSection, OutputSection, PathsSection, RunSection};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "wetlm",
    version,
    about = "Language-model retrieval experiments"
)]
pub struct Cli {
    /// TOML experiment file; flags override its values.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,

    /// More log output (repeat for debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest a TREC collection and write an index snapshot.
    BuildIndex,
    /// Load embeddings, compute neighbor lists and report coverage.
    EmbedPrep,
    /// Rank all queries with one model and write a run file.
    Search,
    /// Evaluate every model over the μ grid.
    Sweep,
    /// Compute MAP and P@k of a run file.
    Eval {
        /// Run file (defaults to the configured run output).
        run: Option<PathBuf>,
    },
    /// Paired t-test over per-query AP of two runs.
    Compare { run_a: PathBuf, run_b: PathBuf },
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub collection: Option<PathBuf>,
    #[arg(long, global = true)]
    pub snapshot: Option<PathBuf>,
    #[arg(long, global = true)]
    pub queries: Option<PathBuf>,
    #[arg(long, global = true)]
    pub qrels: Option<PathBuf>,
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// Stop-list file, `builtin` or `none`.
    #[arg(long, global = true)]
    pub stoplist: Option<String>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub neighbor_cache: Option<PathBuf>,
    /// Model kind for `search`.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Comma-separated model kinds for `sweep`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Comma-separated μ values for `sweep`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub mu_grid: Option<Vec<f64>>,
    /// Cosine threshold T.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// `piecewise` or `mixture`.
    #[arg(long, global = true)]
    pub fallback: Option<String>,
    /// Run file written by `search`.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Tab-separated table written by `sweep`, `eval` and `compare`.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    /// Directory for the per-μ run files of `sweep`.
    #[arg(long, global = true)]
    pub runs_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub run_tag: Option<String>,
    /// Omit the `#` provenance line from run files.
    #[arg(long, global = true)]
    pub no_header: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub significance: Option<f64>,
    /// Precision cutoff k.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
}

impl Overrides {
    fn to_file_config(&self) -> FileConfig {
        let o = self;
        FileConfig {
            paths: PathsSection {
                collection: o.collection.clone(),
                snapshot: o.snapshot.clone(),
                queries: o.queries.clone(),
                qrels: o.qrels.clone(),
                embeddings: o.embeddings.clone(),
                stoplist: o.stoplist.clone(),
                cache_dir: o.cache_dir.clone(),
                neighbor_cache: o.neighbor_cache.clone(),
            },
            model: ModelSection {
                kind: o.model.clone(),
                kinds: o.models.clone(),
                mu: o.mu,
                mu_grid: o.mu_grid.clone(),
                threshold: o.threshold,
                alpha: o.alpha,
                top_k: o.top_k,
                fallback: o.fallback.clone(),
            },
            output: OutputSection {
                run: o.output.clone(),
                table: o.table.clone(),
                runs_dir: o.runs_dir.clone(),
                run_tag: o.run_tag.clone(),
                header: o.no_header.then_some(false),
            },
            run: RunSection {
                workers: o.workers,
                significance: o.significance,
                cutoff: o.cutoff,
            },
        }
    }
}

/// Resolves the configuration from the optional file and the flags.
pub fn resolve_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let base = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    ExperimentConfig::resolve(base.merge(&cli.overrides.to_file_config()))
}

/// Runs one command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let cfg = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Other(e.into()))?;
    // Output is buffered so the command can run inside the pool.
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| {
        let out = &mut buf;
        match &cli.command {
            Command::BuildIndex => commands::cmd_build_index(&cfg, out).map(drop),
            Command::EmbedPrep => commands::cmd_embed_prep(&cfg, out).map(drop),
            Command::Search => commands::cmd_search(&cfg, out).map(drop),
            Command::Sweep => commands::cmd_sweep(&cfg, out).map(drop),
            Command::Eval { run } => commands::cmd_eval(&cfg, run.as_deref(), out).map(drop),
            Command::Compare { run_a, run_b } => {
                commands::cmd_compare(&cfg, run_a, run_b, out).map(drop)
            }
        }
    });
    out.write_all(&buf)
        .and_then(|()| out.flush())
        .map_err(|e| CliError::Other(anyhow::Error::new(e).context("writing output")))?;
    result
}
