//! Experiment configuration: a TOML file merged with command-line
//! overrides, then resolved against defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wetlm_core::ranking::{DEFAULT_ALPHA, DEFAULT_THRESHOLD, DEFAULT_TOP_K};
use wetlm_core::{ModelKind, ModelParams, SmoothingFallback, StopList};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;

/// The μ grid 12, 16, ..., 88.
pub fn default_mu_grid() -> Vec<f64> {
    (12..=88).step_by(4).map(f64::from).collect()
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub collection: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    /// A file path, `builtin` (default) or `none`.
    pub stoplist: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub neighbor_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kind: Option<String>,
    /// Models evaluated by `sweep`.
    pub kinds: Option<Vec<String>>,
    pub mu: Option<f64>,
    pub mu_grid: Option<Vec<f64>>,
    pub threshold: Option<f64>,
    pub alpha: Option<f64>,
    pub top_k: Option<usize>,
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub run: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub runs_dir: Option<PathBuf>,
    pub run_tag: Option<String>,
    pub header: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// 0 means one worker per core.
    pub workers: Option<usize>,
    pub significance: Option<f64>,
    pub cutoff: Option<usize>,
}

/// The declarative file, also used as the shape of flag overrides.
#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub paths: PathsSection,
    pub model: ModelSection,
    pub output: OutputSection,
    pub run: RunSection,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.rebase(dir);
        }
        Ok(cfg)
    }

    /// Makes relative paths relative to `dir`.
    fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(x) = p.as_mut() {
                if x.is_relative() {
                    *x = dir.join(&*x);
                }
            }
        };
        let p = &mut self.paths;
        for slot in [
            &mut p.collection,
            &mut p.snapshot,
            &mut p.queries,
            &mut p.qrels,
            &mut p.embeddings,
            &mut p.cache_dir,
            &mut p.neighbor_cache,
        ] {
            fix(slot);
        }
        if let Some(s) = p.stoplist.as_mut() {
            if s != "builtin" && s != "none" && Path::new(s).is_relative() {
                *s = dir.join(&*s).to_string_lossy().into_owned();
            }
        }
        for slot in [
            &mut self.output.run,
            &mut self.output.table,
            &mut self.output.runs_dir,
        ] {
            fix(slot);
        }
    }

    /// Values set in `top` win.
    pub fn merge(mut self, top: &FileConfig) -> Self {
        overlay!(self.paths, top.paths; collection, snapshot, queries, qrels, embeddings, stoplist, cache_dir, neighbor_cache);
        overlay!(self.model, top.model; kind, kinds, mu, mu_grid, threshold, alpha, top_k, fallback);
        if top.model.kind.is_some() && top.model.kinds.is_none() {
            // A single overriding kind replaces any list from the file.
            self.model.kinds = None;
        }
        overlay!(self.output, top.output; run, table, runs_dir, run_tag, header);
        overlay!(self.run, top.run; workers, significance, cutoff);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StoplistSource {
    Builtin,
    None,
    File(PathBuf),
}

impl StoplistSource {
    pub fn load(&self) -> CliResult<StopList> {
        match self {
            StoplistSource::Builtin => Ok(StopList::english()),
            StoplistSource::None => Ok(StopList::empty()),
            StoplistSource::File(p) => {
                let f = std::fs::File::open(p)
                    .map_err(|e| CliError::config(format!("stop list {}: {e}", p.display())))?;
                StopList::read(std::io::BufReader::new(f)).map_err(|e| {
                    CliError::Input(
                        anyhow::Error::new(e).context(format!("reading {}", p.display())),
                    )
                })
            }
        }
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub collection: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub stoplist: StoplistSource,
    pub cache_dir: PathBuf,
    pub neighbor_cache: Option<PathBuf>,
    pub kinds: Vec<String>,
    pub mu: Option<f64>,
    pub mu_grid: Vec<f64>,
    pub threshold: f64,
    pub alpha: f64,
    pub top_k: usize,
    pub fallback: String,
    pub run_out: Option<PathBuf>,
    pub table_out: Option<PathBuf>,
    pub runs_dir: Option<PathBuf>,
    pub run_tag: Option<String>,
    pub header: bool,
    pub workers: usize,
    pub significance: f64,
    pub cutoff: usize,
    #[serde(skip)]
    model_kinds: Vec<ModelKind>,
    #[serde(skip)]
    smoothing: SmoothingFallback,
}

fn parse_kind(s: &str) -> CliResult<ModelKind> {
    s.parse::<ModelKind>()
        .map_err(|e| CliError::config(e.to_string()))
}

impl ExperimentConfig {
    pub fn resolve(file: FileConfig) -> CliResult<Self> {
        let FileConfig {
            paths,
            model,
            output,
            run,
        } = file;
        let stoplist = match paths.stoplist.as_deref() {
            None | Some("builtin") => StoplistSource::Builtin,
            Some("none") => StoplistSource::None,
            Some(p) => StoplistSource::File(PathBuf::from(p)),
        };
        let kind_names = match (&model.kinds, &model.kind) {
            (Some(ks), _) if !ks.is_empty() => ks.clone(),
            (_, Some(k)) => vec![k.clone()],
            _ => vec![ModelKind::DirichletSum.name().to_owned()],
        };
        let model_kinds = kind_names
            .iter()
            .map(|k| parse_kind(k))
            .collect::<CliResult<Vec<_>>>()?;
        let fallback_name = model
            .fallback
            .unwrap_or_else(|| SmoothingFallback::default().to_string());
        let smoothing = fallback_name
            .parse::<SmoothingFallback>()
            .map_err(|e| CliError::config(e.to_string()))?;
        let cfg = ExperimentConfig {
            collection: paths.collection,
            snapshot: paths.snapshot,
            queries: paths.queries,
            qrels: paths.qrels,
            embeddings: paths.embeddings,
            stoplist,
            cache_dir: paths.cache_dir.unwrap_or_else(|| PathBuf::from(".")),
            neighbor_cache: paths.neighbor_cache,
            kinds: model_kinds.iter().map(|k| k.name().to_owned()).collect(),
            mu: model.mu,
            mu_grid: model.mu_grid.unwrap_or_else(default_mu_grid),
            threshold: model.threshold.unwrap_or(DEFAULT_THRESHOLD),
            alpha: model.alpha.unwrap_or(DEFAULT_ALPHA),
            top_k: model.top_k.unwrap_or(DEFAULT_TOP_K),
            fallback: smoothing.to_string(),
            run_out: output.run,
            table_out: output.table,
            runs_dir: output.runs_dir,
            run_tag: output.run_tag,
            header: output.header.unwrap_or(true),
            workers: run.workers.unwrap_or(0),
            significance: run.significance.unwrap_or(DEFAULT_SIGNIFICANCE),
            cutoff: run.cutoff.unwrap_or(wetlm_core::evaluation::DEFAULT_CUTOFF),
            model_kinds,
            smoothing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        if self.mu_grid.is_empty() {
            return Err(CliError::config("mu grid is empty"));
        }
        if let Some(bad) = self.mu_grid.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(CliError::config(format!(
                "mu grid values must be positive, got {bad}"
            )));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(CliError::config(format!(
                "significance threshold must lie in (0, 1), got {}",
                self.significance
            )));
        }
        if self.cutoff == 0 {
            return Err(CliError::config("precision cutoff must be positive"));
        }
        // Threshold and α are checked even when no selected model uses them.
        let mu = self.mu.unwrap_or(self.mu_grid[0]);
        for &kind in self.model_kinds.iter().chain([&ModelKind::WetlmAlpha]) {
            self.params(kind, mu).validate()?;
        }
        Ok(())
    }

    /// The single μ used by `search`.
    pub fn require_mu(&self) -> CliResult<f64> {
        self.mu
            .ok_or_else(|| CliError::config("no mu configured (set model.mu or --mu)"))
    }

    pub fn model_kinds(&self) -> &[ModelKind] {
        &self.model_kinds
    }

    /// The single model for commands that run one.
    pub fn single_kind(&self) -> CliResult<ModelKind> {
        match self.model_kinds.as_slice() {
            [k] => Ok(*k),
            ks => Err(CliError::config(format!(
                "expected exactly one model kind, got {}",
                ks.len()
            ))),
        }
    }

    pub fn params(&self, kind: ModelKind, mu: f64) -> ModelParams<f64> {
        ModelParams::new(kind, mu)
            .with_threshold(self.threshold)
            .with_alpha(self.alpha)
            .with_top_k(self.top_k)
            .with_fallback(self.smoothing)
    }

    /// Returns `path` if it was configured and exists.
    pub fn require_input<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> CliResult<&'a Path> {
        let p = path
            .as_deref()
            .ok_or_else(|| CliError::config(format!("no {what} path configured")))?;
        if !p.exists() {
            return Err(CliError::config(format!(
                "{what} {} does not exist",
                p.display()
            )));
        }
        Ok(p)
    }

    pub fn require_output<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> CliResult<&'a Path> {
        path.as_deref()
            .ok_or_else(|| CliError::config(format!("no {what} path configured")))
    }

    /// One-line JSON rendering for run-file headers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
