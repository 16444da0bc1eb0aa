use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde_json::json;
use wetlm_core::ranking::MiTranslation;
use wetlm_core::{
    build_neighbor_index, compare_evaluations, coverage_with, evaluate, ingest_trec,
    load_embeddings, read_neighbor_cache, read_qrels, read_run, read_snapshot,
    write_neighbor_cache, write_run, write_snapshot, Comparison, CoverageReport, DirectIndex,
    EvalError, Evaluation, ModelKind, ModelParams, NeighborIndex, Qrels, Query, Ranker, Ranking,
    RunResult,
};

use crate::cache::{cache_key, default_cache_path, hash_file, hex, neighbor_vocab, vocab_hash};
use crate::config::ExperimentConfig;
use crate::error::{Categorize, CliError, CliResult};
use crate::topics::{parse_topics, to_queries};

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .input(|| format!("opening {}", path.display()))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).other(|| format!("creating {}", dir.display()))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .other(|| format!("creating {}", path.display()))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .other(|| "writing output".to_owned())
}

pub fn load_index(cfg: &ExperimentConfig) -> CliResult<DirectIndex> {
    let path = cfg.require_input(&cfg.snapshot, "index snapshot")?;
    read_snapshot(open(path)?).input(|| format!("reading snapshot {}", path.display()))
}

pub fn load_queries(cfg: &ExperimentConfig) -> CliResult<Vec<Query>> {
    let path = cfg.require_input(&cfg.queries, "queries")?;
    let text = std::fs::read_to_string(path).input(|| format!("reading {}", path.display()))?;
    let topics = parse_topics(&text).input(|| format!("parsing {}", path.display()))?;
    Ok(to_queries(&topics, &cfg.stoplist.load()?))
}

pub fn load_qrels(cfg: &ExperimentConfig) -> CliResult<Qrels> {
    let path = cfg.require_input(&cfg.qrels, "qrels")?;
    read_qrels(open(path)?).input(|| format!("reading qrels {}", path.display()))
}

fn load_run(path: &Path) -> CliResult<RunResult> {
    if !path.exists() {
        return Err(CliError::config(format!(
            "run file {} does not exist",
            path.display()
        )));
    }
    read_run(open(path)?).input(|| format!("reading run {}", path.display()))
}

fn neighbor_cache_path(cfg: &ExperimentConfig, index: &DirectIndex, queries: &[Query]) -> PathBuf {
    cfg.neighbor_cache.clone().unwrap_or_else(|| {
        let vocab = neighbor_vocab(index, queries);
        default_cache_path(&cfg.cache_dir, &vocab_hash(&vocab), cfg.threshold)
    })
}

/// The cache produced by `embed-prep` for this index, query set and T.
pub fn load_neighbors(
    cfg: &ExperimentConfig,
    index: &DirectIndex,
    queries: &[Query],
) -> CliResult<NeighborIndex<f64>> {
    let path = neighbor_cache_path(cfg, index, queries);
    if !path.exists() {
        return Err(CliError::config(format!(
            "no neighbor cache at {} for T={}; run embed-prep first",
            path.display(),
            cfg.threshold
        )));
    }
    let (nbr, _) = read_neighbor_cache::<f64, _>(open(&path)?)
        .input(|| format!("reading {}", path.display()))?;
    if nbr.threshold() != cfg.threshold {
        return Err(CliError::config(format!(
            "neighbor cache {} was built with T={}, configuration asks for T={}",
            path.display(),
            nbr.threshold(),
            cfg.threshold
        )));
    }
    Ok(nbr)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildReport {
    pub documents: usize,
    pub avdl: f64,
    pub vocabulary: usize,
    pub tokens: u64,
    pub snapshot: PathBuf,
}

pub fn cmd_build_index(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<BuildReport> {
    let source = cfg.require_input(&cfg.collection, "collection")?;
    let target = cfg.require_output(&cfg.snapshot, "snapshot")?;
    let stoplist = cfg.stoplist.load()?;
    info!("ingesting {}", source.display());
    let index = ingest_trec(open(source)?, &stoplist)
        .input(|| format!("ingesting {}", source.display()))?;
    let mut w = create(target)?;
    write_snapshot(&index, &mut w).other(|| format!("writing {}", target.display()))?;
    w.flush()
        .other(|| format!("writing {}", target.display()))?;
    let stats = index.stats();
    let report = BuildReport {
        documents: index.doc_count(),
        avdl: stats.avdl(),
        vocabulary: index.vocabulary().len(),
        tokens: stats.total_tokens(),
        snapshot: target.to_owned(),
    };
    emit(
        out,
        &format!(
            "documents   {}\navdl        {:.4}\nvocabulary  {}\ntokens      {}\nsnapshot    {}\n",
            report.documents,
            report.avdl,
            report.vocabulary,
            report.tokens,
            report.snapshot.display()
        ),
    )?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedReport {
    pub cache: PathBuf,
    pub cache_hit: bool,
    pub terms: usize,
    pub mean_neighbors: f64,
    pub coverage: CoverageReport,
}

pub fn cmd_embed_prep(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<EmbedReport> {
    let index = load_index(cfg)?;
    let queries = load_queries(cfg)?;
    let emb_path = cfg.require_input(&cfg.embeddings, "embeddings")?;
    let vocab = neighbor_vocab(&index, &queries);
    let v_hash = vocab_hash(&vocab);
    let e_hash = hash_file(emb_path).input(|| format!("hashing {}", emb_path.display()))?;
    let key = cache_key(&e_hash, &v_hash, cfg.threshold);
    let path = cfg
        .neighbor_cache
        .clone()
        .unwrap_or_else(|| default_cache_path(&cfg.cache_dir, &v_hash, cfg.threshold));

    let cached = if path.exists() {
        match read_neighbor_cache::<f64, _>(open(&path)?) {
            Ok((nbr, k)) if k == key && nbr.threshold() == cfg.threshold => Some(nbr),
            Ok(_) => {
                info!("neighbor cache {} is stale, rebuilding", path.display());
                None
            }
            Err(e) => {
                warn!("ignoring unreadable neighbor cache {}: {e}", path.display());
                None
            }
        }
    } else {
        None
    };
    let cache_hit = cached.is_some();
    let nbr = match cached {
        Some(nbr) => {
            info!(
                "neighbor cache hit for key {}; skipping recomputation",
                &hex(&key)[..16]
            );
            nbr
        }
        None => {
            let filter: HashSet<String> = vocab.iter().cloned().collect();
            info!("loading embeddings from {}", emb_path.display());
            let loaded = load_embeddings::<f64, _>(open(emb_path)?, &filter)
                .input(|| format!("loading {}", emb_path.display()))?;
            info!(
                "read {} vectors, kept {} (zero {}, non-finite {}, duplicate {})",
                loaded.entries_read,
                loaded.table.len(),
                loaded.zero_vectors,
                loaded.non_finite_vectors,
                loaded.duplicates
            );
            info!(
                "computing neighbor lists for {} terms at T={}",
                loaded.table.len(),
                cfg.threshold
            );
            let nbr = build_neighbor_index(
                &loaded.table,
                vocab.iter().map(String::as_str),
                cfg.threshold,
            )?;
            let mut w = create(&path)?;
            write_neighbor_cache(&nbr, &key, &mut w)
                .other(|| format!("writing {}", path.display()))?;
            w.flush().other(|| format!("writing {}", path.display()))?;
            nbr
        }
    };
    let coverage = coverage_with(&index, &queries, |t| nbr.contains(t));
    let total: usize = nbr
        .terms()
        .iter()
        .map(|t| nbr.neighbors(t).map_or(0, <[_]>::len))
        .sum();
    let report = EmbedReport {
        cache: path,
        cache_hit,
        terms: nbr.len(),
        mean_neighbors: if nbr.is_empty() {
            0.0
        } else {
            total as f64 / nbr.len() as f64
        },
        coverage,
    };
    emit(
        out,
        &format!(
            "{}\nneighbor cache: {} ({})\nterms with neighbor lists: {}, mean list length {:.3}\n",
            report.coverage,
            report.cache.display(),
            if cache_hit { "reused" } else { "built" },
            report.terms,
            report.mean_neighbors
        ),
    )?;
    Ok(report)
}

/// Index plus the translation sources the configured models need.
pub struct Engine<'a> {
    index: &'a DirectIndex,
    nbr: Option<&'a NeighborIndex<f64>>,
    mi: Option<MiTranslation<'a, f64>>,
}

impl<'a> Engine<'a> {
    pub fn new(
        index: &'a DirectIndex,
        nbr: Option<&'a NeighborIndex<f64>>,
        kinds: &[ModelKind],
    ) -> Self {
        let mi = kinds
            .contains(&ModelKind::TlmMi)
            .then(|| MiTranslation::new(index));
        Self { index, nbr, mi }
    }

    pub fn rank_all(
        &self,
        queries: &[Query],
        params: ModelParams<f64>,
    ) -> CliResult<Vec<Ranking<f64>>> {
        let ranker = match (&self.mi, params.kind) {
            (Some(mi), ModelKind::TlmMi) => Ranker::with_translation(self.index, params, mi)?,
            _ => Ranker::new(self.index, params, self.nbr)?,
        };
        let rankings: Vec<Ranking<f64>> = queries.par_iter().map(|q| ranker.rank(q)).collect();
        for r in &rankings {
            if let Some(d) = r.diagnostic {
                warn!("query {}: {d}", r.qid);
            }
        }
        Ok(rankings)
    }
}

fn needs_embeddings(kinds: &[ModelKind]) -> bool {
    kinds.iter().any(|k| k.uses_embeddings())
}

fn run_tag(cfg: &ExperimentConfig, kind: ModelKind, mu: f64) -> String {
    cfg.run_tag
        .clone()
        .unwrap_or_else(|| format!("{}-mu{mu}", kind.name()))
}

fn header(cfg: &ExperimentConfig, command: &str, kind: ModelKind, mu: f64) -> Option<String> {
    cfg.header.then(|| {
        let v = json!({ "command": command, "kind": kind.name(), "mu": mu, "config": cfg });
        format!("wetlm {v}")
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub queries: usize,
    pub lines: usize,
    pub degenerate: usize,
    pub run: Option<PathBuf>,
}

pub fn cmd_search(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<SearchReport> {
    let kind = cfg.single_kind()?;
    let mu = cfg.require_mu()?;
    let index = load_index(cfg)?;
    let queries = load_queries(cfg)?;
    let nbr = if kind.uses_embeddings() {
        Some(load_neighbors(cfg, &index, &queries)?)
    } else {
        None
    };
    let engine = Engine::new(&index, nbr.as_ref(), &[kind]);
    let rankings = engine.rank_all(&queries, cfg.params(kind, mu))?;
    let run = RunResult::from_rankings(run_tag(cfg, kind, mu), &rankings);
    let head = header(cfg, "search", kind, mu);
    let report = SearchReport {
        queries: queries.len(),
        lines: run.iter().map(|(_, e)| e.len()).sum(),
        degenerate: rankings.iter().filter(|r| r.diagnostic.is_some()).count(),
        run: cfg.run_out.clone(),
    };
    match &cfg.run_out {
        Some(path) => {
            let mut w = create(path)?;
            write_run(&run, &mut w, head.as_deref())
                .other(|| format!("writing {}", path.display()))?;
            emit(
                out,
                &format!(
                    "{} queries, {} result lines, {} degenerate queries -> {}\n",
                    report.queries,
                    report.lines,
                    report.degenerate,
                    path.display()
                ),
            )?;
        }
        None => write_run(&run, &mut *out, head.as_deref()).other(|| "writing run".to_owned())?,
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub kind: ModelKind,
    pub mu: f64,
    pub map: f64,
    pub precision: f64,
    pub queries: usize,
    /// Highest MAP for this model (first on ties).
    pub best: bool,
}

pub fn sweep_tsv(rows: &[SweepRow], cutoff: usize) -> String {
    let mut s = format!("model\tmu\tmap\tp@{cutoff}\tqueries\tbest\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.kind.name(),
            r.mu,
            r.map,
            r.precision,
            r.queries,
            u8::from(r.best)
        );
    }
    s
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> CliResult<Vec<SweepRow>> {
    let kinds = cfg.model_kinds();
    let index = load_index(cfg)?;
    let queries = load_queries(cfg)?;
    let qrels = load_qrels(cfg)?;
    let nbr = if needs_embeddings(kinds) {
        Some(load_neighbors(cfg, &index, &queries)?)
    } else {
        None
    };
    let engine = Engine::new(&index, nbr.as_ref(), kinds);
    let mut rows = Vec::new();
    for &kind in kinds {
        let first = rows.len();
        for &mu in &cfg.mu_grid {
            let rankings = engine.rank_all(&queries, cfg.params(kind, mu))?;
            let run = RunResult::from_rankings(run_tag(cfg, kind, mu), &rankings);
            if let Some(dir) = &cfg.runs_dir {
                let path = dir.join(format!("{}-mu{mu}.run", kind.name()));
                let mut w = create(&path)?;
                write_run(&run, &mut w, header(cfg, "sweep", kind, mu).as_deref())
                    .other(|| format!("writing {}", path.display()))?;
            }
            let e = evaluate(&run, &qrels, cfg.cutoff)
                .eval(|| format!("{} at mu={mu}", kind.name()))?;
            log::debug!("{} mu={mu}: MAP {:.4}", kind.name(), e.map);
            rows.push(SweepRow {
                kind,
                mu,
                map: e.map,
                precision: e.mean_precision,
                queries: e.queries.len(),
                best: false,
            });
        }
        let best =
            (first..rows.len()).fold(first, |b, i| if rows[i].map > rows[b].map { i } else { b });
        rows[best].best = true;
    }

    let mut table = format!(
        "{:<18} {:>8} {:>8} {:>8}\n",
        "model",
        "mu",
        "MAP",
        format!("P@{}", cfg.cutoff)
    );
    for r in &rows {
        let _ = writeln!(
            table,
            "{:<18} {:>8} {:>8.4} {:>8.4}{}",
            r.kind.name(),
            r.mu,
            r.map,
            r.precision,
            if r.best { "  *best" } else { "" }
        );
    }
    emit(out, &table)?;
    if let Some(path) = &cfg.table_out {
        std::fs::write(path, sweep_tsv(&rows, cfg.cutoff))
            .other(|| format!("writing {}", path.display()))?;
    }
    Ok(rows)
}

pub fn eval_tsv(e: &Evaluation) -> String {
    let mut s = format!("qid\tap\tp@{}\n", e.cutoff);
    for q in &e.queries {
        let _ = writeln!(s, "{}\t{}\t{}", q.qid, q.ap, q.precision);
    }
    let _ = writeln!(s, "all\t{}\t{}", e.map, e.mean_precision);
    s
}

pub fn cmd_eval(
    cfg: &ExperimentConfig,
    run_path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult<Evaluation> {
    let path = match run_path {
        Some(p) => p.to_owned(),
        None => cfg.require_output(&cfg.run_out, "run file")?.to_owned(),
    };
    let run = load_run(&path)?;
    let qrels = load_qrels(cfg)?;
    let e = evaluate(&run, &qrels, cfg.cutoff).eval(|| format!("evaluating {}", path.display()))?;
    let mut text = format!(
        "{:<16} {:>8} {:>8}\n",
        "qid",
        "AP",
        format!("P@{}", e.cutoff)
    );
    for q in &e.queries {
        let _ = writeln!(text, "{:<16} {:>8.4} {:>8.4}", q.qid, q.ap, q.precision);
    }
    let _ = writeln!(
        text,
        "{:<16} {:>8.4} {:>8.4}",
        "all", e.map, e.mean_precision
    );
    if !e.excluded.is_empty() {
        let _ = writeln!(
            text,
            "excluded (no relevant documents): {}",
            e.excluded.join(", ")
        );
    }
    emit(out, &text)?;
    if let Some(p) = &cfg.table_out {
        std::fs::write(p, eval_tsv(&e)).other(|| format!("writing {}", p.display()))?;
    }
    Ok(e)
}

pub fn cmd_compare(
    cfg: &ExperimentConfig,
    a: &Path,
    b: &Path,
    out: &mut dyn Write,
) -> CliResult<Comparison> {
    let run_a = load_run(a)?;
    let run_b = load_run(b)?;
    let qrels = load_qrels(cfg)?;
    let qa: HashSet<&str> = run_a.qids().collect();
    let qb: HashSet<&str> = run_b.qids().collect();
    if qa != qb {
        let mut only_a: Vec<String> = qa.difference(&qb).map(|s| s.to_string()).collect();
        let mut only_b: Vec<String> = qb.difference(&qa).map(|s| s.to_string()).collect();
        only_a.sort();
        only_b.sort();
        return Err(CliError::Eval(
            EvalError::QueryMismatch { only_a, only_b }.into(),
        ));
    }
    let ea = evaluate(&run_a, &qrels, cfg.cutoff).eval(|| format!("evaluating {}", a.display()))?;
    let eb = evaluate(&run_b, &qrels, cfg.cutoff).eval(|| format!("evaluating {}", b.display()))?;
    let c = compare_evaluations(&ea, &eb).eval(|| "pairing per-query AP".to_owned())?;

    let mut text = format!("{:<16} {:>8} {:>8} {:>9}\n", "qid", "AP(A)", "AP(B)", "A-B");
    for (q, x, y) in &c.pairs {
        let _ = writeln!(text, "{q:<16} {x:>8.4} {y:>8.4} {:>+9.4}", x - y);
    }
    let t = &c.test;
    let verdict = if t.significant(cfg.significance) {
        "significant"
    } else {
        "not significant"
    };
    let _ = writeln!(
        text,
        "MAP A {:.4}  MAP B {:.4}  delta {:+.4}\nt = {:.4}  df = {}  p = {:.5}{}\n{verdict} at p < {}",
        c.map_a,
        c.map_b,
        c.map_delta(),
        t.t,
        t.df,
        t.p,
        if t.degenerate { "  (all differences equal)" } else { "" },
        cfg.significance
    );
    emit(out, &text)?;
    if let Some(p) = &cfg.table_out {
        let mut s = String::from("qid\tap_a\tap_b\n");
        for (q, x, y) in &c.pairs {
            let _ = writeln!(s, "{q}\t{x}\t{y}");
        }
        let _ = writeln!(
            s,
            "# map_a={} map_b={} t={} df={} p={}",
            c.map_a, c.map_b, t.t, t.df, t.p
        );
        std::fs::write(p, s).other(|| format!("writing {}", p.display()))?;
    }
    Ok(c)
}
