use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::EvalError;
use crate::ranking::Ranking;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub docno: String,
    /// 1-based.
    pub rank: usize,
    pub score: f64,
}

/// Ranked lists for a set of queries, iterated in qid order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunResult {
    pub tag: String,
    queries: BTreeMap<String, Vec<RunEntry>>,
}

impl RunResult {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            queries: BTreeMap::new(),
        }
    }

    /// Collects rankings into a run. Queries with an empty result list are
    /// left out, because a run file cannot represent them either.
    pub fn from_rankings<S: Scalar>(tag: impl Into<String>, rankings: &[Ranking<S>]) -> Self {
        let mut run = Self::new(tag);
        for r in rankings {
            if r.docs.is_empty() {
                continue;
            }
            let entries = r
                .docs
                .iter()
                .map(|d| RunEntry {
                    docno: d.docno.clone(),
                    rank: d.rank,
                    score: d.score.as_f64(),
                })
                .collect();
            run.queries.insert(r.qid.clone(), entries);
        }
        run
    }

    /// Replaces the list for `qid`. Entries are kept in the given order.
    pub fn insert(&mut self, qid: impl Into<String>, entries: Vec<RunEntry>) {
        self.queries.insert(qid.into(), entries);
    }

    pub fn get(&self, qid: &str) -> Option<&[RunEntry]> {
        self.queries.get(qid).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[RunEntry])> {
        self.queries.iter().map(|(q, e)| (q.as_str(), e.as_slice()))
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.queries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Docnos of one query in rank order.
    pub fn ranked_docnos(&self, qid: &str) -> Vec<&str> {
        self.get(qid)
            .map(|e| e.iter().map(|x| x.docno.as_str()).collect())
            .unwrap_or_default()
    }

    /// Checks that ranks run 1, 2, ... and scores never increase.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (qid, entries) in &self.queries {
            for (i, e) in entries.iter().enumerate() {
                if e.rank != i + 1 {
                    return Err(format!(
                        "query {qid}: position {} has rank {}",
                        i + 1,
                        e.rank
                    ));
                }
                if i > 0 && e.score > entries[i - 1].score {
                    return Err(format!("query {qid}: score increases at rank {}", e.rank));
                }
            }
        }
        Ok(())
    }
}

/// Writes `qid Q0 docno rank score tag` lines, queries in qid order and
/// scores with six decimals. An optional header becomes a leading `#` line.
pub fn write_run<W: Write>(
    run: &RunResult,
    mut sink: W,
    header: Option<&str>,
) -> std::io::Result<()> {
    if let Some(h) = header {
        for line in h.lines() {
            writeln!(sink, "# {line}")?;
        }
    }
    for (qid, entries) in &run.queries {
        for e in entries {
            writeln!(
                sink,
                "{qid} Q0 {} {} {:.6} {}",
                e.docno, e.rank, e.score, run.tag
            )?;
        }
    }
    sink.flush()
}

/// Reads a run file. Lines starting with `#` and blank lines are skipped.
/// Entries of each query are ordered by rank; a repeated rank or docno
/// within a query is an error. The tag of the first line is kept.
pub fn read_run<R: BufRead>(source: R) -> Result<RunResult, EvalError> {
    let mut run = RunResult::default();
    let mut tag: Option<String> = None;
    let mut seen: BTreeMap<String, (HashSet<usize>, HashSet<String>)> = BTreeMap::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| EvalError::Parse {
            line: lineno,
            reason,
        };
        let f: Vec<&str> = trimmed.split_whitespace().collect();
        if f.len() != 6 {
            return Err(parse_err(format!("expected 6 fields, found {}", f.len())));
        }
        let rank: usize = f[3]
            .parse()
            .map_err(|_| parse_err(format!("rank `{}` is not a non-negative integer", f[3])))?;
        let score: f64 = f[4]
            .parse()
            .map_err(|_| parse_err(format!("score `{}` is not a number", f[4])))?;
        let (ranks, docs) = seen.entry(f[0].to_owned()).or_default();
        if !ranks.insert(rank) {
            return Err(parse_err(format!("query {} repeats rank {rank}", f[0])));
        }
        if !docs.insert(f[2].to_owned()) {
            return Err(parse_err(format!(
                "query {} repeats document {}",
                f[0], f[2]
            )));
        }
        tag.get_or_insert_with(|| f[5].to_owned());
        run.queries
            .entry(f[0].to_owned())
            .or_default()
            .push(RunEntry {
                docno: f[2].to_owned(),
                rank,
                score,
            });
    }
    for entries in run.queries.values_mut() {
        entries.sort_by_key(|e| e.rank);
    }
    run.tag = tag.unwrap_or_default();
    Ok(run)
}
