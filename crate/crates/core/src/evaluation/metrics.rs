use super::{Qrels, RunResult};
use crate::error::EvalError;

/// Cutoff used for the headline precision figure.
pub const DEFAULT_CUTOFF: usize = 10;

fn judged(qid: &str, qrels: &Qrels) -> Result<usize, EvalError> {
    qrels
        .relevant_count(qid)
        .ok_or_else(|| EvalError::UnknownQuery(vec![qid.to_owned()]))
}

/// Average precision with the number of relevant documents in `qrels` as
/// denominator, so relevant documents that were not retrieved count as 0.
pub fn average_precision<D: AsRef<str>>(
    ranked: &[D],
    qid: &str,
    qrels: &Qrels,
) -> Result<f64, EvalError> {
    let relevant = judged(qid, qrels)?;
    if relevant == 0 {
        return Err(EvalError::NoRelevant(qid.to_owned()));
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, d) in ranked.iter().enumerate() {
        if qrels.is_relevant(qid, d.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / relevant as f64)
}

/// Relevant documents among the first `k` positions, divided by `k`.
pub fn precision_at_k<D: AsRef<str>>(
    ranked: &[D],
    qid: &str,
    qrels: &Qrels,
    k: usize,
) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroCutoff);
    }
    judged(qid, qrels)?;
    let hits = ranked
        .iter()
        .take(k)
        .filter(|d| qrels.is_relevant(qid, d.as_ref()))
        .count();
    Ok(hits as f64 / k as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryScore {
    pub qid: String,
    pub ap: f64,
    pub precision: f64,
}

/// Per-query and mean metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cutoff: usize,
    /// Evaluated queries in qid order.
    pub queries: Vec<QueryScore>,
    /// Judged queries that have no relevant document and were skipped.
    pub excluded: Vec<String>,
    pub map: f64,
    pub mean_precision: f64,
}

impl Evaluation {
    pub fn ap_of(&self, qid: &str) -> Option<f64> {
        self.queries.iter().find(|q| q.qid == qid).map(|q| q.ap)
    }
}

/// Evaluates every query of `run`. A query missing from `qrels` is an
/// error; a judged query without relevant documents is excluded from both
/// means and listed in [`Evaluation::excluded`].
pub fn evaluate(run: &RunResult, qrels: &Qrels, cutoff: usize) -> Result<Evaluation, EvalError> {
    if cutoff == 0 {
        return Err(EvalError::ZeroCutoff);
    }
    let unknown: Vec<String> = run
        .qids()
        .filter(|q| !qrels.contains_query(q))
        .map(str::to_owned)
        .collect();
    if !unknown.is_empty() {
        return Err(EvalError::UnknownQuery(unknown));
    }
    let mut queries = Vec::new();
    let mut excluded = Vec::new();
    for qid in run.qids() {
        if qrels.relevant_count(qid) == Some(0) {
            excluded.push(qid.to_owned());
            continue;
        }
        let ranked = run.ranked_docnos(qid);
        queries.push(QueryScore {
            qid: qid.to_owned(),
            ap: average_precision(&ranked, qid, qrels)?,
            precision: precision_at_k(&ranked, qid, qrels, cutoff)?,
        });
    }
    if queries.is_empty() {
        return Err(EvalError::NothingToEvaluate);
    }
    let n = queries.len() as f64;
    let map = queries.iter().map(|q| q.ap).sum::<f64>() / n;
    let mean_precision = queries.iter().map(|q| q.precision).sum::<f64>() / n;
    Ok(Evaluation {
        cutoff,
        queries,
        excluded,
        map,
        mean_precision,
    })
}

/// Unweighted mean of AP over the run's queries that have relevant documents.
pub fn mean_average_precision(run: &RunResult, qrels: &Qrels) -> Result<f64, EvalError> {
    evaluate(run, qrels, DEFAULT_CUTOFF).map(|e| e.map)
}
