use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use crate::error::EvalError;

/// Relevance judgments keyed by query and document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, HashMap<String, u32>>,
    relevant: BTreeMap<String, usize>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one judgment. Returns `false` (and changes nothing) if the pair
    /// was already judged.
    pub fn insert(&mut self, qid: &str, docno: &str, grade: u32) -> bool {
        let docs = self.judgments.entry(qid.to_owned()).or_default();
        if docs.contains_key(docno) {
            return false;
        }
        docs.insert(docno.to_owned(), grade);
        let rel = self.relevant.entry(qid.to_owned()).or_insert(0);
        if grade > 0 {
            *rel += 1;
        }
        true
    }

    pub fn grade(&self, qid: &str, docno: &str) -> Option<u32> {
        self.judgments.get(qid)?.get(docno).copied()
    }

    pub fn is_relevant(&self, qid: &str, docno: &str) -> bool {
        self.grade(qid, docno).is_some_and(|g| g > 0)
    }

    /// Number of relevant documents, or `None` if the query has no judgments.
    pub fn relevant_count(&self, qid: &str) -> Option<usize> {
        self.relevant.get(qid).copied()
    }

    pub fn contains_query(&self, qid: &str) -> bool {
        self.judgments.contains_key(qid)
    }

    pub fn qids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    /// Number of judged pairs.
    pub fn len(&self) -> usize {
        self.judgments.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Parses `qid iter docno rel` lines (any whitespace). Blank lines are
/// skipped; the iteration field is ignored.
pub fn read_qrels<R: BufRead>(source: R) -> Result<Qrels, EvalError> {
    let mut qrels = Qrels::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let parse_err = |reason: String| EvalError::Parse {
            line: lineno,
            reason,
        };
        if fields.len() != 4 {
            return Err(parse_err(format!(
                "expected 4 fields, found {}",
                fields.len()
            )));
        }
        let grade: i64 = fields[3]
            .parse()
            .map_err(|_| parse_err(format!("relevance `{}` is not an integer", fields[3])))?;
        let grade = u32::try_from(grade)
            .map_err(|_| parse_err(format!("relevance {grade} is out of range (must be >= 0)")))?;
        if !qrels.insert(fields[0], fields[2], grade) {
            return Err(parse_err(format!(
                "duplicate judgment for query {} document {}",
                fields[0], fields[2]
            )));
        }
    }
    Ok(qrels)
}
