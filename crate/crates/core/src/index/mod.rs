//! Direct (forward) in-memory index: per-document term counts plus the
//! collection statistics needed by the language models.
//!
//! Every model scores documents by scanning this structure, so there is no
//! inverted file. Term identifiers are assigned in first-occurrence order,
//! which keeps ingestion and snapshots deterministic.

pub(crate) mod snapshot;
mod trec;

use std::collections::HashMap;

use crate::scalar::Scalar;
use crate::text::Token;

pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use trec::ingest_trec;

pub type TermId = u32;

/// Bidirectional term dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
}

impl Vocabulary {
    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id as usize]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("vocabulary exceeds u32 ids");
        self.terms.push(term.to_owned());
        self.ids.insert(term.to_owned(), id);
        id
    }
}

/// Term counts of one record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    docno: String,
    /// Sorted by term id, counts strictly positive.
    counts: Vec<(TermId, u32)>,
    length: u64,
}

impl Document {
    pub(crate) fn from_counts(docno: String, mut counts: Vec<(TermId, u32)>) -> Self {
        counts.sort_unstable_by_key(|&(t, _)| t);
        debug_assert!(counts.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(counts.iter().all(|&(_, c)| c > 0));
        let length = counts.iter().map(|&(_, c)| u64::from(c)).sum();
        Self {
            docno,
            counts,
            length,
        }
    }

    pub fn docno(&self) -> &str {
        &self.docno
    }

    /// |d|, the number of indexed tokens.
    pub fn len(&self) -> u64 {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// c(w, d).
    pub fn count(&self, term: TermId) -> u32 {
        self.counts
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Distinct terms with their counts, sorted by term id.
    pub fn counts(&self) -> &[(TermId, u32)] {
        &self.counts
    }

    pub fn contains(&self, term: TermId) -> bool {
        self.count(term) > 0
    }
}

/// Corpus-level counts indexed by [`TermId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionStats {
    term_counts: Vec<u64>,
    doc_presence: Vec<u32>,
    total_tokens: u64,
    doc_count: usize,
}

impl CollectionStats {
    /// Recomputes every statistic from the documents.
    pub fn from_documents(vocab_len: usize, documents: &[Document]) -> Self {
        let mut term_counts = vec![0u64; vocab_len];
        let mut doc_presence = vec![0u32; vocab_len];
        let mut total_tokens = 0u64;
        for doc in documents {
            for &(t, c) in doc.counts() {
                term_counts[t as usize] += u64::from(c);
                doc_presence[t as usize] += 1;
            }
            total_tokens += doc.len();
        }
        Self {
            term_counts,
            doc_presence,
            total_tokens,
            doc_count: documents.len(),
        }
    }

    /// c(w, C).
    pub fn term_count(&self, term: TermId) -> u64 {
        self.term_counts.get(term as usize).copied().unwrap_or(0)
    }

    /// Number of documents containing `term`.
    pub fn doc_presence(&self, term: TermId) -> u32 {
        self.doc_presence.get(term as usize).copied().unwrap_or(0)
    }

    /// |C|.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// Mean document length; 0 for an empty collection.
    pub fn avdl(&self) -> f64 {
        if self.doc_count == 0 {
            0.0
        } else {
            self.total_tokens as f64 / self.doc_count as f64
        }
    }

    /// Maximum-likelihood collection probability c(w,C)/|C|; 0 for unknown
    /// terms or an empty collection.
    pub fn collection_prob<S: Scalar>(&self, term: Option<TermId>) -> S {
        match term {
            Some(t) if self.total_tokens > 0 => {
                S::from_count(self.term_count(t)) / S::from_count(self.total_tokens)
            }
            _ => S::zero(),
        }
    }
}

/// Document-presence contingency counts for a pair of terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairPresence {
    /// Documents containing w.
    pub n_w: u64,
    /// Documents containing u.
    pub n_u: u64,
    /// Documents containing both.
    pub n_wu: u64,
    /// Number of documents.
    pub n: u64,
}

/// Documents plus derived collection statistics. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectIndex {
    vocab: Vocabulary,
    documents: Vec<Document>,
    stats: CollectionStats,
}

impl DirectIndex {
    pub(crate) fn from_parts(vocab: Vocabulary, documents: Vec<Document>) -> Self {
        let stats = CollectionStats::from_documents(vocab.len(), &documents);
        Self {
            vocab,
            documents,
            stats,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn stats(&self) -> &CollectionStats {
        &self.stats
    }

    pub fn doc_count(&self) -> usize {
        self.documents.len()
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.vocab.id(term)
    }

    /// c(term,C)/|C| by string.
    pub fn collection_prob<S: Scalar>(&self, term: &str) -> S {
        self.stats.collection_prob(self.vocab.id(term))
    }

    /// Document-presence counts for (w, u), computed by a scan.
    pub fn pair_presence(&self, w: &str, u: &str) -> PairPresence {
        let n = self.documents.len() as u64;
        let (wi, ui) = (self.vocab.id(w), self.vocab.id(u));
        let mut p = PairPresence {
            n_w: 0,
            n_u: 0,
            n_wu: 0,
            n,
        };
        for doc in &self.documents {
            let hw = wi.is_some_and(|t| doc.contains(t));
            let hu = ui.is_some_and(|t| doc.contains(t));
            p.n_w += u64::from(hw);
            p.n_u += u64::from(hu);
            p.n_wu += u64::from(hw && hu);
        }
        p
    }
}

/// Accumulates documents into a [`DirectIndex`].
#[derive(Debug, Default)]
pub struct IndexBuilder {
    vocab: Vocabulary,
    documents: Vec<Document>,
}

impl IndexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one document from already preprocessed tokens. Empty token lists
    /// produce a zero-length document.
    pub fn add_tokens<I, T>(&mut self, docno: impl Into<String>, tokens: I) -> &mut Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut counts: HashMap<TermId, u32> = HashMap::new();
        for tok in tokens {
            let id = self.vocab.intern(tok.as_ref());
            *counts.entry(id).or_insert(0) += 1;
        }
        self.documents.push(Document::from_counts(
            docno.into(),
            counts.into_iter().collect(),
        ));
        self
    }

    pub fn add_document(&mut self, docno: impl Into<String>, tokens: &[Token]) -> &mut Self {
        self.add_tokens(docno, tokens.iter().map(Token::as_str))
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn build(self) -> DirectIndex {
        DirectIndex::from_parts(self.vocab, self.documents)
    }
}
