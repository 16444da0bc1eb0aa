//! Translation probabilities from document-level mutual information.
//!
//! `I(w,u)` is the mutual information of the binary presence variables of
//! `w` and `u`, estimated from raw document-presence counts (no smoothing,
//! `0·ln 0 = 0`). Candidates for `p_t(·|u)` are the terms that co-occur with
//! `u` in at least one document:
//!
//! ```text
//! p_t(w|u) = I(w,u) / Σ_{w' co-occurring with u} I(w',u)
//! ```
//!
//! When that denominator is zero the translation degenerates to the identity.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::translation::TranslationModel;
use crate::index::{DirectIndex, PairPresence, TermId, Vocabulary};
use crate::scalar::Scalar;

/// I(w,u) from a presence contingency table.
pub fn mi_from_presence<S: Scalar>(p: PairPresence) -> S {
    if p.n == 0 {
        return S::zero();
    }
    // I is symmetric; a canonical orientation keeps the summation order
    // (and so the rounding) identical for (w, u) and (u, w).
    let p = if p.n_w > p.n_u {
        PairPresence {
            n_w: p.n_u,
            n_u: p.n_w,
            ..p
        }
    } else {
        p
    };
    let n = S::from_count(p.n);
    let n11 = p.n_wu;
    let n10 = p.n_w - p.n_wu;
    let n01 = p.n_u - p.n_wu;
    let n00 = p.n + p.n_wu - p.n_w - p.n_u;
    let cells = [
        (n11, p.n_w, p.n_u),
        (n10, p.n_w, p.n - p.n_u),
        (n01, p.n - p.n_w, p.n_u),
        (n00, p.n - p.n_w, p.n - p.n_u),
    ];
    let mut total = S::zero();
    for (joint, mw, mu) in cells {
        if joint == 0 {
            continue;
        }
        let joint_s = S::from_count(joint);
        // p(x,y) ln( p(x,y) / (p(x) p(y)) ) = (n_xy/N) ln( n_xy N / (n_x n_y) )
        let ratio = (joint_s * n) / (S::from_count(mw) * S::from_count(mu));
        total = total + (joint_s / n) * ratio.ln();
    }
    total.max(S::zero())
}

/// Mutual information of the presence variables of `w` and `u` in `index`.
pub fn mi_score<S: Scalar>(index: &DirectIndex, w: &str, u: &str) -> S {
    mi_from_presence(index.pair_presence(w, u))
}

/// Precomputed presence lists plus lazily cached per-term normalizers.
#[derive(Debug)]
pub struct MiTranslation<'a, S> {
    index: &'a DirectIndex,
    /// Documents containing each term, ascending.
    postings: Vec<Vec<u32>>,
    normalizers: Vec<OnceLock<S>>,
}

impl<'a, S: Scalar> MiTranslation<'a, S> {
    pub fn new(index: &'a DirectIndex) -> Self {
        let mut postings = vec![Vec::new(); index.vocabulary().len()];
        for (d, doc) in index.documents().iter().enumerate() {
            for &(t, _) in doc.counts() {
                postings[t as usize].push(d as u32);
            }
        }
        let normalizers = (0..postings.len()).map(|_| OnceLock::new()).collect();
        Self {
            index,
            postings,
            normalizers,
        }
    }

    /// n_wu for every w co-occurring with `u`, sorted by term id.
    fn cooccurrence(&self, u: TermId) -> BTreeMap<TermId, u64> {
        let mut counts = BTreeMap::new();
        for &d in &self.postings[u as usize] {
            for &(w, _) in self.index.documents()[d as usize].counts() {
                *counts.entry(w).or_insert(0) += 1;
            }
        }
        counts
    }

    fn presence(&self, w: TermId, u: TermId, n_wu: u64) -> PairPresence {
        PairPresence {
            n_w: self.postings[w as usize].len() as u64,
            n_u: self.postings[u as usize].len() as u64,
            n_wu,
            n: self.index.doc_count() as u64,
        }
    }

    fn mi_terms(&self, u: TermId) -> Vec<(TermId, S)> {
        self.cooccurrence(u)
            .into_iter()
            .map(|(w, n_wu)| (w, mi_from_presence(self.presence(w, u, n_wu))))
            .collect()
    }

    fn normalizer_id(&self, u: TermId) -> S {
        *self.normalizers[u as usize].get_or_init(|| {
            self.mi_terms(u)
                .into_iter()
                .fold(S::zero(), |acc, (_, i)| acc + i)
        })
    }

    /// Σ_{w' co-occurring with u} I(w', u).
    pub fn normalizer(&self, u: &str) -> Option<S> {
        self.index.term_id(u).map(|id| self.normalizer_id(id))
    }

    fn prob_ids(&self, w: TermId, u: TermId, n_wu: u64) -> S {
        let z = self.normalizer_id(u);
        if z.is_zero() {
            return if w == u { S::one() } else { S::zero() };
        }
        if n_wu == 0 {
            return S::zero();
        }
        mi_from_presence::<S>(self.presence(w, u, n_wu)) / z
    }

    /// The candidate set of `u` with p_t(w|u) for each candidate `w`.
    pub fn candidates(&self, u: &str) -> Vec<(String, S)> {
        let Some(ui) = self.index.term_id(u) else {
            return Vec::new();
        };
        self.cooccurrence(ui)
            .into_iter()
            .map(|(w, n_wu)| {
                (
                    self.index.vocabulary().term(w).to_owned(),
                    self.prob_ids(w, ui, n_wu),
                )
            })
            .collect()
    }
}

impl<S: Scalar> TranslationModel<S> for MiTranslation<'_, S> {
    fn prob(&self, w: &str, u: &str) -> S {
        match (self.index.term_id(w), self.index.term_id(u)) {
            (Some(wi), Some(ui)) => {
                let n_wu = self.index.pair_presence(w, u).n_wu;
                self.prob_ids(wi, ui, n_wu)
            }
            _ => S::zero(),
        }
    }

    fn sources(&self, w: &str, vocab: &Vocabulary) -> Vec<(TermId, S)> {
        debug_assert!(std::ptr::eq(vocab, self.index.vocabulary()));
        let Some(wi) = vocab.id(w) else {
            return Vec::new();
        };
        // Co-occurrence is symmetric, so the u with n_wu > 0 are exactly the
        // terms co-occurring with w.
        self.cooccurrence(wi)
            .into_iter()
            .map(|(u, n_wu)| (u, self.prob_ids(wi, u, n_wu)))
            .filter(|&(_, p)| p > S::zero())
            .collect()
    }
}

/// p_t(w|u) normalized over the terms co-occurring with `u`.
pub fn mi_translation_prob<S: Scalar>(index: &DirectIndex, w: &str, u: &str) -> S {
    MiTranslation::<S>::new(index).prob(w, u)
}
