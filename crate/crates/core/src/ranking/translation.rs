//! Translation probabilities p_t(w|u) and the translation language model
//! term probability built from them.

use super::dirichlet::{mix, ml_prob};
use super::{ModelKind, ModelParams, SmoothingFallback};
use crate::embedding::{alpha_translation_prob, NeighborIndex};
use crate::index::{DirectIndex, Document, TermId, Vocabulary};
use crate::scalar::Scalar;

/// Source of word-to-word translation probabilities.
pub trait TranslationModel<S: Scalar>: Send + Sync {
    /// p_t(w|u).
    fn prob(&self, w: &str, u: &str) -> S;

    /// Every collection term `u` with `p_t(w|u) > 0`, paired with that
    /// probability and sorted by term id.
    fn sources(&self, w: &str, vocab: &Vocabulary) -> Vec<(TermId, S)>;
}

/// p_t(w|u) = δ(w, u).
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslation;

impl<S: Scalar> TranslationModel<S> for IdentityTranslation {
    fn prob(&self, w: &str, u: &str) -> S {
        if w == u {
            S::one()
        } else {
            S::zero()
        }
    }

    fn sources(&self, w: &str, vocab: &Vocabulary) -> Vec<(TermId, S)> {
        vocab.id(w).map(|id| (id, S::one())).into_iter().collect()
    }
}

fn cosine_sources<S: Scalar>(
    nbr: &NeighborIndex<S>,
    w: &str,
    vocab: &Vocabulary,
    weight: impl Fn(&str, S) -> S,
) -> Vec<(TermId, S)> {
    let Some(wi) = nbr.id(w) else {
        // No vector: only an exact occurrence translates into w.
        return vocab
            .id(w)
            .map(|id| (id, weight(w, S::one())))
            .filter(|&(_, p)| p > S::zero())
            .into_iter()
            .collect();
    };
    let mut out: Vec<(TermId, S)> = nbr
        .neighbors_by_id(wi)
        .iter()
        .filter_map(|&(ui, c)| {
            let u = nbr.term(ui);
            let id = vocab.id(u)?;
            let p = weight(u, c / nbr.normalizer_by_id(ui));
            (p > S::zero()).then_some((id, p))
        })
        .collect();
    out.sort_unstable_by_key(|&(id, _)| id);
    out
}

/// p_cos(w|u) from thresholded cosine neighbors.
#[derive(Debug, Clone, Copy)]
pub struct CosineTranslation<'a, S> {
    nbr: &'a NeighborIndex<S>,
}

impl<'a, S: Scalar> CosineTranslation<'a, S> {
    pub fn new(nbr: &'a NeighborIndex<S>) -> Self {
        Self { nbr }
    }
}

impl<S: Scalar> TranslationModel<S> for CosineTranslation<'_, S> {
    fn prob(&self, w: &str, u: &str) -> S {
        self.nbr.cos_translation_prob(w, u)
    }

    fn sources(&self, w: &str, vocab: &Vocabulary) -> Vec<(TermId, S)> {
        cosine_sources(self.nbr, w, vocab, |_, p| p)
    }
}

/// p_cos-α(w|u): α extra mass on self-translation.
#[derive(Debug, Clone, Copy)]
pub struct AlphaTranslation<'a, S> {
    nbr: &'a NeighborIndex<S>,
    alpha: S,
}

impl<'a, S: Scalar> AlphaTranslation<'a, S> {
    pub fn new(nbr: &'a NeighborIndex<S>, alpha: S) -> Self {
        Self { nbr, alpha }
    }
}

impl<S: Scalar> TranslationModel<S> for AlphaTranslation<'_, S> {
    fn prob(&self, w: &str, u: &str) -> S {
        alpha_translation_prob(w, u, self.nbr, self.alpha)
    }

    fn sources(&self, w: &str, vocab: &Vocabulary) -> Vec<(TermId, S)> {
        let alpha = self.alpha;
        cosine_sources(self.nbr, w, vocab, |u, p| {
            if u == w {
                alpha + (S::one() - alpha) * p
            } else {
                (S::one() - alpha) * p
            }
        })
    }
}

/// `p_t(q|θ_d) = Σ_{u∈d} p_t(q|u)·c(u,d)/|d|` over pre-resolved sources,
/// summed in ascending term id order.
pub(crate) fn translated_doc_prob<S: Scalar>(sources: &[(TermId, S)], doc: &Document) -> S {
    let len = S::from_count(doc.len());
    if len.is_zero() {
        return S::zero();
    }
    let counts = doc.counts();
    let mut total = S::zero();
    if sources.len() <= counts.len() {
        for &(id, p) in sources {
            if let Ok(i) = counts.binary_search_by_key(&id, |&(t, _)| t) {
                total = total + p * ml_prob(counts[i].1, len);
            }
        }
    } else {
        for &(id, c) in counts {
            if let Ok(i) = sources.binary_search_by_key(&id, |&(t, _)| t) {
                total = total + sources[i].1 * ml_prob(c, len);
            }
        }
    }
    total
}

/// Combines the translation and collection components. `None` means the
/// term is skipped (contributes nothing to the log-likelihood).
pub(crate) fn combine<S: Scalar>(
    p_trans: S,
    p_coll: S,
    doc_len: S,
    mu: S,
    fallback: SmoothingFallback,
) -> Option<S> {
    let has_trans = p_trans > S::zero();
    let has_coll = p_coll > S::zero();
    match (has_trans, has_coll, fallback) {
        (false, false, _) => None,
        (true, true, _) | (_, _, SmoothingFallback::Mixture) => {
            Some(mix(p_trans, p_coll, doc_len, mu))
        }
        (true, false, SmoothingFallback::Piecewise) => Some(p_trans),
        (false, true, SmoothingFallback::Piecewise) => Some(p_coll),
    }
}

/// Translation language model term probability
/// `(|d|/(μ+|d|))·p_t(q|θ_d) + (μ/(μ+|d|))·p(q|C)` with the configured
/// treatment of a missing component. `None` when the term is skipped.
pub fn tlm_term_prob<S: Scalar>(
    query_term: &str,
    doc: &Document,
    index: &DirectIndex,
    mu: S,
    translation: &dyn TranslationModel<S>,
    fallback: SmoothingFallback,
) -> Option<S> {
    let sources = translation.sources(query_term, index.vocabulary());
    let p_trans = translated_doc_prob(&sources, doc);
    let p_coll = index.collection_prob(query_term);
    combine(p_trans, p_coll, S::from_count(doc.len()), mu, fallback)
}

/// Embedding translation model term probability using p_cos (WETLM) or
/// p_cos-α (WETLM-α) according to `params.kind`.
///
/// # Panics
/// If `params.kind` is not an embedding model.
pub fn wetlm_term_prob<S: Scalar>(
    query_term: &str,
    doc: &Document,
    index: &DirectIndex,
    nbr: &NeighborIndex<S>,
    params: &ModelParams<S>,
) -> Option<S> {
    match params.kind {
        ModelKind::Wetlm => tlm_term_prob(
            query_term,
            doc,
            index,
            params.mu,
            &CosineTranslation::new(nbr),
            params.fallback,
        ),
        ModelKind::WetlmAlpha => tlm_term_prob(
            query_term,
            doc,
            index,
            params.mu,
            &AlphaTranslation::new(nbr, params.alpha),
            params.fallback,
        ),
        other => panic!("wetlm_term_prob called with {other}"),
    }
}
