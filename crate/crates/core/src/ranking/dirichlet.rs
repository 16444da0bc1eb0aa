//! Dirichlet-smoothed query likelihood in its three equivalent-for-ranking
//! (or nearly so) forms.

use super::Query;
use crate::index::{DirectIndex, Document, TermId};
use crate::scalar::Scalar;

/// `(|d|/(μ+|d|))·p_doc + (μ/(μ+|d|))·p_coll`.
#[inline]
pub(crate) fn mix<S: Scalar>(p_doc: S, p_coll: S, doc_len: S, mu: S) -> S {
    let denom = mu + doc_len;
    (doc_len / denom) * p_doc + (mu / denom) * p_coll
}

/// `c(w,d)/|d|`, or 0 for an empty document.
#[inline]
pub(crate) fn ml_prob<S: Scalar>(count: u32, doc_len: S) -> S {
    if count == 0 || doc_len.is_zero() {
        S::zero()
    } else {
        S::from_count(u64::from(count)) / doc_len
    }
}

pub(crate) fn dirichlet_prob_by_id<S: Scalar>(
    term: Option<TermId>,
    p_coll: S,
    doc: &Document,
    mu: S,
) -> S {
    let len = S::from_count(doc.len());
    let count = term.map_or(0, |t| doc.count(t));
    mix(ml_prob(count, len), p_coll, len, mu)
}

/// Smoothed term probability
/// `p(w|θ_d) = (|d|/(μ+|d|))·c(w,d)/|d| + (μ/(μ+|d|))·c(w,C)/|C|`.
pub fn dirichlet_term_prob<S: Scalar>(term: &str, doc: &Document, index: &DirectIndex, mu: S) -> S {
    let id = index.term_id(term);
    dirichlet_prob_by_id(id, index.stats().collection_prob(id), doc, mu)
}

/// Closed rank form:
/// `Σ_{c(q_i,d)>0} ln(1 + c(q_i,d)/(μ·p(q_i|C))) + |q|·ln(μ/(μ+|d|))`.
///
/// `|q|` counts query-term occurrences that occur in the collection; terms
/// unknown to the collection are dropped from the query, as in the summed
/// form.
pub fn dirichlet_rsv_closed<S: Scalar>(
    query: &Query,
    doc: &Document,
    index: &DirectIndex,
    mu: S,
) -> S {
    let terms = resolve(query, index);
    closed_by_id(&terms, doc, mu, false)
}

/// Variant that applies the length penalty once per matched query term:
/// `Σ_{c(q_i,d)>0} [ln(1 + c(q_i,d)/(μ·p(q_i|C))) + ln(μ/(μ+|d|))]`.
pub fn terrier_rsv<S: Scalar>(query: &Query, doc: &Document, index: &DirectIndex, mu: S) -> S {
    let terms = resolve(query, index);
    closed_by_id(&terms, doc, mu, true)
}

/// Occurrences of query terms present in the collection, with p(q_i|C).
pub(crate) fn resolve<S: Scalar>(query: &Query, index: &DirectIndex) -> Vec<(TermId, S)> {
    query
        .terms()
        .iter()
        .filter_map(|t| index.term_id(t))
        .map(|id| (id, index.stats().collection_prob(Some(id))))
        .filter(|&(_, p)| p > S::zero())
        .collect()
}

pub(crate) fn closed_by_id<S: Scalar>(
    terms: &[(TermId, S)],
    doc: &Document,
    mu: S,
    per_match: bool,
) -> S {
    let len = S::from_count(doc.len());
    let penalty = (mu / (mu + len)).ln();
    let mut score = S::zero();
    let mut matched = 0u64;
    for &(id, p_coll) in terms {
        let c = doc.count(id);
        if c > 0 {
            score = score + (S::one() + S::from_count(u64::from(c)) / (mu * p_coll)).ln();
            matched += 1;
        }
    }
    let times = if per_match {
        matched
    } else {
        terms.len() as u64
    };
    score + S::from_count(times) * penalty
}
