//! Query-likelihood scoring functions and exhaustive document ranking.
//!
//! All models score documents by a full scan of the [`DirectIndex`]. Scores
//! use natural logarithms. Result lists are sorted by descending score with
//! ties broken by ascending docno.

mod dirichlet;
mod mutual_info;
mod translation;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::embedding::NeighborIndex;
use crate::error::ParamError;
use crate::index::{DirectIndex, Document, TermId};
use crate::scalar::{cmp_desc, Scalar};
use crate::text::{preprocess, StopList};

pub use dirichlet::{dirichlet_rsv_closed, dirichlet_term_prob, terrier_rsv};
pub use mutual_info::{mi_from_presence, mi_score, mi_translation_prob, MiTranslation};
pub use translation::{
    tlm_term_prob, wetlm_term_prob, AlphaTranslation, CosineTranslation, IdentityTranslation,
    TranslationModel,
};

pub const DEFAULT_TOP_K: usize = 1000;
pub const DEFAULT_THRESHOLD: f64 = 0.7;
pub const DEFAULT_ALPHA: f64 = 0.45;

/// Scoring function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Σ ln p(q_i|θ_d) with Dirichlet smoothing.
    DirichletSum,
    /// Closed rank form of the Dirichlet model.
    DirichletClosed,
    /// Closed form with the length penalty applied once per matched term.
    DirichletTerrier,
    /// Translation model with mutual-information translation probabilities.
    TlmMi,
    /// Translation model with cosine translation probabilities.
    Wetlm,
    /// [`ModelKind::Wetlm`] with α-weighted self-translation.
    WetlmAlpha,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::DirichletSum,
        ModelKind::DirichletClosed,
        ModelKind::DirichletTerrier,
        ModelKind::TlmMi,
        ModelKind::Wetlm,
        ModelKind::WetlmAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DirichletSum => "dirichlet",
            ModelKind::DirichletClosed => "dirichlet-closed",
            ModelKind::DirichletTerrier => "dirichlet-terrier",
            ModelKind::TlmMi => "tlm-mi",
            ModelKind::Wetlm => "wetlm",
            ModelKind::WetlmAlpha => "wetlm-alpha",
        }
    }

    /// Whether the model needs a [`NeighborIndex`].
    pub fn uses_embeddings(self) -> bool {
        matches!(self, ModelKind::Wetlm | ModelKind::WetlmAlpha)
    }

    pub fn is_translation(self) -> bool {
        matches!(
            self,
            ModelKind::TlmMi | ModelKind::Wetlm | ModelKind::WetlmAlpha
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let kind = match norm.as_str() {
            "dirichlet" | "dirichlet-sum" | "lm" => ModelKind::DirichletSum,
            "dirichlet-closed" | "closed" => ModelKind::DirichletClosed,
            "dirichlet-terrier" | "terrier" => ModelKind::DirichletTerrier,
            "tlm-mi" | "tlm" | "mi" => ModelKind::TlmMi,
            "wetlm" => ModelKind::Wetlm,
            "wetlm-alpha" | "wetlm-a" => ModelKind::WetlmAlpha,
            _ => {
                let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.name()).collect();
                return Err(format!(
                    "unknown model {s:?}; expected one of {}",
                    names.join(", ")
                ));
            }
        };
        Ok(kind)
    }
}

/// How a translation model treats a term whose translation component or
/// collection component is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SmoothingFallback {
    /// Use the non-zero component alone, unmixed. A term with both
    /// components zero is skipped.
    #[default]
    Piecewise,
    /// Always mix with the Dirichlet weights. A term with both components
    /// zero is skipped.
    Mixture,
}

impl fmt::Display for SmoothingFallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmoothingFallback::Piecewise => "piecewise",
            SmoothingFallback::Mixture => "mixture",
        })
    }
}

impl FromStr for SmoothingFallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "piecewise" => Ok(SmoothingFallback::Piecewise),
            "mixture" => Ok(SmoothingFallback::Mixture),
            _ => Err(format!(
                "unknown fallback {s:?}; expected piecewise or mixture"
            )),
        }
    }
}

/// Model hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<S> {
    pub kind: ModelKind,
    /// Dirichlet prior μ > 0.
    pub mu: S,
    /// Cosine threshold T ∈ (0, 1]; embedding models only.
    pub threshold: f64,
    /// Self-translation weight α ∈ [0, 1]; [`ModelKind::WetlmAlpha`] only.
    pub alpha: S,
    pub top_k: usize,
    /// Translation models only.
    pub fallback: SmoothingFallback,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(kind: ModelKind, mu: S) -> Self {
        Self {
            kind,
            mu,
            threshold: DEFAULT_THRESHOLD,
            alpha: S::lit(DEFAULT_ALPHA),
            top_k: DEFAULT_TOP_K,
            fallback: SmoothingFallback::default(),
        }
    }

    pub fn with_mu(mut self, mu: S) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_alpha(mut self, alpha: S) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_top_k(mut self, top_k: usize) -> Self {
        self.top_k = top_k;
        self
    }

    pub fn with_fallback(mut self, fallback: SmoothingFallback) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.mu.is_finite() && self.mu > S::zero()) {
            return Err(ParamError::Mu(self.mu.as_f64()));
        }
        if self.kind.uses_embeddings() && !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(ParamError::Threshold(self.threshold));
        }
        if self.kind == ModelKind::WetlmAlpha
            && !(self.alpha >= S::zero() && self.alpha <= S::one())
        {
            return Err(ParamError::Alpha(self.alpha.as_f64()));
        }
        if self.top_k == 0 {
            return Err(ParamError::TopK);
        }
        Ok(())
    }
}

/// Preprocessed query; repeated terms are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    qid: String,
    terms: Vec<String>,
}

impl Query {
    /// Builds a query from already preprocessed terms.
    pub fn new<I, T>(qid: impl Into<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Self {
            qid: qid.into(),
            terms: terms.into_iter().map(Into::into).collect(),
        }
    }

    /// Runs raw text through the same pipeline as documents.
    pub fn from_text(qid: impl Into<String>, raw: &str, stoplist: &StopList) -> Self {
        Self::new(
            qid,
            preprocess(raw, stoplist)
                .into_iter()
                .map(|t| t.into_string()),
        )
    }

    pub fn qid(&self) -> &str {
        &self.qid
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc<S> {
    pub docno: String,
    pub score: S,
    /// 1-based.
    pub rank: usize,
}

/// Why a ranking is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryDiagnostic {
    /// No token survived preprocessing; the result list is empty.
    EmptyQuery,
    /// No query term has collection or translation mass; every document
    /// scores 0.
    NoUsableTerms,
}

impl fmt::Display for QueryDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryDiagnostic::EmptyQuery => "query has no terms after preprocessing",
            QueryDiagnostic::NoUsableTerms => {
                "no query term occurs in the collection or translates into it"
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking<S> {
    pub qid: String,
    pub docs: Vec<ScoredDoc<S>>,
    pub diagnostic: Option<QueryDiagnostic>,
}

/// Per-occurrence data resolved once per query.
struct TermPlan<S> {
    id: Option<TermId>,
    p_coll: S,
    sources: Vec<(TermId, S)>,
}

enum Translator<'a, S: Scalar> {
    None,
    Borrowed(&'a dyn TranslationModel<S>),
    Owned(Box<dyn TranslationModel<S> + 'a>),
}

impl<'a, S: Scalar> Translator<'a, S> {
    fn get(&self) -> Option<&dyn TranslationModel<S>> {
        match self {
            Translator::None => None,
            Translator::Borrowed(t) => Some(*t),
            Translator::Owned(t) => Some(t.as_ref()),
        }
    }
}

/// A configured model bound to an index, reusable across queries.
pub struct Ranker<'a, S: Scalar> {
    index: &'a DirectIndex,
    params: ModelParams<S>,
    translator: Translator<'a, S>,
}

impl<'a, S: Scalar> fmt::Debug for Ranker<'a, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ranker")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl<'a, S: Scalar> Ranker<'a, S> {
    /// Binds `params` to `index`. Embedding models need `nbr`; the
    /// mutual-information model builds its tables from `index`.
    pub fn new(
        index: &'a DirectIndex,
        params: ModelParams<S>,
        nbr: Option<&'a NeighborIndex<S>>,
    ) -> Result<Self, ParamError> {
        params.validate()?;
        let translator = match params.kind {
            ModelKind::DirichletSum | ModelKind::DirichletClosed | ModelKind::DirichletTerrier => {
                Translator::None
            }
            ModelKind::TlmMi => Translator::Owned(Box::new(MiTranslation::<S>::new(index))),
            ModelKind::Wetlm | ModelKind::WetlmAlpha => {
                let nbr = nbr.ok_or(ParamError::MissingTranslation(params.kind.name()))?;
                if (nbr.threshold() - params.threshold).abs() > 1e-12 {
                    return Err(ParamError::Threshold(params.threshold));
                }
                if params.kind == ModelKind::Wetlm {
                    Translator::Owned(Box::new(CosineTranslation::new(nbr)))
                } else {
                    Translator::Owned(Box::new(AlphaTranslation::new(nbr, params.alpha)))
                }
            }
        };
        Ok(Self {
            index,
            params,
            translator,
        })
    }

    /// A translation-model ranker with a caller-supplied translation source.
    /// `params.kind` must be a translation kind.
    pub fn with_translation(
        index: &'a DirectIndex,
        params: ModelParams<S>,
        translation: &'a dyn TranslationModel<S>,
    ) -> Result<Self, ParamError> {
        params.validate()?;
        if !params.kind.is_translation() {
            return Err(ParamError::MissingTranslation(params.kind.name()));
        }
        Ok(Self {
            index,
            params,
            translator: Translator::Borrowed(translation),
        })
    }

    pub fn params(&self) -> &ModelParams<S> {
        &self.params
    }

    pub fn index(&self) -> &DirectIndex {
        self.index
    }

    fn plan(&self, query: &Query) -> Vec<TermPlan<S>> {
        let mut cache: HashMap<&str, usize> = HashMap::new();
        let mut plans: Vec<TermPlan<S>> = Vec::with_capacity(query.len());
        let vocab = self.index.vocabulary();
        for term in query.terms() {
            if let Some(&i) = cache.get(term.as_str()) {
                let p = &plans[i];
                plans.push(TermPlan {
                    id: p.id,
                    p_coll: p.p_coll,
                    sources: p.sources.clone(),
                });
                continue;
            }
            let id = vocab.id(term);
            let sources = self
                .translator
                .get()
                .map(|t| t.sources(term, vocab))
                .unwrap_or_default();
            cache.insert(term, plans.len());
            plans.push(TermPlan {
                id,
                p_coll: self.index.stats().collection_prob(id),
                sources,
            });
        }
        plans
    }

    fn score_planned(&self, plans: &[TermPlan<S>], doc: &Document) -> S {
        let mu = self.params.mu;
        match self.params.kind {
            ModelKind::DirichletSum => plans
                .iter()
                .filter(|p| p.p_coll > S::zero())
                .fold(S::zero(), |acc, p| {
                    acc + dirichlet::dirichlet_prob_by_id(p.id, p.p_coll, doc, mu).ln()
                }),
            ModelKind::DirichletClosed | ModelKind::DirichletTerrier => {
                let terms: Vec<(TermId, S)> = plans
                    .iter()
                    .filter(|p| p.p_coll > S::zero())
                    .map(|p| (p.id.expect("term with collection mass has an id"), p.p_coll))
                    .collect();
                dirichlet::closed_by_id(
                    &terms,
                    doc,
                    mu,
                    self.params.kind == ModelKind::DirichletTerrier,
                )
            }
            ModelKind::TlmMi | ModelKind::Wetlm | ModelKind::WetlmAlpha => {
                let len = S::from_count(doc.len());
                plans.iter().fold(S::zero(), |acc, p| {
                    let p_trans = translation::translated_doc_prob(&p.sources, doc);
                    match translation::combine(p_trans, p.p_coll, len, mu, self.params.fallback) {
                        Some(prob) => acc + prob.ln(),
                        None => acc,
                    }
                })
            }
        }
    }

    /// Relevance score of one document.
    pub fn score(&self, query: &Query, doc: &Document) -> S {
        self.score_planned(&self.plan(query), doc)
    }

    /// Scores of every document, in index order.
    pub fn score_all(&self, query: &Query) -> Vec<S> {
        let plans = self.plan(query);
        self.index
            .documents()
            .par_iter()
            .map(|d| self.score_planned(&plans, d))
            .collect()
    }

    /// Scores, sorts and truncates to `top_k`.
    pub fn rank(&self, query: &Query) -> Ranking<S> {
        if query.is_empty() {
            return Ranking {
                qid: query.qid().to_owned(),
                docs: Vec::new(),
                diagnostic: Some(QueryDiagnostic::EmptyQuery),
            };
        }
        let plans = self.plan(query);
        let usable = plans
            .iter()
            .any(|p| p.p_coll > S::zero() || !p.sources.is_empty());
        let docs = self.index.documents();
        let scores: Vec<S> = docs
            .par_iter()
            .map(|d| self.score_planned(&plans, d))
            .collect();
        let mut order: Vec<usize> = (0..docs.len()).collect();
        let cmp = |&a: &usize, &b: &usize| {
            cmp_desc(scores[a], scores[b])
                .then_with(|| docs[a].docno().cmp(docs[b].docno()))
                .then(a.cmp(&b))
        };
        let k = self.params.top_k.min(order.len());
        if k < order.len() {
            order.select_nth_unstable_by(k, cmp);
            order.truncate(k);
        }
        order.sort_unstable_by(cmp);
        Ranking {
            qid: query.qid().to_owned(),
            docs: order
                .into_iter()
                .enumerate()
                .map(|(i, d)| ScoredDoc {
                    docno: docs[d].docno().to_owned(),
                    score: scores[d],
                    rank: i + 1,
                })
                .collect(),
            diagnostic: (!usable).then_some(QueryDiagnostic::NoUsableTerms),
        }
    }
}

/// Log-likelihood of `query` under the model in `ranker` (summed form for
/// every kind except the two closed Dirichlet forms).
pub fn rsv_log_sum<S: Scalar>(query: &Query, doc: &Document, ranker: &Ranker<'_, S>) -> S {
    ranker.score(query, doc)
}

/// One-shot ranking. Prefer [`Ranker`] when scoring many queries.
pub fn rank_documents<S: Scalar>(
    query: &Query,
    index: &DirectIndex,
    nbr: Option<&NeighborIndex<S>>,
    params: &ModelParams<S>,
) -> Result<Ranking<S>, ParamError> {
    Ok(Ranker::new(index, *params, nbr)?.rank(query))
}
