//! In-memory retrieval engine for query-likelihood language models with
//! Dirichlet smoothing, mutual-information translation models and
//! word-embedding translation models, plus TREC-style evaluation.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the bottom of this file fix the scalar for the common cases.
//!
//! ```
//! use wetlm_core::{IndexBuilder, ModelKind, ModelParamsF64, Query, rank_documents};
//!
//! let mut b = IndexBuilder::new();
//! b.add_tokens("d1", ["a", "b", "a"]).add_tokens("d2", ["b", "c"]);
//! let index = b.build();
//! let params = ModelParamsF64::new(ModelKind::DirichletSum, 1.0);
//! let ranking = rank_documents(&Query::new("q1", ["a"]), &index, None, &params).unwrap();
//! assert_eq!(ranking.docs[0].docno, "d1");
//! ```

#![cfg_attr(test, allow(clippy::approx_constant, clippy::excessive_precision))]

pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod index;
pub mod ranking;
mod scalar;
pub mod text;

pub use embedding::{
    alpha_translation_prob, build_neighbor_index, coverage_stats, coverage_with, load_embeddings,
    read_neighbor_cache, write_neighbor_cache, write_word2vec, CacheKey, CoverageReport,
    EmbeddingTable, LoadReport, NeighborIndex,
};
pub use error::{EmbeddingError, EvalError, IngestError, ParamError, SnapshotError};
pub use evaluation::{
    average_precision, compare_evaluations, evaluate, mean_average_precision, paired_t_test,
    precision_at_k, read_qrels, read_run, write_run, Comparison, Evaluation, Qrels, RunEntry,
    RunResult, TTest,
};
pub use index::{
    ingest_trec, read_snapshot, write_snapshot, CollectionStats, DirectIndex, Document,
    IndexBuilder, TermId, Vocabulary,
};
pub use ranking::{
    dirichlet_rsv_closed, dirichlet_term_prob, rank_documents, terrier_rsv, wetlm_term_prob,
    ModelKind, ModelParams, Query, Ranker, Ranking, ScoredDoc, SmoothingFallback,
};
pub use scalar::Scalar;
pub use text::{preprocess, tokenize, StopList, Token};

pub type EmbeddingTableF32 = EmbeddingTable<f32>;
pub type EmbeddingTableF64 = EmbeddingTable<f64>;
pub type NeighborIndexF32 = NeighborIndex<f32>;
pub type NeighborIndexF64 = NeighborIndex<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type RankerF64<'a> = Ranker<'a, f64>;
pub type RankingF64 = Ranking<f64>;
pub type RankingF32 = Ranking<f32>;
pub type TTestF64 = TTest<f64>;
