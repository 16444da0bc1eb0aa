//! Relevance judgments, run files and the retrieval metrics computed from them.

mod metrics;
mod qrels;
mod run;
mod ttest;

pub use metrics::{
    average_precision, evaluate, mean_average_precision, precision_at_k, Evaluation, QueryScore,
    DEFAULT_CUTOFF,
};
pub use qrels::{read_qrels, Qrels};
pub use run::{read_run, write_run, RunEntry, RunResult};
pub use ttest::{
    compare_evaluations, ln_gamma, paired_t_test, regularized_incomplete_beta, student_t_two_sided,
    Comparison, TTest,
};
