//! Pre-trained word vectors restricted to the vocabulary of interest,
//! cosine similarity, thresholded neighbor lists and coverage statistics.

mod coverage;
mod neighbors;
mod word2vec;

use std::collections::HashMap;

use crate::scalar::Scalar;

pub use coverage::{coverage_stats, coverage_with, CoverageReport};
pub use neighbors::{
    alpha_translation_prob, build_neighbor_index, read_neighbor_cache, write_neighbor_cache,
    CacheKey, NeighborIndex, NEIGHBOR_MAGIC, NEIGHBOR_VERSION,
};
pub use word2vec::{load_embeddings, write_word2vec, LoadReport};

/// Why a vector was refused by [`EmbeddingTable::insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    WrongDimension,
    ZeroVector,
    NonFinite,
    Duplicate,
}

/// Dense vectors of a fixed dimension keyed by term.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<S> {
    dim: usize,
    terms: Vec<String>,
    ids: HashMap<String, usize>,
    data: Vec<S>,
}

impl<S: Scalar> EmbeddingTable<S> {
    /// # Panics
    /// If `dim == 0`.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self {
            dim,
            terms: Vec::new(),
            ids: HashMap::new(),
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a vector. The first vector stored for a term wins.
    pub fn insert(&mut self, term: &str, vector: &[S]) -> Result<(), Rejection> {
        if vector.len() != self.dim {
            return Err(Rejection::WrongDimension);
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Rejection::NonFinite);
        }
        if vector.iter().all(|x| x.is_zero()) {
            return Err(Rejection::ZeroVector);
        }
        if self.ids.contains_key(term) {
            return Err(Rejection::Duplicate);
        }
        self.ids.insert(term.to_owned(), self.terms.len());
        self.terms.push(term.to_owned());
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn get(&self, term: &str) -> Option<&[S]> {
        let i = *self.ids.get(term)?;
        Some(&self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, term: &str) -> bool {
        self.ids.contains_key(term)
    }

    /// Entries in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[S])> {
        self.terms
            .iter()
            .zip(self.data.chunks_exact(self.dim))
            .map(|(t, v)| (t.as_str(), v))
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Cosine with precomputed norms, clamped to [-1, 1]. Zero norms give 0.
pub(crate) fn cosine_with_norms<S: Scalar>(a: &[S], na: S, b: &[S], nb: S) -> S {
    let denom = na * nb;
    if denom.is_zero() {
        return S::zero();
    }
    (dot(a, b) / denom).max(-S::one()).min(S::one())
}

/// Cosine similarity `a·b / (‖a‖‖b‖)` clamped to [-1, 1].
///
/// # Panics
/// If the vectors differ in length.
pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(
        a.len(),
        b.len(),
        "cosine of vectors with different dimensions"
    );
    cosine_with_norms(a, norm(a), b, norm(b))
}
