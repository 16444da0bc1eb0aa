//! Thresholded cosine neighbor lists and the per-term normalizers used by
//! the embedding translation probability
//!
//! ```text
//! p_cos(w|u) = cos(w, u) / Σ_{u' : cos(u', u) ≥ T} cos(u', u)
//! ```
//!
//! The sum runs over the indexed vocabulary (terms that have a vector), the
//! self pair `(u, 1)` is always present, and pairs below `T` contribute
//! nothing.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rayon::prelude::*;

use super::{cosine_with_norms, norm, EmbeddingTable};
use crate::error::{ParamError, SnapshotError};
use crate::index::snapshot::{check_magic, read_str, write_str};
use crate::scalar::Scalar;

pub const NEIGHBOR_MAGIC: [u8; 4] = *b"LTNB";
pub const NEIGHBOR_VERSION: u32 = 1;

/// Opaque 32-byte identity of the inputs a cache was built from.
pub type CacheKey = [u8; 32];

/// Per-term lists of `(neighbor, cosine)` with `cosine ≥ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborIndex<S> {
    threshold: f64,
    terms: Vec<String>,
    ids: HashMap<String, u32>,
    /// Row `u`: neighbors sorted by id, including `(u, 1)`.
    rows: Vec<Vec<(u32, S)>>,
    normalizers: Vec<S>,
}

fn validate_threshold(threshold: f64) -> Result<(), ParamError> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(ParamError::Threshold(threshold))
    }
}

impl<S: Scalar> NeighborIndex<S> {
    fn from_rows(threshold: f64, terms: Vec<String>, rows: Vec<Vec<(u32, S)>>) -> Self {
        let ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let normalizers = rows
            .iter()
            .map(|row| row.iter().fold(S::zero(), |acc, &(_, c)| acc + c))
            .collect();
        Self {
            threshold,
            terms,
            ids,
            rows,
            normalizers,
        }
    }

    /// A neighbor index where every term is only its own neighbor.
    pub fn identity<I, T>(terms: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let terms: Vec<String> = terms
            .into_iter()
            .map(|t| t.as_ref().to_owned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows = (0..terms.len() as u32)
            .map(|i| vec![(i, S::one())])
            .collect();
        Self::from_rows(1.0, terms, rows)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Number of terms with an entry.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Indexed terms in id (lexicographic) order.
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn contains(&self, term: &str) -> bool {
        self.ids.contains_key(term)
    }

    /// Neighbor list of `term` as `(id, cosine)` pairs sorted by id.
    pub fn neighbors(&self, term: &str) -> Option<&[(u32, S)]> {
        Some(&self.rows[self.id(term)? as usize])
    }

    pub fn neighbors_by_id(&self, id: u32) -> &[(u32, S)] {
        &self.rows[id as usize]
    }

    /// Z_u, the sum of the listed similarities.
    pub fn normalizer(&self, term: &str) -> Option<S> {
        Some(self.normalizers[self.id(term)? as usize])
    }

    pub fn normalizer_by_id(&self, id: u32) -> S {
        self.normalizers[id as usize]
    }

    /// Listed similarity of `(w, u)`; `None` if the pair is below threshold
    /// or either term has no vector.
    pub fn similarity(&self, w: &str, u: &str) -> Option<S> {
        let (wi, ui) = (self.id(w)?, self.id(u)?);
        let row = &self.rows[ui as usize];
        row.binary_search_by_key(&wi, |&(id, _)| id)
            .ok()
            .map(|i| row[i].1)
    }

    /// p_cos(w|u).
    ///
    /// A document term without a vector translates only to itself
    /// (`p(u|u) = 1`), which keeps exact matches of uncovered terms scoring as
    /// in the plain Dirichlet model.
    pub fn cos_translation_prob(&self, w: &str, u: &str) -> S {
        let Some(ui) = self.id(u) else {
            return if w == u { S::one() } else { S::zero() };
        };
        match self.similarity(w, u) {
            Some(c) => c / self.normalizers[ui as usize],
            None => S::zero(),
        }
    }
}

/// p_cos-α(w|u): moves α of the mass onto self-translation.
pub fn alpha_translation_prob<S: Scalar>(w: &str, u: &str, nbr: &NeighborIndex<S>, alpha: S) -> S {
    let p = nbr.cos_translation_prob(w, u);
    if w == u {
        alpha + (S::one() - alpha) * p
    } else {
        (S::one() - alpha) * p
    }
}

/// Exact all-pairs neighbor computation over `vocab ∩ table`.
///
/// Rows are computed in parallel; every row is reduced in ascending id
/// order, so the result does not depend on the number of worker threads.
pub fn build_neighbor_index<'a, S, I>(
    table: &EmbeddingTable<S>,
    vocab: I,
    threshold: f64,
) -> Result<NeighborIndex<S>, ParamError>
where
    S: Scalar,
    I: IntoIterator<Item = &'a str>,
{
    validate_threshold(threshold)?;
    let terms: Vec<String> = vocab
        .into_iter()
        .filter(|t| table.contains(t))
        .map(str::to_owned)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vectors: Vec<&[S]> = terms.iter().map(|t| table.get(t).unwrap()).collect();
    let norms: Vec<S> = vectors.iter().map(|v| norm(v)).collect();
    let t = S::lit(threshold);
    let rows: Vec<Vec<(u32, S)>> = (0..terms.len())
        .into_par_iter()
        .map(|u| {
            let mut row = Vec::new();
            for w in 0..terms.len() {
                if w == u {
                    row.push((w as u32, S::one()));
                    continue;
                }
                let (a, b) = if w < u { (w, u) } else { (u, w) };
                let c = cosine_with_norms(vectors[a], norms[a], vectors[b], norms[b]);
                if c >= t {
                    row.push((w as u32, c));
                }
            }
            row
        })
        .collect();
    Ok(NeighborIndex::from_rows(threshold, terms, rows))
}

/// Layout (little-endian):
///
/// ```text
/// magic "LTNB" | u32 version | f64 threshold | 32-byte key
/// u32 term_count | term_count × { u32 len, utf8 }          sorted terms
/// term_count × { u32 n, n × { u32 neighbor_id, f64 cosine } } ascending ids
/// ```
pub fn write_neighbor_cache<S: Scalar, W: Write>(
    nbr: &NeighborIndex<S>,
    key: &CacheKey,
    mut w: W,
) -> Result<(), SnapshotError> {
    w.write_all(&NEIGHBOR_MAGIC)?;
    w.write_u32::<LittleEndian>(NEIGHBOR_VERSION)?;
    w.write_f64::<LittleEndian>(nbr.threshold)?;
    w.write_all(key)?;
    w.write_u32::<LittleEndian>(nbr.terms.len() as u32)?;
    for t in &nbr.terms {
        write_str(&mut w, t)?;
    }
    for row in &nbr.rows {
        w.write_u32::<LittleEndian>(row.len() as u32)?;
        for &(id, c) in row {
            w.write_u32::<LittleEndian>(id)?;
            w.write_f64::<LittleEndian>(c.as_f64())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_neighbor_cache<S: Scalar, R: Read>(
    mut r: R,
) -> Result<(NeighborIndex<S>, CacheKey), SnapshotError> {
    check_magic(&mut r, NEIGHBOR_MAGIC)?;
    let version = r.read_u32::<LittleEndian>()?;
    if version != NEIGHBOR_VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    let threshold = r.read_f64::<LittleEndian>()?;
    validate_threshold(threshold).map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
    let mut key = [0u8; 32];
    r.read_exact(&mut key)?;
    let n = r.read_u32::<LittleEndian>()?;
    let mut terms = Vec::with_capacity(n.min(1 << 20) as usize);
    for _ in 0..n {
        terms.push(read_str(&mut r)?);
    }
    if terms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SnapshotError::Corrupt("terms not strictly sorted".into()));
    }
    let mut rows = Vec::with_capacity(terms.len());
    for u in 0..n {
        let len = r.read_u32::<LittleEndian>()?;
        let mut row = Vec::with_capacity(len.min(1 << 16) as usize);
        let mut has_self = false;
        for _ in 0..len {
            let id = r.read_u32::<LittleEndian>()?;
            let c = r.read_f64::<LittleEndian>()?;
            let sorted = row.last().is_none_or(|&(prev, _)| prev < id);
            if id >= n || !sorted || !(c >= threshold && c <= 1.0 + 1e-9) {
                return Err(SnapshotError::Corrupt(format!(
                    "bad neighbor ({id}, {c}) for term {:?}",
                    terms[u as usize]
                )));
            }
            has_self |= id == u;
            row.push((id, S::lit(c)));
        }
        if !has_self {
            return Err(SnapshotError::Corrupt(format!(
                "term {:?} lacks its self pair",
                terms[u as usize]
            )));
        }
        rows.push(row);
    }
    Ok((NeighborIndex::from_rows(threshold, terms, rows), key))
}
