//! Content hashes that identify a neighbor cache.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use wetlm_core::{CacheKey, DirectIndex, Query};

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> io::Result<[u8; 32]> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().into())
}

/// Terms that get neighbor rows: the collection vocabulary plus every
/// query term, so query terms absent from the collection can still be
/// translated from document terms.
pub fn neighbor_vocab(index: &DirectIndex, queries: &[Query]) -> BTreeSet<String> {
    index
        .vocabulary()
        .iter()
        .map(str::to_owned)
        .chain(queries.iter().flat_map(|q| q.terms().iter().cloned()))
        .collect()
}

pub fn vocab_hash(vocab: &BTreeSet<String>) -> [u8; 32] {
    let mut hasher = Sha256::new();
    for t in vocab {
        hasher.update(t.as_bytes());
        hasher.update(b"\n");
    }
    hasher.finalize().into()
}

pub fn cache_key(embeddings: &[u8; 32], vocab: &[u8; 32], threshold: f64) -> CacheKey {
    let mut hasher = Sha256::new();
    hasher.update(b"neighbors\0");
    hasher.update(embeddings);
    hasher.update(vocab);
    hasher.update(threshold.to_le_bytes());
    hasher.finalize().into()
}

/// `<dir>/neighbors-<vocab prefix>-t<T>.ltnb`; locatable without hashing
/// the embedding file.
pub fn default_cache_path(dir: &Path, vocab: &[u8; 32], threshold: f64) -> PathBuf {
    dir.join(format!("neighbors-{}-t{threshold}.ltnb", &hex(vocab)[..16]))
}
