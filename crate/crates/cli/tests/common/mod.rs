//! Seeded synthetic collections, queries, judgments and word vectors.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wetlm_core::{write_word2vec, DirectIndex, IndexBuilder, Query};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn term(i: usize) -> String {
    format!("t{i}x")
}

pub struct Synthetic {
    pub docs: Vec<(String, Vec<String>)>,
    pub queries: Vec<(String, Vec<String>)>,
    pub qrels: Vec<(String, String, u32)>,
    pub dim: usize,
    pub vectors: Vec<(String, Vec<f32>)>,
}

pub struct Files {
    pub dir: PathBuf,
    pub collection: PathBuf,
    pub queries: PathBuf,
    pub qrels: PathBuf,
    pub embeddings: PathBuf,
}

/// Skewed term draw: low ids are frequent.
fn draw(rng: &mut ChaCha8Rng, vocab: usize) -> usize {
    let u: f64 = rng.gen();
    ((u * u) * vocab as f64) as usize % vocab
}

/// `vocab` collection terms plus a few query-only terms; about 80% of all
/// terms get a vector. Vectors are grouped around shared centers so that
/// moderate thresholds produce non-trivial neighbor lists.
pub fn synthetic(
    seed: u64,
    n_docs: usize,
    n_queries: usize,
    vocab: usize,
    dim: usize,
) -> Synthetic {
    let mut r = rng(seed);
    let docs: Vec<(String, Vec<String>)> = (0..n_docs)
        .map(|d| {
            let len = r.gen_range(1..60);
            (
                format!("doc{d:05}"),
                (0..len).map(|_| term(draw(&mut r, vocab))).collect(),
            )
        })
        .collect();
    let extra = vocab / 20 + 1;
    let queries: Vec<(String, Vec<String>)> = (0..n_queries)
        .map(|q| {
            let len = r.gen_range(1..=5);
            let terms = (0..len)
                .map(|_| {
                    if r.gen_bool(0.1) {
                        term(vocab + r.gen_range(0..extra))
                    } else {
                        term(r.gen_range(0..vocab))
                    }
                })
                .collect();
            (format!("q{q:03}"), terms)
        })
        .collect();
    let mut qrels = Vec::new();
    for (qid, terms) in &queries {
        for (docno, toks) in &docs {
            let hits = toks.iter().filter(|t| terms.contains(t)).count();
            if hits > 0 {
                let grade = u32::from(r.gen_bool((0.3 + 0.1 * hits as f64).min(0.9)));
                qrels.push((qid.clone(), docno.clone(), grade));
            } else if r.gen_bool(0.01) {
                qrels.push((qid.clone(), docno.clone(), 0));
            }
        }
    }
    let centers: Vec<Vec<f32>> = (0..8)
        .map(|_| (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut vectors = Vec::new();
    for i in 0..vocab + extra {
        if !r.gen_bool(0.8) {
            continue;
        }
        let c = &centers[r.gen_range(0..centers.len())];
        let v = c.iter().map(|x| x + r.gen_range(-0.6..0.6)).collect();
        vectors.push((term(i), v));
    }
    Synthetic {
        docs,
        queries,
        qrels,
        dim,
        vectors,
    }
}

impl Synthetic {
    pub fn index(&self) -> DirectIndex {
        let mut b = IndexBuilder::new();
        for (docno, toks) in &self.docs {
            b.add_tokens(docno.as_str(), toks);
        }
        b.build()
    }

    pub fn queries(&self) -> Vec<Query> {
        self.queries
            .iter()
            .map(|(q, t)| Query::new(q.as_str(), t.iter().map(String::as_str)))
            .collect()
    }

    pub fn trec_text(&self) -> String {
        let mut s = String::new();
        for (docno, toks) in &self.docs {
            let _ = writeln!(
                s,
                "<DOC>\n<DOCNO>{docno}</DOCNO>\n<TEXT>\n{}\n</TEXT>\n</DOC>",
                toks.join(" ")
            );
        }
        s
    }

    pub fn topics_text(&self) -> String {
        self.queries
            .iter()
            .map(|(q, t)| format!("{q}\t{}\n", t.join(" ")))
            .collect()
    }

    pub fn qrels_text(&self) -> String {
        self.qrels
            .iter()
            .map(|(q, d, g)| format!("{q} 0 {d} {g}\n"))
            .collect()
    }

    pub fn word2vec_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_word2vec(
            &mut out,
            self.dim,
            self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice())),
        )
        .unwrap();
        out
    }

    pub fn write_files(&self, dir: &Path) -> Files {
        let f = Files {
            dir: dir.to_owned(),
            collection: dir.join("collection.trec"),
            queries: dir.join("topics.txt"),
            qrels: dir.join("qrels.txt"),
            embeddings: dir.join("vectors.bin"),
        };
        std::fs::write(&f.collection, self.trec_text()).unwrap();
        std::fs::write(&f.queries, self.topics_text()).unwrap();
        std::fs::write(&f.qrels, self.qrels_text()).unwrap();
        std::fs::write(&f.embeddings, self.word2vec_bytes()).unwrap();
        f
    }
}

/// Runs the command line in-process and returns (exit code, stdout).
pub fn wetlm(args: &[&str]) -> (i32, String) {
    use clap::Parser;
    let mut argv = vec!["wetlm"];
    argv.extend_from_slice(args);
    let cli = match wetlm_cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return (2, e.to_string()),
    };
    let mut out = Vec::new();
    match wetlm_cli::run(&cli, &mut out) {
        Ok(()) => (0, String::from_utf8(out).unwrap()),
        Err(e) => (
            e.exit_code(),
            format!("{}{e}", String::from_utf8_lossy(&out)),
        ),
    }
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
