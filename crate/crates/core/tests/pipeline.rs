//! End-to-end use of the public API: ingest, snapshot, embeddings,
//! ranking, run files and evaluation.

use std::collections::HashSet;

use wetlm_core::{
    build_neighbor_index, evaluate, ingest_trec, load_embeddings, read_neighbor_cache, read_qrels,
    read_run, read_snapshot, write_neighbor_cache, write_run, write_snapshot, write_word2vec,
    EmbeddingTableF32, ModelKind, ModelParams, ModelParamsF64, NeighborIndexF64, Query, Ranker,
    RunResult, StopList,
};

const COLLECTION: &str = "\
<DOC><DOCNO>cat1</DOCNO><TEXT>The cat sat on the mat with a kitten.</TEXT></DOC>
<DOC><DOCNO>cat2</DOCNO><TEXT>Kitten and kitten again; a kitten naps.</TEXT></DOC>
<DOC><DOCNO>dog1</DOCNO><TEXT>A dog chased the ball across the park.</TEXT></DOC>
<DOC><DOCNO>dog2</DOCNO><TEXT>Puppy training: the puppy fetched a ball.</TEXT></DOC>
<DOC><DOCNO>car1</DOCNO><TEXT>The engine of the car needs oil.</TEXT></DOC>
";

const QRELS: &str = "q1 0 cat1 1\nq1 0 cat2 1\nq1 0 dog1 0\nq2 0 dog2 2\nq2 0 dog1 1\n";

fn vectors() -> Vec<(&'static str, Vec<f32>)> {
    vec![
        ("cat", vec![1.0, 0.1, 0.0]),
        ("kitten", vec![0.95, 0.2, 0.0]),
        ("dog", vec![0.1, 1.0, 0.0]),
        ("puppy", vec![0.15, 0.97, 0.05]),
        ("ball", vec![0.0, 0.6, 0.6]),
        ("engine", vec![0.0, 0.0, 1.0]),
        ("unrelated", vec![-1.0, -1.0, 0.3]),
    ]
}

fn setup() -> (wetlm_core::DirectIndex, Vec<Query>, NeighborIndexF64) {
    let stop = StopList::english();
    let built = ingest_trec(COLLECTION.as_bytes(), &stop).unwrap();
    let mut snap = Vec::new();
    write_snapshot(&built, &mut snap).unwrap();
    let index = read_snapshot(snap.as_slice()).unwrap();
    assert_eq!(index.doc_count(), 5);
    assert_eq!(index.vocabulary().len(), built.vocabulary().len());

    let queries = vec![
        Query::from_text("q1", "The CAT!", &stop),
        Query::from_text("q2", "a puppy", &stop),
    ];
    assert_eq!(queries[0].terms(), ["cat"]);
    assert_eq!(queries[1].terms(), ["puppy"]);

    let mut bin = Vec::new();
    let v = vectors();
    write_word2vec(&mut bin, 3, v.iter().map(|(w, x)| (*w, x.as_slice()))).unwrap();
    let filter: HashSet<String> = index
        .vocabulary()
        .iter()
        .map(str::to_owned)
        .chain(queries.iter().flat_map(|q| q.terms().to_vec()))
        .collect();
    let report = load_embeddings::<f64, _>(bin.as_slice(), &filter).unwrap();
    assert_eq!(report.entries_read, 7);
    assert!(!report.table.contains("unrelated"));
    let nbr = build_neighbor_index(&report.table, filter.iter().map(String::as_str), 0.9).unwrap();

    let mut cache = Vec::new();
    write_neighbor_cache(&nbr, &[7; 32], &mut cache).unwrap();
    let (restored, key) = read_neighbor_cache::<f64, _>(cache.as_slice()).unwrap();
    assert_eq!(key, [7; 32]);
    assert_eq!(restored, nbr);
    (index, queries, restored)
}

#[test]
fn embedding_model_retrieves_related_documents() {
    let (index, queries, nbr) = setup();
    let lm = Ranker::new(
        &index,
        ModelParamsF64::new(ModelKind::DirichletSum, 10.0),
        None,
    )
    .unwrap();
    let we = Ranker::new(
        &index,
        ModelParamsF64::new(ModelKind::Wetlm, 10.0).with_threshold(0.9),
        Some(&nbr),
    )
    .unwrap();

    // "cat" occurs in cat1 only; the kitten-heavy cat2 needs translation.
    let q = &queries[0];
    let lm_docs = lm.rank(q).docs;
    let we_docs = we.rank(q).docs;
    let pos = |docs: &[wetlm_core::ScoredDoc<f64>], d: &str| {
        docs.iter().position(|x| x.docno == d).unwrap()
    };
    assert_eq!(lm_docs[0].docno, "cat1");
    assert!(pos(&we_docs, "cat2") < pos(&lm_docs, "cat2"));
    assert!(we_docs[..2].iter().all(|d| d.docno.starts_with("cat")));
}

#[test]
fn run_file_round_trip_and_evaluation() {
    let (index, queries, nbr) = setup();
    let ranker = Ranker::new(
        &index,
        ModelParamsF64::new(ModelKind::WetlmAlpha, 10.0)
            .with_threshold(0.9)
            .with_alpha(0.6),
        Some(&nbr),
    )
    .unwrap();
    let rankings: Vec<_> = queries.iter().map(|q| ranker.rank(q)).collect();
    let run = RunResult::from_rankings("alpha", &rankings);
    run.check_invariants().unwrap();

    let mut text = Vec::new();
    write_run(&run, &mut text, Some("fixture")).unwrap();
    let back = read_run(text.as_slice()).unwrap();
    assert_eq!(back.ranked_docnos("q1"), run.ranked_docnos("q1"));

    let qrels = read_qrels(QRELS.as_bytes()).unwrap();
    let e = evaluate(&back, &qrels, 10).unwrap();
    assert_eq!(e.queries.len(), 2);
    assert_eq!(e.ap_of("q1"), Some(1.0));
    assert!(e.map > 0.5 && e.map <= 1.0);
}

#[test]
fn single_precision_agrees_with_double() {
    let (index, queries, _) = setup();
    let mut table = EmbeddingTableF32::new(3);
    for (w, v) in vectors() {
        table.insert(w, &v).unwrap();
    }
    let vocab: Vec<&str> = index.vocabulary().iter().chain(["puppy"]).collect();
    let nbr32 = build_neighbor_index(&table, vocab, 0.9).unwrap();
    let r32 = Ranker::new(
        &index,
        ModelParams::<f32>::new(ModelKind::Wetlm, 10.0).with_threshold(0.9),
        Some(&nbr32),
    )
    .unwrap();
    let (_, _, nbr64) = setup();
    let r64 = Ranker::new(
        &index,
        ModelParamsF64::new(ModelKind::Wetlm, 10.0).with_threshold(0.9),
        Some(&nbr64),
    )
    .unwrap();
    for q in &queries {
        let a = r32.score_all(q);
        let b = r64.score_all(q);
        for (x, y) in a.iter().zip(&b) {
            assert!((f64::from(*x) - y).abs() < 1e-4, "{x} vs {y}");
        }
        let o32: Vec<_> = r32.rank(q).docs.into_iter().map(|d| d.docno).collect();
        let o64: Vec<_> = r64.rank(q).docs.into_iter().map(|d| d.docno).collect();
        assert_eq!(o32, o64);
    }
}
