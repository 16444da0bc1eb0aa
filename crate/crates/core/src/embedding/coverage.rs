use std::fmt;

use super::EmbeddingTable;
use crate::index::DirectIndex;
use crate::ranking::Query;
use crate::scalar::Scalar;

/// How much of a collection and a query set has word vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoverageReport {
    pub vocab_types: u64,
    pub embedded_types: u64,
    pub total_tokens: u64,
    pub embedded_tokens: u64,
    /// Query term occurrences over all queries.
    pub query_terms: u64,
    pub embedded_query_terms: u64,
    pub queries: u64,
    /// Queries in which no term has a vector (including empty queries).
    pub uncovered_queries: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl CoverageReport {
    pub fn type_fraction(&self) -> f64 {
        ratio(self.embedded_types, self.vocab_types)
    }

    pub fn token_fraction(&self) -> f64 {
        ratio(self.embedded_tokens, self.total_tokens)
    }

    pub fn query_term_fraction(&self) -> f64 {
        ratio(self.embedded_query_terms, self.query_terms)
    }

    pub fn uncovered_query_fraction(&self) -> f64 {
        ratio(self.uncovered_queries, self.queries)
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "vocabulary types with a vector:   {:6.2}% ({}/{})",
            100.0 * self.type_fraction(),
            self.embedded_types,
            self.vocab_types
        )?;
        writeln!(
            f,
            "collection tokens with a vector:  {:6.2}% ({}/{})",
            100.0 * self.token_fraction(),
            self.embedded_tokens,
            self.total_tokens
        )?;
        writeln!(
            f,
            "query terms with a vector:        {:6.2}% ({}/{})",
            100.0 * self.query_term_fraction(),
            self.embedded_query_terms,
            self.query_terms
        )?;
        write!(
            f,
            "queries with no embedded term:    {:6.2}% ({}/{})",
            100.0 * self.uncovered_query_fraction(),
            self.uncovered_queries,
            self.queries
        )
    }
}

pub fn coverage_stats<S: Scalar>(
    table: &EmbeddingTable<S>,
    index: &DirectIndex,
    queries: &[Query],
) -> CoverageReport {
    coverage_with(index, queries, |t| table.contains(t))
}

/// Same report with an arbitrary "has a vector" predicate, e.g. membership
/// in a cached neighbor index.
pub fn coverage_with<F: Fn(&str) -> bool>(
    index: &DirectIndex,
    queries: &[Query],
    has_vector: F,
) -> CoverageReport {
    let mut report = CoverageReport {
        vocab_types: index.vocabulary().len() as u64,
        total_tokens: index.stats().total_tokens(),
        queries: queries.len() as u64,
        ..CoverageReport::default()
    };
    for (id, term) in index.vocabulary().iter().enumerate() {
        if has_vector(term) {
            report.embedded_types += 1;
            report.embedded_tokens += index.stats().term_count(id as u32);
        }
    }
    for q in queries {
        let covered = q.terms().iter().filter(|t| has_vector(t)).count() as u64;
        report.query_terms += q.len() as u64;
        report.embedded_query_terms += covered;
        if covered == 0 {
            report.uncovered_queries += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::tests::fixture;

    #[test]
    fn partial_coverage() {
        let idx = fixture();
        let mut t = EmbeddingTable::<f32>::new(1);
        t.insert("a", &[1.0]).unwrap();
        let queries = [Query::new("1", ["a", "b"]), Query::new("2", ["c"])];
        let r = coverage_stats(&t, &idx, &queries);
        assert_eq!(r.type_fraction(), 1.0 / 3.0);
        assert_eq!(r.token_fraction(), 2.0 / 5.0);
        assert_eq!(r.query_term_fraction(), 1.0 / 3.0);
        assert_eq!(r.uncovered_query_fraction(), 0.5);
        assert!(r.to_string().contains("33.33%"));
    }

    #[test]
    fn full_coverage() {
        let idx = fixture();
        let mut t = EmbeddingTable::<f64>::new(1);
        for w in ["a", "b", "c"] {
            t.insert(w, &[1.0]).unwrap();
        }
        let r = coverage_stats(&t, &idx, &[Query::new("1", ["a", "c"])]);
        assert_eq!(
            (
                r.type_fraction(),
                r.token_fraction(),
                r.query_term_fraction(),
                r.uncovered_query_fraction()
            ),
            (1.0, 1.0, 1.0, 0.0)
        );
        let by_pred = coverage_with(&idx, &[Query::new("1", ["a", "c"])], |t| t != "b");
        assert_eq!(by_pred.embedded_types, 2);
    }
}
