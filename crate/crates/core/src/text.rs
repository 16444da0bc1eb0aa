//! Tokenization and token filtering shared by documents and queries.
//!
//! The rules reproduce a Terrier-style English pipeline without stemming:
//!
//! 1. every character that is not an ASCII letter or digit is a separator;
//! 2. letters are lowercased;
//! 3. stop words are dropped;
//! 4. tokens with more than [`MAX_DIGITS`] digits are dropped;
//! 5. tokens containing a run of more than [`MAX_RUN`] identical characters
//!    are dropped.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead};

/// Tokens with more digit characters than this (anywhere in the token) are removed.
pub const MAX_DIGITS: usize = 4;

/// Tokens containing a run of identical characters longer than this are removed.
pub const MAX_RUN: usize = 3;

const DEFAULT_STOPLIST: &str = include_str!("../data/english_stoplist.txt");

/// A non-empty lowercase token over `[a-z0-9]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    /// Validates `text` against the token alphabet.
    pub fn new(text: impl Into<String>) -> Option<Token> {
        let text = text.into();
        if !text.is_empty()
            && text
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        {
            Some(Token(text))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Set of lowercase words removed before indexing and querying.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList {
    words: BTreeSet<String>,
}

impl StopList {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The English list shipped with the crate.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }

    /// Builds a list from arbitrary words; entries are lowercased and deduplicated.
    pub fn from_words<I, W>(words: I) -> Self
    where
        I: IntoIterator<Item = W>,
        W: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Self { words }
    }

    /// Parses the stop list file format: one word per line, `#` comment
    /// lines and blank lines ignored.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn read<R: BufRead>(reader: R) -> io::Result<Self> {
        let mut words = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                words.push(line.to_owned());
            }
        }
        Ok(Self::from_words(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Splits on every non-alphanumeric ASCII character and lowercases.
pub fn tokenize(raw: &str) -> Vec<Token> {
    raw.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|frag| !frag.is_empty())
        .map(|frag| Token(frag.to_ascii_lowercase()))
        .collect()
}

fn too_many_digits(token: &str) -> bool {
    token.bytes().filter(u8::is_ascii_digit).count() > MAX_DIGITS
}

fn has_long_run(token: &str) -> bool {
    let bytes = token.as_bytes();
    let mut run = 1;
    for pair in bytes.windows(2) {
        if pair[0] == pair[1] {
            run += 1;
            if run > MAX_RUN {
                return true;
            }
        } else {
            run = 1;
        }
    }
    false
}

/// Applies the stop list, then the digit-count and identical-run rules.
pub fn filter_tokens(tokens: Vec<Token>, stoplist: &StopList) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !stoplist.contains(t.as_str()))
        .filter(|t| !too_many_digits(t.as_str()) && !has_long_run(t.as_str()))
        .collect()
}

/// `filter_tokens(tokenize(raw), stoplist)`.
pub fn preprocess(raw: &str, stoplist: &StopList) -> Vec<Token> {
    filter_tokens(tokenize(raw), stoplist)
}
