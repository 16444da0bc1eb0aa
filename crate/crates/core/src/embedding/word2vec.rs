//! Reader and writer for the word2vec binary format.
//!
//! ```text
//! "<vocab_count> <dim>\n"                      ASCII header
//! vocab_count × { word bytes, ' ', dim × f32 little-endian, optional '\n' }
//! ```

use std::collections::HashSet;
use std::io::{self, BufRead, BufReader, Read, Write};

use super::{EmbeddingTable, Rejection};
use crate::error::EmbeddingError;
use crate::scalar::Scalar;

const MAX_HEADER: usize = 256;
const MAX_WORD: usize = 4096;

/// Result of [`load_embeddings`].
#[derive(Debug, Clone)]
pub struct LoadReport<S> {
    pub table: EmbeddingTable<S>,
    /// Entries declared by the header (all were read).
    pub entries_read: u64,
    /// Retained-by-filter entries dropped because every component is zero.
    pub zero_vectors: u64,
    /// Retained-by-filter entries dropped because of NaN or infinite components.
    pub non_finite_vectors: u64,
    /// Entries whose lowercased word was already present.
    pub duplicates: u64,
}

struct Counting<R> {
    inner: R,
    offset: u64,
}

impl<R: BufRead> Counting<R> {
    fn io_err(&self, source: io::Error) -> EmbeddingError {
        EmbeddingError::Io {
            offset: self.offset,
            source,
        }
    }

    fn peek(&mut self) -> Result<Option<u8>, EmbeddingError> {
        let buf = match self.inner.fill_buf() {
            Ok(b) => b,
            Err(e) => return Err(self.io_err(e)),
        };
        Ok(buf.first().copied())
    }

    fn next_byte(&mut self) -> Result<Option<u8>, EmbeddingError> {
        let b = self.peek()?;
        if b.is_some() {
            self.inner.consume(1);
            self.offset += 1;
        }
        Ok(b)
    }

    fn read_exact(&mut self, buf: &mut [u8]) -> Result<bool, EmbeddingError> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => return Ok(false),
                Ok(n) => {
                    filled += n;
                    self.offset += n as u64;
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(self.io_err(e)),
            }
        }
        Ok(true)
    }

    fn skip_whitespace(&mut self) -> Result<(), EmbeddingError> {
        while let Some(b) = self.peek()? {
            if !b.is_ascii_whitespace() {
                break;
            }
            self.next_byte()?;
        }
        Ok(())
    }
}

fn parse_header<R: BufRead>(r: &mut Counting<R>) -> Result<(u64, usize), EmbeddingError> {
    let mut line = Vec::new();
    loop {
        match r.next_byte()? {
            Some(b'\n') => break,
            Some(b) => {
                line.push(b);
                if line.len() > MAX_HEADER {
                    return Err(EmbeddingError::Header("header line too long".into()));
                }
            }
            None => return Err(EmbeddingError::Header("missing header line".into())),
        }
    }
    let text = String::from_utf8_lossy(&line);
    let mut fields = text.split_ascii_whitespace();
    let (Some(count), Some(dim), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(EmbeddingError::Header(format!(
            "expected \"<count> <dim>\", found {text:?}"
        )));
    };
    let count: u64 = count
        .parse()
        .map_err(|_| EmbeddingError::Header(format!("bad vocabulary count {count:?}")))?;
    let dim: i64 = dim
        .parse()
        .map_err(|_| EmbeddingError::Header(format!("bad dimension {dim:?}")))?;
    if dim <= 0 {
        return Err(EmbeddingError::Format(format!(
            "dimension must be positive, got {dim}"
        )));
    }
    Ok((count, dim as usize))
}

/// Streams a word2vec binary file, keeping only entries whose lowercased
/// word is in `vocab_filter`. When several source words lowercase to the
/// same term, the first usable one wins.
pub fn load_embeddings<S: Scalar, R: Read>(
    source: R,
    vocab_filter: &HashSet<String>,
) -> Result<LoadReport<S>, EmbeddingError> {
    let mut r = Counting {
        inner: BufReader::with_capacity(1 << 16, source),
        offset: 0,
    };
    let (count, dim) = parse_header(&mut r)?;
    let mut report = LoadReport {
        table: EmbeddingTable::new(dim),
        entries_read: 0,
        zero_vectors: 0,
        non_finite_vectors: 0,
        duplicates: 0,
    };
    let mut raw = vec![0u8; dim * 4];
    let mut vector = vec![S::zero(); dim];
    let mut word = Vec::new();
    for entry in 0..count {
        r.skip_whitespace()?;
        let start = r.offset;
        word.clear();
        loop {
            match r.next_byte()? {
                Some(b' ') => break,
                Some(b) => {
                    word.push(b);
                    if word.len() > MAX_WORD {
                        return Err(EmbeddingError::Format(format!(
                            "entry {entry} at byte {start}: word longer than {MAX_WORD} bytes"
                        )));
                    }
                }
                None => {
                    return Err(EmbeddingError::Truncated {
                        offset: r.offset,
                        reason: format!(
                            "header declares {count} entries, stream ended in entry {entry}"
                        ),
                    })
                }
            }
        }
        if word.is_empty() {
            return Err(EmbeddingError::Format(format!(
                "empty word at byte {start}"
            )));
        }
        if !r.read_exact(&mut raw)? {
            return Err(EmbeddingError::Truncated {
                offset: r.offset,
                reason: format!("vector of entry {entry} shorter than {dim} floats"),
            });
        }
        report.entries_read += 1;
        let term = String::from_utf8_lossy(&word).to_lowercase();
        if !vocab_filter.contains(&term) {
            continue;
        }
        for (dst, chunk) in vector.iter_mut().zip(raw.chunks_exact(4)) {
            let x = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            *dst = S::from_f32(x).unwrap_or_else(S::nan);
        }
        match report.table.insert(&term, &vector) {
            Ok(()) => {}
            Err(Rejection::ZeroVector) => report.zero_vectors += 1,
            Err(Rejection::NonFinite) => report.non_finite_vectors += 1,
            Err(Rejection::Duplicate) => report.duplicates += 1,
            Err(Rejection::WrongDimension) => unreachable!("vector built with header dimension"),
        }
    }
    r.skip_whitespace()?;
    if r.peek()?.is_some() {
        return Err(EmbeddingError::Format(format!(
            "trailing data at byte {} after {count} declared entries",
            r.offset
        )));
    }
    Ok(report)
}

/// Writes entries in word2vec binary format, one `'\n'` after each vector.
pub fn write_word2vec<'a, W, I>(mut w: W, dim: usize, entries: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a [f32])>,
    I::IntoIter: ExactSizeIterator,
{
    let entries = entries.into_iter();
    writeln!(w, "{} {}", entries.len(), dim)?;
    for (word, vector) in entries {
        if vector.len() != dim {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!(
                    "vector for {word:?} has {} components, expected {dim}",
                    vector.len()
                ),
            ));
        }
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for x in vector {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}
