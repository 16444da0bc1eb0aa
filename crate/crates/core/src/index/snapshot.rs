//! Versioned binary persistence for [`DirectIndex`].
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        4 bytes  "LTIX"
//! version      u32      1
//! term_count   u32
//! term_count × { len: u32, utf8 bytes }          term id = position
//! doc_count    u32
//! doc_count  × { docno_len: u32, utf8 bytes,
//!                entry_count: u32,
//!                entry_count × { term_id: u32, count: u32 } }   ascending term id
//! ```
//!
//! Collection statistics are not stored; they are recomputed on load.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{DirectIndex, Document, Vocabulary};
use crate::error::SnapshotError;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"LTIX";
pub const SNAPSHOT_VERSION: u32 = 1;

pub(crate) fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    let len = u32::try_from(s.len()).map_err(|_| {
        std::io::Error::new(std::io::ErrorKind::InvalidInput, "string longer than u32")
    })?;
    w.write_u32::<LittleEndian>(len)?;
    w.write_all(s.as_bytes())
}

pub(crate) fn read_str<R: Read>(r: &mut R) -> Result<String, SnapshotError> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| SnapshotError::Corrupt(format!("invalid utf-8: {e}")))
}

pub(crate) fn check_magic<R: Read>(r: &mut R, expected: [u8; 4]) -> Result<(), SnapshotError> {
    let mut found = [0u8; 4];
    r.read_exact(&mut found)?;
    if found != expected {
        return Err(SnapshotError::BadMagic { expected, found });
    }
    Ok(())
}

fn len_u32(n: usize, what: &str) -> Result<u32, SnapshotError> {
    u32::try_from(n).map_err(|_| SnapshotError::Corrupt(format!("{what} exceeds u32")))
}

pub fn write_snapshot<W: Write>(index: &DirectIndex, mut w: W) -> Result<(), SnapshotError> {
    w.write_all(&SNAPSHOT_MAGIC)?;
    w.write_u32::<LittleEndian>(SNAPSHOT_VERSION)?;
    let vocab = index.vocabulary();
    w.write_u32::<LittleEndian>(len_u32(vocab.len(), "term count")?)?;
    for term in vocab.iter() {
        write_str(&mut w, term)?;
    }
    w.write_u32::<LittleEndian>(len_u32(index.doc_count(), "document count")?)?;
    for doc in index.documents() {
        write_str(&mut w, doc.docno())?;
        w.write_u32::<LittleEndian>(len_u32(doc.counts().len(), "entry count")?)?;
        for &(t, c) in doc.counts() {
            w.write_u32::<LittleEndian>(t)?;
            w.write_u32::<LittleEndian>(c)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<DirectIndex, SnapshotError> {
    check_magic(&mut r, SNAPSHOT_MAGIC)?;
    let version = r.read_u32::<LittleEndian>()?;
    if version != SNAPSHOT_VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    let term_count = r.read_u32::<LittleEndian>()?;
    let mut vocab = Vocabulary::default();
    for expected in 0..term_count {
        let term = read_str(&mut r)?;
        if vocab.intern(&term) != expected {
            return Err(SnapshotError::Corrupt(format!("duplicate term {term:?}")));
        }
    }
    let doc_count = r.read_u32::<LittleEndian>()?;
    let mut documents = Vec::with_capacity(doc_count.min(1 << 20) as usize);
    for _ in 0..doc_count {
        let docno = read_str(&mut r)?;
        let entries = r.read_u32::<LittleEndian>()?;
        let mut counts = Vec::with_capacity(entries.min(1 << 16) as usize);
        let mut prev: Option<u32> = None;
        for _ in 0..entries {
            let t = r.read_u32::<LittleEndian>()?;
            let c = r.read_u32::<LittleEndian>()?;
            if t >= term_count || c == 0 || prev.is_some_and(|p| p >= t) {
                return Err(SnapshotError::Corrupt(format!(
                    "bad entry ({t}, {c}) in document {docno:?}"
                )));
            }
            prev = Some(t);
            counts.push((t, c));
        }
        documents.push(Document::from_counts(docno, counts));
    }
    Ok(DirectIndex::from_parts(vocab, documents))
}
