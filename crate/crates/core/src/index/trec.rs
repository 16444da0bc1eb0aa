//! Streaming reader for TREC-style `<DOC>` collections.
//!
//! Tag names are matched case-insensitively and may contain surrounding
//! whitespace (`< docno >`). The text of a record is every character inside
//! `<DOC>` except the `<DOCNO>` value; markup of other tags acts as a word
//! separator. Text outside records is ignored.

use std::io::{BufRead, BufReader, Read};

use super::{DirectIndex, IndexBuilder};
use crate::error::IngestError;
use crate::text::{preprocess, StopList};

/// Longest run of bytes after `<` still treated as a tag.
const MAX_TAG_LEN: usize = 256;

#[derive(Debug, PartialEq, Eq)]
enum TagKind {
    Doc,
    Docno,
    Other,
    Ignored,
}

fn classify(tag: &[u8]) -> (TagKind, bool) {
    let s = String::from_utf8_lossy(tag);
    let s = s.trim();
    if s.starts_with('!') || s.starts_with('?') {
        return (TagKind::Ignored, false);
    }
    let (closing, rest) = match s.strip_prefix('/') {
        Some(r) => (true, r.trim_start()),
        None => (false, s),
    };
    let name = rest
        .split(|c: char| c.is_whitespace() || c == '/')
        .next()
        .unwrap_or("")
        .to_ascii_lowercase();
    let kind = match name.as_str() {
        "doc" => TagKind::Doc,
        "docno" => TagKind::Docno,
        _ => TagKind::Other,
    };
    (kind, closing)
}

/// Decodes the five predefined XML entities and numeric character references.
fn decode_entities(text: &str) -> String {
    if !text.contains('&') {
        return text.to_owned();
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        let end = rest[..rest.len().min(12)].find(';');
        let decoded = end.and_then(|end| {
            let name = &rest[1..end];
            let ch = match name {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                _ => {
                    let num = name.strip_prefix('#')?;
                    let code = match num.strip_prefix(['x', 'X']) {
                        Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                        None => num.parse().ok()?,
                    };
                    char::from_u32(code)
                }
            }?;
            Some((ch, end + 1))
        });
        match decoded {
            Some((ch, len)) => {
                out.push(ch);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

struct Parser<'s> {
    stoplist: &'s StopList,
    builder: IndexBuilder,
    offset: u64,
    in_tag: bool,
    tag_start: u64,
    tag: Vec<u8>,
    in_doc: bool,
    in_docno: bool,
    docno: Option<String>,
    docno_buf: Vec<u8>,
    text: Vec<u8>,
    last_docno: Option<String>,
}

impl<'s> Parser<'s> {
    fn new(stoplist: &'s StopList) -> Self {
        Self {
            stoplist,
            builder: IndexBuilder::new(),
            offset: 0,
            in_tag: false,
            tag_start: 0,
            tag: Vec::new(),
            in_doc: false,
            in_docno: false,
            docno: None,
            docno_buf: Vec::new(),
            text: Vec::new(),
            last_docno: None,
        }
    }

    fn context(&self) -> Option<&str> {
        self.docno.as_deref().or(self.last_docno.as_deref())
    }

    fn error(&self, offset: u64, reason: impl Into<String>) -> IngestError {
        IngestError::malformed(offset, self.context(), reason)
    }

    fn push_text(&mut self, b: u8) {
        if self.in_docno {
            self.docno_buf.push(b);
        } else if self.in_doc {
            self.text.push(b);
        }
    }

    /// Re-emits an aborted tag candidate as ordinary text.
    fn flush_tag_as_text(&mut self) {
        self.in_tag = false;
        self.push_text(b'<');
        let tag = std::mem::take(&mut self.tag);
        for &b in &tag {
            self.push_text(b);
        }
    }

    fn feed(&mut self, chunk: &[u8]) -> Result<(), IngestError> {
        for &b in chunk {
            if self.in_tag {
                match b {
                    b'>' => {
                        self.in_tag = false;
                        let tag = std::mem::take(&mut self.tag);
                        self.handle_tag(&tag)?;
                    }
                    b'<' => {
                        self.flush_tag_as_text();
                        self.in_tag = true;
                        self.tag_start = self.offset;
                    }
                    _ => {
                        self.tag.push(b);
                        if self.tag.len() > MAX_TAG_LEN {
                            self.flush_tag_as_text();
                        }
                    }
                }
            } else if b == b'<' {
                self.in_tag = true;
                self.tag_start = self.offset;
            } else {
                self.push_text(b);
            }
            self.offset += 1;
        }
        Ok(())
    }

    fn handle_tag(&mut self, tag: &[u8]) -> Result<(), IngestError> {
        let at = self.tag_start;
        let (kind, closing) = classify(tag);
        match (kind, closing) {
            (TagKind::Ignored, _) => {}
            (TagKind::Doc, false) => {
                if self.in_doc {
                    return Err(self.error(at, "nested <DOC> (missing </DOC>)"));
                }
                self.in_doc = true;
                self.docno = None;
                self.text.clear();
            }
            (TagKind::Doc, true) => {
                if !self.in_doc {
                    return Err(self.error(at, "</DOC> without matching <DOC>"));
                }
                if self.in_docno {
                    return Err(self.error(at, "unclosed <DOCNO> at end of record"));
                }
                let Some(docno) = self.docno.take() else {
                    return Err(self.error(at, "record has no <DOCNO>"));
                };
                let raw = String::from_utf8_lossy(&self.text);
                let tokens = preprocess(&decode_entities(&raw), self.stoplist);
                self.builder.add_document(docno.clone(), &tokens);
                self.text.clear();
                self.in_doc = false;
                self.last_docno = Some(docno);
            }
            (TagKind::Docno, false) => {
                if !self.in_doc {
                    return Err(self.error(at, "<DOCNO> outside a <DOC> record"));
                }
                if self.in_docno || self.docno.is_some() {
                    return Err(self.error(at, "duplicate <DOCNO> in record"));
                }
                self.in_docno = true;
                self.docno_buf.clear();
            }
            (TagKind::Docno, true) => {
                if !self.in_docno {
                    return Err(self.error(at, "</DOCNO> without matching <DOCNO>"));
                }
                self.in_docno = false;
                let docno = String::from_utf8_lossy(&self.docno_buf).trim().to_owned();
                if docno.is_empty() {
                    return Err(self.error(at, "empty <DOCNO>"));
                }
                self.docno = Some(docno);
            }
            (TagKind::Other, _) => {
                if self.in_docno {
                    return Err(self.error(at, "markup inside <DOCNO>"));
                }
                if self.in_doc {
                    self.text.push(b' ');
                }
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<DirectIndex, IngestError> {
        if self.in_tag {
            self.flush_tag_as_text();
        }
        if self.in_doc {
            return Err(self.error(self.offset, "unterminated <DOC> record at end of stream"));
        }
        Ok(self.builder.build())
    }
}

/// Reads a concatenation of `<DOC>` records into a [`DirectIndex`], applying
/// the text pipeline to every record. Records whose text yields no tokens are
/// kept as zero-length documents.
pub fn ingest_trec<R: Read>(source: R, stoplist: &StopList) -> Result<DirectIndex, IngestError> {
    let mut reader = BufReader::with_capacity(1 << 16, source);
    let mut parser = Parser::new(stoplist);
    loop {
        let buf = reader.fill_buf()?;
        if buf.is_empty() {
            break;
        }
        let n = buf.len();
        parser.feed(buf)?;
        reader.consume(n);
    }
    parser.finish()
}
