//! Query files: TREC `<top>` topics, `<topic>` XML topics, or plain
//! `qid<whitespace>text` lines. Only the title is used as query text.

use thiserror::Error;
use wetlm_core::{Query, StopList};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopicError {
    #[error("topic {index}: missing {what}")]
    Missing { index: usize, what: &'static str },
    #[error("line {0}: expected `qid text`")]
    BadLine(usize),
    #[error("duplicate query id {0}")]
    Duplicate(String),
}

/// Raw query text keyed by qid, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub qid: String,
    pub title: String,
}

/// Text between `<tag>` and the next tag (case-insensitive tag names).
fn field(block: &str, tag: &str) -> Option<String> {
    let lower = block.to_ascii_lowercase();
    let open = format!("<{tag}");
    let start = lower.find(&open)?;
    let after = start + lower[start..].find('>')? + 1;
    let end = lower[after..].find('<').map_or(block.len(), |e| after + e);
    Some(decode(block[after..end].trim()))
}

fn decode(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&apos;", "'")
        .replace("&amp;", "&")
}

fn blocks<'a>(text: &'a str, tag: &str) -> Vec<&'a str> {
    let lower = text.to_ascii_lowercase();
    let (open, close) = (format!("<{tag}"), format!("</{tag}>"));
    let mut out = Vec::new();
    let mut pos = 0;
    while let Some(s) = lower[pos..].find(&open) {
        let s = pos + s;
        // `<top>` must not match `<topic>`.
        let next = lower.as_bytes().get(s + open.len()).copied();
        if !matches!(
            next,
            Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
        ) {
            pos = s + open.len();
            continue;
        }
        let e = lower[s..].find(&close).map_or(text.len(), |e| s + e);
        out.push(&text[s..e]);
        pos = e;
    }
    out
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> &'a str {
    if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
        s[prefix.len()..].trim_start()
    } else {
        s
    }
}

pub fn parse_topics(text: &str) -> Result<Vec<Topic>, TopicError> {
    let mut topics = Vec::new();
    let trec = blocks(text, "top");
    let xml = blocks(text, "topic");
    if !trec.is_empty() {
        for (i, b) in trec.iter().enumerate() {
            let num = field(b, "num").ok_or(TopicError::Missing {
                index: i + 1,
                what: "<num>",
            })?;
            let title = field(b, "title").ok_or(TopicError::Missing {
                index: i + 1,
                what: "<title>",
            })?;
            topics.push(Topic {
                qid: strip_prefix_ci(&num, "Number:").to_owned(),
                title: strip_prefix_ci(&title, "Topic:").to_owned(),
            });
        }
    } else if !xml.is_empty() {
        for (i, b) in xml.iter().enumerate() {
            let qid =
                field(b, "identifier")
                    .or_else(|| field(b, "num"))
                    .ok_or(TopicError::Missing {
                        index: i + 1,
                        what: "<identifier>",
                    })?;
            let title = field(b, "title").ok_or(TopicError::Missing {
                index: i + 1,
                what: "<title>",
            })?;
            topics.push(Topic { qid, title });
        }
    } else {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (qid, rest) = line
                .split_once(|c: char| c.is_whitespace())
                .ok_or(TopicError::BadLine(i + 1))?;
            topics.push(Topic {
                qid: qid.to_owned(),
                title: rest.trim().to_owned(),
            });
        }
    }
    let mut seen = std::collections::HashSet::new();
    for t in &topics {
        if t.qid.is_empty() {
            return Err(TopicError::Missing {
                index: 0,
                what: "query id",
            });
        }
        if !seen.insert(t.qid.as_str()) {
            return Err(TopicError::Duplicate(t.qid.clone()));
        }
    }
    Ok(topics)
}

/// Preprocesses titles exactly like document text.
pub fn to_queries(topics: &[Topic], stoplist: &StopList) -> Vec<Query> {
    topics
        .iter()
        .map(|t| Query::from_text(t.qid.as_str(), &t.title, stoplist))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trec_topics() {
        let text = "<top>\n<num> Number: 401\n<title> Topic: Foreign minorities, Germany\n<desc> Description:\nignored\n</top>\n<TOP><NUM>402<TITLE>Behavioral genetics</TOP>";
        let t = parse_topics(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            t[0],
            Topic {
                qid: "401".into(),
                title: "Foreign minorities, Germany".into()
            }
        );
        assert_eq!(t[1].qid, "402");
        assert_eq!(t[1].title, "Behavioral genetics");
    }

    #[test]
    fn xml_topics() {
        let text = r#"<topics><topic lang="en"><identifier>CHIC-001</identifier>
<title>Silent film &amp; music</title><description>x</description></topic>
<topic><identifier>CHIC-002</identifier><title>Roman coins</title></topic></topics>"#;
        let t = parse_topics(text).unwrap();
        assert_eq!(
            t[0],
            Topic {
                qid: "CHIC-001".into(),
                title: "Silent film & music".into()
            }
        );
        assert_eq!(t[1].qid, "CHIC-002");
    }

    #[test]
    fn plain_lines() {
        let t = parse_topics("# comment\n1\tthe red car\n\n2 blue  sky\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].title, "blue  sky");
        assert_eq!(parse_topics("lonely\n"), Err(TopicError::BadLine(1)));
        assert_eq!(
            parse_topics("1 a\n1 b\n"),
            Err(TopicError::Duplicate("1".into()))
        );
    }

    #[test]
    fn missing_title() {
        assert_eq!(
            parse_topics("<top><num>1</num></top>"),
            Err(TopicError::Missing {
                index: 1,
                what: "<title>"
            })
        );
    }

    #[test]
    fn queries_share_document_preprocessing() {
        let t = parse_topics("7 The Zzzz1937 WAR years\n").unwrap();
        let q = to_queries(&t, &StopList::english());
        assert_eq!(q[0].terms(), ["war", "years"]);
    }
}
