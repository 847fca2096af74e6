//! Passage-style markup:
//!
//! ```text
//! <S id="s1" full="yes">
//!   <W ix="0">Depuis</W>
//!   <G type="GP" start="0" end="3"/>
//!   <R type="MOD-V" src="2" tgt="11"/>
//! </S>
//! ```
//!
//! `W` elements must be numbered from 0 in document order. `full` defaults to
//! `yes`. An optional `DOCUMENT` element may wrap the sentences.

use std::borrow::Cow;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{Constituent, Relation, SentenceAnnotation};
use crate::error::{Error, Result};

fn line_of(text: &str, pos: u64) -> usize {
    let pos = (pos as usize).min(text.len());
    text.as_bytes()[..pos]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Syntax(msg.into())
}

struct Attrs<'a> {
    element: &'static str,
    pairs: Vec<(Vec<u8>, Cow<'a, str>)>,
}

impl<'a> Attrs<'a> {
    fn read(e: &'a BytesStart<'a>, element: &'static str) -> Result<Attrs<'a>> {
        let mut pairs = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|err| malformed(format!("bad attribute on <{element}>: {err}")))?;
            let value = a
                .unescape_value()
                .map_err(|err| malformed(format!("bad attribute value on <{element}>: {err}")))?;
            pairs.push((a.key.as_ref().to_vec(), value));
        }
        Ok(Attrs { element, pairs })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key.as_bytes())
            .map(|(_, v)| v.as_ref())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| malformed(format!("<{}> lacks attribute `{key}`", self.element)))
    }

    fn index(&self, key: &str) -> Result<usize> {
        let v = self.required(key)?;
        v.parse()
            .map_err(|_| malformed(format!("<{}> {key}=\"{v}\" is not an index", self.element)))
    }
}

fn constituent(e: &BytesStart) -> Result<Constituent> {
    let a = Attrs::read(e, "G")?;
    Ok(Constituent {
        ctype: a.required("type")?.parse()?,
        start: a.index("start")?,
        end: a.index("end")?,
    })
}

fn relation(e: &BytesStart) -> Result<Relation> {
    let a = Attrs::read(e, "R")?;
    Ok(Relation {
        rtype: a.required("type")?.parse()?,
        source: a.index("src")?,
        target: a.index("tgt")?,
    })
}

#[derive(Default)]
struct Builder {
    current: Option<SentenceAnnotation>,
    /// Inside a `<W>`: its index and the text gathered so far.
    word: Option<(usize, String)>,
    /// Inside a non-empty `<G>` or `<R>`, waiting for its end tag.
    pending_end: Option<&'static str>,
}

pub fn parse_passage(text: &str) -> Result<Vec<SentenceAnnotation>> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut out = Vec::new();
    let mut b = Builder::default();
    loop {
        let event = reader.read_event().map_err(|e| {
            malformed(e.to_string()).at_line(line_of(text, reader.buffer_position()))
        })?;
        // last byte of the event just read
        let pos = reader.buffer_position().saturating_sub(1);
        let done = matches!(event, Event::Eof);
        step(&mut b, event, &mut out).map_err(|e| e.at_line(line_of(text, pos)))?;
        if done {
            return Ok(out);
        }
    }
}

fn step(b: &mut Builder, event: Event, out: &mut Vec<SentenceAnnotation>) -> Result<()> {
    if let Some(expected) = b.pending_end {
        return match event {
            Event::End(e) if e.name().as_ref() == expected.as_bytes() => {
                b.pending_end = None;
                Ok(())
            }
            Event::Comment(_) => Ok(()),
            _ => Err(malformed(format!("<{expected}> must be empty"))),
        };
    }
    if let Some((_, word)) = b.word.as_mut() {
        return match event {
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| malformed(e.to_string()))?;
                word.push_str(&s);
                Ok(())
            }
            Event::CData(t) => {
                word.push_str(&String::from_utf8_lossy(&t));
                Ok(())
            }
            Event::End(e) if e.name().as_ref() == b"W" => {
                let (ix, word) = b.word.take().unwrap();
                let s = b.current.as_mut().expect("inside a sentence");
                if ix != s.tokens.len() {
                    return Err(malformed(format!(
                        "<W ix=\"{ix}\"> out of sequence, expected ix=\"{}\"",
                        s.tokens.len()
                    )));
                }
                s.tokens.push(word);
                Ok(())
            }
            _ => Err(malformed("<W> may only contain text")),
        };
    }
    match (&mut b.current, event) {
        (_, Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_)) => Ok(()),
        (None, Event::Eof) => Ok(()),
        (Some(s), Event::Eof) => Err(malformed(format!(
            "unterminated <S id=\"{}\">",
            s.sentence_id
        ))),
        (None, Event::Start(e)) if e.name().as_ref() == b"DOCUMENT" => Ok(()),
        (None, Event::End(e)) if e.name().as_ref() == b"DOCUMENT" => Ok(()),
        (None, Event::Start(e)) if e.name().as_ref() == b"S" => {
            let a = Attrs::read(&e, "S")?;
            let full_parse = match a.get("full") {
                None | Some("yes") => true,
                Some("no") => false,
                Some(other) => return Err(malformed(format!("full=\"{other}\" is not yes|no"))),
            };
            b.current = Some(SentenceAnnotation {
                sentence_id: a.required("id")?.to_string(),
                tokens: Vec::new(),
                constituents: Vec::new(),
                relations: Vec::new(),
                full_parse,
            });
            Ok(())
        }
        (Some(_), Event::Start(e)) if e.name().as_ref() == b"W" => {
            let a = Attrs::read(&e, "W")?;
            b.word = Some((a.index("ix")?, String::new()));
            Ok(())
        }
        (Some(s), Event::Empty(e)) if e.name().as_ref() == b"G" => {
            s.constituents.push(constituent(&e)?);
            Ok(())
        }
        (Some(s), Event::Start(e)) if e.name().as_ref() == b"G" => {
            s.constituents.push(constituent(&e)?);
            b.pending_end = Some("G");
            Ok(())
        }
        (Some(s), Event::Empty(e)) if e.name().as_ref() == b"R" => {
            s.relations.push(relation(&e)?);
            Ok(())
        }
        (Some(s), Event::Start(e)) if e.name().as_ref() == b"R" => {
            s.relations.push(relation(&e)?);
            b.pending_end = Some("R");
            Ok(())
        }
        (Some(_), Event::End(e)) if e.name().as_ref() == b"S" => {
            let s = b.current.take().unwrap();
            s.validate()?;
            out.push(s);
            Ok(())
        }
        (_, Event::Empty(e) | Event::Start(e)) => Err(malformed(format!(
            "unexpected element <{}>",
            String::from_utf8_lossy(e.name().as_ref())
        ))),
        (_, Event::End(e)) => Err(malformed(format!(
            "unexpected </{}>",
            String::from_utf8_lossy(e.name().as_ref())
        ))),
        (_, Event::Text(t)) => Err(malformed(format!(
            "stray text `{}`",
            String::from_utf8_lossy(&t)
        ))),
        (_, _) => Err(malformed("unexpected markup")),
    }
}

pub fn serialize_passage(sentences: &[SentenceAnnotation]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&format!(
            "<S id=\"{}\" full=\"{}\">\n",
            escape(s.sentence_id.as_str()),
            if s.full_parse { "yes" } else { "no" }
        ));
        for (i, t) in s.tokens.iter().enumerate() {
            out.push_str(&format!("  <W ix=\"{i}\">{}</W>\n", escape(t.as_str())));
        }
        for c in &s.constituents {
            out.push_str(&format!(
                "  <G type=\"{}\" start=\"{}\" end=\"{}\"/>\n",
                c.ctype, c.start, c.end
            ));
        }
        for r in &s.relations {
            out.push_str(&format!(
                "  <R type=\"{}\" src=\"{}\" tgt=\"{}\"/>\n",
                r.rtype, r.source, r.target
            ));
        }
        out.push_str("</S>\n");
    }
    out
}
