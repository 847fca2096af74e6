//! Tab-separated interchange format, one entry per line:
//!
//! ```text
//! lemma  category  entry_id  frame  redistributions  coded|uncoded  provenance  [example...]
//! ```
//!
//! `frame` is a `;`-separated list of `Function[?]:real1|real2` slots, the
//! redistributions and provenance fields are `,`-separated. Lines starting
//! with `#` and blank lines are skipped.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::{FunctionSlot, LexicalEntry, Lexicon, Provenance, Realization, SubcatFrame};
use crate::error::{Error, Result};

pub fn parse_lexicon(name: &str, text: &str) -> Result<Lexicon> {
    let mut lex = Lexicon::new(name);
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let entry = parse_entry(line).map_err(|e| e.at_line(lineno))?;
        lex.insert(entry).map_err(|e| e.at_line(lineno))?;
    }
    Ok(lex)
}

pub(crate) fn parse_entry(line: &str) -> Result<LexicalEntry> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 7 {
        return Err(Error::Syntax(format!(
            "expected at least 7 tab-separated fields, found {}",
            fields.len()
        )));
    }
    let coded = match fields[5] {
        "coded" => true,
        "uncoded" => false,
        other => {
            return Err(Error::UnknownToken {
                what: "coded flag",
                token: other.to_string(),
            })
        }
    };
    let entry = LexicalEntry {
        lemma: fields[0].to_string(),
        category: fields[1].parse()?,
        entry_id: fields[2].to_string(),
        frame: parse_frame(fields[3])?,
        redistributions: split_list(fields[4], ',')
            .map(str::parse)
            .collect::<Result<BTreeSet<_>>>()?,
        coded,
        provenance: split_list(fields[6], ',')
            .map(str::parse::<Provenance>)
            .collect::<Result<Vec<_>>>()?,
        examples: fields[7..].iter().map(|s| s.to_string()).collect(),
    };
    entry.validate()?;
    Ok(entry)
}

fn split_list(field: &str, sep: char) -> impl Iterator<Item = &str> {
    field.split(sep).filter(move |_| !field.is_empty())
}

pub(crate) fn parse_frame(field: &str) -> Result<SubcatFrame> {
    let slots = split_list(field, ';')
        .map(parse_slot)
        .collect::<Result<Vec<_>>>()?;
    SubcatFrame::new(slots)
}

fn parse_slot(text: &str) -> Result<FunctionSlot> {
    let (head, reals) = text
        .split_once(':')
        .ok_or_else(|| Error::Syntax(format!("slot `{text}` lacks `:`")))?;
    let (func, optional) = match head.strip_suffix('?') {
        Some(f) => (f, true),
        None => (head, false),
    };
    let function = func.parse()?;
    let realizations = split_list(reals, '|')
        .map(str::parse::<Realization>)
        .collect::<Result<Vec<_>>>()?;
    FunctionSlot::new(function, realizations, optional)
}

pub(crate) fn format_frame(frame: &SubcatFrame) -> String {
    let mut out = String::new();
    for (i, slot) in frame.slots().iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        out.push_str(slot.function.as_str());
        if slot.optional {
            out.push('?');
        }
        out.push(':');
        for (j, r) in slot.realizations.iter().enumerate() {
            if j > 0 {
                out.push('|');
            }
            write!(out, "{r}").unwrap();
        }
    }
    out
}

pub(crate) fn format_entry(e: &LexicalEntry) -> String {
    let redis: Vec<&str> = e.redistributions.iter().map(|r| r.as_str()).collect();
    let prov: Vec<String> = e.provenance.iter().map(|p| p.to_string()).collect();
    let mut line = format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        e.lemma,
        e.category,
        e.entry_id,
        format_frame(&e.frame),
        redis.join(","),
        if e.coded { "coded" } else { "uncoded" },
        prov.join(","),
    );
    for ex in &e.examples {
        line.push('\t');
        line.push_str(ex);
    }
    line
}

/// Canonical serialization: lemmas in lexicographic order, entries by id.
pub fn serialize_lexicon(lex: &Lexicon) -> String {
    let mut out = String::new();
    for e in lex.entries() {
        out.push_str(&format_entry(e));
        out.push('\n');
    }
    out
}
