//! Plain-text file formats.
//!
//! Every file starts with a `domain:` line listing the item labels. Blank
//! lines and lines starting with `#` are ignored everywhere.
//!
//! ```text
//! domain: a b c d e
//! # dimplications
//! e ~> a
//! b d ~> c
//! ```
//!
//! Implication files use `->`, set lists (bases, state lists) hold one set per
//! line with `-` for the empty set, rows files add a `mode: e|n` line followed
//! by one row of cell tokens per line.

use crate::error::{Error, Result};
use crate::model::{Dimplication, Domain, Implication, ItemSet, RootedSet};
use crate::rows::{Mode, RowFamily, SymbolRow};

/// Content lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    text.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(':'))
        .map(str::trim)
        .ok_or_else(|| Error::parse(line, format!("expected `{key}:` line")))
}

fn domain_from(line: usize, text: &str) -> Result<Domain> {
    let rest = header(line, text, "domain")?;
    Domain::new(rest.split_whitespace()).map_err(|e| Error::parse(line, e.to_string()))
}

fn with_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

/// Splits the leading `domain:` line off.
fn split_domain(text: &str) -> Result<(Domain, Vec<(usize, &str)>)> {
    let mut lines = content_lines(text);
    let (n, first) = lines.next().ok_or_else(|| Error::parse(1, "missing `domain:` line"))?;
    let dom = domain_from(n, first)?;
    Ok((dom, lines.collect()))
}

pub fn read_domain(text: &str) -> Result<Domain> {
    Ok(split_domain(text)?.0)
}

pub fn write_domain(dom: &Domain) -> String {
    format!("domain: {}\n", dom.labels().join(" "))
}

fn split_arrow<'a>(line: usize, text: &'a str, arrow: &str) -> Result<(&'a str, &'a str)> {
    let mut parts = text.splitn(2, arrow);
    let lhs = parts.next().unwrap_or("");
    let rhs = parts
        .next()
        .ok_or_else(|| Error::parse(line, format!("expected `{arrow}`")))?;
    Ok((lhs.trim(), rhs.trim()))
}

pub fn read_dimplications(text: &str) -> Result<(Domain, Vec<Dimplication>)> {
    let (dom, lines) = split_domain(text)?;
    let mut out = Vec::new();
    for (n, l) in lines {
        let (a, b) = split_arrow(n, l, "~>")?;
        let premise = with_line(n, dom.parse_set(a))?;
        let conclusion = with_line(n, dom.parse_set(b))?;
        out.push(with_line(n, Dimplication::new(premise, conclusion))?);
    }
    Ok((dom, out))
}

pub fn write_dimplications(dom: &Domain, theta: &[Dimplication]) -> String {
    let mut out = write_domain(dom);
    for d in theta {
        out.push_str(&format_dimplication(dom, d));
        out.push('\n');
    }
    out
}

pub fn format_dimplication(dom: &Domain, d: &Dimplication) -> String {
    format!("{} ~> {}", dom.format_set(d.premise()), dom.format_set(d.conclusion()))
}

pub fn read_implications(text: &str) -> Result<(Domain, Vec<Implication>)> {
    let (dom, lines) = split_domain(text)?;
    let mut out = Vec::new();
    for (n, l) in lines {
        let (a, b) = split_arrow(n, l, "->")?;
        let premise = with_line(n, dom.parse_set(a))?;
        let conclusion = with_line(n, dom.parse_set(b))?;
        out.push(with_line(n, Implication::new(premise, conclusion))?);
    }
    Ok((dom, out))
}

pub fn write_implications(dom: &Domain, sigma: &[Implication]) -> String {
    let mut out = write_domain(dom);
    for i in sigma {
        out.push_str(&format!(
            "{} -> {}\n",
            dom.format_set(i.premise()),
            dom.format_set(i.conclusion())
        ));
    }
    out
}

/// Reads a list of sets. A trailing `@ <label>` annotation (as written by
/// `--colors`) is returned alongside the set.
pub fn read_annotated_sets(text: &str) -> Result<(Domain, Vec<(ItemSet, Option<usize>)>)> {
    let (dom, lines) = split_domain(text)?;
    let mut out = Vec::new();
    for (n, l) in lines {
        let (set_text, note) = match l.split_once('@') {
            Some((s, note)) => (s, Some(note.trim())),
            None => (l, None),
        };
        let set = with_line(n, dom.parse_set(set_text))?;
        let note = match note {
            Some(label) => Some(with_line(n, dom.index_of(label))?),
            None => None,
        };
        out.push((set, note));
    }
    Ok((dom, out))
}

pub fn read_sets(text: &str) -> Result<(Domain, Vec<ItemSet>)> {
    let (dom, sets) = read_annotated_sets(text)?;
    Ok((dom, sets.into_iter().map(|(s, _)| s).collect()))
}

pub fn write_sets(dom: &Domain, sets: &[ItemSet]) -> String {
    let mut out = write_domain(dom);
    for s in sets {
        out.push_str(&dom.format_set(s));
        out.push('\n');
    }
    out
}

/// Rooted sets written as `<labels> @ <root>`.
pub fn read_circuits(text: &str) -> Result<(Domain, Vec<RootedSet>)> {
    let (dom, sets) = read_annotated_sets(text)?;
    let mut out = Vec::new();
    for (i, (carrier, root)) in sets.into_iter().enumerate() {
        let root = root.ok_or_else(|| Error::parse(i + 2, "missing `@ <root>`"))?;
        out.push(RootedSet::new(carrier, root)?);
    }
    Ok((dom, out))
}

pub fn write_circuits(dom: &Domain, circuits: &[RootedSet]) -> String {
    let mut out = write_domain(dom);
    for c in circuits {
        out.push_str(&format!("{} @ {}\n", dom.format_set(c.carrier()), dom.label(c.root())));
    }
    out
}

pub fn read_rows(text: &str) -> Result<RowFamily> {
    let (dom, lines) = split_domain(text)?;
    let mut lines = lines.into_iter();
    let (n, l) = lines.next().ok_or_else(|| Error::parse(2, "missing `mode:` line"))?;
    let mode = match header(n, l, "mode")? {
        "e" => Mode::E,
        "n" => Mode::N,
        other => return Err(Error::parse(n, format!("unknown mode `{other}`"))),
    };
    let mut rows = Vec::new();
    for (n, l) in lines {
        rows.push(with_line(n, SymbolRow::parse_tokens(mode, dom.width(), l))?);
    }
    RowFamily::new(dom, mode, rows)
}

pub fn write_rows(f: &RowFamily) -> String {
    f.to_text()
}
