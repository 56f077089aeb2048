//! Top-down exploration: an expert (or an oracle holding a hidden base)
//! answers queries "does every state missing all of `A` also miss `q`?", and
//! every confirmed query cuts the chunk `{K : A ∩ K = ∅, q ∈ K}` out of the
//! current space.
//!
//! Candidates run through premise sizes `1..=a_max`, lexicographically within
//! a size, and are skipped when already rejected or when the chunk is already
//! empty. Rejections are recorded but never used to infer anything.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::base::{base_from_rows, is_learning_space, BaseFamily};
use crate::engine::remove_chunk;
use crate::error::{Error, ResourceAbort, Result};
use crate::format;
use crate::model::{Dimplication, Domain, ItemSet};
use crate::rows::{Mode, RowFamily, SymbolRow};

/// A query `A ~> {q}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub premise: ItemSet,
    pub item: usize,
}

impl Query {
    pub fn new(premise: ItemSet, item: usize) -> Result<Self> {
        if premise.is_empty() {
            return Err(Error::Precondition("query premise is empty".into()));
        }
        if item >= premise.width() || premise.contains(item) {
            return Err(Error::Precondition("query item must lie outside the premise".into()));
        }
        Ok(Query { premise, item })
    }

    pub fn to_dimplication(&self) -> Dimplication {
        let w = self.premise.width();
        Dimplication::new(self.premise.clone(), ItemSet::from_indices(w, [self.item])).expect("validated query")
    }

    fn format(&self, dom: &Domain) -> String {
        format!("{} ~> {}", dom.format_set(&self.premise), dom.label(self.item))
    }

    fn parse(dom: &Domain, text: &str) -> Result<Self> {
        let (a, q) = text
            .split_once("~>")
            .ok_or_else(|| Error::Precondition(format!("malformed query `{text}`")))?;
        Query::new(dom.parse_set(a)?, dom.index_of(q.trim())?)
    }
}

/// Whether `A ~> {q}` holds in the space generated by `hidden`: every hidden
/// base set containing `q` meets `A`.
pub fn oracle_answer(hidden: &BaseFamily, premise: &ItemSet, q: usize) -> bool {
    hidden
        .sets()
        .iter()
        .filter(|p| p.contains(q))
        .all(|p| p.intersects(premise))
}

/// Who answers the queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionMode {
    Oracle(BaseFamily),
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionStatus {
    Running,
    Finished,
}

/// Size summary of the current space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionStats {
    pub states: BigUint,
    pub rows: usize,
    pub base: usize,
    pub accepted: usize,
    pub rejected: usize,
}

/// Position of the candidate enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Cursor {
    premise: Vec<usize>,
    item: Option<usize>,
    done: bool,
}

impl Cursor {
    fn start() -> Self {
        Cursor {
            premise: Vec::new(),
            item: None,
            done: false,
        }
    }

    /// The next candidate, or `None` once premise sizes pass `a_max`.
    fn advance(&mut self, w: usize, a_max: usize) -> Option<(Vec<usize>, usize)> {
        if self.done {
            return None;
        }
        if self.premise.is_empty() {
            if a_max == 0 || w < 2 {
                self.done = true;
                return None;
            }
            self.premise = vec![0];
            self.item = None;
        }
        loop {
            let from = self.item.map_or(0, |q| q + 1);
            if let Some(q) = (from..w).find(|q| !self.premise.contains(q)) {
                self.item = Some(q);
                return Some((self.premise.clone(), q));
            }
            self.item = None;
            if !next_combination(&mut self.premise, w) {
                let size = self.premise.len() + 1;
                if size > a_max || size >= w {
                    self.done = true;
                    return None;
                }
                self.premise = (0..size).collect();
            }
        }
    }
}

/// Steps `c` to the lexicographically next combination of its size.
fn next_combination(c: &mut [usize], w: usize) -> bool {
    let k = c.len();
    let Some(pos) = (0..k).rev().find(|&i| c[i] != i + w - k) else {
        return false;
    };
    c[pos] += 1;
    for j in pos + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Live state of an exploration.
#[derive(Clone, Debug)]
pub struct ExplorationSession {
    domain: Domain,
    mode: SessionMode,
    a_max: usize,
    rows: RowFamily,
    base: BaseFamily,
    accepted: Vec<Dimplication>,
    rejected: Vec<Query>,
    rejected_index: HashSet<Query>,
    cursor: Cursor,
    pending: Option<Query>,
    status: SessionStatus,
    max_rows: Option<usize>,
}

impl ExplorationSession {
    /// A session starting from the whole powerset. `a_max` is clamped to
    /// `w - 1`; `None` means `w - 1`.
    pub fn new(domain: Domain, mode: SessionMode, a_max: Option<usize>) -> Result<Self> {
        if let SessionMode::Oracle(hidden) = &mode {
            if hidden.domain() != &domain {
                return Err(Error::DomainMismatch {
                    expected: domain.width(),
                    found: hidden.domain().width(),
                });
            }
        }
        let w = domain.width();
        let rows = RowFamily::powerset(domain.clone(), Mode::E);
        let base = base_from_rows(&rows)?;
        Ok(ExplorationSession {
            a_max: a_max.unwrap_or(w - 1).min(w - 1),
            domain,
            mode,
            rows,
            base,
            accepted: Vec::new(),
            rejected: Vec::new(),
            rejected_index: HashSet::new(),
            cursor: Cursor::start(),
            pending: None,
            status: SessionStatus::Running,
            max_rows: None,
        })
    }

    /// Caps the number of rows; exceeding it aborts [`Self::apply_answer`].
    pub fn with_max_rows(mut self, max_rows: Option<usize>) -> Self {
        self.max_rows = max_rows;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn mode(&self) -> &SessionMode {
        &self.mode
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    pub fn rows(&self) -> &RowFamily {
        &self.rows
    }

    pub fn base(&self) -> &BaseFamily {
        &self.base
    }

    pub fn accepted(&self) -> &[Dimplication] {
        &self.accepted
    }

    pub fn rejected(&self) -> &[Query] {
        &self.rejected
    }

    pub fn pending(&self) -> Option<&Query> {
        self.pending.as_ref()
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn stats(&self) -> SessionStats {
        SessionStats {
            states: self.rows.count(),
            rows: self.rows.len(),
            base: self.base.len(),
            accepted: self.accepted.len(),
            rejected: self.rejected.len(),
        }
    }

    fn ensure_running(&self) -> Result<()> {
        match self.status {
            SessionStatus::Running => Ok(()),
            SessionStatus::Finished => Err(Error::SessionFinished),
        }
    }

    /// Whether confirming the query would remove nothing.
    fn uninformative(&self, q: &Query) -> Result<bool> {
        let contain = ItemSet::from_indices(self.domain.width(), [q.item]);
        Ok(self.rows.restrict(&contain, &q.premise)?.count().is_zero())
    }

    /// The pending query, or the next informative candidate. `None` means the
    /// candidates are exhausted, which finishes the session.
    pub fn next_query(&mut self) -> Result<Option<Query>> {
        self.ensure_running()?;
        if let Some(q) = &self.pending {
            return Ok(Some(q.clone()));
        }
        let w = self.domain.width();
        while let Some((premise, item)) = self.cursor.advance(w, self.a_max) {
            let q = Query {
                premise: ItemSet::from_indices(w, premise),
                item,
            };
            if self.rejected_index.contains(&q) || self.uninformative(&q)? {
                continue;
            }
            self.pending = Some(q.clone());
            return Ok(Some(q));
        }
        self.status = SessionStatus::Finished;
        Ok(None)
    }

    /// The hidden base's answer to `q`, in oracle mode.
    pub fn oracle_answer(&self, q: &Query) -> Option<bool> {
        match &self.mode {
            SessionMode::Oracle(hidden) => Some(oracle_answer(hidden, &q.premise, q.item)),
            SessionMode::Human => None,
        }
    }

    /// Records the answer to the pending query.
    pub fn apply_answer(&mut self, q: &Query, accept: bool) -> Result<SessionStats> {
        self.ensure_running()?;
        match &self.pending {
            Some(p) if p == q => {}
            Some(p) => {
                return Err(Error::StaleQuery(format!(
                    "pending query is {}, not {}",
                    p.format(&self.domain),
                    q.format(&self.domain)
                )))
            }
            None => return Err(Error::StaleQuery("no query is pending".into())),
        }
        if accept {
            let rows = remove_chunk(&self.rows, &q.premise, q.item)?;
            if let Some(limit) = self.max_rows {
                if rows.len() > limit {
                    return Err(Error::Resource(ResourceAbort::LimitExceeded { what: "rows", limit }));
                }
            }
            self.base = base_from_rows(&rows)?;
            self.rows = rows;
            self.accepted.push(q.to_dimplication());
            if !is_learning_space(&self.base).holds() {
                log::warn!("space after {} is not a learning space", q.format(&self.domain));
            }
        } else {
            self.rejected_index.insert(q.clone());
            self.rejected.push(q.clone());
        }
        self.pending = None;
        Ok(self.stats())
    }

    /// Number of states left if `q` were confirmed; the session is untouched.
    pub fn what_if(&self, q: &Query) -> Result<BigUint> {
        Ok(remove_chunk(&self.rows, &q.premise, q.item)?.count())
    }

    pub fn finish(&mut self) {
        self.pending = None;
        self.status = SessionStatus::Finished;
    }

    /// Plain-text snapshot of the session; [`Self::from_snapshot`] restores it.
    pub fn to_snapshot(&self) -> String {
        let dom = &self.domain;
        let mut out = String::new();
        out.push_str(&format::write_domain(dom));
        let mode = match self.mode {
            SessionMode::Oracle(_) => "oracle",
            SessionMode::Human => "human",
        };
        let _ = writeln!(out, "session: {mode}");
        let _ = writeln!(out, "a_max: {}", self.a_max);
        let status = match self.status {
            SessionStatus::Running => "running",
            SessionStatus::Finished => "finished",
        };
        let _ = writeln!(out, "status: {status}");
        if let Some(limit) = self.max_rows {
            let _ = writeln!(out, "max_rows: {limit}");
        }
        let cursor_premise = dom.format_set(&ItemSet::from_indices(dom.width(), self.cursor.premise.iter().copied()));
        let cursor_item = self.cursor.item.map_or("-", |q| dom.label(q));
        let _ = writeln!(
            out,
            "cursor: {} | {} | {}",
            if self.cursor.done { "done" } else { "open" },
            cursor_premise,
            cursor_item
        );
        if let Some(p) = &self.pending {
            let _ = writeln!(out, "pending: {}", p.format(dom));
        }
        if let SessionMode::Oracle(hidden) = &self.mode {
            out.push_str("[hidden]\n");
            for s in hidden.sets() {
                let _ = writeln!(out, "{}", dom.format_set(s));
            }
        }
        out.push_str("[accepted]\n");
        for d in &self.accepted {
            let _ = writeln!(out, "{}", format::format_dimplication(dom, d));
        }
        out.push_str("[rejected]\n");
        for q in &self.rejected {
            let _ = writeln!(out, "{}", q.format(dom));
        }
        out.push_str("[rows]\n");
        for r in self.rows.rows() {
            let _ = writeln!(out, "{}", r.to_tokens());
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, first) = lines.next().ok_or_else(|| Error::parse(1, "empty snapshot"))?;
        let dom = format::read_domain(first)?;
        let w = dom.width();
        let mut mode = None;
        let mut a_max = w - 1;
        let mut status = SessionStatus::Running;
        let mut max_rows = None;
        let mut cursor = Cursor::start();
        let mut pending = None;
        let mut section = "";
        let mut hidden = Vec::new();
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        let mut rows = Vec::new();
        for (n, l) in lines {
            let at = |e: Error| match e {
                Error::Parse { .. } => e,
                other => Error::parse(n, other.to_string()),
            };
            if l.starts_with('[') {
                section = match l {
                    "[hidden]" | "[accepted]" | "[rejected]" | "[rows]" => l,
                    _ => return Err(Error::parse(n, format!("unknown section {l}"))),
                };
                continue;
            }
            match section {
                "" => {
                    let (key, value) = l
                        .split_once(':')
                        .map(|(k, v)| (k.trim(), v.trim()))
                        .ok_or_else(|| Error::parse(n, "expected `key: value`"))?;
                    match key {
                        "session" => mode = Some(value.to_string()),
                        "a_max" => a_max = value.parse().map_err(|_| Error::parse(n, "bad a_max"))?,
                        "max_rows" => max_rows = Some(value.parse().map_err(|_| Error::parse(n, "bad max_rows"))?),
                        "status" => {
                            status = match value {
                                "running" => SessionStatus::Running,
                                "finished" => SessionStatus::Finished,
                                _ => return Err(Error::parse(n, "bad status")),
                            }
                        }
                        "cursor" => {
                            let parts: Vec<&str> = value.split('|').map(str::trim).collect();
                            if parts.len() != 3 {
                                return Err(Error::parse(n, "expected `cursor: <state> | <premise> | <item>`"));
                            }
                            cursor.done = match parts[0] {
                                "done" => true,
                                "open" => false,
                                _ => return Err(Error::parse(n, "bad cursor state")),
                            };
                            cursor.premise = dom.parse_set(parts[1]).map_err(at)?.iter().collect();
                            cursor.item = match parts[2] {
                                "-" => None,
                                label => Some(dom.index_of(label).map_err(at)?),
                            };
                        }
                        "pending" => pending = Some(Query::parse(&dom, value).map_err(at)?),
                        _ => return Err(Error::parse(n, format!("unknown key `{key}`"))),
                    }
                }
                "[hidden]" => hidden.push(dom.parse_set(l).map_err(at)?),
                "[accepted]" => accepted.push(Query::parse(&dom, l).map_err(at)?.to_dimplication()),
                "[rejected]" => rejected.push(Query::parse(&dom, l).map_err(at)?),
                _ => rows.push(SymbolRow::parse_tokens(Mode::E, w, l).map_err(at)?),
            }
        }
        let mode = match mode.as_deref() {
            Some("oracle") => SessionMode::Oracle(BaseFamily::new(dom.clone(), hidden)?),
            Some("human") => SessionMode::Human,
            _ => return Err(Error::parse(2, "missing or bad `session:` line")),
        };
        let rows = RowFamily::new(dom.clone(), Mode::E, rows)?;
        let base = base_from_rows(&rows)?;
        Ok(ExplorationSession {
            domain: dom,
            mode,
            a_max: a_max.min(w - 1),
            rows,
            base,
            accepted,
            rejected_index: rejected.iter().cloned().collect(),
            rejected,
            cursor,
            pending,
            status,
            max_rows,
        })
    }
}

/// Result of [`run_exploration`].
#[derive(Clone, Debug)]
pub struct ExplorationOutcome {
    pub rows: RowFamily,
    pub base: BaseFamily,
    pub accepted: Vec<Dimplication>,
    pub rejected: usize,
    /// State count after every answer, starting with the powerset.
    pub counts: Vec<BigUint>,
    /// Set when a resource guard stopped the run early.
    pub aborted: Option<ResourceAbort>,
}

/// Answers every candidate from the hidden base until none is left.
pub fn run_exploration(
    hidden: &BaseFamily,
    a_max: Option<usize>,
    max_rows: Option<usize>,
) -> Result<ExplorationOutcome> {
    let mut s = ExplorationSession::new(hidden.domain().clone(), SessionMode::Oracle(hidden.clone()), a_max)?
        .with_max_rows(max_rows);
    let mut counts = vec![s.rows().count()];
    let mut aborted = None;
    while let Some(q) = s.next_query()? {
        let answer = oracle_answer(hidden, &q.premise, q.item);
        match s.apply_answer(&q, answer) {
            Ok(stats) => counts.push(stats.states),
            Err(Error::Resource(r)) => {
                aborted = Some(r);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    s.finish();
    Ok(ExplorationOutcome {
        rows: s.rows,
        base: s.base,
        accepted: s.accepted,
        rejected: s.rejected.len(),
        counts,
        aborted,
    })
}
