//! 012e- and 012n-rows: compact descriptions of set families.
//!
//! A row has one [`Cell`] per domain item. `Zero` and `One` fix the bit, `Free`
//! leaves it open, and cells sharing a [`Cell::Group`] id are jointly
//! constrained: in [`Mode::E`] at least one of them is 1, in [`Mode::N`] at
//! least one of them is 0. Both modes share every algorithm below through the
//! notion of the *satisfying bit* of a group ([`Mode::hi`]).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Domain, ItemSet};

/// Which group semantics a row uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Groups need at least one 1 (knowledge spaces).
    E,
    /// Groups need at least one 0 (closure systems).
    N,
}

impl Mode {
    /// The bit value that satisfies a group.
    pub fn hi(self) -> bool {
        matches!(self, Mode::E)
    }

    pub fn flip(self) -> Mode {
        match self {
            Mode::E => Mode::N,
            Mode::N => Mode::E,
        }
    }

    pub fn token(self) -> char {
        match self {
            Mode::E => 'e',
            Mode::N => 'n',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Zero,
    One,
    Free,
    Group(u32),
}

impl Cell {
    fn fixed(bit: bool) -> Cell {
        if bit {
            Cell::One
        } else {
            Cell::Zero
        }
    }

    fn fixed_value(self) -> Option<bool> {
        match self {
            Cell::Zero => Some(false),
            Cell::One => Some(true),
            _ => None,
        }
    }
}

/// A single row. Always kept in normal form: every group has at least two
/// cells and group ids are numbered 1, 2, ... in order of first occurrence.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolRow {
    mode: Mode,
    cells: Vec<Cell>,
}

impl SymbolRow {
    /// Builds a row and normalizes it. A single-cell group becomes the fixed
    /// satisfying bit.
    pub fn new(mode: Mode, cells: Vec<Cell>) -> SymbolRow {
        let mut row = SymbolRow { mode, cells };
        row.normalize();
        row
    }

    /// The row of all subsets.
    pub fn free(mode: Mode, width: usize) -> SymbolRow {
        SymbolRow {
            mode,
            cells: vec![Cell::Free; width],
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn width(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    fn normalize(&mut self) {
        let mut sizes: HashMap<u32, usize> = HashMap::new();
        for c in &self.cells {
            if let Cell::Group(g) = c {
                *sizes.entry(*g).or_default() += 1;
            }
        }
        let hi = self.mode.hi();
        let mut renumber: HashMap<u32, u32> = HashMap::new();
        for c in self.cells.iter_mut() {
            if let Cell::Group(g) = *c {
                if sizes[&g] == 1 {
                    *c = Cell::fixed(hi);
                } else {
                    let next = renumber.len() as u32 + 1;
                    *c = Cell::Group(*renumber.entry(g).or_insert(next));
                }
            }
        }
    }

    fn max_group(&self) -> u32 {
        self.cells
            .iter()
            .filter_map(|c| match c {
                Cell::Group(g) => Some(*g),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Cell positions of each group, indexed by `id - 1`.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.max_group() as usize];
        for (i, c) in self.cells.iter().enumerate() {
            if let Cell::Group(g) = c {
                groups[*g as usize - 1].push(i);
            }
        }
        groups
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Cell::Free).count()
    }

    /// Exact number of members: `2^#free * prod(2^|g| - 1)`.
    pub fn cardinality(&self) -> BigUint {
        let mut n = BigUint::one() << self.free_count();
        for g in self.groups() {
            n *= (BigUint::one() << g.len()) - BigUint::one();
        }
        n
    }

    pub fn contains(&self, s: &ItemSet) -> bool {
        if s.width() != self.width() {
            return false;
        }
        let hi = self.mode.hi();
        let mut satisfied = vec![false; self.max_group() as usize];
        for (i, c) in self.cells.iter().enumerate() {
            let bit = s.contains(i);
            match c {
                Cell::Zero if bit => return false,
                Cell::One if !bit => return false,
                Cell::Group(g) if bit == hi => satisfied[*g as usize - 1] = true,
                _ => {}
            }
        }
        satisfied.into_iter().all(|x| x)
    }

    /// Iterates over every member exactly once.
    pub fn members(&self) -> RowMembers {
        RowMembers::new(self)
    }

    /// Whether no set lies in both rows. Decided symbolically: after merging
    /// the fixed cells of both rows, setting every remaining cell to the
    /// satisfying bit is the most permissive assignment, so the rows meet iff
    /// that assignment satisfies every group of both rows.
    pub fn is_disjoint(&self, other: &SymbolRow) -> bool {
        assert_eq!(self.mode, other.mode, "rows of different modes");
        assert_eq!(self.width(), other.width(), "rows of different widths");
        let hi = self.mode.hi();
        let mut bits = Vec::with_capacity(self.width());
        for (a, b) in self.cells.iter().zip(&other.cells) {
            let bit = match (a.fixed_value(), b.fixed_value()) {
                (Some(x), Some(y)) if x != y => return true,
                (Some(x), _) | (_, Some(x)) => x,
                (None, None) => hi,
            };
            bits.push(bit);
        }
        for row in [self, other] {
            for group in row.groups() {
                if !group.iter().any(|&i| bits[i] == hi) {
                    return true;
                }
            }
        }
        false
    }

    /// The row of complements: mode flips, `Zero` and `One` swap.
    pub fn complement(&self) -> SymbolRow {
        SymbolRow {
            mode: self.mode.flip(),
            cells: self
                .cells
                .iter()
                .map(|c| match c {
                    Cell::Zero => Cell::One,
                    Cell::One => Cell::Zero,
                    other => *other,
                })
                .collect(),
        }
    }

    /// Members that contain `contain` and avoid `avoid`, or `None` when no
    /// member qualifies.
    pub fn restrict(&self, contain: &ItemSet, avoid: &ItemSet) -> Option<SymbolRow> {
        let mut work = Work::new(self);
        for i in contain.iter() {
            if !work.force(i, true) {
                return None;
            }
        }
        for i in avoid.iter() {
            if !work.force(i, false) {
                return None;
            }
        }
        Some(work.finish())
    }

    /// Formats the row in the rows-file token syntax.
    pub fn to_tokens(&self) -> String {
        let m = self.mode.token();
        self.cells
            .iter()
            .map(|c| match c {
                Cell::Zero => "0".to_string(),
                Cell::One => "1".to_string(),
                Cell::Free => "2".to_string(),
                Cell::Group(g) => format!("{m}{g}"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses `w` whitespace-separated tokens from `{0,1,2,e<k>,n<k>}`. A bare
    /// `e`/`n` is group 1.
    pub fn parse_tokens(mode: Mode, width: usize, text: &str) -> Result<SymbolRow> {
        let mut cells = Vec::with_capacity(width);
        for tok in text.split_whitespace() {
            let cell = match tok {
                "0" => Cell::Zero,
                "1" => Cell::One,
                "2" => Cell::Free,
                _ => {
                    let mut chars = tok.chars();
                    let head = chars.next().unwrap_or(' ');
                    if head != mode.token() {
                        return Err(Error::InvalidRow(format!(
                            "token `{tok}` does not match mode `{}`",
                            mode.token()
                        )));
                    }
                    let rest = chars.as_str();
                    let id: u32 = if rest.is_empty() {
                        1
                    } else {
                        rest.parse()
                            .ok()
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| Error::InvalidRow(format!("bad group token `{tok}`")))?
                    };
                    Cell::Group(id)
                }
            };
            cells.push(cell);
        }
        if cells.len() != width {
            return Err(Error::InvalidRow(format!(
                "expected {width} tokens, found {}",
                cells.len()
            )));
        }
        Ok(SymbolRow::new(mode, cells))
    }
}

impl fmt::Debug for SymbolRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_tokens().replace(' ', ","))
    }
}

/// Iterator over the members of a row.
pub struct RowMembers {
    width: usize,
    base: ItemSet,
    free: Vec<usize>,
    groups: Vec<Vec<usize>>,
    hi: bool,
    // mixed-radix counter: free bits first, then one nonzero mask per group
    free_counter: u64,
    group_masks: Vec<u64>,
    done: bool,
}

impl RowMembers {
    fn new(row: &SymbolRow) -> Self {
        let mut base = ItemSet::empty(row.width());
        let mut free = Vec::new();
        for (i, c) in row.cells.iter().enumerate() {
            match c {
                Cell::One => base.insert(i),
                Cell::Free => free.push(i),
                Cell::Group(_) if !row.mode.hi() => base.insert(i),
                _ => {}
            }
        }
        let groups = row.groups();
        assert!(
            free.len() < 64 && groups.iter().all(|g| g.len() < 64),
            "row too wide to enumerate"
        );
        let group_masks = vec![1; groups.len()];
        RowMembers {
            width: row.width(),
            base,
            free,
            hi: row.mode.hi(),
            groups,
            free_counter: 0,
            group_masks,
            done: false,
        }
    }

    fn current(&self) -> ItemSet {
        let mut s = self.base.clone();
        for (k, &i) in self.free.iter().enumerate() {
            if self.free_counter >> k & 1 == 1 {
                s.insert(i);
            }
        }
        for (g, mask) in self.groups.iter().zip(&self.group_masks) {
            for (k, &i) in g.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    if self.hi {
                        s.insert(i);
                    } else {
                        s.remove(i);
                    }
                }
            }
        }
        debug_assert_eq!(s.width(), self.width);
        s
    }

    fn advance(&mut self) {
        self.free_counter += 1;
        if self.free_counter < 1u64 << self.free.len() {
            return;
        }
        self.free_counter = 0;
        for (g, mask) in self.groups.iter().zip(self.group_masks.iter_mut()) {
            *mask += 1;
            if *mask < 1u64 << g.len() {
                return;
            }
            *mask = 1;
        }
        self.done = true;
    }
}

impl Iterator for RowMembers {
    type Item = ItemSet;

    fn next(&mut self) -> Option<ItemSet> {
        if self.done {
            return None;
        }
        let s = self.current();
        self.advance();
        Some(s)
    }
}

/// Mutable working copy of a row used by the forcing operations. Groups are
/// kept normalized after every step.
#[derive(Clone)]
pub(crate) struct Work {
    pub(crate) mode: Mode,
    pub(crate) cells: Vec<Cell>,
}

impl Work {
    pub(crate) fn new(row: &SymbolRow) -> Self {
        Work {
            mode: row.mode,
            cells: row.cells.clone(),
        }
    }

    /// Forces cell `i` to `bit`; returns false if the row becomes empty.
    ///
    /// Forcing a group cell to the satisfying bit releases its siblings to
    /// `Free`; forcing it to the other bit removes it from the group, and a
    /// lone remaining cell becomes the fixed satisfying bit.
    pub(crate) fn force(&mut self, i: usize, bit: bool) -> bool {
        let hi = self.mode.hi();
        match self.cells[i] {
            Cell::Zero => !bit,
            Cell::One => bit,
            Cell::Free => {
                self.cells[i] = Cell::fixed(bit);
                true
            }
            Cell::Group(g) => {
                self.cells[i] = Cell::fixed(bit);
                if bit == hi {
                    for c in self.cells.iter_mut() {
                        if *c == Cell::Group(g) {
                            *c = Cell::Free;
                        }
                    }
                } else {
                    let rest: Vec<usize> = (0..self.cells.len())
                        .filter(|&j| self.cells[j] == Cell::Group(g))
                        .collect();
                    match rest.len() {
                        0 => return false,
                        1 => self.cells[rest[0]] = Cell::fixed(hi),
                        _ => {}
                    }
                }
                true
            }
        }
    }

    /// Turns the given `Free` cells into a fresh group (or a fixed satisfying
    /// bit if there is only one).
    pub(crate) fn fresh_group(&mut self, cells: &[usize]) {
        debug_assert!(cells.iter().all(|&i| self.cells[i] == Cell::Free));
        match cells {
            [] => {}
            [i] => self.cells[*i] = Cell::fixed(self.mode.hi()),
            _ => {
                let id = self
                    .cells
                    .iter()
                    .filter_map(|c| match c {
                        Cell::Group(g) => Some(*g),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0)
                    + 1;
                for &i in cells {
                    self.cells[i] = Cell::Group(id);
                }
            }
        }
    }

    pub(crate) fn finish(self) -> SymbolRow {
        SymbolRow::new(self.mode, self.cells)
    }
}

/// A list of pairwise disjoint rows of one mode over a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowFamily {
    domain: Domain,
    mode: Mode,
    rows: Vec<SymbolRow>,
}

impl RowFamily {
    /// Wraps rows that the caller guarantees to be pairwise disjoint.
    pub fn new(domain: Domain, mode: Mode, rows: Vec<SymbolRow>) -> Result<Self> {
        for r in &rows {
            if r.mode != mode {
                return Err(Error::InvalidRow("row mode differs from family mode".into()));
            }
            if r.width() != domain.width() {
                return Err(Error::DomainMismatch {
                    expected: domain.width(),
                    found: r.width(),
                });
            }
        }
        Ok(RowFamily { domain, mode, rows })
    }

    pub(crate) fn from_parts(domain: Domain, mode: Mode, rows: Vec<SymbolRow>) -> Self {
        RowFamily { domain, mode, rows }
    }

    /// The single all-free row: the whole powerset.
    pub fn powerset(domain: Domain, mode: Mode) -> Self {
        let row = SymbolRow::free(mode, domain.width());
        RowFamily {
            domain,
            mode,
            rows: vec![row],
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rows(&self) -> &[SymbolRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Total number of represented sets.
    pub fn count(&self) -> BigUint {
        self.rows
            .iter()
            .map(SymbolRow::cardinality)
            .fold(BigUint::zero(), |a, b| a + b)
    }

    pub fn contains(&self, s: &ItemSet) -> bool {
        self.rows.iter().any(|r| r.contains(s))
    }

    /// All represented sets, row by row.
    pub fn members(&self) -> impl Iterator<Item = ItemSet> + '_ {
        self.rows.iter().flat_map(SymbolRow::members)
    }

    /// First pair of overlapping rows, if any.
    pub fn overlapping_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows.len() {
            for j in i + 1..self.rows.len() {
                if !self.rows[i].is_disjoint(&self.rows[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        self.overlapping_pair().is_none()
    }

    /// The family `{Q \ S : S in self}`, in the opposite mode.
    pub fn complement(&self) -> RowFamily {
        RowFamily {
            domain: self.domain.clone(),
            mode: self.mode.flip(),
            rows: self.rows.iter().map(SymbolRow::complement).collect(),
        }
    }

    /// Members containing `contain` and avoiding `avoid`.
    pub fn restrict(&self, contain: &ItemSet, avoid: &ItemSet) -> Result<RowFamily> {
        self.domain.check(contain)?;
        self.domain.check(avoid)?;
        if contain.intersects(avoid) {
            return Err(Error::Precondition("contain and avoid sets must be disjoint".into()));
        }
        Ok(RowFamily {
            domain: self.domain.clone(),
            mode: self.mode,
            rows: self.rows.iter().filter_map(|r| r.restrict(contain, avoid)).collect(),
        })
    }

    /// Rows-file text: domain line, mode line, one row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "domain: {}\nmode: {}\n",
            self.domain.labels().join(" "),
            self.mode.token()
        );
        for r in &self.rows {
            out.push_str(&r.to_tokens());
            out.push('\n');
        }
        out
    }
}

/// Free function form of [`RowFamily::complement`].
pub fn complement_rows(f: &RowFamily) -> RowFamily {
    f.complement()
}

/// Free function form of [`RowFamily::restrict`].
pub fn restrict_rows(f: &RowFamily, contain: &ItemSet, avoid: &ItemSet) -> Result<RowFamily> {
    f.restrict(contain, avoid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mode: Mode, text: &str) -> SymbolRow {
        let w = text.split_whitespace().count();
        SymbolRow::parse_tokens(mode, w, text).unwrap()
    }

    fn brute_members(r: &SymbolRow) -> Vec<ItemSet> {
        (0u64..1 << r.width())
            .map(|b| ItemSet::from_bits(r.width(), b))
            .filter(|s| r.contains(s))
            .collect()
    }

    #[test]
    fn cardinalities() {
        assert_eq!(row(Mode::E, "2 2 2 2 2").cardinality(), BigUint::from(32u32));
        assert_eq!(row(Mode::E, "0 0 2 1 0").cardinality(), BigUint::from(2u32));
        let r = row(Mode::E, "2 e e 2 2 e 2 2 2 2");
        assert_eq!(r.cardinality(), BigUint::from(896u32));
        assert_eq!(brute_members(&r).len(), 896);
    }

    #[test]
    fn membership() {
        let dom = Domain::new(["a", "b", "c", "d", "e"]).unwrap();
        let r7 = row(Mode::E, "1 2 2 2 1");
        assert!(r7.contains(&dom.parse_set("a d e").unwrap()));
        assert!(!row(Mode::E, "e e 2").contains(&ItemSet::empty(3)));
        assert!(!row(Mode::E, "1 2 2").contains(&ItemSet::empty(3)));
        assert!(!row(Mode::N, "n n n").contains(&ItemSet::full(3)));
        assert!(row(Mode::N, "n n n").contains(&ItemSet::empty(3)));
    }

    #[test]
    fn enumeration_small_cases() {
        let m: Vec<_> = row(Mode::E, "0 2").members().collect();
        assert_eq!(m, vec![ItemSet::empty(2), ItemSet::from_indices(2, [1])]);
        assert_eq!(row(Mode::E, "e e").members().count(), 3);
        assert_eq!(row(Mode::N, "n n 1").members().count(), 3);
    }

    #[test]
    fn single_cell_groups_normalize() {
        assert_eq!(row(Mode::E, "e1 e2 e2").cells()[0], Cell::One);
        assert_eq!(row(Mode::N, "n1 n2 n2").cells()[0], Cell::Zero);
        assert_eq!(row(Mode::E, "e7 e7 e3 e3").to_tokens(), "e1 e1 e2 e2");
    }

    #[test]
    fn disjointness_examples() {
        let r1 = row(Mode::E, "0 2 2 2 0");
        let r2 = row(Mode::E, "2 2 2 2 1");
        assert!(r1.is_disjoint(&r2));
        assert!(!r1.is_disjoint(&r1));
        let flags = [
            row(Mode::E, "2 1 2 2 2 2 2 2 2 2"),
            row(Mode::E, "2 2 1 2 2 2 2 2 2 2"),
            row(Mode::E, "2 2 2 2 2 1 2 2 2 2"),
        ];
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(!flags[i].is_disjoint(&flags[j]));
            }
        }
        // a group forced away by the other row's zeros
        assert!(row(Mode::E, "e e 2").is_disjoint(&row(Mode::E, "0 0 2")));
        assert!(!row(Mode::E, "e e 2").is_disjoint(&row(Mode::E, "0 2 2")));
    }

    #[test]
    fn complement_cellwise() {
        assert_eq!(row(Mode::E, "0 e e 1").complement(), row(Mode::N, "1 n n 0"));
        let r = row(Mode::E, "2 e1 e1 0 e2 e2");
        let c = r.complement();
        let mut a: Vec<_> = r.members().map(|s| s.complement()).collect();
        let mut b: Vec<_> = c.members().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn restrict_releases_and_shrinks_groups() {
        let r = row(Mode::E, "e e e 2");
        let got = r.restrict(&ItemSet::from_indices(4, [0]), &ItemSet::empty(4)).unwrap();
        assert_eq!(got.to_tokens(), "1 2 2 2");
        let got = r
            .restrict(&ItemSet::empty(4), &ItemSet::from_indices(4, [0, 1]))
            .unwrap();
        assert_eq!(got.to_tokens(), "0 0 1 2");
        assert!(r
            .restrict(&ItemSet::empty(4), &ItemSet::from_indices(4, [0, 1, 2]))
            .is_none());
    }

    #[test]
    fn row_tokens_reject_wrong_mode() {
        assert!(SymbolRow::parse_tokens(Mode::E, 2, "n n").is_err());
        assert!(SymbolRow::parse_tokens(Mode::E, 3, "2 2").is_err());
        assert!(SymbolRow::parse_tokens(Mode::E, 2, "e0 e0").is_err());
    }
}
