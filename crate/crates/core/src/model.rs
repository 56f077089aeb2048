//! Ground sets, subsets and the two kinds of premise/conclusion formulas.
//!
//! Items are addressed by dense index internally; the [`Domain`] owns the
//! mapping between indices and the printable labels used in files.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered ground set of distinct, whitespace-free labels.
#[derive(Clone)]
pub struct Domain {
    labels: Arc<[String]>,
    index: Arc<HashMap<String, usize>>,
}

impl Domain {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidDomain("a domain needs at least one item".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) {
                return Err(Error::InvalidDomain(format!("bad label {label:?}")));
            }
            if label == "-" || label.starts_with('#') || label.contains("~>") || label.contains("->") {
                return Err(Error::InvalidDomain(format!("reserved label {label:?}")));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidDomain(format!("duplicate label {label:?}")));
            }
        }
        Ok(Domain {
            labels: labels.into(),
            index: Arc::new(index),
        })
    }

    /// The domain `1, 2, ..., w`.
    pub fn numbered(w: usize) -> Result<Self> {
        Domain::new((1..=w).map(|i| i.to_string()))
    }

    pub fn width(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, item: usize) -> &str {
        &self.labels[item]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn empty_set(&self) -> ItemSet {
        ItemSet::empty(self.width())
    }

    pub fn full_set(&self) -> ItemSet {
        ItemSet::full(self.width())
    }

    /// Builds a set from labels.
    pub fn set<I, S>(&self, labels: I) -> Result<ItemSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = self.empty_set();
        for label in labels {
            set.insert(self.index_of(label.as_ref())?);
        }
        Ok(set)
    }

    /// Parses a set written as whitespace- or comma-separated labels.
    /// `-` and the empty string denote the empty set.
    pub fn parse_set(&self, text: &str) -> Result<ItemSet> {
        let text = text.trim();
        if text == "-" {
            return Ok(self.empty_set());
        }
        self.set(
            text.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty()),
        )
    }

    /// Labels of the members, in domain order.
    pub fn set_labels(&self, set: &ItemSet) -> Vec<&str> {
        set.iter().map(|i| self.label(i)).collect()
    }

    /// Whitespace-separated labels, `-` for the empty set.
    pub fn format_set(&self, set: &ItemSet) -> String {
        if set.is_empty() {
            "-".to_string()
        } else {
            self.set_labels(set).join(" ")
        }
    }

    pub(crate) fn check(&self, set: &ItemSet) -> Result<()> {
        if set.width() == self.width() {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: self.width(),
                found: set.width(),
            })
        }
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Domain {}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Domain").field(&self.labels).finish()
    }
}

/// A subset of a ground set of fixed width, stored as a bitstring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ItemSet {
    width: usize,
    words: Vec<u64>,
}

impl ItemSet {
    pub fn empty(width: usize) -> Self {
        ItemSet {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut set = ItemSet::empty(width);
        for (i, word) in set.words.iter_mut().enumerate() {
            let remaining = width - i * 64;
            *word = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, items: I) -> Self {
        let mut set = ItemSet::empty(width);
        for i in items {
            set.insert(i);
        }
        set
    }

    /// Builds a set from the low `width` bits of `bits`; bit `i` is item `i`.
    pub fn from_bits(width: usize, bits: u64) -> Self {
        assert!(width <= 64);
        let mut set = ItemSet::empty(width);
        if width > 0 {
            set.words[0] = if width == 64 {
                bits
            } else {
                bits & ((1u64 << width) - 1)
            };
        }
        set
    }

    /// Number of items in the ground set (not the number of members).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, item: usize) -> bool {
        item < self.width && self.words[item / 64] >> (item % 64) & 1 == 1
    }

    pub fn insert(&mut self, item: usize) {
        assert!(item < self.width, "item {item} outside width {}", self.width);
        self.words[item / 64] |= 1 << (item % 64);
    }

    pub fn remove(&mut self, item: usize) {
        if item < self.width {
            self.words[item / 64] &= !(1 << (item % 64));
        }
    }

    pub fn with(mut self, item: usize) -> Self {
        self.insert(item);
        self
    }

    pub fn without(mut self, item: usize) -> Self {
        self.remove(item);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + bit)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn union(&self, other: &ItemSet) -> ItemSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &ItemSet) -> ItemSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &ItemSet) -> ItemSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> ItemSet {
        ItemSet::full(self.width).difference(self)
    }

    pub fn union_with(&mut self, other: &ItemSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &ItemSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(&self, other: &ItemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &ItemSet) -> bool {
        !self.is_disjoint(other)
    }

    fn zip(&self, other: &ItemSet, op: impl Fn(u64, u64) -> u64) -> ItemSet {
        debug_assert_eq!(self.width, other.width, "width mismatch");
        ItemSet {
            width: self.width,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        }
    }
}

/// Lexicographic order on the sorted member lists (`{a} < {a,b} < {b}`).
impl Ord for ItemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for ItemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Keeps only the inclusion-minimal members, sorted.
pub fn minimal_sets(mut sets: Vec<ItemSet>) -> Vec<ItemSet> {
    sets.sort_by_key(ItemSet::len);
    sets.dedup();
    let mut kept: Vec<ItemSet> = Vec::new();
    for set in sets {
        if !kept.iter().any(|k| k.is_subset(&set)) {
            kept.push(set);
        }
    }
    kept.sort();
    kept
}

/// `A ~> B`: every state disjoint from `A` is disjoint from `B`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Dimplication {
    premise: ItemSet,
    conclusion: ItemSet,
}

impl Dimplication {
    /// Conclusion items that also occur in the premise are dropped; an empty
    /// premise or an empty (remaining) conclusion is rejected.
    pub fn new(premise: ItemSet, conclusion: ItemSet) -> Result<Self> {
        if premise.width() != conclusion.width() {
            return Err(Error::DomainMismatch {
                expected: premise.width(),
                found: conclusion.width(),
            });
        }
        if premise.is_empty() {
            return Err(Error::InvalidFormula("dimplication premise is empty".into()));
        }
        let conclusion = conclusion.difference(&premise);
        if conclusion.is_empty() {
            return Err(Error::InvalidFormula(
                "dimplication conclusion is empty after removing premise items".into(),
            ));
        }
        Ok(Dimplication { premise, conclusion })
    }

    pub fn premise(&self) -> &ItemSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &ItemSet {
        &self.conclusion
    }

    /// The implication with the same premise and conclusion.
    pub fn to_implication(&self) -> Implication {
        Implication {
            premise: self.premise.clone(),
            conclusion: self.conclusion.clone(),
        }
    }
}

/// `A -> B`: every closed set containing `A` contains `B`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Implication {
    premise: ItemSet,
    conclusion: ItemSet,
}

impl Implication {
    /// The premise may be empty. Conclusion items already in the premise are
    /// dropped; an empty conclusion is rejected.
    pub fn new(premise: ItemSet, conclusion: ItemSet) -> Result<Self> {
        if premise.width() != conclusion.width() {
            return Err(Error::DomainMismatch {
                expected: premise.width(),
                found: conclusion.width(),
            });
        }
        let conclusion = conclusion.difference(&premise);
        if conclusion.is_empty() {
            return Err(Error::InvalidFormula(
                "implication conclusion is empty after removing premise items".into(),
            ));
        }
        Ok(Implication { premise, conclusion })
    }

    pub fn premise(&self) -> &ItemSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &ItemSet {
        &self.conclusion
    }

    /// The dimplication with the same premise and conclusion, if the premise
    /// is nonempty.
    pub fn to_dimplication(&self) -> Result<Dimplication> {
        Dimplication::new(self.premise.clone(), self.conclusion.clone())
    }
}

/// A rooted set `(C, r)` with `r ∈ C`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct RootedSet {
    carrier: ItemSet,
    root: usize,
}

impl RootedSet {
    pub fn new(carrier: ItemSet, root: usize) -> Result<Self> {
        if !carrier.contains(root) {
            return Err(Error::InvalidFormula(format!("root {root} not in carrier")));
        }
        Ok(RootedSet { carrier, root })
    }

    /// The rooted circuit `(A ∪ {b}, b)` of a dimplication `A ~> {b}`.
    pub fn from_dimplication(d: &Dimplication) -> Result<Self> {
        let root = match (d.conclusion.first(), d.conclusion.len()) {
            (Some(r), 1) => r,
            _ => {
                return Err(Error::InvalidFormula(
                    "only single-item conclusions form rooted circuits".into(),
                ))
            }
        };
        Ok(RootedSet {
            carrier: d.premise.clone().with(root),
            root,
        })
    }

    pub fn carrier(&self) -> &ItemSet {
        &self.carrier
    }

    pub fn root(&self) -> usize {
        self.root
    }
}

/// Whether `A ~> B` holds for the set `s`.
pub fn satisfies_dimp(s: &ItemSet, d: &Dimplication) -> Result<bool> {
    check_width(s, &d.premise)?;
    Ok(s.intersects(&d.premise) || s.is_disjoint(&d.conclusion))
}

/// Whether `A -> B` holds for the set `x`.
pub fn satisfies_imp(x: &ItemSet, i: &Implication) -> Result<bool> {
    check_width(x, &i.premise)?;
    Ok(!i.premise.is_subset(x) || i.conclusion.is_subset(x))
}

fn check_width(a: &ItemSet, b: &ItemSet) -> Result<()> {
    if a.width() == b.width() {
        Ok(())
    } else {
        Err(Error::DomainMismatch {
            expected: b.width(),
            found: a.width(),
        })
    }
}
