//! Bases of knowledge spaces: generation of all states, kernels, atoms,
//! extraction of the base from compressed rows, the learning-space test and
//! colors.

use std::collections::{BTreeMap, HashSet};

use crate::engine::Limits;
use crate::error::{Error, ResourceAbort, Result};
use crate::model::{minimal_sets, Domain, ItemSet};
use crate::rows::{Cell, Mode, RowFamily, Work};

/// Default cap on the number of states [`dowling_generate`] may produce.
pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

/// A family of nonempty, distinct sets whose union is the whole domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseFamily {
    domain: Domain,
    sets: Vec<ItemSet>,
}

impl BaseFamily {
    pub fn new(domain: Domain, sets: Vec<ItemSet>) -> Result<Self> {
        let base = BaseFamily::new_uncovered(domain, sets)?;
        let mut cover = base.domain.empty_set();
        for s in &base.sets {
            cover.union_with(s);
        }
        if cover != base.domain.full_set() {
            let missing = base.domain.format_set(&base.domain.full_set().difference(&cover));
            return Err(Error::InvalidBase(format!("items not covered by any set: {missing}")));
        }
        Ok(base)
    }

    /// Like [`BaseFamily::new`] but without the coverage requirement.
    pub fn new_uncovered(domain: Domain, sets: Vec<ItemSet>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &sets {
            domain.check(s)?;
            if s.is_empty() {
                return Err(Error::InvalidBase("the empty set cannot be a base set".into()));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidBase(format!("duplicate set {}", domain.format_set(s))));
            }
        }
        Ok(BaseFamily { domain, sets })
    }

    /// Restricts the domain to the items covered by `sets`, dropping the rest.
    pub fn shrink_to_cover(domain: &Domain, sets: Vec<ItemSet>) -> Result<Self> {
        let mut cover = domain.empty_set();
        for s in &sets {
            domain.check(s)?;
            cover.union_with(s);
        }
        let kept: Vec<usize> = cover.iter().collect();
        let small = Domain::new(kept.iter().map(|&i| domain.label(i).to_string()))?;
        let sets = sets
            .into_iter()
            .map(|s| ItemSet::from_indices(kept.len(), (0..kept.len()).filter(|&k| s.contains(kept[k]))))
            .collect();
        BaseFamily::new(small, sets)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn sets(&self) -> &[ItemSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Members of `self` that are unions of other members are dropped; what
    /// remains is the set of ∪-irreducible states of the generated space.
    pub fn irreducible(&self) -> BaseFamily {
        let sets = self
            .sets
            .iter()
            .filter(|p| !uncovered(p, &self.sets).is_empty())
            .cloned()
            .collect();
        BaseFamily {
            domain: self.domain.clone(),
            sets,
        }
    }

    /// Sets sorted lexicographically.
    pub fn sorted(mut self) -> Self {
        self.sets.sort();
        self
    }
}

/// Items of `p` outside every member of `family` strictly inside `p`.
fn uncovered(p: &ItemSet, family: &[ItemSet]) -> ItemSet {
    let mut covered = ItemSet::empty(p.width());
    for r in family {
        if r.is_proper_subset(p) {
            covered.union_with(r);
        }
    }
    p.difference(&covered)
}

/// All unions of base sets, the empty union included, sorted lexicographically.
pub fn dowling_generate(b: &BaseFamily) -> Result<Vec<ItemSet>> {
    dowling_generate_with(b, DEFAULT_STATE_LIMIT, &Limits::none())
}

pub fn dowling_generate_with(b: &BaseFamily, max_states: usize, limits: &Limits) -> Result<Vec<ItemSet>> {
    let mut seen: HashSet<ItemSet> = HashSet::new();
    let mut states = vec![b.domain.empty_set()];
    seen.insert(b.domain.empty_set());
    for (k, base_set) in b.sets.iter().enumerate() {
        if k % 16 == 0 {
            limits.check_time()?;
        }
        let known = states.len();
        for i in 0..known {
            if states[i].is_subset(base_set) || !base_set.is_subset(&states[i]) {
                let u = states[i].union(base_set);
                if seen.insert(u.clone()) {
                    states.push(u);
                    if states.len() > max_states {
                        return Err(Error::Resource(ResourceAbort::LimitExceeded {
                            what: "states",
                            limit: max_states,
                        }));
                    }
                }
            }
        }
    }
    states.sort();
    Ok(states)
}

/// Union of the base sets inside `s`: the largest state contained in `s`.
pub fn kernel(s: &ItemSet, b: &BaseFamily) -> Result<ItemSet> {
    b.domain.check(s)?;
    let mut k = b.domain.empty_set();
    for p in &b.sets {
        if p.is_subset(s) {
            k.union_with(p);
        }
    }
    Ok(k)
}

/// The row-minimal members containing `m` of every row whose `m`-cell is not
/// `Zero`: `m` set, free cells cleared, one cell chosen from each group.
pub fn row_minimal_members(f: &RowFamily, m: usize) -> Result<Vec<ItemSet>> {
    if f.mode() != Mode::E {
        return Err(Error::Precondition("atoms are read from 012e-rows".into()));
    }
    if m >= f.domain().width() {
        return Err(Error::Precondition(format!("item index {m} outside domain")));
    }
    let mut out = Vec::new();
    for row in f.rows() {
        if row.cell(m) == Cell::Zero {
            continue;
        }
        let mut w = Work::new(row);
        if !w.force(m, true) {
            continue;
        }
        let row = w.finish();
        let mut fixed = ItemSet::empty(row.width());
        for (i, c) in row.cells().iter().enumerate() {
            if *c == Cell::One {
                fixed.insert(i);
            }
        }
        let mut partial = vec![fixed];
        for group in row.groups() {
            partial = partial
                .iter()
                .flat_map(|s| group.iter().map(move |&i| s.clone().with(i)))
                .collect();
        }
        out.extend(partial);
    }
    Ok(out)
}

/// `Atoms(m)`: the minimal states containing `m`, read off the rows.
pub fn atoms_from_rows(f: &RowFamily, m: usize) -> Result<Vec<ItemSet>> {
    Ok(minimal_sets(row_minimal_members(f, m)?))
}

/// The base of the space represented by `f`: the union of all atom families.
pub fn base_from_rows(f: &RowFamily) -> Result<BaseFamily> {
    let mut all: Vec<ItemSet> = Vec::new();
    for m in 0..f.domain().width() {
        all.extend(atoms_from_rows(f, m)?);
    }
    all.sort();
    all.dedup();
    BaseFamily::new_uncovered(f.domain().clone(), all)
}

/// `Atoms(m)` computed from a base: the base sets in which `m` is not covered
/// by smaller base sets.
pub fn atoms_from_base(b: &BaseFamily, m: usize) -> Vec<ItemSet> {
    let mut atoms: Vec<ItemSet> = b
        .sets
        .iter()
        .filter(|p| p.contains(m) && uncovered(p, &b.sets).contains(m))
        .cloned()
        .collect();
    atoms.sort();
    atoms
}

/// Outcome of [`is_learning_space`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LearningSpaceCheck {
    Yes,
    /// `set` is an atom at both `items.0` and `items.1`.
    No {
        set: ItemSet,
        items: (usize, usize),
    },
}

impl LearningSpaceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, LearningSpaceCheck::Yes)
    }
}

/// Whether the atom families of the generated space are pairwise disjoint.
pub fn is_learning_space(b: &BaseFamily) -> LearningSpaceCheck {
    for p in &b.sets {
        let u = uncovered(p, &b.sets);
        let mut items = u.iter();
        if let (Some(x), Some(y)) = (items.next(), items.next()) {
            return LearningSpaceCheck::No {
                set: p.clone(),
                items: (x, y),
            };
        }
    }
    LearningSpaceCheck::Yes
}

/// A base whose sets each carry their color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBase {
    base: BaseFamily,
    colors: Vec<usize>,
}

impl ColoredBase {
    pub fn base(&self) -> &BaseFamily {
        &self.base
    }

    pub fn domain(&self) -> &Domain {
        &self.base.domain
    }

    pub fn sets(&self) -> &[ItemSet] {
        &self.base.sets
    }

    /// Color of the `i`-th base set.
    pub fn color(&self, i: usize) -> usize {
        self.colors[i]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    /// How many base sets carry each color.
    pub fn color_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &c in &self.colors {
            *counts.entry(c).or_default() += 1;
        }
        counts
    }

    /// Base file text with `@ <color>` annotations.
    pub fn to_text(&self) -> String {
        let dom = self.domain();
        let mut out = crate::format::write_domain(dom);
        for (s, &c) in self.sets().iter().zip(&self.colors) {
            out.push_str(&format!("{} @ {}\n", dom.format_set(s), dom.label(c)));
        }
        out
    }
}

/// Assigns every base set its unique element outside the union of the base
/// sets strictly inside it.
pub fn color_base(b: &BaseFamily) -> Result<ColoredBase> {
    let mut colors = Vec::with_capacity(b.len());
    for p in &b.sets {
        let u = uncovered(p, &b.sets);
        if u.len() != 1 {
            return Err(Error::NotLearningSpace(format!(
                "base set {} has {} uncovered items ({})",
                b.domain.format_set(p),
                u.len(),
                b.domain.format_set(&u)
            )));
        }
        colors.push(u.first().expect("one item"));
    }
    Ok(ColoredBase {
        base: b.clone(),
        colors,
    })
}
