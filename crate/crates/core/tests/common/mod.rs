//! Brute-force oracles and input strategies shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use learnspace::base::BaseFamily;
use learnspace::model::{minimal_sets, satisfies_dimp, satisfies_imp};
use learnspace::{Dimplication, Domain, Implication, ItemSet, RowFamily};
use proptest::prelude::*;

pub fn powerset(w: usize) -> impl Iterator<Item = ItemSet> {
    (0..1u64 << w).map(move |bits| ItemSet::from_bits(w, bits))
}

pub fn sorted(mut v: Vec<ItemSet>) -> Vec<ItemSet> {
    v.sort();
    v
}

pub fn members(f: &RowFamily) -> Vec<ItemSet> {
    sorted(f.members().collect())
}

/// `K(theta)` by scanning the powerset.
pub fn space_by_scan(w: usize, theta: &[Dimplication]) -> Vec<ItemSet> {
    sorted(
        powerset(w)
            .filter(|s| theta.iter().all(|d| satisfies_dimp(s, d).unwrap()))
            .collect(),
    )
}

/// `C(sigma)` by scanning the powerset.
pub fn closed_by_scan(w: usize, sigma: &[Implication]) -> Vec<ItemSet> {
    sorted(
        powerset(w)
            .filter(|x| sigma.iter().all(|i| satisfies_imp(x, i).unwrap()))
            .collect(),
    )
}

/// All unions of base sets, the empty union included, by a worklist.
pub fn union_closure(width: usize, sets: &[ItemSet]) -> Vec<ItemSet> {
    let mut seen: HashSet<ItemSet> = HashSet::new();
    let mut work = vec![ItemSet::empty(width)];
    seen.insert(ItemSet::empty(width));
    while let Some(s) = work.pop() {
        for p in sets {
            let u = s.union(p);
            if seen.insert(u.clone()) {
                work.push(u);
            }
        }
    }
    sorted(seen.into_iter().collect())
}

pub fn mintr_by_scan(width: usize, family: &[ItemSet]) -> Vec<ItemSet> {
    minimal_sets(
        powerset(width)
            .filter(|t| family.iter().all(|x| t.intersects(x)))
            .collect(),
    )
}

fn items(w: usize, max: usize, min: usize) -> impl Strategy<Value = BTreeSet<usize>> {
    prop::collection::btree_set(0..w, min..=max.min(w))
}

/// `(w, theta)` with `w` in `2..=max_w` and up to `max_h` dimplications of
/// small premises and conclusions.
pub fn theta_strategy(max_w: usize, max_h: usize) -> impl Strategy<Value = (usize, Vec<Dimplication>)> {
    (2..=max_w)
        .prop_flat_map(move |w| {
            (
                Just(w),
                prop::collection::vec((items(w, 4, 1), items(w, 3, 1)), 0..=max_h),
            )
        })
        .prop_map(|(w, pairs)| {
            let theta = pairs
                .into_iter()
                .filter_map(|(a, b)| Dimplication::new(ItemSet::from_indices(w, a), ItemSet::from_indices(w, b)).ok())
                .collect();
            (w, theta)
        })
}

/// `(w, sigma)` like [`theta_strategy`] but with possibly empty premises.
pub fn sigma_strategy(max_w: usize, max_h: usize) -> impl Strategy<Value = (usize, Vec<Implication>)> {
    (2..=max_w)
        .prop_flat_map(move |w| {
            (
                Just(w),
                prop::collection::vec((items(w, 4, 0), items(w, 3, 1)), 0..=max_h),
            )
        })
        .prop_map(|(w, pairs)| {
            let sigma = pairs
                .into_iter()
                .filter_map(|(a, b)| Implication::new(ItemSet::from_indices(w, a), ItemSet::from_indices(w, b)).ok())
                .collect();
            (w, sigma)
        })
}

/// A covering base: random nonempty sets, plus singletons for uncovered
/// items.
pub fn base_strategy(max_w: usize, max_n: usize) -> impl Strategy<Value = BaseFamily> {
    (1..=max_w)
        .prop_flat_map(move |w| (Just(w), prop::collection::vec(items(w, w, 1), 1..=max_n)))
        .prop_map(|(w, raw)| {
            let mut sets: Vec<ItemSet> = raw.into_iter().map(|s| ItemSet::from_indices(w, s)).collect();
            sets.sort();
            sets.dedup();
            let mut cover = ItemSet::empty(w);
            for s in &sets {
                cover.union_with(s);
            }
            for i in ItemSet::full(w).difference(&cover).iter() {
                sets.push(ItemSet::from_indices(w, [i]));
            }
            BaseFamily::new(Domain::numbered(w).unwrap(), sets).unwrap()
        })
}

/// `(w, family)` of up to `max_n` nonempty sets.
pub fn hypergraph_strategy(max_w: usize, max_n: usize) -> impl Strategy<Value = (usize, Vec<ItemSet>)> {
    (1..=max_w).prop_flat_map(move |w| {
        (
            Just(w),
            prop::collection::vec(items(w, w, 1).prop_map(move |s| ItemSet::from_indices(w, s)), 0..=max_n),
        )
    })
}
