//! Seeded random instances: dimplication families, bases of random
//! `c`-subsets, and layered learning spaces.
//!
//! All generators draw from a ChaCha8 stream seeded with a 64-bit seed, so
//! the same parameters and seed reproduce the same instance.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::{is_learning_space, BaseFamily};
use crate::error::{Error, Result};
use crate::model::{Dimplication, Domain, ItemSet};

/// Whole-instance attempts before [`gen_learning_space`] gives up.
pub const LEARNING_SPACE_ATTEMPTS: usize = 1000;
const COLOR_DRAWS: usize = 64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `h` dimplications over `1..=w` with random disjoint premises of size `a`
/// and conclusions of size `b`.
pub fn gen_theta(w: usize, h: usize, a: usize, b: usize, seed: u64) -> Result<(Domain, Vec<Dimplication>)> {
    if a == 0 || b == 0 || a + b > w {
        return Err(Error::Infeasible(format!(
            "premise size {a} and conclusion size {b} do not fit {w} items"
        )));
    }
    let dom = Domain::numbered(w)?;
    let mut r = rng(seed);
    let theta = (0..h)
        .map(|_| {
            let picked = sample(&mut r, w, a + b).into_vec();
            let premise = ItemSet::from_indices(w, picked[..a].iter().copied());
            let conclusion = ItemSet::from_indices(w, picked[a..].iter().copied());
            Dimplication::new(premise, conclusion).expect("disjoint and nonempty")
        })
        .collect();
    Ok((dom, theta))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn all_subsets(w: usize, c: usize) -> Vec<ItemSet> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..c).collect();
    loop {
        out.push(ItemSet::from_indices(w, idx.iter().copied()));
        let Some(pos) = (0..c).rev().find(|&i| idx[i] != i + w - c) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..c {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `n` distinct random `c`-subsets of `1..=w`. With `ensure_coverage`,
/// uncovered items are added as singletons; otherwise the domain shrinks to
/// the covered items.
pub fn gen_base(w: usize, n: usize, c: usize, seed: u64, ensure_coverage: bool) -> Result<BaseFamily> {
    if c == 0 || c > w {
        return Err(Error::Infeasible(format!("set size {c} does not fit {w} items")));
    }
    let available = binomial(w, c);
    if n as u128 > available {
        return Err(Error::Infeasible(format!(
            "only {available} distinct {c}-subsets of {w} items exist, {n} requested"
        )));
    }
    let dom = Domain::numbered(w)?;
    let mut r = rng(seed);
    let mut sets: Vec<ItemSet> = if available <= 4 * n as u128 {
        let pool = all_subsets(w, c);
        sample(&mut r, pool.len(), n)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect()
    } else {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let s = ItemSet::from_indices(w, sample(&mut r, w, c));
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
        out
    };
    if !ensure_coverage {
        return BaseFamily::shrink_to_cover(&dom, sets);
    }
    let mut cover = dom.empty_set();
    for s in &sets {
        cover.union_with(s);
    }
    for i in dom.full_set().difference(&cover).iter() {
        sets.push(ItemSet::from_indices(w, [i]));
    }
    BaseFamily::new(dom, sets)
}

/// Parameters of a layered learning space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredParams {
    /// Nodes per layer.
    pub mu: usize,
    /// Number of layers.
    pub lambda: usize,
    /// Lower covers per node above the bottom layer.
    pub kappa: usize,
    /// Labels of the new colors.
    pub colors: Vec<String>,
}

impl LayeredParams {
    /// Colors named `c1`, `c2`, ...
    pub fn with_color_count(mu: usize, lambda: usize, kappa: usize, count: usize) -> Self {
        LayeredParams {
            mu,
            lambda,
            kappa,
            colors: (1..=count).map(|i| format!("c{i}")).collect(),
        }
    }
}

/// A random learning space built over a layered poset.
///
/// The bottom layer holds the singletons `{1}`..`{mu}`. Each node of a higher
/// layer picks `kappa` lower covers among the kept nodes of the layer below
/// and becomes their union plus one random new color; a color already in the
/// union, or one that would repeat an existing set, is redrawn. A set strictly
/// inside another set of its layer is discarded. Whole instances are redrawn
/// until every color occurs and the result is a learning space.
pub fn gen_learning_space(p: &LayeredParams, seed: u64) -> Result<BaseFamily> {
    if p.mu == 0 || p.lambda == 0 {
        return Err(Error::Infeasible("at least one layer of one node is needed".into()));
    }
    if p.kappa == 0 || p.kappa > p.mu {
        return Err(Error::Infeasible(format!("kappa {} must lie in 1..={}", p.kappa, p.mu)));
    }
    if p.colors.is_empty() && p.lambda > 1 {
        return Err(Error::Infeasible("upper layers need at least one color".into()));
    }
    let labels: Vec<String> = (1..=p.mu)
        .map(|i| i.to_string())
        .chain(p.colors.iter().cloned())
        .collect();
    let dom = Domain::new(labels)?;
    let mut r = rng(seed);
    for _ in 0..LEARNING_SPACE_ATTEMPTS {
        if let Some(base) = attempt(p, &dom, &mut r) {
            return Ok(base);
        }
    }
    Err(Error::Infeasible(format!(
        "no learning space found in {LEARNING_SPACE_ATTEMPTS} attempts (seed {seed})"
    )))
}

fn attempt(p: &LayeredParams, dom: &Domain, r: &mut ChaCha8Rng) -> Option<BaseFamily> {
    let w = dom.width();
    let mut layer: Vec<ItemSet> = (0..p.mu).map(|i| ItemSet::from_indices(w, [i])).collect();
    let mut all: Vec<ItemSet> = layer.clone();
    let mut seen: HashSet<ItemSet> = all.iter().cloned().collect();
    for _ in 1..p.lambda {
        let mut next = Vec::with_capacity(p.mu);
        for _ in 0..p.mu {
            let k = p.kappa.min(layer.len());
            let mut union = ItemSet::empty(w);
            for i in sample(r, layer.len(), k) {
                union.union_with(&layer[i]);
            }
            let mut drawn = None;
            for _ in 0..COLOR_DRAWS {
                let y = p.mu + r.gen_range(0..p.colors.len());
                let candidate = union.clone().with(y);
                if !union.contains(y) && !seen.contains(&candidate) {
                    drawn = Some(candidate);
                    break;
                }
            }
            let set = drawn?;
            seen.insert(set.clone());
            next.push(set);
        }
        let kept: Vec<ItemSet> = next
            .iter()
            .filter(|s| !next.iter().any(|t| s.is_proper_subset(t)))
            .cloned()
            .collect();
        all.extend(kept.iter().cloned());
        layer = kept;
    }
    let mut cover = ItemSet::empty(w);
    for s in &all {
        cover.union_with(s);
    }
    if cover != ItemSet::full(w) {
        return None;
    }
    all.sort();
    let base = BaseFamily::new(dom.clone(), all).ok()?.irreducible();
    is_learning_space(&base).holds().then_some(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::color_base;

    #[test]
    fn theta_shapes() {
        let (dom, theta) = gen_theta(30, 50, 2, 8, 7).unwrap();
        assert_eq!(dom.width(), 30);
        assert_eq!(theta.len(), 50);
        assert!(theta
            .iter()
            .all(|d| d.premise().len() == 2 && d.conclusion().len() == 8));
        assert_eq!(gen_theta(30, 50, 2, 8, 7).unwrap().1, theta);
        assert_ne!(gen_theta(30, 50, 2, 8, 8).unwrap().1, theta);
        assert!(gen_theta(5, 0, 1, 1, 0).unwrap().1.is_empty());
        assert!(gen_theta(5, 3, 3, 3, 0).is_err());
    }

    #[test]
    fn base_shapes() {
        let b = gen_base(20, 50, 5, 1, true).unwrap();
        let fives = b.sets().iter().filter(|s| s.len() == 5).count();
        assert_eq!(fives, 50);
        assert!(b.sets().iter().all(|s| s.len() == 5 || s.len() == 1));
        assert_eq!(gen_base(20, 50, 5, 1, true).unwrap(), b);
        let whole = gen_base(4, 1, 4, 3, true).unwrap();
        assert_eq!(whole.sets(), &[ItemSet::full(4)]);
        assert!(gen_base(4, 7, 2, 0, true).is_err());
        let all_pairs = gen_base(4, 6, 2, 0, true).unwrap();
        assert_eq!(all_pairs.len(), 6);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 5), 15504);
        assert_eq!(all_subsets(5, 2).len(), 10);
        assert_eq!(all_subsets(3, 3).len(), 1);
    }

    #[test]
    fn layered_learning_spaces() {
        let p = LayeredParams {
            mu: 4,
            lambda: 3,
            kappa: 2,
            colors: ["a", "b", "c", "d"].map(String::from).to_vec(),
        };
        for seed in 0..10 {
            let b = gen_learning_space(&p, seed).unwrap();
            assert_eq!(b.domain().width(), 8);
            assert!(is_learning_space(&b).holds());
            assert!(b.len() >= b.domain().width());
            for i in 0..4 {
                assert!(b.sets().contains(&ItemSet::from_indices(8, [i])));
            }
            let cb = color_base(&b).unwrap();
            let distinct = cb.color_counts().len() == b.len();
            assert_eq!(distinct, b.len() == b.domain().width());
            assert_eq!(gen_learning_space(&p, seed).unwrap(), b);
        }
    }

    #[test]
    fn layered_parameter_checks() {
        assert!(gen_learning_space(&LayeredParams::with_color_count(3, 2, 4, 2), 0).is_err());
        assert!(gen_learning_space(&LayeredParams::with_color_count(3, 2, 1, 0), 0).is_err());
        let one_layer = gen_learning_space(&LayeredParams::with_color_count(3, 1, 1, 0), 0).unwrap();
        assert_eq!(one_layer.len(), 3);
    }
}
