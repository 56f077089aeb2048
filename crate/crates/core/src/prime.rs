//! Minimal transversals, prime dimplications, irredundant dimplication bases
//! and the rooted-circuit axioms of antimatroids.

use rayon::prelude::*;

use crate::base::BaseFamily;
use crate::engine::closure;
use crate::error::{Error, Result};
use crate::model::{minimal_sets, Dimplication, ItemSet, RootedSet};

/// An antichain of sets, each meeting every member of some family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalFamily {
    width: usize,
    sets: Vec<ItemSet>,
}

impl TransversalFamily {
    pub fn width(&self) -> usize {
        self.width
    }

    /// Members, sorted lexicographically.
    pub fn sets(&self) -> &[ItemSet] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<ItemSet> {
        self.sets
    }
}

/// All inclusion-minimal transversals of `family` by Berge multiplication.
///
/// Sets are distributed in ascending size with absorption after every step.
/// The empty family has the single transversal `∅`.
pub fn berge_mintr(width: usize, family: &[ItemSet]) -> Result<TransversalFamily> {
    let mut order: Vec<&ItemSet> = family.iter().collect();
    for x in &order {
        if x.width() != width {
            return Err(Error::DomainMismatch {
                expected: width,
                found: x.width(),
            });
        }
        if x.is_empty() {
            return Err(Error::Precondition("the empty set has no transversal".into()));
        }
    }
    order.sort_by_key(|x| x.len());
    let mut current = vec![ItemSet::empty(width)];
    for x in order {
        let mut next = Vec::with_capacity(current.len());
        for t in current {
            if t.intersects(x) {
                next.push(t);
            } else {
                next.extend(x.iter().map(|i| t.clone().with(i)));
            }
        }
        current = minimal_sets(next);
    }
    Ok(TransversalFamily { width, sets: current })
}

/// The prime dimplications `A ~> {q}` of the space generated by `b`.
///
/// Items whose singleton is a base set have none. Output is ordered by `q`,
/// then lexicographically by `A`.
pub fn prime_dimps(b: &BaseFamily) -> Vec<Dimplication> {
    let w = b.domain().width();
    let per_item: Vec<Vec<Dimplication>> = (0..w)
        .into_par_iter()
        .map(|q| {
            let single = ItemSet::from_indices(w, [q]);
            if b.sets().contains(&single) {
                return Vec::new();
            }
            let rests: Vec<ItemSet> = b
                .sets()
                .iter()
                .filter(|p| p.contains(q))
                .map(|p| p.clone().without(q))
                .collect();
            berge_mintr(w, &rests)
                .expect("base sets other than {q} leave a nonempty remainder")
                .into_sets()
                .into_iter()
                .map(|a| Dimplication::new(a, single.clone()).expect("transversal avoids q"))
                .collect()
        })
        .collect();
    per_item.into_iter().flatten().collect()
}

/// Whether `d` holds in every state satisfying all of `theta`.
pub fn entails(theta: &[Dimplication], d: &Dimplication) -> bool {
    let sigma: Vec<_> = theta.iter().map(Dimplication::to_implication).collect();
    d.conclusion().is_subset(&closure(d.premise(), &sigma))
}

/// An irredundant subfamily of `theta` defining the same space.
///
/// Candidates are examined by descending premise size, then
/// lexicographically; each is dropped when the retained rest entails it.
/// Survivors keep their input order. `passes` caps the number of sweeps; a
/// sweep that removes nothing ends the loop.
pub fn reduce_dimp_base(theta: &[Dimplication], passes: usize) -> Vec<Dimplication> {
    let mut kept: Vec<bool> = vec![true; theta.len()];
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&theta[i], &theta[j]);
        b.premise()
            .len()
            .cmp(&a.premise().len())
            .then_with(|| a.premise().cmp(b.premise()))
            .then_with(|| a.conclusion().cmp(b.conclusion()))
            .then_with(|| i.cmp(&j))
    });
    for _ in 0..passes.max(1) {
        let mut removed_any = false;
        for &i in &order {
            if !kept[i] {
                continue;
            }
            let rest: Vec<Dimplication> = theta
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i && kept[j])
                .map(|(_, d)| d.clone())
                .collect();
            if entails(&rest, &theta[i]) {
                kept[i] = false;
                removed_any = true;
            }
        }
        if !removed_any {
            break;
        }
    }
    theta
        .iter()
        .zip(kept)
        .filter(|(_, k)| *k)
        .map(|(d, _)| d.clone())
        .collect()
}

/// Rooted circuits `(A ∪ {b}, b)` of single-conclusion dimplications.
pub fn rooted_circuits(theta: &[Dimplication]) -> Result<Vec<RootedSet>> {
    theta.iter().map(RootedSet::from_dimplication).collect()
}

/// Outcome of [`check_rooted_axioms`]; indices point into the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootedCheck {
    Holds,
    /// Two distinct carriers with the same root, the first inside the second.
    Nested(usize, usize),
    /// The root of the first lies in the second (off its root) and no rooted
    /// set with the second's root fits inside the union minus the first root.
    Unresolved(usize, usize),
}

impl RootedCheck {
    pub fn holds(&self) -> bool {
        matches!(self, RootedCheck::Holds)
    }
}

/// Checks the antichain axiom per root and the resolution axiom for every
/// ordered pair `(C1, r1), (C2, r2)` with `r1 ∈ C2 ∖ {r2}`.
pub fn check_rooted_axioms(rc: &[RootedSet]) -> RootedCheck {
    for (i, a) in rc.iter().enumerate() {
        for (j, b) in rc.iter().enumerate() {
            if i != j && a.root() == b.root() && a.carrier().is_proper_subset(b.carrier()) {
                return RootedCheck::Nested(i, j);
            }
        }
    }
    for (i, a) in rc.iter().enumerate() {
        for (j, b) in rc.iter().enumerate() {
            let (r1, r2) = (a.root(), b.root());
            if r1 == r2 || !b.carrier().contains(r1) {
                continue;
            }
            let room = a.carrier().union(b.carrier()).without(r1);
            if !rc.iter().any(|c| c.root() == r2 && c.carrier().is_subset(&room)) {
                return RootedCheck::Unresolved(i, j);
            }
        }
    }
    RootedCheck::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::dowling_generate;
    use crate::model::Domain;

    fn b2() -> BaseFamily {
        let dom = Domain::new(["a", "b", "c", "d", "e"]).unwrap();
        let sets = ["d", "e", "a e", "c d", "a b e", "a b c e"]
            .iter()
            .map(|s| dom.parse_set(s).unwrap())
            .collect();
        BaseFamily::new(dom, sets).unwrap()
    }

    fn dimp(dom: &Domain, a: &str, b: &str) -> Dimplication {
        Dimplication::new(dom.parse_set(a).unwrap(), dom.parse_set(b).unwrap()).unwrap()
    }

    fn brute_mintr(width: usize, family: &[ItemSet]) -> Vec<ItemSet> {
        let all: Vec<ItemSet> = (0..1u64 << width)
            .map(|bits| ItemSet::from_bits(width, bits))
            .filter(|t| family.iter().all(|x| t.intersects(x)))
            .collect();
        minimal_sets(all)
    }

    #[test]
    fn small_transversals() {
        let dom = Domain::new(["a", "b", "c", "d", "e"]).unwrap();
        let fam = |list: &[&str]| list.iter().map(|s| dom.parse_set(s).unwrap()).collect::<Vec<_>>();
        let got = berge_mintr(5, &fam(&["d", "a b e"])).unwrap();
        assert_eq!(got.sets(), fam(&["a d", "b d", "d e"]).as_slice());
        let got = berge_mintr(5, &fam(&["a b", "b c"])).unwrap();
        assert_eq!(got.sets(), fam(&["a c", "b"]).as_slice());
        let got = berge_mintr(5, &fam(&["c"])).unwrap();
        assert_eq!(got.sets(), fam(&["c"]).as_slice());
        assert!(berge_mintr(5, &[dom.empty_set()]).is_err());
        assert_eq!(berge_mintr(5, &[]).unwrap().sets(), &[dom.empty_set()]);
    }

    #[test]
    fn transversals_match_brute_force() {
        let w = 6;
        let fam: Vec<ItemSet> = [0b000111u64, 0b011100, 0b110001, 0b100010]
            .iter()
            .map(|&b| ItemSet::from_bits(w, b))
            .collect();
        assert_eq!(berge_mintr(w, &fam).unwrap().into_sets(), brute_mintr(w, &fam));
    }

    #[test]
    fn prime_dimplications_of_small_space() {
        let b = b2();
        let dom = b.domain().clone();
        let got = prime_dimps(&b);
        let want = vec![
            dimp(&dom, "e", "a"),
            dimp(&dom, "a", "b"),
            dimp(&dom, "e", "b"),
            dimp(&dom, "a d", "c"),
            dimp(&dom, "b d", "c"),
            dimp(&dom, "d e", "c"),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn prime_dimplications_match_brute_force() {
        let b = b2();
        let w = 5;
        let states = dowling_generate(&b).unwrap();
        let valid = |a: &ItemSet, q: usize| states.iter().all(|s| !s.contains(q) || s.intersects(a));
        let mut want = Vec::new();
        for q in 0..w {
            let cands: Vec<ItemSet> = (1..1u64 << w)
                .map(|bits| ItemSet::from_bits(w, bits))
                .filter(|a| !a.contains(q) && valid(a, q))
                .collect();
            for a in minimal_sets(cands) {
                want.push(Dimplication::new(a, ItemSet::from_indices(w, [q])).unwrap());
            }
        }
        assert_eq!(prime_dimps(&b), want);
    }

    #[test]
    fn singleton_base_has_no_prime_dimplications() {
        let dom = Domain::numbered(4).unwrap();
        let b = BaseFamily::new(dom, (0..4).map(|i| ItemSet::from_indices(4, [i])).collect()).unwrap();
        assert!(prime_dimps(&b).is_empty());
    }

    #[test]
    fn entailment() {
        let dom = Domain::new(["a", "b", "c", "d", "e"]).unwrap();
        let theta = [dimp(&dom, "e", "a"), dimp(&dom, "a", "b")];
        assert!(entails(&theta, &dimp(&dom, "e", "b")));
        assert!(!entails(&[], &dimp(&dom, "e", "b")));
        let theta = [dimp(&dom, "a b", "c"), dimp(&dom, "b c", "d")];
        assert!(entails(&theta, &dimp(&dom, "a b", "d")));
    }

    #[test]
    fn reduction() {
        let b = b2();
        let dom = b.domain().clone();
        let reduced = reduce_dimp_base(&prime_dimps(&b), 1);
        assert_eq!(
            reduced,
            vec![dimp(&dom, "e", "a"), dimp(&dom, "a", "b"), dimp(&dom, "b d", "c")]
        );
        assert_eq!(reduce_dimp_base(&reduced, 3), reduced);
        let twice = vec![dimp(&dom, "e", "a"), dimp(&dom, "e", "a")];
        assert_eq!(reduce_dimp_base(&twice, 1).len(), 1);
    }

    #[test]
    fn rooted_axioms() {
        let b = b2();
        let dom = b.domain().clone();
        let rc = rooted_circuits(&prime_dimps(&b)).unwrap();
        assert!(check_rooted_axioms(&rc).holds());
        let root = |s: &str, r: &str| RootedSet::new(dom.parse_set(s).unwrap(), dom.index_of(r).unwrap()).unwrap();
        // (ab, b) stings (bdc, c); the small brother (adc, c) resolves it
        let pair = vec![root("a b", "b"), root("b c d", "c")];
        assert_eq!(check_rooted_axioms(&pair), RootedCheck::Unresolved(0, 1));
        let mut resolved = pair.clone();
        resolved.push(root("a c d", "c"));
        assert!(check_rooted_axioms(&resolved).holds());
        let clash = vec![root("a b", "a"), root("a b", "b")];
        assert!(matches!(check_rooted_axioms(&clash), RootedCheck::Unresolved(..)));
        let nested = vec![root("a b", "b"), root("a b c", "b")];
        assert_eq!(check_rooted_axioms(&nested), RootedCheck::Nested(0, 1));
    }
}
