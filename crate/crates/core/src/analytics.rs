//! Exact counts and conditional probabilities over row families.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, ResourceAbort, Result};
use crate::model::ItemSet;
use crate::rows::RowFamily;

/// States enumerated at most by [`ProbabilityModel::MaximalOnly`].
pub const MAXIMAL_ENUMERATION_LIMIT: usize = 1 << 20;

/// Number of states represented by `f`.
pub fn count_states(f: &RowFamily) -> BigUint {
    f.count()
}

/// How states are weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProbabilityModel {
    /// Every state of the conditioning family counts once.
    #[default]
    Uniform,
    /// Only states with no proper superset inside the conditioning family
    /// count. Enumerates states, so only suitable for small families.
    MaximalOnly,
}

/// Constraints on states: items required and items forbidden.
#[derive(Clone, Debug)]
pub struct Condition {
    pub contain: ItemSet,
    pub avoid: ItemSet,
}

impl Condition {
    pub fn none(width: usize) -> Self {
        Condition {
            contain: ItemSet::empty(width),
            avoid: ItemSet::empty(width),
        }
    }

    pub fn new(contain: ItemSet, avoid: ItemSet) -> Self {
        Condition { contain, avoid }
    }

    fn and(&self, other: &Condition) -> Condition {
        Condition {
            contain: self.contain.union(&other.contain),
            avoid: self.avoid.union(&other.avoid),
        }
    }

    fn admits(&self, s: &ItemSet) -> bool {
        self.contain.is_subset(s) && self.avoid.is_disjoint(s)
    }
}

/// `P(event | given)` over the states of `f`, as an exact fraction.
pub fn conditional_probability(
    f: &RowFamily,
    event: &Condition,
    given: &Condition,
    model: ProbabilityModel,
) -> Result<BigRational> {
    let both = event.and(given);
    if both.contain.intersects(&both.avoid) {
        return Err(Error::Precondition("an item is both required and forbidden".into()));
    }
    let (num, den) = match model {
        ProbabilityModel::Uniform => {
            let den = f.restrict(&given.contain, &given.avoid)?.count();
            let num = f.restrict(&both.contain, &both.avoid)?.count();
            (num, den)
        }
        ProbabilityModel::MaximalOnly => {
            let pool = f.restrict(&given.contain, &given.avoid)?;
            if pool.count() > BigUint::from(MAXIMAL_ENUMERATION_LIMIT) {
                return Err(Error::Resource(ResourceAbort::LimitExceeded {
                    what: "states",
                    limit: MAXIMAL_ENUMERATION_LIMIT,
                }));
            }
            let states: Vec<ItemSet> = pool.members().collect();
            let maximal: Vec<&ItemSet> = states
                .iter()
                .filter(|s| !states.iter().any(|t| s.is_proper_subset(t)))
                .collect();
            let num = maximal.iter().filter(|s| event.admits(s)).count();
            (BigUint::from(num), BigUint::from(maximal.len()))
        }
    };
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(num.into(), den.into()))
}
