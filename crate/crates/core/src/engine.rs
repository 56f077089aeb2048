//! Imposing dimplications on 012e-rows and implications on 012n-rows.
//!
//! Both engines run the same kernel. A constraint with premise `A` and
//! conclusion `B` is satisfied by a member exactly when some premise cell
//! carries the satisfying bit of the row's mode (`1` for dimplications,
//! `0` for implications), or when all of `A ∪ B` carries the other bit.
//! Imposing it on a row therefore yields
//!
//! 1. the row itself if every member already has a satisfying premise cell;
//! 2. otherwise the row with `A ∪ B` forced to the non-satisfying bit, plus
//! 3. a disjoint split of the members that have a satisfying premise cell:
//!    one row in which the free premise cells become a fresh group, then a
//!    Flag of Papua over the premise cells that sit in existing groups.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, ResourceAbort, Result};
use crate::model::{Dimplication, Domain, Implication, ItemSet};
use crate::rows::{Cell, Mode, RowFamily, SymbolRow, Work};

/// Resource guards for long computations.
#[derive(Clone, Debug, Default)]
pub struct Limits {
    /// Abort when more than this many final rows are produced.
    pub max_rows: Option<usize>,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub(crate) fn check_time(&self) -> Result<()> {
        if let Some(flag) = &self.cancel {
            if flag.load(Ordering::Relaxed) {
                return Err(Error::Resource(ResourceAbort::Cancelled));
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                return Err(Error::Resource(ResourceAbort::Timeout));
            }
        }
        Ok(())
    }

    pub(crate) fn check_rows(&self, rows: usize) -> Result<()> {
        match self.max_rows {
            Some(limit) if rows > limit => Err(Error::Resource(ResourceAbort::LimitExceeded { what: "rows", limit })),
            _ => Ok(()),
        }
    }
}

/// Appends to `out` a disjoint list of rows whose union is the set of members
/// of `row` having the satisfying bit somewhere in `premise`.
pub(crate) fn split_meeting(row: &SymbolRow, premise: &ItemSet, out: &mut Vec<SymbolRow>) {
    let hi = row.mode().hi();
    if premise_always_met(row, premise) {
        out.push(row.clone());
        return;
    }
    let mut free = Vec::new();
    let mut grouped = Vec::new();
    for i in premise.iter() {
        match row.cell(i) {
            Cell::Free => free.push(i),
            Cell::Group(_) => grouped.push(i),
            _ => {}
        }
    }
    if !free.is_empty() {
        let mut w = Work::new(row);
        w.fresh_group(&free);
        out.push(w.finish());
    }
    let mut base = Work::new(row);
    for &i in &free {
        base.force(i, !hi);
    }
    for (k, &i) in grouped.iter().enumerate() {
        let mut w = base.clone();
        let ok = grouped[..k].iter().all(|&j| w.force(j, !hi)) && w.force(i, hi);
        if ok {
            out.push(w.finish());
        }
    }
}

/// Every member has a satisfying premise cell: a premise cell is fixed to the
/// satisfying bit, or some group lies entirely inside the premise.
fn premise_always_met(row: &SymbolRow, premise: &ItemSet) -> bool {
    let hi = row.mode().hi();
    let fixed_hi = if hi { Cell::One } else { Cell::Zero };
    premise.iter().any(|i| row.cell(i) == fixed_hi)
        || row.groups().iter().any(|g| g.iter().all(|&i| premise.contains(i)))
}

/// Appends the rows of `row` that satisfy the constraint `premise / conclusion`.
pub(crate) fn impose(row: &SymbolRow, premise: &ItemSet, conclusion: &ItemSet, out: &mut Vec<SymbolRow>) {
    if premise_always_met(row, premise) {
        out.push(row.clone());
        return;
    }
    let lo = !row.mode().hi();
    let mut w = Work::new(row);
    if premise.union(conclusion).iter().all(|i| w.force(i, lo)) {
        out.push(w.finish());
    }
    split_meeting(row, premise, out);
}

/// Splits an E-mode row into disjoint rows whose members satisfy `d`.
pub fn impose_dimplication(row: &SymbolRow, d: &Dimplication) -> Vec<SymbolRow> {
    assert_eq!(row.mode(), Mode::E, "dimplications are imposed on 012e-rows");
    let mut out = Vec::new();
    impose(row, d.premise(), d.conclusion(), &mut out);
    out
}

/// Splits an N-mode row into disjoint rows whose members satisfy `i`.
pub fn impose_implication(row: &SymbolRow, i: &Implication) -> Vec<SymbolRow> {
    assert_eq!(row.mode(), Mode::N, "implications are imposed on 012n-rows");
    let mut out = Vec::new();
    impose(row, i.premise(), i.conclusion(), &mut out);
    out
}

/// One step of the working stack: a row about to receive the constraint with
/// the given (0-based) index. An index equal to the number of constraints
/// marks a final row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub row: SymbolRow,
    pub pending: usize,
}

/// The result of a guarded compression run.
#[derive(Clone, Debug)]
pub struct Compressed {
    pub family: RowFamily,
    /// Largest size the working stack reached.
    pub peak_stack: usize,
    pub trace: Vec<TraceStep>,
}

/// Configurable driver for both engines.
#[derive(Clone, Debug, Default)]
pub struct Compressor {
    limits: Limits,
    trace: bool,
}

impl Compressor {
    pub fn new() -> Self {
        Compressor::default()
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// Record every popped stack entry.
    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    /// `K(theta)` as a disjoint family of 012e-rows.
    pub fn space(&self, dom: &Domain, theta: &[Dimplication]) -> Result<Compressed> {
        let constraints: Vec<(&ItemSet, &ItemSet)> = theta.iter().map(|d| (d.premise(), d.conclusion())).collect();
        self.run(dom, Mode::E, &constraints)
    }

    /// `C(sigma)` as a disjoint family of 012n-rows.
    pub fn closure_system(&self, dom: &Domain, sigma: &[Implication]) -> Result<Compressed> {
        let constraints: Vec<(&ItemSet, &ItemSet)> = sigma.iter().map(|i| (i.premise(), i.conclusion())).collect();
        self.run(dom, Mode::N, &constraints)
    }

    fn run(&self, dom: &Domain, mode: Mode, constraints: &[(&ItemSet, &ItemSet)]) -> Result<Compressed> {
        for (a, b) in constraints {
            dom.check(a)?;
            dom.check(b)?;
        }
        let n = constraints.len();
        let mut stack = vec![(SymbolRow::free(mode, dom.width()), 0usize)];
        let mut finals = Vec::new();
        let mut trace = Vec::new();
        let mut peak = 1;
        let mut children = Vec::new();
        let mut steps = 0u64;
        while let Some((row, pending)) = stack.pop() {
            steps += 1;
            if steps.is_multiple_of(1024) {
                self.limits.check_time()?;
            }
            if self.trace {
                trace.push(TraceStep {
                    row: row.clone(),
                    pending,
                });
            }
            if pending == n {
                finals.push(row);
                self.limits.check_rows(finals.len())?;
                continue;
            }
            let (premise, conclusion) = constraints[pending];
            children.clear();
            impose(&row, premise, conclusion, &mut children);
            // first child ends up on top
            stack.extend(children.drain(..).rev().map(|r| (r, pending + 1)));
            peak = peak.max(stack.len());
        }
        Ok(Compressed {
            family: RowFamily::from_parts(dom.clone(), mode, finals),
            peak_stack: peak,
            trace,
        })
    }
}

/// `K(theta) = {S : every dimplication of theta holds for S}` as 012e-rows.
pub fn compress_space(dom: &Domain, theta: &[Dimplication]) -> Result<RowFamily> {
    Ok(Compressor::new().space(dom, theta)?.family)
}

/// `C(sigma) = {X : every implication of sigma holds in X}` as 012n-rows.
pub fn compress_closure(dom: &Domain, sigma: &[Implication]) -> Result<RowFamily> {
    Ok(Compressor::new().closure_system(dom, sigma)?.family)
}

/// Removes the chunk `D = {K : A ∩ K = ∅, q ∈ K}` from an E-mode family.
///
/// Each row splits into the members without `q` and the members with `q`
/// that meet `A`.
pub fn remove_chunk(f: &RowFamily, premise: &ItemSet, q: usize) -> Result<RowFamily> {
    if f.mode() != Mode::E {
        return Err(Error::Precondition("chunk removal needs a 012e-row family".into()));
    }
    f.domain().check(premise)?;
    if premise.is_empty() {
        return Err(Error::Precondition("chunk premise must be nonempty".into()));
    }
    if q >= f.domain().width() || premise.contains(q) {
        return Err(Error::Precondition(
            "query item must be a domain item outside the premise".into(),
        ));
    }
    let mut rows = Vec::with_capacity(f.len() + 1);
    for row in f.rows() {
        remove_chunk_row(row, premise, q, &mut rows);
    }
    Ok(RowFamily::from_parts(f.domain().clone(), Mode::E, rows))
}

fn remove_chunk_row(row: &SymbolRow, premise: &ItemSet, q: usize, out: &mut Vec<SymbolRow>) {
    if row.cell(q) == Cell::Zero || premise_always_met(row, premise) {
        out.push(row.clone());
        return;
    }
    let mut without_q = Work::new(row);
    if without_q.force(q, false) {
        out.push(without_q.finish());
    }
    let mut with_q = Work::new(row);
    if with_q.force(q, true) {
        split_meeting(&with_q.finish(), premise, out);
    }
}

/// Forward-chaining closure of `s` under `sigma`.
pub fn closure(s: &ItemSet, sigma: &[Implication]) -> ItemSet {
    let mut current = s.clone();
    let mut fired = vec![false; sigma.len()];
    loop {
        let mut changed = false;
        for (i, imp) in sigma.iter().enumerate() {
            if !fired[i] && imp.premise().is_subset(&current) {
                fired[i] = true;
                if !imp.conclusion().is_subset(&current) {
                    current.union_with(imp.conclusion());
                    changed = true;
                }
            }
        }
        if !changed {
            return current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn row(mode: Mode, text: &str) -> SymbolRow {
        let w = text.split_whitespace().count();
        SymbolRow::parse_tokens(mode, w, text).unwrap()
    }

    fn set(w: usize, items: &[usize]) -> ItemSet {
        // 1-based, as in the worked examples
        ItemSet::from_indices(w, items.iter().map(|i| i - 1))
    }

    fn members_sorted(rows: &[SymbolRow]) -> Vec<ItemSet> {
        let mut v: Vec<_> = rows.iter().flat_map(|r| r.members()).collect();
        v.sort();
        v
    }

    #[test]
    fn first_dimplication_of_small_example() {
        let d = Dimplication::new(set(5, &[5]), set(5, &[1])).unwrap();
        let got = impose_dimplication(&SymbolRow::free(Mode::E, 5), &d);
        assert_eq!(got, vec![row(Mode::E, "0 2 2 2 0"), row(Mode::E, "2 2 2 2 1")]);
    }

    #[test]
    fn premise_of_three_free_cells_becomes_one_group() {
        let d = Dimplication::new(set(10, &[2, 3, 6]), set(10, &[4, 7])).unwrap();
        let got = impose_dimplication(&SymbolRow::free(Mode::E, 10), &d);
        assert_eq!(
            got,
            vec![row(Mode::E, "2 0 0 0 2 0 0 2 2 2"), row(Mode::E, "2 e e 2 2 e 2 2 2 2"),]
        );
    }

    #[test]
    fn premise_clashing_with_two_groups() {
        let r6 = row(Mode::E, "2 e1 e1 2 e2 e1 2 2 2 e2");
        let d = Dimplication::new(set(10, &[6, 9, 10]), set(10, &[7])).unwrap();
        let got = impose_dimplication(&r6, &d);
        let expected = vec![
            row(Mode::E, "2 e e 2 1 0 0 2 0 0"),
            row(Mode::E, "2 e1 e1 2 e2 e1 2 2 1 e2"),
            row(Mode::E, "2 2 2 2 e 1 2 2 0 e"),
            row(Mode::E, "2 e e 2 2 0 2 2 0 1"),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn one_in_premise_short_circuits() {
        let r = row(Mode::E, "1 2 2");
        let d = Dimplication::new(set(3, &[1]), set(3, &[2])).unwrap();
        assert_eq!(impose_dimplication(&r, &d), vec![r.clone()]);
        let r = row(Mode::E, "e e 2");
        let d = Dimplication::new(set(3, &[1, 2]), set(3, &[3])).unwrap();
        assert_eq!(impose_dimplication(&r, &d), vec![r.clone()]);
    }

    #[test]
    fn small_example_trace_and_count() {
        let dom = Domain::new(["a", "b", "c", "d", "e"]).unwrap();
        let theta = [("e", "a"), ("a", "b"), ("b d", "c")]
            .iter()
            .map(|(a, b)| Dimplication::new(dom.parse_set(a).unwrap(), dom.parse_set(b).unwrap()).unwrap())
            .collect::<Vec<_>>();
        let out = Compressor::new().trace(true).space(&dom, &theta).unwrap();
        assert_eq!(out.family.count(), BigUint::from(13u32));
        // the first popped rows follow the LIFO order of the worked trace
        let steps: Vec<_> = out
            .trace
            .iter()
            .take(3)
            .map(|s| (s.row.to_tokens(), s.pending))
            .collect();
        assert_eq!(
            steps,
            vec![
                ("2 2 2 2 2".to_string(), 0),
                ("0 2 2 2 0".to_string(), 1),
                ("0 0 2 2 0".to_string(), 2),
            ]
        );
        assert!(out.family.is_pairwise_disjoint());
    }

    #[test]
    fn empty_theta_is_powerset() {
        let dom = Domain::numbered(6).unwrap();
        let f = compress_space(&dom, &[]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.count(), BigUint::from(64u32));
    }

    #[test]
    fn chunk_removal_on_plain_row() {
        let r = row(Mode::E, "2 0 2 2 0 2 1 0 2");
        let dom = Domain::numbered(9).unwrap();
        let f = RowFamily::new(dom, Mode::E, vec![r]).unwrap();
        let out = remove_chunk(&f, &set(9, &[1, 2, 3, 4, 5]), 5).unwrap();
        assert_eq!(
            out.rows(),
            &[row(Mode::E, "2 0 2 2 0 0 1 0 2"), row(Mode::E, "e 0 e e 0 1 1 0 2")]
        );
    }

    #[test]
    fn chunk_removal_edge_rows() {
        let dom = Domain::numbered(3).unwrap();
        let zero_q = RowFamily::new(dom.clone(), Mode::E, vec![row(Mode::E, "2 2 0")]).unwrap();
        assert_eq!(remove_chunk(&zero_q, &set(3, &[1]), 2).unwrap(), zero_q);
        let zero_premise = RowFamily::new(dom.clone(), Mode::E, vec![row(Mode::E, "0 2 2")]).unwrap();
        let out = remove_chunk(&zero_premise, &set(3, &[1]), 2).unwrap();
        assert_eq!(out.rows(), &[row(Mode::E, "0 2 0")]);
        assert!(remove_chunk(&zero_premise, &set(3, &[1, 3]), 2).is_err());
        assert!(remove_chunk(&zero_premise, &ItemSet::empty(3), 2).is_err());
    }

    #[test]
    fn implication_on_two_cells() {
        let i = Implication::new(set(2, &[1]), set(2, &[2])).unwrap();
        let got = impose_implication(&SymbolRow::free(Mode::N, 2), &i);
        assert_eq!(
            members_sorted(&got),
            members_sorted(&[row(Mode::N, "0 2"), row(Mode::N, "1 1")])
        );
    }

    #[test]
    fn closure_chains() {
        let a = set(3, &[1]);
        assert_eq!(closure(&a, &[]), a);
        let sigma = vec![
            Implication::new(set(3, &[1]), set(3, &[2])).unwrap(),
            Implication::new(set(3, &[2]), set(3, &[3])).unwrap(),
        ];
        assert_eq!(closure(&a, &sigma), set(3, &[1, 2, 3]));
        // an empty premise always fires
        let sigma = vec![Implication::new(ItemSet::empty(3), set(3, &[3])).unwrap()];
        assert_eq!(closure(&ItemSet::empty(3), &sigma), set(3, &[3]));
    }

    #[test]
    fn row_limit_aborts() {
        let dom = Domain::numbered(8).unwrap();
        let theta: Vec<_> = (0..7)
            .map(|i| Dimplication::new(ItemSet::from_indices(8, [i]), ItemSet::from_indices(8, [i + 1])).unwrap())
            .collect();
        let limits = Limits {
            max_rows: Some(2),
            ..Limits::none()
        };
        let err = Compressor::new().limits(limits).space(&dom, &theta).unwrap_err();
        assert!(err.is_resource_abort());
    }
}
