//! The join-irreducible poset of a learning space and its implication base
//! over join-irreducible labels.
//!
//! Every base set is a join irreducible. Singleton base sets keep the label of
//! their item; the others receive fresh letter labels that avoid the item
//! labels. The implication base is the union of the poset part
//! `{P} -> lcov(P)` and the clique part `{P} ∪ lcov(R) -> {R}` for distinct
//! `P`, `R` of the same color. Its closed sets correspond one-to-one to the
//! states of the space through [`JiPoset::expand`].

use std::collections::{BTreeMap, HashSet};

use crate::base::ColoredBase;
use crate::error::{Error, Result};
use crate::model::{Domain, Implication, ItemSet};

/// Join irreducibles with their lower covers and colors.
#[derive(Clone, Debug)]
pub struct JiPoset {
    items: Domain,
    labels: Domain,
    nodes: Vec<ItemSet>,
    lcov: Vec<Vec<usize>>,
    colors: Vec<usize>,
}

impl JiPoset {
    /// Builds the poset; lower covers are the maximal base sets strictly
    /// inside a node.
    pub fn build(cb: &ColoredBase) -> JiPoset {
        let sets = cb.sets();
        let k = sets.len();
        let below: Vec<Vec<usize>> = (0..k)
            .map(|p| (0..k).filter(|&r| sets[r].is_proper_subset(&sets[p])).collect())
            .collect();
        let lcov_raw: Vec<Vec<usize>> = (0..k)
            .map(|p| {
                below[p]
                    .iter()
                    .copied()
                    .filter(|&r| !below[p].iter().any(|&s| sets[r].is_proper_subset(&sets[s])))
                    .collect()
            })
            .collect();
        let mut height = vec![0usize; k];
        let mut by_size: Vec<usize> = (0..k).collect();
        by_size.sort_by_key(|&p| sets[p].len());
        for &p in &by_size {
            height[p] = lcov_raw[p].iter().map(|&r| height[r] + 1).max().unwrap_or(0);
        }

        // singletons by item, then the rest by height, least item, size, lexicographic
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&p, &r| {
            let (a, b) = (&sets[p], &sets[r]);
            (a.len() > 1)
                .cmp(&(b.len() > 1))
                .then_with(|| height[p].cmp(&height[r]))
                .then_with(|| a.first().cmp(&b.first()))
                .then_with(|| a.len().cmp(&b.len()))
                .then_with(|| a.cmp(b))
        });
        let mut position = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }

        let items = cb.domain().clone();
        let taken: HashSet<&str> = items.labels().iter().map(String::as_str).collect();
        let mut fresh = FreshLabels::new(taken);
        let labels: Vec<String> = order
            .iter()
            .map(|&p| match sets[p].len() {
                1 => items.label(sets[p].first().expect("nonempty")).to_string(),
                _ => fresh.next_label(),
            })
            .collect();

        JiPoset {
            labels: Domain::new(labels).expect("labels are distinct"),
            nodes: order.iter().map(|&p| sets[p].clone()).collect(),
            lcov: order
                .iter()
                .map(|&p| {
                    let mut l: Vec<usize> = lcov_raw[p].iter().map(|&r| position[r]).collect();
                    l.sort_unstable();
                    l
                })
                .collect(),
            colors: order.iter().map(|&p| cb.color(p)).collect(),
            items,
        }
    }

    /// The item domain of the underlying space.
    pub fn items(&self) -> &Domain {
        &self.items
    }

    /// The domain of join-irreducible labels, in node order.
    pub fn labels(&self) -> &Domain {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The base set of node `p`.
    pub fn node(&self, p: usize) -> &ItemSet {
        &self.nodes[p]
    }

    pub fn lcov(&self, p: usize) -> &[usize] {
        &self.lcov[p]
    }

    pub fn color(&self, p: usize) -> usize {
        self.colors[p]
    }

    /// Color classes with at least two nodes, keyed by color.
    pub fn cliques(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (p, &c) in self.colors.iter().enumerate() {
            classes.entry(c).or_default().push(p);
        }
        classes.retain(|_, v| v.len() >= 2);
        classes
    }

    fn label_set<I: IntoIterator<Item = usize>>(&self, nodes: I) -> ItemSet {
        ItemSet::from_indices(self.len(), nodes)
    }

    /// `{P} -> lcov(P)` for every node with lower covers.
    pub fn sigma_po(&self) -> Vec<Implication> {
        (0..self.len())
            .filter(|&p| !self.lcov[p].is_empty())
            .map(|p| {
                Implication::new(self.label_set([p]), self.label_set(self.lcov[p].iter().copied()))
                    .expect("lower covers exclude the node")
            })
            .collect()
    }

    /// `{P} ∪ lcov(R) -> {R}` for every ordered pair of distinct nodes of one
    /// color.
    pub fn sigma_jn(&self) -> Vec<Implication> {
        let mut out = Vec::new();
        for class in self.cliques().values() {
            for &p in class {
                for &r in class {
                    if p != r {
                        let premise = self.label_set(self.lcov[r].iter().copied()).with(p);
                        out.push(Implication::new(premise, self.label_set([r])).expect("r is not below itself"));
                    }
                }
            }
        }
        out
    }

    /// The poset part followed by the clique part.
    pub fn sigma(&self) -> Vec<Implication> {
        let mut all = self.sigma_po();
        all.extend(self.sigma_jn());
        all
    }

    /// Union of the base sets named in `x`.
    pub fn expand(&self, x: &ItemSet) -> Result<ItemSet> {
        self.labels.check(x)?;
        let mut out = self.items.empty_set();
        for p in x.iter() {
            out.union_with(&self.nodes[p]);
        }
        Ok(out)
    }

    /// Like [`JiPoset::expand`] with the nodes given by label.
    pub fn expand_labels<I, S>(&self, labels: I) -> Result<ItemSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.expand(&self.labels.set(labels)?)
    }

    /// One `<ji-label>: <item labels>` line per node.
    pub fn map_text(&self) -> String {
        let mut out = String::new();
        for (p, node) in self.nodes.iter().enumerate() {
            out.push_str(&format!("{}: {}\n", self.labels.label(p), self.items.format_set(node)));
        }
        out
    }
}

/// Reads a `<ji-label>: <item labels>` map back into label/set pairs.
pub fn read_ji_map(items: &Domain, text: &str) -> Result<Vec<(String, ItemSet)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, set) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(i + 1, "expected `<label>: <items>`"))?;
        let set = items.parse_set(set).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.push((label.trim().to_string(), set));
    }
    Ok(out)
}

/// Letters `a`..`z`, then two-letter labels, skipping taken ones.
struct FreshLabels<'a> {
    taken: HashSet<&'a str>,
    counter: usize,
}

impl<'a> FreshLabels<'a> {
    fn new(taken: HashSet<&'a str>) -> Self {
        FreshLabels { taken, counter: 0 }
    }

    fn next_label(&mut self) -> String {
        loop {
            let label = spreadsheet_label(self.counter);
            self.counter += 1;
            if !self.taken.contains(label.as_str()) {
                return label;
            }
        }
    }
}

fn spreadsheet_label(mut n: usize) -> String {
    let mut bytes = Vec::new();
    loop {
        bytes.push(b'a' + (n % 26) as u8);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    bytes.reverse();
    String::from_utf8(bytes).expect("ascii")
}

/// The poset part of the implication base.
pub fn sigma_po(p: &JiPoset) -> Vec<Implication> {
    p.sigma_po()
}

/// The clique part of the implication base.
pub fn sigma_jn(p: &JiPoset) -> Vec<Implication> {
    p.sigma_jn()
}

/// Builds the poset and returns it with its full implication base.
pub fn sigma_l(cb: &ColoredBase) -> (JiPoset, Vec<Implication>) {
    let p = JiPoset::build(cb);
    let sigma = p.sigma();
    (p, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{color_base, BaseFamily};
    use crate::engine::compress_closure;

    fn colored(labels: &[&str], sets: &[&str]) -> ColoredBase {
        let dom = Domain::new(labels.iter().copied()).unwrap();
        let sets = sets.iter().map(|s| dom.parse_set(s).unwrap()).collect();
        color_base(&BaseFamily::new(dom, sets).unwrap()).unwrap()
    }

    fn b2() -> ColoredBase {
        colored(
            &["a", "b", "c", "d", "e"],
            &["d", "e", "a e", "c d", "a b e", "a b c e"],
        )
    }

    #[test]
    fn labels_skip_item_names() {
        let p = JiPoset::build(&b2());
        assert_eq!(p.labels().labels(), &["d", "e", "f", "g", "h", "i"]);
        assert_eq!(spreadsheet_label(0), "a");
        assert_eq!(spreadsheet_label(25), "z");
        assert_eq!(spreadsheet_label(26), "aa");
        assert_eq!(spreadsheet_label(27), "ab");
    }

    #[test]
    fn lower_covers_of_small_base() {
        let p = JiPoset::build(&b2());
        let items = p.items().clone();
        let find = |s: &str| {
            (0..p.len())
                .find(|&i| p.node(i) == &items.parse_set(s).unwrap())
                .unwrap()
        };
        assert_eq!(p.lcov(find("a b e")), &[find("a e")]);
        assert_eq!(p.lcov(find("a e")), &[find("e")]);
        let mut abce = p.lcov(find("a b c e")).to_vec();
        abce.sort_unstable();
        assert_eq!(abce, vec![find("a b e")]);
        assert!(p.lcov(find("d")).is_empty());
        // cd and abce share color c
        assert_eq!(p.cliques().len(), 1);
        assert_eq!(p.sigma_jn().len(), 2);
    }

    #[test]
    fn closure_system_has_as_many_sets_as_the_space() {
        let (p, sigma) = sigma_l(&b2());
        assert!(sigma.len() <= p.len() * p.len());
        let f = compress_closure(p.labels(), &sigma).unwrap();
        assert_eq!(f.count(), 13u32.into());
    }

    #[test]
    fn incomparable_base_has_no_implications() {
        let cb = colored(&["1", "2", "3"], &["1", "2", "3"]);
        let p = JiPoset::build(&cb);
        assert!(p.sigma().is_empty());
        assert_eq!(p.expand(&p.labels().full_set()).unwrap(), p.items().full_set());
        assert!(p.expand(&p.labels().empty_set()).unwrap().is_empty());
    }

    #[test]
    fn map_round_trip() {
        let p = JiPoset::build(&b2());
        let map = read_ji_map(p.items(), &p.map_text()).unwrap();
        assert_eq!(map.len(), 6);
        for (i, (label, set)) in map.iter().enumerate() {
            assert_eq!(label, p.labels().label(i));
            assert_eq!(set, p.node(i));
        }
        assert!(p.expand_labels(["zz"]).is_err());
    }
}
