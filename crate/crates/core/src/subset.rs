use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A set of carrier elements, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(BTreeSet<usize>);

impl Subset {
    pub fn new() -> Self {
        Subset(BTreeSet::new())
    }

    pub fn full(size: usize) -> Self {
        (0..size).collect()
    }

    pub fn singleton(a: usize) -> Self {
        Subset(BTreeSet::from([a]))
    }

    /// The subset whose members are the set bits of `bits`.
    pub fn from_bits(bits: u64) -> Self {
        (0..64).filter(|i| bits >> i & 1 == 1).collect()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: usize) -> bool {
        self.0.insert(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        Subset(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        Subset(self.0.intersection(&other.0).copied().collect())
    }

    /// Membership mask over a carrier of `size` elements.
    pub fn mask(&self, size: usize) -> Vec<bool> {
        let mut m = vec![false; size];
        for a in self.iter().filter(|&a| a < size) {
            m[a] = true;
        }
        m
    }

    pub(crate) fn check_within(&self, size: usize) -> Result<()> {
        match self.max() {
            Some(a) if a >= size => Err(Error::ElementOutOfRange { element: a, size }),
            _ => Ok(()),
        }
    }

    /// Parses comma-separated element indices, e.g. `0,1,2`. The empty
    /// string is the empty subset.
    pub fn parse(text: &str) -> Result<Subset> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Subset::new());
        }
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::syntax(0, format!("`{}` is not an element index", s.trim())))
            })
            .collect()
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset(iter.into_iter().collect())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// An equivalence relation on `{0..m-1}`, stored as block labels.
///
/// Labels are normalized so that blocks are numbered in order of their
/// least element; two partitions are equal iff their label vectors are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    /// Builds a partition from arbitrary labels: `a` and `b` share a block
    /// iff `labels[a] == labels[b]`.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Self {
        let mut out: Vec<usize> = Vec::with_capacity(labels.len());
        let mut reps: Vec<usize> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            match reps.iter().position(|&r| labels[r] == *l) {
                Some(block) => out.push(block),
                None => {
                    out.push(reps.len());
                    reps.push(i);
                }
            }
        }
        Partition { labels: out }
    }

    pub fn from_blocks(size: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Algebra("empty block in partition".into()));
            }
            for &a in block {
                if a >= size {
                    return Err(Error::ElementOutOfRange { element: a, size });
                }
                if labels[a] != usize::MAX {
                    return Err(Error::Algebra(format!("element {a} occurs in two blocks")));
                }
                labels[a] = b;
            }
        }
        if let Some(a) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Algebra(format!("element {a} is not covered")));
        }
        Ok(Partition::from_labels(&labels))
    }

    /// The identity relation.
    pub fn discrete(size: usize) -> Self {
        Partition {
            labels: (0..size).collect(),
        }
    }

    /// The all relation.
    pub fn indiscrete(size: usize) -> Self {
        Partition {
            labels: vec![0; size],
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |&l| l + 1)
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn block_of(&self, a: usize) -> Subset {
        let l = self.labels[a];
        (0..self.size()).filter(|&b| self.labels[b] == l).collect()
    }

    /// Blocks sorted by least element, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (a, &l) in self.labels.iter().enumerate() {
            out[l].push(a);
        }
        out
    }

    /// `self ≤ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let n = self.size();
        (0..n).all(|a| (a + 1..n).all(|b| !self.related(a, b) || other.related(a, b)))
    }

    /// Least equivalence containing both relations.
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.size());
        for p in [self, other] {
            let mut first: Vec<Option<usize>> = vec![None; p.num_blocks()];
            for (a, &l) in p.labels.iter().enumerate() {
                match first[l] {
                    Some(r) => {
                        uf.union(r, a);
                    }
                    None => first[l] = Some(a),
                }
            }
        }
        uf.partition()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<Subset> = self
            .blocks()
            .into_iter()
            .map(|b| b.into_iter().collect())
            .collect();
        for (i, b) in blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.blocks())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Merges the classes of `a` and `b`; returns false if already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn partition(&mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Partition::from_labels(&roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn labels_are_normalized() {
        let p = Partition::from_labels(&['b', 'a', 'b', 'c']);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(p.to_string(), "{0,2} {1} {3}");
    }

    #[test]
    fn blocks_round_trip_and_reject_bad_input() {
        let p = Partition::from_blocks(4, &[vec![1, 3], vec![0, 2]]).unwrap();
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1, 3]]);
        assert!(Partition::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(2, &[vec![0, 1, 5]]).is_err());
    }

    #[test]
    fn join_merges_transitively() {
        let a = Partition::from_blocks(4, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        let b = Partition::from_blocks(4, &[vec![0], vec![1, 2], vec![3]]).unwrap();
        assert_eq!(a.join(&b).blocks(), vec![vec![0, 1, 2], vec![3]]);
        assert!(a.refines(&a.join(&b)));
        assert!(Partition::discrete(4).refines(&a));
        assert!(a.refines(&Partition::indiscrete(4)));
        assert!(!Partition::indiscrete(4).refines(&a));
    }

    #[test]
    fn subset_parsing() {
        assert_eq!(Subset::parse("0, 2,1").unwrap().to_vec(), vec![0, 1, 2]);
        assert!(Subset::parse("").unwrap().is_empty());
        assert!(Subset::parse("0,a").is_err());
        assert_eq!(Subset::from_bits(0b1010).to_vec(), vec![1, 3]);
    }

    proptest! {
        #[test]
        fn join_is_least_upper_bound(xs in proptest::collection::vec(0usize..4, 6),
                                     ys in proptest::collection::vec(0usize..4, 6)) {
            let a = Partition::from_labels(&xs);
            let b = Partition::from_labels(&ys);
            let j = a.join(&b);
            prop_assert!(a.refines(&j) && b.refines(&j));
            prop_assert_eq!(a.join(&b), b.join(&a));
            // any partition above both is above the join; test with a coarsening of j
            let c = j.join(&a);
            prop_assert_eq!(c, j);
        }
    }
}
