//! Distinguished partitions of `{0, 1, …, n}`.
//!
//! The block containing `0` is the distinguished block. Blocks are kept
//! sorted internally and ordered by least element, so the distinguished block
//! is always `blocks()[0]` and two partitions are equal iff their block lists
//! are equal.
//!
//! Canonical text form: blocks separated by `|`, elements by `,`
//! (`0,1|2|3,4`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest ground size accepted by [`enumerate`].
pub const MAX_ENUMERATION_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DistinguishedPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl DistinguishedPartition {
    /// Builds a partition from arbitrary blocks. Blocks may be given in any
    /// order and with unsorted elements; they must be nonempty, disjoint and
    /// cover `{0,…,n}`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut sorted = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(invalid("empty block"));
            }
            block.sort_unstable();
            for &e in &block {
                if e > n {
                    return Err(invalid(format!("element {e} outside {{0..{n}}}")));
                }
                if seen[e] {
                    return Err(invalid(format!("element {e} appears twice")));
                }
                seen[e] = true;
            }
            sorted.push(block);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("element {missing} is not covered")));
        }
        sorted.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks: sorted })
    }

    /// Builds the partition in which `i ~ j` iff `labels[i] == labels[j]`.
    /// The ground size is `labels.len() - 1`.
    pub fn from_labels<L: Eq + Copy + std::hash::Hash>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() {
            return Err(invalid("label vector must contain element 0"));
        }
        let mut index = std::collections::HashMap::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let b = *index.entry(*l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        // First occurrence order is least-element order, elements ascending.
        Ok(Self {
            n: labels.len() - 1,
            blocks,
        })
    }

    /// `{0}, {1}, …, {n}`.
    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..=n).map(|i| vec![i]).collect(),
        }
    }

    /// The one-block partition `{0, …, n}`.
    pub fn whole(n: usize) -> Self {
        Self {
            n,
            blocks: vec![(0..=n).collect()],
        }
    }

    /// Ground size: this is a partition of `{0,…,n}`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `#π`, the number of blocks including the distinguished one.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Number of blocks not containing 0.
    pub fn non_distinguished_count(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn distinguished(&self) -> &[usize] {
        &self.blocks[0]
    }

    pub fn is_whole(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Block index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n + 1];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                labels[e] = b;
            }
        }
        labels
    }

    /// Multiset of block sizes, distinguished block first, the rest sorted
    /// in decreasing order.
    pub fn block_sizes(&self) -> (usize, Vec<usize>) {
        let mut rest: Vec<usize> = self.blocks[1..].iter().map(Vec::len).collect();
        rest.sort_unstable_by(|a, b| b.cmp(a));
        (self.blocks[0].len(), rest)
    }

    /// Per-block frequency `#(B ∩ {1,…,n}) / n`, in block order (the
    /// distinguished block first). Element 0 is never counted.
    pub fn empirical_frequencies(&self) -> Result<Vec<f64>> {
        if self.n == 0 {
            return Err(invalid("frequencies need n >= 1"));
        }
        let n = self.n as f64;
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let count = if i == 0 { b.len() - 1 } else { b.len() };
                count as f64 / n
            })
            .collect())
    }

    /// Number of non-distinguished singleton blocks.
    pub fn singleton_count(&self) -> usize {
        self.blocks[1..].iter().filter(|b| b.len() == 1).count()
    }

    /// Restriction to `{0,…,m}`.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return Err(invalid(format!("cannot restrict a partition of [{}] to [{m}]", self.n)));
        }
        let blocks = self
            .blocks
            .iter()
            .filter_map(|b| {
                let kept: Vec<usize> = b.iter().copied().take_while(|&e| e <= m).collect();
                (!kept.is_empty()).then_some(kept)
            })
            .collect();
        Ok(Self { n: m, blocks })
    }

    /// `Coag(self, other)`: block `i` of the result is the union of the
    /// blocks of `self` indexed by block `i` of `other`. `other` must be a
    /// partition of the block indices `{0,…,#self−1}`.
    pub fn coag(&self, other: &Self) -> Result<Self> {
        if other.n + 1 != self.num_blocks() {
            return Err(invalid(format!(
                "coagulating partition has ground size {} but {} block indices are required",
                other.n,
                self.num_blocks() - 1
            )));
        }
        let mut blocks: Vec<Vec<usize>> = other
            .blocks
            .iter()
            .map(|group| {
                let mut merged: Vec<usize> =
                    group.iter().flat_map(|&j| self.blocks[j].iter().copied()).collect();
                merged.sort_unstable();
                merged
            })
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n: self.n, blocks })
    }

    /// `σπ`, defined by `i ~ j` iff `σ(i) ~_π σ(j)`.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.n() != self.n {
            return Err(invalid(format!(
                "permutation of [{}] applied to a partition of [{}]",
                sigma.n(),
                self.n
            )));
        }
        let labels = self.labels();
        let moved: Vec<usize> = (0..=self.n).map(|i| labels[sigma.apply(i)]).collect();
        Self::from_labels(&moved)
    }

    /// Merges the non-distinguished blocks whose indices (in `1..=b`) are in
    /// `subset` into a single block.
    pub fn merge_blocks(&self, subset: &[usize]) -> Self {
        self.merge_subset(subset, false)
    }

    /// Merges the non-distinguished blocks in `subset` into the
    /// distinguished block.
    pub fn join_distinguished(&self, subset: &[usize]) -> Self {
        self.merge_subset(subset, true)
    }

    fn merge_subset(&self, subset: &[usize], with_zero: bool) -> Self {
        let mut chosen = vec![false; self.blocks.len()];
        for &j in subset {
            assert!(j >= 1 && j < self.blocks.len(), "block index {j} out of range");
            chosen[j] = true;
        }
        chosen[0] = with_zero;
        let mut merged: Vec<usize> = Vec::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (block, &c) in self.blocks.iter().zip(&chosen) {
            if c {
                merged.extend_from_slice(block);
            } else {
                blocks.push(block.clone());
            }
        }
        if !merged.is_empty() {
            merged.sort_unstable();
            let at = blocks.partition_point(|b: &Vec<usize>| b[0] < merged[0]);
            blocks.insert(at, merged);
        }
        Self { n: self.n, blocks }
    }
}

/// `true` iff `small` is the restriction of `large` to `small`'s ground set.
pub fn compatibility_check(small: &DistinguishedPartition, large: &DistinguishedPartition) -> bool {
    small.n <= large.n && large.restrict(small.n).map(|r| &r == small).unwrap_or(false)
}

/// All distinguished partitions of `{0,…,n}`, generated as restricted
/// growth strings (Bell(n+1) of them).
pub fn enumerate(n: usize) -> Result<Vec<DistinguishedPartition>> {
    if n > MAX_ENUMERATION_SIZE {
        return Err(invalid(format!(
            "enumeration is capped at n = {MAX_ENUMERATION_SIZE}, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n + 1];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<DistinguishedPartition>) {
        if i == labels.len() {
            out.push(DistinguishedPartition::from_labels(labels).expect("valid labels"));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            rec(i + 1, max.max(l), labels, out);
        }
    }
    rec(1, 0, &mut labels, &mut out);
    Ok(out)
}

impl fmt::Display for DistinguishedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for DistinguishedPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut max = 0;
        for block in s.trim().split('|') {
            let elems = block
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad partition element {e:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            max = elems.iter().copied().fold(max, usize::max);
            blocks.push(elems);
        }
        Self::from_blocks(max, blocks).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }
}

impl TryFrom<String> for DistinguishedPartition {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistinguishedPartition> for String {
    fn from(p: DistinguishedPartition) -> String {
        p.to_string()
    }
}

/// A bijection of `{0,…,n}` fixing 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.first() != Some(&0) {
            return Err(invalid("permutation must fix 0"));
        }
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || seen[m] {
                return Err(invalid("map is not a bijection"));
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.map.len() - 1
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> DistinguishedPartition {
        s.parse().unwrap()
    }

    #[test]
    fn coag_examples() {
        assert_eq!(p("0|1,2|3").coag(&p("0,1|2")).unwrap(), p("0,1,2|3"));
        let pi = p("0,3|1|2,4");
        assert_eq!(pi.coag(&DistinguishedPartition::singletons(2)).unwrap(), pi);
        assert_eq!(
            pi.coag(&DistinguishedPartition::whole(2)).unwrap(),
            DistinguishedPartition::whole(4)
        );
    }

    #[test]
    fn coag_rejects_index_mismatch() {
        assert!(p("0|1|2").coag(&p("0|1|2|3")).is_err());
    }

    #[test]
    fn coag_identities_exhaustive() {
        for n in 0..=6 {
            for pi in enumerate(n).unwrap() {
                let b = pi.num_blocks() - 1;
                assert_eq!(pi.coag(&DistinguishedPartition::singletons(b)).unwrap(), pi);
                assert_eq!(
                    pi.coag(&DistinguishedPartition::whole(b)).unwrap(),
                    DistinguishedPartition::whole(n)
                );
            }
        }
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(p("0,2|1,3").restrict(1).unwrap(), p("0|1"));
        let pi = p("0,2|1,3");
        assert_eq!(pi.restrict(3).unwrap(), pi);
        assert_eq!(DistinguishedPartition::whole(5).restrict(0).unwrap(), p("0"));
        assert!(pi.restrict(4).is_err());
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatibility_check(&p("0|1"), &p("0|1,2")));
        assert!(!compatibility_check(&p("0,1"), &p("0|1,2")));
        let pi = p("0,2|1|3");
        assert!(compatibility_check(&pi, &pi));
    }

    #[test]
    fn permutation_examples() {
        let pi = p("0,1|2");
        assert_eq!(pi.permute(&Permutation::identity(2)).unwrap(), pi);
        let swap = Permutation::new(vec![0, 2, 1]).unwrap();
        assert_eq!(pi.permute(&swap).unwrap(), p("0,2|1"));
        assert!(Permutation::new(vec![1, 0, 2]).is_err());
        assert!(Permutation::new(vec![0, 1, 1]).is_err());
    }

    #[test]
    fn frequencies() {
        let f = DistinguishedPartition::whole(10).empirical_frequencies().unwrap();
        assert_eq!(f, vec![1.0]);
        let f = DistinguishedPartition::singletons(10).empirical_frequencies().unwrap();
        assert_eq!(f[0], 0.0);
        assert!(f[1..].iter().all(|&x| (x - 0.1).abs() < 1e-15));
        assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(DistinguishedPartition::singletons(0).empirical_frequencies().is_err());
    }

    #[test]
    fn text_form() {
        let pi = p("0,1|2|3,4");
        assert_eq!(pi.to_string(), "0,1|2|3,4");
        assert_eq!(p("3,4|2|1,0"), pi);
        assert!("0|2".parse::<DistinguishedPartition>().is_err());
        assert!("0,1|1".parse::<DistinguishedPartition>().is_err());
    }

    #[test]
    fn enumeration_counts_are_bell_numbers() {
        let bell = [1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(enumerate(n).unwrap().len(), b);
        }
        assert!(enumerate(MAX_ENUMERATION_SIZE + 1).is_err());
    }

    #[test]
    fn merge_helpers() {
        let pi = p("0|1|2,3|4");
        // Block indices 1 = {1}, 2 = {2,3}, 3 = {4}.
        assert_eq!(pi.merge_blocks(&[1, 3]), p("0|1,4|2,3"));
        assert_eq!(pi.join_distinguished(&[2]), p("0,2,3|1|4"));
    }
}
