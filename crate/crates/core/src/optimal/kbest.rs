//! Lazy ranked enumeration used to list the children of a search node in
//! ascending local objective without materialising all of them.
//!
//! [`RankedSubsets`] yields the fixed-size subsets of a cost list in ascending
//! sum; [`RankedProduct`] merges several ranked lists into ranked tuples whose
//! key is the sum of the per-list keys. Both use a best-first frontier with a
//! visited set, so every item is produced exactly once.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

/// Heap entry ordered by key, then lexicographically by index tuple.
#[derive(Debug, Clone)]
pub(super) struct Candidate {
    pub(super) key: f64,
    pub(super) index: Vec<u32>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| self.index.cmp(&other.index))
    }
}

/// Size-`k` subsets of `n` weighted items, in ascending total weight.
///
/// Items are identified by their position in the input slice. Ties are broken
/// lexicographically on the sorted-rank tuple, which makes the order fully
/// deterministic.
#[derive(Debug, Clone)]
pub struct RankedSubsets {
    /// Item weights sorted ascending.
    sorted: Vec<f64>,
    /// `order[r]` is the input position of the item with rank `r`.
    order: Vec<usize>,
    size: usize,
    frontier: BinaryHeap<Reverse<Candidate>>,
    seen: HashSet<Vec<u32>>,
    emitted: Vec<(f64, Vec<u32>)>,
}

impl RankedSubsets {
    pub fn new(weights: &[f64], size: usize) -> Self {
        assert!(size <= weights.len(), "subset size exceeds item count");
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
        let mut this = Self {
            sorted,
            order,
            size,
            frontier: BinaryHeap::new(),
            seen: HashSet::new(),
            emitted: Vec::new(),
        };
        let first: Vec<u32> = (0..size as u32).collect();
        this.push(first);
        this
    }

    fn weight_of(&self, ranks: &[u32]) -> f64 {
        ranks.iter().map(|&r| self.sorted[r as usize]).sum()
    }

    fn push(&mut self, ranks: Vec<u32>) {
        if self.seen.insert(ranks.clone()) {
            let key = self.weight_of(&ranks);
            self.frontier.push(Reverse(Candidate { key, index: ranks }));
        }
    }

    fn advance(&mut self) -> bool {
        let Some(Reverse(best)) = self.frontier.pop() else {
            return false;
        };
        let n = self.sorted.len() as u32;
        let k = best.index.len();
        for p in 0..k {
            let limit = if p + 1 < k { best.index[p + 1] } else { n };
            if best.index[p] + 1 < limit {
                let mut next = best.index.clone();
                next[p] += 1;
                self.push(next);
            }
        }
        self.emitted.push((best.key, best.index));
        true
    }

    /// Weight of the `j`-th best subset (0-based), if it exists.
    pub fn weight(&mut self, j: usize) -> Option<f64> {
        while self.emitted.len() <= j {
            if !self.advance() {
                return None;
            }
        }
        Some(self.emitted[j].0)
    }

    /// Input positions of the `j`-th best subset, ascending.
    pub fn subset(&mut self, j: usize) -> Option<Vec<usize>> {
        self.weight(j)?;
        let mut items: Vec<usize> = self.emitted[j].1.iter().map(|&r| self.order[r as usize]).collect();
        items.sort_unstable();
        Some(items)
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Best-first merge of several ranked lists: yields rank tuples `(j_1, .., j_B)`
/// in ascending `base + sum_b w_b(j_b)`.
#[derive(Debug, Clone)]
pub struct RankedProduct {
    lists: Vec<RankedSubsets>,
    base: f64,
    frontier: BinaryHeap<Reverse<Candidate>>,
    seen: HashSet<Vec<u32>>,
}

impl RankedProduct {
    pub fn new(lists: Vec<RankedSubsets>, base: f64) -> Self {
        let mut this = Self {
            lists,
            base,
            frontier: BinaryHeap::new(),
            seen: HashSet::new(),
        };
        let first = vec![0u32; this.lists.len()];
        this.push(first);
        this
    }

    fn push(&mut self, ranks: Vec<u32>) {
        if self.seen.contains(&ranks) {
            return;
        }
        let mut key = self.base;
        for (list, &j) in self.lists.iter_mut().zip(&ranks) {
            match list.weight(j as usize) {
                Some(w) => key += w,
                None => return,
            }
        }
        self.seen.insert(ranks.clone());
        self.frontier.push(Reverse(Candidate { key, index: ranks }));
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn lists_mut(&mut self) -> &mut [RankedSubsets] {
        &mut self.lists
    }
}

impl Iterator for RankedProduct {
    type Item = (f64, Vec<u32>);

    fn next(&mut self) -> Option<Self::Item> {
        let Reverse(best) = self.frontier.pop()?;
        for b in 0..best.index.len() {
            let mut next = best.index.clone();
            next[b] += 1;
            self.push(next);
        }
        Some((best.key, best.index))
    }
}
