//! Exhaustive enumeration of increasing trees and of merge-chain event
//! sequences.

use crate::error::{Error, Result};
use crate::kingman::{CoalescentEvents, Step};
use crate::tree::{RootedTree, Vertex};

/// Largest `n` for which increasing trees are enumerated (`8! = 40 320`).
pub const MAX_TREE_N: usize = 9;
/// Largest `n` for which event sequences are enumerated (`6! 5! = 86 400`).
pub const MAX_EVENTS_N: usize = 6;

pub(crate) fn check_guard(n: usize, max: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > max {
        return Err(Error::Resource(format!(
            "exact enumeration of {what} is limited to n <= {max}, got {n}"
        )));
    }
    Ok(())
}

/// Increasing trees on `[n]` in odometer order over the parent vector, with
/// the parent of vertex `n` varying fastest. Successive blocks therefore
/// attach vertex `n` to every vertex of one tree on `[n - 1]`.
pub struct IncreasingTrees {
    parent: Vec<Vertex>,
    done: bool,
}

impl Iterator for IncreasingTrees {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        if self.done {
            return None;
        }
        let tree = RootedTree::from_parts_unchecked(self.parent.clone(), 1);
        // advance: vertex k (index k - 1) takes parents 1..k-1
        self.done = true;
        for idx in (1..self.parent.len()).rev() {
            if (self.parent[idx] as usize) < idx {
                self.parent[idx] += 1;
                self.done = false;
                break;
            }
            self.parent[idx] = 1;
        }
        Some(tree)
    }
}

pub fn enumerate_increasing_trees(n: usize) -> Result<IncreasingTrees> {
    check_guard(n, MAX_TREE_N, "increasing trees")?;
    let mut parent = vec![1; n];
    parent[0] = 0;
    Ok(IncreasingTrees {
        parent,
        done: false,
    })
}

/// All event sequences on `n` vertices. Step `i` ranges over the unordered
/// pairs of `1..=n+1-i` in lexicographic order, each with coin 0 then 1;
/// the last step varies fastest.
pub struct AllEvents {
    n: usize,
    /// Per step, an index into `pairs(m) x {0, 1}`.
    digits: Vec<u32>,
    done: bool,
}

fn choices(n: usize, step: usize) -> u32 {
    let m = (n - step) as u32;
    m * (m - 1)
}

fn decode(n: usize, step: usize, digit: u32) -> Step {
    let m = (n - step) as u32;
    let (mut pair, coin) = (digit / 2, (digit % 2) as u8);
    let mut a = 1;
    while pair >= m - a {
        pair -= m - a;
        a += 1;
    }
    Step {
        a,
        b: a + 1 + pair,
        coin,
    }
}

impl Iterator for AllEvents {
    type Item = CoalescentEvents;

    fn next(&mut self) -> Option<CoalescentEvents> {
        if self.done {
            return None;
        }
        let n = self.n;
        let events = CoalescentEvents::from_steps_unchecked(
            n,
            self.digits
                .iter()
                .enumerate()
                .map(|(s, &d)| decode(n, s, d)),
        );
        self.done = true;
        for s in (0..self.digits.len()).rev() {
            if self.digits[s] + 1 < choices(n, s) {
                self.digits[s] += 1;
                self.done = false;
                break;
            }
            self.digits[s] = 0;
        }
        Some(events)
    }
}

pub fn enumerate_events(n: usize) -> Result<AllEvents> {
    check_guard(n, MAX_EVENTS_N, "event sequences")?;
    Ok(AllEvents {
        n,
        digits: vec![0; n - 1],
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn tree_counts() {
        for n in 1..=8 {
            let trees: BTreeSet<RootedTree> = enumerate_increasing_trees(n).unwrap().collect();
            assert_eq!(trees.len(), factorial(n - 1), "n = {n}");
            assert!(trees.iter().all(|t| t.is_increasing() && t.n() == n));
        }
        assert!(matches!(
            enumerate_increasing_trees(10),
            Err(Error::Resource(_))
        ));
        assert!(matches!(
            enumerate_increasing_trees(0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn three_vertex_trees() {
        let trees: Vec<RootedTree> = enumerate_increasing_trees(3).unwrap().collect();
        let star = RootedTree::from_parents(vec![0, 1, 1]).unwrap();
        let path = RootedTree::from_parents(vec![0, 1, 2]).unwrap();
        assert_eq!(trees, vec![star, path]);
    }

    #[test]
    fn event_counts() {
        for n in 1..=5 {
            let all: Vec<CoalescentEvents> = enumerate_events(n).unwrap().collect();
            let distinct: BTreeSet<_> = all
                .iter()
                .map(|e| (e.pairs().to_vec(), e.coins().to_vec()))
                .collect();
            assert_eq!(all.len(), factorial(n) * factorial(n - 1), "n = {n}");
            assert_eq!(distinct.len(), all.len());
            for e in &all {
                // round trip through the validating constructor
                CoalescentEvents::new(n, e.pairs().to_vec(), e.coins().to_vec()).unwrap();
            }
        }
        assert_eq!(enumerate_events(2).unwrap().count(), 2);
        assert!(matches!(enumerate_events(7), Err(Error::Resource(_))));
    }

    #[test]
    fn pair_decoding_is_lexicographic() {
        let pairs: Vec<(u32, u32)> = (0..6)
            .map(|p| decode(4, 0, 2 * p))
            .map(|s| (s.a, s.b))
            .collect();
        assert_eq!(pairs, vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
    }
}
