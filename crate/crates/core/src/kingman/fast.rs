//! Streaming merge chain that keeps only the live roots.
//!
//! Trees are picked by position in an unordered array of live roots rather
//! than by smallest label. Both schemes choose a uniform unordered pair of
//! trees and orient it by a fair coin, so the forest process (and every
//! degree statistic) has the same law as the indexed chain.

use rand::RngCore;

use super::dsu::SelectionCounter;
use crate::error::{Error, Result};
use crate::rng::{coin, distinct_pair};
use crate::tree::{DegreeVector, Vertex};

/// Reusable buffers for repeated sampling.
#[derive(Default)]
pub struct FastCoalescent {
    live: Vec<Vertex>,
    degrees: Vec<u32>,
    counter: Option<SelectionCounter>,
}

/// Degrees together with selection counts `|S_v|`, both indexed by `v - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionSample {
    pub degrees: DegreeVector,
    pub selections: Vec<u32>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > Vertex::MAX as usize {
        return Err(Error::Domain(format!("n = {n} exceeds the label range")));
    }
    Ok(())
}

impl FastCoalescent {
    pub fn new() -> Self {
        Self::default()
    }

    /// Child counts of one chain, indexed by `v - 1`. `O(n)` time.
    pub fn sample_degrees<R: RngCore + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<&[u32]> {
        check_n(n)?;
        self.live.clear();
        self.live.extend(1..=n as Vertex);
        self.degrees.clear();
        self.degrees.resize(n, 0);
        while self.live.len() > 1 {
            let (x, y) = distinct_pair(rng, self.live.len() as u32);
            let (win, lose) = if coin(rng) == 1 { (x, y) } else { (y, x) };
            self.degrees[self.live[win as usize] as usize - 1] += 1;
            self.live.swap_remove(lose as usize);
        }
        Ok(&self.degrees)
    }

    /// Like [`sample_degrees`](Self::sample_degrees) but also counts, for
    /// every vertex, the steps at which its tree was selected. Tree membership
    /// lives in a union-find structure; `O(n α(n))` time.
    pub fn sample_selections<R: RngCore + ?Sized>(
        &mut self,
        n: usize,
        rng: &mut R,
    ) -> Result<SelectionSample> {
        check_n(n)?;
        let counter = self.counter.get_or_insert_with(|| SelectionCounter::new(0));
        counter.reset(n);
        self.live.clear();
        self.live.extend(1..=n as Vertex);
        self.degrees.clear();
        self.degrees.resize(n, 0);
        while self.live.len() > 1 {
            let (x, y) = distinct_pair(rng, self.live.len() as u32);
            let (win, lose) = if coin(rng) == 1 { (x, y) } else { (y, x) };
            let (rw, rl) = (self.live[win as usize], self.live[lose as usize]);
            counter.bump(rw - 1);
            counter.bump(rl - 1);
            counter.union(rw - 1, rl - 1);
            self.degrees[rw as usize - 1] += 1;
            self.live.swap_remove(lose as usize);
        }
        let selections = (0..n as u32).map(|v| counter.count(v)).collect();
        Ok(SelectionSample {
            degrees: DegreeVector::from_vec_unchecked(self.degrees.clone()),
            selections,
        })
    }
}

pub fn fast_degree_sample<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<DegreeVector> {
    let mut fc = FastCoalescent::new();
    let deg = fc.sample_degrees(n, rng)?.to_vec();
    Ok(DegreeVector::from_vec_unchecked(deg))
}

pub fn fast_selection_sample<R: RngCore + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<SelectionSample> {
    FastCoalescent::new().sample_selections(n, rng)
}
