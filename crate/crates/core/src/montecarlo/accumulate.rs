//! Per-replicate degree summaries and their exact, mergeable aggregate.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::stats::{floor_log2, MomentSpec};

/// Degree counts of one replicate, read relative to `⌊log₂ n⌋`.
pub struct ReplicateCounts {
    n: u64,
    floor_log: i64,
    /// `ge[d]` = number of vertices of degree at least `d`.
    ge: Vec<u64>,
}

impl ReplicateCounts {
    /// `degrees` are the child counts of one tree.
    pub fn from_degrees(degrees: &[u32], scratch: Vec<u64>) -> Self {
        let mut ge = scratch;
        ge.clear();
        let delta = degrees.iter().copied().max().unwrap_or(0) as usize;
        ge.resize(delta + 2, 0);
        for &d in degrees {
            ge[d as usize] += 1;
        }
        for d in (0..=delta).rev() {
            ge[d] += ge[d + 1];
        }
        let n = degrees.len() as u64;
        ReplicateCounts {
            n,
            floor_log: i64::from(floor_log2(n.max(1))),
            ge,
        }
    }

    pub fn into_scratch(self) -> Vec<u64> {
        self.ge
    }

    /// `X_{≥i}`: vertices of degree at least `⌊log₂ n⌋ + i`.
    pub fn x_ge(&self, i: i64) -> u64 {
        let d = self.floor_log + i;
        if d <= 0 {
            self.n
        } else {
            self.ge.get(d as usize).copied().unwrap_or(0)
        }
    }

    /// `X_i`: vertices of degree exactly `⌊log₂ n⌋ + i`.
    pub fn x(&self, i: i64) -> u64 {
        if self.floor_log + i < 0 {
            0
        } else {
            self.x_ge(i) - self.x_ge(i + 1)
        }
    }

    pub fn delta(&self) -> u32 {
        // ge has a trailing zero past the maximum
        (self.ge.len() - 2) as u32
    }
}

/// Exact integer sums over replicates. Merging is associative and
/// commutative, so any batching of replicates gives the same totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accumulator {
    imin: i64,
    imax: i64,
    replicates: u64,
    /// Value histograms of `X_i`, `i = imin..=imax`.
    point: Vec<BTreeMap<u64, u64>>,
    /// Value histograms of `X_{≥i}`, `i = imin..=imax`.
    tail: Vec<BTreeMap<u64, u64>>,
    /// `Σ X_i X_{i+1}`, `i = imin..imax`.
    cross: Vec<u128>,
    /// Counts of `(X_i > 0, X_{≥i+1} > 0)`, `i = imin..imax`.
    joint: Vec<[[u64; 2]; 2]>,
    delta: BTreeMap<u32, u64>,
    /// `(Σ v, Σ v²)` of each moment statistic.
    moments: Vec<(u128, u128)>,
}

impl Accumulator {
    pub fn new(imin: i64, imax: i64, moments: usize) -> Self {
        let width = (imax - imin + 1) as usize;
        Accumulator {
            imin,
            imax,
            replicates: 0,
            point: vec![BTreeMap::new(); width],
            tail: vec![BTreeMap::new(); width],
            cross: vec![0; width - 1],
            joint: vec![[[0; 2]; 2]; width - 1],
            delta: BTreeMap::new(),
            moments: vec![(0, 0); moments],
        }
    }

    pub fn observe(&mut self, c: &ReplicateCounts, specs: &[MomentSpec]) -> Result<()> {
        self.replicates += 1;
        for (k, i) in (self.imin..=self.imax).enumerate() {
            *self.point[k].entry(c.x(i)).or_insert(0) += 1;
            *self.tail[k].entry(c.x_ge(i)).or_insert(0) += 1;
            if i < self.imax {
                self.cross[k] += u128::from(c.x(i)) * u128::from(c.x(i + 1));
                self.joint[k][usize::from(c.x(i) > 0)][usize::from(c.x_ge(i + 1) > 0)] += 1;
            }
        }
        *self.delta.entry(c.delta()).or_insert(0) += 1;
        for (acc, spec) in self.moments.iter_mut().zip(specs) {
            let v = spec.evaluate_with(|i| c.x(i), |i| c.x_ge(i))?;
            acc.0 += v;
            acc.1 += v * v;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: Accumulator) {
        debug_assert_eq!((self.imin, self.imax), (other.imin, other.imax));
        self.replicates += other.replicates;
        for (a, b) in self.point.iter_mut().zip(other.point) {
            merge_hist(a, b);
        }
        for (a, b) in self.tail.iter_mut().zip(other.tail) {
            merge_hist(a, b);
        }
        for (a, b) in self.cross.iter_mut().zip(other.cross) {
            *a += b;
        }
        for (a, b) in self.joint.iter_mut().zip(other.joint) {
            for r in 0..2 {
                for s in 0..2 {
                    a[r][s] += b[r][s];
                }
            }
        }
        merge_hist(&mut self.delta, other.delta);
        for (a, b) in self.moments.iter_mut().zip(other.moments) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }

    pub fn replicates(&self) -> u64 {
        self.replicates
    }

    pub fn index_range(&self) -> std::ops::RangeInclusive<i64> {
        self.imin..=self.imax
    }

    fn slot(&self, i: i64) -> Option<usize> {
        self.index_range()
            .contains(&i)
            .then(|| (i - self.imin) as usize)
    }

    pub fn point_histogram(&self, i: i64) -> Option<&BTreeMap<u64, u64>> {
        self.slot(i).map(|k| &self.point[k])
    }

    pub fn tail_histogram(&self, i: i64) -> Option<&BTreeMap<u64, u64>> {
        self.slot(i).map(|k| &self.tail[k])
    }

    /// `Σ_r X_i X_{i+1}`; `None` unless both indices are tracked.
    pub fn cross_sum(&self, i: i64) -> Option<u128> {
        self.slot(i)
            .filter(|&k| k < self.cross.len())
            .map(|k| self.cross[k])
    }

    /// 2x2 table of `(X_i > 0, X_{≥i+1} > 0)` as rows `[X_i = 0, X_i > 0]`.
    pub fn joint_table(&self, i: i64) -> Option<[[u64; 2]; 2]> {
        self.slot(i)
            .filter(|&k| k < self.joint.len())
            .map(|k| self.joint[k])
    }

    pub fn delta_histogram(&self) -> &BTreeMap<u32, u64> {
        &self.delta
    }

    pub fn moment_sums(&self) -> &[(u128, u128)] {
        &self.moments
    }
}

fn merge_hist<K: Ord>(a: &mut BTreeMap<K, u64>, b: BTreeMap<K, u64>) {
    for (k, c) in b {
        *a.entry(k).or_insert(0) += c;
    }
}

/// `(Σ v, Σ v²)` of a value histogram.
pub fn histogram_sums(h: &BTreeMap<u64, u64>) -> (u128, u128) {
    h.iter().fold((0, 0), |(s, q), (&v, &c)| {
        let (v, c) = (u128::from(v), u128::from(c));
        (s + v * c, q + v * v * c)
    })
}
