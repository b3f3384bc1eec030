use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// `⌊log₂ n⌋` from the bit length; `n` must be positive.
pub fn floor_log2(n: u64) -> u32 {
    debug_assert!(n > 0);
    63 - n.leading_zeros()
}

/// Fractional part of `log₂ n`, exactly 0 for powers of two.
pub fn epsilon(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("epsilon is undefined for n = 0".into()));
    }
    if n.is_power_of_two() {
        return Ok(0.0);
    }
    let eps = (n as f64).log2() - f64::from(floor_log2(n));
    // guard against rounding at the top of the range
    Ok(eps.clamp(0.0, f64::from_bits(1.0f64.to_bits() - 1)))
}

/// Degree counts of one tree, indexed relative to `⌊log₂ n⌋`: `x[i]` is the
/// number of vertices of degree `⌊log₂ n⌋ + i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeProfile {
    n: u64,
    eps: f64,
    floor_log: u32,
    delta: u32,
    x: BTreeMap<i64, u64>,
}

impl DegreeProfile {
    /// From `hist[d]` = number of vertices of degree `d`.
    pub fn from_histogram(hist: &[u64]) -> Result<Self> {
        let n: u64 = hist.iter().sum();
        if n == 0 {
            return Err(Error::Validation("empty degree histogram".into()));
        }
        let mass: u64 = hist.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
        if mass != n - 1 {
            return Err(Error::Validation(format!(
                "degrees sum to {mass}, expected {}",
                n - 1
            )));
        }
        let floor_log = floor_log2(n);
        let x: BTreeMap<i64, u64> = hist
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(d, &c)| (d as i64 - i64::from(floor_log), c))
            .collect();
        let delta = hist.iter().rposition(|&c| c > 0).unwrap_or(0) as u32;
        Ok(DegreeProfile {
            n,
            eps: epsilon(n)?,
            floor_log,
            delta,
            x,
        })
    }

    pub fn from_degrees(degrees: &[u32]) -> Result<Self> {
        let max = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut hist = vec![0u64; max + 1];
        for &d in degrees {
            hist[d as usize] += 1;
        }
        Self::from_histogram(&hist)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn floor_log(&self) -> u32 {
        self.floor_log
    }

    /// Maximum degree.
    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn x(&self, i: i64) -> u64 {
        self.x.get(&i).copied().unwrap_or(0)
    }

    pub fn x_ge(&self, i: i64) -> u64 {
        self.x.range(i..).map(|(_, &c)| c).sum()
    }

    /// Non-zero counts keyed by relative index.
    pub fn counts(&self) -> &BTreeMap<i64, u64> {
        &self.x
    }
}

/// Profile of a degree vector on `n` vertices.
pub fn profile(degrees: &[u32], n: usize) -> Result<DegreeProfile> {
    if degrees.len() != n {
        return Err(Error::Validation(format!(
            "{} degrees given for n = {n}",
            degrees.len()
        )));
    }
    DegreeProfile::from_degrees(degrees)
}
