use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::profile::DegreeProfile;
use crate::error::{Error, Result};

/// `(r)_a = r (r - 1) ... (r - a + 1)`, with `(r)_0 = 1`. `None` on overflow.
pub fn falling_factorial(r: u64, a: u32) -> Option<u128> {
    if u64::from(a) > r {
        return Some(0);
    }
    (0..u64::from(a)).try_fold(1u128, |acc, j| acc.checked_mul(u128::from(r - j)))
}

/// A joint factorial moment `E[(X_{≥i'})_{a'} Π_k (X_k)_{a_k}]`.
///
/// Point indices must lie strictly below the tail index. Text form is a
/// comma-separated list of `i:a` items, with `>=i:a` for the tail factor,
/// e.g. `0:1,1:1` or `>=1:2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MomentSpec {
    points: BTreeMap<i64, u32>,
    tail: Option<(i64, u32)>,
}

impl MomentSpec {
    pub fn new(
        points: impl IntoIterator<Item = (i64, u32)>,
        tail: Option<(i64, u32)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, a) in points {
            if map.insert(i, a).is_some() {
                return Err(Error::Validation(format!("index {i} listed twice")));
            }
        }
        if let (Some((top, _)), Some((&last, _))) = (tail, map.iter().next_back()) {
            if last >= top {
                return Err(Error::Validation(format!(
                    "point index {last} must lie below the tail index {top}"
                )));
            }
        }
        Ok(MomentSpec { points: map, tail })
    }

    pub fn point(i: i64, a: u32) -> Self {
        MomentSpec {
            points: BTreeMap::from([(i, a)]),
            tail: None,
        }
    }

    pub fn tail_only(i: i64, a: u32) -> Self {
        MomentSpec {
            points: BTreeMap::new(),
            tail: Some((i, a)),
        }
    }

    pub fn points(&self) -> &BTreeMap<i64, u32> {
        &self.points
    }

    pub fn tail(&self) -> Option<(i64, u32)> {
        self.tail
    }

    /// Total order `K = Σ a`.
    pub fn order(&self) -> u32 {
        self.points.values().sum::<u32>() + self.tail.map_or(0, |(_, a)| a)
    }

    /// Smallest and largest index mentioned, if any.
    pub fn index_range(&self) -> Option<(i64, i64)> {
        let lo = self
            .points
            .keys()
            .next()
            .copied()
            .or(self.tail.map(|t| t.0))?;
        let hi = self
            .tail
            .map(|t| t.0)
            .or(self.points.keys().next_back().copied())?;
        Some((lo, hi))
    }

    /// Limiting value `(2^(-i'+ε))^{a'} Π_k (2^(-(k+1)+ε))^{a_k}`.
    pub fn prediction(&self, eps: f64) -> f64 {
        let mut exponent: f64 = self
            .points
            .iter()
            .map(|(&k, &a)| f64::from(a) * (eps - k as f64 - 1.0))
            .sum();
        if let Some((top, a)) = self.tail {
            exponent += f64::from(a) * (eps - top as f64);
        }
        exponent.exp2()
    }

    /// The product of falling factorials for one realisation, given accessors
    /// for `X_k` and `X_{≥k}`.
    pub fn evaluate_with(&self, x: impl Fn(i64) -> u64, x_ge: impl Fn(i64) -> u64) -> Result<u128> {
        let overflow = || Error::Domain(format!("factorial moment {self} overflows u128"));
        let mut acc = 1u128;
        for (&k, &a) in &self.points {
            acc = acc
                .checked_mul(falling_factorial(x(k), a).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        if let Some((top, a)) = self.tail {
            acc = acc
                .checked_mul(falling_factorial(x_ge(top), a).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, profile: &DegreeProfile) -> Result<u128> {
        self.evaluate_with(|k| profile.x(k), |k| profile.x_ge(k))
    }
}

impl fmt::Display for MomentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self
            .points
            .iter()
            .map(|(i, a)| format!("{i}:{a}"))
            .collect();
        if let Some((i, a)) = self.tail {
            items.push(format!(">={i}:{a}"));
        }
        f.write_str(&items.join(","))
    }
}

impl FromStr for MomentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |item: &str| {
            Error::Validation(format!("bad moment item '{item}', expected i:a or >=i:a"))
        };
        let mut points = Vec::new();
        let mut tail = None;
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (idx, a) = item.split_once(':').ok_or_else(|| bad(item))?;
            let a: u32 = a.trim().parse().map_err(|_| bad(item))?;
            match idx.trim().strip_prefix(">=") {
                Some(top) => {
                    if tail.is_some() {
                        return Err(Error::Validation("more than one tail factor".into()));
                    }
                    tail = Some((top.trim().parse().map_err(|_| bad(item))?, a));
                }
                None => points.push((idx.trim().parse().map_err(|_| bad(item))?, a)),
            }
        }
        MomentSpec::new(points, tail)
    }
}

impl TryFrom<String> for MomentSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MomentSpec> for String {
    fn from(m: MomentSpec) -> String {
        m.to_string()
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub replicates: u64,
}

impl Estimate {
    /// From exact sums of the values and their squares. The standard error
    /// uses the unbiased sample variance (0 for a single replicate).
    pub fn from_sums(count: u64, sum: u128, sum_sq: u128) -> Self {
        let nf = count as f64;
        let mean = sum as f64 / nf;
        let var = if count > 1 {
            // N Σx² - (Σx)² is exact in integers when it fits
            match u128::from(count)
                .checked_mul(sum_sq)
                .zip(sum.checked_mul(sum))
            {
                Some((a, b)) => a.saturating_sub(b) as f64 / (nf * (nf - 1.0)),
                None => ((sum_sq as f64 - sum as f64 * mean) / (nf - 1.0)).max(0.0),
            }
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / nf).sqrt(),
            replicates: count,
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = u128>) -> Result<Self> {
        let mut count = 0u64;
        let mut sum = 0u128;
        let mut sum_sq = 0u128;
        let overflow = || Error::Domain("sample moments overflow u128".into());
        for v in values {
            count += 1;
            sum = sum.checked_add(v).ok_or_else(overflow)?;
            sum_sq = v
                .checked_mul(v)
                .and_then(|s| sum_sq.checked_add(s))
                .ok_or_else(overflow)?;
        }
        if count == 0 {
            return Err(Error::Domain("empty sample".into()));
        }
        Ok(Self::from_sums(count, sum, sum_sq))
    }
}

/// Monte Carlo estimate of a factorial moment across replicate profiles.
pub fn factorial_moment_estimate(
    profiles: &[DegreeProfile],
    spec: &MomentSpec,
) -> Result<Estimate> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::Domain("no profiles to average".into()))?;
    if let Some(p) = profiles.iter().find(|p| p.n() != first.n()) {
        return Err(Error::Validation(format!(
            "profiles mix n = {} and n = {}",
            first.n(),
            p.n()
        )));
    }
    let values = profiles
        .iter()
        .map(|p| spec.evaluate(p))
        .collect::<Result<Vec<_>>>()?;
    Estimate::from_values(values)
}
