use serde::Serialize;

use super::profile::DegreeProfile;
use crate::error::{Error, Result};

/// Mean of the limiting Poisson count at relative index `i`: `2^(-i-1+eps)`.
pub fn limit_mean(i: i64, eps: f64) -> f64 {
    (eps - i as f64 - 1.0).exp2()
}

/// Limiting `P(Δ ≥ ⌊log₂ n⌋ + i)`: `1 - exp(-2^(-i+eps))`.
pub fn tail_reference(i: i64, eps: f64) -> f64 {
    -(-(eps - i as f64).exp2()).exp_m1()
}

/// `(X_i - μ) / √μ` with `μ = limit_mean(i, ε_n)`.
pub fn clt_zscore(profile: &DegreeProfile, i: i64) -> Result<f64> {
    if i + i64::from(profile.floor_log()) < 0 {
        return Err(Error::Domain(format!(
            "index {i} is below -⌊log₂ n⌋ = -{}",
            profile.floor_log()
        )));
    }
    let mu = limit_mean(i, profile.eps());
    Ok((profile.x(i) as f64 - mu) / mu.sqrt())
}

/// The limiting point process at lattice offset `eps`, seen through its
/// cell counts (independent Poisson) and tail masses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitLaw {
    pub eps: f64,
}

impl LimitLaw {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("eps = {eps} outside [0, 1]")));
        }
        Ok(LimitLaw { eps })
    }

    /// Poisson mean of the cell count at `i`.
    pub fn mean(&self, i: i64) -> f64 {
        limit_mean(i, self.eps)
    }

    /// Poisson mean of the count on `[i, ∞)`: `2^(-i+eps)`.
    pub fn tail_mass(&self, i: i64) -> f64 {
        (self.eps - i as f64).exp2()
    }

    /// Probability that `[i, ∞)` holds at least one point.
    pub fn tail_probability(&self, i: i64) -> f64 {
        tail_reference(i, self.eps)
    }

    pub fn zscore(&self, i: i64, count: u64) -> f64 {
        let mu = self.mean(i);
        (count as f64 - mu) / mu.sqrt()
    }
}
