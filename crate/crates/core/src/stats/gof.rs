//! Goodness-of-fit machinery: Pearson chi-square with cell pooling, total
//! variation distance, and the Kolmogorov–Smirnov distance to N(0, 1).

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Reference mass left in the pooled tail cell of a Poisson table.
const POISSON_TAIL_MASS: f64 = 1e-12;
/// Minimum expected count per chi-square cell.
const MIN_EXPECTED: f64 = 5.0;

/// Discrete law to test integer samples against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Reference {
    Poisson(f64),
    /// Explicit `(value, probability)` pairs.
    Finite(Vec<(i64, f64)>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn from_statistic(statistic: f64, dof: usize) -> Self {
        ChiSquare {
            statistic,
            dof,
            p_value: chi_square_sf(statistic, dof),
        }
    }

    fn trivial() -> Self {
        ChiSquare {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GofReport {
    pub chi_square: ChiSquare,
    pub tv: f64,
    pub samples: u64,
}

/// Upper tail of the chi-square distribution; 1 when `dof == 0`.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 || statistic <= 0.0 {
        return 1.0;
    }
    if !statistic.is_finite() {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN)
}

pub fn poisson_pmf(mu: f64, k: u64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mu.ln() - mu - ln_gamma(k as f64 + 1.0)).exp()
}

/// Reference cells in increasing value order plus the mass beyond the last.
fn reference_cells(reference: &Reference) -> Result<(Vec<(i64, f64)>, f64)> {
    match reference {
        Reference::Poisson(mu) => {
            if !(mu.is_finite() && *mu >= 0.0) {
                return Err(Error::Domain(format!(
                    "Poisson mean {mu} is not a finite non-negative number"
                )));
            }
            let mut cells = Vec::new();
            let mut total = 0.0;
            let mut k = 0u64;
            loop {
                let p = poisson_pmf(*mu, k);
                cells.push((k as i64, p));
                total += p;
                if k as f64 >= *mu && 1.0 - total < POISSON_TAIL_MASS {
                    break;
                }
                k += 1;
            }
            Ok((cells, (1.0 - total).max(0.0)))
        }
        Reference::Finite(law) => {
            let mut cells = law.clone();
            cells.sort_by_key(|c| c.0);
            if cells.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Validation("finite reference repeats a value".into()));
            }
            let total: f64 = cells.iter().map(|c| c.1).sum();
            if cells.iter().any(|c| c.1 < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "finite reference has total mass {total}"
                )));
            }
            Ok((cells, 0.0))
        }
    }
}

/// Total variation between the empirical histogram and the reference.
pub fn total_variation(counts: &BTreeMap<i64, u64>, reference: &Reference) -> Result<f64> {
    Ok(gof_counts(counts, reference)?.tv)
}

pub fn gof(samples: &[i64], reference: &Reference) -> Result<GofReport> {
    let mut counts = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0u64) += 1;
    }
    gof_counts(&counts, reference)
}

/// Chi-square and total variation for a histogram of integer samples.
pub fn gof_counts(counts: &BTreeMap<i64, u64>, reference: &Reference) -> Result<GofReport> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::Domain("no samples".into()));
    }
    let nf = total as f64;
    let (cells, beyond) = reference_cells(reference)?;
    let last = cells.last().map(|c| c.0);

    // Observations outside the reference support, and those in the Poisson
    // tail cell.
    let mut impossible = 0u64;
    let mut tail_obs = 0u64;
    for (&v, &c) in counts {
        let in_cells = cells.binary_search_by_key(&v, |c| c.0).is_ok();
        if in_cells {
            continue;
        }
        match last {
            Some(l) if v > l && beyond > 0.0 => tail_obs += c,
            _ => impossible += c,
        }
    }

    // TV: reference mass beyond the observed support forms one pooled cell,
    // where the empirical law has no mass.
    let mut tv = impossible as f64 / nf;
    let mut covered = 0.0;
    for &(v, p) in &cells {
        let emp = counts.get(&v).copied().unwrap_or(0) as f64 / nf;
        if emp > 0.0 || counts.keys().next_back().is_some_and(|&m| v <= m) {
            tv += (emp - p).abs();
            covered += p;
        }
    }
    let tail_emp = tail_obs as f64 / nf;
    let rest = (1.0 - covered - if tail_obs > 0 { beyond } else { 0.0 }).max(0.0);
    if tail_obs > 0 {
        tv += (tail_emp - beyond).abs();
    }
    tv += rest;
    let tv = 0.5 * tv;

    let chi_square = if impossible > 0 {
        ChiSquare::from_statistic(f64::INFINITY, cells.len())
    } else {
        let mut raw: Vec<(f64, f64)> = cells
            .iter()
            .map(|&(v, p)| (counts.get(&v).copied().unwrap_or(0) as f64, p * nf))
            .collect();
        if beyond > 0.0 {
            raw.push((tail_obs as f64, beyond * nf));
        }
        pearson(&pool(raw))
    };
    Ok(GofReport {
        chi_square,
        tv,
        samples: total,
    })
}

/// Merges adjacent `(observed, expected)` cells until each expected count is
/// at least [`MIN_EXPECTED`]; a short remainder joins the last pooled cell.
fn pool(raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (o, e) in raw {
        cur.0 += o;
        cur.1 += e;
        if cur.1 >= MIN_EXPECTED {
            out.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match out.last_mut() {
            Some(l) => {
                l.0 += cur.0;
                l.1 += cur.1;
            }
            None => out.push(cur),
        }
    }
    out
}

fn pearson(cells: &[(f64, f64)]) -> ChiSquare {
    if cells.len() < 2 {
        return ChiSquare::trivial();
    }
    let stat = cells
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e).powi(2) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    ChiSquare::from_statistic(stat, cells.len() - 1)
}

/// Test that several histograms come from one law. Categories are merged
/// in key order until every expected count is at least 5.
pub fn chi_square_homogeneity<K: Ord + Clone>(samples: &[&BTreeMap<K, u64>]) -> Result<ChiSquare> {
    let rows: Vec<u64> = samples.iter().map(|s| s.values().sum()).collect();
    if samples.len() < 2 || rows.contains(&0) {
        return Err(Error::Domain(
            "homogeneity needs at least two non-empty samples".into(),
        ));
    }
    let n: u64 = rows.iter().sum();
    let min_row = *rows.iter().min().unwrap() as f64;
    let mut keys: Vec<K> = samples.iter().flat_map(|s| s.keys().cloned()).collect();
    keys.sort();
    keys.dedup();

    let mut columns: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; samples.len()];
    for k in &keys {
        for (c, s) in cur.iter_mut().zip(samples) {
            *c += s.get(k).copied().unwrap_or(0);
        }
        let col: u64 = cur.iter().sum();
        if min_row * col as f64 / n as f64 >= MIN_EXPECTED {
            columns.push(std::mem::replace(&mut cur, vec![0; samples.len()]));
        }
    }
    if cur.iter().any(|&c| c > 0) {
        match columns.last_mut() {
            Some(l) => l.iter_mut().zip(&cur).for_each(|(a, b)| *a += b),
            None => columns.push(cur),
        }
    }
    let table: Vec<Vec<u64>> = (0..samples.len())
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    chi_square_independence(&table)
}

/// Pearson test of independence for an `r × c` contingency table. Empty
/// rows and columns are dropped; a table with one remaining row or column
/// gives statistic 0 with 0 degrees of freedom.
pub fn chi_square_independence(table: &[Vec<u64>]) -> Result<ChiSquare> {
    let width = table.first().map_or(0, Vec::len);
    if table.iter().any(|r| r.len() != width) {
        return Err(Error::Validation("ragged contingency table".into()));
    }
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..width)
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let n: u64 = rows.iter().sum();
    if n == 0 {
        return Err(Error::Domain("empty contingency table".into()));
    }
    let live_rows: Vec<usize> = (0..table.len()).filter(|&i| rows[i] > 0).collect();
    let live_cols: Vec<usize> = (0..width).filter(|&j| cols[j] > 0).collect();
    if live_rows.len() < 2 || live_cols.len() < 2 {
        return Ok(ChiSquare::trivial());
    }
    let nf = n as f64;
    let mut stat = 0.0;
    for &i in &live_rows {
        for &j in &live_cols {
            let e = rows[i] as f64 * cols[j] as f64 / nf;
            stat += (table[i][j] as f64 - e).powi(2) / e;
        }
    }
    Ok(ChiSquare::from_statistic(
        stat,
        (live_rows.len() - 1) * (live_cols.len() - 1),
    ))
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn ks_standard_normal(samples: &[f64]) -> Result<f64> {
    let mut points: Vec<(f64, u64)> = samples.iter().map(|&x| (x, 1)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    ks_standard_normal_weighted(&points)
}

/// KS distance for samples given as `(value, multiplicity)` pairs sorted by
/// value.
pub fn ks_standard_normal_weighted(points: &[(f64, u64)]) -> Result<f64> {
    let n: u64 = points.iter().map(|p| p.1).sum();
    if n == 0 {
        return Err(Error::Domain("no samples".into()));
    }
    if points.iter().any(|p| p.0.is_nan()) {
        return Err(Error::Validation("NaN sample".into()));
    }
    debug_assert!(points.windows(2).all(|w| w[0].0 <= w[1].0));
    let nf = n as f64;
    let mut below = 0u64;
    let mut d: f64 = 0.0;
    for &(x, c) in points {
        let f = std_normal_cdf(x);
        d = d.max(f - below as f64 / nf);
        below += c;
        d = d.max(below as f64 / nf - f);
    }
    Ok(d)
}
