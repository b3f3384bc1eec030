//! Exact verification of inequalities between degree probabilities.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use super::enumerate::{enumerate_events, enumerate_increasing_trees, MAX_TREE_N};
use super::law::{exact_profile_law, ratio, ser_rational, Source};
use crate::error::{Error, Result};
use crate::kingman::{selection_records, tau_k};
use crate::stats::{falling_factorial, floor_log2};

/// Cap on `C(n, s) * n^s` threshold vectors scanned by [`orthant_check`].
const MAX_ORTHANT_ROWS: u64 = 5_000_000;

const ORTHANT_NOTE: &str = "an exact check at small n; a violation indicates an \
implementation bug, since the inequality is a known property of uniform attachment";

#[derive(Clone, Debug, Serialize)]
pub struct OrthantRow {
    pub vertices: Vec<u32>,
    pub thresholds: Vec<u32>,
    /// `P(deg(v) >= m_v for all v)`.
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    /// `Π_v P(deg(v) >= m_v)`.
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthantReport {
    pub n: usize,
    pub subset_size: usize,
    pub checked: usize,
    pub violations: usize,
    pub note: &'static str,
    pub rows: Vec<OrthantRow>,
}

impl OrthantReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn subsets(n: u32, s: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, s: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, s, &mut Vec::with_capacity(s), &mut out);
    out
}

/// Steps an odometer over `{0..base-1}^len`, last digit fastest. Returns
/// false after wrapping around to all zeros.
fn advance(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut().rev() {
        if *d + 1 < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// Negative orthant dependence of child counts under uniform increasing
/// trees: for every `subset_size`-subset `S` of `[n]` (default 2) and every
/// threshold vector in `{0..n-1}^S`,
/// `P(deg(v) >= m_v, v in S) <= Π_v P(deg(v) >= m_v)`.
pub fn orthant_check(n: usize, subset_size: Option<usize>) -> Result<OrthantReport> {
    let s = subset_size.unwrap_or(2);
    if s == 0 || s > n {
        return Err(Error::Domain(format!(
            "subset size {s} must lie in 1..={n}"
        )));
    }
    let subsets = subsets(n as u32, s);
    let rows_needed = (subsets.len() as u64).saturating_mul((n as u64).saturating_pow(s as u32));
    if rows_needed > MAX_ORTHANT_ROWS {
        return Err(Error::Resource(format!(
            "{rows_needed} threshold vectors exceed the limit of {MAX_ORTHANT_ROWS}"
        )));
    }
    let degrees: Vec<Vec<u32>> = enumerate_increasing_trees(n)?
        .map(|t| t.child_counts().into_inner())
        .collect();
    let total = degrees.len() as u64;

    // marginal[v][m] = #{trees : deg(v) >= m}
    let marginal: Vec<Vec<u64>> = (0..n)
        .map(|v| {
            (0..n as u32)
                .map(|m| degrees.iter().filter(|d| d[v] >= m).count() as u64)
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for set in &subsets {
        let mut joint: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for d in &degrees {
            *joint
                .entry(set.iter().map(|&v| d[v as usize - 1]).collect())
                .or_insert(0) += 1;
        }
        let mut m = vec![0u32; s];
        loop {
            let count: u64 = joint
                .iter()
                .filter(|(k, _)| k.iter().zip(&m).all(|(d, t)| d >= t))
                .map(|(_, c)| c)
                .sum();
            // count / T <= Π c_v / T^s  <=>  count T^(s-1) <= Π c_v
            let lhs_scaled = BigUint::from(count) * BigUint::from(total).pow(s as u32 - 1);
            let rhs_scaled = set
                .iter()
                .zip(&m)
                .fold(BigUint::from(1u32), |acc, (&v, &t)| {
                    acc * marginal[v as usize - 1][t as usize]
                });
            let rhs = set.iter().zip(&m).fold(ratio(1, 1), |acc, (&v, &t)| {
                acc * ratio(marginal[v as usize - 1][t as usize], total)
            });
            rows.push(OrthantRow {
                vertices: set.clone(),
                thresholds: m.clone(),
                lhs: ratio(count, total),
                rhs,
                holds: lhs_scaled <= rhs_scaled,
            });
            if !advance(&mut m, n as u32) {
                break;
            }
        }
    }
    Ok(OrthantReport {
        n,
        subset_size: s,
        checked: rows.len(),
        violations: rows.iter().filter(|r| !r.holds).count(),
        note: ORTHANT_NOTE,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialSum {
    pub order: u32,
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    /// `"upper"` for even orders, `"lower"` for odd ones.
    pub side: &'static str,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlternatingReport {
    pub n: usize,
    pub i: i64,
    /// Degree threshold `floor(log2 n) + i`.
    pub degree: u32,
    pub r_max: u32,
    #[serde(serialize_with = "ser_rational")]
    pub p_zero: BigRational,
    /// `E[(X_{≥i})_r]` for `r = 0..=max(r_max, 2)`.
    #[serde(serialize_with = "ser_rationals")]
    pub factorial_moments: Vec<BigRational>,
    pub partial_sums: Vec<PartialSum>,
    #[serde(serialize_with = "ser_rational")]
    pub p_positive: BigRational,
    /// `E[X] - E[(X)_2] / 2`.
    #[serde(serialize_with = "ser_rational")]
    pub pz_lower: BigRational,
    /// `E[X]`.
    #[serde(serialize_with = "ser_rational")]
    pub pz_upper: BigRational,
    pub pz_holds: bool,
}

fn ser_rationals<S: serde::Serializer>(
    qs: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(qs.len()))?;
    for q in qs {
        seq.serialize_element(&super::law::rational_string(q))?;
    }
    seq.end()
}

impl AlternatingReport {
    pub fn passed(&self) -> bool {
        self.pz_holds && self.partial_sums.iter().all(|p| p.holds)
    }
}

/// Values of `i` whose threshold `floor(log2 n) + i` lies in `0..=n`.
pub fn feasible_indices(n: usize) -> std::ops::RangeInclusive<i64> {
    let l = floor_log2(n as u64) as i64;
    -l..=n as i64 - l
}

/// Inclusion–exclusion partial sums for `P(X_{≥i} = 0)` under uniform
/// increasing trees, with the first- and second-moment bracket for
/// `P(X_{≥i} > 0)`.
pub fn alternating_bounds(n: usize, i: i64, r_max: u32) -> Result<AlternatingReport> {
    if n > MAX_TREE_N {
        return Err(Error::Resource(format!(
            "exact enumeration is limited to n <= {MAX_TREE_N}"
        )));
    }
    if n == 0 || !feasible_indices(n).contains(&i) {
        return Err(Error::Domain(format!(
            "index {i} gives a negative or oversized degree threshold at n = {n}"
        )));
    }
    let degree = (floor_log2(n as u64) as i64 + i) as u32;
    let law = exact_profile_law(n, Source::Rrt)?;
    let count = |m: &crate::tree::DegreeMultiset| {
        m.as_slice().iter().filter(|&&d| d >= degree).count() as u64
    };

    let orders = r_max.max(2);
    let factorial_moments: Vec<BigRational> = (0..=orders)
        .map(|r| law.expectation(|m| ratio(falling_factorial(count(m), r).expect("small n"), 1)))
        .collect();
    let p_zero = law.expectation(|m| ratio(u64::from(count(m) == 0), 1));

    let mut partial_sums = Vec::new();
    let mut acc = ratio(0, 1);
    let mut r_fact = ratio(1, 1);
    for r in 0..=r_max {
        if r > 0 {
            r_fact *= ratio(r, 1);
        }
        let term = &factorial_moments[r as usize] / &r_fact;
        if r % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        let upper = r % 2 == 0;
        partial_sums.push(PartialSum {
            order: r,
            holds: if upper { acc >= p_zero } else { acc <= p_zero },
            value: acc.clone(),
            side: if upper { "upper" } else { "lower" },
        });
    }
    let p_positive = ratio(1, 1) - &p_zero;
    let pz_upper = factorial_moments[1].clone();
    let pz_lower = &pz_upper - &factorial_moments[2] / ratio(2, 1);
    Ok(AlternatingReport {
        n,
        i,
        degree,
        r_max,
        pz_holds: pz_lower <= p_positive && p_positive <= pz_upper,
        p_zero,
        factorial_moments,
        partial_sums,
        p_positive,
        pz_lower,
        pz_upper,
    })
}

/// One comparison from [`decoupling_check`]. All probabilities are over
/// uniform event sequences; degrees are child counts in the final tree.
#[derive(Clone, Debug, Serialize)]
pub struct DecouplingRow {
    /// `"k1-equality"`, `"k2-upper"` or `"k2-lower"`.
    pub kind: &'static str,
    pub vertices: Vec<u32>,
    pub thresholds: Vec<u32>,
    /// Step cut-off `I` for the lower bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u32>,
    #[serde(serialize_with = "ser_rational")]
    pub probability: BigRational,
    /// `2^{-Σ m_v}` times the selection-count probability.
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecouplingReport {
    pub n: usize,
    pub sequences: u64,
    pub checked: usize,
    pub violations: usize,
    pub rows: Vec<DecouplingRow>,
}

impl DecouplingReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks, over all event sequences on `n` vertices:
///
/// * `P(deg(v) >= m) = 2^{-m} P(|S_v| >= m)` for every vertex `v`;
/// * `P(deg(u) >= m_u, deg(v) >= m_v) <= 2^{-m_u-m_v} P(|S_u| >= m_u, |S_v| >= m_v)`
///   for every pair;
/// * `P(deg(1) >= m_1, deg(2) >= m_2) >= 2^{-m_1-m_2} P(I < τ_2, |S_1 ∩ [I]| >= m_1, |S_2 ∩ [I]| >= m_2)`
///   for `I = 1..n-1`.
///
/// Thresholds range over `0..n`.
pub fn decoupling_check(n: usize) -> Result<DecouplingReport> {
    let nm = n as u32;
    let pairs = subsets(nm, 2);
    // histograms keyed by per-vertex (degree, selections)
    let mut single: Vec<BTreeMap<(u32, u32), u64>> = vec![BTreeMap::new(); n];
    let mut joint: Vec<BTreeMap<(u32, u32, u32, u32), u64>> = vec![BTreeMap::new(); pairs.len()];
    // (I, deg 1, deg 2, |S_1 ∩ [I]|, |S_2 ∩ [I]|) restricted to I < τ_2
    let mut lower: BTreeMap<(u32, u32, u32, u32, u32), u64> = BTreeMap::new();
    let mut total = 0u64;
    for events in enumerate_events(n)? {
        total += 1;
        let rec = selection_records(&events);
        for (v, r) in rec.iter().enumerate() {
            *single[v]
                .entry((r.degree, r.times.len() as u32))
                .or_insert(0) += 1;
        }
        for (p, set) in pairs.iter().enumerate() {
            let (a, b) = (&rec[set[0] as usize - 1], &rec[set[1] as usize - 1]);
            *joint[p]
                .entry((
                    a.degree,
                    b.degree,
                    a.times.len() as u32,
                    b.times.len() as u32,
                ))
                .or_insert(0) += 1;
        }
        if n >= 2 {
            let tau = tau_k(&events, 2)?.expect("the last step merges trees 1 and 2") as u32;
            for cut in 1..tau.min(nm) {
                let key = (
                    cut,
                    rec[0].degree,
                    rec[1].degree,
                    rec[0].selections_through(cut) as u32,
                    rec[1].selections_through(cut) as u32,
                );
                *lower.entry(key).or_insert(0) += 1;
            }
        }
    }

    let mut rows = Vec::new();
    for (v, hist) in single.iter().enumerate() {
        for m in 0..nm {
            let deg: u64 = hist.iter().filter(|(k, _)| k.0 >= m).map(|(_, c)| c).sum();
            let sel: u64 = hist.iter().filter(|(k, _)| k.1 >= m).map(|(_, c)| c).sum();
            rows.push(DecouplingRow {
                kind: "k1-equality",
                vertices: vec![v as u32 + 1],
                thresholds: vec![m],
                cutoff: None,
                probability: ratio(deg, total),
                bound: ratio(sel, total) / ratio(1u64 << m, 1),
                holds: u128::from(deg) << m == u128::from(sel),
            });
        }
    }
    for (p, set) in pairs.iter().enumerate() {
        for m1 in 0..nm {
            for m2 in 0..nm {
                let deg: u64 = joint[p]
                    .iter()
                    .filter(|(k, _)| k.0 >= m1 && k.1 >= m2)
                    .map(|(_, c)| c)
                    .sum();
                let sel: u64 = joint[p]
                    .iter()
                    .filter(|(k, _)| k.2 >= m1 && k.3 >= m2)
                    .map(|(_, c)| c)
                    .sum();
                rows.push(DecouplingRow {
                    kind: "k2-upper",
                    vertices: set.clone(),
                    thresholds: vec![m1, m2],
                    cutoff: None,
                    probability: ratio(deg, total),
                    bound: ratio(sel, total) / ratio(1u64 << (m1 + m2), 1),
                    holds: u128::from(deg) << (m1 + m2) <= u128::from(sel),
                });
            }
        }
    }
    if n >= 2 {
        let pair_12 = &joint[0];
        for cut in 1..nm {
            for m1 in 0..nm {
                for m2 in 0..nm {
                    let deg: u64 = pair_12
                        .iter()
                        .filter(|(k, _)| k.0 >= m1 && k.1 >= m2)
                        .map(|(_, c)| c)
                        .sum();
                    let sel: u64 = lower
                        .iter()
                        .filter(|(k, _)| k.0 == cut && k.3 >= m1 && k.4 >= m2)
                        .map(|(_, c)| c)
                        .sum();
                    rows.push(DecouplingRow {
                        kind: "k2-lower",
                        vertices: vec![1, 2],
                        thresholds: vec![m1, m2],
                        cutoff: Some(cut),
                        probability: ratio(deg, total),
                        bound: ratio(sel, total) / ratio(1u64 << (m1 + m2), 1),
                        holds: u128::from(deg) << (m1 + m2) >= u128::from(sel),
                    });
                }
            }
        }
    }
    Ok(DecouplingReport {
        n,
        sequences: total,
        checked: rows.len(),
        violations: rows.iter().filter(|r| !r.holds).count(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_small_cases() {
        let r = orthant_check(3, None).unwrap();
        let row = r
            .rows
            .iter()
            .find(|r| r.vertices == [1, 2] && r.thresholds == [1, 1])
            .unwrap();
        assert_eq!(row.lhs, ratio(1, 2));
        assert_eq!(row.rhs, ratio(1, 2));
        assert!(r
            .rows
            .iter()
            .filter(|r| r.thresholds.iter().all(|&t| t == 0))
            .all(|r| r.lhs == ratio(1, 1) && r.rhs == ratio(1, 1)));
        for n in 2..=5 {
            let r = orthant_check(n, None).unwrap();
            assert!(r.passed(), "n = {n}");
            assert_eq!(r.checked, n * (n - 1) / 2 * n * n);
        }
        assert!(orthant_check(5, Some(3)).unwrap().passed());
        assert!(orthant_check(3, Some(4)).is_err());
    }

    #[test]
    fn subsets_lexicographic() {
        assert_eq!(
            subsets(4, 2),
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(subsets(3, 3), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn alternating_four_vertices() {
        let r = alternating_bounds(4, 0, 4).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.p_zero, ratio(1, 6));
        assert_eq!(r.factorial_moments[1], ratio(5, 6));
        assert_eq!(r.factorial_moments[2], ratio(0, 1));
        assert_eq!(r.pz_lower, ratio(5, 6));
        assert_eq!(r.pz_upper, ratio(5, 6));
        assert_eq!(r.p_positive, ratio(5, 6));
        // both bounds on P(X = 0) collapse to 1/6
        assert_eq!(ratio(1, 1) - &r.pz_lower, ratio(1, 6));
        assert!(r.passed());
    }

    #[test]
    fn alternating_degenerate_and_general() {
        // threshold n: X_{≥i} is identically zero
        let r = alternating_bounds(5, 3, 3).unwrap();
        assert_eq!(r.p_zero, ratio(1, 1));
        assert!(r.partial_sums.iter().all(|p| p.value == ratio(1, 1)));
        let r = alternating_bounds(5, 0, 3).unwrap();
        assert_eq!(r.partial_sums.len(), 4);
        assert!(r.passed());
        assert!(alternating_bounds(5, -3, 2).is_err());
        assert!(alternating_bounds(10, 0, 2).is_err());
    }

    #[test]
    fn decoupling_small_cases() {
        let r = decoupling_check(4).unwrap();
        assert!(r.passed());
        let row = r
            .rows
            .iter()
            .find(|r| r.kind == "k1-equality" && r.vertices == [1] && r.thresholds == [1])
            .unwrap();
        assert_eq!(row.probability, ratio(1, 2));
        assert_eq!(row.bound, ratio(1, 2));
        assert!(r
            .rows
            .iter()
            .filter(|r| r.thresholds.iter().all(|&t| t == 0))
            .all(|r| r.probability == ratio(1, 1)));
        for n in 1..=3 {
            assert!(decoupling_check(n).unwrap().passed());
        }
    }
}
