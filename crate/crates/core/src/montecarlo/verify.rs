//! Structural checks of the merge chain by simulation.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Model, Suite};
use super::report::{Check, SIGNIFICANCE};
use super::{derive_seed, in_blocks, Sampler};
use crate::error::Result;
use crate::exact::{exact_profile_law, rational_f64, Source};
use crate::kingman::{
    fast_selection_sample, replay, sample_events, sample_taus, selection_records,
};
use crate::rng::{below, replicate_rng};
use crate::stats::{chi_square_homogeneity, gof_counts, Reference};
use crate::tree::DegreeMultiset;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: usize,
    pub replicates: u64,
    pub checks: Vec<Check>,
    pub data: Value,
}

pub(crate) fn run_suite(
    suite: Suite,
    n: usize,
    reps: u64,
    seed: u64,
    tau_eps: f64,
) -> Result<SuiteReport> {
    let seed = derive_seed(seed, suite as u64);
    let (checks, data) = match suite {
        Suite::All => unreachable!("expanded by the caller"),
        Suite::Streak => streak(n, reps, seed)?,
        Suite::Exchangeability => exchangeability(n, reps, seed)?,
        Suite::Selection => selection(n, reps, seed)?,
        Suite::Tau => tau(n, reps, seed, tau_eps)?,
        Suite::Models => models(n, reps, seed)?,
    };
    Ok(SuiteReport {
        suite,
        n,
        replicates: reps,
        checks,
        data,
    })
}

/// Degrees read off selection records (length of the initial run of
/// favourable selections) against degrees of the replayed final tree.
fn streak(n: usize, reps: u64, seed: u64) -> Result<(Vec<Check>, Value)> {
    let blocks = in_blocks(reps, |range| {
        let mut mismatches = 0u64;
        for r in range {
            let events = sample_events(n, &mut replicate_rng(seed, r))?;
            let degrees = replay(&events).final_tree.child_counts();
            mismatches += selection_records(&events)
                .iter()
                .zip(degrees.as_slice())
                .filter(|(rec, &d)| rec.degree != d)
                .count() as u64;
        }
        Ok(mismatches)
    })?;
    let mismatches: u64 = blocks.iter().sum();
    Ok((
        vec![Check::exact(
            "streak degree equals replayed degree",
            mismatches,
        )],
        json!({ "vertices_checked": reps * n as u64, "mismatches": mismatches }),
    ))
}

/// Child counts of the first, middle and last labels of the final tree
/// should share one law; each has mean `(n - 1) / n`.
fn exchangeability(n: usize, reps: u64, seed: u64) -> Result<(Vec<Check>, Value)> {
    let vertices = [1, n.div_ceil(2).max(1), n];
    let blocks = in_blocks(reps, |range| {
        let mut hists = vec![BTreeMap::<u32, u64>::new(); vertices.len()];
        for r in range {
            let events = sample_events(n, &mut replicate_rng(seed, r))?;
            let degrees = replay(&events).final_tree.child_counts();
            for (h, &v) in hists.iter_mut().zip(&vertices) {
                *h.entry(degrees.get(v as u32)).or_insert(0) += 1;
            }
        }
        Ok(hists)
    })?;
    let mut hists = vec![BTreeMap::<u32, u64>::new(); vertices.len()];
    for block in blocks {
        for (h, b) in hists.iter_mut().zip(block) {
            for (k, c) in b {
                *h.entry(k).or_insert(0) += c;
            }
        }
    }
    let refs: Vec<&BTreeMap<u32, u64>> = hists.iter().collect();
    let homogeneity = chi_square_homogeneity(&refs)?;
    let target = (n as f64 - 1.0) / n as f64;
    let mut checks = vec![Check::at_least(
        "degree law shared by first, middle and last label",
        homogeneity.p_value,
        SIGNIFICANCE,
    )];
    let mut means = Vec::new();
    for (h, &v) in hists.iter().zip(&vertices) {
        let (s, q) = h.iter().fold((0.0, 0.0), |(s, q), (&d, &c)| {
            (
                s + f64::from(d) * c as f64,
                q + f64::from(d).powi(2) * c as f64,
            )
        });
        let rf = reps as f64;
        let mean = s / rf;
        let var = if reps > 1 {
            (q - s * mean) / (rf - 1.0)
        } else {
            0.0
        };
        let se = (var / rf).sqrt();
        checks.push(Check::within(
            format!("mean degree of vertex {v}"),
            mean,
            target,
            3.0 * se,
        ));
        means.push(json!({ "vertex": v, "mean": mean, "stderr": se }));
    }
    Ok((
        checks,
        json!({ "vertices": vertices, "histograms": hists, "homogeneity": homogeneity, "means": means }),
    ))
}

/// `2 (H_n - 1)`, the mean number of selections of a fixed vertex.
pub fn mean_selections(n: usize) -> f64 {
    2.0 * (2..=n).rev().map(|i| 1.0 / i as f64).sum::<f64>()
}

/// The law of `min(s, G)` with `P(G = k) = 2^{-k-1}`.
fn truncated_geometric(s: u32) -> Vec<(i64, f64)> {
    (0..=s)
        .map(|k| {
            let p = if k < s {
                0.5f64.powi(k as i32 + 1)
            } else {
                0.5f64.powi(s as i32)
            };
            (i64::from(k), p)
        })
        .collect()
}

/// Selection counts of vertex 1: their mean, the conditional law of the
/// degree given the count, and a two-sample comparison with a direct sum of
/// independent `Bernoulli(2/i)`, `i = 2..n`.
fn selection(n: usize, reps: u64, seed: u64) -> Result<(Vec<Check>, Value)> {
    let bernoulli_seed = derive_seed(seed, 1);
    let blocks = in_blocks(reps, |range| {
        let mut buckets: BTreeMap<u32, BTreeMap<i64, u64>> = BTreeMap::new();
        let mut direct: BTreeMap<u32, u64> = BTreeMap::new();
        let mut sums = (0u128, 0u128);
        for r in range {
            let s = fast_selection_sample(n, &mut replicate_rng(seed, r))?;
            let (sel, deg) = (s.selections[0], s.degrees.get(1));
            *buckets
                .entry(sel)
                .or_default()
                .entry(i64::from(deg))
                .or_insert(0) += 1;
            sums.0 += u128::from(sel);
            sums.1 += u128::from(sel) * u128::from(sel);
            let mut rng = replicate_rng(bernoulli_seed, r);
            let b = (2..=n as u32).filter(|&i| below(&mut rng, i) < 2).count() as u32;
            *direct.entry(b).or_insert(0) += 1;
        }
        Ok((buckets, direct, sums))
    })?;
    let mut buckets: BTreeMap<u32, BTreeMap<i64, u64>> = BTreeMap::new();
    let mut direct: BTreeMap<u32, u64> = BTreeMap::new();
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for (b, d, (s, q)) in blocks {
        for (k, h) in b {
            let e = buckets.entry(k).or_default();
            for (deg, c) in h {
                *e.entry(deg).or_insert(0) += c;
            }
        }
        for (k, c) in d {
            *direct.entry(k).or_insert(0) += c;
        }
        sum += s;
        sum_sq += q;
    }
    let est = crate::stats::Estimate::from_sums(reps, sum, sum_sq);
    let target = mean_selections(n);
    let mut checks = vec![Check::within(
        "mean selections of vertex 1",
        est.mean,
        target,
        3.0 * est.stderr,
    )];

    let mut conditional = Vec::new();
    for (&s, h) in &buckets {
        let r = gof_counts(h, &Reference::Finite(truncated_geometric(s)))?;
        if r.chi_square.dof > 0 {
            checks.push(Check::at_least(
                format!("degree given {s} selections"),
                r.chi_square.p_value,
                SIGNIFICANCE,
            ));
        }
        conditional.push(json!({ "selections": s, "samples": r.samples, "chi_square": r.chi_square, "tv": r.tv }));
    }
    let observed: BTreeMap<u32, u64> = buckets
        .iter()
        .map(|(&s, h)| (s, h.values().sum()))
        .collect();
    let two_sample = chi_square_homogeneity(&[&observed, &direct])?;
    checks.push(Check::at_least(
        "selection count matches Bernoulli sum",
        two_sample.p_value,
        SIGNIFICANCE,
    ));
    Ok((
        checks,
        json!({
            "mean": est.mean,
            "stderr": est.stderr,
            "expected_mean": target,
            "conditional": conditional,
            "selection_histogram": observed,
            "bernoulli_histogram": direct,
            "two_sample": two_sample,
        }),
    ))
}

/// `ceil(n^eps)`, treating values within relative `1e-9` of an integer as
/// that integer so that exact powers are not pushed up by rounding.
pub fn ceil_power(n: usize, eps: f64) -> u64 {
    let x = (n as f64).powf(eps);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Frequency of `τ_k <= n - ceil(n^ε)` against `2k² / (ceil(n^ε) - 1)`.
fn tau(n: usize, reps: u64, seed: u64, eps: f64) -> Result<(Vec<Check>, Value)> {
    let ks = [2usize, 3];
    let c = ceil_power(n, eps);
    let cut = n.saturating_sub(c as usize);
    let blocks = in_blocks(reps, |range| {
        let mut hits = [0u64; 2];
        for r in range {
            let taus = sample_taus(n, &ks, cut, &mut replicate_rng(seed, r))?;
            for (h, t) in hits.iter_mut().zip(taus) {
                *h += u64::from(t.is_some());
            }
        }
        Ok(hits)
    })?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (j, &k) in ks.iter().enumerate() {
        let hits: u64 = blocks.iter().map(|b| b[j]).sum();
        let p = hits as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        let bound = if c > 1 {
            2.0 * (k * k) as f64 / (c - 1) as f64
        } else {
            f64::INFINITY
        };
        checks.push(Check::at_most(
            format!("P(tau_{k} <= {cut})"),
            p,
            bound + 3.0 * se,
        ));
        rows.push(json!({ "k": k, "hits": hits, "frequency": p, "stderr": se, "bound": bound }));
    }
    Ok((
        checks,
        json!({ "cutoff": cut, "ceil_n_eps": c, "eps": eps, "taus": rows }),
    ))
}

/// Degree-multiset frequencies of the three samplers against each other and
/// against the exact law.
fn models(n: usize, reps: u64, seed: u64) -> Result<(Vec<Check>, Value)> {
    let law = exact_profile_law(n, Source::Rrt)?;
    let index: BTreeMap<DegreeMultiset, i64> = law
        .iter()
        .enumerate()
        .map(|(j, (m, _))| (m.clone(), j as i64))
        .collect();
    let reference = Reference::Finite(
        law.iter()
            .enumerate()
            .map(|(j, (_, w))| (j as i64, rational_f64(w)))
            .collect(),
    );
    let mut hists = Vec::new();
    let mut checks = Vec::new();
    let mut per_model = Vec::new();
    for &model in Model::ALL {
        let model_seed = derive_seed(seed, 0x100 + model as u64);
        let blocks = in_blocks(reps, |range| {
            let mut sampler = Sampler::new(model);
            let mut h = BTreeMap::<i64, u64>::new();
            for r in range {
                let d = sampler.degrees(n, &mut replicate_rng(model_seed, r))?;
                let m = DegreeMultiset::from_degrees(d.to_vec());
                *h.entry(index.get(&m).copied().unwrap_or(-1)).or_insert(0) += 1;
            }
            Ok(h)
        })?;
        let mut h = BTreeMap::new();
        for b in blocks {
            for (k, c) in b {
                *h.entry(k).or_insert(0) += c;
            }
        }
        let g = gof_counts(&h, &reference)?;
        checks.push(Check::at_least(
            format!("{model} matches exact law"),
            g.chi_square.p_value,
            SIGNIFICANCE,
        ));
        per_model.push(json!({ "model": model, "gof": g, "histogram": h }));
        hists.push(h);
    }
    for a in 0..hists.len() {
        for b in a + 1..hists.len() {
            let c = chi_square_homogeneity(&[&hists[a], &hists[b]])?;
            checks.push(Check::at_least(
                format!("{} vs {}", Model::ALL[a], Model::ALL[b]),
                c.p_value,
                SIGNIFICANCE,
            ));
        }
    }
    let support: Vec<String> = law.iter().map(|(m, _)| m.to_string()).collect();
    Ok((checks, json!({ "support": support, "models": per_model })))
}
