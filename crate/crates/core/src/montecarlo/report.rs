use std::collections::BTreeMap;

use serde::Serialize;

use super::accumulate::{histogram_sums, Accumulator};
use super::config::{ExperimentConfig, Kind};
use super::verify::SuiteReport;
use crate::error::Result;
use crate::stats::{
    chi_square_independence, gof_counts, ks_standard_normal_weighted, ChiSquare, Estimate,
    LimitLaw, Reference,
};
use crate::SCHEMA;

/// Maximum total variation accepted by the Poisson checks.
pub const TV_TOLERANCE: f64 = 0.02;
/// Significance level of every chi-square check.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Relative slack added to three standard errors in mean and moment checks.
pub const RELATIVE_SLACK: f64 = 0.05;
/// Relative tolerance floor of the maximum-degree tail check.
pub const TAIL_RELATIVE: f64 = 0.10;
/// Maximum KS distance accepted by the CLT check.
pub const KS_TOLERANCE: f64 = 0.05;

/// One pass/fail comparison: `value` against `bound` as described by `rule`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub rule: String,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
            rule: "value <= bound".into(),
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            passed: value >= bound,
            value,
            bound,
            rule: "value >= bound".into(),
        }
    }

    /// `|value - target| <= tolerance`; `bound` records the tolerance.
    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: (value - target).abs() <= tolerance,
            value,
            bound: tolerance,
            rule: format!("|value - {target}| <= bound"),
        }
    }

    pub fn exact(name: impl Into<String>, mismatches: u64) -> Self {
        Check {
            name: name.into(),
            passed: mismatches == 0,
            value: mismatches as f64,
            bound: 0.0,
            rule: "no mismatches".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnStats {
    pub i: i64,
    pub degree: i64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub limit_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailStats {
    pub i: i64,
    pub degree: i64,
    pub mean: f64,
    pub stderr: f64,
    pub limit_mean: f64,
    /// Fraction of replicates with `X_{≥i} > 0`, i.e. `Δ ≥ ⌊log₂ n⌋ + i`.
    pub p_positive: f64,
    pub p_positive_stderr: f64,
    pub limit_p_positive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Covariance {
    pub i: i64,
    pub j: i64,
    pub covariance: f64,
    /// `sd(X_i) sd(X_j) / √R`, the standard error under independence.
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Independence {
    /// Rows `X_i = 0, X_i > 0`; columns `X_{≥i+1} = 0, X_{≥i+1} > 0`.
    pub i: i64,
    pub table: [[u64; 2]; 2],
    pub chi_square: ChiSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GofEntry {
    /// `"X_i"` or `"X_>=i"`.
    pub statistic: String,
    pub i: i64,
    pub poisson_mean: f64,
    pub tv: f64,
    pub chi_square: ChiSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEntry {
    pub spec: String,
    pub estimate: f64,
    pub stderr: f64,
    pub prediction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltStats {
    pub i: i64,
    pub mu: f64,
    pub z_mean: f64,
    pub z_variance: f64,
    pub ks: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxDegree {
    pub histogram: BTreeMap<u32, u64>,
    pub mean: f64,
    pub stderr: f64,
}

/// Everything a run reports. Deterministic given the configuration, except
/// for the optional `elapsed_seconds`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryReport {
    pub schema: &'static str,
    pub config: ExperimentConfig,
    pub n: usize,
    pub floor_log2: u32,
    pub eps_n: f64,
    pub replicates: u64,
    pub columns: Vec<ColumnStats>,
    pub tails: Vec<TailStats>,
    pub max_degree: MaxDegree,
    pub covariances: Vec<Covariance>,
    pub independence: Vec<Independence>,
    pub gof: Vec<GofEntry>,
    pub moments: Vec<MomentEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clt: Option<CltStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verify: Vec<SuiteReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl SummaryReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn column(&self, i: i64) -> Option<&ColumnStats> {
        self.columns.iter().find(|c| c.i == i)
    }

    pub fn tail(&self, i: i64) -> Option<&TailStats> {
        self.tails.iter().find(|c| c.i == i)
    }

    pub fn gof_entry(&self, statistic: &str) -> Option<&GofEntry> {
        self.gof.iter().find(|g| g.statistic == statistic)
    }
}

fn estimate(h: &BTreeMap<u64, u64>, replicates: u64) -> Estimate {
    let (s, q) = histogram_sums(h);
    Estimate::from_sums(replicates, s, q)
}

fn signed(h: &BTreeMap<u64, u64>) -> BTreeMap<i64, u64> {
    h.iter().map(|(&v, &c)| (v as i64, c)).collect()
}

fn proportion(hits: u64, total: u64) -> (f64, f64) {
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Assembles the report for the sampling kinds, then appends `checks`
/// computed by the caller (the verify suites).
pub(crate) fn build(
    config: &ExperimentConfig,
    eps: f64,
    floor_log: u32,
    acc: &Accumulator,
    verify: Vec<SuiteReport>,
) -> Result<SummaryReport> {
    let law = LimitLaw::new(eps)?;
    let reps = acc.replicates();
    let rf = reps as f64;
    let l = i64::from(floor_log);

    let mut columns = Vec::new();
    let mut tails = Vec::new();
    let mut gof = Vec::new();
    for i in acc.index_range() {
        let h = acc.point_histogram(i).expect("tracked index");
        let e = estimate(h, reps);
        columns.push(ColumnStats {
            i,
            degree: l + i,
            mean: e.mean,
            variance: e.stderr * e.stderr * rf,
            stderr: e.stderr,
            limit_mean: law.mean(i),
        });
        let r = gof_counts(&signed(h), &Reference::Poisson(law.mean(i)))?;
        gof.push(GofEntry {
            statistic: format!("X_{i}"),
            i,
            poisson_mean: law.mean(i),
            tv: r.tv,
            chi_square: r.chi_square,
        });

        let t = acc.tail_histogram(i).expect("tracked index");
        let e = estimate(t, reps);
        let (p, p_se) = proportion(t.iter().filter(|(&v, _)| v > 0).map(|(_, c)| c).sum(), reps);
        tails.push(TailStats {
            i,
            degree: l + i,
            mean: e.mean,
            stderr: e.stderr,
            limit_mean: law.tail_mass(i),
            p_positive: p,
            p_positive_stderr: p_se,
            limit_p_positive: law.tail_probability(i),
        });
        let r = gof_counts(&signed(t), &Reference::Poisson(law.tail_mass(i)))?;
        gof.push(GofEntry {
            statistic: format!("X_>={i}"),
            i,
            poisson_mean: law.tail_mass(i),
            tv: r.tv,
            chi_square: r.chi_square,
        });
    }

    let mut covariances = Vec::new();
    let mut independence = Vec::new();
    for i in acc.index_range() {
        let (Some(cross), Some(table)) = (acc.cross_sum(i), acc.joint_table(i)) else {
            continue;
        };
        let (a, b) = (columns_at(&columns, i), columns_at(&columns, i + 1));
        let (sa, _) = histogram_sums(acc.point_histogram(i).unwrap());
        let (sb, _) = histogram_sums(acc.point_histogram(i + 1).unwrap());
        let covariance = if reps > 1 {
            (cross as f64 - sa as f64 * sb as f64 / rf) / (rf - 1.0)
        } else {
            0.0
        };
        covariances.push(Covariance {
            i,
            j: i + 1,
            covariance,
            stderr: (a.variance * b.variance).sqrt() / rf.sqrt(),
        });
        let rows: Vec<Vec<u64>> = table.iter().map(|r| r.to_vec()).collect();
        independence.push(Independence {
            i,
            table,
            chi_square: chi_square_independence(&rows)?,
        });
    }

    let delta_hist = acc.delta_histogram().clone();
    let (ds, dq) = delta_hist.iter().fold((0u128, 0u128), |(s, q), (&v, &c)| {
        let (v, c) = (u128::from(v), u128::from(c));
        (s + v * c, q + v * v * c)
    });
    let de = Estimate::from_sums(reps, ds, dq);

    let moments: Vec<MomentEntry> = config
        .moments
        .iter()
        .zip(acc.moment_sums())
        .map(|(spec, &(s, q))| {
            let e = Estimate::from_sums(reps, s, q);
            MomentEntry {
                spec: spec.to_string(),
                estimate: e.mean,
                stderr: e.stderr,
                prediction: spec.prediction(eps),
            }
        })
        .collect();

    let clt = if config.kind == Kind::Clt {
        let i = config.i;
        let mu = law.mean(i);
        let h = acc.point_histogram(i).expect("validated clt index");
        let points: Vec<(f64, u64)> = h.iter().map(|(&v, &c)| (law.zscore(i, v), c)).collect();
        let z_mean = points.iter().map(|(z, c)| z * *c as f64).sum::<f64>() / rf;
        let z_variance = if reps > 1 {
            points
                .iter()
                .map(|(z, c)| (z - z_mean).powi(2) * *c as f64)
                .sum::<f64>()
                / (rf - 1.0)
        } else {
            0.0
        };
        Some(CltStats {
            i,
            mu,
            z_mean,
            z_variance,
            ks: ks_standard_normal_weighted(&points)?,
        })
    } else {
        None
    };

    let mut report = SummaryReport {
        schema: SCHEMA,
        config: ExperimentConfig {
            threads: None,
            csv: None,
            json: None,
            ..config.clone()
        },
        n: config.n,
        floor_log2: floor_log,
        eps_n: eps,
        replicates: reps,
        columns,
        tails,
        max_degree: MaxDegree {
            histogram: delta_hist,
            mean: de.mean,
            stderr: de.stderr,
        },
        covariances,
        independence,
        gof,
        moments,
        clt,
        verify,
        checks: Vec::new(),
        passed: true,
        elapsed_seconds: None,
    };
    report.checks = kind_checks(config, &report);
    report
        .checks
        .extend(report.verify.iter().flat_map(|s| s.checks.iter().cloned()));
    report.passed = report.checks.iter().all(|c| c.passed);
    Ok(report)
}

fn columns_at(columns: &[ColumnStats], i: i64) -> &ColumnStats {
    columns.iter().find(|c| c.i == i).expect("tracked index")
}

fn kind_checks(config: &ExperimentConfig, r: &SummaryReport) -> Vec<Check> {
    let mut checks = Vec::new();
    match config.kind {
        Kind::Poisson => {
            if let Some(g) = r.gof_entry("X_0") {
                checks.push(Check::at_most("tv X_0", g.tv, TV_TOLERANCE));
            }
            for c in r.columns.iter().filter(|c| c.i < config.imax) {
                checks.push(Check::within(
                    format!("mean X_{}", c.i),
                    c.mean,
                    c.limit_mean,
                    3.0 * c.stderr + RELATIVE_SLACK * c.limit_mean,
                ));
            }
            if let Some(c) = r.covariances.iter().find(|c| c.i == 0) {
                checks.push(Check::within(
                    "covariance X_0 X_1",
                    c.covariance,
                    0.0,
                    3.0 * c.stderr,
                ));
            }
            if let Some(g) = r.gof_entry("X_>=2") {
                checks.push(Check::at_most("tv X_>=2", g.tv, TV_TOLERANCE));
            }
            if let Some(ind) = r.independence.iter().find(|c| c.i == 1) {
                checks.push(Check::at_least(
                    "independence X_1 X_>=2",
                    ind.chi_square.p_value,
                    SIGNIFICANCE,
                ));
            }
        }
        Kind::Tail => {
            for t in &r.tails {
                let se = t.p_positive_stderr;
                checks.push(Check::within(
                    format!("tail P(delta >= {})", t.degree),
                    t.p_positive,
                    t.limit_p_positive,
                    (3.0 * se).max(TAIL_RELATIVE * t.limit_p_positive),
                ));
            }
        }
        Kind::Clt => {
            if let Some(c) = &r.clt {
                checks.push(Check::at_most(format!("ks X_{}", c.i), c.ks, KS_TOLERANCE));
            }
        }
        Kind::Moments => {
            for m in &r.moments {
                checks.push(Check::within(
                    format!("moment {}", m.spec),
                    m.estimate,
                    m.prediction,
                    3.0 * m.stderr + RELATIVE_SLACK * m.prediction,
                ));
            }
        }
        Kind::Profile | Kind::Verify => {}
    }
    checks
}

/// Report for [`Kind::Verify`] runs, which sample no degree profiles.
pub(crate) fn build_verify(
    config: &ExperimentConfig,
    eps: f64,
    floor_log: u32,
    suites: Vec<SuiteReport>,
) -> Result<SummaryReport> {
    let checks: Vec<Check> = suites
        .iter()
        .flat_map(|s| s.checks.iter().cloned())
        .collect();
    Ok(SummaryReport {
        schema: SCHEMA,
        config: ExperimentConfig {
            threads: None,
            csv: None,
            json: None,
            ..config.clone()
        },
        n: config.n,
        floor_log2: floor_log,
        eps_n: eps,
        replicates: suites.iter().map(|s| s.replicates).sum(),
        columns: Vec::new(),
        tails: Vec::new(),
        max_degree: MaxDegree {
            histogram: BTreeMap::new(),
            mean: 0.0,
            stderr: 0.0,
        },
        covariances: Vec::new(),
        independence: Vec::new(),
        gof: Vec::new(),
        moments: Vec::new(),
        clt: None,
        verify: suites,
        passed: checks.iter().all(|c| c.passed),
        checks,
        elapsed_seconds: None,
    })
}
