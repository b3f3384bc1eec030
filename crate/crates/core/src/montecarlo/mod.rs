//! Seeded, parallel Monte Carlo experiments.
//!
//! Replicate `r` of a run with master seed `s` draws from
//! [`replicate_rng`]`(s, r)`, i.e. ChaCha8 seeded with
//! `splitmix64(s ^ r)`. Replicates are processed in fixed blocks of
//! [`BLOCK`] whose results are merged in block order, so reports do not
//! depend on the number of worker threads.

mod accumulate;
mod config;
mod report;
mod verify;

use std::fs::File;
use std::io::Write;
use std::ops::Range;
use std::path::Path;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;

pub use accumulate::{histogram_sums, Accumulator, ReplicateCounts};
pub use config::{ExperimentConfig, Kind, Model, Suite, REPLAY_MAX_N};
pub use report::{
    Check, CltStats, ColumnStats, Covariance, GofEntry, Independence, MaxDegree, MomentEntry,
    SummaryReport, TailStats, KS_TOLERANCE, RELATIVE_SLACK, SIGNIFICANCE, TAIL_RELATIVE,
    TV_TOLERANCE,
};
pub use verify::{ceil_power, mean_selections, SuiteReport};

use crate::error::{Error, Result};
use crate::kingman::{replay, sample_events, FastCoalescent};
use crate::rng::{mix64, replicate_rng};
use crate::rrt::sample_degrees_into;
use crate::stats::{epsilon, floor_log2};

/// Replicates per work unit.
pub const BLOCK: u64 = 256;

/// Seed of an independent sub-experiment `tag` of a run.
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    mix64(mix64(master) ^ tag)
}

/// Runs `f` on consecutive blocks of `0..reps` in parallel and returns the
/// results in block order.
pub(crate) fn in_blocks<T, F>(reps: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> Result<T> + Sync,
{
    let blocks = reps.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| f(b * BLOCK..((b + 1) * BLOCK).min(reps)))
        .collect()
}

/// One model's degree sampler with reusable buffers.
pub struct Sampler {
    model: Model,
    fast: FastCoalescent,
    buf: Vec<u32>,
}

impl Sampler {
    pub fn new(model: Model) -> Self {
        Sampler {
            model,
            fast: FastCoalescent::new(),
            buf: Vec::new(),
        }
    }

    /// Child counts of one sampled tree, indexed by `v - 1`.
    pub fn degrees<R: RngCore + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<&[u32]> {
        match self.model {
            Model::Rrt => {
                sample_degrees_into(n, rng, &mut self.buf)?;
                Ok(&self.buf)
            }
            Model::KingmanFast => self.fast.sample_degrees(n, rng),
            Model::KingmanReplay => {
                if n > REPLAY_MAX_N {
                    return Err(Error::Config(format!(
                        "kingman-replay is limited to n <= {REPLAY_MAX_N}"
                    )));
                }
                let events = sample_events(n, rng)?;
                self.buf = replay(&events).final_tree.child_counts().into_inner();
                Ok(&self.buf)
            }
        }
    }
}

/// One CSV line: `replicate,n,eps_n,delta,x_lo,x_<imin>..x_<imax-1>,x_hi`,
/// where `x_lo` pools indices below `imin` and `x_hi` is `X_{≥imax}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplicateRow {
    pub replicate: u64,
    pub delta: u32,
    pub x_lo: u64,
    pub x: Vec<u64>,
    pub x_hi: u64,
}

impl ReplicateRow {
    fn new(replicate: u64, c: &ReplicateCounts, imin: i64, imax: i64) -> Self {
        ReplicateRow {
            replicate,
            delta: c.delta(),
            x_lo: c.x_ge(i64::MIN / 2) - c.x_ge(imin),
            x: (imin..imax).map(|i| c.x(i)).collect(),
            x_hi: c.x_ge(imax),
        }
    }
}

pub fn csv_header(imin: i64, imax: i64) -> Vec<String> {
    let mut h: Vec<String> = ["replicate", "n", "eps_n", "delta", "x_lo"]
        .map(String::from)
        .to_vec();
    h.extend((imin..imax).map(|i| format!("x_{i}")));
    h.push("x_hi".into());
    h
}

pub fn write_csv<W: Write>(
    out: W,
    config: &ExperimentConfig,
    eps: f64,
    rows: &[ReplicateRow],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(config.imin, config.imax))?;
    let (n, eps) = (config.n.to_string(), eps.to_string());
    for row in rows {
        let mut rec = vec![
            row.replicate.to_string(),
            n.clone(),
            eps.clone(),
            row.delta.to_string(),
            row.x_lo.to_string(),
        ];
        rec.extend(row.x.iter().map(u64::to_string));
        rec.push(row.x_hi.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Samples every replicate and aggregates. Rows are returned only when
/// `keep_rows` is set.
pub fn simulate(
    config: &ExperimentConfig,
    keep_rows: bool,
) -> Result<(Accumulator, Vec<ReplicateRow>)> {
    config.validate()?;
    let (imin, imax) = (config.imin, config.imax);
    let specs = &config.moments;
    let blocks = in_blocks(config.replicates, |range| {
        let mut sampler = Sampler::new(config.model);
        let mut acc = Accumulator::new(imin, imax, specs.len());
        let mut rows = Vec::new();
        let mut scratch = Vec::new();
        for r in range {
            let mut rng = replicate_rng(config.master_seed, r);
            let degrees = sampler.degrees(config.n, &mut rng)?;
            let counts = ReplicateCounts::from_degrees(degrees, scratch);
            acc.observe(&counts, specs)?;
            if keep_rows {
                rows.push(ReplicateRow::new(r, &counts, imin, imax));
            }
            scratch = counts.into_scratch();
        }
        Ok((acc, rows))
    })?;
    let mut total = Accumulator::new(imin, imax, specs.len());
    let mut rows = Vec::new();
    for (acc, r) in blocks {
        total.merge(acc);
        rows.extend(r);
    }
    Ok((total, rows))
}

fn check_kind(config: &ExperimentConfig, floor_log: u32) -> Result<()> {
    if config.kind == Kind::Clt {
        if !(config.imin..=config.imax).contains(&config.i) {
            return Err(Error::Config(format!(
                "clt index {} must lie in imin..=imax = {}..={}",
                config.i, config.imin, config.imax
            )));
        }
        if config.i + i64::from(floor_log) < 0 {
            return Err(Error::Config(format!(
                "clt index {} is below -floor(log2 n) = -{floor_log}",
                config.i
            )));
        }
    }
    Ok(())
}

fn execute_inner(
    config: &ExperimentConfig,
    want_rows: bool,
) -> Result<(SummaryReport, Vec<ReplicateRow>)> {
    let eps = epsilon(config.n as u64)?;
    let floor_log = floor_log2(config.n as u64);
    check_kind(config, floor_log)?;
    if config.kind == Kind::Verify {
        let suites: Vec<(Suite, usize, u64)> = if config.suite == Suite::All {
            Suite::ALL[1..]
                .iter()
                .map(|&s| {
                    let (n, reps) = s.default_size();
                    (s, n, reps)
                })
                .collect()
        } else {
            vec![(config.suite, config.n, config.replicates)]
        };
        let reports = suites
            .into_iter()
            .map(|(s, n, reps)| verify::run_suite(s, n, reps, config.master_seed, config.tau_eps))
            .collect::<Result<Vec<_>>>()?;
        return Ok((
            report::build_verify(config, eps, floor_log, reports)?,
            Vec::new(),
        ));
    }
    let (acc, rows) = simulate(config, want_rows)?;
    Ok((
        report::build(config, eps, floor_log, &acc, Vec::new())?,
        rows,
    ))
}

/// Runs an experiment without writing any output. Per-replicate rows are
/// returned when `want_rows` is set (sampling kinds only).
pub fn execute(
    config: &ExperimentConfig,
    want_rows: bool,
) -> Result<(SummaryReport, Vec<ReplicateRow>)> {
    config.validate()?;
    let start = Instant::now();
    let (mut report, rows) = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?
            .install(|| execute_inner(config, want_rows))?,
        None => execute_inner(config, want_rows)?,
    };
    if config.record_timing {
        report.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok((report, rows))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn write_json<W: Write>(mut out: W, report: &SummaryReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

/// Runs an experiment, writing the CSV and JSON files named in the
/// configuration.
pub fn run(config: &ExperimentConfig) -> Result<SummaryReport> {
    let (report, rows) = execute(config, config.csv.is_some())?;
    if let Some(path) = &config.csv {
        write_csv(create(path)?, config, report.eps_n, &rows)?;
    }
    if let Some(path) = &config.json {
        write_json(create(path)?, &report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: Kind, model: Model) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            model,
            n: 256,
            replicates: 600,
            master_seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn two_vertex_run() {
        let c = ExperimentConfig {
            n: 2,
            replicates: 1,
            master_seed: 7,
            model: Model::Rrt,
            ..Default::default()
        };
        let (acc, rows) = simulate(&c, true).unwrap();
        assert_eq!(acc.replicates(), 1);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].delta, 1);
        let r = run(&c).unwrap();
        assert_eq!(r.column(0).unwrap().mean, 1.0);
        assert_eq!(r.column(-1).unwrap().mean, 1.0);
        assert!(r.passed);
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let base = small(Kind::Poisson, Model::KingmanFast);
        let one = run(&ExperimentConfig {
            threads: Some(1),
            ..base.clone()
        })
        .unwrap();
        let three = run(&ExperimentConfig {
            threads: Some(3),
            ..base.clone()
        })
        .unwrap();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&three).unwrap()
        );
        let again = run(&base).unwrap();
        assert_eq!(one, again);
    }

    #[test]
    fn models_draw_different_streams_but_same_shape() {
        for model in Model::ALL {
            let r = run(&small(Kind::Profile, *model)).unwrap();
            assert_eq!(r.replicates, 600);
            assert_eq!(r.columns.len(), 7);
            assert!(r.checks.is_empty() && r.passed);
        }
    }

    #[test]
    fn csv_layout() {
        let c = ExperimentConfig {
            n: 1000,
            replicates: 3,
            imin: -1,
            imax: 2,
            ..Default::default()
        };
        let (_, rows) = simulate(&c, true).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &c, epsilon(1000).unwrap(), &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "replicate,n,eps_n,delta,x_lo,x_-1,x_0,x_1,x_hi");
        assert_eq!(lines.len(), 4);
        for row in &rows {
            assert_eq!(row.x_lo + row.x.iter().sum::<u64>() + row.x_hi, 1000);
        }
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExperimentConfig {
            n: 64,
            replicates: 5,
            csv: Some(dir.path().join("r.csv")),
            json: Some(dir.path().join("r.json")),
            ..Default::default()
        };
        let r = run(&c).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
        assert_eq!(csv.lines().count(), 6);
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap())
                .unwrap();
        assert_eq!(json["schema"], crate::SCHEMA);
        assert_eq!(json["replicates"], 5);
        // output paths are not echoed, so reports compare equal across destinations
        assert!(json["config"].get("csv").is_none());
        assert_eq!(r.config.csv, None);
    }

    #[test]
    fn clt_index_must_be_tracked() {
        let c = ExperimentConfig {
            kind: Kind::Clt,
            i: -8,
            imin: -2,
            ..small(Kind::Clt, Model::Rrt)
        };
        assert!(matches!(run(&c), Err(Error::Config(_))));
        let c = ExperimentConfig {
            i: -1,
            imin: -1,
            imax: -1,
            ..c
        };
        let r = run(&c).unwrap();
        assert!(r.clt.is_some());
        assert_eq!(r.checks.len(), 1);
    }
}
