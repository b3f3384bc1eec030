use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use rrtlab::exact::{
    alternating_bounds, decoupling_check, exact_factorial_moments, exact_profile_law,
    feasible_indices, orthant_check, phi_fiber_census, rational_f64, rational_string, Source,
};
use rrtlab::kingman::{replay, selection_records, CoalescentEvents};
use rrtlab::montecarlo::{
    execute, write_csv, write_json, ExperimentConfig, Kind, Suite, SummaryReport,
};
use rrtlab::stats::MomentSpec;
use rrtlab::SCHEMA;

use crate::args::{Command, ExactArgs, ExactCheck, RunArgs};

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

/// Returns whether every check passed.
pub fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Simulate(run) => experiment(Kind::Profile, &run, ExperimentConfig::default()),
        Command::Poisson(run) => {
            let base = ExperimentConfig {
                replicates: 10_000,
                ..Default::default()
            };
            experiment(Kind::Poisson, &run, base)
        }
        Command::Tail(run) => {
            let base = ExperimentConfig {
                replicates: 20_000,
                imin: 1,
                imax: 5,
                ..Default::default()
            };
            experiment(Kind::Tail, &run, base)
        }
        Command::Clt { run, i } => {
            let i = i.unwrap_or(-8);
            let base = ExperimentConfig {
                n: 1 << 20,
                replicates: 2_000,
                i,
                imin: i,
                imax: i,
                ..Default::default()
            };
            experiment(Kind::Clt, &run, base)
        }
        Command::Moments { run, moments } => {
            let moments = if moments.is_empty() {
                ["0:2", "0:1,1:1", ">=1:1"]
                    .iter()
                    .map(|s| s.parse())
                    .collect::<rrtlab::Result<Vec<MomentSpec>>>()?
            } else {
                moments
            };
            let base = ExperimentConfig {
                replicates: 10_000,
                moments,
                ..Default::default()
            };
            experiment(Kind::Moments, &run, base)
        }
        Command::Verify {
            run,
            check,
            tau_eps,
        } => {
            if check == Suite::All && (run.n.is_some() || run.reps.is_some()) {
                bail!("--n and --reps apply to a single suite; pick one with --check");
            }
            let (n, replicates) = match check {
                Suite::All => (ExperimentConfig::default().n, 1),
                s => s.default_size(),
            };
            let base = ExperimentConfig {
                n,
                replicates,
                suite: check,
                tau_eps: tau_eps.unwrap_or(0.5),
                ..Default::default()
            };
            experiment(Kind::Verify, &run, base)
        }
        Command::Exact(args) => exact(&args),
        Command::Replay { input, json } => replay_file(&input, json.as_deref()),
    }
}

fn build_config(kind: Kind, run: &RunArgs, base: ExperimentConfig) -> Result<ExperimentConfig> {
    let mut c = base;
    c.kind = kind;
    if let Some(v) = run.n {
        c.n = v;
    }
    if let Some(v) = run.reps {
        c.replicates = v;
    }
    if let Some(v) = run.seed {
        c.master_seed = v;
    }
    if let Some(v) = run.model {
        c.model = v;
    }
    if let Some(v) = run.imin {
        c.imin = v;
    }
    if let Some(v) = run.imax {
        c.imax = v;
    }
    c.threads = run.threads.or(c.threads);
    c.csv = run.csv.clone();
    c.json = run.json.clone();
    c.record_timing |= run.timing;
    if let Some(path) = &run.config {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let patch: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let Value::Object(patch) = patch else {
            bail!("{}: expected a JSON object", path.display());
        };
        let mut merged = serde_json::to_value(&c)?;
        let obj = merged
            .as_object_mut()
            .expect("config serialises to an object");
        for (k, v) in patch {
            obj.insert(k, v);
        }
        c = serde_json::from_value(merged)
            .with_context(|| format!("invalid config {}", path.display()))?;
        if c.kind != kind {
            bail!(
                "config file sets kind '{}' but the subcommand runs '{kind}'",
                c.kind
            );
        }
    }
    c.validate()?;
    Ok(c)
}

fn experiment(kind: Kind, run: &RunArgs, base: ExperimentConfig) -> Result<bool> {
    let config = build_config(kind, run, base)?;
    let json_to_stdout = config.json.as_deref().is_some_and(is_stdout);
    // CSV goes to stdout for `simulate` unless stdout is reserved for JSON
    let csv_target: Option<PathBuf> = match (&config.csv, kind) {
        (Some(p), _) => Some(p.clone()),
        (None, Kind::Profile) if !json_to_stdout => Some(PathBuf::from("-")),
        _ => None,
    };
    if csv_target.as_deref().is_some_and(is_stdout) && json_to_stdout {
        bail!("--csv - and --json - cannot share standard output");
    }
    let (report, rows) = execute(&config, csv_target.is_some())?;

    if let Some(p) = &csv_target {
        if is_stdout(p) {
            write_csv(io::stdout().lock(), &config, report.eps_n, &rows)?;
        } else {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_csv(f, &config, report.eps_n, &rows)?;
        }
    }
    match &config.json {
        Some(p) if is_stdout(p) => write_json(io::stdout().lock(), &report)?,
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            write_json(f, &report)?;
        }
        None => {}
    }
    if !json_to_stdout && kind != Kind::Profile {
        print!("{}", render(&report));
    }
    Ok(report.passed)
}

/// Plain-text view of a report: header lines, then one line per check.
fn render(r: &SummaryReport) -> String {
    let mut s = if r.config.kind == Kind::Verify {
        r.verify
            .iter()
            .map(|v| {
                format!(
                    "verify {}: n = {}, {} replicates\n",
                    v.suite, v.n, v.replicates
                )
            })
            .collect()
    } else {
        format!(
            "{}: n = {} (eps_n = {}), {} replicates, model {}\n",
            r.config.kind, r.n, r.eps_n, r.replicates, r.config.model
        )
    };
    for c in &r.checks {
        s.push_str(&format!(
            "{} {}: {:.6} (bound {:.6})\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound
        ));
    }
    s
}

fn emit(value: &impl Serialize, json: Option<&Path>) -> Result<()> {
    match json {
        Some(p) if !is_stdout(p) => {
            let mut f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            serde_json::to_writer_pretty(&mut f, value)?;
            writeln!(f)?;
        }
        _ => {
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn exact(args: &ExactArgs) -> Result<bool> {
    let n = args.n;
    let (passed, result) = match args.check {
        ExactCheck::Fibers => {
            let census = phi_fiber_census(n)?;
            let expected: u64 = (1..=n as u64).product();
            let trees: Vec<Value> = census
                .iter()
                .map(|(t, c)| json!({ "tree": t, "fiber": c }))
                .collect();
            let constant = census.values().all(|&c| c == expected);
            (
                constant,
                json!({
                    "sequences": census.values().sum::<u64>(),
                    "trees": trees,
                    "expected_fiber": expected,
                    "constant": constant,
                }),
            )
        }
        ExactCheck::DegreeLaw => {
            let rrt = exact_profile_law(n, Source::Rrt)?;
            let kingman = exact_profile_law(n, Source::Kingman)?;
            let equal = rrt == kingman;
            (
                equal,
                json!({ "rrt": rrt, "kingman": kingman, "equal": equal }),
            )
        }
        ExactCheck::Orthant => {
            let r = orthant_check(n, args.subset_size)?;
            (r.passed(), serde_json::to_value(&r)?)
        }
        ExactCheck::Alternating => {
            let indices: Vec<i64> = match args.i {
                Some(i) => vec![i],
                None => feasible_indices(n).collect(),
            };
            let reports = indices
                .into_iter()
                .map(|i| alternating_bounds(n, i, args.rmax))
                .collect::<rrtlab::Result<Vec<_>>>()?;
            (
                reports.iter().all(|r| r.passed()),
                serde_json::to_value(&reports)?,
            )
        }
        ExactCheck::Decoupling => {
            let r = decoupling_check(n)?;
            (r.passed(), serde_json::to_value(&r)?)
        }
        ExactCheck::Moments => {
            let q = exact_factorial_moments(n, &args.moment)?;
            let eps = rrtlab::stats::epsilon(n as u64)?;
            (
                true,
                json!({
                    "spec": args.moment.to_string(),
                    "value": rational_string(&q),
                    "approx": rational_f64(&q),
                    "limit": args.moment.prediction(eps),
                }),
            )
        }
    };
    let check = format!("{:?}", args.check);
    emit(
        &json!({ "schema": SCHEMA, "check": kebab(&check), "n": n, "passed": passed, "result": result }),
        args.json.as_deref(),
    )?;
    Ok(passed)
}

fn kebab(camel: &str) -> String {
    let mut out = String::new();
    for (j, ch) in camel.chars().enumerate() {
        if ch.is_uppercase() && j > 0 {
            out.push('-');
        }
        out.push(ch.to_ascii_lowercase());
    }
    out
}

fn replay_file(input: &Path, json: Option<&Path>) -> Result<bool> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let events: CoalescentEvents = serde_json::from_str(&text)
        .with_context(|| format!("parsing events in {}", input.display()))?;
    let outcome = replay(&events);
    let records = selection_records(&events);
    emit(
        &json!({
            "schema": SCHEMA,
            "events": events,
            "outcome": outcome,
            "selection_records": records,
        }),
        json,
    )?;
    Ok(true)
}
