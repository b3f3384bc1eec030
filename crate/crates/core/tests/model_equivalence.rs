//! The three samplers against each other and against the exact law at
//! n = 6, plus run determinism.

use rrtlab::montecarlo::{run, ExperimentConfig, Kind, Suite};

#[test]
fn samplers_agree_with_the_exact_law() {
    let r = run(&ExperimentConfig {
        kind: Kind::Verify,
        suite: Suite::Models,
        n: 6,
        replicates: 100_000,
        master_seed: 5,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(r.checks.len(), 6);
    for c in &r.checks {
        assert!(c.passed, "{c:?}");
    }
}

#[test]
fn identical_configs_give_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (k, threads) in [None, Some(1), Some(2)].into_iter().enumerate() {
        let path = dir.path().join(format!("r{k}.json"));
        run(&ExperimentConfig {
            kind: Kind::Poisson,
            n: 4096,
            replicates: 700,
            master_seed: 42,
            threads,
            json: Some(path.clone()),
            ..Default::default()
        })
        .unwrap();
        texts.push(std::fs::read(path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}
