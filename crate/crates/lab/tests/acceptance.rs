//! Runs `all` on the shipped configuration twice and checks each acceptance
//! criterion against the recorded gates.

use dunkl_lab::{run, ExperimentConfig, RunOutcome, Suite};
use std::collections::BTreeMap;
use std::path::Path;

/// Criteria whose gates are reported but not required to pass.
/// Criterion 7: the covering number of a 40-function sample keeps growing at 60.
const UNATTAINED: &[usize] = &[7];

fn gates<'a>(out: &'a RunOutcome, suite: Suite, pick: impl Fn(&str) -> bool) -> Vec<(&'a str, bool)> {
    let report = out.report(suite).unwrap_or_else(|| panic!("{} report missing", suite.name()));
    report.gates.iter().filter(|g| pick(&g.name)).map(|g| (g.name.as_str(), g.passed)).collect()
}

fn csvs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

const SHARP: [&str; 4] = ["partition_identity", "sharp_ratio", "sharp_samples", "sharp_runtime_s"];

fn is_sharp(name: &str) -> bool {
    SHARP.iter().any(|s| name.ends_with(s))
}

fn main() {
    let cfg = ExperimentConfig::shipped();
    let first_dir = tempfile::tempdir().unwrap();
    let second_dir = tempfile::tempdir().unwrap();
    let first = run(&cfg, Suite::All, first_dir.path(), 0).unwrap();
    let second = run(&cfg, Suite::All, second_dir.path(), 2).unwrap();

    let all = |_: &str| true;
    let mut criteria: Vec<(usize, &str, Vec<(&str, bool)>)> = vec![
        (1, "geometry suite", gates(&first, Suite::ValidateGeometry, all)),
        (2, "measure suite", gates(&first, Suite::ValidateMeasure, all)),
        (3, "spectral suite", gates(&first, Suite::ValidateSpectral, all)),
        (4, "kernel suite", gates(&first, Suite::VerifyKernel, all)),
        (5, "commutator norm harness", gates(&first, Suite::CommutatorNorm, |n| !is_sharp(n))),
        (6, "tail decay and envelopes", gates(&first, Suite::TailDecay, all)),
        (7, "compactness probes", gates(&first, Suite::Compactness, all)),
        (8, "sharp maximal diagnostic", gates(&first, Suite::CommutatorNorm, is_sharp)),
    ];
    let (a, b) = (csvs(first_dir.path()), csvs(second_dir.path()));
    let identical = !a.is_empty() && a == b;
    let outcomes = |o: &RunOutcome| o.reports.iter().flat_map(|r| r.gates.iter().map(|g| (g.name.clone(), g.passed))).collect::<Vec<_>>();
    let same_gates = outcomes(&first) == outcomes(&second);
    criteria.push((9, "determinism", vec![("byte-identical CSVs", identical), ("same gate outcomes", same_gates)]));

    let mut unexpected = Vec::new();
    for (id, label, gs) in &criteria {
        assert!(!gs.is_empty(), "criterion {id} has no gates");
        let failed: Vec<&str> = gs.iter().filter(|g| !g.1).map(|g| g.0).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {id} {verdict}: {label} ({} gates)", gs.len());
        for name in &failed {
            println!("    failed gate: {name}");
        }
        if !failed.is_empty() {
            let tolerated = UNATTAINED.contains(id) && failed == ["covering_flattens"];
            if !tolerated {
                unexpected.push(format!("criterion {id}: {}", failed.join(", ")));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance failed: {unexpected:?}");
        std::process::exit(1);
    }
}
