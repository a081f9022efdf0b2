//! Acceptance run: every criterion at its stated budget, one PASS/FAIL line
//! each. Set `PERCLAB_ACCEPTANCE_BUDGET=quick` for a fast smoke run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use perclab_cli::report::{Check, Report};
use perclab_cli::{execute, Args, Budget, SuiteOptions};

struct Criterion {
    name: &'static str,
    suite: &'static str,
    /// Check-name prefixes that must all pass (and match at least one check).
    checks: &'static [&'static str],
}

const CRITERIA: [Criterion; 15] = [
    Criterion {
        name: "exhaustive site duality",
        suite: "duality-exhaustive",
        checks: &["site-walk", "tri-walk"],
    },
    Criterion {
        name: "exhaustive bond duality",
        suite: "duality-exhaustive",
        checks: &["bond-dual"],
    },
    Criterion {
        name: "self-dual crossing value",
        suite: "selfdual-mc",
        checks: &[
            "bond-n8",
            "bond-n16",
            "bond-n32",
            "depbond-n8",
            "depbond-n16",
            "depbond-n32",
        ],
    },
    Criterion {
        name: "dependent model reduction",
        suite: "depbond",
        checks: &["delta-reduction"],
    },
    Criterion {
        name: "parity of weighted sums",
        suite: "depbond",
        checks: &["parity"],
    },
    Criterion {
        name: "exponential decay",
        suite: "decay",
        checks: &["decay-p0.4", "decay-ordering"],
    },
    Criterion {
        name: "series certificate",
        suite: "bounds",
        checks: &["series-0.995", "series-divergence"],
    },
    Criterion {
        name: "cycle-count bound",
        suite: "bounds",
        checks: &["cycle-counts"],
    },
    Criterion {
        name: "tree bound",
        suite: "bounds",
        checks: &["tree-counts", "separated-sets", "exclusion-ball"],
    },
    Criterion {
        name: "triangular self-duality",
        suite: "selfdual-mc",
        checks: &["tri-n", "tri-extension-n"],
    },
    Criterion {
        name: "voronoi disjunction",
        suite: "voronoi",
        checks: &["disjunction", "unit-density-adjacency"],
    },
    Criterion {
        name: "renormalization locality",
        suite: "renorm",
        checks: &["escape-locality", "bridge-lifting"],
    },
    Criterion {
        name: "threshold-window shrinkage",
        suite: "thresholds",
        checks: &["shrink-n", "located-n"],
    },
    Criterion {
        name: "site-threshold duality",
        suite: "thresholds",
        checks: &["site-median-sum"],
    },
    Criterion {
        name: "shortest-crossing bound",
        suite: "bounds",
        checks: &["shortest-crossing"],
    },
];

const SEED: u64 = 20_240_601;

fn line(i: usize, pass: bool, name: &str, detail: &str) {
    println!(
        "[{i:>2}/16] {} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn evaluate(c: &Criterion, checks: &[Check]) -> (bool, String) {
    let hit: Vec<&Check> = checks
        .iter()
        .filter(|k| c.checks.iter().any(|p| k.name.starts_with(p)))
        .collect();
    let pass = !hit.is_empty()
        && c.checks
            .iter()
            .all(|p| hit.iter().any(|k| k.name.starts_with(p)))
        && hit.iter().all(|k| k.pass);
    let detail = hit
        .iter()
        .map(|k| {
            format!(
                "{} {}{}",
                k.name,
                if k.pass { "" } else { "FAILED " },
                k.detail
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    (pass, detail)
}

fn args(name: &str, budget: &str, workers: usize, out: &Path) -> Args {
    let out = out.to_string_lossy().into_owned();
    let seed = SEED.to_string();
    let workers = workers.to_string();
    Args::parse_from([
        "perclab",
        name,
        "--budget",
        budget,
        "--seed",
        &seed,
        "--workers",
        &workers,
        "--out",
        &out,
    ])
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    ["curve.csv", "meta.json", "fit.json"]
        .iter()
        .map(|f| (f.to_string(), fs::read(dir.join(f)).unwrap_or_default()))
        .collect()
}

/// Whole-suite rerun on 1 and 8 workers must write identical files.
fn determinism(tmp: &Path) -> (bool, String) {
    let mut outputs = Vec::new();
    for workers in [1, 8] {
        let dir = tmp.join(format!("workers{workers}"));
        let report =
            execute(&args("all", "quick", workers, &dir)).and_then(|r| r.write(&dir).map(|_| r));
        if let Err(e) = report {
            return (false, format!("run on {workers} workers failed: {e}"));
        }
        outputs.push(read_outputs(&dir));
    }
    let differing: Vec<&str> = outputs[0]
        .iter()
        .zip(&outputs[1])
        .filter(|(a, b)| a.1 != b.1 || a.1.is_empty())
        .map(|(a, _)| a.0.as_str())
        .collect();
    let bytes: usize = outputs[0].iter().map(|o| o.1.len()).sum();
    if differing.is_empty() {
        (
            true,
            format!("all suites, quick budget: {bytes} bytes identical across 1 and 8 workers"),
        )
    } else {
        (false, format!("differing files: {differing:?}"))
    }
}

fn main() -> ExitCode {
    let budget = match std::env::var("PERCLAB_ACCEPTANCE_BUDGET").as_deref() {
        Ok("quick") => Budget::Quick,
        _ => Budget::Full,
    };
    let opts = SuiteOptions::new(budget, SEED);
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut reports: BTreeMap<&str, Report> = BTreeMap::new();
    let mut all_pass = true;
    let started = Instant::now();
    for (i, c) in CRITERIA.iter().enumerate() {
        if !reports.contains_key(c.suite) {
            let t = Instant::now();
            match perclab_cli::run_suite(c.suite, &opts) {
                Ok(r) => {
                    eprintln!(
                        "suite {} finished in {:.1}s",
                        c.suite,
                        t.elapsed().as_secs_f64()
                    );
                    reports.insert(c.suite, r);
                }
                Err(e) => {
                    line(
                        i + 1,
                        false,
                        c.name,
                        &format!("suite {} errored: {e}", c.suite),
                    );
                    all_pass = false;
                    continue;
                }
            }
        }
        let (pass, detail) = evaluate(c, &reports[c.suite].checks);
        all_pass &= pass;
        line(i + 1, pass, c.name, &detail);
    }
    let t = Instant::now();
    let (pass, detail) = determinism(tmp.path());
    eprintln!(
        "determinism reruns finished in {:.1}s",
        t.elapsed().as_secs_f64()
    );
    all_pass &= pass;
    line(16, pass, "determinism", &detail);

    let extra: Vec<&Check> = reports
        .values()
        .flat_map(|r| r.checks.iter())
        .filter(|k| {
            !CRITERIA
                .iter()
                .any(|c| c.checks.iter().any(|p| k.name.starts_with(p)))
        })
        .collect();
    for k in &extra {
        println!(
            "        {} {}: {}",
            if k.pass { "pass" } else { "fail" },
            k.name,
            k.detail
        );
    }
    println!(
        "total {:.1}s, budget {:?}",
        started.elapsed().as_secs_f64(),
        budget
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
