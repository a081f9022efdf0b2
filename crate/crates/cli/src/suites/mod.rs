//! Named acceptance suites. Each returns a [`Report`] whose checks decide
//! the exit status.

mod bounds;
mod depbond;
mod duality;
mod montecarlo;
mod renorm;
mod voronoi;

use clap::ValueEnum;
use serde::Serialize;

use crate::report::Report;
use crate::CliError;

/// Sample budget of a suite run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Full,
    Quick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteOptions {
    pub budget: Budget,
    pub seed: u64,
    /// Overrides every Monte Carlo sample count when set.
    pub samples: Option<u64>,
}

impl SuiteOptions {
    pub fn new(budget: Budget, seed: u64) -> Self {
        SuiteOptions {
            budget,
            seed,
            samples: None,
        }
    }

    /// Sample count for the current budget.
    pub(crate) fn n(&self, full: u64, quick: u64) -> u64 {
        self.samples.unwrap_or(match self.budget {
            Budget::Full => full,
            Budget::Quick => quick,
        })
    }

    pub(crate) fn full(&self) -> bool {
        self.budget == Budget::Full
    }
}

pub const SUITES: [&str; 8] = [
    "duality-exhaustive",
    "selfdual-mc",
    "decay",
    "thresholds",
    "voronoi",
    "depbond",
    "renorm",
    "bounds",
];

pub fn is_suite(name: &str) -> bool {
    name == "all" || SUITES.contains(&name)
}

/// Runs one suite, or all of them in order for `"all"`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut report = match name {
        "duality-exhaustive" => duality::run(opts)?,
        "selfdual-mc" => montecarlo::selfdual(opts)?,
        "decay" => montecarlo::decay(opts)?,
        "thresholds" => montecarlo::thresholds(opts)?,
        "voronoi" => voronoi::run(opts)?,
        "depbond" => depbond::run(opts)?,
        "renorm" => renorm::run(opts)?,
        "bounds" => bounds::run(opts)?,
        "all" => {
            let mut all = Report::new("all");
            for s in SUITES {
                all.absorb(run_suite(s, opts)?);
            }
            all
        }
        other => return Err(CliError::Usage(format!("unknown suite `{other}`"))),
    };
    report.meta("suite", name);
    report.meta("seed", opts.seed);
    report.meta("budget", opts.budget);
    report.meta("samples", opts.samples);
    Ok(report)
}

/// `"x/y"` failure count detail.
pub(crate) fn failures(bad: u64, total: u64) -> String {
    format!("{bad} failures over {total} cases")
}
