//! Experiment driver for the `perclab` command: named acceptance suites and
//! single experiments, writing `curve.csv`, `meta.json` and `fit.json`.

pub mod experiment;
pub mod report;
pub mod suites;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use perclab_core::cluster::{estimate_chi, estimate_theta, fit_decay_stats, ClusterStats};
use perclab_core::depbond::WeightFunction;
use perclab_core::stats::Proportion;
use perclab_core::{Direction, Model, ModelParams};
use thiserror::Error;

use crate::experiment::{
    crossing_curve, rsw_inequality_check, threshold_window, triangular_selfdual_check, Shape,
};
use crate::report::Report;
pub use crate::suites::{run_suite, Budget, SuiteOptions, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] perclab_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Exit status for a completed run with failed checks.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for bad invocations and errors before any check ran.
pub const EXIT_USAGE: i32 = 2;

pub const EXPERIMENTS: [&str; 7] = [
    "curve",
    "threshold",
    "rsw",
    "tri-selfdual",
    "decay",
    "theta",
    "chi",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Bond,
    SiteSq,
    SiteStar,
    Tri,
    Depbond,
    Voronoi,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Bond => Model::Bond,
            ModelArg::SiteSq => Model::SiteSquare,
            ModelArg::SiteStar => Model::SiteStar,
            ModelArg::Tri => Model::SiteTriangular,
            ModelArg::Depbond => Model::DepBond,
            ModelArg::Voronoi => Model::Voronoi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    H,
    V,
}

fn parse_rect(s: &str) -> Result<(i64, i64), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: i64 = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: i64 = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
    if w < 1 || h < 1 {
        return Err("sides must be positive".into());
    }
    Ok((w, h))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let a = a.parse().map_err(|_| format!("bad bound `{a}`"))?;
    let b = b.parse().map_err(|_| format!("bad bound `{b}`"))?;
    Ok((a, b))
}

/// Percolation experiments and acceptance suites.
#[derive(Debug, Clone, Parser)]
#[command(name = "perclab", version)]
pub struct Args {
    /// Suite (duality-exhaustive, selfdual-mc, decay, thresholds, voronoi,
    /// depbond, renorm, bounds, all) or experiment (curve, threshold, rsw,
    /// tri-selfdual, decay, theta, chi). Suite names take precedence.
    pub name: String,
    #[arg(long, value_enum, default_value = "bond")]
    pub model: ModelArg,
    /// Open probability; repeat for a grid.
    #[arg(long = "p")]
    pub p: Vec<f64>,
    /// Site retention probability for Voronoi tilings.
    #[arg(long, default_value_t = 1.0)]
    pub pi: f64,
    /// Weight function for the dependent bond model: JSON list of
    /// `[2a, 2b, w]` triples over the symmetry quotient.
    #[arg(long = "w")]
    pub weight: Option<PathBuf>,
    #[arg(long, value_parser = parse_rect, default_value = "17x16")]
    pub rect: (i64, i64),
    #[arg(long, value_enum, default_value = "h")]
    pub dir: DirArg,
    /// Sample count; for suites it overrides every Monte Carlo budget.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    pub budget: Budget,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Box radius for cluster experiments.
    #[arg(long, default_value_t = 64)]
    pub radius: i64,
    /// Fit range for decay fits.
    #[arg(long, value_parser = parse_range, default_value = "10:100")]
    pub range: (usize, usize),
    /// Small square side, long side and stacking count for `rsw`.
    #[arg(long, num_args = 3, value_names = ["S", "M", "K"], default_values_t = [8, 16, 2])]
    pub rsw: Vec<i64>,
}

impl Args {
    fn params(&self) -> Result<ModelParams, CliError> {
        let p = self.p.first().copied().unwrap_or(0.5);
        let mut params = ModelParams::new(p)?;
        if self.model == ModelArg::Voronoi {
            params = params.with_pi(self.pi)?;
        }
        if self.model == ModelArg::Depbond {
            let w = match &self.weight {
                Some(path) => serde_json::from_str::<WeightFunction>(&fs::read_to_string(path)?)?,
                None => WeightFunction::plus(),
            };
            params = params.with_weight(w);
        }
        Ok(params)
    }

    fn direction(&self) -> Direction {
        match self.dir {
            DirArg::H => Direction::Horizontal,
            DirArg::V => Direction::Vertical,
        }
    }

    fn samples_or(&self, n: u64) -> u64 {
        self.samples.unwrap_or(n)
    }
}

fn model_label(m: ModelArg) -> String {
    m.to_possible_value().expect("named").get_name().to_string()
}

/// Runs one experiment.
pub fn run_experiment(args: &Args) -> Result<Report, CliError> {
    let model: Model = args.model.into();
    let params = args.params()?;
    let seed = args.seed;
    let (w, h) = args.rect;
    let label = model_label(args.model);
    let mut rep = Report::new(&args.name);
    match args.name.as_str() {
        "curve" => {
            let grid = if args.p.is_empty() {
                (0..=50).map(|i| i as f64 / 50.0).collect()
            } else {
                args.p.clone()
            };
            let n = args.samples_or(10_000);
            let shape = Shape::for_model(model, w, h)?;
            let curve = crossing_curve(model, &params, &shape, args.direction(), &grid, n, seed)?;
            for (p, pr) in &curve {
                let e = pr.estimate();
                rep.row(&label, *p, e.value, e.ci_halfwidth, n);
            }
            let mut sorted: Vec<&(f64, Proportion)> = curve.iter().collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let monotone = sorted
                .windows(2)
                .all(|w| w[0].1.successes <= w[1].1.successes);
            rep.check("monotone", monotone, format!("{} points", curve.len()));
        }
        "threshold" => {
            let n = args.samples_or(4_000);
            let shape = Shape::for_model(model, w, h)?;
            let (win, _) = threshold_window(
                model,
                &params,
                &shape,
                w,
                args.eps,
                0.002,
                (n, 16 * n),
                seed,
            )?;
            rep.row(
                &label,
                w as f64,
                win.width,
                2.0 * win.precision,
                win.samples,
            );
            rep.check(
                "located",
                win.on_target,
                format!(
                    "precision {:.4} with {} samples",
                    win.precision, win.samples
                ),
            );
            rep.fit("window", &win);
        }
        "rsw" => {
            let [s, m, k] = args.rsw[..] else {
                return Err(CliError::Usage("--rsw takes S M K".into()));
            };
            let r = rsw_inequality_check(model, &params, (s, m, k), args.samples_or(20_000), seed)?;
            rep.check(
                "extension",
                r.extension.holds,
                format!("{:.4} >= {:.4}", r.extension.lhs, r.extension.rhs),
            );
            rep.check(
                "joined",
                r.joined.holds,
                format!("{:.4} >= {:.4}", r.joined.lhs, r.joined.rhs),
            );
            rep.fit("rsw", &r);
        }
        "tri-selfdual" => {
            let t = triangular_selfdual_check(w, args.samples_or(100_000), seed)?;
            rep.check(
                "sum",
                (t.sum_open - 1.0).abs() <= t.sum_open_ci.max(0.01),
                format!("{:.5}", t.sum_open),
            );
            rep.check(
                "extension",
                t.extensions_hold,
                format!("{:.4?}", t.extensions),
            );
            rep.fit("tri", &t);
        }
        "decay" => {
            let n = args.samples_or(100_000);
            let stats = ClusterStats::collect(model, &params, args.radius, n, seed)?;
            for k in 1..=args.range.1 {
                rep.row(&label, k as f64, stats.tail(k), 0.0, n);
            }
            let fit = fit_decay_stats(&stats, args.range)?;
            rep.check(
                "positive-rate",
                fit.a_hat > 0.0,
                format!("a = {:.5}, r2 = {:.5}", fit.a_hat, fit.r2),
            );
            rep.fit("decay", &fit);
        }
        "theta" | "chi" => {
            let n = args.samples_or(10_000);
            let grid = if args.p.is_empty() {
                vec![params.p]
            } else {
                args.p.clone()
            };
            for &p in &grid {
                let mut at = params.clone();
                at.p = p;
                let e = if args.name == "theta" {
                    estimate_theta(model, &at, args.radius, n, seed)?
                } else {
                    estimate_chi(model, &at, args.radius, n, seed)?.estimate
                };
                rep.row(&label, p, e.value, e.ci_halfwidth, n);
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite or experiment `{other}`"
            )))
        }
    }
    rep.meta("experiment", &args.name);
    rep.meta("model", &label);
    rep.meta("params", &params);
    rep.meta("rect", args.rect);
    rep.meta("seed", seed);
    rep.meta("samples", args.samples);
    Ok(rep)
}

/// Dispatches to a suite or experiment on a pool of `args.workers` threads
/// (the global pool when unset).
pub fn execute(args: &Args) -> Result<Report, CliError> {
    let run = || {
        if suites::is_suite(&args.name) {
            let opts = SuiteOptions {
                budget: args.budget,
                seed: args.seed,
                samples: args.samples,
            };
            run_suite(&args.name, &opts)
        } else if EXPERIMENTS.contains(&args.name.as_str()) {
            run_experiment(args)
        } else {
            Err(CliError::Usage(format!(
                "unknown suite or experiment `{}`",
                args.name
            )))
        }
    };
    match args.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(run),
        None => run(),
    }
}

/// Runs, writes the output files, prints one line per check and returns
/// the exit status.
pub fn main_with(args: &Args) -> i32 {
    let report = match execute(args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("perclab: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = report.write(&args.out) {
        eprintln!("perclab: {e}");
        return EXIT_USAGE;
    }
    for c in &report.checks {
        println!(
            "{} {} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if report.passed() {
        0
    } else {
        EXIT_FAILED
    }
}
