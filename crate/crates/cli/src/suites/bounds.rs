//! Combinatorial bounds: the dual-cycle series, cycle and tree counts,
//! separated sets and shortest crossings.

use num_rational::Ratio;
use perclab_core::crossing::shortest_crossing_length;
use perclab_core::renorm::{
    count_lattice_trees, count_surrounding_cycles, cycle_count_bound, dual_cycle_series,
    exclusion_ball_size, greedy_separated_set, random_lattice_tree, separated_set_bound,
    SeriesResult,
};
use perclab_core::rng::SplitMix;
use perclab_core::{Configuration, IRect, ModelParams};
use rayon::prelude::*;

use super::{failures, SuiteOptions};
use crate::experiment::sub_seed;
use crate::report::Report;
use crate::CliError;

fn series_checks(rep: &mut Report) -> Result<(), CliError> {
    match dual_cycle_series(Ratio::new(995, 1000), 1e-12)? {
        SeriesResult::Converges(enc) => {
            rep.check(
                "series-0.995",
                enc.upper() < 1.0,
                format!("sum in [{:.12}, {:.12}]", enc.value, enc.upper()),
            );
            rep.fit("series-0.995", enc);
        }
        SeriesResult::Divergent => rep.check("series-0.995", false, "reported divergent"),
    }
    // divergent exactly when 81(1 - p0) >= 1
    let probes = [
        Ratio::new(1, 2),
        Ratio::new(9, 10),
        Ratio::new(79, 81),
        Ratio::new(80, 81),
        Ratio::new(80 * 1_000_000 - 1, 81 * 1_000_000),
        Ratio::new(80 * 1_000_000 + 1, 81 * 1_000_000),
        Ratio::new(99, 100),
        Ratio::new(995, 1000),
        Ratio::new(9999, 10000),
    ];
    let mut wrong = Vec::new();
    for p0 in probes {
        let expect =
            Ratio::from_integer(81) * (Ratio::from_integer(1) - p0) >= Ratio::from_integer(1);
        let got = dual_cycle_series(p0, 1e-9)? == SeriesResult::Divergent;
        if got != expect {
            wrong.push(p0.to_string());
        }
    }
    rep.check(
        "series-divergence",
        wrong.is_empty(),
        format!("{} probes, wrong at {wrong:?}", probes.len()),
    );
    Ok(())
}

fn cycle_checks(rep: &mut Report) -> Result<(), CliError> {
    let mut ok = true;
    let mut counts = Vec::new();
    for len in [4u32, 6, 8, 10, 12] {
        let c = count_surrounding_cycles(len)?;
        let b = cycle_count_bound(len)?;
        ok &= c as u128 <= b;
        counts.push((len, c, b));
        rep.row("cycles", len as f64, c as f64, 0.0, 1);
    }
    rep.check(
        "cycle-counts",
        ok,
        format!("(length, count, bound) {counts:?}"),
    );
    rep.fit("cycles", counts);
    Ok(())
}

fn tree_checks(rep: &mut Report, opts: &SuiteOptions) -> Result<(), CliError> {
    let bound = 4.0 * std::f64::consts::E;
    let mut ok = true;
    let mut counts = Vec::new();
    for n in 1..=8usize {
        let c = count_lattice_trees(n)?;
        ok &= (c as f64) <= bound.powi(n as i32);
        counts.push(c);
        rep.row("trees", n as f64, c as f64, 0.0, 1);
    }
    rep.check("tree-counts", ok, format!("{counts:?}"));

    let trees = opts.n(1_000, 100);
    let seed = sub_seed(opts.seed, 1);
    let bad: u64 = (0..trees)
        .into_par_iter()
        .map(|i| {
            let t = random_lattice_tree(50, &mut SplitMix::new(sub_seed(seed, i)));
            [2i64, 3, 9]
                .iter()
                .map(|&k| {
                    let s = greedy_separated_set(&t, k);
                    let spread = s
                        .iter()
                        .enumerate()
                        .all(|(j, a)| s[j + 1..].iter().all(|b| a.l1(*b) >= k));
                    (!(spread && s.len() >= separated_set_bound(t.len(), k))) as u64
                })
                .sum::<u64>()
        })
        .collect::<Vec<u64>>()
        .iter()
        .sum();
    rep.check("separated-sets", bad == 0, failures(bad, trees * 3));

    let ball: Vec<(i64, usize)> = (1..=9).map(|k| (k, exclusion_ball_size(k))).collect();
    let ok = ball.iter().all(|&(k, s)| s as i64 == 2 * k * k - 2 * k);
    rep.check("exclusion-ball", ok, format!("{ball:?}"));
    Ok(())
}

fn shortest_crossing_checks(rep: &mut Report, opts: &SuiteOptions) -> Result<(), CliError> {
    let n = opts.n(100_000, 10_000);
    let seed = sub_seed(opts.seed, 2);
    let bad: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitMix::new(sub_seed(seed, i));
            let m = 1 + rng.below(12) as i64;
            let h = 1 + rng.below(12) as i64;
            let p = 0.4 + 0.6 * rng.next_f64();
            let r = IRect::at(0, 0, m, h);
            let config = Configuration::sample_bond(&ModelParams::new(p)?, r, seed, i);
            let len = shortest_crossing_length(&config, &r.to_rect())?;
            Ok(len.is_some_and(|l| l as i64 > (m + 1) * (h + 1)))
        })
        .collect::<Result<_, perclab_core::Error>>()?;
    let bad = bad.iter().filter(|&&b| b).count() as u64;
    rep.check("shortest-crossing", bad == 0, failures(bad, n));
    Ok(())
}

pub fn run(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("bounds");
    series_checks(&mut rep)?;
    cycle_checks(&mut rep)?;
    tree_checks(&mut rep, opts)?;
    shortest_crossing_checks(&mut rep, opts)?;
    Ok(rep)
}
