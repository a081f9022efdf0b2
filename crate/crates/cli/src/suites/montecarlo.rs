//! Monte Carlo suites: self-dual crossing values, cluster decay and
//! threshold windows.

use perclab_core::cluster::{estimate_chi, estimate_theta, fit_decay_stats, ClusterStats};
use perclab_core::crossing::bond_crossing;
use perclab_core::depbond::WeightFunction;
use perclab_core::sample::BondField;
use perclab_core::stats::Proportion;
use perclab_core::{Direction, IRect, Model, ModelParams};
use rayon::prelude::*;

use super::SuiteOptions;
use crate::experiment::{
    crossing_curve, crossing_probability, curve_from_critical, rsw_inequality_check, sub_seed,
    threshold_window, triangular_selfdual_check, Shape,
};
use crate::report::Report;
use crate::CliError;

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + i as f64 * step).collect()
}

pub fn selfdual(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("selfdual-mc");
    let seed = opts.seed;
    let half = ModelParams::new(0.5)?;
    let dep = half.clone().with_weight(WeightFunction::plus());

    // square-like rectangles whose crossing probability is exactly 1/2
    let n_mc = opts.n(100_000, 10_000);
    let tol = 0.006 * (1e5 / n_mc as f64).sqrt();
    for (label, model, params) in [
        ("bond", Model::Bond, &half),
        ("depbond", Model::DepBond, &dep),
    ] {
        for n in [8i64, 16, 32] {
            let shape = Shape::Square(IRect::new(0, 0, n + 1, n)?);
            let pr = crossing_probability(
                model,
                params,
                &shape,
                Direction::Horizontal,
                n_mc,
                sub_seed(seed, n as u64),
            )?;
            let e = pr.estimate();
            rep.row(
                &format!("half/{label}"),
                n as f64,
                e.value,
                e.ci_halfwidth,
                n_mc,
            );
            rep.check(
                &format!("{label}-n{n}"),
                (e.value - 0.5).abs() <= tol,
                format!("{:.5} vs 0.5 +- {tol:.5}", e.value),
            );
        }
    }

    let n_curve = opts.n(20_000, 2_000);
    let curve = crossing_curve(
        Model::Bond,
        &half,
        &Shape::Square(IRect::new(0, 0, 17, 16)?),
        Direction::Horizontal,
        &grid(0.3, 0.7, 0.01),
        n_curve,
        sub_seed(seed, 100),
    )?;
    for (p, pr) in &curve {
        let e = pr.estimate();
        rep.row("curve/bond-n16", *p, e.value, e.ci_halfwidth, n_curve);
    }
    let monotone = curve
        .windows(2)
        .all(|w| w[0].1.successes <= w[1].1.successes);
    rep.check(
        "curve-monotone",
        monotone,
        format!("{} grid points", curve.len()),
    );

    // long rectangles keep a crossing probability bounded below
    let n_long = opts.n(10_000, 2_000);
    let mut long = Vec::new();
    for n in [16i64, 32, 64] {
        let shape = Shape::Square(IRect::new(0, 0, 2 * n, n)?);
        let e = crossing_probability(
            Model::Bond,
            &half,
            &shape,
            Direction::Horizontal,
            n_long,
            sub_seed(seed, 200 + n as u64),
        )?
        .estimate();
        rep.row(
            "long/bond-ratio2",
            n as f64,
            e.value,
            e.ci_halfwidth,
            n_long,
        );
        long.push(e.value);
    }
    rep.check(
        "long-rectangles",
        long.iter().all(|&v| v > 0.05),
        format!("{long:.4?} all above 0.05"),
    );

    let n_rsw = opts.n(20_000, 2_000);
    let rsw = rsw_inequality_check(Model::Bond, &half, (8, 16, 2), n_rsw, sub_seed(seed, 300))?;
    rep.check(
        "rsw-extension",
        rsw.extension.holds,
        format!("h = {:.4} >= {:.4}", rsw.extension.lhs, rsw.extension.rhs),
    );
    rep.check(
        "joined-crossing",
        rsw.joined.holds,
        format!(
            "max Pr(X_i) = {:.4} >= {:.4}",
            rsw.joined.lhs, rsw.joined.rhs
        ),
    );
    rep.fit("rsw", &rsw);

    // positive correlation of two increasing events
    let n_h = opts.n(100_000, 10_000);
    let (ra, rb) = (IRect::new(0, 0, 12, 8)?, IRect::new(3, -2, 9, 10)?);
    let hs = sub_seed(seed, 400);
    let pairs: Vec<(bool, bool)> = (0..n_h)
        .into_par_iter()
        .map(|i| {
            let f = BondField {
                seed: hs,
                index: i,
                p: 0.5,
            };
            (
                bond_crossing(&f, &ra, Direction::Horizontal).is_some(),
                bond_crossing(&f, &rb, Direction::Vertical).is_some(),
            )
        })
        .collect();
    let count = |f: fn(&(bool, bool)) -> bool| {
        Proportion::new(pairs.iter().filter(|t| f(t)).count() as u64, n_h)
    };
    let (pa, pb, pab) = (count(|t| t.0), count(|t| t.1), count(|t| t.0 && t.1));
    let gap = pab.value() - pa.value() * pb.value();
    rep.check(
        "harris",
        gap >= -4.0 * pab.sigma(),
        format!("Pr(AB) - Pr(A)Pr(B) = {gap:.5}"),
    );

    let n_tri = opts.n(100_000, 10_000);
    let tol_tri = 0.01 * (1e5 / n_tri as f64).sqrt();
    for n in [8i64, 16] {
        let t = triangular_selfdual_check(n, n_tri, sub_seed(seed, 500 + n as u64))?;
        rep.check(
            &format!("tri-n{n}"),
            (t.sum_closed - 1.0).abs() <= 1e-12 && (t.sum_open - 1.0).abs() <= tol_tri,
            format!(
                "L + S(closed) = {:.5}, L + S(open, independent) = {:.5} +- {tol_tri:.4}",
                t.sum_closed, t.sum_open
            ),
        );
        rep.check(
            &format!("tri-extension-n{n}"),
            t.extensions_hold,
            format!("{:.4?}", t.extensions),
        );
        rep.fit(&format!("tri-n{n}"), &t);
    }
    Ok(rep)
}

pub fn decay(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("decay");
    let seed = sub_seed(opts.seed, 1);
    let radius = if opts.full() { 256 } else { 64 };
    let n = opts.n(100_000, 10_000);
    let range = (10, 100);
    let mut rates = Vec::new();
    for p in [0.4, 0.3, 0.45] {
        let stats = ClusterStats::collect(Model::Bond, &ModelParams::new(p)?, radius, n, seed)?;
        if p == 0.4 {
            for k in 1..=range.1 {
                let c: u64 = stats.size_histogram.range(k..).map(|(_, v)| v).sum();
                let e = Proportion::new(c, n).estimate();
                rep.row("tail/bond-p0.4", k as f64, e.value, e.ci_halfwidth, n);
            }
        }
        let fit = fit_decay_stats(&stats, range)?;
        if p == 0.4 {
            rep.check(
                "decay-p0.4",
                fit.a_hat > 0.0 && fit.r2 > 0.98,
                format!("a = {:.5}, r2 = {:.5}", fit.a_hat, fit.r2),
            );
        }
        rates.push(fit.a_hat);
        rep.fit(&format!("bond-p{p}"), &fit);
    }
    rep.check(
        "decay-ordering",
        rates[1] > rates[2],
        format!("a(0.3) = {:.5} > a(0.45) = {:.5}", rates[1], rates[2]),
    );

    let n_theta = opts.n(4_000, 500);
    let p6 = ModelParams::new(0.6)?;
    let mut thetas = Vec::new();
    for r in [32i64, 64, 128] {
        let e = estimate_theta(Model::Bond, &p6, r, n_theta, sub_seed(opts.seed, 2))?;
        rep.row(
            "theta/bond-p0.6",
            r as f64,
            e.value,
            e.ci_halfwidth,
            n_theta,
        );
        thetas.push(e.value);
    }
    rep.check(
        "theta-radius",
        thetas.windows(2).all(|w| w[1] <= w[0]) && thetas[2] > 0.2,
        format!("{thetas:.4?}"),
    );

    let mut chis = Vec::new();
    for p in [0.1, 0.2, 0.3, 0.4, 0.45] {
        let c = estimate_chi(
            Model::Bond,
            &ModelParams::new(p)?,
            64,
            n_theta,
            sub_seed(opts.seed, 3),
        )?;
        rep.row(
            "chi/bond-r64",
            p,
            c.estimate.value,
            c.estimate.ci_halfwidth,
            n_theta,
        );
        chis.push(c.estimate.value);
    }
    rep.check(
        "chi-increasing",
        chis.windows(2).all(|w| w[0] <= w[1]),
        format!("{chis:.3?}"),
    );
    Ok(rep)
}

pub fn thresholds(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("thresholds");
    let half = ModelParams::new(0.5)?;
    let (sizes, budget): (&[i64], (u64, u64)) = if opts.full() {
        (&[16, 32, 64, 128], (4_000, 128_000))
    } else {
        (&[8, 16, 32], (2_000, 64_000))
    };
    let budget = opts.samples.map_or(budget, |s| (s, s));
    let target = 0.002;
    let plot = grid(0.3, 0.7, 0.005);
    let mut widths = Vec::new();
    for &n in sizes {
        let shape = Shape::Square(IRect::new(0, 0, n, n)?);
        let (w, sorted) = threshold_window(
            Model::Bond,
            &half,
            &shape,
            n,
            0.1,
            target,
            budget,
            sub_seed(opts.seed, n as u64),
        )?;
        for (p, pr) in curve_from_critical(&sorted, &plot) {
            let e = pr.estimate();
            rep.row(
                &format!("curve/bond-n{n}"),
                p,
                e.value,
                e.ci_halfwidth,
                w.samples,
            );
        }
        rep.row(
            "width/bond",
            n as f64,
            w.width,
            2.0 * w.precision,
            w.samples,
        );
        rep.check(
            &format!("located-n{n}"),
            w.on_target,
            format!("precision {:.4} with {} samples", w.precision, w.samples),
        );
        rep.fit(&format!("window-n{n}"), &w);
        widths.push(w);
    }
    for pair in widths.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        rep.check(
            &format!("shrink-n{}", a.n),
            b.width < a.width,
            format!(
                "width({}) = {:.4} < width({}) = {:.4}",
                b.n, b.width, a.n, a.width
            ),
        );
    }

    let n = if opts.full() { 64 } else { 32 };
    let budget = opts.samples.map_or(
        if opts.full() {
            (4_000, 32_000)
        } else {
            (1_000, 4_000)
        },
        |s| (s, s),
    );
    let mut medians = Vec::new();
    for model in [Model::SiteSquare, Model::SiteStar] {
        let shape = Shape::Square(IRect::new(0, 0, n, n)?);
        let (w, _) = threshold_window(
            model,
            &half,
            &shape,
            n,
            0.5,
            target,
            budget,
            sub_seed(opts.seed, 1000 + model.tag() as u64),
        )?;
        rep.fit(&format!("median-{model:?}"), &w);
        medians.push(w.lower.value);
    }
    let sum = medians[0] + medians[1];
    rep.check(
        "site-median-sum",
        (sum - 1.0).abs() < 0.02,
        format!("{:.4} + {:.4} = {sum:.4}", medians[0], medians[1]),
    );
    Ok(rep)
}
