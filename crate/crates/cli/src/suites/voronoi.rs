//! Voronoi tilings: the weak/strong crossing disjunction and unit-density
//! adjacency.

use perclab_core::voronoi::{build_tiling, weak_open_crossing};
use perclab_core::{Configuration, IRect, ModelParams};
use rayon::prelude::*;

use super::{failures, SuiteOptions};
use crate::experiment::sub_seed;
use crate::report::Report;
use crate::CliError;

const GUARD: i64 = 8;

#[derive(Default)]
struct Tally {
    holds: u64,
    blocked: u64,
    neither: u64,
    incomplete: u64,
}

pub fn run(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("voronoi");
    let side = if opts.full() { 64 } else { 32 };
    let window = IRect::at(0, 0, side, side);
    let combos = [
        (0.3, 0.3),
        (0.3, 0.5),
        (0.3, 0.7),
        (1.0, 0.3),
        (1.0, 0.5),
        (1.0, 0.7),
    ];
    let total = opts.n(10_000, 600);
    let per = total.div_ceil(combos.len() as u64);
    let (mut bad, mut cases, mut incomplete) = (0, 0, 0);
    for (k, &(pi, p)) in combos.iter().enumerate() {
        let params = ModelParams::new(p)?.with_pi(pi)?;
        let seed = sub_seed(opts.seed, k as u64);
        let outcomes: Vec<(bool, bool, bool)> = (0..per)
            .into_par_iter()
            .map(|i| {
                let field =
                    Configuration::sample_voronoi_field(&params, window.grow(GUARD), seed, i);
                let t = build_tiling(&field, window, GUARD)?;
                if !t.is_complete() {
                    return Ok((false, false, false));
                }
                let res = weak_open_crossing(&t, &window)?;
                Ok((true, res.holds, res.blocking_witness.is_some()))
            })
            .collect::<Result<_, perclab_core::Error>>()?;
        let mut t = Tally::default();
        for (complete, holds, blocked) in outcomes {
            match (complete, holds, blocked) {
                (false, ..) => t.incomplete += 1,
                (_, true, _) => t.holds += 1,
                (_, false, true) => t.blocked += 1,
                _ => t.neither += 1,
            }
        }
        let frac = t.holds as f64 / (per - t.incomplete).max(1) as f64;
        rep.row(&format!("weak-open/pi{pi}"), p, frac, 0.0, per);
        bad += t.neither;
        incomplete += t.incomplete;
        cases += per;
        rep.fit(
            &format!("pi{pi}-p{p}"),
            serde_json::json!({
                "weak_open": t.holds,
                "strong_closed_only": t.blocked,
                "neither": t.neither,
                "incomplete": t.incomplete,
            }),
        );
    }
    rep.check(
        "disjunction",
        bad == 0 && incomplete == 0,
        failures(bad + incomplete, cases),
    );
    rep.check(
        "guard",
        incomplete == 0,
        format!("{incomplete} of {cases} tilings not certified with guard {GUARD}"),
    );

    // unit density: every interior cell is a unit square
    let w = IRect::at(0, 0, 16, 16);
    let params = ModelParams::new(0.5)?.with_pi(1.0)?;
    let field = Configuration::sample_voronoi_field(&params, w.grow(GUARD), opts.seed, 0);
    let t = build_tiling(&field, w, GUARD)?;
    let mut wrong = 0;
    let inner = w.grow(-1);
    for z in inner.sites() {
        let i = t.index_of(z).expect("every point is a site");
        wrong += (t.strong_neighbors(i).len() != 4 || t.weak_neighbors(i).len() != 8) as u64;
    }
    rep.check(
        "unit-density-adjacency",
        wrong == 0,
        failures(wrong, inner.num_sites() as u64),
    );
    Ok(rep)
}
