//! Dependent bond model: reduction to independent bonds and the parity of
//! the weighted sign sum.

use perclab_core::depbond::{derive_config, edge_sum, sign_window, SignField, WeightFunction};
use perclab_core::rng::SplitMix;
use perclab_core::{Configuration, Dir, EdgeId, IRect, Model, Site};
use rayon::prelude::*;

use super::{failures, SuiteOptions};
use crate::experiment::sub_seed;
use crate::report::Report;
use crate::CliError;

/// Random symmetric weight function: odd at the centre, even elsewhere,
/// support radius up to 3 in doubled units.
fn random_weight(rng: &mut SplitMix) -> WeightFunction {
    let mut entries = vec![(0, 0, 2 * rng.below(4) as i64 + 1)];
    for a2 in 0..=3i64 {
        for b2 in 0..=a2 {
            if (a2, b2) != (0, 0) && rng.below(2) == 1 {
                entries.push((a2, b2, 2 * rng.below(5) as i64));
            }
        }
    }
    WeightFunction::from_quotient(&entries).expect("valid by construction")
}

pub fn run(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("depbond");
    let window = IRect::at(0, 0, 16, 16);
    let delta = WeightFunction::delta();
    let n = opts.n(1_000, 100);
    let seed = sub_seed(opts.seed, 1);
    let mismatched: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = (i % 9 + 1) as f64 / 10.0;
            let field = SignField::sample(p, sign_window(&delta, window), seed, i);
            let derived = derive_config(&delta, &field, window, seed, i)?;
            let direct = Configuration::from_edges(Model::DepBond, window, seed, i, |e| {
                let (mx, my) = e.midpoint2();
                field.value(mx, my).expect("covered") == 1
            });
            Ok((derived.words() != direct.words()) as u64)
        })
        .collect::<Result<Vec<u64>, perclab_core::Error>>()?
        .iter()
        .sum();
    rep.check("delta-reduction", mismatched == 0, failures(mismatched, n));

    // parity of the weighted sum over random weights, fields and edges
    let batches = opts.n(1_000, 100);
    let per_batch = 1_000u64;
    let seed = sub_seed(opts.seed, 2);
    let (even, zero): (u64, u64) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = SplitMix::new(sub_seed(seed, b));
            let w = random_weight(&mut rng);
            let win = IRect::at(-8, -8, 16, 16);
            let w2 = sign_window(&w, win);
            let signs: Vec<i8> = w2
                .sites()
                .map(|_| if rng.below(2) == 0 { 1 } else { -1 })
                .collect();
            let field = SignField::from_fn(w2, |a2, b2| signs[w2.index(Site::new(a2, b2))]);
            let (mut even, mut zero) = (0, 0);
            for _ in 0..per_batch {
                let x = rng.below(16) as i64 - 8;
                let y = rng.below(16) as i64 - 8;
                let d = if rng.below(2) == 0 { Dir::E } else { Dir::N };
                let e = EdgeId::primal(x, y, d);
                let (mx, my) = e.midpoint2();
                let s: i64 = w
                    .support()
                    .iter()
                    .map(|&(a2, b2, wt)| {
                        wt * field.value(mx + a2, my + b2).expect("covered") as i64
                    })
                    .sum();
                even += (s % 2 == 0) as u64;
                zero += (s == 0) as u64;
                debug_assert_eq!(edge_sum(&w, &field, e), Ok(s));
            }
            (even, zero)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    rep.check(
        "parity",
        even == 0 && zero == 0,
        format!(
            "{even} even and {zero} zero sums over {} evaluations",
            batches * per_batch
        ),
    );
    Ok(rep)
}
