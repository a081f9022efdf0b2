//! Coarse processes: locality of the escape process, path lifting for the
//! bridge process, and decay of coarse clusters.

use std::collections::{HashMap, VecDeque};

use perclab_core::cluster::{fit_decay_stats, ClusterStats};
use perclab_core::renorm::{
    bridge_dependence, bridge_rect, end_squares, escape_event, escape_region, regions_overlap,
    renorm_b, renorm_g,
};
use perclab_core::rng::SplitMix;
use perclab_core::sample::{BondField, EdgeStates, SiteStates};
use perclab_core::{Configuration, Dir, EdgeId, IRect, ModelParams, Site};
use rayon::prelude::*;

use super::{failures, SuiteOptions};
use crate::experiment::sub_seed;
use crate::report::Report;
use crate::CliError;

const STEPS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Flips a random edge outside the escape region of a random block and
/// reports whether the block's state survived.
fn locality_trial(seed: u64, i: u64) -> Result<bool, perclab_core::Error> {
    let s = 3;
    let fine_w = IRect::centered(15);
    let p = [0.3, 0.5, 0.7][(i % 3) as usize];
    let fine = Configuration::sample_bond(&ModelParams::new(p)?, fine_w, seed, i);
    let coarse = renorm_b(&fine, s)?;
    let mut rng = SplitMix::new(sub_seed(seed, i));
    let sites: Vec<Site> = coarse.window.sites().collect();
    let v = sites[rng.below(sites.len() as u64) as usize];
    let q = escape_region(s, v);
    let outside: Vec<EdgeId> = fine_w
        .edges()
        .into_iter()
        .filter(|&e| !q.contains_edge(e))
        .collect();
    let e = outside[rng.below(outside.len() as u64) as usize];
    let flipped = fine.with_edge(e, !fine.edge_open(e));
    let before = escape_event(&fine, s, v);
    Ok(before == escape_event(&flipped, s, v) && coarse.site_open(v) == before)
}

/// Fine vertices joined by open edges to `from`.
fn fine_component(fine: &Configuration, from: &IRect) -> Vec<bool> {
    let w = fine.window();
    let mut seen = vec![false; w.num_sites()];
    let mut queue: VecDeque<Site> = from.sites().collect();
    for s in from.sites() {
        seen[w.index(s)] = true;
    }
    while let Some(u) = queue.pop_front() {
        for (dx, dy) in STEPS {
            let v = u.offset(dx, dy);
            if w.contains(v)
                && !seen[w.index(v)]
                && fine.edge_open(EdgeId::between(u, v).expect("adjacent"))
            {
                seen[w.index(v)] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Every open coarse edge in the coarse cluster of an open edge has its
/// bridge rectangle reached by a fine open path from that edge's start
/// square.
fn bridge_trial(seed: u64, i: u64) -> Result<bool, perclab_core::Error> {
    let n = 2;
    let fine =
        Configuration::sample_bond(&ModelParams::new(0.7)?, IRect::at(0, 0, 48, 48), seed, i);
    let c = renorm_g(&fine, n)?;
    let Some(e0) = c.window.edges().into_iter().find(|&e| c.edge_open(e)) else {
        return Ok(true);
    };
    let mut seen = vec![false; c.window.num_sites()];
    seen[c.window.index(e0.origin)] = true;
    let mut queue = VecDeque::from([e0.origin]);
    let start = fine_component(&fine, &end_squares(n, e0)[0]);
    let fw = fine.window();
    while let Some(u) = queue.pop_front() {
        for d in [Dir::E, Dir::N] {
            let e = EdgeId::primal(u.x, u.y, d);
            if c.window.contains_edge(e)
                && c.edge_open(e)
                && !bridge_rect(n, e).sites().any(|s| start[fw.index(s)])
            {
                return Ok(false);
            }
        }
        for (dx, dy) in STEPS {
            let v = u.offset(dx, dy);
            if c.window.contains(v)
                && !seen[c.window.index(v)]
                && c.edge_open(EdgeId::between(u, v).expect("adjacent"))
            {
                seen[c.window.index(v)] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(true)
}

/// Bridge edges at graph distance at least the declared range never share
/// a fine cell.
fn dependence_structure() -> (bool, String) {
    let mut ok = true;
    let mut ks = Vec::new();
    for bond in [true, false] {
        let k = bridge_dependence(bond);
        ks.push(k);
        let edges = IRect::at(-8, -8, 16, 16).edges();
        let e0 = EdgeId::primal(0, 0, Dir::E);
        let f0 = EdgeId::primal(0, 0, Dir::N);
        for base in [e0, f0] {
            for &f in &edges {
                let (a, b) = base.endpoints();
                let (c, d) = f.endpoints();
                let dist = [(a, c), (a, d), (b, c), (b, d)]
                    .iter()
                    .map(|(u, v)| u.l1(*v))
                    .min()
                    .unwrap();
                let (rb, rf) = (bridge_rect(1, base), bridge_rect(1, f));
                if dist >= k && regions_overlap(bond, &rb, &rf) {
                    ok = false;
                }
                // disjoint rectangles never share a cell
                if !rb.intersects(&rf) && regions_overlap(bond, &rb, &rf) {
                    ok = false;
                }
            }
        }
    }
    (ok, format!("bond k = {}, site k = {}", ks[0], ks[1]))
}

/// Size of the coarse escape cluster of the origin, evaluated lazily on
/// the fine field, and whether it reached the coarse radius.
fn coarse_cluster(fine: &BondField, s: i64, radius: i64) -> (usize, bool) {
    let mut state: HashMap<Site, bool> = HashMap::new();
    let mut open = |v: Site| *state.entry(v).or_insert_with(|| escape_event(fine, s, v));
    if !open(Site::ORIGIN) {
        return (0, false);
    }
    let mut seen = std::collections::HashSet::from([Site::ORIGIN]);
    let mut queue = VecDeque::from([Site::ORIGIN]);
    while let Some(u) = queue.pop_front() {
        if u.linf(Site::ORIGIN) >= radius {
            return (seen.len(), true);
        }
        for (dx, dy) in STEPS {
            let v = u.offset(dx, dy);
            if !seen.contains(&v) && open(v) {
                seen.insert(v);
                queue.push_back(v);
            }
        }
    }
    (seen.len(), false)
}

pub fn run(opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("renorm");
    let n = opts.n(10_000, 1_000);
    let seed = sub_seed(opts.seed, 1);
    let good: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| locality_trial(seed, i))
        .collect::<Result<_, _>>()?;
    let bad = good.iter().filter(|&&g| !g).count() as u64;
    rep.check("escape-locality", bad == 0, failures(bad, n));

    let n = opts.n(1_000, 100);
    let seed = sub_seed(opts.seed, 2);
    let good: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| bridge_trial(seed, i))
        .collect::<Result<_, _>>()?;
    let bad = good.iter().filter(|&&g| !g).count() as u64;
    rep.check("bridge-lifting", bad == 0, failures(bad, n));

    let (ok, detail) = dependence_structure();
    rep.check("bridge-dependence", ok, detail);

    // decay of coarse clusters built from a subcritical fine field
    let (s, radius) = (4, 20);
    let n = opts.n(4_000, 400);
    let seed = sub_seed(opts.seed, 3);
    let sizes: Vec<(usize, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            coarse_cluster(
                &BondField {
                    seed,
                    index: i,
                    p: 0.4,
                },
                s,
                radius,
            )
        })
        .collect();
    let mut stats = ClusterStats {
        radius,
        ..Default::default()
    };
    for (size, truncated) in sizes {
        stats.samples += 1;
        if truncated {
            stats.reached_boundary += 1;
        } else {
            *stats.size_histogram.entry(size).or_default() += 1;
        }
    }
    for k in 1..=12 {
        rep.row("coarse-tail/s4-p0.4", k as f64, stats.tail(k), 0.0, n);
    }
    match fit_decay_stats(&stats, (1, 12)) {
        Ok(fit) => {
            rep.check(
                "coarse-decay",
                fit.a_hat > 0.0,
                format!("a = {:.4}, r2 = {:.4}", fit.a_hat, fit.r2),
            );
            rep.fit("coarse-decay", &fit);
        }
        Err(e) => rep.check("coarse-decay", false, e.to_string()),
    }
    Ok(rep)
}
