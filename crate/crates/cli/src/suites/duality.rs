//! Exhaustive crossing dichotomies on small rectangles.

use perclab_core::crossing::{
    blocking_dual_rect, bond_crossing, dual_closed_crossing, interface_walk_bond,
    interface_walk_site, interface_walk_tri, is_bond_crossing, is_dual_closed_crossing,
    is_site_crossing, is_tri_crossing, site_crossing, tri_crossing, WalkOutcome,
};
use perclab_core::{Direction, EdgeId, IRect, LatticeKind, Site, TriRect};
use rayon::prelude::*;

use super::{failures, SuiteOptions};
use crate::report::Report;
use crate::CliError;

const DIRS: [Direction; 2] = [Direction::Horizontal, Direction::Vertical];

/// Walk outcome against breadth-first searches on both lattices.
fn site_walk_cases() -> (u64, u64) {
    let rects = [
        IRect::at(0, 0, 2, 2),
        IRect::at(0, 0, 3, 2),
        IRect::at(0, 0, 2, 3),
    ];
    sum_pairs(
        rects
            .iter()
            .flat_map(|r| (0u32..1 << r.num_sites()).map(move |m| (*r, m))),
        |(r, mask)| {
            let (mut bad, mut total) = (0, 0);
            let open = |s: Site| mask >> r.index(s) & 1 == 1;
            let closed = |s: Site| !open(s);
            for kind in [LatticeKind::SiteSquare, LatticeKind::SiteStar] {
                let other = kind.matching();
                for dir in DIRS {
                    total += 1;
                    let o = site_crossing(&open, kind, &r, dir).is_some();
                    let c = site_crossing(&closed, other, &r, dir.transverse()).is_some();
                    let ok = o != c
                        && match interface_walk_site(&open, kind, &r, dir) {
                            WalkOutcome::Open(p) => o && is_site_crossing(&open, kind, &r, dir, &p),
                            WalkOutcome::Closed(p) => {
                                c && is_site_crossing(&closed, other, &r, dir.transverse(), &p)
                            }
                        };
                    bad += !ok as u64;
                }
            }
            (bad, total)
        },
    )
}

/// Sums `(failures, cases)` over independent work items in parallel.
fn sum_pairs<T: Send>(
    items: impl Iterator<Item = T>,
    f: impl Fn(T) -> (u64, u64) + Sync + Send,
) -> (u64, u64) {
    let items: Vec<T> = items.collect();
    items
        .into_par_iter()
        .map(f)
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn bond_dual_cases() -> (u64, u64) {
    let r = IRect::at(0, 0, 3, 2);
    let edges = r.edges();
    // bit of each edge, by origin and direction
    let mut bit = vec![[u32::MAX; 2]; r.num_sites()];
    for (i, e) in edges.iter().enumerate() {
        bit[r.index(e.origin)][e.dir as usize] = i as u32;
    }
    let cases = DIRS
        .iter()
        .flat_map(|&dir| (0u32..1 << edges.len()).map(move |m| (dir, m)));
    sum_pairs(cases, |(dir, mask)| {
        let d = blocking_dual_rect(&r, dir);
        let open = |e: EdgeId| {
            r.contains(e.origin) && {
                let i = bit[r.index(e.origin)][e.dir as usize];
                i != u32::MAX && mask >> i & 1 == 1
            }
        };
        let o = bond_crossing(&open, &r, dir).is_some();
        let c = dual_closed_crossing(&open, &d, dir.transverse()).is_some();
        let ok = o != c
            && match interface_walk_bond(&open, &r, dir) {
                WalkOutcome::Open(p) => o && is_bond_crossing(&open, &r, dir, &p),
                WalkOutcome::Closed(p) => {
                    c && is_dual_closed_crossing(&open, &d, dir.transverse(), &p)
                }
            };
        (!ok as u64, 1)
    })
}

fn tri_walk_cases() -> (u64, u64) {
    let rects = [(2, 2), (3, 2), (2, 3)].map(|(c1, y1)| TriRect::new(0, c1, 0, y1).expect("valid"));
    let cases = rects
        .iter()
        .flat_map(|r| (0u32..1 << r.sites().count()).map(move |m| (*r, m)));
    sum_pairs(cases, |(r, mask)| {
        let sites: Vec<Site> = r.sites().collect();
        let (mut bad, mut total) = (0, 0);
        let open = |s: Site| {
            sites
                .iter()
                .position(|&t| t == s)
                .is_some_and(|i| mask >> i & 1 == 1)
        };
        let closed = |s: Site| !open(s);
        for dir in DIRS {
            total += 1;
            let o = tri_crossing(&open, &r, dir).is_some();
            let c = tri_crossing(&closed, &r, dir.transverse()).is_some();
            let ok = o != c
                && match interface_walk_tri(&open, &r, dir) {
                    WalkOutcome::Open(p) => o && is_tri_crossing(&open, &r, dir, &p),
                    WalkOutcome::Closed(p) => {
                        c && is_tri_crossing(&closed, &r, dir.transverse(), &p)
                    }
                };
            bad += !ok as u64;
        }
        (bad, total)
    })
}

pub fn run(_opts: &SuiteOptions) -> Result<Report, CliError> {
    let mut rep = Report::new("duality-exhaustive");
    let (bad, total) = site_walk_cases();
    rep.check(
        "site-walk",
        bad == 0 && total == (512 + 2 * 4096) * 4,
        failures(bad, total),
    );
    let (bad, total) = bond_dual_cases();
    rep.check(
        "bond-dual",
        bad == 0 && total == 2 << 17,
        failures(bad, total),
    );
    let (bad, total) = tri_walk_cases();
    rep.check("tri-walk", bad == 0, failures(bad, total));
    Ok(rep)
}
