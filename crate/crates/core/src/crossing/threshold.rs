//! Per-sample critical parameter of a crossing event.
//!
//! With coupled variates (a cell is open at `p` iff its variate `u < p`),
//! a crossing of a fixed rectangle holds at `p` iff `p > p*`, where `p*` is
//! the smallest possible maximum variate along a crossing. Cells are added
//! in increasing order of their variate to a union-find structure with two
//! virtual nodes for the start and end sides; `p*` is the variate of the
//! cell whose addition first joins them.

use super::{on_end, on_own_side, on_start, tri_bound, tri_on_end, tri_on_start, Direction};
use crate::lattice::{for_each_neighbor, EdgeId, IRect, LatticeKind, Site, TriRect};
use crate::unionfind::UnionFind;

fn by_variate<T: Copy>(cells: impl Iterator<Item = T>, u: impl Fn(T) -> f64) -> Vec<(f64, T)> {
    let mut v: Vec<(f64, T)> = cells.map(|c| (u(c), c)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

fn site_threshold(
    bound: &IRect,
    sites: Vec<(f64, Site)>,
    member: impl Fn(Site) -> bool,
    kind: LatticeKind,
    is_start: impl Fn(Site) -> bool,
    is_end: impl Fn(Site) -> bool,
) -> f64 {
    let n = bound.num_sites();
    let (src, dst) = (n, n + 1);
    let mut uf = UnionFind::new(n + 2);
    let mut open = vec![false; n];
    for (u, s) in sites {
        let i = bound.index(s);
        open[i] = true;
        if is_start(s) {
            uf.union(i, src);
        }
        if is_end(s) {
            uf.union(i, dst);
        }
        for_each_neighbor(kind, s, |w| {
            if member(w) && open[bound.index(w)] {
                uf.union(i, bound.index(w));
            }
        });
        if uf.same(src, dst) {
            return u;
        }
    }
    1.0
}

/// Critical parameter for a site crossing on the square or star lattice.
pub fn critical_p_site(
    kind: LatticeKind,
    r: &IRect,
    dir: Direction,
    u: impl Fn(Site) -> f64,
) -> f64 {
    site_threshold(
        r,
        by_variate(r.sites(), u),
        |w| r.contains(w),
        kind,
        |s| on_start(r, dir, s),
        |s| on_end(r, dir, s),
    )
}

/// Critical parameter for a triangular-lattice crossing.
pub fn critical_p_tri(r: &TriRect, dir: Direction, u: impl Fn(Site) -> f64) -> f64 {
    site_threshold(
        &tri_bound(r),
        by_variate(r.sites(), u),
        |w| r.contains(w),
        LatticeKind::SiteTriangular,
        |s| tri_on_start(r, dir, s),
        |s| tri_on_end(r, dir, s),
    )
}

/// Critical parameter for a bond crossing. Returns 0 for degenerate
/// rectangles whose start and end sides coincide.
pub fn critical_p_bond(r: &IRect, dir: Direction, u: impl Fn(EdgeId) -> f64) -> f64 {
    let n = r.num_sites();
    let (src, dst) = (n, n + 1);
    let mut uf = UnionFind::new(n + 2);
    for s in r.sites() {
        if on_start(r, dir, s) {
            uf.union(r.index(s), src);
        }
        if on_end(r, dir, s) {
            uf.union(r.index(s), dst);
        }
    }
    if uf.same(src, dst) {
        return 0.0;
    }
    let edges = r.edges().into_iter().filter(|&e| !on_own_side(r, dir, e));
    for (ue, e) in by_variate(edges, u) {
        let (a, b) = e.endpoints();
        uf.union(r.index(a), r.index(b));
        if uf.same(src, dst) {
            return ue;
        }
    }
    1.0
}

#[cfg(test)]
mod tests {
    use super::super::{bond_crossing, site_crossing, tri_crossing};
    use super::*;
    use crate::sample::{edge_uniform, site_uniform};

    #[test]
    fn threshold_matches_direct_evaluation() {
        let r = IRect::at(0, 0, 7, 6);
        let tr = TriRect::new(0, 6, 0, 5).unwrap();
        for idx in 0..40 {
            let pb = critical_p_bond(&r, Direction::Horizontal, |e| edge_uniform(5, idx, e));
            let ps = critical_p_site(LatticeKind::SiteStar, &r, Direction::Vertical, |s| {
                site_uniform(5, idx, s)
            });
            let pt = critical_p_tri(&tr, Direction::Horizontal, |s| site_uniform(5, idx, s));
            for p in [0.2, 0.4, 0.45, 0.5, 0.55, 0.6, 0.8, pb, ps, pt] {
                let eb = |e: EdgeId| edge_uniform(5, idx, e) < p;
                assert_eq!(
                    bond_crossing(&eb, &r, Direction::Horizontal).is_some(),
                    pb < p
                );
                let es = |s: Site| site_uniform(5, idx, s) < p;
                assert_eq!(
                    site_crossing(&es, LatticeKind::SiteStar, &r, Direction::Vertical).is_some(),
                    ps < p
                );
                assert_eq!(
                    tri_crossing(&es, &tr, Direction::Horizontal).is_some(),
                    pt < p
                );
            }
        }
    }
}
