use std::collections::{HashSet, VecDeque};

use perclab_core::cluster::cluster_of_origin;
use perclab_core::crossing::{
    annulus_circuit_config, bond_crossing, has_crossing, leftmost_vertical_crossing,
    shortest_crossing_length, torus_some_crossing_with, CircuitMode, Torus,
};
use perclab_core::rng::SplitMix;
use perclab_core::sample::{EdgeStates, SiteStates};
use perclab_core::{
    Annulus, Configuration, Direction, EdgeId, IRect, LatticeKind, Model, ModelParams, Rect, Site,
};

fn bfs_dist(r: &IRect, open: impl Fn(EdgeId) -> bool) -> Option<usize> {
    let mut dist = vec![usize::MAX; r.num_sites()];
    let mut q = VecDeque::new();
    for s in r.sites().filter(|s| s.x == r.x0) {
        dist[r.index(s)] = 0;
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        if u.x == r.x1 {
            return Some(dist[r.index(u)]);
        }
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let v = u.offset(dx, dy);
            if r.contains(v)
                && dist[r.index(v)] == usize::MAX
                && open(EdgeId::between(u, v).unwrap())
            {
                dist[r.index(v)] = dist[r.index(u)] + 1;
                q.push_back(v);
            }
        }
    }
    None
}

#[test]
fn shortest_crossing_exhaustive_three_by_three() {
    let r = IRect::at(0, 0, 2, 2);
    let edges = r.edges();
    assert_eq!(edges.len(), 12);
    let rect = Rect::from_ints(0, 0, 2, 2).unwrap();
    for mask in 0u32..1 << 12 {
        let open = |e: EdgeId| mask >> edges.iter().position(|&f| f == e).unwrap() & 1 == 1;
        let c = Configuration::from_edges(Model::Bond, r, 0, 0, open);
        assert_eq!(
            shortest_crossing_length(&c, &rect).unwrap(),
            bfs_dist(&r, open)
        );
    }
    let all = Configuration::from_edges(Model::Bond, IRect::at(0, 0, 7, 4), 0, 0, |_| true);
    assert_eq!(
        shortest_crossing_length(&all, &Rect::from_ints(0, 0, 7, 4).unwrap()).unwrap(),
        Some(7)
    );
}

#[test]
fn leftmost_crossing_ignores_cells_to_its_right() {
    let w = IRect::at(0, 0, 10, 10);
    let rect = Rect::from_ints(0, 0, 10, 10).unwrap();
    let mut rng = SplitMix::new(77);
    let mut found = 0;
    for trial in 0..2000u64 {
        let model = [Model::SiteSquare, Model::SiteStar, Model::Bond][(trial % 3) as usize];
        let params = ModelParams::new(0.45 + 0.2 * rng.next_f64()).unwrap();
        let c = match model {
            Model::Bond => Configuration::sample_bond(&params, w, 1, trial),
            m => Configuration::sample_site(m.lattice(), &params, w, 1, trial).unwrap(),
        };
        let Some(path) = leftmost_vertical_crossing(&c, &rect).unwrap() else {
            assert!(!has_crossing(&c, &rect, Direction::Vertical).unwrap().holds);
            continue;
        };
        found += 1;
        // the rightmost path point per row; cells strictly right of it are re-randomized
        let mut right = [i64::MIN; 11];
        for s in &path {
            right[s.y as usize] = right[s.y as usize].max(s.x);
        }
        let strictly_right = |s: Site| s.x > right[s.y as usize] && right[s.y as usize] != i64::MIN;
        let salt = rng.next_u64();
        let c2 = match model {
            Model::Bond => Configuration::from_edges(Model::Bond, w, 0, 0, |e| {
                let (a, b) = e.endpoints();
                if strictly_right(a) && strictly_right(b) {
                    SplitMix::new(salt ^ (a.x * 31 + a.y) as u64 ^ ((e.dir as u64) << 40))
                        .next_f64()
                        < 0.5
                } else {
                    c.edge_open(e)
                }
            }),
            m => Configuration::from_sites(m, w, 0, 0, |s| {
                if strictly_right(s) {
                    SplitMix::new(salt ^ (s.x * 31 + s.y) as u64).next_f64() < 0.5
                } else {
                    c.site_open(s)
                }
            }),
        };
        assert_eq!(
            leftmost_vertical_crossing(&c2, &rect).unwrap(),
            Some(path),
            "{model:?} #{trial}"
        );
    }
    assert!(found > 200);
}

#[test]
fn closed_dual_circuit_blocks_escape() {
    let m = 4;
    let a = Annulus::dual_around(0, 0, m).unwrap();
    let w = a.outer().grow(3);
    let mut held = 0;
    for index in 0..400 {
        let c = Configuration::sample_bond(&ModelParams::new(0.35).unwrap(), w, 5, index);
        if annulus_circuit_config(&c, &a, CircuitMode::ClosedDual)
            .unwrap()
            .is_none()
        {
            continue;
        }
        held += 1;
        let inner = a.inner_square();
        let outer = a.outer();
        let mut seen: HashSet<Site> = inner.sites().collect();
        let mut q: VecDeque<Site> = inner.sites().collect();
        while let Some(u) = q.pop_front() {
            // primal vertex strictly outside the dual outer square
            assert!(u.x > outer.x0 && u.x <= outer.x1 && u.y > outer.y0 && u.y <= outer.y1);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let v = u.offset(dx, dy);
                if w.contains(v)
                    && !seen.contains(&v)
                    && c.edge_open(EdgeId::between(u, v).unwrap())
                {
                    seen.insert(v);
                    q.push_back(v);
                }
            }
        }
    }
    assert!(held > 20);
    let closed = Configuration::from_edges(Model::Bond, w, 0, 0, |_| false);
    assert!(annulus_circuit_config(&closed, &a, CircuitMode::ClosedDual)
        .unwrap()
        .is_some());
}

#[test]
fn torus_event_is_monotone() {
    let torus = Torus::new(LatticeKind::BondSquare, 12, 10).unwrap();
    let mut rng = SplitMix::new(9);
    for _ in 0..2000 {
        let salt = rng.next_u64();
        let p = rng.next_f64();
        let state = |e: EdgeId| {
            SplitMix::new(salt ^ (e.origin.x * 97 + e.origin.y * 7) as u64 ^ e.dir as u64)
                .next_f64()
                < p
        };
        let promote = EdgeId::primal(
            rng.below(12) as i64,
            rng.below(10) as i64,
            if rng.below(2) == 0 {
                perclab_core::Dir::E
            } else {
                perclab_core::Dir::N
            },
        );
        let before = torus_some_crossing_with(&torus, (6, 5), &|_| true, &state).unwrap();
        let after =
            torus_some_crossing_with(&torus, (6, 5), &|_| true, &|e| e == promote || state(e))
                .unwrap();
        assert!(!before || after);
    }
}

#[test]
fn origin_cluster_matches_brute_force_on_four_by_four() {
    let w = IRect::at(-1, -1, 3, 3);
    for kind in [LatticeKind::SiteSquare, LatticeKind::SiteStar] {
        for mask in 0u32..1 << 16 {
            let open = |s: Site| mask >> w.index(s) & 1 == 1;
            let c = Configuration::from_sites(Model::for_site_lattice(kind), w, 0, 0, open);
            let got = cluster_of_origin(&c).unwrap();
            let mut want: Vec<Site> = Vec::new();
            if open(Site::ORIGIN) {
                let mut seen = HashSet::from([Site::ORIGIN]);
                let mut q = VecDeque::from([Site::ORIGIN]);
                while let Some(u) = q.pop_front() {
                    want.push(u);
                    for v in w.sites() {
                        if open(v)
                            && !seen.contains(&v)
                            && perclab_core::lattice::adjacent(kind, u, v)
                        {
                            seen.insert(v);
                            q.push_back(v);
                        }
                    }
                }
            }
            let mut g = got.sites.clone();
            g.sort();
            want.sort();
            assert_eq!(g, want);
            let touches = want
                .iter()
                .any(|s| s.x == w.x0 || s.x == w.x1 || s.y == w.y0 || s.y == w.y1);
            assert_eq!(got.truncated, touches);
        }
    }
}

#[test]
fn crossing_monotone_under_promotion() {
    let w = IRect::at(0, 0, 9, 7);
    let mut rng = SplitMix::new(4);
    for index in 0..500 {
        let c = Configuration::sample_bond(&ModelParams::new(0.5).unwrap(), w, 2, index);
        let edges = w.edges();
        let e = edges[rng.below(edges.len() as u64) as usize];
        let up = c.with_edge(e, true);
        for d in [Direction::Horizontal, Direction::Vertical] {
            assert!(bond_crossing(&c, &w, d).is_none() || bond_crossing(&up, &w, d).is_some());
        }
    }
}
