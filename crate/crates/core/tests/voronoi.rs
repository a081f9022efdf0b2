use num_rational::Ratio;
use perclab_core::rng::SplitMix;
use perclab_core::voronoi::{
    build_tiling, strong_cluster_of_origin, weak_open_crossing, Adjacency, ClusterMode, PointState,
};
use perclab_core::{Configuration, Direction, IRect, ModelParams, Site};

fn tiling(
    p: f64,
    pi: f64,
    w: IRect,
    guard: i64,
    index: u64,
) -> (Configuration, perclab_core::voronoi::VoronoiTiling) {
    let params = ModelParams::new(p).unwrap().with_pi(pi).unwrap();
    let f = Configuration::sample_voronoi_field(&params, w.grow(guard), 17, index);
    let t = build_tiling(&f, w, guard).unwrap();
    (f, t)
}

#[test]
fn nearest_sites_agree_with_full_scan() {
    let w = IRect::at(0, 0, 16, 16);
    let mut rng = SplitMix::new(5);
    for index in 0..10 {
        let (f, t) = tiling(0.5, 0.3, w, 6, index);
        assert!(t.is_complete());
        let all: Vec<(Site, i8)> = f
            .window()
            .sites()
            .filter_map(|s| f.voronoi_value(s).filter(|&v| v != 0).map(|v| (s, v)))
            .collect();
        for _ in 0..200 {
            // points on a quarter grid hit cell boundaries and corners often
            let x = Ratio::new(rng.below(65) as i64, 4);
            let y = Ratio::new(rng.below(65) as i64, 4);
            let d = |s: Site| {
                let dx = x - s.x;
                let dy = y - s.y;
                dx * dx + dy * dy
            };
            let best = all.iter().map(|&(s, _)| d(s)).min().unwrap();
            let owners: Vec<i8> = all
                .iter()
                .filter(|&&(s, _)| d(s) == best)
                .map(|&(_, v)| v)
                .collect();
            // open iff some open site has no strictly closer closed site
            let crit_open = all
                .iter()
                .any(|&(z, v)| v == 1 && all.iter().all(|&(z2, v2)| v2 != -1 || d(z2) >= d(z)));
            let crit_closed = all
                .iter()
                .any(|&(z, v)| v == -1 && all.iter().all(|&(z2, v2)| v2 != 1 || d(z2) >= d(z)));
            let st = t.point_open(x, y).unwrap();
            let expect = match (owners.contains(&1), owners.contains(&-1)) {
                (true, false) => PointState::Open,
                (false, true) => PointState::Closed,
                _ => PointState::Both,
            };
            assert_eq!(st, expect);
            assert_eq!(crit_open, st != PointState::Closed);
            assert_eq!(crit_closed, st != PointState::Open);
        }
    }
}

#[test]
fn disjunction_on_random_tilings() {
    let w = IRect::at(0, 0, 24, 24);
    let r = IRect::at(2, 3, 18, 16);
    for (k, &(p, pi)) in [(0.3, 0.3), (0.5, 0.3), (0.7, 0.3), (0.5, 1.0), (0.5, 0.6)]
        .iter()
        .enumerate()
    {
        for index in 0..40 {
            let (_, t) = tiling(p, pi, w, 6, 1000 * k as u64 + index);
            let res = weak_open_crossing(&t, &r).unwrap();
            assert!(
                res.holds || res.blocking_witness.is_some(),
                "p={p} pi={pi} #{index}"
            );
            // the same holds with the roles of the states swapped
            let so = t
                .cell_crossing(&r, Direction::Horizontal, true, Adjacency::Strong)
                .unwrap();
            let wc = t
                .cell_crossing(&r, Direction::Vertical, false, Adjacency::Weak)
                .unwrap();
            assert!(so.is_some() || wc.is_some());
        }
    }
}

#[test]
fn unit_density_adjacency_everywhere() {
    let w = IRect::at(0, 0, 12, 12);
    let (_, t) = tiling(0.5, 1.0, w, 3, 0);
    for z in IRect::at(1, 1, 10, 10).sites() {
        let i = t.index_of(z).unwrap();
        assert_eq!(t.strong_neighbors(i).len(), 4);
        assert_eq!(t.weak_neighbors(i).len(), 8);
    }
}

#[test]
fn origin_cluster_modes_nest() {
    let w = IRect::at(-20, -20, 40, 40);
    for index in 0..20 {
        let (_, t) = tiling(0.55, 0.5, w, 6, index);
        let so = strong_cluster_of_origin(&t, ClusterMode::StrongOpen).unwrap();
        let wo = strong_cluster_of_origin(&t, ClusterMode::WeakOpen).unwrap();
        assert!(so.sites.iter().all(|s| wo.sites.contains(s)));
        let sc = strong_cluster_of_origin(&t, ClusterMode::StrongClosed).unwrap();
        assert!(sc.sites.iter().all(|s| !so.sites.contains(s)));
    }
}

#[test]
fn dump_round_trips_through_json() {
    let (_, t) = tiling(0.5, 0.4, IRect::at(0, 0, 10, 10), 6, 3);
    let d = t.dump();
    let s = serde_json::to_string(&d).unwrap();
    let back: perclab_core::voronoi::TilingDump = serde_json::from_str(&s).unwrap();
    assert_eq!(back, d);
    assert_eq!(d.sites.len(), d.weak.len());
}

#[test]
fn weak_open_ring_blocks_strong_closed_escape() {
    // open sites on the diamond |x| + |y| = 3 touch only at corners
    let w = IRect::at(-10, -10, 20, 20);
    let f = Configuration::from_voronoi_values(w.grow(3), 0, 0, |s| {
        if s.x.abs() + s.y.abs() == 3 {
            1
        } else {
            -1
        }
    });
    let t = build_tiling(&f, w, 3).unwrap();
    let strong = strong_cluster_of_origin(&t, ClusterMode::StrongClosed).unwrap();
    assert!(!strong.truncated);
    assert!(strong.sites.iter().all(|s| s.x.abs() + s.y.abs() < 3));
    let weak = strong_cluster_of_origin(&t, ClusterMode::WeakClosed).unwrap();
    assert!(weak.truncated);
    let ring = strong_cluster_of_origin(&t, ClusterMode::WeakOpen).unwrap();
    assert!(ring.sites.is_empty());
}
