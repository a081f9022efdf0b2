//! Monte Carlo checks of the sampled measures, with 4σ binomial tolerances.

use rayon::prelude::*;

use perclab_core::cluster::{estimate_chi, estimate_theta, ClusterWorkspace, LazyStates};
use perclab_core::crossing::{bond_crossing, site_crossing};
use perclab_core::depbond::{build_dependent_config, WeightFunction};
use perclab_core::sample::EdgeStates;
use perclab_core::stats::Proportion;
use perclab_core::{Configuration, Dir, Direction, EdgeId, IRect, LatticeKind, Model, ModelParams};

fn within(p: Proportion, target: f64) -> bool {
    (p.value() - target).abs() <= 4.0 * p.sigma_at(target)
}

#[test]
fn bond_and_site_open_fractions() {
    let w = IRect::at(0, 0, 10, 10);
    let per = w.edges().len() as u64;
    let n = 100_000u64;
    let open: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            Configuration::sample_bond(&ModelParams::new(0.5).unwrap(), w, 1, i).count_open() as u64
        })
        .sum();
    assert!(within(Proportion::new(open, n * per), 0.5));
    let sites = w.num_sites() as u64;
    let n = 20_000u64;
    let open: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            Configuration::sample_site(
                LatticeKind::SiteSquare,
                &ModelParams::new(0.3).unwrap(),
                w,
                1,
                i,
            )
            .unwrap()
            .count_open() as u64
        })
        .sum();
    assert!(within(Proportion::new(open, n * sites), 0.3));
}

#[test]
fn voronoi_value_frequencies() {
    let (p, pi) = (0.4, 0.7);
    let params = ModelParams::new(p).unwrap().with_pi(pi).unwrap();
    let w = IRect::at(0, 0, 99, 99);
    let mut counts = [0u64; 3];
    for i in 0..100 {
        let f = Configuration::sample_voronoi_field(&params, w, 3, i);
        for s in w.sites() {
            counts[(f.voronoi_value(s).unwrap() + 1) as usize] += 1;
        }
    }
    let n: u64 = counts.iter().sum();
    assert_eq!(n, 1_000_000);
    for (c, target) in counts.iter().zip([pi * (1.0 - p), 1.0 - pi, pi * p]) {
        assert!(within(Proportion::new(*c, n), target));
    }
}

#[test]
fn streams_are_uncorrelated() {
    let w = IRect::at(0, 0, 20, 20);
    let params = ModelParams::new(0.5).unwrap();
    let (mut both, mut total) = (0u64, 0u64);
    for i in 0..200 {
        let a = Configuration::sample_bond(&params, w, 7, 2 * i);
        let b = Configuration::sample_bond(&params, w, 7, 2 * i + 1);
        for e in w.edges() {
            both += (a.edge_open(e) && b.edge_open(e)) as u64;
            total += 1;
        }
    }
    assert!(within(Proportion::new(both, total), 0.25));
}

#[test]
fn sampling_is_thread_count_independent() {
    let w = IRect::at(-5, -5, 30, 30);
    let params = ModelParams::new(0.5).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            (0..64u64)
                .into_par_iter()
                .map(|i| Configuration::sample_bond(&params, w, 3, i).to_bytes())
                .collect::<Vec<_>>()
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(16));
}

#[test]
fn dependent_model_marginals_and_range() {
    let w = WeightFunction::plus();
    let win = IRect::at(0, 0, 12, 12);
    let params = ModelParams::new(0.5).unwrap();
    let e1 = EdgeId::primal(1, 1, Dir::E);
    let far = (w.dependence_range() + 2) / 2 + 2;
    let e2 = EdgeId::primal(1 + far, 1, Dir::E);
    let n = 40_000u64;
    let v: Vec<(bool, bool, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = build_dependent_config(&w, &params, win, 11, i).unwrap();
            (c.edge_open(e1), c.edge_open(e2), c.count_open() as u64)
        })
        .collect();
    let a = v.iter().filter(|t| t.0).count() as u64;
    let ab = v.iter().filter(|t| t.0 && t.1).count() as u64;
    assert!(within(Proportion::new(a, n), 0.5));
    assert!(within(Proportion::new(ab, n), 0.25));
}

#[test]
fn dependent_model_self_dual_crossings() {
    // P_p(H(R)) + P_{1-p}(H(R)) = 1 for an (n+1) x n rectangle
    let w = WeightFunction::plus();
    let r = IRect::at(0, 0, 9, 8);
    let n = 20_000u64;
    let hits = |p: f64, seed: u64| {
        (0..n)
            .into_par_iter()
            .filter(|&i| {
                let c =
                    build_dependent_config(&w, &ModelParams::new(p).unwrap(), r, seed, i).unwrap();
                bond_crossing(&c, &r, Direction::Horizontal).is_some()
            })
            .count() as u64
    };
    let a = Proportion::new(hits(0.42, 1), n);
    let b = Proportion::new(hits(0.58, 2), n);
    let s = (a.sigma().powi(2) + b.sigma().powi(2)).sqrt();
    assert!((a.value() + b.value() - 1.0).abs() <= 4.0 * s);
}

#[test]
fn site_duality_sum_rule() {
    // P_p(H on L□) + P_{1-p}(V on L×) = 1
    let r = IRect::at(0, 0, 10, 10);
    let n = 20_000u64;
    for p in [0.3, 0.5, 0.7] {
        let est = |kind: LatticeKind, q: f64, dir: Direction, seed: u64| {
            let hits = (0..n)
                .into_par_iter()
                .filter(|&i| {
                    let c =
                        Configuration::sample_site(kind, &ModelParams::new(q).unwrap(), r, seed, i)
                            .unwrap();
                    site_crossing(&c, kind, &r, dir).is_some()
                })
                .count() as u64;
            Proportion::new(hits, n)
        };
        let a = est(LatticeKind::SiteSquare, p, Direction::Horizontal, 1);
        let b = est(LatticeKind::SiteStar, 1.0 - p, Direction::Vertical, 2);
        let s = (a.sigma().powi(2) + b.sigma().powi(2)).sqrt().max(1e-3);
        assert!((a.value() + b.value() - 1.0).abs() <= 4.0 * s, "p={p}");
    }
}

#[test]
fn increasing_events_positively_correlated() {
    let w = IRect::at(0, 0, 12, 12);
    let r1 = IRect::at(0, 0, 12, 8);
    let r2 = IRect::at(3, 2, 7, 10);
    let n = 40_000u64;
    let v: Vec<(bool, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = Configuration::sample_site(
                LatticeKind::SiteSquare,
                &ModelParams::new(0.58).unwrap(),
                w,
                4,
                i,
            )
            .unwrap();
            (
                site_crossing(&c, LatticeKind::SiteSquare, &r1, Direction::Horizontal).is_some(),
                site_crossing(&c, LatticeKind::SiteSquare, &r2, Direction::Vertical).is_some(),
            )
        })
        .collect();
    let a = v.iter().filter(|t| t.0).count() as f64 / n as f64;
    let b = v.iter().filter(|t| t.1).count() as f64 / n as f64;
    let ab = Proportion::new(v.iter().filter(|t| t.0 && t.1).count() as u64, n);
    assert!(ab.value() >= a * b - 4.0 * ab.sigma());
}

#[test]
fn theta_decreases_with_radius_and_chi_increases_with_p() {
    let params = ModelParams::new(0.6).unwrap();
    let t: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&r| {
            estimate_theta(Model::Bond, &params, r, 2000, 5)
                .unwrap()
                .value
        })
        .collect();
    assert!(t[0] >= t[1] && t[1] >= t[2] && t[2] > 0.3, "{t:?}");
    let chi: Vec<f64> = [0.2, 0.3, 0.4, 0.45]
        .iter()
        .map(|&p| {
            estimate_chi(Model::Bond, &ModelParams::new(p).unwrap(), 64, 2000, 5)
                .unwrap()
                .estimate
                .value
        })
        .collect();
    assert!(chi.windows(2).all(|w| w[0] <= w[1]), "{chi:?}");
}

#[test]
fn coupled_clusters_are_nested() {
    let mut lo_ws = ClusterWorkspace::new(20);
    let mut hi_ws = ClusterWorkspace::new(20);
    for i in 0..300 {
        let lo = LazyStates::new(Model::SiteSquare, &ModelParams::new(0.5).unwrap(), 2, i).unwrap();
        let hi = LazyStates::new(Model::SiteSquare, &ModelParams::new(0.6).unwrap(), 2, i).unwrap();
        let (a, _) = lo_ws.explore(&lo, false);
        let (b, _) = hi_ws.explore(&hi, false);
        assert!(a <= b);
    }
}
