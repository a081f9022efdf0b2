use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use perclab_core::crossing::{critical_p_bond, critical_p_site, has_crossing, interface_walk};
use perclab_core::sample::{edge_uniform, site_uniform};
use perclab_core::voronoi::build_tiling;
use perclab_core::{Configuration, Direction, IRect, LatticeKind, ModelParams};

fn sampling(c: &mut Criterion) {
    let params = ModelParams::new(0.5).unwrap();
    let mut g = c.benchmark_group("sample_bond");
    for n in [16, 64] {
        let r = IRect::at(0, 0, n, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| {
            let mut i = 0;
            b.iter(|| {
                i += 1;
                Configuration::sample_bond(&params, *r, 1, i)
            })
        });
    }
    g.finish();
}

fn thresholds(c: &mut Criterion) {
    let mut g = c.benchmark_group("critical_p");
    for n in [16, 64] {
        let r = IRect::at(0, 0, n + 1, n);
        g.bench_with_input(BenchmarkId::new("bond", n), &r, |b, r| {
            let mut i = 0;
            b.iter(|| {
                i += 1;
                critical_p_bond(r, Direction::Horizontal, |e| edge_uniform(1, i, e))
            })
        });
        g.bench_with_input(BenchmarkId::new("site", n), &r, |b, r| {
            let mut i = 0;
            b.iter(|| {
                i += 1;
                critical_p_site(LatticeKind::SiteSquare, r, Direction::Horizontal, |s| {
                    site_uniform(1, i, s)
                })
            })
        });
    }
    g.finish();
}

fn crossings(c: &mut Criterion) {
    let params = ModelParams::new(0.5).unwrap();
    let r = IRect::at(0, 0, 33, 32);
    let config = Configuration::sample_bond(&params, r, 1, 0);
    let rect = r.to_rect();
    c.bench_function("bfs_crossing_bond_33x32", |b| {
        b.iter(|| has_crossing(black_box(&config), &rect, Direction::Horizontal))
    });
    c.bench_function("interface_walk_bond_33x32", |b| {
        b.iter(|| interface_walk(black_box(&config), &rect, Direction::Horizontal))
    });
}

fn voronoi(c: &mut Criterion) {
    let params = ModelParams::new(0.5).unwrap().with_pi(0.1).unwrap();
    let w = IRect::at(0, 0, 32, 32);
    let field = Configuration::sample_voronoi_field(&params, w.grow(8), 1, 0);
    c.bench_function("voronoi_tiling_32", |b| {
        b.iter(|| build_tiling(black_box(&field), w, 8))
    });
}

criterion_group!(benches, sampling, thresholds, crossings, voronoi);
criterion_main!(benches);
