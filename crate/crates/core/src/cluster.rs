//! Open clusters of the origin and the observables built on them.
//!
//! Monte Carlo estimators search the cluster lazily inside the box
//! `[-ρ, ρ]²` (index space for the triangular lattice), so cost scales with
//! cluster size rather than box area. A cluster that reaches the box boundary
//! is flagged as truncated; its size is then only a lower bound.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depbond::DepBondField;
use crate::error::{Error, Result};
use crate::lattice::{for_each_neighbor, EdgeId, IRect, LatticeKind, Site};
use crate::sample::{
    BondField, Configuration, EdgeStates, Model, ModelParams, SiteField, SiteStates,
};
use crate::stats::{linear_fit, Estimate, MeanVar, Proportion};

/// Cluster of the origin within a configuration's window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginCluster {
    pub sites: Vec<Site>,
    pub truncated: bool,
}

/// Open cluster of the origin. Empty for site models with a closed origin;
/// `{origin}` for bond models with no open incident edge. `truncated` is set
/// iff the cluster touches the window boundary.
pub fn cluster_of_origin(config: &Configuration) -> Result<OriginCluster> {
    let w = config.window();
    if !w.contains(Site::ORIGIN) {
        return Err(Error::Window("origin outside window".into()));
    }
    let model = config.model();
    if model == Model::Voronoi {
        return Err(Error::InvalidParam(
            "Voronoi clusters are cell-based; use the voronoi module".into(),
        ));
    }
    if !model.is_bond() && !config.site_open(Site::ORIGIN) {
        return Ok(OriginCluster {
            sites: Vec::new(),
            truncated: false,
        });
    }
    let kind = model.lattice();
    let mut seen = vec![false; w.num_sites()];
    let mut stack = vec![Site::ORIGIN];
    seen[w.index(Site::ORIGIN)] = true;
    let mut sites = Vec::new();
    while let Some(v) = stack.pop() {
        sites.push(v);
        for_each_neighbor(kind, v, |u| {
            if !w.contains(u) || seen[w.index(u)] {
                return;
            }
            let ok = if model.is_bond() {
                config.edge_open(EdgeId::between(v, u).unwrap())
            } else {
                config.site_open(u)
            };
            if ok {
                seen[w.index(u)] = true;
                stack.push(u);
            }
        });
    }
    sites.sort();
    let truncated = sites
        .iter()
        .any(|s| s.x == w.x0 || s.x == w.x1 || s.y == w.y0 || s.y == w.y1);
    Ok(OriginCluster { sites, truncated })
}

/// Lazily evaluated states of a lattice model for one sample.
#[derive(Debug, Clone)]
pub enum LazyStates {
    Bond(BondField),
    DepBond(DepBondField),
    Site(SiteField, LatticeKind),
}

impl LazyStates {
    pub fn new(model: Model, params: &ModelParams, seed: u64, index: u64) -> Result<Self> {
        let p = params.p;
        Ok(match model {
            Model::Bond => LazyStates::Bond(BondField { seed, index, p }),
            Model::DepBond => LazyStates::DepBond(DepBondField {
                weight: params
                    .weight
                    .clone()
                    .ok_or_else(|| Error::InvalidParam("dependent model needs a weight".into()))?,
                seed,
                index,
                p,
            }),
            Model::SiteSquare | Model::SiteStar | Model::SiteTriangular => {
                LazyStates::Site(SiteField { seed, index, p }, model.lattice())
            }
            Model::Voronoi => {
                return Err(Error::InvalidParam(
                    "Voronoi clusters are cell-based; use the voronoi module".into(),
                ))
            }
        })
    }
}

/// Reusable search buffers for one worker.
pub struct ClusterWorkspace {
    bound: IRect,
    stamp: Vec<u32>,
    current: u32,
    stack: Vec<Site>,
}

impl ClusterWorkspace {
    pub fn new(radius: i64) -> Self {
        let bound = IRect::centered(radius);
        ClusterWorkspace {
            bound,
            stamp: vec![0; bound.num_sites()],
            current: 0,
            stack: Vec::new(),
        }
    }

    pub fn radius(&self) -> i64 {
        self.bound.x1
    }

    /// Size of the origin's cluster inside the box and whether it reached
    /// the box boundary. With `stop_at_boundary` the search ends as soon as
    /// the boundary is reached (the size is then meaningless).
    pub fn explore(&mut self, states: &LazyStates, stop_at_boundary: bool) -> (usize, bool) {
        if let LazyStates::Site(f, _) = states {
            if !f.site_open(Site::ORIGIN) {
                return (0, false);
            }
        }
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.fill(0);
            self.current = 1;
        }
        let cur = self.current;
        let b = self.bound;
        let kind = match states {
            LazyStates::Site(_, k) => *k,
            _ => LatticeKind::BondSquare,
        };
        self.stack.clear();
        self.stack.push(Site::ORIGIN);
        self.stamp[b.index(Site::ORIGIN)] = cur;
        let mut size = 0;
        let mut reached = false;
        while let Some(v) = self.stack.pop() {
            size += 1;
            if v.x == b.x0 || v.x == b.x1 || v.y == b.y0 || v.y == b.y1 {
                reached = true;
                if stop_at_boundary {
                    break;
                }
            }
            let stamp = &mut self.stamp;
            let stack = &mut self.stack;
            for_each_neighbor(kind, v, |u| {
                if !b.contains(u) {
                    return;
                }
                let i = b.index(u);
                if stamp[i] == cur {
                    return;
                }
                let ok = match states {
                    LazyStates::Bond(f) => f.edge_open(EdgeId::between(v, u).unwrap()),
                    LazyStates::DepBond(f) => f.edge_open(EdgeId::between(v, u).unwrap()),
                    LazyStates::Site(f, _) => f.site_open(u),
                };
                if ok {
                    stamp[i] = cur;
                    stack.push(u);
                }
            });
        }
        (size, reached)
    }
}

/// Per-sample origin cluster sizes, reduced in sample order.
fn sizes(
    model: Model,
    params: &ModelParams,
    radius: i64,
    n_samples: u64,
    seed: u64,
    stop_at_boundary: bool,
) -> Result<Vec<(usize, bool)>> {
    LazyStates::new(model, params, seed, 0)?;
    Ok((0..n_samples)
        .into_par_iter()
        .map_init(
            || ClusterWorkspace::new(radius),
            |ws, i| {
                let st = LazyStates::new(model, params, seed, i).expect("validated");
                ws.explore(&st, stop_at_boundary)
            },
        )
        .collect())
}

/// Fraction of samples whose origin cluster reaches the boundary of the
/// radius-ρ box (a finite-volume upper proxy for the percolation
/// probability).
pub fn estimate_theta(
    model: Model,
    params: &ModelParams,
    radius: i64,
    n_samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let hits = sizes(model, params, radius, n_samples, seed, true)?
        .into_iter()
        .filter(|s| s.1)
        .count() as u64;
    Ok(Proportion::new(hits, n_samples).estimate())
}

/// Mean cluster size with boundary-truncated sizes counted as found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub estimate: Estimate,
    pub truncated_fraction: f64,
    pub radius: i64,
}

pub fn estimate_chi(
    model: Model,
    params: &ModelParams,
    radius: i64,
    n_samples: u64,
    seed: u64,
) -> Result<ChiEstimate> {
    let v = sizes(model, params, radius, n_samples, seed, false)?;
    let mut mv = MeanVar::default();
    let mut trunc = 0u64;
    for (s, t) in &v {
        mv.push(*s as f64);
        trunc += *t as u64;
    }
    Ok(ChiEstimate {
        estimate: mv.estimate(),
        truncated_fraction: trunc as f64 / n_samples as f64,
        radius,
    })
}

/// Histogram of origin cluster sizes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClusterStats {
    /// Sizes of clusters that stayed inside the box.
    pub size_histogram: BTreeMap<usize, u64>,
    pub reached_boundary: u64,
    pub samples: u64,
    pub radius: i64,
}

impl ClusterStats {
    pub fn collect(
        model: Model,
        params: &ModelParams,
        radius: i64,
        n_samples: u64,
        seed: u64,
    ) -> Result<Self> {
        let mut st = ClusterStats {
            radius,
            ..Default::default()
        };
        for (s, t) in sizes(model, params, radius, n_samples, seed, true)? {
            st.samples += 1;
            if t {
                st.reached_boundary += 1;
            } else {
                *st.size_histogram.entry(s).or_default() += 1;
            }
        }
        Ok(st)
    }

    pub fn merge(mut self, o: &ClusterStats) -> Self {
        for (k, v) in &o.size_histogram {
            *self.size_histogram.entry(*k).or_default() += v;
        }
        self.reached_boundary += o.reached_boundary;
        self.samples += o.samples;
        self
    }

    /// Empirical `Pr(|C₀| ≥ n)` counting only clusters found in full.
    pub fn tail(&self, n: usize) -> f64 {
        let c: u64 = self.size_histogram.range(n..).map(|(_, v)| v).sum();
        c as f64 / self.samples as f64
    }

    pub fn truncated_fraction(&self) -> f64 {
        self.reached_boundary as f64 / self.samples as f64
    }
}

/// Least-squares fit of `ln Pr(|C₀| ≥ n) ≈ c − a·n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a_hat: f64,
    pub intercept: f64,
    pub r2: f64,
    pub fit_range: (usize, usize),
    /// Number of `n` values with nonzero tail used in the fit.
    pub points: usize,
    pub truncated_fraction: f64,
    /// Set when more than 1% of samples reached the box boundary.
    pub truncation_warning: bool,
}

pub fn fit_decay_stats(stats: &ClusterStats, fit_range: (usize, usize)) -> Result<DecayFit> {
    let (lo, hi) = fit_range;
    if lo > hi {
        return Err(Error::InvalidParam("empty fit range".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in lo..=hi {
        let t = stats.tail(n);
        if t > 0.0 {
            xs.push(n as f64);
            ys.push(t.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "only {} sizes in [{lo}, {hi}] have nonzero tail",
            xs.len()
        )));
    }
    let fit = linear_fit(&xs, &ys)
        .ok_or_else(|| Error::DegenerateFit("no spread in fit points".into()))?;
    let tf = stats.truncated_fraction();
    Ok(DecayFit {
        a_hat: -fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        fit_range,
        points: xs.len(),
        truncated_fraction: tf,
        truncation_warning: tf > 0.01,
    })
}

pub fn fit_decay(
    model: Model,
    params: &ModelParams,
    radius: i64,
    n_samples: u64,
    fit_range: (usize, usize),
    seed: u64,
) -> Result<DecayFit> {
    let stats = ClusterStats::collect(model, params, radius, n_samples, seed)?;
    fit_decay_stats(&stats, fit_range)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64) -> ModelParams {
        ModelParams::new(p).unwrap()
    }

    #[test]
    fn closed_origin_and_isolated_origin() {
        let w = IRect::centered(3);
        let c = Configuration::from_sites(Model::SiteSquare, w, 0, 0, |s| s != Site::ORIGIN);
        assert!(cluster_of_origin(&c).unwrap().sites.is_empty());
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |_| false);
        let cl = cluster_of_origin(&c).unwrap();
        assert_eq!(cl.sites, vec![Site::ORIGIN]);
        assert!(!cl.truncated);
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |_| true);
        let cl = cluster_of_origin(&c).unwrap();
        assert_eq!(cl.sites.len(), 49);
        assert!(cl.truncated);
    }

    #[test]
    fn lazy_matches_materialized() {
        let r = 6;
        let w = IRect::centered(r);
        let mut ws = ClusterWorkspace::new(r);
        for model in [
            Model::Bond,
            Model::SiteSquare,
            Model::SiteStar,
            Model::SiteTriangular,
        ] {
            for i in 0..30 {
                let pr = params(if model == Model::SiteStar { 0.35 } else { 0.55 });
                let c = match model {
                    Model::Bond => Configuration::sample_bond(&pr, w, 3, i),
                    m => Configuration::sample_site(m.lattice(), &pr, w, 3, i).unwrap(),
                };
                let full = cluster_of_origin(&c).unwrap();
                let st = LazyStates::new(model, &pr, 3, i).unwrap();
                let (n, t) = ws.explore(&st, false);
                assert_eq!(n, full.sites.len());
                assert_eq!(t, full.truncated);
            }
        }
    }

    #[test]
    fn theta_extremes_and_chi() {
        let e = estimate_theta(Model::Bond, &params(0.0), 8, 50, 1).unwrap();
        assert_eq!(e.value, 0.0);
        let e = estimate_theta(Model::Bond, &params(1.0), 8, 50, 1).unwrap();
        assert_eq!(e.value, 1.0);
        let c = estimate_chi(Model::SiteSquare, &params(0.0), 8, 20, 1).unwrap();
        assert_eq!(c.estimate.value, 0.0);
        let c = estimate_chi(Model::Bond, &params(0.0), 8, 20, 1).unwrap();
        assert_eq!(c.estimate.value, 1.0);
    }

    #[test]
    fn degenerate_fit() {
        let e = fit_decay(Model::SiteSquare, &params(0.0), 16, 100, (10, 100), 1);
        assert!(matches!(e, Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn histogram_conservation() {
        let st = ClusterStats::collect(Model::Bond, &params(0.45), 20, 500, 4).unwrap();
        let total: u64 = st.size_histogram.values().sum();
        assert_eq!(total + st.reached_boundary, st.samples);
    }
}
