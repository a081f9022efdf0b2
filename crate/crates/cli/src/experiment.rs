//! Monte Carlo experiments built on coupled per-sample variates.

use perclab_core::crossing::{
    bond_crossing, critical_p_bond, critical_p_site, critical_p_tri, joined_vertical_crossing,
    site_crossing, tri_crossing,
};
use perclab_core::depbond::{edge_threshold, DepBondField};
use perclab_core::rng::SplitMix;
use perclab_core::sample::{edge_uniform, site_uniform, BondField, SiteField, SiteStates};
use perclab_core::stats::Proportion;
use perclab_core::voronoi::{build_tiling, Adjacency};
use perclab_core::{Configuration, Direction, Error, IRect, Model, ModelParams, Site, TriRect};
use rayon::prelude::*;
use serde::Serialize;

/// Independent seed for a numbered sub-experiment.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    SplitMix::new(seed ^ k.wrapping_mul(0xA24B_AED4_963E_E407)).next_u64()
}

/// Rectangle in the coordinates of a model: axial columns for the
/// triangular lattice, integer coordinates otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    Square(IRect),
    Tri(TriRect),
}

impl Shape {
    /// `w × h` rectangle anchored at the origin.
    pub fn for_model(model: Model, w: i64, h: i64) -> Result<Shape, Error> {
        if model == Model::SiteTriangular {
            Ok(Shape::Tri(TriRect::new(0, w, 0, h)?))
        } else {
            Ok(Shape::Square(IRect::new(0, 0, w, h)?))
        }
    }

    fn square(&self) -> Result<&IRect, Error> {
        match self {
            Shape::Square(r) => Ok(r),
            Shape::Tri(_) => Err(Error::InvalidParam(
                "triangular rectangle for a square model".into(),
            )),
        }
    }
}

fn weight(params: &ModelParams) -> Result<&perclab_core::depbond::WeightFunction, Error> {
    params
        .weight
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("dependent bond model needs a weight function".into()))
}

/// Critical parameter of one sample: the crossing holds at `p` iff `p`
/// exceeds it.
pub fn critical_value(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    seed: u64,
    index: u64,
) -> Result<f64, Error> {
    Ok(match model {
        Model::Bond => critical_p_bond(shape.square()?, dir, |e| edge_uniform(seed, index, e)),
        Model::DepBond => {
            let w = weight(params)?;
            critical_p_bond(shape.square()?, dir, |e| edge_threshold(w, seed, index, e))
        }
        Model::SiteSquare | Model::SiteStar => {
            critical_p_site(model.lattice(), shape.square()?, dir, |s| {
                site_uniform(seed, index, s)
            })
        }
        Model::SiteTriangular => match shape {
            Shape::Tri(r) => critical_p_tri(r, dir, |s| site_uniform(seed, index, s)),
            Shape::Square(_) => {
                return Err(Error::InvalidParam(
                    "square rectangle for the triangular model".into(),
                ))
            }
        },
        Model::Voronoi => {
            return Err(Error::InvalidParam(
                "no critical-value sweep for Voronoi tilings".into(),
            ))
        }
    })
}

/// Critical values of samples `0..n`, in sample order.
pub fn critical_values(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    n: u64,
    seed: u64,
) -> Result<Vec<f64>, Error> {
    critical_values_range(model, params, shape, dir, 0..n, seed)
}

fn critical_values_range(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    range: std::ops::Range<u64>,
    seed: u64,
) -> Result<Vec<f64>, Error> {
    range
        .into_par_iter()
        .map(|i| critical_value(model, params, shape, dir, seed, i))
        .collect()
}

/// Guard distance used for Voronoi tilings built by experiments.
pub const VORONOI_GUARD: i64 = 8;

/// Whether sample `index` has an open crossing at `params.p`. Voronoi
/// tilings use strong adjacency of open cells.
pub fn crossing_holds(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    seed: u64,
    index: u64,
) -> Result<bool, Error> {
    let p = params.p;
    Ok(match model {
        Model::Bond => bond_crossing(&BondField { seed, index, p }, shape.square()?, dir).is_some(),
        Model::DepBond => {
            let f = DepBondField {
                weight: weight(params)?.clone(),
                seed,
                index,
                p,
            };
            bond_crossing(&f, shape.square()?, dir).is_some()
        }
        Model::SiteSquare | Model::SiteStar => site_crossing(
            &SiteField { seed, index, p },
            model.lattice(),
            shape.square()?,
            dir,
        )
        .is_some(),
        Model::SiteTriangular => match shape {
            Shape::Tri(r) => tri_crossing(&SiteField { seed, index, p }, r, dir).is_some(),
            Shape::Square(_) => {
                return Err(Error::InvalidParam(
                    "square rectangle for the triangular model".into(),
                ))
            }
        },
        Model::Voronoi => {
            let r = shape.square()?;
            let window = r.grow(1);
            let field = Configuration::sample_voronoi_field(
                params,
                window.grow(VORONOI_GUARD),
                seed,
                index,
            );
            let t = build_tiling(&field, window, VORONOI_GUARD)?;
            if !t.is_complete() {
                return Err(Error::Window(format!(
                    "guard {VORONOI_GUARD} does not certify the tiling of sample {index}"
                )));
            }
            t.cell_crossing(r, dir, true, Adjacency::Strong)?.is_some()
        }
    })
}

/// Crossing frequency over samples `0..n`.
pub fn crossing_probability(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    n: u64,
    seed: u64,
) -> Result<Proportion, Error> {
    let hits: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| crossing_holds(model, params, shape, dir, seed, i))
        .collect::<Result<_, _>>()?;
    Ok(Proportion::new(
        hits.iter().filter(|&&h| h).count() as u64,
        n,
    ))
}

/// Crossing curve from sorted critical values: at each `p` the number of
/// samples with critical value below `p`. Exactly nondecreasing in `p`.
pub fn curve_from_critical(sorted: &[f64], grid: &[f64]) -> Vec<(f64, Proportion)> {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    grid.iter()
        .map(|&p| {
            let k = sorted.partition_point(|&c| c < p);
            (p, Proportion::new(k as u64, sorted.len() as u64))
        })
        .collect()
}

/// Crossing curve of a model over a `p` grid with variates shared across
/// the grid.
pub fn crossing_curve(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    dir: Direction,
    grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<(f64, Proportion)>, Error> {
    if model == Model::Voronoi {
        return grid
            .iter()
            .map(|&p| {
                let mut at = params.clone();
                at.p = p;
                Ok((p, crossing_probability(model, &at, shape, dir, n, seed)?))
            })
            .collect();
    }
    let mut crit = critical_values(model, params, shape, dir, n, seed)?;
    crit.sort_by(f64::total_cmp);
    Ok(curve_from_critical(&crit, grid))
}

/// An order statistic with a distribution-free 95% band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantile {
    pub level: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Quantile {
    pub fn precision(&self) -> f64 {
        (self.value - self.lo).max(self.hi - self.value)
    }
}

/// The `q`-quantile of sorted samples, `x_(⌈qN⌉)`, with the band given by
/// the order statistics `1.96·√(Nq(1−q))` ranks either side.
pub fn quantile(sorted: &[f64], q: f64) -> Quantile {
    let n = sorted.len();
    assert!(n > 0);
    let rank = |r: f64| (r.ceil() as usize).clamp(1, n) - 1;
    let k = q * n as f64;
    let spread = 1.96 * (n as f64 * q * (1.0 - q)).sqrt();
    Quantile {
        level: q,
        value: sorted[rank(k)],
        lo: sorted[rank(k - spread)],
        hi: sorted[rank(k + spread + 1.0)],
    }
}

/// Width of the window in which the crossing probability climbs from `ε`
/// to `1 − ε`.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdWindow {
    pub n: i64,
    pub eps: f64,
    pub lower: Quantile,
    pub upper: Quantile,
    pub width: f64,
    pub samples: u64,
    /// Largest band half-width of the two located points.
    pub precision: f64,
    /// False when the sample budget ran out before the target precision.
    pub on_target: bool,
}

/// Locates `p_ε` and `p_{1−ε}` as quantiles of the per-sample critical
/// values, doubling the sample count from `start` up to `max` until both
/// are located within `target`. Also returns the sorted critical values.
#[allow(clippy::too_many_arguments)]
pub fn threshold_window(
    model: Model,
    params: &ModelParams,
    shape: &Shape,
    n: i64,
    eps: f64,
    target: f64,
    (start, max): (u64, u64),
    seed: u64,
) -> Result<(ThresholdWindow, Vec<f64>), Error> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParam(format!("eps = {eps} outside (0, 1/2]")));
    }
    let dir = Direction::Horizontal;
    let mut crit = Vec::new();
    let mut want = start.max(1);
    loop {
        let have = crit.len() as u64;
        crit.extend(critical_values_range(
            model,
            params,
            shape,
            dir,
            have..want,
            seed,
        )?);
        let mut sorted = crit.clone();
        sorted.sort_by(f64::total_cmp);
        let (lower, upper) = if eps == 0.5 {
            let m = quantile(&sorted, 0.5);
            (m, m)
        } else {
            (quantile(&sorted, eps), quantile(&sorted, 1.0 - eps))
        };
        let precision = lower.precision().max(upper.precision());
        let on_target = precision <= target;
        if on_target || want >= max {
            let w = ThresholdWindow {
                n,
                eps,
                lower,
                upper,
                width: upper.value - lower.value,
                samples: want,
                precision,
                on_target,
            };
            return Ok((w, sorted));
        }
        want = (want * 2).min(max);
    }
}

/// Proportion as `(value, lo, hi)` with the 95% exact interval.
fn interval(p: &Proportion) -> (f64, f64, f64) {
    let (lo, hi) = p.clopper_pearson(0.05);
    (p.value(), lo, hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    /// Upper end of the left side's interval and lower end of the right's.
    pub lhs_hi: f64,
    pub rhs_lo: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(lhs: (f64, f64), rhs: (f64, f64)) -> Self {
        Inequality {
            lhs: lhs.0,
            rhs: rhs.0,
            lhs_hi: lhs.1,
            rhs_lo: rhs.1,
            holds: lhs.1 >= rhs.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RswReport {
    pub p: f64,
    pub s: i64,
    pub m: i64,
    pub k: i64,
    pub samples: u64,
    pub h_ss: f64,
    pub h_ksks: f64,
    pub h_m: f64,
    pub h_long: f64,
    pub c: f64,
    /// `h(2m−s, ks) ≥ h(m, ks)²·c³/k²`.
    pub extension: Inequality,
    /// `max_i Pr(X_i) ≥ Pr(H(R))·Pr(V(R₁))/k`.
    pub joined: Inequality,
    pub joined_probs: Vec<f64>,
}

/// Horizontal crossing frequency of a `w × h` rectangle.
fn h_prob(
    model: Model,
    params: &ModelParams,
    w: i64,
    h: i64,
    n: u64,
    seed: u64,
) -> Result<Proportion, Error> {
    let shape = Shape::Square(IRect::new(0, 0, w, h)?);
    crossing_probability(model, params, &shape, Direction::Horizontal, n, seed)
}

/// Per-sample outcome: horizontal crossing, vertical crossing, joined crossings.
type Outcome = (bool, bool, Vec<bool>);

/// Checks the rectangle-extension inequality and the joined-crossing
/// inequality for rectangles `R_i = [0,s]×[(i−1)s, is]` inside
/// `R = [0,m]×[0,ks]`.
pub fn rsw_inequality_check(
    model: Model,
    params: &ModelParams,
    (s, m, k): (i64, i64, i64),
    n: u64,
    seed: u64,
) -> Result<RswReport, Error> {
    if !(m > s && k >= 2 && s >= 1) {
        return Err(Error::InvalidParam("need m > s >= 1 and k >= 2".into()));
    }
    let ss = h_prob(model, params, s, s, n, sub_seed(seed, 1))?;
    let kk = h_prob(model, params, k * s, k * s, n, sub_seed(seed, 2))?;
    let hm = h_prob(model, params, m, k * s, n, sub_seed(seed, 3))?;
    let hl = h_prob(model, params, 2 * m - s, k * s, n, sub_seed(seed, 4))?;
    let (iss, ikk, ihm, ihl) = (interval(&ss), interval(&kk), interval(&hm), interval(&hl));
    let c = iss.0.min(ikk.0);
    let c_lo = iss.1.min(ikk.1);
    let k2 = (k * k) as f64;
    let extension = Inequality::new(
        (ihl.0, ihl.2),
        (
            ihm.0 * ihm.0 * c.powi(3) / k2,
            ihm.1 * ihm.1 * c_lo.powi(3) / k2,
        ),
    );

    let big = IRect::new(0, 0, m, k * s)?;
    let rows: Vec<IRect> = (0..k)
        .map(|i| IRect::new(0, i * s, s, (i + 1) * s))
        .collect::<Result<_, _>>()?;
    let seed5 = sub_seed(seed, 5);
    let per_sample: Vec<(bool, bool, Vec<bool>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let config = match model {
                Model::Bond => Configuration::sample_bond(params, big, seed5, i),
                Model::SiteSquare | Model::SiteStar => {
                    Configuration::sample_site(model.lattice(), params, big, seed5, i)?
                }
                m => {
                    return Err(Error::InvalidParam(format!(
                        "joined crossings not supported for {m:?}"
                    )))
                }
            };
            let h = perclab_core::crossing::has_crossing(
                &config,
                &big.to_rect(),
                Direction::Horizontal,
            )?
            .holds;
            let v = perclab_core::crossing::has_crossing(
                &config,
                &rows[0].to_rect(),
                Direction::Vertical,
            )?
            .holds;
            let x = rows
                .iter()
                .map(|ri| joined_vertical_crossing(&config, &big, ri))
                .collect::<Result<Vec<bool>, Error>>()?;
            Ok::<Outcome, Error>((h, v, x))
        })
        .collect::<Result<_, Error>>()?;
    let count = |f: &dyn Fn(&Outcome) -> bool| {
        Proportion::new(per_sample.iter().filter(|t| f(t)).count() as u64, n)
    };
    let ih = interval(&count(&|t| t.0));
    let iv = interval(&count(&|t| t.1));
    let xs: Vec<(f64, f64, f64)> = (0..k as usize)
        .map(|j| interval(&count(&|t| t.2[j])))
        .collect();
    let best = xs
        .iter()
        .copied()
        .fold((0.0, 0.0, 0.0), |a, b| if b.2 > a.2 { b } else { a });
    let joined = Inequality::new(
        (best.0, best.2),
        (ih.0 * iv.0 / k as f64, ih.1 * iv.1 / k as f64),
    );
    Ok(RswReport {
        p: params.p,
        s,
        m,
        k,
        samples: n,
        h_ss: iss.0,
        h_ksks: ikk.0,
        h_m: ihm.0,
        h_long: ihl.0,
        c,
        extension,
        joined,
        joined_probs: xs.iter().map(|x| x.0).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TriSelfDual {
    pub n: i64,
    pub samples: u64,
    pub long_open: f64,
    /// Closed short crossings on the same samples as `long_open`.
    pub short_closed: f64,
    /// Open short crossings on independent samples.
    pub short_open: f64,
    pub sum_closed: f64,
    pub sum_open: f64,
    pub sum_open_ci: f64,
    /// Horizontal crossing frequencies of `R` widened by 0, 1, 2, 3 columns.
    pub extensions: Vec<f64>,
    pub extensions_hold: bool,
}

/// Long-open plus short-closed (and short-open) crossing frequencies at
/// `p = ½` for the `n`-column, height-`n` triangular rectangle, and the
/// one-column extension inequality `Pr(H(R′)) ≥ Pr(H(R))/2`.
pub fn triangular_selfdual_check(n: i64, samples: u64, seed: u64) -> Result<TriSelfDual, Error> {
    let r = TriRect::new(0, n, 0, n)?;
    let long = if r.is_tall() {
        Direction::Vertical
    } else {
        Direction::Horizontal
    };
    let short = long.transverse();
    let (seed_a, seed_b) = (sub_seed(seed, 1), sub_seed(seed, 2));
    let p = 0.5;
    let rows: Vec<(bool, bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let f = SiteField {
                seed: seed_a,
                index: i,
                p,
            };
            let closed = |s: Site| !f.site_open(s);
            let g = SiteField {
                seed: seed_b,
                index: i,
                p,
            };
            (
                tri_crossing(&f, &r, long).is_some(),
                tri_crossing(&closed, &r, short).is_some(),
                tri_crossing(&g, &r, short).is_some(),
            )
        })
        .collect();
    let prop = |f: fn(&(bool, bool, bool)) -> bool| {
        Proportion::new(rows.iter().filter(|t| f(t)).count() as u64, samples)
    };
    let (lo, sc, so) = (prop(|t| t.0), prop(|t| t.1), prop(|t| t.2));
    let seed_c = sub_seed(seed, 3);
    let mut ext = Vec::new();
    for j in 0..4 {
        let shape = Shape::Tri(TriRect::new(0, n + j, 0, n)?);
        let params = ModelParams::new(p)?;
        ext.push(crossing_probability(
            Model::SiteTriangular,
            &params,
            &shape,
            Direction::Horizontal,
            samples,
            seed_c,
        )?);
    }
    let extensions_hold = ext
        .windows(2)
        .all(|w| w[1].clopper_pearson(0.05).1 >= w[0].clopper_pearson(0.05).0 / 2.0);
    Ok(TriSelfDual {
        n,
        samples,
        long_open: lo.value(),
        short_closed: sc.value(),
        short_open: so.value(),
        sum_closed: lo.value() + sc.value(),
        sum_open: lo.value() + so.value(),
        sum_open_ci: 1.96 * (lo.sigma().powi(2) + so.sigma().powi(2)).sqrt(),
        extensions: ext.iter().map(|e| e.value()).collect(),
        extensions_hold,
    })
}
