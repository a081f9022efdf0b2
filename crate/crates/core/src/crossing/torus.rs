//! Percolation on a torus: the quotient of a lattice by axis-aligned periods.
//!
//! States are keyed by reduced coordinates, so a rectangle small enough not
//! to wrap sees exactly the same joint law (and, with shared seeds, the same
//! states up to translation) as on the plane.

use super::{bond_crossing, site_crossing, tri_crossing, Direction};
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, IRect, LatticeKind, Site, TriRect};
use crate::sample::{edge_uniform, site_uniform, ModelParams};

/// Torus with periods `(width, height)` in lattice index units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Torus {
    pub kind: LatticeKind,
    pub width: i64,
    pub height: i64,
}

impl Torus {
    pub fn new(kind: LatticeKind, width: i64, height: i64) -> Result<Self> {
        if width < 3 || height < 3 {
            return Err(Error::InvalidParam(
                "torus periods must be at least 3".into(),
            ));
        }
        if kind == LatticeKind::SiteTriangular && width % 2 != 0 {
            return Err(Error::InvalidParam(
                "triangular torus needs an even column period".into(),
            ));
        }
        Ok(Torus {
            kind,
            width,
            height,
        })
    }

    pub fn reduce(&self, s: Site) -> Site {
        Site::new(s.x.rem_euclid(self.width), s.y.rem_euclid(self.height))
    }

    /// A rectangle embeds isomorphically iff it spans at most `period − 2`
    /// in each direction (otherwise opposite sides become adjacent).
    pub fn check_fits(&self, w: i64, h: i64) -> Result<()> {
        if w + 2 > self.width || h + 2 > self.height {
            return Err(Error::Wrapping);
        }
        Ok(())
    }

    /// Horizontal crossing of the rectangle with lower-left corner `(x, y)`
    /// and spans `(w, h)` under the torus states produced by `open_site` /
    /// `open_edge` on reduced coordinates.
    fn crossing_at(
        &self,
        x: i64,
        y: i64,
        w: i64,
        h: i64,
        open_site: &dyn Fn(Site) -> bool,
        open_edge: &dyn Fn(EdgeId) -> bool,
    ) -> bool {
        let site = |s: Site| open_site(self.reduce(s));
        let edge = |e: EdgeId| {
            let mut e = e;
            e.origin = self.reduce(e.origin);
            open_edge(e)
        };
        match self.kind {
            LatticeKind::BondSquare => {
                bond_crossing(&edge, &IRect::at(x, y, w, h), Direction::Horizontal).is_some()
            }
            LatticeKind::SiteSquare | LatticeKind::SiteStar => site_crossing(
                &site,
                self.kind,
                &IRect::at(x, y, w, h),
                Direction::Horizontal,
            )
            .is_some(),
            LatticeKind::SiteTriangular => {
                let r = TriRect::new(x, x + w, y, y + h).expect("valid triangular rectangle");
                tri_crossing(&site, &r, Direction::Horizontal).is_some()
            }
        }
    }
}

fn sampled_states(
    torus: &Torus,
    params: &ModelParams,
    seed: u64,
    index: u64,
) -> (impl Fn(Site) -> bool, impl Fn(EdgeId) -> bool) {
    let p = params.p;
    let t = *torus;
    let site = move |s: Site| site_uniform(seed, index, t.reduce(s)) < p;
    let edge = move |e: EdgeId| {
        let mut e = e;
        e.origin = t.reduce(e.origin);
        edge_uniform(seed, index, e) < p
    };
    (site, edge)
}

/// Horizontal crossing of `r` on the torus. Rejects wrapping rectangles.
/// For the triangular lattice `r` is in axial index space.
pub fn torus_crossing(
    torus: &Torus,
    params: &ModelParams,
    r: &IRect,
    seed: u64,
    index: u64,
) -> Result<bool> {
    torus.check_fits(r.width(), r.height())?;
    let (site, edge) = sampled_states(torus, params, seed, index);
    Ok(torus.crossing_at(r.x0, r.y0, r.width(), r.height(), &site, &edge))
}

/// Whether some translate of a `w × h` rectangle has a horizontal crossing.
pub fn torus_some_crossing(
    torus: &Torus,
    params: &ModelParams,
    dims: (i64, i64),
    seed: u64,
    index: u64,
) -> Result<bool> {
    let (site, edge) = sampled_states(torus, params, seed, index);
    torus_some_crossing_with(torus, dims, &site, &edge)
}

/// [`torus_some_crossing`] with explicit state functions on reduced
/// coordinates.
pub fn torus_some_crossing_with(
    torus: &Torus,
    dims: (i64, i64),
    open_site: &dyn Fn(Site) -> bool,
    open_edge: &dyn Fn(EdgeId) -> bool,
) -> Result<bool> {
    torus.check_fits(dims.0, dims.1)?;
    let step = if torus.kind == LatticeKind::SiteTriangular {
        2
    } else {
        1
    };
    for y in 0..torus.height {
        for x in (0..torus.width).step_by(step) {
            if torus.crossing_at(x, y, dims.0, dims.1, open_site, open_edge) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
