//! Reproducible configurations for every model.
//!
//! A [`Configuration`] is an immutable packed array of cell states over an
//! integer window. Cells are ordered row-major (by y, then x) over the
//! window's sites; bond-type models use cell `2·i + d` for the edge with
//! lower-left endpoint `i` and direction `d` (E = 0, N = 1). Voronoi fields
//! use two bits per site: 0 = no site, 1 = open site (+1), 2 = closed site (−1).
//!
//! The lazy fields [`BondField`] and [`SiteField`] evaluate the same states
//! on demand without a window, which is what cluster searches on large boxes
//! use.

use serde::{Deserialize, Serialize};

use crate::depbond::WeightFunction;
use crate::error::{Error, Result};
use crate::lattice::{Dir, EdgeId, IRect, LatticeKind, Site};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Bond,
    SiteSquare,
    SiteStar,
    SiteTriangular,
    DepBond,
    Voronoi,
}

impl Model {
    pub fn tag(self) -> u8 {
        match self {
            Model::Bond => 0,
            Model::SiteSquare => 1,
            Model::SiteStar => 2,
            Model::SiteTriangular => 3,
            Model::DepBond => 4,
            Model::Voronoi => 5,
        }
    }

    pub fn from_tag(t: u8) -> Result<Model> {
        Ok(match t {
            0 => Model::Bond,
            1 => Model::SiteSquare,
            2 => Model::SiteStar,
            3 => Model::SiteTriangular,
            4 => Model::DepBond,
            5 => Model::Voronoi,
            _ => return Err(Error::Format(format!("unknown model tag {t}"))),
        })
    }

    /// Lattice on which crossings of this model are evaluated.
    pub fn lattice(self) -> LatticeKind {
        match self {
            Model::Bond | Model::DepBond => LatticeKind::BondSquare,
            Model::SiteSquare | Model::Voronoi => LatticeKind::SiteSquare,
            Model::SiteStar => LatticeKind::SiteStar,
            Model::SiteTriangular => LatticeKind::SiteTriangular,
        }
    }

    pub fn for_site_lattice(kind: LatticeKind) -> Model {
        match kind {
            LatticeKind::BondSquare => Model::Bond,
            LatticeKind::SiteSquare => Model::SiteSquare,
            LatticeKind::SiteStar => Model::SiteStar,
            LatticeKind::SiteTriangular => Model::SiteTriangular,
        }
    }

    pub fn is_bond(self) -> bool {
        matches!(self, Model::Bond | Model::DepBond)
    }

    fn bits_per_cell(self) -> u8 {
        if self == Model::Voronoi {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    /// Site-retention probability (Voronoi only).
    pub pi: f64,
    /// Weight function (dependent bond model only).
    pub weight: Option<WeightFunction>,
}

impl ModelParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("p = {p} outside [0, 1]")));
        }
        Ok(ModelParams {
            p,
            pi: 1.0,
            weight: None,
        })
    }

    pub fn with_pi(mut self, pi: f64) -> Result<Self> {
        if !(pi > 0.0 && pi <= 1.0) {
            return Err(Error::InvalidParam(format!("pi = {pi} outside (0, 1]")));
        }
        self.pi = pi;
        Ok(self)
    }

    pub fn with_weight(mut self, w: WeightFunction) -> Self {
        self.weight = Some(w);
        self
    }
}

/// Read access to bond states (primal edges of ℤ²).
pub trait EdgeStates {
    fn edge_open(&self, e: EdgeId) -> bool;
}

/// Read access to site states.
pub trait SiteStates {
    fn site_open(&self, s: Site) -> bool;
}

impl<F: Fn(EdgeId) -> bool> EdgeStates for F {
    fn edge_open(&self, e: EdgeId) -> bool {
        self(e)
    }
}

impl<F: Fn(Site) -> bool> SiteStates for F {
    fn site_open(&self, s: Site) -> bool {
        self(s)
    }
}

#[inline]
pub fn edge_uniform(seed: u64, index: u64, e: EdgeId) -> f64 {
    debug_assert!(!e.dual);
    let stream = match e.dir {
        Dir::E => Stream::BondEast,
        Dir::N => Stream::BondNorth,
    };
    rng::uniform(seed, index, stream, e.origin.x, e.origin.y)
}

#[inline]
pub fn site_uniform(seed: u64, index: u64, s: Site) -> f64 {
    rng::uniform(seed, index, Stream::Site, s.x, s.y)
}

/// Independent bond states evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct BondField {
    pub seed: u64,
    pub index: u64,
    pub p: f64,
}

impl EdgeStates for BondField {
    #[inline]
    fn edge_open(&self, e: EdgeId) -> bool {
        rng::is_open(edge_uniform(self.seed, self.index, e), self.p)
    }
}

/// Independent site states evaluated on demand.
#[derive(Debug, Clone, Copy)]
pub struct SiteField {
    pub seed: u64,
    pub index: u64,
    pub p: f64,
}

impl SiteStates for SiteField {
    #[inline]
    fn site_open(&self, s: Site) -> bool {
        rng::is_open(site_uniform(self.seed, self.index, s), self.p)
    }
}

const MAGIC: &[u8; 4] = b"PLCF";
const FORMAT_VERSION: u16 = 1;

/// Immutable packed cell states over an integer window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    model: Model,
    window: IRect,
    seed: u64,
    index: u64,
    n_cells: usize,
    words: Vec<u64>,
    dependence: Option<i64>,
}

impl Configuration {
    fn empty(model: Model, window: IRect, seed: u64, index: u64) -> Self {
        let sites = window.num_sites();
        let n_cells = if model.is_bond() { 2 * sites } else { sites };
        let bits = n_cells * model.bits_per_cell() as usize;
        Configuration {
            model,
            window,
            seed,
            index,
            n_cells,
            words: vec![0; bits.div_ceil(64)],
            dependence: None,
        }
    }

    #[inline]
    fn get(&self, cell: usize) -> u8 {
        let b = self.model.bits_per_cell() as usize;
        let bit = cell * b;
        ((self.words[bit / 64] >> (bit % 64)) & ((1 << b) - 1)) as u8
    }

    #[inline]
    fn set(&mut self, cell: usize, v: u8) {
        let b = self.model.bits_per_cell() as usize;
        let bit = cell * b;
        let mask = ((1u64 << b) - 1) << (bit % 64);
        let w = &mut self.words[bit / 64];
        *w = (*w & !mask) | ((v as u64) << (bit % 64));
    }

    fn edge_cell(&self, e: EdgeId) -> Option<usize> {
        if e.dual || !self.window.contains_edge(e) {
            return None;
        }
        let d = match e.dir {
            Dir::E => 0,
            Dir::N => 1,
        };
        Some(2 * self.window.index(e.origin) + d)
    }

    /// Bond-type configuration from an arbitrary state function over the
    /// edges inside `window`.
    pub fn from_edges(
        model: Model,
        window: IRect,
        seed: u64,
        index: u64,
        open: impl Fn(EdgeId) -> bool,
    ) -> Self {
        assert!(model.is_bond());
        let mut c = Configuration::empty(model, window, seed, index);
        for e in window.edges() {
            if open(e) {
                let cell = c.edge_cell(e).expect("edge in window");
                c.set(cell, 1);
            }
        }
        c
    }

    /// Site configuration from an arbitrary state function over `window`.
    pub fn from_sites(
        model: Model,
        window: IRect,
        seed: u64,
        index: u64,
        open: impl Fn(Site) -> bool,
    ) -> Self {
        assert!(!model.is_bond() && model != Model::Voronoi);
        let mut c = Configuration::empty(model, window, seed, index);
        for (i, s) in window.sites().enumerate() {
            if open(s) {
                c.set(i, 1);
            }
        }
        c
    }

    /// Voronoi field from explicit values in {−1, 0, +1}.
    pub fn from_voronoi_values(
        window: IRect,
        seed: u64,
        index: u64,
        value: impl Fn(Site) -> i8,
    ) -> Self {
        let mut c = Configuration::empty(Model::Voronoi, window, seed, index);
        for (i, s) in window.sites().enumerate() {
            let code = match value(s) {
                0 => 0,
                1 => 1,
                -1 => 2,
                v => panic!("voronoi value {v} out of range"),
            };
            c.set(i, code);
        }
        c
    }

    /// Independent bond percolation on the edges inside `window`.
    pub fn sample_bond(params: &ModelParams, window: IRect, seed: u64, index: u64) -> Self {
        let f = BondField {
            seed,
            index,
            p: params.p,
        };
        Configuration::from_edges(Model::Bond, window, seed, index, |e| f.edge_open(e))
    }

    /// Independent site percolation; for the triangular lattice the window
    /// is in axial index space. Square and star models share the field.
    pub fn sample_site(
        kind: LatticeKind,
        params: &ModelParams,
        window: IRect,
        seed: u64,
        index: u64,
    ) -> Result<Self> {
        if kind == LatticeKind::BondSquare {
            return Err(Error::InvalidParam(
                "sample_site needs a site lattice".into(),
            ));
        }
        let f = SiteField {
            seed,
            index,
            p: params.p,
        };
        Ok(Configuration::from_sites(
            Model::for_site_lattice(kind),
            window,
            seed,
            index,
            |s| f.site_open(s),
        ))
    }

    /// Thinned, coloured site field: `v = +1` w.p. `πp`, `−1` w.p. `π(1−p)`,
    /// `0` otherwise. A single variate `u` per point decides both, so the
    /// site set does not depend on `p` and colours are monotone in `p`.
    pub fn sample_voronoi_field(
        params: &ModelParams,
        window: IRect,
        seed: u64,
        index: u64,
    ) -> Self {
        Configuration::from_voronoi_values(window, seed, index, |s| {
            voronoi_value(
                rng::uniform(seed, index, Stream::Voronoi, s.x, s.y),
                params.p,
                params.pi,
            )
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn window(&self) -> IRect {
        self.window
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_index(&self) -> u64 {
        self.index
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Packed state words (little-endian bit order within each word).
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Recorded L∞ dependence range between edge midpoints, if any.
    pub fn dependence(&self) -> Option<i64> {
        self.dependence
    }

    pub(crate) fn set_dependence(&mut self, d: i64) {
        self.dependence = Some(d);
    }

    /// Voronoi value at `z`, or `None` outside the window.
    pub fn voronoi_value(&self, z: Site) -> Option<i8> {
        assert_eq!(self.model, Model::Voronoi);
        if !self.window.contains(z) {
            return None;
        }
        Some(match self.get(self.window.index(z)) {
            0 => 0,
            1 => 1,
            _ => -1,
        })
    }

    /// Copy with one edge's state replaced.
    pub fn with_edge(&self, e: EdgeId, open: bool) -> Self {
        let mut c = self.clone();
        let cell = c.edge_cell(e).expect("edge outside window");
        c.set(cell, open as u8);
        c
    }

    /// Copy with one site's state replaced.
    pub fn with_site(&self, s: Site, open: bool) -> Self {
        assert!(!self.model.is_bond() && self.window.contains(s));
        let mut c = self.clone();
        let i = c.window.index(s);
        c.set(i, open as u8);
        c
    }

    /// Number of open cells.
    pub fn count_open(&self) -> usize {
        if self.model.is_bond() {
            self.window
                .edges()
                .into_iter()
                .filter(|&e| self.edge_open(e))
                .count()
        } else {
            (0..self.n_cells).filter(|&i| self.get(i) == 1).count()
        }
    }

    /// Binary layout: magic `PLCF`, format version (u16), model tag (u8),
    /// bits per cell (u8), window x0 y0 x1 y1 (i64 each), seed (u64),
    /// sample index (u64), cell count (u64), packed words (u64 each). All
    /// integers little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 8 * self.words.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.model.tag());
        out.push(self.model.bits_per_cell());
        for v in [
            self.window.x0,
            self.window.y0,
            self.window.x1,
            self.window.y1,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.index.to_le_bytes());
        out.extend_from_slice(&(self.n_cells as u64).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = bytes;
        let mut take = |n: usize| -> Result<&[u8]> {
            if cur.len() < n {
                return Err(Error::Format("truncated configuration".into()));
            }
            let (a, b) = cur.split_at(n);
            cur = b;
            Ok(a)
        };
        if take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let model = Model::from_tag(take(1)?[0])?;
        let bits = take(1)?[0];
        if bits != model.bits_per_cell() {
            return Err(Error::Format("bits per cell does not match model".into()));
        }
        let mut i64s = [0i64; 4];
        for v in &mut i64s {
            *v = i64::from_le_bytes(take(8)?.try_into().unwrap());
        }
        let window = IRect::new(i64s[0], i64s[1], i64s[2], i64s[3])
            .map_err(|e| Error::Format(e.to_string()))?;
        let seed = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let index = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let n_cells = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let mut c = Configuration::empty(model, window, seed, index);
        if c.n_cells != n_cells {
            return Err(Error::Format("cell count does not match window".into()));
        }
        for w in c.words.iter_mut() {
            *w = u64::from_le_bytes(take(8)?.try_into().unwrap());
        }
        if !cur.is_empty() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(c)
    }
}

impl EdgeStates for Configuration {
    /// Panics if the edge is not inside the window.
    #[inline]
    fn edge_open(&self, e: EdgeId) -> bool {
        assert!(self.model.is_bond());
        let cell = self
            .edge_cell(e)
            .expect("edge outside configuration window");
        self.get(cell) == 1
    }
}

impl SiteStates for Configuration {
    /// Panics if the site is not inside the window. For a Voronoi field a
    /// site is open iff its value is +1.
    #[inline]
    fn site_open(&self, s: Site) -> bool {
        assert!(!self.model.is_bond());
        assert!(
            self.window.contains(s),
            "site {s} outside configuration window"
        );
        self.get(self.window.index(s)) == 1
    }
}

/// Voronoi value from a uniform variate.
#[inline]
pub fn voronoi_value(u: f64, p: f64, pi: f64) -> i8 {
    if u < pi * p {
        1
    } else if u < pi {
        -1
    } else {
        0
    }
}
