//! Lattice geometry: vertex sets, adjacency, exact embeddings and duality.
//!
//! Square-lattice vertices are points of ℤ². Triangular-lattice vertices use
//! axial indices `(i, j)` embedded at `x = i·√3/2`, `y = j + (i mod 2)/2`, so
//! that the origin and `(0, 1)` are vertices and all edges have length 1.
//! Geometry on the triangular lattice is carried out in exact
//! `a + b·√3/2` arithmetic ([`Surd`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeKind {
    BondSquare,
    SiteSquare,
    SiteStar,
    SiteTriangular,
}

impl LatticeKind {
    /// Lattice whose closed paths block open paths of `self` (site models).
    pub fn matching(self) -> LatticeKind {
        match self {
            LatticeKind::SiteSquare => LatticeKind::SiteStar,
            LatticeKind::SiteStar => LatticeKind::SiteSquare,
            k => k,
        }
    }
}

/// A vertex: a point of ℤ², or axial indices for the triangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i64, y: i64) -> Self {
        Site { x, y }
    }

    #[inline]
    pub fn offset(self, dx: i64, dy: i64) -> Site {
        Site::new(self.x + dx, self.y + dy)
    }

    pub fn linf(self, other: Site) -> i64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn l1(self, other: Site) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    E,
    N,
}

/// An edge of ℤ² (or of the dual lattice on (ℤ+½)²), named by its lower-left
/// endpoint and direction. For a dual edge, `origin = (a, b)` stands for the
/// dual vertex `(a+½, b+½)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId {
    pub origin: Site,
    pub dir: Dir,
    pub dual: bool,
}

impl EdgeId {
    #[inline]
    pub const fn primal(x: i64, y: i64, dir: Dir) -> Self {
        EdgeId {
            origin: Site::new(x, y),
            dir,
            dual: false,
        }
    }

    #[inline]
    pub const fn dual(a: i64, b: i64, dir: Dir) -> Self {
        EdgeId {
            origin: Site::new(a, b),
            dir,
            dual: true,
        }
    }

    /// Primal edge joining two adjacent sites of ℤ².
    pub fn between(u: Site, v: Site) -> Option<EdgeId> {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        match (b.x - a.x, b.y - a.y) {
            (1, 0) => Some(EdgeId::primal(a.x, a.y, Dir::E)),
            (0, 1) => Some(EdgeId::primal(a.x, a.y, Dir::N)),
            _ => None,
        }
    }

    /// Both endpoints (in the lattice the edge belongs to).
    pub fn endpoints(self) -> (Site, Site) {
        let o = self.origin;
        match self.dir {
            Dir::E => (o, o.offset(1, 0)),
            Dir::N => (o, o.offset(0, 1)),
        }
    }

    /// Midpoint in doubled coordinates (so it is always integral).
    pub fn midpoint2(self) -> (i64, i64) {
        let (a, b) = (self.origin.x, self.origin.y);
        match (self.dual, self.dir) {
            (false, Dir::E) => (2 * a + 1, 2 * b),
            (false, Dir::N) => (2 * a, 2 * b + 1),
            (true, Dir::E) => (2 * a + 2, 2 * b + 1),
            (true, Dir::N) => (2 * a + 1, 2 * b + 2),
        }
    }
}

/// The edge of the other lattice crossing `e` at its midpoint. Involutive.
pub fn dual_edge(e: EdgeId) -> EdgeId {
    let Site { x, y } = e.origin;
    match (e.dual, e.dir) {
        (false, Dir::E) => EdgeId::dual(x, y - 1, Dir::N),
        (false, Dir::N) => EdgeId::dual(x - 1, y, Dir::E),
        (true, Dir::N) => EdgeId::primal(x, y + 1, Dir::E),
        (true, Dir::E) => EdgeId::primal(x + 1, y, Dir::N),
    }
}

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(√3)

/// Exact number `rat + half_sqrt3 · √3/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surd {
    pub rat: Q,
    pub half_sqrt3: Q,
}

impl Surd {
    pub fn new(rat: Q, half_sqrt3: Q) -> Self {
        Surd { rat, half_sqrt3 }
    }

    pub fn int(v: i64) -> Self {
        Surd::new(Q::from_integer(v), Q::from_integer(0))
    }

    pub fn rational(q: Q) -> Self {
        Surd::new(q, Q::from_integer(0))
    }

    /// `k · √3/2`.
    pub fn columns(k: i64) -> Self {
        Surd::new(Q::from_integer(0), Q::from_integer(k))
    }

    pub fn zero() -> Self {
        Surd::int(0)
    }

    pub fn is_rational(&self) -> bool {
        *self.half_sqrt3.numer() == 0
    }

    pub fn signum(&self) -> i32 {
        let sr = q_sign(self.rat);
        let ss = q_sign(self.half_sqrt3);
        if sr == 0 || ss == 0 || sr == ss {
            return if sr != 0 { sr } else { ss };
        }
        // opposite signs: compare rat² with (3/4)·half_sqrt3²
        let r = to128(self.rat);
        let s = to128(self.half_sqrt3);
        let lhs = r * r * Ratio::from_integer(4);
        let rhs = s * s * Ratio::from_integer(3);
        if lhs > rhs {
            sr
        } else {
            ss
        }
    }

    pub fn to_f64(&self) -> f64 {
        q_f64(self.rat) + q_f64(self.half_sqrt3) * 3f64.sqrt() / 2.0
    }
}

fn q_sign(q: Q) -> i32 {
    q.numer().signum() as i32 * q.denom().signum() as i32
}

fn to128(q: Q) -> Ratio<i128> {
    Ratio::new(*q.numer() as i128, *q.denom() as i128)
}

pub(crate) fn q_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd::new(self.rat + o.rat, self.half_sqrt3 + o.half_sqrt3)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd::new(self.rat - o.rat, self.half_sqrt3 - o.half_sqrt3)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-self.rat, -self.half_sqrt3)
    }
}

impl Mul for Surd {
    type Output = Surd;
    // (a + b t)(c + d t) with t² = 3/4
    fn mul(self, o: Surd) -> Surd {
        let three_quarters = Q::new(3, 4);
        Surd::new(
            self.rat * o.rat + three_quarters * self.half_sqrt3 * o.half_sqrt3,
            self.rat * o.half_sqrt3 + self.half_sqrt3 * o.rat,
        )
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

/// Exact embedded position of a triangular-lattice vertex.
pub fn tri_position(s: Site) -> (Surd, Q) {
    let parity = s.x.rem_euclid(2);
    (Surd::columns(s.x), Q::from_integer(s.y) + Q::new(parity, 2))
}

/// Exact embedded position of a vertex of any lattice kind.
pub fn position(kind: LatticeKind, s: Site) -> (Surd, Q) {
    match kind {
        LatticeKind::SiteTriangular => tri_position(s),
        _ => (Surd::int(s.x), Q::from_integer(s.y)),
    }
}

/// Exact squared Euclidean distance between embedded points.
pub fn sq_dist(a: (Surd, Q), b: (Surd, Q)) -> Surd {
    let dx = a.0 - b.0;
    let dy = Surd::rational(a.1 - b.1);
    dx * dx + dy * dy
}

// ---------------------------------------------------------------------------
// Rectangles

/// Closed axis-aligned rectangle with exact corners. The x-coordinates may be
/// multiples of √3/2 (for the triangular lattice); y-coordinates are rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: Surd,
    pub y0: Q,
    pub x1: Surd,
    pub y1: Q,
}

impl Rect {
    pub fn new(x0: Surd, y0: Q, x1: Surd, y1: Q) -> Result<Self> {
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidRect("need x0 < x1 and y0 < y1".into()));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn from_ints(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self> {
        Rect::new(
            Surd::int(x0),
            Q::from_integer(y0),
            Surd::int(x1),
            Q::from_integer(y1),
        )
    }

    pub fn from_q(x0: Q, y0: Q, x1: Q, y1: Q) -> Result<Self> {
        Rect::new(Surd::rational(x0), y0, Surd::rational(x1), y1)
    }

    /// Closed-set membership.
    pub fn contains(&self, p: (Surd, Q)) -> bool {
        self.x0 <= p.0 && p.0 <= self.x1 && self.y0 <= p.1 && p.1 <= self.y1
    }

    /// Integer corners, if all four are integers.
    pub fn as_int(&self) -> Option<IRect> {
        let int = |q: Q| q.is_integer().then(|| q.to_integer());
        if !self.x0.is_rational() || !self.x1.is_rational() {
            return None;
        }
        Some(IRect {
            x0: int(self.x0.rat)?,
            y0: int(self.y0)?,
            x1: int(self.x1.rat)?,
            y1: int(self.y1)?,
        })
    }
}

/// Rectangle `[x0, x1] × [y0, y1]` with integer corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl IRect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::InvalidRect(format!(
                "[{x0},{x1}]x[{y0},{y1}] is empty"
            )));
        }
        Ok(IRect { x0, y0, x1, y1 })
    }

    /// `[x, x+w] × [y, y+h]`.
    pub fn at(x: i64, y: i64, w: i64, h: i64) -> Self {
        IRect {
            x0: x,
            y0: y,
            x1: x + w,
            y1: y + h,
        }
    }

    /// The box `[-r, r]²`.
    pub fn centered(r: i64) -> Self {
        IRect::at(-r, -r, 2 * r, 2 * r)
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    /// Number of lattice points (columns × rows).
    pub fn num_sites(&self) -> usize {
        ((self.width() + 1) * (self.height() + 1)) as usize
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        self.x0 <= s.x && s.x <= self.x1 && self.y0 <= s.y && s.y <= self.y1
    }

    pub fn contains_rect(&self, r: &IRect) -> bool {
        self.x0 <= r.x0 && r.x1 <= self.x1 && self.y0 <= r.y0 && r.y1 <= self.y1
    }

    /// Row-major index of a site (rows by y, then x).
    #[inline]
    pub fn index(&self, s: Site) -> usize {
        debug_assert!(self.contains(s));
        ((s.y - self.y0) * (self.width() + 1) + (s.x - self.x0)) as usize
    }

    #[inline]
    pub fn site_at(&self, idx: usize) -> Site {
        let w = self.width() + 1;
        Site::new(self.x0 + idx as i64 % w, self.y0 + idx as i64 / w)
    }

    /// Sites in row-major order (by y, then x).
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| Site::new(x, y)))
    }

    /// Primal edges with both endpoints in the rectangle, in row-major order
    /// of their lower-left endpoint, east before north.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for s in self.sites() {
            if s.x < self.x1 {
                out.push(EdgeId::primal(s.x, s.y, Dir::E));
            }
            if s.y < self.y1 {
                out.push(EdgeId::primal(s.x, s.y, Dir::N));
            }
        }
        out
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        let (a, b) = e.endpoints();
        self.contains(a) && self.contains(b)
    }

    pub fn grow(&self, d: i64) -> IRect {
        IRect {
            x0: self.x0 - d,
            y0: self.y0 - d,
            x1: self.x1 + d,
            y1: self.y1 + d,
        }
    }

    pub fn translate(&self, dx: i64, dy: i64) -> IRect {
        IRect::at(self.x0 + dx, self.y0 + dy, self.width(), self.height())
    }

    /// Overlap of closed rectangles (sharing a boundary counts).
    pub fn intersects(&self, o: &IRect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn to_rect(&self) -> Rect {
        Rect {
            x0: Surd::int(self.x0),
            y0: Q::from_integer(self.y0),
            x1: Surd::int(self.x1),
            y1: Q::from_integer(self.y1),
        }
    }
}

impl fmt::Display for IRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]x[{},{}]", self.x0, self.x1, self.y0, self.y1)
    }
}

/// Axis-aligned rectangle for the triangular lattice: x from `c0·√3/2` to
/// `c1·√3/2`, y from `y0` to `y1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriRect {
    pub c0: i64,
    pub c1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl TriRect {
    pub fn new(c0: i64, c1: i64, y0: i64, y1: i64) -> Result<Self> {
        if c1 - c0 < 2 || y1 - y0 < 2 {
            return Err(Error::InvalidRect(
                "triangular rectangles need both sides >= 2".into(),
            ));
        }
        Ok(TriRect { c0, c1, y0, y1 })
    }

    /// Row range `[lo, hi]` of axial `j` in column `c`.
    pub fn rows(&self, c: i64) -> (i64, i64) {
        if c.rem_euclid(2) == 0 {
            (self.y0, self.y1)
        } else {
            (self.y0, self.y1 - 1)
        }
    }

    pub fn contains(&self, s: Site) -> bool {
        if s.x < self.c0 || s.x > self.c1 {
            return false;
        }
        let (lo, hi) = self.rows(s.x);
        lo <= s.y && s.y <= hi
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (self.c0..=self.c1).flat_map(move |c| {
            let (lo, hi) = self.rows(c);
            (lo..=hi).map(move |j| Site::new(c, j))
        })
    }

    /// Width in units of √3/2 and height.
    pub fn is_tall(&self) -> bool {
        // height > width·√3/2  <=>  4·h² > 3·w²
        let w = (self.c1 - self.c0) as i128;
        let h = (self.y1 - self.y0) as i128;
        4 * h * h > 3 * w * w
    }

    pub fn to_rect(&self) -> Rect {
        Rect {
            x0: Surd::columns(self.c0),
            y0: Q::from_integer(self.y0),
            x1: Surd::columns(self.c1),
            y1: Q::from_integer(self.y1),
        }
    }
}

// ---------------------------------------------------------------------------
// Vertex sets and adjacency

/// Lattice vertices in the closed rectangle, row-major by embedded y then x.
pub fn vertices_in(kind: LatticeKind, r: &Rect) -> Vec<Site> {
    let (xlo, xhi) = (r.x0.to_f64(), r.x1.to_f64());
    let (ylo, yhi) = (q_f64(r.y0), q_f64(r.y1));
    let (ilo, ihi) = match kind {
        LatticeKind::SiteTriangular => {
            let c = 3f64.sqrt() / 2.0;
            ((xlo / c).floor() as i64 - 1, (xhi / c).ceil() as i64 + 1)
        }
        _ => (xlo.floor() as i64 - 1, xhi.ceil() as i64 + 1),
    };
    let (jlo, jhi) = (ylo.floor() as i64 - 1, yhi.ceil() as i64 + 1);
    let mut out: Vec<(Q, Surd, Site)> = Vec::new();
    for i in ilo..=ihi {
        for j in jlo..=jhi {
            let s = Site::new(i, j);
            let p = position(kind, s);
            if r.contains(p) {
                out.push((p.1, p.0, s));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    out.into_iter().map(|t| t.2).collect()
}

const SQUARE_NB: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const STAR_NB: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Offsets of the six triangular neighbours of a vertex in column `i`:
/// up, down, right-upper, right-lower, left-upper, left-lower.
#[inline]
pub fn tri_offsets(i: i64) -> [(i64, i64); 6] {
    if i.rem_euclid(2) == 0 {
        [(0, 1), (0, -1), (1, 0), (1, -1), (-1, 0), (-1, -1)]
    } else {
        [(0, 1), (0, -1), (1, 1), (1, 0), (-1, 1), (-1, 0)]
    }
}

/// Calls `f` on every neighbour of `v`, in the documented order.
#[inline]
pub fn for_each_neighbor(kind: LatticeKind, v: Site, mut f: impl FnMut(Site)) {
    match kind {
        LatticeKind::BondSquare | LatticeKind::SiteSquare => {
            for (dx, dy) in SQUARE_NB {
                f(v.offset(dx, dy));
            }
        }
        LatticeKind::SiteStar => {
            for (dx, dy) in STAR_NB {
                f(v.offset(dx, dy));
            }
        }
        LatticeKind::SiteTriangular => {
            for (dx, dy) in tri_offsets(v.x) {
                f(v.offset(dx, dy));
            }
        }
    }
}

/// Adjacent vertices: 4 (square), 8 (star) or 6 (triangular). Square order is
/// E, N, W, S; star order is counter-clockwise from E.
pub fn neighbors(kind: LatticeKind, v: Site) -> Vec<Site> {
    let mut out = Vec::with_capacity(8);
    for_each_neighbor(kind, v, |w| out.push(w));
    out
}

pub fn adjacent(kind: LatticeKind, u: Site, v: Site) -> bool {
    match kind {
        LatticeKind::BondSquare | LatticeKind::SiteSquare => u.l1(v) == 1,
        LatticeKind::SiteStar => u.linf(v) == 1,
        LatticeKind::SiteTriangular => tri_offsets(u.x)
            .iter()
            .any(|&(dx, dy)| u.offset(dx, dy) == v),
    }
}

/// `[x0+½, x1−½] × [y0−½, y1+½]`: the rectangle of the dual lattice whose
/// closed vertical crossings block horizontal open crossings of `r`.
pub fn dual_rect(r: &Rect) -> Result<Rect> {
    let ir = r
        .as_int()
        .ok_or_else(|| Error::InvalidRect("dual_rect needs integer corners".into()))?;
    if ir.width() < 2 || ir.height() < 1 {
        return Err(Error::InvalidRect(
            "dual_rect needs width >= 2 and height >= 1".into(),
        ));
    }
    let h = Q::new(1, 2);
    let x0 = Q::from_integer(ir.x0) + h;
    let x1 = Q::from_integer(ir.x1) - h;
    let y0 = Q::from_integer(ir.y0) - h;
    let y1 = Q::from_integer(ir.y1) + h;
    Rect::from_q(x0, y0, x1, y1)
}

/// Index form of [`dual_rect`]: the dual vertices `(a+½, b+½)` of the dual
/// rectangle are exactly those with `(a, b)` in the returned integer box.
pub fn dual_index_rect(r: &IRect) -> Result<IRect> {
    if r.width() < 2 || r.height() < 1 {
        return Err(Error::InvalidRect(
            "dual_rect needs width >= 2 and height >= 1".into(),
        ));
    }
    Ok(IRect {
        x0: r.x0,
        y0: r.y0 - 1,
        x1: r.x1 - 1,
        y1: r.y1,
    })
}

/// Four `3m × m` rectangles forming a ring around an `(m−1) × (m−1)` square.
///
/// Corner coordinates are lattice indices; for a closed-dual annulus they are
/// dual indices (`(a, b)` meaning `(a+½, b+½)`). The outer square is
/// `[x, x+3m] × [y, y+3m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annulus {
    pub top: IRect,
    pub bottom: IRect,
    pub left: IRect,
    pub right: IRect,
    pub m: i64,
}

impl Annulus {
    pub fn new(x: i64, y: i64, m: i64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParam("annulus needs m >= 2".into()));
        }
        Ok(Annulus {
            bottom: IRect::at(x, y, 3 * m, m),
            top: IRect::at(x, y + 2 * m, 3 * m, m),
            left: IRect::at(x, y, m, 3 * m),
            right: IRect::at(x + 2 * m, y, m, 3 * m),
            m,
        })
    }

    /// Dual annulus (in dual indices) surrounding the primal square
    /// `[sx, sx+s] × [sy, sy+s]` with `s = m − 1`.
    pub fn dual_around(sx: i64, sy: i64, m: i64) -> Result<Self> {
        Annulus::new(sx - m - 1, sy - m - 1, m)
    }

    /// Primal square of side `m − 1` enclosed by [`Annulus::dual_around`].
    pub fn inner_square(&self) -> IRect {
        IRect::at(
            self.left.x0 + self.m + 1,
            self.bottom.y0 + self.m + 1,
            self.m - 1,
            self.m - 1,
        )
    }

    pub fn outer(&self) -> IRect {
        IRect::at(self.left.x0, self.bottom.y0, 3 * self.m, 3 * self.m)
    }

    pub fn pieces(&self) -> [IRect; 4] {
        [self.bottom, self.right, self.top, self.left]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_in_square_examples() {
        let r = Rect::from_ints(0, 0, 2, 1).unwrap();
        let v = vertices_in(LatticeKind::SiteSquare, &r);
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], Site::new(0, 0));
        assert_eq!(v[3], Site::new(0, 1));
        let r = Rect::from_q(Q::new(1, 5), Q::new(1, 5), Q::new(4, 5), Q::new(4, 5)).unwrap();
        assert!(vertices_in(LatticeKind::SiteSquare, &r).is_empty());
    }

    #[test]
    fn vertices_in_triangular_matches_scan() {
        // [0, √3] x [0, 2]
        let r = Rect::new(
            Surd::zero(),
            Q::from_integer(0),
            Surd::columns(2),
            Q::from_integer(2),
        )
        .unwrap();
        let got = vertices_in(LatticeKind::SiteTriangular, &r);
        // brute force over a wide index box with floating positions + margin check
        let mut want = Vec::new();
        for i in -10..10i64 {
            for j in -10..10i64 {
                let x = i as f64 * 3f64.sqrt() / 2.0;
                let y = j as f64 + i.rem_euclid(2) as f64 / 2.0;
                if x > -1e-9 && x < 3f64.sqrt() + 1e-9 && y > -1e-9 && y < 2.0 + 1e-9 {
                    want.push(Site::new(i, j));
                }
            }
        }
        assert_eq!(got.len(), want.len());
        for s in &want {
            assert!(got.contains(s));
        }
        // columns 0 and 2 have y in {0,1,2}; column 1 has {1/2, 3/2}
        assert_eq!(got.len(), 8);
    }

    #[test]
    fn neighbor_counts_and_star() {
        assert_eq!(neighbors(LatticeKind::SiteSquare, Site::ORIGIN).len(), 4);
        let star = neighbors(LatticeKind::SiteStar, Site::ORIGIN);
        assert_eq!(star.len(), 8);
        for s in star {
            let d2 = s.x * s.x + s.y * s.y;
            assert!(d2 == 1 || d2 == 2);
        }
        assert_eq!(
            neighbors(LatticeKind::SiteTriangular, Site::ORIGIN).len(),
            6
        );
    }

    #[test]
    fn triangular_neighbors_at_exact_unit_distance() {
        for i in -3..3 {
            for j in -3..3 {
                let v = Site::new(i, j);
                for w in neighbors(LatticeKind::SiteTriangular, v) {
                    let d = sq_dist(tri_position(v), tri_position(w));
                    assert_eq!(d, Surd::int(1), "{v} {w}");
                }
            }
        }
        // (0,1) is a vertex directly above the origin
        assert_eq!(tri_position(Site::new(0, 1)).1, Q::from_integer(1));
    }

    #[test]
    fn adjacency_symmetric_over_window() {
        for kind in [
            LatticeKind::SiteSquare,
            LatticeKind::SiteStar,
            LatticeKind::SiteTriangular,
        ] {
            for x in -10..10 {
                for y in -10..10 {
                    let v = Site::new(x, y);
                    for w in neighbors(kind, v) {
                        assert!(neighbors(kind, w).contains(&v), "{kind:?} {v} {w}");
                        assert!(adjacent(kind, v, w));
                    }
                }
            }
        }
    }

    #[test]
    fn translation_invariance() {
        for kind in [LatticeKind::SiteSquare, LatticeKind::SiteStar] {
            let base = neighbors(kind, Site::ORIGIN);
            let t = neighbors(kind, Site::new(5, -3));
            let shifted: Vec<_> = base.iter().map(|s| s.offset(5, -3)).collect();
            assert_eq!(t, shifted);
        }
        // triangular: translations by (2, k) are lattice symmetries
        let base = neighbors(LatticeKind::SiteTriangular, Site::new(1, 0));
        let t = neighbors(LatticeKind::SiteTriangular, Site::new(3, 4));
        let shifted: Vec<_> = base.iter().map(|s| s.offset(2, 4)).collect();
        assert_eq!(t, shifted);
    }

    #[test]
    fn surd_ordering() {
        // √3/2 ≈ 0.866
        assert!(Surd::columns(1) < Surd::int(1));
        assert!(Surd::columns(1) > Surd::rational(Q::new(86, 100)));
        assert!(Surd::columns(2) > Surd::int(1));
        assert!(Surd::columns(2) - Surd::int(2) < Surd::zero());
    }

    #[test]
    fn dual_edge_geometry() {
        let e = EdgeId::primal(0, 0, Dir::E);
        let d = dual_edge(e);
        // (1/2,-1/2)-(1/2,1/2)
        assert_eq!(d, EdgeId::dual(0, -1, Dir::N));
        assert_eq!(d.midpoint2(), e.midpoint2());
        for e in IRect::at(-2, -2, 4, 4).edges() {
            assert_eq!(dual_edge(dual_edge(e)), e);
            assert_eq!(dual_edge(e).midpoint2(), e.midpoint2());
        }
    }

    #[test]
    fn dual_edge_bijection_between_rects() {
        // every edge of the dual rectangle (minus the outer transverse rows)
        // is the dual of exactly one edge of R with the same midpoint
        let r = IRect::at(0, 0, 5, 4);
        let d = dual_index_rect(&r).unwrap();
        let mut dual_edges = Vec::new();
        for s in d.sites() {
            if s.y < d.y1 {
                dual_edges.push(EdgeId::dual(s.x, s.y, Dir::N));
            }
            if s.x < d.x1 && s.y > d.y0 && s.y < d.y1 {
                dual_edges.push(EdgeId::dual(s.x, s.y, Dir::E));
            }
        }
        let primal: Vec<_> = r
            .edges()
            .into_iter()
            .filter(|e| !(e.dir == Dir::N && (e.origin.x == r.x0 || e.origin.x == r.x1)))
            .collect();
        assert_eq!(primal.len(), dual_edges.len());
        let mut mids: Vec<_> = primal.iter().map(|e| e.midpoint2()).collect();
        let mut dmids: Vec<_> = dual_edges.iter().map(|e| e.midpoint2()).collect();
        mids.sort();
        dmids.sort();
        assert_eq!(mids, dmids);
    }

    #[test]
    fn dual_incidence_of_unit_squares() {
        // the four edges bounding the square with lower-left (x, y) are
        // exactly those whose duals touch the centre (x+½, y+½)
        let (x, y) = (3, -2);
        let center = Site::new(x, y);
        let bounding = [
            EdgeId::primal(x, y, Dir::E),
            EdgeId::primal(x, y + 1, Dir::E),
            EdgeId::primal(x, y, Dir::N),
            EdgeId::primal(x + 1, y, Dir::N),
        ];
        let mut touching = Vec::new();
        for e in IRect::at(x - 3, y - 3, 6, 6).edges() {
            let (a, b) = dual_edge(e).endpoints();
            if a == center || b == center {
                touching.push(e);
            }
        }
        touching.sort();
        let mut want = bounding.to_vec();
        want.sort();
        assert_eq!(touching, want);
    }

    #[test]
    fn dual_rect_examples() {
        let r = Rect::from_ints(0, 0, 5, 4).unwrap();
        let d = dual_rect(&r).unwrap();
        assert_eq!(d.x0, Surd::rational(Q::new(1, 2)));
        assert_eq!(d.x1, Surd::rational(Q::new(9, 2)));
        assert_eq!(d.y0, Q::new(-1, 2));
        assert_eq!(d.y1, Q::new(9, 2));
        assert!(dual_rect(&Rect::from_ints(0, 0, 1, 3).unwrap()).is_err());
        // (n+1) x n  ->  n x (n+1)
        for n in 1..6 {
            let r = IRect::at(0, 0, n + 1, n);
            let d = dual_index_rect(&r).unwrap();
            assert_eq!((d.width(), d.height()), (n, n + 1));
        }
    }

    #[test]
    fn annulus_layout() {
        let a = Annulus::dual_around(0, 0, 4).unwrap();
        let s = a.inner_square();
        assert_eq!((s.width(), s.height()), (3, 3));
        assert_eq!((s.x0, s.y0), (0, 0));
        for p in a.pieces() {
            assert_eq!(p.width().max(p.height()), 12);
            assert_eq!(p.width().min(p.height()), 4);
        }
        // the inner square lies strictly inside the hole in real coordinates:
        // hole spans dual indices x in (left.x1, right.x0) i.e. real (left.x1+½, right.x0+½)
        assert!(s.x0 as f64 > a.left.x1 as f64 + 0.5);
        assert!((s.x1 as f64) < a.right.x0 as f64 + 0.5);
    }
}
