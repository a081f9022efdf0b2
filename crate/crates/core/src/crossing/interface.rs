//! The interface walk.
//!
//! Every cell of the rectangle becomes a face of a planar tiling (octagons
//! and squares for the square/star lattices, hexagons for the triangular
//! lattice), coloured black when open and white when closed. Extra strips of
//! black faces are placed beyond the two sides that an open crossing must
//! join and white strips beyond the other two. The edges separating a white
//! face from a black one form paths and cycles; the walk follows the path
//! that starts at the corner between the first black strip and the first
//! white strip, always keeping black on its right. It ends either at the
//! far end of the black strips, in which case the black faces on its right
//! contain an open crossing, or at the far end of the white strips, in which
//! case the white faces on its left contain a closed crossing of the
//! complementary lattice. Exactly one of the two happens.
//!
//! Bond percolation uses the same octagon–square tiling rotated by 45°:
//! octagons are primal vertices (black) and dual vertices (white), squares
//! are edges, black when open.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use super::{blocking_dual_rect, int_rect, tri_bound, tri_rect, Direction};
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, IRect, LatticeKind, Rect, Site, TriRect};
use crate::sample::{Configuration, EdgeStates, Model, SiteStates};

type P = (i64, i64);

/// Result of an interface walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkOutcome {
    /// An open crossing in the requested direction.
    Open(Vec<Site>),
    /// A closed crossing in the transverse direction, on the complementary
    /// lattice (dual indices for bond models).
    Closed(Vec<Site>),
}

impl WalkOutcome {
    pub fn is_open(&self) -> bool {
        matches!(self, WalkOutcome::Open(_))
    }

    pub fn path(&self) -> &[Site] {
        match self {
            WalkOutcome::Open(p) | WalkOutcome::Closed(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left = 1,
    Right = 2,
    Top = 4,
    Bottom = 8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Cell(Site),
    Strip,
    Connector,
}

#[derive(Debug)]
struct Face {
    black: bool,
    role: Role,
    sides: u8,
}

#[derive(Default)]
struct FaceMap {
    faces: Vec<Face>,
    edge_face: HashMap<(P, P), u32>,
}

impl FaceMap {
    fn add(&mut self, poly: &[P], black: bool, role: Role, sides: u8) {
        let id = self.faces.len() as u32;
        self.faces.push(Face { black, role, sides });
        for i in 0..poly.len() {
            let e = (poly[i], poly[(i + 1) % poly.len()]);
            let prev = self.edge_face.insert(e, id);
            debug_assert!(prev.is_none(), "overlapping faces at {e:?}");
        }
    }
}

fn octagon(u: i64, v: i64) -> [P; 8] {
    let (c, d) = (4 * u, 4 * v);
    [
        (c + 2, d - 1),
        (c + 2, d + 1),
        (c + 1, d + 2),
        (c - 1, d + 2),
        (c - 2, d + 1),
        (c - 2, d - 1),
        (c - 1, d - 2),
        (c + 1, d - 2),
    ]
}

/// Square centred at `(k+½, l+½)`.
fn square(k: i64, l: i64) -> [P; 4] {
    [
        (4 * k + 2, 4 * l + 1),
        (4 * k + 3, 4 * l + 2),
        (4 * k + 2, 4 * l + 3),
        (4 * k + 1, 4 * l + 2),
    ]
}

fn hexagon(i: i64, j: i64) -> [P; 6] {
    let x = 3 * i;
    let y = 6 * j + 3 * i.rem_euclid(2);
    [
        (x + 2, y),
        (x + 1, y + 3),
        (x - 1, y + 3),
        (x - 2, y),
        (x - 1, y - 3),
        (x + 1, y - 3),
    ]
}

/// The four sides in walk order: black strips (start, end), white strips
/// (start, end). The walk starts at the corner of the two start strips.
struct Layout {
    black: (Side, Side),
    white: (Side, Side),
}

fn layout(dir: Direction) -> Layout {
    match dir {
        Direction::Horizontal => Layout {
            black: (Side::Left, Side::Right),
            white: (Side::Top, Side::Bottom),
        },
        Direction::Vertical => Layout {
            black: (Side::Bottom, Side::Top),
            white: (Side::Left, Side::Right),
        },
    }
}

fn strip_black(lay: &Layout, side: Side) -> bool {
    side == lay.black.0 || side == lay.black.1
}

fn rect_sides(r: &IRect, s: Site) -> u8 {
    let mut m = 0;
    if s.x == r.x0 {
        m |= Side::Left as u8;
    }
    if s.x == r.x1 {
        m |= Side::Right as u8;
    }
    if s.y == r.y0 {
        m |= Side::Bottom as u8;
    }
    if s.y == r.y1 {
        m |= Side::Top as u8;
    }
    m
}

struct Trace {
    right: Vec<u32>,
    left: Vec<u32>,
    end: P,
}

fn d2(a: P, b: P) -> i128 {
    let dx = (a.0 - b.0) as i128;
    let dy = (a.1 - b.1) as i128;
    dx * dx + dy * dy
}

fn walk(map: &FaceMap, start_corner: P) -> Trace {
    let mut out: HashMap<P, Vec<P>> = HashMap::default();
    let mut has_in: HashSet<P> = HashSet::default();
    for (&(a, b), &f) in &map.edge_face {
        if map.faces[f as usize].black {
            continue;
        }
        if let Some(&g) = map.edge_face.get(&(b, a)) {
            if map.faces[g as usize].black {
                out.entry(a).or_default().push(b);
                has_in.insert(b);
            }
        }
    }
    let mut sources: Vec<(P, P)> = Vec::new();
    for (&a, bs) in &out {
        if !has_in.contains(&a) {
            for &b in bs {
                sources.push((a, b));
            }
        }
    }
    debug_assert_eq!(sources.len(), 2, "interface must have exactly two ends");
    let &(mut a, mut b) = sources
        .iter()
        .min_by_key(|(a, _)| (d2(*a, start_corner), *a))
        .expect("interface has a start");
    let mut trace = Trace {
        right: Vec::new(),
        left: Vec::new(),
        end: a,
    };
    let limit = map.edge_face.len();
    loop {
        trace.left.push(map.edge_face[&(a, b)]);
        trace.right.push(map.edge_face[&(b, a)]);
        match out.get(&b).map(|v| v.as_slice()) {
            None | Some([]) => break,
            Some([c]) => {
                a = b;
                b = *c;
            }
            Some(_) => panic!("interface branches at {b:?}"),
        }
        assert!(
            trace.left.len() <= limit,
            "interface walk does not terminate"
        );
    }
    trace.end = b;
    trace
}

fn loop_erase(cells: impl Iterator<Item = Site>) -> Vec<Site> {
    let mut path: Vec<Site> = Vec::new();
    let mut pos: HashMap<Site, usize> = HashMap::default();
    for s in cells {
        if let Some(&i) = pos.get(&s) {
            for t in path.drain(i + 1..) {
                pos.remove(&t);
            }
        } else {
            pos.insert(s, path.len());
            path.push(s);
        }
    }
    path
}

/// Cells of the face chain between its last visit to `start` before its
/// first visit to `end`, loop-erased.
fn extract(map: &FaceMap, seq: &[u32], start: Side, end: Side) -> Vec<Site> {
    let has = |f: u32, s: Side| map.faces[f as usize].sides & s as u8 != 0;
    let k = seq
        .iter()
        .position(|&f| has(f, end))
        .expect("chain reaches its end side");
    let j = seq[..=k]
        .iter()
        .rposition(|&f| has(f, start))
        .expect("chain starts on its start side");
    loop_erase(
        seq[j..=k]
            .iter()
            .filter_map(|&f| match map.faces[f as usize].role {
                Role::Cell(s) => Some(s),
                _ => None,
            }),
    )
}

fn finish(map: &FaceMap, lay: &Layout, trace: &Trace, open_end: P, closed_end: P) -> WalkOutcome {
    let open = d2(trace.end, open_end) < d2(trace.end, closed_end);
    if open {
        WalkOutcome::Open(extract(map, &trace.right, lay.black.0, lay.black.1))
    } else {
        let mut path = extract(map, &trace.left, lay.white.0, lay.white.1);
        if lay.white.0 == Side::Top {
            // report transverse crossings bottom to top
            path.reverse();
        }
        WalkOutcome::Closed(path)
    }
}

/// Corner points `(start, open end, closed end)` for a rectangle with the
/// given real corners.
fn corners(dir: Direction, x0: P, x1: P) -> (P, P, P) {
    // x0 = lower-left, x1 = upper-right
    let tl = (x0.0, x1.1);
    let tr = x1;
    let bl = x0;
    let br = (x1.0, x0.1);
    match dir {
        Direction::Horizontal => (tl, tr, bl),
        Direction::Vertical => (bl, tl, br),
    }
}

/// Interface walk for site percolation on the square (`SiteSquare`) or star
/// (`SiteStar`) lattice. The closed outcome is a crossing of the other one.
pub fn interface_walk_site<S: SiteStates + ?Sized>(
    states: &S,
    kind: LatticeKind,
    r: &IRect,
    dir: Direction,
) -> WalkOutcome {
    assert!(matches!(
        kind,
        LatticeKind::SiteSquare | LatticeKind::SiteStar
    ));
    let lay = layout(dir);
    let mut map = FaceMap::default();
    for s in r.sites() {
        map.add(
            &octagon(s.x, s.y),
            states.site_open(s),
            Role::Cell(s),
            rect_sides(r, s),
        );
    }
    let mut strip = |x: i64, y: i64, side: Side| {
        map.add(
            &octagon(x, y),
            strip_black(&lay, side),
            Role::Strip,
            side as u8,
        );
    };
    for y in r.y0..=r.y1 {
        strip(r.x0 - 1, y, Side::Left);
        strip(r.x1 + 1, y, Side::Right);
    }
    for x in r.x0..=r.x1 {
        strip(x, r.y0 - 1, Side::Bottom);
        strip(x, r.y1 + 1, Side::Top);
    }
    let squares_black = kind == LatticeKind::SiteStar;
    for k in r.x0 - 1..=r.x1 {
        for l in r.y0 - 1..=r.y1 {
            map.add(&square(k, l), squares_black, Role::Connector, 0);
        }
    }
    let (start, open_end, closed_end) = corners(dir, (4 * r.x0, 4 * r.y0), (4 * r.x1, 4 * r.y1));
    let trace = walk(&map, start);
    finish(&map, &lay, &trace, open_end, closed_end)
}

/// Interface walk on the triangular lattice (self-matching: the closed
/// outcome is a triangular crossing too).
pub fn interface_walk_tri<S: SiteStates + ?Sized>(
    states: &S,
    r: &TriRect,
    dir: Direction,
) -> WalkOutcome {
    let lay = layout(dir);
    let mut map = FaceMap::default();
    for s in r.sites() {
        let mut sides = 0;
        if s.x == r.c0 {
            sides |= Side::Left as u8;
        }
        if s.x == r.c1 {
            sides |= Side::Right as u8;
        }
        if s.y == r.y0 {
            sides |= Side::Bottom as u8;
        }
        if s.y == r.rows(s.x).1 {
            sides |= Side::Top as u8;
        }
        map.add(
            &hexagon(s.x, s.y),
            states.site_open(s),
            Role::Cell(s),
            sides,
        );
    }
    let mut strip = |i: i64, j: i64, side: Side| {
        map.add(
            &hexagon(i, j),
            strip_black(&lay, side),
            Role::Strip,
            side as u8,
        );
    };
    for j in r.y0 - 1..=r.y1 + 1 {
        strip(r.c0 - 1, j, Side::Left);
        strip(r.c1 + 1, j, Side::Right);
    }
    for c in r.c0..=r.c1 {
        strip(c, r.y0 - 1, Side::Bottom);
        strip(c, r.rows(c).1 + 1, Side::Top);
    }
    let (start, open_end, closed_end) = corners(dir, (3 * r.c0, 6 * r.y0), (3 * r.c1, 6 * r.y1));
    let trace = walk(&map, start);
    finish(&map, &lay, &trace, open_end, closed_end)
}

/// Octagon position of a point given in doubled coordinates, in the frame
/// rotated by 45°.
fn rot(a2: i64, b2: i64) -> (i64, i64) {
    ((a2 + b2) / 2, (b2 - a2) / 2)
}

fn bond_horizontal<E: EdgeStates + ?Sized>(states: &E, r: &IRect) -> WalkOutcome {
    let lay = layout(Direction::Horizontal);
    let dual = blocking_dual_rect(r, Direction::Horizontal);
    let mut map = FaceMap::default();
    for s in r.sites() {
        let (u, v) = rot(2 * s.x, 2 * s.y);
        map.add(&octagon(u, v), true, Role::Cell(s), rect_sides(r, s));
    }
    for d in dual.sites() {
        let (u, v) = rot(2 * d.x + 1, 2 * d.y + 1);
        map.add(&octagon(u, v), false, Role::Cell(d), rect_sides(&dual, d));
    }
    let mut edge_square = |e: EdgeId, black: bool, role: Role, sides: u8| {
        let (a2, b2) = e.midpoint2();
        map.add(
            &square((a2 + b2 - 1) / 2, (b2 - a2 - 1) / 2),
            black,
            role,
            sides,
        );
    };
    for e in r.edges() {
        let x = e.origin.x;
        if e.dir == crate::lattice::Dir::N && x == r.x0 {
            edge_square(e, true, Role::Strip, Side::Left as u8);
        } else if e.dir == crate::lattice::Dir::N && x == r.x1 {
            edge_square(e, true, Role::Strip, Side::Right as u8);
        } else {
            edge_square(e, states.edge_open(e), Role::Connector, 0);
        }
    }
    for x in r.x0 + 1..r.x1 {
        use crate::lattice::Dir;
        edge_square(
            EdgeId::primal(x, r.y1, Dir::N),
            false,
            Role::Strip,
            Side::Top as u8,
        );
        edge_square(
            EdgeId::primal(x, r.y0 - 1, Dir::N),
            false,
            Role::Strip,
            Side::Bottom as u8,
        );
    }
    let c = |x: i64, y: i64| {
        let (u, v) = rot(2 * x, 2 * y);
        (4 * u, 4 * v)
    };
    let trace = walk(&map, c(r.x0, r.y1));
    finish(&map, &lay, &trace, c(r.x1, r.y1), c(r.x0, r.y0))
}

/// Interface walk for bond percolation. The closed outcome lists dual
/// indices of a closed crossing of `blocking_dual_rect(r, dir)`.
pub fn interface_walk_bond<E: EdgeStates + ?Sized>(
    states: &E,
    r: &IRect,
    dir: Direction,
) -> WalkOutcome {
    match dir {
        Direction::Horizontal => bond_horizontal(states, r),
        Direction::Vertical => {
            // rotate clockwise: (x, y) -> (y, -x)
            let back = |e: EdgeId| -> EdgeId {
                use crate::lattice::Dir;
                let Site { x, y } = e.origin;
                match e.dir {
                    Dir::E => EdgeId::primal(-y, x, Dir::N),
                    Dir::N => EdgeId::primal(-y - 1, x, Dir::E),
                }
            };
            let rotated = |e: EdgeId| states.edge_open(back(e));
            let rr = IRect::new(r.y0, -r.x1, r.y1, -r.x0).unwrap();
            match bond_horizontal(&rotated, &rr) {
                WalkOutcome::Open(p) => {
                    WalkOutcome::Open(p.into_iter().map(|s| Site::new(-s.y, s.x)).collect())
                }
                WalkOutcome::Closed(p) => WalkOutcome::Closed(
                    p.into_iter()
                        .rev()
                        .map(|s| Site::new(-s.y - 1, s.x))
                        .collect(),
                ),
            }
        }
    }
}

fn check_walk_rect(w: i64, h: i64) -> Result<()> {
    if w < 2 || h < 2 {
        return Err(Error::InvalidRect(
            "the interface walk needs both sides >= 2".into(),
        ));
    }
    Ok(())
}

/// Interface walk on a configuration of any lattice model.
pub fn interface_walk(config: &Configuration, r: &Rect, dir: Direction) -> Result<WalkOutcome> {
    let window = config.window();
    let inside = |ir: &IRect| {
        if window.contains_rect(ir) {
            Ok(())
        } else {
            Err(Error::Window(format!("{ir} not inside window {window}")))
        }
    };
    match config.model() {
        Model::Bond | Model::DepBond => {
            let ir = int_rect(r)?;
            check_walk_rect(ir.width(), ir.height())?;
            inside(&ir)?;
            Ok(interface_walk_bond(config, &ir, dir))
        }
        Model::SiteSquare | Model::SiteStar => {
            let ir = int_rect(r)?;
            check_walk_rect(ir.width(), ir.height())?;
            inside(&ir)?;
            Ok(interface_walk_site(
                config,
                config.model().lattice(),
                &ir,
                dir,
            ))
        }
        Model::SiteTriangular => {
            let tr = tri_rect(r)?;
            inside(&tri_bound(&tr))?;
            Ok(interface_walk_tri(config, &tr, dir))
        }
        Model::Voronoi => Err(Error::InvalidParam(
            "the interface walk is defined for lattice models".into(),
        )),
    }
}

/// The left-most open vertical crossing found by the vertically oriented
/// interface walk, or `None` when there is no vertical crossing. Whether it
/// equals a given path does not depend on cells strictly to its right.
pub fn leftmost_vertical_crossing(config: &Configuration, r: &Rect) -> Result<Option<Vec<Site>>> {
    Ok(match interface_walk(config, r, Direction::Vertical)? {
        WalkOutcome::Open(p) => Some(p),
        WalkOutcome::Closed(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{
        is_bond_crossing, is_dual_closed_crossing, is_site_crossing, is_tri_crossing,
    };
    use super::*;

    #[test]
    fn all_open_and_all_closed_site() {
        let r = IRect::at(0, 0, 4, 3);
        for kind in [LatticeKind::SiteSquare, LatticeKind::SiteStar] {
            for dir in [Direction::Horizontal, Direction::Vertical] {
                let open = |_: Site| true;
                let w = interface_walk_site(&open, kind, &r, dir);
                assert!(w.is_open());
                assert!(is_site_crossing(&open, kind, &r, dir, w.path()));
                let closed = |_: Site| false;
                let w = interface_walk_site(&closed, kind, &r, dir);
                assert!(!w.is_open());
                let c = |_: Site| true;
                assert!(is_site_crossing(
                    &c,
                    kind.matching(),
                    &r,
                    dir.transverse(),
                    w.path()
                ));
            }
        }
    }

    #[test]
    fn all_open_left_column_is_leftmost() {
        let w = IRect::at(0, 0, 5, 5);
        let c = Configuration::from_sites(Model::SiteSquare, w, 0, 0, |_| true);
        let p = leftmost_vertical_crossing(&c, &w.to_rect())
            .unwrap()
            .unwrap();
        assert!(p.iter().all(|s| s.x == 0));
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn bond_extremes_both_orientations() {
        let r = IRect::at(0, 0, 4, 3);
        for dir in [Direction::Horizontal, Direction::Vertical] {
            let open = |_: EdgeId| true;
            let w = interface_walk_bond(&open, &r, dir);
            assert!(w.is_open(), "{dir:?}");
            assert!(is_bond_crossing(&open, &r, dir, w.path()));
            let closed = |_: EdgeId| false;
            let w = interface_walk_bond(&closed, &r, dir);
            assert!(!w.is_open());
            let d = blocking_dual_rect(&r, dir);
            assert!(
                is_dual_closed_crossing(&closed, &d, dir.transverse(), w.path()),
                "{dir:?} {:?}",
                w.path()
            );
        }
    }

    #[test]
    fn tri_extremes() {
        let r = TriRect::new(0, 4, 0, 3).unwrap();
        for dir in [Direction::Horizontal, Direction::Vertical] {
            let open = |_: Site| true;
            let w = interface_walk_tri(&open, &r, dir);
            assert!(w.is_open());
            assert!(is_tri_crossing(&open, &r, dir, w.path()));
            let closed = |_: Site| false;
            let w = interface_walk_tri(&closed, &r, dir);
            assert!(!w.is_open());
            assert!(is_tri_crossing(&open, &r, dir.transverse(), w.path()));
        }
    }
}
