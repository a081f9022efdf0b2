//! Crossing events: breadth-first crossings with witnesses, blocking dual
//! crossings, the interface walk, annulus circuits, torus evaluation and
//! per-sample critical parameters.
//!
//! Side conventions. On the square lattices a horizontal crossing of
//! `[x0,x1]×[y0,y1]` runs from a vertex with `x = x0` to one with `x = x1`
//! inside the rectangle. On the triangular lattice (see [`TriRect`]) the left
//! and right sides are the columns `c0` and `c1`, the bottom side is the row
//! `j = y0` and the top side is the highest row of each column. Bond
//! crossings never need edges lying along their own start or end side, and
//! the searches skip them.

mod interface;
mod threshold;
mod torus;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    dual_edge, for_each_neighbor, Annulus, Dir, EdgeId, IRect, LatticeKind, Rect, Site, TriRect,
};
use crate::sample::{Configuration, EdgeStates, Model, SiteStates};

pub use interface::{
    interface_walk, interface_walk_bond, interface_walk_site, interface_walk_tri,
    leftmost_vertical_crossing, WalkOutcome,
};
pub use threshold::{critical_p_bond, critical_p_site, critical_p_tri};
pub use torus::{torus_crossing, torus_some_crossing, torus_some_crossing_with, Torus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    pub fn transverse(self) -> Direction {
        match self {
            Direction::Horizontal => Direction::Vertical,
            Direction::Vertical => Direction::Horizontal,
        }
    }
}

/// Outcome of a crossing query.
///
/// `witness` is an open crossing (present iff `holds`). `blocking_witness`,
/// when the model has an exact dual and the crossing fails, is a closed
/// crossing in the transverse direction: dual-lattice vertices `(a, b)`
/// standing for `(a+½, b+½)` for bond models, star-lattice sites for
/// square-lattice site percolation, square-lattice sites for star-lattice
/// site percolation, and triangular sites for the triangular lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub holds: bool,
    pub witness: Option<Vec<Site>>,
    pub blocking_witness: Option<Vec<Site>>,
}

/// Multi-source breadth-first search inside `bound`. `expand(v, push)` must
/// call `push` on every admissible successor of `v`. Returns a shortest path
/// from a source to a target.
pub(crate) fn bfs_path(
    bound: &IRect,
    sources: impl IntoIterator<Item = Site>,
    is_target: impl Fn(Site) -> bool,
    mut expand: impl FnMut(Site, &mut dyn FnMut(Site)),
) -> Option<Vec<Site>> {
    const UNSEEN: u32 = u32::MAX;
    let mut parent = vec![UNSEEN; bound.num_sites()];
    let mut queue = VecDeque::new();
    for s in sources {
        let i = bound.index(s);
        if parent[i] == UNSEEN {
            parent[i] = i as u32;
            queue.push_back(i as u32);
        }
    }
    while let Some(i) = queue.pop_front() {
        let v = bound.site_at(i as usize);
        if is_target(v) {
            let mut path = vec![v];
            let mut j = i as usize;
            while parent[j] as usize != j {
                j = parent[j] as usize;
                path.push(bound.site_at(j));
            }
            path.reverse();
            return Some(path);
        }
        expand(v, &mut |w| {
            if bound.contains(w) {
                let k = bound.index(w);
                if parent[k] == UNSEEN {
                    parent[k] = i;
                    queue.push_back(k as u32);
                }
            }
        });
    }
    None
}

fn on_start(r: &IRect, dir: Direction, s: Site) -> bool {
    match dir {
        Direction::Horizontal => s.x == r.x0,
        Direction::Vertical => s.y == r.y0,
    }
}

fn on_end(r: &IRect, dir: Direction, s: Site) -> bool {
    match dir {
        Direction::Horizontal => s.x == r.x1,
        Direction::Vertical => s.y == r.y1,
    }
}

/// Open crossing on the square or star lattice (site percolation).
pub fn site_crossing<S: SiteStates + ?Sized>(
    states: &S,
    kind: LatticeKind,
    r: &IRect,
    dir: Direction,
) -> Option<Vec<Site>> {
    assert!(matches!(
        kind,
        LatticeKind::SiteSquare | LatticeKind::SiteStar
    ));
    bfs_path(
        r,
        r.sites()
            .filter(|&s| on_start(r, dir, s) && states.site_open(s)),
        |s| on_end(r, dir, s),
        |v, push| {
            for_each_neighbor(kind, v, |w| {
                if r.contains(w) && states.site_open(w) {
                    push(w)
                }
            })
        },
    )
}

fn tri_on_start(r: &TriRect, dir: Direction, s: Site) -> bool {
    match dir {
        Direction::Horizontal => s.x == r.c0,
        Direction::Vertical => s.y == r.y0,
    }
}

fn tri_on_end(r: &TriRect, dir: Direction, s: Site) -> bool {
    match dir {
        Direction::Horizontal => s.x == r.c1,
        Direction::Vertical => s.y == r.rows(s.x).1,
    }
}

pub(crate) fn tri_bound(r: &TriRect) -> IRect {
    IRect::new(r.c0, r.y0, r.c1, r.y1).unwrap()
}

/// Open crossing on the triangular lattice.
pub fn tri_crossing<S: SiteStates + ?Sized>(
    states: &S,
    r: &TriRect,
    dir: Direction,
) -> Option<Vec<Site>> {
    let bound = tri_bound(r);
    bfs_path(
        &bound,
        r.sites()
            .filter(|&s| tri_on_start(r, dir, s) && states.site_open(s)),
        |s| tri_on_end(r, dir, s),
        |v, push| {
            for_each_neighbor(LatticeKind::SiteTriangular, v, |w| {
                if r.contains(w) && states.site_open(w) {
                    push(w)
                }
            })
        },
    )
}

/// Edges along the start or end side of a crossing are irrelevant to it.
fn on_own_side(r: &IRect, dir: Direction, e: EdgeId) -> bool {
    match (dir, e.dir) {
        (Direction::Horizontal, Dir::N) => e.origin.x == r.x0 || e.origin.x == r.x1,
        (Direction::Vertical, Dir::E) => e.origin.y == r.y0 || e.origin.y == r.y1,
        _ => false,
    }
}

/// Open crossing in bond percolation; the path lists vertices.
pub fn bond_crossing<E: EdgeStates + ?Sized>(
    states: &E,
    r: &IRect,
    dir: Direction,
) -> Option<Vec<Site>> {
    bfs_path(
        r,
        r.sites().filter(|&s| on_start(r, dir, s)),
        |s| on_end(r, dir, s),
        |v, push| {
            for_each_neighbor(LatticeKind::BondSquare, v, |w| {
                if !r.contains(w) {
                    return;
                }
                let e = EdgeId::between(v, w).unwrap();
                if !on_own_side(r, dir, e) && states.edge_open(e) {
                    push(w)
                }
            })
        },
    )
}

/// Whether the dual edge is closed, i.e. crosses a closed primal edge.
#[inline]
pub fn dual_closed<E: EdgeStates + ?Sized>(states: &E, d: EdgeId) -> bool {
    debug_assert!(d.dual);
    !states.edge_open(dual_edge(d))
}

/// Closed crossing of the dual-lattice rectangle `d`, given in dual indices
/// (`(a, b)` stands for `(a+½, b+½)`); the path lists dual indices.
pub fn dual_closed_crossing<E: EdgeStates + ?Sized>(
    states: &E,
    d: &IRect,
    dir: Direction,
) -> Option<Vec<Site>> {
    bfs_path(
        d,
        d.sites().filter(|&s| on_start(d, dir, s)),
        |s| on_end(d, dir, s),
        |v, push| {
            for_each_neighbor(LatticeKind::BondSquare, v, |w| {
                if !d.contains(w) {
                    return;
                }
                let mut e = EdgeId::between(v, w).unwrap();
                if on_own_side(d, dir, e) {
                    return;
                }
                e.dual = true;
                if dual_closed(states, e) {
                    push(w)
                }
            })
        },
    )
}

/// Dual index rectangle whose closed crossings in the transverse direction
/// block `dir`-crossings of `r`.
pub fn blocking_dual_rect(r: &IRect, dir: Direction) -> IRect {
    match dir {
        Direction::Horizontal => IRect {
            x0: r.x0,
            y0: r.y0 - 1,
            x1: r.x1 - 1,
            y1: r.y1,
        },
        Direction::Vertical => IRect {
            x0: r.x0 - 1,
            y0: r.y0,
            x1: r.x1,
            y1: r.y1 - 1,
        },
    }
}

/// Converts an exact rectangle to integer corners (square lattices).
pub fn int_rect(r: &Rect) -> Result<IRect> {
    r.as_int()
        .ok_or_else(|| Error::InvalidRect("square-lattice queries need integer corners".into()))
}

/// Converts an exact rectangle with x-corners at multiples of √3/2 and
/// integer y-corners to a triangular rectangle.
pub fn tri_rect(r: &Rect) -> Result<TriRect> {
    let col = |x: crate::lattice::Surd| {
        (*x.rat.numer() == 0 && x.half_sqrt3.is_integer()).then(|| x.half_sqrt3.to_integer())
    };
    let bad = || {
        Error::InvalidRect("triangular queries need x at multiples of √3/2 and integer y".into())
    };
    let c0 = col(r.x0).ok_or_else(bad)?;
    let c1 = col(r.x1).ok_or_else(bad)?;
    if !r.y0.is_integer() || !r.y1.is_integer() {
        return Err(bad());
    }
    TriRect::new(c0, c1, r.y0.to_integer(), r.y1.to_integer())
}

fn check_inside(config: &Configuration, r: &IRect) -> Result<()> {
    if !config.window().contains_rect(r) {
        return Err(Error::Window(format!(
            "rectangle {r} not inside window {}",
            config.window()
        )));
    }
    Ok(())
}

/// Open crossing of `r` with a blocking witness when it fails.
pub fn has_crossing(config: &Configuration, r: &Rect, dir: Direction) -> Result<CrossingResult> {
    let model = config.model();
    let (witness, blocking) = match model {
        Model::Bond | Model::DepBond => {
            let ir = int_rect(r)?;
            check_inside(config, &ir)?;
            let w = bond_crossing(config, &ir, dir);
            let b = if w.is_none() {
                dual_closed_crossing(config, &blocking_dual_rect(&ir, dir), dir.transverse())
            } else {
                None
            };
            (w, b)
        }
        Model::SiteSquare | Model::SiteStar => {
            let ir = int_rect(r)?;
            check_inside(config, &ir)?;
            let kind = model.lattice();
            let w = site_crossing(config, kind, &ir, dir);
            let b = if w.is_none() {
                let closed = |s: Site| !config.site_open(s);
                site_crossing(&closed, kind.matching(), &ir, dir.transverse())
            } else {
                None
            };
            (w, b)
        }
        Model::SiteTriangular => {
            let tr = tri_rect(r)?;
            check_inside(config, &tri_bound(&tr))?;
            let w = tri_crossing(config, &tr, dir);
            let b = if w.is_none() {
                let closed = |s: Site| !config.site_open(s);
                tri_crossing(&closed, &tr, dir.transverse())
            } else {
                None
            };
            (w, b)
        }
        Model::Voronoi => {
            return Err(Error::InvalidParam(
                "Voronoi crossings are cell-based; use the voronoi module".into(),
            ))
        }
    };
    Ok(CrossingResult {
        holds: witness.is_some(),
        witness,
        blocking_witness: blocking,
    })
}

/// Length in edges of a shortest open horizontal crossing.
pub fn shortest_crossing_length(config: &Configuration, r: &Rect) -> Result<Option<usize>> {
    let res = has_crossing(config, r, Direction::Horizontal)?;
    Ok(res.witness.map(|p| p.len() - 1))
}

/// Whether `path` is a valid open `dir`-crossing of `r` in the given model
/// (independent check used by tests and assertions).
pub fn is_site_crossing<S: SiteStates + ?Sized>(
    states: &S,
    kind: LatticeKind,
    r: &IRect,
    dir: Direction,
    path: &[Site],
) -> bool {
    !path.is_empty()
        && on_start(r, dir, path[0])
        && on_end(r, dir, *path.last().unwrap())
        && path.iter().all(|&s| r.contains(s) && states.site_open(s))
        && path
            .windows(2)
            .all(|w| crate::lattice::adjacent(kind, w[0], w[1]))
}

pub fn is_tri_crossing<S: SiteStates + ?Sized>(
    states: &S,
    r: &TriRect,
    dir: Direction,
    path: &[Site],
) -> bool {
    !path.is_empty()
        && tri_on_start(r, dir, path[0])
        && tri_on_end(r, dir, *path.last().unwrap())
        && path.iter().all(|&s| r.contains(s) && states.site_open(s))
        && path
            .windows(2)
            .all(|w| crate::lattice::adjacent(LatticeKind::SiteTriangular, w[0], w[1]))
}

pub fn is_bond_crossing<E: EdgeStates + ?Sized>(
    states: &E,
    r: &IRect,
    dir: Direction,
    path: &[Site],
) -> bool {
    !path.is_empty()
        && on_start(r, dir, path[0])
        && on_end(r, dir, *path.last().unwrap())
        && path.iter().all(|&s| r.contains(s))
        && path.windows(2).all(|w| match EdgeId::between(w[0], w[1]) {
            Some(e) => states.edge_open(e),
            None => false,
        })
}

pub fn is_dual_closed_crossing<E: EdgeStates + ?Sized>(
    states: &E,
    d: &IRect,
    dir: Direction,
    path: &[Site],
) -> bool {
    !path.is_empty()
        && on_start(d, dir, path[0])
        && on_end(d, dir, *path.last().unwrap())
        && path.iter().all(|&s| d.contains(s))
        && path.windows(2).all(|w| match EdgeId::between(w[0], w[1]) {
            Some(mut e) => {
                e.dual = true;
                dual_closed(states, e)
            }
            None => false,
        })
}

/// Event that an open vertical crossing of `ri` is joined by an open path in
/// `r` to the right-hand side of `r`. Evaluated directly: it holds iff `ri`
/// has a vertical crossing using only open cells connected within `r` to the
/// right side. Supports bond, square-site and star-site models.
pub fn joined_vertical_crossing(config: &Configuration, r: &IRect, ri: &IRect) -> Result<bool> {
    check_inside(config, r)?;
    if !r.contains_rect(ri) {
        return Err(Error::InvalidRect(format!("{ri} not inside {r}")));
    }
    let right = r.sites().filter(|s| s.x == r.x1);
    let mut joined = vec![false; r.num_sites()];
    match config.model() {
        Model::Bond | Model::DepBond => {
            // every vertex of the right side counts as reached
            mark_reachable(r, right, &mut joined, |v, push| {
                for_each_neighbor(LatticeKind::BondSquare, v, |w| {
                    if r.contains(w) && config.edge_open(EdgeId::between(v, w).unwrap()) {
                        push(w)
                    }
                })
            });
            let states = |e: EdgeId| {
                let (a, b) = e.endpoints();
                config.edge_open(e) && joined[r.index(a)] && joined[r.index(b)]
            };
            Ok(bond_crossing(&states, ri, Direction::Vertical).is_some())
        }
        Model::SiteSquare | Model::SiteStar => {
            let kind = config.model().lattice();
            mark_reachable(
                r,
                right.filter(|&s| config.site_open(s)),
                &mut joined,
                |v, push| {
                    for_each_neighbor(kind, v, |w| {
                        if r.contains(w) && config.site_open(w) {
                            push(w)
                        }
                    })
                },
            );
            let states = |s: Site| joined[r.index(s)];
            Ok(site_crossing(&states, kind, ri, Direction::Vertical).is_some())
        }
        m => Err(Error::InvalidParam(format!(
            "joined crossings not supported for {m:?}"
        ))),
    }
}

fn mark_reachable(
    r: &IRect,
    sources: impl Iterator<Item = Site>,
    mark: &mut [bool],
    mut expand: impl FnMut(Site, &mut dyn FnMut(Site)),
) {
    let mut stack: Vec<Site> = Vec::new();
    for s in sources {
        if !mark[r.index(s)] {
            mark[r.index(s)] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        expand(v, &mut |w| {
            let i = r.index(w);
            if !mark[i] {
                mark[i] = true;
                stack.push(w);
            }
        });
    }
}

/// Circuit mode for [`annulus_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitMode {
    /// Open primal paths; the annulus is in primal coordinates.
    OpenPrimal,
    /// Closed dual paths; the annulus is in dual indices.
    ClosedDual,
}

/// Long-way crossings of all four rectangles of an annulus (bond models).
/// Returns the four crossings (bottom, right, top, left) when all exist.
pub fn annulus_circuit<E: EdgeStates + ?Sized>(
    states: &E,
    a: &Annulus,
    mode: CircuitMode,
) -> Option<Vec<Vec<Site>>> {
    let mut pieces = Vec::with_capacity(4);
    for (rect, dir) in [
        (a.bottom, Direction::Horizontal),
        (a.right, Direction::Vertical),
        (a.top, Direction::Horizontal),
        (a.left, Direction::Vertical),
    ] {
        let p = match mode {
            CircuitMode::OpenPrimal => bond_crossing(states, &rect, dir),
            CircuitMode::ClosedDual => dual_closed_crossing(states, &rect, dir),
        }?;
        pieces.push(p);
    }
    Some(pieces)
}

/// [`annulus_circuit`] on a configuration, checking the window.
pub fn annulus_circuit_config(
    config: &Configuration,
    a: &Annulus,
    mode: CircuitMode,
) -> Result<Option<Vec<Vec<Site>>>> {
    if !config.model().is_bond() {
        return Err(Error::InvalidParam(
            "annulus circuits are defined for bond models".into(),
        ));
    }
    let outer = a.outer();
    let need = match mode {
        CircuitMode::OpenPrimal => outer,
        CircuitMode::ClosedDual => {
            IRect::new(outer.x0, outer.y0, outer.x1 + 1, outer.y1 + 1).unwrap()
        }
    };
    check_inside(config, &need)?;
    Ok(annulus_circuit(config, a, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::ModelParams;

    #[test]
    fn all_open_straight_row() {
        let w = IRect::at(0, 0, 6, 4);
        let c = Configuration::sample_bond(&ModelParams::new(1.0).unwrap(), w, 1, 1);
        let r = w.to_rect();
        let res = has_crossing(&c, &r, Direction::Horizontal).unwrap();
        assert!(res.holds);
        let path = res.witness.unwrap();
        assert_eq!(path.len(), 7);
        assert!(path.iter().all(|s| s.y == path[0].y));
        assert_eq!(shortest_crossing_length(&c, &r).unwrap(), Some(6));
    }

    #[test]
    fn all_closed_gives_blocking() {
        let w = IRect::at(0, 0, 5, 4);
        for model in [Model::SiteSquare, Model::SiteStar] {
            let c = Configuration::from_sites(model, w, 0, 0, |_| false);
            let res = has_crossing(&c, &w.to_rect(), Direction::Horizontal).unwrap();
            assert!(!res.holds);
            let b = res.blocking_witness.unwrap();
            let closed = |s: Site| !c.site_open(s);
            assert!(is_site_crossing(
                &closed,
                model.lattice().matching(),
                &w,
                Direction::Vertical,
                &b
            ));
        }
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |_| false);
        let res = has_crossing(&c, &w.to_rect(), Direction::Horizontal).unwrap();
        let d = blocking_dual_rect(&w, Direction::Horizontal);
        assert!(is_dual_closed_crossing(
            &c,
            &d,
            Direction::Vertical,
            &res.blocking_witness.unwrap()
        ));
    }

    #[test]
    fn window_checked() {
        let w = IRect::at(0, 0, 3, 3);
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |_| true);
        let r = Rect::from_ints(0, 0, 4, 3).unwrap();
        assert!(has_crossing(&c, &r, Direction::Horizontal).is_err());
    }

    #[test]
    fn joined_crossing_all_open() {
        let w = IRect::at(0, 0, 10, 6);
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |_| true);
        assert!(joined_vertical_crossing(&c, &w, &IRect::at(0, 0, 3, 3)).unwrap());
        // cut the right column off: nothing reaches it
        let c = Configuration::from_edges(Model::Bond, w, 0, 0, |e| {
            !(e.dir == Dir::E && e.origin.x == 9)
        });
        assert!(!joined_vertical_crossing(&c, &w, &IRect::at(0, 0, 3, 3)).unwrap());
    }
}
