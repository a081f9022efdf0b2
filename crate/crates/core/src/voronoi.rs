//! Discrete Voronoi percolation.
//!
//! Sites are the points `z` of ℤ² with `v_z ≠ 0`; the cell of `z` is the set
//! of points at least as close to `z` as to any other site, open iff
//! `v_z = +1`. Cells are computed exactly inside an inner window `B` by
//! clipping with integer half-planes; all vertices are homogeneous integer
//! points, so ties (four or more cells meeting at a point, common on ℤ²) are
//! resolved exactly. Two cells are weakly adjacent if they share a point and
//! strongly adjacent if they share a segment; both relations are evaluated
//! on the parts of the cells inside `B`.

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::crossing::{CrossingResult, Direction};
use crate::error::{Error, Result};
use crate::lattice::{IRect, Site};
use crate::sample::{Configuration, Model};

/// Half-plane `a·x + b·y ≤ c` in coordinates relative to a cell's site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Line {
    a: i64,
    b: i64,
    c: i64,
}

/// Homogeneous point `(X/W, Y/W)`, `W > 0`.
type Hp = (i128, i128, i128);

fn intersect(l1: Line, l2: Line) -> Hp {
    let (a1, b1, c1) = (l1.a as i128, l1.b as i128, l1.c as i128);
    let (a2, b2, c2) = (l2.a as i128, l2.b as i128, l2.c as i128);
    let det = a1 * b2 - a2 * b1;
    assert!(det != 0, "consecutive polygon edges are parallel");
    let x = c1 * b2 - c2 * b1;
    let y = a1 * c2 - a2 * c1;
    if det < 0 {
        (-x, -y, -det)
    } else {
        (x, y, det)
    }
}

#[inline]
fn side(l: Line, p: Hp) -> i128 {
    l.a as i128 * p.0 + l.b as i128 * p.1 - l.c as i128 * p.2
}

fn same_point(p: Hp, q: Hp) -> bool {
    p.0 * q.2 == q.0 * p.2 && p.1 * q.2 == q.1 * p.2
}

/// Convex polygon with positive area, as a cyclic list of supporting lines;
/// `verts[i]` joins `lines[i-1]` and `lines[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly {
    lines: Vec<Line>,
    verts: Vec<Hp>,
}

impl Poly {
    fn from_lines(lines: Vec<Line>) -> Option<Poly> {
        let n = lines.len();
        let verts: Vec<Hp> = (0..n)
            .map(|i| intersect(lines[(i + n - 1) % n], lines[i]))
            .collect();
        Poly { lines, verts }.normalized()
    }

    /// Drops zero-length edges; `None` if fewer than three vertices remain.
    fn normalized(self) -> Option<Poly> {
        let n = self.lines.len();
        let mut lines = Vec::with_capacity(n);
        let mut verts = Vec::with_capacity(n);
        for i in 0..n {
            let next = self.verts[(i + 1) % n];
            if !same_point(self.verts[i], next) {
                lines.push(self.lines[i]);
                verts.push(self.verts[i]);
            }
        }
        if lines.len() < 3 {
            return None;
        }
        // recompute vertices from the surviving lines
        let m = lines.len();
        let verts2: Vec<Hp> = (0..m)
            .map(|i| intersect(lines[(i + m - 1) % m], lines[i]))
            .collect();
        debug_assert!(verts.iter().zip(&verts2).all(|(p, q)| same_point(*p, *q)));
        Some(Poly {
            lines,
            verts: verts2,
        })
    }

    /// Intersection with a half-plane.
    fn clip(&self, l: Line) -> Option<Poly> {
        let n = self.lines.len();
        let inside: Vec<bool> = self.verts.iter().map(|&v| side(l, v) <= 0).collect();
        if inside.iter().all(|&b| b) {
            return Some(self.clone());
        }
        if !inside.iter().any(|&b| b) {
            return None;
        }
        let mut lines = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (cin, nin) = (inside[i], inside[(i + 1) % n]);
            match (cin, nin) {
                (true, true) => lines.push(self.lines[i]),
                (true, false) => {
                    lines.push(self.lines[i]);
                    lines.push(l);
                }
                (false, true) => lines.push(self.lines[i]),
                (false, false) => {}
            }
        }
        Poly::from_lines(lines)
    }

    fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Option<Poly> {
        if x0 >= x1 || y0 >= y1 {
            return None;
        }
        Poly::from_lines(vec![
            Line {
                a: 0,
                b: -1,
                c: -y0,
            },
            Line { a: 1, b: 0, c: x1 },
            Line { a: 0, b: 1, c: y1 },
            Line {
                a: -1,
                b: 0,
                c: -x0,
            },
        ])
    }

    fn clip_rect(&self, x0: i64, y0: i64, x1: i64, y1: i64) -> Option<Poly> {
        self.clip(Line {
            a: 0,
            b: -1,
            c: -y0,
        })?
        .clip(Line { a: 1, b: 0, c: x1 })?
        .clip(Line { a: 0, b: 1, c: y1 })?
        .clip(Line {
            a: -1,
            b: 0,
            c: -x0,
        })
    }

    /// Whether some vertex satisfies `4·|v|² ≥ d2`, i.e. the polygon reaches
    /// distance `√d2 / 2` from the site.
    fn reaches(&self, d2: i128) -> bool {
        self.verts
            .iter()
            .any(|&(x, y, w)| 4 * (x * x + y * y) >= d2 * w * w)
    }
}

fn bisector(dx: i64, dy: i64) -> Line {
    Line {
        a: 2 * dx,
        b: 2 * dy,
        c: dx * dx + dy * dy,
    }
}

/// Offsets within Chebyshev radius `r`, sorted by Euclidean length.
fn offsets_by_distance(r: i64) -> Vec<(i64, i64)> {
    let mut v: Vec<(i64, i64)> = (-r..=r)
        .flat_map(|x| (-r..=r).map(move |y| (x, y)))
        .filter(|&o| o != (0, 0))
        .collect();
    v.sort_by_key(|&(x, y)| (x * x + y * y, x, y));
    v
}

/// Adjacency notion for cell paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adjacency {
    Strong,
    Weak,
}

/// Which component [`strong_cluster_of_origin`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterMode {
    StrongOpen,
    StrongClosed,
    WeakOpen,
    WeakClosed,
}

/// State of a point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointState {
    Open,
    Closed,
    /// On the boundary between an open and a closed cell.
    Both,
}

/// Exact Voronoi tiling restricted to an inner window.
#[derive(Debug, Clone)]
pub struct VoronoiTiling {
    window: IRect,
    guard: i64,
    complete: bool,
    padded: IRect,
    /// Site index per point of the padded window, or `u32::MAX`.
    lookup: Vec<u32>,
    sites: Vec<Site>,
    open: Vec<bool>,
    /// Cell ∩ window, relative to the site; `None` if of zero area.
    cells: Vec<Option<Poly>>,
    strong: Vec<Vec<u32>>,
    weak: Vec<Vec<u32>>,
}

/// JSON dump of a tiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingDump {
    pub window: IRect,
    pub guard: i64,
    pub complete: bool,
    /// `[x, y, open]` for each site whose cell meets the window.
    pub sites: Vec<(i64, i64, bool)>,
    pub strong: Vec<Vec<u32>>,
    pub weak: Vec<Vec<u32>>,
}

/// Builds the tiling of `window` from a Voronoi field covering
/// `window` grown by `guard`. The result is marked incomplete, with no
/// cells, unless every unit square of the window lies within distance
/// `guard` of a single site (which certifies that every point of the window
/// has its nearest site inside the padded region).
pub fn build_tiling(field: &Configuration, window: IRect, guard: i64) -> Result<VoronoiTiling> {
    if field.model() != Model::Voronoi {
        return Err(Error::InvalidParam(
            "build_tiling needs a Voronoi field".into(),
        ));
    }
    if guard < 2 {
        return Err(Error::InvalidParam("guard must be at least 2".into()));
    }
    let padded = window.grow(guard);
    if !field.window().contains_rect(&padded) {
        return Err(Error::Window(format!(
            "field window {} does not cover {padded}",
            field.window()
        )));
    }
    let mut lookup = vec![u32::MAX; padded.num_sites()];
    let mut sites = Vec::new();
    let mut open = Vec::new();
    for z in padded.sites() {
        let v = field.voronoi_value(z).unwrap();
        if v != 0 {
            lookup[padded.index(z)] = sites.len() as u32;
            sites.push(z);
            open.push(v == 1);
        }
    }
    let mut t = VoronoiTiling {
        window,
        guard,
        complete: false,
        padded,
        lookup,
        cells: vec![None; sites.len()],
        strong: vec![Vec::new(); sites.len()],
        weak: vec![Vec::new(); sites.len()],
        sites,
        open,
    };
    if !t.certify_coverage() {
        return Ok(t);
    }
    t.complete = true;
    let offsets = offsets_by_distance(2 * guard + 1);
    for i in 0..t.sites.len() {
        t.cells[i] = t.compute_cell(i, &offsets);
    }
    for i in 0..t.sites.len() {
        let Some(cell) = &t.cells[i] else { continue };
        let z = t.sites[i];
        for &(dx, dy) in &offsets {
            let d2 = (dx * dx + dy * dy) as i128;
            if !cell.reaches(d2) {
                break;
            }
            let Some(j) = t.site_at(z.offset(dx, dy)) else {
                continue;
            };
            if t.cells[j].is_none() {
                continue;
            }
            let l = bisector(dx, dy);
            let mut on: Vec<Hp> = Vec::new();
            for &v in &cell.verts {
                if side(l, v) == 0 && !on.iter().any(|&q| same_point(q, v)) {
                    on.push(v);
                }
            }
            if !on.is_empty() {
                t.weak[i].push(j as u32);
                if on.len() >= 2 {
                    t.strong[i].push(j as u32);
                }
            }
        }
        t.weak[i].sort_unstable();
        t.strong[i].sort_unstable();
    }
    Ok(t)
}

impl VoronoiTiling {
    fn site_at(&self, z: Site) -> Option<usize> {
        if !self.padded.contains(z) {
            return None;
        }
        let k = self.lookup[self.padded.index(z)];
        (k != u32::MAX).then_some(k as usize)
    }

    fn certify_coverage(&self) -> bool {
        let g = self.guard;
        let g2 = g * g;
        let w = self.window;
        let near = offsets_by_distance(g + 1);
        for y in w.y0..w.y1 {
            for x in w.x0..w.x1 {
                let ok = near
                    .iter()
                    .chain(std::iter::once(&(0, 0)))
                    .any(|&(dx, dy)| {
                        let z = Site::new(x + dx, y + dy);
                        self.site_at(z).is_some()
                            && [(0, 0), (1, 0), (0, 1), (1, 1)].iter().all(|&(cx, cy)| {
                                let (ex, ey) = (x + cx - z.x, y + cy - z.y);
                                ex * ex + ey * ey <= g2
                            })
                    });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn compute_cell(&self, i: usize, offsets: &[(i64, i64)]) -> Option<Poly> {
        let z = self.sites[i];
        let w = self.window;
        let g = self.guard;
        let mut poly = Poly::rect(
            (w.x0 - z.x).max(-g),
            (w.y0 - z.y).max(-g),
            (w.x1 - z.x).min(g),
            (w.y1 - z.y).min(g),
        )?;
        for &(dx, dy) in offsets {
            let d2 = (dx * dx + dy * dy) as i128;
            if !poly.reaches(d2) {
                break;
            }
            if self.site_at(z.offset(dx, dy)).is_some() {
                poly = poly.clip(bisector(dx, dy))?;
            }
        }
        Some(poly)
    }

    pub fn window(&self) -> IRect {
        self.window
    }

    pub fn guard(&self) -> i64 {
        self.guard
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// All sites of the padded window.
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn is_open(&self, i: usize) -> bool {
        self.open[i]
    }

    pub fn index_of(&self, z: Site) -> Option<usize> {
        self.site_at(z)
    }

    /// Whether the cell of site `i` meets the window in positive area.
    pub fn in_window(&self, i: usize) -> bool {
        self.cells[i].is_some()
    }

    pub fn strong_neighbors(&self, i: usize) -> &[u32] {
        &self.strong[i]
    }

    pub fn weak_neighbors(&self, i: usize) -> &[u32] {
        &self.weak[i]
    }

    fn neighbors(&self, i: usize, adj: Adjacency) -> &[u32] {
        match adj {
            Adjacency::Strong => &self.strong[i],
            Adjacency::Weak => &self.weak[i],
        }
    }

    /// Vertices of the cell of site `i` inside the window, as exact absolute
    /// coordinates `(x, y)`.
    pub fn cell_vertices(&self, i: usize) -> Vec<(Ratio<i128>, Ratio<i128>)> {
        let z = self.sites[i];
        match &self.cells[i] {
            None => Vec::new(),
            Some(p) => p
                .verts
                .iter()
                .map(|&(x, y, w)| {
                    (
                        Ratio::new(x + z.x as i128 * w, w),
                        Ratio::new(y + z.y as i128 * w, w),
                    )
                })
                .collect(),
        }
    }

    fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::Window("tiling is incomplete".into()))
        }
    }

    /// Sites nearest to the point `(x, y)`.
    pub fn owners(&self, x: Ratio<i64>, y: Ratio<i64>) -> Result<Vec<usize>> {
        self.require_complete()?;
        let d = (*x.denom() as i128) * (*y.denom() as i128);
        let px = *x.numer() as i128 * *y.denom() as i128;
        let py = *y.numer() as i128 * *x.denom() as i128;
        let cx = x.floor().to_integer();
        let cy = y.floor().to_integer();
        let r = self.guard + 1;
        let mut best: Option<i128> = None;
        let mut owners = Vec::new();
        for dy in -r..=r + 1 {
            for dx in -r..=r + 1 {
                let z = Site::new(cx + dx, cy + dy);
                let Some(i) = self.site_at(z) else { continue };
                let ex = px - z.x as i128 * d;
                let ey = py - z.y as i128 * d;
                let dist = ex * ex + ey * ey;
                match best {
                    Some(b) if dist > b => {}
                    Some(b) if dist == b => owners.push(i),
                    _ => {
                        best = Some(dist);
                        owners.clear();
                        owners.push(i);
                    }
                }
            }
        }
        owners.sort_unstable();
        Ok(owners)
    }

    /// Open if all nearest sites are open, closed if all are closed, both
    /// otherwise.
    pub fn point_open(&self, x: Ratio<i64>, y: Ratio<i64>) -> Result<PointState> {
        let owners = self.owners(x, y)?;
        let any_open = owners.iter().any(|&i| self.open[i]);
        let any_closed = owners.iter().any(|&i| !self.open[i]);
        Ok(match (any_open, any_closed) {
            (true, false) => PointState::Open,
            (false, true) => PointState::Closed,
            _ => PointState::Both,
        })
    }

    /// Cell path crossing of `r` (inside the window) through cells of the
    /// given state that meet `r` in positive area.
    pub fn cell_crossing(
        &self,
        r: &IRect,
        dir: Direction,
        open: bool,
        adj: Adjacency,
    ) -> Result<Option<Vec<Site>>> {
        self.require_complete()?;
        if !self.window.contains_rect(r) {
            return Err(Error::InvalidRect(format!(
                "{r} not inside {}",
                self.window
            )));
        }
        let n = self.sites.len();
        // 0 = not in r, 1 = in r, bit 2 = start side, bit 4 = end side
        let mut tag = vec![0u8; n];
        for (i, cell) in self.cells.iter().enumerate() {
            if self.open[i] != open {
                continue;
            }
            let Some(cell) = cell else { continue };
            let z = self.sites[i];
            let Some(c) = cell.clip_rect(r.x0 - z.x, r.y0 - z.y, r.x1 - z.x, r.y1 - z.y) else {
                continue;
            };
            let mut t = 1u8;
            for &(x, y, w) in &c.verts {
                let (s, e) = match dir {
                    Direction::Horizontal => {
                        (x == (r.x0 - z.x) as i128 * w, x == (r.x1 - z.x) as i128 * w)
                    }
                    Direction::Vertical => {
                        (y == (r.y0 - z.y) as i128 * w, y == (r.y1 - z.y) as i128 * w)
                    }
                };
                if s {
                    t |= 2;
                }
                if e {
                    t |= 4;
                }
            }
            tag[i] = t;
        }
        let mut parent = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if tag[i] & 2 != 0 {
                parent[i] = i as u32;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            if tag[i] & 4 != 0 {
                let mut path = vec![self.sites[i]];
                let mut j = i;
                while parent[j] as usize != j {
                    j = parent[j] as usize;
                    path.push(self.sites[j]);
                }
                path.reverse();
                return Ok(Some(path));
            }
            for &k in self.neighbors(i, adj) {
                let k = k as usize;
                if tag[k] != 0 && parent[k] == u32::MAX {
                    parent[k] = i as u32;
                    queue.push_back(k);
                }
            }
        }
        Ok(None)
    }

    pub fn dump(&self) -> TilingDump {
        let keep: Vec<usize> = (0..self.sites.len())
            .filter(|&i| self.in_window(i))
            .collect();
        let mut renum = vec![u32::MAX; self.sites.len()];
        for (k, &i) in keep.iter().enumerate() {
            renum[i] = k as u32;
        }
        let map = |v: &[u32]| v.iter().map(|&j| renum[j as usize]).collect::<Vec<_>>();
        TilingDump {
            window: self.window,
            guard: self.guard,
            complete: self.complete,
            sites: keep
                .iter()
                .map(|&i| (self.sites[i].x, self.sites[i].y, self.open[i]))
                .collect(),
            strong: keep.iter().map(|&i| map(&self.strong[i])).collect(),
            weak: keep.iter().map(|&i| map(&self.weak[i])).collect(),
        }
    }
}

/// Weak open horizontal crossing; when it fails the blocking witness is a
/// strong closed vertical crossing (if one exists).
pub fn weak_open_crossing(tiling: &VoronoiTiling, r: &IRect) -> Result<CrossingResult> {
    let w = tiling.cell_crossing(r, Direction::Horizontal, true, Adjacency::Weak)?;
    let b = if w.is_none() {
        tiling.cell_crossing(r, Direction::Vertical, false, Adjacency::Strong)?
    } else {
        None
    };
    Ok(CrossingResult {
        holds: w.is_some(),
        witness: w,
        blocking_witness: b,
    })
}

/// Component of the cell(s) containing the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellCluster {
    pub sites: Vec<Site>,
    /// Set when the component contains a cell reaching the window boundary.
    pub truncated: bool,
}

/// Strong/weak open/closed component of the cells containing the origin
/// (every owning cell of the right state seeds the search).
pub fn strong_cluster_of_origin(tiling: &VoronoiTiling, mode: ClusterMode) -> Result<CellCluster> {
    let (open, adj) = match mode {
        ClusterMode::StrongOpen => (true, Adjacency::Strong),
        ClusterMode::StrongClosed => (false, Adjacency::Strong),
        ClusterMode::WeakOpen => (true, Adjacency::Weak),
        ClusterMode::WeakClosed => (false, Adjacency::Weak),
    };
    let zero = Ratio::from_integer(0);
    let seeds: Vec<usize> = tiling
        .owners(zero, zero)?
        .into_iter()
        .filter(|&i| tiling.open[i] == open)
        .collect();
    let mut seen = vec![false; tiling.sites.len()];
    let mut stack = Vec::new();
    for i in seeds {
        seen[i] = true;
        stack.push(i);
    }
    let w = tiling.window;
    let mut sites = Vec::new();
    let mut truncated = false;
    while let Some(i) = stack.pop() {
        let z = tiling.sites[i];
        sites.push(z);
        if let Some(c) = &tiling.cells[i] {
            truncated |= c.verts.iter().any(|&(x, y, d)| {
                x == (w.x0 - z.x) as i128 * d
                    || x == (w.x1 - z.x) as i128 * d
                    || y == (w.y0 - z.y) as i128 * d
                    || y == (w.y1 - z.y) as i128 * d
            });
        }
        for &k in tiling.neighbors(i, adj) {
            let k = k as usize;
            if !seen[k] && tiling.open[k] == open {
                seen[k] = true;
                stack.push(k);
            }
        }
    }
    sites.sort();
    Ok(CellCluster { sites, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::ModelParams;

    fn full_grid(window: IRect, guard: i64, open: impl Fn(Site) -> bool) -> VoronoiTiling {
        let f = Configuration::from_voronoi_values(window.grow(guard), 0, 0, |s| {
            if open(s) {
                1
            } else {
                -1
            }
        });
        build_tiling(&f, window, guard).unwrap()
    }

    #[test]
    fn full_grid_unit_squares() {
        let w = IRect::at(0, 0, 8, 8);
        let t = full_grid(w, 3, |_| true);
        assert!(t.is_complete());
        let i = t.index_of(Site::new(4, 4)).unwrap();
        let mut strong: Vec<Site> = t
            .strong_neighbors(i)
            .iter()
            .map(|&j| t.sites()[j as usize])
            .collect();
        strong.sort();
        assert_eq!(
            strong,
            vec![
                Site::new(3, 4),
                Site::new(4, 3),
                Site::new(4, 5),
                Site::new(5, 4)
            ]
        );
        assert_eq!(t.weak_neighbors(i).len(), 8);
        let verts = t.cell_vertices(i);
        assert_eq!(verts.len(), 4);
        for (x, y) in verts {
            assert_eq!((x * 2).to_integer().abs() % 2, 1);
            assert_eq!((y * 2).to_integer().abs() % 2, 1);
        }
    }

    #[test]
    fn single_site_covers_everything() {
        let w = IRect::at(0, 0, 4, 4);
        let f = Configuration::from_voronoi_values(w.grow(6), 0, 0, |s| {
            if s == Site::new(2, 2) {
                1
            } else {
                0
            }
        });
        let t = build_tiling(&f, w, 6).unwrap();
        assert!(t.is_complete());
        let i = t.index_of(Site::new(2, 2)).unwrap();
        assert_eq!(t.cell_vertices(i).len(), 4);
        assert!(t.weak_neighbors(i).is_empty());
    }

    #[test]
    fn empty_field_incomplete() {
        let w = IRect::at(0, 0, 10, 10);
        let f = Configuration::from_voronoi_values(w.grow(3), 0, 0, |_| 0);
        let t = build_tiling(&f, w, 3).unwrap();
        assert!(!t.is_complete());
        assert!(t
            .owners(Ratio::from_integer(1), Ratio::from_integer(1))
            .is_err());
    }

    #[test]
    fn boundary_points_both() {
        let w = IRect::at(-4, -4, 8, 8);
        let t = full_grid(w, 3, |s| s.x <= 0);
        let half = Ratio::new(1, 2);
        assert_eq!(
            t.point_open(half, Ratio::from_integer(0)).unwrap(),
            PointState::Both
        );
        assert_eq!(
            t.point_open(-half, Ratio::from_integer(0)).unwrap(),
            PointState::Open
        );
        assert_eq!(
            t.point_open(Ratio::new(3, 4), Ratio::from_integer(1))
                .unwrap(),
            PointState::Closed
        );
    }

    #[test]
    fn origin_on_corner_seeds_all_owners() {
        // sites at (±1, ±1)... shifted grid: cells meet at the origin
        let w = IRect::at(-6, -6, 12, 12);
        let f = Configuration::from_voronoi_values(w.grow(4), 0, 0, |s| {
            if s.x.rem_euclid(2) == 1 && s.y.rem_euclid(2) == 1 {
                if s.x > 0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        });
        let t = build_tiling(&f, w, 4).unwrap();
        let zero = Ratio::from_integer(0);
        assert_eq!(t.owners(zero, zero).unwrap().len(), 4);
        let c = strong_cluster_of_origin(&t, ClusterMode::StrongOpen).unwrap();
        assert!(c.sites.contains(&Site::new(1, 1)) && c.sites.contains(&Site::new(1, -1)));
        assert!(c.sites.iter().all(|s| s.x > 0));
    }

    #[test]
    fn random_instance_adjacency_consistent() {
        let w = IRect::at(0, 0, 20, 20);
        let params = ModelParams::new(0.5).unwrap().with_pi(0.3).unwrap();
        for idx in 0..5 {
            let f = Configuration::sample_voronoi_field(&params, w.grow(6), 2, idx);
            let t = build_tiling(&f, w, 6).unwrap();
            assert!(t.is_complete());
            for i in 0..t.sites().len() {
                for &j in t.strong_neighbors(i) {
                    assert!(t.weak_neighbors(i).contains(&j));
                }
                for &j in t.weak_neighbors(i) {
                    assert!(t.weak_neighbors(j as usize).contains(&(i as u32)));
                }
                for &j in t.strong_neighbors(i) {
                    assert!(t.strong_neighbors(j as usize).contains(&(i as u32)));
                }
            }
        }
    }
}
