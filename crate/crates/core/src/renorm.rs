//! Renormalization and the combinatorial devices behind it: coarse block
//! processes, greedy separated sets, lattice-tree counts and the dual-cycle
//! series.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::crossing::{bond_crossing, site_crossing, Direction};
use crate::error::{Error, Result};
use crate::lattice::{Dir, EdgeId, IRect, LatticeKind, Site, Q};
use crate::rng::SplitMix;
use crate::sample::{Configuration, EdgeStates, Model, SiteStates};

/// Block event defining a coarse process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockEvent {
    /// Some vertex of the block joined to L∞-distance `2s` (coarse sites).
    Escape,
    /// Long crossing of a 6n×2n rectangle plus short crossings of both end
    /// squares (coarse bonds).
    Bridge,
}

/// Coarse process on ℤ² derived from a fine configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseConfig {
    pub event: BlockEvent,
    /// Block side `s` or bridge scale `n`.
    pub scale: i64,
    /// Coarse vertex window.
    pub window: IRect,
    /// Escape: one state per coarse site (row-major). Bridge: one per coarse
    /// edge, in [`IRect::edges`] order.
    states: Vec<bool>,
    /// Dependence range: states of coarse cells at graph distance ≥ k are
    /// functions of disjoint fine regions.
    pub k: i64,
}

impl CoarseConfig {
    /// Fine region that determines a coarse site's state (escape process).
    pub fn site_region(&self, v: Site) -> IRect {
        escape_region(self.scale, v)
    }

    /// Fine rectangle that determines a coarse edge's state (bridge process).
    pub fn edge_region(&self, e: EdgeId) -> IRect {
        bridge_rect(self.scale, e)
    }

    pub fn count_open(&self) -> usize {
        self.states.iter().filter(|&&b| b).count()
    }

    pub fn states(&self) -> &[bool] {
        &self.states
    }
}

impl SiteStates for CoarseConfig {
    fn site_open(&self, v: Site) -> bool {
        assert_eq!(self.event, BlockEvent::Escape);
        assert!(
            self.window.contains(v),
            "coarse site {v:?} outside {}",
            self.window
        );
        self.states[self.window.index(v)]
    }
}

impl EdgeStates for CoarseConfig {
    fn edge_open(&self, e: EdgeId) -> bool {
        assert_eq!(self.event, BlockEvent::Bridge);
        assert!(
            self.window.contains_edge(e),
            "coarse edge {e:?} outside {}",
            self.window
        );
        let i = self.window.index(e.origin);
        // edges() lists, per site in row-major order, E then N when present
        let before: usize = self
            .window
            .edges()
            .iter()
            .take_while(|f| self.window.index(f.origin) < i)
            .count();
        let off = match e.dir {
            Dir::E => 0,
            Dir::N => usize::from(e.origin.x < self.window.x1),
        };
        self.states[before + off]
    }
}

fn edge(u: Site, d: Dir) -> EdgeId {
    EdgeId::primal(u.x, u.y, d)
}

/// Block `S_v = [sv_x, s(v_x+1)] × [sv_y, s(v_y+1)]`.
pub fn block(s: i64, v: Site) -> IRect {
    IRect::at(s * v.x, s * v.y, s, s)
}

/// Vertices within L∞-distance `2s` of the block `S_v`.
pub fn escape_region(s: i64, v: Site) -> IRect {
    block(s, v).grow(2 * s)
}

/// Whether some vertex of `S_v` is joined by an open path to a vertex at
/// L∞-distance `2s` from `S_v`. Only edges of [`escape_region`] are read.
pub fn escape_event<E: EdgeStates + ?Sized>(states: &E, s: i64, v: Site) -> bool {
    let q = escape_region(s, v);
    let inner = block(s, v);
    let on_boundary = |u: Site| u.x == q.x0 || u.x == q.x1 || u.y == q.y0 || u.y == q.y1;
    let mut seen = vec![false; q.num_sites()];
    let mut queue: VecDeque<Site> = inner.sites().collect();
    for u in inner.sites() {
        seen[q.index(u)] = true;
    }
    while let Some(u) = queue.pop_front() {
        if on_boundary(u) {
            return true;
        }
        for (d, e) in [
            ((1, 0), edge(u, Dir::E)),
            ((0, 1), edge(u, Dir::N)),
            ((-1, 0), edge(u.offset(-1, 0), Dir::E)),
            ((0, -1), edge(u.offset(0, -1), Dir::N)),
        ] {
            let w = u.offset(d.0, d.1);
            if q.contains(w) && !seen[q.index(w)] && states.edge_open(e) {
                seen[q.index(w)] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

fn require_bond(fine: &Configuration) -> Result<()> {
    if fine.model().is_bond() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{:?} is not a bond model",
            fine.model()
        )))
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Coarse window of all `v` with `escape_region(s, v)` inside `fine`.
pub fn escape_window(fine: IRect, s: i64) -> Result<IRect> {
    if s < 1 {
        return Err(Error::InvalidParam("block side must be positive".into()));
    }
    let x0 = div_ceil(fine.x0 + 2 * s, s);
    let x1 = (fine.x1 - 3 * s).div_euclid(s);
    let y0 = div_ceil(fine.y0 + 2 * s, s);
    let y1 = (fine.y1 - 3 * s).div_euclid(s);
    if x0 > x1 || y0 > y1 {
        return Err(Error::Window(format!(
            "{fine} holds no block of side {s} with its margin"
        )));
    }
    Ok(IRect { x0, y0, x1, y1 })
}

/// Coarse site process: `v` open iff the escape event holds for `S_v`.
pub fn renorm_b(fine: &Configuration, s: i64) -> Result<CoarseConfig> {
    require_bond(fine)?;
    let window = escape_window(fine.window(), s)?;
    let states = window.sites().map(|v| escape_event(fine, s, v)).collect();
    Ok(CoarseConfig {
        event: BlockEvent::Escape,
        scale: s,
        window,
        states,
        k: 9,
    })
}

/// The 6n×2n (or 2n×6n) rectangle with corner `(2an, 2bn)` behind the
/// coarse edge from `(a, b)`.
pub fn bridge_rect(n: i64, e: EdgeId) -> IRect {
    let (x, y) = (2 * n * e.origin.x, 2 * n * e.origin.y);
    match e.dir {
        Dir::E => IRect::at(x, y, 6 * n, 2 * n),
        Dir::N => IRect::at(x, y, 2 * n, 6 * n),
    }
}

/// The two 2n×2n end squares of a bridge rectangle.
pub fn end_squares(n: i64, e: EdgeId) -> [IRect; 2] {
    let r = bridge_rect(n, e);
    match e.dir {
        Dir::E => [
            IRect::at(r.x0, r.y0, 2 * n, 2 * n),
            IRect::at(r.x0 + 4 * n, r.y0, 2 * n, 2 * n),
        ],
        Dir::N => [
            IRect::at(r.x0, r.y0, 2 * n, 2 * n),
            IRect::at(r.x0, r.y0 + 4 * n, 2 * n, 2 * n),
        ],
    }
}

fn crossing_in(fine: &Configuration, r: &IRect, dir: Direction) -> bool {
    match fine.model() {
        Model::Bond | Model::DepBond => bond_crossing(fine, r, dir).is_some(),
        Model::SiteSquare => site_crossing(fine, LatticeKind::SiteSquare, r, dir).is_some(),
        _ => unreachable!(),
    }
}

/// Bridge event of the coarse edge `e`.
pub fn bridge_event(fine: &Configuration, n: i64, e: EdgeId) -> bool {
    let r = bridge_rect(n, e);
    let (long, short) = match e.dir {
        Dir::E => (Direction::Horizontal, Direction::Vertical),
        Dir::N => (Direction::Vertical, Direction::Horizontal),
    };
    crossing_in(fine, &r, long)
        && end_squares(n, e)
            .iter()
            .all(|q| crossing_in(fine, q, short))
}

/// Whether two fine regions share a cell: an edge for bond models, a site
/// for site models.
pub fn regions_overlap(bond: bool, a: &IRect, b: &IRect) -> bool {
    let x0 = a.x0.max(b.x0);
    let x1 = a.x1.min(b.x1);
    let y0 = a.y0.max(b.y0);
    let y1 = a.y1.min(b.y1);
    if x0 > x1 || y0 > y1 {
        return false;
    }
    !bond || x1 > x0 || y1 > y0
}

fn edge_distance(e: EdgeId, f: EdgeId) -> i64 {
    let (a, b) = e.endpoints();
    let (c, d) = f.endpoints();
    [(a, c), (a, d), (b, c), (b, d)]
        .iter()
        .map(|(u, v)| (u.x - v.x).abs() + (u.y - v.y).abs())
        .min()
        .unwrap()
}

/// Smallest `k` such that bridge edges at graph distance ≥ `k` always have
/// disjoint fine regions.
pub fn bridge_dependence(bond: bool) -> i64 {
    let n = 1;
    let mut worst = 0;
    for e in [edge(Site::ORIGIN, Dir::E), edge(Site::ORIGIN, Dir::N)] {
        for x in -6..=6 {
            for y in -6..=6 {
                for dir in [Dir::E, Dir::N] {
                    let f = edge(Site::new(x, y), dir);
                    if regions_overlap(bond, &bridge_rect(n, e), &bridge_rect(n, f)) {
                        worst = worst.max(edge_distance(e, f));
                    }
                }
            }
        }
    }
    worst + 1
}

/// Coarse window of vertices all of whose edges inside it have their
/// bridge rectangles inside `fine`.
pub fn bridge_window(fine: IRect, n: i64) -> Result<IRect> {
    if n < 1 {
        return Err(Error::InvalidParam("bridge scale must be positive".into()));
    }
    let x0 = div_ceil(fine.x0, 2 * n);
    let y0 = div_ceil(fine.y0, 2 * n);
    let x1 = (fine.x1 - 4 * n).div_euclid(2 * n);
    let y1 = (fine.y1 - 4 * n).div_euclid(2 * n);
    if x1 <= x0 || y1 <= y0 {
        return Err(Error::Window(format!(
            "{fine} holds no coarse edge at scale {n}"
        )));
    }
    Ok(IRect { x0, y0, x1, y1 })
}

/// Coarse bond process: the edge from `(a, b)` is open iff the bridge
/// event holds. Supported on models whose crossing paths meet in a vertex
/// (bond models and the square site lattice).
pub fn renorm_g(fine: &Configuration, n: i64) -> Result<CoarseConfig> {
    let bond = match fine.model() {
        Model::Bond | Model::DepBond => true,
        Model::SiteSquare => false,
        m => {
            return Err(Error::InvalidParam(format!(
                "bridge renormalization needs crossing paths that meet in a vertex; {m:?} has none"
            )))
        }
    };
    let window = bridge_window(fine.window(), n)?;
    let states = window
        .edges()
        .into_iter()
        .map(|e| bridge_event(fine, n, e))
        .collect();
    Ok(CoarseConfig {
        event: BlockEvent::Bridge,
        scale: n,
        window,
        states,
        k: bridge_dependence(bond),
    })
}

/// Greedy subset of `vertices` with pairwise ℓ¹ distance at least `k`,
/// scanning in the given order.
pub fn greedy_separated_set(vertices: &[Site], k: i64) -> Vec<Site> {
    assert!(k >= 1);
    let mut blocked: HashSet<Site> = HashSet::new();
    let mut out = Vec::new();
    for &v in vertices {
        if blocked.contains(&v) {
            continue;
        }
        out.push(v);
        for dx in -(k - 1)..=(k - 1) {
            let r = k - 1 - dx.abs();
            for dy in -r..=r {
                blocked.insert(v.offset(dx, dy));
            }
        }
    }
    out
}

/// `⌈n / (2k² − 2k + 1)⌉`, the guaranteed size of a greedy separated set.
pub fn separated_set_bound(n: usize, k: i64) -> usize {
    let d = (2 * k * k - 2 * k + 1) as usize;
    n.div_ceil(d)
}

/// Number of `u ≠ 0` with `|u|₁ ≤ k − 1`, by enumeration.
pub fn exclusion_ball_size(k: i64) -> usize {
    let r = k - 1;
    (-r..=r)
        .flat_map(|x| (-r..=r).map(move |y| (x, y)))
        .filter(|&(x, y)| (x, y) != (0, 0) && x.abs() + y.abs() <= r)
        .count()
}

/// Largest `p` for which `4e · p^(1/(2k²−2k+1)) < 1` fails to hold is
/// `(4e)^-(2k²−2k+1)`; any `p` below it makes the tree sum converge.
pub fn tree_sum_threshold(k: i64) -> f64 {
    let d = (2 * k * k - 2 * k + 1) as f64;
    (4.0 * std::f64::consts::E).powf(-d)
}

/// Random lattice tree of `n` vertices containing the origin, grown by
/// attaching leaves.
pub fn random_lattice_tree(n: usize, rng: &mut SplitMix) -> Vec<Site> {
    let mut verts = vec![Site::ORIGIN];
    let mut set: HashSet<Site> = verts.iter().copied().collect();
    while verts.len() < n {
        let u = verts[rng.below(verts.len() as u64) as usize];
        let (dx, dy) = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.below(4) as usize];
        let w = u.offset(dx, dy);
        if set.insert(w) {
            verts.push(w);
        }
    }
    verts
}

type TreeKey = Vec<(i64, i64, u8)>;

fn normalize_tree(edges: &[EdgeId]) -> TreeKey {
    let mx = edges
        .iter()
        .flat_map(|e| [e.endpoints().0, e.endpoints().1])
        .min()
        .unwrap();
    let mut key: TreeKey = edges
        .iter()
        .map(|e| (e.origin.x - mx.x, e.origin.y - mx.y, e.dir as u8))
        .collect();
    key.sort_unstable();
    key
}

fn key_edges(key: &TreeKey) -> Vec<EdgeId> {
    key.iter()
        .map(|&(x, y, d)| {
            edge(
                Site::new(x, y),
                if d == Dir::E as u8 { Dir::E } else { Dir::N },
            )
        })
        .collect()
}

/// Largest `n` accepted by [`count_lattice_trees`].
pub const TREE_BUDGET: usize = 10;

/// Number of `n`-vertex subtrees of ℤ² containing the origin.
///
/// Trees are enumerated up to translation (each stored once, in a
/// canonical form anchored at its least vertex) by attaching leaves level by
/// level; each translation class contributes `n` trees through the origin.
pub fn count_lattice_trees(n: usize) -> Result<u64> {
    if n > TREE_BUDGET {
        return Err(Error::Budget(format!(
            "tree enumeration is limited to n ≤ {TREE_BUDGET}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    if n == 1 {
        return Ok(1);
    }
    let mut level: BTreeSet<TreeKey> = BTreeSet::new();
    level.insert(normalize_tree(&[edge(Site::ORIGIN, Dir::E)]));
    level.insert(normalize_tree(&[edge(Site::ORIGIN, Dir::N)]));
    for _ in 2..n {
        let mut next = BTreeSet::new();
        for key in &level {
            let edges = key_edges(key);
            let verts: HashSet<Site> = edges
                .iter()
                .flat_map(|e| [e.endpoints().0, e.endpoints().1])
                .collect();
            for &u in &verts {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let w = u.offset(dx, dy);
                    if verts.contains(&w) {
                        continue;
                    }
                    let mut grown = edges.clone();
                    grown.push(EdgeId::between(u, w).unwrap());
                    next.insert(normalize_tree(&grown));
                }
            }
        }
        level = next;
    }
    Ok(level.len() as u64 * n as u64)
}

/// `((ℓ − 2)/2) · 3^(ℓ−2)`, the bound on origin-surrounding dual cycles of
/// length `ℓ`.
pub fn cycle_count_bound(len: u32) -> Result<u128> {
    if len < 4 || len % 2 == 1 {
        return Err(Error::InvalidParam(format!(
            "cycle length {len} must be even and at least 4"
        )));
    }
    Ok((len as u128 - 2) / 2 * 3u128.pow(len - 2))
}

/// Largest cycle length accepted by [`count_surrounding_cycles`].
pub const CYCLE_BUDGET: u32 = 14;

/// Exhaustive count of self-avoiding cycles of length `ℓ` on the dual
/// lattice that surround the origin. Dual vertex `(a, b)` stands for
/// `(a + ½, b + ½)`; each surrounding cycle crosses the positive x-axis, so
/// walks are started on every crossing edge and deduplicated by edge set.
pub fn count_surrounding_cycles(len: u32) -> Result<u64> {
    cycle_count_bound(len)?;
    if len > CYCLE_BUDGET {
        return Err(Error::Budget(format!(
            "cycle enumeration is limited to ℓ ≤ {CYCLE_BUDGET}"
        )));
    }
    let l = len as usize;
    let mut found: HashSet<Vec<(i64, i64, u8)>> = HashSet::new();
    for k in 0..(l as i64 / 2) {
        // the crossing edge (k, -1)–(k, 0); walk from (k, 0) back to (k, -1)
        let start = (k, 0i64);
        let goal = (k, -1i64);
        let mut path = vec![goal, start];
        let mut on: HashSet<(i64, i64)> = path.iter().copied().collect();
        extend_cycle(&mut path, &mut on, goal, l, &mut found);
    }
    Ok(found.len() as u64)
}

fn extend_cycle(
    path: &mut Vec<(i64, i64)>,
    on: &mut HashSet<(i64, i64)>,
    goal: (i64, i64),
    l: usize,
    found: &mut HashSet<Vec<(i64, i64, u8)>>,
) {
    let cur = *path.last().unwrap();
    let remaining = l + 1 - path.len(); // edges still to place, closing edge included
    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
        let w = (cur.0 + dx, cur.1 + dy);
        let dist = (w.0 - goal.0).abs() + (w.1 - goal.1).abs();
        if w == goal {
            if remaining == 1 && path.len() > 2 {
                let mut cyc = path.clone();
                cyc.push(goal);
                if surrounds_origin(&cyc) {
                    found.insert(cycle_key(&cyc));
                }
            }
            continue;
        }
        if on.contains(&w) || dist as usize > remaining - 1 || remaining <= 1 {
            continue;
        }
        path.push(w);
        on.insert(w);
        extend_cycle(path, on, goal, l, found);
        on.remove(&w);
        path.pop();
    }
}

fn cycle_key(cyc: &[(i64, i64)]) -> Vec<(i64, i64, u8)> {
    let mut key: Vec<(i64, i64, u8)> = cyc
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            (a.0, a.1, u8::from(b.1 != a.1))
        })
        .collect();
    key.sort_unstable();
    key
}

/// Parity of crossings of the positive x-axis.
fn surrounds_origin(cyc: &[(i64, i64)]) -> bool {
    cyc.windows(2)
        .filter(|w| {
            let (a, b) = (w[0], w[1]);
            a.0 == b.0 && a.0 >= 0 && a.1.min(b.1) == -1 && a.1.max(b.1) == 0
        })
        .count()
        % 2
        == 1
}

/// Certified value: the true sum lies in `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub value: f64,
    pub tail_bound: f64,
}

impl Enclosure {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeriesResult {
    Converges(Enclosure),
    Divergent,
}

/// Cap on summed terms; past it the enclosure keeps whatever tail bound
/// was reached.
const SERIES_MAX_TERMS: u64 = 50_000_000;

/// `Σ_{ℓ ≥ 4 even} ((ℓ−2)/2) 3^(ℓ−2) (1−p₀)^(ℓ/4)`.
///
/// With `ℓ = 2j` the terms are `(j−1) ρ^j / 9`, `ρ = 9√(1−p₀)`; the series
/// diverges iff `ρ ≥ 1`, i.e. `81(1−p₀) ≥ 1`, which is decided exactly on
/// the rational `p₀`. The tail past `J` is bounded in closed form by
/// `ρ^J ((J−1)/(1−ρ) + ρ/(1−ρ)²) / 9`.
pub fn dual_cycle_series(p0: Q, tail_tol: f64) -> Result<SeriesResult> {
    let zero = Q::from_integer(0);
    let one = Q::from_integer(1);
    if p0 <= zero || p0 >= one {
        return Err(Error::InvalidParam("p0 must lie in (0, 1)".into()));
    }
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::InvalidParam(
            "tail tolerance must be positive".into(),
        ));
    }
    let q = one - p0;
    if Q::from_integer(81) * q >= one {
        return Ok(SeriesResult::Divergent);
    }
    let qf = *q.numer() as f64 / *q.denom() as f64;
    let rho = 9.0 * qf.sqrt();
    let tail = |j: f64, pow: f64| pow * ((j - 1.0) / (1.0 - rho) + rho / (1.0 - rho).powi(2)) / 9.0;
    let mut sum = 0.0f64;
    let mut pow = rho * rho; // rho^j for j = 2
    let mut j = 2u64;
    loop {
        let t = tail(j as f64, pow);
        if t < tail_tol || j >= SERIES_MAX_TERMS {
            // rounding allowance for the partial sum
            let slack = sum * (j as f64) * f64::EPSILON;
            return Ok(SeriesResult::Converges(Enclosure {
                value: sum,
                tail_bound: t + slack,
            }));
        }
        sum += (j - 1) as f64 * pow / 9.0;
        pow *= rho;
        j += 1;
    }
}
