//! Dependent bond model: an edge is open iff a symmetric weighted sum of
//! i.i.d. ±1 signs around its midpoint is positive.
//!
//! All half-integer points are handled in doubled coordinates: `(a2, b2)`
//! stands for `(a2/2, b2/2)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeId, IRect};
use crate::rng::{self, Stream};
use crate::sample::{Configuration, EdgeStates, Model, ModelParams};

/// Validated weight function with full dihedral symmetry.
///
/// Serialized as a JSON list of `[2a, 2b, w]` triples over the symmetry
/// quotient (one representative with `0 <= 2b <= 2a` per orbit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[i64; 3]>", into = "Vec<[i64; 3]>")]
pub struct WeightFunction {
    /// Full support, sorted, zero weights dropped.
    support: Vec<(i64, i64, i64)>,
}

fn canonical(a2: i64, b2: i64) -> (i64, i64) {
    let (x, y) = (a2.abs(), b2.abs());
    (x.max(y), x.min(y))
}

fn orbit(a2: i64, b2: i64) -> Vec<(i64, i64)> {
    let mut pts = Vec::with_capacity(8);
    for (x, y) in [(a2, b2), (b2, a2)] {
        for (sx, sy) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
            pts.push((sx * x, sy * y));
        }
    }
    pts.sort();
    pts.dedup();
    pts
}

/// Checks the weight conditions on a raw (possibly asymmetric) support
/// listing. Missing points have weight 0.
pub fn validate_weight(raw: &[(i64, i64, i64)]) -> Result<()> {
    let mut map = BTreeMap::new();
    for &(a2, b2, w) in raw {
        if map.insert((a2, b2), w).is_some() {
            return Err(Error::InvalidParam(format!(
                "duplicate weight entry at ({a2}/2, {b2}/2)"
            )));
        }
    }
    let at = |a2: i64, b2: i64| map.get(&(a2, b2)).copied().unwrap_or(0);
    if at(0, 0) % 2 == 0 {
        return Err(Error::WeightViolation {
            condition: "w(0,0) is odd",
            a2: 0,
            b2: 0,
        });
    }
    for (&(a2, b2), &w) in &map {
        if (a2, b2) != (0, 0) && w % 2 != 0 {
            return Err(Error::WeightViolation {
                condition: "w(a,b) is even away from the origin",
                a2,
                b2,
            });
        }
    }
    for (&(a2, b2), &w) in &map {
        if w != at(b2, a2) {
            return Err(Error::WeightViolation {
                condition: "w(a,b) = w(b,a)",
                a2,
                b2,
            });
        }
        if w != at(-a2, b2) {
            return Err(Error::WeightViolation {
                condition: "w(a,b) = w(-a,b)",
                a2,
                b2,
            });
        }
    }
    for (&(a2, b2), &w) in &map {
        if w < 0 {
            return Err(Error::WeightViolation {
                condition: "w(a,b) >= 0",
                a2,
                b2,
            });
        }
    }
    Ok(())
}

impl WeightFunction {
    /// Expands one value per symmetry orbit and validates the result.
    pub fn from_quotient(entries: &[(i64, i64, i64)]) -> Result<Self> {
        let mut full = BTreeMap::new();
        for &(a2, b2, w) in entries {
            let key = canonical(a2, b2);
            for pt in orbit(key.0, key.1) {
                if let Some(old) = full.insert(pt, w) {
                    if old != w {
                        return Err(Error::InvalidParam(format!(
                            "conflicting weights for the orbit of ({a2}/2, {b2}/2)"
                        )));
                    }
                }
            }
        }
        let raw: Vec<_> = full.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        WeightFunction::from_full(&raw)
    }

    /// Validates a full support listing as given.
    pub fn from_full(raw: &[(i64, i64, i64)]) -> Result<Self> {
        validate_weight(raw)?;
        let mut support: Vec<_> = raw.iter().copied().filter(|t| t.2 != 0).collect();
        support.sort();
        Ok(WeightFunction { support })
    }

    /// Weight 1 at the origin only: reduces to independent bond percolation.
    pub fn delta() -> Self {
        WeightFunction::from_quotient(&[(0, 0, 1)]).unwrap()
    }

    /// Weight 1 at the origin and 2 at the four points at distance ½.
    pub fn plus() -> Self {
        WeightFunction::from_quotient(&[(0, 0, 1), (1, 0, 2)]).unwrap()
    }

    pub fn support(&self) -> &[(i64, i64, i64)] {
        &self.support
    }

    pub fn get(&self, a2: i64, b2: i64) -> i64 {
        self.support
            .iter()
            .find(|t| t.0 == a2 && t.1 == b2)
            .map_or(0, |t| t.2)
    }

    pub fn total(&self) -> i64 {
        self.support.iter().map(|t| t.2).sum()
    }

    /// Support radius in doubled units (L∞).
    pub fn radius2(&self) -> i64 {
        self.support
            .iter()
            .map(|t| t.0.abs().max(t.1.abs()))
            .max()
            .unwrap_or(0)
    }

    /// L∞ distance between edge midpoints beyond which edge states are
    /// independent: `2ρ + 1`.
    pub fn dependence_range(&self) -> i64 {
        self.radius2() + 1
    }

    /// One entry per orbit, `0 <= b2 <= a2`.
    pub fn quotient(&self) -> Vec<(i64, i64, i64)> {
        self.support
            .iter()
            .copied()
            .filter(|&(a, b, _)| 0 <= b && b <= a)
            .collect()
    }
}

impl TryFrom<Vec<[i64; 3]>> for WeightFunction {
    type Error = Error;
    fn try_from(v: Vec<[i64; 3]>) -> Result<Self> {
        let entries: Vec<_> = v.into_iter().map(|t| (t[0], t[1], t[2])).collect();
        WeightFunction::from_quotient(&entries)
    }
}

impl From<WeightFunction> for Vec<[i64; 3]> {
    fn from(w: WeightFunction) -> Self {
        w.quotient()
            .into_iter()
            .map(|(a, b, c)| [a, b, c])
            .collect()
    }
}

/// ±1 values on the half-integer grid over a doubled-coordinate window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignField {
    window2: IRect,
    values: Vec<i8>,
}

impl SignField {
    /// `v = +1` iff its variate is below `p`.
    pub fn sample(p: f64, window2: IRect, seed: u64, index: u64) -> Self {
        SignField::from_fn(window2, |a2, b2| {
            if rng::is_open(rng::uniform(seed, index, Stream::Sign, a2, b2), p) {
                1
            } else {
                -1
            }
        })
    }

    pub fn from_fn(window2: IRect, f: impl Fn(i64, i64) -> i8) -> Self {
        let values = window2
            .sites()
            .map(|s| {
                let v = f(s.x, s.y);
                assert!(v == 1 || v == -1);
                v
            })
            .collect();
        SignField { window2, values }
    }

    pub fn window2(&self) -> IRect {
        self.window2
    }

    pub fn value(&self, a2: i64, b2: i64) -> Result<i8> {
        let s = crate::lattice::Site::new(a2, b2);
        if !self.window2.contains(s) {
            return Err(Error::Coverage(a2, b2));
        }
        Ok(self.values[self.window2.index(s)])
    }

    pub fn negated(&self) -> Self {
        SignField {
            window2: self.window2,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Copy with one value replaced.
    pub fn with_value(&self, a2: i64, b2: i64, v: i8) -> Self {
        let mut f = self.clone();
        let s = crate::lattice::Site::new(a2, b2);
        let i = f.window2.index(s);
        f.values[i] = v;
        f
    }
}

/// The weighted sign sum at the midpoint of `e`. Always odd.
pub fn edge_sum(w: &WeightFunction, field: &SignField, e: EdgeId) -> Result<i64> {
    let (mx, my) = e.midpoint2();
    let mut sum = 0i64;
    for &(a2, b2, wt) in &w.support {
        sum += wt * field.value(mx + a2, my + b2)? as i64;
    }
    assert!(sum % 2 != 0, "weighted sign sum must be odd");
    Ok(sum)
}

pub fn edge_state(w: &WeightFunction, field: &SignField, e: EdgeId) -> Result<bool> {
    Ok(edge_sum(w, field, e)? > 0)
}

/// Doubled-coordinate window covering every sign read by edges of `window`.
pub fn sign_window(w: &WeightFunction, window: IRect) -> IRect {
    IRect::new(2 * window.x0, 2 * window.y0, 2 * window.x1, 2 * window.y1)
        .unwrap()
        .grow(w.radius2())
}

/// Edge states of the dependent model on `window` derived from a given field.
pub fn derive_config(
    w: &WeightFunction,
    field: &SignField,
    window: IRect,
    seed: u64,
    index: u64,
) -> Result<Configuration> {
    let need = sign_window(w, window);
    if !field.window2.contains_rect(&need) {
        // report a concrete missing point
        for s in need.sites() {
            field.value(s.x, s.y)?;
        }
    }
    let mut c = Configuration::from_edges(Model::DepBond, window, seed, index, |e| {
        edge_state(w, field, e).expect("coverage checked")
    });
    c.set_dependence(w.dependence_range());
    Ok(c)
}

/// Samples a sign field on the padded window and derives every edge state.
pub fn build_dependent_config(
    w: &WeightFunction,
    params: &ModelParams,
    window: IRect,
    seed: u64,
    index: u64,
) -> Result<Configuration> {
    validate_weight(w.support())?;
    let field = SignField::sample(params.p, sign_window(w, window), seed, index);
    derive_config(w, &field, window, seed, index)
}

/// Dependent bond states evaluated on demand from the counter-based sign
/// variates (the same signs [`SignField::sample`] would produce).
#[derive(Debug, Clone)]
pub struct DepBondField {
    pub weight: WeightFunction,
    pub seed: u64,
    pub index: u64,
    pub p: f64,
}

impl EdgeStates for DepBondField {
    fn edge_open(&self, e: EdgeId) -> bool {
        let (mx, my) = e.midpoint2();
        let mut sum = 0i64;
        for &(a2, b2, wt) in &self.weight.support {
            let u = rng::uniform(self.seed, self.index, Stream::Sign, mx + a2, my + b2);
            sum += if rng::is_open(u, self.p) { wt } else { -wt };
        }
        debug_assert!(sum % 2 != 0);
        sum > 0
    }
}

/// Smallest `p` at which edge `e` is open under coupled sign variates: the
/// edge opens once the positive signs carry more than half the total weight.
/// The edge is open at `p` iff `p` exceeds the returned value.
pub fn edge_threshold(w: &WeightFunction, seed: u64, index: u64, e: EdgeId) -> f64 {
    let (mx, my) = e.midpoint2();
    let mut vs: Vec<(f64, i64)> = w
        .support
        .iter()
        .map(|&(a2, b2, wt)| {
            (
                rng::uniform(seed, index, Stream::Sign, mx + a2, my + b2),
                wt,
            )
        })
        .collect();
    vs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = w.total();
    let mut acc = 0;
    for (u, wt) in vs {
        acc += wt;
        if 2 * acc > total {
            return u;
        }
    }
    unreachable!("total weight is odd and positive")
}
