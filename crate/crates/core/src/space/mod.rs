//! State spaces: points, metrics, and iteration. A `System` couples a
//! compact metric space with a continuous self-map; points are immutable and
//! every operation may run from multiple threads.

pub mod finite;
pub mod product;
pub mod real;
pub mod shift;
pub mod symbolic;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
pub use symbolic::{SymbolicPoint, COMPARE_DEPTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Torus,
    Interval,
    Symbolic,
    Finite,
    Product,
}

impl std::fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpaceKind::Torus => "torus",
            SpaceKind::Interval => "interval",
            SpaceKind::Symbolic => "symbolic",
            SpaceKind::Finite => "finite",
            SpaceKind::Product => "product",
        };
        f.write_str(s)
    }
}

/// A point of some state space. `Real` carries coordinates in [0, 1),
/// `Symbolic` a deterministic symbol generator, `Finite` an id into an
/// explicit metric table, and `Pair` an element of a product space.
#[derive(Clone)]
pub enum Point {
    Real(Vec<f64>),
    Symbolic(SymbolicPoint),
    Finite(usize),
    Pair(Box<Point>, Box<Point>),
}

impl Point {
    pub fn real1(x: f64) -> Self {
        Point::Real(vec![x])
    }

    pub fn pair(a: Point, b: Point) -> Self {
        Point::Pair(Box::new(a), Box::new(b))
    }

    pub fn describe(&self) -> String {
        match self {
            Point::Real(xs) => format!("{xs:?}"),
            Point::Symbolic(p) => p.describe(),
            Point::Finite(id) => format!("#{id}"),
            Point::Pair(a, b) => format!("({} x {})", a.describe(), b.describe()),
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicPoint> {
        match self {
            Point::Symbolic(p) => Some(p),
            _ => None,
        }
    }
}

/// A dynamical system: compact metric space plus continuous self-map.
///
/// `metric` and `step` assume points that `contains` accepts; the public
/// free functions below validate inputs once and then stay on the fast path.
pub trait System: Send + Sync {
    fn id(&self) -> &str;
    fn kind(&self) -> SpaceKind;
    /// Upper bound for the metric; sup distance for the catalog spaces.
    fn diameter(&self) -> f64;
    fn contains(&self, p: &Point) -> bool;
    fn metric(&self, a: &Point, b: &Point) -> f64;
    fn step(&self, p: &Point) -> Point;

    fn iterate_point(&self, p: &Point, n: usize) -> Point {
        let mut cur = p.clone();
        for _ in 0..n {
            cur = self.step(&cur);
        }
        cur
    }

    /// Whether `sample_point` / `sample_near` are available.
    fn can_sample(&self) -> bool {
        true
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point>;

    /// A point at distance strictly below `radius` from `p`.
    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point>;

    /// A pair agreeing with (x, y) at resolution `radius` that shares a
    /// common continuation afterwards, when the space is closed under such
    /// splices. Orbits of a spliced pair collide exactly.
    fn splice_pair(
        &self,
        _x: &Point,
        _y: &Point,
        _radius: f64,
        _rng: &mut ChaCha8Rng,
    ) -> Option<(Point, Point)> {
        None
    }

    /// `of` truncated at the resolution of `radius` and continued by `tail`,
    /// when the space is closed under grafting.
    fn graft_point(&self, _of: &Point, _radius: f64, _tail: &Point) -> Option<Point> {
        None
    }

    /// d(T^i x, T^i y) for i in [0, n). Overridden where a bulk pass is much
    /// cheaper than pointwise metric calls.
    fn distance_trace(&self, x: &Point, y: &Point, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut cx = x.clone();
        let mut cy = y.clone();
        for i in 0..n {
            if i > 0 {
                cx = self.step(&cx);
                cy = self.step(&cy);
            }
            out.push(self.metric(&cx, &cy));
        }
        out
    }

    /// d(T^i moving, anchor) for i in [0, n): the moving orbit tracked
    /// against a fixed point.
    fn anchor_distance_trace(&self, moving: &Point, anchor: &Point, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut cur = moving.clone();
        for i in 0..n {
            if i > 0 {
                cur = self.step(&cur);
            }
            out.push(self.metric(&cur, anchor));
        }
        out
    }
}

fn validate(sys: &dyn System, p: &Point) -> Result<()> {
    if sys.contains(p) {
        Ok(())
    } else {
        Err(Error::MixedSpace(format!(
            "point {} does not belong to system '{}'",
            p.describe(),
            sys.id()
        )))
    }
}

/// T^n x.
pub fn iterate(sys: &dyn System, x: &Point, n: usize) -> Result<Point> {
    validate(sys, x)?;
    Ok(sys.iterate_point(x, n))
}

/// The distance summands d(T^i x, T^i y), i < n.
pub fn orbit_distance_trace(sys: &dyn System, x: &Point, y: &Point, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    validate(sys, x)?;
    validate(sys, y)?;
    Ok(sys.distance_trace(x, y, n))
}

/// Indicator of the visit set {i < n : T^i x in U} for U given as a
/// predicate.
pub fn hitting_trace(
    sys: &dyn System,
    x: &Point,
    inside: &dyn Fn(&Point) -> bool,
    n: usize,
) -> Result<Vec<bool>> {
    if n == 0 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    validate(sys, x)?;
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for i in 0..n {
        if i > 0 {
            cur = sys.step(&cur);
        }
        out.push(inside(&cur));
    }
    Ok(out)
}

/// A materialized orbit segment.
pub struct Orbit {
    pts: Vec<Point>,
}

impl Orbit {
    pub fn new(sys: &dyn System, base: &Point, horizon: usize) -> Result<Self> {
        validate(sys, base)?;
        let mut pts = Vec::with_capacity(horizon);
        let mut cur = base.clone();
        for i in 0..horizon {
            if i > 0 {
                cur = sys.step(&cur);
            }
            pts.push(cur.clone());
        }
        Ok(Self { pts })
    }

    pub fn get(&self, i: usize) -> &Point {
        &self.pts[i]
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
}

/// Same space and map, metric multiplied by a constant factor.
pub struct ScaledMetric {
    inner: Arc<dyn System>,
    factor: f64,
    id: String,
}

impl ScaledMetric {
    pub fn new(inner: Arc<dyn System>, factor: f64) -> Self {
        assert!(factor > 0.0);
        let id = format!("{}*{}", inner.id(), factor);
        Self { inner, factor, id }
    }
}

impl System for ScaledMetric {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        self.inner.kind()
    }

    fn diameter(&self) -> f64 {
        self.inner.diameter() * self.factor
    }

    fn contains(&self, p: &Point) -> bool {
        self.inner.contains(p)
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        self.inner.metric(a, b) * self.factor
    }

    fn step(&self, p: &Point) -> Point {
        self.inner.step(p)
    }

    fn iterate_point(&self, p: &Point, n: usize) -> Point {
        self.inner.iterate_point(p, n)
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        self.inner.sample_point(rng)
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        self.inner.sample_near(p, radius / self.factor, rng)
    }

    fn distance_trace(&self, x: &Point, y: &Point, n: usize) -> Vec<f64> {
        let mut t = self.inner.distance_trace(x, y, n);
        for d in &mut t {
            *d *= self.factor;
        }
        t
    }

    fn anchor_distance_trace(&self, moving: &Point, anchor: &Point, n: usize) -> Vec<f64> {
        let mut t = self.inner.anchor_distance_trace(moving, anchor, n);
        for d in &mut t {
            *d *= self.factor;
        }
        t
    }
}

/// Samples triples and checks the metric axioms within `tol`: symmetry
/// (exact), identity at the diagonal, non-negativity, the diameter bound,
/// and the triangle inequality.
pub fn check_metric_axioms(
    sys: &dyn System,
    triples: usize,
    seed: u64,
    tol: f64,
) -> std::result::Result<(), String> {
    let mut rng = crate::seeding::rng(seed, &["metric_axioms", sys.id()], 0);
    for t in 0..triples {
        let a = sys.sample_point(&mut rng).map_err(|e| e.to_string())?;
        let b = sys.sample_point(&mut rng).map_err(|e| e.to_string())?;
        let c = sys.sample_point(&mut rng).map_err(|e| e.to_string())?;
        let dab = sys.metric(&a, &b);
        let dba = sys.metric(&b, &a);
        let dac = sys.metric(&a, &c);
        let dbc = sys.metric(&b, &c);
        if sys.metric(&a, &a) != 0.0 {
            return Err(format!("d(a,a) != 0 at triple {t}"));
        }
        if dab != dba {
            return Err(format!("asymmetric metric at triple {t}: {dab} vs {dba}"));
        }
        if !(0.0..=sys.diameter() + tol).contains(&dab) {
            return Err(format!("distance {dab} outside [0, diam] at triple {t}"));
        }
        if dac > dab + dbc + tol {
            return Err(format!(
                "triangle inequality violated at triple {t}: {dac} > {dab} + {dbc}"
            ));
        }
    }
    Ok(())
}
