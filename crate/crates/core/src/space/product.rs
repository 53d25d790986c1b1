//! Product of two systems with the max metric, under which a pair is close
//! exactly when both components are.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use super::{Point, SpaceKind, System};
use crate::error::{Error, Result};

pub struct ProductSystem {
    id: String,
    left: Arc<dyn System>,
    right: Arc<dyn System>,
}

impl ProductSystem {
    pub fn new(left: Arc<dyn System>, right: Arc<dyn System>) -> Self {
        let id = format!("{}_x_{}", left.id(), right.id());
        Self { id, left, right }
    }

    pub fn with_id(id: &str, left: Arc<dyn System>, right: Arc<dyn System>) -> Self {
        Self { id: id.into(), left, right }
    }

    pub fn left(&self) -> &Arc<dyn System> {
        &self.left
    }

    pub fn right(&self) -> &Arc<dyn System> {
        &self.right
    }

    fn split<'p>(&self, p: &'p Point) -> (&'p Point, &'p Point) {
        match p {
            Point::Pair(a, b) => (a, b),
            _ => panic!("product operation on non-pair point"),
        }
    }
}

impl System for ProductSystem {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Product
    }

    fn diameter(&self) -> f64 {
        self.left.diameter().max(self.right.diameter())
    }

    fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Pair(a, b) => self.left.contains(a) && self.right.contains(b),
            _ => false,
        }
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        let (al, ar) = self.split(a);
        let (bl, br) = self.split(b);
        self.left.metric(al, bl).max(self.right.metric(ar, br))
    }

    fn step(&self, p: &Point) -> Point {
        let (a, b) = self.split(p);
        Point::pair(self.left.step(a), self.right.step(b))
    }

    fn iterate_point(&self, p: &Point, n: usize) -> Point {
        let (a, b) = self.split(p);
        Point::pair(self.left.iterate_point(a, n), self.right.iterate_point(b, n))
    }

    fn can_sample(&self) -> bool {
        self.left.can_sample() && self.right.can_sample()
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        Ok(Point::pair(self.left.sample_point(rng)?, self.right.sample_point(rng)?))
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        match p {
            Point::Pair(a, b) => Ok(Point::pair(
                self.left.sample_near(a, radius, rng)?,
                self.right.sample_near(b, radius, rng)?,
            )),
            _ => Err(Error::MixedSpace("pair point expected".into())),
        }
    }

    fn splice_pair(
        &self,
        x: &Point,
        y: &Point,
        radius: f64,
        rng: &mut ChaCha8Rng,
    ) -> Option<(Point, Point)> {
        let (xl, xr) = self.split(x);
        let (yl, yr) = self.split(y);
        let (sl_x, sl_y) = self.left.splice_pair(xl, yl, radius, rng)?;
        let (sr_x, sr_y) = self.right.splice_pair(xr, yr, radius, rng)?;
        Some((Point::pair(sl_x, sr_x), Point::pair(sl_y, sr_y)))
    }

    fn graft_point(&self, of: &Point, radius: f64, tail: &Point) -> Option<Point> {
        let (ol, or_) = self.split(of);
        let (tl, tr) = self.split(tail);
        Some(Point::pair(
            self.left.graft_point(ol, radius, tl)?,
            self.right.graft_point(or_, radius, tr)?,
        ))
    }

    fn distance_trace(&self, x: &Point, y: &Point, n: usize) -> Vec<f64> {
        let (xl, xr) = self.split(x);
        let (yl, yr) = self.split(y);
        let tl = self.left.distance_trace(xl, yl, n);
        let tr = self.right.distance_trace(xr, yr, n);
        tl.into_iter().zip(tr).map(|(a, b)| a.max(b)).collect()
    }

    fn anchor_distance_trace(&self, moving: &Point, anchor: &Point, n: usize) -> Vec<f64> {
        let (ml, mr) = self.split(moving);
        let (al, ar) = self.split(anchor);
        let tl = self.left.anchor_distance_trace(ml, al, n);
        let tr = self.right.anchor_distance_trace(mr, ar, n);
        tl.into_iter().zip(tr).map(|(a, b)| a.max(b)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::space::real::{CircleMap, SquaringMap};

    #[test]
    fn max_metric_and_componentwise_step() {
        let sys = ProductSystem::new(
            Arc::new(CircleMap::rotation("rot", 0.3)),
            Arc::new(SquaringMap::new("sq")),
        );
        let p = Point::pair(Point::real1(0.1), Point::real1(0.5));
        let q = Point::pair(Point::real1(0.2), Point::real1(0.9));
        assert!((sys.metric(&p, &q) - 0.4).abs() < 1e-15);
        let stepped = sys.step(&p);
        match stepped {
            Point::Pair(a, b) => {
                match (*a, *b) {
                    (Point::Real(xa), Point::Real(xb)) => {
                        assert!((xa[0] - 0.4).abs() < 1e-12);
                        assert!((xb[0] - 0.25).abs() < 1e-15);
                    }
                    _ => unreachable!(),
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn trace_is_max_of_component_traces() {
        let sys = ProductSystem::new(
            Arc::new(CircleMap::rotation("rot", 0.3)),
            Arc::new(SquaringMap::new("sq")),
        );
        let mut rng = seeding::rng(13, &["prod"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let y = sys.sample_point(&mut rng).unwrap();
        let t = sys.distance_trace(&x, &y, 64);
        let mut cx = x.clone();
        let mut cy = y.clone();
        for i in 0..64 {
            if i > 0 {
                cx = sys.step(&cx);
                cy = sys.step(&cy);
            }
            assert_eq!(t[i], sys.metric(&cx, &cy));
        }
    }
}
