//! Circle and interval maps on real coordinates in [0, 1).
//!
//! Circle maps keep their state on the dyadic lattice k/2^53 and step by
//! exact integer arithmetic: a rotation is then an exact isometry (the
//! lattice gap between two orbits is invariant), and angle doubling matches
//! the plain floating evaluation bit for bit. Arbitrary inputs are quantized
//! once on first use.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::shift::circle_dist;
use super::{Point, SpaceKind, System};
use crate::error::{Error, Result};

const LATTICE_BITS: u32 = 53;
const LATTICE: u64 = 1 << LATTICE_BITS;
const LATTICE_F: f64 = LATTICE as f64;

#[inline]
fn to_lattice(x: f64) -> u64 {
    ((x.rem_euclid(1.0) * LATTICE_F).round() as u64) % LATTICE
}

#[inline]
fn from_lattice(k: u64) -> f64 {
    k as f64 / LATTICE_F
}

#[derive(Clone, Copy, Debug)]
enum CircleRule {
    /// x -> x + alpha (mod 1)
    Rotate { alpha_bits: u64 },
    /// x -> 2x (mod 1)
    Double,
}

/// A self-map of the circle R/Z with the wrap-around metric
/// min(|a-b|, 1-|a-b|), taken coordinatewise-max in higher dimensions
/// (dimension 1 throughout the catalog).
pub struct CircleMap {
    id: String,
    rule: CircleRule,
}

impl CircleMap {
    pub fn rotation(id: &str, alpha: f64) -> Self {
        Self { id: id.into(), rule: CircleRule::Rotate { alpha_bits: to_lattice(alpha) } }
    }

    pub fn doubling(id: &str) -> Self {
        Self { id: id.into(), rule: CircleRule::Double }
    }
}

impl System for CircleMap {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Torus
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::Real(xs) if xs.len() == 1 && (0.0..1.0).contains(&xs[0]))
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Real(xa), Point::Real(xb)) => circle_dist(xa[0], xb[0]),
            _ => panic!("circle metric on non-real points"),
        }
    }

    fn step(&self, p: &Point) -> Point {
        let x = match p {
            Point::Real(xs) => xs[0],
            _ => panic!("circle step on non-real point"),
        };
        let k = to_lattice(x);
        let next = match self.rule {
            CircleRule::Rotate { alpha_bits } => (k + alpha_bits) % LATTICE,
            CircleRule::Double => (2 * k) % LATTICE,
        };
        Point::real1(from_lattice(next))
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        Ok(Point::real1(from_lattice(rng.gen_range(0..LATTICE))))
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        let x = match p {
            Point::Real(xs) => xs[0],
            _ => return Err(Error::MixedSpace("real point expected".into())),
        };
        let span = (radius * LATTICE_F).floor() as u64;
        if span == 0 {
            return Err(Error::RadiusTooSmall(radius));
        }
        let off = rng.gen_range(0..span);
        let k = to_lattice(x);
        let next = if rng.gen() { (k + off) % LATTICE } else { (k + LATTICE - off) % LATTICE };
        Ok(Point::real1(from_lattice(next)))
    }
}

/// x -> x^2 on [0, 1) with the absolute-value metric. Orbits decrease to the
/// fixed point 0; the missing right endpoint keeps the map strictly
/// contracting in the limit.
pub struct SquaringMap {
    id: String,
}

impl SquaringMap {
    pub fn new(id: &str) -> Self {
        Self { id: id.into() }
    }
}

impl System for SquaringMap {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Interval
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::Real(xs) if xs.len() == 1 && (0.0..1.0).contains(&xs[0]))
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Real(xa), Point::Real(xb)) => (xa[0] - xb[0]).abs(),
            _ => panic!("interval metric on non-real points"),
        }
    }

    fn step(&self, p: &Point) -> Point {
        match p {
            Point::Real(xs) => Point::real1(xs[0] * xs[0]),
            _ => panic!("interval step on non-real point"),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        Ok(Point::real1(rng.gen::<f64>()))
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        let x = match p {
            Point::Real(xs) => xs[0],
            _ => return Err(Error::MixedSpace("real point expected".into())),
        };
        if radius <= f64::EPSILON {
            return Err(Error::RadiusTooSmall(radius));
        }
        loop {
            let u = radius * (2.0 * rng.gen::<f64>() - 1.0);
            if u.abs() >= radius {
                continue;
            }
            let y = x + u;
            if (0.0..1.0).contains(&y) {
                return Ok(Point::real1(y));
            }
            let y = x - u;
            if (0.0..1.0).contains(&y) {
                return Ok(Point::real1(y));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::space::iterate;

    #[test]
    fn rotation_step_is_exact() {
        let sys = CircleMap::rotation("rot", 0.5);
        let p = iterate(&sys, &Point::real1(0.25), 1).unwrap();
        match p {
            Point::Real(xs) => assert_eq!(xs[0], 0.75),
            _ => unreachable!(),
        }
    }

    #[test]
    fn iterate_zero_is_identity() {
        let sys = CircleMap::rotation("rot", 0.4);
        let x = Point::real1(0.3);
        let p = iterate(&sys, &x, 0).unwrap();
        assert_eq!(sys.metric(&x, &p), 0.0);
    }

    #[test]
    fn doubling_three_steps() {
        let sys = CircleMap::doubling("dbl");
        let p = iterate(&sys, &Point::real1(0.3), 3).unwrap();
        match p {
            Point::Real(xs) => assert!((xs[0] - 0.4).abs() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn rotation_is_an_exact_isometry() {
        let sys = CircleMap::rotation("rot", 0.61803398874989485);
        let mut rng = seeding::rng(11, &["iso"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let y = sys.sample_point(&mut rng).unwrap();
        let d0 = sys.metric(&x, &y);
        let trace = sys.distance_trace(&x, &y, 1000);
        assert!(trace.iter().all(|&d| d == d0));
    }

    #[test]
    fn squaring_orbit_decreases_to_zero() {
        let sys = SquaringMap::new("sq");
        let p = iterate(&sys, &Point::real1(0.9), 12).unwrap();
        match p {
            Point::Real(xs) => assert!(xs[0] < 1e-6),
            _ => unreachable!(),
        }
    }

    #[test]
    fn sample_near_respects_radius() {
        let rot = CircleMap::rotation("rot", 0.37);
        let sq = SquaringMap::new("sq");
        let mut rng = seeding::rng(12, &["near"], 0);
        for _ in 0..50 {
            let x = rot.sample_point(&mut rng).unwrap();
            let y = rot.sample_near(&x, 0.01, &mut rng).unwrap();
            assert!(rot.metric(&x, &y) < 0.01);
            let x = sq.sample_point(&mut rng).unwrap();
            let y = sq.sample_near(&x, 0.01, &mut rng).unwrap();
            assert!(sq.metric(&x, &y) < 0.01);
        }
        let x = Point::real1(0.5);
        assert!(rot.sample_near(&x, 2f64.powi(-60), &mut rng).is_err());
    }
}
