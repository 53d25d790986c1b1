//! Finite metric spaces with an explicit distance matrix and a self-map
//! given as a table.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Point, SpaceKind, System};
use crate::error::{Error, Result};

pub struct FiniteSpace {
    id: String,
    size: usize,
    dist: Vec<f64>,
    map: Vec<usize>,
    diameter: f64,
}

impl FiniteSpace {
    pub fn new(id: &str, dist: Vec<f64>, map: Vec<usize>) -> Self {
        let size = map.len();
        assert_eq!(dist.len(), size * size);
        assert!(map.iter().all(|&j| j < size));
        let diameter = dist.iter().cloned().fold(0.0, f64::max);
        Self { id: id.into(), size, dist, map, diameter }
    }

    /// m points on a cycle, step +1 mod m, normalized cycle metric.
    pub fn cycle(id: &str, m: usize) -> Self {
        assert!(m >= 2);
        let half = (m / 2) as f64;
        let mut dist = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let raw = (i as i64 - j as i64).unsigned_abs() as usize;
                dist[i * m + j] = raw.min(m - raw) as f64 / half;
            }
        }
        let map = (0..m).map(|i| (i + 1) % m).collect();
        Self::new(id, dist, map)
    }

    /// m points on a path, step moves one node toward 0, normalized path
    /// metric; a non-expanding map with a single fixed point.
    pub fn contraction(id: &str, m: usize) -> Self {
        assert!(m >= 2);
        let scale = (m - 1) as f64;
        let mut dist = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                dist[i * m + j] = (i as i64 - j as i64).unsigned_abs() as f64 / scale;
            }
        }
        let map = (0..m).map(|i| i.saturating_sub(1)).collect();
        Self::new(id, dist, map)
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

impl System for FiniteSpace {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Finite
    }

    fn diameter(&self) -> f64 {
        self.diameter
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::Finite(id) if *id < self.size)
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Finite(i), Point::Finite(j)) => self.dist[i * self.size + j],
            _ => panic!("finite metric on non-finite points"),
        }
    }

    fn step(&self, p: &Point) -> Point {
        match p {
            Point::Finite(i) => Point::Finite(self.map[*i]),
            _ => panic!("finite step on non-finite point"),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        Ok(Point::Finite(rng.gen_range(0..self.size)))
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        let i = match p {
            Point::Finite(i) => *i,
            _ => return Err(Error::MixedSpace("finite point expected".into())),
        };
        let ball: Vec<usize> =
            (0..self.size).filter(|&j| self.dist[i * self.size + j] < radius).collect();
        Ok(Point::Finite(ball[rng.gen_range(0..ball.len())]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_an_isometry() {
        let sys = FiniteSpace::cycle("c6", 6);
        for i in 0..6 {
            for j in 0..6 {
                let a = Point::Finite(i);
                let b = Point::Finite(j);
                assert_eq!(sys.metric(&a, &b), sys.metric(&sys.step(&a), &sys.step(&b)));
            }
        }
        assert_eq!(sys.diameter(), 1.0);
    }

    #[test]
    fn contraction_never_expands() {
        let sys = FiniteSpace::contraction("k8", 8);
        for i in 0..8 {
            for j in 0..8 {
                let a = Point::Finite(i);
                let b = Point::Finite(j);
                assert!(sys.metric(&sys.step(&a), &sys.step(&b)) <= sys.metric(&a, &b));
            }
        }
    }
}
