//! Birkhoff averages and unique-ergodicity diagnostics. Unique ergodicity is
//! probed through its uniform-convergence characterization: the averages of
//! every registered observable must flatten to the same constant across
//! sample points, and window averages must forget their starting position.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::Kahan;
use crate::mean::{max_window_mean, prefix_sums};
use crate::schedule;
use crate::space::{Point, System};

/// Consistency tolerance on the tail spread of averages.
pub const UE_CONSISTENT_TOL: f64 = 0.02;
/// Refutation margin: tail spread must stay above this to refute.
pub const UE_REFUTE_MARGIN: f64 = 0.2;

/// A bounded observable with an id for reports.
#[derive(Clone)]
pub struct Observable {
    pub id: String,
    pub bound: f64,
    f: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
}

impl Observable {
    pub fn new(id: &str, bound: f64, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self { id: id.into(), bound, f: Arc::new(f) }
    }

    pub fn eval(&self, p: &Point) -> f64 {
        (self.f)(p)
    }
}

fn coord0(p: &Point) -> f64 {
    match p {
        Point::Real(xs) => xs[0],
        _ => panic!("real observable on non-real point"),
    }
}

fn decode(p: &Point) -> f64 {
    match p {
        Point::Symbolic(s) => s.decode(),
        _ => panic!("symbolic observable on non-symbolic point"),
    }
}

pub fn obs_cos_coord0() -> Observable {
    Observable::new("cos_2pi_x", 1.0, |p| (2.0 * std::f64::consts::PI * coord0(p)).cos())
}

pub fn obs_sin_coord0() -> Observable {
    Observable::new("sin_2pi_x", 1.0, |p| (2.0 * std::f64::consts::PI * coord0(p)).sin())
}

/// cos(2 pi m x); separates orbit averages of rotations whose angle has
/// denominator m.
pub fn obs_cos_harmonic(m: u32) -> Observable {
    let id = format!("cos_2pi_{m}x");
    Observable::new(&id, 1.0, move |p| {
        (2.0 * std::f64::consts::PI * f64::from(m) * coord0(p)).cos()
    })
}

pub fn obs_coord0() -> Observable {
    Observable::new("x", 1.0, coord0)
}

pub fn obs_constant(c: f64) -> Observable {
    Observable::new("const", c.abs(), move |_| c)
}

/// Prefix of the sequence read as a base-A fraction; continuous for the
/// prefix metric since it changes by at most 2^-k across a k-cylinder.
pub fn obs_prefix_reading() -> Observable {
    Observable::new("prefix_reading", 1.0, decode)
}

pub fn obs_first_symbol() -> Observable {
    Observable::new("x0", 1.0, |p| match p {
        Point::Symbolic(s) => f64::from(s.symbol(0)),
        _ => panic!("symbolic observable on non-symbolic point"),
    })
}

pub fn obs_cos_decoded() -> Observable {
    Observable::new("cos_2pi_decode", 1.0, |p| (2.0 * std::f64::consts::PI * decode(p)).cos())
}

pub fn obs_finite_cos(size: usize) -> Observable {
    Observable::new("cos_2pi_id", 1.0, move |p| match p {
        Point::Finite(i) => (2.0 * std::f64::consts::PI * *i as f64 / size as f64).cos(),
        _ => panic!("finite observable on non-finite point"),
    })
}

/// Observable on a product evaluated on one component.
pub fn obs_component(side: usize, inner: Observable) -> Observable {
    let id = format!("{}[{}]", inner.id, side);
    Observable::new(&id, inner.bound, move |p| match p {
        Point::Pair(a, b) => inner.eval(if side == 0 { a } else { b }),
        _ => panic!("component observable on non-pair point"),
    })
}

/// Values f(T^i x) for i < n.
pub fn observable_orbit_values(
    sys: &dyn System,
    f: &Observable,
    x: &Point,
    n: usize,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut cur = x.clone();
    for i in 0..n {
        if i > 0 {
            cur = sys.step(&cur);
        }
        out.push(f.eval(&cur));
    }
    out
}

/// Averages of one observable along one orbit, sampled at the schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BirkhoffSeries {
    pub f_id: String,
    pub base: String,
    /// (n, average of the first n values).
    pub values: Vec<(f64, f64)>,
}

pub fn birkhoff_series(
    sys: &dyn System,
    f: &Observable,
    x: &Point,
    sched: &[usize],
) -> Result<BirkhoffSeries> {
    if sched.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let horizon = *sched.last().unwrap();
    let mut acc = Kahan::new();
    let mut values = Vec::with_capacity(sched.len());
    let mut next = 0usize;
    let mut cur = x.clone();
    for i in 0..horizon {
        if i > 0 {
            cur = sys.step(&cur);
        }
        acc.add(f.eval(&cur));
        while next < sched.len() && sched[next] == i + 1 {
            values.push(((i + 1) as f64, acc.value() / (i + 1) as f64));
            next += 1;
        }
    }
    Ok(BirkhoffSeries { f_id: f.id.clone(), base: x.describe(), values })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UeOutcome {
    ConsistentWithUE,
    RefutedUE,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UeRefutation {
    pub f_id: String,
    pub x: String,
    pub y: String,
    pub n: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableSpread {
    pub f_id: String,
    /// (n, max - min of the averages across the sample points).
    pub spread: Vec<(f64, f64)>,
    pub tail_spread_max: f64,
    pub tail_spread_min: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniqueErgodicityReport {
    pub outcome: UeOutcome,
    pub per_observable: Vec<ObservableSpread>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<UeRefutation>,
}

/// Uniform-convergence probe: averages of each observable along each sample
/// orbit; consistent when every spread curve's tail stays below
/// `UE_CONSISTENT_TOL`, refuted when some observable's spread stays above
/// `UE_REFUTE_MARGIN` across the whole schedule tail.
pub fn unique_ergodicity_check(
    sys: &dyn System,
    fs: &[Observable],
    points: &[Point],
    sched: &[usize],
) -> Result<UniqueErgodicityReport> {
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two sample points".into()));
    }
    if fs.is_empty() {
        return Err(Error::Precondition("need at least one observable".into()));
    }
    if sched.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let jobs: Vec<(usize, usize)> =
        (0..fs.len()).flat_map(|fi| (0..points.len()).map(move |pi| (fi, pi))).collect();
    let series: Vec<BirkhoffSeries> = crate::par::map_slice(&jobs, |&(fi, pi)| {
        birkhoff_series(sys, &fs[fi], &points[pi], sched)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut per_observable = Vec::with_capacity(fs.len());
    let mut outcome = UeOutcome::ConsistentWithUE;
    let mut refutation: Option<UeRefutation> = None;
    for (fi, f) in fs.iter().enumerate() {
        let rows: Vec<&BirkhoffSeries> =
            (0..points.len()).map(|pi| &series[fi * points.len() + pi]).collect();
        let mut spread = Vec::with_capacity(sched.len());
        let mut worst: Option<(f64, usize, usize, usize)> = None;
        for (si, &n) in sched.iter().enumerate() {
            let vals: Vec<f64> = rows.iter().map(|r| r.values[si].1).collect();
            let (mut lo, mut hi) = (0usize, 0usize);
            for (i, &v) in vals.iter().enumerate() {
                if v < vals[lo] {
                    lo = i;
                }
                if v > vals[hi] {
                    hi = i;
                }
            }
            let gap = vals[hi] - vals[lo];
            spread.push((n as f64, gap));
            if schedule::tail(sched).contains(&n) && worst.map_or(true, |w| gap > w.0) {
                worst = Some((gap, hi, lo, n));
            }
        }
        let values: Vec<f64> = spread.iter().map(|&(_, v)| v).collect();
        let tail_max = schedule::tail_max(&values);
        let tail_min = schedule::tail_min(&values);
        if tail_min >= UE_REFUTE_MARGIN {
            outcome = UeOutcome::RefutedUE;
            if let Some((gap, hi, lo, n)) = worst {
                refutation.get_or_insert(UeRefutation {
                    f_id: f.id.clone(),
                    x: points[hi].describe(),
                    y: points[lo].describe(),
                    n,
                    gap,
                });
            }
        } else if tail_max > UE_CONSISTENT_TOL && outcome == UeOutcome::ConsistentWithUE {
            outcome = UeOutcome::Inconclusive;
        }
        per_observable.push(ObservableSpread {
            f_id: f.id.clone(),
            spread,
            tail_spread_max: tail_max,
            tail_spread_min: tail_min,
        });
    }
    Ok(UniqueErgodicityReport { outcome, per_observable, refutation })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowIndependenceReport {
    pub f_id: String,
    pub base: String,
    pub horizon: usize,
    /// (window length, max over starts of |window average - prefix average
    /// at the horizon|).
    pub curve: Vec<(f64, f64)>,
}

/// How far window averages of f can sit from the full prefix average, per
/// window length. For a uniquely ergodic orbit closure the curve decays.
pub fn window_average_independence(
    sys: &dyn System,
    f: &Observable,
    x: &Point,
    window_lengths: &[usize],
    horizon: usize,
) -> Result<WindowIndependenceReport> {
    if window_lengths.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if *window_lengths.last().unwrap() > horizon {
        return Err(Error::Precondition("window length exceeds horizon".into()));
    }
    let values = observable_orbit_values(sys, f, x, horizon);
    let sums = prefix_sums(&values);
    let overall = sums[horizon] / horizon as f64;
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let neg_sums = prefix_sums(&neg);
    let curve = crate::par::map_slice(window_lengths, |&l| {
        let hi = max_window_mean(&sums, l).0 - overall;
        let lo = max_window_mean(&neg_sums, l).0 + overall;
        (l as f64, hi.max(lo).max(0.0))
    });
    Ok(WindowIndependenceReport {
        f_id: f.id.clone(),
        base: x.describe(),
        horizon,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{geometric, pow2_up_to};
    use crate::seeding;
    use crate::space::real::CircleMap;
    use crate::space::shift::ShiftSystem;
    use crate::space::symbolic::{DoublingBlocksSource, SymbolicPoint, WordSource};

    const GOLDEN: f64 = 0.61803398874989485;

    #[test]
    fn rotation_exponential_sums_obey_geometric_bound() {
        let sys = CircleMap::rotation("rot", GOLDEN);
        let x = Point::real1(0.0);
        let n = 10_000;
        let cos = birkhoff_series(&sys, &obs_cos_coord0(), &x, &[n]).unwrap();
        let sin = birkhoff_series(&sys, &obs_sin_coord0(), &x, &[n]).unwrap();
        let norm = (cos.values[0].1.powi(2) + sin.values[0].1.powi(2)).sqrt();
        let denom = (1.0 - (2.0 * std::f64::consts::PI * GOLDEN).cos()).hypot(
            (2.0 * std::f64::consts::PI * GOLDEN).sin(),
        );
        let bound = 2.0 / (n as f64 * denom);
        assert!(norm <= bound + 1e-9, "norm {norm} vs bound {bound}");
        assert!(norm <= 0.002);
    }

    #[test]
    fn constant_observable_is_fixed() {
        let sys = CircleMap::rotation("rot", 0.3);
        let s = birkhoff_series(&sys, &obs_constant(2.5), &Point::real1(0.1), &[1, 10, 100])
            .unwrap();
        assert!(s.values.iter().all(|&(_, v)| v == 2.5));
    }

    #[test]
    fn doubling_fixed_point_average_is_one() {
        let sys = CircleMap::doubling("dbl");
        let s =
            birkhoff_series(&sys, &obs_cos_coord0(), &Point::real1(0.0), &[1, 7, 50]).unwrap();
        assert!(s.values.iter().all(|&(_, v)| v == 1.0));
    }

    #[test]
    fn incremental_average_matches_brute_resummation() {
        let sys = CircleMap::rotation("rot", GOLDEN);
        let mut rng = seeding::rng(41, &["birkhoff"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let f = obs_cos_coord0();
        let n = 100_000;
        let fast = birkhoff_series(&sys, &f, &x, &[n]).unwrap().values[0].1;
        let brute: f64 =
            observable_orbit_values(&sys, &f, &x, n).iter().sum::<f64>() / n as f64;
        assert!((fast - brute).abs() < 1e-10);
    }

    #[test]
    fn averages_stay_within_declared_bound() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(42, &["bound"], 0);
        for f in [obs_prefix_reading(), obs_first_symbol()] {
            let x = sys.sample_point(&mut rng).unwrap();
            let s = birkhoff_series(&sys, &f, &x, &geometric(1.5, 2000)).unwrap();
            assert!(s.values.iter().all(|&(_, v)| v.abs() <= f.bound + 1e-12));
        }
    }

    #[test]
    fn rotation_is_consistent_with_unique_ergodicity() {
        let sys = CircleMap::rotation("rot", GOLDEN);
        let mut rng = seeding::rng(43, &["ue"], 0);
        let points: Vec<Point> = (0..6).map(|_| sys.sample_point(&mut rng).unwrap()).collect();
        let rep = unique_ergodicity_check(
            &sys,
            &[obs_cos_coord0(), obs_sin_coord0()],
            &points,
            &geometric(1.5, 100_000),
        )
        .unwrap();
        assert_eq!(rep.outcome, UeOutcome::ConsistentWithUE);
        assert!(rep.per_observable.iter().all(|o| o.tail_spread_max <= 0.02));
    }

    #[test]
    fn coding_space_refutes_unique_ergodicity() {
        let sys = ShiftSystem::binary_coding("code");
        let zero = Point::Symbolic(SymbolicPoint::new(std::sync::Arc::new(
            WordSource::constant(0, 2),
        )));
        let mut rng = seeding::rng(44, &["ue"], 0);
        let generic = sys.sample_point(&mut rng).unwrap();
        let rep = unique_ergodicity_check(
            &sys,
            &[obs_cos_decoded()],
            &[zero, generic],
            &geometric(1.5, 100_000),
        )
        .unwrap();
        assert_eq!(rep.outcome, UeOutcome::RefutedUE);
        assert!(rep.refutation.unwrap().gap >= 0.9);
    }

    #[test]
    fn one_sample_point_is_rejected() {
        let sys = CircleMap::rotation("rot", GOLDEN);
        let err = unique_ergodicity_check(
            &sys,
            &[obs_cos_coord0()],
            &[Point::real1(0.0)],
            &[10, 100],
        );
        assert!(err.is_err());
    }

    #[test]
    fn window_independence_on_rotation_decays() {
        let sys = CircleMap::rotation("rot", GOLDEN);
        let rep = window_average_independence(
            &sys,
            &obs_cos_coord0(),
            &Point::real1(0.2),
            &pow2_up_to(1 << 14),
            1_000_000,
        )
        .unwrap();
        let last = rep.curve.last().unwrap().1;
        assert!(last <= 0.02, "last = {last}");
        let constant = window_average_independence(
            &sys,
            &obs_constant(1.0),
            &Point::real1(0.2),
            &pow2_up_to(1 << 10),
            100_000,
        )
        .unwrap();
        assert!(constant.curve.iter().all(|&(_, v)| v.abs() < 1e-12));
    }

    #[test]
    fn window_independence_detects_block_orbit() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let x = Point::Symbolic(SymbolicPoint::new(std::sync::Arc::new(DoublingBlocksSource)));
        let rep = window_average_independence(
            &sys,
            &obs_first_symbol(),
            &x,
            &pow2_up_to(1 << 14),
            1_000_000,
        )
        .unwrap();
        let last = rep.curve.last().unwrap().1;
        assert!(last >= 0.3, "last = {last}");
    }
}
