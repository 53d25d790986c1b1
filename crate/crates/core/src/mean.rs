//! Orbit-averaged distances and their three limiting regimes: the limsup of
//! prefix averages, the sup of prefix averages over every horizon, and the
//! limsup of averages over sliding windows of growing length. Everything is
//! computed from a single distance trace with compensated summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::Kahan;
use crate::schedule;
use crate::space::{orbit_distance_trace, Point, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    PrefixAtN,
    BesicovitchLimsup,
    SupOverAllN,
    WeylLimsup,
}

/// One estimated mean-metric value plus the partial curve it was read from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeanMetricEstimate {
    pub kind: MeanKind,
    pub value: f64,
    pub horizon: usize,
    /// (n, prefix average) or (window length, extremal window average).
    pub partials: Vec<(f64, f64)>,
    pub pair_descriptor: (String, String),
}

fn descriptor(x: &Point, y: &Point) -> (String, String) {
    (x.describe(), y.describe())
}

/// Mean of the first n trace entries.
pub fn mean_of(trace: &[f64]) -> f64 {
    let mut acc = Kahan::new();
    for &d in trace {
        acc.add(d);
    }
    acc.value() / trace.len() as f64
}

/// Average distance between the first n points of the two orbits.
pub fn prefix_mean_distance(sys: &dyn System, x: &Point, y: &Point, n: usize) -> Result<f64> {
    let trace = orbit_distance_trace(sys, x, y, n)?;
    Ok(mean_of(&trace))
}

/// Prefix averages at the scheduled horizons, one pass.
pub fn prefix_means_at(trace: &[f64], points: &[usize]) -> Vec<(f64, f64)> {
    let mut acc = Kahan::new();
    let mut out = Vec::with_capacity(points.len());
    let mut next = 0usize;
    for (i, &d) in trace.iter().enumerate() {
        acc.add(d);
        while next < points.len() && points[next] == i + 1 {
            out.push(((i + 1) as f64, acc.value() / (i + 1) as f64));
            next += 1;
        }
    }
    out
}

pub fn besicovitch_from_trace(trace: &[f64], sched: &[usize]) -> (f64, Vec<(f64, f64)>) {
    let partials = prefix_means_at(trace, sched);
    let values: Vec<f64> = partials.iter().map(|&(_, v)| v).collect();
    (schedule::tail_max(&values), partials)
}

/// Limsup estimator for the prefix averages: max over the tail of a
/// geometric horizon schedule.
pub fn besicovitch_estimate(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    sched: &[usize],
) -> Result<MeanMetricEstimate> {
    if sched.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if sched.windows(2).any(|w| w[0] >= w[1]) || sched[0] == 0 {
        return Err(Error::Precondition("schedule must be strictly increasing from 1".into()));
    }
    let horizon = *sched.last().unwrap();
    let trace = orbit_distance_trace(sys, x, y, horizon)?;
    let (value, partials) = besicovitch_from_trace(&trace, sched);
    Ok(MeanMetricEstimate {
        kind: MeanKind::BesicovitchLimsup,
        value,
        horizon,
        partials,
        pair_descriptor: descriptor(x, y),
    })
}

pub fn sup_mean_from_trace(trace: &[f64], sched: &[usize]) -> (f64, Vec<(f64, f64)>) {
    let mut acc = Kahan::new();
    let mut sup = f64::NEG_INFINITY;
    let mut partials = Vec::with_capacity(sched.len());
    let mut next = 0usize;
    for (i, &d) in trace.iter().enumerate() {
        acc.add(d);
        sup = sup.max(acc.value() / (i + 1) as f64);
        while next < sched.len() && sched[next] == i + 1 {
            partials.push(((i + 1) as f64, sup));
            next += 1;
        }
    }
    (sup, partials)
}

/// Exact max of the prefix averages over every horizon n <= N; the "for all
/// n" side of the mean quantifiers.
pub fn sup_mean_distance(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    horizon: usize,
) -> Result<MeanMetricEstimate> {
    let trace = orbit_distance_trace(sys, x, y, horizon)?;
    let sched = schedule::geometric(schedule::DEFAULT_RATIO, horizon);
    let (value, partials) = sup_mean_from_trace(&trace, &sched);
    Ok(MeanMetricEstimate {
        kind: MeanKind::SupOverAllN,
        value,
        horizon,
        partials,
        pair_descriptor: descriptor(x, y),
    })
}

/// Compensated prefix sums: out[i] = trace[0] + ... + trace[i-1].
pub fn prefix_sums(trace: &[f64]) -> Vec<f64> {
    let mut acc = Kahan::new();
    let mut out = Vec::with_capacity(trace.len() + 1);
    out.push(0.0);
    for &d in trace {
        acc.add(d);
        out.push(acc.value());
    }
    out
}

/// Largest average over every window of length `len`, with the attaining
/// start index.
pub fn max_window_mean(sums: &[f64], len: usize) -> (f64, usize) {
    let n = sums.len() - 1;
    debug_assert!(len >= 1 && len <= n);
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0usize;
    for j in 0..=n - len {
        let avg = (sums[j + len] - sums[j]) / len as f64;
        if avg > best {
            best = avg;
            arg = j;
        }
    }
    (best, arg)
}

pub fn weyl_from_trace(trace: &[f64], lens: &[usize]) -> (f64, Vec<(f64, f64)>) {
    let sums = prefix_sums(trace);
    let curve: Vec<(f64, f64)> = crate::par::map_slice(lens, |&l| {
        let (v, _) = max_window_mean(&sums, l);
        (l as f64, v)
    });
    let value = curve.last().map(|&(_, v)| v).unwrap_or(0.0);
    (value, curve)
}

/// Sliding-window limsup estimator: for each window length the max over all
/// window averages; the largest-length statistic is the point estimate and
/// the per-length curve is kept for diagnostics.
pub fn weyl_estimate(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    window_lengths: &[usize],
    horizon: usize,
) -> Result<MeanMetricEstimate> {
    if window_lengths.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if window_lengths.windows(2).any(|w| w[0] >= w[1]) || window_lengths[0] == 0 {
        return Err(Error::Precondition("window lengths must be strictly increasing".into()));
    }
    if *window_lengths.last().unwrap() > horizon {
        return Err(Error::Precondition("window length exceeds horizon".into()));
    }
    let trace = orbit_distance_trace(sys, x, y, horizon)?;
    let (value, partials) = weyl_from_trace(&trace, window_lengths);
    Ok(MeanMetricEstimate {
        kind: MeanKind::WeylLimsup,
        value,
        horizon,
        partials,
        pair_descriptor: descriptor(x, y),
    })
}

/// Max over all window starts j and all lengths n in [n_min, n_max] (length
/// grid sampled geometrically, endpoints included) of the window-averaged
/// distance, the uniform windowed bound. O(horizon * sampled lengths).
pub fn windowed_uniform_bound(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    n_min: usize,
    n_max: usize,
    horizon: usize,
) -> Result<f64> {
    if n_min == 0 || n_min > n_max || n_max > horizon {
        return Err(Error::Precondition(format!(
            "need 1 <= n_min <= n_max <= horizon, got {n_min}, {n_max}, {horizon}"
        )));
    }
    let trace = orbit_distance_trace(sys, x, y, horizon)?;
    let sums = prefix_sums(&trace);
    Ok(windowed_uniform_from_sums(&sums, n_min, n_max))
}

pub fn windowed_uniform_from_sums(sums: &[f64], n_min: usize, n_max: usize) -> f64 {
    let mut lens: Vec<usize> = schedule::geometric(schedule::DEFAULT_RATIO, n_max)
        .into_iter()
        .filter(|&l| l >= n_min)
        .collect();
    if lens.first() != Some(&n_min) {
        lens.insert(0, n_min);
    }
    lens.iter().map(|&l| max_window_mean(sums, l).0).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::geometric;
    use crate::seeding;
    use crate::space::real::{CircleMap, SquaringMap};
    use crate::space::shift::ShiftSystem;
    use crate::space::symbolic::{SymbolicPoint, WordSource};
    use std::sync::Arc;

    fn word(head: &[u8], cyc: &[u8]) -> Point {
        Point::Symbolic(SymbolicPoint::new(Arc::new(WordSource::new(
            head.to_vec(),
            cyc.to_vec(),
            2,
        ))))
    }

    fn brute_mean(sys: &dyn System, x: &Point, y: &Point, n: usize) -> f64 {
        // independent oracle: re-iterate pointwise and sum in plain order
        let mut sum = 0.0;
        let mut cx = x.clone();
        let mut cy = y.clone();
        for i in 0..n {
            if i > 0 {
                cx = sys.step(&cx);
                cy = sys.step(&cy);
            }
            sum += sys.metric(&cx, &cy);
        }
        sum / n as f64
    }

    #[test]
    fn rotation_prefix_mean_equals_distance() {
        let sys = CircleMap::rotation("rot", 0.61803398874989485);
        let mut rng = seeding::rng(20, &["mean"], 0);
        for _ in 0..5 {
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_point(&mut rng).unwrap();
            let d = sys.metric(&x, &y);
            for n in [1usize, 7, 100, 1000] {
                let m = prefix_mean_distance(&sys, &x, &y, n).unwrap();
                assert!((m - d).abs() <= 1e-13, "n={n}: {m} vs {d}");
            }
        }
    }

    #[test]
    fn identical_points_have_zero_means() {
        let sys = SquaringMap::new("sq");
        let x = Point::real1(0.37);
        assert_eq!(prefix_mean_distance(&sys, &x, &x, 50).unwrap(), 0.0);
        let est = sup_mean_distance(&sys, &x, &x, 50).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn shift_pair_prefix_mean() {
        // trace [1/8, 1/4, 1/2, 1, 1, 1] -> mean 31/48
        let sys = ShiftSystem::full_shift("fs", 2);
        let x = word(&[], &[0]);
        let y = word(&[0, 0, 0], &[1]);
        let trace = orbit_distance_trace(&sys, &x, &y, 6).unwrap();
        assert_eq!(trace, vec![0.125, 0.25, 0.5, 1.0, 1.0, 1.0]);
        let m = prefix_mean_distance(&sys, &x, &y, 6).unwrap();
        assert!((m - 31.0 / 48.0).abs() < 1e-15);
        assert!(prefix_mean_distance(&sys, &x, &y, 0).is_err());
    }

    #[test]
    fn shift_pair_running_sup() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let x = word(&[], &[0]);
        let y = word(&[0, 0, 0], &[1]);
        let trace = orbit_distance_trace(&sys, &x, &y, 6).unwrap();
        // oracle: recompute each prefix mean directly
        let mut expect: Vec<f64> = Vec::new();
        for n in 1..=6 {
            expect.push(trace[..n].iter().sum::<f64>() / n as f64);
        }
        let running_max = expect.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let est = sup_mean_distance(&sys, &x, &y, 6).unwrap();
        assert!((est.value - running_max).abs() < 1e-15);
        assert!((est.value - 31.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn besicovitch_on_split_tail_pair_goes_to_one() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let x = word(&[], &[0]);
        let y = word(&[0, 0, 0], &[1]);
        let est = besicovitch_estimate(&sys, &x, &y, &geometric(1.5, 10_000)).unwrap();
        assert!(est.value > 0.99, "value = {}", est.value);
        // partials rise monotonically once the tail dominates
        let vals: Vec<f64> = est.partials.iter().map(|&(_, v)| v).collect();
        assert!(vals.windows(2).skip(3).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn besicovitch_on_squaring_pair_decays() {
        let sys = SquaringMap::new("sq");
        let x = Point::real1(0.5);
        let y = Point::real1(0.6);
        let est = besicovitch_estimate(&sys, &x, &y, &geometric(1.5, 1000)).unwrap();
        assert!(est.value <= 0.01, "value = {}", est.value);
        // oracle: brute recomputation at the schedule points
        for &(n, v) in &est.partials {
            let direct = brute_mean(&sys, &x, &y, n as usize);
            assert!((v - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_weyl_curve_is_flat_at_the_distance() {
        let sys = CircleMap::rotation("rot", 0.61803398874989485);
        let x = Point::real1(0.0);
        let y = Point::real1(0.125);
        let est = weyl_estimate(&sys, &x, &y, &[4, 16, 64, 256], 2000).unwrap();
        for &(_, v) in &est.partials {
            assert!((v - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn squaring_weyl_max_window_sits_on_the_transient() {
        let sys = SquaringMap::new("sq");
        let x = Point::real1(0.5);
        let y = Point::real1(0.6);
        let trace = orbit_distance_trace(&sys, &x, &y, 10_000).unwrap();
        let sums = prefix_sums(&trace);
        let (v64, arg64) = max_window_mean(&sums, 64);
        assert_eq!(arg64, 0);
        let (v2048, _) = max_window_mean(&sums, 2048);
        assert!(v2048 < v64);
        assert!(v2048 <= 0.01);
        // max window average dominates the prefix average at equal length
        for l in [16usize, 64, 512] {
            let prefix = sums[l] / l as f64;
            assert!(max_window_mean(&sums, l).0 >= prefix - 1e-15);
        }
    }

    #[test]
    fn windowed_uniform_bound_examples() {
        let rot = CircleMap::rotation("rot", 0.61803398874989485);
        let x = Point::real1(0.2);
        let y = Point::real1(0.35);
        let b = windowed_uniform_bound(&rot, &x, &y, 1, 128, 4096).unwrap();
        assert!((b - rot.metric(&x, &y)).abs() < 1e-12);

        let fs = ShiftSystem::full_shift("fs", 2);
        let x = word(&[], &[0]);
        let y = word(&[0, 0, 0], &[1]);
        let b = windowed_uniform_bound(&fs, &x, &y, 8, 64, 4096).unwrap();
        assert_eq!(b, 1.0);
        assert!(windowed_uniform_bound(&fs, &x, &y, 65, 64, 4096).is_err());
    }

    #[test]
    fn incremental_matches_brute_resummation() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(21, &["oracle"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let y = sys.sample_near(&x, 0.01, &mut rng).unwrap();
        let n = 100_000;
        let trace = orbit_distance_trace(&sys, &x, &y, n).unwrap();
        let fast = mean_of(&trace);
        let brute: f64 = trace.iter().sum::<f64>() / n as f64;
        assert!((fast - brute).abs() < 1e-10);
    }

    #[test]
    fn mean_distance_symmetry_and_triangle() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(22, &["triangle"], 0);
        for _ in 0..20 {
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_point(&mut rng).unwrap();
            let z = sys.sample_point(&mut rng).unwrap();
            let n = 257;
            let dxy = prefix_mean_distance(&sys, &x, &y, n).unwrap();
            let dyx = prefix_mean_distance(&sys, &y, &x, n).unwrap();
            assert_eq!(dxy, dyx);
            let dxz = prefix_mean_distance(&sys, &x, &z, n).unwrap();
            let dyz = prefix_mean_distance(&sys, &y, &z, n).unwrap();
            assert!(dxz <= dxy + dyz + 1e-12);
        }
    }

    #[test]
    fn besicovitch_partial_never_exceeds_sup() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(23, &["order"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let y = sys.sample_near(&x, 0.1, &mut rng).unwrap();
        let sched = geometric(1.5, 4096);
        let bes = besicovitch_estimate(&sys, &x, &y, &sched).unwrap();
        let sup = sup_mean_distance(&sys, &x, &y, 4096).unwrap();
        for &(_, v) in &bes.partials {
            assert!(v <= sup.value + 1e-12);
        }
    }
}
