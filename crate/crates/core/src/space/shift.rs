//! Shift spaces: the full shift, the Sturmian coding of an irrational
//! rotation, the Thue-Morse substitution orbit closure, and a binary coding
//! space whose metric reads sequences back as circle coordinates. The step
//! map is always the left shift; distance traces are computed in one bulk
//! pass over the extracted symbol arrays.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::symbolic::{
    first_mismatch, pow2_neg, GraftSource, HashSource, SturmianSource, SymbolicPoint,
    ThueMorseSource, COMPARE_DEPTH,
};
use super::{Point, SpaceKind, System};
use crate::error::{Error, Result};

/// Which sequences the space contains, and therefore how to sample them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFamily {
    /// Every sequence over the alphabet.
    Full,
    /// Codings of the rotation by `alpha` (2^-63 lattice bits).
    Sturmian { alpha_bits: u64 },
    /// Shifts of the Thue-Morse fixed point.
    ThueMorse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftMetric {
    /// d(x, y) = 2^-k with k the first index where the sequences differ.
    PrefixExp,
    /// Circle distance of the sequences decoded as binary fractions; makes
    /// the shift act as exact angle doubling.
    DecodedCircle,
}

pub struct ShiftSystem {
    id: String,
    alphabet: u8,
    family: PointFamily,
    metric: ShiftMetric,
}

impl ShiftSystem {
    pub fn full_shift(id: &str, alphabet: u8) -> Self {
        Self { id: id.into(), alphabet, family: PointFamily::Full, metric: ShiftMetric::PrefixExp }
    }

    pub fn sturmian(id: &str, alpha: f64) -> Self {
        let probe = SturmianSource::new(alpha, 0.0);
        Self {
            id: id.into(),
            alphabet: 2,
            family: PointFamily::Sturmian { alpha_bits: probe.alpha_bits() },
            metric: ShiftMetric::PrefixExp,
        }
    }

    pub fn thue_morse(id: &str) -> Self {
        Self {
            id: id.into(),
            alphabet: 2,
            family: PointFamily::ThueMorse,
            metric: ShiftMetric::PrefixExp,
        }
    }

    /// Binary sequences with the decoded-circle metric: the exact coding
    /// companion of the angle-doubling map.
    pub fn binary_coding(id: &str) -> Self {
        Self {
            id: id.into(),
            alphabet: 2,
            family: PointFamily::Full,
            metric: ShiftMetric::DecodedCircle,
        }
    }

    pub fn family(&self) -> PointFamily {
        self.family
    }

    pub fn point(&self, src: Arc<dyn super::symbolic::SymbolSource>) -> Point {
        Point::Symbolic(SymbolicPoint::new(src))
    }

    /// Whether arbitrary prefix grafts stay inside the space.
    pub fn graftable(&self) -> bool {
        matches!(self.family, PointFamily::Full)
    }

    /// First `take` symbols of `of`, then `tail`. Only valid on families
    /// closed under grafting.
    pub fn graft(&self, of: &Point, take: u32, tail: &Point) -> Option<Point> {
        if !self.graftable() {
            return None;
        }
        let (base, tail) = (of.as_symbolic()?, tail.as_symbolic()?);
        Some(Point::Symbolic(SymbolicPoint::new(Arc::new(GraftSource::new(
            base.clone(),
            u64::from(take),
            tail.clone(),
        )))))
    }

    fn metric_sym(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> f64 {
        match self.metric {
            ShiftMetric::PrefixExp => match first_mismatch(a, b) {
                Some(k) => pow2_neg(k),
                None => 0.0,
            },
            ShiftMetric::DecodedCircle => circle_dist(a.decode(), b.decode()),
        }
    }
}

pub(crate) fn circle_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

/// Smallest prefix length k with 2^-k < radius.
pub fn prefix_len_for_radius(radius: f64) -> Result<u32> {
    if !(radius > 0.0) {
        return Err(Error::RadiusTooSmall(radius));
    }
    (0..=COMPARE_DEPTH - 1)
        .find(|&k| pow2_neg(k) < radius)
        .ok_or(Error::RadiusTooSmall(radius))
}

impl System for ShiftSystem {
    fn id(&self) -> &str {
        &self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Symbolic
    }

    fn diameter(&self) -> f64 {
        match self.metric {
            ShiftMetric::PrefixExp => 1.0,
            ShiftMetric::DecodedCircle => 0.5,
        }
    }

    fn contains(&self, p: &Point) -> bool {
        matches!(p, Point::Symbolic(s) if s.alphabet() == self.alphabet)
    }

    fn metric(&self, a: &Point, b: &Point) -> f64 {
        match (a, b) {
            (Point::Symbolic(a), Point::Symbolic(b)) => self.metric_sym(a, b),
            _ => panic!("shift metric on non-symbolic points"),
        }
    }

    fn step(&self, p: &Point) -> Point {
        match p {
            Point::Symbolic(s) => Point::Symbolic(s.shifted(1)),
            _ => panic!("shift step on non-symbolic point"),
        }
    }

    fn iterate_point(&self, p: &Point, n: usize) -> Point {
        match p {
            Point::Symbolic(s) => Point::Symbolic(s.shifted(n as u64)),
            _ => panic!("shift step on non-symbolic point"),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Result<Point> {
        let p = match self.family {
            PointFamily::Full => {
                SymbolicPoint::new(Arc::new(HashSource::new(rng.gen(), self.alphabet)))
            }
            PointFamily::Sturmian { alpha_bits } => SymbolicPoint::new(Arc::new(
                SturmianSource::from_bits(alpha_bits, rng.gen::<u64>() >> 1),
            )),
            PointFamily::ThueMorse => SymbolicPoint::with_offset(
                Arc::new(ThueMorseSource),
                rng.gen_range(0..1u64 << 33),
            ),
        };
        Ok(Point::Symbolic(p))
    }

    fn splice_pair(
        &self,
        x: &Point,
        y: &Point,
        radius: f64,
        rng: &mut ChaCha8Rng,
    ) -> Option<(Point, Point)> {
        if !self.graftable() {
            return None;
        }
        let k = prefix_len_for_radius(radius).ok()?;
        let tail = Point::Symbolic(SymbolicPoint::new(Arc::new(HashSource::new(
            rng.gen(),
            self.alphabet,
        ))));
        Some((self.graft(x, k, &tail)?, self.graft(y, k, &tail)?))
    }

    fn graft_point(&self, of: &Point, radius: f64, tail: &Point) -> Option<Point> {
        let k = prefix_len_for_radius(radius).ok()?;
        self.graft(of, k, tail)
    }

    fn sample_near(&self, p: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
        let sp = p
            .as_symbolic()
            .ok_or_else(|| Error::MixedSpace("symbolic point expected".into()))?;
        let k = prefix_len_for_radius(radius)?;
        match self.family {
            PointFamily::Full => {
                let tail = SymbolicPoint::new(Arc::new(HashSource::new(rng.gen(), self.alphabet)));
                Ok(Point::Symbolic(SymbolicPoint::new(Arc::new(GraftSource::new(
                    sp.clone(),
                    u64::from(k),
                    tail,
                )))))
            }
            PointFamily::Sturmian { alpha_bits } => {
                Ok(Point::Symbolic(sturmian_near(alpha_bits, sp, k, radius, rng)?))
            }
            PointFamily::ThueMorse => Ok(Point::Symbolic(thue_morse_near(sp, k, rng)?)),
        }
    }

    fn distance_trace(&self, x: &Point, y: &Point, n: usize) -> Vec<f64> {
        let (a, b) = match (x.as_symbolic(), y.as_symbolic()) {
            (Some(a), Some(b)) => (a, b),
            _ => panic!("shift trace on non-symbolic points"),
        };
        let depth = COMPARE_DEPTH as usize;
        let len = n + depth;
        let sa = a.prefix(len);
        let sb = b.prefix(len);
        match self.metric {
            ShiftMetric::PrefixExp => {
                let mut out = vec![0.0f64; n];
                // agreement run length looking forward from i, capped at depth
                let mut run = COMPARE_DEPTH;
                for i in (0..len).rev() {
                    run = if sa[i] != sb[i] { 0 } else { (run + 1).min(COMPARE_DEPTH) };
                    if i < n {
                        out[i] = if run >= COMPARE_DEPTH { 0.0 } else { pow2_neg(run) };
                    }
                }
                out
            }
            ShiftMetric::DecodedCircle => {
                let va = decode_suffixes(&sa);
                let vb = decode_suffixes(&sb);
                (0..n).map(|i| circle_dist(va[i], vb[i])).collect()
            }
        }
    }

    fn anchor_distance_trace(&self, moving: &Point, anchor: &Point, n: usize) -> Vec<f64> {
        let (m, a) = match (moving.as_symbolic(), anchor.as_symbolic()) {
            (Some(m), Some(a)) => (m, a),
            _ => panic!("shift trace on non-symbolic points"),
        };
        let depth = COMPARE_DEPTH as usize;
        let sm = m.prefix(n + depth);
        match self.metric {
            ShiftMetric::PrefixExp => {
                let sa = a.prefix(depth);
                (0..n)
                    .map(|i| {
                        match (0..depth).find(|&j| sm[i + j] != sa[j]) {
                            Some(j) => pow2_neg(j as u32),
                            None => 0.0,
                        }
                    })
                    .collect()
            }
            ShiftMetric::DecodedCircle => {
                let va = a.decode();
                let vm = decode_suffixes(&sm);
                (0..n).map(|i| circle_dist(vm[i], va)).collect()
            }
        }
    }
}

/// decode_suffixes(s)[i] = sum_j s[i + j] 2^-(j+1) over the extracted range.
fn decode_suffixes(s: &[u8]) -> Vec<f64> {
    let mut out = vec![0.0f64; s.len()];
    let mut next = 0.0f64;
    for i in (0..s.len()).rev() {
        next = (f64::from(s[i]) + next) / 2.0;
        out[i] = next;
    }
    out
}

/// A coding of a nearby rotation phase that provably shares the first `k`
/// symbols: the phase offset stays inside every classification cell the
/// first `k` orbit points visit.
fn sturmian_near(
    alpha_bits: u64,
    p: &SymbolicPoint,
    k: u32,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SymbolicPoint> {
    let src = p
        .source()
        .as_any()
        .downcast_ref::<SturmianSource>()
        .ok_or_else(|| Error::SamplingUnsupported("not a rotation-coding point".into()))?;
    let phase = src.phase_at(p.offset());
    let probe = SturmianSource::from_bits(alpha_bits, phase);
    let base = SymbolicPoint::new(Arc::new(SturmianSource::from_bits(alpha_bits, phase)));

    // Preferred: offset the underlying phase by a fraction of the radius, so
    // sampled pairs stay rotation-close, then verify the sequence distance.
    const MOD63_F: f64 = 9_223_372_036_854_775_808.0;
    let mut scale = radius;
    for _ in 0..8 {
        let off = (scale * rng.gen::<f64>() * MOD63_F) as i128 * if rng.gen() { 1 } else { -1 };
        let cand_phase = wrap63(i128::from(phase) + off);
        let cand =
            SymbolicPoint::new(Arc::new(SturmianSource::from_bits(alpha_bits, cand_phase)));
        let d = match first_mismatch(&base, &cand) {
            Some(j) => pow2_neg(j),
            None => 0.0,
        };
        if d < radius {
            return Ok(cand);
        }
        scale /= 2.0;
    }

    // Fallback: exact cell-gap bound. Any phase offset below the minimal gap
    // to a partition boundary over the first k orbit points preserves all k
    // classifications.
    let thr = (1u64 << 63) - src.alpha_bits();
    let mut gap_down = u64::MAX;
    let mut gap_up = u64::MAX;
    for i in 0..u64::from(k) {
        let pos = probe.phase_at(i);
        let (lo, hi) = if pos >= thr { (thr, 1u64 << 63) } else { (0, thr) };
        gap_down = gap_down.min(pos - lo);
        gap_up = gap_up.min(hi - 1 - pos);
    }
    let off = if gap_up == 0 && gap_down == 0 {
        0i128
    } else {
        let span = i128::from(gap_down) + i128::from(gap_up);
        rng.gen_range(0..=span) - i128::from(gap_down)
    };
    Ok(SymbolicPoint::new(Arc::new(SturmianSource::from_bits(
        alpha_bits,
        wrap63(i128::from(phase) + off),
    ))))
}

fn wrap63(x: i128) -> u64 {
    (x.rem_euclid(1i128 << 63)) as u64
}

/// A different shift of the Thue-Morse point whose first `k` symbols agree
/// with `p`; uniform recurrence guarantees a match within a bounded search.
fn thue_morse_near(p: &SymbolicPoint, k: u32, rng: &mut ChaCha8Rng) -> Result<SymbolicPoint> {
    if p.source().as_any().downcast_ref::<ThueMorseSource>().is_none() {
        return Err(Error::SamplingUnsupported("not a substitution-orbit point".into()));
    }
    let k = k as usize;
    let want = p.prefix(k);
    let limit = 64 * k as u64 + 256;
    let start = rng.gen_range(1..=limit);
    let matches_at = |a: u64| (0..k).all(|j| p.symbol(a + j as u64) == want[j]);
    for a in start..start + limit {
        if matches_at(a) {
            return Ok(p.shifted(a));
        }
    }
    for a in 1..start {
        if matches_at(a) {
            return Ok(p.shifted(a));
        }
    }
    Err(Error::SamplingUnsupported(format!("no recurrence of a {k}-prefix found")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding;
    use crate::space::symbolic::WordSource;

    fn word(head: &[u8], cyc: &[u8]) -> Point {
        Point::Symbolic(SymbolicPoint::new(Arc::new(WordSource::new(
            head.to_vec(),
            cyc.to_vec(),
            2,
        ))))
    }

    #[test]
    fn prefix_metric_values() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let x = word(&[], &[0]);
        let y = word(&[0, 0, 0], &[1]);
        assert_eq!(sys.metric(&x, &y), 0.125);
        assert_eq!(sys.metric(&x, &x), 0.0);
        let z = word(&[1], &[0]);
        assert_eq!(sys.metric(&x, &z), 1.0);
    }

    #[test]
    fn bulk_trace_matches_pointwise() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(3, &["trace"], 0);
        for _ in 0..10 {
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_near(&x, 0.01, &mut rng).unwrap();
            let bulk = sys.distance_trace(&x, &y, 200);
            let mut cx = x.clone();
            let mut cy = y.clone();
            for i in 0..200 {
                if i > 0 {
                    cx = sys.step(&cx);
                    cy = sys.step(&cy);
                }
                assert_eq!(bulk[i], sys.metric(&cx, &cy), "i={i}");
            }
        }
    }

    #[test]
    fn coded_trace_matches_pointwise_loosely() {
        let sys = ShiftSystem::binary_coding("code");
        let mut rng = seeding::rng(4, &["trace"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let y = sys.sample_point(&mut rng).unwrap();
        let bulk = sys.distance_trace(&x, &y, 100);
        let mut cx = x.clone();
        let mut cy = y.clone();
        for i in 0..100 {
            if i > 0 {
                cx = sys.step(&cx);
                cy = sys.step(&cy);
            }
            assert!((bulk[i] - sys.metric(&cx, &cy)).abs() < 1e-15, "i={i}");
        }
    }

    #[test]
    fn full_shift_sample_near_is_within_radius() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(5, &["near"], 0);
        for k in 1..20 {
            let r = pow2_neg(k);
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_near(&x, r, &mut rng).unwrap();
            assert!(sys.metric(&x, &y) < r);
        }
    }

    #[test]
    fn sturmian_sample_near_is_within_radius() {
        let sys = ShiftSystem::sturmian("st", 0.61803398874989485);
        let mut rng = seeding::rng(6, &["near"], 0);
        for k in [2u32, 5, 10, 20, 40] {
            let r = pow2_neg(k);
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_near(&x, r, &mut rng).unwrap();
            assert!(sys.metric(&x, &y) < r, "k={k}");
        }
    }

    #[test]
    fn thue_morse_sample_near_is_within_radius() {
        let sys = ShiftSystem::thue_morse("tm");
        let mut rng = seeding::rng(7, &["near"], 0);
        for k in [2u32, 6, 10, 14] {
            let r = pow2_neg(k);
            let x = sys.sample_point(&mut rng).unwrap();
            let y = sys.sample_near(&x, r, &mut rng).unwrap();
            assert!(sys.metric(&x, &y) < r, "k={k}");
        }
    }

    #[test]
    fn radius_below_resolution_is_an_error() {
        let sys = ShiftSystem::full_shift("fs", 2);
        let mut rng = seeding::rng(8, &["near"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        assert!(sys.sample_near(&x, 2f64.powi(-70), &mut rng).is_err());
    }

    #[test]
    fn decoded_circle_shift_doubles_angle() {
        let sys = ShiftSystem::binary_coding("code");
        let mut rng = seeding::rng(9, &["double"], 0);
        let x = sys.sample_point(&mut rng).unwrap();
        let v0 = x.as_symbolic().unwrap().decode();
        let v1 = sys.step(&x).as_symbolic().map(|p| p.decode()).unwrap();
        let want = (2.0 * v0).fract();
        assert!((v1 - want).abs() < 1e-12);
    }
}
