//! Densities of index sets over finite horizons. Prefix averages feed the
//! ordinary lower/upper density estimators; sliding windows of fixed length
//! feed the Banach density estimators. Window counts are integers, so every
//! reported fraction is an exactly evaluated rational.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule;

/// A subset of [0, N) stored as its indicator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTrace {
    bits: Vec<bool>,
}

impl IndexTrace {
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "horizon must be at least 1");
        Self { bits }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        Self::new((0..n).map(f).collect())
    }

    pub fn from_distances(dists: &[f64], eps: f64) -> Self {
        Self::new(dists.iter().map(|&d| d >= eps).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Decode the alternating run-length text form: whitespace-separated run
    /// lengths of false/true segments, starting with false. "3 2 5" is
    /// fff tt fffff.
    pub fn from_runs(text: &str) -> Result<Self> {
        let mut bits = Vec::new();
        let mut value = false;
        let mut any = false;
        for tok in text.split_whitespace() {
            let run: usize = tok
                .parse()
                .map_err(|_| Error::InvalidRuns(format!("bad run length '{tok}'")))?;
            any = true;
            bits.extend(std::iter::repeat(value).take(run));
            value = !value;
        }
        if !any {
            return Err(Error::InvalidRuns("empty runs text".into()));
        }
        if bits.is_empty() {
            return Err(Error::InvalidRuns("runs encode an empty trace".into()));
        }
        Ok(Self::new(bits))
    }

    /// Inverse of `from_runs`.
    pub fn to_runs(&self) -> String {
        let mut out: Vec<usize> = Vec::new();
        let mut value = false;
        let mut run = 0usize;
        for &b in &self.bits {
            if b == value {
                run += 1;
            } else {
                out.push(run);
                value = b;
                run = 1;
            }
        }
        out.push(run);
        out.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
    }

    fn prefix_counts(&self) -> Vec<u64> {
        let mut counts = Vec::with_capacity(self.bits.len() + 1);
        counts.push(0u64);
        let mut c = 0u64;
        for &b in &self.bits {
            c += u64::from(b);
            counts.push(c);
        }
        counts
    }
}

/// #(F intersect [m, n]) / (n - m + 1), window bounds inclusive.
pub fn window_fraction(trace: &IndexTrace, m: usize, n: usize) -> Result<f64> {
    if m > n || n >= trace.len() {
        return Err(Error::WindowOutOfRange { m, n, len: trace.len() });
    }
    let count = trace.bits[m..=n].iter().filter(|&&b| b).count();
    Ok(count as f64 / (n - m + 1) as f64)
}

/// Finite-horizon stand-in for liminf/limsup of prefix averages: evaluate
/// the prefix average along the schedule and take min/max over its tail.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub lower: f64,
    pub upper: f64,
    pub horizon: usize,
    /// (prefix length, prefix average) along the schedule.
    pub partials: Vec<(f64, f64)>,
}

pub fn density_estimate(trace: &IndexTrace, prefix_schedule: &[usize]) -> Result<DensityEstimate> {
    if prefix_schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if prefix_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("schedule must be strictly increasing".into()));
    }
    let max = *prefix_schedule.last().unwrap();
    if max > trace.len() || prefix_schedule[0] == 0 {
        return Err(Error::Precondition("schedule out of range".into()));
    }
    let counts = trace.prefix_counts();
    let partials: Vec<(f64, f64)> =
        prefix_schedule.iter().map(|&n| (n as f64, counts[n] as f64 / n as f64)).collect();
    let values: Vec<f64> = partials.iter().map(|&(_, v)| v).collect();
    Ok(DensityEstimate {
        lower: schedule::tail_min(&values),
        upper: schedule::tail_max(&values),
        horizon: max,
        partials,
    })
}

/// Extremal window averages at one window length.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowStat {
    pub len: usize,
    pub min_frac: f64,
    pub max_frac: f64,
    /// Start of a window attaining the min / max.
    pub argmin: usize,
    pub argmax: usize,
}

/// Finite-horizon stand-in for the Banach densities: for each window length
/// L, the extremal averages over every window of that length, computed by a
/// sliding pass; the largest-L values are the point estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BanachDensityEstimate {
    pub lower: f64,
    pub upper: f64,
    pub horizon: usize,
    pub per_len: Vec<WindowStat>,
}

pub fn window_stat(trace: &IndexTrace, len: usize) -> Result<WindowStat> {
    if len == 0 || len > trace.len() {
        return Err(Error::WindowOutOfRange { m: 0, n: len, len: trace.len() });
    }
    let bits = &trace.bits;
    let mut count: u64 = bits[..len].iter().map(|&b| u64::from(b)).sum();
    let (mut min_c, mut max_c) = (count, count);
    let (mut argmin, mut argmax) = (0usize, 0usize);
    for j in 1..=bits.len() - len {
        count += u64::from(bits[j + len - 1]);
        count -= u64::from(bits[j - 1]);
        if count < min_c {
            min_c = count;
            argmin = j;
        }
        if count > max_c {
            max_c = count;
            argmax = j;
        }
    }
    Ok(WindowStat {
        len,
        min_frac: min_c as f64 / len as f64,
        max_frac: max_c as f64 / len as f64,
        argmin,
        argmax,
    })
}

pub fn banach_density_estimate(
    trace: &IndexTrace,
    window_lengths: &[usize],
) -> Result<BanachDensityEstimate> {
    if window_lengths.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if window_lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("window lengths must be strictly increasing".into()));
    }
    let per_len: Vec<WindowStat> = crate::par::map_slice(window_lengths, |&l| {
        window_stat(trace, l)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let last = per_len.last().unwrap();
    Ok(BanachDensityEstimate {
        lower: last.min_frac,
        upper: last.max_frac,
        horizon: trace.len(),
        per_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::geometric;
    use proptest::prelude::*;

    fn evens(n: usize) -> IndexTrace {
        IndexTrace::from_fn(n, |i| i % 2 == 0)
    }

    // O(N * windows) re-count used as the independent oracle.
    fn brute_window_stat(trace: &IndexTrace, len: usize) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for j in 0..=trace.len() - len {
            let f = window_fraction(trace, j, j + len - 1).unwrap();
            min = min.min(f);
            max = max.max(f);
        }
        (min, max)
    }

    #[test]
    fn window_fraction_examples() {
        let t = evens(10);
        assert_eq!(window_fraction(&t, 0, 9).unwrap(), 0.5);
        let empty = IndexTrace::from_fn(64, |_| false);
        assert_eq!(window_fraction(&empty, 3, 40).unwrap(), 0.0);
        // squares below 100: {0, 1, 4, ..., 81}, ten of them
        let squares = IndexTrace::from_fn(100, |i| {
            let r = (i as f64).sqrt().round() as usize;
            r * r == i
        });
        let direct = (0..100)
            .filter(|&i| {
                let r = (i as f64).sqrt().round() as usize;
                r * r == i
            })
            .count();
        assert_eq!(direct, 10);
        assert_eq!(window_fraction(&squares, 0, 99).unwrap(), 0.10);
        assert!(window_fraction(&squares, 50, 100).is_err());
        assert!(window_fraction(&squares, 7, 3).is_err());
    }

    #[test]
    fn density_estimate_examples() {
        let t = evens(10_000);
        let est = density_estimate(&t, &[100, 1000, 10_000]).unwrap();
        assert!((est.lower - 0.5).abs() < 0.01 && (est.upper - 0.5).abs() < 0.01);

        let n = 1_000_000;
        let squares = IndexTrace::from_fn(n, |i| {
            let r = (i as f64).sqrt().round() as usize;
            r * r == i
        });
        let est = density_estimate(&squares, &geometric(1.5, n)).unwrap();
        assert!(est.upper <= 0.002, "upper = {}", est.upper);

        assert!(density_estimate(&t, &[]).is_err());
    }

    #[test]
    fn block_set_separates_lower_and_upper() {
        // F = union of [2^(2k), 2^(2k+1)): prefix averages oscillate between
        // 1/3 and 2/3 in the limit. Oracle: exact counts at the block edges.
        let n = 1 << 24;
        let t = IndexTrace::from_fn(n, |i| {
            if i == 0 {
                return false;
            }
            (63 - (i as u64).leading_zeros()) % 2 == 0
        });
        let est = density_estimate(&t, &geometric(1.5, n)).unwrap();
        assert!((est.lower - 1.0 / 3.0).abs() < 0.05, "lower = {}", est.lower);
        assert!((est.upper - 2.0 / 3.0).abs() < 0.05, "upper = {}", est.upper);
        // exact prefix counts at n = 2^(2k) and 2^(2k+1) agree with the
        // closed forms (4^k - 1)/3 and (4^(k+1) - 1)/3... counted directly
        let counts: Vec<usize> = {
            let mut c = 0;
            let mut out = Vec::new();
            for (i, &b) in t.bits().iter().enumerate() {
                c += usize::from(b);
                if (i + 1).is_power_of_two() {
                    out.push((i + 1, c));
                }
            }
            out.into_iter().map(|(_, c)| c).collect()
        };
        let k = 10;
        let even_edge = counts[2 * k - 1]; // prefix length 2^(2k)
        assert_eq!(even_edge, ((1usize << (2 * k)) - 1) / 3);
    }

    #[test]
    fn banach_examples() {
        let t = evens(4096);
        let est = banach_density_estimate(&t, &[2, 8, 64]).unwrap();
        assert_eq!(est.lower, 0.5);
        assert_eq!(est.upper, 0.5);
        assert!(banach_density_estimate(&t, &[]).is_err());
    }

    #[test]
    fn sliding_equals_brute_force() {
        let mut rng_state = 42u64;
        let mut next = move || {
            rng_state = crate::seeding::splitmix64(rng_state);
            rng_state
        };
        for case in 0..30 {
            let n = 50 + (next() % 1950) as usize;
            let p = (case % 10) as u64;
            let t = IndexTrace::from_fn(n, |_| next() % 10 < p);
            for len in [1usize, 2, 3, 7, 16, n / 2, n] {
                if len == 0 || len > n {
                    continue;
                }
                let fast = window_stat(&t, len).unwrap();
                let (min, max) = brute_window_stat(&t, len);
                assert_eq!(fast.min_frac, min);
                assert_eq!(fast.max_frac, max);
            }
        }
    }

    #[test]
    fn doubling_window_length_does_not_raise_the_max() {
        let mut rng_state = 7u64;
        let mut next = move || {
            rng_state = crate::seeding::splitmix64(rng_state);
            rng_state
        };
        for _ in 0..10 {
            let n = 500 + (next() % 9500) as usize;
            let t = IndexTrace::from_fn(n, |_| next() % 3 == 0);
            for l in [4usize, 16, 64] {
                if 2 * l > n {
                    continue;
                }
                let a = brute_window_stat(&t, l).1;
                let b = brute_window_stat(&t, 2 * l).1;
                assert!(a >= b - 1.0 / l as f64);
            }
        }
    }

    #[test]
    fn runs_codec_examples() {
        let t = IndexTrace::from_runs("3 2 5").unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.bits()[..5], [false, false, false, true, true]);
        assert_eq!(t.to_runs(), "3 2 5");
        // leading true block needs an explicit zero-length false run
        let t = IndexTrace::from_runs("0 4 1").unwrap();
        assert_eq!(t.bits()[..4], [true, true, true, true]);
        assert!(IndexTrace::from_runs("").is_err());
        assert!(IndexTrace::from_runs("x 3").is_err());
    }

    proptest! {
        #[test]
        fn runs_roundtrip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let t = IndexTrace::new(bits);
            let rt = IndexTrace::from_runs(&t.to_runs()).unwrap();
            prop_assert_eq!(t, rt);
        }

        #[test]
        fn window_extrema_bracket_prefix_average(
            bits in proptest::collection::vec(any::<bool>(), 8..400),
            len_frac in 0.01f64..1.0,
        ) {
            let t = IndexTrace::new(bits);
            let len = ((t.len() as f64 * len_frac) as usize).clamp(1, t.len());
            let stat = window_stat(&t, len).unwrap();
            let prefix = window_fraction(&t, 0, len - 1).unwrap();
            prop_assert!(stat.min_frac <= prefix);
            prop_assert!(prefix <= stat.max_frac);
        }
    }
}
