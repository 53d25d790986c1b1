//! Shared horizon-schedule policy. Limits are estimated by evaluating a
//! statistic along a geometric grid of horizons and taking the extremum over
//! the final half of the grid, so slow transients do not contaminate the
//! estimate and the full partial curve stays available for inspection.

pub const DEFAULT_RATIO: f64 = 1.5;

/// Strictly increasing horizons `ceil(ratio^k)` up to `max`, with `max`
/// itself always included.
pub fn geometric(ratio: f64, max: usize) -> Vec<usize> {
    assert!(ratio > 1.0, "schedule ratio must exceed 1");
    let mut out = Vec::new();
    let mut x = 1.0f64;
    loop {
        let n = x.ceil() as usize;
        if n >= max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
        x *= ratio;
    }
    if max >= 1 && out.last() != Some(&max) {
        out.push(max);
    }
    out
}

/// Powers of two up to `max` (inclusive).
pub fn pow2_up_to(max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut l = 1usize;
    while l <= max {
        out.push(l);
        if l > usize::MAX / 2 {
            break;
        }
        l *= 2;
    }
    out
}

/// The final half of a schedule (rounding the tail up for odd lengths).
pub fn tail<T>(xs: &[T]) -> &[T] {
    &xs[xs.len() / 2..]
}

pub fn tail_max(xs: &[f64]) -> f64 {
    tail(xs).iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

pub fn tail_min(xs: &[f64]) -> f64 {
    tail(xs).iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Spread (max - min) over the schedule tail; the estimator's diagnosed
/// noise level.
pub fn tail_spread(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    tail_max(xs) - tail_min(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_is_increasing_and_ends_at_max() {
        let s = geometric(1.5, 1000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*s.last().unwrap(), 1000);
        assert_eq!(s[0], 1);
    }

    #[test]
    fn geometric_handles_tiny_max() {
        assert_eq!(geometric(1.5, 1), vec![1]);
        assert_eq!(geometric(1.5, 2), vec![1, 2]);
    }

    #[test]
    fn tail_is_final_half() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(tail(&xs), &[3.0, 4.0, 5.0]);
        assert_eq!(tail_max(&xs), 5.0);
        assert_eq!(tail_min(&xs), 3.0);
        assert_eq!(tail_spread(&xs), 2.0);
    }
}
