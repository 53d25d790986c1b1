//! Deterministic symbol generators. A symbolic point is a pure function
//! `index -> symbol` plus a shift offset; all generators here answer a query
//! in O(1) or O(log i) with no mutable state, so points are trivially
//! thread-safe and repeated queries always agree.

use std::any::Any;
use std::sync::Arc;

use crate::seeding::splitmix64;

/// Depth at which symbol comparison stops. Sequences that agree on this many
/// symbols are at distance 0 for the prefix metric (2^-64 is far below every
/// tolerance used anywhere in the crate).
pub const COMPARE_DEPTH: u32 = 64;

/// Exact 2^-k for 0 <= k <= 1022.
#[inline]
pub fn pow2_neg(k: u32) -> f64 {
    debug_assert!(k <= 1022);
    f64::from_bits((1023 - u64::from(k)) << 52)
}

pub trait SymbolSource: Send + Sync {
    fn symbol(&self, i: u64) -> u8;
    fn alphabet(&self) -> u8;
    fn describe(&self) -> String;
    fn as_any(&self) -> &dyn Any;
}

/// A point of a shift space: a symbol source viewed from `offset`.
#[derive(Clone)]
pub struct SymbolicPoint {
    src: Arc<dyn SymbolSource>,
    offset: u64,
}

impl SymbolicPoint {
    pub fn new(src: Arc<dyn SymbolSource>) -> Self {
        Self { src, offset: 0 }
    }

    pub fn with_offset(src: Arc<dyn SymbolSource>, offset: u64) -> Self {
        Self { src, offset }
    }

    #[inline]
    pub fn symbol(&self, i: u64) -> u8 {
        self.src.symbol(self.offset + i)
    }

    pub fn alphabet(&self) -> u8 {
        self.src.alphabet()
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn source(&self) -> &Arc<dyn SymbolSource> {
        &self.src
    }

    pub fn shifted(&self, n: u64) -> Self {
        Self { src: self.src.clone(), offset: self.offset + n }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n as u64).map(|i| self.symbol(i)).collect()
    }

    /// First 64 symbols read as a base-`alphabet` fraction in [0, 1).
    pub fn decode(&self) -> f64 {
        let a = f64::from(self.alphabet());
        let mut v = 0.0f64;
        for j in (0..u64::from(COMPARE_DEPTH)).rev() {
            v = (f64::from(self.symbol(j)) + v) / a;
        }
        v
    }

    pub fn describe(&self) -> String {
        if self.offset == 0 {
            self.src.describe()
        } else {
            format!("{}>>{}", self.src.describe(), self.offset)
        }
    }
}

/// First mismatch index below `COMPARE_DEPTH`, or `None` when the prefixes
/// agree through the full comparison depth.
pub fn first_mismatch(a: &SymbolicPoint, b: &SymbolicPoint) -> Option<u32> {
    (0..COMPARE_DEPTH).find(|&k| a.symbol(u64::from(k)) != b.symbol(u64::from(k)))
}

/// Finite word followed by a repeating cycle.
pub struct WordSource {
    head: Vec<u8>,
    cycle: Vec<u8>,
    alphabet: u8,
}

impl WordSource {
    pub fn new(head: Vec<u8>, cycle: Vec<u8>, alphabet: u8) -> Self {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        assert!(head.iter().chain(&cycle).all(|&s| s < alphabet));
        Self { head, cycle, alphabet }
    }

    pub fn constant(sym: u8, alphabet: u8) -> Self {
        Self::new(Vec::new(), vec![sym], alphabet)
    }

    /// `head` then a constant tail of `sym`.
    pub fn eventually(head: Vec<u8>, sym: u8, alphabet: u8) -> Self {
        Self::new(head, vec![sym], alphabet)
    }
}

impl SymbolSource for WordSource {
    fn symbol(&self, i: u64) -> u8 {
        let h = self.head.len() as u64;
        if i < h {
            self.head[i as usize]
        } else {
            self.cycle[((i - h) % self.cycle.len() as u64) as usize]
        }
    }

    fn alphabet(&self) -> u8 {
        self.alphabet
    }

    fn describe(&self) -> String {
        let fmt = |w: &[u8]| w.iter().map(|s| s.to_string()).collect::<String>();
        format!("word:{}({})", fmt(&self.head), fmt(&self.cycle))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Pseudo-random sequence keyed by a seed; pure by construction.
pub struct HashSource {
    seed: u64,
    alphabet: u8,
}

impl HashSource {
    pub fn new(seed: u64, alphabet: u8) -> Self {
        assert!(alphabet >= 2);
        Self { seed, alphabet }
    }
}

impl SymbolSource for HashSource {
    fn symbol(&self, i: u64) -> u8 {
        (splitmix64(self.seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15)) % u64::from(self.alphabet))
            as u8
    }

    fn alphabet(&self) -> u8 {
        self.alphabet
    }

    fn describe(&self) -> String {
        format!("random:{:#x}", self.seed)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// First `take` symbols of `base`, then `tail` from its own start.
pub struct GraftSource {
    take: u64,
    base: SymbolicPoint,
    tail: SymbolicPoint,
}

impl GraftSource {
    pub fn new(base: SymbolicPoint, take: u64, tail: SymbolicPoint) -> Self {
        assert_eq!(base.alphabet(), tail.alphabet());
        Self { take, base, tail }
    }
}

impl SymbolSource for GraftSource {
    fn symbol(&self, i: u64) -> u8 {
        if i < self.take {
            self.base.symbol(i)
        } else {
            self.tail.symbol(i - self.take)
        }
    }

    fn alphabet(&self) -> u8 {
        self.base.alphabet()
    }

    fn describe(&self) -> String {
        format!("graft:{}|{}|{}", self.take, self.base.describe(), self.tail.describe())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

const MASK63: u64 = (1u64 << 63) - 1;

/// Coding of an irrational rotation with respect to the two-cell partition
/// split at 1 - alpha. Phases live on the 2^-63 lattice and advance by exact
/// modular integer arithmetic, so symbol i is exact for every i; no floating
/// accumulation is involved.
pub struct SturmianSource {
    alpha_bits: u64,
    phase_bits: u64,
}

impl SturmianSource {
    pub fn new(alpha: f64, x: f64) -> Self {
        assert!(alpha > 0.0 && alpha < 1.0);
        assert!((0.0..1.0).contains(&x));
        Self {
            alpha_bits: ((alpha * MOD63_F) as u64) & MASK63,
            phase_bits: ((x * MOD63_F) as u64) & MASK63,
        }
    }

    pub fn from_bits(alpha_bits: u64, phase_bits: u64) -> Self {
        Self { alpha_bits: alpha_bits & MASK63, phase_bits: phase_bits & MASK63 }
    }

    pub fn alpha_bits(&self) -> u64 {
        self.alpha_bits
    }

    /// Lattice phase of the rotation after `n` steps.
    pub fn phase_at(&self, n: u64) -> u64 {
        ((u128::from(self.phase_bits) + u128::from(self.alpha_bits) * u128::from(n))
            & u128::from(MASK63)) as u64
    }

    /// Symbol 1 exactly when the phase lies in [1 - alpha, 1).
    #[inline]
    fn classify(&self, phase: u64) -> u8 {
        u8::from(phase >= (1u64 << 63) - self.alpha_bits)
    }
}

const MOD63_F: f64 = 9_223_372_036_854_775_808.0; // 2^63

impl SymbolSource for SturmianSource {
    fn symbol(&self, i: u64) -> u8 {
        self.classify(self.phase_at(i))
    }

    fn alphabet(&self) -> u8 {
        2
    }

    fn describe(&self) -> String {
        format!(
            "sturmian:a={:.12},x={:.12}",
            self.alpha_bits as f64 / MOD63_F,
            self.phase_bits as f64 / MOD63_F
        )
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Parity of the binary digit sum; the fixed point of 0 -> 01, 1 -> 10.
pub struct ThueMorseSource;

impl SymbolSource for ThueMorseSource {
    fn symbol(&self, i: u64) -> u8 {
        (i.count_ones() & 1) as u8
    }

    fn alphabet(&self) -> u8 {
        2
    }

    fn describe(&self) -> String {
        "thue_morse".to_string()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// 0^1 1^1 0^2 1^2 0^4 1^4 ... blocks doubling in length. The orbit closure
/// of this point carries more than one invariant average, which is what the
/// window-independence diagnostics need to see fail.
pub struct DoublingBlocksSource;

impl SymbolSource for DoublingBlocksSource {
    fn symbol(&self, i: u64) -> u8 {
        // segment k occupies [2^(k+1) - 2, 2^(k+2) - 2): 2^k zeros, 2^k ones
        let k = 63 - (i + 2).leading_zeros() - 1;
        let within = i + 2 - (1u64 << (k + 1));
        u8::from(within >= (1u64 << k))
    }

    fn alphabet(&self) -> u8 {
        2
    }

    fn describe(&self) -> String {
        "doubling_blocks".to_string()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(src: impl SymbolSource + 'static) -> SymbolicPoint {
        SymbolicPoint::new(Arc::new(src))
    }

    #[test]
    fn word_source_head_and_cycle() {
        let p = pt(WordSource::new(vec![0, 0, 0, 1], vec![0], 2));
        let want = [0, 0, 0, 1, 0, 0, 0];
        assert_eq!(p.prefix(7), want);
    }

    #[test]
    fn thue_morse_prefix() {
        let p = pt(ThueMorseSource);
        assert_eq!(p.prefix(16), vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn doubling_blocks_prefix() {
        let p = pt(DoublingBlocksSource);
        assert_eq!(p.prefix(14), vec![0, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn sturmian_matches_floor_coding() {
        // symbol_i = floor((i+1)a + x) - floor(ia + x) for moderate i
        let a = 0.61803398874989485;
        let x = 0.2;
        let p = pt(SturmianSource::new(a, x));
        for i in 0..2000u64 {
            let direct = ((i + 1) as f64 * a + x).floor() - (i as f64 * a + x).floor();
            assert_eq!(f64::from(p.symbol(i)), direct, "index {i}");
        }
    }

    #[test]
    fn generators_are_pure() {
        let pts = [
            pt(HashSource::new(99, 2)),
            pt(SturmianSource::new(0.618, 0.1)),
            pt(ThueMorseSource),
        ];
        for p in &pts {
            for i in (0..300).step_by(7) {
                assert_eq!(p.symbol(i), p.symbol(i));
            }
        }
    }

    #[test]
    fn graft_switches_at_boundary() {
        let base = pt(WordSource::constant(1, 2));
        let tail = pt(WordSource::constant(0, 2));
        let g = pt(GraftSource::new(base, 3, tail));
        assert_eq!(g.prefix(5), vec![1, 1, 1, 0, 0]);
    }

    #[test]
    fn shift_advances_view() {
        let p = pt(WordSource::new(vec![0, 1, 2], vec![3], 4));
        let q = p.shifted(2);
        assert_eq!(q.symbol(0), 2);
        assert_eq!(q.symbol(1), 3);
        assert_eq!(q.shifted(1).offset(), 3);
    }

    #[test]
    fn pow2_neg_is_exact() {
        assert_eq!(pow2_neg(0), 1.0);
        assert_eq!(pow2_neg(3), 0.125);
        assert_eq!(pow2_neg(64), 2f64.powi(-64));
    }
}
