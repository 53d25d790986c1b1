//! The catalog of concrete systems every checker runs against: rotations,
//! angle doubling with its exact coding companion, the full shift, a
//! Sturmian subshift, the Thue-Morse subshift, the squaring map, products,
//! and two finite toys. Entries carry expected classifications (metadata for
//! harnesses, never consumed by estimators), adversarial pair seeders, and
//! analytic certificates.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ergodic::{
    obs_component, obs_coord0, obs_cos_coord0, obs_cos_decoded, obs_finite_cos,
    obs_first_symbol, obs_prefix_reading, obs_sin_coord0, Observable,
};
use crate::error::{Error, Result};
use crate::prop::Expectation;
use crate::proximal::Certificate;
use crate::seeding;
use crate::space::finite::FiniteSpace;
use crate::space::product::ProductSystem;
use crate::space::real::{CircleMap, SquaringMap};
use crate::space::shift::{prefix_len_for_radius, ShiftSystem};
use crate::space::symbolic::{SymbolicPoint, ThueMorseSource, WordSource};
use crate::space::{Point, System};

pub const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SystemFlags {
    pub transitive: bool,
    pub minimal: bool,
    pub weakly_mixing: bool,
    pub uniquely_ergodic: bool,
    pub isometry: bool,
}

/// Generates adversarial near-diagonal pairs at a requested closeness;
/// registered per entry so scans see the witness families random sampling
/// would miss.
pub trait PairSeeder: Send + Sync {
    fn label(&self) -> &str;
    fn pair(&self, sys: &dyn System, delta: f64, rng: &mut ChaCha8Rng) -> Option<(Point, Point)>;
}

/// (0^inf, 0^k 1^inf) with k resolved from delta: the canonical sensitive
/// family of the binary full shift.
pub struct SplitTailSeeder;

impl PairSeeder for SplitTailSeeder {
    fn label(&self) -> &str {
        "split_tail"
    }

    fn pair(&self, _sys: &dyn System, delta: f64, _rng: &mut ChaCha8Rng) -> Option<(Point, Point)> {
        let k = prefix_len_for_radius(delta).ok()? as usize;
        let x = Point::Symbolic(SymbolicPoint::new(Arc::new(WordSource::constant(0, 2))));
        let y = Point::Symbolic(SymbolicPoint::new(Arc::new(WordSource::eventually(
            vec![0; k],
            1,
            2,
        ))));
        Some((x, y))
    }
}

/// Embeds a factor seeder into a product, holding the other coordinate on
/// the diagonal.
pub struct ProductEmbedSeeder {
    left: Arc<dyn System>,
    right: Arc<dyn System>,
    inner: Arc<dyn PairSeeder>,
    /// 0 = seed the left coordinate, 1 = the right.
    side: usize,
    label: String,
}

impl ProductEmbedSeeder {
    pub fn new(
        left: Arc<dyn System>,
        right: Arc<dyn System>,
        inner: Arc<dyn PairSeeder>,
        side: usize,
    ) -> Self {
        let label = format!("embed{side}:{}", inner.label());
        Self { left, right, inner, side, label }
    }
}

impl PairSeeder for ProductEmbedSeeder {
    fn label(&self) -> &str {
        &self.label
    }

    fn pair(&self, _sys: &dyn System, delta: f64, rng: &mut ChaCha8Rng) -> Option<(Point, Point)> {
        if self.side == 0 {
            let (a, b) = self.inner.pair(self.left.as_ref(), delta, rng)?;
            let anchor = self.right.sample_point(rng).ok()?;
            Some((Point::pair(a, anchor.clone()), Point::pair(b, anchor)))
        } else {
            let (a, b) = self.inner.pair(self.right.as_ref(), delta, rng)?;
            let anchor = self.left.sample_point(rng).ok()?;
            Some((Point::pair(anchor.clone(), a), Point::pair(anchor, b)))
        }
    }
}

/// An exact companion system used beyond the trusted floating horizon,
/// together with the embedding of numeric points.
pub struct Twin {
    pub system: Arc<dyn System>,
    pub trusted_horizon: usize,
    pub encode: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
}

pub struct CatalogEntry {
    pub system: Arc<dyn System>,
    pub twin: Option<Twin>,
    pub flags: SystemFlags,
    /// Property key -> expected classification; includes
    /// "uniquely_ergodic". Recorded as expectations, not ground truth.
    pub expected: BTreeMap<String, Expectation>,
    pub seeds: Vec<Arc<dyn PairSeeder>>,
    pub certificates: Vec<Certificate>,
    pub observables: Vec<Observable>,
    pub note: Option<String>,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        self.system.id()
    }

    /// The system scans should run on at the given horizon: the exact twin
    /// once floating iteration can no longer be trusted.
    pub fn effective_system(&self, horizon: usize) -> &Arc<dyn System> {
        match &self.twin {
            Some(t) if horizon > t.trusted_horizon => &t.system,
            _ => &self.system,
        }
    }

    pub fn uses_twin(&self, horizon: usize) -> bool {
        matches!(&self.twin, Some(t) if horizon > t.trusted_horizon)
    }

    pub fn expected_of(&self, key: &str) -> Expectation {
        self.expected.get(key).copied().unwrap_or(Expectation::Unknown)
    }
}

/// Built-in parameters the config may override.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogConfig {
    pub rotation_alpha: f64,
    pub rational_alpha_num: u64,
    pub rational_alpha_den: u64,
    pub sturmian_alpha: f64,
    pub cycle_size: usize,
    pub contraction_size: usize,
    pub doubling_trusted_horizon: usize,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            rotation_alpha: GOLDEN_RATIO_CONJUGATE,
            rational_alpha_num: 1,
            rational_alpha_den: 3,
            sturmian_alpha: GOLDEN_RATIO_CONJUGATE,
            cycle_size: 6,
            contraction_size: 8,
            doubling_trusted_horizon: 40,
        }
    }
}

fn expectations(pairs: &[(&str, Expectation)]) -> BTreeMap<String, Expectation> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// 53-bit binary expansion of a numeric circle point, continued by zeros.
fn encode_binary(p: &Point) -> Point {
    let x = match p {
        Point::Real(xs) => xs[0],
        _ => panic!("encode on non-real point"),
    };
    let mut bits = Vec::with_capacity(53);
    let mut v = x.rem_euclid(1.0);
    for _ in 0..53 {
        v *= 2.0;
        let b = v >= 1.0;
        if b {
            v -= 1.0;
        }
        bits.push(u8::from(b));
    }
    Point::Symbolic(SymbolicPoint::new(Arc::new(WordSource::eventually(bits, 0, 2))))
}

pub fn build_catalog(cfg: &CatalogConfig) -> Result<Vec<CatalogEntry>> {
    if cfg.cycle_size < 2 || cfg.contraction_size < 2 {
        return Err(Error::InvalidConfig("finite space sizes must be at least 2".into()));
    }
    if !(0.0..1.0).contains(&cfg.rotation_alpha) || !(0.0..1.0).contains(&cfg.sturmian_alpha) {
        return Err(Error::InvalidConfig("rotation angles must lie in (0, 1)".into()));
    }
    if cfg.rational_alpha_den == 0 || cfg.rational_alpha_num >= cfg.rational_alpha_den {
        return Err(Error::InvalidConfig("rational angle must be a proper fraction".into()));
    }
    use Expectation::{False, True, Unknown};

    let rotation: Arc<dyn System> =
        Arc::new(CircleMap::rotation("rotation_golden", cfg.rotation_alpha));
    let squaring: Arc<dyn System> = Arc::new(SquaringMap::new("squaring"));
    let full_shift: Arc<dyn System> = Arc::new(ShiftSystem::full_shift("full_shift", 2));

    let mut entries = Vec::new();

    entries.push(CatalogEntry {
        system: rotation.clone(),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: true,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: true,
        },
        expected: expectations(&[
            ("equicontinuous", True),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![Certificate::Isometry],
        observables: vec![obs_cos_coord0(), obs_sin_coord0()],
        note: None,
    });

    let rational = cfg.rational_alpha_num as f64 / cfg.rational_alpha_den as f64;
    entries.push(CatalogEntry {
        system: Arc::new(CircleMap::rotation("rotation_third", rational)),
        twin: None,
        flags: SystemFlags {
            transitive: false,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: false,
            isometry: true,
        },
        expected: expectations(&[
            ("equicontinuous", True),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", False),
        ]),
        seeds: vec![],
        certificates: vec![Certificate::Isometry],
        observables: vec![obs_cos_coord0(), obs_sin_coord0()],
        note: Some("periodic rotation: every orbit is finite".into()),
    });

    let coding: Arc<dyn System> = Arc::new(ShiftSystem::binary_coding("doubling_coded"));
    entries.push(CatalogEntry {
        system: Arc::new(CircleMap::doubling("doubling")),
        twin: Some(Twin {
            system: coding,
            trusted_horizon: cfg.doubling_trusted_horizon,
            encode: Arc::new(encode_binary),
        }),
        flags: SystemFlags {
            transitive: true,
            minimal: false,
            weakly_mixing: true,
            uniquely_ergodic: false,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", False),
            ("mean_eq", False),
            ("eq_in_mean", False),
            ("weyl_mean_eq", False),
            ("uniquely_ergodic", False),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![obs_cos_decoded(), obs_prefix_reading()],
        note: Some(
            "floating iteration trusted for 40 steps; longer horizons run on the exact \
             binary-coding companion"
                .into(),
        ),
    });

    entries.push(CatalogEntry {
        system: full_shift.clone(),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: false,
            weakly_mixing: true,
            uniquely_ergodic: false,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", False),
            ("mean_eq", False),
            ("eq_in_mean", False),
            ("weyl_mean_eq", False),
            ("uniquely_ergodic", False),
        ]),
        seeds: vec![Arc::new(SplitTailSeeder)],
        certificates: vec![],
        observables: vec![obs_first_symbol(), obs_prefix_reading()],
        note: None,
    });

    entries.push(CatalogEntry {
        system: Arc::new(ShiftSystem::sturmian("sturmian", cfg.sturmian_alpha)),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: true,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", False),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![obs_first_symbol(), obs_prefix_reading()],
        note: Some("near-diagonal sampling goes through rotation offsets of the coding".into()),
    });

    entries.push(CatalogEntry {
        system: Arc::new(ShiftSystem::thue_morse("thue_morse")),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: true,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", False),
            ("mean_eq", False),
            ("eq_in_mean", False),
            ("weyl_mean_eq", False),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![obs_first_symbol(), obs_prefix_reading()],
        note: Some(
            "mean-equicontinuity expectations for this substitution shift are \
             literature-informed metadata, not derived in-repo"
                .into(),
        ),
    });

    entries.push(CatalogEntry {
        system: squaring.clone(),
        twin: None,
        flags: SystemFlags {
            transitive: false,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", Unknown),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![obs_cos_coord0(), obs_coord0()],
        note: Some(
            "near-endpoint pairs have long transients; sampling is uniform on [0,1), so \
             verdicts describe the bulk of the space"
                .into(),
        ),
    });

    entries.push(CatalogEntry {
        system: Arc::new(ProductSystem::with_id(
            "rotation_x_squaring",
            rotation.clone(),
            squaring.clone(),
        )),
        twin: None,
        flags: SystemFlags {
            transitive: false,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", Unknown),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![
            obs_component(0, obs_cos_coord0()),
            obs_component(1, obs_coord0()),
        ],
        note: None,
    });

    entries.push(CatalogEntry {
        system: Arc::new(ProductSystem::with_id(
            "rotation_x_full_shift",
            rotation.clone(),
            full_shift.clone(),
        )),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: false,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", False),
            ("mean_eq", False),
            ("eq_in_mean", False),
            ("weyl_mean_eq", False),
            ("uniquely_ergodic", False),
        ]),
        seeds: vec![Arc::new(ProductEmbedSeeder::new(
            rotation.clone(),
            full_shift.clone(),
            Arc::new(SplitTailSeeder),
            1,
        ))],
        certificates: vec![],
        observables: vec![
            obs_component(0, obs_cos_coord0()),
            obs_component(1, obs_first_symbol()),
        ],
        note: None,
    });

    entries.push(CatalogEntry {
        system: Arc::new(FiniteSpace::cycle("cycle6", cfg.cycle_size)),
        twin: None,
        flags: SystemFlags {
            transitive: true,
            minimal: true,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: true,
        },
        expected: expectations(&[
            ("equicontinuous", True),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![Certificate::Isometry],
        observables: vec![obs_finite_cos(cfg.cycle_size)],
        note: None,
    });

    entries.push(CatalogEntry {
        system: Arc::new(FiniteSpace::contraction("contraction8", cfg.contraction_size)),
        twin: None,
        flags: SystemFlags {
            transitive: false,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: true,
            isometry: false,
        },
        expected: expectations(&[
            ("equicontinuous", True),
            ("mean_eq", True),
            ("eq_in_mean", True),
            ("weyl_mean_eq", True),
            ("uniquely_ergodic", True),
        ]),
        seeds: vec![],
        certificates: vec![],
        observables: vec![obs_finite_cos(cfg.contraction_size)],
        note: None,
    });

    Ok(entries)
}

pub fn find_entry<'a>(entries: &'a [CatalogEntry], id: &str) -> Result<&'a CatalogEntry> {
    entries.iter().find(|e| e.id() == id).ok_or_else(|| Error::UnknownSystem(id.to_string()))
}

/// A reproducible pair at distance below delta: even draws sample the space
/// uniformly near a random base point, odd draws cycle through the entry's
/// adversarial seeders (falling back to random when a seeder declines).
pub fn sample_pair_near_diagonal(
    entry: &CatalogEntry,
    sys: &Arc<dyn System>,
    delta: f64,
    variant: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Point, Point)> {
    if delta <= 0.0 {
        return Err(Error::RadiusTooSmall(delta));
    }
    if variant % 2 == 1 && !entry.seeds.is_empty() {
        let seeder = &entry.seeds[(variant / 2) % entry.seeds.len()];
        if let Some(pair) = seeder.pair(sys.as_ref(), delta, rng) {
            if sys.contains(&pair.0) && sys.contains(&pair.1) {
                return Ok(pair);
            }
        }
    }
    let x = sys.sample_point(rng)?;
    let y = sys.sample_near(&x, delta, rng)?;
    Ok((x, y))
}

/// Convenience wrapper on the entry's primary system.
pub fn entry_sample_pair(entry: &CatalogEntry, delta: f64, seed: u64) -> Result<(Point, Point)> {
    let mut rng = seeding::rng(seed, &["pair", entry.id()], 0);
    let variant = rng.gen_range(0..2usize);
    sample_pair_near_diagonal(entry, &entry.system, delta, variant, &mut rng)
}
