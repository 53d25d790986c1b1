//! Pairwise relation tests: proximal, Banach proximal, regionally proximal,
//! and the mean-sensitive pair relation. Finite searches can certify Holds
//! with an explicit witness but cannot prove a negative, so Fails is emitted
//! only where the data or an analytic certificate genuinely bounds the
//! limit (all-bad window families, isometry bounds); everything else stays
//! Inconclusive with the search statistics recorded.

use serde::{Deserialize, Serialize};

use crate::density::{banach_density_estimate, IndexTrace};
use crate::error::{Error, Result};
use crate::seeding;
use crate::space::{orbit_distance_trace, Point, System};

/// Exceptional-density tolerance below which Banach proximality is certified
/// at scale.
pub const BANACH_HOLD_TOL: f64 = 0.01;
/// Window-family density above which Banach proximality is refuted.
pub const BANACH_FAIL_BOUND: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Proximal,
    BanachProximal,
    RegionallyProximal,
    MeanSensitive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairOutcome {
    Holds,
    Fails,
    Inconclusive,
}

/// Analytic bounds registered per catalog system that let a finite search
/// report more than it saw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// The map preserves the metric, so orbit distances never change.
    Isometry,
}

impl Certificate {
    /// Under an isometry, points tracking x and y at radius tau while
    /// starting eps-close would force eps > d(x,y) - 2 tau.
    pub fn mean_sensitive_impossible(self, d_xy: f64, tau: f64, eps: f64) -> Option<String> {
        match self {
            Certificate::Isometry => (eps <= d_xy - 2.0 * tau).then(|| {
                format!(
                    "isometry bound: eps = {eps} <= d(x,y) - 2*tau = {}; \
                     no tracking pair can exist",
                    d_xy - 2.0 * tau
                )
            }),
        }
    }

    /// Under an isometry, d(T^n x', T^n y') >= d(x,y) - 2 eps for any
    /// admissible auxiliary points.
    pub fn regionally_impossible(self, d_xy: f64, eps: f64) -> Option<String> {
        match self {
            Certificate::Isometry => (d_xy >= 3.0 * eps).then(|| {
                format!(
                    "isometry bound: d(x,y) = {d_xy} >= 3*eps; orbit distances stay >= {}",
                    d_xy - 2.0 * eps
                )
            }),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PairTestParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_lengths: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Witness {
    /// Per-eps first hitting time below eps.
    HitTimes(Vec<EpsHit>),
    /// Closest approach found over the searched horizon.
    MinDistance { value: f64, at: usize },
    /// Per-eps exceptional-set density estimates.
    ExceptionalDensity(Vec<EpsDensity>),
    /// Windows witnessing high exceptional density at every length.
    BadWindows { eps: f64, windows: Vec<WindowWitness> },
    /// Auxiliary pair achieving closeness at time n.
    NearbyPair { x: String, y: String, n: usize, dist: f64 },
    /// Per-eps tracking pair with its achieved visit frequency.
    TrackingPairs(Vec<EpsTrack>),
    /// The diagonal case.
    Diagonal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsHit {
    pub eps: f64,
    pub n: usize,
    pub dist: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsDensity {
    pub eps: f64,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowWitness {
    pub len: usize,
    pub start: usize,
    pub frac: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsTrack {
    pub eps: f64,
    pub x: String,
    pub y: String,
    pub n: usize,
    pub frequency: f64,
}

/// Outcome of one relation test, with everything needed to re-check it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairVerdict {
    pub relation: Relation,
    pub pair: (String, String),
    pub outcome: PairOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Analytic certificate annotation, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub params: PairTestParams,
}

fn check_eps_list(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if eps.iter().any(|&e| e <= 0.0) || eps.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Precondition("eps list must be positive and decreasing".into()));
    }
    Ok(())
}

/// Holds when for every eps some positive n <= horizon brings the orbits
/// within eps. A finite horizon cannot refute existence, so the negative
/// outcome is Inconclusive with the closest approach found.
pub fn proximal_test(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    eps_list: &[f64],
    horizon: usize,
) -> Result<PairVerdict> {
    check_eps_list(eps_list)?;
    if horizon < 1 {
        return Err(Error::Precondition("horizon must be at least 1".into()));
    }
    let trace = orbit_distance_trace(sys, x, y, horizon + 1)?;
    let params = PairTestParams {
        eps: Some(eps_list.to_vec()),
        horizon: Some(horizon),
        ..Default::default()
    };
    let mut hits = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        match (1..=horizon).find(|&n| trace[n] < eps) {
            Some(n) => hits.push(EpsHit { eps, n, dist: trace[n] }),
            None => {
                let (at, value) = (1..=horizon)
                    .map(|n| (n, trace[n]))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                return Ok(PairVerdict {
                    relation: Relation::Proximal,
                    pair: (x.describe(), y.describe()),
                    outcome: PairOutcome::Inconclusive,
                    witness: Some(Witness::MinDistance { value, at }),
                    note: None,
                    params,
                });
            }
        }
    }
    Ok(PairVerdict {
        relation: Relation::Proximal,
        pair: (x.describe(), y.describe()),
        outcome: PairOutcome::Holds,
        witness: Some(Witness::HitTimes(hits)),
        note: None,
        params,
    })
}

/// Builds the exceptional set {n : d(T^n x, T^n y) >= eps} per eps and
/// estimates its Banach density. Holds when every upper estimate stays
/// below `BANACH_HOLD_TOL`; Fails when some eps shows a window of fraction
/// >= `BANACH_FAIL_BOUND` at every computed length.
pub fn banach_proximal_test(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    eps_list: &[f64],
    horizon: usize,
    window_lengths: &[usize],
    certs: &[Certificate],
) -> Result<PairVerdict> {
    check_eps_list(eps_list)?;
    let trace = orbit_distance_trace(sys, x, y, horizon)?;
    let params = PairTestParams {
        eps: Some(eps_list.to_vec()),
        horizon: Some(horizon),
        window_lengths: Some(window_lengths.to_vec()),
        ..Default::default()
    };
    let mut densities = Vec::with_capacity(eps_list.len());
    let mut all_hold = true;
    for &eps in eps_list {
        let exceptional = IndexTrace::from_distances(&trace, eps);
        let est = banach_density_estimate(&exceptional, window_lengths)?;
        let floor = est.per_len.iter().map(|s| s.max_frac).fold(f64::INFINITY, f64::min);
        if floor >= BANACH_FAIL_BOUND {
            let windows = est
                .per_len
                .iter()
                .map(|s| WindowWitness { len: s.len, start: s.argmax, frac: s.max_frac })
                .collect();
            let note = certs.iter().any(|c| matches!(c, Certificate::Isometry)).then(|| {
                "isometry: orbit distances are constant, so the measured window \
                 densities are the true limit"
                    .to_string()
            });
            return Ok(PairVerdict {
                relation: Relation::BanachProximal,
                pair: (x.describe(), y.describe()),
                outcome: PairOutcome::Fails,
                witness: Some(Witness::BadWindows { eps, windows }),
                note,
                params,
            });
        }
        all_hold &= est.upper <= BANACH_HOLD_TOL;
        densities.push(EpsDensity { eps, upper: est.upper, lower: est.lower });
    }
    Ok(PairVerdict {
        relation: Relation::BanachProximal,
        pair: (x.describe(), y.describe()),
        outcome: if all_hold { PairOutcome::Holds } else { PairOutcome::Inconclusive },
        witness: Some(Witness::ExceptionalDensity(densities)),
        note: None,
        params,
    })
}

fn symmetric_seed(seed: u64, x: &Point, y: &Point) -> (String, String, u64) {
    let (dx, dy) = (x.describe(), y.describe());
    let (lo, hi) = if dx <= dy { (&dx, &dy) } else { (&dy, &dx) };
    let s = seeding::mix(seed, &[lo, hi], 0);
    (dx.clone(), dy.clone(), s)
}

/// Searches auxiliary points x' in B(x, eps), y' in B(y, eps) and a
/// positive n <= budget with d(T^n x', T^n y') < eps. The candidate list
/// always contains (x, y) itself, a spliced pair sharing a continuation
/// when the space supports it, and sampled ball points.
pub fn regionally_proximal_test(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    eps: f64,
    candidates: usize,
    budget: usize,
    certs: &[Certificate],
    seed: u64,
) -> Result<PairVerdict> {
    if eps <= 0.0 {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    if !sys.can_sample() {
        return Err(Error::SamplingUnsupported(format!("system '{}'", sys.id())));
    }
    let (dx, dy, s) = symmetric_seed(seed, x, y);
    let params = PairTestParams {
        eps: Some(vec![eps]),
        horizon: Some(budget),
        search_budget: Some(candidates),
        seed: Some(seed),
        ..Default::default()
    };

    let mut cands: Vec<(Point, Point)> = vec![(x.clone(), y.clone())];
    {
        let mut rng = seeding::rng(s, &["splice"], 0);
        if let Some(p) = sys.splice_pair(x, y, eps, &mut rng) {
            cands.push(p);
        }
    }
    for k in 0..candidates {
        let mut rx = seeding::rng(s, &["ball", &dx], k as u64);
        let mut ry = seeding::rng(s, &["ball", &dy], k as u64);
        if let (Ok(xp), Ok(yp)) = (sys.sample_near(x, eps, &mut rx), sys.sample_near(y, eps, &mut ry))
        {
            cands.push((xp, yp));
        }
    }

    let evals: Vec<Option<(f64, usize, String, String)>> =
        crate::par::map_slice(&cands, |(xp, yp)| {
            let trace = sys.distance_trace(xp, yp, budget + 1);
            (1..=budget)
                .map(|n| (n, trace[n]))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(n, d)| (d, n, xp.describe(), yp.describe()))
        });
    let best = evals
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    if let Some((d, n, wx, wy)) = best {
        if d < eps {
            return Ok(PairVerdict {
                relation: Relation::RegionallyProximal,
                pair: (dx, dy),
                outcome: PairOutcome::Holds,
                witness: Some(Witness::NearbyPair { x: wx, y: wy, n, dist: d }),
                note: None,
                params,
            });
        }
    }
    let note = certs.iter().find_map(|c| c.regionally_impossible(sys.metric(x, y), eps));
    Ok(PairVerdict {
        relation: Relation::RegionallyProximal,
        pair: (dx, dy),
        outcome: PairOutcome::Inconclusive,
        witness: best.map(|(d, n, _, _)| Witness::MinDistance { value: d, at: n }),
        note,
        params,
    })
}

/// Best visit frequency over n <= budget for a tracking candidate: the
/// fraction of times i < n at which T^i x' is tau-close to x and T^i y' is
/// tau-close to y, maximized over n.
fn best_tracking_frequency(
    sys: &dyn System,
    xp: &Point,
    yp: &Point,
    x: &Point,
    y: &Point,
    tau: f64,
    budget: usize,
) -> (f64, usize) {
    let tx = sys.anchor_distance_trace(xp, x, budget);
    let ty = sys.anchor_distance_trace(yp, y, budget);
    let mut hits = 0usize;
    let mut best = (0.0f64, 1usize);
    for i in 0..budget {
        hits += usize::from(tx[i] < tau && ty[i] < tau);
        let freq = hits as f64 / (i + 1) as f64;
        if freq > best.0 {
            best = (freq, i + 1);
        }
    }
    best
}

/// The mean-sensitive pair search: for each eps, look for eps-close
/// auxiliary points whose orbits simultaneously track x and y at radius tau
/// with frequency above c. Holds needs every eps in the schedule to
/// succeed; a finite search never emits Fails, but an isometry certificate
/// can record that success is impossible.
#[allow(clippy::too_many_arguments)]
pub fn mean_sensitive_pair_test(
    sys: &dyn System,
    x: &Point,
    y: &Point,
    tau: f64,
    c: f64,
    eps_schedule: &[f64],
    budget: usize,
    certs: &[Certificate],
    seed: u64,
) -> Result<PairVerdict> {
    if tau <= 0.0 || !(0.0..1.0).contains(&c) || c == 0.0 {
        return Err(Error::Precondition("need tau > 0 and 0 < c < 1".into()));
    }
    check_eps_list(eps_schedule)?;
    let (dx, dy, s) = symmetric_seed(seed, x, y);
    let params = PairTestParams {
        eps: Some(eps_schedule.to_vec()),
        tau: Some(tau),
        c: Some(c),
        search_budget: Some(budget),
        seed: Some(seed),
        ..Default::default()
    };
    let d_xy = sys.metric(x, y);
    if d_xy == 0.0 {
        return Ok(PairVerdict {
            relation: Relation::MeanSensitive,
            pair: (dx, dy),
            outcome: PairOutcome::Holds,
            witness: Some(Witness::Diagonal),
            note: None,
            params,
        });
    }

    let mut tracks = Vec::with_capacity(eps_schedule.len());
    let mut note = None;
    let mut all = true;
    for (ei, &eps) in eps_schedule.iter().enumerate() {
        if let Some(msg) = certs.iter().find_map(|c| c.mean_sensitive_impossible(d_xy, tau, eps)) {
            note = Some(msg);
            all = false;
            break;
        }
        let mut cands: Vec<(Point, Point)> = Vec::new();
        if let Some(xg) = sys.graft_point(x, eps, y) {
            cands.push((x.clone(), xg));
        }
        if let Some(yg) = sys.graft_point(y, eps, x) {
            cands.push((yg, y.clone()));
        }
        if d_xy < eps {
            cands.push((x.clone(), y.clone()));
        }
        for k in 0..8usize {
            let mut rx = seeding::rng(s, &["ms", &dx], (ei * 8 + k) as u64);
            if let Ok(xp) = sys.sample_near(x, eps / 2.0, &mut rx) {
                let mut ry = seeding::rng(s, &["ms2", &dx, &dy], (ei * 8 + k) as u64);
                if let Ok(yp) = sys.sample_near(&xp, eps / 2.0, &mut ry) {
                    cands.push((xp, yp));
                }
            }
        }

        let evals: Vec<(f64, usize, String, String)> = crate::par::map_slice(&cands, |(xp, yp)| {
            let (freq, n) = best_tracking_frequency(sys, xp, yp, x, y, tau, budget);
            (freq, n, xp.describe(), yp.describe())
        });
        let best = evals.into_iter().max_by(
            |a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)),
        );
        match best {
            Some((freq, n, wx, wy)) if freq > c => {
                tracks.push(EpsTrack { eps, x: wx, y: wy, n, frequency: freq });
            }
            _ => {
                all = false;
                break;
            }
        }
    }

    Ok(PairVerdict {
        relation: Relation::MeanSensitive,
        pair: (dx, dy),
        outcome: if all { PairOutcome::Holds } else { PairOutcome::Inconclusive },
        witness: (!tracks.is_empty()).then_some(Witness::TrackingPairs(tracks)),
        note,
        params,
    })
}
