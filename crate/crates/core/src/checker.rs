//! System-level property scans and the consistency checks between them.
//!
//! A modulus scan walks a descending delta grid; each delta cell samples
//! pairs below that distance (random plus registered adversarial seeders)
//! and evaluates the property's estimator on a shared distance trace. For
//! every eps the scan reports the largest delta whose cell passed, or a
//! refutation witness whose estimate clears eps by twice the estimator's
//! diagnosed noise. Pair sets are shared across the eps grid, so a delta
//! that works for some eps automatically works for every larger one.

use serde::{Deserialize, Serialize};

use crate::catalog::{sample_pair_near_diagonal, CatalogEntry, SystemFlags};
use crate::ergodic::{observable_orbit_values, Observable};
use crate::error::{Error, Result};
use crate::kahan::Kahan;
use crate::mean::{
    besicovitch_from_trace, prefix_sums, sup_mean_from_trace, weyl_from_trace,
    windowed_uniform_from_sums,
};
use crate::prop::{Outcome, PropertyKind};
use crate::schedule;
use crate::seeding;
use crate::space::Point;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Decreasing.
    pub eps_grid: Vec<f64>,
    /// Decreasing.
    pub delta_grid: Vec<f64>,
    pub pair_budget: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let dec = |g: &[f64]| !g.is_empty() && g.windows(2).all(|w| w[0] > w[1]);
        if !dec(&self.eps_grid) || self.eps_grid.iter().any(|&e| e <= 0.0) {
            return Err(Error::Precondition("eps grid must be positive decreasing".into()));
        }
        if !dec(&self.delta_grid) || self.delta_grid.iter().any(|&d| d <= 0.0) {
            return Err(Error::Precondition("delta grid must be positive decreasing".into()));
        }
        if self.pair_budget == 0 || self.horizon == 0 {
            return Err(Error::Precondition("pair budget and horizon must be positive".into()));
        }
        Ok(())
    }
}

/// Worst estimate seen in one delta cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellStat {
    pub delta: f64,
    pub pairs: usize,
    pub max_estimate: f64,
    /// Diagnosed noise of the worst pair's estimator.
    pub noise: f64,
    pub worst_pair: (String, String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refutation {
    pub eps: f64,
    pub delta: f64,
    pub estimate: f64,
    pub noise: f64,
    pub pair: (String, String),
    /// Partial curve of the witness estimate.
    pub partials: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsRow {
    pub eps: f64,
    /// Largest grid delta whose cell passed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Refutation>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusScan {
    pub property: PropertyKind,
    pub horizon: usize,
    pub pair_budget: usize,
    pub cells: Vec<CellStat>,
    pub rows: Vec<EpsRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemVerdict {
    pub system: String,
    pub property: PropertyKind,
    pub outcome: Outcome,
    pub notes: String,
    pub scan: ModulusScan,
}

/// A verdict together with the in-memory witness points needed to re-run
/// refuted estimates without re-parsing descriptors.
pub struct ScanOutput {
    pub verdict: SystemVerdict,
    pub witnesses: Vec<(f64, Point, Point)>,
}

struct PropEval {
    estimate: f64,
    noise: f64,
    partials: Vec<(f64, f64)>,
}

fn running_max_at(trace: &[f64], sched: &[usize]) -> (f64, Vec<(f64, f64)>) {
    let mut m = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(sched.len());
    let mut next = 0usize;
    for (i, &d) in trace.iter().enumerate() {
        m = m.max(d);
        while next < sched.len() && sched[next] == i + 1 {
            out.push(((i + 1) as f64, m));
            next += 1;
        }
    }
    (m, out)
}

fn property_eval(
    trace: &[f64],
    prop: PropertyKind,
    sched: &[usize],
    lens: &[usize],
) -> PropEval {
    match prop {
        PropertyKind::Equicontinuous => {
            let (estimate, partials) = running_max_at(trace, sched);
            PropEval { estimate, noise: 0.0, partials }
        }
        PropertyKind::MeanEq => {
            let (estimate, partials) = besicovitch_from_trace(trace, sched);
            let values: Vec<f64> = partials.iter().map(|&(_, v)| v).collect();
            PropEval { estimate, noise: schedule::tail_spread(&values), partials }
        }
        PropertyKind::EqInMean => {
            let (estimate, partials) = sup_mean_from_trace(trace, sched);
            PropEval { estimate, noise: 0.0, partials }
        }
        PropertyKind::WeylMeanEq => {
            let (estimate, partials) = weyl_from_trace(trace, lens);
            let values: Vec<f64> = partials.iter().map(|&(_, v)| v).collect();
            PropEval { estimate, noise: schedule::tail_spread(&values), partials }
        }
    }
}

/// Scans all requested properties in one pass, sharing per-pair distance
/// traces across the estimators.
pub fn scan_properties(
    entry: &CatalogEntry,
    props: &[PropertyKind],
    cfg: &ScanConfig,
) -> Result<Vec<ScanOutput>> {
    cfg.validate()?;
    if props.is_empty() {
        return Err(Error::Precondition("no properties requested".into()));
    }
    let sys = entry.effective_system(cfg.horizon).clone();
    if !sys.can_sample() {
        return Err(Error::SamplingUnsupported(format!("system '{}'", sys.id())));
    }
    let sched = schedule::geometric(schedule::DEFAULT_RATIO, cfg.horizon);
    let lens = schedule::pow2_up_to((cfg.horizon / 4).max(1));

    struct CellData {
        stat: CellStat,
        points: (Point, Point),
        partials: Vec<(f64, f64)>,
    }
    // cells[pi][di]
    let mut cells: Vec<Vec<CellData>> = props.iter().map(|_| Vec::new()).collect();

    'delta: for (di, &delta) in cfg.delta_grid.iter().enumerate() {
        let evals: Vec<Result<(Point, Point, Vec<PropEval>)>> =
            crate::par::map_range(cfg.pair_budget, |k| {
                let mut rng = seeding::rng(
                    cfg.seed,
                    &["scan", entry.id(), &format!("d{di}")],
                    k as u64,
                );
                let (x, y) = sample_pair_near_diagonal(entry, &sys, delta, k, &mut rng)?;
                let trace = sys.distance_trace(&x, &y, cfg.horizon);
                let evals =
                    props.iter().map(|&p| property_eval(&trace, p, &sched, &lens)).collect();
                Ok((x, y, evals))
            });
        let mut rows = Vec::with_capacity(cfg.pair_budget);
        for e in evals {
            match e {
                Ok(v) => rows.push(v),
                Err(Error::RadiusTooSmall(_)) => break 'delta,
                Err(other) => return Err(other),
            }
        }
        for (pi, _) in props.iter().enumerate() {
            let worst = rows
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .2[pi].estimate.total_cmp(&b.1 .2[pi].estimate))
                .map(|(i, _)| i)
                .unwrap();
            let (x, y, pe) = &rows[worst];
            let pe = &pe[pi];
            cells[pi].push(CellData {
                stat: CellStat {
                    delta,
                    pairs: rows.len(),
                    max_estimate: pe.estimate,
                    noise: pe.noise,
                    worst_pair: (x.describe(), y.describe()),
                },
                points: (x.clone(), y.clone()),
                partials: pe.partials.clone(),
            });
        }
    }
    if cells[0].is_empty() {
        return Err(Error::RadiusTooSmall(cfg.delta_grid[0]));
    }

    let notes = format!(
        "finite-scale verdict: horizon={}, pairs_per_cell={}, eps_grid={:?}, delta_grid={:?}, \
         seed={}; not a proof",
        cfg.horizon, cfg.pair_budget, cfg.eps_grid, cfg.delta_grid, cfg.seed
    );

    let mut outputs = Vec::with_capacity(props.len());
    for (pi, &prop) in props.iter().enumerate() {
        let data = &cells[pi];
        let mut rows = Vec::with_capacity(cfg.eps_grid.len());
        let mut witnesses = Vec::new();
        for &eps in &cfg.eps_grid {
            let found = data.iter().find(|c| c.stat.max_estimate < eps);
            if let Some(c) = found {
                rows.push(EpsRow { eps, found_delta: Some(c.stat.delta), refutation: None });
                continue;
            }
            // no delta works: the closest pair clearing eps by the margin
            // is the refutation candidate
            let refuting = data
                .iter()
                .rev()
                .find(|c| c.stat.max_estimate >= eps + 2.0 * c.stat.noise);
            match refuting {
                Some(c) => {
                    rows.push(EpsRow {
                        eps,
                        found_delta: None,
                        refutation: Some(Refutation {
                            eps,
                            delta: c.stat.delta,
                            estimate: c.stat.max_estimate,
                            noise: c.stat.noise,
                            pair: c.stat.worst_pair.clone(),
                            partials: c.partials.clone(),
                        }),
                    });
                    witnesses.push((eps, c.points.0.clone(), c.points.1.clone()));
                }
                None => rows.push(EpsRow { eps, found_delta: None, refutation: None }),
            }
        }
        let outcome = if rows.iter().all(|r| r.found_delta.is_some()) {
            Outcome::CertifiedAtScale
        } else if rows.iter().any(|r| r.refutation.is_some()) {
            Outcome::Refuted
        } else {
            Outcome::Inconclusive
        };
        outputs.push(ScanOutput {
            verdict: SystemVerdict {
                system: sys.id().to_string(),
                property: prop,
                outcome,
                notes: notes.clone(),
                scan: ModulusScan {
                    property: prop,
                    horizon: cfg.horizon,
                    pair_budget: cfg.pair_budget,
                    cells: data.iter().map(|c| c.stat.clone()).collect(),
                    rows,
                },
            },
            witnesses,
        });
    }
    Ok(outputs)
}

/// Single-property convenience wrapper.
pub fn scan_modulus(
    entry: &CatalogEntry,
    prop: PropertyKind,
    cfg: &ScanConfig,
) -> Result<ScanOutput> {
    Ok(scan_properties(entry, &[prop], cfg)?.pop().unwrap())
}

/// Re-evaluates a refutation witness pair; used to confirm stored witnesses
/// reproduce their estimates.
pub fn reevaluate_witness(
    entry: &CatalogEntry,
    prop: PropertyKind,
    x: &Point,
    y: &Point,
    horizon: usize,
) -> f64 {
    let sys = entry.effective_system(horizon);
    let trace = sys.distance_trace(x, y, horizon);
    let sched = schedule::geometric(schedule::DEFAULT_RATIO, horizon);
    let lens = schedule::pow2_up_to((horizon / 4).max(1));
    property_eval(&trace, prop, &sched, &lens).estimate
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConsistencyStatus {
    Consistent,
    Inconclusive,
    Contradiction,
}

/// Outcome comparison for two properties expected to be equivalent. An
/// Inconclusive side never yields a contradiction claim.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub system: String,
    pub left: PropertyKind,
    pub right: PropertyKind,
    pub left_outcome: Outcome,
    pub right_outcome: Outcome,
    pub status: ConsistencyStatus,
}

pub fn check_equivalence(a: &SystemVerdict, b: &SystemVerdict) -> EquivalenceReport {
    let status = match (a.outcome, b.outcome) {
        (Outcome::Inconclusive, _) | (_, Outcome::Inconclusive) => {
            ConsistencyStatus::Inconclusive
        }
        (x, y) if x == y => ConsistencyStatus::Consistent,
        _ => ConsistencyStatus::Contradiction,
    };
    EquivalenceReport {
        system: a.system.clone(),
        left: a.property,
        right: b.property,
        left_outcome: a.outcome,
        right_outcome: b.outcome,
        status,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniformWindowConfig {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Candidate minimal window lengths, increasing.
    pub min_len_grid: Vec<usize>,
    pub pair_budget: usize,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniformWindowRow {
    pub eps: f64,
    /// (delta, N, worst window average) once every sampled delta-close pair
    /// keeps all window averages of length >= N below eps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<(f64, usize, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniformWindowReport {
    pub system: String,
    pub horizon: usize,
    pub rows: Vec<UniformWindowRow>,
}

/// For each eps, searches (delta, N) such that sampled delta-close pairs
/// keep every window average of length at least N below eps, across all
/// window starts up to the horizon. Requires a prior mean-equicontinuity
/// certification.
pub fn uniform_window_scan(
    entry: &CatalogEntry,
    mean_eq_outcome: Outcome,
    cfg: &UniformWindowConfig,
) -> Result<UniformWindowReport> {
    if mean_eq_outcome != Outcome::CertifiedAtScale {
        return Err(Error::Precondition(
            "uniform window scan needs a mean-equicontinuity certification first".into(),
        ));
    }
    if cfg.min_len_grid.is_empty() || cfg.min_len_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("min length grid must be increasing".into()));
    }
    let sys = entry.effective_system(cfg.horizon).clone();
    // stats[di][ni] = worst over pairs of (max window average of length >= N)
    let mut stats: Vec<Vec<f64>> = Vec::new();
    'delta: for (di, &delta) in cfg.delta_grid.iter().enumerate() {
        let evals: Vec<Result<Vec<f64>>> = crate::par::map_range(cfg.pair_budget, |k| {
            let mut rng =
                seeding::rng(cfg.seed, &["uniwin", entry.id(), &format!("d{di}")], k as u64);
            let (x, y) = sample_pair_near_diagonal(entry, &sys, delta, k, &mut rng)?;
            let trace = sys.distance_trace(&x, &y, cfg.horizon);
            let sums = prefix_sums(&trace);
            Ok(cfg
                .min_len_grid
                .iter()
                .map(|&n| windowed_uniform_from_sums(&sums, n, cfg.horizon))
                .collect())
        });
        let mut worst = vec![f64::NEG_INFINITY; cfg.min_len_grid.len()];
        for e in evals {
            match e {
                Ok(qs) => {
                    for (w, q) in worst.iter_mut().zip(qs) {
                        *w = w.max(q);
                    }
                }
                Err(Error::RadiusTooSmall(_)) => break 'delta,
                Err(other) => return Err(other),
            }
        }
        stats.push(worst);
    }
    let rows = cfg
        .eps_grid
        .iter()
        .map(|&eps| {
            let mut found = None;
            'search: for (di, worst) in stats.iter().enumerate() {
                for (ni, &q) in worst.iter().enumerate() {
                    if q < eps {
                        found = Some((cfg.delta_grid[di], cfg.min_len_grid[ni], q));
                        break 'search;
                    }
                }
            }
            UniformWindowRow { eps, found }
        })
        .collect();
    Ok(UniformWindowReport { system: sys.id().to_string(), horizon: cfg.horizon, rows })
}

/// Builds a product catalog entry from two entries, embedding both sides'
/// adversarial seeders and intersecting certificates.
pub fn product_entry(a: &CatalogEntry, b: &CatalogEntry, horizon: usize) -> CatalogEntry {
    use crate::catalog::ProductEmbedSeeder;
    use crate::proximal::Certificate;
    use std::sync::Arc;
    let left = a.effective_system(horizon).clone();
    let right = b.effective_system(horizon).clone();
    let system: Arc<dyn crate::space::System> = Arc::new(
        crate::space::product::ProductSystem::new(left.clone(), right.clone()),
    );
    let mut seeds: Vec<Arc<dyn crate::catalog::PairSeeder>> = Vec::new();
    for s in &a.seeds {
        seeds.push(Arc::new(ProductEmbedSeeder::new(
            left.clone(),
            right.clone(),
            s.clone(),
            0,
        )));
    }
    for s in &b.seeds {
        seeds.push(Arc::new(ProductEmbedSeeder::new(
            left.clone(),
            right.clone(),
            s.clone(),
            1,
        )));
    }
    let both_iso = a.certificates.contains(&Certificate::Isometry)
        && b.certificates.contains(&Certificate::Isometry);
    CatalogEntry {
        system,
        twin: None,
        flags: SystemFlags {
            transitive: false,
            minimal: false,
            weakly_mixing: false,
            uniquely_ergodic: a.flags.uniquely_ergodic && b.flags.uniquely_ergodic,
            isometry: a.flags.isometry && b.flags.isometry,
        },
        expected: Default::default(),
        seeds,
        certificates: if both_iso { vec![Certificate::Isometry] } else { vec![] },
        observables: vec![],
        note: None,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductClosureReport {
    pub left: SystemVerdict,
    pub right: SystemVerdict,
    pub product: SystemVerdict,
    pub status: ConsistencyStatus,
}

/// The product must certify exactly when both factors do, and refute when
/// either factor does.
pub fn check_product_closure(
    a: &CatalogEntry,
    b: &CatalogEntry,
    cfg: &ScanConfig,
) -> Result<ProductClosureReport> {
    let left = scan_modulus(a, PropertyKind::MeanEq, cfg)?.verdict;
    let right = scan_modulus(b, PropertyKind::MeanEq, cfg)?.verdict;
    let prod = product_entry(a, b, cfg.horizon);
    let product = scan_modulus(&prod, PropertyKind::MeanEq, cfg)?.verdict;
    let status = match (left.outcome, right.outcome, product.outcome) {
        (Outcome::Inconclusive, _, _)
        | (_, Outcome::Inconclusive, _)
        | (_, _, Outcome::Inconclusive) => ConsistencyStatus::Inconclusive,
        (Outcome::CertifiedAtScale, Outcome::CertifiedAtScale, Outcome::CertifiedAtScale) => {
            ConsistencyStatus::Consistent
        }
        (l, r, Outcome::Refuted) if l == Outcome::Refuted || r == Outcome::Refuted => {
            ConsistencyStatus::Consistent
        }
        _ => ConsistencyStatus::Contradiction,
    };
    Ok(ProductClosureReport { left, right, product, status })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AveragedModulusReport {
    pub system: String,
    pub f_id: String,
    pub eps: f64,
    pub horizon: usize,
    /// Largest delta keeping sup_n |f_n(x) - f_n(y)| below eps over all
    /// sampled delta-close pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found_delta: Option<f64>,
    /// (delta, worst sup-gap) curve.
    pub curve: Vec<(f64, f64)>,
}

/// Uniform equicontinuity probe for the averaged functions n -> f_n: the
/// modulus is measured on the sup over every n <= horizon of the average
/// gap between delta-close starting points.
pub fn averaged_function_equicontinuity(
    entry: &CatalogEntry,
    f: &Observable,
    eps: f64,
    horizon: usize,
    delta_grid: &[f64],
    pair_budget: usize,
    seed: u64,
) -> Result<AveragedModulusReport> {
    let sys = entry.effective_system(horizon).clone();
    let mut curve = Vec::new();
    let mut found = None;
    'delta: for (di, &delta) in delta_grid.iter().enumerate() {
        let gaps: Vec<Result<f64>> = crate::par::map_range(pair_budget, |k| {
            let mut rng =
                seeding::rng(seed, &["avgmod", entry.id(), &format!("d{di}")], k as u64);
            let (x, y) = sample_pair_near_diagonal(entry, &sys, delta, k, &mut rng)?;
            let vx = observable_orbit_values(sys.as_ref(), f, &x, horizon);
            let vy = observable_orbit_values(sys.as_ref(), f, &y, horizon);
            let mut ax = Kahan::new();
            let mut ay = Kahan::new();
            let mut sup = 0.0f64;
            for i in 0..horizon {
                ax.add(vx[i]);
                ay.add(vy[i]);
                sup = sup.max(((ax.value() - ay.value()) / (i + 1) as f64).abs());
            }
            Ok(sup)
        });
        let mut worst = 0.0f64;
        for g in gaps {
            match g {
                Ok(v) => worst = worst.max(v),
                Err(Error::RadiusTooSmall(_)) => break 'delta,
                Err(other) => return Err(other),
            }
        }
        curve.push((delta, worst));
        if worst < eps && found.is_none() {
            found = Some(delta);
        }
    }
    Ok(AveragedModulusReport {
        system: sys.id().to_string(),
        f_id: f.id.clone(),
        eps,
        horizon,
        found_delta: found,
        curve,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub system: String,
    pub holds: bool,
    pub limit_point: String,
    /// Largest step displacement at the end of the sampled orbits.
    pub residual_step: f64,
    /// Largest distance between the sampled orbits' endpoints.
    pub spread: f64,
}

/// Checks that every sampled orbit settles on one common fixed point; run
/// for entries flagged weakly mixing once their mean-equicontinuity scan
/// certifies (no default catalog entry reaches both).
pub fn fixed_point_check(
    entry: &CatalogEntry,
    horizon: usize,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<FixedPointReport> {
    let sys = entry.effective_system(horizon).clone();
    let finals: Vec<Result<Point>> = crate::par::map_range(samples.max(2), |k| {
        let mut rng = seeding::rng(seed, &["fixed_point", entry.id()], k as u64);
        let x = sys.sample_point(&mut rng)?;
        Ok(sys.iterate_point(&x, horizon))
    });
    let finals: Vec<Point> = finals.into_iter().collect::<Result<_>>()?;
    let residual_step = finals
        .iter()
        .map(|p| sys.metric(p, &sys.step(p)))
        .fold(0.0f64, f64::max);
    let mut spread = 0.0f64;
    for i in 0..finals.len() {
        for j in i + 1..finals.len() {
            spread = spread.max(sys.metric(&finals[i], &finals[j]));
        }
    }
    Ok(FixedPointReport {
        system: sys.id().to_string(),
        holds: residual_step <= tol && spread <= tol,
        limit_point: finals[0].describe(),
        residual_step,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, find_entry, CatalogConfig};

    fn default_cfg(horizon: usize) -> ScanConfig {
        ScanConfig {
            eps_grid: (1..=6).map(|k| 2f64.powi(-k)).collect(),
            delta_grid: (1..=20).map(|k| 2f64.powi(-k)).collect(),
            pair_budget: 32,
            horizon,
            seed: 1,
        }
    }

    #[test]
    fn rotation_modulus_tracks_eps() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "rotation_golden").unwrap();
        let out = scan_modulus(e, PropertyKind::MeanEq, &default_cfg(2000)).unwrap();
        assert_eq!(out.verdict.outcome, Outcome::CertifiedAtScale);
        for row in &out.verdict.scan.rows {
            assert_eq!(row.found_delta, Some(row.eps), "eps {}", row.eps);
        }
    }

    #[test]
    fn full_shift_is_refuted_for_all_mean_properties() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "full_shift").unwrap();
        let outs = scan_properties(
            e,
            &[PropertyKind::MeanEq, PropertyKind::EqInMean, PropertyKind::WeylMeanEq],
            &default_cfg(4096),
        )
        .unwrap();
        for o in &outs {
            assert_eq!(o.verdict.outcome, Outcome::Refuted, "{:?}", o.verdict.property);
        }
        // half-unit row carries a refutation
        let mean = &outs[0].verdict.scan;
        assert!(mean.rows[0].refutation.is_some());
        // stored witnesses reproduce their estimates
        for (eps, x, y) in &outs[0].witnesses {
            let v = reevaluate_witness(e, PropertyKind::MeanEq, x, y, 4096);
            assert!(v >= eps - 1e-9);
        }
    }

    #[test]
    fn squaring_certifies_mean_eq() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "squaring").unwrap();
        let out = scan_modulus(e, PropertyKind::MeanEq, &default_cfg(20_000)).unwrap();
        assert_eq!(out.verdict.outcome, Outcome::CertifiedAtScale);
    }

    #[test]
    fn equivalence_report_statuses() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "rotation_golden").unwrap();
        let outs = scan_properties(
            e,
            &[PropertyKind::MeanEq, PropertyKind::EqInMean],
            &default_cfg(2000),
        )
        .unwrap();
        let rep = check_equivalence(&outs[0].verdict, &outs[1].verdict);
        assert_eq!(rep.status, ConsistencyStatus::Consistent);
    }

    #[test]
    fn uniform_window_scan_on_rotation_finds_small_n() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "rotation_golden").unwrap();
        let cfg = UniformWindowConfig {
            eps_grid: (1..=4).map(|k| 2f64.powi(-k)).collect(),
            delta_grid: (1..=20).map(|k| 2f64.powi(-k)).collect(),
            min_len_grid: vec![1, 2, 4, 8, 16],
            pair_budget: 16,
            horizon: 4096,
            seed: 2,
        };
        let rep = uniform_window_scan(e, Outcome::CertifiedAtScale, &cfg).unwrap();
        for row in &rep.rows {
            let (delta, n, _) = row.found.expect("every eps should resolve");
            assert_eq!(n, 1);
            assert_eq!(delta, row.eps);
        }
        assert!(uniform_window_scan(e, Outcome::Inconclusive, &cfg).is_err());
    }

    #[test]
    fn scaled_metric_flips_no_outcome() {
        use crate::space::ScaledMetric;
        use std::sync::Arc;
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let base = find_entry(&entries, "full_shift").unwrap();
        let scaled = CatalogEntry {
            system: Arc::new(ScaledMetric::new(base.system.clone(), 2.0)),
            twin: None,
            flags: base.flags,
            expected: base.expected.clone(),
            seeds: base.seeds.clone(),
            certificates: base.certificates.clone(),
            observables: vec![],
            note: None,
        };
        let cfg = default_cfg(2048);
        let scaled_cfg = ScanConfig {
            eps_grid: cfg.eps_grid.iter().map(|e| e * 2.0).collect(),
            delta_grid: cfg.delta_grid.iter().map(|d| d * 2.0).collect(),
            ..cfg.clone()
        };
        let a = scan_modulus(base, PropertyKind::MeanEq, &cfg).unwrap();
        let b = scan_modulus(&scaled, PropertyKind::MeanEq, &scaled_cfg).unwrap();
        assert_eq!(a.verdict.outcome, b.verdict.outcome);

        let rot = find_entry(&entries, "rotation_golden").unwrap();
        let rot_scaled = CatalogEntry {
            system: Arc::new(ScaledMetric::new(rot.system.clone(), 2.0)),
            twin: None,
            flags: rot.flags,
            expected: rot.expected.clone(),
            seeds: vec![],
            certificates: rot.certificates.clone(),
            observables: vec![],
            note: None,
        };
        let a = scan_modulus(rot, PropertyKind::MeanEq, &cfg).unwrap();
        let b = scan_modulus(&rot_scaled, PropertyKind::MeanEq, &scaled_cfg).unwrap();
        assert_eq!(a.verdict.outcome, b.verdict.outcome);
    }

    #[test]
    fn delta_found_is_monotone_in_eps() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "sturmian").unwrap();
        let out = scan_modulus(e, PropertyKind::MeanEq, &default_cfg(20_000)).unwrap();
        let found: Vec<Option<f64>> =
            out.verdict.scan.rows.iter().map(|r| r.found_delta).collect();
        for w in found.windows(2) {
            if let (Some(a), Some(b)) = (w[0], w[1]) {
                assert!(a >= b, "larger eps must admit a delta at least as large");
            }
        }
    }

    #[test]
    fn fixed_point_check_on_contraction() {
        let entries = build_catalog(&CatalogConfig::default()).unwrap();
        let e = find_entry(&entries, "contraction8").unwrap();
        let rep = fixed_point_check(e, 64, 6, 1e-12, 3).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.limit_point, "#0");
    }
}
