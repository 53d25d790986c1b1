//! Experiment orchestration: runs the configured scans and suites over the
//! catalog and assembles the report. Checker stages parallelize internally;
//! assembly is single-threaded and deterministic.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::catalog::{build_catalog, find_entry, CatalogEntry};
use crate::checker::{
    check_equivalence, fixed_point_check, scan_properties, uniform_window_scan, ScanConfig,
    ScanOutput, UniformWindowConfig,
};
use crate::config::ExperimentConfig;
use crate::ergodic::unique_ergodicity_check;
use crate::error::Result;
use crate::prop::{Expectation, Outcome, PropertyKind};
use crate::proximal::{
    banach_proximal_test, mean_sensitive_pair_test, proximal_test, regionally_proximal_test,
    PairVerdict,
};
use crate::report::{Meta, Report, Series, SystemReport, ToolInfo};
use crate::schedule;
use crate::seeding;
use crate::space::{Point, SpaceKind};

fn horizon_for(entry: &CatalogEntry, cfg: &ExperimentConfig) -> usize {
    match entry.system.kind() {
        SpaceKind::Symbolic => cfg.grids.horizon_symbolic,
        _ => cfg.grids.horizon_numeric,
    }
}

fn outcome_matches(outcome: Outcome, expected: Expectation) -> bool {
    !matches!(
        (outcome, expected),
        (Outcome::CertifiedAtScale, Expectation::False) | (Outcome::Refuted, Expectation::True)
    )
}

fn run_relations(
    entry: &CatalogEntry,
    cfg: &ExperimentConfig,
    horizon: usize,
) -> Result<Vec<PairVerdict>> {
    let sys = entry.effective_system(horizon).clone();
    let g = &cfg.grids;
    let windows = schedule::pow2_up_to((g.relation_horizon / 4).max(1));
    let mut out = Vec::new();
    for k in 0..g.relation_pairs {
        let mut rng = seeding::rng(cfg.rng_seed, &["relations", entry.id()], k as u64);
        let x = sys.sample_point(&mut rng)?;
        // alternate near and independent partners
        let y = if k % 2 == 0 {
            sys.sample_near(&x, sys.diameter() / 4.0, &mut rng)?
        } else {
            sys.sample_point(&mut rng)?
        };
        out.push(proximal_test(sys.as_ref(), &x, &y, &g.relation_eps, g.relation_horizon)?);
        out.push(banach_proximal_test(
            sys.as_ref(),
            &x,
            &y,
            &g.relation_eps,
            g.relation_horizon,
            &windows,
            &entry.certificates,
        )?);
        out.push(regionally_proximal_test(
            sys.as_ref(),
            &x,
            &y,
            2f64.powi(-4),
            4,
            g.relation_horizon.min(1024),
            &entry.certificates,
            seeding::mix(cfg.rng_seed, &["rp", entry.id()], k as u64),
        )?);
        out.push(mean_sensitive_pair_test(
            sys.as_ref(),
            &x,
            &y,
            sys.diameter() / 8.0,
            0.25,
            &g.relation_eps,
            g.search_budget,
            &entry.certificates,
            seeding::mix(cfg.rng_seed, &["ms", entry.id()], k as u64),
        )?);
    }
    Ok(out)
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let start = Instant::now();
    let entries = build_catalog(&config.catalog)?;
    for id in &config.systems {
        find_entry(&entries, id)?;
    }
    let props = config.properties_parsed();

    let mut systems = Vec::with_capacity(config.systems.len());
    let mut series: Vec<Series> = Vec::new();
    let mut contradictions = 0usize;

    for id in &config.systems {
        let entry = find_entry(&entries, id)?;
        let horizon = horizon_for(entry, config);
        let scan_cfg = ScanConfig {
            eps_grid: config.grids.eps.clone(),
            delta_grid: config.grids.delta.clone(),
            pair_budget: config.grids.pair_budget,
            horizon,
            seed: seeding::mix(config.rng_seed, &["scan", id], 0),
        };
        let outputs: Vec<ScanOutput> = scan_properties(entry, &props, &scan_cfg)?;
        let verdicts: Vec<_> = outputs.into_iter().map(|o| o.verdict).collect();

        let mut equivalences = Vec::new();
        if config.has_check("equivalences") {
            let find = |p: PropertyKind| verdicts.iter().find(|v| v.property == p);
            for (a, b) in [
                (PropertyKind::MeanEq, PropertyKind::EqInMean),
                (PropertyKind::MeanEq, PropertyKind::WeylMeanEq),
            ] {
                if let (Some(va), Some(vb)) = (find(a), find(b)) {
                    let rep = check_equivalence(va, vb);
                    if rep.status == crate::checker::ConsistencyStatus::Contradiction {
                        contradictions += 1;
                    }
                    equivalences.push(rep);
                }
            }
        }

        let mean_outcome = verdicts
            .iter()
            .find(|v| v.property == PropertyKind::MeanEq)
            .map(|v| v.outcome);

        let uniform_window = if config.has_check("uniform_window")
            && mean_outcome == Some(Outcome::CertifiedAtScale)
        {
            let uw_cfg = UniformWindowConfig {
                eps_grid: config.grids.eps.clone(),
                delta_grid: config.grids.delta.clone(),
                min_len_grid: config.grids.min_len_grid.clone(),
                pair_budget: config.grids.pair_budget.min(16),
                horizon: horizon.min(100_000),
                seed: seeding::mix(config.rng_seed, &["uniwin", id], 0),
            };
            Some(uniform_window_scan(entry, Outcome::CertifiedAtScale, &uw_cfg)?)
        } else {
            None
        };

        let unique_ergodicity = if config.has_check("unique_ergodicity")
            && !entry.observables.is_empty()
        {
            let ue_horizon = horizon.min(100_000);
            let sys = entry.effective_system(ue_horizon).clone();
            let mut points: Vec<Point> = entry.ue_anchors.clone();
            let mut rng = seeding::rng(config.rng_seed, &["ue", id], 0);
            while points.len() < config.grids.ue_points {
                points.push(sys.sample_point(&mut rng)?);
            }
            Some(unique_ergodicity_check(
                sys.as_ref(),
                &entry.observables,
                &points,
                &schedule::geometric(schedule::DEFAULT_RATIO, ue_horizon),
            )?)
        } else {
            None
        };

        let relations = if config.has_check("relations") {
            run_relations(entry, config, horizon)?
        } else {
            Vec::new()
        };

        let fixed_point = if entry.flags.weakly_mixing
            && mean_outcome == Some(Outcome::CertifiedAtScale)
        {
            Some(fixed_point_check(
                entry,
                horizon.min(10_000),
                4,
                1e-9,
                seeding::mix(config.rng_seed, &["fp", id], 0),
            )?)
        } else {
            None
        };

        let mut expectation_mismatches = Vec::new();
        for v in &verdicts {
            let expected = entry.expected_of(v.property.key());
            if !outcome_matches(v.outcome, expected) {
                expectation_mismatches.push(format!(
                    "{}: scan says {:?} but the recorded expectation is {:?}",
                    v.property, v.outcome, expected
                ));
            }
        }
        if let Some(ue) = &unique_ergodicity {
            use crate::ergodic::UeOutcome;
            let expected = entry.expected_of("uniquely_ergodic");
            let bad = matches!(
                (ue.outcome, expected),
                (UeOutcome::ConsistentWithUE, Expectation::False)
                    | (UeOutcome::RefutedUE, Expectation::True)
            );
            if bad {
                expectation_mismatches.push(format!(
                    "uniquely_ergodic: diagnostics say {:?} but the recorded expectation is {:?}",
                    ue.outcome, expected
                ));
            }
        }

        for v in &verdicts {
            if let Some(row) = v.scan.rows.iter().find(|r| r.refutation.is_some()) {
                let r = row.refutation.as_ref().unwrap();
                series.push(Series {
                    id: format!("{id}/{}/refutation", v.property),
                    points: r.partials.clone(),
                });
            }
            if let Some(last) = v.scan.cells.last() {
                let _ = last;
            }
        }
        if let Some(ue) = &unique_ergodicity {
            for o in &ue.per_observable {
                series.push(Series {
                    id: format!("{id}/ue/{}/spread", o.f_id),
                    points: o.spread.clone(),
                });
            }
        }

        systems.push(SystemReport {
            id: id.clone(),
            kind: entry.system.kind(),
            flags: entry.flags,
            expected: entry.expected.clone(),
            horizon,
            used_twin: entry.uses_twin(horizon),
            verdicts,
            equivalences,
            uniform_window,
            unique_ergodicity,
            relations,
            fixed_point,
            expectation_mismatches,
        });
    }

    let timestamp_unix_s =
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(Report {
        tool: ToolInfo {
            name: "meanlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        config: config.clone(),
        systems,
        contradictions,
        series,
        meta: Meta { timestamp_unix_s, wall_time_ms: start.elapsed().as_millis() as u64 },
    })
}

/// Runs and writes the report; returns the report path and the number of
/// hard contradictions (the CLI maps those to its exit code).
pub fn analyze_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<(PathBuf, usize)> {
    let report = run(config)?;
    let path = crate::report::write_report(&report, dir)?;
    Ok((path, report.contradictions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    fn small_config() -> ExperimentConfig {
        parse(
            r#"
rng_seed = 11
systems = ["rotation_golden", "full_shift"]
properties = ["mean_eq", "eq_in_mean"]
checks = ["equivalences", "unique_ergodicity", "relations"]

[grids]
eps = [0.5, 0.25, 0.125]
delta = [0.5, 0.25, 0.125, 0.0625, 0.03125]
horizon_numeric = 4000
horizon_symbolic = 4000
pair_budget = 8
search_budget = 512
relation_horizon = 2000
relation_pairs = 2
ue_points = 3
"#,
        )
        .unwrap()
    }

    #[test]
    fn run_produces_consistent_report() {
        let report = run(&small_config()).unwrap();
        assert_eq!(report.systems.len(), 2);
        assert_eq!(report.contradictions, 0);
        let rot = &report.systems[0];
        assert!(rot.expectation_mismatches.is_empty(), "{:?}", rot.expectation_mismatches);
        let fs = &report.systems[1];
        assert!(fs.expectation_mismatches.is_empty(), "{:?}", fs.expectation_mismatches);
        assert!(fs.verdicts.iter().all(|v| v.outcome == Outcome::Refuted));
        assert!(!report.series.is_empty());
    }

    #[test]
    fn reports_are_reproducible_modulo_meta() {
        let a = run(&small_config()).unwrap();
        let b = run(&small_config()).unwrap();
        let na = crate::report::normalized_json(&a.to_json().unwrap()).unwrap();
        let nb = crate::report::normalized_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(na, nb);
    }

    #[test]
    fn unknown_system_is_reported() {
        let mut cfg = small_config();
        cfg.systems = vec!["nope".into()];
        assert!(matches!(run(&cfg), Err(crate::Error::UnknownSystem(_))));
    }
}
