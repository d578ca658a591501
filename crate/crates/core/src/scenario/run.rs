//! Single-scenario and sweep execution.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, SweepConfig};
use super::output::{self, write_atomic};
use crate::classical::{
    cavity_cross_correlation, limit_cycle_summary, phase_locking_metric, LimitCycleSummary,
    PhaseLocking, LOCK_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::fluctuation::integrate_coupled_partial;
use crate::sync::{sync_series, SteadyAggregates};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.csv";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub diverged: bool,
    pub divergence_tau: Option<f64>,
    /// Snapshots whose smallest symplectic eigenvalue fell below 1/2.
    pub physicality_warnings: usize,
    pub min_symplectic_eig: Option<f64>,
    /// Snapshots where a sync measure saturated to infinity.
    pub saturated_samples: usize,
    /// Analyses that could not be completed, with the reason.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub assignments: Vec<(String, f64)>,
    pub dir: PathBuf,
    pub failed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Scenario,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: RunKind,
    pub version: String,
    pub config: serde_json::Value,
    pub wall_time_s: f64,
    pub output_dir: PathBuf,
    /// Files written, relative to `output_dir`.
    pub files: Vec<String>,
    pub diagnostics: Diagnostics,
    pub phase_locking: Option<PhaseLocking>,
    pub limit_cycle: Option<LimitCycleSummary>,
    pub cavity_correlation: Option<f64>,
    pub steady: Option<SteadyAggregates>,
    /// Swept parameter names (sweeps only).
    pub swept: Vec<String>,
    pub points: Vec<PointOutcome>,
}

impl RunManifest {
    /// True if the run (or any sweep point) diverged or errored.
    pub fn failed(&self) -> bool {
        self.diagnostics.diverged || self.points.iter().any(|p| p.failed)
    }
}

fn write_manifest(m: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m)?;
    write_atomic(&m.output_dir.join(MANIFEST_FILE), text.as_bytes())
}

fn record<T>(errors: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{what}: {e}"));
            None
        }
    }
}

/// Integrates mean values and covariance, evaluates the sync measures and
/// writes `classical.csv`, `covariance.csv`, `sync.csv` and the manifest
/// into `cfg.output_dir`. Divergence is not an error: the valid prefix is
/// written and flagged in the returned manifest.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let v0 = cfg.initial_covariance.build(&cfg.params);
    let (traj, divergence_tau) = integrate_coupled_partial(
        &cfg.params,
        &cfg.initial_state,
        &v0,
        cfg.t_end,
        cfg.dt,
        cfg.decimate,
    )?;

    let mut diag = Diagnostics {
        diverged: divergence_tau.is_some(),
        divergence_tau,
        physicality_warnings: traj.warning_count(),
        min_symplectic_eig: traj.min_symplectic.iter().copied().reduce(f64::min),
        ..Default::default()
    };
    let dir = &cfg.output_dir;
    let mut files = vec!["classical.csv".to_string(), "covariance.csv".to_string()];
    output::write_classical(&dir.join("classical.csv"), &traj.classical)?;
    output::write_covariance(&dir.join("covariance.csv"), &traj)?;

    let mut steady = None;
    if let Some(series) = record(
        &mut diag.errors,
        "sync",
        sync_series(&traj, cfg.phi_mode, cfg.window_fraction),
    ) {
        output::write_sync(&dir.join("sync.csv"), &series.samples)?;
        files.push("sync.csv".into());
        diag.saturated_samples = series.samples.iter().filter(|s| s.saturated()).count();
        if !diag.diverged {
            steady = Some(series.steady);
        }
    }
    let phase_locking = record(
        &mut diag.errors,
        "phase locking",
        phase_locking_metric(&traj.classical, cfg.window_fraction, LOCK_THRESHOLD),
    );
    let limit_cycle = record(
        &mut diag.errors,
        "limit cycle",
        limit_cycle_summary(&traj.classical, cfg.window_fraction),
    );
    let cavity_correlation = record(
        &mut diag.errors,
        "cavity correlation",
        cavity_cross_correlation(&traj.classical, cfg.window_fraction),
    );
    files.push(MANIFEST_FILE.into());

    let manifest = RunManifest {
        kind: RunKind::Scenario,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(cfg)?,
        wall_time_s: start.elapsed().as_secs_f64(),
        output_dir: cfg.output_dir.clone(),
        files,
        diagnostics: diag,
        phase_locking,
        limit_cycle,
        cavity_correlation,
        steady,
        swept: Vec::new(),
        points: Vec::new(),
    };
    write_manifest(&manifest)?;
    Ok(manifest)
}

fn point_dir_name(index: usize, assignments: &[(String, f64)]) -> String {
    let mut name = format!("point_{index:03}");
    for (param, value) in assignments {
        name.push_str(&format!("_{param}_{}", output::format_float(*value)));
    }
    name
}

/// Runs every grid point of `cfg` on a pool of `cfg.workers` threads, each
/// into its own subdirectory, then writes `sweep_summary.csv` and the sweep
/// manifest. A failing point is recorded and does not stop the others.
pub fn run_sweep(cfg: &SweepConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let start = Instant::now();
    let root = cfg.base.output_dir.clone();
    fs::create_dir_all(&root)?;
    let points = cfg.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("`workers`: {e}")))?;

    let results: Vec<(PointOutcome, Option<SteadyAggregates>, Option<bool>)> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, assignments)| {
                let name = point_dir_name(i, assignments);
                let mut point = cfg.base.clone();
                point.output_dir = root.join(&name);
                let mut outcome = PointOutcome {
                    assignments: assignments.clone(),
                    dir: PathBuf::from(&name),
                    failed: false,
                    error: None,
                };
                let applied = assignments
                    .iter()
                    .try_for_each(|(p, v)| point.params.set(p, *v));
                match applied.and_then(|_| run_scenario(&point)) {
                    Ok(m) => {
                        outcome.failed = m.failed() || m.steady.is_none();
                        if let Some(tau) = m.diagnostics.divergence_tau {
                            outcome.error = Some(format!("diverged at tau = {tau}"));
                        } else if !m.diagnostics.errors.is_empty() {
                            outcome.error = Some(m.diagnostics.errors.join("; "));
                        }
                        (outcome, m.steady, m.phase_locking.map(|l| l.locked))
                    }
                    Err(e) => {
                        outcome.failed = true;
                        outcome.error = Some(e.to_string());
                        (outcome, None, None)
                    }
                }
            })
            .collect()
    });

    let swept: Vec<String> = cfg.axes.iter().map(|a| a.param.clone()).collect();
    let mut header: Vec<String> = swept.clone();
    for m in ["S_c", "S_phi", "S_p"] {
        for s in ["mean", "min", "max"] {
            header.push(format!("{s}_{m}"));
        }
    }
    header.extend(["locked".to_string(), "failed".to_string()]);
    let rows = results.iter().map(|(o, steady, locked)| {
        let mut row: Vec<f64> = o.assignments.iter().map(|(_, v)| *v).collect();
        match steady {
            Some(a) => {
                for w in [a.s_c, a.s_phi, a.s_p] {
                    row.extend([w.mean, w.min, w.max]);
                }
            }
            None => row.extend([f64::NAN; 9]),
        }
        row.push(locked.map_or(f64::NAN, |l| if l { 1.0 } else { 0.0 }));
        row.push(if o.failed { 1.0 } else { 0.0 });
        row
    });
    write_atomic(
        &root.join(SWEEP_SUMMARY_FILE),
        &output::csv_bytes(&header, rows)?,
    )?;

    let mut diagnostics = Diagnostics::default();
    for (o, _, _) in &results {
        if let Some(e) = &o.error {
            diagnostics.errors.push(format!("{}: {e}", o.dir.display()));
        }
    }
    let mut files = vec![SWEEP_SUMMARY_FILE.to_string(), MANIFEST_FILE.to_string()];
    files.extend(results.iter().map(|(o, _, _)| o.dir.display().to_string()));
    let manifest = RunManifest {
        kind: RunKind::Sweep,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(cfg)?,
        wall_time_s: start.elapsed().as_secs_f64(),
        output_dir: root,
        files,
        diagnostics,
        phase_locking: None,
        limit_cycle: None,
        cavity_correlation: None,
        steady: None,
        swept,
        points: results.into_iter().map(|(o, _, _)| o).collect(),
    };
    write_manifest(&manifest)?;
    Ok(manifest)
}
