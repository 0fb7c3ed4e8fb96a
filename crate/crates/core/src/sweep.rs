//! Temperature sweeps: one minimization per `(t, seed)`, diagnostics per run,
//! best-per-temperature selection and file output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{BoundaryKind, InitKind, SweepConfig};
use crate::diagnostics::{beta_field, classify, h_mass};
use crate::energy::{energy, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::field::{
    constant_boundary, hedgehog_boundary, init_constant, init_radial_ansatz, perturb, NodeIndex, QField,
};
use crate::minimize::{euler_lagrange_residual, minimize};
use crate::output::{write_field_vtk, write_summary_csv};
use crate::tensor::ReducedParams;

/// Diagnostics row for one `(t, seed)` minimization.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub t: f64,
    pub l_tilde: f64,
    pub lambda: f64,
    pub energy: EnergyBreakdown,
    pub min_norm: f64,
    pub min_location: NodeIndex,
    pub max_beta: f64,
    pub beta_location: NodeIndex,
    pub h_mass: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Classification label, or `failed` after a numerical failure.
    pub class: String,
    pub seed: u64,
    pub wall_time: f64,
}

/// Result of one minimization together with its final field.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub record: SweepRecord,
    pub field: QField,
    pub failed: bool,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// Every run, sorted by `(t, seed)`.
    pub records: Vec<SweepRecord>,
    /// Lowest-energy successful run per temperature.
    pub best: Vec<RunResult>,
    /// Temperatures where seeds ended in energies differing beyond the tie tolerance.
    pub distinct_basins: Vec<f64>,
    pub any_failed: bool,
    pub any_unconverged: bool,
    /// Final field of every run, kept only when the config asks to dump all.
    pub all_fields: Vec<(f64, u64, QField)>,
}

/// Relative energy difference treated as a tie.
pub const TIE_TOL: f64 = 1e-10;

/// The boundary data selected by the configuration, interior zero.
pub fn boundary_field(cfg: &SweepConfig) -> Result<QField> {
    match cfg.boundary {
        BoundaryKind::Hedgehog => Ok(hedgehog_boundary(cfg.grid)),
        BoundaryKind::Constant(n0) => constant_boundary(cfg.grid, n0),
    }
}

/// The cold-start field: boundary data plus the configured interior.
pub fn initial_field(cfg: &SweepConfig) -> Result<QField> {
    let base = boundary_field(cfg)?;
    match (cfg.init.kind, cfg.boundary) {
        (InitKind::Radial, _) => init_radial_ansatz(&base, cfg.init.core_radius * cfg.grid.spacing()),
        (InitKind::Constant, BoundaryKind::Constant(n0)) => init_constant(&base, n0),
        (InitKind::Constant, BoundaryKind::Hedgehog) => Err(Error::Input(
            "constant initialization needs a constant boundary".into(),
        )),
    }
}

/// Seed 0 keeps the base field; other seeds perturb it.
fn seeded_start(cfg: &SweepConfig, base: &QField, seed: u64) -> Result<QField> {
    if seed == 0 {
        Ok(base.clone())
    } else {
        perturb(base, seed, cfg.init.amplitude)
    }
}

fn record_for(
    cfg: &SweepConfig,
    rp: &ReducedParams,
    field: &QField,
    energy: EnergyBreakdown,
    iterations: usize,
    residual: f64,
    converged: bool,
    class: Option<String>,
    seed: u64,
    wall_time: f64,
) -> Result<SweepRecord> {
    let rep = classify(field, cfg.thresholds)?;
    Ok(SweepRecord {
        t: rp.t,
        l_tilde: rp.l_tilde,
        lambda: rp.lambda,
        energy,
        min_norm: rep.min_norm,
        min_location: rep.min_norm_location,
        max_beta: rep.max_beta,
        beta_location: rep.max_beta_location,
        h_mass: h_mass(field),
        iterations,
        residual,
        converged,
        class: class.unwrap_or_else(|| rep.classification.to_string()),
        seed,
        wall_time,
    })
}

/// Minimizes from `start` and collects diagnostics. Numerical failures are
/// recorded with class `failed` and the diagnostics of the starting field.
pub fn run_point(cfg: &SweepConfig, rp: &ReducedParams, start: &QField, seed: u64) -> Result<RunResult> {
    let clock = Instant::now();
    let opts = cfg.minimizer.options(rp.t);
    match minimize(start, rp, cfg.mode, &opts) {
        Ok((field, report)) => {
            let record = record_for(
                cfg,
                rp,
                &field,
                report.final_energy(),
                report.iterations,
                report.final_residual,
                report.converged,
                None,
                seed,
                clock.elapsed().as_secs_f64(),
            )?;
            Ok(RunResult {
                record,
                field,
                failed: false,
            })
        }
        Err(Error::NumericalFailure { iteration }) => {
            let e = energy(start, rp, cfg.mode);
            let record = record_for(
                cfg,
                rp,
                start,
                e,
                iteration,
                euler_lagrange_residual(start, rp, cfg.mode),
                false,
                Some("failed".into()),
                seed,
                clock.elapsed().as_secs_f64(),
            )?;
            Ok(RunResult {
                record,
                field: start.clone(),
                failed: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Picks the lowest total energy; ties within [`TIE_TOL`] go to the lower seed.
fn select_best(runs: &[RunResult]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.failed {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let (eb, ei) = (runs[b].record.energy.total, r.record.energy.total);
                let tie = (eb - ei).abs() <= TIE_TOL * eb.abs().max(ei.abs()).max(1.0);
                let better = if tie {
                    r.record.seed < runs[b].record.seed
                } else {
                    ei < eb
                };
                Some(if better { i } else { b })
            }
        };
    }
    best
}

/// Runs every `(t, seed)` pair in ascending `t` without touching the disk.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let points = cfg.points()?;
    let cold = initial_field(cfg)?;
    let mut records = Vec::new();
    let mut best = Vec::new();
    let mut distinct_basins = Vec::new();
    let mut any_failed = false;
    let mut warm: Option<QField> = None;
    let mut all_fields = Vec::new();

    for rp in &points {
        let base = match (&warm, cfg.warm_start) {
            (Some(f), true) => f.clone(),
            _ => cold.clone(),
        };
        let runs: Vec<RunResult> = cfg
            .seeds
            .par_iter()
            .map(|&seed| {
                let start = seeded_start(cfg, &base, seed)?;
                run_point(cfg, rp, &start, seed)
            })
            .collect::<Result<_>>()?;
        any_failed |= runs.iter().any(|r| r.failed);

        let ok: Vec<f64> = runs
            .iter()
            .filter(|r| !r.failed)
            .map(|r| r.record.energy.total)
            .collect();
        if let (Some(lo), Some(hi)) = (
            ok.iter().copied().reduce(f64::min),
            ok.iter().copied().reduce(f64::max),
        ) {
            if hi - lo > 1e-6 * lo.abs().max(1.0) {
                distinct_basins.push(rp.t);
            }
        }

        records.extend(runs.iter().map(|r| r.record.clone()));
        if let Some(b) = select_best(&runs) {
            warm = Some(runs[b].field.clone());
            best.push(runs[b].clone());
        }
        if cfg.dump_all {
            all_fields.extend(runs.into_iter().map(|r| (r.record.t, r.record.seed, r.field)));
        }
    }

    records.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.seed.cmp(&b.seed)));
    let any_unconverged = records.iter().any(|r| !r.converged);
    Ok(SweepOutcome {
        records,
        best,
        distinct_basins,
        any_failed,
        any_unconverged,
        all_fields,
    })
}

/// File name of a field dump.
pub fn field_file_name(t: f64, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("field_t{t}_seed{s}.vtk"),
        None => format!("best_t{t}.vtk"),
    }
}

/// Runs the sweep and writes `summary.csv`, `best.csv` and VTK dumps into `out_dir`.
///
/// Only the best field per temperature is dumped unless `dump_all` is set.
pub fn run_sweep(cfg: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    let outcome = sweep(cfg)?;
    write_outputs(&outcome, out_dir)?;
    Ok(outcome)
}

fn write_outputs(outcome: &SweepOutcome, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_summary_csv(&outcome.records, &out_dir.join("summary.csv"))?;
    let best: Vec<SweepRecord> = outcome.best.iter().map(|r| r.record.clone()).collect();
    write_summary_csv(&best, &out_dir.join("best.csv"))?;
    for r in &outcome.best {
        let path: PathBuf = out_dir.join(field_file_name(r.record.t, None));
        write_field_vtk(&r.field, &beta_field(&r.field), &path)?;
    }
    for (t, seed, field) in &outcome.all_fields {
        let path = out_dir.join(field_file_name(*t, Some(*seed)));
        write_field_vtk(field, &beta_field(field), &path)?;
    }
    Ok(())
}

/// A single `(t, seed)` minimization. The config must name exactly one of each.
pub fn run_single(cfg: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    let points = cfg.points()?;
    if points.len() != 1 || cfg.seeds.len() != 1 {
        return Err(Error::Config {
            line: 0,
            message: format!(
                "run needs exactly one temperature and one seed, got {} and {}",
                points.len(),
                cfg.seeds.len()
            ),
        });
    }
    run_sweep(cfg, out_dir)
}
