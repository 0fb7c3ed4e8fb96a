//! Monotone first-order minimization of the discrete energy with the
//! boundary nodes held fixed.
//!
//! Search directions are the negative gradient divided by the cell volume,
//! i.e. the discrete Euler-Lagrange residual. The trial step comes from the
//! Barzilai-Borwein formula (or from doubling the previous step) and is
//! shrunk until the Armijo condition holds, so every accepted iterate has
//! strictly lower energy.

use crate::energy::{energy, gradient_into, EnergyBreakdown, PotentialMode};
use crate::error::{Error, Result};
use crate::field::QField;
use crate::tensor::{QTensor, ReducedParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    BarzilaiBorwein,
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Threshold on the Euler-Lagrange residual (RMS gradient over the cell volume).
    pub tol: f64,
    pub step_init: f64,
    pub step_rule: StepRule,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking shrink factor.
    pub shrink: f64,
    /// Energy history cadence in iterations.
    pub record_every: usize,
}

impl MinimizeOptions {
    /// Defaults with the temperature-scaled tolerance `1e-6 sqrt(t)`.
    pub fn for_temperature(t: f64) -> Self {
        MinimizeOptions {
            max_iters: 50_000,
            tol: 1e-6 * t.max(0.0).sqrt(),
            step_init: 1e-4,
            step_rule: StepRule::BarzilaiBorwein,
            armijo: 1e-4,
            shrink: 0.5,
            record_every: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::Input("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Input(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return Err(Error::Input(format!(
                "step_init must be positive, got {}",
                self.step_init
            )));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Input("armijo and shrink must lie in (0, 1)".into()));
        }
        if self.record_every < 1 {
            return Err(Error::Input("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub energy_history: Vec<(usize, EnergyBreakdown)>,
    pub converged: bool,
    /// Set when no step satisfying the decrease condition could be found.
    pub stalled: bool,
}

impl MinimizeReport {
    pub fn final_energy(&self) -> EnergyBreakdown {
        self.energy_history
            .last()
            .map(|(_, e)| *e)
            .unwrap_or_default()
    }
}

const MAX_BACKTRACKS: usize = 60;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1e6;

/// RMS of the interior gradient divided by the cell volume.
fn el_residual(g: &[QTensor], mask: &[bool], vol: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (q, &b) in g.iter().zip(mask) {
        if !b {
            sum += q.norm_sq();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        (sum / (5 * count) as f64).sqrt() / vol
    }
}

/// The convergence metric of [`minimize`] evaluated at `field`.
pub fn euler_lagrange_residual(field: &QField, rp: &ReducedParams, mode: PotentialMode) -> f64 {
    let mut g = vec![QTensor::ZERO; field.values.len()];
    gradient_into(field, rp, mode, &mut g);
    el_residual(&g, &field.boundary_mask, field.grid.cell_volume())
}

/// Minimizes the discrete energy over the non-boundary nodes of `field`.
pub fn minimize(
    field: &QField,
    rp: &ReducedParams,
    mode: PotentialMode,
    opts: &MinimizeOptions,
) -> Result<(QField, MinimizeReport)> {
    opts.validate()?;
    mode.validate(rp)?;
    let vol = field.grid.cell_volume();
    let mask = field.boundary_mask.clone();
    let len = field.values.len();

    let mut x = field.clone();
    let mut e = energy(&x, rp, mode);
    if !e.is_finite() {
        return Err(Error::NumericalFailure { iteration: 0 });
    }
    let mut g = vec![QTensor::ZERO; len];
    gradient_into(&x, rp, mode, &mut g);
    let mut res = el_residual(&g, &mask, vol);
    let mut history = vec![(0, e)];
    let mut report = MinimizeReport {
        iterations: 0,
        final_residual: res,
        energy_history: Vec::new(),
        converged: res <= opts.tol,
        stalled: false,
    };
    if report.converged {
        report.energy_history = history;
        return Ok((x, report));
    }

    let mut trial = x.clone();
    let mut g_new = vec![QTensor::ZERO; len];
    let mut step = opts.step_init;
    let inv_vol = 1.0 / vol;

    for iter in 1..=opts.max_iters {
        // descent direction -g / vol, slope <g, d> = |g|^2 / vol
        let slope: f64 = g
            .iter()
            .zip(&mask)
            .filter(|(_, &b)| !b)
            .map(|(q, _)| q.norm_sq())
            .sum::<f64>()
            * inv_vol;

        let mut accepted = None;
        let mut last_finite = true;
        let mut tries = 0;
        while tries < MAX_BACKTRACKS && step >= MIN_STEP {
            let a = step * inv_vol;
            for ((t, (xv, gv)), &b) in trial
                .values
                .iter_mut()
                .zip(x.values.iter().zip(&g))
                .zip(&mask)
            {
                if !b {
                    for c in 0..5 {
                        t.0[c] = xv.0[c] - a * gv.0[c];
                    }
                }
            }
            let et = energy(&trial, rp, mode);
            last_finite = et.is_finite();
            if last_finite && et.total < e.total && et.total <= e.total - opts.armijo * step * slope {
                accepted = Some(et);
                break;
            }
            step *= opts.shrink;
            tries += 1;
        }

        let Some(et) = accepted else {
            if !last_finite {
                return Err(Error::NumericalFailure { iteration: iter });
            }
            report.stalled = true;
            report.iterations = iter - 1;
            break;
        };

        gradient_into(&trial, rp, mode, &mut g_new);
        if g_new.iter().any(|q| !q.is_finite()) {
            return Err(Error::NumericalFailure { iteration: iter });
        }

        let next_step = match opts.step_rule {
            StepRule::BarzilaiBorwein => {
                // s = -step * g / vol, y = (g_new - g) / vol
                let mut ss = 0.0;
                let mut sy = 0.0;
                for ((go, gn), &b) in g.iter().zip(&g_new).zip(&mask) {
                    if b {
                        continue;
                    }
                    for c in 0..5 {
                        let s = -step * go.0[c];
                        ss += s * s;
                        sy += s * (gn.0[c] - go.0[c]);
                    }
                }
                // the common 1/vol^2 factor cancels in the ratio
                if sy > 0.0 {
                    ss / sy
                } else {
                    2.0 * step
                }
            }
            StepRule::Backtracking => 2.0 * step,
        };
        step = next_step.clamp(MIN_STEP, MAX_STEP);

        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_new);
        e = et;
        res = el_residual(&g, &mask, vol);
        report.iterations = iter;
        if iter % opts.record_every == 0 {
            history.push((iter, e));
        }
        if res <= opts.tol {
            report.converged = true;
            break;
        }
    }

    if history.last().map(|(i, _)| *i) != Some(report.iterations) {
        history.push((report.iterations, e));
    }
    report.final_residual = res;
    report.energy_history = history;
    Ok((x, report))
}

/// Largest node norm and whether it respects `|Q| <= 1 + 1e-3`.
pub fn check_maximum_principle(field: &QField) -> (f64, bool) {
    let max = field.values.iter().map(QTensor::norm).fold(0.0, f64::max);
    (max, max <= 1.0 + MAX_PRINCIPLE_SLACK)
}

/// Allowed discrete overshoot of the continuum bound `|Q| <= 1`.
pub const MAX_PRINCIPLE_SLACK: f64 = 1e-3;
