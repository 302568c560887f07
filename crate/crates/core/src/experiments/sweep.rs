use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::family::{initial_data_terms, suitable_family, BaseFlow, InitialDataTerms};
use super::fit::{log_fit, LogFit};
use super::reference::{reference_solution, Reference};
use super::regime::{classify_regime, RegimeRegion};
use crate::diagnostics::{kato_functional, strip_width, StripRule, MIN_STRIP_NODES};
use crate::dynamics::{run_with, ModelBranch, ReferenceProbe, RunOptions, StepControl};
use crate::error::{Error, Result};
use crate::fields::StripSpec;
use crate::spectral::ChannelGrid;

/// Finest wall-normal resolution a sweep will allocate.
pub const MAX_NY: usize = 1024;

/// A family of runs along `nu = c alpha^beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub beta: f64,
    pub coeff: f64,
    /// strictly decreasing, in `(0, 1)`
    pub alphas: Vec<f64>,
    pub base_flow: BaseFlow,
    pub ctrl: StepControl,
    pub strip_rule: StripRule,
    pub strip_coeff: f64,
    pub nx: usize,
    /// floor of the per-row `ny` schedule
    pub min_ny: usize,
    pub lx: f64,
    /// coarse grid of the numerical reference, doubled for the reference itself
    pub reference_grid: (usize, usize),
}

impl SweepPlan {
    pub fn new(beta: f64, coeff: f64, alphas: Vec<f64>, base_flow: BaseFlow, ctrl: StepControl) -> Self {
        Self {
            beta,
            coeff,
            alphas,
            base_flow,
            ctrl,
            strip_rule: StripRule::AlphaCubed,
            strip_coeff: 1.0,
            nx: 8,
            min_ny: 32,
            lx: 2.0 * PI,
            reference_grid: (16, 32),
        }
    }

    /// The path `alpha = nu^{1/beta}` parametrized by decreasing `nus`, with `c = 1`.
    pub fn along_nu(beta: f64, nus: &[f64], base_flow: BaseFlow, ctrl: StepControl) -> Self {
        let alphas = nus.iter().map(|nu| nu.powf(1.0 / beta)).collect();
        Self::new(beta, 1.0, alphas, base_flow, ctrl)
    }

    pub fn with_strip(mut self, rule: StripRule, coeff: f64) -> Self {
        self.strip_rule = rule;
        self.strip_coeff = coeff;
        self
    }

    pub fn nu_of(&self, alpha: f64) -> f64 {
        self.coeff * alpha.powf(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::InvalidParameter("sweep has no alphas".into()));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::InvalidParameter("alphas must lie in (0, 1)".into()));
        }
        if self.alphas.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParameter("alphas must be strictly decreasing".into()));
        }
        if !(self.beta > 0.0 && self.coeff > 0.0 && self.strip_coeff > 0.0) {
            return Err(Error::InvalidParameter("path exponent and coefficients must be positive".into()));
        }
        self.ctrl.validate()?;
        ChannelGrid::new(self.nx, self.min_ny, self.lx)?;
        Ok(())
    }

    /// Grid for one row, resolving the initial-data collar and the layers of widths
    /// `sqrt(alpha)` and `sqrt(nu T)` with at least [`MIN_STRIP_NODES`] nodes.
    pub fn resolution(&self, alpha: f64) -> Result<(usize, usize)> {
        let nu = self.nu_of(alpha);
        let w = [alpha, alpha.sqrt(), (nu * self.ctrl.t_end).sqrt()]
            .into_iter()
            .filter(|w| *w > 0.0)
            .fold(f64::INFINITY, f64::min);
        let mut ny = self.min_ny;
        while nodes_within(ny, w) < MIN_STRIP_NODES {
            ny *= 2;
            if ny > MAX_NY {
                return Err(Error::Unresolved(format!("width {w} needs ny > {MAX_NY}")));
            }
        }
        Ok((self.nx, ny))
    }
}

/// Lobatto nodes with `y > 1 - w`, the wall included.
pub fn nodes_within(ny: usize, w: f64) -> usize {
    (0..=ny)
        .take_while(|&j| (PI * j as f64 / ny as f64).cos() > 1.0 - w)
        .count()
}

/// Outcome of one `(alpha, nu)` run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub nu: f64,
    pub region: Option<RegimeRegion>,
    pub delta_used: f64,
    /// `sup_t ||u(t) - u_bar(t)||`
    pub sup_err: f64,
    pub kato_value: f64,
    pub ic: InitialDataTerms,
    /// `| ||u_bar(T)||^2 - ||u(T)||^2 |`
    pub final_energy_gap: f64,
    /// `sup_t alpha^2 ||grad u(t)||^2`
    pub sup_alpha_grad: f64,
    /// `None` for a completed run, otherwise the reason it stopped
    pub failure: Option<String>,
}

impl SweepRow {
    fn failed(alpha: f64, nu: f64, reason: String) -> Self {
        Self {
            alpha,
            nu,
            region: classify_regime(alpha, nu).ok(),
            delta_used: f64::NAN,
            sup_err: f64::NAN,
            kato_value: f64::NAN,
            ic: InitialDataTerms {
                l2_gap: f64::NAN,
                grad_term: f64::NAN,
                h3_term: f64::NAN,
            },
            final_energy_gap: f64::NAN,
            sup_alpha_grad: f64::NAN,
            failure: Some(reason),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

fn run_row(plan: &SweepPlan, alpha: f64, reference: &Reference) -> Result<SweepRow> {
    let nu = plan.nu_of(alpha);
    let (nx, ny) = plan.resolution(alpha)?;
    let grid = ChannelGrid::new(nx, ny, plan.lx)?;
    let psi0 = plan.base_flow.stream(&grid);
    let u0 = plan.base_flow.velocity(&grid);
    let u0a = suitable_family(&psi0, alpha)?;
    let ic = initial_data_terms(&u0a, &u0, alpha)?;
    let delta = strip_width(plan.strip_rule, alpha, nu, plan.strip_coeff)?;
    let strip = StripSpec::new(delta)?;
    let branch = ModelBranch::classify(alpha, nu)?;
    let grid_ref: Arc<ChannelGrid> = grid.clone();
    let mut probe = ReferenceProbe::new(|t| reference.velocity(t, &grid_ref));
    let opts = RunOptions {
        strip: Some(strip),
        keep_snapshots: false,
    };
    let traj = run_with(&u0a, branch, &plan.ctrl, opts, &mut [&mut probe])?;
    let sup_err = traj.sup_err().unwrap_or(0.0);
    let t_end = traj.final_state.t;
    let ubar = reference.velocity(t_end, &grid)?;
    let final_energy_gap = (ubar.l2_sq() - traj.final_state.u.l2_sq()).abs();
    let sup_alpha_grad = traj
        .records
        .iter()
        .map(|r| alpha * alpha * r.grad_sq)
        .fold(0.0, f64::max);
    Ok(SweepRow {
        alpha,
        nu,
        region: classify_regime(alpha, nu).ok(),
        delta_used: delta,
        sup_err,
        kato_value: kato_functional(&traj, nu, &strip)?,
        ic,
        final_energy_gap,
        sup_alpha_grad,
        failure: None,
    })
}

/// Runs every row of the plan, in parallel, returning them in plan order.
///
/// A failing row is kept with its reason. The sweep itself fails only on an invalid plan or
/// when a numerical reference is not converged to a tenth of the smallest measured error.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let (rx, ry) = plan.reference_grid;
    let reference = reference_solution(plan.base_flow, rx, ry, plan.lx, &plan.ctrl)?;
    let rows: Vec<SweepRow> = plan
        .alphas
        .par_iter()
        .map(|&a| run_row(plan, a, &reference).unwrap_or_else(|e| SweepRow::failed(a, plan.nu_of(a), e.to_string())))
        .collect();
    let smallest = rows
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| r.sup_err)
        .fold(f64::INFINITY, f64::min);
    let gap = reference.self_convergence();
    if smallest.is_finite() && gap > 0.1 * smallest {
        return Err(Error::ReferenceRejected(format!(
            "reference self-convergence {gap:.3e} exceeds a tenth of the smallest error {smallest:.3e}"
        )));
    }
    Ok(rows)
}

/// Slope of `log sup_err` against `log alpha` over the completed rows.
pub fn rate_fit(rows: &[SweepRow]) -> Result<LogFit> {
    let usable: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.is_ok() && r.sup_err > 0.0 && r.sup_err.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!("{} usable rows, need 3", usable.len())));
    }
    let a: Vec<f64> = usable.iter().map(|r| r.alpha).collect();
    let e: Vec<f64> = usable.iter().map(|r| r.sup_err).collect();
    log_fit(&a, &e)
}
