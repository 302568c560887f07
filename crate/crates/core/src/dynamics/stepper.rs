//! IMEX-SSP3(4,3,3): SSP-RK3 for advection, an L-stable DIRK for the linear part.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::branch::{BranchKind, ModelBranch};
use super::modes::Factored;
use super::state::{FlowState, Recovery};
use crate::error::{Error, Result};
use crate::fields::{advection_term, velocity_from_stream, StripQuadrature, StripSpec, VelocityField};
use crate::spectral::ChannelGrid;

const GAMMA: f64 = 0.241_694_260_788_21;
const BETA: f64 = 0.060_423_565_197_05;
const ETA: f64 = 0.129_152_869_605_90;

const IMPLICIT: [[f64; 4]; 4] = [
    [GAMMA, 0.0, 0.0, 0.0],
    [-GAMMA, GAMMA, 0.0, 0.0],
    [0.0, 1.0 - GAMMA, GAMMA, 0.0],
    [BETA, ETA, 0.5 - BETA - ETA - GAMMA, GAMMA],
];
const EXPLICIT: [[f64; 4]; 4] = [
    [0.0; 4],
    [0.0; 4],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.25, 0.25, 0.0],
];
const WEIGHTS: [f64; 4] = [0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0];

/// Time-stepping parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_target: f64,
    pub record_every: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            cfl_target: 0.5,
            record_every: 10,
        }
    }
}

impl StepControl {
    pub fn new(dt: f64, t_end: f64, cfl_target: f64, record_every: usize) -> Result<Self> {
        let c = Self {
            dt,
            t_end,
            cfl_target,
            record_every,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.cfl_target > 0.0 && self.cfl_target <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl_target must lie in (0, 1], got {}",
                self.cfl_target
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Largest step `<= dt` that divides `t_end` evenly.
    pub fn step_size(&self) -> f64 {
        if self.t_end == 0.0 {
            return self.dt;
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0);
        self.t_end / n
    }
}

/// Time integrals accumulated over one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepIntegrals {
    /// `int ||grad u||^2 dt`
    pub grad: f64,
    /// `int int_strip |grad u|^2 dt`, when a strip is attached
    pub strip: f64,
}

/// Spacing attributed to each Lobatto node: half the distance between its neighbours.
fn local_spacing(grid: &ChannelGrid) -> Vec<f64> {
    let y = grid.y_nodes();
    let ny = grid.ny();
    (0..=ny)
        .map(|j| {
            if j == 0 {
                (y[0] - y[1]).abs()
            } else if j == ny {
                (y[ny - 1] - y[ny]).abs()
            } else {
                0.5 * (y[j - 1] - y[j + 1]).abs()
            }
        })
        .collect()
}

fn courant_rate(u: &VelocityField, dy_local: &[f64]) -> f64 {
    let grid = u.grid();
    let dx = grid.lx() / grid.nx() as f64;
    let a = u.u1.to_nodal();
    let b = u.u2.to_nodal();
    let mut worst = 0.0f64;
    for i in 0..grid.nx() {
        for (j, dy) in dy_local.iter().enumerate() {
            worst = worst.max(a[[i, j]].abs() / dx + b[[i, j]].abs() / dy);
        }
    }
    worst
}

/// Courant number of `u` at step `dt`, as checked by the integrator.
pub fn cfl_number(u: &VelocityField, dt: f64) -> f64 {
    courant_rate(u, &local_spacing(u.grid())) * dt
}

/// A fixed-step integrator for one branch, grid and step size.
pub struct Integrator {
    recovery: Recovery,
    dt: f64,
    cfl_target: f64,
    stage: Vec<Option<Factored>>,
    fin: Vec<Option<Factored>>,
    strip: Option<(StripSpec, StripQuadrature)>,
    dy_local: Vec<f64>,
}

struct StageEval {
    op: Vec<Option<DMatrix<f64>>>,
    nl: Option<Vec<DMatrix<f64>>>,
}

impl Integrator {
    pub fn new(grid: &Arc<ChannelGrid>, branch: ModelBranch, dt: f64, cfl_target: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        let recovery = Recovery::new(grid, branch)?;
        let stage = recovery
            .modes
            .par_iter()
            .map(|m| m.factor(GAMMA * dt))
            .collect::<Result<Vec<_>>>()?;
        let fin = recovery
            .modes
            .par_iter()
            .map(|m| m.factor(0.0))
            .collect::<Result<Vec<_>>>()?;
        let dy_local = local_spacing(grid);
        Ok(Self {
            recovery,
            dt,
            cfl_target,
            stage,
            fin,
            strip: None,
            dy_local,
        })
    }

    /// Also accumulate the gradient integral over the wall strip.
    pub fn with_strip(mut self, strip: Option<StripSpec>) -> Self {
        self.strip = strip.map(|s| {
            let q = s.quadrature(self.recovery.grid());
            (s, q)
        });
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn branch(&self) -> ModelBranch {
        self.recovery.branch()
    }

    pub fn grid(&self) -> &Arc<ChannelGrid> {
        self.recovery.grid()
    }

    pub fn strip(&self) -> Option<StripSpec> {
        self.strip.as_ref().map(|(s, _)| *s)
    }

    pub fn recovery(&self) -> &Recovery {
        &self.recovery
    }

    pub fn initial_state(&self, u: &VelocityField, t: f64) -> Result<FlowState> {
        self.recovery.initial_state(u, t)
    }

    /// `dt * max(|u1| / dx + |u2| / dy)` over the collocation nodes.
    pub fn cfl(&self, u: &VelocityField) -> f64 {
        courant_rate(u, &self.dy_local) * self.dt
    }

    fn nonlinear(&self, xs: &[DMatrix<f64>]) -> (Vec<DMatrix<f64>>, f64, f64) {
        let r = &self.recovery;
        let psi = r.stream(xs);
        let u = velocity_from_stream(&psi);
        let scalar = r.scalar(xs);
        let adv = advection_term(&u, &scalar);
        let n = r.grid().ny();
        let c = adv.coeffs();
        let nl = r
            .modes
            .iter()
            .enumerate()
            .map(|(k, sys)| {
                let mut v = DMatrix::zeros(n + 1, 2);
                for j in 0..=n {
                    v[(j, 0)] = -c[[k, j]].re;
                    v[(j, 1)] = -c[[k, j]].im;
                }
                sys.apply_proj(&v)
            })
            .collect();
        let grad = u.grad_sq();
        let strip = match &self.strip {
            Some((_, q)) => u.strip_grad_norm_sq(q),
            None => 0.0,
        };
        (nl, grad, strip)
    }

    fn solve(factors: &[Option<Factored>], rhs: Vec<DMatrix<f64>>) -> Vec<DMatrix<f64>> {
        rhs.into_par_iter()
            .zip(factors.par_iter())
            .map(|(b, f)| match f {
                _ if b.iter().all(|v| *v == 0.0) => {
                    let dim = f.as_ref().map_or(b.nrows(), |f| f.dim());
                    DMatrix::zeros(dim, b.ncols())
                }
                Some(f) => f.solve(&b),
                None => b,
            })
            .collect()
    }

    /// `M x0 + dt sum_j (a_j A X_j + e_j P N_j)` per mode.
    fn combine(&self, base: &[DMatrix<f64>], evals: &[StageEval], a: &[f64], e: &[f64]) -> Vec<DMatrix<f64>> {
        let dt = self.dt;
        (0..base.len())
            .into_par_iter()
            .map(|k| {
                let mut r = base[k].clone();
                for (j, ev) in evals.iter().enumerate() {
                    if a[j] != 0.0 {
                        if let Some(ax) = &ev.op[k] {
                            r += ax * (dt * a[j]);
                        }
                    }
                    if e[j] != 0.0 {
                        if let Some(nl) = &ev.nl {
                            r += &nl[k] * (dt * e[j]);
                        }
                    }
                }
                r
            })
            .collect()
    }

    /// Advance one step of size `dt`.
    pub fn step(&self, s: &FlowState) -> Result<(FlowState, StepIntegrals)> {
        let cfl = self.cfl(&s.u);
        if cfl > self.cfl_target {
            return Err(Error::CflViolation {
                cfl,
                target: self.cfl_target,
                advisory_dt: 0.9 * self.dt * self.cfl_target / cfl,
            });
        }
        let r = &self.recovery;
        let x0 = r.pack(&s.q, s.m);
        let base: Vec<DMatrix<f64>> = r
            .modes
            .par_iter()
            .zip(x0.par_iter())
            .map(|(sys, x)| sys.apply_mass(x))
            .collect();
        let mut evals: Vec<StageEval> = Vec::with_capacity(4);
        let mut integrals = StepIntegrals::default();
        for i in 0..4 {
            let rhs = self.combine(&base, &evals, &IMPLICIT[i][..i], &EXPLICIT[i][..i]);
            let xi = Self::solve(&self.stage, rhs);
            let op = r
                .modes
                .par_iter()
                .zip(xi.par_iter())
                .map(|(sys, x)| sys.apply_op(x))
                .collect();
            let needs_nl = WEIGHTS[i] != 0.0 || (i + 1..4).any(|l| EXPLICIT[l][i] != 0.0);
            let nl = if needs_nl {
                let (nl, grad, strip) = self.nonlinear(&xi);
                integrals.grad += self.dt * WEIGHTS[i] * grad;
                integrals.strip += self.dt * WEIGHTS[i] * strip;
                Some(nl)
            } else {
                None
            };
            evals.push(StageEval { op, nl });
        }
        let rhs = self.combine(&base, &evals, &WEIGHTS, &WEIGHTS);
        let x1 = Self::solve(&self.fin, rhs);
        let t = s.t + self.dt;
        let next = r.state_from_modes(&x1, t);
        if !next.is_finite() {
            return Err(Error::NonFinite(t));
        }
        Ok((next, integrals))
    }
}

fn check_branch(branch: &ModelBranch, ok: &[BranchKind], op: &str) -> Result<()> {
    if ok.contains(&branch.kind()) {
        Ok(())
    } else {
        Err(Error::WrongBranch(format!("{op} does not apply to the {} branch", branch.kind())))
    }
}

fn one_step(state: &FlowState, branch: &ModelBranch, ctrl: &StepControl) -> Result<FlowState> {
    ctrl.validate()?;
    let integ = Integrator::new(state.grid(), *branch, ctrl.dt, ctrl.cfl_target)?;
    integ.step(state).map(|(s, _)| s)
}

/// One step of the second-grade or Euler-alpha branch. Loops should reuse an [`Integrator`].
pub fn step_second_grade(state: &FlowState, branch: &ModelBranch, ctrl: &StepControl) -> Result<FlowState> {
    check_branch(branch, &[BranchKind::SecondGrade, BranchKind::EulerAlpha], "step_second_grade")?;
    one_step(state, branch, ctrl)
}

pub fn step_navier_stokes(state: &FlowState, branch: &ModelBranch, ctrl: &StepControl) -> Result<FlowState> {
    check_branch(branch, &[BranchKind::NavierStokes], "step_navier_stokes")?;
    one_step(state, branch, ctrl)
}

pub fn step_euler(state: &FlowState, branch: &ModelBranch, ctrl: &StepControl) -> Result<FlowState> {
    check_branch(branch, &[BranchKind::Euler], "step_euler")?;
    one_step(state, branch, ctrl)
}
