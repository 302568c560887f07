use std::time::{Duration, Instant};

use super::branch::ModelBranch;
use super::state::FlowState;
use super::stepper::{Integrator, StepControl};
use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::fields::{StripSpec, VelocityField};

/// A hook run at every sample time; it may fill optional record fields.
pub trait Probe {
    fn sample(&mut self, state: &FlowState, record: &mut DiagnosticsRecord) -> Result<()>;
}

/// Fills `err_vs_ref_l2` with `||u(t) - u_ref(t)||`.
pub struct ReferenceProbe<F> {
    reference: F,
}

impl<F> ReferenceProbe<F>
where
    F: FnMut(f64) -> Result<VelocityField>,
{
    pub fn new(reference: F) -> Self {
        Self { reference }
    }
}

impl<F> Probe for ReferenceProbe<F>
where
    F: FnMut(f64) -> Result<VelocityField>,
{
    fn sample(&mut self, state: &FlowState, record: &mut DiagnosticsRecord) -> Result<()> {
        let r = (self.reference)(state.t)?;
        record.err_vs_ref_l2 = Some(state.u.sub(&r)?.l2_sq().sqrt());
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Strip over which the gradient is also integrated.
    pub strip: Option<StripSpec>,
    /// Keep the state at every sample.
    pub keep_snapshots: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub branch: ModelBranch,
    pub dt: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<FlowState>,
    pub final_state: FlowState,
    pub steps: usize,
    pub wall_time: Duration,
    pub strip: Option<StripSpec>,
    /// `int ||grad u||^2 dt` over the run
    pub grad_time_integral: f64,
    /// `int int_strip |grad u|^2 dt` over the run
    pub strip_time_integral: f64,
}

impl Trajectory {
    /// Largest recorded `err_vs_ref_l2`, if any sample carries one.
    pub fn sup_err(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.err_vs_ref_l2)
            .fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
    }
}

pub fn run(
    initial: &VelocityField,
    branch: ModelBranch,
    ctrl: &StepControl,
    probes: &mut [&mut dyn Probe],
) -> Result<Trajectory> {
    run_with(initial, branch, ctrl, RunOptions::default(), probes)
}

pub fn run_with(
    initial: &VelocityField,
    branch: ModelBranch,
    ctrl: &StepControl,
    opts: RunOptions,
    probes: &mut [&mut dyn Probe],
) -> Result<Trajectory> {
    ctrl.validate()?;
    let integ = Integrator::new(initial.grid(), branch, ctrl.step_size(), ctrl.cfl_target)?
        .with_strip(opts.strip);
    let s0 = integ.initial_state(initial, 0.0)?;
    integ.run_from(s0, ctrl, opts.keep_snapshots, probes)
}

impl Integrator {
    /// Steps `state` to `ctrl.t_end`, which must lie a whole number of steps ahead.
    pub fn run_from(
        &self,
        state: FlowState,
        ctrl: &StepControl,
        keep_snapshots: bool,
        probes: &mut [&mut dyn Probe],
    ) -> Result<Trajectory> {
        ctrl.validate()?;
        let start = Instant::now();
        let t0 = state.t;
        let span = ctrl.t_end - t0;
        let steps = (span / self.dt()).round();
        if span < 0.0 || (steps * self.dt() - span).abs() > 1e-9 * ctrl.t_end.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot reach t_end = {} from t = {t0} in steps of {}",
                ctrl.t_end,
                self.dt()
            )));
        }
        let steps = steps as usize;
        let nu = self.branch().nu();
        let mut grad_int = 0.0;
        let mut strip_int = 0.0;
        let mut records = Vec::new();
        let mut snapshots = Vec::new();
        let mut sample = |s: &FlowState, g: f64, st: f64, records: &mut Vec<DiagnosticsRecord>| {
            let mut rec = DiagnosticsRecord::of_state(s, nu * g, nu * st);
            for p in probes.iter_mut() {
                p.sample(s, &mut rec)?;
            }
            records.push(rec);
            if keep_snapshots {
                snapshots.push(s.clone());
            }
            Ok::<(), Error>(())
        };
        sample(&state, 0.0, 0.0, &mut records)?;
        let mut s = state;
        for i in 1..=steps {
            let (mut next, inc) = self.step(&s)?;
            next.t = t0 + i as f64 * self.dt();
            grad_int += inc.grad;
            strip_int += inc.strip;
            s = next;
            if i % ctrl.record_every == 0 || i == steps {
                sample(&s, grad_int, strip_int, &mut records)?;
            }
        }
        Ok(Trajectory {
            branch: self.branch(),
            dt: self.dt(),
            records,
            snapshots,
            final_state: s,
            steps,
            wall_time: start.elapsed(),
            strip: self.strip(),
            grad_time_integral: grad_int,
            strip_time_integral: strip_int,
        })
    }
}
