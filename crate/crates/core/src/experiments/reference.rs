use std::sync::Arc;

use super::family::BaseFlow;
use crate::dynamics::{run_with, FlowState, ModelBranch, RunOptions, StepControl};
use crate::error::{Error, Result};
use crate::fields::VelocityField;
use crate::spectral::ChannelGrid;

/// The Euler solution `u_bar(t)` that sweeps measure against.
#[derive(Clone, Debug)]
pub enum Reference {
    /// Closed-form steady flow.
    Steady(BaseFlow),
    /// Euler run on a doubled grid with half the step, sampled at the sweep's record times.
    Numerical {
        samples: Vec<FlowState>,
        /// largest `||u_1x - u_2x||` over the samples
        self_convergence: f64,
    },
}

impl Reference {
    /// `u_bar(t)` on `grid`.
    pub fn velocity(&self, t: f64, grid: &Arc<ChannelGrid>) -> Result<VelocityField> {
        match self {
            Self::Steady(b) => Ok(b.velocity(grid)),
            Self::Numerical { samples, .. } => {
                let tol = 1e-9 * t.abs().max(1.0);
                let s = samples
                    .iter()
                    .find(|s| (s.t - t).abs() <= tol)
                    .ok_or_else(|| Error::ReferenceRejected(format!("no reference sample at t = {t}")))?;
                s.u.resample(grid)
            }
        }
    }

    pub fn self_convergence(&self) -> f64 {
        match self {
            Self::Steady(_) => 0.0,
            Self::Numerical { self_convergence, .. } => *self_convergence,
        }
    }

    /// Sample times available; `None` means any time.
    pub fn times(&self) -> Option<Vec<f64>> {
        match self {
            Self::Steady(_) => None,
            Self::Numerical { samples, .. } => Some(samples.iter().map(|s| s.t).collect()),
        }
    }
}

/// Euler reference for a base flow.
///
/// Steady flows cost nothing. Otherwise the flow is run on `(nx, ny)` with `ctrl.dt` and on
/// `(2 nx, 2 ny)` with half the step; the finer run is returned together with the largest
/// difference between the two.
pub fn reference_solution(base: BaseFlow, nx: usize, ny: usize, lx: f64, ctrl: &StepControl) -> Result<Reference> {
    if base.is_steady() {
        return Ok(Reference::Steady(base));
    }
    let euler = ModelBranch::classify(0.0, 0.0)?;
    let opts = RunOptions {
        strip: None,
        keep_snapshots: true,
    };
    let coarse_grid = ChannelGrid::new(nx, ny, lx)?;
    let fine_grid = ChannelGrid::new(2 * nx, 2 * ny, lx)?;
    let coarse = run_with(&base.velocity(&coarse_grid), euler, ctrl, opts, &mut [])?;
    let fine_ctrl = StepControl {
        dt: 0.5 * ctrl.step_size(),
        record_every: 2 * ctrl.record_every,
        ..*ctrl
    };
    let fine = run_with(&base.velocity(&fine_grid), euler, &fine_ctrl, opts, &mut [])?;
    if coarse.snapshots.len() != fine.snapshots.len() {
        return Err(Error::ReferenceRejected("sample times of the two runs differ".into()));
    }
    let mut gap = 0.0f64;
    for (a, b) in coarse.snapshots.iter().zip(&fine.snapshots) {
        let d = b.u.sub(&a.u.resample(&fine_grid)?)?.l2_sq().sqrt();
        gap = gap.max(d);
    }
    Ok(Reference::Numerical {
        samples: fine.snapshots,
        self_convergence: gap,
    })
}
