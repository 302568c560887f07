//! Time integration of the four model branches in (potential) vorticity form.

mod branch;
pub(crate) mod modes;
mod run;
mod state;
mod stepper;

pub use branch::{BranchKind, ModelBranch};
pub use run::{run, run_with, Probe, ReferenceProbe, RunOptions, Trajectory};
pub use state::{mean_momentum, recover_velocity, FlowState, Recovery};
pub use stepper::{cfl_number, step_euler, step_navier_stokes, step_second_grade, Integrator, StepControl, StepIntegrals};
