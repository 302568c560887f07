//! Regime classification, suitable initial data, scaling-path sweeps and rate fits.

mod family;
mod fit;
mod reference;
mod regime;
mod sweep;

pub use family::{
    initial_data_terms, suitable_family, BaseFlow, InitialDataTerms, DEFAULT_PERTURBATION,
    FAMILY_PROFILE,
};
pub use fit::{log_fit, log_slope, LogFit};
pub use reference::{reference_solution, Reference};
pub use regime::{classify_regime, RegimeRegion, CURVE_TOL, REGIME_CURVES};
pub use sweep::{nodes_within, rate_fit, run_sweep, SweepPlan, SweepRow, MAX_NY};
