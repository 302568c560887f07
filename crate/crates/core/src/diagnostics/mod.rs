//! Energy balance, q-bounds, Kato strip functionals, the boundary corrector and
//! the functional-inequality bench.

mod balance;
mod bench;
mod corrector;
mod record;

pub use balance::{
    energy_balance_residual, energy_balance_residual_with, kato_functional, q_bound_check,
    strip_width, DissipationConvention, StripRule,
};
pub use bench::{
    inequality_bench, no_slip_corpus, strip_poincare_ratios, BenchReport, InequalityKind, InequalityResult, TensorQuadrature,
    CURL_GRADIENT, INTERPOLATION, LADYZHENSKAYA, POINCARE_WIDTHS, STRIP_POINCARE, THIRD_ORDER,
    TRILINEAR,
};
pub use corrector::{
    build_corrector, corrector_scaling_fit, Corrector, CorrectorScaling, CorrectorSpec,
    CutoffProfile, MIN_STRIP_NODES, MIN_WIDTH_SPAN,
};
pub use record::{energy_alpha, DiagnosticsRecord};
