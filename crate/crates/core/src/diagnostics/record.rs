use crate::dynamics::FlowState;
use crate::fields::VelocityField;

/// One time sample of the quantities the energy and Kato estimates are phrased in.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `||u||^2 + alpha^2 ||grad u||^2`
    pub energy_alpha: f64,
    pub grad_sq: f64,
    pub q_norm_sq: f64,
    /// `nu int_0^t ||grad u||^2`
    pub cum_dissipation: f64,
    /// `nu int_0^t int_strip |grad u|^2`
    pub strip_dissipation: f64,
    pub err_vs_ref_l2: Option<f64>,
}

impl DiagnosticsRecord {
    pub fn of_state(state: &FlowState, cum_dissipation: f64, strip_dissipation: f64) -> Self {
        let alpha = state.branch.alpha();
        let l2 = state.u.l2_sq();
        let grad_sq = state.u.grad_sq();
        Self {
            t: state.t,
            energy_alpha: l2 + alpha * alpha * grad_sq,
            grad_sq,
            q_norm_sq: state.q.norm_sq(),
            cum_dissipation,
            strip_dissipation,
            err_vs_ref_l2: None,
        }
    }
}

/// `||u||^2 + alpha^2 ||grad u||^2`.
pub fn energy_alpha(u: &VelocityField, alpha: f64) -> f64 {
    let n = u.norms();
    n.l2 * n.l2 + alpha * alpha * n.h1_semi * n.h1_semi
}
