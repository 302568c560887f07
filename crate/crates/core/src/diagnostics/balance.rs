use crate::dynamics::{BranchKind, Trajectory};
use crate::error::{Error, Result};
use crate::fields::StripSpec;

/// Factor in front of `nu int ||grad u||^2` in the energy balance.
///
/// `Standard` is the one the discrete dynamics satisfy,
/// `E(t) + 2 nu int_0^t ||grad u||^2 = E(0)`. `Printed` drops the 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DissipationConvention {
    #[default]
    Standard,
    Printed,
}

impl DissipationConvention {
    pub fn factor(self) -> f64 {
        match self {
            Self::Standard => 2.0,
            Self::Printed => 1.0,
        }
    }
}

/// Worst relative defect of `E_alpha(t) + 2 cum_dissipation(t) = E_alpha(0)` over the samples.
pub fn energy_balance_residual(traj: &Trajectory) -> Result<f64> {
    energy_balance_residual_with(traj, DissipationConvention::Standard)
}

pub fn energy_balance_residual_with(traj: &Trajectory, conv: DissipationConvention) -> Result<f64> {
    let r = &traj.records;
    if r.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "energy balance needs 2 samples, trajectory has {}",
            r.len()
        )));
    }
    let e0 = r[0].energy_alpha;
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let c = conv.factor();
    Ok(r
        .iter()
        .map(|s| (s.energy_alpha + c * s.cum_dissipation - e0).abs() / scale)
        .fold(0.0, f64::max))
}

/// Smallest margin of `||q||^2 <= exp(-nu t / (2 alpha^2)) ||q0||^2 + e0 / (2 alpha^2)`.
pub fn q_bound_check(traj: &Trajectory, alpha: f64, nu: f64, q0_norm_sq: f64, e0: f64) -> Result<f64> {
    match traj.branch.kind() {
        BranchKind::SecondGrade | BranchKind::EulerAlpha => {}
        k => return Err(Error::WrongBranch(format!("q bound needs alpha > 0, trajectory is {k}"))),
    }
    if !(alpha > 0.0) || !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}, nu = {nu}")));
    }
    if traj.records.is_empty() {
        return Err(Error::InsufficientData("empty trajectory".into()));
    }
    let a2 = alpha * alpha;
    Ok(traj
        .records
        .iter()
        .map(|s| (-0.5 * nu / a2 * s.t).exp() * q0_norm_sq + e0 / (2.0 * a2) - s.q_norm_sq)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripRule {
    /// `delta = c alpha^3 / nu^{3/2}`
    AlphaCubed,
    /// `delta = c nu`
    NuLinear,
}

impl StripRule {
    pub fn name(self) -> &'static str {
        match self {
            Self::AlphaCubed => "alpha-cubed",
            Self::NuLinear => "nu-linear",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "alpha-cubed" => Some(Self::AlphaCubed),
            "nu-linear" => Some(Self::NuLinear),
            _ => None,
        }
    }
}

/// Strip width for a point `(alpha, nu)`; refuses strips as wide as the half channel.
pub fn strip_width(rule: StripRule, alpha: f64, nu: f64, c: f64) -> Result<f64> {
    let pos = |v: f64| v > 0.0 && v.is_finite();
    if !pos(nu) || !pos(c) || (rule == StripRule::AlphaCubed && !pos(alpha)) {
        return Err(Error::InvalidParameter(format!(
            "strip rule needs positive parameters, got alpha = {alpha}, nu = {nu}, c = {c}"
        )));
    }
    let delta = match rule {
        StripRule::AlphaCubed => c * alpha.powi(3) / nu.powf(1.5),
        StripRule::NuLinear => c * nu,
    };
    if delta >= 1.0 {
        return Err(Error::ConfigInvalid(format!(
            "{} strip width {delta} reaches the channel centre",
            rule.name()
        )));
    }
    Ok(delta)
}

/// `nu int_0^T int_strip |grad u|^2`, from the strip integral carried by the run.
pub fn kato_functional(traj: &Trajectory, nu: f64, strip: &StripSpec) -> Result<f64> {
    match traj.strip {
        Some(s) if s == *strip => Ok(nu * traj.strip_time_integral),
        Some(s) => Err(Error::InsufficientData(format!(
            "trajectory integrated a strip of width {}, not {}",
            s.delta(),
            strip.delta()
        ))),
        None => Err(Error::InsufficientData("trajectory carries no strip integral".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_rules() {
        let d = strip_width(StripRule::AlphaCubed, 0.01, 0.001, 1.0).unwrap();
        let expect = 1e-6 / 1e-3f64.powf(1.5);
        assert!((d - expect).abs() < 1e-15);
        assert!((d - 0.031623).abs() < 1e-6);
        assert_eq!(strip_width(StripRule::NuLinear, 0.5, 0.02, 1.0).unwrap(), 0.02);
        // nu = alpha^2 makes the width equal to c
        let d = strip_width(StripRule::AlphaCubed, 0.1, 0.01, 0.5).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!(strip_width(StripRule::AlphaCubed, 0.1, 0.01, 1.0).is_err());
        assert!(strip_width(StripRule::NuLinear, 0.1, 1.5, 1.0).is_err());
        assert!(strip_width(StripRule::NuLinear, 0.1, -0.1, 1.0).is_err());
        assert!(strip_width(StripRule::AlphaCubed, 0.0, 0.1, 1.0).is_err());
        for r in [StripRule::AlphaCubed, StripRule::NuLinear] {
            assert_eq!(StripRule::from_name(r.name()), Some(r));
        }
    }

    #[test]
    fn conventions() {
        assert_eq!(DissipationConvention::default().factor(), 2.0);
        assert_eq!(DissipationConvention::Printed.factor(), 1.0);
    }
}
