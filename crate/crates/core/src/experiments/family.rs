use std::sync::Arc;

use crate::diagnostics::{Corrector, CorrectorSpec, CutoffProfile, MIN_STRIP_NODES};
use crate::error::{Error, Result};
use crate::fields::{velocity_from_stream, VelocityField};
use crate::spectral::{ChannelGrid, SpectralScalarField};

/// Named initial conditions for the Euler limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseFlow {
    /// `u = 0`
    Rest,
    /// `psi = (1 - y^2) / 2`, velocity `(y, 0)`: a steady Euler flow with unit wall slip
    Shear,
    /// shear plus `amplitude (1 - y^2)^2 cos(2 pi x / lx)`
    PerturbedShear { amplitude: f64 },
}

pub const DEFAULT_PERTURBATION: f64 = 0.05;

impl BaseFlow {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Rest => "rest",
            Self::Shear => "shear",
            Self::PerturbedShear { .. } => "perturbed-shear",
        }
    }

    pub fn from_name(name: &str, amplitude: Option<f64>) -> Option<Self> {
        match name {
            "rest" => Some(Self::Rest),
            "shear" => Some(Self::Shear),
            "perturbed-shear" => Some(Self::PerturbedShear {
                amplitude: amplitude.unwrap_or(DEFAULT_PERTURBATION),
            }),
            _ => None,
        }
    }

    /// Whether the Euler evolution is known in closed form (steady).
    pub fn is_steady(&self) -> bool {
        matches!(self, Self::Rest | Self::Shear)
    }

    /// Stream function, zero on both walls.
    pub fn stream(&self, grid: &Arc<ChannelGrid>) -> SpectralScalarField {
        if let Self::Rest = self {
            return SpectralScalarField::zeros(grid);
        }
        // (1 - y^2) / 2 = T0 / 4 - T2 / 4
        let mut psi = SpectralScalarField::from_profile(grid, &[0.25, 0.0, -0.25]);
        if let Self::PerturbedShear { amplitude } = *self {
            // (1 - y^2)^2 = 3/8 T0 - 1/2 T2 + 1/8 T4 on the first Fourier mode
            let c = 0.5 * amplitude;
            let m = &mut psi.coeffs_mut();
            for (n, v) in [(0, 0.375), (2, -0.5), (4, 0.125)] {
                m[[1, n]].re += c * v;
            }
        }
        psi
    }

    pub fn velocity(&self, grid: &Arc<ChannelGrid>) -> VelocityField {
        velocity_from_stream(&self.stream(grid))
    }
}

/// Profile of the collar cutoff in the suitable family.
pub const FAMILY_PROFILE: CutoffProfile = CutoffProfile::C4;

/// `u0^alpha = grad-perp((1 - z) psi0)`, `z` the cutoff of width `alpha`.
///
/// The result vanishes on the walls and converges to `grad-perp psi0` as `alpha -> 0`.
pub fn suitable_family(u0_stream: &SpectralScalarField, alpha: f64) -> Result<VelocityField> {
    let grid = u0_stream.grid();
    let scale = u0_stream.max_coeff();
    let wall = [1.0, -1.0]
        .iter()
        .map(|&y| u0_stream.eval_mode(0, y).norm())
        .fold(0.0, f64::max);
    if wall > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter(format!(
            "base stream must vanish on the walls, found {wall:.3e}"
        )));
    }
    let inside = grid.y_nodes().iter().filter(|&&y| y > 1.0 - alpha).count();
    if inside < MIN_STRIP_NODES {
        return Err(Error::Unresolved(format!(
            "collar of width {alpha} holds {inside} nodes on ny = {}",
            grid.ny()
        )));
    }
    let spec = CorrectorSpec::new(alpha, FAMILY_PROFILE)?;
    let ub = Corrector::new(u0_stream, spec)?.interpolate()?;
    let mut u = velocity_from_stream(u0_stream).sub(&ub)?;
    u.source_stream = None;
    Ok(u)
}

/// The three quantities whose limits define a suitable family.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InitialDataTerms {
    /// `||u0^alpha - u0||`
    pub l2_gap: f64,
    /// `alpha^2 ||grad u0^alpha||^2`
    pub grad_term: f64,
    /// `alpha^3 ||u0^alpha||_3`
    pub h3_term: f64,
}

pub fn initial_data_terms(u0_alpha: &VelocityField, u0: &VelocityField, alpha: f64) -> Result<InitialDataTerms> {
    let n = u0_alpha.norms();
    Ok(InitialDataTerms {
        l2_gap: u0_alpha.sub(u0)?.l2_sq().sqrt(),
        grad_term: alpha * alpha * n.h1_semi * n.h1_semi,
        h3_term: alpha.powi(3) * n.h3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_streams() {
        let g = ChannelGrid::with_default_period(8, 16).unwrap();
        let s = BaseFlow::Shear.velocity(&g);
        assert!((s.u1.eval(0.3, 0.7) - 0.7).abs() < 1e-14);
        let p = BaseFlow::PerturbedShear { amplitude: 0.1 };
        let psi = p.stream(&g);
        let (x, y) = (0.9f64, 0.35f64);
        let expect = 0.5 * (1.0 - y * y) + 0.1 * (1.0 - y * y).powi(2) * x.cos();
        assert!((psi.eval(x, y) - expect).abs() < 1e-14);
        assert!(p.velocity(&g).wall_normal_max() < 1e-14);
        for b in [BaseFlow::Rest, BaseFlow::Shear, p] {
            assert_eq!(BaseFlow::from_name(b.name(), Some(0.1)), Some(b));
        }
    }
}
