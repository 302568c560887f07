use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::branch::ModelBranch;
use super::modes::ModeSystem;
use crate::error::{Error, Result};
use crate::fields::{curl_of, q_from_u, velocity_from_stream, VelocityField};
use crate::spectral::field::cheb_derivative;
use crate::spectral::ultraspherical::integral_row;
use crate::spectral::{ChannelGrid, SpectralScalarField};

/// The evolved state together with the fields recovered from it.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub t: f64,
    /// Potential vorticity, or vorticity when `alpha = 0`.
    pub q: SpectralScalarField,
    /// x-averaged streamwise momentum `int (u1 - alpha^2 Lap u1) dy` per unit length.
    pub m: f64,
    pub psi: SpectralScalarField,
    pub omega: SpectralScalarField,
    pub u: VelocityField,
    pub branch: ModelBranch,
}

impl FlowState {
    pub fn grid(&self) -> &Arc<ChannelGrid> {
        self.q.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.m.is_finite()
    }
}

/// `int (u1 - alpha^2 d_yy u1) dy` of the x-mean of `u1`.
pub fn mean_momentum(u: &VelocityField, alpha: f64) -> f64 {
    let a: Vec<f64> = u.u1.coeffs().row(0).iter().map(|c| c.re).collect();
    let n = a.len() - 1;
    let integral: f64 = integral_row(n).iter().zip(&a).map(|(w, a)| w * a).sum();
    let d = cheb_derivative(&a);
    let top: f64 = d.iter().sum();
    let bottom: f64 = d
        .iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
        .sum();
    integral - alpha * alpha * (top - bottom)
}

/// Velocity recovery for one branch on one grid, with per-mode maps cached.
pub struct Recovery {
    grid: Arc<ChannelGrid>,
    branch: ModelBranch,
    pub(crate) modes: Vec<ModeSystem>,
}

impl Recovery {
    pub fn new(grid: &Arc<ChannelGrid>, branch: ModelBranch) -> Result<Self> {
        let n = grid.ny();
        let modes = (0..grid.nk())
            .into_par_iter()
            .map(|k| ModeSystem::build(&branch, grid.wavenumber(k), n, k == 0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.clone(),
            branch,
            modes,
        })
    }

    pub fn grid(&self) -> &Arc<ChannelGrid> {
        &self.grid
    }

    pub fn branch(&self) -> ModelBranch {
        self.branch
    }

    pub(crate) fn pack(&self, q: &SpectralScalarField, m: f64) -> Vec<DMatrix<f64>> {
        let n = self.grid.ny();
        self.modes
            .iter()
            .enumerate()
            .map(|(k, sys)| {
                let mut x = DMatrix::zeros(sys.raw_dim(), 2);
                for j in 0..=n {
                    let c = q.coeffs()[[k, j]];
                    x[(j, 0)] = c.re;
                    x[(j, 1)] = c.im;
                }
                if sys.is_mean() {
                    x[(n + 1, 0)] = m;
                }
                sys.pack(x)
            })
            .collect()
    }

    fn field_from_rows(&self, rows: &[DMatrix<f64>]) -> SpectralScalarField {
        let n = self.grid.ny();
        let mut f = SpectralScalarField::zeros(&self.grid);
        let c = f.coeffs_mut();
        for (k, x) in rows.iter().enumerate() {
            for j in 0..=n {
                c[[k, j]] = Complex64::new(x[(j, 0)], x[(j, 1)]);
            }
        }
        f
    }

    pub(crate) fn scalar(&self, xs: &[DMatrix<f64>]) -> SpectralScalarField {
        let rows: Vec<DMatrix<f64>> = self
            .modes
            .iter()
            .zip(xs)
            .map(|(sys, x)| sys.scalar(x))
            .collect();
        self.field_from_rows(&rows)
    }

    pub(crate) fn momentum(&self, xs: &[DMatrix<f64>]) -> f64 {
        self.modes[0].momentum(&xs[0])
    }

    pub(crate) fn stream(&self, xs: &[DMatrix<f64>]) -> SpectralScalarField {
        let psi: Vec<DMatrix<f64>> = self
            .modes
            .iter()
            .zip(xs)
            .map(|(sys, x)| sys.psi(x))
            .collect();
        self.field_from_rows(&psi)
    }

    pub(crate) fn state_from_modes(&self, xs: &[DMatrix<f64>], t: f64) -> FlowState {
        let psi = self.stream(xs);
        let u = velocity_from_stream(&psi);
        FlowState {
            t,
            q: self.scalar(xs),
            m: self.momentum(xs),
            omega: psi.laplacian(),
            psi,
            u,
            branch: self.branch,
        }
    }

    /// State from the evolved scalar and mean momentum.
    pub fn state(&self, q: SpectralScalarField, m: f64, t: f64) -> Result<FlowState> {
        self.grid.check_same(q.grid())?;
        if !q.is_finite() || !m.is_finite() {
            return Err(Error::NonFinite(t));
        }
        let xs = self.pack(&q, m);
        Ok(self.state_from_modes(&xs, t))
    }

    /// State from a velocity satisfying the branch's wall conditions.
    pub fn initial_state(&self, u: &VelocityField, t: f64) -> Result<FlowState> {
        self.grid.check_same(u.grid())?;
        let scale = {
            let a = u.u1.to_nodal();
            let b = u.u2.to_nodal();
            a.iter().chain(b.iter()).fold(1.0f64, |m, v| m.max(v.abs()))
        };
        let tol = 1e-8 * scale;
        if self.branch.no_slip() {
            if !u.is_no_slip(tol) {
                return Err(Error::InvalidParameter(format!(
                    "initial velocity is not zero on the walls (max |u| = {:.3e})",
                    u.wall_trace_max()
                )));
            }
        } else if u.wall_normal_max() > tol {
            return Err(Error::InvalidParameter(format!(
                "initial velocity crosses the walls (max |u2| = {:.3e})",
                u.wall_normal_max()
            )));
        }
        let alpha = self.branch.alpha();
        let q = if alpha > 0.0 { q_from_u(u, alpha)? } else { curl_of(u) };
        self.state(q, mean_momentum(u, alpha), t)
    }
}

/// `(psi, omega, u)` from `q` with `psi = 0` on both walls.
pub fn recover_velocity(
    q: &SpectralScalarField,
    branch: &ModelBranch,
) -> Result<(SpectralScalarField, SpectralScalarField, VelocityField)> {
    let r = Recovery::new(q.grid(), *branch)?;
    let n = q.grid().ny();
    let mut raw = DMatrix::zeros(n + 1, 1);
    for j in 0..=n {
        raw[(j, 0)] = q.coeffs()[[0, j]].re;
    }
    let m = r.modes[0].wall_free_momentum(&raw);
    let s = r.state(q.clone(), m, 0.0)?;
    Ok((s.psi, s.omega, s.u))
}
