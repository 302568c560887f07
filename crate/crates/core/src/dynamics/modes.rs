//! Per-Fourier-mode linear structure of each branch.
//!
//! Mode `k` carries the Chebyshev coefficients of the transported scalar (`q`, or
//! `omega` when `alpha = 0`). The mean mode also carries the x-averaged streamwise
//! momentum `m`, which fixes the wall value of the stream function.
//!
//! Every branch is written as `d/dt (M x) = A x + P N` subject to `C x = 0`, where
//! `N = -u . grad q` holds the transported scalar's nonlinear term.

use nalgebra::{DMatrix, DVector, Dyn, RowDVector, LU};

use super::branch::{BranchKind, ModelBranch};
use crate::error::{Error, Result};
use crate::spectral::field::cheb_derivative;
use crate::spectral::ultraspherical::{convert_chain, curvature_row, diff, slope_row, value_row};
use crate::spectral::ModeSolver;

/// `D^2 - k^2` acting on `T` coefficients.
pub(crate) fn laplacian_matrix(k: f64, n: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n + 1, n + 1);
    let mut e = vec![0.0; n + 1];
    for j in 0..=n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let d2 = cheb_derivative(&cheb_derivative(&e));
        for i in 0..=n {
            l[(i, j)] = d2[i];
        }
        l[(j, j)] -= k * k;
    }
    l
}

fn row(v: Vec<f64>) -> RowDVector<f64> {
    RowDVector::from_vec(v)
}

/// `m(psi) = -psi(1) + psi(-1) + alpha^2 (psi''(1) - psi''(-1))`, the mean momentum of a mean-mode stream function.
pub(crate) fn momentum_row(alpha: f64, n: usize) -> RowDVector<f64> {
    let a2 = alpha * alpha;
    let mut r = row(value_row(n, false)) - row(value_row(n, true));
    if a2 > 0.0 {
        r += (row(curvature_row(n, true)) - row(curvature_row(n, false))) * a2;
    }
    r
}

/// What a mode's state vector holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Unknown {
    /// transported scalar, then `m` on the mean mode
    Scalar,
    /// stream function coefficients
    Stream,
}

pub(crate) struct ModeSystem {
    n: usize,
    mean: bool,
    unknown: Unknown,
    /// `[scalar; m] -> psi`
    recover: DMatrix<f64>,
    /// mean mode: momentum of the stream function with `psi = 0` on both walls
    wall_free_momentum: Option<RowDVector<f64>>,
    /// `psi -> omega`, for stream unknowns
    lap: Option<DMatrix<f64>>,
    /// `None` means the identity
    mass: Option<DMatrix<f64>>,
    op: Option<DMatrix<f64>>,
    proj: Option<DMatrix<f64>>,
    constraints: DMatrix<f64>,
}

impl ModeSystem {
    pub fn build(branch: &ModelBranch, k: f64, n: usize, mean: bool) -> Result<Self> {
        let alpha = branch.alpha();
        let nu = branch.nu();
        let raw = n + 1 + mean as usize;
        let (solver, unit_wall) = if alpha > 0.0 {
            let s = ModeSolver::clamped(k, alpha, n)?;
            let g = s.homogeneous(&[1.0, 0.0, 0.0, 0.0]);
            (s, g)
        } else {
            let s = ModeSolver::poisson(k, n)?;
            let g = s.homogeneous(&[1.0, 0.0]);
            (s, g)
        };
        let base = solver.solution_matrix();
        let mut wall_free_momentum = None;
        let recover = if mean {
            let mom = momentum_row(alpha, n);
            let g = DVector::from_vec(unit_wall);
            let mg = (&mom * &g)[0];
            if mg.abs() < 1e-12 {
                return Err(Error::Singular("mean-mode momentum response".into()));
            }
            let w = g / mg;
            wall_free_momentum = Some(&mom * &base);
            let mut p = DMatrix::zeros(n + 1, raw);
            let corrected = &base - &w * (&mom * &base);
            p.view_mut((0, 0), (n + 1, n + 1)).copy_from(&corrected);
            p.set_column(n + 1, &w);
            p
        } else {
            base
        };

        let wall_jump = row(value_row(n, true)) - row(value_row(n, false));
        let mut sys = Self {
            n,
            mean,
            unknown: Unknown::Scalar,
            recover,
            wall_free_momentum,
            lap: None,
            mass: None,
            op: None,
            proj: None,
            constraints: DMatrix::zeros(0, raw),
        };
        if mean {
            let mut p = DMatrix::zeros(raw, n + 1);
            p.view_mut((0, 0), (n + 1, n + 1)).fill_with_identity();
            sys.proj = Some(p);
        }
        match branch.kind() {
            BranchKind::SecondGrade => {
                // A = -(nu / alpha^2)(I - L S); the mean row is d m / dt = -nu [omega]_{-1}^{1}
                let w = laplacian_matrix(k, n) * &sys.recover;
                let mut op = DMatrix::zeros(raw, raw);
                op.view_mut((0, 0), (n + 1, n + 1)).fill_with_identity();
                let top = op.rows(0, n + 1) - &w;
                op.rows_mut(0, n + 1).copy_from(&(top * (-nu / (alpha * alpha))));
                if mean {
                    let r = &wall_jump * &w * (-nu);
                    op.set_row(n + 1, &r);
                }
                sys.op = Some(op);
            }
            BranchKind::NavierStokes => {
                // d/dt L psi = nu L^2 psi + N, L = D^2 - k^2, in C^(4) with clamped walls
                let k2 = k * k;
                let s04 = convert_chain(0, 4, n);
                let s24 = convert_chain(2, 4, n);
                let l4 = &s24 * diff(2, n) - &s04 * k2;
                let ll4 = diff(4, n) - (&s24 * diff(2, n)) * (2.0 * k2) + &s04 * (k2 * k2);
                let keep = n - 3;
                let rows = keep + mean as usize;
                let mut mass = DMatrix::zeros(rows, n + 1);
                let mut op = DMatrix::zeros(rows, n + 1);
                let mut proj = DMatrix::zeros(rows, n + 1);
                mass.rows_mut(0, keep).copy_from(&l4.rows(0, keep));
                op.rows_mut(0, keep).copy_from(&(ll4.rows(0, keep) * nu));
                proj.rows_mut(0, keep).copy_from(&s04.rows(0, keep));
                let mut bc = vec![value_row(n, false), slope_row(n, true), slope_row(n, false)];
                if mean {
                    // d m / dt = -nu [psi'']_{-1}^{1}, m = -psi(1) + psi(-1)
                    mass.set_row(keep, &momentum_row(0.0, n));
                    let curv = row(curvature_row(n, true)) - row(curvature_row(n, false));
                    op.set_row(keep, &(curv * (-nu)));
                } else {
                    bc.insert(0, value_row(n, true));
                }
                let mut c = DMatrix::zeros(bc.len(), n + 1);
                for (i, r) in bc.into_iter().enumerate() {
                    c.set_row(i, &row(r));
                }
                sys.unknown = Unknown::Stream;
                sys.lap = Some(laplacian_matrix(k, n));
                sys.mass = Some(mass);
                sys.op = Some(op);
                sys.proj = Some(proj);
                sys.constraints = c;
            }
            BranchKind::EulerAlpha | BranchKind::Euler => {}
        }
        Ok(sys)
    }

    pub fn is_mean(&self) -> bool {
        self.mean
    }

    /// Length of `[scalar; m]`.
    pub fn raw_dim(&self) -> usize {
        self.n + 1 + self.mean as usize
    }

    pub fn dim(&self) -> usize {
        match self.unknown {
            Unknown::Scalar => self.raw_dim(),
            Unknown::Stream => self.n + 1,
        }
    }

    /// `[scalar; m]` -> state.
    pub fn pack(&self, raw: DMatrix<f64>) -> DMatrix<f64> {
        match self.unknown {
            Unknown::Scalar => raw,
            Unknown::Stream => &self.recover * raw,
        }
    }

    pub fn psi(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self.unknown {
            Unknown::Scalar => &self.recover * x,
            Unknown::Stream => x.clone(),
        }
    }

    /// The transported scalar, `n + 1` rows.
    pub fn scalar(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.lap {
            Some(l) => l * x,
            None => x.rows(0, self.n + 1).into_owned(),
        }
    }

    pub fn momentum(&self, x: &DMatrix<f64>) -> f64 {
        if !self.mean {
            return 0.0;
        }
        match self.unknown {
            Unknown::Scalar => x[(self.n + 1, 0)],
            Unknown::Stream => (momentum_row(0.0, self.n) * x.column(0))[0],
        }
    }

    /// The `m` for which the mean stream function vanishes on both walls; `raw` holds the scalar.
    pub fn wall_free_momentum(&self, raw: &DMatrix<f64>) -> f64 {
        match &self.wall_free_momentum {
            Some(r) => (r * raw.view((0, 0), (self.n + 1, 1)))[0],
            None => 0.0,
        }
    }

    pub fn apply_mass(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.mass {
            Some(m) => m * x,
            None => x.clone(),
        }
    }

    pub fn apply_op(&self, x: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        self.op.as_ref().map(|a| a * x)
    }

    /// Projects the nonlinear term (`n + 1` rows) onto the dynamic rows.
    pub fn apply_proj(&self, nl: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.proj {
            Some(p) => p * nl,
            None => nl.clone(),
        }
    }

    /// `[M - gamma A; C]`, or `None` when that is the identity.
    pub fn factor(&self, gamma: f64) -> Result<Option<Factored>> {
        let op = self.op.as_ref().filter(|_| gamma != 0.0);
        if self.mass.is_none() && op.is_none() && self.constraints.nrows() == 0 {
            return Ok(None);
        }
        let dim = self.dim();
        let mut top = match &self.mass {
            Some(m) => m.clone(),
            None => DMatrix::identity(dim, dim),
        };
        if let Some(a) = op {
            top -= a * gamma;
        }
        let nc = self.constraints.nrows();
        let mut full = DMatrix::zeros(dim, dim);
        full.rows_mut(0, dim - nc).copy_from(&top);
        full.rows_mut(dim - nc, nc).copy_from(&self.constraints);
        Factored::new(full, dim - nc).map(Some)
    }
}

/// An equilibrated LU of a mode's stage matrix.
pub(crate) struct Factored {
    lu: LU<f64, Dyn, Dyn>,
    scale: Vec<f64>,
    dynamic_rows: usize,
}

impl Factored {
    fn new(mut a: DMatrix<f64>, dynamic_rows: usize) -> Result<Self> {
        let scale: Vec<f64> = (0..a.nrows())
            .map(|i| {
                let m = a.row(i).amax();
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            })
            .collect();
        for (i, s) in scale.iter().enumerate() {
            a.row_mut(i).scale_mut(*s);
        }
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular("mode stage matrix".into()));
        }
        Ok(Self {
            lu,
            scale,
            dynamic_rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    /// Solves with `rhs` on the dynamic rows and zeros on the constraint rows.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        let dim = self.scale.len();
        let mut b = DMatrix::zeros(dim, rhs.ncols());
        for i in 0..self.dynamic_rows {
            for c in 0..rhs.ncols() {
                b[(i, c)] = rhs[(i, c)] * self.scale[i];
            }
        }
        self.lu.solve(&b).expect("factor checked invertible")
    }
}
