//! Per-Fourier-mode boundary-value solvers in `y`.
//!
//! Each solver is a dense bordered system: the operator is written in an
//! ultraspherical basis, its highest-degree rows are replaced by boundary rows,
//! and the result is LU-factored once and reused.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use super::ultraspherical::{convert_chain, diff, slope_row, value_row};
use crate::error::{Error, Result};

/// A factored bordered system for one Fourier mode.
#[derive(Clone)]
pub struct ModeSolver {
    n: usize,
    nbc: usize,
    lu: LU<f64, Dyn, Dyn>,
    rhs_map: DMatrix<f64>,
    row_scale: Vec<f64>,
}

impl std::fmt::Debug for ModeSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeSolver")
            .field("n", &self.n)
            .field("nbc", &self.nbc)
            .finish()
    }
}

impl ModeSolver {
    fn bordered(op: DMatrix<f64>, conv: DMatrix<f64>, bc_rows: &[Vec<f64>]) -> Result<Self> {
        let n = op.nrows() - 1;
        let nbc = bc_rows.len();
        let keep = n + 1 - nbc;
        let mut a = DMatrix::zeros(n + 1, n + 1);
        a.rows_mut(0, keep).copy_from(&op.rows(0, keep));
        for (i, row) in bc_rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a[(keep + i, j)] = *v;
            }
        }
        let row_scale: Vec<f64> = (0..=n)
            .map(|i| {
                let m = a.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            })
            .collect();
        for (i, s) in row_scale.iter().enumerate() {
            a.row_mut(i).scale_mut(*s);
        }
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular("bordered mode system".into()));
        }
        Ok(Self {
            n,
            nbc,
            lu,
            rhs_map: conv.rows(0, keep).into_owned(),
            row_scale,
        })
    }

    /// `(D^2 - k^2 - lambda) phi = f` with Dirichlet rows `[phi(1), phi(-1)]`.
    pub fn helmholtz(k: f64, lambda: f64, n: usize) -> Result<Self> {
        let s = convert_chain(0, 2, n);
        let op = diff(2, n) - &s * (k * k + lambda);
        Self::bordered(op, s, &[value_row(n, true), value_row(n, false)])
    }

    pub fn poisson(k: f64, n: usize) -> Result<Self> {
        Self::helmholtz(k, 0.0, n)
    }

    /// `(1 - alpha^2 L) L psi = q`, `L = D^2 - k^2`, with rows
    /// `[psi(1), psi(-1), psi'(1), psi'(-1)]`.
    pub fn clamped(k: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be > 0 for the clamped solve, got {alpha}"
            )));
        }
        let a2 = alpha * alpha;
        let k2 = k * k;
        let s4 = convert_chain(0, 4, n);
        let s24 = convert_chain(2, 4, n);
        let op = diff(4, n) * (-a2) + (&s24 * diff(2, n)) * (1.0 + 2.0 * a2 * k2)
            - &s4 * (k2 * (1.0 + a2 * k2));
        Self::bordered(
            op,
            s4,
            &[
                value_row(n, true),
                value_row(n, false),
                slope_row(n, true),
                slope_row(n, false),
            ],
        )
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn boundary_count(&self) -> usize {
        self.nbc
    }

    fn assemble(&self, rhs: &[f64], bc: &[f64]) -> DVector<f64> {
        let keep = self.n + 1 - self.nbc;
        let r = &self.rhs_map * DVector::from_column_slice(&rhs[..=self.n]);
        let mut b = DVector::zeros(self.n + 1);
        for i in 0..keep {
            b[i] = r[i] * self.row_scale[i];
        }
        for i in 0..self.nbc {
            b[keep + i] = bc.get(i).copied().unwrap_or(0.0) * self.row_scale[keep + i];
        }
        b
    }

    pub fn solve(&self, rhs: &[f64], bc: &[f64]) -> Vec<f64> {
        let b = self.assemble(rhs, bc);
        self.lu
            .solve(&b)
            .expect("factor checked invertible")
            .as_slice()
            .to_vec()
    }

    /// Real operator applied to the real and imaginary parts separately; `bc` acts on the real part.
    pub fn solve_complex(&self, rhs: &[Complex64], bc: &[f64]) -> Vec<Complex64> {
        let re: Vec<f64> = rhs.iter().map(|c| c.re).collect();
        let im: Vec<f64> = rhs.iter().map(|c| c.im).collect();
        let sr = self.solve(&re, bc);
        let si = if im.iter().all(|v| *v == 0.0) {
            vec![0.0; sr.len()]
        } else {
            self.solve(&im, &[])
        };
        sr.into_iter()
            .zip(si)
            .map(|(r, i)| Complex64::new(r, i))
            .collect()
    }

    /// Dense map rhs -> solution with homogeneous boundary rows.
    pub fn solution_matrix(&self) -> DMatrix<f64> {
        let keep = self.n + 1 - self.nbc;
        let mut b = DMatrix::zeros(self.n + 1, self.n + 1);
        let conv = &self.rhs_map;
        for i in 0..keep {
            for j in 0..=self.n {
                b[(i, j)] = conv[(i, j)] * self.row_scale[i];
            }
        }
        self.lu.solve(&b).expect("factor checked invertible")
    }

    /// Solution with zero right-hand side and the given boundary data.
    pub fn homogeneous(&self, bc: &[f64]) -> Vec<f64> {
        self.solve(&vec![0.0; self.n + 1], bc)
    }
}

fn check_rhs(rhs: &[f64]) -> Result<()> {
    if rhs.len() < 9 {
        return Err(Error::DimensionMismatch {
            expected: "at least 9 Chebyshev coefficients".into(),
            got: rhs.len().to_string(),
        });
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("rhs must be finite".into()));
    }
    Ok(())
}

/// `(D^2 - k^2) phi = rhs`, `phi(+-1) = 0`. Chebyshev coefficients in and out.
pub fn solve_poisson_dirichlet(k: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    check_rhs(rhs)?;
    Ok(ModeSolver::poisson(k, rhs.len() - 1)?.solve(rhs, &[0.0, 0.0]))
}

/// `(1 - alpha^2 (D^2 - k^2)) (D^2 - k^2) psi = rhs` with `psi = psi' = 0` at both walls.
pub fn solve_clamped_second_grade(k: f64, alpha: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    solve_clamped_second_grade_walls(k, alpha, rhs, (0.0, 0.0))
}

/// Clamped solve with prescribed wall values `(psi(1), psi(-1))` and zero wall slopes.
pub fn solve_clamped_second_grade_walls(
    k: f64,
    alpha: f64,
    rhs: &[f64],
    walls: (f64, f64),
) -> Result<Vec<f64>> {
    check_rhs(rhs)?;
    let s = ModeSolver::clamped(k, alpha, rhs.len() - 1)?;
    Ok(s.solve(rhs, &[walls.0, walls.1, 0.0, 0.0]))
}

/// `(D^2 - k^2 - lambda) phi = rhs`, `(phi(1), phi(-1)) = wall_values`.
pub fn solve_helmholtz_influence(
    k: f64,
    lambda: f64,
    rhs: &[f64],
    wall_values: (f64, f64),
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    check_rhs(rhs)?;
    let s = ModeSolver::helmholtz(k, lambda, rhs.len() - 1)?;
    Ok(s.solve(rhs, &[wall_values.0, wall_values.1]))
}
