//! Independent oracles for the solvers.
//!
//! Everything here is deliberately built on a different discretization from the
//! library: nodal Chebyshev collocation with Trefethen's differentiation matrix,
//! dense matrix exponentials, and closed forms.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{run, ModelBranch, StepControl};
use crate::error::Result;
use crate::fields::VelocityField;
use crate::spectral::{
    solve_clamped_second_grade, solve_poisson_dirichlet, ChannelGrid, SpectralScalarField,
};

/// Lobatto nodes `cos(pi j / n)` and the collocation differentiation matrix.
pub fn cheb_matrix(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c = |i: usize| -> f64 {
        let e = if i == 0 || i == n { 2.0 } else { 1.0 };
        if i % 2 == 0 {
            e
        } else {
            -e
        }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    (x, d)
}

fn interior(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() - 1;
    m.view((1, 1), (n - 1, n - 1)).into_owned()
}

/// `(D^2 - k^2) phi = f`, `phi(+-1) = 0`, by nodal collocation. Returns `(nodes, phi)`.
pub fn poisson_collocation(k: f64, n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let (x, d) = cheb_matrix(n);
    let d2 = &d * &d;
    let a = interior(&d2) - DMatrix::identity(n - 1, n - 1) * (k * k);
    let b = DVector::from_iterator(n - 1, x[1..n].iter().map(|&y| f(y)));
    let sol = a.lu().solve(&b).expect("collocation Poisson matrix is regular");
    let mut phi = vec![0.0; n + 1];
    phi[1..n].copy_from_slice(sol.as_slice());
    (x, phi)
}

/// `(1 - alpha^2 L) L psi = f`, `L = D^2 - k^2`, clamped walls, by collocation of
/// `psi = (1 - y^2) phi` with `phi(+-1) = 0`.
pub fn clamped_collocation(k: f64, alpha: f64, n: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let (x, d) = cheb_matrix(n);
    let d2 = &d * &d;
    let d3 = &d2 * &d;
    let d4 = &d3 * &d;
    let s = DMatrix::from_diagonal(&DVector::from_iterator(n + 1, x.iter().map(|y| 1.0 - y * y)));
    let yd = DMatrix::from_diagonal(&DVector::from_vec(x.clone()));
    let id = DMatrix::identity(n + 1, n + 1);
    // psi'''' = (1-y^2) phi'''' - 8 y phi''' - 12 phi'', psi'' = (1-y^2) phi'' - 4 y phi' - 2 phi
    let p4 = &s * &d4 - (&yd * &d3) * 8.0 - &d2 * 12.0;
    let p2 = &s * &d2 - (&yd * &d) * 4.0 - &id * 2.0;
    let p0 = s;
    let (a2, k2) = (alpha * alpha, k * k);
    let op = p4 * (-a2) + p2 * (1.0 + 2.0 * a2 * k2) - p0.clone() * (k2 * (1.0 + a2 * k2));
    let b = DVector::from_iterator(n - 1, x[1..n].iter().map(|&y| f(y)));
    let sol = interior(&op).lu().solve(&b).expect("collocation clamped matrix is regular");
    let mut psi = vec![0.0; n + 1];
    for j in 1..n {
        psi[j] = (1.0 - x[j] * x[j]) * sol[j - 1];
    }
    (x, psi)
}

/// Streamwise shear `U(y, t)` under `(1 - alpha^2 D^2) U_t = nu D^2 U`, `U(+-1) = 0`,
/// by nodal collocation and a dense matrix exponential.
pub fn shear_relaxation(alpha: f64, nu: f64, n: usize, u0: impl Fn(f64) -> f64, t: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, d) = cheb_matrix(n);
    let d2 = interior(&(&d * &d));
    let m = DMatrix::identity(n - 1, n - 1) - &d2 * (alpha * alpha);
    let a = m.lu().solve(&(d2 * nu)).expect("mass matrix is regular");
    let e = (a * t).exp();
    let v0 = DVector::from_iterator(n - 1, x[1..n].iter().map(|&y| u0(y)));
    let v = e * v0;
    let mut u = vec![0.0; n + 1];
    u[1..n].copy_from_slice(v.as_slice());
    (x, u)
}

/// The decaying no-slip shear `cos(pi y / 2) exp(-nu pi^2 t / 4)` of the Navier–Stokes equations.
pub fn decaying_shear(y: f64, t: f64, nu: f64) -> f64 {
    (PI * y / 2.0).cos() * (-nu * PI * PI * t / 4.0).exp()
}

fn cheb_eval(a: &[f64], y: f64) -> f64 {
    crate::spectral::quadrature::chebyshev_values(a.len() - 1, y)
        .iter()
        .zip(a)
        .map(|(t, a)| t * a)
        .sum()
}

/// Coefficients of `f` by interpolation at the library's nodes (`k = 0` row).
fn profile(n: usize, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    let g = ChannelGrid::with_default_period(4, n)?;
    let field = SpectralScalarField::from_fn(&g, |_, y| f(y));
    Ok(field.coeffs().row(0).iter().map(|c| c.re).collect())
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub error: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_finite() && self.error <= self.tolerance
    }
}

/// Max over the manufactured cases of `|psi - (1 - y^2)^2|` for the clamped solve at `ny = 48`.
pub fn check_clamped() -> Result<f64> {
    let n = 48;
    let mut worst = 0.0f64;
    for (k, alpha) in [(0.0, 0.5), (1.0, 0.1), (3.0, 0.02), (0.5, 1.0)] {
        let (a2, k2) = (alpha * alpha, k * k);
        let rhs = |y: f64| {
            let y2 = y * y;
            -24.0 * a2 + (1.0 + 2.0 * a2 * k2) * (12.0 * y2 - 4.0) - k2 * (1.0 + a2 * k2) * (1.0 - y2).powi(2)
        };
        let psi = solve_clamped_second_grade(k, alpha, &profile(n, rhs)?)?;
        let (x, nodal) = clamped_collocation(k, alpha, n, rhs);
        for (y, v) in x.iter().zip(&nodal) {
            let exact = (1.0 - y * y).powi(2);
            worst = worst.max((cheb_eval(&psi, *y) - exact).abs()).max((v - exact).abs());
        }
    }
    Ok(worst)
}

/// `|phi - cos(pi y / 2)|` for the Dirichlet Poisson solve.
pub fn check_poisson() -> Result<f64> {
    let n = 32;
    let mut worst = 0.0f64;
    for k in [0.0, 1.0, 4.0] {
        let rhs = |y: f64| -(PI * PI / 4.0 + k * k) * (PI * y / 2.0).cos();
        let phi = solve_poisson_dirichlet(k, &profile(n, rhs)?)?;
        let (x, nodal) = poisson_collocation(k, n, rhs);
        for (y, v) in x.iter().zip(&nodal) {
            let exact = (PI * y / 2.0).cos();
            worst = worst.max((cheb_eval(&phi, *y) - exact).abs()).max((v - exact).abs());
        }
    }
    Ok(worst)
}

fn shear_field(grid: &std::sync::Arc<ChannelGrid>, f: impl Fn(f64) -> f64) -> Result<VelocityField> {
    VelocityField::new(SpectralScalarField::from_fn(grid, |_, y| f(y)), SpectralScalarField::zeros(grid))
}

fn u1_profile_error(u: &VelocityField, x: &[f64], reference: &[f64]) -> f64 {
    x.iter()
        .zip(reference)
        .map(|(y, r)| (u.u1.eval(0.0, *y) - r).abs())
        .fold(0.0, f64::max)
}

/// Second-grade relaxation of a shear against the matrix-exponential oracle at `t = 0.1`.
pub fn check_relaxation() -> Result<f64> {
    let (alpha, nu, n) = (0.2, 0.05, 32);
    let u0 = |y: f64| (1.0 - y * y) * (1.0 + 0.5 * y + 0.25 * (3.0 * y).sin());
    let grid = ChannelGrid::with_default_period(4, n)?;
    let ctrl = StepControl {
        dt: 1e-4,
        t_end: 0.1,
        cfl_target: 1.0,
        record_every: usize::MAX,
    };
    let tr = run(&shear_field(&grid, u0)?, ModelBranch::classify(alpha, nu)?, &ctrl, &mut [])?;
    let (x, reference) = shear_relaxation(alpha, nu, n, u0, 0.1);
    Ok(u1_profile_error(&tr.final_state.u, &x, &reference))
}

/// Navier–Stokes decaying shear at `t = 1`, `nu = 0.1`, `dt = 1e-3`.
pub fn check_decaying_shear() -> Result<f64> {
    let nu = 0.1;
    let grid = ChannelGrid::with_default_period(4, 32)?;
    let ctrl = StepControl {
        dt: 1e-3,
        t_end: 1.0,
        cfl_target: 1.0,
        record_every: usize::MAX,
    };
    let tr = run(
        &shear_field(&grid, |y| decaying_shear(y, 0.0, nu))?,
        ModelBranch::classify(0.0, nu)?,
        &ctrl,
        &mut [],
    )?;
    let x: Vec<f64> = (0..=64).map(|j| -1.0 + j as f64 / 32.0).collect();
    let exact: Vec<f64> = x.iter().map(|&y| decaying_shear(y, 1.0, nu)).collect();
    Ok(u1_profile_error(&tr.final_state.u, &x, &exact))
}

/// Runs every oracle comparison.
pub fn oracle_suite() -> Vec<OracleOutcome> {
    let cases: [(&'static str, f64, fn() -> Result<f64>); 4] = [
        ("clamped fourth-order solve vs (1-y^2)^2", 1e-9, check_clamped),
        ("Poisson-Dirichlet solve vs cos(pi y/2)", 1e-11, check_poisson),
        ("second-grade shear relaxation vs matrix exponential", 1e-8, check_relaxation),
        ("Navier-Stokes decaying shear", 1e-6, check_decaying_shear),
    ];
    cases
        .into_iter()
        .map(|(name, tolerance, f)| {
            let start = Instant::now();
            let error = f().unwrap_or(f64::NAN);
            OracleOutcome {
                name,
                error,
                tolerance,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}
