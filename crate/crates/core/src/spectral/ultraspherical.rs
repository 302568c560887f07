//! Sparse-structured operators of the ultraspherical spectral method, stored densely.
//!
//! Differentiation maps Chebyshev `T` coefficients to `C^(lambda)` coefficients and
//! conversion operators lift between bases, so every operator row lives in one basis.

use nalgebra::DMatrix;

/// `d^lambda / dy^lambda : T -> C^(lambda)`, size `(n + 1) x (n + 1)`.
pub fn diff(lambda: usize, n: usize) -> DMatrix<f64> {
    assert!(lambda >= 1);
    let mut fact = 1.0;
    for i in 1..lambda {
        fact *= i as f64;
    }
    let c = 2f64.powi(lambda as i32 - 1) * fact;
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for j in lambda..=n {
        d[(j - lambda, j)] = c * j as f64;
    }
    d
}

/// Conversion `C^(lambda) -> C^(lambda + 1)`; `lambda = 0` means `T -> C^(1)`.
pub fn convert(lambda: usize, n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n + 1, n + 1);
    if lambda == 0 {
        s[(0, 0)] = 1.0;
        for j in 1..=n {
            s[(j, j)] = 0.5;
        }
        for j in 2..=n {
            s[(j - 2, j)] = -0.5;
        }
    } else {
        let l = lambda as f64;
        for j in 0..=n {
            s[(j, j)] = l / (j as f64 + l);
        }
        for j in 2..=n {
            s[(j - 2, j)] = -l / (j as f64 + l);
        }
    }
    s
}

/// Conversion `C^(from) -> C^(to)` as a product of single steps (`from = 0` is `T`).
pub fn convert_chain(from: usize, to: usize, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n + 1, n + 1);
    for l in from..to {
        m = convert(l, n) * m;
    }
    m
}

/// Row evaluating a `T` series at `y = +-1`.
pub fn value_row(n: usize, at_top: bool) -> Vec<f64> {
    (0..=n)
        .map(|j| if at_top || j % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Row evaluating the first derivative of a `T` series at `y = +-1`.
pub fn slope_row(n: usize, at_top: bool) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let v = (j * j) as f64;
            if at_top || j % 2 == 1 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Row evaluating the second derivative at `y = +-1`: `T_j''(1) = j^2 (j^2 - 1) / 3`.
pub fn curvature_row(n: usize, at_top: bool) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let jf = j as f64;
            let v = jf * jf * (jf * jf - 1.0) / 3.0;
            if at_top || j % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Row integrating a `T` series over `[-1, 1]`.
pub fn integral_row(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            if j % 2 == 1 {
                0.0
            } else {
                let jf = j as f64;
                2.0 / (1.0 - jf * jf)
            }
        })
        .collect()
}
