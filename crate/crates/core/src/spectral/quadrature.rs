//! Quadrature rules on [-1, 1] and Chebyshev Gram matrices.

use ndarray::Array2;
use std::f64::consts::PI;

/// Chebyshev–Gauss–Lobatto points `cos(pi j / n)`, `j = 0..=n`, ordered from 1 down to -1.
///
/// Uses the sine form so that the points are exactly antisymmetric and the
/// endpoints are exactly +-1.
pub fn lobatto_points(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|j| (PI * (nf - 2.0 * j as f64) / (2.0 * nf)).sin())
        .collect()
}

/// Clenshaw–Curtis weights matching [`lobatto_points`].
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
    }
    for (j, wj) in w.iter_mut().enumerate().take(n).skip(1) {
        let theta = PI * j as f64 / nf;
        let mut v = 1.0;
        let half = n / 2;
        if n % 2 == 0 {
            for k in 1..half {
                v -= 2.0 * (2.0 * k as f64 * theta).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            v -= (2.0 * half as f64 * theta).cos() / (4.0 * (half * half) as f64 - 1.0);
        } else {
            for k in 1..=half {
                v -= 2.0 * (2.0 * k as f64 * theta).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
        }
        *wj = 2.0 * v / nf;
    }
    w
}

/// Legendre `P_n(z)` and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on [a, b] with `n >= 2` points.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let xs = x.iter().map(|&t| mid + half * t).collect();
    let ws = w.iter().map(|&t| half * t).collect();
    (xs, ws)
}

/// Values `T_0(y) .. T_n(y)`.
pub fn chebyshev_values(n: usize, y: f64) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    t[0] = 1.0;
    if n >= 1 {
        t[1] = y;
    }
    for k in 2..=n {
        t[k] = 2.0 * y * t[k - 1] - t[k - 2];
    }
    t
}

/// Exact `int_{-1}^{1} T_m T_n dy` for `m, n <= n_max`.
pub fn chebyshev_gram(n_max: usize) -> Array2<f64> {
    let moment = |p: usize| -> f64 {
        if p % 2 == 1 {
            0.0
        } else {
            let pf = p as f64;
            2.0 / (1.0 - pf * pf)
        }
    };
    Array2::from_shape_fn((n_max + 1, n_max + 1), |(m, n)| {
        0.5 * (moment(m + n) + moment(m.abs_diff(n)))
    })
}

/// `int_a^b T_m T_n dy`, exact for all `m, n <= n_max` (Gauss–Legendre on the band).
pub fn chebyshev_band_gram(n_max: usize, a: f64, b: f64) -> Array2<f64> {
    let (xs, ws) = gauss_legendre(n_max + 2, a, b);
    let mut g = Array2::zeros((n_max + 1, n_max + 1));
    for (&x, &w) in xs.iter().zip(&ws) {
        let t = chebyshev_values(n_max, x);
        for m in 0..=n_max {
            let wm = w * t[m];
            for n in m..=n_max {
                g[[m, n]] += wm * t[n];
            }
        }
    }
    for m in 0..=n_max {
        for n in 0..m {
            g[[m, n]] = g[[n, m]];
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobatto_endpoints_and_order() {
        let y = lobatto_points(16);
        assert_eq!(y[0], 1.0);
        assert_eq!(y[16], -1.0);
        assert_eq!(y[8], 0.0);
        assert!(y.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        for n in [8, 9, 16, 33] {
            let y = lobatto_points(n);
            let w = clenshaw_curtis_weights(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14, "n={n} sum={sum}");
            assert!(w.iter().all(|&v| v > 0.0));
            let i4: f64 = y.iter().zip(&w).map(|(y, w)| w * y.powi(4)).sum();
            assert!((i4 - 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_exact_to_degree() {
        let (x, w) = gauss_legendre(5, 0.0, 1.0);
        let i9: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((i9 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn band_gram_adds_up() {
        let n = 12;
        let full = chebyshev_gram(n);
        let lo = chebyshev_band_gram(n, -1.0, 0.3);
        let hi = chebyshev_band_gram(n, 0.3, 1.0);
        for m in 0..=n {
            for k in 0..=n {
                assert!((lo[[m, k]] + hi[[m, k]] - full[[m, k]]).abs() < 1e-13);
            }
        }
    }
}
