//! Scalar fields stored as Fourier(x) x Chebyshev(y) coefficients.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64;

use super::grid::{ChannelGrid, Resolution};
use crate::error::{Error, Result};

/// A real scalar field on the channel.
///
/// `coeffs[[k, n]]` multiplies `exp(i 2 pi k x / lx) T_n(y)`; only `k = 0 ..= nx/2`
/// is stored, the negative modes being the complex conjugates.
#[derive(Clone, Debug)]
pub struct SpectralScalarField {
    grid: Arc<ChannelGrid>,
    coeffs: Array2<Complex64>,
}

impl PartialEq for SpectralScalarField {
    fn eq(&self, other: &Self) -> bool {
        *self.grid == *other.grid && self.coeffs == other.coeffs
    }
}

impl SpectralScalarField {
    pub fn zeros(grid: &Arc<ChannelGrid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: Array2::zeros((grid.nk(), grid.ny() + 1)),
        }
    }

    pub fn from_coeffs(grid: &Arc<ChannelGrid>, coeffs: Array2<Complex64>) -> Result<Self> {
        let expected = (grid.nk(), grid.ny() + 1);
        if coeffs.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!("{expected:?}"),
                got: format!("{:?}", coeffs.dim()),
            });
        }
        let mut f = Self {
            grid: grid.clone(),
            coeffs,
        };
        f.enforce_real();
        Ok(f)
    }

    /// `transform_forward`: nodal values `(nx, ny + 1)` -> coefficients.
    pub fn from_nodal(grid: &Arc<ChannelGrid>, values: &Array2<f64>) -> Result<Self> {
        let coeffs = grid.from_nodal(values.view(), Resolution::Native)?;
        let mut f = Self {
            grid: grid.clone(),
            coeffs,
        };
        f.enforce_real();
        Ok(f)
    }

    /// Sample `f(x, y)` on the collocation grid and transform.
    pub fn from_fn(grid: &Arc<ChannelGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn((grid.nx(), grid.ny() + 1), |(i, j)| {
            f(grid.x_nodes()[i], grid.y_nodes()[j])
        });
        Self::from_nodal(grid, &values).expect("shape built from grid")
    }

    /// A `k = 0` field from a Chebyshev series in `y`.
    pub fn from_profile(grid: &Arc<ChannelGrid>, cheb: &[f64]) -> Self {
        let mut f = Self::zeros(grid);
        for (n, &c) in cheb.iter().enumerate().take(grid.ny() + 1) {
            f.coeffs[[0, n]] = Complex64::new(c, 0.0);
        }
        f
    }

    /// `transform_inverse`.
    pub fn to_nodal(&self) -> Array2<f64> {
        self.grid.to_nodal(self.coeffs.view(), Resolution::Native)
    }

    pub fn to_nodal_at(&self, res: Resolution) -> Array2<f64> {
        self.grid.to_nodal(self.coeffs.view(), res)
    }

    pub fn grid(&self) -> &Arc<ChannelGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    /// Chebyshev coefficients of mode `k`.
    pub fn mode(&self, k: usize) -> Array1<Complex64> {
        self.coeffs.row(k).to_owned()
    }

    pub fn set_mode(&mut self, k: usize, v: &[Complex64]) {
        for (n, c) in v.iter().enumerate() {
            self.coeffs[[k, n]] = *c;
        }
    }

    /// Zero imaginary parts where a real field forces them to vanish.
    fn enforce_real(&mut self) {
        let nyq = self.grid.nx() / 2;
        for n in 0..=self.grid.ny() {
            self.coeffs[[0, n]].im = 0.0;
            self.coeffs[[nyq, n]].im = 0.0;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)
    }

    pub fn diff_x(&self) -> Self {
        let mut out = self.clone();
        let nyq = self.grid.nx() / 2;
        for k in 0..self.grid.nk() {
            let ik = Complex64::new(0.0, if k == nyq { 0.0 } else { self.grid.wavenumber(k) });
            out.coeffs.row_mut(k).mapv_inplace(|c| c * ik);
        }
        out
    }

    pub fn diff_y(&self) -> Self {
        let mut out = self.clone();
        let n = self.grid.ny();
        for k in 0..self.grid.nk() {
            let a: Vec<Complex64> = self.coeffs.row(k).to_vec();
            let d = cheb_derivative(&a);
            for m in 0..=n {
                out.coeffs[[k, m]] = d[m];
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.diff_y().diff_y();
        for k in 0..self.grid.nk() {
            let kk = self.grid.wavenumber(k).powi(2);
            let src = self.coeffs.row(k);
            out.coeffs
                .row_mut(k)
                .zip_mut_with(&src, |o, s| *o -= *s * kk);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| c * s);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        Zip::from(&mut self.coeffs)
            .and(&other.coeffs)
            .for_each(|s, o| *s += *o * a);
    }

    /// `int_Omega f g dx`: exact Parseval in x, exact Chebyshev moments in y.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> f64 {
        let g = self.grid.gram();
        let mut total = 0.0;
        for k in 0..self.grid.nk() {
            let a = self.coeffs.row(k);
            let b = other.coeffs.row(k);
            if a.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                continue;
            }
            total += self.grid.mode_weight(k) * quad_form(g, a.as_slice().expect("row"), b.as_slice().expect("row"));
        }
        total * self.grid.lx()
    }

    /// `||f||^2` in L2.
    pub fn norm_sq(&self) -> f64 {
        self.inner_unchecked(self)
    }

    /// Integral of `f g` over the band `lo < y < hi` using a precomputed band Gram matrix.
    pub fn band_inner(&self, other: &Self, gram: &Array2<f64>) -> f64 {
        let mut total = 0.0;
        for k in 0..self.grid.nk() {
            let a = self.coeffs.row(k);
            if a.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                continue;
            }
            let b = other.coeffs.row(k);
            total += self.grid.mode_weight(k) * quad_form(gram, a.as_slice().expect("row"), b.as_slice().expect("row"));
        }
        total * self.grid.lx()
    }

    /// Point evaluation of the spectral expansion.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let nyq = self.grid.nx() / 2;
        let mut s = 0.0;
        for k in 0..self.grid.nk() {
            let row: Vec<Complex64> = self.coeffs.row(k).to_vec();
            let fy = ChannelGrid::eval_series(&row, y);
            let phase = Complex64::from_polar(1.0, self.grid.wavenumber(k) * x);
            let w = if k == 0 || k == nyq { 1.0 } else { 2.0 };
            s += w * (fy * phase).re;
        }
        s
    }

    /// Values of mode `k` along `y` at arbitrary points.
    pub fn eval_mode(&self, k: usize, y: f64) -> Complex64 {
        let row: Vec<Complex64> = self.coeffs.row(k).to_vec();
        ChannelGrid::eval_series(&row, y)
    }

    /// Copy overlapping coefficients onto another grid with the same period.
    pub fn resample(&self, grid: &Arc<ChannelGrid>) -> Result<Self> {
        if grid.lx() != self.grid.lx() {
            return Err(Error::GridMismatch("different periods".into()));
        }
        let mut out = Self::zeros(grid);
        let nk = self.grid.nk().min(grid.nk());
        let nn = self.grid.ny().min(grid.ny()) + 1;
        let src_nyq = self.grid.nx() / 2;
        let dst_nyq = grid.nx() / 2;
        for k in 0..nk {
            if (k == src_nyq || k == dst_nyq) && src_nyq != dst_nyq {
                continue;
            }
            for n in 0..nn {
                out.coeffs[[k, n]] = self.coeffs[[k, n]];
            }
        }
        Ok(out)
    }

    /// Pointwise product evaluated on the 3/2-padded grid, truncated back.
    pub fn dealiased_product(&self, other: &Self) -> Self {
        let a = self.to_nodal_at(Resolution::Dealias);
        let b = other.to_nodal_at(Resolution::Dealias);
        let p = &a * &b;
        let coeffs = self
            .grid
            .from_nodal(p.view(), Resolution::Dealias)
            .expect("padded shape");
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    pub(crate) fn from_padded_nodal(grid: &Arc<ChannelGrid>, values: &Array2<f64>) -> Self {
        let coeffs = grid
            .from_nodal(values.view(), Resolution::Dealias)
            .expect("padded shape");
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }
}

/// `Re sum_{m,n} a_m conj(b_n) G_{mn}`.
pub(crate) fn quad_form(g: &Array2<f64>, a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    let w = g.ncols();
    let gs = g.as_slice().expect("gram matrices are contiguous");
    let (br, bi): (Vec<f64>, Vec<f64>) = b.iter().map(|c| (c.re, c.im)).unzip();
    let mut total = 0.0;
    for (m, am) in a.iter().enumerate() {
        if am.re == 0.0 && am.im == 0.0 {
            continue;
        }
        let row = &gs[m * w..m * w + n];
        let (mut sr, mut si) = (0.0, 0.0);
        for ((g, r), i) in row.iter().zip(&br).zip(&bi) {
            sr += g * r;
            si += g * i;
        }
        total += am.re * sr + am.im * si;
    }
    total
}

/// Chebyshev coefficients of the derivative.
pub fn cheb_derivative<T>(a: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T> + Sub<Output = T>,
{
    let n = a.len() - 1;
    let mut d = vec![T::default(); n + 1];
    if n == 0 {
        return d;
    }
    d[n - 1] = a[n] * (2.0 * n as f64);
    for k in (1..n).rev() {
        let next = if k + 1 <= n { d[k + 1] } else { T::default() };
        d[k - 1] = next + a[k] * (2.0 * k as f64);
    }
    d[0] = d[0] * 0.5;
    d
}

impl Add for &SpectralScalarField {
    type Output = SpectralScalarField;
    fn add(self, rhs: Self) -> SpectralScalarField {
        let mut out = self.clone();
        out.coeffs += &rhs.coeffs;
        out
    }
}

impl Sub for &SpectralScalarField {
    type Output = SpectralScalarField;
    fn sub(self, rhs: Self) -> SpectralScalarField {
        let mut out = self.clone();
        out.coeffs -= &rhs.coeffs;
        out
    }
}

impl Neg for &SpectralScalarField {
    type Output = SpectralScalarField;
    fn neg(self) -> SpectralScalarField {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<ChannelGrid> {
        ChannelGrid::with_default_period(16, 16).unwrap()
    }

    #[test]
    fn constant_transforms_to_single_coefficient() {
        let g = grid();
        let f = SpectralScalarField::from_fn(&g, |_, _| 1.0);
        for ((k, n), c) in f.coeffs().indexed_iter() {
            let expected = if k == 0 && n == 0 { 1.0 } else { 0.0 };
            assert!((c.re - expected).abs() < 1e-15 && c.im.abs() < 1e-15, "{k} {n} {c}");
        }
    }

    #[test]
    fn identity_in_y_is_t1() {
        let g = grid();
        let f = SpectralScalarField::from_fn(&g, |_, y| y);
        for ((k, n), c) in f.coeffs().indexed_iter() {
            let expected = if k == 0 && n == 1 { 1.0 } else { 0.0 };
            assert!((c - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn cos_times_y_squared() {
        let g = grid();
        let f = SpectralScalarField::from_fn(&g, |x, y| (2.0 * PI * x / g.lx()).cos() * y * y);
        for ((k, n), c) in f.coeffs().indexed_iter() {
            // cos = (e^{ix} + e^{-ix}) / 2 and y^2 = (T0 + T2) / 2
            let expected = if k == 1 && (n == 0 || n == 2) { 0.25 } else { 0.0 };
            assert!((c.re - expected).abs() < 1e-15 && c.im.abs() < 1e-15, "{k} {n} {c}");
        }
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let g = grid();
        let v = Array2::zeros((16, 16));
        assert!(matches!(
            SpectralScalarField::from_nodal(&g, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn derivatives_of_simple_fields() {
        let g = grid();
        let c = SpectralScalarField::from_fn(&g, |_, _| 3.0);
        assert!(c.diff_x().max_coeff() < 1e-15);
        let y2 = SpectralScalarField::from_fn(&g, |_, y| y * y);
        let dy = y2.diff_y();
        let expect = SpectralScalarField::from_fn(&g, |_, y| 2.0 * y);
        assert!((&dy - &expect).max_coeff() < 1e-13);
        let s = SpectralScalarField::from_fn(&g, |x, _| (2.0 * PI * x / g.lx()).sin());
        let expect = SpectralScalarField::from_fn(&g, |x, _| (2.0 * PI / g.lx()) * (2.0 * PI * x / g.lx()).cos());
        assert!((&s.diff_x() - &expect).max_coeff() < 1e-13);
    }

    #[test]
    fn inner_products() {
        let g = grid();
        let one = SpectralScalarField::from_fn(&g, |_, _| 1.0);
        assert!((one.inner_product(&one).unwrap() - 4.0 * PI).abs() < 1e-13);
        let y = SpectralScalarField::from_fn(&g, |_, y| y);
        assert!((y.inner_product(&y).unwrap() - 2.0 * PI * 2.0 / 3.0).abs() < 1e-13);
        let s = SpectralScalarField::from_fn(&g, |x, _| x.sin());
        let c = SpectralScalarField::from_fn(&g, |x, _| x.cos());
        assert!(s.inner_product(&c).unwrap().abs() < 1e-14);
        let other = SpectralScalarField::zeros(&ChannelGrid::with_default_period(8, 16).unwrap());
        assert!(one.inner_product(&other).is_err());
    }

    #[test]
    fn point_evaluation_matches_function() {
        let g = grid();
        let f = |x: f64, y: f64| (x).sin() * (1.0 - y * y) + 0.3 * (2.0 * x).cos() * y.powi(3);
        let s = SpectralScalarField::from_fn(&g, f);
        for &(x, y) in &[(0.3, 0.1), (2.0, -0.77), (5.9, 0.999)] {
            assert!((s.eval(x, y) - f(x, y)).abs() < 1e-13);
        }
    }
}
