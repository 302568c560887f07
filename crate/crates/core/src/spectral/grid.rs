//! The periodic channel `[0, lx) x [-1, 1]` and its Fourier x Chebyshev transforms.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::quadrature::{chebyshev_gram, clenshaw_curtis_weights, lobatto_points};
use crate::error::{Error, Result};

/// Which nodal resolution a transform targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// The collocation grid itself, `nx x (ny + 1)`.
    Native,
    /// 3/2-padded grid for quadratic products.
    Dealias,
    /// 2x-oversampled grid (quartic integrands).
    Fine,
}

pub(crate) struct NodalPlan {
    pub mx: usize,
    pub my: usize,
    pub y_nodes: Vec<f64>,
    pub y_weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// length `2 my`, used for the DCT-I
    dct: Arc<dyn Fft<f64>>,
    native: bool,
}

impl NodalPlan {
    fn new(planner: &mut FftPlanner<f64>, mx: usize, my: usize, native: bool) -> Self {
        Self {
            mx,
            my,
            y_nodes: lobatto_points(my),
            y_weights: clenshaw_curtis_weights(my),
            fft: planner.plan_fft_forward(mx),
            ifft: planner.plan_fft_inverse(mx),
            dct: planner.plan_fft_forward(2 * my),
            native,
        }
    }

    /// In-place DCT-I sum `V_n = v_0 + (-1)^n v_M + 2 sum_{j=1}^{M-1} v_j cos(pi n j / M)`.
    fn dct1(&self, v: &mut [Complex64], ext: &mut Vec<Complex64>) {
        let m = self.my;
        ext.clear();
        ext.extend_from_slice(&v[..=m]);
        for j in (1..m).rev() {
            ext.push(v[j]);
        }
        let need = self.dct.get_inplace_scratch_len();
        let (buf, scratch) = {
            ext.resize(2 * m + need, Complex64::new(0.0, 0.0));
            ext.split_at_mut(2 * m)
        };
        self.dct.process_with_scratch(buf, scratch);
        v[..=m].copy_from_slice(&ext[..=m]);
    }

    /// Nodal values at the `my + 1` Lobatto points -> Chebyshev coefficients (in place).
    fn cheb_forward(&self, v: &mut [Complex64], ext: &mut Vec<Complex64>) {
        let m = self.my;
        self.dct1(v, ext);
        let mf = m as f64;
        for (n, a) in v[..=m].iter_mut().enumerate() {
            let c = if n == 0 || n == m { 2.0 } else { 1.0 };
            *a /= mf * c;
        }
    }

    /// Chebyshev coefficients -> nodal values at the Lobatto points (in place).
    fn cheb_inverse(&self, a: &mut [Complex64], ext: &mut Vec<Complex64>) {
        let m = self.my;
        let (a0, am) = (a[0], a[m]);
        self.dct1(a, ext);
        for (j, v) in a[..=m].iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *v = 0.5 * (*v + a0 + am * sign);
        }
    }
}

/// Discretization of the periodic channel.
pub struct ChannelGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    x_nodes: Vec<f64>,
    y_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    gram: Array2<f64>,
    native: NodalPlan,
    dealias: NodalPlan,
    fine: NodalPlan,
}

impl fmt::Debug for ChannelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChannelGrid")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .finish()
    }
}

impl PartialEq for ChannelGrid {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx
    }
}

impl ChannelGrid {
    pub fn new(nx: usize, ny: usize, lx: f64) -> Result<Arc<Self>> {
        if nx < 4 || nx % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "nx must be even and >= 4, got {nx}"
            )));
        }
        if ny < 8 {
            return Err(Error::InvalidParameter(format!("ny must be >= 8, got {ny}")));
        }
        if !(lx.is_finite() && lx > 0.0) {
            return Err(Error::InvalidParameter(format!("lx must be positive, got {lx}")));
        }
        let mut planner = FftPlanner::new();
        let native = NodalPlan::new(&mut planner, nx, ny, true);
        let dealias = NodalPlan::new(&mut planner, 3 * nx / 2, 3 * ny / 2 + 1, false);
        let fine = NodalPlan::new(&mut planner, 2 * nx, 2 * ny, false);
        Ok(Arc::new(Self {
            nx,
            ny,
            lx,
            x_nodes: (0..nx).map(|i| lx * i as f64 / nx as f64).collect(),
            y_nodes: native.y_nodes.clone(),
            quad_weights: native.y_weights.clone(),
            gram: chebyshev_gram(ny),
            native,
            dealias,
            fine,
        }))
    }

    /// Default `2 pi` period.
    pub fn with_default_period(nx: usize, ny: usize) -> Result<Arc<Self>> {
        Self::new(nx, ny, 2.0 * std::f64::consts::PI)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    /// Number of stored Fourier modes, `k = 0 ..= nx / 2`.
    pub fn nk(&self) -> usize {
        self.nx / 2 + 1
    }
    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }
    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }
    /// `int T_m T_n dy` over `[-1, 1]`.
    pub fn gram(&self) -> &Array2<f64> {
        &self.gram
    }
    /// Physical wavenumber of stored mode `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64 / self.lx
    }
    /// Parseval weight of mode `k` in the half spectrum.
    pub fn mode_weight(&self, k: usize) -> f64 {
        if k == 0 || k == self.nx / 2 {
            1.0
        } else {
            2.0
        }
    }

    pub(crate) fn plan(&self, res: Resolution) -> &NodalPlan {
        match res {
            Resolution::Native => &self.native,
            Resolution::Dealias => &self.dealias,
            Resolution::Fine => &self.fine,
        }
    }

    /// Shape `(mx, my + 1)` of nodal arrays at the given resolution.
    pub fn nodal_shape(&self, res: Resolution) -> (usize, usize) {
        let p = self.plan(res);
        (p.mx, p.my + 1)
    }

    /// Lobatto points and Clenshaw–Curtis weights at the given resolution.
    pub fn nodal_y(&self, res: Resolution) -> (&[f64], &[f64]) {
        let p = self.plan(res);
        (&p.y_nodes, &p.y_weights)
    }

    pub fn check_same(&self, other: &ChannelGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "({}, {}, {}) vs ({}, {}, {})",
                self.nx, self.ny, self.lx, other.nx, other.ny, other.lx
            )))
        }
    }

    /// Spectral coefficients `(nk, ny + 1)` -> real nodal values at `res`.
    ///
    /// On padded grids the Nyquist mode is dropped.
    pub fn to_nodal(&self, coeffs: ArrayView2<Complex64>, res: Resolution) -> Array2<f64> {
        let p = self.plan(res);
        let (mx, my) = (p.mx, p.my);
        let kkeep = if p.native { self.nk() } else { self.nx / 2 };
        let zero = Complex64::new(0.0, 0.0);
        // y-transform each mode; tmp is laid out [j][k]
        let mut tmp = vec![zero; (my + 1) * kkeep];
        let mut ext = Vec::with_capacity(2 * my + 64);
        let mut col = vec![zero; my + 1];
        for k in 0..kkeep {
            let row = coeffs.row(k);
            if row.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                continue;
            }
            col.iter_mut().for_each(|c| *c = zero);
            for (n, c) in row.iter().enumerate() {
                col[n] = *c;
            }
            p.cheb_inverse(&mut col, &mut ext);
            for j in 0..=my {
                tmp[j * kkeep + k] = col[j];
            }
        }
        // x-transform two real rows per complex FFT
        let mut out = Array2::<f64>::zeros((mx, my + 1));
        let mut spec = vec![zero; mx];
        let mut scratch = vec![zero; p.ifft.get_inplace_scratch_len()];
        let i = Complex64::new(0.0, 1.0);
        let mut j = 0;
        while j <= my {
            let pair = j < my;
            spec.iter_mut().for_each(|c| *c = zero);
            for k in 0..kkeep {
                let a = tmp[j * kkeep + k];
                let b = if pair { tmp[(j + 1) * kkeep + k] } else { zero };
                if 2 * k == mx {
                    spec[k] = Complex64::new(a.re, b.re);
                } else {
                    spec[k] = a + i * b;
                    if k > 0 {
                        spec[mx - k] = a.conj() + i * b.conj();
                    }
                }
            }
            p.ifft.process_with_scratch(&mut spec, &mut scratch);
            for x in 0..mx {
                out[[x, j]] = spec[x].re;
                if pair {
                    out[[x, j + 1]] = spec[x].im;
                }
            }
            j += 2;
        }
        out
    }

    /// Real nodal values at `res` -> spectral coefficients `(nk, ny + 1)`.
    pub fn from_nodal(&self, values: ArrayView2<f64>, res: Resolution) -> Result<Array2<Complex64>> {
        let p = self.plan(res);
        let (mx, my) = (p.mx, p.my);
        if values.dim() != (mx, my + 1) {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", (mx, my + 1)),
                got: format!("{:?}", values.dim()),
            });
        }
        let kkeep = if p.native { self.nk() } else { self.nx / 2 };
        let zero = Complex64::new(0.0, 0.0);
        let mut tmp = vec![zero; (my + 1) * kkeep];
        let mut spec = vec![zero; mx];
        let mut scratch = vec![zero; p.fft.get_inplace_scratch_len()];
        let scale = 0.5 / mx as f64;
        let mut j = 0;
        while j <= my {
            let pair = j < my;
            for x in 0..mx {
                let b = if pair { values[[x, j + 1]] } else { 0.0 };
                spec[x] = Complex64::new(values[[x, j]], b);
            }
            p.fft.process_with_scratch(&mut spec, &mut scratch);
            for k in 0..kkeep {
                let zk = spec[k];
                let zm = spec[(mx - k) % mx].conj();
                tmp[j * kkeep + k] = (zk + zm) * scale;
                if pair {
                    tmp[(j + 1) * kkeep + k] = Complex64::new(0.0, -1.0) * (zk - zm) * scale;
                }
            }
            j += 2;
        }
        let mut out = Array2::<Complex64>::zeros((self.nk(), self.ny + 1));
        let mut ext = Vec::with_capacity(2 * my + 64);
        let mut col = vec![zero; my + 1];
        for k in 0..kkeep {
            for j in 0..=my {
                col[j] = tmp[j * kkeep + k];
            }
            if k == self.nx / 2 {
                // Nyquist of real data is real
                col.iter_mut().for_each(|c| c.im = 0.0);
            }
            p.cheb_forward(&mut col, &mut ext);
            for n in 0..=self.ny {
                out[[k, n]] = col[n];
            }
        }
        Ok(out)
    }

    /// Evaluate a Chebyshev series at `y` (Clenshaw).
    pub fn eval_series(coeffs: &[Complex64], y: f64) -> Complex64 {
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for &a in coeffs.iter().skip(1).rev() {
            let b0 = a + b1 * (2.0 * y) - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] + b1 * y - b2
    }
}
