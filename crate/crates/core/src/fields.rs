//! Velocity fields, the model's differential operators, Sobolev and strip norms.

use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::quadrature::chebyshev_band_gram;
use crate::spectral::{ChannelGrid, Resolution, SpectralScalarField};

/// A velocity `(u1, u2)` on the channel.
#[derive(Clone, Debug)]
pub struct VelocityField {
    pub u1: SpectralScalarField,
    pub u2: SpectralScalarField,
    /// Stream function this field was derived from, if any.
    pub source_stream: Option<SpectralScalarField>,
}

/// Sobolev norms of a vector field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    /// `||grad u||`
    pub h1_semi: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

/// The wall strip `{1 - delta < |y| < 1}`; `delta = 1` is the whole channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSpec {
    delta: f64,
}

impl StripSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "strip width must lie in (0, 1], got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn quadrature(&self, grid: &ChannelGrid) -> StripQuadrature {
        StripQuadrature::bands(grid, self.delta)
    }
}

/// Precomputed exact integration over a pair of wall bands of width `width`.
#[derive(Clone, Debug)]
pub struct StripQuadrature {
    width: f64,
    gram: Array2<f64>,
}

impl StripQuadrature {
    /// Width may be anything in `(0, 1]`; `1` covers the whole channel.
    pub fn bands(grid: &ChannelGrid, width: f64) -> Self {
        let n = grid.ny();
        let top = chebyshev_band_gram(n, 1.0 - width, 1.0);
        let bottom = chebyshev_band_gram(n, -1.0, -1.0 + width);
        Self {
            width,
            gram: top + bottom,
        }
    }

    /// The complement `{|y| < 1 - width}`.
    pub fn interior(grid: &ChannelGrid, width: f64) -> Self {
        let n = grid.ny();
        Self {
            width,
            gram: chebyshev_band_gram(n, -1.0 + width, 1.0 - width),
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// `sum_c int_strip |f_c|^2`.
    pub fn norm_sq(&self, components: &[&SpectralScalarField]) -> f64 {
        components
            .iter()
            .map(|f| f.band_inner(f, &self.gram))
            .sum()
    }
}

impl VelocityField {
    pub fn zeros(grid: &Arc<ChannelGrid>) -> Self {
        Self {
            u1: SpectralScalarField::zeros(grid),
            u2: SpectralScalarField::zeros(grid),
            source_stream: None,
        }
    }

    pub fn new(u1: SpectralScalarField, u2: SpectralScalarField) -> Result<Self> {
        u1.grid().check_same(u2.grid())?;
        Ok(Self {
            u1,
            u2,
            source_stream: None,
        })
    }

    pub fn grid(&self) -> &Arc<ChannelGrid> {
        self.u1.grid()
    }

    pub fn divergence(&self) -> SpectralScalarField {
        &self.u1.diff_x() + &self.u2.diff_y()
    }

    /// `[d1 u1, d2 u1, d1 u2, d2 u2]`.
    pub fn gradient(&self) -> [SpectralScalarField; 4] {
        [
            self.u1.diff_x(),
            self.u1.diff_y(),
            self.u2.diff_x(),
            self.u2.diff_y(),
        ]
    }

    pub fn l2_sq(&self) -> f64 {
        self.u1.norm_sq() + self.u2.norm_sq()
    }

    /// `||grad u||^2`.
    pub fn grad_sq(&self) -> f64 {
        self.gradient().iter().map(|g| g.norm_sq()).sum()
    }

    /// Largest nodal `|u|` on the two walls.
    pub fn wall_trace_max(&self) -> f64 {
        let a = self.u1.to_nodal();
        let b = self.u2.to_nodal();
        let ny = self.grid().ny();
        let mut m = 0.0f64;
        for i in 0..self.grid().nx() {
            for j in [0, ny] {
                m = m.max(a[[i, j]].abs()).max(b[[i, j]].abs());
            }
        }
        m
    }

    pub fn is_no_slip(&self, tol: f64) -> bool {
        self.wall_trace_max() <= tol
    }

    /// Largest nodal `|u . n|` on the walls.
    pub fn wall_normal_max(&self) -> f64 {
        let b = self.u2.to_nodal();
        let ny = self.grid().ny();
        (0..self.grid().nx())
            .flat_map(|i| [b[[i, 0]].abs(), b[[i, ny]].abs()])
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid().check_same(other.grid())?;
        Ok(Self {
            u1: &self.u1 - &other.u1,
            u2: &self.u2 - &other.u2,
            source_stream: match (&self.source_stream, &other.source_stream) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            },
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            u1: self.u1.scale(s),
            u2: self.u2.scale(s),
            source_stream: self.source_stream.as_ref().map(|p| p.scale(s)),
        }
    }

    pub fn norms(&self) -> NormReport {
        norms_of(self)
    }

    pub fn strip_norm_sq(&self, quad: &StripQuadrature) -> f64 {
        quad.norm_sq(&[&self.u1, &self.u2])
    }

    pub fn strip_grad_norm_sq(&self, quad: &StripQuadrature) -> f64 {
        let g = self.gradient();
        quad.norm_sq(&[&g[0], &g[1], &g[2], &g[3]])
    }

    pub fn resample(&self, grid: &Arc<ChannelGrid>) -> Result<Self> {
        Ok(Self {
            u1: self.u1.resample(grid)?,
            u2: self.u2.resample(grid)?,
            source_stream: match &self.source_stream {
                Some(p) => Some(p.resample(grid)?),
                None => None,
            },
        })
    }
}

/// `u = grad-perp psi = (-d2 psi, d1 psi)`.
pub fn velocity_from_stream(psi: &SpectralScalarField) -> VelocityField {
    VelocityField {
        u1: -&psi.diff_y(),
        u2: psi.diff_x(),
        source_stream: Some(psi.clone()),
    }
}

/// `curl u = d1 u2 - d2 u1`.
pub fn curl_of(u: &VelocityField) -> SpectralScalarField {
    &u.u2.diff_x() - &u.u1.diff_y()
}

/// `q = curl(u - alpha^2 Lap u) = omega - alpha^2 Lap omega`.
pub fn q_from_u(u: &VelocityField, alpha: f64) -> Result<SpectralScalarField> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    let omega = curl_of(u);
    if alpha == 0.0 {
        return Ok(omega);
    }
    let mut q = omega.clone();
    q.axpy(-alpha * alpha, &omega.laplacian());
    Ok(q)
}

fn sobolev_ladder(f: &SpectralScalarField) -> [f64; 4] {
    // sums of ||d^beta f||^2 over |beta| = 0, 1, 2, 3
    let mut out = [0.0; 4];
    let mut layer = vec![f.clone()];
    out[0] = f.norm_sq();
    for order in 1..=3 {
        // derivatives with (a, b), a + b = order: d_x applied to all of the previous
        // layer plus d_y applied to the pure-y member
        let mut next = Vec::with_capacity(order + 1);
        for g in &layer {
            next.push(g.diff_x());
        }
        next.push(layer.last().expect("nonempty").diff_y());
        out[order] = next.iter().map(|g| g.norm_sq()).sum();
        layer = next;
    }
    out
}

pub fn norms_of(u: &VelocityField) -> NormReport {
    let a = sobolev_ladder(&u.u1);
    let b = sobolev_ladder(&u.u2);
    let s: Vec<f64> = (0..4).map(|i| a[i] + b[i]).collect();
    NormReport {
        l2: s[0].sqrt(),
        h1_semi: s[1].sqrt(),
        h1: (s[0] + s[1]).sqrt(),
        h2: (s[0] + s[1] + s[2]).sqrt(),
        h3: (s[0] + s[1] + s[2] + s[3]).sqrt(),
    }
}

/// `int_strip |f|^2` summed over components; strip from a [`StripSpec`].
pub fn strip_norm_sq(components: &[&SpectralScalarField], strip: &StripSpec) -> Result<f64> {
    let Some(first) = components.first() else {
        return Ok(0.0);
    };
    for c in components {
        first.grid().check_same(c.grid())?;
    }
    Ok(strip.quadrature(first.grid()).norm_sq(components))
}

/// Dealiased `u . grad q`.
pub fn advection_term(u: &VelocityField, q: &SpectralScalarField) -> SpectralScalarField {
    let grid = q.grid();
    if q.is_zero() || (u.u1.is_zero() && u.u2.is_zero()) {
        return SpectralScalarField::zeros(grid);
    }
    let res = Resolution::Dealias;
    let a = u.u1.to_nodal_at(res);
    let b = u.u2.to_nodal_at(res);
    let qx = q.diff_x().to_nodal_at(res);
    let qy = q.diff_y().to_nodal_at(res);
    let mut p = Array2::<f64>::zeros(a.dim());
    Zip::from(&mut p)
        .and(&a)
        .and(&qx)
        .and(&b)
        .and(&qy)
        .for_each(|p, a, qx, b, qy| *p = a * qx + b * qy);
    SpectralScalarField::from_padded_nodal(grid, &p)
}

/// `||psi||_{L^4}^2` for a vector field, integrated on the 2x-oversampled grid.
pub fn l4_norm_sq(components: &[&SpectralScalarField]) -> f64 {
    let grid = components[0].grid();
    let res = Resolution::Fine;
    let (mx, my1) = grid.nodal_shape(res);
    let (_, w) = grid.nodal_y(res);
    let mut mag2 = Array2::<f64>::zeros((mx, my1));
    for c in components {
        let v = c.to_nodal_at(res);
        Zip::from(&mut mag2).and(&v).for_each(|m, v| *m += v * v);
    }
    let dx = grid.lx() / mx as f64;
    let mut total = 0.0;
    for i in 0..mx {
        for j in 0..my1 {
            total += dx * w[j] * mag2[[i, j]] * mag2[[i, j]];
        }
    }
    total.sqrt()
}

/// Chebyshev coefficients of `(1 - y^2)^p` times the series `a`, truncated to `a.len() + 2p - 1` degree.
fn times_wall_factor(a: &[Complex64], power: usize) -> Vec<Complex64> {
    let mut cur = a.to_vec();
    for _ in 0..power {
        // (1 - y^2) = (T0 - T2) / 2
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len() + 2];
        for (m, &c) in cur.iter().enumerate() {
            next[m] += c * 0.5;
            // T2 Tm = (T_{m+2} + T_{|m-2|}) / 2
            next[m + 2] -= c * 0.25;
            next[m.abs_diff(2)] -= c * 0.25;
        }
        cur = next;
    }
    cur
}

/// A random smooth stream function `(1 - y^2)^p P(x, y)`, `P` a trigonometric-Chebyshev
/// polynomial with modes `k <= kmax`, degree `<= degree` and decaying amplitudes.
///
/// `p = 2` gives a no-slip velocity, `p = 1` one tangent to the walls.
pub fn random_wall_stream<R: Rng>(
    grid: &Arc<ChannelGrid>,
    rng: &mut R,
    kmax: usize,
    degree: usize,
    power: usize,
) -> Result<SpectralScalarField> {
    if kmax >= grid.nx() / 2 || degree + 2 * power > grid.ny() {
        return Err(Error::Unresolved(format!(
            "k <= {kmax}, degree {} does not fit a {}x{} grid",
            degree + 2 * power,
            grid.nx(),
            grid.ny()
        )));
    }
    let mut f = SpectralScalarField::zeros(grid);
    for k in 0..=kmax {
        let a: Vec<Complex64> = (0..=degree)
            .map(|n| {
                let damp = 1.0 / (1.0 + (k * k + n * n) as f64);
                let re = rng.gen_range(-1.0..1.0) * damp;
                let im = if k == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) * damp };
                Complex64::new(re, im)
            })
            .collect();
        let w = times_wall_factor(&a, power);
        for (n, c) in w.into_iter().enumerate() {
            f.coeffs_mut()[[k, n]] = c;
        }
    }
    Ok(f)
}
