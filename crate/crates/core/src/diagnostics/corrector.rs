use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::experiments::log_fit;
use crate::fields::{velocity_from_stream, VelocityField};
use crate::spectral::field::cheb_derivative;
use crate::spectral::quadrature::{chebyshev_values, gauss_legendre};
use crate::spectral::{ChannelGrid, SpectralScalarField};

/// Smooth step `eta` with `eta(0) = 1`, `eta(s) = 0` for `s >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CutoffProfile {
    /// `1 - s^3 (10 - 15 s + 6 s^2)`, two continuous derivatives
    #[default]
    C2,
    /// degree-9 smoothstep, four continuous derivatives
    C4,
}

impl CutoffProfile {
    pub fn name(self) -> &'static str {
        match self {
            Self::C2 => "c2",
            Self::C4 => "c4",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "c2" => Some(Self::C2),
            "c4" => Some(Self::C4),
            _ => None,
        }
    }

    /// `[eta, eta', eta'']` at `s`.
    pub fn eval(self, s: f64) -> [f64; 3] {
        if s <= 0.0 {
            return [1.0, 0.0, 0.0];
        }
        if s >= 1.0 {
            return [0.0; 3];
        }
        // eta = 1 - S(s) with S the usual smoothstep polynomial
        let (c, lo): (&[f64], i32) = match self {
            Self::C2 => (&[10.0, -15.0, 6.0], 3),
            Self::C4 => (&[126.0, -420.0, 540.0, -315.0, 70.0], 5),
        };
        let mut out = [1.0, 0.0, 0.0];
        for (i, &a) in c.iter().enumerate() {
            let p = lo + i as i32;
            let pf = p as f64;
            out[0] -= a * s.powi(p);
            out[1] -= a * pf * s.powi(p - 1);
            out[2] -= a * pf * (pf - 1.0) * s.powi(p - 2);
        }
        out
    }

    fn degree(self) -> usize {
        match self {
            Self::C2 => 5,
            Self::C4 => 9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectorSpec {
    delta: f64,
    pub profile: CutoffProfile,
}

impl CorrectorSpec {
    pub fn new(delta: f64, profile: CutoffProfile) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "corrector width must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self { delta, profile })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `[z, z_y, z_yy]` for `z(y) = eta((1 - |y|) / delta)`.
    pub fn cutoff(&self, y: f64) -> [f64; 3] {
        let sign = if y >= 0.0 { 1.0 } else { -1.0 };
        let [e, de, dde] = self.profile.eval((1.0 - y.abs()) / self.delta);
        [e, -sign * de / self.delta, dde / (self.delta * self.delta)]
    }
}

/// `u_b = grad-perp(z (psi - psi_wall))`, the wall constant taken separately on each side.
///
/// Values and norms are computed pointwise from the cutoff, so the support is exact.
#[derive(Clone, Debug)]
pub struct Corrector {
    spec: CorrectorSpec,
    grid: Arc<ChannelGrid>,
    /// Chebyshev series of `psi`, `psi'`, `psi''` per Fourier mode
    series: Vec<[Vec<Complex64>; 3]>,
    wall: [f64; 2],
}

/// `phi = z psi~` and its first two `y` derivatives for one mode.
type ModeJet = [Complex64; 3];

impl Corrector {
    /// Fails unless the stream is constant along each wall.
    pub fn new(stream: &SpectralScalarField, spec: CorrectorSpec) -> Result<Self> {
        let grid = stream.grid().clone();
        let scale = stream.max_coeff().max(f64::MIN_POSITIVE);
        let mut series = Vec::with_capacity(grid.nk());
        for k in 0..grid.nk() {
            let a = stream.mode(k).to_vec();
            if k > 0 {
                let top = ChannelGrid::eval_series(&a, 1.0).norm();
                let bot = ChannelGrid::eval_series(&a, -1.0).norm();
                if top.max(bot) > 1e-9 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "stream varies along the wall (mode {k}: {:.3e})",
                        top.max(bot)
                    )));
                }
            }
            let d1 = cheb_derivative(&a);
            let d2 = cheb_derivative(&d1);
            series.push([a, d1, d2]);
        }
        let wall = [
            ChannelGrid::eval_series(&series[0][0], 1.0).re,
            ChannelGrid::eval_series(&series[0][0], -1.0).re,
        ];
        Ok(Self {
            spec,
            grid,
            series,
            wall,
        })
    }

    pub fn spec(&self) -> &CorrectorSpec {
        &self.spec
    }

    fn jets(&self, y: f64) -> Vec<ModeJet> {
        let n = self.grid.ny();
        let t = chebyshev_values(n, y);
        let [z, zy, zyy] = self.spec.cutoff(y);
        let c = if y >= 0.0 { self.wall[0] } else { self.wall[1] };
        let dot = |a: &[Complex64]| -> Complex64 { a.iter().zip(&t).map(|(a, t)| a * t).sum() };
        self.series
            .iter()
            .enumerate()
            .map(|(k, [a, d1, d2])| {
                if z == 0.0 && zy == 0.0 && zyy == 0.0 {
                    return [Complex64::new(0.0, 0.0); 3];
                }
                let mut p = dot(a);
                if k == 0 {
                    p -= c;
                }
                let p1 = dot(d1);
                let p2 = dot(d2);
                [z * p, zy * p + z * p1, zyy * p + 2.0 * zy * p1 + z * p2]
            })
            .collect()
    }

    fn synthesize(&self, jets: &[ModeJet], x: f64) -> (f64, f64) {
        let mut u = (0.0, 0.0);
        for (k, j) in jets.iter().enumerate() {
            let kappa = self.grid.wavenumber(k);
            let phase = Complex64::from_polar(self.grid.mode_weight(k), kappa * x);
            u.0 -= (j[1] * phase).re;
            u.1 += (Complex64::new(0.0, kappa) * j[0] * phase).re;
        }
        u
    }

    /// `u_b(x, y)`.
    pub fn velocity_at(&self, x: f64, y: f64) -> (f64, f64) {
        self.synthesize(&self.jets(y), x)
    }

    /// `(||u_b||, ||grad u_b||)` by Gauss–Legendre on both bands, exact for the polynomial data.
    pub fn norms(&self) -> (f64, f64) {
        let npts = self.grid.ny() + self.spec.profile.degree() + 2;
        let d = self.spec.delta;
        let mut u2 = 0.0;
        let mut g2 = 0.0;
        for (lo, hi) in [(1.0 - d, 1.0), (-1.0, -1.0 + d)] {
            let (ys, ws) = gauss_legendre(npts, lo, hi);
            for (&y, &w) in ys.iter().zip(&ws) {
                for (k, j) in self.jets(y).iter().enumerate() {
                    let k2 = self.grid.wavenumber(k).powi(2);
                    let [a0, a1, a2] = j.map(|c| c.norm_sqr());
                    let mw = w * self.grid.mode_weight(k);
                    u2 += mw * (a1 + k2 * a0);
                    g2 += mw * (a2 + 2.0 * k2 * a1 + k2 * k2 * a0);
                }
            }
        }
        let lx = self.grid.lx();
        ((lx * u2).sqrt(), (lx * g2).sqrt())
    }

    /// Interpolant of `u_b` on the stream's grid.
    pub fn interpolate(&self) -> Result<VelocityField> {
        let nx = self.grid.nx();
        let ys = self.grid.y_nodes();
        let mut a = Array2::zeros((nx, ys.len()));
        let mut b = Array2::zeros((nx, ys.len()));
        for (j, &y) in ys.iter().enumerate() {
            let jets = self.jets(y);
            for (i, &x) in self.grid.x_nodes().iter().enumerate() {
                let (u1, u2) = self.synthesize(&jets, x);
                a[[i, j]] = u1;
                b[[i, j]] = u2;
            }
        }
        VelocityField::new(
            SpectralScalarField::from_nodal(&self.grid, &a)?,
            SpectralScalarField::from_nodal(&self.grid, &b)?,
        )
    }

    /// Largest `|u_bar - u_b|` over the wall nodes, `u_bar = grad-perp psi`.
    pub fn trace_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for y in [1.0, -1.0] {
            let jets = self.jets(y);
            for &x in self.grid.x_nodes() {
                let (b1, b2) = self.synthesize(&jets, x);
                let (mut u1, mut u2) = (0.0, 0.0);
                for (k, [a, d1, _]) in self.series.iter().enumerate() {
                    let kappa = self.grid.wavenumber(k);
                    let phase = Complex64::from_polar(self.grid.mode_weight(k), kappa * x);
                    u1 -= (ChannelGrid::eval_series(d1, y) * phase).re;
                    u2 += (Complex64::new(0.0, kappa) * ChannelGrid::eval_series(a, y) * phase).re;
                }
                worst = worst.max((u1 - b1).abs()).max((u2 - b2).abs());
            }
        }
        worst
    }
}

/// The corrector as a velocity field on the stream's grid.
pub fn build_corrector(euler_stream: &SpectralScalarField, spec: CorrectorSpec) -> Result<VelocityField> {
    Corrector::new(euler_stream, spec)?.interpolate()
}

/// Fitted exponents of `||u_b|| ~ delta^p0` and `||grad u_b|| ~ delta^p1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectorScaling {
    pub p0: f64,
    pub p1: f64,
    pub deltas: Vec<f64>,
    pub u_norms: Vec<f64>,
    pub grad_norms: Vec<f64>,
}

/// Chebyshev nodes needed inside every strip before a width is trusted.
pub const MIN_STRIP_NODES: usize = 8;
/// Smallest ratio of widest to narrowest strip accepted by the scaling fit.
pub const MIN_WIDTH_SPAN: f64 = 8.0;

pub fn corrector_scaling_fit(
    euler_stream: &SpectralScalarField,
    deltas: &[f64],
    profile: CutoffProfile,
) -> Result<CorrectorScaling> {
    if deltas.len() < 4 {
        return Err(Error::InsufficientData(format!("{} widths, need 4", deltas.len())));
    }
    if deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("widths must be strictly decreasing".into()));
    }
    let (hi, lo) = (deltas[0], deltas[deltas.len() - 1]);
    if hi / lo < MIN_WIDTH_SPAN * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!(
            "widths {lo}..{hi} span less than a factor {MIN_WIDTH_SPAN}"
        )));
    }
    let grid = euler_stream.grid();
    for &d in deltas {
        let inside = grid.y_nodes().iter().filter(|&&y| y > 1.0 - d).count();
        if inside < MIN_STRIP_NODES {
            return Err(Error::Unresolved(format!(
                "strip of width {d} holds {inside} nodes on a ny = {} grid",
                grid.ny()
            )));
        }
    }
    let reference = velocity_from_stream(euler_stream).l2_sq().sqrt();
    let mut u_norms = Vec::new();
    let mut grad_norms = Vec::new();
    for &d in deltas {
        let (a, b) = Corrector::new(euler_stream, CorrectorSpec::new(d, profile)?)?.norms();
        if !(a > 1e-12 * reference) {
            return Err(Error::Degenerate(format!("corrector vanishes at width {d}")));
        }
        u_norms.push(a);
        grad_norms.push(b);
    }
    let p0 = log_fit(deltas, &u_norms)?.slope;
    let p1 = log_fit(deltas, &grad_norms)?.slope;
    Ok(CorrectorScaling {
        p0,
        p1,
        deltas: deltas.to_vec(),
        u_norms,
        grad_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_smooth_steps() {
        for p in [CutoffProfile::C2, CutoffProfile::C4] {
            assert_eq!(p.eval(0.0), [1.0, 0.0, 0.0]);
            let end = p.eval(1.0 - 1e-12);
            assert!(end.iter().all(|v| v.abs() < 1e-8));
            // derivative against central differences
            for s in [0.1, 0.37, 0.5, 0.81] {
                let h = 1e-6;
                let [_, d, dd] = p.eval(s);
                let fd = (p.eval(s + h)[0] - p.eval(s - h)[0]) / (2.0 * h);
                let fdd = (p.eval(s + h)[1] - p.eval(s - h)[1]) / (2.0 * h);
                assert!((d - fd).abs() < 1e-7);
                assert!((dd - fdd).abs() < 1e-6);
            }
            assert_eq!(CutoffProfile::from_name(p.name()), Some(p));
        }
        assert!(CorrectorSpec::new(1.0, CutoffProfile::C2).is_err());
        assert!(CorrectorSpec::new(0.0, CutoffProfile::C2).is_err());
    }
}
