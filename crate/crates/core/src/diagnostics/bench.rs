use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{curl_of, random_wall_stream, velocity_from_stream, StripQuadrature, VelocityField};
use crate::spectral::quadrature::{chebyshev_values, gauss_legendre};
use crate::spectral::{ChannelGrid, SpectralScalarField};

/// Uniform-in-`x`, Gauss–Legendre-in-`y` rule exact for products of up to `order` fields.
pub struct TensorQuadrature {
    grid: Arc<ChannelGrid>,
    xs: Vec<f64>,
    wy: Vec<f64>,
    cheb: Array2<f64>,
}

impl TensorQuadrature {
    pub fn new(grid: &Arc<ChannelGrid>, order: usize) -> Self {
        let mx = order * grid.nx() / 2 + 2;
        let m = (order * grid.ny()) / 2 + 1;
        let (ys, wy) = gauss_legendre(m.max(2), -1.0, 1.0);
        let n = grid.ny();
        let mut cheb = Array2::zeros((ys.len(), n + 1));
        for (j, &y) in ys.iter().enumerate() {
            for (c, v) in chebyshev_values(n, y).into_iter().enumerate() {
                cheb[[j, c]] = v;
            }
        }
        let xs = (0..mx).map(|i| grid.lx() * i as f64 / mx as f64).collect();
        Self {
            grid: grid.clone(),
            xs,
            wy,
            cheb,
        }
    }

    /// Values at the rule's nodes, `(x, y)` indexed.
    pub fn values(&self, f: &SpectralScalarField) -> Array2<f64> {
        let nk = self.grid.nk();
        let my = self.wy.len();
        // mode profiles at the y nodes
        let mut prof = Array2::<Complex64>::zeros((nk, my));
        for k in 0..nk {
            let a = f.coeffs().row(k);
            if a.iter().all(|c| c.norm_sqr() == 0.0) {
                continue;
            }
            for j in 0..my {
                prof[[k, j]] = a.iter().zip(self.cheb.row(j)).map(|(a, t)| a * t).sum();
            }
        }
        let mut out = Array2::zeros((self.xs.len(), my));
        for k in 0..nk {
            let w = self.grid.mode_weight(k);
            let kappa = self.grid.wavenumber(k);
            for (i, &x) in self.xs.iter().enumerate() {
                let ph = Complex64::from_polar(w, kappa * x);
                for j in 0..my {
                    out[[i, j]] += (prof[[k, j]] * ph).re;
                }
            }
        }
        out
    }

    pub fn integrate(&self, v: &Array2<f64>) -> f64 {
        let dx = self.grid.lx() / self.xs.len() as f64;
        let mut s = 0.0;
        for row in v.rows() {
            s += row.iter().zip(&self.wy).map(|(a, w)| a * w).sum::<f64>();
        }
        s * dx
    }
}

/// Whether a bench entry states an equality or a bound with an unknown constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityKind {
    /// value is the largest relative residual
    Identity,
    /// value is the largest observed ratio, i.e. the fitted constant
    Bound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityResult {
    pub name: &'static str,
    pub kind: InequalityKind,
    /// `None` when no entry qualified
    pub value: Option<f64>,
    pub used: usize,
    pub skipped: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub results: Vec<InequalityResult>,
}

impl BenchReport {
    pub fn get(&self, name: &str) -> Option<&InequalityResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// `int (Psi . grad) Phi . Phi = 0` for divergence-free `Psi` tangent to the walls.
pub const TRILINEAR: &str = "trilinear-antisymmetry";
/// `||u||_{L^4}^2 <= C ||u|| ||u||_1`.
pub const LADYZHENSKAYA: &str = "ladyzhenskaya";
/// `||curl u|| = ||grad u||` for no-slip divergence-free `u`.
pub const CURL_GRADIENT: &str = "curl-gradient";
/// `||u||_3 <= K ||curl Lap u||` for no-slip divergence-free `u`.
pub const THIRD_ORDER: &str = "third-order-elliptic";
/// `||f||_1^2 <= K ||f|| ||f||_2`.
pub const INTERPOLATION: &str = "interpolation";
/// `||u||_{L^2(strip)} <= K delta ||grad u||_{L^2(strip)}` for `u = 0` on the walls.
pub const STRIP_POINCARE: &str = "strip-poincare";

/// Widths at which the strip Poincare ratio is sampled.
pub const POINCARE_WIDTHS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

const HYPOTHESIS_TOL: f64 = 1e-9;

/// One corpus entry's contribution to one inequality.
enum Outcome {
    Value(f64),
    Skip(String),
}

fn scale_of(u: &VelocityField) -> f64 {
    u.u1.max_coeff().max(u.u2.max_coeff())
}

fn is_zero(u: &VelocityField) -> bool {
    u.u1.is_zero() && u.u2.is_zero()
}

fn no_slip(u: &VelocityField) -> std::result::Result<(), String> {
    let s = scale_of(u);
    let wall = u.wall_trace_max();
    if wall > HYPOTHESIS_TOL * s {
        return Err(format!("wall trace {wall:.2e}"));
    }
    divergence_free(u)
}

fn divergence_free(u: &VelocityField) -> std::result::Result<(), String> {
    let d = u.divergence().max_coeff();
    if d > HYPOTHESIS_TOL * scale_of(u) * (1.0 + u.grid().ny().pow(2) as f64) {
        return Err(format!("divergence {d:.2e}"));
    }
    Ok(())
}

fn ratio(num: f64, den: f64, what: &str) -> Outcome {
    if den > 0.0 {
        Outcome::Value(num / den)
    } else {
        Outcome::Skip(format!("{what} vanishes"))
    }
}

fn trilinear(psi: &VelocityField, phi: &VelocityField, quad: &TensorQuadrature) -> Outcome {
    if let Err(e) = divergence_free(psi) {
        return Outcome::Skip(e);
    }
    if psi.wall_normal_max() > HYPOTHESIS_TOL * scale_of(psi) {
        return Outcome::Skip("advecting field crosses the walls".into());
    }
    let p1 = quad.values(&psi.u1);
    let p2 = quad.values(&psi.u2);
    let mut form = Array2::<f64>::zeros(p1.dim());
    let mut bound = Array2::<f64>::zeros(p1.dim());
    for f in [&phi.u1, &phi.u2] {
        let v = quad.values(f);
        let fx = quad.values(&f.diff_x());
        let fy = quad.values(&f.diff_y());
        for ((i, j), s) in form.indexed_iter_mut() {
            let (a1, a2) = (p1[[i, j]], p2[[i, j]]);
            let (v, fx, fy) = (v[[i, j]], fx[[i, j]], fy[[i, j]]);
            *s += (a1 * fx + a2 * fy) * v;
            bound[[i, j]] += (a1.abs() * fx.abs() + a2.abs() * fy.abs()) * v.abs();
        }
    }
    let den = quad.integrate(&bound);
    if den == 0.0 {
        return Outcome::Value(0.0);
    }
    Outcome::Value(quad.integrate(&form).abs() / den)
}

fn curl_gradient(u: &VelocityField) -> Outcome {
    if let Err(e) = no_slip(u) {
        return Outcome::Skip(e);
    }
    let g = u.grad_sq().sqrt();
    if g == 0.0 {
        return Outcome::Value(0.0);
    }
    Outcome::Value((curl_of(u).norm_sq().sqrt() - g).abs() / g)
}

fn ladyzhenskaya(u: &VelocityField, quad: &TensorQuadrature) -> Outcome {
    let a = quad.values(&u.u1);
    let b = quad.values(&u.u2);
    let m4 = ndarray::Zip::from(&a).and(&b).map_collect(|a, b| (a * a + b * b).powi(2));
    let l4_sq = quad.integrate(&m4).sqrt();
    let n = u.norms();
    ratio(l4_sq, n.l2 * n.h1, "norm")
}

fn interpolation(u: &VelocityField) -> Outcome {
    let n = u.norms();
    ratio(n.h1 * n.h1, n.l2 * n.h2, "norm")
}

fn third_order(u: &VelocityField) -> Outcome {
    if let Err(e) = no_slip(u) {
        return Outcome::Skip(e);
    }
    let lap = VelocityField::new(u.u1.laplacian(), u.u2.laplacian()).expect("same grid");
    ratio(u.norms().h3, curl_of(&lap).norm_sq().sqrt(), "curl of the Laplacian")
}

fn poincare_ratio(u: &VelocityField, q: &StripQuadrature) -> Option<f64> {
    let g = u.strip_grad_norm_sq(q).sqrt();
    (g > 0.0).then(|| u.strip_norm_sq(q).sqrt() / (q.width() * g))
}

fn strip_poincare(u: &VelocityField, quads: &[StripQuadrature]) -> Outcome {
    if let Err(e) = no_slip(u) {
        return Outcome::Skip(e);
    }
    match quads.iter().filter_map(|q| poincare_ratio(u, q)).reduce(f64::max) {
        Some(r) => Outcome::Value(r),
        None => Outcome::Skip("gradient vanishes in every strip".into()),
    }
}

/// `||u||_strip / (delta ||grad u||_strip)` at each width, for a no-slip `u`.
pub fn strip_poincare_ratios(u: &VelocityField, widths: &[f64]) -> Result<Vec<f64>> {
    no_slip(u).map_err(Error::InvalidParameter)?;
    widths
        .iter()
        .map(|&d| {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::InvalidParameter(format!("strip width {d} outside (0, 1]")));
            }
            poincare_ratio(u, &StripQuadrature::bands(u.grid(), d))
                .ok_or_else(|| Error::Degenerate(format!("gradient vanishes in the {d} strip")))
        })
        .collect()
}

fn collect(name: &'static str, kind: InequalityKind, outcomes: Vec<Outcome>) -> InequalityResult {
    let mut value = None::<f64>;
    let mut used = 0;
    let mut skipped = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Value(v) => {
                used += 1;
                value = Some(value.map_or(v, |w| w.max(v)));
            }
            Outcome::Skip(why) => skipped.push(format!("entry {i}: {why}")),
        }
    }
    InequalityResult {
        name,
        kind,
        value,
        used,
        skipped,
    }
}

/// Residuals of the identities and fitted constants of the bounds over a corpus of velocities.
///
/// The trilinear form pairs entry `i` (advecting) with entry `i + 1` (cyclically).
/// Entries violating an inequality's hypotheses are skipped with a note.
pub fn inequality_bench(corpus: &[VelocityField]) -> Result<BenchReport> {
    let Some(first) = corpus.first() else {
        return Err(Error::InsufficientData("empty corpus".into()));
    };
    let grid = first.grid().clone();
    for u in corpus {
        grid.check_same(u.grid())?;
    }
    let cubic = TensorQuadrature::new(&grid, 3);
    let quartic = TensorQuadrature::new(&grid, 4);
    let strips: Vec<StripQuadrature> = POINCARE_WIDTHS
        .iter()
        .map(|&d| StripQuadrature::bands(&grid, d))
        .collect();
    let n = corpus.len();
    let rows: Vec<[Outcome; 6]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let u = &corpus[i];
            let zero = is_zero(u);
            let skip = || Outcome::Skip("zero field".into());
            [
                trilinear(u, &corpus[(i + 1) % n], &cubic),
                curl_gradient(u),
                if zero { skip() } else { ladyzhenskaya(u, &quartic) },
                if zero { skip() } else { interpolation(u) },
                if zero { skip() } else { third_order(u) },
                if zero { skip() } else { strip_poincare(u, &strips) },
            ]
        })
        .collect();
    let mut cols: [Vec<Outcome>; 6] = Default::default();
    for row in rows {
        for (c, o) in cols.iter_mut().zip(row) {
            c.push(o);
        }
    }
    let [a, b, c, d, e, f] = cols;
    use InequalityKind::*;
    Ok(BenchReport {
        results: vec![
            collect(TRILINEAR, Identity, a),
            collect(CURL_GRADIENT, Identity, b),
            collect(LADYZHENSKAYA, Bound, c),
            collect(INTERPOLATION, Bound, d),
            collect(THIRD_ORDER, Bound, e),
            collect(STRIP_POINCARE, Bound, f),
        ],
    })
}

/// `count` random no-slip velocities `grad-perp((1 - y^2)^2 P)`, reproducible from `seed`.
///
/// Mode and degree caps scale with the grid so every entry is resolved.
pub fn no_slip_corpus(grid: &Arc<ChannelGrid>, count: usize, seed: u64) -> Result<Vec<VelocityField>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = (grid.nx() / 4).clamp(1, 6);
    let degree = (grid.ny() / 2).saturating_sub(4).clamp(2, 12);
    (0..count)
        .map(|_| random_wall_stream(grid, &mut rng, kmax, degree, 2).map(|p| velocity_from_stream(&p)))
        .collect()
}
