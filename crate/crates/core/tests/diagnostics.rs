use std::f64::consts::PI;
use std::sync::Arc;

use sgfluid::diagnostics::*;
use sgfluid::dynamics::*;
use sgfluid::fields::*;
use sgfluid::spectral::*;
use sgfluid::Error;

fn ctrl(dt: f64, t_end: f64) -> StepControl {
    StepControl { dt, t_end, cfl_target: 0.5, record_every: 10 }
}

/// `psi = (1 - y^2) / 2`: velocity `(y, 0)`, unit slip at both walls.
fn shear_stream(g: &Arc<ChannelGrid>) -> SpectralScalarField {
    SpectralScalarField::from_profile(g, &[0.25, 0.0, -0.25])
}

#[test]
fn energy_of_parabolic_profile() {
    let g = ChannelGrid::with_default_period(8, 16).unwrap();
    let u = VelocityField::new(
        SpectralScalarField::from_fn(&g, |_, y| 1.0 - y * y),
        SpectralScalarField::zeros(&g),
    )
    .unwrap();
    assert_eq!(energy_alpha(&VelocityField::zeros(&g), 0.7), 0.0);
    assert!((energy_alpha(&u, 0.0) - 32.0 * PI / 15.0).abs() < 1e-12);
    assert!((energy_alpha(&u, 1.0) - 112.0 * PI / 15.0).abs() < 1e-12);
}

#[test]
fn corrector_matches_wall_slip() {
    let g = ChannelGrid::with_default_period(8, 64).unwrap();
    let psi = shear_stream(&g);
    for profile in [CutoffProfile::C2, CutoffProfile::C4] {
        let spec = CorrectorSpec::new(0.2, profile).unwrap();
        let c = Corrector::new(&psi, spec).unwrap();
        let (top, _) = c.velocity_at(1.3, 1.0);
        let (bot, _) = c.velocity_at(0.4, -1.0);
        assert!((top - 1.0).abs() < 1e-10);
        assert!((bot + 1.0).abs() < 1e-10);
        assert!(c.trace_defect() < 1e-10);
        // the interpolant keeps the wall values
        let ub = build_corrector(&psi, spec).unwrap();
        let u = velocity_from_stream(&psi);
        assert!(u.sub(&ub).unwrap().wall_trace_max() < 1e-10);
        // exact support
        for i in 0..50 {
            let y = -0.79 + 1.58 * i as f64 / 49.0;
            assert_eq!(c.velocity_at(0.3 * i as f64, y), (0.0, 0.0));
        }
    }
}

#[test]
fn corrector_of_zero_is_zero() {
    let g = ChannelGrid::with_default_period(8, 32).unwrap();
    let spec = CorrectorSpec::new(0.1, CutoffProfile::C2).unwrap();
    let ub = build_corrector(&SpectralScalarField::zeros(&g), spec).unwrap();
    assert!(ub.u1.is_zero() && ub.u2.is_zero());
    let c = Corrector::new(&SpectralScalarField::zeros(&g), spec).unwrap();
    assert_eq!(c.norms(), (0.0, 0.0));
}

#[test]
fn corrector_handles_general_euler_streams() {
    // flux through the channel puts different constants on the two walls
    let g = ChannelGrid::with_default_period(16, 48).unwrap();
    let psi = SpectralScalarField::from_fn(&g, |x, y| {
        0.3 + y - y.powi(3) / 3.0 + (1.0 - y * y) * (2.0 * x).cos() * 0.2
    });
    let spec = CorrectorSpec::new(0.15, CutoffProfile::C2).unwrap();
    let c = Corrector::new(&psi, spec).unwrap();
    assert!(c.trace_defect() < 1e-10);
    // a stream that varies along the wall is not an Euler stream
    let bad = SpectralScalarField::from_fn(&g, |x, _| x.sin());
    assert!(matches!(Corrector::new(&bad, spec), Err(Error::InvalidParameter(_))));
}

/// Composite Simpson on a fine grid; the cutoff makes the integrands piecewise smooth.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn corrector_norms_match_one_dimensional_integrals() {
    // psi depends on y only, so ||u_b||^2 = 2 lx int_{1-d}^1 (z psi)'^2 and the gradient
    // norm only sees (z psi)''
    let g = ChannelGrid::with_default_period(8, 64).unwrap();
    let psi = shear_stream(&g);
    let d = 0.1;
    let spec = CorrectorSpec::new(d, CutoffProfile::C2).unwrap();
    let (nu, ng) = Corrector::new(&psi, spec).unwrap().norms();
    let eta = |s: f64| 1.0 - s.powi(3) * (10.0 - 15.0 * s + 6.0 * s * s);
    // z psi as a function of the wall distance t = 1 - y, with psi = t - t^2 / 2
    let phi = |t: f64| eta(t / d) * (t - 0.5 * t * t);
    // phi is a polynomial on the strip, so central differences may straddle its ends
    let h = 1e-5;
    let d1 = |t: f64| (phi(t + h) - phi(t - h)) / (2.0 * h);
    let d2 = |t: f64| (phi(t + h) - 2.0 * phi(t) + phi(t - h)) / (h * h);
    let lx = 2.0 * PI;
    let eu = (2.0 * lx * simpson(|t| d1(t).powi(2), 0.0, d, 2000)).sqrt();
    let eg = (2.0 * lx * simpson(|t| d2(t).powi(2), 0.0, d, 2000)).sqrt();
    assert!((nu - eu).abs() < 1e-6 * eu, "{nu} vs {eu}");
    assert!((ng - eg).abs() < 1e-5 * eg, "{ng} vs {eg}");
}

#[test]
fn corrector_scalings() {
    let g = ChannelGrid::with_default_period(8, 256).unwrap();
    let psi = shear_stream(&g);
    let deltas = [0.2, 0.1, 0.05, 0.025];
    let s = corrector_scaling_fit(&psi, &deltas, CutoffProfile::C2).unwrap();
    assert!((0.4..=0.6).contains(&s.p0), "p0 = {}", s.p0);
    assert!((-0.6..=-0.4).contains(&s.p1), "p1 = {}", s.p1);
    // homogeneity
    let s2 = corrector_scaling_fit(&psi.scale(2.0), &deltas, CutoffProfile::C2).unwrap();
    for (a, b) in s.u_norms.iter().zip(&s2.u_norms) {
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }
    assert!((s.p0 - s2.p0).abs() < 1e-10 && (s.p1 - s2.p1).abs() < 1e-10);
}

#[test]
fn corrector_fit_refusals() {
    let fine = ChannelGrid::with_default_period(8, 256).unwrap();
    let deltas = [0.2, 0.1, 0.05, 0.025];
    let zero = SpectralScalarField::zeros(&fine);
    assert!(matches!(
        corrector_scaling_fit(&zero, &deltas, CutoffProfile::C2),
        Err(Error::Degenerate(_))
    ));
    let coarse = ChannelGrid::with_default_period(8, 32).unwrap();
    assert!(matches!(
        corrector_scaling_fit(&shear_stream(&coarse), &deltas, CutoffProfile::C2),
        Err(Error::Unresolved(_))
    ));
    let psi = shear_stream(&fine);
    assert!(corrector_scaling_fit(&psi, &[0.2, 0.1, 0.05], CutoffProfile::C2).is_err());
    assert!(corrector_scaling_fit(&psi, &[0.2, 0.1, 0.05, 0.04], CutoffProfile::C2).is_err());
    assert!(corrector_scaling_fit(&psi, &[0.2, 0.05, 0.1, 0.02], CutoffProfile::C2).is_err());
}

#[test]
fn kato_functional_of_uniform_shear() {
    // (y, 0) is a steady Euler flow with |grad u|^2 = 1
    let g = ChannelGrid::with_default_period(8, 16).unwrap();
    let u = velocity_from_stream(&shear_stream(&g));
    let b = ModelBranch::classify(0.0, 0.0).unwrap();
    let mut last = 0.0;
    for d in [0.05, 0.1, 0.3] {
        let strip = StripSpec::new(d).unwrap();
        let opts = RunOptions { strip: Some(strip), keep_snapshots: false };
        let t = run_with(&u, b, &ctrl(0.05, 1.0), opts, &mut []).unwrap();
        let k = kato_functional(&t, 0.01, &strip).unwrap();
        assert!((k - 0.01 * 2.0 * d * 2.0 * PI).abs() < 1e-12);
        assert!(k > last);
        last = k;
        assert!(kato_functional(&t, 0.01, &StripSpec::new(0.2).unwrap()).is_err());
    }
    let t = run(&u, b, &ctrl(0.05, 1.0), &mut []).unwrap();
    assert!(matches!(
        kato_functional(&t, 0.01, &StripSpec::new(0.1).unwrap()),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn whole_channel_strip_is_total_dissipation() {
    let g = ChannelGrid::with_default_period(16, 24).unwrap();
    let psi = SpectralScalarField::from_fn(&g, |x, y| (1.0 - y * y).powi(2) * (0.3 + 0.1 * x.cos()));
    let u = velocity_from_stream(&psi);
    let b = ModelBranch::classify(0.1, 0.05).unwrap();
    let strip = StripSpec::new(1.0).unwrap();
    let opts = RunOptions { strip: Some(strip), keep_snapshots: false };
    let t = run_with(&u, b, &ctrl(0.01, 0.2), opts, &mut []).unwrap();
    let k = kato_functional(&t, 0.05, &strip).unwrap();
    let cum = t.records.last().unwrap().cum_dissipation;
    assert!((k - cum).abs() < 1e-12 * cum);
    for r in &t.records {
        assert!(r.strip_dissipation <= r.cum_dissipation * (1.0 + 1e-12));
    }
}

#[test]
fn q_bound_margins() {
    let g = ChannelGrid::with_default_period(16, 24).unwrap();
    let psi = SpectralScalarField::from_fn(&g, |x, y| (1.0 - y * y).powi(2) * (0.3 + 0.1 * x.cos()));
    let u = velocity_from_stream(&psi);
    let alpha = 0.2;
    for nu in [0.0, 0.02] {
        let b = ModelBranch::classify(alpha, nu).unwrap();
        let t = run(&u, b, &ctrl(0.01, 0.3), &mut []).unwrap();
        let r0 = t.records[0];
        let m = q_bound_check(&t, alpha, nu, r0.q_norm_sq, r0.energy_alpha).unwrap();
        assert!(m >= 0.0);
        let first = q_bound_check(
            &Trajectory { records: vec![r0], ..t.clone() },
            alpha,
            nu,
            r0.q_norm_sq,
            r0.energy_alpha,
        )
        .unwrap();
        assert!((first - r0.energy_alpha / (2.0 * alpha * alpha)).abs() < 1e-9 * first);
        if nu == 0.0 {
            // lhs and rhs are both conserved
            assert!((m - first).abs() < 1e-6 * first);
        }
    }
    let ns = ModelBranch::classify(0.0, 0.02).unwrap();
    let t = run(&u, ns, &ctrl(0.01, 0.05), &mut []).unwrap();
    assert!(matches!(q_bound_check(&t, 0.2, 0.02, 1.0, 1.0), Err(Error::WrongBranch(_))));
}

#[test]
fn energy_balance_needs_two_samples() {
    let g = ChannelGrid::with_default_period(16, 24).unwrap();
    let psi = SpectralScalarField::from_fn(&g, |x, y| (1.0 - y * y).powi(2) * x.sin() * 0.1);
    let u = velocity_from_stream(&psi);
    let b = ModelBranch::classify(0.1, 0.01).unwrap();
    let t = run(&u, b, &ctrl(0.01, 0.0), &mut []).unwrap();
    assert!(matches!(energy_balance_residual(&t), Err(Error::InsufficientData(_))));
    let t = run(&u, b, &ctrl(0.002, 0.1), &mut []).unwrap();
    let std = energy_balance_residual(&t).unwrap();
    let printed = energy_balance_residual_with(&t, DissipationConvention::Printed).unwrap();
    assert!(std < 1e-8, "{std}");
    assert!(printed > 100.0 * std);
}

#[test]
fn bench_on_random_no_slip_corpus() {
    let g = ChannelGrid::with_default_period(16, 24).unwrap();
    let corpus = no_slip_corpus(&g, 40, 7).unwrap();
    let r = inequality_bench(&corpus).unwrap();
    for name in [TRILINEAR, CURL_GRADIENT] {
        let e = r.get(name).unwrap();
        assert_eq!(e.used, 40);
        assert!(e.value.unwrap() <= 1e-10, "{name}: {:?}", e.value);
    }
    for name in [LADYZHENSKAYA, INTERPOLATION, THIRD_ORDER, STRIP_POINCARE] {
        let e = r.get(name).unwrap();
        assert_eq!(e.used, 40, "{name}: {:?}", e.skipped);
        let v = e.value.unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
