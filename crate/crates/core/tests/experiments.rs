use std::f64::consts::PI;

use sgfluid::diagnostics::{Corrector, CorrectorSpec, StripRule};
use sgfluid::dynamics::StepControl;
use sgfluid::experiments::*;
use sgfluid::spectral::*;
use sgfluid::Error;

fn ctrl() -> StepControl {
    StepControl { dt: 0.01, t_end: 1.0, cfl_target: 0.5, record_every: 5 }
}

const ALPHAS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn shear_plan(beta: f64) -> SweepPlan {
    SweepPlan::new(beta, 1.0, ALPHAS.to_vec(), BaseFlow::Shear, ctrl()).with_strip(StripRule::NuLinear, 1.0)
}

#[test]
fn suitable_family_is_no_slip_and_close_to_the_base() {
    let plan = shear_plan(2.0);
    for a in ALPHAS {
        let (nx, ny) = plan.resolution(a).unwrap();
        let g = ChannelGrid::new(nx, ny, 2.0 * PI).unwrap();
        let psi = BaseFlow::Shear.stream(&g);
        let ua = suitable_family(&psi, a).unwrap();
        assert!(ua.is_no_slip(1e-10));
        assert!(ua.divergence().max_coeff() < 1e-10);
        // against the exact collar integral; with about eight nodes across the collar the
        // interpolant of the C4 cutoff carries an algebraic error near a per mille
        let spec = CorrectorSpec::new(a, FAMILY_PROFILE).unwrap();
        let (exact, _) = Corrector::new(&psi, spec).unwrap().norms();
        let t = initial_data_terms(&ua, &BaseFlow::Shear.velocity(&g), a).unwrap();
        assert!((t.l2_gap - exact).abs() < 5e-3 * exact, "{} vs {exact}", t.l2_gap);
    }
}

#[test]
fn suitable_family_of_rest_is_rest() {
    let g = ChannelGrid::with_default_period(8, 64).unwrap();
    let u = suitable_family(&SpectralScalarField::zeros(&g), 0.2).unwrap();
    assert!(u.u1.is_zero() && u.u2.is_zero());
}

#[test]
fn suitable_family_refusals() {
    let g = ChannelGrid::with_default_period(8, 32).unwrap();
    let psi = BaseFlow::Shear.stream(&g);
    assert!(matches!(suitable_family(&psi, 0.01), Err(Error::Unresolved(_))));
    let lifted = SpectralScalarField::from_fn(&g, |_, y| 1.0 + y);
    assert!(matches!(suitable_family(&lifted, 0.3), Err(Error::InvalidParameter(_))));
}

#[test]
fn suitable_family_scalings() {
    let plan = shear_plan(2.0);
    let mut terms = Vec::new();
    for a in ALPHAS {
        let (nx, ny) = plan.resolution(a).unwrap();
        let g = ChannelGrid::new(nx, ny, 2.0 * PI).unwrap();
        let ua = suitable_family(&BaseFlow::Shear.stream(&g), a).unwrap();
        terms.push(initial_data_terms(&ua, &BaseFlow::Shear.velocity(&g), a).unwrap());
    }
    let gap: Vec<f64> = terms.iter().map(|t| t.l2_gap).collect();
    let grad: Vec<f64> = terms.iter().map(|t| t.grad_term).collect();
    let p0 = log_slope(&ALPHAS, &gap).unwrap();
    let p1 = log_slope(&ALPHAS, &grad).unwrap();
    assert!((p0 - 0.5).abs() <= 0.1, "{p0}");
    assert!((p1 - 1.0).abs() <= 0.15, "{p1}");
    // bounded: never above its value at the widest collar
    assert!(terms.iter().all(|t| t.h3_term <= terms[0].h3_term * (1.0 + 1e-12)));
}

#[test]
fn steady_reference() {
    let r = reference_solution(BaseFlow::Shear, 8, 16, 2.0 * PI, &ctrl()).unwrap();
    assert_eq!(r.self_convergence(), 0.0);
    let g = ChannelGrid::with_default_period(8, 32).unwrap();
    let a = r.velocity(0.0, &g).unwrap();
    let b = r.velocity(0.7, &g).unwrap();
    assert_eq!(a.u1, b.u1);
}

#[test]
fn numerical_reference_converges_and_keeps_energy() {
    let c = StepControl { dt: 0.02, t_end: 0.4, cfl_target: 0.5, record_every: 5 };
    let r = reference_solution(BaseFlow::PerturbedShear { amplitude: 0.05 }, 16, 24, 2.0 * PI, &c).unwrap();
    assert!(r.self_convergence() < 1e-6, "{}", r.self_convergence());
    let times = r.times().unwrap();
    assert_eq!(times.len(), 5);
    let g = ChannelGrid::with_default_period(32, 48).unwrap();
    let e0 = r.velocity(0.0, &g).unwrap().l2_sq();
    for t in times {
        let e = r.velocity(t, &g).unwrap().l2_sq();
        assert!((e - e0).abs() < 1e-8 * e0);
    }
    assert!(matches!(r.velocity(0.05, &g), Err(Error::ReferenceRejected(_))));
}

#[test]
fn sweep_at_rest() {
    let plan = SweepPlan::new(2.0, 1.0, vec![0.1], BaseFlow::Rest, ctrl()).with_strip(StripRule::NuLinear, 1.0);
    let rows = run_sweep(&plan).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].is_ok());
    assert_eq!(rows[0].sup_err, 0.0);
    assert_eq!(rows[0].kato_value, 0.0);
}

#[test]
fn region_four_sweep_converges() {
    let rows = run_sweep(&shear_plan(2.0)).unwrap();
    assert!(rows.iter().all(|r| r.is_ok()));
    assert!(rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err));
    assert!(rows.windows(2).all(|w| w[1].sup_alpha_grad < w[0].sup_alpha_grad));
    assert!(rows.iter().all(|r| r.region == Some(RegimeRegion::Boundary("III/IV"))));
    let fit = rate_fit(&rows).unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.ci95.is_some());
    // reproducible bit for bit
    assert_eq!(run_sweep(&shear_plan(2.0)).unwrap(), rows);
}

#[test]
fn failing_rows_are_kept() {
    // alpha-cubed strips fill the channel on nu = alpha^2
    let plan = SweepPlan::new(2.0, 1.0, vec![0.2, 0.1], BaseFlow::Shear, ctrl());
    let rows = run_sweep(&plan).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.failure.is_some() && r.sup_err.is_nan()));
    assert!(matches!(rate_fit(&rows), Err(Error::InsufficientData(_))));
}

#[test]
fn plan_validation() {
    let mut p = shear_plan(2.0);
    p.alphas = vec![0.1, 0.2];
    assert!(run_sweep(&p).is_err());
    p.alphas = vec![];
    assert!(run_sweep(&p).is_err());
    p.alphas = vec![1.5];
    assert!(run_sweep(&p).is_err());
    let q = SweepPlan::along_nu(2.0 / 3.0, &[0.2, 0.1], BaseFlow::Shear, ctrl());
    assert!((q.alphas[0] - 0.2f64.powf(1.5)).abs() < 1e-15);
    assert!((q.nu_of(q.alphas[1]) - 0.1).abs() < 1e-14);
}

#[test]
fn resolution_schedule() {
    assert_eq!(nodes_within(16, 1e-9), 1);
    assert_eq!(nodes_within(16, 2.5), 17);
    let p = shear_plan(2.0);
    for a in ALPHAS {
        let (_, ny) = p.resolution(a).unwrap();
        assert!(nodes_within(ny, a) >= 8);
        assert!(ny == p.min_ny || nodes_within(ny / 2, a) < 8);
    }
    assert!(matches!(p.resolution(1e-6), Err(Error::Unresolved(_))));
}

fn synthetic(alpha: f64, err: f64) -> SweepRow {
    SweepRow {
        alpha,
        nu: alpha * alpha,
        region: None,
        delta_used: 0.1,
        sup_err: err,
        kato_value: 0.0,
        ic: InitialDataTerms::default(),
        final_energy_gap: 0.0,
        sup_alpha_grad: 0.0,
        failure: None,
    }
}

#[test]
fn rate_fit_on_synthetic_rows() {
    let rows: Vec<SweepRow> = ALPHAS.iter().map(|&a| synthetic(a, a)).collect();
    assert!((rate_fit(&rows).unwrap().slope - 1.0).abs() < 1e-12);
    let rows: Vec<SweepRow> = ALPHAS.iter().map(|&a| synthetic(a, a.sqrt())).collect();
    assert!((rate_fit(&rows).unwrap().slope - 0.5).abs() < 1e-12);
    assert!(rate_fit(&rows[..2]).is_err());
}
