mod common;

use spinwell_core::diagnostics::oracle::{central_difference, mixed_second_difference};
use spinwell_core::{CoeffsH, EnergyBreakdown, EnergyFunctional, GalerkinState};

fn parts(b: &EnergyBreakdown) -> [f64; 4] {
    [b.anisotropy, b.exchange, b.zeeman, b.electric]
}

/// Central difference of each energy part separately, then summed; this keeps
/// the cancellation error at the scale of the individual parts.
fn fd_partwise(energy: &EnergyFunctional, at: impl Fn(f64) -> GalerkinState, h: f64) -> f64 {
    (0..4)
        .map(|i| central_difference(|e| parts(&energy.breakdown(&at(e)).unwrap())[i], h))
        .sum()
}

fn fd2_partwise(energy: &EnergyFunctional, at: impl Fn(f64, f64) -> GalerkinState, h: f64) -> f64 {
    (0..4)
        .map(|i| mixed_second_difference(|a, b| parts(&energy.breakdown(&at(a, b)).unwrap())[i], h))
        .sum()
}

#[test]
fn effective_field_is_minus_the_energy_gradient() {
    let model = common::model_with(common::default_bases(), 8, 0.1);
    let energy = model.energy();
    let mut r = common::rng(2);
    let s = common::random_state(&model.bases, &mut r);
    let rho = energy.effective_field(&s).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = common::random_m(&model.bases, &mut r, 1.0);
        let at = |e: f64| GalerkinState {
            m: s.m.plus_scaled(e, &u),
            ..s.clone()
        };
        let fd = fd_partwise(&energy, at, 1e-5);
        let an = -rho.dot(&u);
        worst = worst.max((fd - an).abs() / an.abs());
    }
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

#[test]
fn hessian_form_matches_mixed_differences() {
    let model = common::model_with(common::default_bases(), 8, 0.1);
    let energy = model.energy();
    let mut r = common::rng(3);
    let s = common::random_state(&model.bases, &mut r);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = common::random_m(&model.bases, &mut r, 1.0);
        let v = common::random_m(&model.bases, &mut r, 1.0);
        let at = |a: f64, b: f64| GalerkinState {
            m: s.m.plus_scaled(a, &u).plus_scaled(b, &v),
            ..s.clone()
        };
        let fd = fd2_partwise(&energy, at, 1e-3);
        let exact = energy.hessian_form(&s, &u, &v).unwrap();
        worst = worst.max((fd - exact).abs() / exact.abs());
    }
    assert!(worst < 1e-5, "worst relative error {worst:e}");
}

#[test]
fn hessian_in_the_cutoff_shell_matches_mixed_differences() {
    // a large constant mode pushes |M| into the blend region of φ
    let model = common::model_with(common::bases(4, 4), 4, 0.1);
    let energy = model.energy();
    let mut r = common::rng(4);
    let mut s = common::random_state(&model.bases, &mut r);
    let vol = model.bases.mag.volume().sqrt();
    s.m.as_mut_slice()[0] = [4.0 * vol, 3.5 * vol, 1.0 * vol];
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let u = common::random_m(&model.bases, &mut r, 1.0);
        let v = common::random_m(&model.bases, &mut r, 1.0);
        let at = |a: f64, b: f64| GalerkinState {
            m: s.m.plus_scaled(a, &u).plus_scaled(b, &v),
            ..s.clone()
        };
        let fd = fd2_partwise(&energy, at, 1e-2);
        let exact = energy.hessian_form(&s, &u, &v).unwrap();
        worst = worst.max((fd - exact).abs() / exact.abs());
    }
    assert!(worst < 1e-5, "worst relative error {worst:e}");
}

#[test]
fn field_gradients_match_finite_differences() {
    let model = common::model_with(common::bases(4, 4), 4, 0.1);
    let energy = model.energy();
    let mut r = common::rng(5);
    let s = common::random_state(&model.bases, &mut r);
    let gb = energy.grad_b(&s).unwrap();
    let ge = energy.grad_e(&s).unwrap();
    for _ in 0..5 {
        let d = common::random_y(&model.bases, &mut r, 1.0);
        let fd_b = central_difference(
            |e| {
                let t = GalerkinState { b: s.b.plus_scaled(e, &d), ..s.clone() };
                energy.total(&t).unwrap()
            },
            1e-5,
        );
        let fd_e = central_difference(
            |e| {
                let t = GalerkinState { e: s.e.plus_scaled(e, &d), ..s.clone() };
                energy.total(&t).unwrap()
            },
            1e-5,
        );
        assert!((fd_b - gb.dot(&d)).abs() < 1e-8 * gb.dot(&d).abs().max(1.0));
        assert!((fd_e - ge.dot(&d)).abs() < 1e-8 * ge.dot(&d).abs().max(1.0));
    }
}

#[test]
fn field_gradients_vanish_on_their_trivial_states() {
    let model = common::model_with(common::bases(4, 4), 4, 0.1);
    let energy = model.energy();
    let mut r = common::rng(6);
    let mut s = common::random_state(&model.bases, &mut r);
    s.b = model.bases.project_h_to_y(&s.m).unwrap();
    s.e = model.bases.em.zeros();
    assert_eq!(energy.grad_b(&s).unwrap().max_abs(), 0.0);
    assert_eq!(energy.grad_e(&s).unwrap().max_abs(), 0.0);
}

#[test]
fn stated_second_derivative_differs_by_the_projection_defect() {
    // ⟨u,v⟩ in place of ⟨π^Y ū, π^Y v̄⟩: the gap is exactly the truncation of π^Y
    let model = common::model_with(common::bases(4, 4), 4, 0.1);
    let energy = model.energy();
    let mut r = common::rng(7);
    let s = common::random_state(&model.bases, &mut r);
    let u: CoeffsH = common::random_m(&model.bases, &mut r, 1.0);
    let v = common::random_m(&model.bases, &mut r, 1.0);
    let gap = energy.hessian_form_stated(&s, &u, &v).unwrap() - energy.hessian_form(&s, &u, &v).unwrap();
    let pu = model.bases.project_h_to_y(&u).unwrap();
    let pv = model.bases.project_h_to_y(&v).unwrap();
    let expected = u.dot(&v) - pu.dot(&pv);
    assert!((gap - expected).abs() < 1e-12 * u.norm() * v.norm());
}
