mod common;

use core::f64::consts::PI;

use proptest::prelude::*;
use spinwell_core::diagnostics::cross_identity_residual;
use spinwell_core::diagnostics::oracle::DenseOracle;
use spinwell_core::{CoeffsH, CoeffsY, Domain, GridField, MagnetizationBasis, SpectralBases};

fn small() -> SpectralBases {
    common::bases(3, 3)
}

#[test]
fn eigenvalue_on_uneven_box_by_hand() {
    let mag = MagnetizationBasis::with_default_quadrature([1.0, 2.0, 1.0], [3, 2, 1]).unwrap();
    let k = mag.mode_index([2, 1, 0]).unwrap();
    let expected = (PI * 2.0 / 1.0).powi(2) + (PI * 1.0 / 2.0).powi(2);
    assert!((mag.eigenvalue(k) - expected).abs() < 1e-12);
    assert!((expected - (4.0 * PI * PI + PI * PI / 4.0)).abs() < 1e-12);
}

#[test]
fn projecting_a_mode_gives_a_unit_coefficient() {
    let b = small();
    let mag = &b.mag;
    for k in [0, 5, mag.num_modes() - 1] {
        let values = (0..mag.num_nodes())
            .map(|i| [mag.mode_value(k, mag.node_coords(i)), 0.0, 0.0])
            .collect();
        let c = mag.project(&GridField::new(values, Domain::D)).unwrap();
        for (j, v) in c.as_slice().iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            assert!((v[0] - want).abs() < 1e-12);
            assert_eq!(v[1], 0.0);
        }
    }
    let zero = mag.project(&GridField::zeros(mag.num_nodes(), Domain::D)).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn projection_of_a_mode_sum_matches_the_dense_oracle() {
    let b = small();
    let mag = &b.mag;
    let (k1, k2) = (mag.mode_index([1, 0, 2]).unwrap(), mag.mode_index([0, 2, 1]).unwrap());
    let mut c = mag.zeros();
    c.as_mut_slice()[k1] = [1.0, 0.0, 0.0];
    c.as_mut_slice()[k2] = [2.0, 0.0, 0.0];
    let field = mag.synthesize(&c).unwrap();
    let fast = mag.project(&field).unwrap();
    let oracle = DenseOracle::new(mag, 2);
    let dense = oracle.project(&oracle.eval(&c));
    assert!((fast.as_slice()[k1][0] - 1.0).abs() < 1e-12);
    assert!((fast.as_slice()[k2][0] - 2.0).abs() < 1e-12);
    assert!(fast.sub(&dense).max_abs() < 1e-12);
}

#[test]
fn em_projection_of_a_mode_gives_a_unit_coefficient() {
    let b = small();
    let em = &b.em;
    let k = em.mode_index([2, 1, 4]).unwrap();
    let values = (0..em.num_nodes())
        .map(|i| [0.0, em.mode_value(k, em.node_coords(i)), 0.0])
        .collect();
    let c = em.project(&GridField::new(values, Domain::T)).unwrap();
    for (j, v) in c.as_slice().iter().enumerate() {
        let want = if j == k { 1.0 } else { 0.0 };
        assert!((v[1] - want).abs() < 1e-12);
    }
}

#[test]
fn em_gram_matrix_on_a_sample_of_modes() {
    let b = small();
    let em = &b.em;
    let picks = [0, 7, 31, em.num_modes() - 1];
    let vals: Vec<Vec<f64>> = picks
        .iter()
        .map(|k| (0..em.num_nodes()).map(|i| em.mode_value(*k, em.node_coords(i))).collect())
        .collect();
    for (a, va) in vals.iter().enumerate() {
        for (c, vc) in vals.iter().enumerate() {
            let g: f64 = em.weight() * va.iter().zip(vc).map(|(x, y)| x * y).sum::<f64>();
            let want = if a == c { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-12, "{a} {c} {g}");
        }
    }
}

#[test]
fn curl_is_self_adjoint_and_divergence_free() {
    let b = common::bases(4, 4);
    let mut r = common::rng(11);
    for _ in 0..10 {
        let u = common::random_y(&b, &mut r, 1.0);
        let v = common::random_y(&b, &mut r, 1.0);
        let cu = b.em.apply_curl(&u).unwrap();
        let cv = b.em.apply_curl(&v).unwrap();
        let lhs = cu.dot(&v);
        let rhs = u.dot(&cv);
        assert!((lhs - rhs).abs() < 1e-12 * cu.norm() * v.norm());
        // and through the grid
        let gl = b.em.synthesize(&cu).unwrap();
        let gv = b.em.synthesize(&v).unwrap();
        let grid = b.inner_product(&gl, &gv).unwrap();
        assert!((grid - lhs).abs() < 1e-12 * cu.norm() * v.norm());
        assert!(b.em.divergence(&cu).unwrap().iter().all(|d| d.abs() < 1e-12));
    }
}

#[test]
fn curl_acts_within_shells_of_equal_wavenumber() {
    let b = common::bases(3, 3);
    let em = &b.em;
    let k = em.mode_index([3, 2, 0]).unwrap();
    let mut c = em.zeros();
    c.as_mut_slice()[k] = [0.3, -1.0, 0.7];
    let norm = |w: [f64; 3]| (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let shell = norm(em.wave_vector(k));
    let cu = em.apply_curl(&c).unwrap();
    for (j, v) in cu.as_slice().iter().enumerate() {
        if v.iter().any(|x| *x != 0.0) {
            assert!((norm(em.wave_vector(j)) - shell).abs() < 1e-12);
        }
    }
}

#[test]
fn extension_examples() {
    let b = small();
    let ones = GridField::new(vec![[1.0, 0.0, 0.0]; b.mag.num_nodes()], Domain::D);
    let ext = b.extend_by_zero(&ones).unwrap();
    let on_box = ext.values.iter().filter(|v| **v == [1.0, 0.0, 0.0]).count();
    let outside = ext.values.iter().filter(|v| **v == [0.0; 3]).count();
    assert_eq!(on_box, b.mag.num_nodes());
    assert_eq!(on_box + outside, b.em.num_nodes());
    let zero = b.extend_by_zero(&GridField::zeros(b.mag.num_nodes(), Domain::D)).unwrap();
    assert!(zero.values.iter().all(|v| *v == [0.0; 3]));
    let c = GridField::new(vec![[0.5, -2.0, 3.0]; b.em.num_nodes()], Domain::T);
    let rest = b.restrict_to_d(&c).unwrap();
    assert!(rest.values.iter().all(|v| *v == [0.5, -2.0, 3.0]));
}

#[test]
fn inner_product_matches_refined_oracle() {
    let b = small();
    let mut r = common::rng(12);
    let u = common::random_m(&b, &mut r, 1.0);
    let v = common::random_m(&b, &mut r, 1.0);
    let fast = b
        .inner_product(&b.mag.synthesize(&u).unwrap(), &b.mag.synthesize(&v).unwrap())
        .unwrap();
    let oracle = DenseOracle::new(&b.mag, 2);
    let (eu, ev) = (oracle.eval(&u), oracle.eval(&v));
    let dense: f64 = oracle.weight()
        * eu.iter().zip(&ev).map(|(a, c)| a[0] * c[0] + a[1] * c[1] + a[2] * c[2]).sum::<f64>();
    assert!((fast - dense).abs() < 1e-12 * u.norm() * v.norm());
    assert!((fast - u.dot(&v)).abs() < 1e-12 * u.norm() * v.norm());
}

#[test]
fn weak_laplacian_identity_over_random_pairs() {
    let b = common::bases(4, 4);
    let mag = &b.mag;
    let mut r = common::rng(13);
    for _ in 0..100 {
        let m = common::random_m(&b, &mut r, 1.0);
        let u = common::random_m(&b, &mut r, 1.0);
        let lhs = mag.apply_laplacian(&m).unwrap().dot(&u);
        let mut rhs = 0.0;
        for axis in 0..3 {
            let gm = mag.gradient(&m, axis).unwrap();
            let gu = mag.gradient(&u, axis).unwrap();
            rhs -= b.inner_product(&gm, &gu).unwrap();
        }
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{lhs} {rhs}");
    }
}

#[test]
fn laplacian_examples() {
    let mag = MagnetizationBasis::with_default_quadrature([PI; 3], [2, 2, 2]).unwrap();
    let mut c = mag.zeros();
    c.as_mut_slice()[0] = [1.0, 2.0, 3.0];
    assert_eq!(mag.apply_laplacian(&c).unwrap().max_abs(), 0.0);
    let k = mag.mode_index([1, 0, 0]).unwrap();
    let mut d = mag.zeros();
    d.as_mut_slice()[k] = [1.0, -2.0, 0.5];
    let l = mag.apply_laplacian(&d).unwrap();
    for i in 0..3 {
        assert!((l.as_slice()[k][i] + d.as_slice()[k][i]).abs() < 1e-14);
    }
}

#[test]
fn cross_identity_over_random_pairs() {
    let b = common::bases(4, 4);
    let mut r = common::rng(14);
    for _ in 0..20 {
        let u = common::random_m(&b, &mut r, 1.0);
        let v = common::random_m(&b, &mut r, 1.0);
        assert!(cross_identity_residual(&b.mag, &u, &v).unwrap() < 1e-9);
    }
    let mut constant = b.mag.zeros();
    constant.as_mut_slice()[0] = [1.0, 0.0, 0.0];
    assert_eq!(cross_identity_residual(&b.mag, &constant, &constant).unwrap(), 0.0);
}

#[test]
fn length_mismatches_are_rejected() {
    let b = small();
    assert!(b.mag.synthesize(&CoeffsH::zeros(3)).is_err());
    assert!(b.em.synthesize(&CoeffsY::zeros(3)).is_err());
    assert!(b.mag.apply_laplacian(&CoeffsH::zeros(3)).is_err());
    assert!(b.em.apply_curl(&CoeffsY::zeros(3)).is_err());
    assert!(b.mag.project(&GridField::zeros(7, Domain::D)).is_err());
}

fn coeffs_strategy(n: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn synthesis_then_projection_is_identity(c in coeffs_strategy(27)) {
        let b = small();
        let c = CoeffsH::from_vec(c);
        let back = b.mag.project(&b.mag.synthesize(&c).unwrap()).unwrap();
        prop_assert!(back.sub(&c).max_abs() < 1e-13);
    }

    #[test]
    fn em_synthesis_then_projection_is_identity(c in coeffs_strategy(343)) {
        let b = small();
        let c = CoeffsY::from_vec(c);
        let back = b.em.project(&b.em.synthesize(&c).unwrap()).unwrap();
        prop_assert!(back.sub(&c).max_abs() < 1e-13);
    }

    #[test]
    fn extension_preserves_the_norm(c in coeffs_strategy(27)) {
        let b = small();
        let f = b.mag.synthesize(&CoeffsH::from_vec(c)).unwrap();
        let e = b.extend_by_zero(&f).unwrap();
        let nd = b.inner_product(&f, &f).unwrap();
        let nt = b.inner_product(&e, &e).unwrap();
        prop_assert!((nd - nt).abs() <= 1e-12 * nd.max(1.0));
        prop_assert_eq!(b.restrict_to_d(&e).unwrap(), f);
    }

    #[test]
    fn restriction_is_adjoint_to_extension(c in coeffs_strategy(343), d in coeffs_strategy(27)) {
        let b = small();
        let f = b.em.synthesize(&CoeffsY::from_vec(c)).unwrap();
        let g = b.mag.synthesize(&CoeffsH::from_vec(d)).unwrap();
        let lhs = b.inner_product(&b.restrict_to_d(&f).unwrap(), &g).unwrap();
        let rhs = b.inner_product(&f, &b.extend_by_zero(&g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}
