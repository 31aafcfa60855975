mod common;

use spinwell_core::diagnostics::oracle::{central_difference, DenseOracle};
use spinwell_core::{AnisotropyPotential, CoeffsH, EnergyFunctional, GalerkinState, SpectralBases};

const Z: [f64; 3] = [0.0, 0.0, 1.0];

fn aniso(k: f64) -> AnisotropyPotential {
    AnisotropyPotential::new(Z, k, 10.0).unwrap()
}

/// Constant unit field `a` as a coefficient vector.
fn constant(b: &SpectralBases, a: [f64; 3]) -> CoeffsH {
    let mut c = b.mag.zeros();
    let s = b.mag.volume().sqrt();
    c.as_mut_slice()[0] = [a[0] * s, a[1] * s, a[2] * s];
    c
}

#[test]
fn potential_examples() {
    let p = aniso(0.7);
    assert_eq!(p.value(Z), 0.0);
    let g = p.grad(Z);
    assert_eq!(g, [0.0, 0.0, -1.4]);
    assert!((p.value([1.0, 0.0, 0.0]) - 0.7).abs() < 1e-15);
    assert!((p.value([0.0, 0.6, 0.8]) - 0.7 * (1.0 - 0.64)).abs() < 1e-15);
}

#[test]
fn potential_gradient_matches_central_differences_inside_half_radius() {
    let p = AnisotropyPotential::new([0.6, 0.0, 0.8], 1.3, 10.0).unwrap();
    let mut r = common::rng(21);
    use rand::Rng;
    for _ in 0..200 {
        let m: [f64; 3] = [0, 1, 2].map(|_| r.random_range(-2.8..2.8));
        let g = p.grad(m);
        for i in 0..3 {
            let fd = central_difference(
                |e| {
                    let mut x = m;
                    x[i] += e;
                    p.value(x)
                },
                1e-5,
            );
            assert!((fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1e-3), "{m:?} {i}");
        }
    }
}

#[test]
fn potential_vanishes_beyond_the_cutoff_and_is_nonnegative() {
    let p = aniso(2.0);
    for r in [10.0, 10.5, 40.0] {
        let m = [r * 0.6, 0.0, r * 0.8];
        assert_eq!(p.value(m), 0.0);
        assert_eq!(p.grad(m), [0.0; 3]);
        assert_eq!(p.hess(m), [[0.0; 3]; 3]);
    }
    // nonnegative on the unit ball, where |m·a| ≤ 1
    for i in 0..2000 {
        let r = i as f64 * 5e-4;
        let th = i as f64 * 0.37;
        assert!(p.value([r * th.sin(), 0.0, r * th.cos()]) >= 0.0);
    }
    // the exact uniaxial form on |m| ≤ R_c/2 is negative past |m·a| = 1
    assert!(p.value([0.0, 0.0, 2.0]) < 0.0);
}

#[test]
fn energy_of_easy_axis_constant_field() {
    let b = common::bases(3, 3);
    let a = aniso(0.5);
    let energy = EnergyFunctional::new(&b, &a);
    let s = GalerkinState {
        m: constant(&b, Z),
        ..GalerkinState::zeros(&b)
    };
    let e = energy.breakdown(&s).unwrap();
    assert!(e.anisotropy.abs() < 1e-12);
    assert_eq!(e.exchange, 0.0);
    assert_eq!(e.electric, 0.0);
    // without the projection onto Y_n the Zeeman energy is ½|D|
    let vol = b.mag.volume();
    assert!((energy.zeeman_unprojected(&s).unwrap() - 0.5 * vol).abs() < 1e-12 * vol);
    // the discrete term keeps only the band-limited part of the zero extension
    assert!(e.zeeman < 0.5 * vol);
    assert!((e.zeeman - zeeman_brute_force(&b, Z)).abs() < 1e-12 * vol);
}

/// `½ Σ_m (h³ Σ_{x∈D} a·y_m(x))²` by direct summation over modes and box nodes.
fn zeeman_brute_force(b: &SpectralBases, a: [f64; 3]) -> f64 {
    let em = &b.em;
    let mag = &b.mag;
    let off = em.box_offset();
    let mut total = 0.0;
    for k in 0..em.num_modes() {
        let mut acc = 0.0;
        for i in 0..mag.num_nodes() {
            let x = mag.node_coords(i);
            acc += em.mode_value(k, [x[0] + off[0], x[1] + off[1], x[2] + off[2]]);
        }
        let c = mag.weight() * acc;
        total += c * c * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    }
    0.5 * total
}

#[test]
fn energy_of_zero_state_is_k_times_volume() {
    let b = common::bases(3, 3);
    let a = aniso(0.5);
    let e = EnergyFunctional::new(&b, &a).breakdown(&GalerkinState::zeros(&b)).unwrap();
    assert!((e.total - 0.5 * b.mag.volume()).abs() < 1e-12 * b.mag.volume());
    assert_eq!(e.total, e.anisotropy);
}

#[test]
fn energy_parts_match_independent_quadrature() {
    let b = common::bases(4, 4);
    let a = aniso(0.5);
    let energy = EnergyFunctional::new(&b, &a);
    let mut r = common::rng(22);
    let s = common::random_state(&b, &mut r);
    let e = energy.breakdown(&s).unwrap();
    for part in [e.anisotropy, e.exchange, e.zeeman, e.electric] {
        assert!(part >= 0.0);
    }
    assert!((e.total - (e.anisotropy + e.exchange + e.zeeman + e.electric)).abs() < 1e-12 * e.total);

    let oracle = DenseOracle::new(&b.mag, 2);
    let dense_aniso: f64 = oracle.weight() * oracle.eval(&s.m).iter().map(|m| a.value(*m)).sum::<f64>();
    assert!((e.anisotropy - dense_aniso).abs() < 1e-9 * e.anisotropy);

    let mut exch = 0.0;
    for axis in 0..3 {
        let g = b.mag.gradient(&s.m, axis).unwrap();
        exch += 0.5 * b.inner_product(&g, &g).unwrap();
    }
    assert!((e.exchange - exch).abs() < 1e-9 * e.exchange);

    let eg = b.em.synthesize(&s.e).unwrap();
    assert!((e.electric - 0.5 * b.inner_product(&eg, &eg).unwrap()).abs() < 1e-9 * e.electric);

    let pm = b.em.project(&b.extend_by_zero(&b.mag.synthesize(&s.m).unwrap()).unwrap()).unwrap();
    let w = s.b.sub(&pm);
    assert!((e.zeeman - 0.5 * w.norm_sq()).abs() < 1e-9 * e.zeeman);
}

#[test]
fn finer_quadrature_leaves_band_limited_parts_unchanged() {
    let coarse = common::bases(3, 3);
    let fine = SpectralBases::build([2.0 * core::f64::consts::PI; 3], [3; 3], [26; 3], 2.0, [3; 3]).unwrap();
    let a = aniso(0.5);
    let mut r = common::rng(23);
    let s = common::random_state(&coarse, &mut r);
    let ec = EnergyFunctional::new(&coarse, &a).breakdown(&s).unwrap();
    let ef = EnergyFunctional::new(&fine, &a).breakdown(&s).unwrap();
    assert!((ec.anisotropy - ef.anisotropy).abs() < 1e-9 * ec.anisotropy);
    assert!((ec.exchange - ef.exchange).abs() < 1e-9 * ec.exchange);
    assert!((ec.electric - ef.electric).abs() < 1e-9 * ec.electric);
}

#[test]
fn effective_field_of_constant_field_without_anisotropy() {
    let b = common::bases(3, 3);
    let a = aniso(0.0);
    let energy = EnergyFunctional::new(&b, &a);
    let s = GalerkinState {
        m: constant(&b, [0.6, 0.0, 0.8]),
        ..GalerkinState::zeros(&b)
    };
    let rho = energy.effective_field(&s).unwrap();
    // π_n[1_D(−π^Y M̄)] along the full grids
    let pm = b.em.project(&b.extend_by_zero(&b.mag.synthesize(&s.m).unwrap()).unwrap()).unwrap();
    let back = b.restrict_to_d(&b.em.synthesize(&pm).unwrap()).unwrap();
    let expected = b.mag.project(&back).unwrap().scaled(-1.0);
    assert!(rho.sub(&expected).max_abs() < 1e-12);
}

#[test]
fn effective_field_of_single_mode_is_the_laplacian() {
    let b = common::bases(3, 3);
    let a = aniso(0.0);
    let energy = EnergyFunctional {
        bases: &b,
        anisotropy: &a,
        em_coupling: false,
    };
    let k = b.mag.mode_index([1, 2, 0]).unwrap();
    let mut m = b.mag.zeros();
    m.as_mut_slice()[k] = [0.5, -0.25, 1.0];
    let s = GalerkinState {
        m: m.clone(),
        ..GalerkinState::zeros(&b)
    };
    let rho = energy.effective_field(&s).unwrap();
    let expected = m.scaled(-b.mag.eigenvalue(k));
    assert!(rho.sub(&expected).max_abs() < 1e-12);
}

#[test]
fn shape_mismatch_is_rejected() {
    let b = common::bases(3, 3);
    let other = common::bases(2, 3);
    let a = aniso(0.5);
    let energy = EnergyFunctional::new(&b, &a);
    assert!(energy.breakdown(&GalerkinState::zeros(&other)).is_err());
    assert!(energy.effective_field(&GalerkinState::zeros(&other)).is_err());
}
