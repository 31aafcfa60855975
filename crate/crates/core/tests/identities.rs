mod common;

use std::time::Instant;

use spinwell_core::diagnostics::{
    cross_identity_residual, curl_pairing_residual, norm_identity_residuals, rho_cross_residuals,
};

#[test]
fn identities_at_default_resolution() {
    let model = common::model_with(common::default_bases(), 8, 0.1);
    let mut r = common::rng(1);
    let start = Instant::now();
    let mut worst = [0.0f64; 6];
    for _ in 0..5 {
        let s = common::random_state(&model.bases, &mut r);
        let v = common::random_m(&model.bases, &mut r, 1.0);
        let (a, b) = norm_identity_residuals(&model, &s).unwrap();
        let (c, d) = rho_cross_residuals(&model, &s).unwrap();
        let e = curl_pairing_residual(&model, &s).unwrap();
        let f = cross_identity_residual(&model.bases.mag, &s.m, &v).unwrap();
        for (w, x) in worst.iter_mut().zip([a, b, c, d, e, f]) {
            *w = w.max(x);
        }
    }
    println!("{:?} in {:?}", worst, start.elapsed());
    assert!(worst.iter().all(|w| *w < 1e-8));
}
