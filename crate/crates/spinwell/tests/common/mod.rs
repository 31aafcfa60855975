#![allow(dead_code)]

use spinwell_core::{GalerkinState, SpectralBases};

/// Bytes of `golden_state`, written by a separate little-endian struct packer.
pub const GOLDEN: &[u8] = include_bytes!("../data/golden_v1.bin");

pub fn golden_state() -> (SpectralBases, GalerkinState) {
    let bases = SpectralBases::build([1.0, 2.0, 1.0], [2, 3, 1], [9, 13, 5], 2.0, [1, 1, 1]).unwrap();
    let mut s = GalerkinState::zeros(&bases);
    for (i, c) in s.m.as_mut_slice().iter_mut().enumerate() {
        *c = [i as f64, -0.5, 0.25 * i as f64];
    }
    for (j, c) in s.b.as_mut_slice().iter_mut().enumerate() {
        *c = [j as f64 / 8.0, -(j as f64), 1.5];
    }
    for (j, c) in s.e.as_mut_slice().iter_mut().enumerate() {
        *c = [0.0, 2f64.powi(-(j as i32)), -1.0];
    }
    s.t = 0.125;
    (bases, s)
}
