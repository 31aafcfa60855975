#![allow(dead_code)]

use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinwell_core::{
    AnisotropyPotential, CoeffsH, CoeffsY, ForcingF, GalerkinState, Model, ModelParams,
    NoiseFamily, SpectralBases,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Box (2π)³ with `modes` cosines per axis, 4n+1 nodes, torus twice the box.
pub fn bases(modes: usize, em_wavenumber: usize) -> SpectralBases {
    SpectralBases::build(
        [2.0 * PI; 3],
        [modes; 3],
        [4 * modes + 1; 3],
        2.0,
        [em_wavenumber; 3],
    )
    .unwrap()
}

pub fn default_bases() -> SpectralBases {
    bases(8, 8)
}

fn uniform(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(-1.0..1.0)
}

/// Coefficients with amplitude decaying like `1/(1+λ_k)`.
pub fn random_m(bases: &SpectralBases, r: &mut ChaCha8Rng, amplitude: f64) -> CoeffsH {
    let mag = &bases.mag;
    CoeffsH::from_vec(
        (0..mag.num_modes())
            .map(|k| {
                let s = amplitude / (1.0 + mag.eigenvalue(k));
                [s * uniform(r), s * uniform(r), s * uniform(r)]
            })
            .collect(),
    )
}

pub fn random_y(bases: &SpectralBases, r: &mut ChaCha8Rng, amplitude: f64) -> CoeffsY {
    let em = &bases.em;
    CoeffsY::from_vec(
        (0..em.num_modes())
            .map(|k| {
                let w = em.wave_vector(k);
                let s = amplitude / (1.0 + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
                [s * uniform(r), s * uniform(r), s * uniform(r)]
            })
            .collect(),
    )
}

pub fn random_state(bases: &SpectralBases, r: &mut ChaCha8Rng) -> GalerkinState {
    GalerkinState {
        m: random_m(bases, r, 1.0),
        b: random_y(bases, r, 1.0),
        e: random_y(bases, r, 1.0),
        t: 0.0,
    }
}

pub fn model_with(bases: SpectralBases, noise_modes: usize, amplitude: f64) -> Model {
    let noise = NoiseFamily::lowest_modes(&bases.mag, noise_modes, amplitude, 2.0).unwrap();
    Model::new(
        bases,
        AnisotropyPotential::default(),
        noise,
        ForcingF::zero(),
        ModelParams::default(),
    )
    .unwrap()
}
