//! Preset initial data `M_n(0) = π_n M₀`, `B_n(0)`, `E_n(0)`.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{self, V3};
use crate::spectral::{CoeffsH, CoeffsY, SpectralBases};
use crate::state::GalerkinState;

/// Unit-length magnetization profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagnetizationInit {
    /// `M₀ ≡ a/|a|`.
    Constant(V3),
    /// Rotation from `+z` to `−z` across the box along `x₁`:
    /// `θ(x₁) = π(1 − cos(πx₁/L₁))/2`, `M₀ = (sin θ, 0, cos θ)`.
    Wall,
}

/// Initial magnetic induction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InductionInit {
    Zero,
    /// A divergence-free low mode of the given coefficient norm (the curl of a
    /// fixed low-mode vector potential).
    CurlMode { amplitude: f64 },
}

impl MagnetizationInit {
    pub fn value_at(&self, x: V3, box_lengths: [f64; 3]) -> V3 {
        match *self {
            MagnetizationInit::Constant(a) => math::scale(1.0 / math::norm(a), a),
            MagnetizationInit::Wall => {
                let theta = 0.5 * PI * (1.0 - math::cos(PI * x[0] / box_lengths[0]));
                [math::sin(theta), 0.0, math::cos(theta)]
            }
        }
    }
}

pub fn initial_magnetization(bases: &SpectralBases, init: MagnetizationInit) -> Result<CoeffsH> {
    if let MagnetizationInit::Constant(a) = init {
        let n = math::norm(a);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "constant magnetization direction must be nonzero, got {a:?}"
            )));
        }
    }
    let mag = &bases.mag;
    let l = mag.box_lengths();
    let values: alloc::vec::Vec<V3> = (0..mag.num_nodes())
        .map(|i| init.value_at(mag.node_coords(i), l))
        .collect();
    Ok(CoeffsH::from_vec(mag.project_values(&values)))
}

pub fn initial_induction(bases: &SpectralBases, init: InductionInit) -> Result<CoeffsY> {
    let em = &bases.em;
    match init {
        InductionInit::Zero => Ok(em.zeros()),
        InductionInit::CurlMode { amplitude } => {
            let mut potential = em.zeros();
            let fpa = em.functions_per_axis();
            let pick = |f: [usize; 3]| em.mode_index([0, 1, 2].map(|i| f[i].min(fpa[i] - 1)));
            if let Some(i) = pick([1, 2, 0]) {
                potential.as_mut_slice()[i][2] += 1.0;
            }
            if let Some(i) = pick([0, 1, 2]) {
                potential.as_mut_slice()[i][0] += 1.0;
            }
            if let Some(i) = pick([2, 0, 1]) {
                potential.as_mut_slice()[i][1] += 1.0;
            }
            let b = em.leray_project(&em.apply_curl(&potential)?)?;
            let n = b.norm();
            if n == 0.0 {
                return Ok(b);
            }
            Ok(b.scaled(amplitude / n))
        }
    }
}

pub fn initial_state(
    bases: &SpectralBases,
    m: MagnetizationInit,
    b: InductionInit,
) -> Result<GalerkinState> {
    Ok(GalerkinState {
        m: initial_magnetization(bases, m)?,
        b: initial_induction(bases, b)?,
        e: bases.em.zeros(),
        t: 0.0,
    })
}
