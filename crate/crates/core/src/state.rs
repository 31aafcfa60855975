use crate::dynamics::StateDerivative;
use crate::error::{check_len, Result};
use crate::spectral::{CoeffsH, CoeffsY, SpectralBases};

/// Coefficients `(M_n, B_n, E_n)` of the finite system at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub m: CoeffsH,
    pub b: CoeffsY,
    pub e: CoeffsY,
    pub t: f64,
}

impl GalerkinState {
    pub fn zeros(bases: &SpectralBases) -> Self {
        GalerkinState {
            m: bases.mag.zeros(),
            b: bases.em.zeros(),
            e: bases.em.zeros(),
            t: 0.0,
        }
    }

    pub fn check_shape(&self, bases: &SpectralBases) -> Result<()> {
        check_len(bases.mag.num_modes(), self.m.modes())?;
        check_len(bases.em.num_modes(), self.b.modes())?;
        check_len(bases.em.num_modes(), self.e.modes())
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite() && self.b.is_finite() && self.e.is_finite() && self.t.is_finite()
    }

    /// Euclidean norm of the full coefficient vector; used by the blow-up guard.
    pub fn coefficient_norm(&self) -> f64 {
        crate::math::sqrt(self.m.norm_sq() + self.b.norm_sq() + self.e.norm_sq())
    }

    /// `self + s·d` (time unchanged).
    pub fn plus_scaled(&self, s: f64, d: &StateDerivative) -> Self {
        GalerkinState {
            m: self.m.plus_scaled(s, &d.dm),
            b: self.b.plus_scaled(s, &d.db),
            e: self.e.plus_scaled(s, &d.de),
            t: self.t,
        }
    }

    pub fn add_scaled(&mut self, s: f64, d: &StateDerivative) {
        *self = self.plus_scaled(s, d);
    }

    /// Squared coefficient distance `‖M−M'‖² + ‖B−B'‖² + ‖E−E'‖²`.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        self.m.sub(&other.m).norm_sq() + self.b.sub(&other.b).norm_sq() + self.e.sub(&other.e).norm_sq()
    }
}
