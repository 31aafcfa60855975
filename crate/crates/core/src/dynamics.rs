//! Drift and diffusion of the coupled finite system for `(M_n, B_n, E_n)`.

use alloc::format;
use alloc::vec::Vec;

use crate::energy::{AnisotropyPotential, EnergyBreakdown, EnergyFunctional, FieldEval};
use crate::error::{check_len, Error, Result};
use crate::math::{self, V3};
use crate::noise::{Diffusion, NoiseFamily};
use crate::spectral::{CoeffsH, CoeffsY, SpectralBases};
use crate::state::GalerkinState;

pub use crate::noise::ItoCorrection;

/// Sign convention of the induction law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InductionSign {
    /// `dB = −π^Y[∇×E] dt`, as in the Galerkin system.
    #[default]
    Galerkin,
    /// `dB = +∇×E dt`, the sign of the continuous problem statement; only for
    /// comparison runs.
    Stated,
}

/// Scalar parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Couple the magnetization to Maxwell's equations. When off, `B` and `E`
    /// are frozen and drop out of the energy and the effective field.
    pub em_coupling: bool,
    pub induction_sign: InductionSign,
    pub correction: ItoCorrection,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            lambda1: 1.0,
            lambda2: 0.5,
            em_coupling: true,
            induction_sign: InductionSign::Galerkin,
            correction: ItoCorrection::ChainRule,
        }
    }
}

/// Applied current `f`, constant in time on `[0, horizon]`, supported in `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingF {
    coeffs: Option<CoeffsH>,
    horizon: f64,
}

impl ForcingF {
    pub fn zero() -> Self {
        ForcingF {
            coeffs: None,
            horizon: f64::INFINITY,
        }
    }

    pub fn constant(coeffs: CoeffsH, horizon: f64) -> Self {
        ForcingF {
            coeffs: Some(coeffs),
            horizon,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_none()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Coefficients at time `t` (`None` for the zero forcing).
    pub fn at(&self, t: f64) -> Result<Option<&CoeffsH>> {
        // a little slack for accumulated time stepping
        let slack = 1e-9 * self.horizon.max(1.0);
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::ForcingOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(self.coeffs.as_ref())
    }
}

/// `(dM, dB, dE)` for one of the stacked vector fields.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub dm: CoeffsH,
    pub db: CoeffsY,
    pub de: CoeffsY,
}

impl StateDerivative {
    pub fn zeros(bases: &SpectralBases) -> Self {
        StateDerivative {
            dm: bases.mag.zeros(),
            db: bases.em.zeros(),
            de: bases.em.zeros(),
        }
    }

    pub fn plus_scaled(&self, s: f64, other: &Self) -> Self {
        StateDerivative {
            dm: self.dm.plus_scaled(s, &other.dm),
            db: self.db.plus_scaled(s, &other.db),
            de: self.de.plus_scaled(s, &other.de),
        }
    }
}

/// Quantities of one state evaluation shared by the stepper and diagnostics.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub field: FieldEval,
    pub energy: EnergyBreakdown,
    /// Stratonovich drift: LLG terms without the Itô correction, plus Maxwell.
    pub drift: StateDerivative,
    /// `‖M×ρ‖²`
    pub m_cross_rho_sq: f64,
    /// `−λ₂‖M×ρ‖² − ‖1_D E‖² − ⟨f, 1_D E⟩`
    pub energy_rate: f64,
    /// `⟨∇E_n, Ĝ_jn⟩ = −⟨ρ_n, G_jn⟩` for every `j` (empty when not requested).
    pub noise_pairings: Vec<f64>,
    /// `Σ_j dW_j G_jn(M)` for the increment passed to the evaluation.
    pub noise_increment: Option<CoeffsH>,
}

/// The assembled finite-dimensional model.
#[derive(Debug, Clone)]
pub struct Model {
    pub bases: SpectralBases,
    pub anisotropy: AnisotropyPotential,
    pub noise: NoiseFamily,
    pub forcing: ForcingF,
    pub params: ModelParams,
}

impl Model {
    pub fn new(
        bases: SpectralBases,
        anisotropy: AnisotropyPotential,
        noise: NoiseFamily,
        forcing: ForcingF,
        params: ModelParams,
    ) -> Result<Self> {
        if !(params.lambda2.is_finite() && params.lambda2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda2 must be > 0 (Gilbert damping), got {}",
                params.lambda2
            )));
        }
        if !params.lambda1.is_finite() {
            return Err(Error::InvalidParameter("lambda1 must be finite".into()));
        }
        for j in 0..noise.len() {
            check_len(bases.mag.num_modes(), noise.mode(j).modes())?;
        }
        if let Some(f) = forcing.coeffs.as_ref() {
            check_len(bases.mag.num_modes(), f.modes())?;
        }
        Ok(Model {
            bases,
            anisotropy,
            noise,
            forcing,
            params,
        })
    }

    pub fn energy(&self) -> EnergyFunctional<'_> {
        EnergyFunctional {
            bases: &self.bases,
            anisotropy: &self.anisotropy,
            em_coupling: self.params.em_coupling,
        }
    }

    pub fn diffusion(&self) -> Diffusion<'_> {
        Diffusion::new(
            &self.bases.mag,
            &self.noise,
            self.params.lambda1,
            self.params.lambda2,
        )
    }

    pub fn effective_field(&self, s: &GalerkinState) -> Result<CoeffsH> {
        self.energy().effective_field(s)
    }

    /// `λ₁π_n[M×ρ_n] − λ₂π_n[M×(M×ρ_n)]` and `‖M×ρ_n‖²`.
    fn llg_terms(&self, f: &FieldEval) -> (CoeffsH, f64) {
        let mag = &self.bases.mag;
        let (l1, l2) = (self.params.lambda1, self.params.lambda2);
        let mut cross_sq = 0.0;
        let integrand: Vec<V3> = f
            .m_values
            .iter()
            .zip(&f.rho_values)
            .map(|(m, r)| {
                let x = math::cross(*m, *r);
                cross_sq += math::norm_sq(x);
                math::axpy(math::scale(l1, x), -l2, math::cross(*m, x))
            })
            .collect();
        (
            CoeffsH::from_vec(mag.project_values(&integrand)),
            mag.weight() * cross_sq,
        )
    }

    /// `F_n`: the LLG terms plus the Itô correction of the configured kind.
    pub fn drift_f(&self, s: &GalerkinState) -> Result<CoeffsH> {
        let f = self.energy().evaluate(s)?;
        let (llg, _) = self.llg_terms(&f);
        let corr = self
            .diffusion()
            .correction_from_values(self.params.correction, &f.m_values);
        Ok(llg.plus_scaled(1.0, &corr))
    }

    /// `F_n` without the correction (the Stratonovich drift of `M_n`).
    pub fn drift_f_stratonovich(&self, s: &GalerkinState) -> Result<CoeffsH> {
        let f = self.energy().evaluate(s)?;
        Ok(self.llg_terms(&f).0)
    }

    /// `(dE, dB)` of the Maxwell subsystem at time `s.t`.
    pub fn maxwell_rhs(&self, s: &GalerkinState) -> Result<(CoeffsY, CoeffsY)> {
        s.check_shape(&self.bases)?;
        if !self.params.em_coupling {
            return Ok((self.bases.em.zeros(), self.bases.em.zeros()));
        }
        let w = self.energy().grad_b(s)?;
        let (de, db, _) = self.maxwell_from(s, &w)?;
        Ok((de, db))
    }

    /// Returns `(dE, dB, −‖1_D E‖² − ⟨f, 1_D E⟩)`.
    fn maxwell_from(&self, s: &GalerkinState, w: &CoeffsY) -> Result<(CoeffsY, CoeffsY, f64)> {
        let em = &self.bases.em;
        let mut damping = self.bases.mask_y(&s.e)?;
        let mut rate = -s.e.dot(&damping);
        if let Some(f) = self.forcing.at(s.t)? {
            rate -= f.dot(&self.bases.project_y_to_h(&s.e)?);
            damping = damping.plus_scaled(1.0, &self.bases.project_h_to_y(f)?);
        }
        let de = em.apply_curl(w)?.plus_scaled(-1.0, &damping);
        let curl_e = em.apply_curl(&s.e)?;
        let db = match self.params.induction_sign {
            InductionSign::Galerkin => curl_e.scaled(-1.0),
            InductionSign::Stated => curl_e,
        };
        Ok((de, db, rate))
    }

    /// Itô drift `F̂_n = (F_n, dE, dB)` stacked as `(dm, db, de)`.
    pub fn full_drift(&self, s: &GalerkinState) -> Result<StateDerivative> {
        let ev = self.evaluate(s)?;
        let corr = self
            .diffusion()
            .correction_from_values(self.params.correction, &ev.field.m_values);
        let mut d = ev.drift;
        d.dm = d.dm.plus_scaled(1.0, &corr);
        Ok(d)
    }

    /// Stratonovich drift: [`full_drift`](Self::full_drift) without the correction.
    pub fn stratonovich_drift(&self, s: &GalerkinState) -> Result<StateDerivative> {
        Ok(self.evaluate(s)?.drift)
    }

    /// `Ĝ_jn = (G_jn(M), 0, 0)`.
    pub fn full_diffusion(&self, j: usize, s: &GalerkinState) -> Result<StateDerivative> {
        s.check_shape(&self.bases)?;
        let g = self.diffusion().g(j, &s.m)?;
        let mut d = StateDerivative::zeros(&self.bases);
        d.dm = g;
        Ok(d)
    }

    /// `Σ_j dW_j G_jn(M)` with a single projection.
    pub(crate) fn diffusion_increment(&self, m_values: &[V3], dw: &[f64]) -> CoeffsH {
        let (_, acc) = self
            .diffusion()
            .pairings_and_increment(m_values, None, Some(dw));
        CoeffsH::from_vec(self.bases.mag.project_values(&acc.expect("increment requested")))
    }

    pub(crate) fn evaluate(&self, s: &GalerkinState) -> Result<Evaluation> {
        self.evaluate_with(s, true, None)
    }

    /// Full evaluation; the noise pairings only when `pairings` is set and the
    /// diffusion increment only for a given `dw`, both in one pass.
    pub(crate) fn evaluate_with(
        &self,
        s: &GalerkinState,
        pairings: bool,
        dw: Option<&[f64]>,
    ) -> Result<Evaluation> {
        let energy_fn = self.energy();
        let field = energy_fn.evaluate(s)?;
        let energy = energy_fn.breakdown_with(s, &field.m_values);
        let (dm, m_cross_rho_sq) = self.llg_terms(&field);
        let (de, db, em_rate) = if self.params.em_coupling {
            self.maxwell_from(s, &field.zeeman_residual)?
        } else {
            (self.bases.em.zeros(), self.bases.em.zeros(), 0.0)
        };
        let dw = dw.filter(|_| !self.noise.is_empty());
        let (noise_pairings, incr) = if pairings || dw.is_some() {
            self.diffusion().pairings_and_increment(
                &field.m_values,
                pairings.then_some(&field.rho_values[..]),
                dw,
            )
        } else {
            (Vec::new(), None)
        };
        let noise_increment =
            incr.map(|v| CoeffsH::from_vec(self.bases.mag.project_values(&v)));
        Ok(Evaluation {
            noise_increment,
            energy,
            drift: StateDerivative { dm, db, de },
            m_cross_rho_sq,
            energy_rate: -self.params.lambda2 * m_cross_rho_sq + em_rate,
            noise_pairings,
            field,
        })
    }

    /// `⟨∇E_n, v⟩` for a stacked vector `v`.
    pub fn energy_pairing(&self, s: &GalerkinState, v: &StateDerivative) -> Result<f64> {
        let f = self.energy().evaluate(s)?;
        let mut out = -f.rho.dot(&v.dm);
        if self.params.em_coupling {
            out += f.zeeman_residual.dot(&v.db) + s.e.dot(&v.de);
        }
        Ok(out)
    }

    /// `−λ₂‖M×ρ_n‖² − ‖1_D E‖² − ⟨f, 1_D E⟩`, the Stratonovich energy rate.
    pub fn energy_rate(&self, s: &GalerkinState) -> Result<f64> {
        Ok(self.evaluate(s)?.energy_rate)
    }
}
