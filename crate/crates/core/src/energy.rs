//! Anisotropy potential, the restricted energy functional and the effective
//! field `ρ_n = −∇_M E_n`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::math::{self, V3};
use crate::spectral::{CoeffsH, CoeffsY, SpectralBases};
use crate::state::GalerkinState;

pub type Mat3 = [[f64; 3]; 3];

/// Uniaxial anisotropy `K(1 − (m·a)²)` glued to zero by a quintic radial
/// blend on `R_c/2 ≤ |m| ≤ R_c`. The blend is C², so the potential is C² with
/// compact support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyPotential {
    easy_axis: V3,
    strength: f64,
    cutoff_radius: f64,
}

impl Default for AnisotropyPotential {
    fn default() -> Self {
        AnisotropyPotential {
            easy_axis: [0.0, 0.0, 1.0],
            strength: 0.5,
            cutoff_radius: 10.0,
        }
    }
}

impl AnisotropyPotential {
    /// `easy_axis` is normalized; `strength ≥ 0`; `cutoff_radius > √3`.
    pub fn new(easy_axis: V3, strength: f64, cutoff_radius: f64) -> Result<Self> {
        let n = math::norm(easy_axis);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "easy axis must be a nonzero vector, got {easy_axis:?}"
            )));
        }
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy strength must be nonnegative, got {strength}"
            )));
        }
        if !(cutoff_radius.is_finite() && cutoff_radius > math::sqrt(3.0)) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy cutoff radius must exceed sqrt(3), got {cutoff_radius}"
            )));
        }
        Ok(AnisotropyPotential {
            easy_axis: math::scale(1.0 / n, easy_axis),
            strength,
            cutoff_radius,
        })
    }

    pub fn easy_axis(&self) -> V3 {
        self.easy_axis
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.cutoff_radius
    }

    /// Radial blend `χ(r)` and its first two derivatives.
    fn blend(&self, r: f64) -> (f64, f64, f64) {
        let inner = 0.5 * self.cutoff_radius;
        if r <= inner {
            return (1.0, 0.0, 0.0);
        }
        if r >= self.cutoff_radius {
            return (0.0, 0.0, 0.0);
        }
        let width = self.cutoff_radius - inner;
        let t = (r - inner) / width;
        let s = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = -30.0 * t * t * (t - 1.0) * (t - 1.0);
        let dds = -60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
        (s, ds / width, dds / (width * width))
    }

    pub fn value(&self, m: V3) -> f64 {
        let (chi, _, _) = self.blend(math::norm(m));
        if chi == 0.0 {
            return 0.0;
        }
        let p = math::dot(m, self.easy_axis);
        chi * self.strength * (1.0 - p * p)
    }

    pub fn grad(&self, m: V3) -> V3 {
        let r = math::norm(m);
        let (chi, dchi, _) = self.blend(r);
        if chi == 0.0 {
            return [0.0; 3];
        }
        let a = self.easy_axis;
        let p = math::dot(m, a);
        let g = self.strength * (1.0 - p * p);
        let mut out = math::scale(-2.0 * self.strength * p * chi, a);
        if dchi != 0.0 {
            out = math::axpy(out, g * dchi / r, m);
        }
        out
    }

    pub fn hess(&self, m: V3) -> Mat3 {
        let r = math::norm(m);
        let (chi, dchi, ddchi) = self.blend(r);
        let mut h = [[0.0; 3]; 3];
        if chi == 0.0 {
            return h;
        }
        let a = self.easy_axis;
        let k = self.strength;
        let p = math::dot(m, a);
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] = -2.0 * k * chi * a[i] * a[j];
            }
        }
        if dchi != 0.0 || ddchi != 0.0 {
            let g = k * (1.0 - p * p);
            let dg = math::scale(-2.0 * k * p, a);
            let dchi_v = math::scale(dchi / r, m);
            for i in 0..3 {
                for j in 0..3 {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let hchi = ddchi * m[i] * m[j] / (r * r)
                        + dchi * (delta / r - m[i] * m[j] / (r * r * r));
                    h[i][j] += dg[i] * dchi_v[j] + dchi_v[i] * dg[j] + g * hchi;
                }
            }
        }
        h
    }
}

/// The four summands of `E_n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub anisotropy: f64,
    pub exchange: f64,
    pub zeeman: f64,
    pub electric: f64,
    pub total: f64,
}

/// Grid and coefficient data shared by the energy, the effective field and
/// the drift, so that each is computed once per evaluation.
#[derive(Debug, Clone)]
pub(crate) struct FieldEval {
    /// `M_n` at the box nodes.
    pub m_values: Vec<V3>,
    /// `B_n − π^Y M̄_n` (zero when the Maxwell coupling is off).
    pub zeeman_residual: CoeffsY,
    pub rho: CoeffsH,
    /// `ρ_n` at the box nodes.
    pub rho_values: Vec<V3>,
}

/// `E_n(M, B, E) = ∫_D φ(M) + ½‖∇M‖² + ½‖B − π^Y M̄‖² + ½‖E‖²`.
///
/// With `em_coupling` off the last two terms are dropped and the effective
/// field loses its Maxwell contribution.
#[derive(Debug, Clone, Copy)]
pub struct EnergyFunctional<'a> {
    pub bases: &'a SpectralBases,
    pub anisotropy: &'a AnisotropyPotential,
    pub em_coupling: bool,
}

impl<'a> EnergyFunctional<'a> {
    pub fn new(bases: &'a SpectralBases, anisotropy: &'a AnisotropyPotential) -> Self {
        EnergyFunctional {
            bases,
            anisotropy,
            em_coupling: true,
        }
    }

    pub fn breakdown(&self, s: &GalerkinState) -> Result<EnergyBreakdown> {
        s.check_shape(self.bases)?;
        let mag = &self.bases.mag;
        let m_values = mag.synth_values(s.m.as_slice());
        Ok(self.breakdown_with(s, &m_values))
    }

    pub(crate) fn breakdown_with(&self, s: &GalerkinState, m_values: &[V3]) -> EnergyBreakdown {
        let mag = &self.bases.mag;
        let anisotropy = mag.weight()
            * math::compensated_sum(m_values.iter().map(|m| self.anisotropy.value(*m)));
        let exchange = 0.5 * mag.grad_norm_sq(&s.m);
        let (zeeman, electric) = if self.em_coupling {
            let w = self.zeeman_residual(s);
            (0.5 * w.norm_sq(), 0.5 * s.e.norm_sq())
        } else {
            (0.0, 0.0)
        };
        EnergyBreakdown {
            anisotropy,
            exchange,
            zeeman,
            electric,
            total: anisotropy + exchange + zeeman + electric,
        }
    }

    pub fn total(&self, s: &GalerkinState) -> Result<f64> {
        Ok(self.breakdown(s)?.total)
    }

    fn zeeman_residual(&self, s: &GalerkinState) -> CoeffsY {
        let proj = self
            .bases
            .project_h_to_y(&s.m)
            .expect("state shape checked by the caller");
        s.b.sub(&proj)
    }

    /// `∂E_n/∂B = B_n − π^Y M̄_n`.
    pub fn grad_b(&self, s: &GalerkinState) -> Result<CoeffsY> {
        s.check_shape(self.bases)?;
        if !self.em_coupling {
            return Ok(self.bases.em.zeros());
        }
        Ok(self.zeeman_residual(s))
    }

    /// `∂E_n/∂E = E_n`.
    pub fn grad_e(&self, s: &GalerkinState) -> Result<CoeffsY> {
        s.check_shape(self.bases)?;
        if !self.em_coupling {
            return Ok(self.bases.em.zeros());
        }
        Ok(s.e.clone())
    }

    pub(crate) fn evaluate(&self, s: &GalerkinState) -> Result<FieldEval> {
        s.check_shape(self.bases)?;
        let mag = &self.bases.mag;
        let m_values = mag.synth_values(s.m.as_slice());
        let bracket: Vec<V3> = m_values
            .iter()
            .map(|m| math::scale(-1.0, self.anisotropy.grad(*m)))
            .collect();
        let mut rho = CoeffsH::from_vec(mag.project_values(&bracket));
        let zeeman_residual = if self.em_coupling {
            let w = self.zeeman_residual(s);
            rho = rho.plus_scaled(1.0, &self.bases.project_y_to_h(&w)?);
            w
        } else {
            self.bases.em.zeros()
        };
        for (r, (c, l)) in rho
            .as_mut_slice()
            .iter_mut()
            .zip(s.m.as_slice().iter().zip(mag.eigenvalues()))
        {
            *r = math::axpy(*r, -l, *c);
        }
        let rho_values = mag.synth_values(rho.as_slice());
        Ok(FieldEval {
            m_values,
            zeeman_residual,
            rho,
            rho_values,
        })
    }

    /// `ρ_n = π_n[−φ′(M_n) + 1_D(B_n − π^Y M̄_n)] + ΔM_n`.
    pub fn effective_field(&self, s: &GalerkinState) -> Result<CoeffsH> {
        Ok(self.evaluate(s)?.rho)
    }

    /// Exact second derivative of `E_n` in `M` along `(u, v)`:
    /// `∫φ″(M)(u,v) + ⟨∇u,∇v⟩ + ⟨π^Y ū, π^Y v̄⟩`.
    pub fn hessian_form(&self, s: &GalerkinState, u: &CoeffsH, v: &CoeffsH) -> Result<f64> {
        let mut out = self.hessian_local(s, u, v)? + self.grad_inner(u, v);
        if self.em_coupling {
            let pu = self.bases.project_h_to_y(u)?;
            let pv = self.bases.project_h_to_y(v)?;
            out += pu.dot(&pv);
        }
        Ok(out)
    }

    /// The second derivative in its continuous form,
    /// `∫φ″(M)(u,v) + ⟨u,v⟩_V` with `⟨u,v⟩_V = ⟨u,v⟩ + ⟨∇u,∇v⟩`.
    ///
    /// It coincides with [`hessian_form`](Self::hessian_form) only up to the
    /// truncation error of `π^Y` on the zero extensions.
    pub fn hessian_form_stated(&self, s: &GalerkinState, u: &CoeffsH, v: &CoeffsH) -> Result<f64> {
        Ok(self.hessian_local(s, u, v)? + self.grad_inner(u, v) + u.dot(v))
    }

    fn grad_inner(&self, u: &CoeffsH, v: &CoeffsH) -> f64 {
        u.as_slice()
            .iter()
            .zip(v.as_slice())
            .zip(self.bases.mag.eigenvalues())
            .map(|((a, b), l)| l * math::dot(*a, *b))
            .sum()
    }

    fn hessian_local(&self, s: &GalerkinState, u: &CoeffsH, v: &CoeffsH) -> Result<f64> {
        s.check_shape(self.bases)?;
        let mag = &self.bases.mag;
        check_len(mag.num_modes(), u.modes())?;
        check_len(mag.num_modes(), v.modes())?;
        let m = mag.synth_values(s.m.as_slice());
        let uu = mag.synth_values(u.as_slice());
        let vv = mag.synth_values(v.as_slice());
        let mut acc = 0.0;
        for ((mx, ux), vx) in m.iter().zip(&uu).zip(&vv) {
            let h = self.anisotropy.hess(*mx);
            for i in 0..3 {
                acc += ux[i] * (h[i][0] * vx[0] + h[i][1] * vx[1] + h[i][2] * vx[2]);
            }
        }
        Ok(mag.weight() * acc)
    }

    /// Zeeman energy with the unprojected extension, `½‖B_n − M̄_n‖²_{L²(T)}`,
    /// for comparison with the discrete term.
    pub fn zeeman_unprojected(&self, s: &GalerkinState) -> Result<f64> {
        s.check_shape(self.bases)?;
        let mag = &self.bases.mag;
        let m_values = mag.synth_values(s.m.as_slice());
        let b_box = self.bases.em.synth_on_box(s.b.as_slice());
        let cross = mag.grid_inner(&b_box, &m_values);
        Ok(0.5 * (s.b.norm_sq() - 2.0 * cross + s.m.norm_sq()))
    }
}
