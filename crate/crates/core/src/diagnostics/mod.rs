//! Residuals of the identities the finite system satisfies, estimates of
//! moments and path regularity, and brute-force reference implementations.

pub mod oracle;

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::dynamics::Model;
use crate::error::{check_len, Result};
use crate::math::{self, V3};
use crate::spectral::{CoeffsH, CoeffsY, EmBasis, MagnetizationBasis, SpectralBases};
use crate::state::GalerkinState;

fn relative(residual: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// A random state for identity checks: every coefficient uniform in
/// `[−1, 1]`, damped by `1/(1 + |k|²)` of its mode so that point values stay
/// of order one.
pub fn random_state<R: Rng + ?Sized>(bases: &SpectralBases, rng: &mut R) -> GalerkinState {
    let mut draw = |s: f64| -> V3 { [0, 1, 2].map(|_| s * rng.random_range(-1.0..1.0)) };
    let mag = &bases.mag;
    let m = (0..mag.num_modes())
        .map(|k| draw(1.0 / (1.0 + mag.eigenvalue(k))))
        .collect();
    let em = &bases.em;
    let mut y = || -> CoeffsY {
        CoeffsY::from_vec(
            (0..em.num_modes())
                .map(|k| {
                    let w = em.wave_vector(k);
                    draw(1.0 / (1.0 + math::dot(w, w)))
                })
                .collect(),
        )
    };
    let b = y();
    let e = y();
    GalerkinState {
        m: CoeffsH::from_vec(m),
        b,
        e,
        t: 0.0,
    }
}

/// `(|2⟨M,F_n⟩ + Σ‖G_jn‖²|, max_j |⟨M,G_jn⟩|)`, both divided by `‖M‖²`.
pub fn norm_identity_residuals(model: &Model, s: &GalerkinState) -> Result<(f64, f64)> {
    let f = model.drift_f(s)?;
    let diff = model.diffusion();
    let mut g_sq = 0.0;
    let mut orth: f64 = 0.0;
    for j in 0..model.noise.len() {
        let g = diff.g(j, &s.m)?;
        g_sq += g.norm_sq();
        orth = orth.max(s.m.dot(&g).abs());
    }
    let scale = s.m.norm_sq();
    Ok((
        relative((2.0 * s.m.dot(&f) + g_sq).abs(), scale),
        relative(orth, scale),
    ))
}

/// Noise-free energy rate: `|⟨∇E_n, drift⟩ − (−λ₂‖M×ρ‖² − ‖1_D E‖² − ⟨f,1_D E⟩)|`,
/// relative to the largest of the terms.
pub fn energy_rate_residual(model: &Model, s: &GalerkinState) -> Result<f64> {
    let drift = model.stratonovich_drift(s)?;
    let lhs = model.energy_pairing(s, &drift)?;
    let ev = model.evaluate(s)?;
    let rhs = ev.energy_rate;
    let scale = (model.params.lambda2 * ev.m_cross_rho_sq)
        .max(rhs.abs())
        .max(lhs.abs());
    Ok(relative((lhs - rhs).abs(), scale))
}

/// `(|⟨ρ, π[M×ρ]⟩|, |⟨ρ, π[M×(M×ρ)]⟩ + ‖M×ρ‖²|)`, relative to `‖ρ‖·‖M×ρ‖`
/// and `‖M×ρ‖²`.
pub fn rho_cross_residuals(model: &Model, s: &GalerkinState) -> Result<(f64, f64)> {
    let mag = &model.bases.mag;
    let rho = model.effective_field(s)?;
    let m = mag.synth_values(s.m.as_slice());
    let r = mag.synth_values(rho.as_slice());
    let x: Vec<V3> = m.iter().zip(&r).map(|(m, r)| math::cross(*m, *r)).collect();
    let z: Vec<V3> = m.iter().zip(&x).map(|(m, x)| math::cross(*m, *x)).collect();
    let px = CoeffsH::from_vec(mag.project_values(&x));
    let pz = CoeffsH::from_vec(mag.project_values(&z));
    let x_sq = mag.grid_inner(&x, &x);
    let first = rho.dot(&px).abs();
    let second = (rho.dot(&pz) + x_sq).abs();
    Ok((
        relative(first, rho.norm() * math::sqrt(x_sq)),
        relative(second, x_sq),
    ))
}

/// `|⟨B−π^Y M̄, π^Y∇×E⟩ − ⟨E, π^Y∇×(B−π^Y M̄)⟩|`, relative to `‖B−π^Y M̄‖·‖∇×E‖`.
pub fn curl_pairing_residual(model: &Model, s: &GalerkinState) -> Result<f64> {
    let em = &model.bases.em;
    let w = s.b.sub(&model.bases.project_h_to_y(&s.m)?);
    let curl_e = em.apply_curl(&s.e)?;
    let curl_w = em.apply_curl(&w)?;
    let a = w.dot(&curl_e);
    let b = s.e.dot(&curl_w);
    Ok(relative(
        (a - b).abs(),
        (w.norm() * curl_e.norm()).max(s.e.norm() * curl_w.norm()),
    ))
}

/// `max_κ |κ·b̂_κ − κ·b̂⁰_κ|`.
pub fn div_b_residual(em: &EmBasis, b: &CoeffsY, b0: &CoeffsY) -> Result<f64> {
    let d = em.divergence(b)?;
    let d0 = em.divergence(b0)?;
    Ok(d.iter().zip(&d0).fold(0.0, |m: f64, (a, c)| m.max((a - c).abs())))
}

/// `(max, L²)` deviation of `|M(x)|` from `1` over the nodes.
pub fn sphere_deviation(mag: &MagnetizationBasis, m: &CoeffsH) -> Result<(f64, f64)> {
    check_len(mag.num_modes(), m.modes())?;
    let values = mag.synth_values(m.as_slice());
    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    for v in &values {
        let d = math::norm(*v) - 1.0;
        max = max.max(d.abs());
        sq += d * d;
    }
    Ok((max, math::sqrt(mag.weight() * sq)))
}

/// Residual of `⟨u×Au, v⟩ = Σᵢ⟨∂ᵢu, ∂ᵢv×u⟩` (`A = −Δ`), relative to the
/// Cauchy–Schwarz bound `max(‖u×Au‖‖v‖, Σᵢ‖∂ᵢu‖‖∂ᵢv×u‖)` of the two sides.
/// Both sides vanish for `v = u`, so a relative-to-value residual would be
/// meaningless there.
pub fn cross_identity_residual(mag: &MagnetizationBasis, u: &CoeffsH, v: &CoeffsH) -> Result<f64> {
    check_len(mag.num_modes(), u.modes())?;
    check_len(mag.num_modes(), v.modes())?;
    let au = mag.apply_laplacian(u)?.scaled(-1.0);
    let uu = mag.synth_values(u.as_slice());
    let auu = mag.synth_values(au.as_slice());
    let vv = mag.synth_values(v.as_slice());
    let lhs_field: Vec<V3> = uu.iter().zip(&auu).map(|(a, b)| math::cross(*a, *b)).collect();
    let lhs = mag.grid_inner(&lhs_field, &vv);
    let lhs_bound = math::sqrt(mag.grid_inner(&lhs_field, &lhs_field) * mag.grid_inner(&vv, &vv));
    let mut rhs = 0.0;
    let mut rhs_bound = 0.0;
    for axis in 0..3 {
        let du = mag.gradient(u, axis)?.values;
        let dv = mag.gradient(v, axis)?.values;
        let field: Vec<V3> = dv.iter().zip(&uu).map(|(a, b)| math::cross(*a, *b)).collect();
        rhs += mag.grid_inner(&du, &field);
        rhs_bound += math::sqrt(mag.grid_inner(&du, &du) * mag.grid_inner(&field, &field));
    }
    Ok(relative((lhs - rhs).abs(), lhs_bound.max(rhs_bound)))
}

/// Outcome of the path-regularity regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HolderEstimate {
    /// The path does not move; no exponent can be fitted.
    Smooth,
    /// Slope of `log mean‖M(t+τ)−M(t)‖` against `log τ`.
    Exponent(f64),
}

/// Log-log regression of increments over dyadic lags of a uniformly sampled
/// path.
pub fn holder_estimate(times: &[f64], path: &[CoeffsH]) -> HolderEstimate {
    let n = times.len().min(path.len());
    if n < 3 {
        return HolderEstimate::Smooth;
    }
    let dt = times[1] - times[0];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lag = 1;
    while lag < n && xs.len() < 8 {
        let mut acc = 0.0;
        for k in 0..n - lag {
            acc += path[k + lag].sub(&path[k]).norm();
        }
        let mean = acc / (n - lag) as f64;
        if mean > 0.0 {
            xs.push(math::ln(lag as f64 * dt));
            ys.push(math::ln(mean));
        }
        lag *= 2;
    }
    if xs.len() < 2 {
        return HolderEstimate::Smooth;
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    HolderEstimate::Exponent(sxy / sxx)
}

/// One monitored identity.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Residuals of the monitored identities with their tolerances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantReport {
    pub entries: Vec<InvariantEntry>,
}

impl InvariantReport {
    pub fn push(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.entries.push(InvariantEntry {
            name: name.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        });
    }

    /// Reports a value without a pass/fail judgement.
    pub fn push_info(&mut self, name: &str, value: f64) {
        self.entries.push(InvariantEntry {
            name: name.into(),
            residual: value,
            tolerance: f64::INFINITY,
            passed: true,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn worst(&mut self, name: &str, residual: f64, tolerance: f64) {
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => {
                e.residual = e.residual.max(residual);
                e.passed = e.residual.is_finite() && e.residual <= e.tolerance;
            }
            None => self.push(name, residual, tolerance),
        }
    }
}

/// Pointwise identity checks at one state, with the tolerances used by the
/// command line `check`.
pub fn state_report(model: &Model, s: &GalerkinState, report: &mut InvariantReport) -> Result<()> {
    let (norm, orth) = norm_identity_residuals(model, s)?;
    report.worst("norm_identity", norm, 1e-8);
    report.worst("noise_orthogonality", orth, 1e-8);
    let (r1, r2) = rho_cross_residuals(model, s)?;
    report.worst("rho_precession_orthogonality", r1, 1e-8);
    report.worst("rho_damping_identity", r2, 1e-8);
    report.worst("curl_pairing", curl_pairing_residual(model, s)?, 1e-8);
    let rho = model.energy().effective_field(s)?;
    report.worst("cross_identity", cross_identity_residual(&model.bases.mag, &s.m, &rho)?, 1e-8);
    if model.noise.is_empty() && model.forcing.is_zero() {
        report.worst("energy_rate", energy_rate_residual(model, s)?, 1e-8);
    }
    Ok(())
}
