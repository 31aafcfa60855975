//! Noise family `{h_j}`, the truncation `ψ`, the diffusion maps `G_jn` and the
//! Itô correction `½ Σ G′_jn[G_jn]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error, Result};
use crate::math::{self, V3};
use crate::spectral::{CoeffsH, Domain, GridField, MagnetizationBasis};

/// Radial cutoff: `1` for `|x| ≤ 3`, `0` for `|x| ≥ 5`, quintic smoothstep in
/// between. The steepest radial slope is `15/16`, reached at `|x| = 4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TruncationPsi;

impl TruncationPsi {
    pub const INNER_RADIUS: f64 = 3.0;
    pub const OUTER_RADIUS: f64 = 5.0;

    fn width() -> f64 {
        Self::OUTER_RADIUS - Self::INNER_RADIUS
    }

    /// Profile value and radial derivative at radius `r`.
    pub fn radial(r: f64) -> (f64, f64) {
        if r <= Self::INNER_RADIUS {
            return (1.0, 0.0);
        }
        if r >= Self::OUTER_RADIUS {
            return (0.0, 0.0);
        }
        let t = (r - Self::INNER_RADIUS) / Self::width();
        let s = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = -30.0 * t * t * (1.0 - t) * (1.0 - t);
        (s, ds / Self::width())
    }

    pub fn value(&self, x: V3) -> f64 {
        Self::radial(math::norm(x)).0
    }

    pub fn grad(&self, x: V3) -> V3 {
        let r = math::norm(x);
        let (_, d) = Self::radial(r);
        if d == 0.0 {
            [0.0; 3]
        } else {
            math::scale(d / r, x)
        }
    }
}

/// Finitely many spatial noise modes `h_j ∈ H_n`, stored both as coefficients
/// and as samples on the quadrature grid of the basis they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFamily {
    modes: Vec<CoeffsH>,
    values: Vec<Vec<V3>>,
    sup_norms: Vec<f64>,
    w12_norms_sq: Vec<f64>,
}

impl NoiseFamily {
    pub fn new(mag: &MagnetizationBasis, modes: Vec<CoeffsH>) -> Result<Self> {
        let mut values = Vec::with_capacity(modes.len());
        let mut sup_norms = Vec::with_capacity(modes.len());
        let mut w12_norms_sq = Vec::with_capacity(modes.len());
        for h in &modes {
            check_len(mag.num_modes(), h.modes())?;
            let v = mag.synth_values(h.as_slice());
            sup_norms.push(v.iter().fold(0.0, |m: f64, x| m.max(math::norm(*x))));
            w12_norms_sq.push(mag.v_norm_sq(h));
            values.push(v);
        }
        Ok(NoiseFamily {
            modes,
            values,
            sup_norms,
            w12_norms_sq,
        })
    }

    /// No noise at all.
    pub fn empty(mag: &MagnetizationBasis) -> Self {
        NoiseFamily::new(mag, Vec::new()).expect("empty family")
    }

    /// `h_j = σ j^(−decay) · e_{k_j} ε_{c_j} / ‖e_{k_j}‖_∞` for `j = 1..=count`,
    /// where `(k_j, c_j)` runs over (scalar mode, component) pairs ordered by
    /// eigenvalue, then mode index, then component.
    ///
    /// The same pairs are chosen on every basis that contains them, so
    /// families built on different resolutions describe the same functions.
    pub fn lowest_modes(
        mag: &MagnetizationBasis,
        count: usize,
        amplitude: f64,
        decay: f64,
    ) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise amplitude must be nonnegative, got {amplitude}"
            )));
        }
        if count > 3 * mag.num_modes() {
            return Err(Error::InvalidParameter(format!(
                "{count} noise modes requested, the basis has only {}",
                3 * mag.num_modes()
            )));
        }
        let mut order: Vec<usize> = (0..mag.num_modes()).collect();
        order.sort_by(|a, b| {
            mag.eigenvalue(*a)
                .partial_cmp(&mag.eigenvalue(*b))
                .expect("finite eigenvalues")
                .then(mag.mode_of(*a).cmp(&mag.mode_of(*b)))
        });
        let lengths = mag.box_lengths();
        let mut modes = Vec::with_capacity(count);
        for j in 0..count {
            let idx = order[j / 3];
            let comp = j % 3;
            let k = mag.mode_of(idx);
            let sup: f64 = (0..3)
                .map(|i| {
                    if k[i] == 0 {
                        1.0 / math::sqrt(lengths[i])
                    } else {
                        math::sqrt(2.0 / lengths[i])
                    }
                })
                .product();
            let scale = amplitude * math::powf((j + 1) as f64, -decay) / sup;
            let mut c = mag.zeros();
            c.as_mut_slice()[idx][comp] = scale;
            modes.push(c);
        }
        NoiseFamily::new(mag, modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, j: usize) -> &CoeffsH {
        &self.modes[j]
    }

    pub(crate) fn values(&self, j: usize) -> &[V3] {
        &self.values[j]
    }

    /// `h ← s·h` for every mode.
    pub fn scaled(&self, s: f64) -> Self {
        NoiseFamily {
            modes: self.modes.iter().map(|h| h.scaled(s)).collect(),
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|x| math::scale(s, *x)).collect())
                .collect(),
            sup_norms: self.sup_norms.iter().map(|n| n * s.abs()).collect(),
            w12_norms_sq: self.w12_norms_sq.iter().map(|n| n * s * s).collect(),
        }
    }

    /// `c_h² = Σ ‖h_j‖_∞ + Σ ‖h_j‖²_{W^{1,2}}` (sup norm over the grid nodes).
    pub fn c_h_squared(&self) -> f64 {
        self.sup_norms.iter().sum::<f64>() + self.w12_norms_sq.iter().sum::<f64>()
    }
}

/// Which expression is used for `½ Σ G′_jn[G_jn]` in the Itô drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ItoCorrection {
    /// Directional derivative of the projected map `M ↦ G_jn(M)` along
    /// `G_jn(M)`. Consistent with the Stratonovich integral of the Galerkin
    /// system and conserves `‖M_n‖²` exactly in the Itô balance.
    #[default]
    ChainRule,
    /// The five-term expression with its inner projections as written in the
    /// model definition.
    Stated,
}

/// `G_jn(M) = λ₁π_n[M×h_j] + λ₂π_n[ψ(M) M×(M×h_j)]` and its correction.
#[derive(Debug, Clone, Copy)]
pub struct Diffusion<'a> {
    pub mag: &'a MagnetizationBasis,
    pub family: &'a NoiseFamily,
    pub psi: TruncationPsi,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl<'a> Diffusion<'a> {
    pub fn new(
        mag: &'a MagnetizationBasis,
        family: &'a NoiseFamily,
        lambda1: f64,
        lambda2: f64,
    ) -> Self {
        Diffusion {
            mag,
            family,
            psi: TruncationPsi,
            lambda1,
            lambda2,
        }
    }

    fn check(&self, m: &CoeffsH) -> Result<()> {
        check_len(self.mag.num_modes(), m.modes())?;
        for j in 0..self.family.len() {
            check_len(self.mag.num_modes(), self.family.mode(j).modes())?;
        }
        Ok(())
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j < self.family.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: j,
                len: self.family.len(),
            })
        }
    }

    /// Pointwise integrand `G_j^ψ(M)` at grid nodes.
    pub(crate) fn integrand(&self, j: usize, m_values: &[V3]) -> Vec<V3> {
        let (l1, l2) = (self.lambda1, self.lambda2);
        m_values
            .iter()
            .zip(self.family.values(j))
            .map(|(m, h)| {
                let x = math::cross(*m, *h);
                let z = math::cross(*m, x);
                math::axpy(math::scale(l1, x), l2 * self.psi.value(*m), z)
            })
            .collect()
    }

    /// One pass over the nodes computing `−⟨ρ, G_j^ψ(M)⟩` for every `j` (when
    /// `rho_values` is given) and the unprojected `Σ_j dw_j G_j^ψ(M)` (when
    /// `dw` is given).
    pub(crate) fn pairings_and_increment(
        &self,
        m_values: &[V3],
        rho_values: Option<&[V3]>,
        dw: Option<&[f64]>,
    ) -> (Vec<f64>, Option<Vec<V3>>) {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let count = self.family.len();
        let mut pairings = vec![0.0; if rho_values.is_some() { count } else { 0 }];
        let mut incr = dw.map(|_| vec![[0.0; 3]; m_values.len()]);
        for (i, m) in m_values.iter().enumerate() {
            let c2 = l2 * self.psi.value(*m);
            for j in 0..count {
                let h = self.family.values(j)[i];
                let x = math::cross(*m, h);
                let g = math::axpy(math::scale(l1, x), c2, math::cross(*m, x));
                if let Some(r) = rho_values {
                    pairings[j] -= math::dot(g, r[i]);
                }
                if let (Some(acc), Some(w)) = (incr.as_mut(), dw) {
                    acc[i] = math::axpy(acc[i], w[j], g);
                }
            }
        }
        for p in &mut pairings {
            *p *= self.mag.weight();
        }
        (pairings, incr)
    }

    pub(crate) fn g_from_values(&self, j: usize, m_values: &[V3]) -> CoeffsH {
        CoeffsH::from_vec(self.mag.project_values(&self.integrand(j, m_values)))
    }

    pub fn g(&self, j: usize, m: &CoeffsH) -> Result<CoeffsH> {
        self.check_index(j)?;
        self.check(m)?;
        Ok(self.g_from_values(j, &self.mag.synth_values(m.as_slice())))
    }

    /// `G_j^ψ(M)` sampled on the grid, no projection.
    pub fn g_unprojected(&self, j: usize, m: &CoeffsH) -> Result<GridField> {
        self.check_index(j)?;
        self.check(m)?;
        Ok(GridField::new(
            self.integrand(j, &self.mag.synth_values(m.as_slice())),
            Domain::D,
        ))
    }

    /// `½ Σ_j G′_jn(M)[G_jn(M)]` in the requested form.
    pub fn correction(&self, kind: ItoCorrection, m: &CoeffsH) -> Result<CoeffsH> {
        self.check(m)?;
        let m_values = self.mag.synth_values(m.as_slice());
        Ok(self.correction_from_values(kind, &m_values))
    }

    pub(crate) fn correction_from_values(&self, kind: ItoCorrection, m_values: &[V3]) -> CoeffsH {
        let mut acc = alloc::vec![[0.0; 3]; m_values.len()];
        for j in 0..self.family.len() {
            match kind {
                ItoCorrection::ChainRule => self.accumulate_chain_rule(j, m_values, &mut acc),
                ItoCorrection::Stated => self.accumulate_stated(j, m_values, &mut acc),
            }
        }
        // one outer projection of the summed integrand equals the sum of the
        // per-term outer projections
        let mut out = CoeffsH::from_vec(self.mag.project_values(&acc));
        for v in out.as_mut_slice() {
            *v = math::scale(0.5, *v);
        }
        out
    }

    /// Adds `G′(M)[u]` with `u = synth(G_jn(M))`, before the outer projection.
    fn accumulate_chain_rule(&self, j: usize, m_values: &[V3], acc: &mut [V3]) {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let g = self.g_from_values(j, m_values);
        let u = self.mag.synth_values(g.as_slice());
        let h = self.family.values(j);
        for (i, a) in acc.iter_mut().enumerate() {
            let (m, u, h) = (m_values[i], u[i], h[i]);
            let x = math::cross(m, h);
            let z = math::cross(m, x);
            let psi = self.psi.value(m);
            let dpsi = math::dot(self.psi.grad(m), u);
            let uh = math::cross(u, h);
            let mut d = math::scale(l1, uh);
            let dz = math::add(math::cross(u, x), math::cross(m, uh));
            d = math::axpy(d, l2 * dpsi, z);
            d = math::axpy(d, l2 * psi, dz);
            *a = math::add(*a, d);
        }
    }

    /// Adds the five stated terms (inner projections applied) before the
    /// outer projection.
    fn accumulate_stated(&self, j: usize, m_values: &[V3], acc: &mut [V3]) {
        let (l1, l2) = (self.lambda1, self.lambda2);
        let h = self.family.values(j);
        let x: Vec<V3> = m_values.iter().zip(h).map(|(m, h)| math::cross(*m, *h)).collect();
        let z: Vec<V3> = m_values.iter().zip(&x).map(|(m, x)| math::cross(*m, *x)).collect();
        let y: Vec<V3> = m_values
            .iter()
            .zip(&z)
            .map(|(m, z)| math::scale(self.psi.value(*m), *z))
            .collect();
        let px = self.mag.synth_values(&self.mag.project_values(&x));
        let py = self.mag.synth_values(&self.mag.project_values(&y));
        for (i, a) in acc.iter_mut().enumerate() {
            let (m, h) = (m_values[i], h[i]);
            let psi = self.psi.value(m);
            let t1 = math::scale(l1 * l1, math::cross(px[i], h));
            let t2 = math::scale(l1 * l2, math::cross(y[i], h));
            let t3 = math::scale(l2 * l2 * psi, math::cross(m, math::cross(z[i], h)));
            let t4 = math::scale(l1 * l2 * psi, math::cross(m, math::cross(x[i], h)));
            let t5 = math::scale(l2 * l2, math::cross(py[i], x[i]));
            *a = math::add(*a, math::add(math::add(t1, t2), math::add(math::add(t3, t4), t5)));
        }
    }

    /// `½ Σ_j (G_j^ψ)′(M)[G_j^ψ(M)]` with no projections, on the grid.
    pub fn correction_unprojected(&self, m: &CoeffsH) -> Result<GridField> {
        self.check(m)?;
        let (l1, l2) = (self.lambda1, self.lambda2);
        let m_values = self.mag.synth_values(m.as_slice());
        let mut acc = alloc::vec![[0.0; 3]; m_values.len()];
        for j in 0..self.family.len() {
            let h = self.family.values(j);
            for (i, a) in acc.iter_mut().enumerate() {
                let (m, h) = (m_values[i], h[i]);
                let psi = self.psi.value(m);
                let x = math::cross(m, h);
                let z = math::cross(m, x);
                let y = math::scale(psi, z);
                let t1 = math::scale(l1 * l1, math::cross(x, h));
                let t2 = math::scale(l1 * l2, math::cross(y, h));
                let t3 = math::scale(l2 * l2 * psi, math::cross(m, math::cross(z, h)));
                let t4 = math::scale(l1 * l2 * psi, math::cross(m, math::cross(x, h)));
                let t5 = math::scale(l2 * l2, math::cross(y, x));
                *a = math::add(*a, math::add(math::add(t1, t2), math::add(math::add(t3, t4), t5)));
            }
        }
        for v in acc.iter_mut() {
            *v = math::scale(0.5, *v);
        }
        Ok(GridField::new(acc, Domain::D))
    }
}
