use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::coeffs::CoeffsY;
use super::grid::{Domain, GridField};
use super::magnetization::MagnetizationBasis;
use super::tensor::{tensor_apply, Mat};
use crate::error::{check_len, Error, Result};
use crate::math::{self, V3};

/// One axis of the real trigonometric basis on a torus of length `P`.
///
/// Function `0` is the constant, `2q − 1` is `cos(qωx)`, `2q` is `sin(qωx)`
/// with `ω = 2π/P`, all L²-normalized.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TrigAxis {
    pub length: f64,
    pub max_wavenumber: usize,
    pub nodes: usize,
    /// Index of the torus node coinciding with the first box node.
    pub box_start: usize,
    pub box_nodes: usize,
    pub synth_t: Mat,
    pub analysis_t: Mat,
    pub synth_d: Mat,
    pub analysis_d: Mat,
}

impl TrigAxis {
    fn functions(max_wavenumber: usize) -> usize {
        2 * max_wavenumber + 1
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Angular frequency of basis function `f`.
    pub fn frequency(&self, f: usize) -> f64 {
        f.div_ceil(2) as f64 * self.omega()
    }

    fn value(length: f64, f: usize, x: f64) -> f64 {
        if f == 0 {
            return 1.0 / math::sqrt(length);
        }
        let q = f.div_ceil(2) as f64;
        let arg = 2.0 * PI * q * x / length;
        let c = math::sqrt(2.0 / length);
        if f % 2 == 1 {
            c * math::cos(arg)
        } else {
            c * math::sin(arg)
        }
    }
}

/// Real Fourier vector basis of the torus `T ⊃ D`.
///
/// The torus grid has the same spacing as the box quadrature grid and
/// contains it as a sub-block, so the indicator `1_D`, the zero extension and
/// the restriction are exact node selections.
#[derive(Debug, Clone, PartialEq)]
pub struct EmBasis {
    torus_lengths: [f64; 3],
    max_wavenumber: [usize; 3],
    box_offset: [f64; 3],
    pub(crate) axes: [TrigAxis; 3],
    weight: f64,
}

impl EmBasis {
    /// Builds the basis on a torus containing `mag`'s box, centered.
    pub fn new(
        mag: &MagnetizationBasis,
        torus_lengths: [f64; 3],
        max_wavenumber: [usize; 3],
    ) -> Result<Self> {
        let box_lengths = mag.box_lengths();
        let spacing = mag.node_spacing();
        let box_nodes = mag.quad_nodes_per_axis();
        let mut axes = Vec::with_capacity(3);
        let mut box_offset = [0.0; 3];
        for i in 0..3 {
            let p = torus_lengths[i];
            if !(p.is_finite() && p > box_lengths[i]) {
                return Err(Error::InvalidParameter(format!(
                    "torus length {p} on axis {i} must exceed the box length {}",
                    box_lengths[i]
                )));
            }
            let ratio = p / spacing[i];
            let nodes = libm::round(ratio) as usize;
            if (ratio - nodes as f64).abs() > 1e-9 * ratio {
                return Err(Error::MisalignedGrid { axis: i });
            }
            let functions = TrigAxis::functions(max_wavenumber[i]);
            if functions >= nodes {
                return Err(Error::UndersizedQuadrature {
                    axis: i,
                    nodes,
                    required: functions + 1,
                });
            }
            let offset = 0.5 * (p - box_lengths[i]);
            box_offset[i] = offset;
            let box_start = (nodes - box_nodes[i]) / 2;
            let h = spacing[i];
            let coord = |t: usize| offset + (t as f64 - box_start as f64 + 0.5) * h;
            let synth_t = Mat::from_fn(nodes, functions, |t, f| TrigAxis::value(p, f, coord(t)));
            let analysis_t = synth_t.transpose_scaled(h);
            let synth_d = synth_t.row_block(box_start, box_nodes[i]);
            let analysis_d = synth_d.transpose_scaled(h);
            axes.push(TrigAxis {
                length: p,
                max_wavenumber: max_wavenumber[i],
                nodes,
                box_start,
                box_nodes: box_nodes[i],
                synth_t,
                analysis_t,
                synth_d,
                analysis_d,
            });
        }
        let axes: [TrigAxis; 3] = axes.try_into().expect("three axes");
        let weight = spacing.iter().product();
        Ok(EmBasis {
            torus_lengths,
            max_wavenumber,
            box_offset,
            axes,
            weight,
        })
    }

    pub fn torus_lengths(&self) -> [f64; 3] {
        self.torus_lengths
    }

    pub fn max_wavenumber(&self) -> [usize; 3] {
        self.max_wavenumber
    }

    /// Position of the box corner inside the torus.
    pub fn box_offset(&self) -> [f64; 3] {
        self.box_offset
    }

    pub fn nodes_per_axis(&self) -> [usize; 3] {
        [0, 1, 2].map(|i| self.axes[i].nodes)
    }

    pub fn functions_per_axis(&self) -> [usize; 3] {
        self.max_wavenumber.map(TrigAxis::functions)
    }

    pub fn num_modes(&self) -> usize {
        self.functions_per_axis().iter().product()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes_per_axis().iter().product()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn zeros(&self) -> CoeffsY {
        CoeffsY::zeros(self.num_modes())
    }

    pub fn mode_index(&self, f: [usize; 3]) -> Option<usize> {
        let [m1, m2, m3] = self.functions_per_axis();
        (f[0] < m1 && f[1] < m2 && f[2] < m3).then(|| (f[0] * m2 + f[1]) * m3 + f[2])
    }

    pub fn mode_of(&self, index: usize) -> [usize; 3] {
        let [_, m2, m3] = self.functions_per_axis();
        [index / (m2 * m3), (index / m3) % m2, index % m3]
    }

    /// Absolute wave-vector components `(q₁ω₁, q₂ω₂, q₃ω₃)` of a mode.
    pub fn wave_vector(&self, index: usize) -> V3 {
        let f = self.mode_of(index);
        [0, 1, 2].map(|i| self.axes[i].frequency(f[i]))
    }

    /// Coordinates of torus node `index` (torus frame, box at `box_offset`).
    pub fn node_coords(&self, index: usize) -> V3 {
        let [_, q2, q3] = self.nodes_per_axis();
        let t = [index / (q2 * q3), (index / q3) % q2, index % q3];
        [0, 1, 2].map(|i| {
            let a = &self.axes[i];
            let h = a.length / a.nodes as f64;
            self.box_offset[i] + (t[i] as f64 - a.box_start as f64 + 0.5) * h
        })
    }

    /// Closed-form value of scalar mode `index` at torus point `x`.
    pub fn mode_value(&self, index: usize, x: V3) -> f64 {
        let f = self.mode_of(index);
        (0..3)
            .map(|i| TrigAxis::value(self.torus_lengths[i], f[i], x[i]))
            .product()
    }

    /// Torus node index of box node `(j1, j2, j3)`.
    pub(crate) fn torus_index_of_box_node(&self, j: [usize; 3]) -> usize {
        let [_, q2, q3] = self.nodes_per_axis();
        let t = [0, 1, 2].map(|i| self.axes[i].box_start + j[i]);
        (t[0] * q2 + t[1]) * q3 + t[2]
    }

    pub fn synthesize(&self, c: &CoeffsY) -> Result<GridField> {
        check_len(self.num_modes(), c.modes())?;
        let a = &self.axes;
        Ok(GridField::new(
            tensor_apply([&a[0].synth_t, &a[1].synth_t, &a[2].synth_t], c.as_slice()),
            Domain::T,
        ))
    }

    /// Orthogonal projection `π_n^Y` of a field sampled on the torus grid.
    pub fn project(&self, f: &GridField) -> Result<CoeffsY> {
        if f.domain != Domain::T {
            return Err(Error::DomainMismatch);
        }
        check_len(self.num_nodes(), f.len())?;
        let a = &self.axes;
        Ok(CoeffsY::from_vec(tensor_apply(
            [&a[0].analysis_t, &a[1].analysis_t, &a[2].analysis_t],
            &f.values,
        )))
    }

    /// Values of `Σ c_m y_m` at the box quadrature nodes only.
    pub(crate) fn synth_on_box(&self, c: &[V3]) -> Vec<V3> {
        let a = &self.axes;
        tensor_apply([&a[0].synth_d, &a[1].synth_d, &a[2].synth_d], c)
    }

    /// `∂ᵢ` in coefficient space (exact on the trigonometric span).
    pub fn partial(&self, c: &[V3], axis: usize) -> Vec<V3> {
        let m = self.functions_per_axis();
        let ax = &self.axes[axis];
        let mut out = vec![[0.0; 3]; c.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let f = self.mode_of(idx);
            let g = f[axis];
            if g == 0 {
                continue;
            }
            let mut src = f;
            let factor;
            if g % 2 == 1 {
                // cos ← d/dx sin
                src[axis] = g + 1;
                factor = ax.frequency(g);
            } else {
                // sin ← d/dx cos
                src[axis] = g - 1;
                factor = -ax.frequency(g);
            }
            debug_assert!(src[axis] < m[axis]);
            let s = c[(src[0] * m[1] + src[1]) * m[2] + src[2]];
            *o = math::scale(factor, s);
        }
        out
    }

    /// Exact spectral curl; maps `Y_n` into itself.
    pub fn apply_curl(&self, c: &CoeffsY) -> Result<CoeffsY> {
        check_len(self.num_modes(), c.modes())?;
        let d = [0, 1, 2].map(|a| self.partial(c.as_slice(), a));
        Ok(CoeffsY::from_vec(
            (0..c.modes())
                .map(|i| {
                    [
                        d[1][i][2] - d[2][i][1],
                        d[2][i][0] - d[0][i][2],
                        d[0][i][1] - d[1][i][0],
                    ]
                })
                .collect(),
        ))
    }

    /// Scalar coefficients of `∇·u`.
    pub fn divergence(&self, c: &CoeffsY) -> Result<Vec<f64>> {
        check_len(self.num_modes(), c.modes())?;
        let d = [0, 1, 2].map(|a| self.partial(c.as_slice(), a));
        Ok((0..c.modes()).map(|i| d[0][i][0] + d[1][i][1] + d[2][i][2]).collect())
    }

    /// Removes the gradient part: `u − ∇Δ⁻¹∇·u`.
    pub fn leray_project(&self, c: &CoeffsY) -> Result<CoeffsY> {
        let div = self.divergence(c)?;
        let potential: Vec<V3> = div
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let k = self.wave_vector(i);
                let k2 = math::norm_sq(k);
                if k2 > 0.0 {
                    [-d / k2, 0.0, 0.0]
                } else {
                    [0.0; 3]
                }
            })
            .collect();
        let grad = [0, 1, 2].map(|a| self.partial(&potential, a));
        Ok(CoeffsY::from_vec(
            c.as_slice()
                .iter()
                .enumerate()
                .map(|(i, v)| [v[0] - grad[0][i][0], v[1] - grad[1][i][0], v[2] - grad[2][i][0]])
                .collect(),
        ))
    }

    /// Quadrature inner product on `T`.
    pub fn grid_inner(&self, a: &[V3], b: &[V3]) -> f64 {
        self.weight * a.iter().zip(b).map(|(x, y)| math::dot(*x, *y)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CoeffsY;

    fn bases() -> (MagnetizationBasis, EmBasis) {
        let mag = MagnetizationBasis::with_default_quadrature([1.0, 1.5, 2.0], [2, 2, 2]).unwrap();
        let em = EmBasis::new(&mag, [2.0, 3.0, 4.0], [2, 2, 1]).unwrap();
        (mag, em)
    }

    #[test]
    fn gram_matrix_is_identity() {
        let (_, em) = bases();
        for k in 0..em.num_modes() {
            let mut c = em.zeros();
            c.as_mut_slice()[k] = [0.0, 1.0, 0.0];
            let back = em.project(&em.synthesize(&c).unwrap()).unwrap();
            for j in 0..em.num_modes() {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((back.as_slice()[j][1] - expected).abs() < 1e-12, "{k} {j}");
            }
        }
    }

    #[test]
    fn torus_must_contain_box_and_align() {
        let mag = MagnetizationBasis::with_default_quadrature([1.0; 3], [2; 3]).unwrap();
        assert!(EmBasis::new(&mag, [1.0, 2.0, 2.0], [1; 3]).is_err());
        assert_eq!(
            EmBasis::new(&mag, [2.0, 2.05, 2.0], [1; 3]),
            Err(Error::MisalignedGrid { axis: 1 })
        );
    }

    #[test]
    fn curl_of_single_mode_by_hand() {
        // u = (0, cos(κx₁), 0) ⇒ ∇×u = (0, 0, −κ sin(κx₁)).
        let mag = MagnetizationBasis::with_default_quadrature([1.0; 3], [2; 3]).unwrap();
        let em = EmBasis::new(&mag, [2.0; 3], [2; 3]).unwrap();
        let kappa = 2.0 * PI / 2.0;
        let norm = 1.0 / math::sqrt(2.0); // 1/√P on the two constant axes
        let cos_idx = em.mode_index([1, 0, 0]).unwrap();
        let sin_idx = em.mode_index([2, 0, 0]).unwrap();
        // coefficient that makes the synthesized field exactly cos(κx₁)
        let amp = 1.0 / (math::sqrt(2.0 / 2.0) * norm * norm);
        let mut c = em.zeros();
        c.as_mut_slice()[cos_idx] = [0.0, amp, 0.0];
        let curl = em.apply_curl(&c).unwrap();
        for (i, v) in curl.as_slice().iter().enumerate() {
            if i == sin_idx {
                assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
                assert!((v[2] + kappa * amp).abs() < 1e-12);
            } else {
                assert_eq!(*v, [0.0; 3]);
            }
        }
        let g = em.synthesize(&curl).unwrap();
        for n in [0, 11, 50] {
            let x = em.node_coords(n);
            assert!((g.values[n][2] + kappa * math::sin(kappa * x[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_has_zero_curl() {
        let (_, em) = bases();
        let mut c = em.zeros();
        c.as_mut_slice()[0] = [1.0, -2.0, 3.0];
        let curl = em.apply_curl(&c).unwrap();
        assert!(curl.as_slice().iter().all(|v| *v == [0.0; 3]));
    }

    #[test]
    fn leray_projection_kills_divergence() {
        let (_, em) = bases();
        let c = CoeffsY::from_vec(
            (0..em.num_modes())
                .map(|i| [math::sin(i as f64), math::cos(1.3 * i as f64), 0.1 * i as f64])
                .collect(),
        );
        assert!(em.divergence(&c).unwrap().iter().any(|d| d.abs() > 1e-3));
        let p = em.leray_project(&c).unwrap();
        assert!(em.divergence(&p).unwrap().iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn box_block_matches_full_grid() {
        let (mag, em) = bases();
        let c = CoeffsY::from_vec(
            (0..em.num_modes())
                .map(|i| [math::sin(i as f64), 0.5, math::cos(i as f64)])
                .collect(),
        );
        let full = em.synthesize(&c).unwrap();
        let on_box = em.synth_on_box(c.as_slice());
        let [q1, q2, q3] = mag.quad_nodes_per_axis();
        for j1 in 0..q1 {
            for j2 in 0..q2 {
                for j3 in 0..q3 {
                    let t = em.torus_index_of_box_node([j1, j2, j3]);
                    let d = (j1 * q2 + j2) * q3 + j3;
                    for k in 0..3 {
                        assert!((full.values[t][k] - on_box[d][k]).abs() < 1e-13);
                    }
                    // the node positions agree as well
                    let xt = em.node_coords(t);
                    let xd = mag.node_coords(d);
                    for i in 0..3 {
                        assert!((xt[i] - em.box_offset()[i] - xd[i]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
