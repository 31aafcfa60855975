use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::coeffs::CoeffsH;
use super::grid::{Domain, GridField};
use super::tensor::{tensor_apply, Mat};
use crate::error::{check_len, Error, Result};
use crate::math::{self, V3};

/// One axis of the Neumann cosine basis on `[0, L]` with a midpoint rule.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CosineAxis {
    pub length: f64,
    pub modes: usize,
    pub nodes: usize,
    pub spacing: f64,
    /// `synth[j][k] = c_k(x_j)`
    pub synth: Mat,
    /// `analysis[k][j] = h·c_k(x_j)`
    pub analysis: Mat,
    /// `deriv[j][k] = c_k'(x_j)`
    pub deriv: Mat,
}

impl CosineAxis {
    fn new(length: f64, modes: usize, nodes: usize) -> Self {
        let spacing = length / nodes as f64;
        let x = |j: usize| (j as f64 + 0.5) * spacing;
        let norm = |k: usize| {
            if k == 0 {
                1.0 / math::sqrt(length)
            } else {
                math::sqrt(2.0 / length)
            }
        };
        let synth = Mat::from_fn(nodes, modes, |j, k| {
            norm(k) * math::cos(PI * k as f64 * x(j) / length)
        });
        let deriv = Mat::from_fn(nodes, modes, |j, k| {
            let w = PI * k as f64 / length;
            -norm(k) * w * math::sin(w * x(j))
        });
        let analysis = synth.transpose_scaled(spacing);
        CosineAxis {
            length,
            modes,
            nodes,
            spacing,
            synth,
            analysis,
            deriv,
        }
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        PI * k as f64 / self.length
    }
}

/// Neumann–Laplacian eigenbasis of the box `D = ∏[0, Lᵢ]`.
///
/// Scalar mode `k = (k₁,k₂,k₃)` is `∏ cᵢ(xᵢ)` with eigenvalue
/// `Σ (π kᵢ / Lᵢ)²`; each scalar mode carries three vector components.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationBasis {
    box_lengths: [f64; 3],
    modes_per_axis: [usize; 3],
    quad_nodes_per_axis: [usize; 3],
    pub(crate) axes: [CosineAxis; 3],
    eigenvalues: Vec<f64>,
    weight: f64,
}

impl MagnetizationBasis {
    /// Smallest admissible node count for `modes` cosine modes: quartic
    /// products of modes are then integrated exactly.
    pub fn min_quad_nodes(modes: usize) -> usize {
        4 * modes + 1
    }

    pub fn new(
        box_lengths: [f64; 3],
        modes_per_axis: [usize; 3],
        quad_nodes_per_axis: [usize; 3],
    ) -> Result<Self> {
        for i in 0..3 {
            let l = box_lengths[i];
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "box length on axis {i} must be positive, got {l}"
                )));
            }
            if modes_per_axis[i] == 0 {
                return Err(Error::InvalidParameter(format!(
                    "axis {i} needs at least one mode"
                )));
            }
            let required = Self::min_quad_nodes(modes_per_axis[i]);
            if quad_nodes_per_axis[i] < required {
                return Err(Error::UndersizedQuadrature {
                    axis: i,
                    nodes: quad_nodes_per_axis[i],
                    required,
                });
            }
        }
        let axes = [0, 1, 2].map(|i| {
            CosineAxis::new(box_lengths[i], modes_per_axis[i], quad_nodes_per_axis[i])
        });
        let [n1, n2, n3] = modes_per_axis;
        let mut eigenvalues = Vec::with_capacity(n1 * n2 * n3);
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                for k3 in 0..n3 {
                    let w = [
                        axes[0].wavenumber(k1),
                        axes[1].wavenumber(k2),
                        axes[2].wavenumber(k3),
                    ];
                    eigenvalues.push(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
                }
            }
        }
        let weight = axes[0].spacing * axes[1].spacing * axes[2].spacing;
        Ok(MagnetizationBasis {
            box_lengths,
            modes_per_axis,
            quad_nodes_per_axis,
            axes,
            eigenvalues,
            weight,
        })
    }

    /// Basis with `4n + 1` nodes per axis.
    pub fn with_default_quadrature(box_lengths: [f64; 3], modes_per_axis: [usize; 3]) -> Result<Self> {
        Self::new(
            box_lengths,
            modes_per_axis,
            modes_per_axis.map(Self::min_quad_nodes),
        )
    }

    pub fn box_lengths(&self) -> [f64; 3] {
        self.box_lengths
    }

    pub fn modes_per_axis(&self) -> [usize; 3] {
        self.modes_per_axis
    }

    pub fn quad_nodes_per_axis(&self) -> [usize; 3] {
        self.quad_nodes_per_axis
    }

    pub fn node_spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.axes[i].spacing)
    }

    /// Number of scalar modes.
    pub fn num_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.quad_nodes_per_axis.iter().product()
    }

    /// Quadrature weight of every node (midpoint rule).
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn volume(&self) -> f64 {
        self.box_lengths.iter().product()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, mode: usize) -> f64 {
        self.eigenvalues[mode]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, &l| m.max(l))
    }

    pub fn mode_index(&self, k: [usize; 3]) -> Option<usize> {
        let [n1, n2, n3] = self.modes_per_axis;
        (k[0] < n1 && k[1] < n2 && k[2] < n3).then(|| (k[0] * n2 + k[1]) * n3 + k[2])
    }

    pub fn mode_of(&self, index: usize) -> [usize; 3] {
        let [_, n2, n3] = self.modes_per_axis;
        [index / (n2 * n3), (index / n3) % n2, index % n3]
    }

    pub fn node_coords(&self, index: usize) -> V3 {
        let [_, q2, q3] = self.quad_nodes_per_axis;
        let j = [index / (q2 * q3), (index / q3) % q2, index % q3];
        [0, 1, 2].map(|i| (j[i] as f64 + 0.5) * self.axes[i].spacing)
    }

    /// Value of scalar mode `index` at point `x` (closed form, no tables).
    pub fn mode_value(&self, index: usize, x: V3) -> f64 {
        let k = self.mode_of(index);
        (0..3)
            .map(|i| {
                let l = self.box_lengths[i];
                let c = if k[i] == 0 {
                    1.0 / math::sqrt(l)
                } else {
                    math::sqrt(2.0 / l)
                };
                c * math::cos(PI * k[i] as f64 * x[i] / l)
            })
            .product()
    }

    pub fn zeros(&self) -> CoeffsH {
        CoeffsH::zeros(self.num_modes())
    }

    pub(crate) fn synth_values(&self, c: &[V3]) -> alloc::vec::Vec<V3> {
        tensor_apply([&self.axes[0].synth, &self.axes[1].synth, &self.axes[2].synth], c)
    }

    pub(crate) fn project_values(&self, f: &[V3]) -> alloc::vec::Vec<V3> {
        tensor_apply(
            [&self.axes[0].analysis, &self.axes[1].analysis, &self.axes[2].analysis],
            f,
        )
    }

    /// Pointwise evaluation of `Σ c_k e_k` on the quadrature grid.
    pub fn synthesize(&self, c: &CoeffsH) -> Result<GridField> {
        check_len(self.num_modes(), c.modes())?;
        Ok(GridField::new(self.synth_values(c.as_slice()), Domain::D))
    }

    /// Orthogonal projection `π_n` of a sampled field.
    pub fn project(&self, f: &GridField) -> Result<CoeffsH> {
        if f.domain != Domain::D {
            return Err(Error::DomainMismatch);
        }
        check_len(self.num_nodes(), f.len())?;
        Ok(CoeffsH::from_vec(self.project_values(&f.values)))
    }

    /// `∂ᵢ` of every component, sampled on the grid.
    pub fn gradient(&self, c: &CoeffsH, axis: usize) -> Result<GridField> {
        check_len(self.num_modes(), c.modes())?;
        if axis > 2 {
            return Err(Error::IndexOutOfRange { index: axis, len: 3 });
        }
        let mats = [0, 1, 2].map(|i| {
            if i == axis {
                &self.axes[i].deriv
            } else {
                &self.axes[i].synth
            }
        });
        Ok(GridField::new(tensor_apply(mats, c.as_slice()), Domain::D))
    }

    /// `ΔM`: coefficient-wise multiplication by `−λ_k`.
    pub fn apply_laplacian(&self, c: &CoeffsH) -> Result<CoeffsH> {
        check_len(self.num_modes(), c.modes())?;
        Ok(CoeffsH::from_vec(
            c.as_slice()
                .iter()
                .zip(&self.eigenvalues)
                .map(|(v, l)| math::scale(-l, *v))
                .collect(),
        ))
    }

    /// `‖∇M‖²_H = Σ λ_k |c_k|²`.
    pub fn grad_norm_sq(&self, c: &CoeffsH) -> f64 {
        c.as_slice()
            .iter()
            .zip(&self.eigenvalues)
            .map(|(v, l)| l * math::norm_sq(*v))
            .sum()
    }

    /// `‖M‖²_V = Σ (1 + λ_k) |c_k|²`.
    pub fn v_norm_sq(&self, c: &CoeffsH) -> f64 {
        c.norm_sq() + self.grad_norm_sq(c)
    }

    /// Quadrature inner product on `D`.
    pub fn grid_inner(&self, a: &[V3], b: &[V3]) -> f64 {
        self.weight * a.iter().zip(b).map(|(x, y)| math::dot(*x, *y)).sum::<f64>()
    }
}
