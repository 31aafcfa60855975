//! Spectral bases: Neumann cosines on the box `D` for the magnetization and a
//! real Fourier basis on an enclosing torus `T` for the electromagnetic field.

mod coeffs;
mod em;
mod grid;
mod magnetization;
pub(crate) mod tensor;

use alloc::vec;

pub use coeffs::{Coeffs, CoeffsH, CoeffsY, HSpace, YSpace};
pub use em::EmBasis;
pub use grid::{Domain, GridField};
pub use magnetization::MagnetizationBasis;

use crate::error::{check_len, Error, Result};
use tensor::{tensor_apply, Mat};
use crate::math;

/// Per-axis factors of the linear maps between `H_n` and `Y_n`.
///
/// Synthesis, the indicator `1_D` and both projections are tensor products of
/// one-dimensional maps, so their compositions are as well; applying the
/// small composed factors is exact and avoids the quadrature grid.
#[derive(Debug, Clone, PartialEq)]
struct CrossMaps {
    /// `π^Y (ū)` for `u ∈ H_n`: `(2K+1) × n` per axis.
    h_to_y: [Mat; 3],
    /// `π_n (1_D v)` for `v ∈ Y_n`: `n × (2K+1)` per axis.
    y_to_h: [Mat; 3],
    /// `π^Y (1_D v)` for `v ∈ Y_n`: `(2K+1) × (2K+1)` per axis.
    y_mask: [Mat; 3],
}

/// The pair of bases used by one discretization level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBases {
    pub mag: MagnetizationBasis,
    pub em: EmBasis,
    cross: CrossMaps,
}

impl SpectralBases {
    pub fn new(mag: MagnetizationBasis, em: EmBasis) -> Result<Self> {
        let box_nodes = mag.quad_nodes_per_axis();
        for (i, a) in em.axes.iter().enumerate() {
            if a.box_nodes != box_nodes[i] {
                return Err(Error::MisalignedGrid { axis: i });
            }
        }
        let cross = CrossMaps {
            h_to_y: [0, 1, 2].map(|i| em.axes[i].analysis_d.matmul(&mag.axes[i].synth)),
            y_to_h: [0, 1, 2].map(|i| mag.axes[i].analysis.matmul(&em.axes[i].synth_d)),
            y_mask: [0, 1, 2].map(|i| em.axes[i].analysis_d.matmul(&em.axes[i].synth_d)),
        };
        Ok(SpectralBases { mag, em, cross })
    }

    /// Builds both bases: `modes` cosines per axis with the default quadrature,
    /// a torus of `torus_factor` times the box and `em_wavenumber` Fourier
    /// wavenumbers per axis.
    pub fn build(
        box_lengths: [f64; 3],
        modes: [usize; 3],
        quad_nodes: [usize; 3],
        torus_factor: f64,
        em_wavenumber: [usize; 3],
    ) -> Result<Self> {
        let mag = MagnetizationBasis::new(box_lengths, modes, quad_nodes)?;
        let torus = box_lengths.map(|l| l * torus_factor);
        let em = EmBasis::new(&mag, torus, em_wavenumber)?;
        SpectralBases::new(mag, em)
    }

    /// Zero extension of a box field to the torus grid.
    pub fn extend_by_zero(&self, f: &GridField) -> Result<GridField> {
        if f.domain != Domain::D {
            return Err(Error::DomainMismatch);
        }
        check_len(self.mag.num_nodes(), f.len())?;
        let mut out = GridField::zeros(self.em.num_nodes(), Domain::T);
        let [q1, q2, q3] = self.mag.quad_nodes_per_axis();
        let mut d = 0;
        for j1 in 0..q1 {
            for j2 in 0..q2 {
                let t = self.em.torus_index_of_box_node([j1, j2, 0]);
                out.values[t..t + q3].copy_from_slice(&f.values[d..d + q3]);
                d += q3;
            }
        }
        Ok(out)
    }

    /// Restriction of a torus field to the box nodes.
    pub fn restrict_to_d(&self, f: &GridField) -> Result<GridField> {
        if f.domain != Domain::T {
            return Err(Error::DomainMismatch);
        }
        check_len(self.em.num_nodes(), f.len())?;
        let [q1, q2, q3] = self.mag.quad_nodes_per_axis();
        let mut values = vec![[0.0; 3]; self.mag.num_nodes()];
        let mut d = 0;
        for j1 in 0..q1 {
            for j2 in 0..q2 {
                let t = self.em.torus_index_of_box_node([j1, j2, 0]);
                values[d..d + q3].copy_from_slice(&f.values[t..t + q3]);
                d += q3;
            }
        }
        Ok(GridField::new(values, Domain::D))
    }

    /// Quadrature `L²` inner product; both fields must live on the same grid.
    pub fn inner_product(&self, a: &GridField, b: &GridField) -> Result<f64> {
        if a.domain != b.domain {
            return Err(Error::DomainMismatch);
        }
        check_len(a.len(), b.len())?;
        let w = match a.domain {
            Domain::D => self.mag.weight(),
            Domain::T => self.em.weight(),
        };
        Ok(w * a.values.iter().zip(&b.values).map(|(x, y)| math::dot(*x, *y)).sum::<f64>())
    }

    /// `π^Y` of the zero extension of `Σ c_k e_k`.
    pub fn project_h_to_y(&self, c: &CoeffsH) -> Result<CoeffsY> {
        check_len(self.mag.num_modes(), c.modes())?;
        let m = &self.cross.h_to_y;
        Ok(CoeffsY::from_vec(tensor_apply([&m[0], &m[1], &m[2]], c.as_slice())))
    }

    /// `π_n` of the restriction of `Σ c_m y_m` to `D`.
    pub fn project_y_to_h(&self, c: &CoeffsY) -> Result<CoeffsH> {
        check_len(self.em.num_modes(), c.modes())?;
        let m = &self.cross.y_to_h;
        Ok(CoeffsH::from_vec(tensor_apply([&m[0], &m[1], &m[2]], c.as_slice())))
    }

    /// `π^Y (1_D v)`.
    pub fn mask_y(&self, c: &CoeffsY) -> Result<CoeffsY> {
        check_len(self.em.num_modes(), c.modes())?;
        let m = &self.cross.y_mask;
        Ok(CoeffsY::from_vec(tensor_apply([&m[0], &m[1], &m[2]], c.as_slice())))
    }
}
