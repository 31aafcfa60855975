//! Spectral-Galerkin kernels for the stochastic Landau–Lifshitz–Gilbert
//! equation coupled to Maxwell's equations.
//!
//! The magnetization lives on a box `D = ∏[0, Lᵢ]` and is expanded in the
//! Neumann eigenfunctions of the Laplacian (tensor cosines). The
//! electromagnetic fields live on a periodic torus `T ⊃ D` and are expanded in
//! real Fourier modes, so that the curl is exact and block diagonal. Nonlinear
//! terms are evaluated pseudospectrally: synthesize on a tensor quadrature
//! grid, combine pointwise, project back.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration,
//! parallel ensembles and the command line live in the `spinwell` crate.
//!
//! Layout:
//!
//! - [`spectral`]: bases, projections, Laplacian, curl, quadrature.
//! - [`energy`]: anisotropy potential, energy functional, effective field.
//! - [`noise`]: noise family, truncation `ψ`, diffusion and Itô correction.
//! - [`dynamics`]: assembled drift/diffusion of the finite system.
//! - [`integrator`]: Brownian paths, Heun and Euler–Maruyama steppers.
//! - [`ensemble`]: Monte-Carlo path summaries and aggregation.
//! - [`diagnostics`]: identity residuals, moment and Hölder estimates, oracles.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod dynamics;
pub mod energy;
pub mod ensemble;
mod error;
pub mod initial;
pub mod integrator;
pub(crate) mod math;
pub mod noise;
pub mod spectral;
pub mod state;

pub use dynamics::{ForcingF, InductionSign, ItoCorrection, Model, ModelParams, StateDerivative};
pub use energy::{AnisotropyPotential, EnergyBreakdown, EnergyFunctional};
pub use error::{Error, Result};
pub use integrator::{BrownianPath, Scheme, SimOptions, Trajectory};
pub use noise::{Diffusion, NoiseFamily, TruncationPsi};
pub use spectral::{
    CoeffsH, CoeffsY, Domain, EmBasis, GridField, MagnetizationBasis, SpectralBases,
};
pub use state::GalerkinState;
