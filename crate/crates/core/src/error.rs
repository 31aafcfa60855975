use alloc::string::String;

/// Errors raised by the spectral kernels and the time stepper.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("axis {axis}: {nodes} quadrature nodes, at least {required} required")]
    UndersizedQuadrature {
        axis: usize,
        nodes: usize,
        required: usize,
    },

    #[error("shape mismatch: expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("grid field lives on the wrong domain")]
    DomainMismatch,

    #[error("axis {axis}: box grid is not aligned with the torus grid")]
    MisalignedGrid { axis: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("forcing requested at t = {t}, defined on [0, {horizon}]")]
    ForcingOutOfRange { t: f64, horizon: f64 },

    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },

    #[error("blow-up at step {step}: norm {norm:e} exceeds guard")]
    BlowUp { step: usize, norm: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, found })
    }
}
