use alloc::vec;
use alloc::vec::Vec;

use crate::math::V3;

/// Which tensor grid a [`GridField`] is sampled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Quadrature grid of the magnetization box.
    D,
    /// Quadrature grid of the enclosing torus.
    T,
}

/// Pointwise samples of a vector field at tensor quadrature nodes.
///
/// Node `(j1, j2, j3)` is stored at `(j1·N2 + j2)·N3 + j3`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub values: Vec<V3>,
    pub domain: Domain,
}

impl GridField {
    pub fn zeros(nodes: usize, domain: Domain) -> Self {
        GridField {
            values: vec![[0.0; 3]; nodes],
            domain,
        }
    }

    pub fn new(values: Vec<V3>, domain: Domain) -> Self {
        GridField { values, domain }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
