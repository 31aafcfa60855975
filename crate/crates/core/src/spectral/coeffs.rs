use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::marker::PhantomData;

use crate::error::{check_len, Result};
use crate::math::{self, V3};

/// Marker for the magnetization space `H_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HSpace {}

/// Marker for the electromagnetic space `Y_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YSpace {}

/// Spectral coefficients: one real triple per scalar mode.
///
/// The space marker keeps `H_n` and `Y_n` coefficients from being mixed.
pub struct Coeffs<S> {
    data: Vec<V3>,
    _space: PhantomData<S>,
}

pub type CoeffsH = Coeffs<HSpace>;
pub type CoeffsY = Coeffs<YSpace>;

impl<S> Clone for Coeffs<S> {
    fn clone(&self) -> Self {
        Coeffs::from_vec(self.data.clone())
    }
}

impl<S> PartialEq for Coeffs<S> {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl<S> fmt::Debug for Coeffs<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coeffs").field("modes", &self.data.len()).finish()
    }
}

impl<S> Coeffs<S> {
    pub fn zeros(modes: usize) -> Self {
        Coeffs::from_vec(vec![[0.0; 3]; modes])
    }

    pub fn from_vec(data: Vec<V3>) -> Self {
        Coeffs {
            data,
            _space: PhantomData,
        }
    }

    /// Number of scalar modes.
    pub fn modes(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[V3] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [V3] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<V3> {
        self.data
    }

    /// Flat view, mode-major: `[c₀ₓ, c₀ᵧ, c₀𝓏, c₁ₓ, …]`.
    pub fn iter_flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().flat_map(|v| v.iter().copied())
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        Coeffs::from_vec(flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| math::dot(*a, *b))
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    /// `self += s·other`
    pub fn axpy(&mut self, s: f64, other: &Self) -> Result<()> {
        check_len(self.data.len(), other.data.len())?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = math::axpy(*a, s, *b);
        }
        Ok(())
    }

    /// `self + s·other` as a new value; shapes must match.
    pub fn plus_scaled(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        Coeffs::from_vec(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| math::axpy(*a, s, *b))
                .collect(),
        )
    }

    pub fn scaled(&self, s: f64) -> Self {
        Coeffs::from_vec(self.data.iter().map(|a| math::scale(s, *a)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.plus_scaled(-1.0, other)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter_flat().fold(0.0, |m, x| m.max(x.abs()))
    }
}
