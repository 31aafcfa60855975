//! Separable (sum-factorized) transforms between tensor coefficient arrays and
//! tensor grids. Every entry is a 3-vector; the three components share the
//! same scalar transform.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::V3;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose_scaled(&self, s: f64) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| s * self.get(j, i))
    }

    /// `self · other`
    pub fn matmul(&self, other: &Mat) -> Mat {
        debug_assert_eq!(self.cols, other.rows);
        Mat::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    /// Rows `start..start + count`.
    pub fn row_block(&self, start: usize, count: usize) -> Mat {
        Mat {
            rows: count,
            cols: self.cols,
            data: self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        }
    }
}

#[inline]
fn axpy_row(dst: &mut [V3], w: f64, src: &[V3]) {
    for (d, s) in dst.as_flattened_mut().iter_mut().zip(src.as_flattened()) {
        *d += w * s;
    }
}

/// `out[i1,i2,i3] = Σ a1[i1,j1]·a2[i2,j2]·a3[i3,j3]·input[j1,j2,j3]`.
///
/// The summation order is fixed, so results are bit-reproducible.
pub(crate) fn tensor_apply(a: [&Mat; 3], input: &[V3]) -> Vec<V3> {
    let (c1, c2, c3) = (a[0].cols, a[1].cols, a[2].cols);
    let (r1, r2, r3) = (a[0].rows, a[1].rows, a[2].rows);
    debug_assert_eq!(input.len(), c1 * c2 * c3);

    // axis 3
    let mut t1 = vec![[0.0; 3]; c1 * c2 * r3];
    for p in 0..c1 * c2 {
        let src = &input[p * c3..(p + 1) * c3];
        let dst = &mut t1[p * r3..(p + 1) * r3];
        for (i3, d) in dst.iter_mut().enumerate() {
            let row = a[2].row(i3);
            let mut acc = [0.0; 3];
            for (w, s) in row.iter().zip(src) {
                acc[0] += w * s[0];
                acc[1] += w * s[1];
                acc[2] += w * s[2];
            }
            *d = acc;
        }
    }

    // axis 2
    let mut t2 = vec![[0.0; 3]; c1 * r2 * r3];
    for j1 in 0..c1 {
        for i2 in 0..r2 {
            let dst = &mut t2[(j1 * r2 + i2) * r3..(j1 * r2 + i2 + 1) * r3];
            for j2 in 0..c2 {
                let src = &t1[(j1 * c2 + j2) * r3..(j1 * c2 + j2 + 1) * r3];
                axpy_row(dst, a[1].get(i2, j2), src);
            }
        }
    }

    // axis 1
    let plane = r2 * r3;
    let mut out = vec![[0.0; 3]; r1 * plane];
    for i1 in 0..r1 {
        let dst = &mut out[i1 * plane..(i1 + 1) * plane];
        for j1 in 0..c1 {
            axpy_row(dst, a[0].get(i1, j1), &t2[j1 * plane..(j1 + 1) * plane]);
        }
    }
    out
}
