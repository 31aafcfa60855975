//! Brute-force references. They share only the basis definitions with the
//! main code path: no separable transforms, no cached tables from
//! [`MagnetizationBasis`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{self, V3};
use crate::spectral::{CoeffsH, MagnetizationBasis};

/// `(f(h) − f(−h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Mixed second difference `∂²f/∂s∂t` at the origin.
pub fn mixed_second_difference(f: impl Fn(f64, f64) -> f64, h: f64) -> f64 {
    (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
}

/// Direct-sum evaluation and projection on a midpoint grid `refine` times
/// finer than the basis's own quadrature grid.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    lengths: [f64; 3],
    modes: [usize; 3],
    nodes: [usize; 3],
    weight: f64,
}

impl DenseOracle {
    pub fn new(mag: &MagnetizationBasis, refine: usize) -> Self {
        let lengths = mag.box_lengths();
        let q = mag.quad_nodes_per_axis();
        let nodes = [0, 1, 2].map(|i| q[i] * refine.max(1));
        let weight = (0..3).map(|i| lengths[i] / nodes[i] as f64).product();
        DenseOracle {
            lengths,
            modes: mag.modes_per_axis(),
            nodes,
            weight,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn node(&self, index: usize) -> V3 {
        let [_, n2, n3] = self.nodes;
        let j = [index / (n2 * n3), (index / n3) % n2, index % n3];
        [0, 1, 2].map(|i| (j[i] as f64 + 0.5) * self.lengths[i] / self.nodes[i] as f64)
    }

    fn cosine(&self, axis: usize, k: usize, x: f64) -> f64 {
        let l = self.lengths[axis];
        let c = if k == 0 {
            1.0 / math::sqrt(l)
        } else {
            math::sqrt(2.0 / l)
        };
        c * math::cos(PI * k as f64 * x / l)
    }

    fn table(&self, axis: usize) -> Vec<Vec<f64>> {
        (0..self.modes[axis])
            .map(|k| {
                (0..self.nodes[axis])
                    .map(|j| {
                        let x = (j as f64 + 0.5) * self.lengths[axis] / self.nodes[axis] as f64;
                        self.cosine(axis, k, x)
                    })
                    .collect()
            })
            .collect()
    }

    /// `Σ_k c_k e_k(x)` at every fine node, summed mode by mode.
    pub fn eval(&self, c: &CoeffsH) -> Vec<V3> {
        let t = [self.table(0), self.table(1), self.table(2)];
        let [n1, n2, n3] = self.nodes;
        let [m1, m2, m3] = self.modes;
        let mut out = vec![[0.0; 3]; self.num_nodes()];
        for j1 in 0..n1 {
            for j2 in 0..n2 {
                for j3 in 0..n3 {
                    let mut acc = [0.0; 3];
                    for k1 in 0..m1 {
                        for k2 in 0..m2 {
                            let w12 = t[0][k1][j1] * t[1][k2][j2];
                            for k3 in 0..m3 {
                                let w = w12 * t[2][k3][j3];
                                let v = c.as_slice()[(k1 * m2 + k2) * m3 + k3];
                                acc = math::axpy(acc, w, v);
                            }
                        }
                    }
                    out[(j1 * n2 + j2) * n3 + j3] = acc;
                }
            }
        }
        out
    }

    /// `∫ f e_k` by the fine midpoint rule, mode by mode.
    pub fn project(&self, f: &[V3]) -> CoeffsH {
        let t = [self.table(0), self.table(1), self.table(2)];
        let [n1, n2, n3] = self.nodes;
        let [m1, m2, m3] = self.modes;
        let mut out = vec![[0.0; 3]; m1 * m2 * m3];
        for k1 in 0..m1 {
            for k2 in 0..m2 {
                for k3 in 0..m3 {
                    let mut acc = [0.0; 3];
                    for j1 in 0..n1 {
                        for j2 in 0..n2 {
                            let w12 = t[0][k1][j1] * t[1][k2][j2];
                            for j3 in 0..n3 {
                                let v = f[(j1 * n2 + j2) * n3 + j3];
                                acc = math::axpy(acc, w12 * t[2][k3][j3], v);
                            }
                        }
                    }
                    out[(k1 * m2 + k2) * m3 + k3] = math::scale(self.weight, acc);
                }
            }
        }
        CoeffsH::from_vec(out)
    }

    /// `π_n[λ₁ M×ρ − λ₂ M×(M×ρ)]` for given `M, ρ ∈ H_n`.
    pub fn llg_terms(&self, m: &CoeffsH, rho: &CoeffsH, lambda1: f64, lambda2: f64) -> CoeffsH {
        let mv = self.eval(m);
        let rv = self.eval(rho);
        let f: Vec<V3> = mv
            .iter()
            .zip(&rv)
            .map(|(m, r)| {
                let x = math::cross(*m, *r);
                math::sub(math::scale(lambda1, x), math::scale(lambda2, math::cross(*m, x)))
            })
            .collect();
        self.project(&f)
    }
}

/// Closed-form macrospin under uniaxial anisotropy `K(1 − (m·a)²)` with
/// `dm/dt = λ₁ m×ρ − λ₂ m×(m×ρ)`, `ρ = 2K(m·a)a`, `|m₀| = 1`.
///
/// `p = m·a` solves `d(p²)/dt = 4Kλ₂p²(1−p²)` and the transverse part rotates
/// about `a` by `−2Kλ₁∫p`.
pub fn macrospin(m0: V3, axis: V3, k: f64, lambda1: f64, lambda2: f64, t: f64) -> V3 {
    let a = math::scale(1.0 / math::norm(axis), axis);
    let p0 = math::dot(m0, a);
    let perp = math::sub(m0, math::scale(p0, a));
    let q0 = math::norm(perp);
    if q0 == 0.0 {
        return m0;
    }
    let u0 = math::scale(1.0 / q0, perp);
    let c = 4.0 * k * lambda2;
    let y0 = p0 * p0;
    let (p, int_p) = if y0 == 0.0 {
        (0.0, 0.0)
    } else if c == 0.0 {
        (p0, p0 * t)
    } else {
        let e = libm::exp(c * t);
        let y = y0 * e / (1.0 - y0 + y0 * e);
        let big = (1.0 - y0) / y0;
        let anti = |u: f64| {
            let s = math::sqrt(1.0 + u);
            math::ln((s - 1.0) / (s + 1.0))
        };
        let int_sqrt_y = if big == 0.0 {
            t
        } else {
            -(anti(big * libm::exp(-c * t)) - anti(big)) / c
        };
        (p0.signum() * math::sqrt(y), p0.signum() * int_sqrt_y)
    };
    let q = math::sqrt((1.0 - p * p).max(0.0));
    let phi = -2.0 * k * lambda1 * int_p;
    let rotated = math::add(
        math::scale(math::cos(phi), u0),
        math::scale(math::sin(phi), math::cross(a, u0)),
    );
    math::add(math::scale(p, a), math::scale(q, rotated))
}

/// Undamped precession period `2π / |2Kλ₁(m·a)|` of a unit macrospin.
pub fn macrospin_period(m0: V3, axis: V3, k: f64, lambda1: f64) -> f64 {
    let a = math::scale(1.0 / math::norm(axis), axis);
    2.0 * PI / (2.0 * k * lambda1 * math::dot(m0, a)).abs()
}
