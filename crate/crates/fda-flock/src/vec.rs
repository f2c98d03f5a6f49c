//! Dimension-generic vectors and the handful of operations the controllers
//! and metrics need.
//!
//! The ambient dimension `m` is a runtime parameter so 2D desk tests and 3D
//! production runs share one code path. Mixing dimensions in one expression
//! is a programming error and panics in debug builds.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Speed floor below which a velocity has no usable direction; cosine
/// similarity against such a vector is 0 by convention.
pub const EPS_SPEED: f64 = 1e-9;

/// A point, velocity, or acceleration in R^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecM(Vec<f64>);

impl VecM {
    pub fn zeros(m: usize) -> Self {
        VecM(vec![0.0; m])
    }

    pub fn from_components(components: Vec<f64>) -> Self {
        VecM(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &VecM) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, factor: f64) -> VecM {
        VecM(self.0.iter().map(|c| c * factor).collect())
    }
}

impl From<&[f64]> for VecM {
    fn from(components: &[f64]) -> Self {
        VecM(components.to_vec())
    }
}

impl<const K: usize> From<[f64; K]> for VecM {
    fn from(components: [f64; K]) -> Self {
        VecM(components.to_vec())
    }
}

impl Add for &VecM {
    type Output = VecM;
    fn add(self, rhs: &VecM) -> VecM {
        debug_assert_eq!(self.dim(), rhs.dim());
        VecM(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VecM {
    type Output = VecM;
    fn sub(self, rhs: &VecM) -> VecM {
        debug_assert_eq!(self.dim(), rhs.dim());
        VecM(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &VecM {
    type Output = VecM;
    fn mul(self, rhs: f64) -> VecM {
        self.scale(rhs)
    }
}

impl Neg for &VecM {
    type Output = VecM;
    fn neg(self) -> VecM {
        self.scale(-1.0)
    }
}

impl AddAssign<&VecM> for VecM {
    fn add_assign(&mut self, rhs: &VecM) {
        debug_assert_eq!(self.dim(), rhs.dim());
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

/// Euclidean norm of `v`.
pub fn norm(v: &VecM) -> f64 {
    v.norm()
}

/// Cosine similarity of two vectors, in [-1, 1].
///
/// Returns 0 when either vector is shorter than [`EPS_SPEED`]: a near-zero
/// velocity carries no direction to compare against.
pub fn cosine_similarity(a: &VecM, b: &VecM) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na < EPS_SPEED || nb < EPS_SPEED {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(-1.0, 1.0)
}
