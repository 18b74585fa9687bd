//! Smoothing kernels and the constants the interval formulas need.
//!
//! A [`KernelSpec`] is a plain value: the kernel function plus its roughness
//! `R(K) = ∫K²`, second moment `μ₂(K) = ∫u²K` and value at the origin. The
//! constants are stored rather than recomputed because they are read inside
//! the bootstrap loops.

use std::f64::consts::PI;
use std::fmt;

/// Weights below this are treated as exact zeros.
pub const WEIGHT_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy)]
pub struct KernelSpec {
    name: &'static str,
    eval: fn(f64) -> f64,
    roughness: f64,
    second_moment: f64,
    at_zero: f64,
}

impl KernelSpec {
    /// Builds a custom kernel. The caller is responsible for the constants
    /// matching `eval`.
    pub fn new(
        name: &'static str,
        eval: fn(f64) -> f64,
        roughness: f64,
        second_moment: f64,
        at_zero: f64,
    ) -> Self {
        Self {
            name,
            eval,
            roughness,
            second_moment,
            at_zero,
        }
    }

    /// The standard normal density.
    pub fn gaussian() -> Self {
        Self {
            name: "gaussian",
            eval: standard_normal_density,
            roughness: 1.0 / (2.0 * PI.sqrt()),
            second_moment: 1.0,
            at_zero: 1.0 / (2.0 * PI).sqrt(),
        }
    }

    #[inline]
    pub fn evaluate(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    /// Kernel value with underflow clamped to zero. Every estimator in the
    /// crate goes through this so that all code paths agree bit for bit.
    #[inline]
    pub fn weight(&self, u: f64) -> f64 {
        let w = (self.eval)(u);
        if w < WEIGHT_FLOOR {
            0.0
        } else {
            w
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// `R(K) = ∫ K(u)² du`.
    pub fn roughness(&self) -> f64 {
        self.roughness
    }

    /// `μ₂(K) = ∫ u² K(u) du`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::gaussian()
    }
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("roughness", &self.roughness)
            .field("second_moment", &self.second_moment)
            .field("at_zero", &self.at_zero)
            .finish()
    }
}

pub fn gaussian_kernel() -> KernelSpec {
    KernelSpec::gaussian()
}

#[inline]
fn standard_normal_density(u: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}
