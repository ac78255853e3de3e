//! 2×2 matrices of the form `[[z, −w], [−w̄, z̄]]`.
//!
//! This family is closed under multiplication, and it contains every real-frequency
//! transfer matrix and every jump matrix. The determinant is `|z|² − |w|²`; on the
//! unit-determinant sheet the set is the group SU(1,1).

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

/// Determinant tolerance used by [`Su11Matrix::inverse`].
pub const DET_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Matrix {
    pub z: Complex64,
    pub w: Complex64,
}

impl Su11Matrix {
    pub const IDENTITY: Su11Matrix = Su11Matrix {
        z: Complex64::new(1.0, 0.0),
        w: Complex64::new(0.0, 0.0),
    };

    pub fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    /// `diag(e^{−iθ}, e^{iθ})`, free propagation over a phase `θ = Lσ`.
    pub fn phase(theta: f64) -> Self {
        Self {
            z: Complex64::from_polar(1.0, -theta),
            w: Complex64::new(0.0, 0.0),
        }
    }

    pub fn det(&self) -> f64 {
        self.z.norm_sqr() - self.w.norm_sqr()
    }

    /// `G⁻¹ = [[z̄, w], [w̄, z]]`, valid when `det = 1`.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_tolerance(DET_TOLERANCE)
    }

    pub fn inverse_with_tolerance(&self, tol: f64) -> Result<Self> {
        let d = self.det();
        if !d.is_finite() || (d - 1.0).abs() > tol {
            return Err(Error::DetNotOne(d));
        }
        Ok(Self {
            z: self.z.conj(),
            w: -self.w,
        })
    }

    pub fn to_array(&self) -> Mat2 {
        [[self.z, -self.w], [-self.w.conj(), self.z.conj()]]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.z * v[0] - self.w * v[1],
            -self.w.conj() * v[0] + self.z.conj() * v[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite()
    }
}

impl Mul for Su11Matrix {
    type Output = Su11Matrix;

    fn mul(self, rhs: Su11Matrix) -> Su11Matrix {
        Su11Matrix {
            z: self.z * rhs.z + self.w * rhs.w.conj(),
            w: self.z * rhs.w + self.w * rhs.z.conj(),
        }
    }
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn mat_max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn frobenius_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}
