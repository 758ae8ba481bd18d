use std::ops::Deref;

use num_complex::Complex;

use super::cmat::CMat;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix that is Hermitian to within `1e-12` of its largest
/// entry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T>(CMat<T>);

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: CMat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = m.hermiticity_deviation();
        if dev > T::tol(1e-12) * m.max_abs() {
            return Err(Error::NonHermitianInput {
                deviation: dev.as_f64(),
            });
        }
        Ok(Self(m))
    }

    /// Projects onto the Hermitian part, `(M + M†)/2`.
    ///
    /// Used for matrices that are Hermitian analytically but were assembled
    /// with rounding.
    pub fn from_hermitian_part(m: &CMat<T>) -> Self {
        assert!(m.is_square(), "Hermitian part of a non-square matrix");
        let h = (m + &m.adjoint()).scale_real(T::lit(0.5));
        Self(h)
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n))
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self(CMat::from_real_diag(diag))
    }

    /// `|v><v|`
    pub fn projector(v: &[Complex<T>]) -> Self {
        Self::from_hermitian_part(&CMat::outer(v, v))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_cmat(&self) -> &CMat<T> {
        &self.0
    }

    pub fn into_cmat(self) -> CMat<T> {
        self.0
    }

    /// Real linear combination `sum_i c_i H_i` (stays Hermitian).
    pub fn linear_combination(coeffs: &[T], mats: &[Self]) -> Self {
        assert_eq!(coeffs.len(), mats.len());
        assert!(!mats.is_empty());
        let n = mats[0].dim();
        let mut acc = CMat::zeros(n, n);
        for (&c, m) in coeffs.iter().zip(mats) {
            if c != T::zero() {
                acc = &acc + &m.0.scale_real(c);
            }
        }
        Self(acc)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(&self.0 - &rhs.0)
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `U† H U`
    pub fn conjugate_by(&self, u: &CMat<T>) -> Self {
        Self::from_hermitian_part(&u.adjoint().matmul(&self.0).matmul(u))
    }

    /// Real expectation value `<v|H|v>` (no normalization).
    pub fn quadratic_form(&self, v: &[Complex<T>]) -> T {
        super::cmat::inner(v, &self.0.mat_vec(v)).re
    }
}

impl<T> Deref for HermitianMatrix<T> {
    type Target = CMat<T>;

    fn deref(&self) -> &CMat<T> {
        &self.0
    }
}

impl<T: Real> TryFrom<CMat<T>> for HermitianMatrix<T> {
    type Error = Error;

    fn try_from(m: CMat<T>) -> Result<Self> {
        Self::new(m)
    }
}
