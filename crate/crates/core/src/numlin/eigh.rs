//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Intended for the small matrices this crate works with (up to a few dozen
//! rows). Jacobi is slower than tridiagonal QR but gives eigenvectors that are
//! orthonormal to working precision, which the perturbation sums rely on.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::cmat::CMat;
use super::hermitian::HermitianMatrix;
use super::sym::SymMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Ascending eigenvalues and the matching orthonormal eigenvectors (as
/// columns of `vectors`).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

impl<T: Real> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex<T>> {
        self.vectors.column(j)
    }

    /// `V diag(values) V†`
    pub fn reconstruct(&self) -> CMat<T> {
        let lam = CMat::from_real_diag(&self.values);
        self.vectors.matmul(&lam).matmul(&self.vectors.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is rephased so its
/// largest-magnitude component is real and positive.
pub fn eigh<T: Real>(h: &HermitianMatrix<T>) -> EigenSystem<T> {
    let n = h.dim();
    let mut a = h.as_cmat().clone();
    let mut v = CMat::<T>::identity(n);

    let total = a.frobenius_norm();
    if total == T::zero() || n < 2 {
        return finish(a, v);
    }
    let target = T::epsilon() * total;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    finish(a, v)
}

/// Eigenvalues only (ascending).
pub fn eigvalsh<T: Real>(h: &HermitianMatrix<T>) -> Vec<T> {
    eigh(h).values
}

/// Minimum eigenvalue; nonnegative (to rounding) iff the matrix is PSD.
pub fn psd_residual<T: Real>(h: &HermitianMatrix<T>) -> T {
    eigvalsh(h)
        .into_iter()
        .fold(T::infinity(), |acc, x| acc.min(x))
}

impl<T: Real> SymMatrix<T> {
    pub fn to_hermitian(&self) -> HermitianMatrix<T> {
        let n = self.dim();
        let m = CMat::from_fn(n, n, |i, j| Complex::new(self.get(i, j), T::zero()));
        HermitianMatrix::from_hermitian_part(&m)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        eigvalsh(&self.to_hermitian())
    }

    pub fn psd_residual(&self) -> T {
        if self.dim() == 0 {
            return T::zero();
        }
        psd_residual(&self.to_hermitian())
    }
}

fn off_diagonal_norm<T: Real>(a: &CMat<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `J = diag(1, e^{-iφ})·R(θ)` acting on the
/// `(p, q)` plane: `A ← J†AJ`, `V ← VJ`.
fn rotate<T: Real>(a: &mut CMat<T>, v: &mut CMat<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let tau = (aqq - app) / (mag + mag);
    let t = if tau >= T::zero() {
        (tau + (T::one() + tau * tau).sqrt()).recip()
    } else {
        -(-tau + (T::one() + tau * tau).sqrt()).recip()
    };
    let c = (T::one() + t * t).sqrt().recip();
    let s = t * c;

    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    let ph = phase.conj();
    // Columns of J restricted to the (p, q) plane.
    let jpp = cc;
    let jpq = ss;
    let jqp = -ss * ph;
    let jqq = cc * ph;

    let n = a.rows();
    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn finish<T: Real>(a: CMat<T>, v: CMat<T>) -> EigenSystem<T> {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut best = 0;
        let mut best_mag = T::zero();
        for k in 0..n {
            let m = v[(k, src)].norm();
            if m > best_mag {
                best_mag = m;
                best = k;
            }
        }
        let fix = if best_mag > T::zero() {
            (v[(best, src)] / best_mag).conj()
        } else {
            Complex::one()
        };
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)] * fix;
        }
        vectors[(best, col)] = Complex::new(vectors[(best, col)].re, T::zero());
    }
    EigenSystem { values, vectors }
}
