//! Seeded random inputs for property checks and demos.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::estimation::GramFamily;
use crate::models::{two_band_model, BlochModel};
use crate::numlin::{AntisymMatrix, CMat, HermitianMatrix, SymMatrix};
use crate::scalar::Real;
use crate::states::{OperatorSet, PureState};

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_cmat<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| Complex::new(normal(rng), normal(rng)))
}

/// Hermitian part of a complex Gaussian matrix.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix<T> {
    HermitianMatrix::from_hermitian_part(&random_cmat(rng, n, n))
}

/// Haar-random pure state.
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState<T> {
    loop {
        let v = random_cmat::<T, R>(rng, n, 1).column(0);
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

pub fn random_operator_set<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> OperatorSet<T> {
    let ops = (0..count).map(|_| random_hermitian(rng, dim)).collect();
    OperatorSet::unlabelled(ops).expect("count > 0 and equal dims")
}

/// `g = AAᵀ + shift·I`; positive definite for `shift > 0`.
pub fn random_spd<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, shift: T) -> SymMatrix<T> {
    let a: Vec<T> = (0..n * n).map(|_| normal(rng)).collect();
    SymMatrix::from_fn(n, |i, j| {
        let s = (0..n).fold(T::zero(), |s, k| s + a[i * n + k] * a[j * n + k]);
        if i == j {
            s + shift
        } else {
            s
        }
    })
}

pub fn random_antisym<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> AntisymMatrix<T> {
    AntisymMatrix::from_fn(n, |_, _| normal(rng))
}

pub fn random_d_vector<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    [normal(rng), normal(rng), normal(rng)]
}

/// Density family `AAᵀ/Tr` built from Gaussian matrices; full rank with
/// probability one.
pub fn random_gram_family<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, nparams: usize) -> GramFamily<T> {
    let base = random_cmat(rng, dim, dim);
    let slopes = (0..nparams).map(|_| random_cmat(rng, dim, dim)).collect();
    GramFamily::new(base, slopes).expect("square blocks of equal size")
}

/// Two-parameter qubit Hamiltonian
/// `d(k) = c + Σ_μ (a_μ cos k_μ + b_μ sin k_μ)`.
pub fn random_qubit_model<T: Real, R: Rng + ?Sized>(rng: &mut R) -> impl BlochModel<T> + Clone {
    let c: [T; 3] = random_d_vector(rng);
    let a: [[T; 3]; 2] = [random_d_vector(rng), random_d_vector(rng)];
    let b: [[T; 3]; 2] = [random_d_vector(rng), random_d_vector(rng)];
    two_band_model(2, move |k: &[T]| {
        let mut d = c;
        let mut grad = vec![[T::zero(); 3]; 2];
        for mu in 0..2 {
            let (s, co) = k[mu].sin_cos();
            for i in 0..3 {
                d[i] = d[i] + a[mu][i] * co + b[mu][i] * s;
                grad[mu][i] = -a[mu][i] * s + b[mu][i] * co;
            }
        }
        (d, grad)
    })
}
