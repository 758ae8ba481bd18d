//! Parametrized Bloch Hamiltonians with analytic momentum gradients.
//!
//! The four-band model lives in the basis `(s↑, p↑, s↓, p↓)`: spin is the
//! outer tensor factor `σ` and orbital the inner factor `τ`, so a
//! Kronecker product `σ_a ⊗ τ_b` has `τ` indices running fastest.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{CMat, HermitianMatrix};
use crate::scalar::Real;

/// Gap threshold for the two-band models: `|d| < 1e-10` is a band touching.
pub const TWO_BAND_MIN_NORM: f64 = 1e-10;

/// A Hermitian matrix family `H(k)` over a `nparams`-dimensional parameter
/// space, with analytic `∂H/∂k_μ`.
pub trait BlochModel<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn nparams(&self) -> usize;

    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>>;

    /// `∂H/∂k_μ` for `μ = 0..nparams`.
    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>>;

    fn check_point(&self, k: &[T]) -> Result<()> {
        if k.len() != self.nparams() {
            return Err(Error::WrongDimension {
                expected: self.nparams(),
                found: k.len(),
            });
        }
        Ok(())
    }
}

impl<T: Real, M: BlochModel<T> + ?Sized> BlochModel<T> for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn nparams(&self) -> usize {
        (**self).nparams()
    }
    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        (**self).hamiltonian(k)
    }
    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        (**self).gradient(k)
    }
}

impl<T: Real, M: BlochModel<T> + ?Sized> BlochModel<T> for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn nparams(&self) -> usize {
        (**self).nparams()
    }
    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        (**self).hamiltonian(k)
    }
    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        (**self).gradient(k)
    }
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

fn mat2<T: Real>(a: [[(f64, f64); 2]; 2]) -> CMat<T> {
    CMat::from_fn(2, 2, |i, j| c(a[i][j].0, a[i][j].1))
}

/// Pauli matrices `(σ_x, σ_y, σ_z)`.
pub fn pauli<T: Real>() -> [HermitianMatrix<T>; 3] {
    let o = (0.0, 0.0);
    let x = mat2([[o, (1.0, 0.0)], [(1.0, 0.0), o]]);
    let y = mat2([[o, (0.0, -1.0)], [(0.0, 1.0), o]]);
    let z = mat2([[(1.0, 0.0), o], [o, (-1.0, 0.0)]]);
    [x, y, z].map(|m| HermitianMatrix::new(m).expect("Pauli matrices are Hermitian"))
}

/// The five Dirac matrices
/// `{σx⊗τx, σy⊗τx, σz⊗τx, I⊗τy, I⊗τz}`.
pub fn gamma_matrices<T: Real>() -> [HermitianMatrix<T>; 5] {
    let [sx, sy, sz] = pauli::<T>();
    let id = CMat::<T>::identity(2);
    let mats = [
        sx.kron(&sx),
        sy.kron(&sx),
        sz.kron(&sx),
        id.kron(&sy),
        id.kron(&sz),
    ];
    mats.map(|m| HermitianMatrix::new(m).expect("Kronecker products of Paulis are Hermitian"))
}

/// Spin operators `σ_α ⊗ I_τ` in the four-band basis.
pub fn ti_spin_matrices<T: Real>() -> [HermitianMatrix<T>; 3] {
    let id = CMat::<T>::identity(2);
    pauli::<T>().map(|s| HermitianMatrix::new(s.kron(&id)).expect("Hermitian"))
}

/// Band parameters of the four-band model, in eV (lattice constant and ħ set
/// to one).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiParams<T> {
    #[serde(rename = "M")]
    pub m: T,
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
}

impl<T: Real> Default for TiParams<T> {
    fn default() -> Self {
        Self {
            m: T::lit(-0.3),
            a: T::lit(2.87),
            b: T::lit(0.3),
        }
    }
}

/// Zeeman field coupling to spin, in eV.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldVector<T> {
    pub bx: T,
    pub by: T,
    pub bz: T,
}

impl<T: Real> FieldVector<T> {
    pub fn new(bx: T, by: T, bz: T) -> Self {
        Self { bx, by, bz }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.bx, self.by, self.bz]
    }

    pub fn is_zero(&self) -> bool {
        self.as_array().iter().all(|b| *b == T::zero())
    }
}

/// Crystal momentum in units where `a/ħ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KPoint<T>(pub [T; 3]);

impl<T: Real> KPoint<T> {
    pub fn new(kx: T, ky: T, kz: T) -> Self {
        Self([kx, ky, kz])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    /// Maps each component into `(-π, π]`.
    pub fn wrapped(&self) -> Self {
        let two_pi = T::PI() + T::PI();
        Self(self.0.map(|k| {
            let mut r = k - two_pi * ((k + T::PI()) / two_pi).floor();
            if r <= -T::PI() {
                r = r + two_pi;
            }
            r
        }))
    }
}

/// Five-component `d(k)` and its momentum gradient `grad[μ][i] = ∂d_i/∂k_μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DVector<T> {
    pub d: [T; 5],
    pub grad: [[T; 5]; 3],
}

pub fn d_vector<T: Real>(k: &KPoint<T>, p: &TiParams<T>) -> DVector<T> {
    let [kx, ky, kz] = k.0;
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let (sx, sy, sz) = (kx.sin(), ky.sin(), kz.sin());
    let (cx, cy, cz) = (kx.cos(), ky.cos(), kz.cos());
    let z = T::zero();

    let d = [
        p.a * sy,
        -p.a * sx,
        z,
        p.a * sz,
        p.m + six * p.b - two * p.b * (cx + cy + cz),
    ];
    let grad = [
        [z, -p.a * cx, z, z, two * p.b * sx],
        [p.a * cy, z, z, z, two * p.b * sy],
        [z, z, z, p.a * cz, two * p.b * sz],
    ];
    DVector { d, grad }
}

/// `H(k) = d(k)·Γ + B·σ` and its three momentum derivatives.
pub fn ti_hamiltonian<T: Real>(
    k: &KPoint<T>,
    p: &TiParams<T>,
    field: &FieldVector<T>,
) -> (HermitianMatrix<T>, [HermitianMatrix<T>; 3]) {
    let gammas = gamma_matrices::<T>();
    let spins = ti_spin_matrices::<T>();
    let dv = d_vector(k, p);

    let mut mats: Vec<HermitianMatrix<T>> = gammas.to_vec();
    mats.extend(spins);
    let mut coeffs = dv.d.to_vec();
    coeffs.extend(field.as_array());
    let h = HermitianMatrix::linear_combination(&coeffs, &mats);

    let grad = dv.grad.map(|g| HermitianMatrix::linear_combination(&g, &gammas));
    (h, grad)
}

/// Four-band class-AII lattice model in a Zeeman field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiModel<T> {
    pub params: TiParams<T>,
    pub field: FieldVector<T>,
}

impl<T: Real> Default for TiModel<T> {
    fn default() -> Self {
        Self::new(TiParams::default(), FieldVector::zero())
    }
}

impl<T: Real> TiModel<T> {
    pub fn new(params: TiParams<T>, field: FieldVector<T>) -> Self {
        Self { params, field }
    }

    fn kpoint(&self, k: &[T]) -> Result<KPoint<T>> {
        self.check_point(k)?;
        Ok(KPoint::new(k[0], k[1], k[2]))
    }
}

impl<T: Real> BlochModel<T> for TiModel<T> {
    fn dim(&self) -> usize {
        4
    }

    fn nparams(&self) -> usize {
        3
    }

    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        let kp = self.kpoint(k)?;
        Ok(ti_hamiltonian(&kp, &self.params, &self.field).0)
    }

    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        let kp = self.kpoint(k)?;
        let dv = d_vector(&kp, &self.params);
        let gammas = gamma_matrices::<T>();
        Ok(dv
            .grad
            .iter()
            .map(|g| HermitianMatrix::linear_combination(g, &gammas))
            .collect())
    }
}

fn d_dot_sigma<T: Real>(d: &[T; 3]) -> HermitianMatrix<T> {
    HermitianMatrix::linear_combination(d, &pauli::<T>())
}

fn check_gap<T: Real>(d: &[T; 3]) -> Result<()> {
    let norm = d.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    let min = T::lit(TWO_BAND_MIN_NORM);
    if !(norm >= min) {
        return Err(Error::GapClosing {
            gap: (norm + norm).as_f64(),
            threshold: (min + min).as_f64(),
        });
    }
    Ok(())
}

/// Generic two-band model `H(k) = d(k)·σ` defined by a closure returning the
/// three-vector `d(k)` and its gradient (`grad[μ] = ∂d/∂k_μ`).
#[derive(Clone)]
pub struct TwoBandModel<F> {
    nparams: usize,
    d_fn: F,
}

/// Wraps a `d(k)` closure as a [`BlochModel`].
pub fn two_band_model<T, F>(nparams: usize, d_fn: F) -> TwoBandModel<F>
where
    T: Real,
    F: Fn(&[T]) -> ([T; 3], Vec<[T; 3]>) + Send + Sync,
{
    TwoBandModel { nparams, d_fn }
}

impl<F> TwoBandModel<F> {
    pub fn d<T: Real>(&self, k: &[T]) -> ([T; 3], Vec<[T; 3]>)
    where
        F: Fn(&[T]) -> ([T; 3], Vec<[T; 3]>),
    {
        (self.d_fn)(k)
    }
}

impl<T, F> BlochModel<T> for TwoBandModel<F>
where
    T: Real,
    F: Fn(&[T]) -> ([T; 3], Vec<[T; 3]>) + Send + Sync,
{
    fn dim(&self) -> usize {
        2
    }

    fn nparams(&self) -> usize {
        self.nparams
    }

    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        self.check_point(k)?;
        let (d, _) = (self.d_fn)(k);
        check_gap(&d)?;
        Ok(d_dot_sigma(&d))
    }

    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        self.check_point(k)?;
        let (_, grad) = (self.d_fn)(k);
        if grad.len() != self.nparams {
            return Err(Error::DimMismatch {
                expected: self.nparams,
                found: grad.len(),
            });
        }
        Ok(grad.iter().map(d_dot_sigma).collect())
    }
}

/// Two-band lattice Dirac model over the 3D Brillouin zone,
/// `d = (sin kx, sin ky, m - cos kx - cos ky - tz cos kz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDirac<T> {
    pub m: T,
    pub tz: T,
}

impl<T: Real> Default for LatticeDirac<T> {
    fn default() -> Self {
        Self {
            m: T::lit(1.5),
            tz: T::zero(),
        }
    }
}

impl<T: Real> LatticeDirac<T> {
    pub fn d(&self, k: &[T]) -> ([T; 3], [[T; 3]; 3]) {
        let (kx, ky, kz) = (k[0], k[1], k[2]);
        let z = T::zero();
        let d = [
            kx.sin(),
            ky.sin(),
            self.m - kx.cos() - ky.cos() - self.tz * kz.cos(),
        ];
        let grad = [
            [kx.cos(), z, kx.sin()],
            [z, ky.cos(), ky.sin()],
            [z, z, self.tz * kz.sin()],
        ];
        (d, grad)
    }
}

impl<T: Real> BlochModel<T> for LatticeDirac<T> {
    fn dim(&self) -> usize {
        2
    }

    fn nparams(&self) -> usize {
        3
    }

    fn hamiltonian(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        self.check_point(k)?;
        let (d, _) = self.d(k);
        check_gap(&d)?;
        Ok(d_dot_sigma(&d))
    }

    fn gradient(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        self.check_point(k)?;
        let (_, grad) = self.d(k);
        Ok(grad.iter().map(d_dot_sigma).collect())
    }
}
