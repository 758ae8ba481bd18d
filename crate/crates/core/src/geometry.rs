//! Quantum metric and Berry curvature of occupied subspaces.
//!
//! Two independent routes are provided:
//!
//! * [`qgt_perturbative`] uses the band sum over occupied `n` / empty `m`
//!   pairs with `<m|∂n> = <m|∂H|n> / (E_n - E_m)`;
//! * [`qgt_fd`] differentiates the gauge-invariant projector `P(k)` by
//!   central differences.
//!
//! Eigenvectors are never differentiated numerically: their phases are
//! arbitrary from one k-point to the next.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::models::BlochModel;
use crate::numlin::{eigh, inner, AntisymMatrix, CMat, HermitianMatrix, SymMatrix};
use crate::scalar::Real;
use crate::states::{gap_threshold, slater_geometry_inputs, OperatorSet, PureState};

/// Quantum metric `g` and Berry curvature `Ω` at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTensor<T> {
    pub g: SymMatrix<T>,
    pub omega: AntisymMatrix<T>,
    pub k: Vec<T>,
}

impl<T: Real> GeometricTensor<T> {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Restriction to a subset of parameter directions.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self {
            g: self.g.submatrix(idx),
            omega: self.omega.submatrix(idx),
            k: self.k.clone(),
        }
    }

    /// From the complex tensor `T_μν = <D_μ|D_ν>`: `g = Re T`, `Ω = -2 Im T`.
    fn from_complex(t: &CMat<T>, k: &[T]) -> Self {
        let d = t.rows();
        let half = T::lit(0.5);
        Self {
            g: SymMatrix::from_fn(d, |m, n| half * (t[(m, n)].re + t[(n, m)].re)),
            omega: AntisymMatrix::from_fn(d, |m, n| -(t[(m, n)].im - t[(n, m)].im)),
            k: k.to_vec(),
        }
    }
}

/// Band-sum quantum geometric tensor of the `n_occ` lowest bands.
pub fn qgt_perturbative<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    k: &[T],
    n_occ: usize,
) -> Result<GeometricTensor<T>> {
    let h = model.hamiltonian(k)?;
    let grads = model.gradient(k)?;
    let es = eigh(&h);
    slater_geometry_inputs(&es, n_occ)?;

    let dim = es.dim();
    let v = &es.vectors;
    let vh = v.adjoint();
    // q[μ][(m, n)] = <m|∂_μ n> for empty m, occupied n
    let q: Vec<CMat<T>> = grads
        .iter()
        .map(|dh| {
            let full = vh.matmul(dh).matmul(v);
            CMat::from_fn(dim - n_occ, n_occ, |mi, n| {
                let m = mi + n_occ;
                full[(m, n)] / (es.values[n] - es.values[m])
            })
        })
        .collect();

    let d = grads.len();
    let t = CMat::from_fn(d, d, |mu, nu| {
        q[mu]
            .as_slice()
            .iter()
            .zip(q[nu].as_slice())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    });
    Ok(GeometricTensor::from_complex(&t, k))
}

fn occupied_projector<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    k: &[T],
    n_occ: usize,
) -> Result<HermitianMatrix<T>> {
    let es = eigh(&model.hamiltonian(k)?);
    Ok(slater_geometry_inputs(&es, n_occ)?.projector())
}

/// Projector finite-difference quantum geometric tensor,
/// `g = Re Tr[∂P (1-P) ∂P]`, `Ω = i Tr(P[∂P, ∂P])`.
pub fn qgt_fd<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    k: &[T],
    n_occ: usize,
    h: T,
) -> Result<GeometricTensor<T>> {
    if !(h >= T::lit(1e-7) && h <= T::lit(1e-3)) {
        return Err(Error::InvalidStep(h.as_f64()));
    }
    model.check_point(k)?;
    let p = occupied_projector(model, k, n_occ)?;
    let dim = p.dim();
    let q = &CMat::identity(dim) - p.as_cmat();
    let inv_2h = (h + h).recip();

    let mut dp = Vec::with_capacity(k.len());
    for mu in 0..k.len() {
        let mut kp = k.to_vec();
        let mut km = k.to_vec();
        kp[mu] = kp[mu] + h;
        km[mu] = km[mu] - h;
        let pp = occupied_projector(model, &kp, n_occ)?;
        let pm = occupied_projector(model, &km, n_occ)?;
        dp.push((pp.as_cmat() - pm.as_cmat()).scale_real(inv_2h));
    }

    let d = k.len();
    let g = SymMatrix::from_fn(d, |m, n| {
        let a = dp[m].matmul(&q).trace_product(&dp[n]).re;
        let b = dp[n].matmul(&q).trace_product(&dp[m]).re;
        (a + b) * T::lit(0.5)
    });
    let omega = AntisymMatrix::from_fn(d, |m, n| {
        let z = p.trace_product(&dp[m].commutator(&dp[n]));
        // Re(i z) = -Im z
        -z.im
    });
    Ok(GeometricTensor {
        g,
        omega,
        k: k.to_vec(),
    })
}

/// Quantum geometric tensor of a pure state from its derivatives, straight
/// from `g = Re<∂ψ|∂ψ> - <∂ψ|ψ><ψ|∂ψ>`, `Ω = i<∂ψ|∂ψ> - c.c.`.
pub fn pure_state_qgt<T: Real>(psi: &PureState<T>, derivs: &[Vec<Complex<T>>]) -> Result<GeometricTensor<T>> {
    check_derivs(psi, derivs)?;
    let a = psi.amplitudes();
    let d = derivs.len();
    let conn: Vec<Complex<T>> = derivs.iter().map(|dv| inner(a, dv)).collect();
    let t = CMat::from_fn(d, d, |m, n| inner(&derivs[m], &derivs[n]) - conn[m].conj() * conn[n]);
    Ok(GeometricTensor::from_complex(&t, &[]))
}

fn check_derivs<T: Real>(psi: &PureState<T>, derivs: &[Vec<Complex<T>>]) -> Result<()> {
    if let Some(bad) = derivs.iter().find(|d| d.len() != psi.dim()) {
        return Err(Error::DimMismatch {
            expected: psi.dim(),
            found: bad.len(),
        });
    }
    Ok(())
}

/// Gauge convention of a [`GeneratorSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorGauge {
    /// `Λ_μ = i(|D_μψ><ψ| - |ψ><D_μψ|)` with the projected derivative
    /// `D_μψ = (1 - |ψ><ψ|)∂_μψ`; then `<Λ_μ> = 0`.
    ProjectedDerivative,
}

/// Hermitian generators of parameter translations, `|D_μψ> = -iΛ_μ|ψ>`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet<T> {
    pub lambdas: Vec<HermitianMatrix<T>>,
    pub gauge: GeneratorGauge,
}

impl<T: Real> GeneratorSet<T> {
    pub fn to_operator_set(&self) -> Result<OperatorSet<T>> {
        let labels = (0..self.lambdas.len()).map(|i| format!("Lambda{i}")).collect();
        OperatorSet::new(self.lambdas.clone(), labels)
    }
}

pub fn build_generators<T: Real>(psi: &PureState<T>, derivs: &[Vec<Complex<T>>]) -> Result<GeneratorSet<T>> {
    check_derivs(psi, derivs)?;
    let a = psi.amplitudes();
    let i = Complex::new(T::zero(), T::one());
    let lambdas = derivs
        .iter()
        .map(|dv| {
            let c = inner(a, dv);
            let proj: Vec<Complex<T>> = dv.iter().zip(a).map(|(x, y)| x - y * c).collect();
            let m = &CMat::outer(&proj, a) - &CMat::outer(a, &proj);
            HermitianMatrix::from_hermitian_part(&m.scale(i))
        })
        .collect();
    Ok(GeneratorSet {
        lambdas,
        gauge: GeneratorGauge::ProjectedDerivative,
    })
}

/// Eigenstate `band` of `H(k)` and its parallel-transport derivatives
/// `|∂_μ n> = Σ_{m≠n} |m><m|∂_μH|n> / (E_n - E_m)`.
///
/// Requires `band` to be nondegenerate.
pub fn band_state_derivatives<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    k: &[T],
    band: usize,
) -> Result<(PureState<T>, Vec<Vec<Complex<T>>>)> {
    let es = eigh(&model.hamiltonian(k)?);
    let dim = es.dim();
    if band >= dim {
        return Err(Error::InvalidOccupation { n_occ: band, dim });
    }
    let threshold = gap_threshold(&es.values);
    let e = es.values[band];
    let gap = (0..dim)
        .filter(|&m| m != band)
        .map(|m| (es.values[m] - e).abs())
        .fold(T::infinity(), |a, b| a.min(b));
    if !(gap > threshold) {
        return Err(Error::GapClosing {
            gap: gap.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let n = es.vector(band);
    let derivs = model
        .gradient(k)?
        .iter()
        .map(|dh| {
            let dhn = dh.mat_vec(&n);
            let mut out = vec![Complex::zero(); dim];
            for m in (0..dim).filter(|&m| m != band) {
                let vm = es.vector(m);
                let coef = inner(&vm, &dhn) / (e - es.values[m]);
                for (o, x) in out.iter_mut().zip(&vm) {
                    *o = *o + x * coef;
                }
            }
            out
        })
        .collect();
    Ok((PureState::new(n)?, derivs))
}
