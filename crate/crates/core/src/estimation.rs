//! Mixed-state estimation theory: symmetric logarithmic derivatives, the
//! quantum Fisher information matrix and the operator QCRB
//! `C ≥ Tr(∇ρ O)ᵀ F⁻¹ Tr(∇ρ O)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::band_state_derivatives;
use crate::models::BlochModel;
use crate::numlin::{eigh, sym_det_adj_inv, CMat, HermitianMatrix, RMat, SymMatrix};
use crate::qcrb::{PsdReport, Tolerance};
use crate::scalar::Real;
use crate::states::OperatorSet;

/// Central-difference step for families without analytic derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Relative cutoff on `λ_i + λ_j` below which SLD elements are dropped.
pub const SLD_CUTOFF: f64 = 1e-10;

/// A parametrised density matrix `ρ(k)`.
pub trait DensityFamily<T: Real>: Send + Sync {
    fn nparams(&self) -> usize;
    fn dim(&self) -> usize;
    fn rho(&self, k: &[T]) -> Result<HermitianMatrix<T>>;

    /// `∂_μρ`; central differences unless overridden.
    fn d_rho(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        central_difference(self, k, T::lit(FD_STEP))
    }
}

pub fn central_difference<T: Real, F: DensityFamily<T> + ?Sized>(
    family: &F,
    k: &[T],
    h: T,
) -> Result<Vec<HermitianMatrix<T>>> {
    let inv = (h + h).recip();
    (0..k.len())
        .map(|mu| {
            let mut kp = k.to_vec();
            let mut km = k.to_vec();
            kp[mu] = kp[mu] + h;
            km[mu] = km[mu] - h;
            Ok(family.rho(&kp)?.sub(&family.rho(&km)?).scale(inv))
        })
        .collect()
}

/// Checks unit trace and positivity to within `1e-12`.
pub fn validate_density<T: Real>(rho: &HermitianMatrix<T>) -> Result<()> {
    let tr = rho.trace().re;
    if !((tr - T::one()).abs() <= T::tol(1e-12)) {
        return Err(Error::InvalidDensity(format!("trace {}", tr)));
    }
    let min = crate::numlin::psd_residual(rho);
    if !(min >= -T::tol(1e-12)) {
        return Err(Error::InvalidDensity(format!("negative eigenvalue {}", min)));
    }
    Ok(())
}

/// `ρ(k) = A(k)A(k)† / Tr(A A†)` with `A(k) = A_0 + Σ_μ k_μ A_μ`.
#[derive(Clone, Debug)]
pub struct GramFamily<T> {
    pub base: CMat<T>,
    pub slopes: Vec<CMat<T>>,
}

impl<T: Real> GramFamily<T> {
    pub fn new(base: CMat<T>, slopes: Vec<CMat<T>>) -> Result<Self> {
        if !base.is_square() {
            return Err(Error::NotSquare {
                rows: base.rows(),
                cols: base.cols(),
            });
        }
        if let Some(bad) = slopes.iter().find(|s| s.rows() != base.rows() || s.cols() != base.cols()) {
            return Err(Error::DimMismatch {
                expected: base.rows(),
                found: bad.rows(),
            });
        }
        Ok(Self { base, slopes })
    }

    fn a(&self, k: &[T]) -> Result<CMat<T>> {
        if k.len() != self.slopes.len() {
            return Err(Error::WrongDimension {
                expected: self.slopes.len(),
                found: k.len(),
            });
        }
        Ok(self
            .slopes
            .iter()
            .zip(k)
            .fold(self.base.clone(), |acc, (s, &x)| &acc + &s.scale_real(x)))
    }
}

impl<T: Real> DensityFamily<T> for GramFamily<T> {
    fn nparams(&self) -> usize {
        self.slopes.len()
    }

    fn dim(&self) -> usize {
        self.base.rows()
    }

    fn rho(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        let a = self.a(k)?;
        let n = a.matmul(&a.adjoint());
        let t = n.trace().re;
        Ok(HermitianMatrix::from_hermitian_part(&n.scale_real(t.recip())))
    }

    fn d_rho(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        let a = self.a(k)?;
        let ah = a.adjoint();
        let n = a.matmul(&ah);
        let t = n.trace().re;
        Ok(self
            .slopes
            .iter()
            .map(|s| {
                let dn = &s.matmul(&ah) + &a.matmul(&s.adjoint());
                let dt = dn.trace().re;
                let m = &dn.scale_real(t.recip()) - &n.scale_real(dt / (t * t));
                HermitianMatrix::from_hermitian_part(&m)
            })
            .collect())
    }
}

/// Pure-state family `|n(k)><n(k)|` of one band of a Bloch model.
pub struct BandFamily<M> {
    pub model: M,
    pub band: usize,
}

impl<T: Real, M: BlochModel<T>> DensityFamily<T> for BandFamily<M> {
    fn nparams(&self) -> usize {
        self.model.nparams()
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn rho(&self, k: &[T]) -> Result<HermitianMatrix<T>> {
        let (psi, _) = band_state_derivatives(&self.model, k, self.band)?;
        Ok(psi.density())
    }

    fn d_rho(&self, k: &[T]) -> Result<Vec<HermitianMatrix<T>>> {
        let (psi, derivs) = band_state_derivatives(&self.model, k, self.band)?;
        let a = psi.amplitudes();
        Ok(derivs
            .iter()
            .map(|d| {
                let m = &CMat::outer(d, a) + &CMat::outer(a, d);
                HermitianMatrix::from_hermitian_part(&m)
            })
            .collect())
    }
}

/// Symmetric logarithmic derivatives `∂_μρ = ½(ρL_μ + L_μρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SldSet<T> {
    pub ls: Vec<HermitianMatrix<T>>,
    /// Absolute cutoff applied to `λ_i + λ_j`.
    pub cutoff: T,
}

pub fn sld<T: Real>(rho: &HermitianMatrix<T>, d_rho: &[HermitianMatrix<T>]) -> Result<SldSet<T>> {
    validate_density(rho)?;
    if let Some(bad) = d_rho.iter().find(|d| d.dim() != rho.dim()) {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            found: bad.dim(),
        });
    }
    let es = eigh(rho);
    let lam = &es.values;
    let lmax = lam.iter().fold(T::zero(), |a, &b| a.max(b));
    let cutoff = T::lit(SLD_CUTOFF) * lmax;
    let v = &es.vectors;
    let vh = v.adjoint();
    let two = T::lit(2.0);
    let ls = d_rho
        .iter()
        .map(|d| {
            let dd = vh.matmul(d.as_cmat()).matmul(v);
            let l = CMat::from_fn(rho.dim(), rho.dim(), |i, j| {
                let s = lam[i] + lam[j];
                if s > cutoff {
                    dd[(i, j)].scale(two / s)
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            });
            HermitianMatrix::from_hermitian_part(&v.matmul(&l).matmul(&vh))
        })
        .collect();
    Ok(SldSet { ls, cutoff })
}

/// `F_μν = ½ Tr ρ{L_μ, L_ν}`.
pub fn qfim<T: Real>(rho: &HermitianMatrix<T>, sld: &SldSet<T>) -> Result<SymMatrix<T>> {
    if let Some(bad) = sld.ls.iter().find(|l| l.dim() != rho.dim()) {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            found: bad.dim(),
        });
    }
    let half = T::lit(0.5);
    Ok(SymMatrix::from_fn(sld.ls.len(), |m, n| {
        half * rho.trace_product(&sld.ls[m].anticommutator(&sld.ls[n])).re
    }))
}

/// `C_ab = ½ Tr ρ{O_a, O_b} - Tr(ρO_a) Tr(ρO_b)`.
pub fn mixed_covariance<T: Real>(rho: &HermitianMatrix<T>, set: &OperatorSet<T>) -> Result<SymMatrix<T>> {
    if set.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            found: set.dim(),
        });
    }
    let ops = set.ops();
    let means: Vec<T> = ops.iter().map(|o| rho.trace_product(o).re).collect();
    let half = T::lit(0.5);
    Ok(SymMatrix::from_fn(ops.len(), |a, b| {
        half * rho.trace_product(&ops[a].anticommutator(&ops[b])).re - means[a] * means[b]
    }))
}

/// `C - Dᵀ F⁻¹ D` with `D_μa = Tr(∂_μρ O_a)`.
pub fn mixed_qcrb_residual<T: Real>(
    rho: &HermitianMatrix<T>,
    d_rho: &[HermitianMatrix<T>],
    set: &OperatorSet<T>,
    tol: &Tolerance,
) -> Result<PsdReport<T>> {
    let l = sld(rho, d_rho)?;
    let f = qfim(rho, &l)?;
    let dai = sym_det_adj_inv(&f);
    let Some(finv) = dai.inv else {
        return Err(Error::Degenerate {
            det: dai.det.as_f64(),
            threshold: dai.threshold.as_f64(),
        });
    };
    let c = mixed_covariance(rho, set)?;
    let d = RMat::from_fn(d_rho.len(), set.len(), |mu, a| d_rho[mu].trace_product(&set.ops()[a]).re);
    let bound = SymMatrix::from_symmetric_part(&d.transpose().matmul(&finv.to_rmat()).matmul(&d));
    let residual = SymMatrix::from_symmetric_part(&c.to_rmat().sub(&bound.to_rmat()));
    let abs_tr = |m: &SymMatrix<T>| m.diagonal().into_iter().fold(T::zero(), |s, x| s + x.abs());
    let scale = abs_tr(&c).max(abs_tr(&bound));
    Ok(PsdReport::new("mixed_qcrb", residual, scale, tol))
}
