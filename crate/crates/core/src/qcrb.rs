//! Operator quantum Cramér-Rao bounds for pure states and the self-bound
//! they imply on the quantum metric.
//!
//! Every scalar residual is reported in polynomial form,
//! `4 det g · g_αα + (Ω adj(g) Ω)_αα ≥ 0`, so it stays finite where
//! `det g` vanishes.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometricTensor;
use crate::numlin::{inner, sym_det_adj_inv, AntisymMatrix, RMat, SymMatrix};
use crate::scalar::Real;
use crate::states::{cov_comm, OperatorSet, PureState};

pub const AXES: [&str; 3] = ["x", "y", "z"];

/// Acceptance thresholds for bound checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    /// Scalar bounds pass when `V ≥ -rel · scale`.
    pub rel: f64,
    /// Smallest admissible `scale`.
    pub floor: f64,
    /// Matrix bounds pass when `min eig ≥ -psd_rel · scale`.
    pub psd_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            floor: 1e-14,
            psd_rel: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            rel: self.rel * factor,
            psd_rel: self.psd_rel * factor,
            ..self
        }
    }
}

/// One scalar inequality `lhs ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    /// `lhs - rhs`
    pub residual: T,
    /// Magnitude the tolerance is taken relative to.
    pub scale: T,
    pub tol: T,
    pub degenerate: bool,
    pub satisfied: bool,
}

impl<T: Real> BoundReport<T> {
    /// `natural_scale` is a homogeneous size estimate of both sides; the
    /// tolerance is `rel · max(|lhs|, |rhs|, natural_scale, floor)`.
    pub fn new(name: impl Into<String>, lhs: T, rhs: T, natural_scale: T, degenerate: bool, tol: &Tolerance) -> Self {
        let scale = lhs
            .abs()
            .max(rhs.abs())
            .max(natural_scale.abs())
            .max(T::lit(tol.floor));
        let bound = T::lit(tol.rel) * scale;
        let residual = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            residual,
            scale,
            tol: bound,
            degenerate,
            // NaN residuals fail
            satisfied: residual >= -bound,
        }
    }
}

/// Positive semidefiniteness of a residual matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdReport<T> {
    pub name: String,
    pub residual: SymMatrix<T>,
    pub min_eig: T,
    pub scale: T,
    pub tol: T,
    pub satisfied: bool,
}

impl<T: Real> PsdReport<T> {
    pub fn new(name: impl Into<String>, residual: SymMatrix<T>, scale: T, tol: &Tolerance) -> Self {
        let min_eig = residual.psd_residual();
        let scale = scale.abs().max(T::lit(tol.floor));
        let bound = T::lit(tol.psd_rel) * scale;
        Self {
            name: name.into(),
            residual,
            min_eig,
            scale,
            tol: bound,
            satisfied: min_eig >= -bound,
        }
    }
}

/// `Tr(∂_μρ O_a) = 2 Re <∂_μψ|O_a|ψ>` for `ρ = |ψ><ψ|`.
pub fn d_rho_matrix<T: Real>(
    psi: &PureState<T>,
    derivs: &[Vec<Complex<T>>],
    set: &OperatorSet<T>,
) -> Result<RMat<T>> {
    psi.check_dim(set.dim())?;
    if let Some(bad) = derivs.iter().find(|d| d.len() != psi.dim()) {
        return Err(Error::DimMismatch {
            expected: psi.dim(),
            found: bad.len(),
        });
    }
    let o_psi: Vec<Vec<Complex<T>>> = set.ops().iter().map(|o| o.mat_vec(psi.amplitudes())).collect();
    let two = T::lit(2.0);
    Ok(RMat::from_fn(derivs.len(), set.len(), |mu, a| {
        two * inner(&derivs[mu], &o_psi[a]).re
    }))
}

fn psd_trace_scale<T: Real>(a: &SymMatrix<T>, b: &SymMatrix<T>) -> T {
    let abs_tr = |m: &SymMatrix<T>| m.diagonal().into_iter().fold(T::zero(), |s, x| s + x.abs());
    abs_tr(a).max(abs_tr(b))
}

/// Residual `C - ¼ dRhoᵀ g⁻¹ dRho` of the pure-state operator QCRB.
///
/// `d_rho` is `D × |S|` with entries `Tr(∂_μρ O_a)`.
pub fn operator_qcrb_residual<T: Real>(
    psi: &PureState<T>,
    set: &OperatorSet<T>,
    gt: &GeometricTensor<T>,
    d_rho: &RMat<T>,
    tol: &Tolerance,
) -> Result<PsdReport<T>> {
    let d = gt.dim();
    if d_rho.rows() != d {
        return Err(Error::DimMismatch {
            expected: d,
            found: d_rho.rows(),
        });
    }
    if d_rho.cols() != set.len() {
        return Err(Error::DimMismatch {
            expected: set.len(),
            found: d_rho.cols(),
        });
    }
    let cc = cov_comm(psi, set)?;
    let dai = sym_det_adj_inv(&gt.g);
    let inv = match dai.inv {
        Some(inv) => inv,
        None => {
            return Err(Error::Degenerate {
                det: dai.det.as_f64(),
                threshold: dai.threshold.as_f64(),
            })
        }
    };
    let quarter = T::lit(0.25);
    let bound = SymMatrix::from_symmetric_part(&d_rho.transpose().matmul(&inv.to_rmat()).matmul(d_rho).scale(quarter));
    let residual = SymMatrix::from_symmetric_part(&cc.cov.to_rmat().sub(&bound.to_rmat()));
    let scale = psd_trace_scale(&cc.cov, &bound);
    Ok(PsdReport::new("operator_qcrb", residual, scale, tol))
}

/// Homogeneous size of `4 det(g) g_αα` and `(Ω adj(g) Ω)_αα`:
/// `‖g‖^{D+1} + ‖Ω‖² ‖g‖^{D-1}` in the max-entry norm.
pub(crate) fn adjugate_scale<T: Real>(cov: &SymMatrix<T>, anti: &AntisymMatrix<T>) -> T {
    let d = cov.dim() as i32;
    let g = cov.max_abs();
    let w = anti.max_abs();
    g.powi(d + 1) + w * w * g.powi(d - 1)
}

/// Adjugate-form residuals of `cov ≥ -¼ anti cov⁻¹ anti`, one per diagonal
/// entry, plus the matrix form and the determinant data.
pub(crate) struct AdjugateBound<T> {
    pub diagonal: Vec<BoundReport<T>>,
    pub matrix: PsdReport<T>,
    pub det: T,
    pub degenerate: bool,
}

pub(crate) fn adjugate_bound<T: Real>(
    prefix: &str,
    names: &[String],
    cov: &SymMatrix<T>,
    anti: &AntisymMatrix<T>,
    tol: &Tolerance,
) -> AdjugateBound<T> {
    let d = cov.dim();
    let dai = sym_det_adj_inv(cov);
    let degenerate = dai.is_degenerate();
    let four_det = T::lit(4.0) * dai.det;
    let w = anti.to_rmat();
    // Ω adj Ω is symmetric because Ω is antisymmetric
    let wadjw = SymMatrix::from_symmetric_part(&w.matmul(&dai.adj.to_rmat()).matmul(&w));
    let scale = adjugate_scale(cov, anti);

    let diagonal = (0..d)
        .map(|a| {
            BoundReport::new(
                format!("{prefix}_{}", names[a]),
                four_det * cov.get(a, a),
                -wadjw.get(a, a),
                scale,
                degenerate,
                tol,
            )
        })
        .collect();
    let residual = SymMatrix::from_fn(d, |i, j| four_det * cov.get(i, j) + wadjw.get(i, j));
    let matrix = PsdReport::new(format!("{prefix}_matrix"), residual, scale * T::lit(d as f64), tol);
    AdjugateBound {
        diagonal,
        matrix,
        det: dai.det,
        degenerate,
    }
}

fn axis_names(d: usize) -> Vec<String> {
    (0..d)
        .map(|i| match AXES.get(i) {
            Some(a) => format!("{a}{a}"),
            None => format!("{i}{i}"),
        })
        .collect()
}

/// Self-bound of the quantum metric in adjugate form.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfBound<T> {
    /// `V^g_αα` for each direction.
    pub diagonal: Vec<BoundReport<T>>,
    /// `4 det(g) g + Ω adj(g) Ω ⪰ 0`
    pub matrix: PsdReport<T>,
    pub det: T,
    pub degenerate: bool,
}

pub fn metric_self_bound<T: Real>(gt: &GeometricTensor<T>, tol: &Tolerance) -> SelfBound<T> {
    let b = adjugate_bound("Vg", &axis_names(gt.dim()), &gt.g, &gt.omega, tol);
    SelfBound {
        diagonal: b.diagonal,
        matrix: b.matrix,
        det: b.det,
        degenerate: b.degenerate,
    }
}

/// The three index-explicit inequalities `g_αα ≥ N_α / (4 det g)` in 3D.
///
/// When `det g` is below threshold the reports carry the undivided
/// polynomial form `4 det g · g_αα ≥ N_α` and are flagged degenerate.
pub fn bound_3d_explicit<T: Real>(gt: &GeometricTensor<T>, tol: &Tolerance) -> Result<[BoundReport<T>; 3]> {
    if gt.dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: gt.dim(),
        });
    }
    let g = |i, j| gt.g.get(i, j);
    let (gxx, gyy, gzz) = (g(0, 0), g(1, 1), g(2, 2));
    let (gxy, gyz, gzx) = (g(0, 1), g(1, 2), g(2, 0));
    let oxy = gt.omega.get(0, 1);
    let oyz = gt.omega.get(1, 2);
    let ozx = gt.omega.get(2, 0);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let eight = T::lit(8.0);

    let num = [
        oxy * oxy * (gzz * gxx - gzx * gzx) + ozx * ozx * (gxx * gyy - gxy * gxy)
            - two * oxy * ozx * (gxy * gzx - gxx * gyz),
        oyz * oyz * (gxx * gyy - gxy * gxy) + oxy * oxy * (gyy * gzz - gyz * gyz)
            - two * oyz * oxy * (gyz * gxy - gyy * gzx),
        ozx * ozx * (gyy * gzz - gyz * gyz) + oyz * oyz * (gzz * gxx - gzx * gzx)
            - two * ozx * oyz * (gzx * gyz - gzz * gxy),
    ];
    let den = four * gxx * gyy * gzz + eight * gxy * gyz * gzx
        - four * gxx * gyz * gyz
        - four * gyy * gzx * gzx
        - four * gzz * gxy * gxy;
    let degenerate = den / four <= gt.g.det_threshold();
    let poly_scale = adjugate_scale(&gt.g, &gt.omega);
    let diag = [gxx, gyy, gzz];
    let names = axis_names(3);

    Ok(std::array::from_fn(|a| {
        let name = format!("explicit_{}", names[a]);
        if degenerate {
            BoundReport::new(name, den * diag[a], num[a], poly_scale, true, tol)
        } else {
            let rhs = num[a] / den;
            let scale = poly_scale / den.abs();
            BoundReport::new(name, diag[a], rhs, scale, false, tol)
        }
    }))
}

/// `det g ≥ det(Ω/2)`; the right side is exactly zero in odd dimension.
pub fn robertson_det<T: Real>(gt: &GeometricTensor<T>, tol: &Tolerance) -> BoundReport<T> {
    let det = gt.g.det();
    let rhs = gt.omega.scale(T::lit(0.5)).det();
    let d = gt.dim() as i32;
    let scale = gt.g.max_abs().max(gt.omega.max_abs()).powi(d);
    BoundReport::new("robertson_det", det, rhs, scale, det <= gt.g.det_threshold(), tol)
}

/// `g_xx g_yy ≥ g_xy² + ¼Ω_xy²` in a 2D parameter space.
pub fn bound_2d<T: Real>(gt: &GeometricTensor<T>, tol: &Tolerance) -> Result<BoundReport<T>> {
    if gt.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: gt.dim(),
        });
    }
    let (gxx, gyy, gxy) = (gt.g.get(0, 0), gt.g.get(1, 1), gt.g.get(0, 1));
    let w = gt.omega.get(0, 1);
    let scale = gt.g.max_abs().max(gt.omega.max_abs()).powi(2);
    Ok(BoundReport::new(
        "metric_2d",
        gxx * gyy,
        gxy * gxy + T::lit(0.25) * w * w,
        scale,
        gt.g.det() <= gt.g.det_threshold(),
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt(g: [f64; 6], w: [f64; 3]) -> GeometricTensor<f64> {
        // g: xx xy xz yy yz zz; w: xy yz zx
        GeometricTensor {
            g: SymMatrix::new(3, vec![g[0], g[1], g[2], g[1], g[3], g[4], g[2], g[4], g[5]]).unwrap(),
            omega: AntisymMatrix::from_fn(3, |i, j| match (i, j) {
                (0, 1) => w[0],
                (1, 2) => w[1],
                (0, 2) => -w[2],
                _ => unreachable!(),
            }),
            k: vec![],
        }
    }

    #[test]
    fn flat_curvature_gives_trivial_bound() {
        let t = gt([2.0, 0.1, 0.0, 1.0, 0.2, 3.0], [0.0; 3]);
        let sb = metric_self_bound(&t, &Tolerance::default());
        let det = t.g.det();
        for (a, r) in sb.diagonal.iter().enumerate() {
            assert_eq!(r.rhs, 0.0);
            assert!((r.lhs - 4.0 * det * t.g.get(a, a)).abs() < 1e-14);
            assert!(r.satisfied);
        }
        assert_eq!(sb.diagonal[2].name, "Vg_zz");
    }

    #[test]
    fn explicit_matches_adjugate() {
        let t = gt([2.0, 0.3, -0.4, 1.5, 0.2, 1.1], [0.7, -0.2, 0.5]);
        let tol = Tolerance::default();
        let sb = metric_self_bound(&t, &tol);
        let ex = bound_3d_explicit(&t, &tol).unwrap();
        let four_det = 4.0 * t.g.det();
        for (a, b) in sb.diagonal.iter().zip(&ex) {
            assert!((a.residual - b.residual * four_det).abs() < 1e-12 * a.scale);
            assert!((a.rhs - b.rhs * four_det).abs() < 1e-12 * a.scale);
        }
    }

    #[test]
    fn degenerate_explicit_keeps_polynomial_form() {
        // rank 2: third row = first + second
        let t = gt([1.0, 0.0, 1.0, 1.0, 1.0, 2.0], [0.3, 0.1, 0.2]);
        let ex = bound_3d_explicit(&t, &Tolerance::default()).unwrap();
        assert!(ex.iter().all(|r| r.degenerate && r.lhs.abs() < 1e-14));
        let sb = metric_self_bound(&t, &Tolerance::default());
        assert!(sb.degenerate);
    }

    #[test]
    fn wrong_dimension() {
        let t2 = gt([1.0, 0.0, 0.0, 1.0, 0.0, 1.0], [0.0; 3]).restrict(&[0, 1]);
        assert!(matches!(
            bound_3d_explicit(&t2, &Tolerance::default()),
            Err(Error::WrongDimension { expected: 3, found: 2 })
        ));
        assert!(bound_2d(&t2, &Tolerance::default()).is_ok());
    }

    #[test]
    fn robertson_det_odd_dimension_is_zero() {
        let t = gt([2.0, 0.3, -0.4, 1.5, 0.2, 1.1], [0.7, -0.2, 0.5]);
        assert_eq!(robertson_det(&t, &Tolerance::default()).rhs, 0.0);
        let t2 = t.restrict(&[0, 1]);
        let r = robertson_det(&t2, &Tolerance::default());
        assert!((r.rhs - 0.25 * 0.49).abs() < 1e-15);
    }

    #[test]
    fn report_tolerance_and_nan() {
        let tol = Tolerance::default();
        let r = BoundReport::new("t", 1.0, 1.0 + 5e-10, 0.0, false, &tol);
        assert!(r.satisfied);
        let r = BoundReport::new("t", 1.0, 1.0 + 2e-9, 0.0, false, &tol);
        assert!(!r.satisfied);
        let r = BoundReport::new("t", f64::NAN, 0.0, 0.0, false, &tol);
        assert!(!r.satisfied);
        assert_eq!(BoundReport::new("t", 0.0, 0.0, 0.0, false, &tol).scale, 1e-14);
    }
}
