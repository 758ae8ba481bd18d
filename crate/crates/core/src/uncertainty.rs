//! Uncertainty relations for sets of Hermitian operators on a pure state.
//!
//! Any operator set can be read as generators of some parameter space, so
//! the metric self-bound becomes
//! `4 det(C) <ΔΛ_α²> ≥ <[Λ_α,Λ_μ]> adj(C)^{μν} <[Λ_ν,Λ_α]>` with `C` the
//! symmetrised covariance matrix.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numlin::{inner, CMat, HermitianMatrix, SymMatrix};
use crate::qcrb::{adjugate_bound, adjugate_scale, BoundReport, PsdReport, Tolerance};
use crate::scalar::Real;
use crate::states::{cov_comm, CovCommPair, OperatorSet, PureState};

/// Per-operator residuals `V^Λ_α` of one operator set.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyReport<T> {
    pub labels: Vec<String>,
    pub reports: Vec<BoundReport<T>>,
    pub det_cov: T,
    pub degenerate: bool,
    pub satisfied: bool,
    pub moments: CovCommPair<T>,
    /// Sum of the individual relations.
    pub composite_sum: BoundReport<T>,
    /// Product of the individual relations (both sides are nonnegative).
    pub composite_product: BoundReport<T>,
    pub matrix: Option<PsdReport<T>>,
}

impl<T: Real> UncertaintyReport<T> {
    pub fn residuals(&self) -> Vec<T> {
        self.reports.iter().map(|r| r.residual).collect()
    }

    fn assemble(
        labels: Vec<String>,
        reports: Vec<BoundReport<T>>,
        det_cov: T,
        degenerate: bool,
        moments: CovCommPair<T>,
        matrix: Option<PsdReport<T>>,
        tol: &Tolerance,
    ) -> Self {
        let scale = reports.iter().fold(T::zero(), |s, r| s.max(r.scale));
        let n = reports.len() as i32;
        let (ls, rs) = reports.iter().fold((T::zero(), T::zero()), |(a, b), r| (a + r.lhs, b + r.rhs));
        let (lp, rp) = reports.iter().fold((T::one(), T::one()), |(a, b), r| (a * r.lhs, b * r.rhs));
        let composite_sum = BoundReport::new("sum", ls, rs, scale * T::lit(n as f64), degenerate, tol);
        let composite_product = BoundReport::new("product", lp, rp, scale.powi(n), degenerate, tol);
        let satisfied = reports.iter().all(|r| r.satisfied) && matrix.as_ref().is_none_or(|m| m.satisfied);
        Self {
            labels,
            reports,
            det_cov,
            degenerate,
            satisfied,
            moments,
            composite_sum,
            composite_product,
            matrix,
        }
    }
}

fn centred<T: Real>(op: &HermitianMatrix<T>, mean: T) -> CMat<T> {
    let n = op.dim();
    op.as_cmat() - &CMat::identity(n).scale_real(mean)
}

/// `<ΔA²><ΔB²> ≥ ¼|<{ΔA,ΔB}>|² + ¼|<[A,B]>|²`, evaluated directly from the
/// centred operators.
pub fn robertson_schrodinger<T: Real>(
    psi: &PureState<T>,
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    tol: &Tolerance,
) -> Result<BoundReport<T>> {
    psi.check_dim(a.dim())?;
    psi.check_dim(b.dim())?;
    let v = psi.amplitudes();
    let ev = |m: &CMat<T>| inner(v, &m.mat_vec(v));
    let da = centred(a, ev(a.as_cmat()).re);
    let db = centred(b, ev(b.as_cmat()).re);
    let var_a = ev(&da.matmul(&da)).re;
    let var_b = ev(&db.matmul(&db)).re;
    let anti = ev(&da.anticommutator(&db));
    let comm = ev(&a.as_cmat().commutator(b.as_cmat()));
    let quarter = T::lit(0.25);
    let lhs = var_a * var_b;
    let rhs = quarter * anti.norm_sqr() + quarter * comm.norm_sqr();
    Ok(BoundReport::new("robertson_schrodinger", lhs, rhs, T::zero(), false, tol))
}

fn check_len<T: Real>(set: &OperatorSet<T>, min: usize) -> Result<()> {
    if set.len() < min {
        return Err(Error::WrongArity {
            expected: min,
            found: set.len(),
        });
    }
    Ok(())
}

/// Adjugate-form residual `V^Λ_α` for every operator in `set`.
pub fn multi_op_bound<T: Real>(psi: &PureState<T>, set: &OperatorSet<T>, tol: &Tolerance) -> Result<UncertaintyReport<T>> {
    check_len(set, 2)?;
    let cc = cov_comm(psi, set)?;
    // <[A,B]> = iK enters quadratically, so K stands in for it
    let b = adjugate_bound("VL", set.labels(), &cc.cov, &cc.comm, tol);
    Ok(UncertaintyReport::assemble(
        set.labels().to_vec(),
        b.diagonal,
        b.det,
        b.degenerate,
        cc,
        Some(b.matrix),
        tol,
    ))
}

/// The three expanded relations for exactly three operators, term by term
/// with complex commutator expectations.
///
/// Nondegenerate reports compare `<ΔΛ_α²>` with `P_α / (4 det C)`;
/// degenerate ones keep the undivided form `4 det C <ΔΛ_α²> ≥ P_α`.
pub fn three_op_explicit<T: Real>(psi: &PureState<T>, set: &OperatorSet<T>, tol: &Tolerance) -> Result<UncertaintyReport<T>> {
    if set.len() != 3 {
        return Err(Error::WrongArity {
            expected: 3,
            found: set.len(),
        });
    }
    let cc = cov_comm(psi, set)?;
    let v = psi.amplitudes();
    let ev = |m: &CMat<T>| inner(v, &m.mat_vec(v));
    let ops = set.ops();
    let d: Vec<CMat<T>> = ops.iter().zip(&cc.means).map(|(o, &m)| centred(o, m)).collect();

    // var[i], anti[i][j] = <{ΔΛ_i,ΔΛ_j}>, comm[i][j] = <[Λ_i,Λ_j]>
    let var: Vec<T> = d.iter().map(|x| ev(&x.matmul(x)).re).collect();
    let mut anti = [[T::zero(); 3]; 3];
    let mut comm = [[Complex::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            anti[i][j] = ev(&d[i].anticommutator(&d[j])).re;
            comm[i][j] = ev(&ops[i].as_cmat().commutator(ops[j].as_cmat()));
        }
    }

    let q = T::lit(0.25);
    let h = T::lit(0.5);
    let (vx, vy, vz) = (var[0], var[1], var[2]);
    let (axy, ayz, azx) = (anti[0][1], anti[1][2], anti[2][0]);
    let det = vx * vy * vz + q * axy * ayz * azx - q * ayz * ayz * vx - q * azx * azx * vy - q * axy * axy * vz;

    let cyc = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
    let p: Vec<T> = cyc
        .iter()
        .map(|&(i, j, k)| {
            let cij = comm[i][j];
            let cki = comm[k][i];
            let re = |x: T| Complex::new(x, T::zero());
            let s = -(cij * cij) * re(var[k] * var[i]) + cij * cij * re(q * anti[k][i] * anti[k][i])
                + cij * cki * re(h * anti[i][j] * anti[k][i])
                - cij * cki * re(anti[j][k] * var[i])
                - cki * cki * re(var[i] * var[j])
                + cki * cki * re(q * anti[i][j] * anti[i][j]);
            s.re
        })
        .collect();

    let threshold = SymMatrix::from_fn(3, |i, j| if i == j { var[i] } else { h * anti[i][j] }).det_threshold();
    let degenerate = det <= threshold;
    let poly_scale = adjugate_scale(&cc.cov, &cc.comm);
    let four_det = T::lit(4.0) * det;
    let reports = (0..3)
        .map(|a| {
            let name = format!("explicit_{}", set.labels()[a]);
            if degenerate {
                BoundReport::new(name, four_det * var[a], p[a], poly_scale, true, tol)
            } else {
                BoundReport::new(name, var[a], p[a] / four_det, poly_scale / four_det.abs(), false, tol)
            }
        })
        .collect();
    Ok(UncertaintyReport::assemble(
        set.labels().to_vec(),
        reports,
        det,
        degenerate,
        cc,
        None,
        tol,
    ))
}
