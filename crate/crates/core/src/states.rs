//! Pure states, occupied subspaces, operator sets and their covariance /
//! commutator matrices.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::models::{pauli, ti_spin_matrices};
use crate::numlin::{inner, vec_norm, AntisymMatrix, CMat, EigenSystem, HermitianMatrix, SymMatrix};
use crate::scalar::Real;

/// Relative spectral gap below which occupied and empty states are
/// considered touching.
pub const GAP_REL_TOL: f64 = 1e-8;

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Wraps a vector that must already have unit norm (to `1e-12`).
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        let n = vec_norm(&amps);
        if !((n - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::NotNormalized(n.as_f64()));
        }
        Ok(Self { amps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let n = vec_norm(&amps);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NotNormalized(n.as_f64()));
        }
        let inv = n.recip();
        Ok(Self {
            amps: amps.into_iter().map(|z| z * inv).collect(),
        })
    }

    /// Computational basis vector `|i>` in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amps = vec![Complex::zero(); dim];
        amps[i] = Complex::new(T::one(), T::zero());
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// `|ψ><ψ|`
    pub fn density(&self) -> HermitianMatrix<T> {
        HermitianMatrix::projector(&self.amps)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Span of the lowest `rank` eigenvectors of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupiedSubspace<T> {
    /// `dim × rank`, orthonormal columns.
    pub basis: CMat<T>,
    pub energies: Vec<T>,
    /// Energy difference between the lowest empty and highest occupied state.
    pub gap: T,
}

impl<T: Real> OccupiedSubspace<T> {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex<T>> {
        self.basis.column(j)
    }

    /// `P = Σ_n |n><n|`
    pub fn projector(&self) -> HermitianMatrix<T> {
        HermitianMatrix::from_hermitian_part(&self.basis.matmul(&self.basis.adjoint()))
    }
}

/// Selects the `n_occ` lowest eigenvectors, requiring a gap above
/// `1e-8 × spectral range` to the rest of the spectrum.
pub fn slater_geometry_inputs<T: Real>(es: &EigenSystem<T>, n_occ: usize) -> Result<OccupiedSubspace<T>> {
    let dim = es.dim();
    if n_occ == 0 || n_occ >= dim {
        return Err(Error::InvalidOccupation { n_occ, dim });
    }
    let gap = es.values[n_occ] - es.values[n_occ - 1];
    let threshold = gap_threshold(&es.values);
    if !(gap > threshold) {
        return Err(Error::GapClosing {
            gap: gap.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let cols: Vec<_> = (0..n_occ).map(|j| es.vector(j)).collect();
    Ok(OccupiedSubspace {
        basis: CMat::from_columns(&cols)?,
        energies: es.values[..n_occ].to_vec(),
        gap,
    })
}

pub(crate) fn gap_threshold<T: Real>(values: &[T]) -> T {
    let range = values[values.len() - 1] - values[0];
    T::lit(GAP_REL_TOL) * range
}

/// Ordered, labelled collection of Hermitian operators of equal dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSet<T> {
    ops: Vec<HermitianMatrix<T>>,
    labels: Vec<String>,
}

impl<T: Real> OperatorSet<T> {
    pub fn new(ops: Vec<HermitianMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyOperatorSet)?;
        let dim = first.dim();
        if let Some(bad) = ops.iter().find(|o| o.dim() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if labels.len() != ops.len() {
            return Err(Error::DimMismatch {
                expected: ops.len(),
                found: labels.len(),
            });
        }
        Ok(Self { ops, labels })
    }

    /// Operators labelled `O1, O2, ...`.
    pub fn unlabelled(ops: Vec<HermitianMatrix<T>>) -> Result<Self> {
        let labels = (1..=ops.len()).map(|i| format!("O{i}")).collect();
        Self::new(ops, labels)
    }

    /// `{σx, σy, σz}` on a qubit.
    pub fn pauli() -> Self {
        Self::new(pauli::<T>().to_vec(), xyz_labels("s")).expect("valid set")
    }

    /// `{σx⊗I, σy⊗I, σz⊗I}` on the four-band basis.
    pub fn ti_spin() -> Self {
        Self::new(ti_spin_matrices::<T>().to_vec(), xyz_labels("s")).expect("valid set")
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn ops(&self) -> &[HermitianMatrix<T>] {
        &self.ops
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Subset by index.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        Self::new(
            idx.iter().map(|&i| self.ops[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
        )
    }
}

fn xyz_labels(prefix: &str) -> Vec<String> {
    ["x", "y", "z"].iter().map(|a| format!("{prefix}{a}")).collect()
}

/// `<ψ|O|ψ>`
pub fn expectation<T: Real>(psi: &PureState<T>, op: &HermitianMatrix<T>) -> Result<T> {
    psi.check_dim(op.dim())?;
    let z = inner(psi.amplitudes(), &op.mat_vec(psi.amplitudes()));
    debug_assert!(z.im.abs() <= T::tol(1e-12) * op.max_abs().max(T::one()) * T::lit(psi.dim() as f64));
    Ok(z.re)
}

/// Covariances, commutators and means of an operator set in a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct CovCommPair<T> {
    /// `C_ab = ½<{ΔA, ΔB}>`
    pub cov: SymMatrix<T>,
    /// `K_ab = -i<[A, B]>` (real for Hermitian `A`, `B`).
    pub comm: AntisymMatrix<T>,
    pub means: Vec<T>,
}

pub fn cov_comm<T: Real>(psi: &PureState<T>, set: &OperatorSet<T>) -> Result<CovCommPair<T>> {
    psi.check_dim(set.dim())?;
    let amps = psi.amplitudes();
    let images: Vec<Vec<Complex<T>>> = set.ops().iter().map(|o| o.mat_vec(amps)).collect();
    let means: Vec<T> = images.iter().map(|v| inner(amps, v).re).collect();
    let n = set.len();
    // <AB> = (Aψ)†(Bψ); Re gives the symmetrized product, 2 Im the commutator.
    let two = T::lit(2.0);
    let cov = SymMatrix::from_fn(n, |a, b| inner(&images[a], &images[b]).re - means[a] * means[b]);
    let comm = AntisymMatrix::from_fn(n, |a, b| two * inner(&images[a], &images[b]).im);
    Ok(CovCommPair { cov, comm, means })
}

/// `{Lx, Ly, Lz}` for angular momentum `ell` (ħ = 1), in the basis
/// `m = ell, ell-1, ..., -ell`.
pub fn angular_momentum_ops<T: Real>(ell: T) -> Result<OperatorSet<T>> {
    let twice = ell + ell;
    if !(ell >= T::zero()) || (twice - twice.round()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidSpin(ell.as_f64()));
    }
    let n = twice.round().to_usize().ok_or(Error::InvalidSpin(ell.as_f64()))? + 1;
    let m_of = |i: usize| ell - T::lit(i as f64);
    // L+|m> = sqrt(l(l+1) - m(m+1)) |m+1>; row i-1 ↔ m+1.
    let ladder = |m: T| (ell * (ell + T::one()) - m * (m + T::one())).max(T::zero()).sqrt();
    let half = T::lit(0.5);
    let lplus = CMat::from_fn(n, n, |i, j| {
        if j >= 1 && i == j - 1 {
            Complex::new(ladder(m_of(j)), T::zero())
        } else {
            Complex::zero()
        }
    });
    let lminus = lplus.adjoint();
    let lx = (&lplus + &lminus).scale_real(half);
    // (L+ - L-)/(2i) = -i/2 (L+ - L-)
    let ly = (&lplus - &lminus).scale(Complex::new(T::zero(), -half));
    let lz = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(m_of(i), T::zero())
        } else {
            Complex::zero()
        }
    });
    OperatorSet::new(
        vec![
            HermitianMatrix::new(lx)?,
            HermitianMatrix::new(ly)?,
            HermitianMatrix::new(lz)?,
        ],
        xyz_labels("L"),
    )
}

/// `|ell, m>` in the basis used by [`angular_momentum_ops`].
pub fn angular_momentum_state<T: Real>(ell: T, m: T) -> Result<PureState<T>> {
    let twice = ell + ell;
    let n = twice.round().to_usize().ok_or(Error::InvalidSpin(ell.as_f64()))? + 1;
    let idx = ell - m;
    if (idx - idx.round()).abs() > T::tol(1e-12) || idx < T::zero() || idx.round().to_usize().unwrap_or(n) >= n {
        return Err(Error::InvalidSpin(m.as_f64()));
    }
    Ok(PureState::basis(n, idx.round().to_usize().unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::two_band_model;
    use crate::models::BlochModel;
    use crate::numlin::eigh;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn pauli_expectations() {
        let [_, _, sz] = pauli::<f64>();
        let up = PureState::basis(2, 0);
        assert_eq!(expectation(&up, &sz).unwrap(), 1.0);
        let plus = PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(expectation(&plus, &sz).unwrap().abs() < 1e-16);
    }

    #[test]
    fn dim_mismatch() {
        let [_, _, sz] = pauli::<f64>();
        let psi = PureState::basis(3, 0);
        assert_eq!(
            expectation(&psi, &sz),
            Err(Error::DimMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn spin_up_cov_comm() {
        let cc = cov_comm(&PureState::basis(2, 0), &OperatorSet::<f64>::pauli()).unwrap();
        let want = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(cc.cov.get(i, j), want[i][j]);
            }
        }
        // -i<[σx, σy]> = -i <2iσz> = 2
        assert_eq!(cc.comm.get(0, 1), 2.0);
        assert_eq!(cc.comm.get(1, 2), 0.0);
        assert_eq!(cc.means, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn lower_band_pauli_means_and_cov() {
        let d = [0.3, -1.2, 0.7];
        let m = two_band_model(1, move |_k: &[f64]| (d, vec![[0.0; 3]]));
        let es = eigh(&m.hamiltonian(&[0.0]).unwrap());
        let psi = PureState::new(es.vector(0)).unwrap();
        let cc = cov_comm(&psi, &OperatorSet::pauli()).unwrap();
        let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        for mu in 0..3 {
            assert!((cc.means[mu] + d[mu] / dn).abs() < 1e-14);
            for nu in 0..3 {
                let delta = if mu == nu { 1.0 } else { 0.0 };
                let want = delta - d[mu] * d[nu] / (dn * dn);
                assert!((cc.cov.get(mu, nu) - want).abs() < 1e-14);
            }
        }
        assert!(cc.cov.det().abs() < 1e-14);
    }

    #[test]
    fn su2_algebra() {
        for twice in 0..=8 {
            let ell = twice as f64 / 2.0;
            let set = angular_momentum_ops(ell).unwrap();
            let [lx, ly, lz] = [&set.ops()[0], &set.ops()[1], &set.ops()[2]];
            let i = c(0.0, 1.0);
            let err = (&lx.commutator(ly) - &lz.as_cmat().scale(i)).max_abs();
            assert!(err < 1e-12, "l={ell} err={err}");
            let err = (&ly.commutator(lz) - &lx.as_cmat().scale(i)).max_abs();
            assert!(err < 1e-12);
            let casimir = &(&lx.matmul(lx) + &ly.matmul(ly)) + &lz.matmul(lz);
            let want = CMat::identity(twice + 1).scale_real(ell * (ell + 1.0));
            assert!((&casimir - &want).max_abs() < 1e-12);
        }
    }

    #[test]
    fn angular_momentum_moments() {
        let set = angular_momentum_ops(1.0f64).unwrap();
        let psi = angular_momentum_state(1.0, 0.0).unwrap();
        let cc = cov_comm(&psi, &set).unwrap();
        assert_eq!(cc.means[2], 0.0);
        assert!((cc.cov.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((cc.cov.get(1, 1) - 1.0).abs() < 1e-14);
        assert_eq!(cc.cov.get(2, 2), 0.0);
    }

    #[test]
    fn invalid_spin() {
        assert!(matches!(angular_momentum_ops(0.3_f64), Err(Error::InvalidSpin(_))));
        assert!(matches!(angular_momentum_ops(-1.0_f64), Err(Error::InvalidSpin(_))));
        assert!(angular_momentum_state(1.0_f64, 2.0).is_err());
    }

    #[test]
    fn occupation_bounds() {
        let es = eigh(&HermitianMatrix::from_real_diag(&[-1.0, 0.0, 1.0, 2.0]));
        assert!(matches!(
            slater_geometry_inputs(&es, 4),
            Err(Error::InvalidOccupation { .. })
        ));
        assert!(matches!(
            slater_geometry_inputs(&es, 0),
            Err(Error::InvalidOccupation { .. })
        ));
        let deg = eigh(&HermitianMatrix::from_real_diag(&[-1.0, 0.0, 0.0, 2.0]));
        assert!(matches!(
            slater_geometry_inputs(&deg, 2),
            Err(Error::GapClosing { .. })
        ));
        let occ = slater_geometry_inputs(&es, 2).unwrap();
        assert_eq!(occ.energies, vec![-1.0, 0.0]);
        let p = occ.projector();
        assert!((&p.matmul(&p) - p.as_cmat()).max_abs() < 1e-15);
    }
}
