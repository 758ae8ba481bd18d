use nalgebra::DMatrix;
use num_rational::Rational64;
use qgbound::models::{ti_spin_matrices, BlochModel, FieldVector, TiModel, TiParams};
use qgbound::numlin::{eigh, SymMatrix};
use qgbound::qcrb::Tolerance;
use qgbound::sampling::{random_d_vector, random_hermitian};
use qgbound::states::{angular_momentum_ops, angular_momentum_state, cov_comm, slater_geometry_inputs, OperatorSet};
use qgbound::sweep::{grid, run_sweep, KPath, SweepOptions, FLAG_VL_ZERO};
use qgbound::uncertainty::{multi_op_bound, three_op_explicit};
use qgbound::PureState64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn eigenvalues_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [2, 4, 7] {
        let h = random_hermitian::<f64, _>(&mut rng, n);
        let ours = eigh(&h).values;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let z = h[(i, j)];
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut theirs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_adjugate_of_rational_metric() {
    let r = |n, d| Rational64::new(n, d);
    let g = SymMatrix::from_fn(3, |i, j| match (i, j) {
        (0, 0) => r(3, 2),
        (0, 1) => r(1, 3),
        (0, 2) => r(-1, 4),
        (1, 1) => r(2, 1),
        (1, 2) => r(1, 5),
        _ => r(7, 6),
    });
    let det = g.det();
    let adj = g.adjugate().to_rmat();
    let prod = g.to_rmat().matmul(&adj);
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { det } else { r(0, 1) };
            assert_eq!(prod[(i, j)], want);
        }
    }
    // printed cofactor expansion of the determinant
    let (xx, xy, xz, yy, yz, zz) = (g.get(0, 0), g.get(0, 1), g.get(0, 2), g.get(1, 1), g.get(1, 2), g.get(2, 2));
    let two = r(2, 1);
    assert_eq!(det, xx * yy * zz + two * xy * yz * xz - xx * yz * yz - yy * xz * xz - zz * xy * xy);
}

#[test]
fn angular_momentum_counterexample() {
    for ell in [1.0f64, 2.0, 3.0, 4.0] {
        let set = angular_momentum_ops(ell).unwrap();
        let mut m = -ell;
        while m <= ell {
            let psi = angular_momentum_state(ell, m).unwrap();
            let cc = cov_comm(&psi, &set).unwrap();
            assert_eq!(cc.means[2], m);
            let lx2 = cc.cov.get(0, 0) + cc.means[0] * cc.means[0];
            assert!((lx2 - (ell * ell + ell - m * m) / 2.0).abs() < 1e-12);
            let scale = cc.cov.max_abs().max(1.0).powi(3);
            assert!(cc.cov.det().abs() <= 1e-12 * scale);
            m += 1.0;
        }
    }
}

#[test]
fn pauli_counterexample_on_lower_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let set = OperatorSet::<f64>::pauli();
    for _ in 0..100 {
        let d: [f64; 3] = random_d_vector(&mut rng);
        let h = qgbound::numlin::HermitianMatrix::linear_combination(&d, set.ops());
        let psi = PureState64::new(eigh(&h).vector(0)).unwrap();
        let r = three_op_explicit(&psi, &set, &Tolerance::default()).unwrap();
        assert!(r.degenerate);
        assert!(r.det_cov.abs() <= 1e-12);
        let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        for a in 0..3 {
            assert!((r.moments.means[a] + d[a] / dn).abs() < 1e-12);
            assert!(r.reports[a].lhs.abs() < 1e-12 && r.reports[a].rhs.abs() < 1e-12);
        }
    }
}

#[test]
fn pristine_doublet_has_no_spin() {
    // Kramers doublet average Tr(Pσ)/2 vanishes at every k
    let ti = TiModel::<f64>::default();
    let spin = ti_spin_matrices::<f64>();
    let path = KPath::<f64>::standard(10).unwrap();
    for s in &path.samples {
        let es = eigh(&ti.hamiltonian(s.k.as_slice()).unwrap());
        let p = slater_geometry_inputs(&es, 2).unwrap().projector();
        for op in &spin {
            assert!(p.trace_product(op).norm() < 1e-12);
        }
    }
}

#[test]
fn pauli_set_gives_equal_components() {
    // V^Λ_α = 4(1 - |⟨σ⟩|²)² for every α on any state of the spin sector
    let ti = TiModel::new(TiParams::default(), FieldVector::new(0.1, 0.2, 0.3));
    let set = OperatorSet::<f64>::ti_spin();
    for k in [[0.4, 0.1, -0.3], [2.0, -1.0, 0.5]] {
        let psi = PureState64::new(eigh(&ti.hamiltonian(&k).unwrap()).vector(0)).unwrap();
        let r = multi_op_bound(&psi, &set, &Tolerance::default()).unwrap();
        let s2: f64 = r.moments.means.iter().map(|x| x * x).sum();
        for v in r.residuals() {
            assert!((v - 4.0 * (1.0 - s2).powi(2)).abs() < 1e-12);
        }
    }
}

fn options(threads: Option<usize>) -> SweepOptions<f64> {
    SweepOptions {
        n_occ: 2,
        band: 0,
        geometry: true,
        uncertainty: true,
        tol: Tolerance::default(),
        ops: OperatorSet::ti_spin(),
        threads,
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let ti = TiModel::new(TiParams::default(), FieldVector::new(0.5, 1.0, 2.0));
    let path = KPath::<f64>::standard(25).unwrap();
    let one = run_sweep(&ti, &path.samples, &options(Some(1))).unwrap();
    let many = run_sweep(&ti, &path.samples, &options(Some(4))).unwrap();
    assert_eq!(one.len(), 101);
    for (a, b) in one.iter().zip(&many) {
        assert_eq!(a.row, b.row);
    }
    assert!(one.iter().enumerate().all(|(i, p)| p.row.index == i));
}

#[test]
fn mr_segment_saturates_spin_relation() {
    let ti = TiModel::new(TiParams::default(), FieldVector::new(0.1, 0.2, 0.3));
    let path = KPath::<f64>::standard(20).unwrap();
    let pts = run_sweep(&ti, &path.samples, &options(None)).unwrap();
    for p in pts.iter().filter(|p| p.row.segment == "M-R") {
        assert!(p.row.flags.contains(FLAG_VL_ZERO), "{:?}", p.row);
    }
    assert!(pts.iter().all(|p| p.satisfied()));
}

#[test]
fn gap_closing_rows_are_flagged() {
    // a two-band model with m = 2 closes its gap at Γ
    let model = qgbound::models::LatticeDirac { m: 2.0, tz: 0.0 };
    let opts = SweepOptions {
        n_occ: 1,
        ops: OperatorSet::pauli(),
        ..options(Some(2))
    };
    let path = KPath::<f64>::standard(4).unwrap();
    let pts = run_sweep(&model, &path.samples, &opts).unwrap();
    let first = &pts[0].row;
    assert!(first.flags.contains("gap_closing"));
    assert!(first.g_xx.is_none() && first.vl_xx.is_none());
    assert!(pts[1].row.g_xx.is_some());
}

#[test]
fn grid_sweep_in_kz_plane() {
    let ti = TiModel::new(TiParams::default(), FieldVector::new(0.1, 0.2, 0.3));
    let samples = grid::<f64>(6, &[0, 1], [0.0; 3]).unwrap();
    let pts = run_sweep(&ti, &samples, &options(None)).unwrap();
    assert_eq!(pts.len(), 36);
    assert!(pts.iter().all(|p| p.row.kz == 0.0 && p.row.segment == "grid"));
}
