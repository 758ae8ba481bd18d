//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use qgbound::estimation::{mixed_qcrb_residual, qfim, sld, BandFamily, DensityFamily};
use qgbound::geometry::{pure_state_qgt, qgt_fd, qgt_perturbative, GeometricTensor};
use qgbound::models::{BlochModel, FieldVector, LatticeDirac, TiModel, TiParams};
use qgbound::numlin::{eigh, HermitianMatrix};
use qgbound::qcrb::{bound_2d, d_rho_matrix, operator_qcrb_residual, robertson_det, Tolerance};
use qgbound::sampling::{
    random_cmat, random_d_vector, random_gram_family, random_operator_set, random_qubit_model, random_state,
};
use qgbound::states::{angular_momentum_ops, angular_momentum_state, cov_comm, OperatorSet};
use qgbound::sweep::{grid, run_sweep, KPath, SweepOptions, SweepPoint};
use qgbound::uncertainty::{multi_op_bound, robertson_schrodinger, three_op_explicit};
use qgbound::{PureState64, C64};
use qgbound_cli::emit::{parse_csv, to_bytes};
use qgbound_cli::config::Format;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUND_REL: f64 = 1e-9;
const PSD_REL: f64 = 1e-10;
const FLOOR: f64 = 1e-14;
const PRISTINE_OMEGA: f64 = 1e-10;
const FD_STEP: f64 = 1e-5;
const FD_AGREEMENT: f64 = 1e-6;
const CLOSED_FORM: f64 = 1e-10;
const FISHER: f64 = 1e-10;
const RS_EQUAL: f64 = 1e-12;
const THREE_OP_REL: f64 = 1e-10;
const DET_ZERO: f64 = 1e-12;
const MOMENT_EXACT: f64 = 1e-12;
const SLD_SATURATION: f64 = 1e-9;
const FIG_RUNTIME: Duration = Duration::from_secs(10);

const FIELDS: [[f64; 3]; 2] = [[0.1, 0.2, 0.3], [0.5, 1.0, 2.0]];
const POINTS: usize = 100;

fn tol() -> Tolerance {
    let t = Tolerance {
        rel: BOUND_REL,
        floor: FLOOR,
        psd_rel: PSD_REL,
    };
    assert_eq!(t, Tolerance::default());
    t
}

fn ti(field: [f64; 3]) -> TiModel<f64> {
    let p = TiParams::default();
    assert_eq!((p.m, p.a, p.b), (-0.3, 2.87, 0.3));
    TiModel::new(p, FieldVector::new(field[0], field[1], field[2]))
}

fn spin_options() -> SweepOptions<f64> {
    SweepOptions {
        n_occ: 2,
        band: 0,
        geometry: true,
        uncertainty: true,
        tol: tol(),
        ops: OperatorSet::ti_spin(),
        threads: None,
    }
}

fn figure_sweep(field: [f64; 3]) -> Vec<SweepPoint<f64>> {
    let path = KPath::standard(POINTS).unwrap();
    run_sweep(&ti(field), &path.samples, &spin_options()).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_k(r: &mut ChaCha8Rng) -> [f64; 3] {
    let pi = std::f64::consts::PI;
    std::array::from_fn(|_| r.random_range(-pi..pi))
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for field in FIELDS {
        for p in figure_sweep(field) {
            let Some(sb) = &p.self_bound else {
                ensure(!p.row.flags.is_empty(), || format!("row {} has no metric and no flag", p.row.index))?;
                continue;
            };
            for r in &sb.diagonal {
                checked += 1;
                ensure(r.residual >= -BOUND_REL * r.scale, || {
                    format!("{} = {:e} (scale {:e}) at row {} field {field:?}", r.name, r.residual, r.scale, p.row.index)
                })?;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < FIG_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} residuals nonnegative, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut interior = 0;
    for field in FIELDS {
        let pts = figure_sweep(field);
        let m_end = pts.iter().filter(|p| p.row.segment == "M-R").map(|p| p.row.arclength).fold(f64::NAN, f64::min);
        for p in &pts {
            let u = p.uncertainty.as_ref().ok_or_else(|| format!("row {} has no spin report", p.row.index))?;
            for r in &u.reports {
                ensure(r.residual >= -BOUND_REL * r.scale, || {
                    format!("{} = {:e} at row {} field {field:?}", r.name, r.residual, p.row.index)
                })?;
            }
            for a in 0..3 {
                for b in a + 1..3 {
                    let (x, y) = (&u.reports[a], &u.reports[b]);
                    let denom = x.residual.abs().max(y.residual.abs()).max(x.scale).max(y.scale);
                    ensure((x.residual - y.residual).abs() <= BOUND_REL * denom, || {
                        format!("{} != {} at row {}: {:e} vs {:e}", x.name, y.name, p.row.index, x.residual, y.residual)
                    })?;
                }
            }
            if p.row.segment == "M-R" && p.row.arclength > m_end {
                interior += 1;
                for r in &u.reports {
                    ensure(r.residual.abs() <= r.tol, || {
                        format!("{} = {:e} > tol {:e} at interior M-R row {}", r.name, r.residual, r.tol, p.row.index)
                    })?;
                }
            }
        }
    }
    ensure(interior == 2 * (POINTS - 1), || format!("{interior} interior M-R points"))?;
    Ok(format!("components equal, {interior} interior M-R points at zero"))
}

fn criterion_3() -> Outcome {
    let pts = figure_sweep([0.0; 3]);
    let mut max: f64 = 0.0;
    for p in &pts {
        let gt = p.qgt.as_ref().ok_or_else(|| format!("row {} has no tensor", p.row.index))?;
        max = max.max(gt.omega.max_abs());
    }
    ensure(max <= PRISTINE_OMEGA, || format!("max |Omega| = {max:e}"))?;
    Ok(format!("max |Omega| = {max:e} over {} points", pts.len()))
}

fn max_diff(a: &GeometricTensor<f64>, b: &GeometricTensor<f64>) -> f64 {
    let g = a.g.to_rmat().sub(&b.g.to_rmat()).max_abs();
    g.max(a.omega.to_rmat().sub(&b.omega.to_rmat()).max_abs())
}

/// Lower band of `d·σ`: `g = ¼ ∂d̂·∂d̂`, `Ω = ½ d̂·(∂d̂ × ∂d̂)`.
fn closed_form(d: [f64; 3], grad: [[f64; 3]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = |a: &[f64; 3], b: &[f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let n = dot(&d, &d).sqrt();
    let dh = d.map(|x| x / n);
    let dd: Vec<[f64; 3]> = grad
        .iter()
        .map(|gd| {
            let p = dot(&dh, gd);
            std::array::from_fn(|i| (gd[i] - dh[i] * p) / n)
        })
        .collect();
    let g = std::array::from_fn(|m| std::array::from_fn(|v| 0.25 * dot(&dd[m], &dd[v])));
    let w = std::array::from_fn(|m| std::array::from_fn(|v| 0.5 * dot(&dh, &cross(&dd[m], &dd[v]))));
    (g, w)
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut compare = |model: &dyn BlochModel<f64>, n_occ: usize, r: &mut ChaCha8Rng, label: &str| -> Result<(), String> {
        for _ in 0..50 {
            let k = random_k(r);
            let a = qgt_perturbative(model, &k, n_occ).map_err(|e| e.to_string())?;
            let b = qgt_fd(model, &k, n_occ, FD_STEP).map_err(|e| e.to_string())?;
            let d = max_diff(&a, &b);
            worst = worst.max(d);
            ensure(d <= FD_AGREEMENT, || format!("{label}: |pert - fd| = {d:e} at k = {k:?}"))?;
        }
        Ok(())
    };
    for field in FIELDS {
        compare(&ti(field), 2, &mut r, "ti3d")?;
    }
    let dirac = LatticeDirac { m: 1.5, tz: 0.7 };
    compare(&dirac, 1, &mut r, "two-band")?;

    let mut worst_cf: f64 = 0.0;
    for _ in 0..50 {
        let k = random_k(&mut r);
        let (d, grad) = dirac.d(&k);
        let (g, w) = closed_form(d, grad);
        let t = qgt_perturbative(&dirac, &k, 1).map_err(|e| e.to_string())?;
        for m in 0..3 {
            for v in 0..3 {
                worst_cf = worst_cf.max((t.g.get(m, v) - g[m][v]).abs()).max((t.omega.get(m, v) - w[m][v]).abs());
            }
        }
    }
    ensure(worst_cf <= CLOSED_FORM, || format!("closed form deviation {worst_cf:e}"))?;
    Ok(format!("fd deviation {worst:e}, closed-form deviation {worst_cf:e}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    let mut families = 0;
    while families < 20 {
        let model = random_qubit_model::<f64, _>(&mut r);
        let k = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let Ok(gt) = qgt_perturbative(&model, &k, 1) else { continue };
        families += 1;
        let fam = BandFamily { model, band: 0 };
        let rho = fam.rho(&k).unwrap();
        let f = qfim(&rho, &sld(&rho, &fam.d_rho(&k).unwrap()).unwrap()).unwrap();
        let d = f.to_rmat().sub(&gt.g.to_rmat().scale(4.0)).max_abs();
        worst = worst.max(d);
        ensure(d <= FISHER, || format!("qubit family: |F - 4g| = {d:e}"))?;
    }
    let model = ti(FIELDS[0]);
    for _ in 0..20 {
        let k = random_k(&mut r);
        let gt = qgt_perturbative(&model, &k, 1).map_err(|e| e.to_string())?;
        let fam = BandFamily { model, band: 0 };
        let rho = fam.rho(&k).unwrap();
        let f = qfim(&rho, &sld(&rho, &fam.d_rho(&k).unwrap()).unwrap()).unwrap();
        let d = f.to_rmat().sub(&gt.g.to_rmat().scale(4.0)).max_abs();
        worst = worst.max(d);
        ensure(d <= FISHER, || format!("ti3d band 0: |F - 4g| = {d:e} at k = {k:?}"))?;
    }
    Ok(format!("max |F - 4g| = {worst:e}"))
}

fn tangents(r: &mut ChaCha8Rng, psi: &PureState64, n: usize) -> Vec<Vec<C64>> {
    let a = psi.amplitudes();
    (0..n)
        .map(|_| {
            let d = random_cmat::<f64, _>(r, psi.dim(), 1).column(0);
            let c = qgbound::numlin::inner(a, &d).re;
            d.iter().zip(a).map(|(x, y)| x - y * c).collect()
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut done = 0;
    let mut worst = f64::INFINITY;
    while done < 1000 {
        let dim = r.random_range(2..6);
        let nparams = r.random_range(1..4);
        let nops = r.random_range(1..5);
        let psi = random_state::<f64, _>(&mut r, dim);
        let derivs = tangents(&mut r, &psi, nparams);
        let gt = pure_state_qgt(&psi, &derivs).unwrap();
        if gt.g.det() <= gt.g.det_threshold() {
            continue;
        }
        let set = random_operator_set::<f64, _>(&mut r, dim, nops);
        let d_rho = d_rho_matrix(&psi, &derivs, &set).unwrap();
        let rep = operator_qcrb_residual(&psi, &set, &gt, &d_rho, &tol()).map_err(|e| e.to_string())?;
        ensure(rep.min_eig >= -PSD_REL * rep.scale, || format!("min eig {:e}, scale {:e}", rep.min_eig, rep.scale))?;
        worst = worst.min(rep.min_eig / rep.scale);
        done += 1;
    }
    Ok(format!("{done} instances, min eig/scale = {worst:e}"))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let dim = r.random_range(2..6);
        let psi = random_state::<f64, _>(&mut r, dim);
        let set = random_operator_set::<f64, _>(&mut r, dim, 2);
        let rs = robertson_schrodinger(&psi, &set.ops()[0], &set.ops()[1], &tol()).unwrap();
        let mb = multi_op_bound(&psi, &set, &tol()).unwrap();
        for a in 0..2 {
            let want = 4.0 * mb.moments.cov.get(a, a) * rs.residual;
            let rep = &mb.reports[a];
            let dev = (rep.residual - want).abs() / rep.scale;
            worst = worst.max(dev);
            ensure(dev <= RS_EQUAL, || format!("two-operator residual differs by {dev:e} (relative)"))?;
        }
    }
    for i in 0..10_000 {
        let dim = r.random_range(2..6);
        let psi = random_state::<f64, _>(&mut r, dim);
        let set = random_operator_set::<f64, _>(&mut r, dim, 2);
        let rs = robertson_schrodinger(&psi, &set.ops()[0], &set.ops()[1], &tol()).unwrap();
        ensure(rs.satisfied, || format!("instance {i}: residual {:e}", rs.residual))?;
    }
    Ok(format!("max relative deviation {worst:e}; 10000 instances satisfied"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let dim = r.random_range(3..6);
        let psi = random_state::<f64, _>(&mut r, dim);
        let set = random_operator_set::<f64, _>(&mut r, dim, 3);
        let mb = multi_op_bound(&psi, &set, &tol()).unwrap();
        let ex = three_op_explicit(&psi, &set, &tol()).unwrap();
        ensure(mb.satisfied && ex.satisfied, || "violated bound".into())?;
        let four_det = 4.0 * mb.det_cov;
        for (a, b) in mb.reports.iter().zip(&ex.reports) {
            let got = if b.degenerate { b.residual } else { b.residual * four_det };
            let denom = a.lhs.abs().max(a.rhs.abs()).max(a.scale);
            let dev = (got - a.residual).abs() / denom;
            worst = worst.max(dev);
            ensure(dev <= THREE_OP_REL, || format!("{}: relative deviation {dev:e}", a.name))?;
        }
    }
    Ok(format!("max relative deviation {worst:e}"))
}

fn criterion_9() -> Outcome {
    let mut states = 0;
    for ell in 1..=4 {
        let l = ell as f64;
        let set = angular_momentum_ops(l).unwrap();
        for m2 in -ell..=ell {
            let m = m2 as f64;
            let cc = cov_comm(&angular_momentum_state(l, m).unwrap(), &set).unwrap();
            let scale = cc.cov.max_abs().max(1.0).powi(3);
            ensure(cc.cov.det().abs() <= DET_ZERO * scale, || format!("l={ell} m={m2}: det {:e}", cc.cov.det()))?;
            ensure(cc.means[2] == m, || format!("<Lz> = {} for m = {m2}", cc.means[2]))?;
            let lx2 = cc.cov.get(0, 0) + cc.means[0] * cc.means[0];
            let want = (l * l + l - m * m) / 2.0;
            ensure((lx2 - want).abs() <= MOMENT_EXACT, || format!("<Lx^2> = {lx2} != {want}"))?;
            states += 1;
        }
    }
    let mut r = rng(9);
    let pauli = OperatorSet::<f64>::pauli();
    for i in 0..100 {
        let d: [f64; 3] = random_d_vector(&mut r);
        let h = HermitianMatrix::linear_combination(&d, pauli.ops());
        let psi = PureState64::new(eigh(&h).vector(0)).unwrap();
        let cc = cov_comm(&psi, &pauli).unwrap();
        let scale = cc.cov.max_abs().max(1.0).powi(3);
        ensure(cc.cov.det().abs() <= DET_ZERO * scale, || format!("sample {i}: det {:e}", cc.cov.det()))?;
    }
    Ok(format!("{states} angular momentum states and 100 Pauli samples with det C = 0"))
}

fn criterion_10() -> Outcome {
    let mut checked = 0;
    for field in FIELDS {
        let model = ti(field);
        for s in grid::<f64>(50, &[0, 1], [0.0; 3]).unwrap() {
            let k = s.k.as_slice();
            let gt = qgt_perturbative(&model, k, 2).map_err(|e| e.to_string())?.restrict(&[0, 1]);
            let b = bound_2d(&gt, &tol()).unwrap();
            ensure(b.satisfied, || format!("2D metric bound {:e} at k = {k:?}", b.residual))?;
            let d = robertson_det(&gt, &tol());
            ensure(d.satisfied, || format!("det g - det(Omega/2) = {:e} at k = {k:?}", d.residual))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} grid points"))
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let dim = r.random_range(2..5);
        let nparams = r.random_range(1..4);
        let fam = random_gram_family::<f64, _>(&mut r, dim, nparams);
        let k: Vec<f64> = (0..nparams).map(|_| r.random_range(-1.0..1.0)).collect();
        let rho = fam.rho(&k).unwrap();
        let d = fam.d_rho(&k).unwrap();
        let nops = r.random_range(1..5);
        let set = random_operator_set::<f64, _>(&mut r, dim, nops);
        let rep = mixed_qcrb_residual(&rho, &d, &set, &tol()).map_err(|e| e.to_string())?;
        ensure(rep.min_eig >= -PSD_REL * rep.scale, || format!("family {i}: min eig {:e}", rep.min_eig))?;

        let l = sld(&rho, &d).unwrap();
        let f = qfim(&rho, &l).unwrap();
        let sat = mixed_qcrb_residual(&rho, &d, &OperatorSet::unlabelled(l.ls.clone()).unwrap(), &tol()).unwrap();
        let dev = sat.residual.max_abs() / f.max_abs();
        worst = worst.max(dev);
        ensure(dev <= SLD_SATURATION, || format!("family {i}: SLD residual {dev:e} relative"))?;
    }
    Ok(format!("500 families PSD, SLD saturation {worst:e}"))
}

fn run_bin(args: &[&str], envs: &[(&str, &str)]) -> std::process::Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qgbound"));
    c.args(args).env_remove("QGBOUND_THREADS");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn criterion_12() -> Outcome {
    let out = run_bin(&["check"], &[]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    ensure(out.status.code() == Some(0), || format!("check exited {:?}:\n{text}", out.status.code()))?;
    ensure(text.lines().last() == Some("all bounds satisfied"), || format!("summary:\n{text}"))?;

    let sweep = run_bin(&["sweep", "--field", "0.5,1,2", "--points", "20"], &[]);
    ensure(sweep.status.success(), || String::from_utf8_lossy(&sweep.stderr).to_string())?;
    let rows = parse_csv(&sweep.stdout).map_err(|e| e.to_string())?;
    ensure(rows.len() == 81, || format!("{} rows", rows.len()))?;
    let again = to_bytes(&rows, Format::Csv).map_err(|e| e.to_string())?;
    ensure(again == sweep.stdout, || "CSV re-emission differs".into())?;

    let threaded = run_bin(&["sweep", "--field", "0.5,1,2", "--points", "20"], &[("QGBOUND_THREADS", "3")]);
    ensure(threaded.stdout == sweep.stdout, || "sweep output depends on thread count".into())?;
    for cmd in ["check", "counterexamples", "estimation-demo"] {
        let a = run_bin(&[cmd, "--seed", "1234"], &[]);
        let b = run_bin(&[cmd, "--seed", "1234"], &[("QGBOUND_THREADS", "1")]);
        ensure(a.status.success() && a.stdout == b.stdout, || format!("{cmd} output not reproducible"))?;
    }
    Ok("check exits 0, CSV round-trips, seeded output byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("metric self-bound along the path", criterion_1),
        ("spin uncertainty relation along the path", criterion_2),
        ("pristine model has no curvature", criterion_3),
        ("geometry oracles agree", criterion_4),
        ("pure-state Fisher information is 4g", criterion_5),
        ("operator QCRB residual is PSD", criterion_6),
        ("Robertson-Schroedinger recovery", criterion_7),
        ("three-operator consistency", criterion_8),
        ("determinant-zero counterexamples", criterion_9),
        ("2D bound on the kz = 0 plane", criterion_10),
        ("mixed-state QCRB", criterion_11),
        ("CLI contract", criterion_12),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
