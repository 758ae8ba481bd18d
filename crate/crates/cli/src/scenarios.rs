//! Sweeps, the `check` bound suites, counterexamples and the estimation demo.

use std::fmt::Write as _;

use qgbound::estimation::{mixed_qcrb_residual, qfim, sld, BandFamily, DensityFamily};
use qgbound::geometry::{band_state_derivatives, pure_state_qgt, qgt_perturbative};
use qgbound::models::BlochModel;
use qgbound::numlin::{eigh, HermitianMatrix};
use qgbound::qcrb::{bound_2d, bound_3d_explicit, d_rho_matrix, operator_qcrb_residual, robertson_det, Tolerance};
use qgbound::sampling::{
    random_d_vector, random_gram_family, random_operator_set, random_qubit_model, random_state,
};
use qgbound::states::{angular_momentum_ops, angular_momentum_state, cov_comm, OperatorSet};
use qgbound::sweep::{grid, run_sweep, KPath, Sample, SweepOptions, SweepPoint};
use qgbound::uncertainty::{multi_op_bound, robertson_schrodinger, three_op_explicit};
use qgbound::{Error, PureState64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ModelSpec, Sampling, Scenario, ScenarioConfig};

/// Random instances per seeded suite in `check`.
pub const CHECK_INSTANCES: usize = 500;
/// Points per axis of the `k_z = 0` grid in `check`.
pub const CHECK_GRID: usize = 50;
/// Random `d·σ` samples in `counterexamples`.
pub const COUNTEREXAMPLE_SAMPLES: usize = 20;
/// Random families in `estimation-demo`.
pub const DEMO_FAMILIES: usize = 20;

impl ModelSpec {
    pub fn model(&self) -> &dyn BlochModel<f64> {
        match self {
            Self::Ti(m) => m,
            Self::TwoBand(m) => m,
        }
    }

    pub fn n_occ(&self) -> usize {
        match self {
            Self::Ti(_) => 2,
            Self::TwoBand(_) => 1,
        }
    }

    /// Parameter axes for the band operator QCRB; a two-band state has a
    /// two-dimensional projective tangent space, so its 3D metric is singular.
    pub fn qcrb_axes(&self) -> &'static [usize] {
        match self {
            Self::Ti(_) => &[0, 1, 2],
            Self::TwoBand(_) => &[0, 1],
        }
    }

    /// Spin operators of the model's basis.
    pub fn spin_ops(&self) -> OperatorSet<f64> {
        match self {
            Self::Ti(_) => OperatorSet::ti_spin(),
            Self::TwoBand(_) => OperatorSet::pauli(),
        }
    }
}

pub fn samples(cfg: &ScenarioConfig) -> qgbound::Result<Vec<Sample<f64>>> {
    match &cfg.sampling {
        Sampling::Path { labels, points } => Ok(KPath::from_labels(labels, *points)?.samples),
        Sampling::Grid(g) => grid(g.n, &g.axes, g.fixed),
    }
}

pub fn sweep_options(cfg: &ScenarioConfig) -> SweepOptions<f64> {
    SweepOptions {
        n_occ: cfg.model.n_occ(),
        band: 0,
        geometry: cfg.has(Scenario::Geometry) || cfg.has(Scenario::Qcrb),
        uncertainty: cfg.has(Scenario::Uncertainty),
        tol: cfg.tol,
        ops: cfg.model.spin_ops(),
        threads: cfg.threads,
    }
}

pub fn sweep(cfg: &ScenarioConfig) -> qgbound::Result<Vec<SweepPoint<f64>>> {
    run_sweep(cfg.model.model(), &samples(cfg)?, &sweep_options(cfg))
}

/// Outcome of one family of checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Suite {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl Suite {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {:<24} {} checked", self.name, self.checked);
        if self.skipped > 0 {
            let _ = write!(s, ", {} skipped (degenerate)", self.skipped);
        }
        if !self.passed() {
            let _ = write!(s, ", {} violated", self.failures.len());
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckSummary {
    pub suites: Vec<Suite>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(Suite::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(out, "{}", s.line());
            for f in s.failures.iter().take(5) {
                let _ = writeln!(out, "    {f}");
            }
        }
        out.push_str(if self.passed() {
            "all bounds satisfied\n"
        } else {
            "bound violations found\n"
        });
        out
    }
}

fn fmt_k(k: &[f64]) -> String {
    format!("({:.6}, {:.6}, {:.6})", k[0], k[1], k[2])
}

/// Runs every bound suite on the configured model and on seeded random
/// instances.
pub fn check(cfg: &ScenarioConfig) -> qgbound::Result<CheckSummary> {
    let tol = &cfg.tol;
    let model = cfg.model.model();
    let spin = cfg.model.spin_ops();
    let opts = SweepOptions {
        geometry: true,
        uncertainty: true,
        ..sweep_options(cfg)
    };
    let pts = run_sweep(model, &samples(cfg)?, &opts)?;

    let mut metric = Suite::new("metric self-bound");
    let mut spin_rel = Suite::new("spin uncertainty");
    let mut explicit = Suite::new("explicit 3D metric");
    let mut rob = Suite::new("Robertson determinant");
    let mut band_qcrb = Suite::new("band operator QCRB");
    for p in &pts {
        let k = [p.row.kx, p.row.ky, p.row.kz];
        if let Some(sb) = &p.self_bound {
            for r in &sb.diagonal {
                metric.record(r.satisfied, || format!("{} = {:e} at k = {}", r.name, r.residual, fmt_k(&k)));
            }
        }
        if let Some(u) = &p.uncertainty {
            for r in u.reports.iter().chain([&u.composite_sum, &u.composite_product]) {
                spin_rel.record(r.satisfied, || format!("{} = {:e} at k = {}", r.name, r.residual, fmt_k(&k)));
            }
        }
        if let Some(gt) = &p.qgt {
            for r in bound_3d_explicit(gt, tol)? {
                explicit.record(r.satisfied, || format!("{} = {:e} at k = {}", r.name, r.residual, fmt_k(&k)));
            }
            let r = robertson_det(gt, tol);
            rob.record(r.satisfied, || format!("residual {:e} at k = {}", r.residual, fmt_k(&k)));
        }
        match band_state_derivatives(model, &k, 0) {
            Ok((psi, derivs)) => {
                let derivs: Vec<_> = cfg.model.qcrb_axes().iter().map(|&a| derivs[a].clone()).collect();
                let gt = pure_state_qgt(&psi, &derivs)?;
                let d_rho = d_rho_matrix(&psi, &derivs, &spin)?;
                match operator_qcrb_residual(&psi, &spin, &gt, &d_rho, tol) {
                    Ok(r) => band_qcrb.record(r.satisfied, || format!("min eig {:e} at k = {}", r.min_eig, fmt_k(&k))),
                    Err(Error::Degenerate { .. }) => band_qcrb.skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::GapClosing { .. }) => band_qcrb.skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let mut plane = Suite::new("2D bound, kz = 0 plane");
    for s in grid::<f64>(CHECK_GRID, &[0, 1], [0.0; 3])? {
        let k = s.k.as_slice();
        match qgt_perturbative(model, k, cfg.model.n_occ()) {
            Ok(gt) => {
                let gt2 = gt.restrict(&[0, 1]);
                let b = bound_2d(&gt2, tol)?;
                plane.record(b.satisfied, || format!("bound residual {:e} at k = {}", b.residual, fmt_k(k)));
                let r = robertson_det(&gt2, tol);
                plane.record(r.satisfied, || format!("det residual {:e} at k = {}", r.residual, fmt_k(k)));
            }
            Err(Error::GapClosing { .. }) => plane.skipped += 1,
            Err(e) => return Err(e),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rs = Suite::new("Robertson-Schroedinger");
    let mut multi = Suite::new("three-operator relation");
    let mut pure = Suite::new("pure-state operator QCRB");
    let mut mixed = Suite::new("mixed-state operator QCRB");
    for i in 0..CHECK_INSTANCES {
        let dim = rng.random_range(2..6);
        let psi = random_state::<f64, _>(&mut rng, dim);
        let set = random_operator_set::<f64, _>(&mut rng, dim, 3);
        let [a, b, _] = set.ops() else { unreachable!() };
        let r = robertson_schrodinger(&psi, a, b, tol)?;
        rs.record(r.satisfied, || format!("instance {i}: residual {:e}", r.residual));
        let m = multi_op_bound(&psi, &set, tol)?;
        let e = three_op_explicit(&psi, &set, tol)?;
        multi.record(m.satisfied && e.satisfied, || format!("instance {i}"));

        let nparams = if dim == 2 { 2 } else { 3 };
        let derivs: Vec<Vec<qgbound::C64>> = (0..nparams)
            .map(|_| {
                let d = random_state::<f64, _>(&mut rng, dim);
                let a = psi.amplitudes();
                let c = qgbound::numlin::inner(a, d.amplitudes()).re;
                d.amplitudes().iter().zip(a).map(|(x, y)| x - y * c).collect()
            })
            .collect();
        let gt = pure_state_qgt(&psi, &derivs)?;
        let d_rho = d_rho_matrix(&psi, &derivs, &set)?;
        match operator_qcrb_residual(&psi, &set, &gt, &d_rho, tol) {
            Ok(r) => pure.record(r.satisfied, || format!("instance {i}: min eig {:e}", r.min_eig)),
            Err(Error::Degenerate { .. }) => pure.skipped += 1,
            Err(e) => return Err(e),
        }

        let fam = random_gram_family::<f64, _>(&mut rng, dim, 2);
        let k = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let r = mixed_qcrb_residual(&fam.rho(&k)?, &fam.d_rho(&k)?, &set, tol)?;
        mixed.record(r.satisfied, || format!("instance {i}: min eig {:e}", r.min_eig));
    }

    Ok(CheckSummary {
        suites: vec![metric, spin_rel, explicit, rob, band_qcrb, plane, rs, multi, pure, mixed],
    })
}

/// Determinant-zero cases of the three-operator relation.
pub struct Counterexamples {
    pub text: String,
    pub all_zero: bool,
}

pub fn counterexamples(cfg: &ScenarioConfig) -> qgbound::Result<Counterexamples> {
    let tol = &cfg.tol;
    let mut text = String::new();
    let mut all_zero = true;
    let _ = writeln!(text, "# angular momentum (Lx, Ly, Lz) on |l, m>");
    let _ = writeln!(text, "l,m,<Lz>,<Lx^2>,(l^2+l-m^2)/2,det_C,det_C_zero");
    for ell in 1..=4 {
        let l = ell as f64;
        let set = angular_momentum_ops(l)?;
        for m2 in -ell..=ell {
            let m = m2 as f64;
            let psi = angular_momentum_state(l, m)?;
            let cc = cov_comm(&psi, &set)?;
            let lx2 = cc.cov.get(0, 0) + cc.means[0] * cc.means[0];
            let det = cc.cov.det();
            let zero = det.abs() <= 1e-12 * cc.cov.max_abs().max(1.0).powi(3);
            all_zero &= zero;
            let _ = writeln!(
                text,
                "{ell},{m2},{:?},{:?},{:?},{:e},{zero}",
                cc.means[2],
                lx2,
                (l * l + l - m * m) / 2.0,
                det
            );
        }
    }

    let _ = writeln!(text, "# Pauli (sx, sy, sz) on the lower band of d.sigma, seed {}", cfg.seed);
    let _ = writeln!(text, "sample,dx,dy,dz,|<sigma>|,det_C,max|V|,det_C_zero");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pauli = OperatorSet::<f64>::pauli();
    for i in 0..COUNTEREXAMPLE_SAMPLES {
        let d: [f64; 3] = random_d_vector(&mut rng);
        let h = HermitianMatrix::linear_combination(&d, pauli.ops());
        let psi = PureState64::new(eigh(&h).vector(0))?;
        let r = three_op_explicit(&psi, &pauli, tol)?;
        let s = r.moments.means.iter().map(|x| x * x).sum::<f64>().sqrt();
        let vmax = r.reports.iter().fold(0.0f64, |a, b| a.max(b.residual.abs()));
        let zero = r.det_cov.abs() <= 1e-12;
        all_zero &= zero;
        let _ = writeln!(
            text,
            "{i},{:.6},{:.6},{:.6},{:.15},{:e},{:e},{zero}",
            d[0], d[1], d[2], s, r.det_cov, vmax
        );
    }
    let _ = writeln!(
        text,
        "{}",
        if all_zero {
            "det C vanishes in every case"
        } else {
            "some covariance determinants do not vanish"
        }
    );
    Ok(Counterexamples { text, all_zero })
}

pub struct Demo {
    pub text: String,
    pub passed: bool,
}

/// Mixed-state QCRB, SLD saturation and the pure-state Fisher metric on
/// seeded random families.
pub fn estimation_demo(cfg: &ScenarioConfig) -> qgbound::Result<Demo> {
    let tol: &Tolerance = &cfg.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut text = String::new();
    let mut passed = true;

    let _ = writeln!(text, "# full-rank Gram families, seed {}", cfg.seed);
    let _ = writeln!(text, "family,dim,qcrb_min_eig,qcrb_tol,sld_saturation,sld_tol,ok");
    for i in 0..DEMO_FAMILIES {
        let dim = rng.random_range(2..5);
        let fam = random_gram_family::<f64, _>(&mut rng, dim, 2);
        let k = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let rho = fam.rho(&k)?;
        let d = fam.d_rho(&k)?;
        let set = random_operator_set::<f64, _>(&mut rng, dim, 3);
        let r = mixed_qcrb_residual(&rho, &d, &set, tol)?;
        let l = sld(&rho, &d)?;
        let f = qfim(&rho, &l)?;
        let sat = mixed_qcrb_residual(&rho, &d, &OperatorSet::unlabelled(l.ls.clone())?, tol)?;
        let sat_res = sat.residual.max_abs();
        let sat_tol = 1e-9 * f.max_abs();
        let ok = r.satisfied && sat_res <= sat_tol;
        passed &= ok;
        let _ = writeln!(
            text,
            "{i},{dim},{:e},{:e},{:e},{:e},{ok}",
            r.min_eig, r.tol, sat_res, sat_tol
        );
    }

    let _ = writeln!(text, "# pure band families: max |F - 4g|");
    let _ = writeln!(text, "family,k,max|F-4g|,ok");
    for i in 0..DEMO_FAMILIES {
        let model = random_qubit_model::<f64, _>(&mut rng);
        let k = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let gt = match qgt_perturbative(&model, &k, 1) {
            Ok(gt) => gt,
            Err(Error::GapClosing { .. }) => continue,
            Err(e) => return Err(e),
        };
        let fam = BandFamily { model, band: 0 };
        let rho = fam.rho(&k)?;
        let f = qfim(&rho, &sld(&rho, &fam.d_rho(&k)?)?)?;
        let dev = f.to_rmat().sub(&gt.g.to_rmat().scale(4.0)).max_abs();
        let ok = dev <= 1e-10 * gt.g.max_abs().max(1.0);
        passed &= ok;
        let _ = writeln!(text, "qubit-{i},({:.6}, {:.6}),{dev:e},{ok}", k[0], k[1]);
    }
    if let ModelSpec::Ti(ti) = cfg.model {
        if !ti.field.is_zero() {
            for i in 0..DEMO_FAMILIES {
                let k: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
                let gt = qgt_perturbative(&ti, &k, 1)?;
                let fam = BandFamily { model: ti, band: 0 };
                let rho = fam.rho(&k)?;
                let f = qfim(&rho, &sld(&rho, &fam.d_rho(&k)?)?)?;
                let dev = f.to_rmat().sub(&gt.g.to_rmat().scale(4.0)).max_abs();
                let ok = dev <= 1e-10 * gt.g.max_abs().max(1.0);
                passed &= ok;
                let _ = writeln!(text, "ti3d-band0-{i},{},{dev:e},{ok}", fmt_k(&k));
            }
        }
    }

    let _ = writeln!(text, "{}", if passed { "estimation demo passed" } else { "estimation demo failed" });
    Ok(Demo { text, passed })
}
