//! k-space paths and grids, and the per-point evaluation that turns them
//! into result tables.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{qgt_perturbative, GeometricTensor};
use crate::models::{BlochModel, KPoint};
use crate::numlin::eigh;
use crate::qcrb::{metric_self_bound, SelfBound, Tolerance};
use crate::scalar::Real;
use crate::states::{gap_threshold, OperatorSet, PureState};
use crate::uncertainty::{multi_op_bound, UncertaintyReport};

/// Environment variable capping the sweep thread count.
pub const THREADS_ENV: &str = "QGBOUND_THREADS";

/// A named high-symmetry point.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex<T> {
    pub label: char,
    pub k: KPoint<T>,
}

pub fn vertex<T: Real>(label: char) -> Result<Vertex<T>> {
    let pi = T::PI();
    let z = T::zero();
    let k = match label {
        'G' | 'Γ' => KPoint::new(z, z, z),
        'X' => KPoint::new(pi, z, z),
        'M' => KPoint::new(pi, pi, z),
        'R' => KPoint::new(pi, pi, pi),
        other => return Err(Error::Config(format!("path: unknown high-symmetry point '{other}'"))),
    };
    Ok(Vertex {
        label: if label == 'Γ' { 'G' } else { label },
        k,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub k: KPoint<T>,
    pub arclength: T,
    /// Segment label such as `"G-X"`, or `"grid"`.
    pub segment: String,
}

/// Piecewise-linear path through high-symmetry points.
///
/// Each segment contributes `points_per_segment` samples including its start
/// and excluding its end; the final vertex is appended once, so there are
/// `segments · points_per_segment + 1` samples.
#[derive(Clone, Debug, PartialEq)]
pub struct KPath<T> {
    pub vertices: Vec<Vertex<T>>,
    pub points_per_segment: usize,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> KPath<T> {
    /// Γ–X–M–R–Γ.
    pub fn standard(n: usize) -> Result<Self> {
        Self::from_labels("GXMRG", n)
    }

    pub fn from_labels(labels: &str, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCount(n));
        }
        let vertices = labels.chars().map(vertex).collect::<Result<Vec<_>>>()?;
        if vertices.len() < 2 {
            return Err(Error::Config(format!("path: need at least two points, got '{labels}'")));
        }
        let mut samples = Vec::with_capacity((vertices.len() - 1) * n + 1);
        let mut s0 = T::zero();
        let mut label = String::new();
        for w in vertices.windows(2) {
            let (a, b) = (&w[0].k.0, &w[1].k.0);
            let len = (0..3).fold(T::zero(), |s, i| s + (b[i] - a[i]) * (b[i] - a[i])).sqrt();
            label = format!("{}-{}", w[0].label, w[1].label);
            for j in 0..n {
                let t = T::lit(j as f64) / T::lit(n as f64);
                samples.push(Sample {
                    k: KPoint(std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))),
                    arclength: s0 + t * len,
                    segment: label.clone(),
                });
            }
            s0 = s0 + len;
        }
        samples.push(Sample {
            k: vertices[vertices.len() - 1].k.clone(),
            arclength: s0,
            segment: label,
        });
        Ok(Self {
            vertices,
            points_per_segment: n,
            samples,
        })
    }

    pub fn total_length(&self) -> T {
        self.samples.last().map_or(T::zero(), |s| s.arclength)
    }
}

/// Uniform grid `k_i = -π + 2π i / n` on each axis listed in `axes`, other
/// components held at `fixed`.
pub fn grid<T: Real>(n: usize, axes: &[usize], fixed: [T; 3]) -> Result<Vec<Sample<T>>> {
    if n < 1 {
        return Err(Error::InvalidCount(n));
    }
    if axes.is_empty() || axes.iter().any(|&a| a > 2) {
        return Err(Error::Config(format!("grid: invalid axes {axes:?}")));
    }
    let total = n.pow(axes.len() as u32);
    let step = T::TAU() / T::lit(n as f64);
    Ok((0..total)
        .map(|idx| {
            let mut k = fixed;
            let mut rest = idx;
            for &a in axes.iter().rev() {
                k[a] = -T::PI() + step * T::lit((rest % n) as f64);
                rest /= n;
            }
            Sample {
                k: KPoint(k),
                arclength: T::zero(),
                segment: "grid".to_string(),
            }
        })
        .collect())
}

/// Degeneracy and status markers attached to a row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags(pub Vec<String>);

impl Flags {
    pub fn push(&mut self, f: &str) {
        self.0.push(f.to_string());
    }

    pub fn contains(&self, f: &str) -> bool {
        self.0.iter().any(|x| x == f)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for Flags {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.join("|"))
    }
}

impl<'de> Deserialize<'de> for Flags {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Flags(s.split('|').filter(|x| !x.is_empty()).map(str::to_string).collect()))
    }
}

pub const FLAG_GAP_CLOSING: &str = "gap_closing";
pub const FLAG_BAND_DEGENERATE: &str = "band_degenerate";
pub const FLAG_DET_G_ZERO: &str = "det_g_zero";
pub const FLAG_DET_C_ZERO: &str = "det_C_zero";
pub const FLAG_VL_ZERO: &str = "VL_zero";
pub const FLAG_VIOLATION: &str = "violation";

/// One output row; the field order is the column order of the table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub index: usize,
    pub segment: String,
    pub arclength: f64,
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
    pub g_xx: Option<f64>,
    pub g_xy: Option<f64>,
    pub g_xz: Option<f64>,
    pub g_yy: Option<f64>,
    pub g_yz: Option<f64>,
    pub g_zz: Option<f64>,
    pub om_xy: Option<f64>,
    pub om_yz: Option<f64>,
    pub om_zx: Option<f64>,
    pub det_g: Option<f64>,
    #[serde(rename = "Vg_xx")]
    pub vg_xx: Option<f64>,
    #[serde(rename = "Vg_yy")]
    pub vg_yy: Option<f64>,
    #[serde(rename = "Vg_zz")]
    pub vg_zz: Option<f64>,
    #[serde(rename = "VL_xx")]
    pub vl_xx: Option<f64>,
    #[serde(rename = "VL_yy")]
    pub vl_yy: Option<f64>,
    #[serde(rename = "VL_zz")]
    pub vl_zz: Option<f64>,
    pub sx: Option<f64>,
    pub sy: Option<f64>,
    pub sz: Option<f64>,
    #[serde(rename = "det_C")]
    pub det_c: Option<f64>,
    pub flags: Flags,
}

pub const COLUMNS: [&str; 27] = [
    "index", "segment", "arclength", "kx", "ky", "kz", "g_xx", "g_xy", "g_xz", "g_yy", "g_yz", "g_zz", "om_xy",
    "om_yz", "om_zx", "det_g", "Vg_xx", "Vg_yy", "Vg_zz", "VL_xx", "VL_yy", "VL_zz", "sx", "sy", "sz", "det_C",
    "flags",
];

#[derive(Clone, Debug)]
pub struct SweepOptions<T> {
    /// Occupied bands for the geometric tensor.
    pub n_occ: usize,
    /// Band whose eigenstate enters the uncertainty relations.
    pub band: usize,
    pub geometry: bool,
    pub uncertainty: bool,
    pub tol: Tolerance,
    /// Operators for the uncertainty relations (three of them fill the
    /// `VL_*` and `s*` columns).
    pub ops: OperatorSet<T>,
    pub threads: Option<usize>,
}

/// Everything computed at one sample.
#[derive(Clone, Debug)]
pub struct SweepPoint<T> {
    pub row: ResultRow,
    pub qgt: Option<GeometricTensor<T>>,
    pub self_bound: Option<SelfBound<T>>,
    pub uncertainty: Option<UncertaintyReport<T>>,
}

impl<T: Real> SweepPoint<T> {
    /// False when any evaluated bound is violated.
    pub fn satisfied(&self) -> bool {
        self.self_bound
            .as_ref()
            .is_none_or(|b| b.diagonal.iter().all(|r| r.satisfied))
            && self.uncertainty.as_ref().is_none_or(|u| u.reports.iter().all(|r| r.satisfied))
    }
}

fn band_state<T: Real, M: BlochModel<T> + ?Sized>(model: &M, k: &[T], band: usize) -> Result<(PureState<T>, bool)> {
    let es = eigh(&model.hamiltonian(k)?);
    if band >= es.dim() {
        return Err(Error::InvalidOccupation {
            n_occ: band,
            dim: es.dim(),
        });
    }
    let thr = gap_threshold(&es.values);
    let e = es.values[band];
    let degenerate = es
        .values
        .iter()
        .enumerate()
        .any(|(i, &x)| i != band && (x - e).abs() <= thr);
    Ok((PureState::new(es.vector(band))?, degenerate))
}

fn opt<T: Real>(x: T) -> Option<f64> {
    Some(x.as_f64())
}

/// Evaluates one sample; a gap closing blanks the affected columns and sets
/// a flag instead of failing.
pub fn evaluate_point<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    index: usize,
    sample: &Sample<T>,
    opts: &SweepOptions<T>,
) -> Result<SweepPoint<T>> {
    let k = sample.k.as_slice();
    let mut row = ResultRow {
        index,
        segment: sample.segment.clone(),
        arclength: sample.arclength.as_f64(),
        kx: k[0].as_f64(),
        ky: k[1].as_f64(),
        kz: k[2].as_f64(),
        ..Default::default()
    };
    let mut point = SweepPoint {
        row: ResultRow::default(),
        qgt: None,
        self_bound: None,
        uncertainty: None,
    };

    if opts.geometry {
        match qgt_perturbative(model, k, opts.n_occ) {
            Ok(gt) => {
                let sb = metric_self_bound(&gt, &opts.tol);
                let g = |i, j| opt(gt.g.get(i, j));
                row.g_xx = g(0, 0);
                row.g_xy = g(0, 1);
                row.g_xz = g(0, 2);
                row.g_yy = g(1, 1);
                row.g_yz = g(1, 2);
                row.g_zz = g(2, 2);
                row.om_xy = opt(gt.omega.get(0, 1));
                row.om_yz = opt(gt.omega.get(1, 2));
                row.om_zx = opt(gt.omega.get(2, 0));
                row.det_g = opt(sb.det);
                let v = |a: usize| sb.diagonal.get(a).map(|r| r.residual.as_f64());
                row.vg_xx = v(0);
                row.vg_yy = v(1);
                row.vg_zz = v(2);
                if sb.degenerate {
                    row.flags.push(FLAG_DET_G_ZERO);
                }
                point.qgt = Some(gt);
                point.self_bound = Some(sb);
            }
            Err(Error::GapClosing { .. }) => row.flags.push(FLAG_GAP_CLOSING),
            Err(e) => return Err(e),
        }
    }

    if opts.uncertainty {
        match band_state(model, k, opts.band) {
            Ok((psi, degenerate)) => {
                if degenerate {
                    row.flags.push(FLAG_BAND_DEGENERATE);
                }
                let u = multi_op_bound(&psi, &opts.ops, &opts.tol)?;
                let v = |a: usize| u.reports.get(a).map(|r| r.residual.as_f64());
                row.vl_xx = v(0);
                row.vl_yy = v(1);
                row.vl_zz = v(2);
                let s = |a: usize| u.moments.means.get(a).map(|x| x.as_f64());
                row.sx = s(0);
                row.sy = s(1);
                row.sz = s(2);
                row.det_c = opt(u.det_cov);
                if u.degenerate {
                    row.flags.push(FLAG_DET_C_ZERO);
                }
                if u.reports.iter().all(|r| r.residual.abs() <= r.tol) {
                    row.flags.push(FLAG_VL_ZERO);
                }
                point.uncertainty = Some(u);
            }
            Err(Error::GapClosing { .. }) => {
                if !row.flags.contains(FLAG_GAP_CLOSING) {
                    row.flags.push(FLAG_GAP_CLOSING);
                }
            }
            Err(e) => return Err(e),
        }
    }

    point.row = row;
    if !point.satisfied() {
        point.row.flags.push(FLAG_VIOLATION);
    }
    Ok(point)
}

/// Thread cap from `QGBOUND_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

/// Evaluates every sample, in parallel, returning points in sample order.
pub fn run_sweep<T: Real, M: BlochModel<T> + ?Sized>(
    model: &M,
    samples: &[Sample<T>],
    opts: &SweepOptions<T>,
) -> Result<Vec<SweepPoint<T>>> {
    let work = || {
        samples
            .par_iter()
            .enumerate()
            .map(|(i, s)| evaluate_point(model, i, s, opts))
            .collect::<Result<Vec<_>>>()
    };
    match opts.threads.or_else(threads_from_env) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("threads: {e}")))?
            .install(work),
        None => work(),
    }
}
