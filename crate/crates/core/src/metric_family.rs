//! Petz functions `f`, the radial functions `g(r)` and `F(r)`, metric tensors
//! on the Bloch ball in both charts, and numerical monotonicity probes.
//!
//! The metric attached to `f` is, in spherical coordinates,
//!
//! ```text
//! G_f = dr^2 / (1 - r^2) + r^2 / ((1 + r) f(t)) (dtheta^2 + sin^2 theta dphi^2),
//! t = (1 - r) / (1 + r),
//! ```
//!
//! and `g(r) = (1 + r) f(t) / r`, `F(r) = (1 - r^2) g'(r) + g(r)^2`.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::seeds::derive_seed;
use crate::state_space::{SphericalPoint, DEFAULT_EPS_CHART};

/// Window around `t = 1` where removable singularities use a series.
const TAYLOR_WINDOW: f64 = 1e-6;
/// `|cos|` of the tangent argument below which the excluded family reports a pole.
const POLE_GUARD: f64 = 1e-11;
/// Step for Richardson-extrapolated central differences of `g`.
pub const DEFAULT_H_F: f64 = 1e-6;

/// A Petz function (or a control function) together with its catalog identity.
#[derive(Clone)]
pub enum MonotoneFunctionSpec {
    /// `(t - 1) / ln t`.
    Bkm,
    /// `(sqrt A / 2) (1 - t) (1 + t^sqrt A) / (1 - t^sqrt A)`, `A > 0`.
    FamilyA(f64),
    /// Solution branch for a negative constant, `B = -A / 4`; has tangent poles.
    FamilyB { b: f64, c: f64 },
    /// `(1 + t) / 2`.
    BuresHelstrom,
    /// `(1 + sqrt t)^2 / 4`.
    WignerYanase,
    /// `2t / (1 + t)`.
    Rld,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for MonotoneFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for MonotoneFunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// Parses `bkm`, `bh`, `wy`, `rld`, `familyA(A)` and `familyB(B,c)`.
/// `familyA:A` and `familyB:B,c` are accepted as well.
impl FromStr for MonotoneFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unknown metric spec '{s}'"));
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "bkm" => return Ok(Self::Bkm),
            "bh" | "bures-helstrom" => return Ok(Self::BuresHelstrom),
            "wy" | "wigner-yanase" => return Ok(Self::WignerYanase),
            "rld" => return Ok(Self::Rld),
            _ => {}
        }
        let (head, args) = if let Some(rest) = lower.strip_suffix(')') {
            rest.split_once('(').ok_or_else(bad)?
        } else {
            lower.split_once(':').ok_or_else(bad)?
        };
        let nums = args
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (head.trim(), nums.as_slice()) {
            ("familya", &[a]) if a > 0.0 => Ok(Self::FamilyA(a)),
            ("familya", &[a]) => Err(Error::InvalidParameter(format!(
                "family A needs A > 0, got {a}"
            ))),
            ("familyb", &[b, c]) if b > 0.0 => Ok(Self::FamilyB { b, c }),
            ("familyb", &[b]) if b > 0.0 => Ok(Self::FamilyB { b, c: 0.0 }),
            _ => Err(bad()),
        }
    }
}

impl MonotoneFunctionSpec {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Bkm => "bkm".into(),
            Self::FamilyA(a) => format!("familyA({a})"),
            Self::FamilyB { b, c } => format!("familyB({b},{c})"),
            Self::BuresHelstrom => "bh".into(),
            Self::WignerYanase => "wy".into(),
            Self::Rld => "rld".into(),
            Self::Custom { name, .. } => name.clone(),
        }
    }

    /// Catalog entries that satisfy `f(1) = 1` and `f(t) = t f(1/t)`.
    pub fn is_petz_class(&self) -> bool {
        !matches!(self, Self::FamilyB { .. } | Self::Custom { .. })
    }

    /// Evaluates the defining formula for any `t > 0`, including `t > 1`.
    pub fn eval_extended(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::DomainError(t));
        }
        let v = match self {
            Self::Bkm => bkm(t),
            Self::FamilyA(a) => {
                if !(*a > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "family A needs A > 0, got {a}"
                    )));
                }
                family_a(a.sqrt(), t)
            }
            Self::FamilyB { b, c } => family_b(*b, *c, t)?,
            Self::BuresHelstrom => 0.5 * (1.0 + t),
            Self::WignerYanase => {
                let q = 1.0 + t.sqrt();
                0.25 * q * q
            }
            Self::Rld => 2.0 * t / (1.0 + t),
            Self::Custom { f, .. } => f(t),
        };
        Ok(v)
    }

    /// Closed-form `g'(r)` where one is known.
    pub fn g_prime_analytic(&self, r: f64) -> Option<f64> {
        let one_m = 1.0 - r * r;
        match self {
            Self::Bkm => {
                let u = r.atanh();
                Some(-1.0 / (u * u * one_m))
            }
            Self::FamilyA(a) => {
                let sh = (a.sqrt() * r.atanh()).sinh();
                Some(-a / (sh * sh * one_m))
            }
            Self::BuresHelstrom => Some(-1.0 / (r * r)),
            Self::WignerYanase => {
                let q = one_m.sqrt();
                Some(-(r * r / q + 1.0 + q) / (2.0 * r * r))
            }
            Self::Rld => Some(-1.0 / (r * r) - 1.0),
            Self::FamilyB { b, c } => {
                let t = (1.0 - r) / (1.0 + r);
                let cos = (b.sqrt() * (t.ln() - c)).cos();
                Some(-4.0 * b / (cos * cos * one_m))
            }
            Self::Custom { .. } => None,
        }
    }
}

fn bkm(t: f64) -> f64 {
    if t == 1.0 {
        return 1.0;
    }
    let w = -(t - 1.0).ln_1p();
    if (t - 1.0).abs() < TAYLOR_WINDOW {
        let x = 0.5 * w;
        let x2 = x * x;
        return (-x).exp() * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    }
    -(-w).exp_m1() / w
}

fn family_a(s: f64, t: f64) -> f64 {
    if t == 1.0 {
        return 1.0;
    }
    let w = -(t - 1.0).ln_1p();
    if (t - 1.0).abs() < TAYLOR_WINDOW {
        // f = e^{-x} (sinh x / x) (s x / tanh(s x)), x = w / 2
        let x = 0.5 * w;
        let x2 = x * x;
        let s2 = s * s;
        let c2 = 1.0 / 6.0 + s2 / 3.0;
        let c4 = 1.0 / 120.0 + s2 / 18.0 - s2 * s2 / 45.0;
        return (-x).exp() * (1.0 + c2 * x2 + c4 * x2 * x2);
    }
    0.5 * s * (-(-w).exp_m1()) / (0.5 * s * w).tanh()
}

fn family_b(b: f64, c: f64, t: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "family B needs B > 0, got {b}"
        )));
    }
    let sb = b.sqrt();
    let (sin, cos) = (sb * (t.ln() - c)).sin_cos();
    if cos.abs() < POLE_GUARD {
        return Err(Error::PoleError(t));
    }
    Ok(sb * (1.0 - t) * sin / cos)
}

/// `f(t)` for `t` in `(0, 1]`.
pub fn f_eval(spec: &MonotoneFunctionSpec, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::DomainError(t));
    }
    spec.eval_extended(t)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "radius {r} outside (0, 1)"
        )))
    }
}

/// `(1 + r) f((1 - r) / (1 + r))`, which equals `r g(r)` and tends to `f(1)` at the center.
pub fn radial_tangential_factor(spec: &MonotoneFunctionSpec, r: f64) -> Result<f64> {
    let t = (1.0 - r) / (1.0 + r);
    Ok((1.0 + r) * f_eval(spec, t)?)
}

/// `g(r) = ((1 + r) / r) f((1 - r) / (1 + r))`.
pub fn g_from_f(spec: &MonotoneFunctionSpec, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(radial_tangential_factor(spec, r)? / r)
}

/// Richardson-extrapolated central difference of `g` with step `h`.
pub fn g_prime_numeric(spec: &MonotoneFunctionSpec, r: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> {
        Ok((g_from_f(spec, r + h)? - g_from_f(spec, r - h)?) / (2.0 * h))
    };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `F(r) = (1 - r^2) g'(r) + g(r)^2`, analytic `g'` where the catalog has one.
pub fn big_f(spec: &MonotoneFunctionSpec, r: f64) -> Result<f64> {
    check_radius(r)?;
    let g = g_from_f(spec, r)?;
    let gp = match spec.g_prime_analytic(r) {
        Some(v) => v,
        None => g_prime_numeric(spec, r, DEFAULT_H_F)?,
    };
    Ok((1.0 - r * r) * gp + g * g)
}

/// `F(r)` with a finite-difference `g'` regardless of the catalog.
pub fn big_f_numeric(spec: &MonotoneFunctionSpec, r: f64, h: f64) -> Result<f64> {
    let g = g_from_f(spec, r)?;
    Ok((1.0 - r * r) * g_prime_numeric(spec, r, h)? + g * g)
}

/// Evenly spaced grid `min, ..., max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Values of `F` on a radial grid, with the deviation from a reference constant.
#[derive(Debug, Clone, Serialize)]
pub struct FScanReport {
    pub spec: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub reference: f64,
    pub max_dev: f64,
}

/// Evaluates `F` on `grid`; `reference` defaults to the mean of the values.
pub fn scan_big_f(
    spec: &MonotoneFunctionSpec,
    grid: &[f64],
    reference: Option<f64>,
) -> Result<FScanReport> {
    let values = grid
        .iter()
        .map(|&r| big_f(spec, r))
        .collect::<Result<Vec<_>>>()?;
    let reference = reference.unwrap_or_else(|| values.iter().sum::<f64>() / values.len() as f64);
    let max_dev = values
        .iter()
        .map(|v| (v - reference).abs())
        .fold(0.0, f64::max);
    Ok(FScanReport {
        spec: spec.name(),
        grid: grid.to_vec(),
        values,
        reference,
        max_dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Spherical,
    Cartesian,
}

/// Metric components at a point in a given chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricAtPoint {
    pub chart: Chart,
    #[serde(serialize_with = "crate::serde_helpers::matrix3_rows")]
    pub components: Matrix3<f64>,
    pub point: [f64; 3],
}

impl MetricAtPoint {
    pub fn apply(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        u.dot(&(self.components * v))
    }
}

fn tangential_coefficient(spec: &MonotoneFunctionSpec, r: f64) -> Result<f64> {
    let t = (1.0 - r) / (1.0 + r);
    let f = f_eval(spec, t)?;
    if !(f > 0.0) {
        return Err(Error::NotPositiveDefinite(f));
    }
    Ok(1.0 / ((1.0 + r) * f))
}

/// `G_f` in the `(r, theta, phi)` chart.
pub fn metric_spherical(spec: &MonotoneFunctionSpec, p: &SphericalPoint) -> Result<MetricAtPoint> {
    let r = p.r;
    let tang = r * r * tangential_coefficient(spec, r)?;
    let s = p.theta.sin();
    Ok(MetricAtPoint {
        chart: Chart::Spherical,
        components: Matrix3::from_diagonal(&Vector3::new(1.0 / (1.0 - r * r), tang, tang * s * s)),
        point: [p.r, p.theta, p.phi],
    })
}

/// `G_f` in Cartesian Bloch coordinates: `P_r / (1 - r^2) + P_t / ((1 + r) f(t))`.
pub fn metric_cartesian(spec: &MonotoneFunctionSpec, v: &Vector3<f64>) -> Result<MetricAtPoint> {
    let r = v.norm();
    if r <= DEFAULT_EPS_CHART {
        return Err(Error::CenterSingularity(r));
    }
    if r >= 1.0 {
        return Err(Error::BoundaryViolation {
            radius: r,
            margin: 0.0,
        });
    }
    let n = v / r;
    let radial = n * n.transpose();
    let tang = tangential_coefficient(spec, r)?;
    let comps = radial / (1.0 - r * r) + (Matrix3::identity() - radial) * tang;
    Ok(MetricAtPoint {
        chart: Chart::Cartesian,
        components: comps,
        point: [v.x, v.y, v.z],
    })
}

/// Inverse of a positive definite metric, same chart.
pub fn inverse_metric(m: &MetricAtPoint) -> Result<MetricAtPoint> {
    let sym = (m.components + m.components.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let lo = eig.min();
    let hi = eig.max();
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite(lo));
    }
    let cond = hi / lo;
    if cond > 1e12 {
        return Err(Error::IllConditioned(cond));
    }
    let inv = if is_diagonal(&sym) {
        Matrix3::from_diagonal(&sym.diagonal().map(|d| 1.0 / d))
    } else {
        sym.cholesky()
            .ok_or(Error::NotPositiveDefinite(lo))?
            .inverse()
    };
    Ok(MetricAtPoint {
        chart: m.chart,
        components: inv,
        point: m.point,
    })
}

fn is_diagonal(m: &Matrix3<f64>) -> bool {
    (0..3).all(|i| (0..3).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Outcome of the `f(1) = 1`, `f(t) = t f(1/t)` checks on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct PetzSymmetryReport {
    pub spec: String,
    pub max_symmetry_dev: f64,
    pub unit_dev: f64,
    pub passed: bool,
}

pub const PETZ_TOL: f64 = 1e-9;

/// Measures `max |f(t) - t f(1/t)|` over `grid` and `|f(1-) - 1|`.
pub fn check_petz_symmetry(
    spec: &MonotoneFunctionSpec,
    grid: &[f64],
) -> Result<PetzSymmetryReport> {
    let mut max_dev: f64 = 0.0;
    for &t in grid {
        let lhs = spec.eval_extended(t)?;
        let rhs = t * spec.eval_extended(1.0 / t)?;
        max_dev = max_dev.max((lhs - rhs).abs());
    }
    let unit_dev = (spec.eval_extended(1.0 - 1e-10)? - 1.0).abs();
    Ok(PetzSymmetryReport {
        spec: spec.name(),
        max_symmetry_dev: max_dev,
        unit_dev,
        passed: max_dev < PETZ_TOL && unit_dev < PETZ_TOL,
    })
}

/// Evidence gathered by [`scan_monotonicity`].
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub spec: String,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Smallest eigenvalue of `f(B) - f(A)` over all sampled pairs.
    pub min_eigenvalue: f64,
    pub violations: usize,
    pub counterexample: Option<MatrixCounterexample>,
    pub scalar_counterexample: Option<ScalarCounterexample>,
    pub monotone_on_samples: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixCounterexample {
    pub sample: usize,
    pub size: usize,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarCounterexample {
    pub t1: f64,
    pub t2: f64,
    pub f1: f64,
    pub f2: f64,
}

/// Eigenvalues of `f(B) - f(A)` below this count as order violations.
pub const MONOTONE_TOL: f64 = 1e-10;
const SCALAR_GRID: usize = 400;

fn hermitian_function(
    m: &DMatrix<Complex64>,
    f: &dyn Fn(f64) -> Result<f64>,
) -> Result<(DMatrix<Complex64>, Vec<f64>)> {
    let eig = m.clone().symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let n = m.nrows();
    let mut diag = DMatrix::<Complex64>::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        diag[(i, i)] = Complex64::new(f(l)?, 0.0);
    }
    let u = &eig.eigenvectors;
    Ok((u * diag * u.adjoint(), vals))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    g.qr().q()
}

struct SampleOutcome {
    min_eig: f64,
    size: usize,
    spectrum_a: Vec<f64>,
    spectrum_b: Vec<f64>,
}

fn sample_pair(
    spec: &MonotoneFunctionSpec,
    seed: u64,
    index: usize,
    n: usize,
) -> Result<SampleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, index as u64));
    // spectrum of A log-uniform in [1e-3, 1]
    let lam: Vec<f64> = (0..n)
        .map(|_| 10f64.powf(-3.0 * rng.random::<f64>()))
        .collect();
    let lam_max = lam.iter().copied().fold(0.0, f64::max);
    let u = random_unitary(&mut rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        lam.iter().map(|&l| Complex64::new(l, 0.0)),
    ));
    let a = &u * d * u.adjoint();
    let rank = 1 + rng.random_range(0..n);
    let p = DMatrix::<Complex64>::from_fn(n, rank, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let mut ppt = &p * p.adjoint();
    ppt = (&ppt + ppt.adjoint()) * Complex64::new(0.5, 0.0);
    let mu = ppt.clone().symmetric_eigen().eigenvalues.max();
    let scale = 0.999 * rng.random::<f64>() * (1.0 - lam_max) / mu;
    let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let b = &a + ppt * Complex64::new(scale, 0.0);
    let f = |x: f64| spec.eval_extended(x.max(f64::MIN_POSITIVE));
    let (fa, spectrum_a) = hermitian_function(&a, &f)?;
    let (fb, spectrum_b) = hermitian_function(&b, &f)?;
    let diff = &fb - &fa;
    let diff = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eig = diff.symmetric_eigen().eigenvalues.min();
    Ok(SampleOutcome {
        min_eig,
        size: n,
        spectrum_a,
        spectrum_b,
    })
}

/// Scalar sweep over a log grid in `[1e-3, 1]` for a decreasing pair.
pub fn scalar_monotonicity(spec: &MonotoneFunctionSpec) -> Result<Option<ScalarCounterexample>> {
    let ts: Vec<f64> = (0..SCALAR_GRID)
        .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / (SCALAR_GRID - 1) as f64))
        .collect();
    let fs = ts
        .iter()
        .map(|&t| f_eval(spec, t))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..SCALAR_GRID - 1 {
        if fs[i] > fs[i + 1] + MONOTONE_TOL {
            return Ok(Some(ScalarCounterexample {
                t1: ts[i],
                t2: ts[i + 1],
                f1: fs[i],
                f2: fs[i + 1],
            }));
        }
    }
    Ok(None)
}

/// Samples Loewner-ordered pairs `A <= B` with spectra in `(0, 1]` and looks
/// for a negative eigenvalue of `f(B) - f(A)`.
///
/// Sample `i` has size `sizes[i % sizes.len()]` and its own seed derived from
/// `(seed, i)`, so the report does not depend on the thread count.
pub fn scan_monotonicity(
    spec: &MonotoneFunctionSpec,
    sizes: &[usize],
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParameter(
            "sizes must be non-empty and positive".into(),
        ));
    }
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|i| sample_pair(spec, seed, i, sizes[i % sizes.len()]))
        .collect::<Result<Vec<_>>>()?;
    let mut min_eigenvalue = f64::INFINITY;
    let mut violations = 0;
    let mut counterexample = None;
    for (i, o) in outcomes.into_iter().enumerate() {
        min_eigenvalue = min_eigenvalue.min(o.min_eig);
        if o.min_eig < -MONOTONE_TOL {
            violations += 1;
            if counterexample.is_none() {
                counterexample = Some(MatrixCounterexample {
                    sample: i,
                    size: o.size,
                    spectrum_a: o.spectrum_a,
                    spectrum_b: o.spectrum_b,
                    min_eigenvalue: o.min_eig,
                });
            }
        }
    }
    let scalar_counterexample = scalar_monotonicity(spec)?;
    Ok(MonotonicityReport {
        spec: spec.name(),
        sizes: sizes.to_vec(),
        samples,
        seed,
        min_eigenvalue,
        violations,
        monotone_on_samples: counterexample.is_none() && scalar_counterexample.is_none(),
        counterexample,
        scalar_counterexample,
    })
}

/// Limit of `f_A'(t)` as `t -> 0+` for `A > 1`.
///
/// Central differences with step `t / 4` at `t = 10^-k`, `k = 3..=8`, behave
/// like `L + C t^(sqrt A - 1)` plus higher powers; consecutive pairs are
/// combined to cancel the leading term and the last two estimates must agree.
pub fn derivative_limit_at_zero(a: f64) -> Result<f64> {
    if !(a > 1.0) {
        return Err(Error::InvalidParameter(format!("need A > 1, got {a}")));
    }
    let spec = MonotoneFunctionSpec::FamilyA(a);
    let p = a.sqrt() - 1.0;
    let q = 10f64.powf(-p);
    let derivs = (3..=8)
        .map(|k| {
            let t = 10f64.powi(-k);
            let h = 0.25 * t;
            Ok((f_eval(&spec, t + h)? - f_eval(&spec, t - h)?) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    let limits: Vec<f64> = derivs
        .windows(2)
        .map(|w| (w[1] - q * w[0]) / (1.0 - q))
        .collect();
    let last = limits[limits.len() - 1];
    let prev = limits[limits.len() - 2];
    if !last.is_finite() || (last - prev).abs() > 1e-5 * last.abs().max(1e-3) {
        return Err(Error::ExtrapolationUnstable(prev, last));
    }
    Ok(last)
}
