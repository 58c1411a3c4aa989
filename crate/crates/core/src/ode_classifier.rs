//! Classification by the radial equation `(1 - r^2) g'(r) + g(r)^2 = A`.
//!
//! The gradient fields close a Lie algebra together with the fundamental
//! fields exactly when `F(r)` is constant. The three sign branches of the
//! constant give BKM (`A = 0`), the family `f_A` (`A > 0`), and a tangent
//! family with poles inside the ball (`A < 0`), which is excluded.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric_family::{big_f, g_from_f, g_prime_numeric, MonotoneFunctionSpec};

/// Width of `F` over the grid below which it counts as constant.
pub const CONSTANCY_TOL: f64 = 1e-6;
pub const MIN_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Constant { a: f64 },
    NonConstant { range_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    BkmA0,
    FamilyAPos { a: f64 },
    FamilyBNeg { b: f64 },
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeClassification {
    pub spec: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: Verdict,
    pub branch: Branch,
}

pub fn classify(spec: &MonotoneFunctionSpec, grid: &[f64]) -> Result<OdeClassification> {
    classify_with_tol(spec, grid, CONSTANCY_TOL)
}

/// Evaluates `F` on `grid` and decides whether it is constant to within `tol`.
pub fn classify_with_tol(
    spec: &MonotoneFunctionSpec,
    grid: &[f64],
    tol: f64,
) -> Result<OdeClassification> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "classification needs at least {MIN_GRID_POINTS} grid points, got {}",
            grid.len()
        )));
    }
    let values = grid
        .iter()
        .map(|&r| big_f(spec, r))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    let width = hi - lo;
    let (verdict, branch) = if width < tol {
        let a = values.iter().sum::<f64>() / values.len() as f64;
        let branch = if a.abs() < tol {
            Branch::BkmA0
        } else if a > 0.0 {
            Branch::FamilyAPos { a }
        } else {
            Branch::FamilyBNeg { b: -a / 4.0 }
        };
        (Verdict::Constant { a }, branch)
    } else {
        (Verdict::NonConstant { range_width: width }, Branch::None)
    };
    Ok(OdeClassification {
        spec: spec.name(),
        grid: grid.to_vec(),
        values,
        verdict,
        branch,
    })
}

/// Poles of the excluded family inside `(0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct SingularityList {
    pub b: f64,
    pub c: f64,
    /// Index `k` in `sqrt(B) (ln t - c) = -pi/2 - k pi`.
    pub k: Vec<u64>,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
}

/// The first `max_count` poles `t_k = exp(c - (pi/2 + k pi) / sqrt B)` with `t_k <= 1`.
pub fn singularities(b: f64, c: f64, max_count: usize) -> Result<SingularityList> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("need B > 0, got {b}")));
    }
    let sb = b.sqrt();
    let k_min = ((c * sb - PI / 2.0) / PI).ceil().max(0.0) as u64;
    let mut out = SingularityList {
        b,
        c,
        k: vec![],
        t: vec![],
        r: vec![],
    };
    let mut k = k_min;
    while out.t.len() < max_count {
        let t = (c - (PI / 2.0 + k as f64 * PI) / sb).exp();
        if t <= 1.0 {
            if t == 0.0 {
                break;
            }
            out.k.push(k);
            out.t.push(t);
            out.r.push((1.0 - t) / (1.0 + t));
        }
        k += 1;
    }
    Ok(out)
}

/// Why a negative constant is rejected, with the offending poles.
#[derive(Debug, Clone, Serialize)]
pub struct Exclusion {
    pub a: f64,
    pub family: MonotoneFunctionSpec,
    pub singularities: SingularityList,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BranchSolution {
    Metric { spec: MonotoneFunctionSpec },
    Exclusion(Exclusion),
}

impl BranchSolution {
    pub fn spec(&self) -> Option<&MonotoneFunctionSpec> {
        match self {
            BranchSolution::Metric { spec } => Some(spec),
            BranchSolution::Exclusion(_) => None,
        }
    }
}

/// Normalized solution of `F = A` (`c = 0` from `f(1) = 1`); the negative
/// branch is returned as an exclusion with integration constant `c = 0`.
pub fn solve_branch(a: f64) -> BranchSolution {
    solve_branch_with_c(a, 0.0)
}

pub fn solve_branch_with_c(a: f64, c: f64) -> BranchSolution {
    if a == 0.0 {
        BranchSolution::Metric {
            spec: MonotoneFunctionSpec::Bkm,
        }
    } else if a > 0.0 {
        BranchSolution::Metric {
            spec: MonotoneFunctionSpec::FamilyA(a),
        }
    } else {
        let b = -a / 4.0;
        let singularities = singularities(b, c, 5).expect("B > 0 for A < 0");
        BranchSolution::Exclusion(Exclusion {
            a,
            family: MonotoneFunctionSpec::FamilyB { b, c },
            reason: format!(
                "f_B has infinitely many tangent poles in (0, 1], first at t = {:.6e}; \
                 the metric is undefined on the spheres r = r_k",
                singularities.t.first().copied().unwrap_or(f64::NAN)
            ),
            singularities,
        })
    }
}

/// `max |(1 - r^2) g'(r) + g(r)^2 - A|` over `grid`.
pub fn verify_ode_residual(spec: &MonotoneFunctionSpec, a: f64, grid: &[f64]) -> Result<f64> {
    grid.iter()
        .map(|&r| Ok((big_f(spec, r)? - a).abs()))
        .try_fold(0.0f64, |m, v: Result<f64>| Ok(m.max(v?)))
}

/// Residual of the separated form `dg/dt = (g^2 - A) / 2t` in the variable
/// `t = (1 - r) / (1 + r)`, with a numerical `dg/dt`.
pub fn separated_residual(spec: &MonotoneFunctionSpec, a: f64, t_grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let r = (1.0 - t) / (1.0 + t);
        let g = g_from_f(spec, r)?;
        // dg/dt = g'(r) dr/dt, dr/dt = -2 / (1 + t)^2
        let dg_dt = g_prime_numeric(spec, r, 1e-5)? * (-2.0 / ((1.0 + t) * (1.0 + t)));
        let scale = 1.0 + (g * g - a).abs();
        worst = worst.max((2.0 * t * dg_dt - (g * g - a)).abs() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::{f_eval, metric_spherical, Grid};
    use crate::state_space::SphericalPoint;

    fn grid() -> Vec<f64> {
        Grid::new(0.02, 0.98, 50).points()
    }

    #[test]
    fn classify_catalog() {
        let bkm = classify(&MonotoneFunctionSpec::Bkm, &grid()).unwrap();
        assert!(matches!(bkm.verdict, Verdict::Constant { a } if a.abs() < 1e-9));
        assert_eq!(bkm.branch, Branch::BkmA0);
        let wy = classify(&MonotoneFunctionSpec::FamilyA(0.25), &grid()).unwrap();
        assert!(matches!(wy.verdict, Verdict::Constant { a } if (a - 0.25).abs() < 1e-9));
        assert!(matches!(wy.branch, Branch::FamilyAPos { .. }));
        let g = grid();
        let rld = classify(&MonotoneFunctionSpec::Rld, &g).unwrap();
        // F = -2 (1 - r^2): width 2 (max(1 - r^2) - min(1 - r^2))
        let expect = 2.0 * ((1.0 - g[0] * g[0]) - (1.0 - g[49] * g[49]));
        match rld.verdict {
            Verdict::NonConstant { range_width } => assert!((range_width - expect).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
        assert_eq!(rld.branch, Branch::None);
        assert!(classify(&MonotoneFunctionSpec::Bkm, &g[..10]).is_err());
    }

    #[test]
    fn solve_examples() {
        assert!(matches!(
            solve_branch(0.0).spec(),
            Some(MonotoneFunctionSpec::Bkm)
        ));
        match solve_branch(1.0).spec() {
            Some(spec @ MonotoneFunctionSpec::FamilyA(a)) => {
                assert_eq!(*a, 1.0);
                let t = 0.37;
                assert!((f_eval(spec, t).unwrap() - (1.0 + t) / 2.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        match solve_branch(-4.0) {
            BranchSolution::Exclusion(e) => {
                assert!(matches!(e.family, MonotoneFunctionSpec::FamilyB { b, .. } if b == 1.0));
                assert!(!e.singularities.t.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residuals() {
        let g = grid();
        assert!(verify_ode_residual(&MonotoneFunctionSpec::FamilyA(2.0), 2.0, &g).unwrap() < 1e-8);
        assert!(verify_ode_residual(&MonotoneFunctionSpec::Bkm, 0.0, &g).unwrap() < 1e-8);
        let wrong = verify_ode_residual(&MonotoneFunctionSpec::BuresHelstrom, 0.5, &g).unwrap();
        assert!((wrong - 0.5).abs() < 1e-12);
        let tg = Grid::new(0.05, 0.95, 19).points();
        for (spec, a) in [
            (MonotoneFunctionSpec::Bkm, 0.0),
            (MonotoneFunctionSpec::FamilyA(3.0), 3.0),
            (MonotoneFunctionSpec::WignerYanase, 0.25),
        ] {
            assert!(
                separated_residual(&spec, a, &tg).unwrap() < 1e-7,
                "{spec:?}"
            );
        }
    }

    #[test]
    fn pole_examples() {
        let s = singularities(1.0, 0.0, 2).unwrap();
        assert!((s.t[0] - 0.20788).abs() < 1e-5);
        assert!((s.t[1] - 0.00898).abs() < 1e-5);
        assert!((s.t[0] - (-PI / 2.0).exp()).abs() < 1e-15);
        let spec = MonotoneFunctionSpec::FamilyB { b: 1.0, c: 0.0 };
        for &t in &s.t {
            let lo = f_eval(&spec, t * (1.0 - 1e-9)).unwrap();
            let hi = f_eval(&spec, t * (1.0 + 1e-9)).unwrap();
            assert!(lo.abs() > 1e6 && hi.abs() > 1e6);
            assert!(lo.signum() != hi.signum());
        }
        let ten = singularities(0.7, 0.3, 10).unwrap();
        assert_eq!(ten.t.len(), 10);
        assert!(ten.t.iter().all(|&t| t > 0.0 && t <= 1.0));
        assert!(ten.t.windows(2).all(|w| w[1] < w[0]));
        let shifted = singularities(1.0, 10.0, 3).unwrap();
        assert_eq!(shifted.k, vec![3, 4, 5]);
        assert!(shifted.t.iter().all(|&t| t <= 1.0));
    }

    #[test]
    fn pole_condition_holds() {
        let s = singularities(2.5, -0.4, 8).unwrap();
        let sb = 2.5f64.sqrt();
        for (&t, &k) in s.t.iter().zip(&s.k) {
            let lhs = sb * t.ln() - sb * s.c;
            assert!((lhs + PI / 2.0 + k as f64 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_fails_at_poles() {
        let s = singularities(1.0, 0.0, 2).unwrap();
        let spec = MonotoneFunctionSpec::FamilyB { b: 1.0, c: 0.0 };
        for &r in &s.r {
            let p = SphericalPoint::new(r, 1.0, 0.0).unwrap();
            assert!(matches!(
                metric_spherical(&spec, &p),
                Err(Error::PoleError(_))
            ));
        }
    }
}
