//! Flows of vector fields on the Bloch ball and exact group-action orbits.
//!
//! Flows are integrated in the Cartesian chart with classical RK4 (fixed step
//! by default, step-doubling adaptive on request).

use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_actions::GroupAction;
use crate::state_space::{
    spherical_from_cartesian_with, QubitState, SphericalPoint, TracelessObservable,
    DEFAULT_EPS_BOUNDARY,
};
use crate::vector_fields::VectorField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Integrator {
    Rk4 {
        steps: usize,
    },
    Rk4Adaptive {
        tolerance: f64,
        max_steps: usize,
    },
    /// Exact orbit evaluation.
    Orbit {
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub descriptor: String,
    pub integrator: Integrator,
    pub times: Vec<f64>,
    pub points: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn point(&self, i: usize) -> Vector3<f64> {
        Vector3::from(self.points[i])
    }

    pub fn last(&self) -> Vector3<f64> {
        self.point(self.len() - 1)
    }

    pub fn max_radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| Vector3::from(*p).norm())
            .fold(0.0, f64::max)
    }

    /// Spherical coordinates of each point; `None` where the chart is singular.
    pub fn spherical(&self, eps_chart: f64) -> Vec<Option<SphericalPoint>> {
        self.points
            .iter()
            .map(|p| spherical_from_cartesian_with(Vector3::from(*p), eps_chart).ok())
            .collect()
    }

    /// CSV with columns `t,x,y,z,r` and `l_a` when an observable is given.
    pub fn to_csv(&self, a: Option<&TracelessObservable>) -> String {
        let mut out = String::from("t,x,y,z,r");
        if a.is_some() {
            out.push_str(",l_a");
        }
        out.push('\n');
        for (t, p) in self.times.iter().zip(&self.points) {
            let v = Vector3::from(*p);
            let _ = write!(out, "{t},{},{},{},{}", p[0], p[1], p[2], v.norm());
            if let Some(a) = a {
                let _ = write!(out, ",{}", a.vector().dot(&v));
            }
            out.push('\n');
        }
        out
    }
}

fn check_interior(v: &Vector3<f64>, time: f64, eps: f64) -> Result<()> {
    let r = v.norm();
    if r < 1.0 - eps {
        Ok(())
    } else {
        Err(Error::LeftManifold { time, radius: r })
    }
}

fn rk4_step(
    field: &VectorField,
    t: f64,
    v: &Vector3<f64>,
    h: f64,
    eps: f64,
) -> Result<Vector3<f64>> {
    let eval = |s: f64, p: Vector3<f64>| -> Result<Vector3<f64>> {
        check_interior(&p, s, eps)?;
        field.eval_cartesian(&p)
    };
    let k1 = eval(t, *v)?;
    let k2 = eval(t + 0.5 * h, v + k1 * (0.5 * h))?;
    let k3 = eval(t + 0.5 * h, v + k2 * (0.5 * h))?;
    let k4 = eval(t + h, v + k3 * h)?;
    let next = v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    check_interior(&next, t + h, eps)?;
    Ok(next)
}

/// Fixed-step RK4 from `start` over `[0, t_end]`; returns `steps + 1` points.
pub fn integrate_flow(
    field: &VectorField,
    start: &QubitState,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    integrate_flow_with(field, start, t_end, steps, DEFAULT_EPS_BOUNDARY)
}

pub fn integrate_flow_with(
    field: &VectorField,
    start: &QubitState,
    t_end: f64,
    steps: usize,
    eps_boundary: f64,
) -> Result<Trajectory> {
    if steps == 0 || !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need steps > 0 and t_end > 0, got {steps} and {t_end}"
        )));
    }
    let h = t_end / steps as f64;
    let mut v = start.bloch();
    check_interior(&v, 0.0, eps_boundary)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push([v.x, v.y, v.z]);
    for i in 0..steps {
        v = rk4_step(field, i as f64 * h, &v, h, eps_boundary)?;
        times.push((i + 1) as f64 * h);
        points.push([v.x, v.y, v.z]);
    }
    Ok(Trajectory {
        descriptor: field.descriptor(),
        integrator: Integrator::Rk4 { steps },
        times,
        points,
    })
}

/// RK4 with step-doubling error control; the local error per step is kept
/// below `tolerance` (max norm).
pub fn integrate_flow_adaptive(
    field: &VectorField,
    start: &QubitState,
    t_end: f64,
    tolerance: f64,
    max_steps: usize,
) -> Result<Trajectory> {
    if !(tolerance > 0.0) || !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need tolerance > 0 and t_end > 0, got {tolerance} and {t_end}"
        )));
    }
    let eps = DEFAULT_EPS_BOUNDARY;
    let mut v = start.bloch();
    check_interior(&v, 0.0, eps)?;
    let mut t = 0.0;
    let mut h = t_end / 100.0;
    let mut times = vec![0.0];
    let mut points = vec![[v.x, v.y, v.z]];
    while t < t_end {
        if times.len() > max_steps {
            return Err(Error::IllConditioned(h));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let full = rk4_step(field, t, &v, h, eps);
        let half = rk4_step(field, t, &v, 0.5 * h, eps)
            .and_then(|m| rk4_step(field, t + 0.5 * h, &m, 0.5 * h, eps));
        let (full, half) = match (full, half) {
            (Ok(f), Ok(s)) => (f, s),
            _ if h > 1e-12 => {
                h *= 0.5;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let err = (half - full).amax() / 15.0;
        if err <= tolerance {
            t = if last { t_end } else { t + h };
            v = half + (half - full) / 15.0;
            check_interior(&v, t, eps)?;
            times.push(t);
            points.push([v.x, v.y, v.z]);
        }
        let factor = if err == 0.0 {
            2.0
        } else {
            (0.9 * (tolerance / err).powf(0.2)).clamp(0.2, 2.0)
        };
        h *= factor;
    }
    Ok(Trajectory {
        descriptor: field.descriptor(),
        integrator: Integrator::Rk4Adaptive {
            tolerance,
            max_steps,
        },
        times,
        points,
    })
}

/// `t -> action(element(t a, t b), start)` on `samples + 1` uniform times.
pub fn orbit_curve<G: GroupAction>(
    action: &G,
    generator: (&TracelessObservable, &TracelessObservable),
    start: &QubitState,
    t_end: f64,
    samples: usize,
) -> Result<Trajectory> {
    if samples == 0 || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need samples > 0 and finite t_end, got {samples} and {t_end}"
        )));
    }
    let (a, b) = generator;
    let mut times = Vec::with_capacity(samples + 1);
    let mut points = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let t = t_end * i as f64 / samples as f64;
        let g = action.element_from_generators(&a.scale(t), &b.scale(t));
        let v = action.act(&g, start)?.bloch();
        times.push(t);
        points.push([v.x, v.y, v.z]);
    }
    Ok(Trajectory {
        descriptor: format!(
            "{} orbit of (a={:?}, b={:?})",
            action.name(),
            a.coefficients(),
            b.coefficients()
        ),
        integrator: Integrator::Orbit { samples },
        times,
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowOrbitComparison {
    pub scale: f64,
    pub flow: Trajectory,
    pub orbit: Trajectory,
    pub gaps: Vec<f64>,
    pub max_deviation: f64,
}

/// Integrates `field` and evaluates the orbit at times `scale * t` on the same
/// grid; deviations are Euclidean distances in the Bloch ball.
#[allow(clippy::too_many_arguments)]
pub fn compare_flow_to_orbit<G: GroupAction>(
    field: &VectorField,
    action: &G,
    generator: (&TracelessObservable, &TracelessObservable),
    start: &QubitState,
    t_end: f64,
    steps: usize,
    scale: f64,
) -> Result<FlowOrbitComparison> {
    let flow = integrate_flow(field, start, t_end, steps)?;
    let mut orbit = orbit_curve(action, generator, start, scale * t_end, steps)?;
    orbit.times.clone_from(&flow.times);
    let gaps: Vec<f64> = (0..flow.len())
        .map(|i| (flow.point(i) - orbit.point(i)).norm())
        .collect();
    let max_deviation = gaps.iter().copied().fold(0.0, f64::max);
    Ok(FlowOrbitComparison {
        scale,
        flow,
        orbit,
        gaps,
        max_deviation,
    })
}

/// Ratio of flow-vs-orbit deviations at `steps` and `2 * steps`.
pub fn rk4_order_ratio<G: GroupAction>(
    field: &VectorField,
    action: &G,
    generator: (&TracelessObservable, &TracelessObservable),
    start: &QubitState,
    t_end: f64,
    steps: usize,
) -> Result<f64> {
    let coarse = compare_flow_to_orbit(field, action, generator, start, t_end, steps, 1.0)?;
    let fine = compare_flow_to_orbit(field, action, generator, start, t_end, 2 * steps, 1.0)?;
    Ok(coarse.max_deviation / fine.max_deviation)
}
