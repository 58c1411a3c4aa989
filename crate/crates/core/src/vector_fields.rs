//! Fundamental and gradient vector fields on the Bloch ball, and numerical
//! Lie brackets.
//!
//! Every field has a Cartesian evaluator, which is what brackets and flows
//! use. Fundamental and gradient fields also have spherical evaluators that
//! transcribe the coordinate formulas directly.
//!
//! In Cartesian Bloch coordinates `X_b(v) = b x v` and
//! `Y_a(v) = G_f(v)^-1 a = (1 - r^2)(a.n) n + r g(r) (a - (a.n) n)`.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric_family::{
    big_f, g_from_f, inverse_metric, metric_cartesian, metric_spherical, radial_tangential_factor,
    Chart, MonotoneFunctionSpec,
};
use crate::state_space::{
    spherical_from_cartesian, su2_bracket, SphericalPoint, TracelessObservable,
    DEFAULT_EPS_BOUNDARY,
};

/// Default finite-difference step for brackets.
pub const DEFAULT_BRACKET_STEP: f64 = 1e-4;

/// A tangent vector with the chart its components refer to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentVector {
    pub chart: Chart,
    #[serde(serialize_with = "crate::serde_helpers::vector3")]
    pub components: Vector3<f64>,
    /// Base point in the same chart.
    pub base: [f64; 3],
}

/// Jacobian of `(r, theta, phi) -> (x, y, z)`.
pub fn spherical_jacobian(p: &SphericalPoint) -> Matrix3<f64> {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let r = p.r;
    Matrix3::new(
        st * cp,
        r * ct * cp,
        -r * st * sp,
        st * sp,
        r * ct * sp,
        r * st * cp,
        ct,
        -r * st,
        0.0,
    )
}

impl TangentVector {
    pub fn cartesian(base: Vector3<f64>, components: Vector3<f64>) -> Self {
        Self {
            chart: Chart::Cartesian,
            components,
            base: [base.x, base.y, base.z],
        }
    }

    pub fn spherical(base: &SphericalPoint, components: Vector3<f64>) -> Self {
        Self {
            chart: Chart::Spherical,
            components,
            base: [base.r, base.theta, base.phi],
        }
    }

    pub fn to_cartesian(&self) -> Result<TangentVector> {
        match self.chart {
            Chart::Cartesian => Ok(*self),
            Chart::Spherical => {
                let p = SphericalPoint::new(self.base[0], self.base[1], self.base[2])?;
                Ok(Self::cartesian(
                    p.to_cartesian(),
                    spherical_jacobian(&p) * self.components,
                ))
            }
        }
    }

    pub fn to_spherical(&self) -> Result<TangentVector> {
        match self.chart {
            Chart::Spherical => Ok(*self),
            Chart::Cartesian => {
                let p = spherical_from_cartesian(self.base[0], self.base[1], self.base[2])?;
                let (st, ct) = p.theta.sin_cos();
                let (sp, cp) = p.phi.sin_cos();
                let v = self.components;
                let n = Vector3::new(st * cp, st * sp, ct);
                let e_theta = Vector3::new(ct * cp, ct * sp, -st);
                let e_phi = Vector3::new(-sp, cp, 0.0);
                let comps =
                    Vector3::new(n.dot(&v), e_theta.dot(&v) / p.r, e_phi.dot(&v) / (p.r * st));
                Ok(Self::spherical(&p, comps))
            }
        }
    }
}

type CustomEval = Arc<dyn Fn(&Vector3<f64>) -> Result<Vector3<f64>> + Send + Sync>;

#[derive(Clone)]
enum FieldKind {
    Fundamental(TracelessObservable),
    Gradient {
        a: TracelessObservable,
        spec: MonotoneFunctionSpec,
    },
    GradientFromMetric {
        a: TracelessObservable,
        spec: MonotoneFunctionSpec,
    },
    Custom {
        name: String,
        eval: CustomEval,
    },
}

/// A vector field on the open Bloch ball, possibly multiplied by a constant.
#[derive(Clone)]
pub struct VectorField {
    kind: FieldKind,
    scale: f64,
    rescaled: bool,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// `b1 X1 + b2 X2 + b3 X3`, the generator of `rho -> U rho U^dag` with `U = exp(t b / 2i)`.
pub fn fundamental_field(b: TracelessObservable) -> VectorField {
    VectorField {
        kind: FieldKind::Fundamental(b),
        scale: 1.0,
        rescaled: false,
    }
}

/// Gradient of `l_a` for the metric of `spec`, from the closed-form expressions.
pub fn gradient_field_closed(a: TracelessObservable, spec: MonotoneFunctionSpec) -> VectorField {
    VectorField {
        kind: FieldKind::Gradient { a, spec },
        scale: 1.0,
        rescaled: false,
    }
}

/// Gradient of `l_a` obtained by raising `dl_a` with the inverse metric.
pub fn gradient_field_from_metric(
    a: TracelessObservable,
    spec: MonotoneFunctionSpec,
) -> VectorField {
    VectorField {
        kind: FieldKind::GradientFromMetric { a, spec },
        scale: 1.0,
        rescaled: false,
    }
}

/// `(1 / sqrt A)` times the gradient of `l_a` for `f_A`.
pub fn rescaled_gradient_field(a: TracelessObservable, big_a: f64) -> Result<VectorField> {
    if !(big_a > 0.0) {
        return Err(Error::InvalidParameter(format!("need A > 0, got {big_a}")));
    }
    Ok(VectorField {
        kind: FieldKind::Gradient {
            a,
            spec: MonotoneFunctionSpec::FamilyA(big_a),
        },
        scale: 1.0 / big_a.sqrt(),
        rescaled: true,
    })
}

/// Gradient field of the BKM metric; its flow is the `T*SU(2)` translation orbit.
pub fn bkm_gradient_field(a: TracelessObservable) -> VectorField {
    gradient_field_closed(a, MonotoneFunctionSpec::Bkm)
}

impl VectorField {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&Vector3<f64>) -> Result<Vector3<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: FieldKind::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
            scale: 1.0,
            rescaled: false,
        }
    }

    pub fn zero() -> Self {
        Self::custom("zero", |_| Ok(Vector3::zeros()))
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.scale *= k;
        out
    }

    pub fn descriptor(&self) -> String {
        let fmt_a = |a: &TracelessObservable| {
            let [x, y, z] = a.coefficients();
            format!("[{x},{y},{z}]")
        };
        let body = match &self.kind {
            FieldKind::Fundamental(b) => format!("X{}", fmt_a(b)),
            FieldKind::Gradient { a, spec } if self.rescaled => {
                format!("Y^A{}[{}]", fmt_a(a), spec.name())
            }
            FieldKind::Gradient { a, spec } => format!("Y{}[{}]", fmt_a(a), spec.name()),
            FieldKind::GradientFromMetric { a, spec } => {
                format!("G^-1 dl{}[{}]", fmt_a(a), spec.name())
            }
            FieldKind::Custom { name, .. } => name.clone(),
        };
        if self.scale == 1.0 || self.rescaled && self.scale_is_rescale() {
            body
        } else {
            format!("{}*{}", self.scale, body)
        }
    }

    fn scale_is_rescale(&self) -> bool {
        match &self.kind {
            FieldKind::Gradient {
                spec: MonotoneFunctionSpec::FamilyA(a),
                ..
            } => self.scale == 1.0 / a.sqrt(),
            _ => false,
        }
    }

    /// Cartesian components at the Bloch point `v`.
    pub fn eval_cartesian(&self, v: &Vector3<f64>) -> Result<Vector3<f64>> {
        let r = v.norm();
        if !(r < 1.0) {
            return Err(Error::BoundaryViolation {
                radius: r,
                margin: 0.0,
            });
        }
        let raw = match &self.kind {
            FieldKind::Fundamental(b) => b.vector().cross(v),
            FieldKind::Gradient { a, spec } => gradient_cartesian(&a.vector(), spec, v)?,
            FieldKind::GradientFromMetric { a, spec } => {
                let g = metric_cartesian(spec, v)?;
                inverse_metric(&g)?.components * a.vector()
            }
            FieldKind::Custom { eval, .. } => eval(v)?,
        };
        Ok(raw * self.scale)
    }

    /// Components in the spherical chart, from the coordinate formulas.
    pub fn eval_spherical(&self, p: &SphericalPoint) -> Result<Vector3<f64>> {
        let raw = match &self.kind {
            FieldKind::Fundamental(b) => fundamental_spherical(b, p),
            FieldKind::Gradient { a, spec } => gradient_spherical(a, spec, p)?,
            FieldKind::GradientFromMetric { a, spec } => {
                let inv = inverse_metric(&metric_spherical(spec, p)?)?;
                inv.components * dl_spherical(a, p)
            }
            FieldKind::Custom { .. } => {
                let c = self.eval_cartesian(&p.to_cartesian())? / self.scale;
                TangentVector::cartesian(p.to_cartesian(), c)
                    .to_spherical()?
                    .components
            }
        };
        Ok(raw * self.scale)
    }

    pub fn at_cartesian(&self, v: &Vector3<f64>) -> Result<TangentVector> {
        Ok(TangentVector::cartesian(*v, self.eval_cartesian(v)?))
    }

    pub fn at_spherical(&self, p: &SphericalPoint) -> Result<TangentVector> {
        Ok(TangentVector::spherical(p, self.eval_spherical(p)?))
    }
}

fn gradient_cartesian(
    a: &Vector3<f64>,
    spec: &MonotoneFunctionSpec,
    v: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    let r = v.norm();
    let rg = radial_tangential_factor(spec, r)?;
    if r == 0.0 {
        return Ok(a * rg);
    }
    let radial = (1.0 - r * r) - rg;
    Ok(a * rg + v * (radial * a.dot(v) / (r * r)))
}

fn fundamental_spherical(b: &TracelessObservable, p: &SphericalPoint) -> Vector3<f64> {
    let [b1, b2, b3] = b.coefficients();
    let (sp, cp) = p.phi.sin_cos();
    let cot = p.theta.cos() / p.theta.sin();
    let x1 = Vector3::new(0.0, -sp, -cot * cp);
    let x2 = Vector3::new(0.0, cp, -cot * sp);
    let x3 = Vector3::new(0.0, 0.0, 1.0);
    x1 * b1 + x2 * b2 + x3 * b3
}

fn gradient_spherical(
    a: &TracelessObservable,
    spec: &MonotoneFunctionSpec,
    p: &SphericalPoint,
) -> Result<Vector3<f64>> {
    let [a1, a2, a3] = a.coefficients();
    let g = g_from_f(spec, p.r)?;
    let w = 1.0 - p.r * p.r;
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let y1 = Vector3::new(w * st * cp, g * ct * cp, -g * sp / st);
    let y2 = Vector3::new(w * st * sp, g * ct * sp, g * cp / st);
    let y3 = Vector3::new(w * ct, -g * st, 0.0);
    Ok(y1 * a1 + y2 * a2 + y3 * a3)
}

/// `(d_r l_a, d_theta l_a, d_phi l_a)` for `l_a = r (a1 st cp + a2 st sp + a3 ct)`.
fn dl_spherical(a: &TracelessObservable, p: &SphericalPoint) -> Vector3<f64> {
    let [a1, a2, a3] = a.coefficients();
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    Vector3::new(
        a1 * st * cp + a2 * st * sp + a3 * ct,
        p.r * (a1 * ct * cp + a2 * ct * sp - a3 * st),
        p.r * st * (-a1 * sp + a2 * cp),
    )
}

/// `[V, W] = DW.V - DV.W` at `p`, Cartesian chart.
///
/// Directional derivatives are central differences along `V(p)` and `W(p)`
/// with steps `h` and `h/2`, combined by Richardson extrapolation.
pub fn lie_bracket_numeric(
    v: &VectorField,
    w: &VectorField,
    p: &Vector3<f64>,
    h: f64,
) -> Result<TangentVector> {
    let vp = v.eval_cartesian(p)?;
    let wp = w.eval_cartesian(p)?;
    let reach = 2.0 * h * vp.norm().max(wp.norm());
    let radius = p.norm();
    if radius + reach >= 1.0 - DEFAULT_EPS_BOUNDARY {
        return Err(Error::NeighborhoodOutsideBall { radius, reach });
    }
    let directional = |field: &VectorField, dir: &Vector3<f64>| -> Result<Vector3<f64>> {
        let cd = |s: f64| -> Result<Vector3<f64>> {
            Ok(
                (field.eval_cartesian(&(p + dir * s))? - field.eval_cartesian(&(p - dir * s))?)
                    / (2.0 * s),
            )
        };
        let coarse = cd(h)?;
        let fine = cd(0.5 * h)?;
        Ok((fine * 4.0 - coarse) / 3.0)
    };
    let bracket = directional(w, &vp)? - directional(v, &wp)?;
    Ok(TangentVector::cartesian(*p, bracket))
}

/// Errors at one sample point of [`verify_commutator_relations`].
#[derive(Debug, Clone, Serialize)]
pub struct PointErrors {
    pub point: [f64; 3],
    pub big_f: f64,
    /// `max |[Y_i, Y_j] - F(r) X_k|` over cyclic `(i, j, k)`.
    pub error_vs_f: f64,
    /// `max |[Y_i, Y_j] - A X_k|` with `A` the mean of `F` over the points.
    pub error_vs_constant: f64,
    /// `max |[X_i, Y_j] - s Y_[e_i, e_j]|` with `s` the convention sign.
    pub closure_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub spec: String,
    pub h: f64,
    pub points: usize,
    pub per_point: Vec<PointErrors>,
    pub constant: f64,
    pub max_error: f64,
    pub max_error_constant: f64,
    pub max_closure_error: f64,
    /// Sign `s` in `[X_1, X_2] = s X_3` as measured.
    pub convention_sign: f64,
}

/// Measures `s` in `[X_1, X_2] = s X_3` at `p`.
pub fn measure_convention_sign(p: &Vector3<f64>, h: f64) -> Result<f64> {
    let x = |k| fundamental_field(TracelessObservable::basis(k));
    let br = lie_bracket_numeric(&x(1), &x(2), p, h)?.components;
    let x3 = x(3).eval_cartesian(p)?;
    Ok(br.dot(&x3).signum())
}

/// Checks `[Y_i, Y_j] = F(r) X_k` and the closure `[X_i, Y_j] in span{Y}` at
/// each point, plus the stronger statement with a single constant in place of `F(r)`.
pub fn verify_commutator_relations(
    spec: &MonotoneFunctionSpec,
    points: &[Vector3<f64>],
    h: f64,
) -> Result<CommutatorReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let sign = measure_convention_sign(&points[0], h)?;
    let basis = |k| TracelessObservable::basis(k);
    let ys: Vec<VectorField> = (1..=3)
        .map(|k| gradient_field_closed(basis(k), spec.clone()))
        .collect();
    let xs: Vec<VectorField> = (1..=3).map(|k| fundamental_field(basis(k))).collect();
    let cyclic = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

    struct Raw {
        p: Vector3<f64>,
        f: f64,
        brackets: [Vector3<f64>; 3],
        xk: [Vector3<f64>; 3],
        closure: f64,
    }
    let raws = points
        .iter()
        .map(|p| {
            let f = big_f(spec, p.norm())?;
            let mut brackets = [Vector3::zeros(); 3];
            let mut xk = [Vector3::zeros(); 3];
            for (slot, &(i, j, k)) in cyclic.iter().enumerate() {
                brackets[slot] = lie_bracket_numeric(&ys[i], &ys[j], p, h)?.components;
                xk[slot] = xs[k].eval_cartesian(p)?;
            }
            let mut closure: f64 = 0.0;
            for i in 1..=3 {
                for j in 1..=3 {
                    let br = lie_bracket_numeric(&xs[i - 1], &ys[j - 1], p, h)?.components;
                    let target = su2_bracket(&basis(i), &basis(j));
                    let expect =
                        gradient_field_closed(target, spec.clone()).eval_cartesian(p)? * sign;
                    closure = closure.max((br - expect).amax());
                }
            }
            Ok(Raw {
                p: *p,
                f,
                brackets,
                xk,
                closure,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let constant = raws.iter().map(|r| r.f).sum::<f64>() / raws.len() as f64;
    let per_point: Vec<PointErrors> = raws
        .iter()
        .map(|raw| {
            let mut vs_f: f64 = 0.0;
            let mut vs_c: f64 = 0.0;
            for s in 0..3 {
                vs_f = vs_f.max((raw.brackets[s] - raw.xk[s] * raw.f).amax());
                vs_c = vs_c.max((raw.brackets[s] - raw.xk[s] * constant).amax());
            }
            PointErrors {
                point: [raw.p.x, raw.p.y, raw.p.z],
                big_f: raw.f,
                error_vs_f: vs_f,
                error_vs_constant: vs_c,
                closure_error: raw.closure,
            }
        })
        .collect();
    let max = |sel: fn(&PointErrors) -> f64| per_point.iter().map(sel).fold(0.0, f64::max);
    Ok(CommutatorReport {
        spec: spec.name(),
        h,
        points: points.len(),
        max_error: max(|e| e.error_vs_f),
        max_error_constant: max(|e| e.error_vs_constant),
        max_closure_error: max(|e| e.closure_error),
        per_point,
        constant,
        convention_sign: sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn sp(r: f64, t: f64, p: f64) -> SphericalPoint {
        SphericalPoint::new(r, t, p).unwrap()
    }

    #[test]
    fn fundamental_spherical_examples() {
        let x3 = fundamental_field(TracelessObservable::basis(3));
        assert_eq!(
            x3.eval_spherical(&sp(0.4, 1.0, 2.0)).unwrap(),
            Vector3::new(0.0, 0.0, 1.0)
        );
        let x1 = fundamental_field(TracelessObservable::basis(1));
        let v = x1.eval_spherical(&sp(0.4, FRAC_PI_2, 0.0)).unwrap();
        assert!(v.norm() < 1e-16);
        let b = fundamental_field(TracelessObservable::new(0.3, -1.0, 2.0));
        assert_eq!(b.eval_spherical(&sp(0.7, 0.4, 5.0)).unwrap()[0], 0.0);
    }

    #[test]
    fn fundamental_charts_agree() {
        let b = fundamental_field(TracelessObservable::new(0.3, -1.0, 2.0));
        let p = sp(0.6, 1.2, 0.8);
        let from_sph = b.at_spherical(&p).unwrap().to_cartesian().unwrap();
        let cart = b.eval_cartesian(&p.to_cartesian()).unwrap();
        assert!((from_sph.components - cart).norm() < 1e-14);
    }

    #[test]
    fn gradient_spherical_examples() {
        let bh = MonotoneFunctionSpec::BuresHelstrom;
        let y3 = gradient_field_closed(TracelessObservable::basis(3), bh.clone());
        let v = y3.eval_spherical(&sp(0.5, FRAC_PI_2, 1.0)).unwrap();
        assert!(v[0].abs() < 1e-16);
        assert!((v[1] + 2.0).abs() < 1e-14);
        let v = y3.eval_spherical(&sp(0.5, FRAC_PI_4, 0.0)).unwrap();
        assert!((v[0] - 0.75 * FRAC_PI_4.cos()).abs() < 1e-14);
        assert!((v[1] + 2.0 * FRAC_PI_4.sin()).abs() < 1e-14);
        let y1 = gradient_field_closed(TracelessObservable::basis(1), bh.clone());
        let v = y1.eval_spherical(&sp(0.5, FRAC_PI_2, FRAC_PI_2)).unwrap();
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        assert!((v[2] + 2.0).abs() < 1e-14);
        let m = gradient_field_from_metric(TracelessObservable::basis(3), bh)
            .eval_spherical(&sp(0.5, FRAC_PI_4, 0.0))
            .unwrap();
        assert!((m - y3.eval_spherical(&sp(0.5, FRAC_PI_4, 0.0)).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn zero_observable_gives_zero_field() {
        for spec in [MonotoneFunctionSpec::Bkm, MonotoneFunctionSpec::Rld] {
            let f = gradient_field_from_metric(TracelessObservable::zero(), spec);
            assert_eq!(
                f.eval_spherical(&sp(0.3, 1.0, 1.0)).unwrap(),
                Vector3::zeros()
            );
        }
        let r = rescaled_gradient_field(TracelessObservable::zero(), 2.0).unwrap();
        assert_eq!(
            r.eval_cartesian(&Vector3::new(0.1, 0.2, 0.3)).unwrap(),
            Vector3::zeros()
        );
    }

    #[test]
    fn rescaled_fields() {
        let a = TracelessObservable::new(0.2, 0.5, -0.4);
        let p = Vector3::new(0.3, -0.2, 0.5);
        let r1 = rescaled_gradient_field(a, 1.0)
            .unwrap()
            .eval_cartesian(&p)
            .unwrap();
        let bh = gradient_field_closed(a, MonotoneFunctionSpec::BuresHelstrom)
            .eval_cartesian(&p)
            .unwrap();
        assert!((r1 - bh).norm() < 1e-14);
        let r4 = rescaled_gradient_field(a, 4.0)
            .unwrap()
            .eval_cartesian(&p)
            .unwrap();
        let g4 = gradient_field_closed(a, MonotoneFunctionSpec::FamilyA(4.0))
            .eval_cartesian(&p)
            .unwrap();
        assert!((r4 - g4 * 0.5).norm() < 1e-15);
        assert!(rescaled_gradient_field(a, 0.0).is_err());
    }

    #[test]
    fn bh_gradient_is_a_minus_projection() {
        let a = Vector3::new(0.2, 0.5, -0.4);
        let p = Vector3::new(0.3, -0.2, 0.5);
        let y = gradient_field_closed(
            TracelessObservable::from_vector(a),
            MonotoneFunctionSpec::BuresHelstrom,
        )
        .eval_cartesian(&p)
        .unwrap();
        assert!((y - (a - p * a.dot(&p))).norm() < 1e-15);
    }

    #[test]
    fn gradient_continuous_at_center() {
        let a = TracelessObservable::new(0.2, 0.5, -0.4);
        for spec in [
            MonotoneFunctionSpec::Bkm,
            MonotoneFunctionSpec::WignerYanase,
            MonotoneFunctionSpec::Rld,
        ] {
            let y = gradient_field_closed(a, spec);
            let dir = Vector3::new(1.0, 2.0, -1.0).normalize();
            let y1 = y.eval_cartesian(&(dir * 1e-4)).unwrap();
            let y2 = y.eval_cartesian(&(dir * 1e-5)).unwrap();
            assert!((y1 - y2).norm() < 1e-3);
            assert!((y.eval_cartesian(&Vector3::zeros()).unwrap() - a.vector()).norm() < 1e-15);
        }
    }

    #[test]
    fn bracket_sanity() {
        let v = gradient_field_closed(
            TracelessObservable::new(1.0, 0.0, 0.5),
            MonotoneFunctionSpec::Rld,
        );
        let w = fundamental_field(TracelessObservable::new(0.0, 1.0, 0.0));
        let p = Vector3::new(0.2, 0.3, -0.1);
        assert!(
            lie_bracket_numeric(&v, &v, &p, 1e-4)
                .unwrap()
                .components
                .norm()
                < 1e-9
        );
        let b1 = lie_bracket_numeric(&v.scaled(2.0), &w, &p, 1e-4)
            .unwrap()
            .components;
        let b2 = lie_bracket_numeric(&v, &w, &p, 1e-4).unwrap().components * 2.0;
        assert!((b1 - b2).norm() < 1e-9);
        let edge = Vector3::new(0.0, 0.0, 1.0 - 1e-6);
        assert!(matches!(
            lie_bracket_numeric(&v, &w, &edge, 1e-4),
            Err(Error::NeighborhoodOutsideBall { .. })
        ));
    }

    #[test]
    fn fundamental_bracket_sign_is_negative() {
        let s = measure_convention_sign(&Vector3::new(0.3, 0.1, -0.2), 1e-4).unwrap();
        assert_eq!(s, -1.0);
    }

    #[test]
    fn commutators_bh_and_rld() {
        let pts: Vec<Vector3<f64>> = (0..5)
            .map(|k| {
                let t = 0.3 + 0.4 * k as f64;
                sp(0.15 + 0.15 * k as f64, t, 1.0 + k as f64).to_cartesian()
            })
            .collect();
        let bh =
            verify_commutator_relations(&MonotoneFunctionSpec::BuresHelstrom, &pts, 1e-4).unwrap();
        assert!(bh.max_error_constant < 1e-6, "{bh:?}");
        assert!(bh.max_closure_error < 1e-6);
        assert!((bh.constant - 1.0).abs() < 1e-12);
        let rld = verify_commutator_relations(&MonotoneFunctionSpec::Rld, &pts, 1e-4).unwrap();
        assert!(rld.max_error < 1e-6);
        assert!(rld.max_error_constant > 1e-2);
    }

    #[test]
    fn spherical_roundtrip_of_tangent_vectors() {
        let p = sp(0.45, 2.0, PI + 0.3);
        let t = TangentVector::spherical(&p, Vector3::new(0.1, -0.7, 0.3));
        let back = t.to_cartesian().unwrap().to_spherical().unwrap();
        assert!((back.components - t.components).norm() < 1e-12);
    }
}
