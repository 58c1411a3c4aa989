//! Faithful qubit states, Pauli algebra and the two Bloch-ball charts.
//!
//! A state is stored twice: as a 2x2 density matrix and as its Bloch vector
//! `(x, y, z)` with `rho = (s0 + x s1 + y s2 + z s3) / 2`. Faithful states are
//! the open unit ball; a configurable margin keeps points away from the sphere.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default distance kept from the unit sphere.
pub const DEFAULT_EPS_BOUNDARY: f64 = 1e-9;
/// Default guard for the spherical chart (center and polar axis).
pub const DEFAULT_EPS_CHART: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-14;
const TRACE_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2x2 self-adjoint matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2(Matrix2<Complex64>);

impl HermitianMatrix2 {
    /// Accepts `m` if it equals its conjugate transpose entrywise to 1e-14.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let dev = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL * (1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            return Err(Error::NotAState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        Ok(Self::symmetrized(m))
    }

    /// Projects an almost-Hermitian matrix onto its Hermitian part.
    pub(crate) fn symmetrized(m: Matrix2<Complex64>) -> Self {
        Self((m + m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `c0 s0 + c1 s1 + c2 s2 + c3 s3`.
    pub fn from_pauli(c0: f64, c: Vector3<f64>) -> Self {
        let [s0, s1, s2, s3] = pauli_basis();
        Self(s0.0 * re(c0) + s1.0 * re(c.x) + s2.0 * re(c.y) + s3.0 * re(c.z))
    }

    /// Coefficients `(c0, c)` in the Pauli basis, `c_k = Tr(m s_k) / 2`.
    pub fn pauli_coefficients(&self) -> (f64, Vector3<f64>) {
        let m = &self.0;
        let c0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
        let c1 = 0.5 * (m[(0, 1)].re + m[(1, 0)].re);
        // Tr(m s2) = i m01 - i m10
        let c2 = 0.5 * (m[(1, 0)].im - m[(0, 1)].im);
        let c3 = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
        (c0, Vector3::new(c1, c2, c3))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0[(0, 0)].re + self.0[(1, 1)].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (c0, c) = self.pauli_coefficients();
        let n = c.norm();
        [c0 - n, c0 + n]
    }
}

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Identity and the three Pauli matrices in the basis `{|1>, |2>}`.
///
/// `s2` has `-i` in row 1, column 2, so that `[s1, s2] = s3` under the
/// bracket `(ab - ba) / 2i` and `U = exp(b / 2i)` rotates the Bloch vector
/// about `b` in the right-handed sense.
pub fn pauli_basis() -> [HermitianMatrix2; 4] {
    [
        HermitianMatrix2(Matrix2::new(ONE, ZERO, ZERO, ONE)),
        HermitianMatrix2(Matrix2::new(ZERO, ONE, ONE, ZERO)),
        HermitianMatrix2(Matrix2::new(ZERO, -I, I, ZERO)),
        HermitianMatrix2(Matrix2::new(ONE, ZERO, ZERO, -ONE)),
    ]
}

/// Traceless observable `a1 s1 + a2 s2 + a3 s3`, an element of su(2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracelessObservable {
    pauli: [f64; 3],
}

impl TracelessObservable {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self {
            pauli: [a1, a2, a3],
        }
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Basis element `s_k`, `k` in 1..=3.
    pub fn basis(k: usize) -> Self {
        let mut p = [0.0; 3];
        p[k - 1] = 1.0;
        Self { pauli: p }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.pauli
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.pauli)
    }

    pub fn to_matrix(&self) -> HermitianMatrix2 {
        HermitianMatrix2::from_pauli(0.0, self.vector())
    }

    /// Traceless part of a Hermitian matrix.
    pub fn from_matrix(m: &HermitianMatrix2) -> Self {
        Self::from_vector(m.pauli_coefficients().1)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_vector(self.vector() * s)
    }
}

/// The su(2) bracket `[a, b] = (ab - ba) / 2i`, returned in Pauli coefficients.
pub fn su2_bracket(a: &TracelessObservable, b: &TracelessObservable) -> TracelessObservable {
    let am = a.to_matrix().0;
    let bm = b.to_matrix().0;
    let c = (am * bm - bm * am) / Complex64::new(0.0, 2.0);
    TracelessObservable::from_vector(HermitianMatrix2::symmetrized(c).pauli_coefficients().1)
}

/// A faithful qubit density matrix together with its Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlochJson", into = "BlochJson")]
pub struct QubitState {
    bloch: Vector3<f64>,
    matrix: HermitianMatrix2,
}

#[derive(Serialize, Deserialize)]
struct BlochJson {
    bloch: [f64; 3],
}

impl TryFrom<BlochJson> for QubitState {
    type Error = Error;
    fn try_from(j: BlochJson) -> Result<Self> {
        state_from_bloch(j.bloch[0], j.bloch[1], j.bloch[2])
    }
}

impl From<QubitState> for BlochJson {
    fn from(s: QubitState) -> Self {
        BlochJson {
            bloch: [s.bloch.x, s.bloch.y, s.bloch.z],
        }
    }
}

impl QubitState {
    /// Builds a state from a Bloch vector with an explicit boundary margin.
    pub fn from_bloch(v: Vector3<f64>, eps_boundary: f64) -> Result<Self> {
        let r = v.norm();
        if !r.is_finite() || r >= 1.0 - eps_boundary {
            return Err(Error::BoundaryViolation {
                radius: r,
                margin: eps_boundary,
            });
        }
        let matrix = HermitianMatrix2::from_pauli(0.5, v * 0.5);
        Ok(Self { bloch: v, matrix })
    }

    /// Reads a density matrix, rejecting non-unit trace or eigenvalues `<= eps_boundary`.
    pub fn from_matrix(m: &HermitianMatrix2, eps_boundary: f64) -> Result<Self> {
        let tr = m.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotAState(format!("trace {tr} != 1")));
        }
        let [lo, _] = m.eigenvalues();
        if lo <= eps_boundary {
            return Err(Error::NotAState(format!("eigenvalue {lo} is not positive")));
        }
        let (_, c) = m.pauli_coefficients();
        Self::from_bloch(c * 2.0, 0.0)
    }

    /// Normalizes a positive definite matrix to unit trace and reads it as a state.
    pub(crate) fn from_positive(m: &HermitianMatrix2, eps_boundary: f64) -> Result<Self> {
        let tr = m.trace();
        if !(tr > 1e-300) || !tr.is_finite() {
            return Err(Error::NumericalUnderflow(tr));
        }
        let (c0, c) = m.pauli_coefficients();
        Self::from_bloch(c / c0, eps_boundary)
    }

    pub fn bloch(&self) -> Vector3<f64> {
        self.bloch
    }

    pub fn matrix(&self) -> &HermitianMatrix2 {
        &self.matrix
    }

    pub fn radius(&self) -> f64 {
        self.bloch.norm()
    }

    /// `Tr(rho a)` computed on the matrix side.
    pub fn expectation(&self, a: &TracelessObservable) -> f64 {
        (self.matrix.0 * a.to_matrix().0).trace().re
    }
}

/// State with Bloch vector `(x, y, z)` and the default boundary margin.
pub fn state_from_bloch(x: f64, y: f64, z: f64) -> Result<QubitState> {
    QubitState::from_bloch(Vector3::new(x, y, z), DEFAULT_EPS_BOUNDARY)
}

/// Bloch vector of a density matrix, `x_k = Tr(m s_k)`.
pub fn bloch_from_state(m: &HermitianMatrix2) -> Result<QubitState> {
    QubitState::from_matrix(m, DEFAULT_EPS_BOUNDARY)
}

/// Point of the spherical chart `(r, theta, phi)` on the punctured ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    /// Validates `0 < r < 1`, `0 < theta < pi`, and wraps `phi` into `[0, 2 pi)`.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(if r >= 1.0 {
                Error::BoundaryViolation {
                    radius: r,
                    margin: 0.0,
                }
            } else {
                Error::ChartSingularity {
                    r,
                    cos_theta: theta.cos(),
                }
            });
        }
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::ChartSingularity {
                r,
                cos_theta: theta.cos(),
            });
        }
        Ok(Self {
            r,
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn to_cartesian(&self) -> Vector3<f64> {
        cartesian_from_spherical(self)
    }
}

pub fn spherical_from_cartesian(x: f64, y: f64, z: f64) -> Result<SphericalPoint> {
    spherical_from_cartesian_with(Vector3::new(x, y, z), DEFAULT_EPS_CHART)
}

/// Spherical coordinates of an interior point away from the center and the polar axis.
pub fn spherical_from_cartesian_with(v: Vector3<f64>, eps_chart: f64) -> Result<SphericalPoint> {
    let r = v.norm();
    if r >= 1.0 {
        return Err(Error::BoundaryViolation {
            radius: r,
            margin: 0.0,
        });
    }
    if r <= eps_chart || (v.z / r).abs() >= 1.0 - eps_chart {
        return Err(Error::ChartSingularity {
            r,
            cos_theta: if r > 0.0 { v.z / r } else { 1.0 },
        });
    }
    let theta = v.xy().norm().atan2(v.z);
    let phi = v.y.atan2(v.x).rem_euclid(2.0 * PI);
    Ok(SphericalPoint { r, theta, phi })
}

pub fn cartesian_from_spherical(p: &SphericalPoint) -> Vector3<f64> {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    Vector3::new(p.r * st * cp, p.r * st * sp, p.r * ct)
}

/// `l_a(rho) = Tr(rho a)` written in spherical coordinates.
pub fn expectation_value(a: &TracelessObservable, p: &SphericalPoint) -> f64 {
    let [a1, a2, a3] = a.coefficients();
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    a1 * p.r * st * cp + a2 * p.r * st * sp + a3 * p.r * ct
}

/// `l_a` at a Cartesian Bloch point: `a . v`.
pub fn expectation_value_cartesian(a: &TracelessObservable, v: &Vector3<f64>) -> f64 {
    a.vector().dot(v)
}

/// Row-major `[[re, im], ...]` form of a complex 2x2 matrix.
pub fn complex_matrix_to_json(m: &Matrix2<Complex64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn complex_matrix_from_json(entries: &[[f64; 2]]) -> Result<Matrix2<Complex64>> {
    if entries.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "expected 4 complex entries, got {}",
            entries.len()
        )));
    }
    let c = |k: usize| Complex64::new(entries[k][0], entries[k][1]);
    Ok(Matrix2::new(c(0), c(1), c(2), c(3)))
}
