//! Spectral calculus on 2x2 Hermitian matrices and the explicit group actions
//! on faithful qubit states:
//!
//! - `SL(2, C)`: `alpha_A(g, rho) = (g rho^s g^dag)^(1/s) / Tr(...)`, `s = sqrt A`
//!   (Bures-Helstrom at `A = 1`, Wigner-Yanase at `A = 1/4`);
//! - `T*SU(2)`: `(U, a) . rho = exp(U ln(rho) U^dag + a) / Tr(...)`.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seeds::derive_seed;
use crate::state_space::{
    re, HermitianMatrix2, QubitState, TracelessObservable, DEFAULT_EPS_BOUNDARY, I, ONE,
};
use crate::vector_fields::TangentVector;

const SERIES_RADIUS: f64 = 1e-3;

/// Applies a scalar function through the spectral decomposition
/// `m = l+ P+ + l- P-`. `df` is used when the eigenvalues coincide.
fn spectral_map(
    m: &HermitianMatrix2,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
) -> HermitianMatrix2 {
    let (c0, c) = m.pauli_coefficients();
    let n = c.norm();
    let (mean, slope) = if n <= 1e-12 * (1.0 + c0.abs()) {
        (f(c0), df(c0))
    } else {
        let (fp, fm) = (f(c0 + n), f(c0 - n));
        (0.5 * (fp + fm), (fp - fm) / (2.0 * n))
    };
    HermitianMatrix2::from_pauli(mean, c * slope)
}

fn require_positive(m: &HermitianMatrix2) -> Result<()> {
    let [lo, _] = m.eigenvalues();
    if lo > 0.0 {
        Ok(())
    } else {
        Err(Error::NotPositive(lo))
    }
}

/// `m^s` for positive definite `m`.
pub fn hermitian_power(m: &HermitianMatrix2, s: f64) -> Result<HermitianMatrix2> {
    require_positive(m)?;
    Ok(spectral_map(m, |x| x.powf(s), |x| s * x.powf(s - 1.0)))
}

/// Principal logarithm of a positive definite matrix.
pub fn hermitian_log(m: &HermitianMatrix2) -> Result<HermitianMatrix2> {
    require_positive(m)?;
    Ok(spectral_map(m, f64::ln, |x| 1.0 / x))
}

pub fn hermitian_exp(m: &HermitianMatrix2) -> HermitianMatrix2 {
    spectral_map(m, f64::exp, f64::exp)
}

/// `exp(m)` for a traceless 2x2 matrix, using `m^2 = -det(m) I`.
fn traceless_exp(m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let delta = -m.determinant();
    let q = delta.sqrt();
    let (ch, shc) = if q.norm() < SERIES_RADIUS {
        let d2 = delta * delta;
        (
            ONE + delta / 2.0 + d2 / 24.0 + d2 * delta / 720.0,
            ONE + delta / 6.0 + d2 / 120.0 + d2 * delta / 5040.0,
        )
    } else {
        (q.cosh(), q.sinh() / q)
    };
    Matrix2::identity() * ch + m * shc
}

/// An element of `SL(2, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SLGroupElement(Matrix2<Complex64>);

impl SLGroupElement {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let det = m.determinant();
        if (det - ONE).norm() > 1e-12 {
            return Err(Error::InvalidParameter(format!("det = {det}, expected 1")));
        }
        Ok(Self(m))
    }

    /// Rescales an invertible matrix to unit determinant.
    pub fn normalized(m: Matrix2<Complex64>) -> Result<Self> {
        let det = m.determinant();
        if det.norm() < 1e-300 {
            return Err(Error::InvalidParameter("singular matrix".into()));
        }
        Ok(Self(m / det.sqrt()))
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn inverse(&self) -> Self {
        let m = &self.0;
        Self(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }
}

/// `exp((a - i b) / 2)`.
pub fn sl_from_generators(a: &TracelessObservable, b: &TracelessObservable) -> SLGroupElement {
    let m = (a.to_matrix().matrix() - b.to_matrix().matrix() * I) * re(0.5);
    SLGroupElement(traceless_exp(&m))
}

/// `exp(b / 2i) = exp(-i b / 2)`, an element of `SU(2)`.
pub fn su2_from_generator(b: &TracelessObservable) -> Matrix2<Complex64> {
    traceless_exp(&(b.to_matrix().matrix() * Complex64::new(0.0, -0.5)))
}

/// An element `(U, a)` of the cotangent group `T*SU(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentGroupElement {
    u: Matrix2<Complex64>,
    a: TracelessObservable,
}

impl CotangentGroupElement {
    pub fn new(u: Matrix2<Complex64>, a: TracelessObservable) -> Result<Self> {
        let unitarity = (u.adjoint() * u - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let det = u.determinant();
        if unitarity > 1e-12 || (det - ONE).norm() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "U is not special unitary (|U^dag U - I| = {unitarity:e}, det = {det})"
            )));
        }
        Ok(Self { u, a })
    }

    pub fn identity() -> Self {
        Self {
            u: Matrix2::identity(),
            a: TracelessObservable::zero(),
        }
    }

    /// `(exp(b / 2i), a)`.
    pub fn from_generators(a: &TracelessObservable, b: &TracelessObservable) -> Self {
        Self {
            u: su2_from_generator(b),
            a: *a,
        }
    }

    pub fn unitary(&self) -> &Matrix2<Complex64> {
        &self.u
    }

    pub fn translation(&self) -> &TracelessObservable {
        &self.a
    }

    /// `(U^dag, -U^dag a U)`.
    pub fn inverse(&self) -> Self {
        let ud = self.u.adjoint();
        Self {
            u: ud,
            a: conjugate(&ud, &self.a).scale(-1.0),
        }
    }
}

/// `U a U^dag` for traceless `a`.
fn conjugate(u: &Matrix2<Complex64>, a: &TracelessObservable) -> TracelessObservable {
    let m = u * a.to_matrix().matrix() * u.adjoint();
    TracelessObservable::from_matrix(&HermitianMatrix2::symmetrized(m))
}

/// Semidirect product `(U1, a1)(U2, a2) = (U1 U2, a1 + U1 a2 U1^dag)`.
pub fn cotangent_multiply(
    h1: &CotangentGroupElement,
    h2: &CotangentGroupElement,
) -> CotangentGroupElement {
    CotangentGroupElement {
        u: h1.u * h2.u,
        a: TracelessObservable::from_vector(h1.a.vector() + conjugate(&h1.u, &h2.a).vector()),
    }
}

/// `alpha_A(g, rho) = (g rho^s g^dag)^(1/s) / Tr((g rho^s g^dag)^(1/s))`, `s = sqrt A`.
pub fn action_alpha_a(big_a: f64, g: &SLGroupElement, rho: &QubitState) -> Result<QubitState> {
    if !(big_a > 0.0) {
        return Err(Error::InvalidParameter(format!("need A > 0, got {big_a}")));
    }
    let s = big_a.sqrt();
    let p = hermitian_power(rho.matrix(), s)?;
    let m = HermitianMatrix2::symmetrized(g.0 * p.matrix() * g.0.adjoint());
    let tr = m.trace();
    if !(tr > 1e-300) || !tr.is_finite() {
        return Err(Error::NumericalUnderflow(tr));
    }
    let m =
        HermitianMatrix2::from_pauli(m.pauli_coefficients().0 / tr, m.pauli_coefficients().1 / tr);
    let q = hermitian_power(&m, 1.0 / s)?;
    QubitState::from_positive(&q, DEFAULT_EPS_BOUNDARY)
}

/// `exp(U ln(rho) U^dag + a) / Tr(...)`.
///
/// Only the traceless part of the exponent matters; for exponent `h . sigma`
/// the normalized state has Bloch vector `tanh(|h|) h / |h|`.
pub fn action_bkm(h: &CotangentGroupElement, rho: &QubitState) -> Result<QubitState> {
    let log_rho = hermitian_log(rho.matrix())?;
    let rotated = conjugate(&h.u, &TracelessObservable::from_matrix(&log_rho));
    let exponent = rotated.vector() + h.a.vector();
    let n = exponent.norm();
    let bloch = if n == 0.0 {
        Vector3::zeros()
    } else {
        exponent * (n.tanh() / n)
    };
    QubitState::from_bloch(bloch, DEFAULT_EPS_BOUNDARY)
}

/// A left action of a group on faithful qubit states.
pub trait GroupAction: Sync {
    type Element: Clone + Send + Sync;

    fn name(&self) -> String;
    fn identity(&self) -> Self::Element;
    fn compose(&self, g: &Self::Element, h: &Self::Element) -> Self::Element;
    fn act(&self, g: &Self::Element, rho: &QubitState) -> Result<QubitState>;
    /// Group element reached from the generator pair `(a, b)`: `exp((a - ib)/2)`
    /// for `SL(2, C)`, `(exp(b / 2i), a)` for `T*SU(2)`.
    fn element_from_generators(
        &self,
        a: &TracelessObservable,
        b: &TracelessObservable,
    ) -> Self::Element;
}

/// `alpha_A` of `SL(2, C)`.
#[derive(Debug, Clone, Copy)]
pub struct AlphaAction {
    pub big_a: f64,
}

impl GroupAction for AlphaAction {
    type Element = SLGroupElement;

    fn name(&self) -> String {
        format!("alpha({})", self.big_a)
    }
    fn identity(&self) -> SLGroupElement {
        SLGroupElement::identity()
    }
    fn compose(&self, g: &SLGroupElement, h: &SLGroupElement) -> SLGroupElement {
        g.compose(h)
    }
    fn act(&self, g: &SLGroupElement, rho: &QubitState) -> Result<QubitState> {
        action_alpha_a(self.big_a, g, rho)
    }
    fn element_from_generators(
        &self,
        a: &TracelessObservable,
        b: &TracelessObservable,
    ) -> SLGroupElement {
        sl_from_generators(a, b)
    }
}

/// Multiplication law used with the BKM action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CotangentLaw {
    Semidirect,
    /// `(U1 U2, a1 + a2)`; not a valid law for this action, kept as a control.
    DirectSum,
}

#[derive(Debug, Clone, Copy)]
pub struct BkmAction {
    pub law: CotangentLaw,
}

impl Default for BkmAction {
    fn default() -> Self {
        Self {
            law: CotangentLaw::Semidirect,
        }
    }
}

impl GroupAction for BkmAction {
    type Element = CotangentGroupElement;

    fn name(&self) -> String {
        match self.law {
            CotangentLaw::Semidirect => "bkm".into(),
            CotangentLaw::DirectSum => "bkm(direct-sum law)".into(),
        }
    }
    fn identity(&self) -> CotangentGroupElement {
        CotangentGroupElement::identity()
    }
    fn compose(
        &self,
        g: &CotangentGroupElement,
        h: &CotangentGroupElement,
    ) -> CotangentGroupElement {
        match self.law {
            CotangentLaw::Semidirect => cotangent_multiply(g, h),
            CotangentLaw::DirectSum => CotangentGroupElement {
                u: g.u * h.u,
                a: TracelessObservable::from_vector(g.a.vector() + h.a.vector()),
            },
        }
    }
    fn act(&self, g: &CotangentGroupElement, rho: &QubitState) -> Result<QubitState> {
        action_bkm(g, rho)
    }
    fn element_from_generators(
        &self,
        a: &TracelessObservable,
        b: &TracelessObservable,
    ) -> CotangentGroupElement {
        CotangentGroupElement::from_generators(a, b)
    }
}

/// Random traceless observable with coefficients uniform in `[-scale, scale]`.
pub fn random_observable(rng: &mut impl Rng, scale: f64) -> TracelessObservable {
    TracelessObservable::new(
        scale * (2.0 * rng.random::<f64>() - 1.0),
        scale * (2.0 * rng.random::<f64>() - 1.0),
        scale * (2.0 * rng.random::<f64>() - 1.0),
    )
}

/// Random state with Bloch radius at most `max_radius`.
pub fn random_state(rng: &mut impl Rng, max_radius: f64) -> QubitState {
    loop {
        let v = Vector3::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        );
        if v.norm() < 1.0 {
            return QubitState::from_bloch(v * max_radius, DEFAULT_EPS_BOUNDARY)
                .expect("radius below max_radius < 1");
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionAxiomReport {
    pub action: String,
    pub samples: usize,
    pub seed: u64,
    pub identity_deviation: f64,
    pub compatibility_deviation: f64,
    pub max_deviation: f64,
}

fn bloch_distance(p: &QubitState, q: &QubitState) -> f64 {
    (p.bloch() - q.bloch()).amax()
}

/// Checks `alpha(e, rho) = rho` and `alpha(g, alpha(h, rho)) = alpha(gh, rho)`
/// on random triples. Group elements come from generators with coefficients
/// in `[-1, 1]`, states from the ball of radius 0.9.
pub fn verify_left_action<G: GroupAction>(
    action: &G,
    samples: usize,
    seed: u64,
) -> Result<ActionAxiomReport> {
    let devs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let rho = random_state(&mut rng, 0.9);
            let g = action.element_from_generators(
                &random_observable(&mut rng, 1.0),
                &random_observable(&mut rng, 1.0),
            );
            let h = action.element_from_generators(
                &random_observable(&mut rng, 1.0),
                &random_observable(&mut rng, 1.0),
            );
            let id = bloch_distance(&action.act(&action.identity(), &rho)?, &rho);
            let nested = action.act(&g, &action.act(&h, &rho)?)?;
            let direct = action.act(&action.compose(&g, &h), &rho)?;
            Ok((id, bloch_distance(&nested, &direct)))
        })
        .collect::<Result<Vec<_>>>()?;
    let identity_deviation = devs.iter().map(|d| d.0).fold(0.0, f64::max);
    let compatibility_deviation = devs.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok(ActionAxiomReport {
        action: action.name(),
        samples,
        seed,
        identity_deviation,
        compatibility_deviation,
        max_deviation: identity_deviation.max(compatibility_deviation),
    })
}

/// Element of `SL(2, C)` carrying `rho1` to `rho2` under `alpha_1`:
/// `g = rho2^(1/2) rho1^(-1/2)`, rescaled to unit determinant.
pub fn transitivity_element(rho1: &QubitState, rho2: &QubitState) -> Result<SLGroupElement> {
    let a = hermitian_power(rho2.matrix(), 0.5)?;
    let b = hermitian_power(rho1.matrix(), -0.5)?;
    SLGroupElement::normalized(a.matrix() * b.matrix())
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitivityReport {
    pub samples: usize,
    pub seed: u64,
    pub max_deviation: f64,
}

pub fn transitivity_probe(samples: usize, seed: u64) -> Result<TransitivityReport> {
    let devs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let rho1 = random_state(&mut rng, 0.95);
            let rho2 = random_state(&mut rng, 0.95);
            let g = transitivity_element(&rho1, &rho2)?;
            Ok(bloch_distance(&action_alpha_a(1.0, &g, &rho1)?, &rho2))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitivityReport {
        samples,
        seed,
        max_deviation: devs.into_iter().fold(0.0, f64::max),
    })
}

/// `d/dt` at `t = 0` of the Bloch vector of `action(element(t a, t b), rho)`,
/// by central differences with steps `t_step` and `t_step / 2` (Richardson).
pub fn generator_of_action<G: GroupAction>(
    action: &G,
    a: &TracelessObservable,
    b: &TracelessObservable,
    rho: &QubitState,
    t_step: f64,
) -> Result<TangentVector> {
    let at = |t: f64| -> Result<Vector3<f64>> {
        let g = action.element_from_generators(&a.scale(t), &b.scale(t));
        Ok(action.act(&g, rho)?.bloch())
    };
    let cd = |h: f64| -> Result<Vector3<f64>> { Ok((at(h)? - at(-h)?) / (2.0 * h)) };
    let coarse = cd(t_step)?;
    let fine = cd(0.5 * t_step)?;
    Ok(TangentVector::cartesian(
        rho.bloch(),
        (fine * 4.0 - coarse) / 3.0,
    ))
}

/// `|alpha(g, (rho1 + rho2)/2) - (alpha(g, rho1) + alpha(g, rho2))/2|` in Bloch
/// coordinates; nonzero for non-unitary `g`, since these maps are not affine.
pub fn nonlinearity_witness(
    big_a: f64,
    g: &SLGroupElement,
    rho1: &QubitState,
    rho2: &QubitState,
) -> Result<f64> {
    let mid = QubitState::from_bloch((rho1.bloch() + rho2.bloch()) * 0.5, DEFAULT_EPS_BOUNDARY)?;
    let lhs = action_alpha_a(big_a, g, &mid)?.bloch();
    let rhs =
        (action_alpha_a(big_a, g, rho1)?.bloch() + action_alpha_a(big_a, g, rho2)?.bloch()) * 0.5;
    Ok((lhs - rhs).norm())
}

/// `U rho U^dag` computed directly.
pub fn unitary_conjugation(u: &Matrix2<Complex64>, rho: &QubitState) -> Result<QubitState> {
    let m = HermitianMatrix2::symmetrized(u * rho.matrix().matrix() * u.adjoint());
    QubitState::from_positive(&m, DEFAULT_EPS_BOUNDARY)
}
