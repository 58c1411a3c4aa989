//! Invariant suites behind `qig verify`.
//!
//! Each suite draws its random inputs from `derive_seed(config.seed, id)` with
//! a fixed per-suite id, and reports a list of checks. A suite passes when all
//! of its checks do. Upper-bound checks take their tolerance from the run
//! config; lower bounds on negative controls and fixed ranges do not.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::flow_engine::{compare_flow_to_orbit, integrate_flow, rk4_order_ratio};
use crate::group_actions::{
    generator_of_action, random_observable, random_state, transitivity_probe, verify_left_action,
    AlphaAction, BkmAction, CotangentLaw,
};
use crate::metric_family::{
    derivative_limit_at_zero, f_eval, metric_spherical, scalar_monotonicity, scan_monotonicity,
    Grid, MonotoneFunctionSpec,
};
use crate::ode_classifier::{classify, singularities, solve_branch, verify_ode_residual, Verdict};
use crate::seeds::derive_seed;
use crate::state_space::{state_from_bloch, su2_bracket, SphericalPoint, TracelessObservable};
use crate::vector_fields::{
    bkm_gradient_field, fundamental_field, gradient_field_closed, gradient_field_from_metric,
    rescaled_gradient_field, verify_commutator_relations, VectorField, DEFAULT_BRACKET_STEP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Structure,
    Gradients,
    Commutators,
    FConstancy,
    Ode,
    Families,
    Monotone,
    Poles,
    Actions,
    Generators,
    Flows,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Structure,
        Suite::Gradients,
        Suite::Commutators,
        Suite::FConstancy,
        Suite::Ode,
        Suite::Families,
        Suite::Monotone,
        Suite::Poles,
        Suite::Actions,
        Suite::Generators,
        Suite::Flows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structure => "structure",
            Suite::Gradients => "gradients",
            Suite::Commutators => "commutators",
            Suite::FConstancy => "f_constancy",
            Suite::Ode => "ode",
            Suite::Families => "families",
            Suite::Monotone => "monotone",
            Suite::Poles => "poles",
            Suite::Actions => "actions",
            Suite::Generators => "generators",
            Suite::Flows => "flows",
        }
    }

    /// Fixed counter for the suite's sub-seed. Never renumber.
    fn id(self) -> u64 {
        match self {
            Suite::Structure => 1,
            Suite::Gradients => 2,
            Suite::Commutators => 3,
            Suite::FConstancy => 4,
            Suite::Ode => 5,
            Suite::Families => 6,
            Suite::Monotone => 7,
            Suite::Poles => 8,
            Suite::Actions => 9,
            Suite::Generators => 10,
            Suite::Flows => 11,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within([f64; 2]),
    /// A yes/no property; `value` is supporting evidence only.
    Holds(bool),
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        let passed = match bound {
            Bound::AtMost(t) => value <= t,
            Bound::AtLeast(t) => value >= t,
            Bound::Within([lo, hi]) => lo <= value && value <= hi,
            Bound::Holds(ok) => ok,
        };
        Self {
            name: name.into(),
            value,
            bound,
            passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    /// Largest value among the upper-bound checks.
    pub max_deviation: f64,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub failing: Vec<Suite>,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,value,bound,limit,passed\n");
        for s in &self.suites {
            for c in &s.checks {
                let (kind, limit) = match c.bound {
                    Bound::AtMost(t) => ("at_most", t.to_string()),
                    Bound::AtLeast(t) => ("at_least", t.to_string()),
                    Bound::Within([lo, hi]) => ("within", format!("{lo};{hi}")),
                    Bound::Holds(_) => ("holds", String::new()),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{kind},{limit},{}",
                    s.suite.name(),
                    c.name,
                    c.value,
                    c.passed
                );
            }
            if let Some(e) = &s.error {
                let _ = writeln!(
                    out,
                    "{},error,,,,false # {}",
                    s.suite.name(),
                    e.replace(',', ";")
                );
            }
        }
        out
    }
}

/// What to run; `commutator_specs` replaces the default catalog (and its
/// negative control) in the commutator suite.
#[derive(Debug, Clone, Default)]
pub struct VerifyRequest {
    pub suites: Vec<Suite>,
    pub commutator_specs: Option<Vec<MonotoneFunctionSpec>>,
}

impl VerifyRequest {
    pub fn all() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            commutator_specs: None,
        }
    }

    pub fn only(suite: Suite) -> Self {
        Self {
            suites: vec![suite],
            commutator_specs: None,
        }
    }
}

pub fn run(config: &RunConfig, request: &VerifyRequest) -> VerifyReport {
    let mut suites = request.suites.clone();
    suites.sort();
    suites.dedup();
    let reports: Vec<SuiteReport> = suites
        .par_iter()
        .map(|&s| run_suite(s, config, request))
        .collect();
    let failing: Vec<Suite> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.suite)
        .collect();
    VerifyReport {
        seed: config.seed,
        passed: failing.is_empty(),
        failing,
        suites: reports,
    }
}

pub fn run_suite(suite: Suite, config: &RunConfig, request: &VerifyRequest) -> SuiteReport {
    let ctx = Ctx {
        suite,
        config,
        seed: derive_seed(config.seed, suite.id()),
    };
    let result = match suite {
        Suite::Structure => structure(&ctx),
        Suite::Gradients => gradients(&ctx),
        Suite::Commutators => commutators(&ctx, request.commutator_specs.as_deref()),
        Suite::FConstancy => f_constancy(&ctx),
        Suite::Ode => ode(&ctx),
        Suite::Families => families(&ctx),
        Suite::Monotone => monotone(&ctx),
        Suite::Poles => poles(&ctx),
        Suite::Actions => actions(&ctx),
        Suite::Generators => generators(&ctx),
        Suite::Flows => flows(&ctx),
    };
    let (checks, error) = match result {
        Ok(c) => (c, None),
        Err(e) => (vec![], Some(format!("{}: {e}", e.code()))),
    };
    let max_deviation = checks
        .iter()
        .filter_map(|c| match c.bound {
            Bound::AtMost(_) => Some(c.value),
            _ => None,
        })
        .fold(0.0, f64::max);
    SuiteReport {
        suite,
        passed: error.is_none() && checks.iter().all(|c| c.passed),
        max_deviation,
        checks,
        error,
    }
}

struct Ctx<'a> {
    suite: Suite,
    config: &'a RunConfig,
    seed: u64,
}

impl Ctx<'_> {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn at_most(&self, name: &str, value: f64, default: f64) -> Check {
        let tol = self.config.tolerance(self.suite.name(), name, default);
        Check::new(name, value, Bound::AtMost(tol))
    }
}

fn random_ball_point(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n * (r_min + (r_max - r_min) * rng.random::<f64>());
        }
    }
}

fn structure(ctx: &Ctx) -> Result<Vec<Check>> {
    let e = TracelessObservable::basis;
    let mut table: f64 = 0.0;
    for i in 1..=3 {
        for j in 1..=3 {
            let got = su2_bracket(&e(i), &e(j)).vector();
            let want = e(i).vector().cross(&e(j).vector());
            table = table.max((got - want).amax());
        }
    }
    let mut rng = ctx.rng();
    let mut jacobi: f64 = 0.0;
    for _ in 0..100 {
        let a = random_observable(&mut rng, 1.0);
        let b = random_observable(&mut rng, 1.0);
        let c = random_observable(&mut rng, 1.0);
        let s = su2_bracket(&a, &su2_bracket(&b, &c)).vector()
            + su2_bracket(&b, &su2_bracket(&c, &a)).vector()
            + su2_bracket(&c, &su2_bracket(&a, &b)).vector();
        jacobi = jacobi.max(s.amax());
    }
    Ok(vec![
        Check::new("bracket_table", table, Bound::AtMost(0.0)),
        ctx.at_most("jacobi", jacobi, 1e-13),
    ])
}

fn gradients(ctx: &Ctx) -> Result<Vec<Check>> {
    let specs = [
        MonotoneFunctionSpec::Bkm,
        MonotoneFunctionSpec::BuresHelstrom,
        MonotoneFunctionSpec::WignerYanase,
        MonotoneFunctionSpec::FamilyA(0.5),
        MonotoneFunctionSpec::FamilyA(2.0),
        MonotoneFunctionSpec::Rld,
    ];
    let mut rng = ctx.rng();
    let n = ctx.config.samples.gradient_points;
    let samples: Vec<(SphericalPoint, TracelessObservable)> = (0..n)
        .map(|_| {
            let r = 0.01 + 0.98 * rng.random::<f64>();
            let theta = 0.05 + (PI - 0.1) * rng.random::<f64>();
            let phi = 2.0 * PI * rng.random::<f64>();
            let a = random_observable(&mut rng, 1.0);
            (SphericalPoint::new(r, theta, phi).expect("inside chart"), a)
        })
        .collect();
    specs
        .iter()
        .map(|spec| {
            let mut worst: f64 = 0.0;
            for (p, a) in &samples {
                let closed = gradient_field_closed(*a, spec.clone()).eval_spherical(p)?;
                let raised = gradient_field_from_metric(*a, spec.clone()).eval_spherical(p)?;
                worst = worst.max((closed - raised).amax() / closed.amax().max(1.0));
            }
            Ok(ctx.at_most(&spec.name(), worst, 1e-10))
        })
        .collect()
}

fn commutators(ctx: &Ctx, specs: Option<&[MonotoneFunctionSpec]>) -> Result<Vec<Check>> {
    let mut rng = ctx.rng();
    let points: Vec<Vector3<f64>> = (0..ctx.config.samples.commutator_points)
        .map(|_| random_ball_point(&mut rng, 0.1, 0.9))
        .collect();
    let h = DEFAULT_BRACKET_STEP;
    let default_specs = [
        MonotoneFunctionSpec::Bkm,
        MonotoneFunctionSpec::BuresHelstrom,
        MonotoneFunctionSpec::WignerYanase,
        MonotoneFunctionSpec::FamilyA(2.0),
    ];
    let list = specs.unwrap_or(&default_specs);
    let mut checks = vec![];
    for spec in list {
        let rep = verify_commutator_relations(spec, &points, h)?;
        if checks.is_empty() {
            checks.push(Check::new(
                "convention_sign",
                rep.convention_sign,
                Bound::Within([-1.0, -1.0]),
            ));
        }
        let name = spec.name();
        checks.push(ctx.at_most(
            &format!("{name}.constant_law"),
            rep.max_error_constant,
            1e-6,
        ));
        checks.push(ctx.at_most(&format!("{name}.closure"), rep.max_closure_error, 1e-6));
    }
    if specs.is_none() {
        let rep = verify_commutator_relations(&MonotoneFunctionSpec::Rld, &points, h)?;
        checks.push(Check::new(
            "rld.constant_law_fails",
            rep.max_error_constant,
            Bound::AtLeast(1e-2),
        ));
        checks.push(ctx.at_most("rld.pointwise_law", rep.max_error, 1e-6));
    }
    Ok(checks)
}

fn radial_grid(ctx: &Ctx) -> Vec<f64> {
    let g = &ctx.config.grid;
    Grid::new(g.min, g.max, g.steps).points()
}

fn f_constancy(ctx: &Ctx) -> Result<Vec<Check>> {
    let grid = radial_grid(ctx);
    let expect = [
        (MonotoneFunctionSpec::Bkm, 0.0),
        (MonotoneFunctionSpec::BuresHelstrom, 1.0),
        (MonotoneFunctionSpec::WignerYanase, 0.25),
        (MonotoneFunctionSpec::FamilyA(0.5), 0.5),
        (MonotoneFunctionSpec::FamilyA(2.0), 2.0),
        (MonotoneFunctionSpec::FamilyA(4.0), 4.0),
    ];
    let mut checks = vec![];
    for (spec, a) in expect {
        let c = classify(&spec, &grid)?;
        let dev = c.values.iter().map(|v| (v - a).abs()).fold(0.0, f64::max);
        checks.push(ctx.at_most(&spec.name(), dev, 1e-6));
    }
    let rld = classify(&MonotoneFunctionSpec::Rld, &grid)?;
    let width = match rld.verdict {
        Verdict::NonConstant { range_width } => range_width,
        Verdict::Constant { .. } => 0.0,
    };
    checks.push(Check::new(
        "rld.non_constant_width",
        width,
        Bound::AtLeast(0.1),
    ));
    Ok(checks)
}

fn ode(ctx: &Ctx) -> Result<Vec<Check>> {
    let grid = radial_grid(ctx);
    let mut values: Vec<f64> = (1..=20).map(|k| 0.25 * k as f64).collect();
    values.push(0.0);
    let mut roundtrip: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for a in values {
        let solution = solve_branch(a);
        let spec = solution
            .spec()
            .ok_or_else(|| Error::InvalidParameter(format!("no metric for A = {a}")))?;
        let dev = match classify(spec, &grid)?.verdict {
            Verdict::Constant { a: got } => (got - a).abs(),
            Verdict::NonConstant { range_width } => range_width.max(1.0),
        };
        roundtrip = roundtrip.max(dev);
        residual = residual.max(verify_ode_residual(spec, a, &grid)?);
    }
    let excluded = solve_branch(-4.0).spec().is_none();
    Ok(vec![
        ctx.at_most("roundtrip", roundtrip, 1e-6),
        ctx.at_most("residual", residual, 1e-8),
        Check::new(
            "negative_branch_excluded",
            excluded as u8 as f64,
            Bound::Holds(excluded),
        ),
    ])
}

fn families(ctx: &Ctx) -> Result<Vec<Check>> {
    let ts: Vec<f64> = (1..=100).map(|k| k as f64 / 100.0).collect();
    let mut bh: f64 = 0.0;
    let mut wy: f64 = 0.0;
    for &t in &ts {
        bh = bh.max((f_eval(&MonotoneFunctionSpec::FamilyA(1.0), t)? - 0.5 * (1.0 + t)).abs());
        let q = 1.0 + t.sqrt();
        wy = wy.max((f_eval(&MonotoneFunctionSpec::FamilyA(0.25), t)? - 0.25 * q * q).abs());
    }
    Ok(vec![
        ctx.at_most("familyA(1)=bh", bh, 1e-12),
        ctx.at_most("familyA(0.25)=wy", wy, 1e-12),
    ])
}

fn monotone(ctx: &Ctx) -> Result<Vec<Check>> {
    let samples = ctx.config.samples.monotone;
    let sizes = &ctx.config.samples.monotone_sizes;
    let mut checks = vec![];
    let a4 = MonotoneFunctionSpec::FamilyA(4.0);
    let f01 = f_eval(&a4, 0.01)?;
    let f2 = f_eval(&a4, 0.2)?;
    let found = scalar_monotonicity(&a4)?.is_some();
    checks.push(Check::new(
        "familyA(4).scalar_decrease",
        f01 - f2,
        Bound::Holds(found && f01 > f2),
    ));
    let lim = derivative_limit_at_zero(4.0)?;
    checks.push(ctx.at_most("familyA(4).derivative_limit", (lim + 1.0).abs(), 1e-4));
    for a in [2.0, 4.0] {
        let rep = scan_monotonicity(&MonotoneFunctionSpec::FamilyA(a), sizes, samples, ctx.seed)?;
        checks.push(Check::new(
            format!("familyA({a}).violations"),
            rep.violations as f64,
            Bound::AtLeast(1.0),
        ));
    }
    for spec in [
        MonotoneFunctionSpec::BuresHelstrom,
        MonotoneFunctionSpec::WignerYanase,
        MonotoneFunctionSpec::Bkm,
    ] {
        let rep = scan_monotonicity(&spec, sizes, samples, ctx.seed)?;
        checks.push(Check::new(
            format!("{}.min_eigenvalue", spec.name()),
            rep.min_eigenvalue,
            Bound::Holds(rep.monotone_on_samples),
        ));
    }
    Ok(checks)
}

fn poles(ctx: &Ctx) -> Result<Vec<Check>> {
    let list = singularities(1.0, 0.0, 2)?;
    let expected = [(-FRAC_PI_2).exp(), (-3.0 * FRAC_PI_2).exp()];
    let location = list
        .t
        .iter()
        .zip(expected)
        .map(|(t, e)| (t - e).abs())
        .fold(0.0, f64::max);
    let spec = MonotoneFunctionSpec::FamilyB { b: 1.0, c: 0.0 };
    let mut blowup = f64::INFINITY;
    let mut raised = true;
    for (&t, &r) in list.t.iter().zip(&list.r) {
        for d in [-1e-9, 1e-9] {
            blowup = blowup.min(f_eval(&spec, t + d)?.abs());
        }
        let p = SphericalPoint::new(r, 1.0, 0.0)?;
        raised &= matches!(metric_spherical(&spec, &p), Err(Error::PoleError(_)));
    }
    Ok(vec![
        Check::new("count", list.t.len() as f64, Bound::Within([2.0, 2.0])),
        ctx.at_most("location", location, 1e-10),
        Check::new("blowup_within_1e-9", blowup, Bound::AtLeast(1e6)),
        Check::new(
            "metric_pole_error",
            raised as u8 as f64,
            Bound::Holds(raised),
        ),
    ])
}

fn actions(ctx: &Ctx) -> Result<Vec<Check>> {
    let n = ctx.config.samples.actions;
    let mut checks = vec![];
    for a in [0.25, 0.5, 1.0, 2.0] {
        let rep = verify_left_action(&AlphaAction { big_a: a }, n, ctx.seed)?;
        checks.push(ctx.at_most(&rep.action, rep.max_deviation, 1e-10));
    }
    let rep = verify_left_action(&BkmAction::default(), n, ctx.seed)?;
    checks.push(ctx.at_most(&rep.action, rep.max_deviation, 1e-10));
    let wrong = verify_left_action(
        &BkmAction {
            law: CotangentLaw::DirectSum,
        },
        n,
        ctx.seed,
    )?;
    checks.push(Check::new(
        "bkm.direct_sum_law_fails",
        wrong.compatibility_deviation,
        Bound::AtLeast(1e-3),
    ));
    let tr = transitivity_probe(n, ctx.seed)?;
    checks.push(ctx.at_most("transitivity", tr.max_deviation, 1e-10));
    Ok(checks)
}

fn generators(ctx: &Ctx) -> Result<Vec<Check>> {
    const STEP: f64 = 1e-3;
    const SAMPLES: usize = 20;
    let mut rng = ctx.rng();
    let cases: Vec<_> = (0..SAMPLES)
        .map(|_| {
            (
                random_state(&mut rng, 0.9),
                random_observable(&mut rng, 1.0),
                random_observable(&mut rng, 1.0),
            )
        })
        .collect();
    type GeneratorFn<'a> = dyn Fn(
            &crate::state_space::QubitState,
            &TracelessObservable,
            &TracelessObservable,
        ) -> Result<Vector3<f64>>
        + 'a;
    let zero = TracelessObservable::zero();
    let mut checks = vec![];
    // worst deviation and least-squares constant k in generator = k * field
    let compare =
        |gen: &GeneratorFn,
         field: &dyn Fn(&TracelessObservable, &TracelessObservable) -> Result<VectorField>|
         -> Result<(f64, f64)> {
            let (mut worst, mut num, mut den) = (0.0f64, 0.0, 0.0);
            for (rho, a, b) in &cases {
                let g = gen(rho, a, b)?;
                let f = field(a, b)?.eval_cartesian(&rho.bloch())?;
                worst = worst.max((g - f).amax());
                num += g.dot(&f);
                den += f.dot(&f);
            }
            Ok((worst, num / den))
        };
    for big_a in [0.25, 0.5, 1.0, 2.0] {
        let act = AlphaAction { big_a };
        let (dev, k) = compare(
            &|rho, a, _| Ok(generator_of_action(&act, a, &zero, rho, STEP)?.components),
            &|a, _| rescaled_gradient_field(*a, big_a),
        )?;
        checks.push(ctx.at_most(&format!("alpha({big_a}).hermitian"), dev, 1e-6));
        checks.push(Check::new(
            format!("alpha({big_a}).hermitian_constant"),
            k,
            Bound::Within([1.0 - 1e-6, 1.0 + 1e-6]),
        ));
        let (dev, _) = compare(
            &|rho, _, b| Ok(generator_of_action(&act, &zero, b, rho, STEP)?.components),
            &|_, b| Ok(fundamental_field(*b)),
        )?;
        checks.push(ctx.at_most(&format!("alpha({big_a}).anti_hermitian"), dev, 1e-6));
    }
    let bkm = BkmAction::default();
    let (dev, k) = compare(
        &|rho, a, _| Ok(generator_of_action(&bkm, a, &zero, rho, STEP)?.components),
        &|a, _| Ok(bkm_gradient_field(*a)),
    )?;
    checks.push(ctx.at_most("bkm.hermitian", dev, 1e-6));
    checks.push(Check::new(
        "bkm.hermitian_constant",
        k,
        Bound::Within([1.0 - 1e-6, 1.0 + 1e-6]),
    ));
    let (dev, _) = compare(
        &|rho, _, b| Ok(generator_of_action(&bkm, &zero, b, rho, STEP)?.components),
        &|_, b| Ok(fundamental_field(*b)),
    )?;
    checks.push(ctx.at_most("bkm.anti_hermitian", dev, 1e-6));
    Ok(checks)
}

fn flows(ctx: &Ctx) -> Result<Vec<Check>> {
    let mut rng = ctx.rng();
    let start = random_state(&mut rng, 0.6);
    let a = random_observable(&mut rng, 1.0);
    let zero = TracelessObservable::zero();
    let mut checks = vec![];
    for (label, big_a) in [("bh", 1.0), ("wy", 0.25), ("familyA(2)", 2.0)] {
        let field = rescaled_gradient_field(a, big_a)?;
        let c = compare_flow_to_orbit(
            &field,
            &AlphaAction { big_a },
            (&a, &zero),
            &start,
            1.0,
            1000,
            1.0,
        )?;
        checks.push(ctx.at_most(label, c.max_deviation, 1e-6));
    }
    let c = compare_flow_to_orbit(
        &bkm_gradient_field(a),
        &BkmAction::default(),
        (&a, &zero),
        &start,
        1.0,
        1000,
        1.0,
    )?;
    checks.push(ctx.at_most("bkm", c.max_deviation, 1e-6));
    let c = compare_flow_to_orbit(
        &fundamental_field(a),
        &AlphaAction { big_a: 1.0 },
        (&zero, &a),
        &start,
        1.0,
        1000,
        1.0,
    )?;
    checks.push(ctx.at_most("fundamental", c.max_deviation, 1e-8));
    let ratio = rk4_order_ratio(
        &rescaled_gradient_field(a, 2.0)?,
        &AlphaAction { big_a: 2.0 },
        (&a, &zero),
        &start,
        1.0,
        10,
    )?;
    checks.push(Check::new(
        "rk4_order_ratio",
        ratio,
        Bound::Within([8.0, 32.0]),
    ));
    let center = state_from_bloch(0.0, 0.0, 0.0)?;
    let field = gradient_field_closed(
        TracelessObservable::basis(3),
        MonotoneFunctionSpec::BuresHelstrom,
    );
    let probe = integrate_flow(&field, &center, 10.0, 2000);
    let radius = probe.as_ref().map(|t| t.max_radius()).unwrap_or(f64::NAN);
    checks.push(Check::new(
        "completeness_probe_radius",
        radius,
        Bound::Holds(probe.is_ok() && radius < 1.0),
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes() {
        let mut cfg = RunConfig::default();
        cfg.samples.monotone = 400;
        cfg.samples.actions = 40;
        cfg.samples.gradient_points = 100;
        cfg.samples.commutator_points = 10;
        let rep = run(&cfg, &VerifyRequest::all());
        let failing: Vec<_> = rep
            .suites
            .iter()
            .flat_map(|s| {
                s.checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(move |c| format!("{}.{} = {}", s.suite.name(), c.name, c.value))
                    .chain(s.error.clone())
            })
            .collect();
        assert!(rep.passed, "{failing:?}");
    }

    #[test]
    fn rld_commutators_fail() {
        let cfg = RunConfig {
            samples: crate::config::SampleSettings {
                commutator_points: 5,
                ..Default::default()
            },
            ..Default::default()
        };
        let req = VerifyRequest {
            suites: vec![Suite::Commutators],
            commutator_specs: Some(vec![MonotoneFunctionSpec::Rld]),
        };
        let rep = run(&cfg, &req);
        assert!(!rep.passed);
        assert_eq!(rep.failing, vec![Suite::Commutators]);
    }

    #[test]
    fn tiny_tolerances_fail() {
        let mut cfg = RunConfig::default();
        cfg.set_all_tolerances(1e-15);
        cfg.samples.commutator_points = 3;
        let rep = run(&cfg, &VerifyRequest::only(Suite::Commutators));
        assert!(!rep.passed);
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("f-constancy".parse::<Suite>().unwrap(), Suite::FConstancy);
        assert!("nope".parse::<Suite>().is_err());
    }
}
