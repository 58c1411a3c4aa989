//! The `qig` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 numeric
//! failure. Errors are reported on stdout as `{"error": "<code>", "message": ...}`.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::export;
use crate::flow_engine::{compare_flow_to_orbit, integrate_flow, integrate_flow_adaptive};
use crate::group_actions::{
    action_alpha_a, action_bkm, AlphaAction, BkmAction, CotangentGroupElement, SLGroupElement,
};
use crate::metric_family::{metric_cartesian, metric_spherical, Grid, MonotoneFunctionSpec};
use crate::ode_classifier::{classify, singularities, solve_branch_with_c};
use crate::state_space::{
    complex_matrix_from_json, QubitState, SphericalPoint, TracelessObservable, DEFAULT_EPS_BOUNDARY,
};
use crate::vector_fields::{
    bkm_gradient_field, fundamental_field, gradient_field_closed, gradient_field_from_metric,
    rescaled_gradient_field, verify_commutator_relations, VectorField, DEFAULT_BRACKET_STEP,
};
use crate::verify::{self, Suite, VerifyRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qig",
    version,
    about = "Monotone metrics, gradient fields and group actions on qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric components at a point.
    Metric(MetricArgs),
    /// A fundamental or gradient vector field at a point.
    Field(FieldArgs),
    /// Numerical commutators of the gradient fields at one point.
    Bracket(BracketArgs),
    /// The ODE characterizing metrics with a group action.
    Ode {
        #[command(subcommand)]
        cmd: OdeCmd,
    },
    /// Apply a group element to a state.
    Act(ActArgs),
    /// Run invariant suites.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Plot-ready CSV data.
    Export(ExportArgs),
    /// Integrate a flow, or compare it with a group orbit.
    Flow(FlowArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChartArg {
    Spherical,
    Cartesian,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// bkm, bh, wy, rld, familyA(A), familyB(B,c), or familyA together with --A.
    #[arg(long, default_value = "bh")]
    spec: String,
    #[arg(long = "A", allow_hyphen_values = true)]
    big_a: Option<f64>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<MonotoneFunctionSpec> {
        resolve_spec(&self.spec, self.big_a)
    }
}

fn resolve_spec(name: &str, big_a: Option<f64>) -> Result<MonotoneFunctionSpec> {
    match (name.to_ascii_lowercase().as_str(), big_a) {
        ("familya" | "alphaa", Some(a)) => format!("familyA({a})").parse(),
        ("familya" | "alphaa", None) => {
            Err(Error::InvalidParameter(format!("--spec {name} needs --A")))
        }
        _ => name.parse(),
    }
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long, value_enum, default_value = "spherical")]
    chart: ChartArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    r: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_2)]
    theta: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    x: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    y: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    z: f64,
}

enum Point {
    Spherical(SphericalPoint),
    Cartesian(Vector3<f64>),
}

impl PointArgs {
    fn resolve(&self) -> Result<Point> {
        match self.chart {
            ChartArg::Spherical => Ok(Point::Spherical(SphericalPoint::new(
                self.r, self.theta, self.phi,
            )?)),
            ChartArg::Cartesian => {
                let v = Vector3::new(self.x, self.y, self.z);
                check_ball(&v)?;
                Ok(Point::Cartesian(v))
            }
        }
    }
}

fn check_ball(v: &Vector3<f64>) -> Result<()> {
    let r = v.norm();
    if !(r < 1.0 - DEFAULT_EPS_BOUNDARY) {
        return Err(Error::BoundaryViolation {
            radius: r,
            margin: DEFAULT_EPS_BOUNDARY,
        });
    }
    Ok(())
}

#[derive(Debug, Args)]
struct MetricArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FieldKindArg {
    /// `X_b(v) = b x v`.
    Fundamental,
    /// Closed-form gradient of `l_a`.
    Gradient,
    /// Gradient obtained by raising `dl_a` with the metric.
    GradientMetric,
    /// Gradient of the family with constant `A`, divided by `sqrt A`.
    Rescaled,
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| format!("not a number: '{p}'"))?;
    }
    Ok(out)
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long, value_enum, default_value = "gradient")]
    kind: FieldKindArg,
    #[command(flatten)]
    spec: SpecArgs,
    /// Observable (Pauli coefficients) defining the field.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,1")]
    a: [f64; 3],
    #[command(flatten)]
    point: PointArgs,
}

fn build_field(kind: FieldKindArg, spec: &SpecArgs, a: [f64; 3]) -> Result<VectorField> {
    let obs = TracelessObservable::new(a[0], a[1], a[2]);
    Ok(match kind {
        FieldKindArg::Fundamental => fundamental_field(obs),
        FieldKindArg::Gradient => gradient_field_closed(obs, spec.resolve()?),
        FieldKindArg::GradientMetric => gradient_field_from_metric(obs, spec.resolve()?),
        FieldKindArg::Rescaled => {
            let big_a = spec
                .big_a
                .ok_or_else(|| Error::InvalidParameter("--kind rescaled needs --A".into()))?;
            rescaled_gradient_field(obs, big_a)?
        }
    })
}

#[derive(Debug, Args)]
struct BracketArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Cartesian Bloch point.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0.3,0.2,0.4")]
    at: [f64; 3],
    #[arg(long, default_value_t = DEFAULT_BRACKET_STEP)]
    h: f64,
}

#[derive(Debug, Subcommand)]
enum OdeCmd {
    /// Decide whether F(r) is constant for a spec.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0.01)]
        grid_min: f64,
        #[arg(long, default_value_t = 0.99)]
        grid_max: f64,
        #[arg(long, default_value_t = 200)]
        grid_steps: usize,
    },
    /// The normalized solution of F = A.
    Solve {
        #[arg(long = "A", allow_hyphen_values = true)]
        big_a: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c: f64,
    },
    /// Poles of the excluded branch with parameter B = -A/4.
    Poles {
        #[arg(long = "B")]
        big_b: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c: f64,
        #[arg(short = 'n', default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bh,
    Wy,
    #[value(name = "alphaA", alias = "alphaa")]
    AlphaA,
    Bkm,
}

impl FamilyArg {
    fn constant(self, big_a: Option<f64>) -> Result<f64> {
        match self {
            FamilyArg::Bh => Ok(1.0),
            FamilyArg::Wy => Ok(0.25),
            FamilyArg::AlphaA => {
                big_a.ok_or_else(|| Error::InvalidParameter("--family alphaA needs --A".into()))
            }
            FamilyArg::Bkm => Ok(0.0),
        }
    }
}

#[derive(Debug, Args)]
struct ActArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long = "A")]
    big_a: Option<f64>,
    /// Row-major `[[re,im],...]` for SL(2,C); `{"u": [[re,im],...], "a": {"pauli": [...]}}` for bkm.
    #[arg(long)]
    g_json: String,
    /// `{"bloch": [x,y,z]}`.
    #[arg(long)]
    state_json: String,
}

#[derive(Deserialize)]
struct CotangentJson {
    u: Vec<[f64; 2]>,
    a: TracelessObservable,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// Every suite.
    All(VerifyArgs),
    Commutators(VerifyArgs),
    Actions(VerifyArgs),
    Monotone(VerifyArgs),
    Flows(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count of the selected suite.
    #[arg(long)]
    samples: Option<usize>,
    /// Replace every tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Restrict to these suites (repeatable).
    #[arg(long)]
    suite: Vec<String>,
    /// Metric specs for the commutator suite (repeatable).
    #[arg(long)]
    spec: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    #[value(name = "f-curves")]
    FCurves,
    #[value(name = "F-curves")]
    BigFCurves,
    Flow,
    Orbit,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(value_enum)]
    what: ExportWhat,
    /// Values of A (comma separated); the first is used for flow and orbit.
    #[arg(long = "A", value_delimiter = ',', default_value = "0.25,1,4")]
    big_a: Vec<f64>,
    /// Specs for F-curves (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "bkm,bh,wy,rld")]
    specs: Vec<String>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 0.01)]
    grid_min: f64,
    #[arg(long, default_value_t = 0.99)]
    grid_max: f64,
    #[arg(long, value_enum, default_value = "alphaA")]
    family: FamilyArg,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0.6,0.2,-0.5")]
    a: [f64; 3],
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,0")]
    b: [f64; 3],
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0.2,-0.3,0.1")]
    from: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
struct FlowArgs {
    #[command(subcommand)]
    sub: Option<FlowSub>,
    #[command(flatten)]
    run: FlowRunArgs,
}

#[derive(Debug, Subcommand)]
enum FlowSub {
    /// Integrate the generating field and compare with the exact orbit.
    Compare(FlowCompareArgs),
}

#[derive(Debug, Args)]
struct FlowRunArgs {
    #[arg(long, value_enum, default_value = "gradient")]
    kind: FieldKindArg,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,1")]
    a: [f64; 3],
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,0")]
    from: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Step-doubling adaptive RK4 instead of fixed steps.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FlowCompareArgs {
    #[arg(long, value_enum, default_value = "alphaA")]
    family: FamilyArg,
    #[arg(long = "A", default_value_t = 1.0)]
    big_a: f64,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0.6,0.2,-0.5")]
    a: [f64; 3],
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0,0,0")]
    b: [f64; 3],
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true, default_value = "0.2,-0.3,0.1")]
    from: [f64; 3],
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Orbit time per unit flow time.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let _ = e.print();
            print_error("UsageError", &e.kind().to_string());
            return EXIT_INPUT;
        }
    };
    if let Err(code) = configure_threads() {
        return code;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            print_error(e.code(), &e.to_string());
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

fn print_error(code: &str, message: &str) {
    let body = serde_json::json!({ "error": code, "message": message });
    println!("{body}");
}

/// `QIG_THREADS` caps the rayon pool.
fn configure_threads() -> std::result::Result<(), i32> {
    let Ok(v) = std::env::var("QIG_THREADS") else {
        return Ok(());
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // a global pool may already exist when called twice in one process
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
        _ => {
            print_error(
                "InvalidParameter",
                &format!("QIG_THREADS must be a positive integer, got '{v}'"),
            );
            Err(EXIT_INPUT)
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::InvalidParameter(format!("stdout: {e}")))
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Metric(args) => {
            let spec = args.spec.resolve()?;
            let m = match args.point.resolve()? {
                Point::Spherical(p) => metric_spherical(&spec, &p)?,
                Point::Cartesian(v) => metric_cartesian(&spec, &v)?,
            };
            emit(&json(&m), None)?;
        }
        Command::Field(args) => {
            let field = build_field(args.kind, &args.spec, args.a)?;
            let t = match args.point.resolve()? {
                Point::Spherical(p) => field.at_spherical(&p)?,
                Point::Cartesian(v) => field.at_cartesian(&v)?,
            };
            emit(&json(&t), None)?;
        }
        Command::Bracket(args) => {
            let spec = args.spec.resolve()?;
            let p = Vector3::from(args.at);
            check_ball(&p)?;
            let rep = verify_commutator_relations(&spec, &[p], args.h)?;
            emit(&json(&rep), None)?;
        }
        Command::Ode { cmd } => ode(cmd)?,
        Command::Act(args) => act(args)?,
        Command::Verify { cmd } => return verify_cmd(cmd),
        Command::Export(args) => export_cmd(args)?,
        Command::Flow(args) => match args.sub {
            Some(FlowSub::Compare(c)) => flow_compare(c)?,
            None => flow_run(args.run)?,
        },
    }
    Ok(EXIT_OK)
}

fn ode(cmd: OdeCmd) -> Result<()> {
    match cmd {
        OdeCmd::Classify {
            spec,
            grid_min,
            grid_max,
            grid_steps,
        } => {
            if !(0.0 < grid_min && grid_min < grid_max && grid_max < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "grid needs 0 < min < max < 1, got [{grid_min}, {grid_max}]"
                )));
            }
            let grid = Grid::new(grid_min, grid_max, grid_steps).points();
            emit(&json(&classify(&spec.resolve()?, &grid)?), None)
        }
        OdeCmd::Solve { big_a, c } => {
            if !big_a.is_finite() {
                return Err(Error::InvalidParameter(format!("A = {big_a}")));
            }
            emit(&json(&solve_branch_with_c(big_a, c)), None)
        }
        OdeCmd::Poles { big_b, c, n } => emit(&json(&singularities(big_b, c, n)?), None),
    }
}

fn parse_state(s: &str) -> Result<QubitState> {
    serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("state json: {e}")))
}

fn act(args: ActArgs) -> Result<()> {
    let rho = parse_state(&args.state_json)?;
    let out = if args.family == FamilyArg::Bkm {
        let h: CotangentJson = serde_json::from_str(&args.g_json)
            .map_err(|e| Error::InvalidParameter(format!("g json: {e}")))?;
        let u = complex_matrix_from_json(&h.u)?;
        action_bkm(&CotangentGroupElement::new(u, h.a)?, &rho)?
    } else {
        let entries: Vec<[f64; 2]> = serde_json::from_str(&args.g_json)
            .map_err(|e| Error::InvalidParameter(format!("g json: {e}")))?;
        let g = SLGroupElement::new(complex_matrix_from_json(&entries)?)?;
        action_alpha_a(args.family.constant(args.big_a)?, &g, &rho)?
    };
    emit(&json(&out), None)
}

fn verify_cmd(cmd: VerifyCmd) -> Result<i32> {
    let (default_suite, args) = match cmd {
        VerifyCmd::All(a) => (None, a),
        VerifyCmd::Commutators(a) => (Some(Suite::Commutators), a),
        VerifyCmd::Actions(a) => (Some(Suite::Actions), a),
        VerifyCmd::Monotone(a) => (Some(Suite::Monotone), a),
        VerifyCmd::Flows(a) => (Some(Suite::Flows), a),
    };
    let mut config = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(t) = args.tolerance {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance {t}")));
        }
        config.set_all_tolerances(t);
    }
    if let Some(f) = args.format {
        config.format = f.into();
    }
    if let Some(o) = &args.output {
        config.output = Some(o.clone());
    }
    let suites = if !args.suite.is_empty() {
        args.suite
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Suite>>>()?
    } else if let Some(s) = default_suite {
        vec![s]
    } else {
        Suite::ALL.to_vec()
    };
    if let Some(n) = args.samples {
        let target = match suites.as_slice() {
            [Suite::Actions] => &mut config.samples.actions,
            [Suite::Monotone] => &mut config.samples.monotone,
            [Suite::Commutators] => &mut config.samples.commutator_points,
            [Suite::Gradients] => &mut config.samples.gradient_points,
            _ => return Err(Error::InvalidParameter(
                "--samples applies to a single actions, monotone, commutators or gradients suite"
                    .into(),
            )),
        };
        *target = n;
    }
    config.validate()?;
    let commutator_specs = if args.spec.is_empty() {
        None
    } else {
        Some(
            args.spec
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<_>>>()?,
        )
    };
    let report = verify::run(
        &config,
        &VerifyRequest {
            suites,
            commutator_specs,
        },
    );
    let text = match config.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&text, config.output.as_deref())?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn observable(a: [f64; 3]) -> TracelessObservable {
    TracelessObservable::new(a[0], a[1], a[2])
}

fn export_cmd(args: ExportArgs) -> Result<()> {
    let text = match args.what {
        ExportWhat::FCurves => {
            if args.steps == 0 || args.big_a.iter().any(|a| !(*a > 0.0)) {
                return Err(Error::InvalidParameter(
                    "f-curves need steps > 0 and A > 0".into(),
                ));
            }
            export::f_curves(&args.big_a, args.steps)?
        }
        ExportWhat::BigFCurves => {
            if !(0.0 < args.grid_min && args.grid_min < args.grid_max && args.grid_max < 1.0)
                || args.steps < 2
            {
                return Err(Error::InvalidParameter(
                    "F-curves need 0 < grid-min < grid-max < 1 and steps >= 2".into(),
                ));
            }
            let specs = args
                .specs
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<_>>>()?;
            export::big_f_curves(&specs, &Grid::new(args.grid_min, args.grid_max, args.steps))?
        }
        ExportWhat::Flow => {
            let big_a = args.big_a.first().copied().unwrap_or(1.0);
            let c = comparison(
                args.family,
                big_a,
                args.a,
                args.b,
                args.from,
                args.t_end,
                args.steps,
                1.0,
            )?;
            export::flow_orbit_overlay(&c)
        }
        ExportWhat::Orbit => {
            let big_a = args.big_a.first().copied().unwrap_or(1.0);
            let c = comparison(
                args.family,
                big_a,
                args.a,
                args.b,
                args.from,
                args.t_end,
                args.steps,
                1.0,
            )?;
            c.orbit.to_csv(Some(&observable(args.a)))
        }
    };
    emit(&text, args.output.as_deref())
}

fn sum_field(v: VectorField, w: VectorField) -> VectorField {
    let name = format!("{} + {}", v.descriptor(), w.descriptor());
    VectorField::custom(name, move |p| {
        Ok(v.eval_cartesian(p)? + w.eval_cartesian(p)?)
    })
}

#[allow(clippy::too_many_arguments)]
fn comparison(
    family: FamilyArg,
    big_a: f64,
    a: [f64; 3],
    b: [f64; 3],
    from: [f64; 3],
    t_end: f64,
    steps: usize,
    scale: f64,
) -> Result<crate::flow_engine::FlowOrbitComparison> {
    let (a, b) = (observable(a), observable(b));
    let start = QubitState::from_bloch(Vector3::from(from), DEFAULT_EPS_BOUNDARY)?;
    let gen = (&a, &b);
    if family == FamilyArg::Bkm {
        let field =
            match (
                a.vector() == Vector3::zeros(),
                b.vector() == Vector3::zeros(),
            ) {
                (_, true) => bkm_gradient_field(a),
                (true, false) => fundamental_field(b),
                (false, false) => return Err(Error::InvalidParameter(
                    "bkm orbits need a = 0 or b = 0 (other pairs are not one-parameter subgroups)"
                        .into(),
                )),
            };
        compare_flow_to_orbit(
            &field,
            &BkmAction::default(),
            gen,
            &start,
            t_end,
            steps,
            scale,
        )
    } else {
        let big_a = match family {
            FamilyArg::AlphaA => big_a,
            f => f.constant(None)?,
        };
        let field = sum_field(rescaled_gradient_field(a, big_a)?, fundamental_field(b));
        compare_flow_to_orbit(
            &field,
            &AlphaAction { big_a },
            gen,
            &start,
            t_end,
            steps,
            scale,
        )
    }
}

fn flow_run(args: FlowRunArgs) -> Result<()> {
    let field = build_field(args.kind, &args.spec, args.a)?;
    let start = QubitState::from_bloch(Vector3::from(args.from), DEFAULT_EPS_BOUNDARY)?;
    let tr = if args.adaptive {
        integrate_flow_adaptive(&field, &start, args.t_end, args.tolerance, 10_000_000)?
    } else {
        integrate_flow(&field, &start, args.t_end, args.steps)?
    };
    let text = match args.format {
        FormatArg::Csv => tr.to_csv(Some(&observable(args.a))),
        FormatArg::Json => json(&tr),
    };
    emit(&text, args.output.as_deref())
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    family: String,
    scale: f64,
    steps: usize,
    t_end: f64,
    max_deviation: f64,
    flow_descriptor: &'a str,
    orbit_descriptor: &'a str,
}

fn flow_compare(args: FlowCompareArgs) -> Result<()> {
    let c = comparison(
        args.family,
        args.big_a,
        args.a,
        args.b,
        args.from,
        args.t_end,
        args.steps,
        args.scale,
    )?;
    let text = match args.format {
        FormatArg::Csv => export::flow_orbit_overlay(&c),
        FormatArg::Json => json(&CompareSummary {
            family: match args.family {
                FamilyArg::AlphaA => format!("alpha({})", args.big_a),
                f => format!("{f:?}").to_lowercase(),
            },
            scale: c.scale,
            steps: args.steps,
            t_end: args.t_end,
            max_deviation: c.max_deviation,
            flow_descriptor: &c.flow.descriptor,
            orbit_descriptor: &c.orbit.descriptor,
        }),
    };
    emit(&text, args.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn spec_resolution() {
        assert_eq!(
            resolve_spec("familyA", Some(2.0)).unwrap().name(),
            "familyA(2)"
        );
        assert!(resolve_spec("familyA", None).is_err());
        assert_eq!(resolve_spec("wy", None).unwrap().name(), "wy");
    }

    #[test]
    fn triples() {
        assert_eq!(parse_triple("1, -2,3.5").unwrap(), [1.0, -2.0, 3.5]);
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,x,2").is_err());
    }
}
