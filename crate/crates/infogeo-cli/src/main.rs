//! Batch front end: entropy / metric / geodesic / distance / curvature
//! computations plus the oracle verification suite. One JSON
//! `CommandResult` per invocation on standard output, logs on standard
//! error, exit code 0 iff the status is ok. `INFOGEO_THREADS` caps the
//! oracle's internal parallelism.

mod docs;
mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use docs::{num, parse_point, parse_tangent, serialize_point, tangent_json, CommandResult};
use infogeo::curvature::{ball_volume, ricci, riemann, scalar_full, scalar_special};
use infogeo::family::{self, FamilyParams, Point};
use infogeo::geometry::{
    self, geodesic_alpha0, geodesic_bvp_shoot, geodesic_ivp, geodesic_n1,
    geodesic_special_normal, GeodesicState,
};
use infogeo::metric::{self, named_eval, MetricParams, MetricSpec, Tangent};
use infogeo::oracle;
use infogeo::Error;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "infogeo", version, about = "Geometry of generalized Gaussian families")]
struct Cli {
    /// Seed for any randomized oracle work; echoed in the diagnostics.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form or oracle entropies of a family member.
    Entropy(EntropyArgs),
    /// Evaluate a metric (by JSON spec) on a pair of tangents.
    Metric(MetricArgs),
    /// Integrate or evaluate geodesics; traces go to CSV.
    #[command(subcommand)]
    Geodesic(GeodesicCmd),
    /// Rao distances for the closed-form cases.
    Distance(DistanceArgs),
    /// Curvature tensors, scalars, and ball volumes.
    #[command(subcommand)]
    Curvature(CurvatureCmd),
    /// Run the oracle verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyKindArg {
    Renyi,
    Tsallis,
    Shannon,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Oracle,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(value_enum)]
    kind: EntropyKindArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    /// Entropy order (ignored for shannon).
    #[arg(long)]
    q: Option<f64>,
    /// Point document ({"n":..,"D":[[..]],"u":[..]}); D supplies the member.
    #[arg(long)]
    point: PathBuf,
    #[arg(long, value_enum, default_value = "closed")]
    method: MethodArg,
    /// Grid resolution for the oracle method.
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct MetricArgs {
    /// Metric spec JSON file, e.g. {"name":"fisher","p":1.0}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Family order parameter used for existence checks (defaults to 1).
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

#[derive(Subcommand)]
enum GeodesicCmd {
    /// Fixed-step integration from a point and velocity.
    Ivp(IvpArgs),
    /// Closed-form families evaluated on a sample grid.
    Closed(ClosedArgs),
    /// Boundary value problem by shooting; reports the initial velocity.
    Bvp(BvpArgs),
}

#[derive(Args)]
struct IvpArgs {
    #[arg(long)]
    point: PathBuf,
    /// Tangent document ({"X":[[..]],"x":[..]}).
    #[arg(long)]
    velocity: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// CSV output path for the trace.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosedCase {
    N1,
    SpecialNormal,
    Alpha0,
}

#[derive(Args)]
struct ClosedArgs {
    #[arg(long, value_enum)]
    case: ClosedCase,
    #[arg(long)]
    p0: PathBuf,
    #[arg(long)]
    p1: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BvpArgs {
    #[arg(long)]
    p0: PathBuf,
    #[arg(long)]
    p1: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, value_enum)]
    case: ClosedCase,
    #[arg(long)]
    p0: PathBuf,
    #[arg(long)]
    p1: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Subcommand)]
enum CurvatureCmd {
    /// Riemann tensor R(a, b, c) at a point.
    Riemann(RiemannArgs),
    /// Ricci tensor Ric(a, b) at a point.
    Ricci(RicciArgs),
    /// Constant scalar curvatures Scal and Scal_s for (n, alpha).
    Scalar(ScalarArgs),
    /// Geodesic-ball volume through the r^2 correction.
    BallVolume(BallVolumeArgs),
}

#[derive(Args)]
struct RiemannArgs {
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    c: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Args)]
struct RicciArgs {
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Args)]
struct ScalarArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Args)]
struct BallVolumeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    scal: f64,
    #[arg(long)]
    r: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value = "default")]
    tol_profile: String,
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_point(path: &Path) -> Result<Point, Error> {
    parse_point(&read_file(path)?)
}

fn read_tangent(path: &Path, n: usize) -> Result<Tangent, Error> {
    parse_tangent(&read_file(path)?, n)
}

fn run_entropy(args: &EntropyArgs, seed: u64) -> Result<CommandResult, Error> {
    let fp = FamilyParams::new(args.n, args.p)?;
    let pt = read_point(&args.point)?;
    if pt.dim() != args.n {
        return Err(Error::Parse {
            path: args.point.display().to_string(),
            message: format!("point dimension {} does not match --n {}", pt.dim(), args.n),
        });
    }
    let d = pt.d().clone();
    let (value, q, method_name, err_est) = match (args.kind, args.method) {
        (EntropyKindArg::Shannon, MethodArg::Closed) => {
            let e = family::shannon_entropy(&fp, &d)?;
            (e.value, 1.0, "closed-form", None)
        }
        (EntropyKindArg::Renyi, MethodArg::Closed) => {
            let q = args.q.ok_or_else(|| Error::EntropyDomain("--q is required".into()))?;
            let e = family::renyi_entropy(&fp, &d, q)?;
            (e.value, q, "closed-form", None)
        }
        (EntropyKindArg::Tsallis, MethodArg::Closed) => {
            let q = args.q.ok_or_else(|| Error::EntropyDomain("--q is required".into()))?;
            let e = family::tsallis_entropy(&fp, &d, q)?;
            (e.value, q, "closed-form", None)
        }
        (kind, MethodArg::Oracle) => {
            if args.n > 2 {
                return Err(Error::Numerical("oracle entropies support n <= 2".into()));
            }
            let res = args.resolution.unwrap_or(if args.n == 1 { 2001 } else { 301 });
            let pt0 = Point::special(d.clone());
            match kind {
                EntropyKindArg::Shannon => {
                    let est = oracle::quad_integral(
                        &fp,
                        &pt0,
                        |x| {
                            let f = family::density(&fp, &pt0, x);
                            if f > 0.0 {
                                -f * f.ln()
                            } else {
                                0.0
                            }
                        },
                        res,
                    )?;
                    (est.value, 1.0, "quadrature", Some(est.error_estimate))
                }
                _ => {
                    let q =
                        args.q.ok_or_else(|| Error::EntropyDomain("--q is required".into()))?;
                    if q == 1.0 {
                        return Err(Error::OrderOne);
                    }
                    let est = oracle::quad_integral(
                        &fp,
                        &pt0,
                        |x| family::density(&fp, &pt0, x).powf(q),
                        res,
                    )?;
                    let value = match kind {
                        EntropyKindArg::Renyi => est.value.ln() / (1.0 - q),
                        _ => (est.value - 1.0) / (1.0 - q),
                    };
                    (value, q, "quadrature", Some(est.error_estimate))
                }
            }
        }
    };
    let mut payload = serde_json::Map::new();
    payload.insert("entropy".into(), num(value)?);
    payload.insert("q".into(), num(q)?);
    let mut result = CommandResult::ok(Value::Object(payload))
        .with_diagnostic("method", json!(method_name))
        .with_diagnostic("seed", json!(seed));
    if let Some(e) = err_est {
        result = result.with_diagnostic("error_estimate", num(e)?);
    }
    Ok(result)
}

fn run_metric(args: &MetricArgs, seed: u64) -> Result<CommandResult, Error> {
    let spec: MetricSpec =
        serde_json::from_str(&read_file(&args.spec)?).map_err(|e| Error::Parse {
            path: args.spec.display().to_string(),
            message: e.to_string(),
        })?;
    let pt = read_point(&args.point)?;
    let n = pt.dim();
    let a = read_tangent(&args.a, n)?;
    let b = read_tangent(&args.b, n)?;
    let fp = FamilyParams::new(n, args.p)?;
    let value = named_eval(&spec, &fp, &pt, &a, &b)?;
    let mut payload = serde_json::Map::new();
    payload.insert("value".into(), num(value)?);
    if let Some(mp) = metric::as_unified(&spec, n) {
        payload.insert(
            "as_unified".into(),
            json!({"alpha": mp.alpha, "beta": mp.beta, "scale": mp.scale}),
        );
    }
    Ok(CommandResult::ok(Value::Object(payload)).with_diagnostic("seed", json!(seed)))
}

fn write_trace_csv(trace: &geometry::GeodesicTrace, out: &Path) -> Result<(), Error> {
    let mut buf = Vec::new();
    trace
        .write_csv(&mut buf)
        .map_err(|e| Error::Numerical(format!("csv write failed: {e}")))?;
    fs::write(out, buf).map_err(|e| Error::Parse {
        path: out.display().to_string(),
        message: e.to_string(),
    })
}

fn run_geodesic(cmd: &GeodesicCmd, seed: u64) -> Result<CommandResult, Error> {
    match cmd {
        GeodesicCmd::Ivp(a) => {
            let pt = read_point(&a.point)?;
            let vel = read_tangent(&a.velocity, pt.dim())?;
            let mp = MetricParams::with_scale(a.alpha, a.beta, a.scale);
            let start = GeodesicState { pt, vel };
            let trace = geodesic_ivp(&mp, &start, a.t_end, a.steps)?;
            write_trace_csv(&trace, &a.out)?;
            let end = trace.last();
            Ok(CommandResult::ok(json!({
                "rows": trace.times().len(),
                "endpoint": serde_json::from_str::<Value>(&serialize_point(&end.pt)).unwrap(),
                "out": a.out.display().to_string(),
            }))
            .with_diagnostic("steps", json!(a.steps))
            .with_diagnostic("seed", json!(seed)))
        }
        GeodesicCmd::Closed(a) => {
            let p0 = read_point(&a.p0)?;
            let p1 = read_point(&a.p1)?;
            let mp = MetricParams::with_scale(a.alpha, a.beta, a.scale);
            let (curve, dist) = match a.case {
                ClosedCase::N1 => geodesic_n1(&mp, &p0, &p1)?,
                ClosedCase::SpecialNormal => {
                    let c = geodesic_special_normal(p0.d(), p1.d());
                    let d = geometry::distance_special_normal(&mp, p0.d(), p1.d())?;
                    (c, d)
                }
                ClosedCase::Alpha0 => geodesic_alpha0(a.beta, &p0, &p1)?,
            };
            assert!(a.samples >= 2, "need at least two samples");
            // sample the closed curve into a trace-compatible CSV
            let mut rows = Vec::with_capacity(a.samples);
            for k in 0..a.samples {
                let t = k as f64 / (a.samples - 1) as f64;
                let pt = curve.point(t)?;
                let vel = curve.velocity(t)?;
                rows.push((t, GeodesicState { pt, vel }));
            }
            let n = rows[0].1.pt.dim();
            let mut csv = String::new();
            let mut header = vec!["t".to_string()];
            for i in 0..n {
                for j in i..n {
                    header.push(format!("D_{}{}", i + 1, j + 1));
                }
            }
            for k in 0..n {
                header.push(format!("u_{}", k + 1));
            }
            csv.push_str(&header.join(","));
            csv.push('\n');
            for (t, st) in &rows {
                let mut row = vec![format!("{t:.16e}")];
                for i in 0..n {
                    for j in i..n {
                        row.push(format!("{:.16e}", st.pt.d().get(i, j)));
                    }
                }
                for k in 0..n {
                    row.push(format!("{:.16e}", st.pt.u()[k]));
                }
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            fs::write(&a.out, csv).map_err(|e| Error::Parse {
                path: a.out.display().to_string(),
                message: e.to_string(),
            })?;
            Ok(CommandResult::ok(json!({
                "distance": num(dist)?,
                "rows": a.samples,
                "out": a.out.display().to_string(),
            }))
            .with_diagnostic("seed", json!(seed)))
        }
        GeodesicCmd::Bvp(a) => {
            let p0 = read_point(&a.p0)?;
            let p1 = read_point(&a.p1)?;
            let mp = MetricParams::with_scale(a.alpha, a.beta, a.scale);
            let sol = geodesic_bvp_shoot(&mp, &p0, &p1, a.tol)?;
            let speed2 = metric::unified_eval(&mp, &sol.pt, &sol.vel, &sol.vel);
            Ok(CommandResult::ok(json!({
                "initial_velocity": tangent_json(&sol.vel)?,
                "distance": num(speed2.sqrt())?,
            }))
            .with_diagnostic("tol", json!(a.tol))
            .with_diagnostic("seed", json!(seed)))
        }
    }
}

fn run_distance(args: &DistanceArgs, seed: u64) -> Result<CommandResult, Error> {
    let p0 = read_point(&args.p0)?;
    let p1 = read_point(&args.p1)?;
    let mp = MetricParams::with_scale(args.alpha, args.beta, args.scale);
    let dist = match args.case {
        ClosedCase::N1 => geodesic_n1(&mp, &p0, &p1)?.1,
        ClosedCase::SpecialNormal => geometry::distance_special_normal(&mp, p0.d(), p1.d())?,
        ClosedCase::Alpha0 => geodesic_alpha0(args.beta, &p0, &p1)?.1,
    };
    Ok(CommandResult::ok(json!({"distance": num(dist)?}))
        .with_diagnostic("seed", json!(seed)))
}

fn run_curvature(cmd: &CurvatureCmd, seed: u64) -> Result<CommandResult, Error> {
    match cmd {
        CurvatureCmd::Riemann(a) => {
            let pt = read_point(&a.point)?;
            let n = pt.dim();
            let mp = MetricParams::new(a.alpha, a.beta);
            let r = riemann(
                &mp,
                &pt,
                &read_tangent(&a.a, n)?,
                &read_tangent(&a.b, n)?,
                &read_tangent(&a.c, n)?,
            )?;
            Ok(CommandResult::ok(json!({"riemann": tangent_json(&r)?}))
                .with_diagnostic("seed", json!(seed)))
        }
        CurvatureCmd::Ricci(a) => {
            let pt = read_point(&a.point)?;
            let n = pt.dim();
            let mp = MetricParams::new(a.alpha, a.beta);
            let v = ricci(&mp, &pt, &read_tangent(&a.a, n)?, &read_tangent(&a.b, n)?)?;
            Ok(CommandResult::ok(json!({"ricci": num(v)?}))
                .with_diagnostic("seed", json!(seed)))
        }
        CurvatureCmd::Scalar(a) => {
            let mp = MetricParams::with_scale(a.alpha, a.beta, a.scale);
            let scal = scalar_full(&mp, a.n)?;
            let scal_s = scalar_special(&mp, a.n)?;
            Ok(CommandResult::ok(json!({
                "scal": num(scal)?,
                "scal_special": num(scal_s)?,
            }))
            .with_diagnostic("seed", json!(seed)))
        }
        CurvatureCmd::BallVolume(a) => {
            let v = ball_volume(a.n, a.scal, a.r);
            Ok(CommandResult::ok(json!({"volume": num(v)?}))
                .with_diagnostic("seed", json!(seed)))
        }
    }
}

fn run_verify(args: &VerifyArgs, seed: u64) -> Result<CommandResult, Error> {
    let suites = ["family", "metric", "geometry", "curvature", "all"];
    if !suites.contains(&args.suite.as_str()) {
        return Err(Error::Parse {
            path: "--suite".into(),
            message: format!("unknown suite '{}'", args.suite),
        });
    }
    let profile = match args.tol_profile.as_str() {
        "default" => verify::TolProfile::Default,
        "strict" => verify::TolProfile::Strict,
        other => {
            return Err(Error::Parse {
                path: "--tol-profile".into(),
                message: format!("unknown profile '{other}'"),
            })
        }
    };
    let (payload, all_pass) = verify::run_suite(&args.suite, profile, seed);
    if all_pass {
        Ok(CommandResult::ok(payload)
            .with_diagnostic("seed", json!(seed))
            .with_diagnostic("tol_profile", json!(args.tol_profile)))
    } else {
        let mut r = CommandResult::error("verify_failed", "one or more checks failed");
        r.payload = payload;
        Ok(r.with_diagnostic("seed", json!(seed))
            .with_diagnostic("tol_profile", json!(args.tol_profile)))
    }
}

fn dispatch(cli: &Cli) -> CommandResult {
    let out = match &cli.command {
        Command::Entropy(a) => run_entropy(a, cli.seed),
        Command::Metric(a) => run_metric(a, cli.seed),
        Command::Geodesic(c) => run_geodesic(c, cli.seed),
        Command::Distance(a) => run_distance(a, cli.seed),
        Command::Curvature(c) => run_curvature(c, cli.seed),
        Command::Verify(a) => run_verify(a, cli.seed),
    };
    match out {
        Ok(result) => result,
        Err(e) => CommandResult::from_error(&e),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = dispatch(&cli);
    println!("{}", serde_json::to_string_pretty(&result.to_json()).expect("json encoding"));
    if result.status != docs::Status::Ok {
        eprintln!("infogeo: command failed");
    }
    std::process::exit(result.exit_code());
}
