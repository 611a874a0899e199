//! The `verify` subcommand: closed forms against their independent oracles,
//! one margin row per check.

use infogeo::curvature::{fisher_scalar_extended, riemann, scalar_full, scalar_special};
use infogeo::family::{self, FamilyParams, Point};
use infogeo::geometry::{
    distance_special_normal, geodesic_bvp_shoot, geodesic_ivp, geodesic_n1,
    geodesic_special_normal, path_length, GeodesicState,
};
use infogeo::linalg::{SpdMatrix, SymMatrix};
use infogeo::metric::{
    self, csiszar_induced_form, named_eval, unified_eval, CsiszarPhi, MetricParams, MetricSpec,
    Tangent,
};
use infogeo::oracle::{self, Chart, Competitor};
use serde_json::{json, Value};

pub struct Check {
    pub name: String,
    pub error: f64,
    pub tol: f64,
    pub strict_tol: f64,
}

impl Check {
    fn new(name: impl Into<String>, error: f64, tol: f64, strict_tol: f64) -> Self {
        Check { name: name.into(), error, tol, strict_tol }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum TolProfile {
    Default,
    Strict,
}

fn fam(n: usize, p: f64) -> FamilyParams {
    FamilyParams::new(n, p).unwrap()
}

fn d2() -> SpdMatrix {
    SpdMatrix::from_rows(&[vec![1.3, 0.4], vec![0.4, 0.9]]).unwrap()
}

fn family_checks(checks: &mut Vec<Check>) {
    let pt1 = Point::special(SpdMatrix::diag(&[1.7]).unwrap());
    for p in [0.8, 1.0, 1.5, 3.0] {
        let fp = fam(1, p);
        let est =
            oracle::quad_integral(&fp, &pt1, |x| family::density(&fp, &pt1, x), 1001).unwrap();
        checks.push(Check::new(
            format!("normalization n=1 p={p}"),
            (est.value - 1.0).abs(),
            1e-6,
            1e-8,
        ));
    }
    let pt2 = Point::new(d2(), vec![0.2, -0.3]);
    for p in [0.95, 1.0, 1.5] {
        let fp = fam(2, p);
        let est =
            oracle::quad_integral(&fp, &pt2, |x| family::density(&fp, &pt2, x), 201).unwrap();
        checks.push(Check::new(
            format!("normalization n=2 p={p}"),
            (est.value - 1.0).abs(),
            1e-6,
            1e-8,
        ));
    }
    for (p, q) in [(0.8, 1.5), (1.0, 2.0), (1.5, 0.9), (3.0, 2.0)] {
        let fp = fam(1, p);
        let d = SpdMatrix::diag(&[1.7]).unwrap();
        let closed = family::renyi_entropy(&fp, &d, q).unwrap().value;
        let est = oracle::quad_integral(
            &fp,
            &pt1,
            |x| family::density(&fp, &pt1, x).powf(q),
            2001,
        )
        .unwrap();
        let squad = est.value.ln() / (1.0 - q);
        checks.push(Check::new(
            format!("renyi closed vs quadrature p={p} q={q}"),
            (closed - squad).abs(),
            1e-6,
            1e-8,
        ));
    }
    for p in [0.8, 1.0, 1.5] {
        let fp = fam(1, p);
        let est = oracle::quad_integral(
            &fp,
            &pt1,
            |x| family::density(&fp, &pt1, x) * (x[0] - pt1.u()[0]).powi(2),
            2001,
        )
        .unwrap();
        checks.push(Check::new(
            format!("covariance identity n=1 p={p}"),
            (est.value - 1.0 / 1.7).abs(),
            1e-4,
            1e-6,
        ));
    }
    let d = SpdMatrix::diag(&[1.4]).unwrap();
    for q in [0.8, 1.5] {
        let fp = fam(1, q);
        let margin = oracle::max_entropy_check(&fp, &d, Competitor::Gaussian).unwrap();
        checks.push(Check::new(
            format!("max-entropy margin q={q} (negative part)"),
            (-margin).max(0.0),
            1e-9,
            1e-12,
        ));
    }
}

fn metric_checks(checks: &mut Vec<Check>, seed: u64) {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // canonicalization agreement on random inputs
    for (label, spec) in [
        ("fisher(1.4)", MetricSpec::Fisher { p: 1.4 }),
        ("co(1.7)", MetricSpec::CalvoOller { beta: 1.7 }),
        ("lmr", MetricSpec::Lmr),
    ] {
        let n = 2;
        let fp = fam(n, 1.2);
        let mp = metric::as_unified(&spec, n).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..25 {
            let d = SpdMatrix::new(SymMatrix::from_fn(n, |i, j| {
                if i == j {
                    1.0 + 0.4 * (rng.random::<f64>() - 0.5)
                } else {
                    0.2 * (rng.random::<f64>() - 0.5)
                }
            }))
            .unwrap();
            let pt = Point::new(d, vec![rng.random::<f64>(), rng.random::<f64>()]);
            let a = Tangent::new(
                SymMatrix::from_fn(n, |_, _| rng.random::<f64>() - 0.5),
                vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
            );
            let b = Tangent::new(
                SymMatrix::from_fn(n, |_, _| rng.random::<f64>() - 0.5),
                vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
            );
            let lhs = named_eval(&spec, &fp, &pt, &a, &b).unwrap();
            let rhs = unified_eval(&mp, &pt, &a, &b);
            worst = worst.max((lhs - rhs).abs());
        }
        checks.push(Check::new(format!("as_unified {label}"), worst, 1e-10, 1e-12));
    }

    // Fisher closed form vs the defining integral (grid oracle, n=1)
    for p in [0.8, 1.2] {
        let fp = fam(1, p);
        let pt = Point::new(SpdMatrix::diag(&[1.7]).unwrap(), vec![0.3]);
        let a = Tangent::new(SymMatrix::diag(&[0.5]), vec![-0.7]);
        let est = oracle::numeric_fisher(&fp, &pt, &a, &a, 30).unwrap();
        let closed = named_eval(&MetricSpec::Fisher { p }, &fp, &pt, &a, &a).unwrap();
        checks.push(Check::new(
            format!("fisher closed vs integral p={p}"),
            (est.value - closed).abs(),
            1e-4,
            1e-5,
        ));
    }

    // Kubo-Mori kernel vs defining integral on one random n=3 input
    {
        let d = SpdMatrix::diag(&[0.8, 1.3, 1.9]).unwrap();
        let x = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() - 0.5);
        let kernel = metric::kubo_mori_eval(&d, &x, &x);
        let res = 4001;
        let h = 1.0 / (res - 1) as f64;
        let mut integral = 0.0;
        for i in 0..res {
            let s = i as f64 * h;
            let val = if i == res - 1 {
                x.as_mat().mul(x.as_mat()).trace()
            } else {
                let t = s / (1.0 - s);
                let mut shifted = d.as_sym().clone();
                for k in 0..3 {
                    shifted.set_sym(k, k, shifted.get(k, k) + t);
                }
                let inv = SpdMatrix::new(shifted).unwrap().inv();
                inv.as_mat().mul(x.as_mat()).mul(inv.as_mat()).mul(x.as_mat()).trace()
                    / ((1.0 - s) * (1.0 - s))
            };
            let w = if i == 0 || i == res - 1 {
                1.0 / 3.0
            } else if i % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            };
            integral += w * h * val;
        }
        checks.push(Check::new("kubo-mori kernel vs integral", (kernel - integral).abs(), 1e-8, 1e-10));
    }

    // Csiszar induced form / Fisher -> phi''(1)
    for (label, phi, want, p) in [
        ("kl", CsiszarPhi::KullbackLeibler, 1.0, 1.0),
        ("hellinger", CsiszarPhi::Hellinger, 0.5, 1.2),
        ("alpha(0.3)", CsiszarPhi::AlphaRelative { alpha: 0.3 }, 1.0, 1.2),
    ] {
        let fp = fam(1, p);
        let pt = Point::new(SpdMatrix::diag(&[1.4]).unwrap(), vec![0.2]);
        let a = Tangent::new(SymMatrix::diag(&[0.5]), vec![-0.7]);
        let fisher = named_eval(&MetricSpec::Fisher { p }, &fp, &pt, &a, &a).unwrap();
        let induced = csiszar_induced_form(&phi, &fp, &pt, &a, &a, 1e-3, 2001).unwrap();
        checks.push(Check::new(
            format!("csiszar ratio {label}"),
            (induced / fisher - want).abs(),
            1e-3,
            1e-4,
        ));
    }
}

fn geometry_checks(checks: &mut Vec<Check>) {
    const SQRT2_2LN2: f64 = 1.960516286937094383;
    let mp = MetricParams::new(0.0, 1.0);
    let p0 = Point::new(SpdMatrix::diag(&[2.0]).unwrap(), vec![0.0]);
    let p1 = Point::new(SpdMatrix::diag(&[2.0]).unwrap(), vec![1.5]);
    let (curve, dist) = geodesic_n1(&mp, &p0, &p1).unwrap();
    checks.push(Check::new("n=1 worked distance", (dist - SQRT2_2LN2).abs(), 1e-9, 1e-12));

    let start = GeodesicState { pt: p0.clone(), vel: curve.velocity(0.0).unwrap() };
    let trace = geodesic_ivp(&mp, &start, 1.0, 1000).unwrap();
    let end = trace.last();
    let endpoint_err = (end.pt.d().get(0, 0) - 2.0).abs().max((end.pt.u()[0] - 1.5).abs());
    checks.push(Check::new("ivp reaches closed endpoint", endpoint_err, 1e-6, 1e-7));
    checks.push(Check::new(
        "path length vs closed distance",
        (path_length(&mp, &trace).unwrap() - dist).abs(),
        1e-6,
        1e-7,
    ));

    let sol = geodesic_bvp_shoot(&mp, &p0, &p1, 1e-9).unwrap();
    let shoot_dist = unified_eval(&mp, &sol.pt, &sol.vel, &sol.vel).sqrt();
    checks.push(Check::new("shooting distance", (shoot_dist - dist).abs(), 1e-5, 1e-7));

    let d0 = SpdMatrix::identity(2);
    let d1 = SpdMatrix::diag(&[(2.0f64).exp(), 1.0]).unwrap();
    let sn = distance_special_normal(&mp, &d0, &d1).unwrap();
    checks.push(Check::new(
        "special-normal worked distance",
        (sn - 2.0f64.sqrt()).abs(),
        1e-12,
        1e-14,
    ));
    let curve = geodesic_special_normal(&d0, &d1);
    let mid = curve.point(0.5).unwrap();
    checks.push(Check::new(
        "special-normal midpoint",
        (mid.d().get(0, 0) - 1.0f64.exp()).abs(),
        1e-9,
        1e-11,
    ));
}

fn curvature_checks(checks: &mut Vec<Check>, seed: u64) {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mp0 = MetricParams::new(0.0, 1.0);
    checks.push(Check::new(
        "Scal(1, alpha=0) = -1",
        (scalar_full(&mp0, 1).unwrap() + 1.0).abs(),
        1e-14,
        1e-15,
    ));
    checks.push(Check::new(
        "Scal(2, alpha=0) = -9/2",
        (scalar_full(&mp0, 2).unwrap() + 4.5).abs(),
        1e-14,
        1e-15,
    ));
    checks.push(Check::new(
        "Scal_s(2, alpha=0) = -7/2",
        (scalar_special(&mp0, 2).unwrap() + 3.5).abs(),
        1e-14,
        1e-15,
    ));

    // FD scalar at a random n=2 point
    let chart = Chart::new(2);
    let pt = Point::new(
        SpdMatrix::new(SymMatrix::from_fn(2, |i, j| {
            if i == j {
                1.0 + 0.3 * (rng.random::<f64>() - 0.5)
            } else {
                0.15 * (rng.random::<f64>() - 0.5)
            }
        }))
        .unwrap(),
        vec![0.2, -0.3],
    );
    let mp = MetricParams::new(0.1, 1.0);
    let coords = chart.to_coords(&pt);
    let riem = oracle::fd_riemann(&mp, &chart, &coords, 1e-4).unwrap();
    let ric = oracle::ricci_from_fd(&chart, &riem);
    let g = oracle::fd_metric_components(&mp, &chart, &coords).unwrap();
    let scal_fd = oracle::scalar_from_fd(&g, &ric).unwrap();
    checks.push(Check::new(
        "FD scalar vs closed form (n=2)",
        (scal_fd - scalar_full(&mp, 2).unwrap()).abs(),
        1e-3,
        1e-4,
    ));

    // Bianchi identity on random tangents
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = Tangent::new(
            SymMatrix::from_fn(2, |_, _| rng.random::<f64>() - 0.5),
            vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
        );
        let b = Tangent::new(
            SymMatrix::from_fn(2, |_, _| rng.random::<f64>() - 0.5),
            vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
        );
        let c = Tangent::new(
            SymMatrix::from_fn(2, |_, _| rng.random::<f64>() - 0.5),
            vec![rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5],
        );
        let s = riemann(&mp, &pt, &a, &b, &c)
            .unwrap()
            .add(&riemann(&mp, &pt, &b, &c, &a).unwrap())
            .add(&riemann(&mp, &pt, &c, &a, &b).unwrap());
        worst = worst.max(s.max_abs());
    }
    checks.push(Check::new("first Bianchi identity", worst, 1e-9, 1e-11));

    for (n, p) in [(1usize, 1.0), (2, 1.5), (3, 0.9)] {
        let mp = metric::as_unified(&MetricSpec::Fisher { p }, n).unwrap();
        let a = scalar_full(&mp, n).unwrap();
        let b = fisher_scalar_extended(n, p).unwrap();
        checks.push(Check::new(
            format!("fisher scalar consistency n={n} p={p}"),
            (a - b).abs(),
            1e-12,
            1e-13,
        ));
    }
}

pub fn run_suite(suite: &str, profile: TolProfile, seed: u64) -> (Value, bool) {
    let mut checks = Vec::new();
    if suite == "family" || suite == "all" {
        family_checks(&mut checks);
    }
    if suite == "metric" || suite == "all" {
        metric_checks(&mut checks, seed);
    }
    if suite == "geometry" || suite == "all" {
        geometry_checks(&mut checks);
    }
    if suite == "curvature" || suite == "all" {
        curvature_checks(&mut checks, seed);
    }
    let mut rows = Vec::new();
    let mut all_pass = true;
    for c in &checks {
        let tol = match profile {
            TolProfile::Default => c.tol,
            TolProfile::Strict => c.strict_tol,
        };
        let pass = c.error <= tol;
        all_pass &= pass;
        rows.push(json!({
            "name": c.name,
            "error": c.error,
            "tol": tol,
            "margin": tol - c.error,
            "pass": pass,
        }));
    }
    (
        json!({
            "suite": suite,
            "checks": rows,
            "total": checks.len(),
            "all_pass": all_pass,
        }),
        all_pass,
    )
}
