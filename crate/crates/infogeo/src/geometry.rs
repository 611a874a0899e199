//! Covariant derivative, geodesic ODE and integrator, the closed-form
//! geodesic families, and Rao distances.
//!
//! The Levi-Civita connection of the unified metric has the closed form
//!
//! ```text
//! Γ(X,x)(Y,y) = ( −½(XD⁻¹Y + YD⁻¹X) − (β/2) D(x⊙y)D + 2αβ/(1+2nα) ⟨x,Dy⟩ D,
//!                 ½ D⁻¹(Xy + Yx) )
//! ```
//!
//! and geodesics solve `γ̈ + Γ(γ̇)(γ̇) = 0`. Besides the generic fixed-step
//! integrator and a shooting boundary-value solver, four families have
//! closed forms: the one-dimensional cosh²/tanh curves with an explicit
//! endpoint recipe, the zero-mean (special normal) matrix geodesics, their
//! pullback under the embedding `π_β` into `P(n+1)` for `α = 0`, and a
//! diagonal cosh²/tanh family.
//!
//! A caution on the embedding route: the ambient matrix geodesic between two
//! embedded points does not generally stay inside the image of `π_β` (the
//! image is not totally geodesic), in which case [`geodesic_alpha0`] reports
//! [`Error::UnembedFailure`] rather than returning a curve that fails the
//! geodesic equation. The block-diagonal case (equal means) is exact.

use crate::linalg::{dot, Mat, SpdMatrix, SymMatrix};
use crate::metric::{signature, unified_eval, MetricParams, Signature, Tangent};
use crate::oracle::Chart;
use crate::family::Point;
use crate::{Error, Result};
use std::io::Write;

/// Position and velocity along a curve in `Ξₙ`.
#[derive(Debug, Clone)]
pub struct GeodesicState {
    pub pt: Point,
    pub vel: Tangent,
}

/// A sampled geodesic: strictly increasing times with matching states.
#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    times: Vec<f64>,
    states: Vec<GeodesicState>,
    mp: MetricParams,
}

impl GeodesicTrace {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GeodesicState] {
        &self.states
    }

    pub fn mp(&self) -> &MetricParams {
        &self.mp
    }

    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("non-empty trace")
    }

    /// CSV rows `t, D_11..D_1n, D_22..D_nn (upper triangle row-major),
    /// u_1..u_n`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let n = self.states[0].pt.dim();
        let mut header = vec!["t".to_string()];
        for i in 0..n {
            for j in i..n {
                header.push(format!("D_{}{}", i + 1, j + 1));
            }
        }
        for k in 0..n {
            header.push(format!("u_{}", k + 1));
        }
        writeln!(out, "{}", header.join(","))?;
        for (t, st) in self.times.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.16e}")];
            for i in 0..n {
                for j in i..n {
                    row.push(format!("{:.16e}", st.pt.d().get(i, j)));
                }
            }
            for k in 0..n {
                row.push(format!("{:.16e}", st.pt.u()[k]));
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Covariant derivative `Γ_{(D,u)}(a)(b)` of the unified metric
/// (symmetric in `a, b`; independent of the overall scale).
pub fn covariant_derivative(
    mp: &MetricParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
) -> Result<Tangent> {
    let n = pt.dim();
    mp.check_nondegenerate(n)?;
    let d = pt.d();
    let dinv = d.inv();
    let x_di_y = a.m.as_mat().mul(dinv.as_mat()).mul(b.m.as_mat());
    let y_di_x = b.m.as_mat().mul(dinv.as_mat()).mul(a.m.as_mat());
    let mut matrix = SymMatrix::symmetrize(&x_di_y.add(&y_di_x)).scaled(-0.5);

    let dyad = SymMatrix::dyad_sym(&a.v, &b.v);
    let d_dyad_d = SymMatrix::symmetrize(
        &d.as_mat().mul(dyad.as_mat()).mul(d.as_mat()),
    );
    matrix = matrix.add(&d_dyad_d.scaled(-0.5 * mp.beta));

    // symmetric average keeps Γ(a)(b) == Γ(b)(a) bitwise
    let xdy = 0.5 * (dot(&a.v, &d.matvec(&b.v)) + dot(&b.v, &d.matvec(&a.v)));
    let coeff = 2.0 * mp.alpha * mp.beta / mp.trace_factor(n);
    matrix = matrix.add(&d.as_sym().scaled(coeff * xdy));

    let xy_yx: Vec<f64> = a
        .m
        .matvec(&b.v)
        .iter()
        .zip(&b.m.matvec(&a.v))
        .map(|(p, q)| p + q)
        .collect();
    let vector: Vec<f64> = dinv.matvec(&xy_yx).iter().map(|v| 0.5 * v).collect();
    Ok(Tangent::new(matrix, vector))
}

/// Right side of the geodesic system:
/// `D̈ = ḊD⁻¹Ḋ + β(Du̇)∘(Du̇) − 2αβ/(1+2nα) ⟨u̇,Du̇⟩ D`,
/// `ü = −D⁻¹Ḋu̇`. Returns `(point-derivative, velocity-derivative)`.
pub fn geodesic_rhs(mp: &MetricParams, s: &GeodesicState) -> Result<(Tangent, Tangent)> {
    let n = s.pt.dim();
    mp.check_nondegenerate(n)?;
    let d = s.pt.d();
    let dinv = d.inv();
    let dd = &s.vel.m;
    let ud = &s.vel.v;

    let dd_di_dd = SymMatrix::symmetrize(&dd.as_mat().mul(dinv.as_mat()).mul(dd.as_mat()));
    let du = d.matvec(ud);
    let outer = SymMatrix::from_fn(n, |i, j| du[i] * du[j]);
    let udu = dot(ud, &du);
    let coeff = 2.0 * mp.alpha * mp.beta / mp.trace_factor(n);
    let acc_m = dd_di_dd
        .add(&outer.scaled(mp.beta))
        .add(&d.as_sym().scaled(-coeff * udu));

    let acc_v: Vec<f64> = dinv.matvec(&dd.matvec(ud)).iter().map(|v| -v).collect();
    Ok((s.vel.clone(), Tangent::new(acc_m, acc_v)))
}

/// Default integrator step density (steps per unit time).
pub const DEFAULT_STEPS_PER_UNIT: usize = 1000;

#[derive(Clone)]
struct RawState {
    d: SymMatrix,
    u: Vec<f64>,
    dd: SymMatrix,
    ud: Vec<f64>,
}

impl RawState {
    fn axpy(&self, h: f64, k: &RawState) -> RawState {
        RawState {
            d: self.d.add(&k.d.scaled(h)),
            u: self.u.iter().zip(&k.u).map(|(a, b)| a + h * b).collect(),
            dd: self.dd.add(&k.dd.scaled(h)),
            ud: self.ud.iter().zip(&k.ud).map(|(a, b)| a + h * b).collect(),
        }
    }
}

fn raw_rhs(mp: &MetricParams, s: &RawState, t: f64) -> Result<RawState> {
    let d = SpdMatrix::new(s.d.clone()).map_err(|_| Error::SpdViolation { t })?;
    let state = GeodesicState {
        pt: Point::new(d, s.u.clone()),
        vel: Tangent::new(s.dd.clone(), s.ud.clone()),
    };
    let (_, acc) = geodesic_rhs(mp, &state)?;
    Ok(RawState { d: s.dd.clone(), u: s.ud.clone(), dd: acc.m, ud: acc.v })
}

/// Classical fixed-step 4th-order integration of the geodesic equation.
/// Positive definiteness is checked after every step
/// (tolerance `1e-12`); a violation aborts with the failure time.
pub fn geodesic_ivp(
    mp: &MetricParams,
    start: &GeodesicState,
    t_end: f64,
    steps: usize,
) -> Result<GeodesicTrace> {
    assert!(steps >= 1, "steps must be at least 1");
    mp.check_nondegenerate(start.pt.dim())?;
    let h = t_end / steps as f64;
    let mut y = RawState {
        d: start.pt.d().as_sym().clone(),
        u: start.pt.u().to_vec(),
        dd: start.vel.m.clone(),
        ud: start.vel.v.clone(),
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(start.clone());
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = raw_rhs(mp, &y, t)?;
        let k2 = raw_rhs(mp, &y.axpy(0.5 * h, &k1), t + 0.5 * h)?;
        let k3 = raw_rhs(mp, &y.axpy(0.5 * h, &k2), t + 0.5 * h)?;
        let k4 = raw_rhs(mp, &y.axpy(h, &k3), t + h)?;
        let mut next = y.axpy(h / 6.0, &k1);
        next = next.axpy(h / 3.0, &k2);
        next = next.axpy(h / 3.0, &k3);
        next = next.axpy(h / 6.0, &k4);
        let t_next = (k + 1) as f64 * h;
        // SPD safeguard: abort rather than project back
        match crate::linalg::spd_classify(&next.d, 1e-12) {
            Ok(crate::linalg::Definiteness::PositiveDefinite) => {}
            _ => return Err(Error::SpdViolation { t: t_next }),
        }
        let d = SpdMatrix::new(next.d.clone()).map_err(|_| Error::SpdViolation { t: t_next })?;
        times.push(t_next);
        states.push(GeodesicState {
            pt: Point::new(d, next.u.clone()),
            vel: Tangent::new(next.dd.clone(), next.ud.clone()),
        });
        y = next;
    }
    Ok(GeodesicTrace { times, states, mp: *mp })
}

/// Matrix exponential flow `t ↦ H · exp(tL) · H` with the eigendecomposition
/// of `L` fixed once, so evaluation is a smooth function of `t` down to
/// rounding (finite-difference residual checks depend on this).
#[derive(Debug, Clone)]
pub struct MatrixFlow {
    half: SymMatrix,
    vecs: Mat,
    vals: Vec<f64>,
}

impl MatrixFlow {
    /// `half · exp(t · log_mid) · half`.
    fn new(half: SymMatrix, log_mid: &SymMatrix) -> Result<Self> {
        let (vals, vecs) = crate::linalg::eig_sym(log_mid)?;
        Ok(MatrixFlow { half, vecs, vals })
    }

    fn exp_part(&self, t: f64) -> SymMatrix {
        let n = self.vals.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vecs.get(i, k) * (t * self.vals[k]).exp() * self.vecs.get(j, k))
                .sum()
        })
    }

    fn at(&self, t: f64) -> SymMatrix {
        let e = self.exp_part(t);
        SymMatrix::symmetrize(&self.half.as_mat().mul(e.as_mat()).mul(self.half.as_mat()))
    }

    /// `d/dt` of [`Self::at`]: `half · L e^{tL} · half`.
    fn derivative(&self, t: f64) -> SymMatrix {
        let n = self.vals.len();
        let le = SymMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| {
                    self.vecs.get(i, k)
                        * (self.vals[k] * (t * self.vals[k]).exp())
                        * self.vecs.get(j, k)
                })
                .sum()
        });
        SymMatrix::symmetrize(&self.half.as_mat().mul(le.as_mat()).mul(self.half.as_mat()))
    }
}

/// Closed-form inverse of a small symmetric matrix (adjugate for n ≤ 3,
/// elimination above); unlike the spectral route the entries are smooth
/// functions of the input.
fn smooth_inv(s: &SymMatrix) -> Result<SymMatrix> {
    let n = s.dim();
    match n {
        1 => {
            let a = s.get(0, 0);
            if a == 0.0 {
                return Err(Error::Numerical("singular 1x1 inverse".into()));
            }
            Ok(SymMatrix::diag(&[1.0 / a]))
        }
        2 => {
            let (a, b, d) = (s.get(0, 0), s.get(0, 1), s.get(1, 1));
            let det = a * d - b * b;
            if det == 0.0 {
                return Err(Error::Numerical("singular 2x2 inverse".into()));
            }
            Ok(SymMatrix::from_fn(2, |i, j| {
                let adj = match (i, j) {
                    (0, 0) => d,
                    (1, 1) => a,
                    _ => -b,
                };
                adj / det
            }))
        }
        3 => {
            let m = s.as_mat();
            let c00 = m.get(1, 1) * m.get(2, 2) - m.get(1, 2) * m.get(2, 1);
            let c01 = m.get(1, 2) * m.get(2, 0) - m.get(1, 0) * m.get(2, 2);
            let c02 = m.get(1, 0) * m.get(2, 1) - m.get(1, 1) * m.get(2, 0);
            let det = m.get(0, 0) * c00 + m.get(0, 1) * c01 + m.get(0, 2) * c02;
            if det == 0.0 {
                return Err(Error::Numerical("singular 3x3 inverse".into()));
            }
            let c11 = m.get(0, 0) * m.get(2, 2) - m.get(0, 2) * m.get(2, 0);
            let c12 = m.get(0, 1) * m.get(2, 0) - m.get(0, 0) * m.get(2, 1);
            let c22 = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            Ok(SymMatrix::from_fn(3, |i, j| {
                let adj = match (i.min(j), i.max(j)) {
                    (0, 0) => c00,
                    (0, 1) => c01,
                    (0, 2) => c02,
                    (1, 1) => c11,
                    (1, 2) => c12,
                    _ => c22,
                };
                adj / det
            }))
        }
        _ => {
            let spd = SpdMatrix::new(s.clone())?;
            Ok(spd.inv())
        }
    }
}

/// A closed-form geodesic family, evaluable at any parameter value.
#[derive(Debug, Clone)]
pub enum ClosedGeodesic {
    /// One-dimensional `(2/a² cosh²(bt+c), a√((1+2α)/β) tanh(bt+c) + d)`,
    /// optionally reflected through `u ↦ −u`.
    N1 { a: f64, b: f64, c: f64, d_off: f64, alpha: f64, beta: f64, reflected: bool },
    /// `D(t) = D₀^{1/2} exp(t L) D₀^{1/2}` at constant mean.
    SpecialNormal { flow: MatrixFlow, u_const: Vec<f64> },
    /// Pullback of the ambient matrix geodesic under `π_β` (α = 0 metric).
    Alpha0 { flow: MatrixFlow, beta: f64 },
    /// Diagonal cosh²/tanh family
    /// `((2/‖A‖²) U cosh²(Bt+C) U⁻¹, √(n/β) U tanh(Bt+C) A + offset)`.
    DiagonalFamily {
        u_mat: Mat,
        a_common: f64,
        b_diag: Vec<f64>,
        c_diag: Vec<f64>,
        offset: Vec<f64>,
        beta: f64,
    },
}

impl ClosedGeodesic {
    pub fn point(&self, t: f64) -> Result<Point> {
        match self {
            ClosedGeodesic::N1 { a, b, c, d_off, alpha, beta, reflected } => {
                let th = b * t + c;
                let dval = 2.0 / (a * a) * th.cosh().powi(2);
                let k = ((1.0 + 2.0 * alpha) / beta).sqrt();
                let mut u = a * k * th.tanh() + d_off;
                if *reflected {
                    u = -u;
                }
                Ok(Point::new(SpdMatrix::diag(&[dval])?, vec![u]))
            }
            ClosedGeodesic::SpecialNormal { flow, u_const } => {
                let d = SpdMatrix::new(flow.at(t))?;
                Ok(Point::new(d, u_const.clone()))
            }
            ClosedGeodesic::Alpha0 { flow, beta } => {
                unembed_sym(&flow.at(t), *beta).map_err(|e| match e {
                    Error::UnembedFailure { entry, beta, .. } => {
                        Error::UnembedFailure { t, entry, beta }
                    }
                    other => other,
                })
            }
            ClosedGeodesic::DiagonalFamily { u_mat, a_common, b_diag, c_diag, offset, beta } => {
                let n = b_diag.len();
                let norm2 = n as f64 * a_common * a_common;
                let ch: Vec<f64> = b_diag
                    .iter()
                    .zip(c_diag)
                    .map(|(b, c)| (b * t + c).cosh().powi(2) * 2.0 / norm2)
                    .collect();
                let dmat = SymMatrix::symmetrize(
                    &u_mat.mul(&Mat::from_rows(
                        &(0..n)
                            .map(|i| {
                                (0..n)
                                    .map(|j| if i == j { ch[i] } else { 0.0 })
                                    .collect::<Vec<_>>()
                            })
                            .collect::<Vec<_>>(),
                    ))
                    .mul(&u_mat.transpose()),
                );
                let th: Vec<f64> = b_diag
                    .iter()
                    .zip(c_diag)
                    .map(|(b, c)| (b * t + c).tanh() * a_common)
                    .collect();
                let scale = (n as f64 / beta).sqrt();
                let u: Vec<f64> = u_mat
                    .matvec(&th)
                    .iter()
                    .zip(offset)
                    .map(|(v, o)| scale * v + o)
                    .collect();
                Ok(Point::new(SpdMatrix::new(dmat)?, u))
            }
        }
    }

    /// Analytic velocity of the curve at parameter `t`.
    pub fn velocity(&self, t: f64) -> Result<Tangent> {
        match self {
            ClosedGeodesic::N1 { a, b, c, alpha, beta, reflected, .. } => {
                let th = b * t + c;
                let ddot = 4.0 * b / (a * a) * th.cosh() * th.sinh();
                let k = ((1.0 + 2.0 * alpha) / beta).sqrt();
                let mut udot = a * k * b / th.cosh().powi(2);
                if *reflected {
                    udot = -udot;
                }
                Ok(Tangent::new(SymMatrix::diag(&[ddot]), vec![udot]))
            }
            ClosedGeodesic::SpecialNormal { flow, u_const } => {
                Ok(Tangent::new(flow.derivative(t), vec![0.0; u_const.len()]))
            }
            ClosedGeodesic::Alpha0 { flow, beta } => {
                let pt = unembed_sym(&flow.at(t), *beta)?;
                embedded_velocity(&pt, &flow.derivative(t), *beta)
            }
            ClosedGeodesic::DiagonalFamily { u_mat, a_common, b_diag, c_diag, offset, beta } => {
                let n = b_diag.len();
                let norm2 = n as f64 * a_common * a_common;
                let chd: Vec<f64> = b_diag
                    .iter()
                    .zip(c_diag)
                    .map(|(b, c)| {
                        let th = b * t + c;
                        4.0 * b / norm2 * th.cosh() * th.sinh()
                    })
                    .collect();
                let dmat = SymMatrix::symmetrize(
                    &u_mat
                        .mul(&diag_mat(&chd))
                        .mul(&u_mat.transpose()),
                );
                let scale = (n as f64 / beta).sqrt();
                let thd: Vec<f64> = b_diag
                    .iter()
                    .zip(c_diag)
                    .map(|(b, c)| a_common * b / (b * t + c).cosh().powi(2))
                    .collect();
                let u: Vec<f64> = u_mat.matvec(&thd).iter().map(|v| scale * v).collect();
                let _ = offset;
                Ok(Tangent::new(dmat, u))
            }
        }
    }
}

fn diag_mat(d: &[f64]) -> Mat {
    let n = d.len();
    let mut m = Mat::zeros(n);
    for i in 0..n {
        m.set(i, i, d[i]);
    }
    m
}

/// Velocity of the unembedded curve from the ambient derivative `Ṡ`
/// (top-left block gives `d(D⁻¹)`, the border gives `βu̇`).
fn embedded_velocity(pt: &Point, sdot: &SymMatrix, beta: f64) -> Result<Tangent> {
    let n = pt.dim();
    let udot: Vec<f64> = (0..n).map(|i| sdot.get(i, n) / beta).collect();
    let u = pt.u();
    let mut dinv_dot = SymMatrix::from_fn(n, |i, j| sdot.get(i, j));
    let correction = SymMatrix::dyad_sym(&udot, u);
    dinv_dot = dinv_dot.sub(&correction.scaled(beta));
    // Ḋ = −D · d(D⁻¹) · D
    let d = pt.d();
    let ddot = SymMatrix::symmetrize(
        &d.as_mat().mul(dinv_dot.as_mat()).mul(d.as_mat()),
    )
    .scaled(-1.0);
    Ok(Tangent::new(ddot, udot))
}

/// One-dimensional geodesic between `(D₀,u₀)` and `(D₁,u₁)` with its Rao
/// distance `√scale · √(2+4α) |b|`. Requires the Riemannian regime
/// (`α > −1/2`, `β > 0`).
///
/// The endpoint recipe assumes `u₁ > u₀`; `u₁ < u₀` is handled by the
/// reflection isometry `u ↦ −u`, and equal means degenerate to the
/// one-dimensional special-normal geodesic.
pub fn geodesic_n1(
    mp: &MetricParams,
    p0: &Point,
    p1: &Point,
) -> Result<(ClosedGeodesic, f64)> {
    assert_eq!(p0.dim(), 1, "geodesic_n1 is the n = 1 closed form");
    assert_eq!(p1.dim(), 1);
    if signature(mp, 1) != Signature::Riemannian {
        return Err(Error::NotADistance(format!(
            "n1 closed form needs alpha > -1/2 and beta > 0 (alpha = {}, beta = {})",
            mp.alpha, mp.beta
        )));
    }
    let (d0, u0) = (p0.d().get(0, 0), p0.u()[0]);
    let (d1, u1) = (p1.d().get(0, 0), p1.u()[0]);

    if u1 == u0 {
        let log_ratio = (d1 / d0).ln();
        let curve = ClosedGeodesic::SpecialNormal {
            flow: MatrixFlow::new(
                SymMatrix::diag(&[d0.sqrt()]),
                &SymMatrix::diag(&[log_ratio]),
            )?,
            u_const: vec![u0],
        };
        let dist = mp.scale.sqrt() * log_ratio.abs() * (0.5 + mp.alpha).sqrt();
        return Ok((curve, dist));
    }

    let reflected = u1 < u0;
    let (v0, v1) = if reflected { (-u0, -u1) } else { (u0, u1) };

    let x = (v1 - v0) * (d0 * mp.beta / (2.0 + 4.0 * mp.alpha)).sqrt();
    let y = (d1 / d0).sqrt();
    let t1 = x * x * y * y + 1.0 - y * y;
    let c = (((t1 * t1 + 4.0 * x * x * y.powi(4)).sqrt() - t1) / (2.0 * x * y * y)).ln();
    let a = (2.0 / d0).sqrt() * c.cosh();
    let b = -(y * (1.0 - x * c.exp())).ln();
    let k = ((1.0 + 2.0 * mp.alpha) / mp.beta).sqrt();
    let d_off = v0 - a * k * c.tanh();

    let curve = ClosedGeodesic::N1 { a, b, c, d_off, alpha: mp.alpha, beta: mp.beta, reflected };
    let dist = mp.scale.sqrt() * (2.0 + 4.0 * mp.alpha).sqrt() * b.abs();
    Ok((curve, dist))
}

/// Matrix geodesic `D₀^{1/2} exp(t log(D₀^{−1/2} D₁ D₀^{−1/2})) D₀^{1/2}`
/// on the zero-mean slice.
pub fn geodesic_special_normal(d0: &SpdMatrix, d1: &SpdMatrix) -> ClosedGeodesic {
    assert_eq!(d0.dim(), d1.dim());
    let n = d0.dim();
    let half = d0.sqrtm();
    let inv_half = d0.inv_sqrtm();
    let mid = SymMatrix::symmetrize(
        &inv_half.as_mat().mul(d1.as_mat()).mul(inv_half.as_mat()),
    );
    let mid_spd = SpdMatrix::new(mid).expect("congruence of SPD is SPD");
    let flow = MatrixFlow::new(half, &mid_spd.logm()).expect("eig of symmetric log");
    ClosedGeodesic::SpecialNormal { flow, u_const: vec![0.0; n] }
}

/// Rao distance between zero-mean points:
/// `√scale · √(½ Tr log²M + α Tr² log M)` with `M = D₀^{−1/2} D₁ D₀^{−1/2}`.
pub fn distance_special_normal(mp: &MetricParams, d0: &SpdMatrix, d1: &SpdMatrix) -> Result<f64> {
    assert_eq!(d0.dim(), d1.dim());
    let n = d0.dim();
    if mp.alpha <= -1.0 / (2.0 * n as f64) {
        return Err(Error::NotADistance(format!(
            "special-normal distance needs alpha > -1/(2n) (alpha = {}, n = {n})",
            mp.alpha
        )));
    }
    let inv_half = d0.inv_sqrtm();
    let mid = SymMatrix::symmetrize(
        &inv_half.as_mat().mul(d1.as_mat()).mul(inv_half.as_mat()),
    );
    let evals = SpdMatrix::new(mid)?.eigenvalues().to_vec();
    let tr_log2: f64 = evals.iter().map(|l| l.ln() * l.ln()).sum();
    let tr_log: f64 = evals.iter().map(|l| l.ln()).sum();
    Ok(mp.scale.sqrt() * (0.5 * tr_log2 + mp.alpha * tr_log * tr_log).sqrt())
}

/// The embedding `π_β(D, u)` into `P(n+1)`:
/// `[[D⁻¹ + β u∘u, βu], [βuᵀ, β]]`.
pub fn embed_pi_beta(beta: f64, pt: &Point) -> Result<SpdMatrix> {
    assert!(beta > 0.0, "beta must be positive");
    let n = pt.dim();
    let dinv = pt.d().inv();
    let u = pt.u();
    let s = SymMatrix::from_fn(n + 1, |i, j| {
        if i < n && j < n {
            dinv.get(i, j) + beta * u[i] * u[j]
        } else if i < n {
            beta * u[i]
        } else if j < n {
            beta * u[j]
        } else {
            beta
        }
    });
    SpdMatrix::new(s)
}

/// Inverse of [`embed_pi_beta`] on its image. Errors when the corner entry
/// disagrees with `β` (the matrix is not in the image).
pub fn unembed_pi_beta(s: &SpdMatrix, beta: f64) -> Result<Point> {
    unembed_sym(s.as_sym(), beta)
}

fn unembed_sym(s: &SymMatrix, beta: f64) -> Result<Point> {
    let m = s.dim();
    assert!(m >= 2, "embedded matrices have dimension n+1 >= 2");
    let n = m - 1;
    let corner = s.get(n, n);
    if (corner - beta).abs() > 1e-8 * beta.max(1.0) {
        return Err(Error::UnembedFailure { t: f64::NAN, entry: corner, beta });
    }
    let u: Vec<f64> = (0..n).map(|i| s.get(i, n) / corner).collect();
    let dinv = SymMatrix::from_fn(n, |i, j| s.get(i, j) - corner * u[i] * u[j]);
    let d = smooth_inv(&dinv)?;
    Ok(Point::new(SpdMatrix::new(d)?, u))
}

/// Number of parameter samples at which [`geodesic_alpha0`] verifies that
/// the ambient geodesic stays in the image of `π_β`.
const ALPHA0_IMAGE_CHECKS: usize = 17;

/// Geodesic for the `α = 0` metric via the Siegel embedding: embeds the
/// endpoints, takes the ambient matrix geodesic, and pulls back. The ambient
/// curve is accepted only if it stays in the image of `π_β` (checked at
/// sampled parameters); otherwise [`Error::UnembedFailure`] is returned —
/// the image is not totally geodesic in general, and silently unembedding a
/// curve that left it would produce a non-geodesic.
///
/// Returns the curve and the ambient distance
/// `√(½ Tr log²(S₀^{−1/2} S₁ S₀^{−1/2}))`.
pub fn geodesic_alpha0(beta: f64, p0: &Point, p1: &Point) -> Result<(ClosedGeodesic, f64)> {
    assert_eq!(p0.dim(), p1.dim());
    if beta <= 0.0 {
        return Err(Error::NotADistance(format!("beta must be positive, got {beta}")));
    }
    let s0 = embed_pi_beta(beta, p0)?;
    let s1 = embed_pi_beta(beta, p1)?;
    let half = s0.sqrtm();
    let inv_half = s0.inv_sqrtm();
    let mid = SymMatrix::symmetrize(&inv_half.as_mat().mul(s1.as_mat()).mul(inv_half.as_mat()));
    let mid_spd = SpdMatrix::new(mid)?;
    let dist: f64 = mid_spd
        .eigenvalues()
        .iter()
        .map(|l| l.ln() * l.ln())
        .sum::<f64>()
        .sqrt()
        * 0.5f64.sqrt();
    let curve = ClosedGeodesic::Alpha0 { flow: MatrixFlow::new(half, &mid_spd.logm())?, beta };
    for k in 0..ALPHA0_IMAGE_CHECKS {
        let t = k as f64 / (ALPHA0_IMAGE_CHECKS - 1) as f64;
        curve.point(t)?;
    }
    Ok((curve, dist))
}

/// Builds the diagonal cosh²/tanh family after validating its structural
/// preconditions: `U` orthogonal fixing the equal-component vector `A`,
/// `B`, `C` diagonal — and, for `n ≥ 2`, at most one nonzero entry of `B`
/// (with two or more active entries the curve fails the geodesic equation;
/// the off-diagonal matrix components of `β(Du̇)∘(Du̇)` cannot be matched).
pub fn geodesic_diagonal_family(
    beta: f64,
    u_mat: &Mat,
    a_common: f64,
    b_diag: &[f64],
    c_diag: &[f64],
    offset: &[f64],
) -> Result<ClosedGeodesic> {
    let n = b_diag.len();
    if n == 0 || c_diag.len() != n || offset.len() != n || u_mat.dim() != n {
        return Err(Error::StructuralPrecondition("dimension mismatch".into()));
    }
    if beta <= 0.0 {
        return Err(Error::StructuralPrecondition("beta must be positive".into()));
    }
    if a_common == 0.0 {
        return Err(Error::StructuralPrecondition("A must be nonzero".into()));
    }
    let orth = u_mat.transpose().mul(u_mat).sub(&Mat::identity(n)).max_abs();
    if orth > 1e-10 {
        return Err(Error::StructuralPrecondition(format!(
            "U is not orthogonal (deviation {orth:.3e})"
        )));
    }
    let a_vec = vec![a_common; n];
    let ua = u_mat.matvec(&a_vec);
    let fix = ua
        .iter()
        .zip(&a_vec)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if fix > 1e-10 {
        return Err(Error::StructuralPrecondition(format!(
            "U must fix the equal-component vector A (deviation {fix:.3e})"
        )));
    }
    let active = b_diag.iter().filter(|b| **b != 0.0).count();
    if n >= 2 && active > 1 {
        return Err(Error::StructuralPrecondition(
            "at most one diagonal entry of B may be nonzero for n >= 2; \
             the curve violates the geodesic equation otherwise"
                .into(),
        ));
    }
    Ok(ClosedGeodesic::DiagonalFamily {
        u_mat: u_mat.clone(),
        a_common,
        b_diag: b_diag.to_vec(),
        c_diag: c_diag.to_vec(),
        offset: offset.to_vec(),
        beta,
    })
}

/// Distance along the diagonal family between parameters `t₀`, `t₁`:
/// `|t₁−t₀| √(2 Tr B²)`.
pub fn diagonal_family_distance(curve: &ClosedGeodesic, t0: f64, t1: f64) -> Result<f64> {
    match curve {
        ClosedGeodesic::DiagonalFamily { b_diag, .. } => {
            let tr_b2: f64 = b_diag.iter().map(|b| b * b).sum();
            Ok((t1 - t0).abs() * (2.0 * tr_b2).sqrt())
        }
        _ => Err(Error::StructuralPrecondition("not a diagonal-family curve".into())),
    }
}

/// Length of a trace under its metric: composite Simpson over the sampled
/// speed `√g(γ̇, γ̇)` (3/8 rule on the tail when the interval count is odd).
pub fn path_length(mp: &MetricParams, trace: &GeodesicTrace) -> Result<f64> {
    let times = trace.times();
    let states = trace.states();
    assert!(times.len() >= 2, "trace too short");
    let speeds: Vec<f64> = states
        .iter()
        .map(|s| unified_eval(mp, &s.pt, &s.vel, &s.vel))
        .collect();
    if let Some(bad) = speeds.iter().find(|v| **v < 0.0) {
        return Err(Error::NotADistance(format!(
            "negative squared speed {bad:.3e} (semi-Riemannian metric?)"
        )));
    }
    let speeds: Vec<f64> = speeds.iter().map(|v| v.sqrt()).collect();
    let h = times[1] - times[0];
    let m = times.len() - 1; // intervals
    let simpson = |s: &[f64], h: f64| -> f64 {
        // s has odd length
        let n = s.len();
        let mut total = s[0] + s[n - 1];
        for (i, v) in s.iter().enumerate().take(n - 1).skip(1) {
            total += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        total * h / 3.0
    };
    Ok(if m % 2 == 0 {
        simpson(&speeds, h)
    } else if m >= 3 {
        let head = simpson(&speeds[..m - 2], h);
        let tail = 3.0 * h / 8.0
            * (speeds[m - 3] + 3.0 * speeds[m - 2] + 3.0 * speeds[m - 1] + speeds[m]);
        head + tail
    } else {
        0.5 * h * (speeds[0] + speeds[1])
    })
}

/// Shooting solver defaults.
const SHOOT_MAX_ITERS: usize = 50;
const SHOOT_STEPS: usize = 500;

/// Boundary value problem by damped-Newton shooting on the chart
/// representation of the endpoint mismatch. The initial velocity comes from
/// the `α = 0` embedding closed form when it applies, otherwise from the
/// linear chart difference. Returns the state `(p0, v)` whose unit-time
/// geodesic reaches `p1` within `tol` in the chart norm.
pub fn geodesic_bvp_shoot(
    mp: &MetricParams,
    p0: &Point,
    p1: &Point,
    tol: f64,
) -> Result<GeodesicState> {
    assert_eq!(p0.dim(), p1.dim());
    let n = p0.dim();
    if signature(mp, n) != Signature::Riemannian {
        return Err(Error::NotADistance(
            "shooting requires a Riemannian unified metric".into(),
        ));
    }
    let chart = Chart::new(n);
    let target = chart.to_coords(p1);
    let dim = chart.dim();

    let endpoint = |v: &[f64]| -> Result<Vec<f64>> {
        let start = GeodesicState { pt: p0.clone(), vel: chart.tangent_from_coords(v) };
        let trace = geodesic_ivp(mp, &start, 1.0, SHOOT_STEPS)?;
        Ok(chart.to_coords(&trace.last().pt))
    };
    let mismatch = |v: &[f64]| -> Result<Vec<f64>> {
        let e = endpoint(v)?;
        Ok(e.iter().zip(&target).map(|(a, b)| a - b).collect())
    };
    let norm = |f: &[f64]| f.iter().map(|x| x * x).sum::<f64>().sqrt();

    // initial guess
    let mut v = init_velocity(mp, p0, p1, &chart);
    let mut f = mismatch(&v)?;
    let mut fnorm = norm(&f);
    for _ in 0..SHOOT_MAX_ITERS {
        if fnorm <= tol {
            return Ok(GeodesicState { pt: p0.clone(), vel: chart.tangent_from_coords(&v) });
        }
        // finite-difference Jacobian
        let mut jac = Mat::zeros(dim);
        for k in 0..dim {
            let dv = 1e-6 * (1.0 + v[k].abs());
            let mut vp = v.clone();
            vp[k] += dv;
            let fp = mismatch(&vp)?;
            for r in 0..dim {
                jac.set(r, k, (fp[r] - f[r]) / dv);
            }
        }
        let step = crate::linalg::solve_dense(&jac, &f)?;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..20 {
            let trial: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a - lambda * s).collect();
            match mismatch(&trial) {
                Ok(ft) => {
                    let fn_t = norm(&ft);
                    if fn_t < fnorm {
                        v = trial;
                        f = ft;
                        fnorm = fn_t;
                        improved = true;
                        break;
                    }
                }
                Err(_) => {} // stepped out of the cone; damp harder
            }
            lambda *= 0.5;
        }
        if !improved {
            return Err(Error::NonConvergence { iterations: SHOOT_MAX_ITERS, residual: fnorm });
        }
    }
    if fnorm <= tol {
        return Ok(GeodesicState { pt: p0.clone(), vel: chart.tangent_from_coords(&v) });
    }
    Err(Error::NonConvergence { iterations: SHOOT_MAX_ITERS, residual: fnorm })
}

fn init_velocity(mp: &MetricParams, p0: &Point, p1: &Point, chart: &Chart) -> Vec<f64> {
    if mp.beta > 0.0 {
        if let Ok((curve, _)) = geodesic_alpha0(mp.beta, p0, p1) {
            if let Ok(vel) = curve.velocity(0.0) {
                return chart.tangent_to_coords(&vel);
            }
        }
    }
    let c0 = chart.to_coords(p0);
    let c1 = chart.to_coords(p1);
    c1.iter().zip(&c0).map(|(a, b)| a - b).collect()
}
