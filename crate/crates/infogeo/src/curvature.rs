//! Riemann and Ricci tensors, scalar curvatures, and the geodesic-ball
//! volume expansion.
//!
//! Conventions follow the covariant-derivative construction used by the
//! geodesic module: `R(a, b, c) = dΓ(a)(b)(c) − dΓ(b)(a)(c) +
//! Γ(a, Γ(b)(c)) − Γ(b, Γ(a)(c))` as a map of three tangents to one
//! tangent, and the Ricci tensor is the trace over the first slot. The
//! scalar curvature is constant over the manifold for fixed `(n, α)`; under
//! an overall metric factor `scale·g` the Ricci tensor is unchanged while
//! scalar curvature divides by `scale`.

use crate::family::Point;
use crate::linalg::{dot, SpdMatrix, SymMatrix};
use crate::metric::{MetricParams, Tangent};
use crate::special::ln_gamma;
use crate::{Error, Result};

/// Riemann curvature tensor `R_{(D,u)}(a, b, c)`, the closed six-summand
/// form. Independent of the metric scale.
pub fn riemann(
    mp: &MetricParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
    c: &Tangent,
) -> Result<Tangent> {
    let n = pt.dim();
    mp.check_nondegenerate(n)?;
    let d = pt.d();
    let dinv = d.inv();
    let di = dinv.as_mat();
    let (x, xv) = (a.m.as_mat(), &a.v);
    let (y, yv) = (b.m.as_mat(), &b.v);
    let (z, zv) = (c.m.as_mat(), &c.v);
    let beta = mp.beta;
    let ab_coeff = mp.alpha * beta / mp.trace_factor(n);

    // matrix part
    let m1 = z
        .mul(di)
        .mul(x)
        .mul(di)
        .mul(y)
        .add(&y.mul(di).mul(x).mul(di).mul(z))
        .sub(&x.mul(di).mul(y).mul(di).mul(z))
        .sub(&z.mul(di).mul(y).mul(di).mul(x));
    let mut matrix = SymMatrix::symmetrize(&m1).scaled(0.25);

    let dz = d.matvec(zv);
    let dy = d.matvec(yv);
    let dx = d.matvec(xv);
    let m2 = SymMatrix::dyad_sym(&b.m.matvec(xv), &dz)
        .sub(&SymMatrix::dyad_sym(&a.m.matvec(yv), &dz))
        .add(&SymMatrix::dyad_sym(&dy, &c.m.matvec(xv)))
        .sub(&SymMatrix::dyad_sym(&dx, &c.m.matvec(yv)));
    matrix = matrix.add(&m2.scaled(0.25 * beta));

    let bracket = dot(&a.m.matvec(yv), zv) - dot(&b.m.matvec(xv), zv) + dot(xv, &c.m.matvec(yv))
        - dot(yv, &c.m.matvec(xv));
    matrix = matrix.add(&d.as_sym().scaled(ab_coeff * bracket));

    // vector part
    let ydx_xdy = y.mul(di).mul(x).sub(&x.mul(di).mul(y));
    let v1a = dinv.matvec(&ydx_xdy.matvec(zv));
    let xy_yx: Vec<f64> = a
        .m
        .matvec(yv)
        .iter()
        .zip(&b.m.matvec(xv))
        .map(|(p, q)| p - q)
        .collect();
    let v1b = dinv.matvec(&z.mul(di).matvec(&xy_yx));
    let mut vector: Vec<f64> = v1a.iter().zip(&v1b).map(|(p, q)| 0.25 * (p + q)).collect();

    let zx = SymMatrix::dyad_sym(zv, xv);
    let zy = SymMatrix::dyad_sym(zv, yv);
    let v2a = zx.matvec(&dy);
    let v2b = zy.matvec(&dx);
    for k in 0..n {
        vector[k] += 0.25 * beta * (v2a[k] - v2b[k]);
    }

    let ydz = dot(yv, &dz);
    let xdz = dot(xv, &dz);
    for k in 0..n {
        vector[k] += ab_coeff * (ydz * xv[k] - xdz * yv[k]);
    }

    Ok(Tangent::new(matrix, vector))
}

/// Ricci tensor
/// `Ric(a,b) = −((n+1)/4)Tr(D⁻¹XD⁻¹Y) + ¼Tr(D⁻¹X)Tr(D⁻¹Y)
///  − β/(2(1+2nα)) ⟨x,Dy⟩`. Scale-invariant.
pub fn ricci(mp: &MetricParams, pt: &Point, a: &Tangent, b: &Tangent) -> Result<f64> {
    let n = pt.dim();
    mp.check_nondegenerate(n)?;
    let dinv = pt.d().inv();
    let tr_pair = crate::metric::tr_pair(&dinv, &a.m, &b.m);
    let tr_a = dinv.as_mat().mul(a.m.as_mat()).trace();
    let tr_b = dinv.as_mat().mul(b.m.as_mat()).trace();
    let nf = n as f64;
    Ok(-(nf + 1.0) / 4.0 * tr_pair + 0.25 * tr_a * tr_b
        - mp.beta / (2.0 * mp.trace_factor(n)) * dot(&a.v, &pt.d().matvec(&b.v)))
}

/// Ricci operator `R̃` defined by `g(R̃(a), b) = Ric(a, b)`:
///
/// ```text
/// R̃(X, x) = ( −(n+1)/2 · X + (1+2(n+1)α)/(2(1+2nα)) · Tr(D⁻¹X) · D,
///             −x / (2(1+2nα)) ) / scale
/// ```
pub fn ricci_operator(mp: &MetricParams, pt: &Point, a: &Tangent) -> Result<Tangent> {
    let n = pt.dim();
    mp.check_nondegenerate(n)?;
    let nf = n as f64;
    let dinv = pt.d().inv();
    let tr_a = dinv.as_mat().mul(a.m.as_mat()).trace();
    let c2 = (1.0 + 2.0 * (nf + 1.0) * mp.alpha) / (2.0 * mp.trace_factor(n));
    let matrix = a
        .m
        .scaled(-(nf + 1.0) / 2.0)
        .add(&pt.d().as_sym().scaled(c2 * tr_a))
        .scaled(1.0 / mp.scale);
    let vector: Vec<f64> = a
        .v
        .iter()
        .map(|x| -x / (2.0 * mp.trace_factor(n)) / mp.scale)
        .collect();
    Ok(Tangent::new(matrix, vector))
}

/// Scalar curvature of `Ξₙ`:
/// `−n(n+1)(2(n+2)(n−1)α + n+1) / (4(1+2nα))`, divided by the scale.
pub fn scalar_full(mp: &MetricParams, n: usize) -> Result<f64> {
    MetricParams::check_nondegenerate(mp, n)?;
    let nf = n as f64;
    Ok(-nf * (nf + 1.0) * (2.0 * (nf + 2.0) * (nf - 1.0) * mp.alpha + nf + 1.0)
        / (4.0 * mp.trace_factor(n))
        / mp.scale)
}

/// Scalar curvature of the zero-mean slice `Ξₙ^(s)`:
/// `−n(2(n−1)(n+1)(n+2)α + n²+2n−1) / (4(1+2nα))`, divided by the scale.
pub fn scalar_special(mp: &MetricParams, n: usize) -> Result<f64> {
    MetricParams::check_nondegenerate(mp, n)?;
    let nf = n as f64;
    Ok(
        -nf * (2.0 * (nf - 1.0) * (nf + 1.0) * (nf + 2.0) * mp.alpha + nf * nf + 2.0 * nf - 1.0)
            / (4.0 * mp.trace_factor(n))
            / mp.scale,
    )
}

/// Fisher-metric scalar curvature of the extended Gaussian family:
/// `−n(n+1)(2−p)/(4(2+n(p−1))) · ((n+2)(n−1)(p−1) + 2(n+1))` for
/// `n/(n+2) < p < 2`. Monotone increasing in `p` and vanishing as `p → 2⁻`.
pub fn fisher_scalar_extended(n: usize, p: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p > nf / (nf + 2.0) && p < 2.0) {
        return Err(Error::EntropyDomain(format!(
            "p = {p} outside ]{}, 2[ for n = {n}",
            nf / (nf + 2.0)
        )));
    }
    Ok(-nf * (nf + 1.0) * (2.0 - p) / (4.0 * (2.0 + nf * (p - 1.0)))
        * ((nf + 2.0) * (nf - 1.0) * (p - 1.0) + 2.0 * (nf + 1.0)))
}

/// Geodesic-ball volume through the `r²` correction:
/// `rⁿ π^{n/2} / Γ(n/2+1) · (1 − scal·r² / (6(n+2)))`.
pub fn ball_volume(n: usize, scal: f64, r: f64) -> f64 {
    assert!(r >= 0.0, "radius must be nonnegative");
    let nf = n as f64;
    let unit = (0.5 * nf * std::f64::consts::PI.ln()
        - ln_gamma(0.5 * nf + 1.0).expect("positive argument"))
    .exp();
    r.powf(nf) * unit * (1.0 - scal * r * r / (6.0 * (nf + 2.0)))
}

/// Curvature summary at a point, for reporting.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub scalar: f64,
    pub scalar_special: f64,
    /// Eigenvalues of the Ricci operator in the chart basis (descending).
    pub ricci_eigenvalues: Vec<f64>,
    pub method: CurvatureMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureMethod {
    ClosedForm,
    FiniteDifference,
}

impl CurvatureReport {
    /// Closed-form report: scalar curvatures plus the spectrum of the Ricci
    /// operator, computed as `G^{-1/2} Ric G^{-1/2}` in the chart basis.
    pub fn closed_form(mp: &MetricParams, pt: &Point) -> Result<Self> {
        let n = pt.dim();
        let chart = crate::oracle::Chart::new(n);
        let dim = chart.dim();
        let coords = chart.to_coords(pt);
        let g = crate::oracle::fd_metric_components(mp, &chart, &coords)?;
        let g_spd = SpdMatrix::new(SymMatrix::symmetrize(&g))?;
        let g_ih = g_spd.inv_sqrtm();
        let mut ric = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = ricci(mp, pt, &chart.basis_tangent(i), &chart.basis_tangent(j))?;
                ric.set_sym(i, j, v);
            }
        }
        let m = g_ih.as_mat().mul(ric.as_mat()).mul(g_ih.as_mat());
        let (evals, _) = crate::linalg::eig_sym(&SymMatrix::symmetrize(&m))?;
        Ok(CurvatureReport {
            scalar: scalar_full(mp, n)?,
            scalar_special: scalar_special(mp, n)?,
            ricci_eigenvalues: evals,
            method: CurvatureMethod::ClosedForm,
        })
    }
}
