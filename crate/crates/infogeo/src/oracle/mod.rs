//! Independent numerical ground truth.
//!
//! Everything here avoids the closed forms it is used to check: integrals are
//! tensor-grid quadratures over the density evaluated as a black box, the
//! Fisher metric is the defining integral with finite-difference score
//! functions, and the chart-based Christoffel/curvature oracles differentiate
//! the metric components directly.
//!
//! Grids are mapped to the geometry of the support: for `p > 1` the compact
//! ellipsoid is parameterized boundary-conformally (trigonometric map per
//! axis, geometric boundary layers for the singular Fisher integrands), for
//! `p ≤ 1` a per-axis `sinh` map reaches the heavy tails. Resolution doubling
//! supplies the error estimates.

pub mod exec;

use crate::family::{self, FamilyParams, Point};
use crate::linalg::{self, Mat, SpdMatrix, SymMatrix};
use crate::metric::{unified_eval, MetricParams, Tangent};
use crate::{Error, Result};

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub method: IntegralMethod,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    Grid,
    MonteCarlo,
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    // composite Simpson weights for an odd number of nodes
    if i == 0 || i == n - 1 {
        1.0 / 3.0
    } else if i % 2 == 1 {
        4.0 / 3.0
    } else {
        2.0 / 3.0
    }
}

fn make_odd(r: usize) -> usize {
    if r % 2 == 0 {
        r + 1
    } else {
        r
    }
}

/// Mahalanobis truncation radius squared for unbounded supports, from the
/// `density >= 1e-14 * peak` rule.
fn truncation_q(fp: &FamilyParams) -> f64 {
    let p = fp.p();
    if fp.is_gaussian() {
        2.0 * 14.0 * std::f64::consts::LN_10
    } else {
        (10f64.powf(14.0 * (1.0 - p)) - 1.0) / fp.support_scale()
    }
}

fn quad_once<F>(fp: &FamilyParams, pt: &Point, integrand: &F, res: usize) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = fp.n();
    let d = pt.d();
    let u = pt.u();
    let p = fp.p();
    match (n, p > 1.0) {
        (1, true) => {
            let a = fp.support_scale();
            let radius = 1.0 / (a * d.get(0, 0)).sqrt();
            let h = std::f64::consts::PI / (res - 1) as f64;
            exec::sum_indexed(res, |i| {
                let phi = -0.5 * std::f64::consts::PI + i as f64 * h;
                let x = [u[0] + radius * phi.sin()];
                simpson_weight(i, res) * h * integrand(&x) * radius * phi.cos()
            })
        }
        (1, false) => {
            let c = if fp.is_gaussian() { 0.5 } else { fp.support_scale() };
            let sigma = 1.0 / (c * d.get(0, 0)).sqrt();
            let r = (truncation_q(fp) / d.get(0, 0)).sqrt();
            let w_max = (r / sigma).asinh();
            let h = 2.0 * w_max / (res - 1) as f64;
            exec::sum_indexed(res, |i| {
                let w = -w_max + i as f64 * h;
                let x = [u[0] + sigma * w.sinh()];
                simpson_weight(i, res) * h * integrand(&x) * sigma * w.cosh()
            })
        }
        (2, true) => {
            let a = fp.support_scale();
            let dinv = d.inv();
            let r1 = (dinv.get(0, 0) / a).sqrt();
            let schur = d.get(0, 0) - d.get(0, 1) * d.get(0, 1) / d.get(1, 1);
            let h = std::f64::consts::PI / (res - 1) as f64;
            exec::sum_indexed(res, |i| {
                let phi1 = -0.5 * std::f64::consts::PI + i as f64 * h;
                let dx1 = r1 * phi1.sin();
                let center = -d.get(0, 1) * dx1 / d.get(1, 1);
                let rad2 = (1.0 / a - dx1 * dx1 * schur) / d.get(1, 1);
                let rho = rad2.max(0.0).sqrt();
                let mut inner = 0.0;
                for j in 0..res {
                    let phi2 = -0.5 * std::f64::consts::PI + j as f64 * h;
                    let x = [u[0] + dx1, u[1] + center + rho * phi2.sin()];
                    inner += simpson_weight(j, res) * h * integrand(&x) * rho * phi2.cos();
                }
                simpson_weight(i, res) * h * inner * r1 * phi1.cos()
            })
        }
        (2, false) => {
            let c = if fp.is_gaussian() { 0.5 } else { fp.support_scale() };
            let lambda_min = *d.eigenvalues().last().expect("n >= 1");
            let r = (truncation_q(fp) / lambda_min).sqrt();
            let sig = [1.0 / (c * d.get(0, 0)).sqrt(), 1.0 / (c * d.get(1, 1)).sqrt()];
            let wm = [(r / sig[0]).asinh(), (r / sig[1]).asinh()];
            let h1 = 2.0 * wm[0] / (res - 1) as f64;
            let h2 = 2.0 * wm[1] / (res - 1) as f64;
            exec::sum_indexed(res, |i| {
                let w1 = -wm[0] + i as f64 * h1;
                let x1 = u[0] + sig[0] * w1.sinh();
                let j1 = sig[0] * w1.cosh();
                let mut inner = 0.0;
                for j in 0..res {
                    let w2 = -wm[1] + j as f64 * h2;
                    let x = [x1, u[1] + sig[1] * w2.sinh()];
                    inner += simpson_weight(j, res) * h2 * integrand(&x) * sig[1] * w2.cosh();
                }
                simpson_weight(i, res) * h1 * inner * j1
            })
        }
        _ => unreachable!("quad_integral supports n <= 2"),
    }
}

/// Tensor-grid quadrature of `integrand` over the support of
/// `f_p(D, u, ·)` (truncated where the density falls below `1e-14` of its
/// peak for unbounded supports). The value is computed at double the
/// requested resolution; the difference against the single-resolution value
/// is the error estimate.
pub fn quad_integral<F>(
    fp: &FamilyParams,
    pt: &Point,
    integrand: F,
    resolution: usize,
) -> Result<IntegralEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(fp.n() <= 2, "grid quadrature supports n <= 2");
    assert_eq!(fp.n(), pt.dim());
    assert!(resolution >= 5, "resolution too small");
    let coarse_res = make_odd(resolution);
    let fine_res = 2 * (coarse_res - 1) + 1;
    let coarse = quad_once(fp, pt, &integrand, coarse_res);
    let fine = quad_once(fp, pt, &integrand, fine_res);
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(Error::Numerical("non-finite integrand in quadrature".into()));
    }
    Ok(IntegralEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        method: IntegralMethod::Grid,
        seed: None,
    })
}

/// Central-difference directional derivative of the log-density along a
/// tangent, with a margin-adaptive step near the support boundary (the step
/// keeps the relative perturbation of the boundary margin below 1%).
pub fn fd_log_density(fp: &FamilyParams, pt: &Point, dir: &Tangent, x: &[f64], h0: f64) -> f64 {
    let attempt = |h: f64| -> Option<(f64, f64, f64)> {
        let dp = SpdMatrix::new(pt.d().as_sym().add(&dir.m.scaled(h))).ok()?;
        let dm = SpdMatrix::new(pt.d().as_sym().sub(&dir.m.scaled(h))).ok()?;
        let up: Vec<f64> = pt.u().iter().zip(&dir.v).map(|(a, b)| a + h * b).collect();
        let um: Vec<f64> = pt.u().iter().zip(&dir.v).map(|(a, b)| a - h * b).collect();
        let pp = Point::new(dp, up);
        let pm = Point::new(dm, um);
        let fp_v = family::density(fp, &pp, x);
        let fm_v = family::density(fp, &pm, x);
        if fp_v > 0.0 && fm_v > 0.0 {
            Some(((fp_v.ln() - fm_v.ln()) / (2.0 * h), fp_v, fm_v))
        } else {
            None
        }
    };
    let mut h = h0;
    let mut found = None;
    for _ in 0..200 {
        if let Some(v) = attempt(h) {
            found = Some((h, v));
            break;
        }
        h *= 0.5;
        if h < 1e-300 {
            return 0.0;
        }
    }
    let (h, (val, _, _)) = match found {
        Some(v) => v,
        None => return 0.0,
    };
    if fp.p() <= 1.0 {
        return val;
    }
    // p > 1: shrink the step so the boundary margin eta = 1 - a q moves by
    // at most 1% of itself across the stencil.
    let pm1 = fp.p() - 1.0;
    let eta_of = |point: &Point| -> f64 {
        let f = family::density(fp, point, x);
        let peak = family::density(fp, point, point.u());
        if f <= 0.0 || peak <= 0.0 {
            return 0.0;
        }
        (f / peak).powf(pm1)
    };
    let eta0 = eta_of(pt);
    if eta0 <= 0.0 {
        return val;
    }
    let probe = |hh: f64| -> Option<f64> {
        let dp = SpdMatrix::new(pt.d().as_sym().add(&dir.m.scaled(hh))).ok()?;
        let dm = SpdMatrix::new(pt.d().as_sym().sub(&dir.m.scaled(hh))).ok()?;
        let up: Vec<f64> = pt.u().iter().zip(&dir.v).map(|(a, b)| a + hh * b).collect();
        let um: Vec<f64> = pt.u().iter().zip(&dir.v).map(|(a, b)| a - hh * b).collect();
        let ep = eta_of(&Point::new(dp, up));
        let em = eta_of(&Point::new(dm, um));
        Some((ep - em).abs() / (2.0 * hh))
    };
    let rate = match probe(h) {
        Some(r) if r > 0.0 => r,
        _ => return val,
    };
    let h_star = (0.01 * eta0 / rate).min(h);
    if h_star < h {
        if let Some((v2, _, _)) = attempt(h_star) {
            return v2;
        }
    }
    val
}

/// Radial cell list for the `p > 1` Fisher quadrature: a uniform core on
/// `[0, 1/2]` plus `layers` dyadic boundary layers toward `r = 1`, each split
/// into `m_r` cells. The geometric layers resolve the algebraic boundary
/// behavior; for a divergent integrand the estimates grow geometrically with
/// the layer count instead of stabilizing.
fn radial_cells(layers: usize, m_r: usize, m_core: usize) -> Vec<(f64, f64)> {
    let mut cells = Vec::with_capacity(m_core + layers * m_r);
    for i in 0..m_core {
        cells.push((0.5 * i as f64 / m_core as f64, 0.5 * (i + 1) as f64 / m_core as f64));
    }
    for l in 1..=layers {
        let lo = 1.0 - 0.5f64.powi(l as i32);
        let hi = 1.0 - 0.5f64.powi(l as i32 + 1);
        let w = (hi - lo) / m_r as f64;
        for i in 0..m_r {
            cells.push((lo + i as f64 * w, lo + (i + 1) as f64 * w));
        }
    }
    cells
}

fn fisher_grid_once(
    fp: &FamilyParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
    level: usize,
) -> f64 {
    let n = fp.n();
    let d = pt.d();
    let u = pt.u();
    let h0 = 1e-5;
    // affine map taking the reference ball/ray to the support geometry:
    // T = (cD)^{-1/2}, with c the support/tail scale
    let c = if fp.is_gaussian() { 0.5 } else { fp.support_scale() };
    let transform = d.powf(-0.5).scaled(1.0 / c.sqrt());
    let det_t = d.det().powf(-0.5) / c.powf(n as f64 / 2.0);
    let eval_at = |z: &[f64]| -> f64 {
        let tz = transform.matvec(z);
        let x: Vec<f64> = tz.iter().zip(u).map(|(v, uu)| v + uu).collect();
        let f = family::density(fp, pt, &x);
        if f <= 0.0 {
            return 0.0;
        }
        let g1 = fd_log_density(fp, pt, a, &x, h0);
        let g2 = fd_log_density(fp, pt, b, &x, h0);
        f * g1 * g2
    };

    if fp.p() > 1.0 {
        let n_ang = if n == 1 { 2 } else { 16 * level };
        let cells = radial_cells(level, 8, 64);
        let gl = 0.5 / 3.0f64.sqrt();
        let n_cells = cells.len();
        exec::sum_indexed(n_cells * n_ang, |idx| {
            let ci = idx / n_ang;
            let ai = idx % n_ang;
            let (r0, r1) = cells[ci];
            let rc = 0.5 * (r0 + r1);
            let dr = r1 - r0;
            let dir: Vec<f64> = if n == 1 {
                vec![if ai == 0 { 1.0 } else { -1.0 }]
            } else {
                let th = (ai as f64 + 0.5) * 2.0 * std::f64::consts::PI / n_ang as f64;
                vec![th.cos(), th.sin()]
            };
            let angw = if n == 1 { 1.0 } else { 2.0 * std::f64::consts::PI / n_ang as f64 };
            let mut s = 0.0;
            for rm in [rc - gl * dr, rc + gl * dr] {
                let z: Vec<f64> = dir.iter().map(|v| v * rm).collect();
                let jac = if n == 1 { 1.0 } else { rm };
                s += 0.5 * dr * angw * jac * eval_at(&z);
            }
            s
        }) * det_t.abs()
    } else {
        let n_rad = 24 * level;
        let n_ang = if n == 1 { 2 } else { 16 * level };
        let r_max = truncation_q(fp).sqrt();
        let w_max = r_max.asinh();
        let hw = w_max / n_rad as f64;
        exec::sum_indexed(n_rad * n_ang, |idx| {
            let ri = idx / n_ang;
            let ai = idx % n_ang;
            let w0 = (ri as f64 + 0.5) * hw;
            let rm = w0.sinh();
            let jacw = w0.cosh() * hw;
            let dir: Vec<f64> = if n == 1 {
                vec![if ai == 0 { 1.0 } else { -1.0 }]
            } else {
                let th = (ai as f64 + 0.5) * 2.0 * std::f64::consts::PI / n_ang as f64;
                vec![th.cos(), th.sin()]
            };
            let angw = if n == 1 { 1.0 } else { 2.0 * std::f64::consts::PI / n_ang as f64 };
            let z: Vec<f64> = dir.iter().map(|v| v * rm).collect();
            let jac = if n == 1 { 1.0 } else { rm };
            angw * jacw * jac * eval_at(&z)
        }) * det_t.abs()
    }
}

/// The defining Fisher-information integral
/// `∫ f · (∂ log f / ∂a)(∂ log f / ∂b)`, with score functions by central
/// differences of the log-density (step `1e-5`, margin-adaptive near the
/// support boundary). Grid path, `n ≤ 2`.
///
/// `resolution` is the radial refinement level; the error estimate compares
/// one refinement level against its double. For `p ≥ 2` the integral does
/// not exist and the estimates grow without bound under resolution doubling:
/// that situation is reported as [`Error::FisherDiverges`] carrying the two
/// ladder values.
pub fn numeric_fisher(
    fp: &FamilyParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
    resolution: usize,
) -> Result<IntegralEstimate> {
    assert!(fp.n() <= 2, "grid Fisher oracle supports n <= 2");
    assert_eq!(fp.n(), pt.dim());
    let level = resolution.max(4);
    if fp.p() >= 2.0 {
        let coarse = fisher_grid_once(fp, pt, a, b, level);
        let fine = fisher_grid_once(fp, pt, a, b, 2 * level);
        return Err(Error::FisherDiverges { p: fp.p(), coarse, fine });
    }
    let coarse = fisher_grid_once(fp, pt, a, b, level / 2);
    let fine = fisher_grid_once(fp, pt, a, b, level);
    if !fine.is_finite() {
        return Err(Error::Numerical("non-finite Fisher integrand".into()));
    }
    Ok(IntegralEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs(),
        method: IntegralMethod::Grid,
        seed: None,
    })
}

/// Monte-Carlo Fisher oracle for `n ≤ 4`: sample from the family, average
/// the product of finite-difference score functions. Reproducible bit for
/// bit for a fixed seed, independent of the worker count.
pub fn numeric_fisher_mc(
    fp: &FamilyParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
    samples: usize,
    seed: u64,
) -> Result<IntegralEstimate> {
    assert!(fp.n() <= 4, "MC Fisher oracle supports n <= 4");
    if fp.p() >= 2.0 {
        return Err(Error::FisherNonexistent { p: fp.p() });
    }
    let draws = family::sample(fp, pt, samples, seed);
    let n_chunks = samples.div_ceil(exec::CHUNK);
    let partials: Vec<(f64, f64)> = exec::run_indexed(n_chunks, |c| {
        let lo = c * exec::CHUNK;
        let hi = ((c + 1) * exec::CHUNK).min(samples);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for x in &draws[lo..hi] {
            let g1 = fd_log_density(fp, pt, a, x, 1e-5);
            let g2 = fd_log_density(fp, pt, b, x, 1e-5);
            let v = g1 * g2;
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (sum, sum2) = partials.iter().fold((0.0, 0.0), |(a1, a2), (b1, b2)| (a1 + b1, a2 + b2));
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum2 / m - mean * mean).max(0.0);
    Ok(IntegralEstimate {
        value: mean,
        error_estimate: (var / m).sqrt(),
        method: IntegralMethod::MonteCarlo,
        seed: Some(seed),
    })
}

/// Which entropy functional to differentiate in [`fd_entropy_hessian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    Renyi,
    Tsallis,
}

/// Mixed central second difference of the (closed-form) entropy along two
/// symmetric directions: `∂²/∂s∂t S(D + tX + sY)`. Converges at order `h²`
/// to the entropy-induced quadratic form.
pub fn fd_entropy_hessian(
    fp: &FamilyParams,
    q: f64,
    kind: EntropyKind,
    d: &SpdMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    h: f64,
) -> Result<f64> {
    let s_at = |t: f64, s: f64| -> Result<f64> {
        let perturbed = d.as_sym().add(&x.scaled(t)).add(&y.scaled(s));
        let dd = SpdMatrix::new(perturbed).map_err(|_| Error::StepSize { h })?;
        Ok(match kind {
            EntropyKind::Renyi => family::renyi_entropy(fp, &dd, q)?.value,
            EntropyKind::Tsallis => family::tsallis_entropy(fp, &dd, q)?.value,
        })
    };
    Ok((s_at(h, h)? - s_at(h, -h)? - s_at(-h, h)? + s_at(-h, -h)?) / (4.0 * h * h))
}

/// Chart on `Ξₙ`: coordinates `D_11..D_nn, D_12..D_{n−1,n}, u_1..u_n`
/// (off-diagonal entries appear once; the matching basis tangent is `F_ij`).
#[derive(Debug, Clone, Copy)]
pub struct Chart {
    n: usize,
}

impl Chart {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Chart { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * (self.n + 1) / 2 + self.n
    }

    pub fn sym_dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn to_coords(&self, pt: &Point) -> Vec<f64> {
        assert_eq!(pt.dim(), self.n);
        let mut c = Vec::with_capacity(self.dim());
        for i in 0..self.n {
            c.push(pt.d().get(i, i));
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                c.push(pt.d().get(i, j));
            }
        }
        c.extend_from_slice(pt.u());
        c
    }

    pub fn from_coords(&self, coords: &[f64]) -> Result<Point> {
        assert_eq!(coords.len(), self.dim());
        let sym = self.sym_from_coords(&coords[..self.sym_dim()]);
        let d = SpdMatrix::new(sym)?;
        Ok(Point::new(d, coords[self.sym_dim()..].to_vec()))
    }

    fn sym_from_coords(&self, c: &[f64]) -> SymMatrix {
        let n = self.n;
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            s.set_sym(i, i, c[i]);
        }
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                s.set_sym(i, j, c[k]);
                k += 1;
            }
        }
        s
    }

    /// Basis tangent for coordinate `k`: `E_ii`, `F_ij`, or `e_k`.
    pub fn basis_tangent(&self, k: usize) -> Tangent {
        let n = self.n;
        let sd = self.sym_dim();
        assert!(k < self.dim());
        if k < sd {
            let mut c = vec![0.0; sd];
            c[k] = 1.0;
            Tangent::new(self.sym_from_coords(&c), vec![0.0; n])
        } else {
            let mut v = vec![0.0; n];
            v[k - sd] = 1.0;
            Tangent::new(SymMatrix::zeros(n), v)
        }
    }

    pub fn tangent_to_coords(&self, t: &Tangent) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.dim());
        for i in 0..self.n {
            c.push(t.m.get(i, i));
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                c.push(t.m.get(i, j));
            }
        }
        c.extend_from_slice(&t.v);
        c
    }

    pub fn tangent_from_coords(&self, coords: &[f64]) -> Tangent {
        assert_eq!(coords.len(), self.dim());
        Tangent::new(
            self.sym_from_coords(&coords[..self.sym_dim()]),
            coords[self.sym_dim()..].to_vec(),
        )
    }
}

/// Metric components `G_ab` in the chart basis.
pub fn fd_metric_components(mp: &MetricParams, chart: &Chart, coords: &[f64]) -> Result<Mat> {
    let pt = chart.from_coords(coords)?;
    let dim = chart.dim();
    let mut g = Mat::zeros(dim);
    for a in 0..dim {
        let ta = chart.basis_tangent(a);
        for b in a..dim {
            let tb = chart.basis_tangent(b);
            let v = unified_eval(mp, &pt, &ta, &tb);
            g.set(a, b, v);
            g.set(b, a, v);
        }
    }
    Ok(g)
}

fn invert_dense(m: &Mat) -> Result<Mat> {
    let dim = m.dim();
    let mut inv = Mat::zeros(dim);
    for col in 0..dim {
        let mut e = vec![0.0; dim];
        e[col] = 1.0;
        let x = linalg::solve_dense(m, &e)?;
        for row in 0..dim {
            inv.set(row, col, x[row]);
        }
    }
    Ok(inv)
}

/// Christoffel symbols `Γ^c_{ab} = ½ G^{cd}(∂_a G_bd + ∂_b G_ad − ∂_d G_ab)`
/// with metric derivatives by central differences. Layout: `[c][a][b]`
/// flattened row-major, symmetric in `(a, b)` by construction.
pub fn fd_christoffels(
    mp: &MetricParams,
    chart: &Chart,
    coords: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let dim = chart.dim();
    let mut dg = Vec::with_capacity(dim); // dg[a][b][d] = ∂_a G_bd
    for a in 0..dim {
        let mut cp = coords.to_vec();
        let mut cm = coords.to_vec();
        cp[a] += h;
        cm[a] -= h;
        let gp = fd_metric_components(mp, chart, &cp).map_err(|_| Error::StepSize { h })?;
        let gm = fd_metric_components(mp, chart, &cm).map_err(|_| Error::StepSize { h })?;
        dg.push(gp.sub(&gm).scaled(1.0 / (2.0 * h)));
    }
    let g = fd_metric_components(mp, chart, coords)?;
    let ginv = invert_dense(&g)?;
    let mut gamma = vec![0.0; dim * dim * dim];
    for c in 0..dim {
        for a in 0..dim {
            for b in a..dim {
                let mut s = 0.0;
                for d in 0..dim {
                    s += ginv.get(c, d)
                        * (dg[a].get(b, d) + dg[b].get(a, d) - dg[d].get(a, b));
                }
                let v = 0.5 * s;
                gamma[(c * dim + a) * dim + b] = v;
                gamma[(c * dim + b) * dim + a] = v;
            }
        }
    }
    Ok(gamma)
}

/// Riemann components `R^d_{abc}` (component `d` of `R(e_a, e_b, e_c)`) from
/// `∂Γ + ΓΓ` with central differences. Layout: `[d][a][b][c]` flattened.
pub fn fd_riemann(mp: &MetricParams, chart: &Chart, coords: &[f64], h: f64) -> Result<Vec<f64>> {
    let dim = chart.dim();
    let gamma0 = fd_christoffels(mp, chart, coords, h)?;
    // dGamma[a] = ∂_a Γ
    let dgamma: Vec<Result<Vec<f64>>> = exec::run_indexed(dim, |a| {
        let mut cp = coords.to_vec();
        let mut cm = coords.to_vec();
        cp[a] += h;
        cm[a] -= h;
        let gp = fd_christoffels(mp, chart, &cp, h)?;
        let gm = fd_christoffels(mp, chart, &cm, h)?;
        Ok(gp.iter().zip(&gm).map(|(p, m)| (p - m) / (2.0 * h)).collect())
    });
    let mut dg = Vec::with_capacity(dim);
    for r in dgamma {
        dg.push(r?);
    }
    let at = |g: &[f64], c: usize, a: usize, b: usize| g[(c * dim + a) * dim + b];
    let mut riem = vec![0.0; dim * dim * dim * dim];
    for d in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let mut v = at(&dg[a], d, b, c) - at(&dg[b], d, a, c);
                    for e in 0..dim {
                        v += at(&gamma0, d, a, e) * at(&gamma0, e, b, c)
                            - at(&gamma0, d, b, e) * at(&gamma0, e, a, c);
                    }
                    riem[((d * dim + a) * dim + b) * dim + c] = v;
                }
            }
        }
    }
    Ok(riem)
}

/// Contracts FD Riemann components against three tangents, returning the
/// result in chart coordinates.
pub fn contract_riemann(
    chart: &Chart,
    riem: &[f64],
    a: &Tangent,
    b: &Tangent,
    c: &Tangent,
) -> Vec<f64> {
    let dim = chart.dim();
    let ca = chart.tangent_to_coords(a);
    let cb = chart.tangent_to_coords(b);
    let cc = chart.tangent_to_coords(c);
    let mut out = vec![0.0; dim];
    for d in 0..dim {
        let mut s = 0.0;
        for ia in 0..dim {
            if ca[ia] == 0.0 {
                continue;
            }
            for ib in 0..dim {
                if cb[ib] == 0.0 {
                    continue;
                }
                for ic in 0..dim {
                    s += riem[((d * dim + ia) * dim + ib) * dim + ic] * ca[ia] * cb[ib] * cc[ic];
                }
            }
        }
        out[d] = s;
    }
    out
}

/// Ricci components `Ric_bc = Σ_a R^a_{abc}` from FD Riemann components.
pub fn ricci_from_fd(chart: &Chart, riem: &[f64]) -> Mat {
    let dim = chart.dim();
    let mut ric = Mat::zeros(dim);
    for b in 0..dim {
        for c in 0..dim {
            let mut s = 0.0;
            for a in 0..dim {
                s += riem[((a * dim + a) * dim + b) * dim + c];
            }
            ric.set(b, c, s);
        }
    }
    ric
}

/// Scalar curvature `G^{bc} Ric_bc` from FD pieces.
pub fn scalar_from_fd(g: &Mat, ric: &Mat) -> Result<f64> {
    let ginv = invert_dense(g)?;
    let dim = g.dim();
    let mut s = 0.0;
    for b in 0..dim {
        for c in 0..dim {
            s += ginv.get(b, c) * ric.get(b, c);
        }
    }
    Ok(s)
}

/// Competitor densities for the maximum-entropy check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Competitor {
    /// The maximizer itself (margin must vanish).
    SelfFamily,
    /// Gaussian with the same covariance `D⁻¹`.
    Gaussian,
}

/// Margin `S_q(f_q(D,u)) − S_q(competitor)` of the maximum-entropy theorem,
/// with `q = p` and the competitor constrained to covariance `D⁻¹`. Both
/// sides are closed forms.
pub fn max_entropy_check(fp: &FamilyParams, d: &SpdMatrix, competitor: Competitor) -> Result<f64> {
    let q = fp.p();
    let self_entropy = if q == 1.0 {
        family::shannon_entropy(fp, d)?.value
    } else {
        family::renyi_entropy(fp, d, q)?.value
    };
    let comp_entropy = match competitor {
        Competitor::SelfFamily => self_entropy,
        Competitor::Gaussian => family::gaussian_renyi_entropy(fp.n(), d, q)?,
    };
    Ok(self_entropy - comp_entropy)
}
