//! The unified two-parameter metric family and every named metric it covers.
//!
//! At a point `(D, u)` and for tangents `(X, x)`, `(Y, y)`:
//!
//! ```text
//! g = scale · [ ½ Tr(D⁻¹XD⁻¹Y) + α Tr(D⁻¹X)Tr(D⁻¹Y) + β ⟨x, Dy⟩ ]
//! ```
//!
//! The form is Riemannian for `α > −1/(2n)` and `β > 0`, degenerate exactly
//! at `α = −1/(2n)`, and semi-Riemannian otherwise. The named metrics —
//! Rényi-induced, Tsallis-induced, Fisher, Calvo–Oller, LMR — either
//! canonicalize into `(scale, α, β)` coefficients ([`as_unified`]) or, for
//! the Tsallis form with `q ≠ 1`, carry a point-dependent factor and do not.
//!
//! Csiszár φ-divergences are evaluated by quadrature; their induced
//! quadratic form is `φ''(1)` times the Fisher metric, which the
//! finite-difference route ([`csiszar_induced_form`]) reproduces.

use crate::family::{self, FamilyParams, Point};
use crate::linalg::{dot, Mat, SpdMatrix, SymMatrix};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Coefficients `(α, β, scale)` of the unified metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

impl MetricParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        MetricParams { alpha, beta, scale: 1.0 }
    }

    pub fn with_scale(alpha: f64, beta: f64, scale: f64) -> Self {
        assert!(scale > 0.0, "scale must be positive");
        MetricParams { alpha, beta, scale }
    }

    /// `1 + 2nα`, the recurring denominator; vanishes exactly in the
    /// degenerate case.
    pub fn trace_factor(&self, n: usize) -> f64 {
        1.0 + 2.0 * n as f64 * self.alpha
    }

    pub fn check_nondegenerate(&self, n: usize) -> Result<()> {
        if self.trace_factor(n).abs() < 1e-14 {
            return Err(Error::DegenerateMetric { alpha: self.alpha, n });
        }
        Ok(())
    }
}

/// Signature classification of the unified metric on `Ξₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Riemannian,
    SemiRiemannian,
    Degenerate,
}

/// Classifies `(α, β)` at dimension `n`: degenerate iff `α = −1/(2n)`,
/// Riemannian iff `α > −1/(2n)` and `β > 0`, semi-Riemannian otherwise.
/// (`β = 0` with `α > −1/(2n)` is Riemannian on the zero-mean slice only;
/// see [`signature_special`].)
pub fn signature(mp: &MetricParams, n: usize) -> Signature {
    let crit = -1.0 / (2.0 * n as f64);
    if (mp.alpha - crit).abs() < 1e-14 {
        Signature::Degenerate
    } else if mp.alpha > crit && mp.beta > 0.0 {
        Signature::Riemannian
    } else {
        Signature::SemiRiemannian
    }
}

/// Signature on the special slice `Ξₙ^(s)` (no mean coordinates, β ignored).
pub fn signature_special(mp: &MetricParams, n: usize) -> Signature {
    let crit = -1.0 / (2.0 * n as f64);
    if (mp.alpha - crit).abs() < 1e-14 {
        Signature::Degenerate
    } else if mp.alpha > crit {
        Signature::Riemannian
    } else {
        Signature::SemiRiemannian
    }
}

/// A tangent vector `(X, x)` of `Ξₙ` at any point.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub m: SymMatrix,
    pub v: Vec<f64>,
}

impl Tangent {
    pub fn new(m: SymMatrix, v: Vec<f64>) -> Self {
        assert_eq!(m.dim(), v.len(), "tangent dimension mismatch");
        Tangent { m, v }
    }

    pub fn zero(n: usize) -> Self {
        Tangent { m: SymMatrix::zeros(n), v: vec![0.0; n] }
    }

    pub fn from_sym(m: SymMatrix) -> Self {
        let n = m.dim();
        Tangent { m, v: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn add(&self, other: &Tangent) -> Tangent {
        Tangent {
            m: self.m.add(&other.m),
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tangent) -> Tangent {
        Tangent {
            m: self.m.sub(&other.m),
            v: self.v.iter().zip(&other.v).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Tangent {
        Tangent { m: self.m.scaled(s), v: self.v.iter().map(|a| a * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs().max(self.v.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    }
}

/// `Tr(D⁻¹ X D⁻¹ Y)` given `D⁻¹`.
pub(crate) fn tr_pair(dinv: &SymMatrix, x: &SymMatrix, y: &SymMatrix) -> f64 {
    dinv.as_mat().mul(x.as_mat()).mul(dinv.as_mat()).mul(y.as_mat()).trace()
}

/// The unified metric evaluated at `pt` (u-independent by construction).
pub fn unified_eval(mp: &MetricParams, pt: &Point, a: &Tangent, b: &Tangent) -> f64 {
    assert_eq!(pt.dim(), a.dim());
    assert_eq!(pt.dim(), b.dim());
    let dinv = pt.d().inv();
    let t1 = 0.5 * tr_pair(&dinv, &a.m, &b.m);
    let t2 = mp.alpha
        * dinv.as_mat().mul(a.m.as_mat()).trace()
        * dinv.as_mat().mul(b.m.as_mat()).trace();
    let t3 = mp.beta * dot(&a.v, &pt.d().matvec(&b.v));
    mp.scale * (t1 + t2 + t3)
}

/// Named metric selector. Serializes to the JSON wire format
/// `{"name": "fisher", "p": 1.0}` etc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum MetricSpec {
    #[serde(rename = "renyi")]
    Renyi,
    #[serde(rename = "tsallis")]
    Tsallis { p: f64, q: f64 },
    #[serde(rename = "fisher")]
    Fisher { p: f64 },
    #[serde(rename = "co")]
    CalvoOller { beta: f64 },
    #[serde(rename = "lmr")]
    Lmr,
    #[serde(rename = "unified")]
    Unified(MetricParams),
    #[serde(rename = "km")]
    KuboMori,
    #[serde(rename = "largest")]
    Largest,
}

/// The Tsallis form constant `A'_{n,p,q}`, i.e. half the power integral of
/// the unit-determinant member.
pub fn tsallis_form_constant(n: usize, p: f64, q: f64) -> Result<f64> {
    let fp = FamilyParams::new(n, p)?;
    let id = SpdMatrix::identity(n);
    Ok(0.5 * family::density_power_integral(&fp, &id, q)?)
}

/// Evaluates a named metric at `pt`. The entropy-induced forms (Rényi,
/// Tsallis) live on the zero-mean slice and ignore the vector components.
pub fn named_eval(
    spec: &MetricSpec,
    fp: &FamilyParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
) -> Result<f64> {
    let n = pt.dim();
    assert_eq!(fp.n(), n, "family/point dimension mismatch");
    let dinv = pt.d().inv();
    match *spec {
        MetricSpec::Renyi => Ok(0.5 * tr_pair(&dinv, &a.m, &b.m)),
        MetricSpec::Tsallis { p, q } => {
            if q == 1.0 {
                return Ok(0.5 * tr_pair(&dinv, &a.m, &b.m));
            }
            let aconst = tsallis_form_constant(n, p, q)?;
            let det_factor = (0.5 * (q - 1.0) * pt.d().ln_det()).exp();
            let tr_a = dinv.as_mat().mul(a.m.as_mat()).trace();
            let tr_b = dinv.as_mat().mul(b.m.as_mat()).trace();
            Ok(aconst
                * det_factor
                * (tr_pair(&dinv, &a.m, &b.m) - 0.5 * (q - 1.0) * tr_a * tr_b))
        }
        MetricSpec::Fisher { p } => {
            if p >= 2.0 {
                return Err(Error::FisherNonexistent { p });
            }
            FamilyParams::new(n, p)?;
            let nf = n as f64;
            let tr_a = dinv.as_mat().mul(a.m.as_mat()).trace();
            let tr_b = dinv.as_mat().mul(b.m.as_mat()).trace();
            Ok(0.5 / (2.0 - p) * tr_pair(&dinv, &a.m, &b.m)
                + (p - 1.0) / (4.0 * (2.0 - p)) * tr_a * tr_b
                + (2.0 + nf * (p - 1.0)) / ((2.0 * p + nf * (p - 1.0)) * (2.0 - p))
                    * dot(&a.v, &pt.d().matvec(&b.v)))
        }
        MetricSpec::CalvoOller { beta } => {
            Ok(0.5 * tr_pair(&dinv, &a.m, &b.m) + beta * dot(&a.v, &pt.d().matvec(&b.v)))
        }
        MetricSpec::Lmr => {
            let tr_a = dinv.as_mat().mul(a.m.as_mat()).trace();
            let tr_b = dinv.as_mat().mul(b.m.as_mat()).trace();
            Ok(tr_pair(&dinv, &a.m, &b.m) - tr_a * tr_b / (n as f64 + 1.0)
                + 0.5 * dot(&a.v, &pt.d().matvec(&b.v)))
        }
        MetricSpec::Unified(mp) => Ok(unified_eval(&mp, pt, a, b)),
        MetricSpec::KuboMori => Ok(kubo_mori_eval(pt.d(), &a.m, &b.m)),
        MetricSpec::Largest => Ok(largest_eval(pt.d(), &a.m, &b.m)),
    }
}

/// Canonicalizes a named metric into `(scale, α, β)` when it is a constant
/// multiple of the unified form; `None` for point-dependent (Tsallis with
/// `q ≠ 1`) or structurally different (Kubo–Mori, largest) metrics.
///
/// The Rényi form lives on the zero-mean slice; its `β` is unused and
/// reported as zero.
pub fn as_unified(spec: &MetricSpec, n: usize) -> Option<MetricParams> {
    let nf = n as f64;
    match *spec {
        MetricSpec::Renyi => Some(MetricParams::with_scale(0.0, 0.0, 1.0)),
        MetricSpec::Tsallis { q, .. } => {
            if q == 1.0 {
                Some(MetricParams::with_scale(0.0, 0.0, 1.0))
            } else {
                None
            }
        }
        MetricSpec::Fisher { p } => {
            if p >= 2.0 {
                return None;
            }
            Some(MetricParams::with_scale(
                (p - 1.0) / 4.0,
                (2.0 + nf * (p - 1.0)) / (2.0 * p + nf * (p - 1.0)),
                1.0 / (2.0 - p),
            ))
        }
        MetricSpec::CalvoOller { beta } => Some(MetricParams::with_scale(0.0, beta, 1.0)),
        MetricSpec::Lmr => {
            Some(MetricParams::with_scale(-1.0 / (2.0 * (nf + 1.0)), 0.25, 2.0))
        }
        MetricSpec::Unified(mp) => Some(mp),
        MetricSpec::KuboMori | MetricSpec::Largest => None,
    }
}

/// Kubo–Mori metric `∫₀^∞ Tr((D+tI)⁻¹X(D+tI)⁻¹Y) dt`, evaluated in the
/// eigenbasis of `D` with the kernel `(ln λᵢ − ln λⱼ)/(λᵢ − λⱼ)`
/// (`1/λ` on the diagonal).
pub fn kubo_mori_eval(d: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> f64 {
    let n = d.dim();
    let q = d.eigenvectors();
    let lam = d.eigenvalues();
    let rotate = |s: &SymMatrix| -> Mat { q.transpose().mul(s.as_mat()).mul(q) };
    let xr = rotate(x);
    let yr = rotate(y);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (lam[i], lam[j]);
            let k = if (li - lj).abs() <= 1e-12 * (li + lj) {
                2.0 / (li + lj)
            } else {
                (li.ln() - lj.ln()) / (li - lj)
            };
            total += k * xr.get(i, j) * yr.get(i, j);
        }
    }
    total
}

/// The "largest" quantum metric `g_D(D^{1/2}X, YD^{1/2})` with
/// `g_D(A,B) = Tr(D⁻¹AD⁻¹B)`, i.e. `Tr(D^{−1/2} X D⁻¹ Y D^{1/2})`.
pub fn largest_eval(d: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> f64 {
    let half = d.sqrtm();
    let inv_half = d.inv_sqrtm();
    let dinv = d.inv();
    inv_half
        .as_mat()
        .mul(x.as_mat())
        .mul(dinv.as_mat())
        .mul(y.as_mat())
        .mul(half.as_mat())
        .trace()
}

/// Convex generator of a Csiszár divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phi")]
pub enum CsiszarPhi {
    /// `φ(x) = −ln x` (Kullback–Leibler)
    #[serde(rename = "kl")]
    KullbackLeibler,
    /// `φ(x) = (1 − √x)²` (squared Hellinger)
    #[serde(rename = "hellinger")]
    Hellinger,
    /// `φ(x) = 4/(1−α²) · (1 − x^{(1+α)/2})`
    #[serde(rename = "alpha")]
    AlphaRelative { alpha: f64 },
}

impl CsiszarPhi {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            CsiszarPhi::KullbackLeibler => -x.ln(),
            CsiszarPhi::Hellinger => {
                let s = 1.0 - x.sqrt();
                s * s
            }
            CsiszarPhi::AlphaRelative { alpha } => {
                4.0 / (1.0 - alpha * alpha) * (1.0 - x.powf(0.5 * (1.0 + alpha)))
            }
        }
    }

    /// `φ''(1)`, the factor relating the induced form to the Fisher metric.
    pub fn second_derivative_at_one(&self) -> f64 {
        match *self {
            CsiszarPhi::KullbackLeibler => 1.0,
            CsiszarPhi::Hellinger => 0.5,
            CsiszarPhi::AlphaRelative { .. } => 1.0,
        }
    }
}

/// Csiszár φ-relative entropy `H = ∫ f₁ φ(f₂/f₁)` by quadrature over the
/// support of `f₁` (`n ≤ 2`).
pub fn csiszar_divergence(
    phi: &CsiszarPhi,
    fp: &FamilyParams,
    pt1: &Point,
    pt2: &Point,
    resolution: usize,
) -> Result<f64> {
    assert_eq!(pt1.dim(), pt2.dim());
    let est = crate::oracle::quad_integral(
        fp,
        pt1,
        |x: &[f64]| {
            let f1 = family::density(fp, pt1, x);
            if f1 <= 0.0 {
                return 0.0;
            }
            let f2 = family::density(fp, pt2, x);
            f1 * phi.eval(f2 / f1)
        },
        resolution,
    )?;
    Ok(est.value)
}

/// Quadratic form induced by a φ-divergence: mixed central second difference
/// of `H(f_pt, f_{pt + t·a + s·b})` at `t = s = 0`, with one Richardson
/// extrapolation step. Converges to `φ''(1) · g^{(F,p)}(a, b)` as `h → 0`.
pub fn csiszar_induced_form(
    phi: &CsiszarPhi,
    fp: &FamilyParams,
    pt: &Point,
    a: &Tangent,
    b: &Tangent,
    h: f64,
    resolution: usize,
) -> Result<f64> {
    let perturbed = |t: f64, s: f64| -> Result<Point> {
        let sym = pt.d().as_sym().add(&a.m.scaled(t)).add(&b.m.scaled(s));
        let d = SpdMatrix::new(sym).map_err(|_| Error::StepSize { h })?;
        let u: Vec<f64> = pt
            .u()
            .iter()
            .zip(a.v.iter().zip(&b.v))
            .map(|(uu, (av, bv))| uu + t * av + s * bv)
            .collect();
        Ok(Point::new(d, u))
    };
    let mixed = |hh: f64| -> Result<f64> {
        let hpp = csiszar_divergence(phi, fp, pt, &perturbed(hh, hh)?, resolution)?;
        let hpm = csiszar_divergence(phi, fp, pt, &perturbed(hh, -hh)?, resolution)?;
        let hmp = csiszar_divergence(phi, fp, pt, &perturbed(-hh, hh)?, resolution)?;
        let hmm = csiszar_divergence(phi, fp, pt, &perturbed(-hh, -hh)?, resolution)?;
        Ok((hpp - hpm - hmp + hmm) / (4.0 * hh * hh))
    };
    let g_h = mixed(h)?;
    let g_h2 = mixed(0.5 * h)?;
    Ok((4.0 * g_h2 - g_h) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_basis;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rng_pt_tangents(n: usize, seed: u64) -> (Point, Tangent, Tangent) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = crate::linalg::tests::random_spd(n, &mut rng);
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let a = Tangent::new(
            SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0),
            (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect(),
        );
        let b = Tangent::new(
            SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0),
            (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect(),
        );
        (Point::new(d, u), a, b)
    }

    #[test]
    fn unified_examples() {
        let pt = Point::special(SpdMatrix::identity(2));
        let i2 = Tangent::from_sym(SymMatrix::identity(2));
        let mp = MetricParams::new(0.0, 1.0);
        assert!((unified_eval(&mp, &pt, &i2, &i2) - 1.0).abs() <= 1e-15);

        let e1 = Tangent::new(SymMatrix::identity(2), vec![1.0, 0.0]);
        let mp = MetricParams::new(1.0, 2.0);
        assert!((unified_eval(&mp, &pt, &e1, &e1) - 7.0).abs() <= 1e-15);

        // degenerate direction at alpha = -1/(2n): X = D, x = 0
        let mp = MetricParams::new(-0.25, 1.0);
        let d_dir = Tangent::from_sym(SymMatrix::identity(2));
        assert!(unified_eval(&mp, &pt, &d_dir, &d_dir).abs() <= 1e-15);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&MetricParams::new(0.0, 1.0), 3), Signature::Riemannian);
        assert_eq!(
            signature(&MetricParams::new(-1.0 / 6.0, 1.0), 3),
            Signature::Degenerate
        );
        assert_eq!(signature(&MetricParams::new(-1.0, 1.0), 1), Signature::SemiRiemannian);
        assert_eq!(signature(&MetricParams::new(0.0, 0.0), 2), Signature::SemiRiemannian);
        assert_eq!(signature_special(&MetricParams::new(0.0, 0.0), 2), Signature::Riemannian);
    }

    #[test]
    fn fisher_examples() {
        // n=1: the u-block coefficient is lambda (1+p)/((3p-1)(2-p))
        for (p, lam) in [(0.8, 1.3), (1.5, 0.7), (1.0, 2.2)] {
            let d = SpdMatrix::diag(&[lam]).unwrap();
            let pt = Point::special(d);
            let fp = FamilyParams::new(1, p).unwrap();
            let e = Tangent::new(SymMatrix::zeros(1), vec![1.0]);
            let got = named_eval(&MetricSpec::Fisher { p }, &fp, &pt, &e, &e).unwrap();
            let want = lam * (1.0 + p) / ((3.0 * p - 1.0) * (2.0 - p));
            assert!((got - want).abs() <= 1e-14, "p={p}");
        }
        // n=1, p=1, matrix direction at D=1: classical 1/(2D^2) = 1/2
        let fp = FamilyParams::new(1, 1.0).unwrap();
        let pt = Point::special(SpdMatrix::identity(1));
        let xm = Tangent::from_sym(SymMatrix::identity(1));
        let got = named_eval(&MetricSpec::Fisher { p: 1.0 }, &fp, &pt, &xm, &xm).unwrap();
        assert!((got - 0.5).abs() <= 1e-15);
        // nonexistence for p >= 2
        assert!(matches!(
            named_eval(&MetricSpec::Fisher { p: 2.0 }, &fp, &pt, &xm, &xm),
            Err(Error::FisherNonexistent { .. })
        ));
    }

    #[test]
    fn tsallis_q1_reduces_to_renyi_form() {
        let (pt, a, b) = rng_pt_tangents(2, 5);
        let fp = FamilyParams::new(2, 1.5).unwrap();
        let t = named_eval(&MetricSpec::Tsallis { p: 1.5, q: 1.0 }, &fp, &pt, &a, &b).unwrap();
        let r = named_eval(&MetricSpec::Renyi, &fp, &pt, &a, &b).unwrap();
        assert_eq!(t, r);
    }

    #[test]
    fn as_unified_fisher_p1_is_co1() {
        let mp = as_unified(&MetricSpec::Fisher { p: 1.0 }, 3).unwrap();
        assert!((mp.scale - 1.0).abs() <= 1e-15);
        assert!(mp.alpha.abs() <= 1e-15);
        assert!((mp.beta - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn as_unified_agreement_on_random_inputs() {
        let specs: Vec<MetricSpec> = vec![
            MetricSpec::Renyi,
            MetricSpec::Fisher { p: 1.4 },
            MetricSpec::Fisher { p: 0.9 },
            MetricSpec::CalvoOller { beta: 1.7 },
            MetricSpec::Lmr,
            MetricSpec::Tsallis { p: 1.5, q: 1.0 },
        ];
        for n in [1usize, 2, 3] {
            for spec in &specs {
                if let MetricSpec::Fisher { p } = spec {
                    if *p <= n as f64 / (n as f64 + 2.0) {
                        continue;
                    }
                }
                let mp = as_unified(spec, n).unwrap();
                let fp = FamilyParams::new(n, 1.2).unwrap();
                for seed in 0..34 {
                    let (pt, a, b) = rng_pt_tangents(n, 1000 + seed);
                    let (a, b) = if matches!(spec, MetricSpec::Renyi | MetricSpec::Tsallis { .. })
                    {
                        // entropy-induced forms ignore mean components
                        (
                            Tangent::from_sym(a.m.clone()),
                            Tangent::from_sym(b.m.clone()),
                        )
                    } else {
                        (a, b)
                    };
                    let lhs = named_eval(spec, &fp, &pt, &a, &b).unwrap();
                    let rhs = unified_eval(&mp, &pt, &a, &b);
                    assert!(
                        (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()),
                        "{spec:?} n={n}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn tsallis_not_representable() {
        assert!(as_unified(&MetricSpec::Tsallis { p: 1.5, q: 2.0 }, 2).is_none());
        assert!(as_unified(&MetricSpec::KuboMori, 2).is_none());
        assert!(as_unified(&MetricSpec::Largest, 2).is_none());
    }

    #[test]
    fn kubo_mori_and_largest_at_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = SpdMatrix::identity(3);
        for _ in 0..10 {
            let x = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let y = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let want = x.as_mat().mul(y.as_mat()).trace();
            assert!((kubo_mori_eval(&d, &x, &y) - want).abs() <= 1e-12);
            assert!((largest_eval(&d, &x, &y) - want).abs() <= 1e-12);
        }
        // n=1 scalars: x^2 / lambda for both
        let lam = 2.7;
        let d1 = SpdMatrix::diag(&[lam]).unwrap();
        let x1 = SymMatrix::diag(&[0.9]);
        assert!((kubo_mori_eval(&d1, &x1, &x1) - 0.81 / lam).abs() <= 1e-14);
        assert!((largest_eval(&d1, &x1, &x1) - 0.81 / lam).abs() <= 1e-14);
    }

    #[test]
    fn largest_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let d = crate::linalg::tests::random_spd(3, &mut rng);
            let x = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let y = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let g1 = largest_eval(&d, &x, &y);
            let g2 = largest_eval(&d, &y, &x);
            assert!((g1 - g2).abs() <= 1e-10 * (1.0 + g1.abs()));
        }
    }

    #[test]
    fn u_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = crate::linalg::tests::random_spd(2, &mut rng);
        let a = Tangent::new(SymMatrix::from_fn(2, |_, _| rng.random()), vec![0.3, -0.7]);
        let b = Tangent::new(SymMatrix::from_fn(2, |_, _| rng.random()), vec![-0.2, 0.4]);
        let mp = MetricParams::new(0.7, 1.3);
        let p0 = Point::special(d.clone());
        let p1 = Point::new(d, vec![5.0, -3.0]);
        assert_eq!(unified_eval(&mp, &p0, &a, &b), unified_eval(&mp, &p1, &a, &b));
    }

    #[test]
    fn congruence_covariance_of_trace_part() {
        // for invertible symmetric T: g_{TDT}(TXT, TYT) = g_D(X, Y) at alpha=beta=0
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mp = MetricParams::new(0.0, 0.0);
        for _ in 0..20 {
            let d = crate::linalg::tests::random_spd(3, &mut rng);
            let t = crate::linalg::tests::random_spd(3, &mut rng); // SPD is invertible symmetric
            let x = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let y = SymMatrix::from_fn(3, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let conj = |s: &SymMatrix| {
                SymMatrix::symmetrize(&t.as_mat().mul(s.as_mat()).mul(t.as_mat()))
            };
            let dt = SpdMatrix::new(conj(d.as_sym())).unwrap();
            let g1 = unified_eval(&mp, &Point::special(d.clone()), &Tangent::from_sym(x.clone()), &Tangent::from_sym(y.clone()));
            let g2 = unified_eval(
                &mp,
                &Point::special(dt),
                &Tangent::from_sym(conj(&x)),
                &Tangent::from_sym(conj(&y)),
            );
            assert!((g1 - g2).abs() <= 1e-10 * (1.0 + g1.abs()));
        }
    }

    #[test]
    fn cauchy_schwarz_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for case in 0..1000 {
            let n = 1 + case % 4;
            let d = crate::linalg::tests::random_spd(n, &mut rng);
            let pt = Point::special(d);
            let alpha = -1.0 / (2.0 * n as f64) + 0.02 + rng.random::<f64>();
            let beta = 0.05 + rng.random::<f64>();
            let mp = MetricParams::new(alpha, beta);
            let a = Tangent::new(
                SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0),
                (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect(),
            );
            if a.max_abs() < 1e-6 {
                continue;
            }
            assert!(unified_eval(&mp, &pt, &a, &a) > 0.0);
        }
    }

    #[test]
    fn metric_spec_json_wire_format() {
        let parsed: MetricSpec = serde_json::from_str(r#"{"name":"fisher","p":1.0}"#).unwrap();
        assert_eq!(parsed, MetricSpec::Fisher { p: 1.0 });
        let parsed: MetricSpec =
            serde_json::from_str(r#"{"name":"unified","alpha":0.0,"beta":1.0,"scale":1.0}"#)
                .unwrap();
        assert_eq!(parsed, MetricSpec::Unified(MetricParams::new(0.0, 1.0)));
        let parsed: MetricSpec =
            serde_json::from_str(r#"{"name":"tsallis","p":1.5,"q":2.0}"#).unwrap();
        assert_eq!(parsed, MetricSpec::Tsallis { p: 1.5, q: 2.0 });
        for raw in [r#"{"name":"lmr"}"#, r#"{"name":"renyi"}"#, r#"{"name":"km"}"#, r#"{"name":"largest"}"#, r#"{"name":"co","beta":1.0}"#] {
            let spec: MetricSpec = serde_json::from_str(raw).unwrap();
            let round = serde_json::to_string(&spec).unwrap();
            let again: MetricSpec = serde_json::from_str(&round).unwrap();
            assert_eq!(spec, again);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bilinear_and_symmetric(seed in 0u64..10_000) {
            let n = 1 + (seed as usize) % 4;
            let (pt, a, b) = rng_pt_tangents(n, seed);
            let (_, c, _) = rng_pt_tangents(n, seed.wrapping_add(77));
            let mp = MetricParams::new(0.3, 0.8);
            let gab = unified_eval(&mp, &pt, &a, &b);
            let gba = unified_eval(&mp, &pt, &b, &a);
            prop_assert!((gab - gba).abs() <= 1e-12 * (1.0 + gab.abs()));
            let lhs = unified_eval(&mp, &pt, &a.add(&c.scaled(2.5)), &b);
            let rhs = gab + 2.5 * unified_eval(&mp, &pt, &c, &b);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn hessian_basis_element() {
        // Renyi hessian at D = I2 along E11: (1/2)Tr(E11 E11) = 1/2
        let fp = FamilyParams::new(2, 1.5).unwrap();
        let basis = sym_basis(2);
        let d = SpdMatrix::identity(2);
        let got = crate::oracle::fd_entropy_hessian(
            &fp,
            2.0,
            crate::oracle::EntropyKind::Renyi,
            &d,
            basis.get(0),
            basis.get(0),
            1e-4,
        )
        .unwrap();
        assert!((got - 0.5).abs() <= 1e-5, "{got}");
    }
}
