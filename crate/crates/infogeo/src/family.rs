//! The p-Gaussian family: support, density, normalization, sampling, and the
//! closed-form Rényi / Tsallis / Shannon entropies.
//!
//! A family member is labelled by `(n, p)` with `p > n/(n+2)` and
//! parameterized by `(D, u)` where `D` is the inverse covariance. For `p > 1`
//! the density is supported on the ellipsoid
//! `⟨x−u, D(x−u)⟩ ≤ 1/a` with `a = (p−1)/(2p−n(1−p))`; for `p ≤ 1` the
//! support is all of `ℝⁿ` (Student-t-like tails for `p < 1`).
//!
//! Entropy constants are computed in log space throughout; the closed forms
//! are cross-validated against quadrature by the `oracle` module and the
//! test suite.

use crate::linalg::{SpdMatrix, SymMatrix};
use crate::special::{digamma, ln_gamma};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};

/// Family label `(n, p)`; membership requires `p > n/(n+2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    n: usize,
    p: f64,
}

impl FamilyParams {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 || !p.is_finite() || p <= n as f64 / (n as f64 + 2.0) {
            return Err(Error::InvalidFamily { n, p });
        }
        Ok(FamilyParams { n, p })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn is_gaussian(&self) -> bool {
        self.p == 1.0
    }

    /// The support/tail scale `a = |1−p| / (2p − n(1−p))`; zero at `p = 1`
    /// (unbounded support marker).
    pub fn support_scale(&self) -> f64 {
        if self.p == 1.0 {
            0.0
        } else {
            (1.0 - self.p).abs() / (2.0 * self.p - self.n as f64 * (1.0 - self.p))
        }
    }
}

/// A point `(D, u)` of the parameter manifold `Ξₙ`.
#[derive(Debug, Clone)]
pub struct Point {
    d: SpdMatrix,
    u: Vec<f64>,
}

impl Point {
    pub fn new(d: SpdMatrix, u: Vec<f64>) -> Self {
        assert_eq!(d.dim(), u.len(), "dimension mismatch between D and u");
        assert!(u.iter().all(|x| x.is_finite()), "u must be finite");
        Point { d, u }
    }

    /// Zero-mean point on the special slice `Ξₙ^(s)`.
    pub fn special(d: SpdMatrix) -> Self {
        let n = d.dim();
        Point::new(d, vec![0.0; n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    pub fn d(&self) -> &SpdMatrix {
        &self.d
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// An entropy value in nats, tagged with its order and provenance.
#[derive(Debug, Clone, Copy)]
pub struct EntropyValue {
    pub value: f64,
    pub q: f64,
    pub method: EntropyMethod,
}

/// Quadratic form `⟨x−u, D(x−u)⟩`.
fn mahalanobis(pt: &Point, x: &[f64]) -> f64 {
    let dx: Vec<f64> = x.iter().zip(pt.u()).map(|(a, b)| a - b).collect();
    crate::linalg::dot(&dx, &pt.d().matvec(&dx))
}

/// Membership in `Dom(p, D, u)`.
pub fn in_support(fp: &FamilyParams, pt: &Point, x: &[f64]) -> bool {
    if fp.p <= 1.0 {
        return true;
    }
    let a = fp.support_scale();
    1.0 - a * mahalanobis(pt, x) >= 0.0
}

/// `ln A_{n,p}` (log of the normalization constant).
pub fn ln_normalization(fp: &FamilyParams) -> Result<f64> {
    let n = fp.n as f64;
    if fp.is_gaussian() {
        return Ok(-0.5 * n * (2.0 * std::f64::consts::PI).ln());
    }
    let a = fp.support_scale();
    let p = fp.p;
    let v = if p > 1.0 {
        0.5 * n * a.ln() + ln_gamma(p / (p - 1.0) + 0.5 * n)?
            - 0.5 * n * std::f64::consts::PI.ln()
            - ln_gamma(p / (p - 1.0))?
    } else {
        0.5 * n * a.ln() + ln_gamma(1.0 / (1.0 - p))?
            - 0.5 * n * std::f64::consts::PI.ln()
            - ln_gamma(1.0 / (1.0 - p) - 0.5 * n)?
    };
    Ok(v)
}

/// The normalization constant `A_{n,p}`.
pub fn normalization_constant(fp: &FamilyParams) -> Result<f64> {
    let v = ln_normalization(fp)?.exp();
    if !v.is_finite() {
        return Err(Error::GammaRange(fp.p));
    }
    Ok(v)
}

/// Density `f_p(D, u, x)`; zero outside the support.
pub fn density(fp: &FamilyParams, pt: &Point, x: &[f64]) -> f64 {
    log_density(fp, pt, x).exp()
}

/// Natural log of the density; `-inf` outside the support.
pub fn log_density(fp: &FamilyParams, pt: &Point, x: &[f64]) -> f64 {
    assert_eq!(fp.n, pt.dim(), "family/point dimension mismatch");
    assert_eq!(x.len(), pt.dim());
    let q = mahalanobis(pt, x);
    let ln_a = ln_normalization(fp).expect("valid family");
    let base = ln_a + 0.5 * pt.d().ln_det();
    if fp.is_gaussian() {
        return base - 0.5 * q;
    }
    let a = fp.support_scale();
    let p = fp.p;
    if p > 1.0 {
        let t = 1.0 - a * q;
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        base + t.ln() / (p - 1.0)
    } else {
        base + (1.0 + a * q).ln() / (p - 1.0)
    }
}

/// Existence check for `∫ f_p^q`; returns the violated bound on failure.
fn check_power_region(fp: &FamilyParams, q: f64) -> Result<()> {
    if !q.is_finite() {
        return Err(Error::EntropyDomain(format!("q = {q} is not finite")));
    }
    if fp.p >= 1.0 {
        if q <= 0.0 {
            return Err(Error::EntropyDomain(format!("q = {q} must be positive")));
        }
    } else {
        let bound = fp.n as f64 * (1.0 - fp.p) / 2.0;
        if q <= bound {
            return Err(Error::EntropyDomain(format!(
                "q = {q} must exceed n(1-p)/2 = {bound}"
            )));
        }
    }
    Ok(())
}

/// `ln ∫ f_p(D, u, ·)^q`.
pub fn ln_density_power_integral(fp: &FamilyParams, d: &SpdMatrix, q: f64) -> Result<f64> {
    check_power_region(fp, q)?;
    let n = fp.n as f64;
    let p = fp.p;
    if fp.is_gaussian() {
        return Ok(0.5 * n * (1.0 - q) * (2.0 * std::f64::consts::PI).ln() - 0.5 * n * q.ln()
            + 0.5 * (q - 1.0) * d.ln_det());
    }
    let a = fp.support_scale();
    let lg = if p > 1.0 {
        q * (ln_gamma(p / (p - 1.0) + 0.5 * n)? - ln_gamma(p / (p - 1.0))?)
            + ln_gamma(q / (p - 1.0) + 1.0)?
            - ln_gamma(q / (p - 1.0) + 1.0 + 0.5 * n)?
    } else {
        q * (ln_gamma(1.0 / (1.0 - p))? - ln_gamma(1.0 / (1.0 - p) - 0.5 * n)?)
            + ln_gamma(q / (1.0 - p) - 0.5 * n)?
            - ln_gamma(q / (1.0 - p))?
    };
    Ok(0.5 * n * (q - 1.0) * (a / std::f64::consts::PI).ln() + lg + 0.5 * (q - 1.0) * d.ln_det())
}

/// `∫ f_p(D, u, ·)^q` in closed form.
pub fn density_power_integral(fp: &FamilyParams, d: &SpdMatrix, q: f64) -> Result<f64> {
    let v = ln_density_power_integral(fp, d, q)?.exp();
    if !v.is_finite() {
        return Err(Error::GammaRange(q));
    }
    Ok(v)
}

/// q-Rényi entropy `S_q = log(∫ f^q) / (1−q)`, closed form.
/// `q = 1` is rejected; use [`shannon_entropy`].
pub fn renyi_entropy(fp: &FamilyParams, d: &SpdMatrix, q: f64) -> Result<EntropyValue> {
    if q == 1.0 {
        return Err(Error::OrderOne);
    }
    let ln_i = ln_density_power_integral(fp, d, q)?;
    Ok(EntropyValue { value: ln_i / (1.0 - q), q, method: EntropyMethod::ClosedForm })
}

/// Shannon entropy (the `q → 1` limit of the Rényi entropy), closed form.
///
/// For `p ≠ 1` the limit is taken analytically: with
/// `ln I(q)` as in [`ln_density_power_integral`], `S = -d/dq ln I |_{q=1}`,
/// which brings in the digamma function.
pub fn shannon_entropy(fp: &FamilyParams, d: &SpdMatrix) -> Result<EntropyValue> {
    let n = fp.n as f64;
    let p = fp.p;
    let value = if fp.is_gaussian() {
        0.5 * n * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() - 0.5 * d.ln_det()
    } else {
        let a = fp.support_scale();
        let kappa = if p > 1.0 {
            let c = 1.0 / (p - 1.0);
            0.5 * n * (a / std::f64::consts::PI).ln()
                + (ln_gamma(p / (p - 1.0) + 0.5 * n)? - ln_gamma(p / (p - 1.0))?)
                + c * (digamma(c + 1.0)? - digamma(c + 1.0 + 0.5 * n)?)
                + 0.5 * d.ln_det()
        } else {
            let c = 1.0 / (1.0 - p);
            0.5 * n * (a / std::f64::consts::PI).ln()
                + (ln_gamma(c)? - ln_gamma(c - 0.5 * n)?)
                + c * (digamma(c - 0.5 * n)? - digamma(c)?)
                + 0.5 * d.ln_det()
        };
        -kappa
    };
    Ok(EntropyValue { value, q: 1.0, method: EntropyMethod::ClosedForm })
}

/// Tsallis entropy `S^(q) = (∫ f^q − 1) / (1−q)`, closed form.
/// `q = 1` is rejected; use [`shannon_entropy`].
pub fn tsallis_entropy(fp: &FamilyParams, d: &SpdMatrix, q: f64) -> Result<EntropyValue> {
    if q == 1.0 {
        return Err(Error::OrderOne);
    }
    let i = density_power_integral(fp, d, q)?;
    Ok(EntropyValue { value: (i - 1.0) / (1.0 - q), q, method: EntropyMethod::ClosedForm })
}

/// I.i.d. draws from `f_p(D, u, ·)`, deterministic for a fixed seed.
///
/// Strategy per branch: `p = 1` standard Gaussian transform; `p < 1` the
/// elliptical heavy-tailed representation (Student-t scale mixture with
/// `ν = 2/(1−p) − n` matching the density shape); `p > 1` rejection sampling
/// with a uniform proposal on the support ellipsoid. Exactness is certified
/// by the covariance and normalization oracles, not by construction.
pub fn sample(fp: &FamilyParams, pt: &Point, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(count >= 1, "count must be at least 1");
    assert_eq!(fp.n, pt.dim());
    let n = fp.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let p = fp.p;

    if fp.is_gaussian() {
        let root = pt.d().inv_sqrtm(); // D^{-1/2}
        for _ in 0..count {
            let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let v = root.matvec(&z);
            out.push(v.iter().zip(pt.u()).map(|(a, b)| a + b).collect());
        }
    } else if p < 1.0 {
        let a = fp.support_scale();
        let nu = 2.0 / (1.0 - p) - n as f64;
        let chi = ChiSquared::new(nu).expect("nu > 0 within the family");
        // Sigma^{1/2} = D^{-1/2} / sqrt(nu a); covariance comes out D^{-1}
        let root = pt.d().inv_sqrtm().scaled(1.0 / (nu * a).sqrt());
        for _ in 0..count {
            let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let w: f64 = rng.sample(chi);
            let scale = (nu / w).sqrt();
            let v = root.matvec(&z);
            out.push(
                v.iter().zip(pt.u()).map(|(a_, b)| a_ * scale + b).collect(),
            );
        }
    } else {
        let a = fp.support_scale();
        let root = pt.d().inv_sqrtm().scaled(1.0 / a.sqrt()); // maps unit ball -> Dom
        let expo = 1.0 / (p - 1.0);
        for _ in 0..count {
            loop {
                // uniform point of the unit ball
                let z: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = crate::linalg::dot(&z, &z).sqrt();
                if norm == 0.0 {
                    continue;
                }
                let r = rng.random::<f64>().powf(1.0 / n as f64);
                let b: Vec<f64> = z.iter().map(|v| v / norm * r).collect();
                let accept = (1.0 - crate::linalg::dot(&b, &b)).max(0.0).powf(expo);
                if rng.random::<f64>() <= accept {
                    let v = root.matvec(&b);
                    out.push(v.iter().zip(pt.u()).map(|(x, y)| x + y).collect());
                    break;
                }
            }
        }
    }
    out
}

/// Rényi entropy of a Gaussian with inverse covariance `D` (competitor in the
/// max-entropy checks): `S_q = (n/2)ln 2π + (n/2)(ln q)/(q−1) − ½ ln det D`.
pub fn gaussian_renyi_entropy(n: usize, d: &SpdMatrix, q: f64) -> Result<f64> {
    if q <= 0.0 {
        return Err(Error::EntropyDomain(format!("q = {q} must be positive")));
    }
    let nf = n as f64;
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    Ok(if q == 1.0 {
        0.5 * nf * (ln2pi + 1.0) - 0.5 * d.ln_det()
    } else {
        0.5 * nf * ln2pi + 0.5 * nf * q.ln() / (q - 1.0) - 0.5 * d.ln_det()
    })
}

/// Sample mean and (unbiased) sample covariance of a set of draws.
pub fn sample_mean_cov(samples: &[Vec<f64>]) -> (Vec<f64>, SymMatrix) {
    let n = samples[0].len();
    let m = samples.len() as f64;
    let mut mean = vec![0.0; n];
    for s in samples {
        for (a, b) in mean.iter_mut().zip(s) {
            *a += b / m;
        }
    }
    let cov = SymMatrix::from_fn(n, |i, j| {
        samples.iter().map(|s| (s[i] - mean[i]) * (s[j] - mean[j])).sum::<f64>() / (m - 1.0)
    });
    (mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;

    fn fam(n: usize, p: f64) -> FamilyParams {
        FamilyParams::new(n, p).unwrap()
    }

    #[test]
    fn family_membership_boundary() {
        assert!(FamilyParams::new(2, 0.5).is_err()); // 1/2 = n/(n+2)
        assert!(FamilyParams::new(2, 0.500001).is_ok());
        assert!(FamilyParams::new(1, 1.0).is_ok());
        assert!(FamilyParams::new(1, 1.0 / 3.0).is_err());
    }

    #[test]
    fn support_scale_examples() {
        assert!((fam(1, 2.0).support_scale() - 0.2).abs() <= 1e-15);
        assert_eq!(fam(1, 1.0).support_scale(), 0.0);
        assert!(fam(1, 0.6).support_scale() > 0.0);
    }

    #[test]
    fn in_support_examples() {
        let pt = Point::special(SpdMatrix::identity(1));
        let f = fam(1, 2.0);
        assert!(in_support(&f, &pt, &[2.0])); // 4 <= 5
        assert!(!in_support(&f, &pt, &[3.0])); // 9 > 5
        let f_heavy = fam(1, 0.8);
        assert!(in_support(&f_heavy, &pt, &[1e6]));
        let f_g = fam(1, 1.0);
        assert!(in_support(&f_g, &pt, &[1e6]));
    }

    #[test]
    fn normalization_values() {
        // A_{1,2} = 3/(4 sqrt 5)
        let a = normalization_constant(&fam(1, 2.0)).unwrap();
        assert!((a - 0.3354101966249684545).abs() <= 1e-14);
        // Gaussian values
        let g1 = normalization_constant(&fam(1, 1.0)).unwrap();
        assert!((g1 - 0.3989422804014326779).abs() <= 1e-15);
        let g2 = normalization_constant(&fam(2, 1.0)).unwrap();
        assert!((g2 - 1.0 / (2.0 * std::f64::consts::PI)).abs() <= 1e-15);
    }

    #[test]
    fn density_examples() {
        let pt = Point::special(SpdMatrix::identity(1));
        // standard normal at the mode
        let v = density(&fam(1, 1.0), &pt, &[0.0]);
        assert!((v - 0.3989422804014326779).abs() <= 1e-15);
        // p=2 at the mode equals A_{1,2}
        let v = density(&fam(1, 2.0), &pt, &[0.0]);
        assert!((v - 0.3354101966249684545).abs() <= 1e-14);
        // support edge: zero at sqrt(5), continuous from inside
        let edge = 5.0_f64.sqrt();
        assert_eq!(density(&fam(1, 2.0), &pt, &[edge + 1e-12]), 0.0);
        let inside = density(&fam(1, 2.0), &pt, &[edge - 1e-9]);
        assert!(inside > 0.0 && inside < 1e-3);
    }

    #[test]
    fn translation_invariance_exact() {
        let d = SpdMatrix::from_rows(&[vec![1.3, 0.4], vec![0.4, 0.9]]).unwrap();
        let u = vec![0.7, -0.4];
        let pt_u = Point::new(d.clone(), u.clone());
        let pt_0 = Point::special(d);
        let f = fam(2, 1.5);
        for x in [[0.1, 0.2], [1.0, -0.5], [0.9, 0.9]] {
            let shifted: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a - b).collect();
            assert_eq!(density(&f, &pt_u, &x), density(&f, &pt_0, &shifted));
        }
    }

    #[test]
    fn power_integral_values() {
        let d1 = SpdMatrix::identity(1);
        // q = 1 normalizes for any family
        for p in [0.8, 1.0, 1.5, 3.0] {
            let v = density_power_integral(&fam(1, p), &d1, 1.0).unwrap();
            assert!((v - 1.0).abs() <= 1e-13, "p={p}");
        }
        // (n=1, p=2, q=2): 3/(5 sqrt 5)
        let v = density_power_integral(&fam(1, 2.0), &d1, 2.0).unwrap();
        assert!((v - 0.2683281572999747636).abs() <= 1e-14);
        // Gaussian: 1/(2 sqrt pi)
        let v = density_power_integral(&fam(1, 1.0), &d1, 2.0).unwrap();
        assert!((v - 0.2820947917738781435).abs() <= 1e-15);
    }

    #[test]
    fn power_integral_existence_region() {
        let d1 = SpdMatrix::identity(1);
        // p < 1 requires q > n(1-p)/2; the boundary itself is rejected
        let f = fam(1, 0.6);
        assert!(density_power_integral(&f, &d1, 0.2).is_err());
        assert!(density_power_integral(&f, &d1, 0.2000001).is_ok());
        assert!(density_power_integral(&fam(1, 2.0), &d1, -0.5).is_err());
    }

    #[test]
    fn renyi_values() {
        let d1 = SpdMatrix::identity(1);
        let s = renyi_entropy(&fam(1, 2.0), &d1, 2.0).unwrap();
        assert!((s.value - 1.315544579983040871).abs() <= 1e-13);
        let s = renyi_entropy(&fam(1, 1.0), &d1, 2.0).unwrap();
        assert!((s.value - 1.265512123484645396).abs() <= 1e-14);
        assert!(matches!(renyi_entropy(&fam(1, 2.0), &d1, 1.0), Err(Error::OrderOne)));
    }

    #[test]
    fn renyi_det_scaling() {
        // S_q(cD) = S_q(D) - (n/2) log c for every valid (p, q)
        for (n, p) in [(1usize, 0.8), (1, 1.0), (1, 1.5), (2, 1.5), (2, 0.95)] {
            let f = fam(n, p);
            let d = SpdMatrix::identity(n);
            let c = 3.7;
            let dc = SpdMatrix::new(d.as_sym().scaled(c)).unwrap();
            for q in [0.9, 1.5, 2.0] {
                if p < 1.0 && q <= n as f64 * (1.0 - p) / 2.0 {
                    continue;
                }
                let s1 = renyi_entropy(&f, &d, q).unwrap().value;
                let s2 = renyi_entropy(&f, &dc, q).unwrap().value;
                assert!(
                    (s2 - (s1 - 0.5 * n as f64 * c.ln())).abs() <= 1e-12,
                    "n={n} p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn shannon_values() {
        let d1 = SpdMatrix::identity(1);
        let s = shannon_entropy(&fam(1, 1.0), &d1).unwrap();
        assert!((s.value - 1.418938533204672742).abs() <= 1e-14);
        let d2 = SpdMatrix::identity(2);
        let s = shannon_entropy(&fam(2, 1.0), &d2).unwrap();
        assert!((s.value - 2.837877066409345484).abs() <= 1e-14);
        // det scaling: D -> 4D drops the entropy by (1/2) log 4
        let d4 = SpdMatrix::diag(&[4.0]).unwrap();
        let s4 = shannon_entropy(&fam(1, 1.0), &d4).unwrap();
        assert!((s.value - 0.0).abs() > 0.0); // silence unused
        let s1 = shannon_entropy(&fam(1, 1.0), &d1).unwrap();
        assert!((s1.value - s4.value - 0.5 * 4.0_f64.ln()).abs() <= 1e-14);
        // p != 1 closed form against the mpmath value for (n=1, p=2, D=1)
        let s = shannon_entropy(&fam(1, 2.0), &d1).unwrap();
        assert!((s.value - 1.372773334215607163).abs() <= 1e-13);
    }

    #[test]
    fn shannon_is_renyi_limit() {
        // Richardson extrapolation of S_q at q = 1 ± h
        for (n, p) in [(1usize, 0.8), (1, 2.0), (2, 1.5)] {
            let f = fam(n, p);
            let d = SpdMatrix::identity(n);
            let lim = |h: f64| {
                0.5 * (renyi_entropy(&f, &d, 1.0 + h).unwrap().value
                    + renyi_entropy(&f, &d, 1.0 - h).unwrap().value)
            };
            let h = 1e-4;
            let rich = (4.0 * lim(h / 2.0) - lim(h)) / 3.0;
            let s = shannon_entropy(&f, &d).unwrap().value;
            assert!((rich - s).abs() <= 1e-9, "n={n} p={p}: {rich} vs {s}");
        }
    }

    #[test]
    fn tsallis_values() {
        let d1 = SpdMatrix::identity(1);
        let s = tsallis_entropy(&fam(1, 1.0), &d1, 2.0).unwrap();
        assert!((s.value - 0.7179052082261218565).abs() <= 1e-14);
        assert!(matches!(tsallis_entropy(&fam(1, 1.0), &d1, 1.0), Err(Error::OrderOne)));
        // q -> 1 limit equals the Shannon entropy (Richardson)
        for p in [0.8, 1.0, 1.7] {
            let f = fam(1, p);
            let lim = |h: f64| {
                0.5 * (tsallis_entropy(&f, &d1, 1.0 + h).unwrap().value
                    + tsallis_entropy(&f, &d1, 1.0 - h).unwrap().value)
            };
            let h = 1e-4;
            let rich = (4.0 * lim(h / 2.0) - lim(h)) / 3.0;
            let s = shannon_entropy(&f, &d1).unwrap().value;
            assert!((rich - s).abs() <= 1e-6, "p={p}");
        }
    }

    #[test]
    fn sampling_deterministic_and_in_support() {
        let d = SpdMatrix::from_rows(&[vec![1.5, 0.3], vec![0.3, 0.8]]).unwrap();
        let pt = Point::new(d, vec![0.4, -0.2]);
        for p in [0.9, 1.0, 1.5] {
            let f = fam(2, p);
            let s1 = sample(&f, &pt, 64, 7);
            let s2 = sample(&f, &pt, 64, 7);
            assert_eq!(s1, s2, "deterministic for fixed seed, p={p}");
            if p > 1.0 {
                assert!(s1.iter().all(|x| in_support(&f, &pt, x)));
            }
        }
    }

    #[test]
    fn sample_covariance_matches_inverse_d() {
        // covariance of f_p is D^{-1} wherever second moments exist
        let d = SpdMatrix::from_rows(&[vec![1.5, 0.3], vec![0.3, 0.8]]).unwrap();
        let dinv = d.inv();
        let pt = Point::new(d.clone(), vec![0.4, -0.2]);
        let m = 200_000;
        for p in [0.9, 1.0, 1.5] {
            let f = fam(2, p);
            let draws = sample(&f, &pt, m, 123);
            let (mean, cov) = sample_mean_cov(&draws);
            // 3 standard errors, conservatively ~ c/sqrt(m)
            let tol = 3.0 * 6.0 / (m as f64).sqrt();
            for i in 0..2 {
                assert!((mean[i] - pt.u()[i]).abs() <= tol, "p={p} mean");
                for j in 0..2 {
                    assert!(
                        (cov.get(i, j) - dinv.get(i, j)).abs() <= tol,
                        "p={p} cov[{i}{j}]: {} vs {}",
                        cov.get(i, j),
                        dinv.get(i, j)
                    );
                }
            }
        }
    }
}
