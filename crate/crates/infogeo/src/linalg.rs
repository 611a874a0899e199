//! Symmetric / SPD matrix kernel.
//!
//! Everything downstream works with small dense symmetric matrices (the
//! manifolds here have n of a few at most, the eigensolver is comfortable up
//! to a few hundred). Eigendecomposition is a cyclic Jacobi sweep; all matrix
//! functions (inverse, sqrt, log, exp, powers) go through the spectral
//! decomposition so results stay exactly symmetric.

use crate::{Error, Result};

/// Dense square matrix, row major. Not necessarily symmetric; used for
/// intermediate products such as `X D⁻¹ Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row {i} has wrong length");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&other.a) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&other.a) {
            *x -= y;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest |a_ij − a_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }
}

/// Symmetric matrix; storage keeps `a[i][j] == a[j][i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: Mat,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { m: Mat::zeros(n) }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { m: Mat::identity(n) }
    }

    /// Build from `f(i, j)` evaluated once per unordered pair, mirrored.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        SymMatrix { m }
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        SymMatrix::from_fn(n, |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Strict construction: rejects asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Mat::from_rows(rows);
        let asym = m.max_asymmetry();
        if asym > 0.0 {
            return Err(Error::NotSymmetric { max_asym: asym });
        }
        Ok(SymMatrix { m })
    }

    /// `(M + Mᵀ)/2`, mirrored exactly.
    pub fn symmetrize(m: &Mat) -> Self {
        SymMatrix::from_fn(m.dim(), |i, j| 0.5 * (m.get(i, j) + m.get(j, i)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.m.set(i, j, v);
        self.m.set(j, i, v);
    }

    pub fn as_mat(&self) -> &Mat {
        &self.m
    }

    pub fn to_mat(&self) -> Mat {
        self.m.clone()
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix { m: self.m.add(&other.m) }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix { m: self.m.sub(&other.m) }
    }

    pub fn scaled(&self, s: f64) -> SymMatrix {
        SymMatrix { m: self.m.scaled(s) }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.m.matvec(v)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.frobenius_norm()
    }

    /// Symmetrized dyadic product `x⊙y`, with entries `xᵢyⱼ + xⱼyᵢ`.
    pub fn dyad_sym(x: &[f64], y: &[f64]) -> SymMatrix {
        assert_eq!(x.len(), y.len());
        SymMatrix::from_fn(x.len(), |i, j| x[i] * y[j] + x[j] * y[i])
    }

    /// Applies a scalar function through the eigendecomposition,
    /// `Q f(Λ) Qᵀ`. Errors if `f` produces a non-finite value at any
    /// eigenvalue.
    pub fn spectral_apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<SymMatrix> {
        let (vals, q) = eig_sym(self)?;
        let mapped: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
        for (&l, &fl) in vals.iter().zip(&mapped) {
            if !fl.is_finite() {
                return Err(Error::SpectralDomain { eigenvalue: l });
            }
        }
        Ok(recompose(&q, &mapped))
    }

    /// Matrix exponential (spectral).
    pub fn expm(&self) -> Result<SpdMatrix> {
        let e = self.spectral_apply(f64::exp)?;
        SpdMatrix::new(e)
    }
}

fn recompose(q: &Mat, vals: &[f64]) -> SymMatrix {
    let n = q.dim();
    SymMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| q.get(i, k) * vals[k] * q.get(j, k)).sum()
    })
}

/// Symmetric positive definite matrix. The eigendecomposition is computed on
/// construction (it is also the definiteness check) and reused by all the
/// spectral functions.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    sym: SymMatrix,
    evals: Vec<f64>,
    evecs: Mat,
}

/// Relative eigenvalue floor: everything here involves `D⁻¹`, so matrices
/// that are numerically singular are rejected outright.
pub const SPD_REL_TOL: f64 = 1e-10;

impl SpdMatrix {
    pub fn new(sym: SymMatrix) -> Result<Self> {
        let (evals, evecs) = eig_sym(&sym)?;
        let max = evals[0];
        let min = *evals.last().expect("dimension >= 1");
        if !(max > 0.0) || min <= SPD_REL_TOL * max {
            return Err(Error::NotPositiveDefinite { min_eig: min, max_eig: max });
        }
        Ok(SpdMatrix { sym, evals, evecs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        SpdMatrix::new(SymMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix::new(SymMatrix::identity(n)).expect("identity is SPD")
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        SpdMatrix::new(SymMatrix::diag(d))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sym.get(i, j)
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn as_mat(&self) -> &Mat {
        self.sym.as_mat()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.evals
    }

    /// Orthogonal eigenvector matrix matching [`Self::eigenvalues`]
    /// (eigenvectors are the columns).
    pub fn eigenvectors(&self) -> &Mat {
        &self.evecs
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.sym.matvec(v)
    }

    fn apply_cached<F: Fn(f64) -> f64>(&self, f: F) -> SymMatrix {
        let mapped: Vec<f64> = self.evals.iter().map(|&l| f(l)).collect();
        recompose(&self.evecs, &mapped)
    }

    /// Spectral matrix function; the SPD check at construction guarantees the
    /// usual functions (log, inverse, powers) are defined.
    pub fn spectral_apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<SymMatrix> {
        for &l in &self.evals {
            if !f(l).is_finite() {
                return Err(Error::SpectralDomain { eigenvalue: l });
            }
        }
        Ok(self.apply_cached(f))
    }

    pub fn inv(&self) -> SymMatrix {
        self.apply_cached(|l| 1.0 / l)
    }

    pub fn sqrtm(&self) -> SymMatrix {
        self.apply_cached(f64::sqrt)
    }

    pub fn inv_sqrtm(&self) -> SymMatrix {
        self.apply_cached(|l| 1.0 / l.sqrt())
    }

    pub fn logm(&self) -> SymMatrix {
        self.apply_cached(f64::ln)
    }

    pub fn powf(&self, t: f64) -> SymMatrix {
        self.apply_cached(|l| l.powf(t))
    }

    pub fn det(&self) -> f64 {
        self.evals.iter().product()
    }

    pub fn ln_det(&self) -> f64 {
        self.evals.iter().map(|l| l.ln()).sum()
    }
}

/// Definiteness classes reported by [`spd_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// Classifies by the smallest eigenvalue against `±tol`.
pub fn spd_classify(s: &SymMatrix, tol: f64) -> Result<Definiteness> {
    let (vals, _) = eig_sym(s)?;
    let min = *vals.last().expect("dimension >= 1");
    Ok(if min > tol {
        Definiteness::PositiveDefinite
    } else if min >= -tol {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    })
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_EPS: f64 = 1e-14;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the orthogonal matrix whose
/// columns are the matching eigenvectors. Convergence is declared when the
/// off-diagonal Frobenius norm falls below `1e-14` relative to the matrix
/// norm; the sweep cap is 100.
pub fn eig_sym(s: &SymMatrix) -> Result<(Vec<f64>, Mat)> {
    let n = s.dim();
    let mut a = s.to_mat();
    let mut q = Mat::identity(n);
    if n == 1 {
        return Ok((vec![a.get(0, 0)], q));
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], q));
    }
    let eps = JACOBI_REL_EPS * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= eps {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a.get(p, r);
                if apr.abs() <= eps * 1e-3 {
                    continue;
                }
                let app = a.get(p, p);
                let arr = a.get(r, r);
                let theta = (arr - app) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                // A <- JᵀAJ on rows/columns p and r
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, c * akp - sn * akr);
                    a.set(k, r, sn * akp + c * akr);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, c * apk - sn * ark);
                    a.set(r, k, sn * apk + c * ark);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, c * qkp - sn * qkr);
                    q.set(k, r, sn * qkp + c * qkr);
                }
            }
        }
    }
    if !converged {
        // final check after the last sweep
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() > eps {
            return Err(Error::EigNonConvergence { sweeps: JACOBI_MAX_SWEEPS });
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i), i)).collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
    let vals: Vec<f64> = pairs.iter().map(|&(v, _)| v).collect();
    let mut vecs = Mat::zeros(n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        for k in 0..n {
            vecs.set(k, new_col, q.get(k, old_col));
        }
    }
    Ok((vals, vecs))
}

/// Canonical ordered basis of the symmetric matrices:
/// `E_11, …, E_nn` followed by `F_ij = E_ij + E_ji` for `i < j`
/// in lexicographic order.
#[derive(Debug, Clone)]
pub struct SymBasis {
    elements: Vec<SymMatrix>,
}

impl SymBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, k: usize) -> &SymMatrix {
        &self.elements[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymMatrix> {
        self.elements.iter()
    }
}

pub fn sym_basis(n: usize) -> SymBasis {
    assert!(n >= 1, "n must be at least 1");
    let mut elements = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        elements.push(SymMatrix::from_fn(n, |r, c| {
            if r == i && c == i {
                1.0
            } else {
                0.0
            }
        }));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            elements.push(SymMatrix::from_fn(n, |r, c| {
                if (r == i && c == j) || (r == j && c == i) {
                    1.0
                } else {
                    0.0
                }
            }));
        }
    }
    SymBasis { elements }
}

/// Solves a dense linear system by partial-pivot Gaussian elimination.
/// Used for small Newton systems (shooting) and chart-space solves.
pub fn solve_dense(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m.get(r, col).abs() > m.get(piv, col).abs() {
                piv = r;
            }
        }
        if m.get(piv, col).abs() < 1e-300 {
            return Err(Error::Numerical("singular linear system".into()));
        }
        if piv != col {
            for k in 0..n {
                let tmp = m.get(col, k);
                m.set(col, k, m.get(piv, k));
                m.set(piv, k, tmp);
            }
            x.swap(col, piv);
        }
        for r in (col + 1)..n {
            let f = m.get(r, col) / m.get(col, col);
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m.get(r, k) - f * m.get(col, k);
                m.set(r, k, v);
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in (col + 1)..n {
            s -= m.get(col, k) * x[k];
        }
        x[col] = s / m.get(col, col);
    }
    Ok(x)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
