//! Small dense complex linear algebra.
//!
//! Everything here works on matrices of dimension at most [`MAX_DIM`]; the
//! largest object the crate ever builds is a two-ququart density matrix
//! (16×16). Storage is row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest supported matrix dimension for the eigensolver and its callers.
pub const MAX_DIM: usize = 16;

/// Maximum |m − m†| entry tolerated by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues below this are clamped to zero by [`psd_sqrt`].
pub const PSD_CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues below this make [`psd_sqrt`] fail.
pub const PSD_REJECT_TOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    TooLarge(usize),
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        Self::diagonal(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> ComplexVector {
        ComplexVector::from((0..self.rows).map(|r| self[(r, c)]).collect::<Vec<_>>())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        ComplexVector::from(
            (0..self.rows)
                .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
                .collect::<Vec<_>>(),
        )
    }

    /// `self · m · self†`
    pub fn conjugate(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(m).matmul(&self.adjoint())
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entry of |m − m†|.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(&self) -> ComplexMatrix {
        (self + &self.adjoint()).scale_real(0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl From<Vec<C64>> for ComplexVector {
    fn from(data: Vec<C64>) -> Self {
        assert!(!data.is_empty(), "vector dimension must be positive");
        ComplexVector { data }
    }
}

impl ComplexVector {
    pub fn zeros(dim: usize) -> Self {
        Self::from(vec![C64::new(0.0, 0.0); dim])
    }

    /// Computational basis vector |index⟩.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from(self.data.iter().map(|&z| z * s).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &ComplexVector) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::from(self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect::<Vec<_>>())
    }

    /// |self⟩⟨other|
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |r, c| self.data[r] * other.data[c].conj())
    }

    /// |self⟩⟨self|
    pub fn projector(&self) -> ComplexMatrix {
        self.outer(self)
    }

    pub fn kron(&self, other: &ComplexVector) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                out.push(a * b);
            }
        }
        Self::from(out)
    }

    pub fn max_abs_diff(&self, other: &ComplexVector) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ⟨self|m|self⟩
    pub fn expectation(&self, m: &ComplexMatrix) -> C64 {
        self.inner(&m.mul_vec(self))
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    #[inline]
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Kronecker product `a ⊗ b`; `a` is the most significant factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold((*first).clone(), |acc, m| kron(&acc, m))
}

fn check_square(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if m.rows > MAX_DIM {
        return Err(LinalgError::TooLarge(m.rows));
    }
    Ok(m.rows)
}

/// Reorders tensor factors of an operator on `dims[0] ⊗ dims[1] ⊗ …`.
///
/// Factor `k` of the output is factor `perm[k]` of the input.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total || perm.len() != dims.len() {
        return Err(LinalgError::Shape(format!(
            "cannot permute {}x{} matrix over dims {:?} with {:?}",
            m.rows, m.cols, dims, perm
        )));
    }
    let mut seen = vec![false; dims.len()];
    for &p in perm {
        if p >= dims.len() || std::mem::replace(&mut seen[p], true) {
            return Err(LinalgError::Shape(format!("{perm:?} is not a permutation")));
        }
    }
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    // output flat index -> input flat index
    let map: Vec<usize> = (0..total)
        .map(|flat| {
            let digits = unflatten(flat, &out_dims);
            let mut src = vec![0; dims.len()];
            for (k, &p) in perm.iter().enumerate() {
                src[p] = digits[k];
            }
            flatten(&src, dims)
        })
        .collect();
    Ok(ComplexMatrix::from_fn(total, total, |r, c| m[(map[r], map[c])]))
}

/// Traces out every factor not listed in `keep` (kept factors retain their order).
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total {
        return Err(LinalgError::Shape(format!(
            "{}x{} matrix does not match dims {:?}",
            m.rows, m.cols, dims
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(LinalgError::Shape(format!("keep {keep:?} out of range")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let tr_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kd: usize = keep_dims.iter().product();
    let td: usize = tr_dims.iter().product();
    let compose = |kept: usize, tr: usize| {
        let kdig = unflatten(kept, &keep_dims);
        let tdig = unflatten(tr, &tr_dims);
        let mut full = vec![0; dims.len()];
        for (i, &k) in keep.iter().enumerate() {
            full[k] = kdig[i];
        }
        for (i, &t) in traced.iter().enumerate() {
            full[t] = tdig[i];
        }
        flatten(&full, dims)
    };
    Ok(ComplexMatrix::from_fn(kd, kd, |r, c| {
        (0..td).map(|t| m[(compose(r, t), compose(c, t))]).sum()
    }))
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (i, &d) in dims.iter().enumerate().rev() {
        out[i] = flat % d;
        flat /= d;
    }
    out
}

fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Whether to reject or repair a slightly non-Hermitian input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Hermiticity {
    #[default]
    Strict,
    Symmetrize,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEigen {
    /// `V Λ V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V f(Λ) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (&lam, v) in self.values.iter().zip(&self.vectors) {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = v[r] * fl;
                for c in 0..n {
                    out[(r, c)] += vr * v[c].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigen-decomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    hermitian_eig_with(m, Hermiticity::Strict)
}

pub fn hermitian_eig_with(
    m: &ComplexMatrix,
    mode: Hermiticity,
) -> Result<HermitianEigen, LinalgError> {
    let n = check_square(m)?;
    let deviation = m.hermitian_deviation();
    let mut a = match mode {
        Hermiticity::Strict if deviation > HERMITIAN_TOL => {
            return Err(LinalgError::NotHermitian { deviation })
        }
        Hermiticity::Strict => m.clone(),
        Hermiticity::Symmetrize => m.hermitian_part(),
    };
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= JACOBI_OFF_TOL * scale {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let h = a[(p, q)];
                let r = h.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase e^{-iα} on q makes the (p,q) entry real, then a real rotation zeroes it.
                let phase = (h / r).conj();
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, cth) = theta.sin_cos();
                // J restricted to (p,q): [[c, s], [-s·phase, c·phase]]
                let jpp = C64::new(cth, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase * (-s);
                let jqq = phase * cth;
                // a ← a J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // a ← J† a
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // v ← v J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| a[(i, i)].re).collect(),
        vectors: order.iter().map(|&i| v.column(i)).collect(),
    })
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eig(m)?;
    if let Some(&bad) = eig.values.iter().find(|&&x| x < -PSD_REJECT_TOL) {
        return Err(LinalgError::NotPsd { eigenvalue: bad });
    }
    Ok(eig.reconstruct_with(|x| if x <= PSD_CLAMP_TOL { 0.0 } else { x.sqrt() }))
}
