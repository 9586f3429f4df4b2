//! Dense complex matrix kernel.
//!
//! Every operator in the crate (density matrices, generators, projectors,
//! product operators on up to five qutrits) is a [`ComplexMatrix`]. Storage is
//! row-major and tensor products order subsystems with the leftmost factor as
//! the most significant index.
//!
//! The Hermitian eigensolver is a cyclic complex Jacobi iteration. All
//! matrices here are at most 243×243, so the cubic cost per sweep is cheap and
//! the method is easy to reason about.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used by [`ComplexMatrix::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this times ‖A‖_F.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<Complex64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("rows are not square".into()));
        }
        Self::new(dim, data)
    }

    /// The rank-one operator |ket⟩⟨ket|.
    pub fn outer(ket: &[Complex64]) -> Self {
        Self::from_fn(ket.len(), |i, j| ket[i] * ket[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A - A†|.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() <= HERMITIAN_TOL * self.max_abs()
    }

    /// tr(A·B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        check_same_dim(self, other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, ket: &[Complex64]) -> Result<Vec<Complex64>> {
        if ket.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector of length {} applied to {}x{} matrix",
                ket.len(),
                self.dim,
                self.dim
            )));
        }
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(ket)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Submatrix on the given row/column indices, in the order given.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim) {
            return Err(Error::Shape(format!("index {bad} outside dimension {}", self.dim)));
        }
        Ok(Self::from_fn(indices.len(), |i, j| self[(indices[i], indices[j])]))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

// Elementwise arithmetic panics on mismatched dimensions; use the checked
// free functions where dimensions come from user input.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix add: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sub: dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Complex64) -> ComplexMatrix {
        self.scale_complex(rhs)
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::Shape(format!(
            "dimension mismatch: {} vs {}",
            a.dim, b.dim
        )));
    }
    Ok(())
}

/// Ordered local dimensions of a composite system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape(format!("invalid subsystem dims {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// `count` subsystems of dimension `d` each.
    pub fn uniform(d: usize, count: usize) -> Result<Self> {
        Self::new(vec![d; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, m: &ComplexMatrix, which: usize) -> Result<()> {
        if self.total_dim() != m.dim() {
            return Err(Error::Shape(format!(
                "subsystem dims {:?} do not factor a {}-dimensional matrix",
                self.dims,
                m.dim()
            )));
        }
        if which >= self.dims.len() {
            return Err(Error::Shape(format!(
                "subsystem index {which} out of range for {} subsystems",
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Splits a flat index into (outer, local, inner) around subsystem `which`,
    /// where `index = (outer * d + local) * inner_dim + inner`.
    fn split(&self, which: usize) -> (usize, usize, usize) {
        let outer: usize = self.dims[..which].iter().product();
        let inner: usize = self.dims[which + 1..].iter().product();
        (outer, self.dims[which], inner)
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    let n = a.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == ZERO {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Kronecker product `a ⊗ b`; entry `(i·b.dim + k, j·b.dim + l) = a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a.data[i * na + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * n + j * nb + l] = aij * b.data[k * nb + l];
                }
            }
        }
    }
    out
}

/// Left-to-right Kronecker product of all factors.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut it = factors.into_iter();
    let first = it
        .next()
        .ok_or_else(|| Error::Shape("empty tensor product".into()))?;
    Ok(it.fold(first.clone(), |acc, m| tensor(&acc, m)))
}

/// Kronecker product of kets, same ordering as [`tensor`].
pub fn tensor_kets(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * a.max_abs() {
        return Err(Error::NotHermitian(residual));
    }
    let n = a.dim;
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // Work on the exactly Hermitian part so rounding asymmetry cannot accumulate.
    let mut m = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(a[(i, i)].re, 0.0)
        } else {
            0.5 * (a[(i, j)] + a[(j, i)].conj())
        }
    });
    let target = JACOBI_TOL * norm;

    let mut off = off_diagonal_norm(&m);
    let mut sweeps = 0;
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigNoConverge {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&m);
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m.data[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates the (p, q) pair with the unitary `V = D·R`, where `D` rotates
/// the phase of `a_pq` onto the real axis and `R` is the real Jacobi rotation.
fn jacobi_rotate(m: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.dim;
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / b; // e^{iφ}
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase_c = phase.conj();

    // A <- A V on columns p, q.
    for k in 0..n {
        let akp = m.data[k * n + p];
        let akq = m.data[k * n + q];
        m.data[k * n + p] = akp * c - akq * phase_c * s;
        m.data[k * n + q] = akp * s + akq * phase_c * c;
    }
    // A <- V† A on rows p, q.
    for k in 0..n {
        let apk = m.data[p * n + k];
        let aqk = m.data[q * n + k];
        m.data[p * n + k] = apk * c - aqk * phase * s;
        m.data[q * n + k] = apk * s + aqk * phase * c;
    }
    m[(p, p)] = Complex64::new(app - t * b, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * b, 0.0);
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
}

/// Transposes the indices of subsystem `which` only.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    shape: &SubsystemShape,
    which: usize,
) -> Result<ComplexMatrix> {
    shape.check(rho, which)?;
    let (outer, d, inner) = shape.split(which);
    let n = rho.dim;
    let mut out = ComplexMatrix::zeros(n);
    for ro in 0..outer {
        for rl in 0..d {
            for ri in 0..inner {
                let r = (ro * d + rl) * inner + ri;
                for co in 0..outer {
                    for cl in 0..d {
                        for ci in 0..inner {
                            let c = (co * d + cl) * inner + ci;
                            let r2 = (ro * d + cl) * inner + ri;
                            let c2 = (co * d + rl) * inner + ci;
                            out.data[r * n + c] = rho.data[r2 * n + c2];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Reduced operator on subsystem `keep`, tracing out every other factor.
pub fn partial_trace(
    rho: &ComplexMatrix,
    shape: &SubsystemShape,
    keep: usize,
) -> Result<ComplexMatrix> {
    shape.check(rho, keep)?;
    let (outer, d, inner) = shape.split(keep);
    let n = rho.dim;
    let mut out = ComplexMatrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = ZERO;
            for o in 0..outer {
                for i in 0..inner {
                    let r = (o * d + a) * inner + i;
                    let c = (o * d + b) * inner + i;
                    acc += rho.data[r * n + c];
                }
            }
            out.data[a * d + b] = acc;
        }
    }
    Ok(out)
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?[0])
}

/// Default PSD slack: `1e-10 · max(1, ‖A‖_F)`.
pub fn default_psd_tol(a: &ComplexMatrix) -> f64 {
    1e-10 * a.frobenius_norm().max(1.0)
}

pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(a)? >= -tol)
}

/// ⟨a|b⟩.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(ket: &[Complex64]) -> f64 {
    ket.iter().map(|z| z.norm_sqr()).sum()
}
