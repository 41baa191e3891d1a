// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the operator wrappers that carry algebraic
//! invariants (Hermitian, unitary, normalized state).

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard upper bound on any Hilbert-space dimension handled densely.
pub const HARD_MAX_DIM: usize = 1 << 14;

/// Tolerance on `‖M − M†‖_max / ‖M‖_max` for Hermitian operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `‖U†U − I‖_max` for unitary operators.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on `| ‖ψ‖ − 1 |` for normalized states.
pub const NORM_TOL: f64 = 1e-10;

static MAX_DIM: OnceLock<usize> = OnceLock::new();

/// Effective dimension cap: [`HARD_MAX_DIM`], optionally lowered through the
/// `CHRONO_MAX_DIM` environment variable. Read once per process.
pub fn max_dim() -> usize {
    *MAX_DIM.get_or_init(|| {
        std::env::var("CHRONO_MAX_DIM")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .map_or(HARD_MAX_DIM, |v| v.min(HARD_MAX_DIM))
    })
}

pub(crate) fn check_capacity(dim: usize) -> Result<()> {
    let limit = max_dim();
    if dim > limit {
        Err(Error::Capacity {
            requested: dim,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Dense complex matrix. Storage is delegated to `faer`; the logical layout is
/// row/column indexed and independent of the backing order.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    inner: Mat<Complex64>,
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows() == other.rows()
            && self.cols() == other.cols()
            && (0..self.cols()).all(|j| (0..self.rows()).all(|i| self.get(i, j) == other.get(i, j)))
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_capacity(rows.max(cols))?;
        Ok(Self {
            inner: Mat::zeros(rows, cols),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_capacity(n)?;
        Ok(Self {
            inner: Mat::identity(n, n),
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        check_capacity(rows.max(cols))?;
        let m = Self {
            inner: Mat::from_fn(rows, cols, f),
        };
        m.ensure_finite()?;
        Ok(m)
    }

    /// Build from entries listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::contract(format!(
                "row-major data has {} entries, expected {}",
                data.len(),
                rows * cols
            )));
        }
        Self::from_fn(rows, cols, |i, j| data[i * cols + j])
    }

    pub fn from_real_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let data: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &data)
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(n, n)?;
        for (i, &d) in diag.iter().enumerate() {
            m.inner[(i, i)] = d;
        }
        m.ensure_finite()?;
        Ok(m)
    }

    pub fn real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub(crate) fn from_mat(inner: Mat<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_mat(&self) -> faer::MatRef<'_, Complex64> {
        self.inner.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.inner[(i, j)] = value;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint().to_owned(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose().to_owned(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            inner: Mat::from_fn(self.rows(), self.cols(), |i, j| self.inner[(i, j)] * factor),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::contract(format!(
                "matmul shape mismatch: {}x{} times {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols(), "vector length must match columns");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows()];
        for (j, &vj) in v.iter().enumerate() {
            if vj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.inner.col(j);
            for (o, &a) in out.iter_mut().zip(col.iter()) {
                *o += a * vj;
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols() {
            for &z in self.inner.col(j).iter() {
                m = m.max(z.norm());
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows().min(self.cols()))
            .map(|i| self.get(i, i))
            .sum()
    }

    /// `‖AB − BA‖_max`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        Ok((&ab - &ba).max_abs())
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.rows();
        let mut r = 0.0f64;
        for j in 0..n {
            for i in 0..=j.min(n.saturating_sub(1)) {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.inner.adjoint() * &self.inner;
        let mut r = 0.0f64;
        for j in 0..gram.ncols() {
            for i in 0..gram.nrows() {
                let target = if i == j { 1.0 } else { 0.0 };
                r = r.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        r
    }

    /// Principal submatrix on the given index set.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let n = indices.len();
        Self {
            inner: Mat::from_fn(n, n, |a, b| self.inner[(indices[a], indices[b])]),
        }
    }

    pub fn is_finite(&self) -> bool {
        (0..self.cols()).all(|j| {
            self.inner
                .col(j)
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        })
    }

    fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::contract("matrix contains non-finite entries"))
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Tensor (Kronecker) product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows()).ok_or(Error::Capacity {
        requested: usize::MAX,
        limit: max_dim(),
    })?;
    let cols = a.cols().checked_mul(b.cols()).ok_or(Error::Capacity {
        requested: usize::MAX,
        limit: max_dim(),
    })?;
    check_capacity(rows.max(cols))?;
    let (br, bc) = (b.rows(), b.cols());
    Ok(ComplexMatrix::from_mat(Mat::from_fn(rows, cols, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })))
}

/// Self-adjoint operator; the invariant is checked at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::contract("Hermitian operator must be square"));
        }
        matrix.ensure_finite()?;
        let scale = matrix.max_abs();
        let residual = matrix.hermiticity_residual();
        if residual > HERMITIAN_TOL * scale {
            return Err(Error::contract(format!(
                "matrix is not Hermitian: ‖M − M†‖_max = {residual:.3e}, ‖M‖_max = {scale:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Ok(Self {
            matrix: ComplexMatrix::real_diagonal(diag)?,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Sum of two Hermitian operators of equal dimension.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::contract("dimension mismatch in operator sum"));
        }
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(Complex64::new(factor, 0.0)),
        }
    }

    /// `⟨ψ|H|ψ⟩`, real part.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let h_psi = self.matrix.apply(psi);
        psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// True when the diagonal carries all the weight (exact zeros off-diagonal).
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.matrix.get(i, j) == Complex64::new(0.0, 0.0)))
    }
}

/// Unitary operator; `‖U†U − I‖_max ≤ 1e−10` is checked at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::contract("unitary operator must be square"));
        }
        matrix.ensure_finite()?;
        let residual = matrix.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::contract(format!(
                "matrix is not unitary: ‖U†U − I‖_max = {residual:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self {
            matrix: ComplexMatrix::identity(n)?,
        })
    }

    /// Diagonal unitary `diag(e^{iθ_k})`.
    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect();
        Ok(Self {
            matrix: ComplexMatrix::diagonal(&d)?,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Result<Self> {
        Self::new(self.matrix.matmul(&rhs.matrix)?)
    }

    /// Product `self · rhs` without re-checking unitarity. Callers use this
    /// when both factors were checked and the product is re-checked later.
    pub(crate) fn compose_unchecked(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.matmul(&rhs.matrix)?,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.matrix.apply(psi)
    }

    /// Principal block on an invariant index set. Fails if the block is not
    /// itself unitary, i.e. the set is not invariant.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        Self::new(self.matrix.principal_submatrix(indices))
    }
}

/// State vector with an optional normalization label.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyInput("state vector"));
        }
        check_capacity(amplitudes.len())?;
        Ok(Self {
            amplitudes,
            normalized: false,
        })
    }

    /// Wrap amplitudes that must already be normalized to within 1e−10.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(amplitudes)?;
        let n = s.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::contract(format!("state norm {n} differs from 1")));
        }
        s.normalized = true;
        Ok(s)
    }

    /// Rescale to unit norm.
    pub fn normalize(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(amplitudes)?;
        let n = s.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::contract(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        for a in &mut s.amplitudes {
            *a /= n;
        }
        s.normalized = true;
        Ok(s)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Index {
                what: "basis",
                index,
                len: dim,
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self::normalized(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
