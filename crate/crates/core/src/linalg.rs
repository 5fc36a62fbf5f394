//! Dense complex vectors and matrices sized for array processing (N up to a
//! few hundred), with a partial-pivoted LU factorization for the Hermitian
//! solves behind every `R⁻¹s` and `R_ṽ⁻¹S` product.

use std::ops::{Deref, Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative tolerance for the Hermitian-symmetry precondition of [`hermitian_solve`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A pivot smaller than this fraction of the largest input entry marks the
/// matrix as singular.
pub const PIVOT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![ZERO; len])
    }

    /// The `k`th standard basis vector of length `len`.
    pub fn basis(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[k] = ONE;
        v
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self((0..len).map(f).collect())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * factor).collect())
    }

    /// Hermitian inner product `selfᴴ other`.
    pub fn dot(&self, other: &Self) -> Result<Complex64> {
        check_len(self.len(), other.len(), "inner product")?;
        Ok(hdot(&self.0, &other.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// `aᴴ b` on raw slices of equal length.
pub(crate) fn hdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    /// `a bᵀ` (no conjugation; conjugate `b` first for `a bᴴ`).
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
    }

    /// Assembles `[[tl, tr], [bl, br]]` from four equally sized square blocks.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let n = tl.rows;
        for b in [tl, tr, bl, br] {
            if b.rows != n || b.cols != n {
                return Err(Error::DimensionMismatch("blocks must be equal square sizes".into()));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| {
            let block = match (i < n, j < n) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            };
            block[(i % n, j % n)]
        }))
    }

    /// Copies out the `rows × cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<ComplexVector> {
        check_len(self.cols, v.len(), "matrix-vector product")?;
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `max |a_ij − conj(a_ji)| / max |a_ij|`; zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        self.relative_asymmetry(|z| z.conj())
    }

    /// `max |a_ij − a_ji| / max |a_ij|`.
    pub fn symmetric_deviation(&self) -> f64 {
        self.relative_asymmetry(|z| z)
    }

    fn relative_asymmetry(&self, partner: impl Fn(Complex64) -> Complex64) -> f64 {
        assert!(self.is_square(), "asymmetry of a non-square matrix");
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                worst = worst.max((self[(i, j)] - partner(self[(j, i)])).norm());
            }
            worst = worst.max((self[(i, i)] - partner(self[(i, i)])).norm());
        }
        worst / scale
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Partial-pivoted LU factorization `P A = L U` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let threshold = PIVOT_TOL * a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv_pivot = ONE / lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] * inv_pivot;
                lu[i * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= factor * ukj;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<ComplexVector> {
        check_len(self.n, b.len(), "LU solve")?;
        let n = self.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * y[j];
            }
            y[i] = acc / self.lu[i * n + i];
        }
        Ok(ComplexVector(y))
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.solve(&ComplexVector::basis(n, j)).expect("basis vector has the factor's dimension");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

fn check_len(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch(format!("{what}: expected length {expected}, got {got}")));
    }
    Ok(())
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    let dev = a.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Solves `A y = b` for Hermitian `A`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector> {
    check_hermitian(a)?;
    check_len(a.rows, b.len(), "hermitian_solve")?;
    Lu::factor(a)?.solve(b)
}

/// Inverse of a Hermitian matrix, via the same checked LU path as [`hermitian_solve`].
pub fn hermitian_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(a)?;
    Ok(Lu::factor(a)?.inverse())
}

/// Inverse of a general square matrix.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::factor(a)?.inverse())
}

/// `aᴴ M b`.
pub fn quadratic_form(a: &[Complex64], m: &ComplexMatrix, b: &[Complex64]) -> Result<Complex64> {
    check_len(m.rows, a.len(), "quadratic form (left)")?;
    let mb = m.matvec(b)?;
    Ok(hdot(a, &mb))
}

/// Closed-form inverse of a 2×2 matrix.
pub fn invert_2x2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows != 2 || m.cols != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2x2, got {}x{}", m.rows, m.cols)));
    }
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let det = a * d - b * c;
    let threshold = 1e-14 * m.frobenius_norm().powi(2);
    if det.norm() <= threshold || det == ZERO {
        return Err(Error::SingularMatrix { pivot: det.norm(), threshold });
    }
    let inv_det = ONE / det;
    Ok(ComplexMatrix { rows: 2, cols: 2, data: vec![d * inv_det, -b * inv_det, -c * inv_det, a * inv_det] })
}
