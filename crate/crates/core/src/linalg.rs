//! Dense complex linear algebra at desk scale.
//!
//! Vectors and matrices are small (N up to a few thousand), so everything
//! here is plain `Vec`-backed and O(N^2) or O(N^3). Matrices are stored
//! row-major; [`vectorize`] and [`reshape_cols`] use column-major order
//! because that is how data blocks are laid out on the wire.

use std::f64::consts::PI;
use std::ops::{Deref, Index};

use num_complex::Complex64;

use crate::error::{dim_err, param_err, Error, Result};

/// Pivots smaller than this fraction of the largest entry are treated as zero.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// A non-empty vector of finite complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return dim_err("vector must have at least one element");
        }
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return param_err(format!("non-finite element at index {i}"));
        }
        Ok(Self(data))
    }

    /// Wraps values produced by arithmetic on already validated inputs.
    pub(crate) fn from_vec(data: Vec<Complex64>) -> Self {
        debug_assert!(!data.is_empty());
        Self(data)
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return dim_err("vector must have at least one element");
        }
        Ok(Self(vec![Complex64::new(0.0, 0.0); len]))
    }

    /// Unit impulse `e_index` of the given length.
    pub fn unit(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return param_err(format!("impulse index {index} out of range for length {len}"));
        }
        let mut v = Self::zeros(len)?;
        v.0[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest elementwise distance; `INFINITY` when lengths differ.
    pub fn max_abs_diff(&self, other: &[Complex64]) -> f64 {
        max_abs_diff(&self.0, other)
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl AsRef<[Complex64]> for ComplexVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return dim_err(format!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        if data.len() != rows * cols {
            return dim_err(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(i) = data.iter().position(|z| !z.is_finite()) {
            return param_err(format!("non-finite entry at flat index {i}"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0))
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ComplexVector {
        ComplexVector::from_vec((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (j, a) in self.row(r).iter().enumerate() {
                if *a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(j)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<ComplexVector> {
        if self.cols != v.len() {
            return dim_err(format!(
                "cannot multiply {}x{} matrix by length-{} vector",
                self.rows,
                self.cols,
                v.len()
            ));
        }
        Ok(ComplexVector::from_vec(
            (0..self.rows)
                .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance; `INFINITY` when shapes differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        max_abs_diff(&self.data, &other.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

/// Unitary `n`-point DFT matrix, entry `(j,k) = exp(-2πi·jk/n)/√n`.
pub fn dft_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return dim_err("DFT size must be positive");
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        // reduce jk mod n first so the angle stays small
        let phase = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    }))
}

pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let mut out = Vec::with_capacity(m.rows * m.cols);
    for c in 0..m.cols {
        for r in 0..m.rows {
            out.push(m[(r, c)]);
        }
    }
    ComplexVector::from_vec(out)
}

/// Column-major fill: entry `(r,c)` is `v[c·rows + r]`. Inverse of [`vectorize`].
pub fn reshape_cols(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 || v.len() != rows * cols {
        return dim_err(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        ));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| v[c * rows + r]))
}

/// Rotates forward by `shift` places: `out[(n + shift) mod N] = v[n]`.
pub fn circular_shift(v: &[Complex64], shift: isize) -> ComplexVector {
    let mut out = v.to_vec();
    if !out.is_empty() {
        let s = shift.rem_euclid(out.len() as isize) as usize;
        out.rotate_right(s);
    }
    ComplexVector::from_vec(out)
}

/// Tiles the whole vector `times` times: `out[n] = v[n mod len]`.
pub fn repeat_periodic(v: &[Complex64], times: usize) -> Result<ComplexVector> {
    if times == 0 {
        return param_err("repetition factor must be at least 1");
    }
    if v.is_empty() {
        return dim_err("cannot repeat an empty vector");
    }
    Ok(ComplexVector::from_vec(v.repeat(times)))
}

pub fn diag_embed(v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), v.len(), |r, c| {
        if r == c {
            v[r]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    n: usize,
    // L below the diagonal (unit diagonal implied), U on and above
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return dim_err(format!("LU needs a square matrix, got {}x{}", a.rows, a.cols));
        }
        let n = a.rows;
        let scale = a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|r| (r, lu[r * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if scale == 0.0 || pivot_abs < SINGULAR_PIVOT_RATIO * scale {
                return Err(Error::SingularMatrix {
                    condition_indicator: if pivot_abs > 0.0 { scale / pivot_abs } else { f64::INFINITY },
                });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in k + 1..n {
                    let u = lu[k * n + c];
                    lu[r * n + c] -= factor * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Complex64]) -> Result<ComplexVector> {
        let n = self.n;
        if b.len() != n {
            return dim_err(format!("right-hand side has length {}, expected {n}", b.len()));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc / self.lu[r * n + r];
        }
        Ok(ComplexVector::from_vec(x))
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[c] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e).expect("length matches");
            for (r, z) in col.iter().enumerate() {
                inv.data[r * n + c] = *z;
            }
        }
        inv
    }
}

pub fn solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector> {
    LuDecomposition::new(a)?.solve(b)
}

pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(LuDecomposition::new(a)?.inverse())
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let m = nalgebra::DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// 2-norm condition number `σ_max/σ_min`.
///
/// Returns `INFINITY` when the matrix is numerically rank deficient, i.e.
/// `σ_min ≤ max(rows, cols)·ε·σ_max`.
pub fn condition_number(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    let (max, min) = (s[0], s[s.len() - 1]);
    let tol = a.rows.max(a.cols) as f64 * f64::EPSILON * max;
    if max == 0.0 || min <= tol {
        f64::INFINITY
    } else {
        max / min
    }
}
