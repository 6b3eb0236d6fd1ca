//! Small dense complex matrices.
//!
//! Everything at desk scale is a dense matrix over `Complex<T>`; the only
//! nontrivial routine is the cyclic Jacobi eigensolver used for spectral
//! norms. Jacobi is chosen over power iteration because it resolves
//! degenerate spectra deterministically.

use num_complex::Complex;

use crate::scalar::{c_zero, Scalar, C};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![c_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == c_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = c_zero();
                for c in 0..self.cols {
                    acc += self[(r, c)] * v[c];
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + other[(r, c)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - other[(r, c)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * other[(r, c)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest absolute row sum (the l-inf induced norm of the plain matrix).
    pub fn max_row_sum(&self) -> T {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self[(r, c)].norm())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest absolute column sum (the l-1 induced norm of the plain matrix).
    pub fn max_col_sum(&self) -> T {
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .map(|r| self[(r, c)].norm())
                    .fold(T::zero(), |a, b| a + b)
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Eigenvalues of a Hermitian matrix via cyclic Jacobi with complex
    /// rotations. The input is assumed Hermitian; only the upper triangle
    /// drives the rotations. Returned values are unsorted.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        assert_eq!(self.rows, self.cols, "eigenvalues need a square matrix");
        let n = self.rows;
        if n == 0 {
            return Vec::new();
        }
        let mut a = self.clone();
        let scale = a.frobenius_norm();
        if scale == T::zero() {
            return vec![T::zero(); n];
        }
        let tol = T::epsilon() * scale;
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }
        (0..n).map(|i| a[(i, i)].re).collect()
    }

    /// Spectral norm: largest singular value, computed as the square root of
    /// the top eigenvalue of `A* A`.
    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        // Work with the smaller Gram matrix.
        let gram = if self.rows >= self.cols {
            self.adjoint().matmul(self)
        } else {
            self.matmul(&self.adjoint())
        };
        let top = gram
            .hermitian_eigenvalues()
            .into_iter()
            .fold(T::zero(), |a, b| a.max(b));
        top.max(T::zero()).sqrt()
    }

    /// Smallest singular value; zero for rank-deficient matrices.
    pub fn min_singular_value(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let gram = if self.rows >= self.cols {
            self.adjoint().matmul(self)
        } else {
            self.matmul(&self.adjoint())
        };
        let bottom = gram
            .hermitian_eigenvalues()
            .into_iter()
            .fold(T::infinity(), |a, b| a.min(b));
        bottom.max(T::zero()).sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// One Jacobi rotation zeroing the Hermitian pair (p, q).
///
/// The 2x2 block [[app, apq], [conj(apq), aqq]] is diagonalized by the
/// unitary V = diag(1, conj(beta)) . [[c, s], [-s, c]] with beta the phase
/// of apq and (c, s) the classical symmetric Jacobi pair.
fn jacobi_rotate<T: Scalar>(a: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let w = apq.norm();
    // Skip rotations that are exact no-ops to keep diagonal matrices exact.
    if w == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Off-diagonal entries already negligible at working precision are left
    // alone; this also keeps the rotation arithmetic away from underflow.
    if app.abs() + aqq.abs() + w == app.abs() + aqq.abs() {
        return;
    }
    // Componentwise division: norm_sqr of the denominator could underflow.
    let beta = Complex::new(apq.re / w, apq.im / w);

    // Real rotation for [[app, w], [w, aqq]]: t solves t^2 + 2 theta t - 1 = 0
    // with theta = (aqq - app) / (2 w); pick the root of smaller modulus.
    let theta = (aqq - app) / (T::lit(2.0) * w);
    let t = if theta >= T::zero() {
        T::one() / (theta + (T::one() + theta * theta).sqrt())
    } else {
        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    let sb = ss * beta.conj(); // s * conj(beta)

    // A <- A V, columns p and q.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * cc - aiq * sb;
        a[(i, q)] = aip * ss + aiq * cc * beta.conj();
    }
    // A <- V^H A, rows p and q.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * cc - aqj * sb.conj();
        a[(q, j)] = apj * ss + aqj * cc * beta;
    }
    // Clean the rotated pair and enforce a real diagonal.
    a[(p, q)] = c_zero();
    a[(q, p)] = c_zero();
    let dpp = a[(p, p)].re;
    let dqq = a[(q, q)].re;
    a[(p, p)] = Complex::new(dpp, T::zero());
    a[(q, q)] = Complex::new(dqq, T::zero());
}
