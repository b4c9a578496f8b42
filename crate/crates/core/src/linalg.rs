//! Small dense complex matrices.
//!
//! Everything downstream works with matrices of dimension at most a few
//! dozen, so the solvers here are dependency-free: a cyclic Jacobi
//! eigensolver for Hermitian matrices and Gaussian elimination for kernel
//! problems.

use num_complex::Complex;

use crate::scalar::Scalar;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn sub(&self, other: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    fn frobenius(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Sweeps until the off-diagonal mass drops below
    /// `threshold * (1 + ||A||_F)` or `max_sweeps` is hit. Returns the
    /// diagonal, ascending.
    pub fn hermitian_eigenvalues(&self, threshold: T, max_sweeps: usize) -> Vec<T> {
        assert_eq!(self.rows, self.cols, "eigensolver needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let scale = T::one() + self.frobenius();

        for _ in 0..max_sweeps {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off + a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= threshold * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let beta = apq.norm();
                    if beta <= threshold * scale / T::of((n * n) as f64) {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phi = apq.arg();
                    let theta = (beta + beta).atan2(app - aqq) / (T::one() + T::one());
                    let (s, c) = theta.sin_cos();
                    let eip = Complex::from_polar(T::one(), phi);
                    let ein = eip.conj();

                    // Right-multiply by the rotation (columns p, q) ...
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp.scale(c) + (ein * akq).scale(s);
                        a[(k, q)] = (eip * akp).scale(-s) + akq.scale(c);
                    }
                    // ... then left-multiply by its adjoint (rows p, q).
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk.scale(c) + (eip * aqk).scale(s);
                        a[(q, k)] = (ein * apk).scale(-s) + aqk.scale(c);
                    }
                }
            }
        }

        let mut eig: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        eig
    }

    /// Operator (spectral) norm: square root of the largest eigenvalue of
    /// `A† A`.
    pub fn spectral_norm(&self, threshold: T, max_sweeps: usize) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let gram = self.dagger().mul(self);
        let eig = gram.hermitian_eigenvalues(threshold, max_sweeps);
        let top = *eig.last().expect("nonempty spectrum");
        top.max(T::zero()).sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Basis of the nullspace of a complex matrix, by Gaussian elimination
/// with partial pivoting; entries below `tol * max_abs` count as zero.
pub fn nullspace<T: Scalar>(m: &CMatrix<T>, tol: T) -> Vec<Vec<Complex<T>>> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let pivot_cut = tol * (T::one() + m.max_abs());

    let mut pivot_cols = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        // Find the largest pivot in this column at or below `row`.
        let mut best = row;
        for r in (row + 1)..rows {
            if a[(r, col)].norm() > a[(best, col)].norm() {
                best = r;
            }
        }
        if a[(best, col)].norm() <= pivot_cut {
            continue;
        }
        for c in 0..cols {
            let tmp = a[(row, c)];
            a[(row, c)] = a[(best, c)];
            a[(best, c)] = tmp;
        }
        let piv = a[(row, col)];
        for c in 0..cols {
            a[(row, c)] = a[(row, c)] / piv;
        }
        for r in 0..rows {
            if r != row {
                let factor = a[(r, col)];
                if factor.norm() > T::zero() {
                    for c in 0..cols {
                        let sub = factor * a[(row, c)];
                        a[(r, c)] = a[(r, c)] - sub;
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![Complex::new(T::zero(), T::zero()); cols];
        v[fc] = Complex::new(T::one(), T::zero());
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[(r, fc)];
        }
        basis.push(v);
    }
    basis
}

/// Rank of a complex matrix under the same elimination.
pub fn rank<T: Scalar>(m: &CMatrix<T>, tol: T) -> usize {
    m.cols() - nullspace(m, tol).len()
}
