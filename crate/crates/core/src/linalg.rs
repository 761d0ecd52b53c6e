//! Small dense matrices (genus-sized, so at most a few dozen entries).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type CMat<T> = Mat<Complex<T>>;
pub type RMat<T> = Mat<T>;

impl<S: Copy + Zero + One> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<R: Copy + Zero + One>(&self, f: impl Fn(S) -> R) -> Mat<R> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, S> Mul for &'a Mat<S>
where
    S: Copy + Zero + One + Mul<Output = S> + Add<Output = S>,
{
    type Output = Mat<S>;
    fn mul(self, rhs: &'a Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| acc + self[(i, k)] * rhs[(k, j)])
        })
    }
}

impl<'a, S> Sub for &'a Mat<S>
where
    S: Copy + Zero + One + Sub<Output = S>,
{
    type Output = Mat<S>;
    fn sub(self, rhs: &'a Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl<T: Real> Mat<Complex<T>> {
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn re(&self) -> Mat<T> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> Mat<T> {
        self.map(|z| z.im)
    }

    pub fn from_real(m: &Mat<T>) -> Self {
        m.map(|x| Complex::new(x, T::zero()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` when a pivot vanishes.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .fold((col, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() || !best.is_finite() {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == Complex::zero() {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] = a[(r, j)] - factor * ac;
                    inv[(r, j)] = inv[(r, j)] - factor * ic;
                }
            }
        }
        Some(inv)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Uses the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
    /// spectrum is that of the input with every eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.rows;
        let embed = Mat::from_fn(2 * n, 2 * n, |i, j| {
            let z = self[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        let ev = embed.symmetric_eigenvalues();
        ev.into_iter().step_by(2).collect()
    }
}

impl<T: Real> Mat<T> {
    /// Largest absolute entry.
    pub fn max_entry(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Lower Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if d <= T::zero() || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Inverse of a symmetric positive definite matrix via its Cholesky factor.
    pub fn spd_inverse(&self) -> Option<Self> {
        let n = self.rows;
        let l = self.cholesky()?;
        let mut inv = Self::zeros(n, n);
        for col in 0..n {
            // forward solve L y = e_col
            let mut y = vec![T::zero(); n];
            for i in 0..n {
                let mut s = if i == col { T::one() } else { T::zero() };
                for k in 0..i {
                    s = s - l[(i, k)] * y[k];
                }
                y[i] = s / l[(i, i)];
            }
            // back solve L^T x = y
            let mut x = vec![T::zero(); n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s = s - l[(k, i)] * x[k];
                }
                x[i] = s / l[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        // symmetrize the rounding
        Some(Self::from_fn(n, n, |i, j| (inv[(i, j)] + inv[(j, i)]) * T::lit(0.5)))
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let scale = a.max_entry();
        if scale == T::zero() {
            return vec![T::zero(); n];
        }
        for _sweep in 0..100 {
            let mut off = T::zero();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off + a[(i, j)] * a[(i, j)];
                    }
                }
            }
            if off.sqrt() <= T::epsilon() * scale * T::lit(1e-2) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let cs = T::one() / (t * t + T::one()).sqrt();
                    let sn = t * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = cs * akp - sn * akq;
                        a[(k, q)] = sn * akp + cs * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = cs * apk - sn * aqk;
                        a[(q, k)] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Eigenvalues of a real symmetric 2x2 matrix, ascending.
pub fn sym2_eigenvalues<T: Real>(m: [[T; 2]; 2]) -> [T; 2] {
    let half = T::lit(0.5);
    let mean = (m[0][0] + m[1][1]) * half;
    let dev = (m[0][0] - m[1][1]) * half;
    let rad = (dev * dev + m[0][1] * m[0][1]).sqrt();
    [mean - rad, mean + rad]
}
