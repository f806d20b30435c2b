//! Fixed-size 3-vectors and 3×3 matrices, plus a small dense matrix used for
//! Jacobians and their numerical spectra.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Outer product `self · otherᵀ`.
    pub fn outer(self, o: Self) -> Mat3<T> {
        let a = self.to_array();
        let b = o.to_array();
        Mat3::from_fn(|r, c| a[r] * b[c])
    }

    /// Cross-product matrix `[v]ₓ` with `[v]ₓ w = v × w`.
    pub fn hat(self) -> Mat3<T> {
        let z = T::zero();
        Mat3::from_rows([[z, -self.z, self.y], [self.z, z, -self.x], [-self.y, self.x, z]])
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Dense 3×3 matrix stored row-major: entry `(r, c)` lives at `3 * r + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    m: [T; 9],
}

impl<T: Real> Default for Mat3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real> Mat3<T> {
    pub const fn from_row_major(m: [T; 9]) -> Self {
        Self { m }
    }

    pub fn from_rows(rows: [[T; 3]; 3]) -> Self {
        Self::from_fn(|r, c| rows[r][c])
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        let cols = [c0.to_array(), c1.to_array(), c2.to_array()];
        Self::from_fn(|r, c| cols[c][r])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = [T::zero(); 9];
        for r in 0..3 {
            for c in 0..3 {
                m[3 * r + c] = f(r, c);
            }
        }
        Self { m }
    }

    pub fn zeros() -> Self {
        Self { m: [T::zero(); 9] }
    }

    pub fn identity() -> Self {
        Self::diag([T::one(); 3])
    }

    pub fn diag(d: [T; 3]) -> Self {
        Self::from_fn(|r, c| if r == c { d[r] } else { T::zero() })
    }

    /// Matrix with a single one at `(r, c)`.
    pub fn unit(r: usize, c: usize) -> Self {
        let mut m = Self::zeros();
        m[(r, c)] = T::one();
        m
    }

    pub fn as_row_major(&self) -> &[T; 9] {
        &self.m
    }

    pub fn to_row_major(self) -> [T; 9] {
        self.m
    }

    pub fn from_slice(s: &[T]) -> Self {
        assert_eq!(s.len(), 9, "Mat3 needs nine entries");
        let mut m = [T::zero(); 9];
        m.copy_from_slice(s);
        Self { m }
    }

    pub fn col(&self, c: usize) -> Vec3<T> {
        Vec3::new(self[(0, c)], self[(1, c)], self[(2, c)])
    }

    pub fn row(&self, r: usize) -> Vec3<T> {
        Vec3::new(self[(r, 0)], self[(r, 1)], self[(r, 2)])
    }

    pub fn set_col(&mut self, c: usize, v: Vec3<T>) {
        self[(0, c)] = v.x;
        self[(1, c)] = v.y;
        self[(2, c)] = v.z;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|r, c| self[(c, r)])
    }

    pub fn trace(&self) -> T {
        self.m[0] + self.m[4] + self.m[8]
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
    }

    /// Frobenius inner product `⟨A, B⟩ = tr(AᵀB)`.
    pub fn inner(&self, o: &Self) -> T {
        self.m.iter().zip(o.m.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn frobenius_norm_squared(&self) -> T {
        self.inner(self)
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().fold(T::zero(), |acc, &a| acc.max(a.abs()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self { m: self.m.map(|a| a * k) }
    }

    pub fn map(&self, f: impl FnMut(T) -> T) -> Self {
        Self { m: self.m.map(f) }
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|a| a.is_finite())
    }

    /// Antisymmetric part `(A − Aᵀ)/2`.
    pub fn skew_part(&self) -> Self {
        let half = T::lit(0.5);
        (*self - self.transpose()).scale(half)
    }

    /// Symmetric part `(A + Aᵀ)/2`.
    pub fn sym_part(&self) -> Self {
        let half = T::lit(0.5);
        (*self + self.transpose()).scale(half)
    }

    /// `‖AᵀA − I‖_F`, the orthogonality defect.
    pub fn orthogonality_error(&self) -> T {
        (self.transpose() * *self - Self::identity()).frobenius_norm()
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        Mat3 { m: self.m.map(|a| U::from_f64(a.to_f64_lossy()).unwrap_or_else(U::nan)) }
    }
}

impl<T> Index<(usize, usize)> for Mat3<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.m[3 * r + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.m[3 * r + c]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self.m;
        for (a, b) in m.iter_mut().zip(o.m.iter()) {
            *a += *b;
        }
        Self { m }
    }
}

impl<T: Real> AddAssign for Mat3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self.m;
        for (a, b) in m.iter_mut().zip(o.m.iter()) {
            *a -= *b;
        }
        Self { m }
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|r, c| self[(r, 0)] * o[(0, c)] + self[(r, 1)] * o[(1, c)] + self[(r, 2)] * o[(2, c)])
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }
}

impl<T> AsRef<DenseMatrix<T>> for DenseMatrix<T> {
    fn as_ref(&self) -> &DenseMatrix<T> {
        self
    }
}

/// Row-major dense matrix of runtime size.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape does not match data length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[T]) {
        assert_eq!(v.len(), self.rows);
        for (r, &x) in v.iter().enumerate() {
            self[(r, c)] = x;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| (0..self.cols).fold(T::zero(), |acc, c| acc + self[(r, c)] * v[c])).collect()
    }

    pub fn transpose_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|c| (0..self.rows).fold(T::zero(), |acc, r| acc + self[(r, c)] * v[r])).collect()
    }

    pub fn frobenius_norm_squared(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &a| acc + a * a)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        self.data.iter().zip(o.data.iter()).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// Singular values in descending order, `min(rows, cols)` of them.
    ///
    /// One-sided Jacobi on the columns of `self` (or of its transpose when
    /// the matrix is wide); accurate to a few ulps relative to the largest
    /// singular value.
    pub fn singular_values(&self) -> Vec<T> {
        let a = if self.cols > self.rows { self.transpose() } else { self.clone() };
        let n = a.cols;
        let mut cols: Vec<Vec<T>> = (0..n).map(|c| a.column(c)).collect();
        let tol = T::jacobi_tol();
        for _ in 0..100 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = dot(&cols[p], &cols[p]);
                    let beta = dot(&cols[q], &cols[q]);
                    let gamma = dot(&cols[p], &cols[q]);
                    if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == T::zero() {
                        continue;
                    }
                    rotated = true;
                    let (c, s) = jacobi_rotation(alpha, beta, gamma);
                    let (lo, hi) = cols.split_at_mut(q);
                    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (ap, aq) = (*x, *y);
                        *x = c * ap - s * aq;
                        *y = s * ap + c * aq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<T> = cols.iter().map(|v| dot(v, v).sqrt()).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        sv
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Plane rotation `(c, s)` that orthogonalizes two columns with squared
/// norms `alpha`, `beta` and inner product `gamma`. Applying
/// `p' = c·p − s·q`, `q' = s·p + c·q` zeroes `p'·q'`.
pub(crate) fn jacobi_rotation<T: Real>(alpha: T, beta: T, gamma: T) -> (T, T) {
    let two = T::lit(2.0);
    let zeta = (beta - alpha) / (two * gamma);
    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, c * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_transpose() {
        let a = Mat3::from_rows([[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [1.0, 0.0, 4.0]]);
        assert_eq!(a.det(), 25.0);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose()[(0, 2)], 1.0);
    }

    #[test]
    fn hat_matches_cross() {
        let v = Vec3::new(0.3, -1.2, 2.0);
        let w = Vec3::new(-0.7, 0.4, 1.1);
        let a = v.hat() * w;
        let b = v.cross(w);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn dense_singular_values_of_diagonal() {
        let mut d = DenseMatrix::<f64>::zeros(4, 3);
        d[(0, 0)] = -2.0;
        d[(1, 1)] = 5.0;
        d[(2, 2)] = 1.0;
        let sv = d.singular_values();
        assert_eq!(sv, vec![5.0, 2.0, 1.0]);
        let wide = d.transpose().singular_values();
        assert_eq!(wide, vec![5.0, 2.0, 1.0]);
    }

    #[test]
    fn dense_singular_values_rotated() {
        // A planar rotation times diag(3, 1) has singular values {3, 1}.
        let (c, s) = (0.6f64, 0.8f64);
        let a = DenseMatrix::from_row_major(2, 2, vec![3.0 * c, -s, 3.0 * s, c]);
        let sv = a.singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 1.0).abs() < 1e-14);
    }
}
