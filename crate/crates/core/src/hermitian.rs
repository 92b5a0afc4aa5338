//! Dense complex linear algebra for small matrices.
//!
//! Everything downstream (block maps, the matrices `C(xi)`, scaling matrices)
//! is carried by [`ComplexMatrix`], a row-major square matrix of `Complex64`.
//! Hermitian eigenvalues come from a cyclic complex Jacobi iteration, which is
//! deterministic and accurate to a few ulps for the dimensions used here
//! (at most 8).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Inputs whose Hermitian asymmetry stays below this (relative to the largest
/// entry, floored at 1) are symmetrized; anything larger is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (relative to the Frobenius norm, floored at 1).
pub const JACOBI_TOL: f64 = 1e-13;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues below this are clamped before taking inverse square roots.
const EIGEN_FLOOR: f64 = 1e-14;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
///
/// Serialized as a row-major nested array of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<C64>>", into = "Vec<Vec<C64>>")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = ONE;
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Rank-one matrix `v v*`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`, the workhorse for block sums.
    pub fn add_scaled(&mut self, s: C64, other: &ComplexMatrix) {
        assert_eq!(self.dim, other.dim, "add_scaled: dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_pq - conj(a_qp)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in p..n {
                worst = worst.max((self[(p, q)] - self[(q, p)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_asymmetry() <= tol
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for p in 0..n {
            for q in 0..n {
                m[(p, q)] = (self[(p, q)] + self[(q, p)].conj()) * 0.5;
            }
        }
        m
    }

    /// Quadratic form `x* A x`.
    pub fn quad_form(&self, x: &[C64]) -> C64 {
        assert_eq!(self.dim, x.len(), "quad_form: dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for p in 0..n {
            let mut row = ZERO;
            for q in 0..n {
                row += self.data[p * n + q] * x[q];
            }
            acc += x[p].conj() * row;
        }
        acc
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, x.len(), "mul_vec: dimension mismatch");
        (0..self.dim)
            .map(|p| self.row(p).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Symmetrize after checking the input is Hermitian within [`HERMITIAN_TOL`].
    pub(crate) fn checked_hermitian_part(&self) -> Result<Self> {
        let asym = self.hermitian_asymmetry();
        if asym > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(self.hermitian_part())
    }

    fn mul_unchecked(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl TryFrom<Vec<Vec<C64>>> for ComplexMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<C64>>) -> Result<Self> {
        ComplexMatrix::from_rows(rows)
    }
}

impl From<ComplexMatrix> for Vec<Vec<C64>> {
    fn from(m: ComplexMatrix) -> Self {
        m.rows()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Panics on dimension mismatch; use [`matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product: dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(a.mul_unchecked(b))
}

/// Determinant by Gaussian elimination with partial pivoting.
/// Exactly singular matrices give 0.
pub fn det(a: &ComplexMatrix) -> C64 {
    let n = a.dim;
    let mut m = a.data.clone();
    let mut acc = ONE;
    for k in 0..n {
        let mut piv = k;
        let mut best = m[k * n + k].norm();
        for i in k + 1..n {
            let v = m[i * n + k].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            acc = -acc;
        }
        let pivot = m[k * n + k];
        acc *= pivot;
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let t = m[k * n + j];
                m[i * n + j] -= f * t;
            }
        }
    }
    acc
}

/// Eigen-decomposition of a Hermitian matrix: `A = V diag(values) V*`,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim;
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += m[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One unitary Jacobi rotation annihilating `m[(p, q)]`, accumulated into `v`.
fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = m[(p, q)];
    let abs = g.norm();
    if abs == 0.0 {
        return;
    }
    // Phase-rotate to a real symmetric 2x2 problem, then apply a Givens rotation.
    let phase = g / abs;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * abs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    let n = m.dim;
    // columns: M <- M U
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * u_pp + mkq * u_qp;
        m[(k, q)] = mkp * u_pq + mkq * u_qq;
    }
    // rows: M <- U* M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * mpk + u_qp.conj() * mqk;
        m[(q, k)] = u_pq.conj() * mpk + u_qq.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Cyclic Jacobi eigen-decomposition with a fixed row-major sweep order.
pub fn herm_eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut m = a.checked_hermitian_part()?;
    let n = m.dim;
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * m.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) < threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&m);
        if off >= threshold {
            return Err(Error::EigenNoConvergence { off_norm: off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn herm_eigvals(a: &ComplexMatrix) -> Result<Vec<f64>> {
    herm_eigh(a).map(|e| e.values)
}

/// Positive-definiteness test: `(min eigenvalue > tol, min eigenvalue)`.
pub fn is_positive_definite(a: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let vals = herm_eigvals(a)?;
    let min = vals.first().copied().unwrap_or(f64::INFINITY);
    Ok((min > tol, min))
}

/// `A^{-1/2}` for Hermitian positive definite `A`.
///
/// Eigenvalues are clamped below at `1e-14`; if the clamp has to move an
/// eigenvalue by more than `1e-8` relative to the spectral radius the matrix
/// is reported as [`Error::NearSingular`].
pub fn inv_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eigh(a)?;
    let n = a.dim();
    let lmax = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = ComplexMatrix::zeros(n);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam < EIGEN_FLOOR && (EIGEN_FLOOR - lam) > 1e-8 * lmax.max(EIGEN_FLOOR) {
            return Err(Error::NearSingular { min_eig: lam });
        }
        let w = 1.0 / lam.max(EIGEN_FLOOR).sqrt();
        for i in 0..n {
            let vi = eig.vectors[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_products() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(matmul(&i3, &i3).unwrap(), i3);
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert_eq!(&a * &b, ComplexMatrix::from_real_diag(&[3.0, 8.0]));
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let err = matmul(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn det_simple_cases() {
        assert_eq!(det(&ComplexMatrix::identity(3)), ONE);
        let d = det(&ComplexMatrix::from_real_diag(&[1.0, 2.0, 3.0]));
        assert!((d - c(6.0, 0.0)).norm() < 1e-15);
        let mut s = ComplexMatrix::zeros(2);
        s[(0, 0)] = ONE;
        s[(1, 0)] = ONE;
        assert_eq!(det(&s), ZERO);
        // pivoting: [[0,1],[1,0]] has det -1
        let p = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        assert_eq!(det(&p), -ONE);
    }

    #[test]
    fn eigvals_simple_cases() {
        let v = herm_eigvals(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(v, vec![1.0, 1.0, 1.0]);
        let v = herm_eigvals(&ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigvals_two_by_two_complex() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let v = herm_eigvals(&m).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            vec![c(1.0, -1.0), c(3.0, 0.0), c(0.25, 0.0)],
            vec![c(0.0, 0.5), c(0.25, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eigh(&m).unwrap();
        let lam = ComplexMatrix::from_real_diag(&e.values);
        let back = &(&e.vectors * &lam) * &e.vectors.adjoint();
        assert!(back.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(herm_eigvals(&m), Err(Error::NotHermitian { .. })));
        assert!(is_positive_definite(&m, 1e-12).is_err());
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1e-12, 0.0);
        assert!(herm_eigvals(&m).is_ok());
    }

    #[test]
    fn positive_definite_cases() {
        let (ok, min) = is_positive_definite(&ComplexMatrix::identity(3), 1e-12).unwrap();
        assert!(ok && min == 1.0);
        let (ok, min) =
            is_positive_definite(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-12).unwrap();
        assert!(!ok && min == 0.0);
        let (ok, min) =
            is_positive_definite(&ComplexMatrix::from_real_diag(&[2.0, -1.0]), 1e-12).unwrap();
        assert!(!ok && min == -1.0);
    }

    #[test]
    fn inv_sqrt_of_diagonal() {
        let m = ComplexMatrix::from_real_diag(&[4.0, 0.25]);
        let r = inv_sqrt(&m).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 2.0])) < 1e-14);
        let bad = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(inv_sqrt(&bad), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn json_shape() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 2.0)],
            vec![c(0.0, -2.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[0.0,2.0]],[[0.0,-2.0],[3.0,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0],[0,0]]]").is_err());
    }
}
