//! Fixed-size complex linear algebra over the three-level state space.
//!
//! Matrices are stored row-major. All operations are pure value operations;
//! nothing here allocates.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative guard used by [`Matrix3::inverse`]: `|det| > SINGULAR_TOL * |m|^3`.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector3(pub [C64; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix3(pub [[C64; 3]; 3]);

impl Vector3 {
    pub const fn new(a: C64, b: C64, c: C64) -> Self {
        Vector3([a, b, c])
    }

    pub const fn zero() -> Self {
        Vector3([ZERO; 3])
    }

    /// Unit vector along basis state `|i+1>`.
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = ONE;
        v
    }

    pub fn from_real(a: f64, b: f64, c: f64) -> Self {
        Vector3([C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0)])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Vector3(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Vector3(self.0.map(|z| z * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `(u, v) = sum_i conj(u_i) v_i`, conjugate-linear in the first slot.
pub fn scalar_product(u: &Vector3, v: &Vector3) -> C64 {
    u.0.iter().zip(v.0.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// The dyad `|u><v|`.
pub fn outer(u: &Vector3, v: &Vector3) -> Matrix3 {
    let mut m = Matrix3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m.0[i][j] = u.0[i] * v.0[j].conj();
        }
    }
    m
}

impl Matrix3 {
    pub const fn zero() -> Self {
        Matrix3([[ZERO; 3]; 3])
    }

    pub const fn identity() -> Self {
        Matrix3([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])
    }

    pub const fn diag(a: C64, b: C64, c: C64) -> Self {
        Matrix3([[a, ZERO, ZERO], [ZERO, b, ZERO], [ZERO, ZERO, c]])
    }

    pub fn diag_real(a: f64, b: f64, c: f64) -> Self {
        Self::diag(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    /// The unit matrix `E_ij` with a single one at (row, col), zero-based.
    pub fn unit(row: usize, col: usize) -> Self {
        let mut m = Self::zero();
        m.0[row][col] = ONE;
        m
    }

    pub fn from_columns(c0: &Vector3, c1: &Vector3, c2: &Vector3) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][0] = c0.0[i];
            m.0[i][1] = c1.0[i];
            m.0[i][2] = c2.0[i];
        }
        m
    }

    pub fn column(&self, j: usize) -> Vector3 {
        Vector3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flat_map(|r| r.iter()).map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Closed-form cofactor inverse, guarded by `|det| > 1e-12 * |m|^3`.
    pub fn inverse(&self) -> Result<Self> {
        let m = &self.0;
        let det = self.det();
        let scale = self.max_abs();
        let guard = SINGULAR_TOL * scale * scale * scale;
        if !(det.norm() > guard) {
            return Err(Error::SingularMatrix {
                det: det.norm(),
                guard,
            });
        }
        let cof = |a: usize, b: usize, c: usize, d: usize| m[a][b] * m[c][d];
        let adj = [
            [
                cof(1, 1, 2, 2) - cof(1, 2, 2, 1),
                cof(0, 2, 2, 1) - cof(0, 1, 2, 2),
                cof(0, 1, 1, 2) - cof(0, 2, 1, 1),
            ],
            [
                cof(1, 2, 2, 0) - cof(1, 0, 2, 2),
                cof(0, 0, 2, 2) - cof(0, 2, 2, 0),
                cof(0, 2, 1, 0) - cof(0, 0, 1, 2),
            ],
            [
                cof(1, 0, 2, 1) - cof(1, 1, 2, 0),
                cof(0, 1, 2, 0) - cof(0, 0, 2, 1),
                cof(0, 0, 1, 1) - cof(0, 1, 1, 0),
            ],
        ];
        let inv_det = det.inv();
        Ok(Matrix3(adj.map(|row| row.map(|z| z * inv_det))))
    }

    /// `|m - m^dagger|` measured entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()) * 0.5
    }

    /// Eigenvalues of the Hermitian part of `self`, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 3] {
        let h = self.hermitian_part();
        let m = nalgebra::Matrix3::from_fn(|i, j| h.0[i][j]);
        let ev = m.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    /// Closed-form (trigonometric) eigenvalues of the Hermitian part,
    /// ascending. Cheaper than [`Matrix3::hermitian_eigenvalues`] but only
    /// accurate to about `sqrt(eps)` near degenerate pairs; meant for
    /// screening, not auditing.
    pub fn hermitian_eigenvalues_fast(&self) -> [f64; 3] {
        let m = &self.0;
        let (a, b, c) = (m[0][0].re, m[1][1].re, m[2][2].re);
        let u = (m[0][1] + m[1][0].conj()) * 0.5;
        let v = (m[0][2] + m[2][0].conj()) * 0.5;
        let w = (m[1][2] + m[2][1].conj()) * 0.5;
        let off = u.norm_sqr() + v.norm_sqr() + w.norm_sqr();
        let q = (a + b + c) / 3.0;
        if off == 0.0 {
            let mut e = [a, b, c];
            e.sort_by(|x, y| x.total_cmp(y));
            return e;
        }
        let (da, db, dc) = (a - q, b - q, c - q);
        let p2 = da * da + db * db + dc * dc + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        // det(A - qI) for the Hermitian matrix
        let det = da * db * dc + 2.0 * (u * w * v.conj()).re
            - da * w.norm_sqr()
            - db * v.norm_sqr()
            - dc * u.norm_sqr();
        let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        [lo, 3.0 * q - hi - lo, hi]
    }

    pub fn mul_vec(&self, v: &Vector3) -> Vector3 {
        let m = &self.0;
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = m[i][0] * v.0[0] + m[i][1] * v.0[1] + m[i][2] * v.0[2];
        }
        Vector3(out)
    }
}

/// `a b - b a`.
pub fn commutator(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    *a * *b - *b * *a
}

impl Index<(usize, usize)> for Matrix3 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Index<usize> for Vector3 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(mut self, rhs: Matrix3) -> Matrix3 {
        self += rhs;
        self
    }
}

impl AddAssign for Matrix3 {
    fn add_assign(&mut self, rhs: Matrix3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(mut self, rhs: Matrix3) -> Matrix3 {
        self -= rhs;
        self
    }
}

impl SubAssign for Matrix3 {
    fn sub_assign(&mut self, rhs: Matrix3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Neg for Matrix3 {
    type Output = Matrix3;
    fn neg(self) -> Matrix3 {
        Matrix3(self.0.map(|r| r.map(|z| -z)))
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Matrix3(out)
    }
}

impl Mul<Vector3> for Matrix3 {
    type Output = Vector3;
    fn mul(self, v: Vector3) -> Vector3 {
        self.mul_vec(&v)
    }
}

impl Mul<C64> for Matrix3 {
    type Output = Matrix3;
    fn mul(self, s: C64) -> Matrix3 {
        Matrix3(self.0.map(|r| r.map(|z| z * s)))
    }
}

impl Mul<f64> for Matrix3 {
    type Output = Matrix3;
    fn mul(self, s: f64) -> Matrix3 {
        Matrix3(self.0.map(|r| r.map(|z| z * s)))
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, rhs: Vector3) -> Vector3 {
        Vector3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, rhs: Vector3) -> Vector3 {
        Vector3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Mul<C64> for Vector3 {
    type Output = Vector3;
    fn mul(self, s: C64) -> Vector3 {
        self.scale(s)
    }
}

impl fmt::Display for Matrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            writeln!(f, "[{} {} {}]", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}
