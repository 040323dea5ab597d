//! Dense complex matrices and the handful of operations the rest of the crate
//! is built on: Hermitian eigendecomposition (cyclic Jacobi), Kronecker
//! products, partial traces, the reshuffle permutation and the
//! Hilbert-Schmidt distance.
//!
//! Bipartite indices are always A-slow / B-fast: basis vector `|m>_A (x) |n>_B`
//! sits at position `m * d_B + n`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const MAX_EIG_SIDE: usize = 64;
pub const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from rows of real entries. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |M[i,j] - conj(M[j,i])|`; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `1e-12 * (1 + ||M||_F)`.
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * (1.0 + self.frobenius_norm())
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        let allowed = HERMITIAN_TOL * (1.0 + self.frobenius_norm());
        if defect <= allowed {
            Ok(())
        } else {
            Err(Error::NonHermitianInput { defect, allowed })
        }
    }

    /// `(M + M^dagger) / 2`, removing rounding-level anti-Hermitian parts.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M M^dagger`, computed so the result is exactly Hermitian.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let m = self.cols;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..m {
                    acc += self.data[i * m + k] * self.data[j * m + k].conj();
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::try_mul`] for fallible code.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("matrix entries must be finite"));
        }
        let data = raw.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(raw.rows, raw.cols, data).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in descending order with the matching unitary eigenvector
/// matrix (eigenvector `k` is column `k`).
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }
}

fn check_eig_input(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() > MAX_EIG_SIDE {
        return Err(Error::DimensionMismatch(format!(
            "side {} exceeds the supported maximum {MAX_EIG_SIDE}",
            m.rows()
        )));
    }
    m.check_hermitian()
}

/// Full Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back in descending order. Each eigenvector is rotated so
/// its largest-magnitude component is real and non-negative.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    check_eig_input(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part().into_data();
    let mut v = ComplexMatrix::identity(n).into_data();
    jacobi(&mut a, Some(&mut v), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));

    let eigenvalues = order.iter().map(|&k| a[k * n + k].re).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut best = 0;
        let mut best_norm = -1.0;
        for i in 0..n {
            let nrm = v[i * n + src].norm();
            if nrm > best_norm + 1e-14 {
                best = i;
                best_norm = nrm;
            }
        }
        let pivot = v[best * n + src];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            vecs[(i, dst)] = v[i * n + src] * phase;
        }
        vecs[(best, dst)] = C64::new(vecs[(best, dst)].norm(), 0.0);
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Eigenvalues only, descending. Closed form for sides 1 and 2.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_eig_input(m)?;
    let n = m.rows();
    match n {
        1 => Ok(vec![m[(0, 0)].re]),
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            Ok(vec![mean + half_gap, mean - half_gap])
        }
        _ => {
            let mut a = m.hermitian_part().into_data();
            jacobi(&mut a, None, n)?;
            let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
            vals.sort_by(|x, y| y.total_cmp(x));
            Ok(vals)
        }
    }
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(a: &mut [C64], mut v: Option<&mut Vec<C64>>, n: usize) -> Result<()> {
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || n == 1 {
        return Ok(());
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, n) <= OFF_DIAGONAL_TOL * norm {
            return Ok(());
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[p * n + q];
                let g_abs = g.norm();
                if g_abs == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * g_abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = g / g_abs;
                // U = [[c, s e^{i theta}], [-s e^{-i theta}, c]] on (p, q); A <- U^dagger A U.
                let upq = phase * s;
                let uqp = -phase.conj() * s;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * uqp;
                    a[k * n + q] = akp * upq + akq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * uqp.conj();
                    a[q * n + k] = apk * upq.conj() + aqk * c;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c + vkq * uqp;
                        v[k * n + q] = vkp * upq + vkq * c;
                    }
                }
            }
        }
    }
    if off_diagonal_norm(a, n) <= OFF_DIAGONAL_TOL * norm {
        Ok(())
    } else {
        Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
    }
}

/// Which factor of a bipartite space to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn partial_trace(m: &ComplexMatrix, d_a: usize, d_b: usize, which: Subsystem) -> Result<ComplexMatrix> {
    let side = d_a * d_b;
    if !m.is_square() || m.rows() != side || side == 0 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {d_a}x{d_b} needs a {side}x{side} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let out = match which {
        Subsystem::A => ComplexMatrix::from_fn(d_b, d_b, |n, nu| {
            (0..d_a).map(|k| m[(k * d_b + n, k * d_b + nu)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d_a, d_a, |mm, mu| {
            (0..d_b).map(|k| m[(mm * d_b + k, mu * d_b + k)]).sum()
        }),
    };
    Ok(out)
}

pub fn perfect_square_root(side: usize) -> Option<usize> {
    let r = (side as f64).sqrt().round() as usize;
    (r * r == side).then_some(r)
}

/// `out[(m,n),(mu,nu)] = X[(m,mu),(n,nu)]` for an `N^2 x N^2` matrix. An involution.
pub fn reshuffle(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() {
        return Err(Error::NotPerfectSquareSide(x.rows().max(x.cols())));
    }
    let n = perfect_square_root(x.rows()).ok_or(Error::NotPerfectSquareSide(x.rows()))?;
    Ok(ComplexMatrix::from_fn(x.rows(), x.cols(), |row, col| {
        let (m, nn) = (row / n, row % n);
        let (mu, nu) = (col / n, col % n);
        x[(m * n + mu, nn * n + nu)]
    }))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |row, col| {
        a[(row / rb, col / cb)] * b[(row % rb, col % cb)]
    })
}

/// `sqrt(Tr[(A-B)^dagger (A-B)])`
pub fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(a.try_sub(b)?.frobenius_norm())
}
