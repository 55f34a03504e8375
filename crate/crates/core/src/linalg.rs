//! Dense complex matrices and the Hermitian eigensolver everything else is
//! built on.
//!
//! Storage is row-major. Multi-register operators use the convention that the
//! leftmost tensor factor is the slowest-varying index.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries; fails if the count is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// |v><v| for a column vector v.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Tr[self * other] without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            let row = self.row(r);
            for (k, &a) in row.iter().enumerate() {
                acc += a * other[(k, r)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// self * other - other * self
    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    /// U * self * U^dagger
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Kronecker product, `self` is the slow (leftmost) factor.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self[(ar, ac)];
                if a == ZERO {
                    continue;
                }
                for br in 0..other.rows {
                    for bc in 0..other.cols {
                        out[(ar * other.rows + br, ac * other.cols + bc)] = a * other[(br, bc)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |A - A^dagger| entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// (A + A^dagger) / 2
    pub fn hermitian_part(&self) -> ComplexMatrix {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    /// max |U^dagger U - 1| entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Expresses the matrix in the basis given by the columns of `basis`:
    /// basis^dagger * self * basis.
    pub fn in_basis(&self, basis: &ComplexMatrix) -> ComplexMatrix {
        basis.adjoint().matmul(self).matmul(basis)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// Sum_i f(lambda_i) |v_i><v_i|
    pub fn apply_fn(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let weights: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = ZERO;
            for k in 0..n {
                if weights[k] != ZERO {
                    acc += v[(r, k)] * weights[k] * v[(c, k)].conj();
                }
            }
            acc
        })
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices. Only the Hermitian part
/// of the input is used.
pub fn eigh(m: &ComplexMatrix) -> Eigh {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if n > 1 && scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| {
        diag[x]
            .partial_cmp(&diag[y])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigh { values, vectors }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that are below round-off relative to the diagonal.
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let phase_conj = phase.conj();
    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase_conj * s;
    let j_qq = phase_conj * c;

    let n = a.rows();
    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// exp(i t H) for Hermitian H, via its spectral decomposition.
pub fn expi_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    eigh(h).apply_fn(|l| C64::new(0.0, l * t).exp())
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn basis_vector(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

pub fn computational_basis(d: usize) -> Vec<Vec<C64>> {
    (0..d).map(|i| basis_vector(d, i)).collect()
}

/// Matrix whose columns are the given vectors.
pub fn columns_to_matrix(cols: &[Vec<C64>]) -> ComplexMatrix {
    let rows = cols.first().map_or(0, |c| c.len());
    ComplexMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// max |<v_i|v_j> - delta_ij|
pub fn orthonormality_defect(vectors: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(a, b) - target).norm());
        }
    }
    worst
}

/// Sparse operator stored row by row as (column, value) pairs. Used to apply
/// circuit gates (permutations, Hadamards, half-SWAPs) to large registers
/// without dense d^3 x d^3 products.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOperator {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let rows = (0..m.rows())
            .map(|r| {
                m.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| **z != ZERO)
                    .map(|(c, &z)| (c, z))
                    .collect()
            })
            .collect();
        SparseOperator {
            dim: m.rows(),
            rows,
        }
    }

    pub fn from_rows(dim: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        assert_eq!(rows.len(), dim);
        SparseOperator { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, z) in row {
                m[(r, c)] += z;
            }
        }
        m
    }

    /// U rho U^dagger
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        assert_eq!(rho.rows(), n);
        // tmp = U rho
        let mut tmp = ComplexMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, u) in row {
                for c in 0..n {
                    tmp[(r, c)] += u * rho[(k, c)];
                }
            }
        }
        // out = tmp U^dagger, out[r][c] = sum_k tmp[r][k] conj(U[c][k])
        let mut out = ComplexMatrix::zeros(n, n);
        for (c, row) in self.rows.iter().enumerate() {
            for &(k, u) in row {
                let uc = u.conj();
                for r in 0..n {
                    out[(r, c)] += tmp[(r, k)] * uc;
                }
            }
        }
        out
    }

    /// op_left (x) op_right where either side may be the identity of the
    /// given dimension.
    pub fn kron(left: &SparseOperator, right: &SparseOperator) -> SparseOperator {
        let dim = left.dim * right.dim;
        let mut rows = Vec::with_capacity(dim);
        for lrow in &left.rows {
            for rrow in &right.rows {
                let mut row = Vec::with_capacity(lrow.len() * rrow.len());
                for &(lc, lz) in lrow {
                    for &(rc, rz) in rrow {
                        row.push((lc * right.dim + rc, lz * rz));
                    }
                }
                rows.push(row);
            }
        }
        SparseOperator { dim, rows }
    }

    pub fn identity(dim: usize) -> SparseOperator {
        SparseOperator {
            dim,
            rows: (0..dim).map(|i| vec![(i, ONE)]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_two_by_two_closed_form() {
        // [[0.6, 0.5], [0.5, 0.4]] has eigenvalues (1 +- sqrt(0.04 + 1)) / 2
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(0.6, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.4, 0.0)],
        )
        .unwrap();
        let e = eigh(&m);
        let s = (0.04f64 + 1.0).sqrt();
        assert!((e.values[0] - (1.0 - s) / 2.0).abs() < 1e-15);
        assert!((e.values[1] - (1.0 + s) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let m = ComplexMatrix::from_fn(5, 5, |r, cc| {
            let x = (r * 7 + cc * 3) as f64 * 0.37;
            let y = (r as f64 - cc as f64) * 0.21;
            c(x.sin() + (cc * 5 + r * 3) as f64 * 0.1, y)
        })
        .hermitian_part();
        let e = eigh(&m);
        let back = e.apply_fn(|l| c(l, 0.0));
        assert!(back.max_abs_diff(&m) < 1e-13);
        assert!(e.vectors.unitarity_defect() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_handles_degenerate_and_diagonal() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        let e = eigh(&m);
        assert!(e.values.iter().all(|&l| (l - 0.25).abs() < 1e-16));
        assert!(e.vectors.unitarity_defect() < 1e-15);
    }

    #[test]
    fn kron_identities_give_identity() {
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_ordering_left_is_slow() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[1.0, 10.0]);
        let k = a.kron(&b);
        let diag: Vec<f64> = (0..4).map(|i| k[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 10.0, 2.0, 20.0]);
    }

    #[test]
    fn sparse_conjugate_matches_dense() {
        let u = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)],
        )
        .unwrap();
        let rho = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)],
        )
        .unwrap();
        let sparse = SparseOperator::from_dense(&u);
        assert!(sparse.conjugate(&rho).max_abs_diff(&rho.conjugate_by(&u)) < 1e-15);
        let big = SparseOperator::kron(&SparseOperator::identity(3), &sparse);
        let dense = ComplexMatrix::identity(3).kron(&u);
        assert!(big.to_dense().max_abs_diff(&dense) < 1e-16);
    }

    #[test]
    fn expi_of_pauli_z() {
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let u = expi_hermitian(&z, core::f64::consts::FRAC_PI_2);
        assert!((u[(0, 0)] - I).norm() < 1e-15);
        assert!((u[(1, 1)] + I).norm() < 1e-15);
    }
}
