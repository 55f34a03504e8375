//! Operator constructions: generalized Gell-Mann basis, Bloch vectors, SWAP
//! and its symmetric projectors, observable-generated unitaries and
//! controlled gates.
//!
//! Gell-Mann ordering is frozen: all symmetric generators for pairs
//! (j, k), j < k, in lexicographic order, then the antisymmetric generators
//! in the same pair order, then the d - 1 diagonal generators.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SparseOperator, C64, I, ONE};
use crate::state::{check_dim, DensityMatrix, Observable};

/// Which family a generator belongs to, with the basis indices it touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
    /// Diagonal generator with index l = 1..d-1.
    Diagonal(usize),
}

#[derive(Clone, Debug)]
pub struct GellMannBasis {
    dim: usize,
    kinds: Vec<GeneratorKind>,
    normalized: Vec<ComplexMatrix>,
    rescaled: Vec<ComplexMatrix>,
}

/// Totally antisymmetric structure constants f_ijk of su(d), stored sparsely
/// for i < j < k.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    count: usize,
    entries: Vec<(usize, usize, usize, f64)>,
}

impl StructureConstants {
    pub fn generator_count(&self) -> usize {
        self.count
    }

    /// Non-zero f_ijk with i < j < k.
    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    /// f_ijk for arbitrary index order.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        if i == j || j == k || i == k {
            return 0.0;
        }
        let mut idx = [i, j, k];
        // parity of the sorting permutation
        let mut sign = 1.0;
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        self.entries
            .binary_search_by(|e| (e.0, e.1, e.2).cmp(&(idx[0], idx[1], idx[2])))
            .map(|pos| sign * self.entries[pos].3)
            .unwrap_or(0.0)
    }

    /// sum_ij f_ijk a_i b_j for every k.
    pub fn contract(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.count];
        for &(i, j, k, f) in &self.entries {
            // the six permutations of (i, j, k) with signs
            out[k] += f * (a[i] * b[j] - a[j] * b[i]);
            out[i] += f * (a[j] * b[k] - a[k] * b[j]);
            out[j] += f * (a[k] * b[i] - a[i] * b[k]);
        }
        out
    }
}

pub fn gell_mann(d: usize) -> Result<GellMannBasis> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let mut kinds = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            kinds.push(GeneratorKind::Symmetric(j, k));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            kinds.push(GeneratorKind::Antisymmetric(j, k));
        }
    }
    for l in 1..d {
        kinds.push(GeneratorKind::Diagonal(l));
    }
    let normalized: Vec<ComplexMatrix> = kinds.iter().map(|&k| generator(d, k)).collect();
    let scale = rescale_factor(d);
    let rescaled = normalized.iter().map(|m| m.scale_real(scale)).collect();
    Ok(GellMannBasis {
        dim: d,
        kinds,
        normalized,
        rescaled,
    })
}

/// sqrt(d (d - 1) / 2): tau_i = factor * sigma~_i.
pub fn rescale_factor(d: usize) -> f64 {
    ((d * (d - 1)) as f64 / 2.0).sqrt()
}

fn generator(d: usize, kind: GeneratorKind) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    match kind {
        GeneratorKind::Symmetric(j, k) => {
            m[(j, k)] = ONE;
            m[(k, j)] = ONE;
        }
        GeneratorKind::Antisymmetric(j, k) => {
            m[(j, k)] = -I;
            m[(k, j)] = I;
        }
        GeneratorKind::Diagonal(l) => {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            for i in 0..l {
                m[(i, i)] = C64::new(norm, 0.0);
            }
            m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        }
    }
    m
}

impl GellMannBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.normalized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normalized.is_empty()
    }

    pub fn kinds(&self) -> &[GeneratorKind] {
        &self.kinds
    }

    /// sigma~_i with Tr[sigma~_i sigma~_j] = 2 delta_ij.
    pub fn normalized(&self) -> &[ComplexMatrix] {
        &self.normalized
    }

    /// tau_i with Tr[tau_i tau_j] = d (d - 1) delta_ij.
    pub fn rescaled(&self) -> &[ComplexMatrix] {
        &self.rescaled
    }

    /// Tr[M sigma~_k] for every k, using the sparsity of the generators.
    pub fn project(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.kinds
            .iter()
            .map(|&kind| match kind {
                GeneratorKind::Symmetric(j, k) => m[(k, j)] + m[(j, k)],
                GeneratorKind::Antisymmetric(j, k) => -I * m[(k, j)] + I * m[(j, k)],
                GeneratorKind::Diagonal(l) => {
                    let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
                    let head: C64 = (0..l).map(|i| m[(i, i)]).sum();
                    (head - m[(l, l)] * l as f64) * norm
                }
            })
            .collect()
    }

    /// f_ijk = -(i/4) Tr[[sigma~_i, sigma~_j] sigma~_k], so that
    /// [sigma~_i, sigma~_j] = 2i sum_k f_ijk sigma~_k.
    pub fn structure_constants(&self) -> StructureConstants {
        let n = self.len();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = self.normalized[i].commutator(&self.normalized[j]);
                let coeffs = self.project(&comm);
                for (k, c) in coeffs.iter().enumerate().skip(j + 1) {
                    let f = (c * C64::new(0.0, -0.25)).re;
                    if f.abs() > 1e-14 {
                        entries.push((i, j, k, f));
                    }
                }
            }
        }
        StructureConstants { count: n, entries }
    }

    /// (1/d) (1 + (1/(d-1)) sum_i tau_i (x) tau_i)
    pub fn swap_expansion(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut acc = ComplexMatrix::identity(d * d);
        let inv = 1.0 / (d - 1) as f64;
        for t in &self.rescaled {
            acc = &acc + &t.kron(t).scale_real(inv);
        }
        acc.scale_real(1.0 / d as f64)
    }

    /// Bloch vector x with rho = (1/d)(1 + x . tau), x_i = Tr[rho tau_i] / (d - 1).
    pub fn bloch_vector(&self, rho: &ComplexMatrix) -> Result<BlochVector> {
        check_dim(self.dim, rho.rows())?;
        let d = self.dim as f64;
        let scale = rescale_factor(self.dim) / (d - 1.0);
        let components = self.project(rho).iter().map(|c| c.re * scale).collect();
        Ok(BlochVector {
            dim: self.dim,
            components,
        })
    }

    /// (1/d)(1 + x . tau) as a raw matrix (not validated).
    pub fn operator_from_bloch(&self, x: &BlochVector) -> Result<ComplexMatrix> {
        check_dim(self.dim, x.dim)?;
        check_dim(self.len(), x.components.len())?;
        let mut acc = ComplexMatrix::identity(self.dim);
        for (t, &xi) in self.rescaled.iter().zip(&x.components) {
            acc = &acc + &t.scale_real(xi);
        }
        Ok(acc.scale_real(1.0 / self.dim as f64))
    }

    pub fn state_from_bloch(&self, x: &BlochVector) -> Result<DensityMatrix> {
        DensityMatrix::new(self.operator_from_bloch(x)?)
    }
}

/// Real coordinates of a state in the rescaled Gell-Mann basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub dim: usize,
    pub components: Vec<f64>,
}

impl BlochVector {
    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &BlochVector) -> BlochVector {
        BlochVector {
            dim: self.dim,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector {
            dim: self.dim,
            components: self.components.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The permutation V|i j> = |j i> on two d-dimensional registers.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = ONE;
        }
    }
    v
}

/// (P+, P-) = ((1 + V)/2, (1 - V)/2)
pub fn symmetric_projectors(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let v = swap_operator(d);
    let id = ComplexMatrix::identity(d * d);
    ((&id + &v).scale_real(0.5), (&id - &v).scale_real(0.5))
}

/// U_K(t) = exp(i K t) from the cached spectrum of K.
pub fn unitary_exp(k: &Observable, t: f64) -> ComplexMatrix {
    let d = k.dim();
    let v = k.eigenvectors();
    let phases: Vec<C64> = k
        .eigenvalues()
        .iter()
        .map(|&kv| C64::new(0.0, kv * t).exp())
        .collect();
    ComplexMatrix::from_fn(d, d, |r, c| {
        (0..d)
            .map(|i| v[(r, i)] * phases[i] * v[(c, i)].conj())
            .sum()
    })
}

/// Unitarity tolerance for gates.
pub const UNITARY_TOL: f64 = 1e-10;

/// |0><0| (x) 1 + |1><1| (x) U, ancilla qubit as the leftmost factor.
pub fn controlled(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let n = u.rows();
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        out[(i, i)] = ONE;
        for j in 0..n {
            out[(n + i, n + j)] = u[(i, j)];
        }
    }
    Ok(out)
}

pub fn hadamard() -> ComplexMatrix {
    let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
    ComplexMatrix::from_vec(2, 2, alloc::vec![s, s, s, -s]).expect("2x2")
}

/// sqrt(V) = (1 - iV)/sqrt(2) on two d-dimensional registers.
pub fn sqrt_swap(d: usize) -> ComplexMatrix {
    let v = swap_operator(d);
    let id = ComplexMatrix::identity(d * d);
    (&id - &v.scale(I)).scale_real(1.0 / 2f64.sqrt())
}

/// Same as [`sqrt_swap`] but sparse: two non-zeros per row at most.
pub fn sqrt_swap_sparse(d: usize) -> SparseOperator {
    let s = 1.0 / 2f64.sqrt();
    let rows = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            let swapped = j * d + i;
            if swapped == idx {
                alloc::vec![(idx, C64::new(s, -s))]
            } else {
                alloc::vec![(idx, C64::new(s, 0.0)), (swapped, C64::new(0.0, -s))]
            }
        })
        .collect();
    SparseOperator::from_rows(d * d, rows)
}

/// Controlled SWAP on (ancilla qubit, copy 1, copy 2) as a sparse permutation.
pub fn controlled_swap_sparse(d: usize) -> SparseOperator {
    let n = d * d;
    let rows = (0..2 * n)
        .map(|idx| {
            if idx < n {
                alloc::vec![(idx, ONE)]
            } else {
                let local = idx - n;
                let (i, j) = (local / d, local % d);
                alloc::vec![(n + j * d + i, ONE)]
            }
        })
        .collect();
    SparseOperator::from_rows(2 * n, rows)
}
