//! Validated quantum states and observables.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, Eigh, C64, ZERO};

/// Entrywise Hermiticity tolerance for states and observables.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed |Tr rho - 1|.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted before clamping to zero.
pub const PSD_TOL: f64 = -1e-10;
/// Eigenvalues below this many ulps (times d) are roundoff and set to zero.
pub const SPECTRAL_FLOOR_ULPS: f64 = 16.0;
/// Eigenvalue gaps below this (relative to the largest |k|) mark an
/// observable as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// A validated density matrix with its spectral decomposition and square root
/// computed at construction.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    sqrt: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                defect,
                tolerance: HERMITIAN_TOL,
            });
        }
        let matrix = matrix.hermitian_part();
        let trace_defect = (matrix.trace().re - 1.0).abs();
        if trace_defect > TRACE_TOL {
            return Err(Error::NotUnitTrace {
                defect: trace_defect,
                tolerance: TRACE_TOL,
            });
        }
        let Eigh { values, vectors } = eigh(&matrix);
        let min = values.first().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: PSD_TOL,
            });
        }
        let floor = SPECTRAL_FLOOR_ULPS * f64::EPSILON * values.len() as f64;
        let eigenvalues: Vec<f64> = values
            .iter()
            .map(|&l| if l < floor { 0.0 } else { l.min(1.0) })
            .collect();
        let spectrum = Eigh {
            values: eigenvalues.clone(),
            vectors: vectors.clone(),
        };
        let sqrt = spectrum.apply_fn(|l| C64::new(l.sqrt(), 0.0));
        Ok(DensityMatrix {
            matrix,
            eigenvalues,
            eigenvectors: vectors,
            sqrt,
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
            .expect("maximally mixed state is valid")
    }

    /// |psi><psi| after normalizing psi.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = crate::linalg::norm(psi);
        if n == 0.0 {
            return Err(Error::NotUnitVector { norm: 0.0 });
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Self::new(ComplexMatrix::outer(&v))
    }

    /// |i><i| in the computational basis.
    pub fn basis_state(d: usize, i: usize) -> Self {
        Self::pure(&crate::linalg::basis_vector(d, i)).expect("basis state is valid")
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order, clamped to [0, 1].
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, matching `eigenvalues`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Positive square root built from the clamped spectrum.
    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    /// rho^p for p > 0, from the clamped spectrum.
    pub fn power(&self, p: f64) -> ComplexMatrix {
        let spectrum = Eigh {
            values: self.eigenvalues.clone(),
            vectors: self.eigenvectors.clone(),
        };
        spectrum.apply_fn(|l| {
            if l <= 0.0 {
                ZERO
            } else {
                C64::new(l.powf(p), 0.0)
            }
        })
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (purity(self) - 1.0).abs() <= tol
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::new(self.matrix.kron(&other.matrix)).expect("product of states is a state")
    }

    /// U rho U^dagger; U must be unitary.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.conjugate_by(u))
    }

    /// Mixture sum_m q_m rho_m.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
        let d = states
            .first()
            .map(|s| s.dim())
            .ok_or(Error::InvalidArgument("mixture of zero states".into()))?;
        let mut acc = ComplexMatrix::zeros(d, d);
        for (&w, s) in weights.iter().zip(states) {
            check_dim(d, s.dim())?;
            acc = &acc + &s.matrix.scale_real(w);
        }
        DensityMatrix::new(acc)
    }
}

/// A validated Hermitian operator with its spectral decomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    degenerate: bool,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let scale = matrix.max_abs().max(1.0);
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian {
                defect,
                tolerance: HERMITIAN_TOL * scale,
            });
        }
        let matrix = matrix.hermitian_part();
        let Eigh { values, vectors } = eigh(&matrix);
        let spread = values.iter().fold(0.0f64, |m, k| m.max(k.abs())).max(1.0);
        let degenerate = values
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() < DEGENERACY_GAP * spread);
        Ok(Observable {
            matrix,
            eigenvalues: values,
            eigenvectors: vectors,
            degenerate,
        })
    }

    /// U diag(spectrum) U^dagger.
    pub fn from_spectrum(spectrum: &[f64], u: &ComplexMatrix) -> Result<Self> {
        check_dim(spectrum.len(), u.rows())?;
        let diag = ComplexMatrix::from_real_diagonal(spectrum);
        Self::new(diag.conjugate_by(u))
    }

    pub fn diagonal(spectrum: &[f64]) -> Self {
        Self::new(ComplexMatrix::from_real_diagonal(spectrum)).expect("real diagonal is Hermitian")
    }

    /// n . sigma for a real 3-vector n (not normalized here).
    pub fn pauli(n: [f64; 3]) -> Self {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(n[2], 0.0),
                C64::new(n[0], -n[1]),
                C64::new(n[0], n[1]),
                C64::new(-n[2], 0.0),
            ],
        )
        .expect("2x2");
        Self::new(m).expect("Pauli combination is Hermitian")
    }

    pub fn sigma_z() -> Self {
        Self::pauli([0.0, 0.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenbasis(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| self.eigenvectors.column(i))
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Largest |k_i|.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    /// max |sum_i k_i |k_i><k_i| - K|
    pub fn reconstruction_defect(&self) -> f64 {
        let spectrum = Eigh {
            values: self.eigenvalues.clone(),
            vectors: self.eigenvectors.clone(),
        };
        spectrum
            .apply_fn(|k| C64::new(k, 0.0))
            .max_abs_diff(&self.matrix)
    }

    /// Identity padding: 1 (x) ... (x) K (x) ... (x) 1 with K at `site`.
    pub fn embed(&self, dims: &[usize], site: usize) -> Result<Observable> {
        if site >= dims.len() {
            return Err(Error::SiteOutOfRange {
                site,
                count: dims.len(),
            });
        }
        check_dim(dims[site], self.dim())?;
        let left: usize = dims[..site].iter().product();
        let right: usize = dims[site + 1..].iter().product();
        let m = ComplexMatrix::identity(left)
            .kron(&self.matrix)
            .kron(&ComplexMatrix::identity(right));
        Observable::new(m)
    }

    /// K_A (x) 1 + 1 (x) K_B
    pub fn local_sum(a: &Observable, b: &Observable) -> Observable {
        let left = a.matrix.kron(&ComplexMatrix::identity(b.dim()));
        let right = ComplexMatrix::identity(a.dim()).kron(&b.matrix);
        Observable::new(&left + &right).expect("sum of Hermitian operators")
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Partial trace of a multi-register operator, keeping the registers listed
/// in `keep` (in their original order).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    check_dim(total, m.rows())?;
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::SiteOutOfRange {
            site: bad,
            count: dims.len(),
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |sites: &[usize]| -> Vec<usize> {
        let n: usize = sites.iter().map(|&s| dims[s]).product();
        (0..n)
            .map(|mut idx| {
                let mut off = 0;
                for &s in sites.iter().rev() {
                    off += (idx % dims[s]) * strides[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(ra + t, cb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), dims, keep)?)
}

/// Tr[rho^2]
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}

/// Tr[rho_a rho_b]
pub fn overlap(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.matrix().trace_product(b.matrix()).re)
}

/// 2 - 2 Tr[rho^2]
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    2.0 - 2.0 * purity(rho)
}

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// Von Neumann entropy in nats, 0 ln 0 := 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        let n = rows.len();
        ComplexMatrix::from_fn(n, rows[0].len(), |r, c| C64::new(rows[r][c], 0.0))
    }

    #[test]
    fn maximally_mixed_spectrum() {
        let rho = DensityMatrix::new(real(&[&[0.5, 0.0], &[0.0, 0.5]])).unwrap();
        assert!(rho.eigenvalues().iter().all(|&l| (l - 0.5).abs() < 1e-15));
    }

    #[test]
    fn projector_is_pure() {
        let rho = DensityMatrix::new(real(&[&[1.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(rho.eigenvalues(), &[0.0, 1.0]);
        assert!(rho.is_pure(1e-15));
    }

    #[test]
    fn rejects_negative_state() {
        let err = DensityMatrix::new(real(&[&[0.6, 0.5], &[0.5, 0.4]])).unwrap_err();
        match err {
            Error::NotPositive { min_eigenvalue, .. } => {
                let expected = (1.0 - (0.04f64 + 1.0).sqrt()) / 2.0;
                assert!((min_eigenvalue - expected).abs() < 1e-12);
                assert!((min_eigenvalue + 0.0099).abs() < 1e-4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = real(&[&[0.5, 0.1], &[0.0, 0.5]]);
        assert!(matches!(
            DensityMatrix::new(m.clone()),
            Err(Error::NotHermitian { .. })
        ));
        m[(0, 1)] = ZERO;
        m[(0, 0)] = ONE;
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NotUnitTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let expected = ComplexMatrix::identity(2).scale_real(1.0 / 2f64.sqrt());
        assert!(mixed.sqrt().max_abs_diff(&expected) < 1e-15);

        let proj = DensityMatrix::basis_state(2, 0);
        assert!(proj.sqrt().max_abs_diff(proj.matrix()) < 1e-15);

        let diag = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.75f64.sqrt(), 0.5]);
        assert!(diag.sqrt().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let bell = DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        // brute force: (rho_A)_{ij} = sum_k rho_{(i,k),(j,k)}
        let mut brute = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    brute[(i, j)] += bell.matrix()[(2 * i + k, 2 * j + k)];
                }
            }
        }
        let marginal = partial_trace(&bell, &[2, 2], &[0]).unwrap();
        assert!(marginal.matrix().max_abs_diff(&brute) < 1e-15);
        assert!(
            marginal
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_middle_register() {
        let a = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let b = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let c = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        let abc = a.tensor(&b).tensor(&c);
        let mid = partial_trace(&abc, &[2, 3, 2], &[1]).unwrap();
        assert!(mid.matrix().max_abs_diff(b.matrix()) < 1e-15);
        let outer = partial_trace(&abc, &[2, 3, 2], &[2, 0]).unwrap();
        assert!(outer.matrix().max_abs_diff(a.tensor(&c).matrix()) < 1e-15);
        assert!(matches!(
            partial_trace(&abc, &[2, 2, 2], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn purity_and_entropy_of_fig1_state() {
        // rho = (1-p) 1/2 + p |+><+| at p = 1/2
        let p = 0.5;
        let rho = DensityMatrix::new(real(&[&[0.5, p / 2.0], &[p / 2.0, 0.5]])).unwrap();
        assert!((purity(&rho) - 0.625).abs() < 1e-15);
        assert!((linear_entropy(&rho) - 0.75).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(5)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_overlap_is_zero() {
        let a = DensityMatrix::basis_state(3, 0);
        let b = DensityMatrix::basis_state(3, 2);
        assert_eq!(overlap(&a, &b).unwrap(), 0.0);
        assert!(overlap(&a, &DensityMatrix::basis_state(2, 0)).is_err());
    }

    #[test]
    fn entropy_of_mixed_qubit() {
        let h = von_neumann_entropy(&DensityMatrix::maximally_mixed(2));
        assert!((h - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis_state(2, 1)), 0.0);
    }

    #[test]
    fn observable_flags_degeneracy() {
        assert!(!Observable::sigma_z().is_degenerate());
        assert!(Observable::diagonal(&[1.0, 1.0, -1.0]).is_degenerate());
        assert!(Observable::sigma_z().reconstruction_defect() < 1e-15);
    }

    #[test]
    fn embed_pads_with_identity() {
        let k = Observable::sigma_z().embed(&[3, 2, 2], 1).unwrap();
        assert_eq!(k.dim(), 12);
        // index (a, b, c) -> a*4 + b*2 + c; sign follows b
        for idx in 0..12 {
            let b = (idx / 2) % 2;
            let expected = if b == 0 { 1.0 } else { -1.0 };
            assert_eq!(k.matrix()[(idx, idx)].re, expected);
        }
        assert!(Observable::sigma_z().embed(&[3, 3], 0).is_err());
    }
}
