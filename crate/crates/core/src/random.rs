//! Random ensembles of states, observables and unitaries.
//!
//! Every generator takes an explicit 64-bit seed and draws from a ChaCha8
//! stream, so results are reproducible across platforms.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm, ComplexMatrix, C64};
use crate::state::{DensityMatrix, Observable};

/// Seeded ChaCha8 generator on a given stream.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

pub fn haar_pure_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&haar_vector(d, rng)).expect("normalized vector")
}

/// Haar-random pure state.
pub fn haar_pure(d: usize, seed: u64) -> DensityMatrix {
    haar_pure_with(d, &mut seeded_rng(seed, 0))
}

pub fn hs_random_density_with<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::RankOutOfRange { rank, dim: d });
    }
    let g = ginibre(d, rank, rng);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr))
}

/// Ginibre-induced mixed state G G^dagger / Tr[G G^dagger], G of size d x rank.
pub fn hs_random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    hs_random_density_with(d, rank, &mut seeded_rng(seed, 0))
}

/// Haar unitary: Gram-Schmidt on a Ginibre matrix (the column phases of the
/// QR factor are fixed to be positive, which keeps the measure uniform).
pub fn random_unitary_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for c in 0..d {
        let mut v = g.column(c);
        // two passes of modified Gram-Schmidt for stability
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    crate::linalg::columns_to_matrix(&cols)
}

pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    random_unitary_with(d, &mut seeded_rng(seed, 0))
}

/// Gaussian Hermitian matrix (G + G^dagger)/2.
pub fn random_hermitian_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    g.hermitian_part()
}

pub fn random_observable_with<R: Rng + ?Sized>(
    d: usize,
    spectrum: Option<&[f64]>,
    rng: &mut R,
) -> Result<Observable> {
    match spectrum {
        Some(values) => {
            if values.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: values.len(),
                });
            }
            let u = random_unitary_with(d, rng);
            Observable::from_spectrum(values, &u)
        }
        None => {
            let h = random_hermitian_with(d, rng);
            let k = Observable::new(h)?;
            // rescale to ||K|| = 1 so tolerances are comparable across d
            let s = k.spectral_norm();
            if s == 0.0 {
                return Ok(k);
            }
            Observable::new(k.matrix().scale_real(1.0 / s))
        }
    }
}

/// Gaussian Hermitian observable normalized to spectral norm 1, or U diag(spectrum) U^dagger.
pub fn random_observable(d: usize, seed: u64, spectrum: Option<&[f64]>) -> Result<Observable> {
    random_observable_with(d, spectrum, &mut seeded_rng(seed, 0))
}

/// Random real unit 3-vector.
pub fn random_unit3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Observable with integer eigenvalues drawn from 0..=max_charge (repeats
/// allowed) in a Haar-random eigenbasis.
pub fn random_integer_charge_with<R: Rng + ?Sized>(
    d: usize,
    max_charge: u32,
    rng: &mut R,
) -> Result<Observable> {
    let spectrum: Vec<f64> = (0..d)
        .map(|_| rng.random_range(0..=max_charge) as f64)
        .collect();
    random_observable_with(d, Some(&spectrum), rng)
}

/// Random probability vector from normalized exponentials.
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// A random state from a mixed bag: pure, full rank, or low rank.
pub fn random_state_any<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let rank = 1 + rng.random_range(0..d);
    hs_random_density_with(d, rank, rng).expect("rank in range")
}

/// Random state diagonal in the eigenbasis of `k` (an incoherent state).
pub fn random_incoherent_state<R: Rng + ?Sized>(k: &Observable, rng: &mut R) -> DensityMatrix {
    let probs = random_probabilities(k.dim(), rng);
    let diag = ComplexMatrix::from_real_diagonal(&probs);
    DensityMatrix::new(diag.conjugate_by(k.eigenvectors())).expect("incoherent state is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::purity;

    #[test]
    fn rank_one_is_pure() {
        for seed in 0..20 {
            let rho = hs_random_density(4, 1, seed).unwrap();
            assert!((purity(&rho) - 1.0).abs() < 1e-10);
        }
        assert!(matches!(
            hs_random_density(3, 0, 1),
            Err(Error::RankOutOfRange { .. })
        ));
        assert!(matches!(
            hs_random_density(3, 4, 1),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn unitaries_are_unitary() {
        for seed in 0..20 {
            assert!(random_unitary(5, seed).unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn seeded_outputs_are_reproducible() {
        let a = random_observable(3, 9, None).unwrap();
        let b = random_observable(3, 9, None).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = random_observable(3, 9, Some(&[1.0, 0.0, -1.0])).unwrap();
        let e = c.eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-12 && e[1].abs() < 1e-12 && (e[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_mix_apart() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
    }
}
