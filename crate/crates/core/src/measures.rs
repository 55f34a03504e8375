//! Coherence and asymmetry functionals.
//!
//! Every quantity that has both a commutator expression and a spectral
//! expression exposes both: the commutator route is the one used by the
//! rest of the crate, the spectral route exists so the two can be checked
//! against each other.

use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, ComplexMatrix, C64};
use crate::operators::{gell_mann, unitary_exp, UNITARY_TOL};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::random::seeded_rng;
use crate::state::{check_dim, partial_trace, von_neumann_entropy, DensityMatrix, Observable};

/// Imaginary residue allowed on traces that are real in exact arithmetic.
const IMAG_TOL: f64 = 1e-10;

fn real_trace(z: C64, scale: f64) -> f64 {
    debug_assert!(
        z.im.abs() <= IMAG_TOL * scale.max(1.0),
        "trace expected real, imaginary part {}",
        z.im
    );
    z.re
}

/// V(rho, K) = Tr[rho K^2] - Tr[rho K]^2
pub fn variance(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    let km = k.matrix();
    let mean = rho.matrix().trace_product(km).re;
    let second = rho.matrix().trace_product(&km.matmul(km)).re;
    Ok(second - mean * mean)
}

/// Variance of a pure state written through the weights
/// K_{i phi} = |<phi|k_i>|^2:
/// sum_i k_i^2 (K_{i phi} - K_{i phi}^2) - sum_{i != j} k_i k_j K_{i phi} K_{j phi}.
pub fn pure_state_variance(phi: &[C64], k: &Observable) -> Result<f64> {
    check_dim(k.dim(), phi.len())?;
    let weights: Vec<f64> = (0..k.dim())
        .map(|i| crate::linalg::inner(phi, &k.eigenvectors().column(i)).norm_sqr())
        .collect();
    let ks = k.eigenvalues();
    let mut v = 0.0;
    for i in 0..ks.len() {
        v += ks[i] * ks[i] * (weights[i] - weights[i] * weights[i]);
        for j in 0..ks.len() {
            if i != j {
                v -= ks[i] * ks[j] * weights[i] * weights[j];
            }
        }
    }
    Ok(v)
}

/// Wigner-Yanase-Dyson skew information -1/2 Tr[[rho^p, K][rho^(1-p), K]].
pub fn skew_information_p(rho: &DensityMatrix, k: &Observable, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ExponentOutOfRange(p));
    }
    check_dim(rho.dim(), k.dim())?;
    let a = rho.power(p).commutator(k.matrix());
    let b = rho.power(1.0 - p).commutator(k.matrix());
    let t = a.trace_product(&b);
    Ok(-0.5 * real_trace(t, k.spectral_norm().powi(2)))
}

/// I(rho, K) = -1/2 Tr[[sqrt(rho), K]^2]
pub fn skew_information(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    let c = rho.sqrt().commutator(k.matrix());
    Ok(0.0 - 0.5 * real_trace(c.trace_product(&c), k.spectral_norm().powi(2)))
}

/// 1/2 sum_ij (sqrt(l_i) - sqrt(l_j))^2 |<psi_i|K|psi_j>|^2
pub fn skew_information_spectral(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    let roots: Vec<f64> = rho.eigenvalues().iter().map(|l| l.sqrt()).collect();
    Ok(0.5 * spectral_sum(rho, k.matrix(), &roots))
}

/// I^L(rho, K) = -1/4 Tr[[rho, K]^2]
pub fn lower_bound(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    let c = rho.matrix().commutator(k.matrix());
    Ok(0.0 - 0.25 * real_trace(c.trace_product(&c), k.spectral_norm().powi(2)))
}

/// 1/4 sum_ij (l_i - l_j)^2 |<psi_i|K|psi_j>|^2
pub fn lower_bound_spectral(rho: &DensityMatrix, k: &Observable) -> Result<f64> {
    check_dim(rho.dim(), k.dim())?;
    Ok(0.25 * spectral_sum(rho, k.matrix(), rho.eigenvalues()))
}

fn spectral_sum(rho: &DensityMatrix, k: &ComplexMatrix, weights: &[f64]) -> f64 {
    let kk = k.in_basis(rho.eigenvectors());
    let n = weights.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let gap = weights[i] - weights[j];
            if gap != 0.0 {
                acc += gap * gap * kk[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

/// All scalar figures for one (state, observable) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub skew: f64,
    pub lower_bound: f64,
    pub variance: f64,
    pub classical_variance: f64,
    pub purity: f64,
    pub degenerate_observable: bool,
}

/// Values that are negative only through round-off (above -1e-10) are
/// reported as zero.
fn clamp_roundoff(x: f64) -> f64 {
    if x < 0.0 && x > -1e-10 {
        0.0
    } else {
        x
    }
}

pub fn coherence_report(rho: &DensityMatrix, k: &Observable) -> Result<CoherenceReport> {
    let skew = clamp_roundoff(skew_information(rho, k)?);
    let lower = clamp_roundoff(lower_bound(rho, k)?);
    let var = clamp_roundoff(variance(rho, k)?);
    Ok(CoherenceReport {
        skew,
        lower_bound: lower,
        variance: var,
        classical_variance: var - skew,
        purity: crate::state::purity(rho),
        degenerate_observable: k.is_degenerate(),
    })
}

/// Skew information of the global state for K acting on one site.
pub fn local_coherence(
    rho_multi: &DensityMatrix,
    dims: &[usize],
    site: usize,
    k: &Observable,
) -> Result<f64> {
    check_dim(dims.iter().product(), rho_multi.dim())?;
    let embedded = k.embed(dims, site)?;
    skew_information(rho_multi, &embedded)
}

/// Global local-K coherence minus the coherence of the site marginal.
pub fn residual_coherence(
    rho_multi: &DensityMatrix,
    dims: &[usize],
    site: usize,
    k: &Observable,
) -> Result<f64> {
    let global = local_coherence(rho_multi, dims, site, k)?;
    let marginal = partial_trace(rho_multi, dims, &[site])?;
    Ok(global - skew_information(&marginal, k)?)
}

#[derive(Clone, Copy, Debug)]
pub struct DiscordOptions {
    pub restarts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        DiscordOptions {
            restarts: 20,
            seed: 0,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiscordResult {
    pub value: f64,
    pub argmin: Observable,
    /// Best value of each restart, in restart order.
    pub restart_values: Vec<f64>,
}

/// min over K_A = U diag(spectrum) U^dagger of I(rho_AB, K_A (x) 1).
///
/// U is parametrized as exp(i sum_j theta_j sigma~_j) over the su(d_A)
/// generators; each restart starts from a uniformly random theta in
/// [-pi, pi]^(d_A^2 - 1).
pub fn discord_min(
    rho_ab: &DensityMatrix,
    dims: (usize, usize),
    spectrum: &[f64],
    opts: &DiscordOptions,
) -> Result<DiscordResult> {
    let (da, db) = dims;
    check_dim(da * db, rho_ab.dim())?;
    check_dim(da, spectrum.len())?;
    let lo = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "discord_min needs at least one restart".to_string(),
        ));
    }
    let basis = gell_mann(da)?;
    let generators = basis.normalized().to_vec();
    let lambda = ComplexMatrix::from_real_diagonal(spectrum);
    let psi = rho_ab.eigenvectors().clone();
    let roots: Vec<f64> = rho_ab.eigenvalues().iter().map(|l| l.sqrt()).collect();
    let id_b = ComplexMatrix::identity(db);

    let local_observable = |theta: &[f64]| -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(da, da);
        for (g, &t) in generators.iter().zip(theta) {
            h = &h + &g.scale_real(t);
        }
        let u = expi_hermitian(&h, 1.0);
        lambda.conjugate_by(&u)
    };
    let objective = |theta: &[f64]| -> f64 {
        let k = local_observable(theta).kron(&id_b);
        let kk = k.in_basis(&psi);
        let n = roots.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let gap = roots[i] - roots[j];
                acc += gap * gap * kk[(i, j)].norm_sqr();
            }
        }
        0.5 * acc
    };

    let mut rng = seeded_rng(opts.seed, 0);
    let dimension = generators.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut restart_values = Vec::with_capacity(opts.restarts);
    for _ in 0..opts.restarts {
        let start: Vec<f64> = (0..dimension)
            .map(|_| rng.random_range(-core::f64::consts::PI..core::f64::consts::PI))
            .collect();
        let m = nelder_mead(&objective, &start, &opts.nelder_mead);
        restart_values.push(m.value);
        if best.as_ref().is_none_or(|(v, _)| m.value < *v) {
            best = Some((m.value, m.point));
        }
    }
    let (value, theta) = best.expect("at least one restart");
    let argmin = Observable::new(local_observable(&theta))?;
    Ok(DiscordResult {
        value,
        argmin,
        restart_values,
    })
}

/// Default size of the phase grid used to discretize U(theta) = exp(i theta Q).
pub const DEFAULT_PHASE_GRID: usize = 64;

/// A finite list of unitaries to average over. Closure is not required: the
/// twirl averages exactly the elements provided.
#[derive(Clone, Debug)]
pub enum GroupRep {
    Elements(Vec<ComplexMatrix>),
    /// exp(i 2 pi j / m Q) for j = 0..m. Reproduces the continuous twirl
    /// exactly when Q has an integer-spaced spectrum with spread below m.
    PhaseGrid {
        charge: Observable,
        points: usize,
    },
}

impl GroupRep {
    pub fn phase_group(charge: Observable) -> Self {
        GroupRep::PhaseGrid {
            charge,
            points: DEFAULT_PHASE_GRID,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            GroupRep::Elements(e) => e.first().map(|u| u.rows()),
            GroupRep::PhaseGrid { charge, .. } => Some(charge.dim()),
        }
    }

    pub fn elements(&self) -> Result<Vec<ComplexMatrix>> {
        let elements = match self {
            GroupRep::Elements(e) => e.clone(),
            GroupRep::PhaseGrid { charge, points } => (0..*points)
                .map(|j| {
                    let theta = 2.0 * core::f64::consts::PI * j as f64 / *points as f64;
                    unitary_exp(charge, theta)
                })
                .collect(),
        };
        if elements.is_empty() {
            return Err(Error::EmptyGroup);
        }
        for u in &elements {
            let defect = u.unitarity_defect();
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary { defect });
            }
        }
        Ok(elements)
    }
}

/// Uniform average of U(g) rho U(g)^dagger over the listed elements.
pub fn g_twirl(rho: &DensityMatrix, group: &GroupRep) -> Result<DensityMatrix> {
    let elements = group.elements()?;
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for u in &elements {
        check_dim(d, u.rows())?;
        acc = &acc + &rho.matrix().conjugate_by(u);
    }
    DensityMatrix::new(acc.scale_real(1.0 / elements.len() as f64))
}

/// Asymmetry with respect to the phase group of the charge Q: I(rho, Q).
pub fn asymmetry(rho: &DensityMatrix, charge: &Observable) -> Result<f64> {
    skew_information(rho, charge)
}

/// S(G[rho]) - S(rho) in nats.
pub fn rel_entropy_asymmetry(rho: &DensityMatrix, group: &GroupRep) -> Result<f64> {
    let twirled = g_twirl(rho, group)?;
    Ok(von_neumann_entropy(&twirled) - von_neumann_entropy(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn fig1_state(p: f64) -> DensityMatrix {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            alloc::vec![
                C64::new(0.5, 0.0),
                C64::new(p / 2.0, 0.0),
                C64::new(p / 2.0, 0.0),
                C64::new(0.5, 0.0)
            ],
        )
        .unwrap();
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn variance_examples() {
        let z = Observable::sigma_z();
        assert!((variance(&fig1_state(1.0), &z).unwrap() - 1.0).abs() < 1e-15);
        assert!(
            variance(&DensityMatrix::basis_state(2, 0), &z)
                .unwrap()
                .abs()
                < 1e-15
        );
        for p in [0.0, 0.3, 0.77] {
            assert!((variance(&fig1_state(p), &z).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn skew_closed_form_on_fig1_family() {
        let z = Observable::sigma_z();
        let v = skew_information(&fig1_state(0.5), &z).unwrap();
        assert!((v - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
        assert!((v - 0.133975).abs() < 1e-6);
        assert!((skew_information(&fig1_state(1.0), &z).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(3);
        let k = Observable::diagonal(&[1.0, 2.0, 5.0]);
        assert!(skew_information(&mixed, &k).unwrap().abs() < 1e-15);
    }

    #[test]
    fn lower_bound_closed_form() {
        let z = Observable::sigma_z();
        for p in [0.1, 0.5, 0.9] {
            let l = lower_bound(&fig1_state(p), &z).unwrap();
            assert!((l - p * p / 2.0).abs() < 1e-15);
            assert!((lower_bound_spectral(&fig1_state(p), &z).unwrap() - l).abs() < 1e-14);
        }
        let diag = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        assert_eq!(lower_bound(&diag, &z).unwrap(), 0.0);
    }

    #[test]
    fn wyd_family_edges() {
        let z = Observable::sigma_z();
        let rho = fig1_state(0.4);
        assert!(matches!(
            skew_information_p(&rho, &z, 0.0),
            Err(Error::ExponentOutOfRange(_))
        ));
        assert!(matches!(
            skew_information_p(&rho, &z, 1.0),
            Err(Error::ExponentOutOfRange(_))
        ));
        let half = skew_information_p(&rho, &z, 0.5).unwrap();
        assert!((half - skew_information(&rho, &z).unwrap()).abs() < 1e-12);
        let pure = fig1_state(1.0);
        for p in [0.1, 0.3, 0.8] {
            assert!((skew_information_p(&pure, &z, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            skew_information(&rho, &Observable::sigma_z()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn bell() -> DensityMatrix {
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        DensityMatrix::pure(&[s, ZERO, ZERO, s]).unwrap()
    }

    #[test]
    fn local_and_residual_on_bell_state() {
        let n = [0.6, 0.0, 0.8];
        let k = Observable::pauli(n);
        assert!((local_coherence(&bell(), &[2, 2], 0, &k).unwrap() - 1.0).abs() < 1e-12);
        let r = residual_coherence(&bell(), &[2, 2], 0, &Observable::sigma_z()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(local_coherence(&mixed, &[2, 2], 1, &k).unwrap().abs() < 1e-15);
    }

    #[test]
    fn residual_vanishes_on_products() {
        let a = fig1_state(0.7);
        let b = DensityMatrix::diagonal(&[0.1, 0.2, 0.7]).unwrap();
        let r = residual_coherence(&a.tensor(&b), &[2, 3], 0, &Observable::sigma_z()).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn twirl_examples() {
        let plus = fig1_state(1.0);
        let z = Observable::sigma_z();
        let group = GroupRep::Elements(alloc::vec![ComplexMatrix::identity(2), z.matrix().clone()]);
        let tw = g_twirl(&plus, &group).unwrap();
        assert!(
            tw.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );
        let s = rel_entropy_asymmetry(&plus, &group).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
        assert!(matches!(
            g_twirl(&plus, &GroupRep::Elements(alloc::vec![])),
            Err(Error::EmptyGroup)
        ));
    }

    #[test]
    fn discord_rejects_flat_spectrum() {
        let r = discord_min(&bell(), (2, 2), &[1.0, 1.0], &DiscordOptions::default());
        assert!(matches!(r, Err(Error::DegenerateSpectrum)));
    }

    #[test]
    fn discord_of_bell_state_is_one() {
        let opts = DiscordOptions {
            restarts: 3,
            ..Default::default()
        };
        let r = discord_min(&bell(), (2, 2), &[1.0, -1.0], &opts).unwrap();
        assert!((r.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn report_fields() {
        let rep = coherence_report(&fig1_state(0.5), &Observable::sigma_z()).unwrap();
        assert!((rep.lower_bound - 0.125).abs() < 1e-15);
        assert!((rep.variance - 1.0).abs() < 1e-15);
        assert!((rep.classical_variance - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((rep.purity - 0.625).abs() < 1e-15);
        assert!(!rep.degenerate_observable);
    }
}
