//! Matrix-level simulation of the two ancilla interferometers.
//!
//! Register layouts: the controlled-SWAP test runs on (ancilla qubit, copy 1,
//! copy 2); the half-SWAP protocol runs on (copy A, ancilla qudit, copy B).

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{computational_basis, inner, ComplexMatrix, SparseOperator, C64};
use crate::measures::lower_bound;
use crate::operators::{
    controlled_swap_sparse, gell_mann, hadamard, sqrt_swap_sparse, unitary_exp, BlochVector,
    GellMannBasis,
};
use crate::random::{haar_pure_with, random_state_any, seeded_rng};
use crate::state::{check_dim, overlap, partial_trace_matrix, purity, DensityMatrix, Observable};

/// Below this |Tr[alpha sigma_z]| the polarization carries no signal.
pub const SENSITIVITY_FLOOR: f64 = 1e-6;
/// Allowed deviation of a simulated circuit from its closed-form identity.
pub const CIRCUIT_TOL: f64 = 1e-10;
/// Agreement required between a reconstructed overlap and Tr[rho_A rho_B].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Allowed deviation between a Bloch-algebra prediction and the simulation.
pub const BLOCH_CHECK_TOL: f64 = 1e-10;
/// Settings of the controlled-SWAP test: purity and rotated overlap.
pub const SCHEME1_BUDGET: usize = 2;

#[derive(Clone, Debug)]
pub struct Scheme1Config {
    pub ancilla: DensityMatrix,
    pub observable: Observable,
    pub t: f64,
    pub rho: DensityMatrix,
}

impl Scheme1Config {
    /// Ancilla prepared in |0><0|.
    pub fn new(rho: DensityMatrix, observable: Observable, t: f64) -> Self {
        Scheme1Config {
            ancilla: DensityMatrix::basis_state(2, 0),
            observable,
            t,
            rho,
        }
    }

    pub fn sensitivity(&self) -> f64 {
        sigma_z_mean(&self.ancilla)
    }
}

fn sigma_z_mean(alpha: &DensityMatrix) -> f64 {
    let m = alpha.matrix();
    m[(0, 0)].re - m[(1, 1)].re
}

/// <sigma_z (x) 1> after H, controlled-SWAP, H on alpha (x) rho1 (x) rho2.
pub fn swap_test_polarization(
    alpha: &DensityMatrix,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<f64> {
    check_dim(2, alpha.dim())?;
    check_dim(rho1.dim(), rho2.dim())?;
    let d = rho1.dim();
    let n = d * d;
    let state = alpha.matrix().kron(&rho1.matrix().kron(rho2.matrix()));
    let h = SparseOperator::kron(
        &SparseOperator::from_dense(&hadamard()),
        &SparseOperator::identity(n),
    );
    let out = h.conjugate(&controlled_swap_sparse(d).conjugate(&h.conjugate(&state)));
    let up: f64 = (0..n).map(|i| out[(i, i)].re).sum();
    let down: f64 = (n..2 * n).map(|i| out[(i, i)].re).sum();
    Ok(up - down)
}

/// Ancilla polarization of the controlled-SWAP test. The second copy is
/// rotated by U_K(t) when `rotated`. The closed form
/// Tr[alpha sigma_z] * Tr[rho1 rho2] is checked against the simulation.
pub fn scheme1_polarization(cfg: &Scheme1Config, rotated: bool) -> Result<f64> {
    let sensitivity = cfg.sensitivity();
    if sensitivity.abs() <= SENSITIVITY_FLOOR {
        return Err(Error::ZeroSensitivityAncilla(sensitivity));
    }
    check_dim(cfg.rho.dim(), cfg.observable.dim())?;
    let second = if rotated {
        cfg.rho.evolve(&unitary_exp(&cfg.observable, cfg.t))?
    } else {
        cfg.rho.clone()
    };
    let polarization = swap_test_polarization(&cfg.ancilla, &cfg.rho, &second)?;
    let expected = sensitivity * overlap(&cfg.rho, &second)?;
    let deviation = (polarization - expected).abs();
    if deviation > CIRCUIT_TOL {
        return Err(Error::IdentityViolation {
            what: "swap-test polarization",
            deviation,
        });
    }
    Ok(polarization)
}

/// 1e-3 / ||K||, or 1e-3 for K = 0.
pub fn default_taylor_phase(k: &Observable) -> f64 {
    let norm = k.spectral_norm();
    if norm > 0.0 {
        1e-3 / norm
    } else {
        1e-3
    }
}

/// (Tr[rho^2] - Tr[rho U rho U^dagger]) / (2 t^2) with U = exp(iKt).
///
/// The difference is summed in the eigenbasis of K as
/// sum_ij |rho_ij|^2 2 sin^2((k_i - k_j) t / 2), which avoids cancelling two
/// O(1) traces.
pub fn estimate_lower_bound_taylor(rho: &DensityMatrix, k: &Observable, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::ZeroPhase);
    }
    check_dim(rho.dim(), k.dim())?;
    let r = rho.matrix().in_basis(k.eigenvectors());
    let ks = k.eigenvalues();
    let mut gap = 0.0;
    for i in 0..ks.len() {
        for j in 0..ks.len() {
            let s = ((ks[i] - ks[j]) * t / 2.0).sin();
            gap += 2.0 * r[(i, j)].norm_sqr() * s * s;
        }
    }
    Ok(gap / (2.0 * t * t))
}

/// Same estimator read off two simulated polarizations.
pub fn lower_bound_from_polarizations(
    m_purity: f64,
    m_overlap: f64,
    t: f64,
    sensitivity: f64,
) -> f64 {
    (m_purity - m_overlap) / (2.0 * t * t * sensitivity)
}

/// Half the gap between purity and overlap after U = exp(i (n . sigma) pi/2).
pub fn qubit_exact_lower_bound(rho: &DensityMatrix, n: [f64; 3]) -> Result<f64> {
    check_dim(2, rho.dim())?;
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    let u = unitary_exp(&Observable::pauli(n), core::f64::consts::FRAC_PI_2);
    let ov = rho
        .matrix()
        .trace_product(&rho.matrix().conjugate_by(&u))
        .re;
    Ok(0.5 * (purity(rho) - ov))
}

/// Measurement counts: 5d settings-times-outcomes, or 4d with an interacting
/// gate.
pub fn measurement_budget(d: usize, interacting: bool) -> usize {
    if interacting {
        4 * d
    } else {
        5 * d
    }
}

/// Independent parameters of a full state tomography.
pub fn tomography_count(d: usize) -> usize {
    d * d - 1
}

/// Projective readouts needed by the ancilla-sweep reconstruction: both
/// orders for every basis ancilla plus the two direct measurements.
pub fn sweep_budget(d: usize) -> usize {
    2 * d * d + 2 * d
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SValueTable {
    pub dim: usize,
    pub basis: Vec<Vec<C64>>,
    pub i_beta: usize,
    pub s_ab: Vec<f64>,
    pub s_ba: Vec<f64>,
    pub s_a: Vec<f64>,
    pub s_b: Vec<f64>,
    pub measurement_count: usize,
}

/// S^i = d p_i - 1
pub fn s_values(probs: &[f64]) -> Vec<f64> {
    let d = probs.len() as f64;
    probs.iter().map(|p| d * p - 1.0).collect()
}

/// <b_i| rho |b_i> for every basis vector.
pub fn basis_probabilities(rho: &ComplexMatrix, basis: &[Vec<C64>]) -> Vec<f64> {
    basis.iter().map(|b| inner(b, &rho.matvec(b)).re).collect()
}

/// Index of the basis vector that `beta` equals.
pub fn ancilla_index(beta: &DensityMatrix, basis: &[Vec<C64>]) -> Result<usize> {
    check_dim(beta.dim(), basis.len())?;
    let probs = basis_probabilities(beta.matrix(), basis);
    let (idx, best) =
        probs.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
        );
    let defect = 1.0 - best;
    if defect > CIRCUIT_TOL {
        return Err(Error::AncillaNotBasisElement(defect));
    }
    Ok(idx)
}

/// Ancilla states after the first and after the second half-SWAP, for
/// first (x) beta (x) second.
pub fn half_swap_ancilla(
    first: &DensityMatrix,
    beta: &DensityMatrix,
    second: &DensityMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let d = beta.dim();
    check_dim(d, first.dim())?;
    check_dim(d, second.dim())?;
    let dims = [d, d, d];
    let state = first.matrix().kron(&beta.matrix().kron(second.matrix()));
    let gate = sqrt_swap_sparse(d);
    let id = SparseOperator::identity(d);
    let after_first = SparseOperator::kron(&gate, &id).conjugate(&state);
    let after_second = SparseOperator::kron(&id, &gate).conjugate(&after_first);
    Ok((
        partial_trace_matrix(&after_first, &dims, &[1])?,
        partial_trace_matrix(&after_second, &dims, &[1])?,
    ))
}

fn validate_basis(basis: &[Vec<C64>], d: usize) -> Result<()> {
    check_dim(d, basis.len())?;
    for b in basis {
        check_dim(d, b.len())?;
    }
    let defect = crate::linalg::orthonormality_defect(basis);
    if defect > CIRCUIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "measurement basis is not orthonormal (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Runs the half-SWAP protocol in both orders and the two direct
/// measurements, collecting the S values.
pub fn scheme2_run(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    beta: &DensityMatrix,
    basis: &[Vec<C64>],
) -> Result<SValueTable> {
    let d = beta.dim();
    check_dim(d, rho_a.dim())?;
    check_dim(d, rho_b.dim())?;
    validate_basis(basis, d)?;
    let i_beta = ancilla_index(beta, basis)?;
    let (_, out_ab) = half_swap_ancilla(rho_a, beta, rho_b)?;
    let (_, out_ba) = half_swap_ancilla(rho_b, beta, rho_a)?;
    Ok(SValueTable {
        dim: d,
        basis: basis.to_vec(),
        i_beta,
        s_ab: s_values(&basis_probabilities(&out_ab, basis)),
        s_ba: s_values(&basis_probabilities(&out_ba, basis)),
        s_a: s_values(&basis_probabilities(rho_a.matrix(), basis)),
        s_b: s_values(&basis_probabilities(rho_b.matrix(), basis)),
        measurement_count: measurement_budget(d, false),
    })
}

impl SValueTable {
    pub fn check_complete(&self) -> Result<()> {
        let d = self.dim;
        if d < 2 {
            return Err(Error::IncompleteTable(format!("dimension {d} is below 2")));
        }
        for (name, v) in [
            ("s_ab", &self.s_ab),
            ("s_ba", &self.s_ba),
            ("s_a", &self.s_a),
            ("s_b", &self.s_b),
        ] {
            if v.len() != d {
                return Err(Error::IncompleteTable(format!(
                    "{name} has {} entries, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::IncompleteTable(format!(
                    "{name} has a non-finite entry"
                )));
            }
        }
        if self.i_beta >= d {
            return Err(Error::IncompleteTable(format!(
                "i_beta = {} out of range",
                self.i_beta
            )));
        }
        Ok(())
    }

    /// Largest |sum_i S^i| over the four vectors.
    pub fn max_sum_defect(&self) -> f64 {
        [&self.s_ab, &self.s_ba, &self.s_a, &self.s_b]
            .iter()
            .map(|v| v.iter().sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// x_A . x_B = sum_i [2 (S_AB + S_BA) - 3/2 (S_A + S_B)
///            + (S_A^i S_B^{i_beta} + S_B^i S_A^{i_beta}) / (2(d-1))] - 1,
/// turned into an overlap via (1 + (d-1) x_A . x_B) / d.
pub fn scheme2_reconstruct(table: &SValueTable) -> Result<f64> {
    table.check_complete()?;
    let d = table.dim;
    let ib = table.i_beta;
    let c = 1.0 / (2.0 * (d - 1) as f64);
    let mut dot = -1.0;
    for i in 0..d {
        dot += 2.0 * (table.s_ab[i] + table.s_ba[i]) - 1.5 * (table.s_a[i] + table.s_b[i])
            + c * (table.s_a[i] * table.s_b[ib] + table.s_b[i] * table.s_a[ib]);
    }
    Ok((1.0 + (d - 1) as f64 * dot) / d as f64)
}

/// Re(rho_A rho_B)_{bb} for the basis element the ancilla was prepared in:
/// 1/2 + 3/4 (A_bb + B_bb) + A_bb B_bb - (p_b^{AB} + p_b^{BA}).
pub fn diagonal_product_from_table(table: &SValueTable) -> Result<f64> {
    table.check_complete()?;
    let d = table.dim as f64;
    let b = table.i_beta;
    let p = |s: f64| (s + 1.0) / d;
    let (a_bb, b_bb) = (p(table.s_a[b]), p(table.s_b[b]));
    Ok(0.5 + 0.75 * (a_bb + b_bb) + a_bb * b_bb - (p(table.s_ab[b]) + p(table.s_ba[b])))
}

/// Tr[rho_A rho_B] assembled from one table per basis ancilla.
pub fn sweep_reconstruct(tables: &[SValueTable]) -> Result<f64> {
    let d = tables
        .first()
        .ok_or_else(|| Error::IncompleteTable("no tables".into()))?
        .dim;
    if tables.len() != d {
        return Err(Error::IncompleteTable(format!(
            "sweep needs {d} tables, got {}",
            tables.len()
        )));
    }
    let mut seen = alloc::vec![false; d];
    let mut total = 0.0;
    for t in tables {
        check_dim(d, t.dim)?;
        if t.i_beta >= d || seen[t.i_beta] {
            return Err(Error::IncompleteTable(format!(
                "ancilla index {} repeated",
                t.i_beta
            )));
        }
        seen[t.i_beta] = true;
        total += diagonal_product_from_table(t)?;
    }
    Ok(total)
}

/// One table per basis element used as the ancilla.
pub fn scheme2_sweep(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    basis: &[Vec<C64>],
) -> Result<Vec<SValueTable>> {
    basis
        .iter()
        .map(|b| {
            let beta = DensityMatrix::pure(b)?;
            let mut t = scheme2_run(rho_a, rho_b, &beta, basis)?;
            t.measurement_count = sweep_budget(basis.len());
            Ok(t)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme2Report {
    pub dim: usize,
    pub exact: f64,
    /// The closed-form reconstruction from a single table.
    pub reconstructed: f64,
    /// Ancilla-sweep value from the simulated circuit.
    pub simulated: f64,
    pub formula_mismatch: bool,
    pub mismatch: f64,
    pub simulated_error: f64,
    pub max_sum_defect: f64,
    pub measurement_budget: usize,
    pub interacting_budget: usize,
    pub sweep_budget: usize,
    pub tomography_count: usize,
}

/// Full protocol run in the computational basis with the ancilla at index 0,
/// compared against the exact overlap.
pub fn scheme2_report(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<Scheme2Report> {
    let d = rho_a.dim();
    check_dim(d, rho_b.dim())?;
    let basis = computational_basis(d);
    let table = scheme2_run(rho_a, rho_b, &DensityMatrix::basis_state(d, 0), &basis)?;
    let reconstructed = scheme2_reconstruct(&table)?;
    let simulated = sweep_reconstruct(&scheme2_sweep(rho_a, rho_b, &basis)?)?;
    let exact = overlap(rho_a, rho_b)?;
    let mismatch = (reconstructed - exact).abs();
    Ok(Scheme2Report {
        dim: d,
        exact,
        reconstructed,
        simulated,
        formula_mismatch: mismatch > RECONSTRUCTION_TOL,
        mismatch,
        simulated_error: (simulated - exact).abs(),
        max_sum_defect: table.max_sum_defect(),
        measurement_budget: measurement_budget(d, false),
        interacting_budget: measurement_budget(d, true),
        sweep_budget: sweep_budget(d),
        tomography_count: tomography_count(d),
    })
}

/// sqrt(2 / (d (d - 1)))
pub fn wedge_scale(d: usize) -> f64 {
    (2.0 / (d * (d - 1)) as f64).sqrt()
}

/// sum_ij f_ijk a_i b_j, without a scale.
fn raw_wedge(a: &BlochVector, b: &BlochVector, basis: &GellMannBasis) -> Result<Vec<f64>> {
    check_dim(basis.dim(), a.dim)?;
    check_dim(basis.dim(), b.dim)?;
    check_dim(basis.len(), a.components.len())?;
    check_dim(basis.len(), b.components.len())?;
    Ok(basis
        .structure_constants()
        .contract(&a.components, &b.components))
}

/// (a ^ b)_k = c_d sum_ij f_ijk a_i b_j
pub fn bloch_wedge(a: &BlochVector, b: &BlochVector, basis: &GellMannBasis) -> Result<BlochVector> {
    let c = wedge_scale(basis.dim());
    Ok(BlochVector {
        dim: basis.dim(),
        components: raw_wedge(a, b, basis)?.into_iter().map(|x| c * x).collect(),
    })
}

/// (x + y + (d - 1) x ^ y) / 2
fn half_swap_bloch(x: &BlochVector, y: &BlochVector, basis: &GellMannBasis) -> Result<BlochVector> {
    let w = bloch_wedge(x, y, basis)?;
    Ok(x.add(y).add(&w.scale((basis.dim() - 1) as f64)).scale(0.5))
}

/// Least-squares scale c fitting the simulated intermediate ancilla Bloch
/// vector y = (x_A + x_beta + (d - 1) c sum f x_A x_beta) / 2.
pub fn fit_wedge_scale(d: usize, samples: usize, seed: u64) -> Result<f64> {
    let basis = gell_mann(d)?;
    let mut rng = seeded_rng(seed, 0);
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..samples {
        let rho_a = random_state_any(d, &mut rng);
        let beta = haar_pure_with(d, &mut rng);
        let (y_sim, _) = half_swap_ancilla(&rho_a, &beta, &DensityMatrix::maximally_mixed(d))?;
        let xa = basis.bloch_vector(rho_a.matrix())?;
        let xb = basis.bloch_vector(beta.matrix())?;
        let y = basis.bloch_vector(&y_sim)?;
        let base = xa.add(&xb).scale(0.5);
        let w: Vec<f64> = raw_wedge(&xa, &xb, &basis)?
            .into_iter()
            .map(|x| 0.5 * (d - 1) as f64 * x)
            .collect();
        for ((yk, bk), wk) in y.components.iter().zip(&base.components).zip(&w) {
            num += (yk - bk) * wk;
            den += wk * wk;
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument(
            "no wedge signal in the fit samples".into(),
        ));
    }
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCheck {
    pub dim: usize,
    pub scale: f64,
    /// |y_formula - y_simulated| after the first half-SWAP.
    pub y_deviation: f64,
    /// Second gate predicted as (x_B + y + (d-1) y ^ x_B) / 2.
    pub z_deviation_y_first: f64,
    /// Second gate predicted as (x_B + y + (d-1) x_B ^ y) / 2.
    pub z_deviation_b_first: f64,
    pub flagged: bool,
}

/// Compares the Bloch-algebra predictions for the ancilla after each
/// half-SWAP with the simulated ancilla states.
pub fn intermediate_bloch_check(
    rho_a: &DensityMatrix,
    beta: &DensityMatrix,
    rho_b: &DensityMatrix,
) -> Result<BlochCheck> {
    let d = beta.dim();
    let basis = gell_mann(d)?;
    let (y_sim, z_sim) = half_swap_ancilla(rho_a, beta, rho_b)?;
    let xa = basis.bloch_vector(rho_a.matrix())?;
    let xb = basis.bloch_vector(rho_b.matrix())?;
    let xbeta = basis.bloch_vector(beta.matrix())?;
    let y_sim = basis.bloch_vector(&y_sim)?;
    let z_sim = basis.bloch_vector(&z_sim)?;
    let y = half_swap_bloch(&xa, &xbeta, &basis)?;
    let y_deviation = y.max_abs_diff(&y_sim);
    let z_deviation_y_first = half_swap_bloch_swapped(&y_sim, &xb, &basis)?.max_abs_diff(&z_sim);
    let z_deviation_b_first = half_swap_bloch(&xb, &y_sim, &basis)?.max_abs_diff(&z_sim);
    Ok(BlochCheck {
        dim: d,
        scale: wedge_scale(d),
        y_deviation,
        z_deviation_y_first,
        z_deviation_b_first,
        flagged: y_deviation > BLOCH_CHECK_TOL
            || z_deviation_b_first.min(z_deviation_y_first) > BLOCH_CHECK_TOL,
    })
}

/// (x_B + y + (d - 1) y ^ x_B) / 2
fn half_swap_bloch_swapped(
    y: &BlochVector,
    xb: &BlochVector,
    basis: &GellMannBasis,
) -> Result<BlochVector> {
    let w = bloch_wedge(y, xb, basis)?;
    Ok(xb.add(y).add(&w.scale((basis.dim() - 1) as f64)).scale(0.5))
}

/// A random configuration for the factorization check: a mixed ancilla with
/// non-negligible polarization, a target state, an observable and a phase.
pub fn random_scheme1_config<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Scheme1Config> {
    let ancilla = loop {
        let a = random_state_any(2, rng);
        if sigma_z_mean(&a).abs() > 0.05 {
            break a;
        }
    };
    Ok(Scheme1Config {
        ancilla,
        observable: crate::random::random_observable_with(d, None, rng)?,
        t: rng.random_range(-3.0..3.0),
        rho: random_state_any(d, rng),
    })
}

/// |Taylor estimate - lower bound| at phase t.
pub fn taylor_error(rho: &DensityMatrix, k: &Observable, t: f64) -> Result<f64> {
    Ok((estimate_lower_bound_taylor(rho, k, t)? - lower_bound(rho, k)?).abs())
}
