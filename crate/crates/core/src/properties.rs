//! Registry of numerical invariants and the batch runner that falsifies them.
//!
//! Each property draws its inputs from a ChaCha8 generator seeded per trial
//! and returns a violation magnitude. A trial fails when the magnitude
//! exceeds the property's own tolerance. Failing trial seeds are recorded
//! so [`replay`] reproduces them exactly.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{
    classical_encoding, commutant_hermitian, covariance_defect, fourier, incoherence_defect,
    k_invariant_channel_with, random_incoherent_with, KrausChannel,
};
use crate::error::{Error, Result};
use crate::interferometry::{
    bloch_wedge, estimate_lower_bound_taylor, half_swap_ancilla, intermediate_bloch_check,
    measurement_budget, qubit_exact_lower_bound, random_scheme1_config, scheme2_reconstruct,
    scheme2_report, scheme2_run, swap_test_polarization, sweep_budget, taylor_error,
    tomography_count, RECONSTRUCTION_TOL, SCHEME1_BUDGET,
};
use crate::linalg::{computational_basis, expi_hermitian, inner, ComplexMatrix, C64, ONE, ZERO};
use crate::measures::{
    asymmetry, discord_min, g_twirl, lower_bound, lower_bound_spectral, pure_state_variance,
    rel_entropy_asymmetry, residual_coherence, skew_information, skew_information_p,
    skew_information_spectral, variance, DiscordOptions, GroupRep,
};
use crate::operators::{gell_mann, swap_operator, unitary_exp, BlochVector};
use crate::random::{
    haar_pure_with, haar_vector, hs_random_density_with, mix_seed, random_incoherent_state,
    random_integer_charge_with, random_observable_with, random_probabilities, random_state_any,
    random_unit3, random_unitary_with, seeded_rng,
};
use crate::shots::{sample_part, sample_partitioned, sample_polarization, sample_projective};
use crate::state::{partial_trace, purity, DensityMatrix, Observable};

/// A check maps (dimension, trial generator) to a violation magnitude.
pub type Check = fn(usize, &mut ChaCha8Rng) -> Result<f64>;

/// Which dimensions a property runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimRule {
    /// Every requested dimension.
    Requested,
    /// Requested dimensions up to a cap; the smallest allowed one if none fit.
    UpTo(usize),
    /// Fixed dimensions, whatever was requested.
    Only(&'static [usize]),
}

/// How many trials a property runs per dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialRule {
    /// The requested count.
    PerTrial,
    /// At most this many; each trial is itself an ensemble or a fixed case.
    AtMost(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct PropertySpec {
    pub name: &'static str,
    /// Module whose invariant this is.
    pub owner: &'static str,
    pub tolerance: f64,
    pub dims: DimRule,
    pub trials: TrialRule,
    pub suites: &'static [&'static str],
    /// Negative controls must be able to fail and are excluded from "default".
    pub negative_control: bool,
    pub check: Check,
}

impl PropertySpec {
    pub fn dims_for(&self, requested: &[usize]) -> Vec<usize> {
        match self.dims {
            DimRule::Requested => requested.to_vec(),
            DimRule::UpTo(cap) => {
                let v: Vec<usize> = requested.iter().copied().filter(|&d| d <= cap).collect();
                if v.is_empty() {
                    vec![2]
                } else {
                    v
                }
            }
            DimRule::Only(ds) => ds.to_vec(),
        }
    }

    pub fn trials_for(&self, requested: usize) -> usize {
        match self.trials {
            TrialRule::PerTrial => requested,
            TrialRule::AtMost(n) => requested.min(n),
        }
    }

    pub fn in_suite(&self, suite: &str) -> bool {
        if suite == "default" {
            !self.negative_control
        } else {
            self.suites.contains(&suite)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub dim: usize,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub owner: String,
    pub tolerance: f64,
    pub trials: usize,
    pub failures: Vec<Failure>,
    pub max_violation: f64,
    pub pass: bool,
}

impl PropertyReport {
    pub fn empty(spec: &PropertySpec) -> Self {
        PropertyReport {
            name: spec.name.to_string(),
            owner: spec.owner.to_string(),
            tolerance: spec.tolerance,
            trials: 0,
            failures: Vec::new(),
            max_violation: 0.0,
            pass: true,
        }
    }

    /// Associative combination of two partial reports of the same property.
    /// Failures are kept sorted by (dim, seed) so merge order does not show.
    pub fn merge(&self, other: &PropertyReport) -> Result<PropertyReport> {
        if self.name != other.name {
            return Err(Error::InvalidArgument(alloc::format!(
                "cannot merge reports of '{}' and '{}'",
                self.name,
                other.name
            )));
        }
        let mut failures = self.failures.clone();
        failures.extend(other.failures.iter().cloned());
        failures.sort_by_key(|f| (f.dim, f.seed));
        Ok(PropertyReport {
            name: self.name.clone(),
            owner: self.owner.clone(),
            tolerance: self.tolerance,
            trials: self.trials + other.trials,
            pass: failures.is_empty(),
            failures,
            max_violation: max_nan(self.max_violation, other.max_violation),
        })
    }
}

/// max that lets NaN win, so a broken check cannot hide.
fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of one trial; depends on the suite seed, the property, the
/// dimension and the trial index only.
pub fn trial_seed(seed: u64, name: &str, dim: usize, trial: usize) -> u64 {
    mix_seed(mix_seed(seed ^ fnv1a(name), dim as u64), trial as u64)
}

fn evaluate(spec: &PropertySpec, dim: usize, seed: u64) -> f64 {
    (spec.check)(dim, &mut seeded_rng(seed, 0)).unwrap_or(f64::INFINITY)
}

/// Runs trials `range` of one property at one dimension.
pub fn run_trials(
    spec: &PropertySpec,
    dim: usize,
    seed: u64,
    range: core::ops::Range<usize>,
) -> PropertyReport {
    let mut report = PropertyReport::empty(spec);
    for trial in range {
        let s = trial_seed(seed, spec.name, dim, trial);
        let v = evaluate(spec, dim, s);
        report.trials += 1;
        report.max_violation = max_nan(report.max_violation, v);
        if v.is_nan() || v > spec.tolerance {
            report.failures.push(Failure {
                seed: s,
                dim,
                violation: v,
            });
        }
    }
    report.pass = report.failures.is_empty();
    report
}

pub fn run_property(
    spec: &PropertySpec,
    trials: usize,
    dims: &[usize],
    seed: u64,
) -> PropertyReport {
    let mut report = PropertyReport::empty(spec);
    for d in spec.dims_for(dims) {
        let part = run_trials(spec, d, seed, 0..spec.trials_for(trials));
        report = report.merge(&part).expect("same property");
    }
    report
}

/// Re-evaluates a single recorded trial.
pub fn replay(name: &str, dim: usize, seed: u64) -> Result<f64> {
    let spec = find_property(name)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("unknown property '{name}'")))?;
    (spec.check)(dim, &mut seeded_rng(seed, 0))
}

pub fn validate_request(trials: usize, dims: &[usize]) -> Result<()> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions requested".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::DimensionTooSmall(d));
    }
    Ok(())
}

/// Properties of a named suite, in registry order.
pub fn suite_properties(suite: &str) -> Result<Vec<&'static PropertySpec>> {
    if !SUITES.contains(&suite) {
        return Err(Error::UnknownSuite(suite.to_string()));
    }
    Ok(registry().iter().filter(|p| p.in_suite(suite)).collect())
}

pub fn run_property_suite(
    suite: &str,
    trials: usize,
    dims: &[usize],
    seed: u64,
) -> Result<Vec<PropertyReport>> {
    let specs = suite_properties(suite)?;
    validate_request(trials, dims)?;
    Ok(specs
        .iter()
        .map(|p| run_property(p, trials, dims, seed))
        .collect())
}

pub fn find_property(name: &str) -> Option<&'static PropertySpec> {
    registry().iter().find(|p| p.name == name)
}

pub const SUITES: &[&str] = &[
    "default",
    "core",
    "inequalities",
    "dual-form",
    "monotonicity",
    "supplement",
    "schemes",
    "shots",
    "negative-control",
];

pub fn registry() -> &'static [PropertySpec] {
    REGISTRY
}

/// Pass-fail checks report 0 or 1; any tolerance below 1 separates them.
const FLAG_TOL: f64 = 0.5;

fn flag(bad: bool) -> f64 {
    if bad {
        1.0
    } else {
        0.0
    }
}

fn excess(value: f64, bound: f64) -> f64 {
    (value - bound).max(0.0)
}

fn observable<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Observable> {
    if rng.random_bool(0.2) {
        let k = random_integer_charge_with(d, 2, rng)?;
        let s = k.spectral_norm();
        if s > 0.0 {
            return Observable::new(k.matrix().scale_real(1.0 / s));
        }
    }
    random_observable_with(d, None, rng)
}

fn charge<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Observable> {
    random_integer_charge_with(d, (d as u32).min(4), rng)
}

// ---- core ----

fn clamp_trace_shift(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    Ok((rho.eigenvalues().iter().sum::<f64>() - rho.matrix().trace().re).abs())
}

fn swap_gell_mann_expansion(d: usize, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(gell_mann(d)?
        .swap_expansion()
        .max_abs_diff(&swap_operator(d)))
}

fn gell_mann_orthogonality(d: usize, _: &mut ChaCha8Rng) -> Result<f64> {
    let b = gell_mann(d)?;
    let norm = (d * (d - 1)) as f64;
    let mut worst = 0.0f64;
    for (i, a) in b.rescaled().iter().enumerate() {
        worst = worst.max(a.trace().norm());
        for (j, c) in b.rescaled().iter().enumerate() {
            let expect = if i == j { norm } else { 0.0 };
            worst = worst.max((a.trace_product(c) - C64::new(expect, 0.0)).norm());
        }
    }
    Ok(worst)
}

fn partial_trace_of_product(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let db = rng.random_range(2..=3);
    let tau = random_state_any(db, rng);
    let marginal = partial_trace(&rho.tensor(&tau), &[d, db], &[0])?;
    Ok(marginal.matrix().max_abs_diff(rho.matrix()))
}

fn unitary_inverse(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let t = rng.random_range(-10.0..10.0);
    Ok(unitary_exp(&k, t)
        .matmul(&unitary_exp(&k, -t))
        .max_abs_diff(&ComplexMatrix::identity(d)))
}

fn swap_trace_is_purity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let v = swap_operator(d)
        .trace_product(&rho.matrix().kron(rho.matrix()))
        .re;
    Ok((v - purity(&rho)).abs())
}

fn random_generators_valid(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let pure = hs_random_density_with(d, 1, rng)?;
    let u = random_unitary_with(d, rng);
    Ok((purity(&pure) - 1.0).abs().max(u.unitarity_defect()))
}

fn hs_mean_purity_band(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = 10_000;
    let mut acc = 0.0;
    for _ in 0..n {
        acc += purity(&hs_random_density_with(d, d, rng)?);
    }
    let mean = acc / n as f64;
    Ok(excess(0.3, mean).max(excess(mean, 0.55)))
}

// ---- coherence measures ----

fn inequality_chain(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = observable(d, rng)?;
    let (il, i, v) = (
        lower_bound(&rho, &k)?,
        skew_information(&rho, &k)?,
        variance(&rho, &k)?,
    );
    Ok((-il).max(il - i).max(i - v).max(0.0))
}

/// Half the draws commute with K by construction.
fn commuting_or_not(d: usize, rng: &mut ChaCha8Rng) -> Result<(DensityMatrix, Observable, bool)> {
    let k = observable(d, rng)?;
    if rng.random_bool(0.5) {
        Ok((random_incoherent_state(&k, rng), k, true))
    } else {
        Ok((random_state_any(d, rng), k, false))
    }
}

fn faithfulness(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (rho, k, _) = commuting_or_not(d, rng)?;
    let i = skew_information(&rho, &k)?;
    let comm = rho.matrix().commutator(k.matrix()).max_abs();
    let zero_i = i <= 1e-10;
    let zero_c = comm <= 1e-8;
    if zero_c {
        Ok(if zero_i { 0.0 } else { i })
    } else {
        Ok(flag(zero_i))
    }
}

fn lower_bound_zero_set(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (rho, k, _) = commuting_or_not(d, rng)?;
    let i = skew_information(&rho, &k)?;
    let il = lower_bound(&rho, &k)?;
    Ok(flag((il <= 1e-10) != (i <= 1e-10)))
}

fn pure_state_equalities(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = haar_pure_with(d, rng);
    let k = observable(d, rng)?;
    let (il, i, v) = (
        lower_bound(&rho, &k)?,
        skew_information(&rho, &k)?,
        variance(&rho, &k)?,
    );
    Ok((v - i).abs().max((i - 2.0 * il).abs()))
}

fn qubit_inequality(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(2, rng);
    let k = observable(2, rng)?;
    Ok(excess(
        skew_information(&rho, &k)?,
        2.0 * lower_bound(&rho, &k)?,
    ))
}

fn dual_form(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = observable(d, rng)?;
    let di = (skew_information(&rho, &k)? - skew_information_spectral(&rho, &k)?).abs();
    let dl = (lower_bound(&rho, &k)? - lower_bound_spectral(&rho, &k)?).abs();
    Ok(di.max(dl))
}

fn wyd_half_coincides(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = observable(d, rng)?;
    Ok((skew_information_p(&rho, &k, 0.5)? - skew_information(&rho, &k)?).abs())
}

fn wyd_pure_is_variance(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = haar_pure_with(d, rng);
    let k = observable(d, rng)?;
    let p = rng.random_range(0.05..0.95);
    Ok((skew_information_p(&rho, &k, p)? - variance(&rho, &k)?).abs())
}

fn pure_variance_formula(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let phi = haar_vector(d, rng);
    let k = observable(d, rng)?;
    let rho = DensityMatrix::pure(&phi)?;
    Ok((pure_state_variance(&phi, &k)? - variance(&rho, &k)?).abs())
}

fn convexity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let m = rng.random_range(2..=4);
    let weights = random_probabilities(m, rng);
    let states: Vec<DensityMatrix> = (0..m).map(|_| random_state_any(d, rng)).collect();
    let mix = DensityMatrix::mixture(&weights, &states)?;
    let mut avg = 0.0;
    for (w, s) in weights.iter().zip(&states) {
        avg += w * skew_information(s, &k)?;
    }
    Ok(excess(skew_information(&mix, &k)?, avg))
}

/// I(rho) against sum_i p_i V(phi_i) for the eigen-ensemble and for a random
/// pure-state decomposition |chi_j> = sum_i U_ji sqrt(lambda_i) |psi_i>.
fn ensemble_bound(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = observable(d, rng)?;
    let i = skew_information(&rho, &k)?;
    let psi = rho.eigenvectors();
    let lam = rho.eigenvalues();
    let mut eigen_avg = 0.0;
    for (j, &l) in lam.iter().enumerate() {
        if l > 0.0 {
            eigen_avg += l * pure_state_variance(&psi.column(j), &k)?;
        }
    }
    let m = d + rng.random_range(0..=d);
    let u = random_unitary_with(m, rng);
    let mut random_avg = 0.0;
    for j in 0..m {
        let mut chi = vec![ZERO; d];
        for (idx, &l) in lam.iter().enumerate() {
            let c = u[(j, idx)] * l.sqrt();
            for (x, p) in chi.iter_mut().zip(psi.column(idx)) {
                *x += c * p;
            }
        }
        let w = inner(&chi, &chi).re;
        if w > 1e-14 {
            let unit: Vec<C64> = chi.iter().map(|z| z / w.sqrt()).collect();
            random_avg += w * pure_state_variance(&unit, &k)?;
        }
    }
    Ok(excess(i, eigen_avg).max(excess(i, random_avg)))
}

fn superadditivity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(2 * d, rng);
    let k = observable(d, rng)?;
    Ok(excess(0.0, residual_coherence(&rho, &[d, 2], 0, &k)?))
}

fn residual_classical_zero(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let p = random_probabilities(d, rng);
    let mut m = ComplexMatrix::zeros(2 * d, 2 * d);
    for (i, &pi) in p.iter().enumerate() {
        let proj = ComplexMatrix::outer(&k.eigenvectors().column(i));
        m = &m + &proj.kron(random_state_any(2, rng).matrix()).scale_real(pi);
    }
    let rho = DensityMatrix::new(m)?;
    Ok(residual_coherence(&rho, &[d, 2], 0, &k)?.abs())
}

fn additivity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let dr = rng.random_range(2..=3);
    let (rho, tau) = (random_state_any(d, rng), random_state_any(dr, rng));
    let (qs, qr) = (observable(d, rng)?, observable(dr, rng)?);
    let total = Observable::local_sum(&qs, &qr);
    let joint = skew_information(&rho.tensor(&tau), &total)?;
    Ok((joint - skew_information(&rho, &qs)? - skew_information(&tau, &qr)?).abs())
}

/// A system state made symmetric by twirling, coupled to an asymmetric
/// reference by a unitary that conserves the total charge.
fn symmetry_breaking_transfer(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let qs = charge(d, rng)?;
    let qr = charge(2, rng)?;
    let rho_s = g_twirl(
        &random_state_any(d, rng),
        &GroupRep::phase_group(qs.clone()),
    )?;
    let tau = random_state_any(2, rng);
    let total = Observable::local_sum(&qs, &qr);
    let u = expi_hermitian(&commutant_hermitian(&total, rng), 1.0);
    let product = rho_s.tensor(&tau);
    let coupled = product.evolve(&u)?;
    let before = skew_information(&product, &total)?;
    let after = skew_information(&coupled, &total)?;
    let reference = skew_information(&tau, &qr)?;
    let system = skew_information(&rho_s, &qs)?;
    Ok((after - before)
        .abs()
        .max((before - reference).abs())
        .max(system))
}

fn zero_total_charge_marginals(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let qs = charge(d, rng)?;
    let qr = charge(2, rng)?;
    let total = Observable::local_sum(&qs, &qr);
    let rho = g_twirl(
        &random_state_any(2 * d, rng),
        &GroupRep::phase_group(total.clone()),
    )?;
    let joint = skew_information(&rho, &total)?;
    let ms = skew_information(&partial_trace(&rho, &[d, 2], &[0])?, &qs)?;
    let mr = skew_information(&partial_trace(&rho, &[d, 2], &[1])?, &qr)?;
    Ok(joint.max(ms).max(mr))
}

fn twirl_idempotence(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let group = GroupRep::phase_group(charge(d, rng)?);
    let once = g_twirl(&random_state_any(d, rng), &group)?;
    let twice = g_twirl(&once, &group)?;
    Ok(twice.matrix().max_abs_diff(once.matrix()))
}

fn twirled_asymmetry_zero(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let q = charge(d, rng)?;
    let twirled = g_twirl(&random_state_any(d, rng), &GroupRep::phase_group(q.clone()))?;
    asymmetry(&twirled, &q)
}

fn rel_entropy_nonnegative(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let group = GroupRep::phase_group(charge(d, rng)?);
    Ok(excess(
        0.0,
        rel_entropy_asymmetry(&random_state_any(d, rng), &group)?,
    ))
}

fn discord_options(rng: &mut ChaCha8Rng) -> DiscordOptions {
    DiscordOptions {
        seed: rng.random(),
        ..DiscordOptions::default()
    }
}

fn discord_classical_quantum(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let p = random_probabilities(2, rng);
    let basis = random_unitary_with(2, rng);
    let mut m = ComplexMatrix::zeros(4, 4);
    for (i, &pi) in p.iter().enumerate() {
        let proj = ComplexMatrix::outer(&basis.column(i));
        m = &m + &proj.kron(random_state_any(2, rng).matrix()).scale_real(pi);
    }
    let rho = DensityMatrix::new(m)?;
    let opts = discord_options(rng);
    Ok(discord_min(&rho, (2, 2), &[1.0, -1.0], &opts)?.value)
}

fn bell() -> DensityMatrix {
    let s = 1.0 / 2f64.sqrt();
    DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).expect("Bell state")
}

fn discord_bell(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let opts = discord_options(rng);
    Ok((discord_min(&bell(), (2, 2), &[1.0, -1.0], &opts)?.value - 1.0).abs())
}

fn discord_reproducible(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(4, rng);
    let opts = discord_options(rng);
    let a = discord_min(&rho, (2, 2), &[1.0, -1.0], &opts)?;
    let b = discord_min(&rho, (2, 2), &[1.0, -1.0], &opts)?;
    Ok(flag(
        a.value.to_bits() != b.value.to_bits() || a.restart_values != b.restart_values,
    ))
}

// ---- channels ----

fn incoherent_monotonicity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let n = rng.random_range(1..=4);
    let channel = random_incoherent_with(k.eigenvectors(), n, rng)?;
    let rho = random_state_any(d, rng);
    Ok(excess(
        skew_information(&channel.apply(&rho)?, &k)?,
        skew_information(&rho, &k)?,
    ))
}

fn incoherent_construction(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let n = rng.random_range(1..=4);
    let channel = random_incoherent_with(k.eigenvectors(), n, rng)?;
    Ok(incoherence_defect(&channel, &k.eigenbasis()).max(channel.completeness_defect()))
}

/// Charges with integer spectra share a random scale, so the total charge
/// has degenerate eigenspaces for the coupling to mix.
fn k_invariant_setup(
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Observable, Observable, DensityMatrix)> {
    let scale = rng.random_range(0.5..2.0);
    let ka = Observable::new(charge(d, rng)?.matrix().scale_real(scale))?;
    let db = rng.random_range(2..=3);
    let kb = Observable::new(charge(db, rng)?.matrix().scale_real(scale))?;
    let tau = random_incoherent_state(&kb, rng);
    Ok((ka, kb, tau))
}

fn k_invariant_monotonicity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (ka, kb, tau) = k_invariant_setup(d, rng)?;
    let (channel, _) = k_invariant_channel_with(&ka, &kb, &tau, rng)?;
    let rho = random_state_any(d, rng);
    Ok(excess(
        skew_information(&channel.apply(&rho)?, &ka)?,
        skew_information(&rho, &ka)?,
    ))
}

fn k_invariant_commutation(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (ka, kb, tau) = k_invariant_setup(d, rng)?;
    let (_, v) = k_invariant_channel_with(&ka, &kb, &tau, rng)?;
    let total = Observable::local_sum(&ka, &kb);
    Ok(total.matrix().conjugate_by(&v).max_abs_diff(total.matrix()))
}

fn classical_encoding_monotonicity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let n = rng.random_range(1..=4);
    let channel = random_incoherent_with(k.eigenvectors(), n, rng)?;
    let rho = random_state_any(d, rng);
    let out = classical_encoding(&channel, &rho, &computational_basis(n))?;
    let embedded = k.embed(&[d, n], 0)?;
    Ok(excess(
        skew_information(&out, &embedded)?,
        skew_information(&rho, &k)?,
    ))
}

/// Selective measurement of an observable diagonal in an eigenbasis of K,
/// with repeated eigenvalues so projectors can have rank above one.
fn von_neumann_average(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let values: Vec<f64> = (0..d)
        .map(|_| rng.random_range(0..d.max(2) - 1) as f64)
        .collect();
    let m = Observable::from_spectrum(&values, k.eigenvectors())?;
    let measurement = KrausChannel::spectral_measurement(&m);
    let rho = random_state_any(d, rng);
    let mut avg = 0.0;
    for b in measurement.apply_selective(&rho)? {
        avg += b.probability * skew_information(&b.state, &k)?;
    }
    Ok(excess(avg, skew_information(&rho, &k)?))
}

fn cptp_preservation(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let n = rng.random_range(1..=4);
    let incoherent = random_incoherent_with(k.eigenvectors(), n, rng)?;
    let (ka, kb, tau) = k_invariant_setup(d, rng)?;
    let (invariant, _) = k_invariant_channel_with(&ka, &kb, &tau, rng)?;
    let rho = random_state_any(d, rng);
    let mut worst = 0.0f64;
    for ch in [&incoherent, &invariant] {
        let out = ch.apply_matrix(rho.matrix())?;
        let min_eig = crate::linalg::eigh(&out.hermitian_part()).values[0];
        worst = worst
            .max((out.trace().re - 1.0).abs())
            .max(out.hermiticity_defect())
            .max(excess(0.0, min_eig));
    }
    Ok(worst)
}

fn g_covariance(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (ka, kb, tau) = k_invariant_setup(d, rng)?;
    let (channel, _) = k_invariant_channel_with(&ka, &kb, &tau, rng)?;
    let rho = random_state_any(d, rng);
    covariance_defect(&channel, &rho, &GroupRep::phase_group(ka))
}

// ---- interferometry ----

fn scheme1_identity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let cfg = random_scheme1_config(d, rng)?;
    let rotated = cfg.rho.evolve(&unitary_exp(&cfg.observable, cfg.t))?;
    let mut worst = 0.0f64;
    for second in [&cfg.rho, &rotated] {
        let m = swap_test_polarization(&cfg.ancilla, &cfg.rho, second)?;
        let ov = crate::state::overlap(&cfg.rho, second)?;
        worst = worst.max((m - cfg.sensitivity() * ov).abs());
    }
    Ok(worst)
}

fn scheme1_factorization(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let cfg = random_scheme1_config(d, rng)?;
    let rotated = cfg.rho.evolve(&unitary_exp(&cfg.observable, cfg.t))?;
    let ratio = swap_test_polarization(&cfg.ancilla, &cfg.rho, &rotated)? / cfg.sensitivity();
    let mut alpha = cfg.ancilla.clone();
    while (alpha.matrix()[(0, 0)].re - alpha.matrix()[(1, 1)].re).abs() < 0.05 {
        alpha = random_state_any(2, rng);
    }
    let other = random_state_any(2, rng);
    let other = if (other.matrix()[(0, 0)].re - other.matrix()[(1, 1)].re).abs() < 0.05 {
        DensityMatrix::basis_state(2, 1)
    } else {
        other
    };
    let sens = other.matrix()[(0, 0)].re - other.matrix()[(1, 1)].re;
    let ratio2 = swap_test_polarization(&other, &cfg.rho, &rotated)? / sens;
    Ok((ratio - ratio2).abs())
}

fn taylor_small_phase(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = random_observable_with(d, None, rng)?;
    taylor_error(&rho, &k, 1e-3)
}

fn taylor_limit(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = random_observable_with(d, None, rng)?;
    taylor_error(&rho, &k, 1e-4)
}

fn taylor_error_ratio(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = random_observable_with(d, None, rng)?;
    let t = 1e-3;
    let e1 = taylor_error(&rho, &k, t)?;
    if e1 <= 1e-9 {
        return Ok(0.0);
    }
    let e2 = taylor_error(&rho, &k, t / 2.0)?;
    Ok(excess(e2 / e1, 0.75))
}

fn taylor_zero_for_commuting(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = observable(d, rng)?;
    let rho = random_incoherent_state(&k, rng);
    Ok(estimate_lower_bound_taylor(&rho, &k, rng.random_range(0.1..2.0))?.abs())
}

fn qubit_exact_form(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(2, rng);
    let n = random_unit3(rng);
    Ok((qubit_exact_lower_bound(&rho, n)? - lower_bound(&rho, &Observable::pauli(n))?).abs())
}

fn scheme2_pair(d: usize, rng: &mut ChaCha8Rng) -> (DensityMatrix, DensityMatrix) {
    (random_state_any(d, rng), random_state_any(d, rng))
}

fn scheme2_simulated_overlap(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = scheme2_pair(d, rng);
    Ok(scheme2_report(&a, &b)?.simulated_error)
}

fn scheme2_s_sums(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = scheme2_pair(d, rng);
    let i = rng.random_range(0..d);
    let t = scheme2_run(
        &a,
        &b,
        &DensityMatrix::basis_state(d, i),
        &computational_basis(d),
    )?;
    Ok(t.max_sum_defect())
}

fn scheme2_reconstruction_range(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = scheme2_pair(d, rng);
    let t = scheme2_run(
        &a,
        &b,
        &DensityMatrix::basis_state(d, 0),
        &computational_basis(d),
    )?;
    let v = scheme2_reconstruct(&t)?;
    Ok(excess(0.0, v).max(excess(v, 1.0)))
}

fn scheme2_mismatch_flagged(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = scheme2_pair(d, rng);
    let r = scheme2_report(&a, &b)?;
    Ok(flag(
        r.formula_mismatch != ((r.reconstructed - r.exact).abs() > RECONSTRUCTION_TOL),
    ))
}

fn budgets(d: usize, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(flag(
        measurement_budget(d, false) != 5 * d
            || measurement_budget(d, true) != 4 * d
            || SCHEME1_BUDGET != 2
            || tomography_count(d) != d * d - 1
            || sweep_budget(d) != 2 * d * d + 2 * d,
    ))
}

fn bloch_intermediate(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let c = intermediate_bloch_check(
        &random_state_any(d, rng),
        &haar_pure_with(d, rng),
        &random_state_any(d, rng),
    )?;
    Ok(c.y_deviation.max(c.z_deviation_b_first))
}

fn wedge_antisymmetry(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let basis = gell_mann(d)?;
    let a = basis.bloch_vector(random_state_any(d, rng).matrix())?;
    let b = basis.bloch_vector(random_state_any(d, rng).matrix())?;
    let ab = bloch_wedge(&a, &b, &basis)?;
    let ba = bloch_wedge(&b, &a, &basis)?;
    let aa = bloch_wedge(&a, &a, &basis)?;
    Ok(ab.add(&ba).norm().max(aa.norm()))
}

fn half_swap_preserves_trace(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (a, b) = scheme2_pair(d, rng);
    let (y, z) = half_swap_ancilla(&a, &haar_pure_with(d, rng), &b)?;
    Ok((y.trace() - ONE).norm().max((z.trace() - ONE).norm()))
}

// ---- shots ----

fn shot_determinism(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let probs = random_probabilities(d, rng);
    let n = rng.random_range(1..100_000);
    let seed = rng.random();
    let a = sample_projective(&probs, n, seed, 0)?;
    let b = sample_projective(&probs, n, seed, 0)?;
    Ok(flag(a != b || a.counts.iter().sum::<u64>() != n))
}

fn partition_merge_identity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let probs = random_probabilities(d, rng);
    let scores: Vec<f64> = (0..d).map(|i| i as f64).collect();
    let n = rng.random_range(1..100_000);
    let parts = rng.random_range(1..=8);
    let seed = rng.random();
    let serial = sample_partitioned(&probs, scores.clone(), n, seed, 3, parts)?;
    let mut counts = vec![0u64; d];
    for part in (0..parts).rev() {
        let b = sample_part(&probs, scores.clone(), n, seed, 3, part, parts)?;
        for (c, x) in counts.iter_mut().zip(&b.counts) {
            *c += x;
        }
    }
    Ok(flag(counts != serial.counts || serial.n_shots != n))
}

fn polarization_unbiasedness(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let p = rng.random_range(0.05..0.95);
    let exact = 2.0 * p - 1.0;
    let seeds = 1000;
    let (mut sum, mut var) = (0.0, 0.0);
    let base: u64 = rng.random();
    for s in 0..seeds {
        let b = sample_polarization(p, 1000, mix_seed(base, s), 0)?;
        sum += b.estimate;
        var += b.stderr * b.stderr;
    }
    let mean = sum / seeds as f64;
    let combined = var.sqrt() / seeds as f64;
    Ok((mean - exact).abs() / combined)
}

fn polarization_coverage(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let p = rng.random_range(0.2..0.8);
    let exact = 2.0 * p - 1.0;
    let seeds = 2000;
    let base: u64 = rng.random();
    let mut inside = 0;
    for s in 0..seeds {
        let b = sample_polarization(p, 10_000, mix_seed(base, s), 0)?;
        if (b.estimate - exact).abs() <= 2.0 * b.stderr {
            inside += 1;
        }
    }
    let frac = inside as f64 / seeds as f64;
    Ok(excess(0.93, frac).max(excess(frac, 0.97)))
}

fn stderr_doubling(_: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let p = rng.random_range(0.1..0.9);
    let n = rng.random_range(1_000..20_000);
    let base: u64 = rng.random();
    let seeds = 200;
    let mut acc = 0.0;
    for s in 0..seeds {
        let one = sample_polarization(p, n, mix_seed(base, s), 0)?;
        let two = sample_polarization(p, 2 * n, mix_seed(base, s), 1)?;
        acc += two.stderr / one.stderr;
    }
    let mean = acc / seeds as f64;
    Ok(excess(0.6, mean).max(excess(mean, 0.8)))
}

// ---- negative controls ----

/// A maximally coherent unitary applied to an incoherent input creates
/// coherence, so the monotonicity check must flag it.
fn coherent_channel_monotonicity(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let k = Observable::diagonal(&(0..d).map(|i| i as f64).collect::<Vec<_>>());
    let channel = KrausChannel::unitary(fourier(d))?;
    let rho = random_incoherent_state(&k, rng);
    Ok(excess(
        skew_information(&channel.apply(&rho)?, &k)?,
        skew_information(&rho, &k)?,
    ))
}

fn coherent_channel_incoherence(d: usize, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(incoherence_defect(
        &KrausChannel::unitary(fourier(d))?,
        &computational_basis(d),
    ))
}

fn wedge_vector(d: usize, components: Vec<f64>) -> BlochVector {
    BlochVector { dim: d, components }
}

fn corrupted_dual_form(d: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rho = random_state_any(d, rng);
    let k = observable(d, rng)?;
    let basis = gell_mann(d)?;
    let x = basis.bloch_vector(rho.matrix())?;
    let shifted = wedge_vector(d, x.components.iter().map(|c| c * 0.5).collect());
    let other = basis.state_from_bloch(&shifted)?;
    Ok((skew_information(&rho, &k)? - skew_information_spectral(&other, &k)?).abs())
}

const CORE: &[&str] = &["core"];
const INEQ: &[&str] = &["inequalities"];
const DUAL: &[&str] = &["dual-form"];
const MONO: &[&str] = &["monotonicity"];
const SUPP: &[&str] = &["supplement"];
const SCHEMES: &[&str] = &["schemes"];
const SHOTS: &[&str] = &["shots"];
const NEG: &[&str] = &["negative-control"];

const fn prop(
    name: &'static str,
    owner: &'static str,
    tolerance: f64,
    dims: DimRule,
    trials: TrialRule,
    suites: &'static [&'static str],
    check: Check,
) -> PropertySpec {
    PropertySpec {
        name,
        owner,
        tolerance,
        dims,
        trials,
        suites,
        negative_control: false,
        check,
    }
}

const fn negative(name: &'static str, tolerance: f64, check: Check) -> PropertySpec {
    PropertySpec {
        name,
        owner: "channels",
        tolerance,
        dims: DimRule::Requested,
        trials: TrialRule::PerTrial,
        suites: NEG,
        negative_control: true,
        check,
    }
}

use DimRule::{Only, Requested, UpTo};
use TrialRule::{AtMost, PerTrial};

static REGISTRY: &[PropertySpec] = &[
    prop(
        "clamp_trace_shift",
        "qmat-core",
        1e-9,
        Requested,
        PerTrial,
        CORE,
        clamp_trace_shift,
    ),
    prop(
        "swap_gell_mann_expansion",
        "qmat-core",
        1e-10,
        Only(&[2, 3, 4, 5, 6]),
        AtMost(1),
        CORE,
        swap_gell_mann_expansion,
    ),
    prop(
        "gell_mann_orthogonality",
        "qmat-core",
        1e-10,
        UpTo(8),
        AtMost(1),
        CORE,
        gell_mann_orthogonality,
    ),
    prop(
        "partial_trace_of_product",
        "qmat-core",
        1e-12,
        Requested,
        PerTrial,
        CORE,
        partial_trace_of_product,
    ),
    prop(
        "unitary_inverse",
        "qmat-core",
        1e-10,
        Requested,
        PerTrial,
        CORE,
        unitary_inverse,
    ),
    prop(
        "swap_trace_is_purity",
        "qmat-core",
        1e-10,
        Requested,
        PerTrial,
        CORE,
        swap_trace_is_purity,
    ),
    prop(
        "random_generators_valid",
        "randlab",
        1e-10,
        Requested,
        PerTrial,
        CORE,
        random_generators_valid,
    ),
    prop(
        "hs_mean_purity_band",
        "randlab",
        0.0,
        Only(&[4]),
        AtMost(1),
        CORE,
        hs_mean_purity_band,
    ),
    prop(
        "inequality_chain",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        INEQ,
        inequality_chain,
    ),
    prop(
        "faithfulness",
        "coherence-measures",
        1e-10,
        Requested,
        PerTrial,
        INEQ,
        faithfulness,
    ),
    prop(
        "lower_bound_zero_set",
        "coherence-measures",
        FLAG_TOL,
        Requested,
        PerTrial,
        INEQ,
        lower_bound_zero_set,
    ),
    prop(
        "pure_state_equalities",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        INEQ,
        pure_state_equalities,
    ),
    prop(
        "qubit_inequality",
        "coherence-measures",
        1e-10,
        Only(&[2]),
        PerTrial,
        INEQ,
        qubit_inequality,
    ),
    prop(
        "pure_variance_formula",
        "coherence-measures",
        1e-10,
        Requested,
        PerTrial,
        INEQ,
        pure_variance_formula,
    ),
    prop(
        "convexity",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        INEQ,
        convexity,
    ),
    prop(
        "ensemble_bound",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        INEQ,
        ensemble_bound,
    ),
    prop(
        "superadditivity",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        INEQ,
        superadditivity,
    ),
    prop(
        "dual_form",
        "coherence-measures",
        1e-10,
        Requested,
        PerTrial,
        DUAL,
        dual_form,
    ),
    prop(
        "wyd_half_coincides",
        "coherence-measures",
        1e-10,
        Requested,
        PerTrial,
        DUAL,
        wyd_half_coincides,
    ),
    prop(
        "wyd_pure_is_variance",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        DUAL,
        wyd_pure_is_variance,
    ),
    prop(
        "incoherent_monotonicity",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        incoherent_monotonicity,
    ),
    prop(
        "incoherent_construction",
        "channels",
        1e-10,
        Requested,
        PerTrial,
        MONO,
        incoherent_construction,
    ),
    prop(
        "k_invariant_monotonicity",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        k_invariant_monotonicity,
    ),
    prop(
        "k_invariant_commutation",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        k_invariant_commutation,
    ),
    prop(
        "classical_encoding_monotonicity",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        classical_encoding_monotonicity,
    ),
    prop(
        "von_neumann_average",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        von_neumann_average,
    ),
    prop(
        "cptp_preservation",
        "channels",
        1e-10,
        Requested,
        PerTrial,
        MONO,
        cptp_preservation,
    ),
    prop(
        "g_covariance",
        "channels",
        1e-9,
        Requested,
        PerTrial,
        MONO,
        g_covariance,
    ),
    prop(
        "residual_classical_zero",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        residual_classical_zero,
    ),
    prop(
        "additivity",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        additivity,
    ),
    prop(
        "symmetry_breaking_transfer",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        symmetry_breaking_transfer,
    ),
    prop(
        "zero_total_charge_marginals",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        zero_total_charge_marginals,
    ),
    prop(
        "twirl_idempotence",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        twirl_idempotence,
    ),
    prop(
        "twirled_asymmetry_zero",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        twirled_asymmetry_zero,
    ),
    prop(
        "rel_entropy_nonnegative",
        "coherence-measures",
        1e-9,
        Requested,
        PerTrial,
        SUPP,
        rel_entropy_nonnegative,
    ),
    prop(
        "discord_classical_quantum",
        "coherence-measures",
        1e-6,
        Only(&[2]),
        AtMost(50),
        SUPP,
        discord_classical_quantum,
    ),
    prop(
        "discord_bell",
        "coherence-measures",
        1e-4,
        Only(&[2]),
        AtMost(3),
        SUPP,
        discord_bell,
    ),
    prop(
        "discord_reproducible",
        "coherence-measures",
        0.0,
        Only(&[2]),
        AtMost(3),
        SUPP,
        discord_reproducible,
    ),
    prop(
        "scheme1_identity",
        "interferometry",
        1e-10,
        UpTo(8),
        PerTrial,
        SCHEMES,
        scheme1_identity,
    ),
    prop(
        "scheme1_factorization",
        "interferometry",
        1e-9,
        UpTo(8),
        PerTrial,
        SCHEMES,
        scheme1_factorization,
    ),
    prop(
        "taylor_small_phase",
        "interferometry",
        1e-5,
        Requested,
        PerTrial,
        SCHEMES,
        taylor_small_phase,
    ),
    prop(
        "taylor_limit",
        "interferometry",
        1e-7,
        Requested,
        PerTrial,
        SCHEMES,
        taylor_limit,
    ),
    prop(
        "taylor_error_ratio",
        "interferometry",
        0.0,
        Requested,
        PerTrial,
        SCHEMES,
        taylor_error_ratio,
    ),
    prop(
        "taylor_zero_for_commuting",
        "interferometry",
        1e-12,
        Requested,
        PerTrial,
        SCHEMES,
        taylor_zero_for_commuting,
    ),
    prop(
        "qubit_exact_form",
        "interferometry",
        1e-12,
        Only(&[2]),
        PerTrial,
        SCHEMES,
        qubit_exact_form,
    ),
    prop(
        "scheme2_simulated_overlap",
        "interferometry",
        1e-10,
        UpTo(4),
        PerTrial,
        SCHEMES,
        scheme2_simulated_overlap,
    ),
    prop(
        "scheme2_s_sums",
        "interferometry",
        1e-10,
        UpTo(4),
        PerTrial,
        SCHEMES,
        scheme2_s_sums,
    ),
    prop(
        "scheme2_reconstruction_range",
        "interferometry",
        1e-8,
        UpTo(4),
        PerTrial,
        SCHEMES,
        scheme2_reconstruction_range,
    ),
    prop(
        "scheme2_mismatch_flagged",
        "interferometry",
        FLAG_TOL,
        UpTo(4),
        PerTrial,
        SCHEMES,
        scheme2_mismatch_flagged,
    ),
    prop(
        "half_swap_preserves_trace",
        "interferometry",
        1e-12,
        UpTo(4),
        PerTrial,
        SCHEMES,
        half_swap_preserves_trace,
    ),
    prop(
        "bloch_intermediate",
        "interferometry",
        1e-10,
        UpTo(4),
        PerTrial,
        SCHEMES,
        bloch_intermediate,
    ),
    prop(
        "wedge_antisymmetry",
        "interferometry",
        1e-12,
        UpTo(8),
        PerTrial,
        SCHEMES,
        wedge_antisymmetry,
    ),
    prop(
        "budgets",
        "interferometry",
        FLAG_TOL,
        Requested,
        AtMost(1),
        SCHEMES,
        budgets,
    ),
    prop(
        "shot_determinism",
        "shots",
        FLAG_TOL,
        Requested,
        PerTrial,
        SHOTS,
        shot_determinism,
    ),
    prop(
        "partition_merge_identity",
        "shots",
        FLAG_TOL,
        Requested,
        PerTrial,
        SHOTS,
        partition_merge_identity,
    ),
    prop(
        "polarization_unbiasedness",
        "shots",
        3.0,
        Only(&[2]),
        AtMost(3),
        SHOTS,
        polarization_unbiasedness,
    ),
    prop(
        "polarization_coverage",
        "shots",
        0.0,
        Only(&[2]),
        AtMost(3),
        SHOTS,
        polarization_coverage,
    ),
    prop(
        "stderr_doubling",
        "shots",
        0.0,
        Only(&[2]),
        AtMost(3),
        SHOTS,
        stderr_doubling,
    ),
    negative(
        "coherent_channel_monotonicity",
        1e-9,
        coherent_channel_monotonicity,
    ),
    negative(
        "coherent_channel_incoherence",
        1e-10,
        coherent_channel_incoherence,
    ),
    negative("corrupted_dual_form", 1e-10, corrupted_dual_form),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_suites_known() {
        let mut names: Vec<&str> = registry().iter().map(|p| p.name).collect();
        names.sort_unstable();
        let n = names.len();
        names.dedup();
        assert_eq!(names.len(), n);
        for p in registry() {
            for s in p.suites {
                assert!(SUITES.contains(s), "{} lists unknown suite {s}", p.name);
            }
            assert!(p.suites.len() == 1);
        }
        for s in SUITES {
            assert!(
                !suite_properties(s).unwrap().is_empty(),
                "suite {s} is empty"
            );
        }
    }

    #[test]
    fn request_validation() {
        assert_eq!(
            run_property_suite("inequalities", 0, &[2], 1),
            Err(Error::NoTrials)
        );
        assert!(matches!(
            run_property_suite("nope", 1, &[2], 1),
            Err(Error::UnknownSuite(_))
        ));
        assert!(matches!(
            run_property_suite("core", 1, &[1], 1),
            Err(Error::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn small_inequality_run_passes() {
        for r in run_property_suite("inequalities", 20, &[2, 3], 7).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn negative_controls_fail_and_replay() {
        let reports = run_property_suite("negative-control", 5, &[2, 3], 1).unwrap();
        for r in &reports {
            assert!(!r.pass, "{} should fail", r.name);
            let f = &r.failures[0];
            let again = replay(&r.name, f.dim, f.seed).unwrap();
            assert_eq!(again.to_bits(), f.violation.to_bits());
        }
    }

    #[test]
    fn merge_is_associative_and_order_free() {
        let spec = find_property("inequality_chain").unwrap();
        let a = run_trials(spec, 3, 1, 0..4);
        let b = run_trials(spec, 3, 1, 4..9);
        let c = run_trials(spec, 3, 1, 9..12);
        let left = a.merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, run_trials(spec, 3, 1, 0..12));
        assert_eq!(left.trials, 12);
    }
}
