//! Finite-shot sampling of the interferometer readouts.
//!
//! Every setting draws from its own ChaCha8 stream, so the purity and overlap
//! settings (or the four S-value settings) never share random numbers.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometry::{
    lower_bound_from_polarizations, scheme1_polarization, sweep_reconstruct, SValueTable,
    Scheme1Config, SCHEME1_BUDGET,
};
use crate::random::{mix_seed, seeded_rng};
use crate::state::{check_dim, Observable};

/// Tolerance on a probability vector summing to one.
pub const PROBABILITY_SUM_TOL: f64 = 1e-10;
/// Smallest shot count accepted by the coherence experiment.
pub const MIN_EXPERIMENT_SHOTS: u64 = 100;

/// Named generator recorded in reports.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), stream per setting";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotBatch {
    pub n_shots: u64,
    pub seed: u64,
    pub stream: u64,
    pub counts: Vec<u64>,
    /// Value attached to each outcome; the estimate is their mean.
    pub scores: Vec<f64>,
    pub estimate: f64,
    pub stderr: f64,
}

impl ShotBatch {
    pub fn from_counts(counts: Vec<u64>, scores: Vec<f64>, seed: u64, stream: u64) -> Result<Self> {
        check_dim(counts.len(), scores.len())?;
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a shot batch needs at least one shot".into(),
            ));
        }
        let nf = n as f64;
        let mean = counts
            .iter()
            .zip(&scores)
            .map(|(&c, s)| c as f64 * s)
            .sum::<f64>()
            / nf;
        let stderr = if n > 1 {
            let ss: f64 = counts
                .iter()
                .zip(&scores)
                .map(|(&c, s)| c as f64 * (s - mean) * (s - mean))
                .sum();
            (ss / (nf - 1.0)).sqrt() / nf.sqrt()
        } else {
            0.0
        };
        Ok(ShotBatch {
            n_shots: n,
            seed,
            stream,
            counts,
            scores,
            estimate: mean,
            stderr,
        })
    }

    /// Observed outcome frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_shots as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Count addition. Seed and stream are kept from `self`.
    pub fn merge(&self, other: &ShotBatch) -> Result<ShotBatch> {
        check_dim(self.counts.len(), other.counts.len())?;
        if self.scores != other.scores {
            return Err(Error::InvalidArgument(
                "cannot merge batches with different scores".into(),
            ));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        ShotBatch::from_counts(counts, self.scores.clone(), self.seed, self.stream)
    }
}

fn validate_probabilities(probs: &[f64]) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::InvalidProbability("empty probability vector".into()));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || !(-PROBABILITY_SUM_TOL..=1.0 + PROBABILITY_SUM_TOL).contains(&p) {
            return Err(Error::InvalidProbability(format!("entry {i} is {p}")));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::InvalidProbability(format!("entries sum to {total}")));
    }
    Ok(probs.iter().map(|p| p.clamp(0.0, 1.0)).collect())
}

/// Multinomial counts by sequential conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = Vec::with_capacity(probs.len());
    let mut remaining = n;
    let mut mass = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            counts.push(remaining);
            break;
        }
        let c = if remaining == 0 || mass <= 0.0 {
            0
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .expect("q in [0, 1]")
                .sample(rng)
        };
        counts.push(c);
        remaining -= c;
        mass -= p;
    }
    counts
}

/// n_shots projective readouts with the given outcome probabilities; the
/// score of outcome i is i.
pub fn sample_projective(probs: &[f64], n_shots: u64, seed: u64, stream: u64) -> Result<ShotBatch> {
    let scores = (0..probs.len()).map(|i| i as f64).collect();
    sample_scored(probs, scores, n_shots, seed, stream)
}

/// Projective readouts with an explicit score per outcome.
pub fn sample_scored(
    probs: &[f64],
    scores: Vec<f64>,
    n_shots: u64,
    seed: u64,
    stream: u64,
) -> Result<ShotBatch> {
    let probs = validate_probabilities(probs)?;
    let counts = multinomial(&probs, n_shots, &mut seeded_rng(seed, stream));
    ShotBatch::from_counts(counts, scores, seed, stream)
}

fn plus_minus(p_plus: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&p_plus) || !p_plus.is_finite() {
        return Err(Error::InvalidProbability(format!("p_plus = {p_plus}")));
    }
    Ok([p_plus, 1.0 - p_plus])
}

/// Bernoulli readout of the ancilla: outcome +1 with probability p_plus.
/// The estimate is 2 n_+/n - 1.
pub fn sample_polarization(p_plus: f64, n_shots: u64, seed: u64, stream: u64) -> Result<ShotBatch> {
    sample_scored(
        &plus_minus(p_plus)?,
        alloc::vec![1.0, -1.0],
        n_shots,
        seed,
        stream,
    )
}

/// p_plus = (1 + m) / 2, clamped against roundoff.
pub fn p_plus(polarization: f64) -> f64 {
    ((1.0 + polarization) / 2.0).clamp(0.0, 1.0)
}

/// Sizes of `parts` sub-batches that add up to n.
pub fn partition_shots(n: u64, parts: usize) -> Vec<u64> {
    let parts = parts.max(1) as u64;
    (0..parts)
        .map(|i| n / parts + u64::from(i < n % parts))
        .collect()
}

/// Seed of sub-batch `part` derived from the batch seed.
pub fn part_seed(seed: u64, part: usize) -> u64 {
    mix_seed(seed, part as u64 + 1)
}

/// One sub-batch of a partitioned run. Running every part and merging gives
/// the same counts whatever order or thread the parts run on.
pub fn sample_part(
    probs: &[f64],
    scores: Vec<f64>,
    n_shots: u64,
    seed: u64,
    stream: u64,
    part: usize,
    parts: usize,
) -> Result<ShotBatch> {
    let sizes = partition_shots(n_shots, parts);
    let size = *sizes
        .get(part)
        .ok_or_else(|| Error::InvalidArgument(format!("part {part} of {parts}")))?;
    let probs = validate_probabilities(probs)?;
    let counts = multinomial(&probs, size, &mut seeded_rng(part_seed(seed, part), stream));
    let mut batch = ShotBatch {
        n_shots: size,
        seed,
        stream,
        counts,
        scores,
        estimate: 0.0,
        stderr: 0.0,
    };
    if size > 0 {
        batch = ShotBatch::from_counts(batch.counts, batch.scores, seed, stream)?;
    }
    Ok(batch)
}

/// Serial reference for a partitioned run.
pub fn sample_partitioned(
    probs: &[f64],
    scores: Vec<f64>,
    n_shots: u64,
    seed: u64,
    stream: u64,
    parts: usize,
) -> Result<ShotBatch> {
    let mut counts = alloc::vec![0u64; probs.len()];
    for part in 0..parts.max(1) {
        let b = sample_part(
            probs,
            scores.clone(),
            n_shots,
            seed,
            stream,
            part,
            parts.max(1),
        )?;
        for (c, x) in counts.iter_mut().zip(&b.counts) {
            *c += x;
        }
    }
    ShotBatch::from_counts(counts, scores, seed, stream)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Estimator {
    /// (m_P - m_O) / (2 t^2 Tr[alpha sigma_z]) at a small phase t.
    Taylor,
    /// (m_P - m_O) / (2 Tr[alpha sigma_z]) with K = n . sigma and t = pi/2.
    QubitExact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceEstimate {
    pub estimator: Estimator,
    pub t: f64,
    /// The estimator evaluated on exact polarizations.
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub purity_batch: Option<ShotBatch>,
    pub overlap_batch: Option<ShotBatch>,
    pub measurement_budget: usize,
}

/// n . sigma -> n, or an error if K has a trace or |n| != 1.
pub fn pauli_direction(k: &Observable) -> Result<[f64; 3]> {
    check_dim(2, k.dim())?;
    let m = k.matrix();
    let n = [m[(1, 0)].re, m[(1, 0)].im, m[(0, 0)].re];
    let trace = (m[(0, 0)].re + m[(1, 1)].re).abs();
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if trace > 1e-10 || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(n)
}

/// Runs the purity and overlap settings of the controlled-SWAP test with
/// n_shots each (n_shots = 0 uses exact polarizations) and combines them
/// into an estimate of the lower bound. Standard errors of the two
/// independent settings add in quadrature.
pub fn estimate_coherence_experiment(
    cfg: &Scheme1Config,
    estimator: Estimator,
    n_shots: u64,
    seed: u64,
) -> Result<CoherenceEstimate> {
    if n_shots != 0 && n_shots < MIN_EXPERIMENT_SHOTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_EXPERIMENT_SHOTS} shots per setting, got {n_shots}"
        )));
    }
    let mut cfg = cfg.clone();
    if estimator == Estimator::QubitExact {
        pauli_direction(&cfg.observable)?;
        cfg.t = core::f64::consts::FRAC_PI_2;
    } else if cfg.t == 0.0 {
        return Err(Error::ZeroPhase);
    }
    let m_p = scheme1_polarization(&cfg, false)?;
    let m_o = scheme1_polarization(&cfg, true)?;
    let sensitivity = cfg.sensitivity();
    let combine = |a: f64, b: f64| match estimator {
        Estimator::Taylor => lower_bound_from_polarizations(a, b, cfg.t, sensitivity),
        Estimator::QubitExact => (a - b) / (2.0 * sensitivity),
    };
    let scale = match estimator {
        Estimator::Taylor => 1.0 / (2.0 * cfg.t * cfg.t * sensitivity.abs()),
        Estimator::QubitExact => 1.0 / (2.0 * sensitivity.abs()),
    };
    let exact = combine(m_p, m_o);
    let (estimate, stderr, purity_batch, overlap_batch) = if n_shots == 0 {
        (exact, 0.0, None, None)
    } else {
        let bp = sample_polarization(p_plus(m_p), n_shots, seed, 0)?;
        let bo = sample_polarization(p_plus(m_o), n_shots, seed, 1)?;
        let est = combine(bp.estimate, bo.estimate);
        let se = scale * (bp.stderr * bp.stderr + bo.stderr * bo.stderr).sqrt();
        (est, se, Some(bp), Some(bo))
    };
    Ok(CoherenceEstimate {
        estimator,
        t: cfg.t,
        exact,
        estimate,
        stderr,
        purity_batch,
        overlap_batch,
        measurement_budget: SCHEME1_BUDGET,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyTable {
    pub table: SValueTable,
    pub batches: Vec<ShotBatch>,
    pub shots_per_setting: u64,
    pub total_shots: u64,
}

/// Replaces the four S vectors of an exact table with finite-shot estimates
/// S^i = d p_i - 1, one stream per setting starting at `first_stream`.
pub fn sample_svalue_table(
    exact: &SValueTable,
    n_shots: u64,
    seed: u64,
    first_stream: u64,
) -> Result<NoisyTable> {
    exact.check_complete()?;
    let d = exact.dim as f64;
    let mut table = exact.clone();
    let mut batches = Vec::with_capacity(4);
    let settings: [&mut Vec<f64>; 4] = [
        &mut table.s_ab,
        &mut table.s_ba,
        &mut table.s_a,
        &mut table.s_b,
    ];
    for (k, s) in settings.into_iter().enumerate() {
        let probs: Vec<f64> = s.iter().map(|x| (x + 1.0) / d).collect();
        let batch = sample_projective(&probs, n_shots, seed, first_stream + k as u64)?;
        *s = batch.frequencies().iter().map(|p| d * p - 1.0).collect();
        batches.push(batch);
    }
    let settings_count = (exact.measurement_count as u64) / exact.dim as u64;
    Ok(NoisyTable {
        table,
        batches,
        shots_per_setting: n_shots,
        total_shots: settings_count * n_shots,
    })
}

/// Noisy copies of a whole ancilla sweep, each table on its own block of
/// streams.
pub fn sample_sweep(tables: &[SValueTable], n_shots: u64, seed: u64) -> Result<Vec<NoisyTable>> {
    tables
        .iter()
        .enumerate()
        .map(|(j, t)| sample_svalue_table(t, n_shots, seed, 4 * j as u64))
        .collect()
}

/// Overlap estimate from a noisy sweep and its standard error. Settings are
/// independent batches, so the variance of each frequency is p(1-p)/n and
/// the product term propagates to first order.
pub fn sweep_estimate(noisy: &[NoisyTable]) -> Result<(f64, f64)> {
    let tables: Vec<SValueTable> = noisy.iter().map(|n| n.table.clone()).collect();
    let estimate = sweep_reconstruct(&tables)?;
    let mut var = 0.0;
    for n in noisy {
        let t = &n.table;
        let d = t.dim as f64;
        let b = t.i_beta;
        let p = |s: f64| ((s + 1.0) / d).clamp(0.0, 1.0);
        let shots = n.shots_per_setting as f64;
        let pv = |q: f64| q * (1.0 - q) / shots;
        let (a_bb, b_bb) = (p(t.s_a[b]), p(t.s_b[b]));
        var += (0.75 + b_bb).powi(2) * pv(a_bb)
            + (0.75 + a_bb).powi(2) * pv(b_bb)
            + pv(p(t.s_ab[b]))
            + pv(p(t.s_ba[b]));
    }
    Ok((estimate, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, C64};
    use crate::state::DensityMatrix;

    fn fig1_state(p: f64) -> DensityMatrix {
        let h = C64::new(0.5, 0.0);
        let o = C64::new(p / 2.0, 0.0);
        DensityMatrix::new(ComplexMatrix::from_vec(2, 2, alloc::vec![h, o, o, h]).unwrap()).unwrap()
    }

    #[test]
    fn certain_polarization() {
        let b = sample_polarization(1.0, 1000, 3, 0).unwrap();
        assert_eq!(b.estimate, 1.0);
        assert_eq!(b.stderr, 0.0);
        assert_eq!(b.counts, alloc::vec![1000, 0]);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(matches!(
            sample_polarization(1.2, 10, 0, 0),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            sample_projective(&[0.5, 0.6], 10, 0, 0),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn seeded_batches_are_bitwise_reproducible() {
        let a = sample_projective(&[0.2, 0.3, 0.5], 12345, 99, 2).unwrap();
        let b = sample_projective(&[0.2, 0.3, 0.5], 12345, 99, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 12345);
        let c = sample_projective(&[0.2, 0.3, 0.5], 12345, 99, 3).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn stderr_matches_binomial_formula() {
        let b = sample_polarization(0.3, 100_000, 5, 0).unwrap();
        let q = b.counts[0] as f64 / 1e5;
        let analytic = (4.0 * q * (1.0 - q) * 1e5 / (1e5 - 1.0)).sqrt() / 1e5f64.sqrt();
        assert!((b.stderr - analytic).abs() < 1e-12);
    }

    #[test]
    fn partitioned_equals_merged_parts() {
        let probs = [0.1, 0.4, 0.5];
        let scores = alloc::vec![1.0, 0.0, -1.0];
        let serial = sample_partitioned(&probs, scores.clone(), 10_001, 7, 0, 4).unwrap();
        let mut merged = sample_part(&probs, scores.clone(), 10_001, 7, 0, 3, 4).unwrap();
        for part in (0..3).rev() {
            merged = merged
                .merge(&sample_part(&probs, scores.clone(), 10_001, 7, 0, part, 4).unwrap())
                .unwrap();
        }
        assert_eq!(serial.counts, merged.counts);
        assert_eq!(serial.n_shots, 10_001);
        assert_eq!(partition_shots(10, 3), alloc::vec![4, 3, 3]);
    }

    #[test]
    fn exact_mode_reproduces_closed_form() {
        let cfg = Scheme1Config::new(fig1_state(0.5), Observable::sigma_z(), 1e-3);
        let q = estimate_coherence_experiment(&cfg, Estimator::QubitExact, 0, 1).unwrap();
        assert!((q.estimate - 0.125).abs() < 1e-12);
        assert_eq!(q.measurement_budget, 2);
        let t = estimate_coherence_experiment(&cfg, Estimator::Taylor, 0, 1).unwrap();
        assert!((t.estimate - 0.125).abs() < 1e-4);
    }

    #[test]
    fn null_case_under_noise() {
        let cfg = Scheme1Config::new(
            DensityMatrix::diagonal(&[0.3, 0.7]).unwrap(),
            Observable::sigma_z(),
            core::f64::consts::FRAC_PI_2,
        );
        let e = estimate_coherence_experiment(&cfg, Estimator::QubitExact, 10_000, 4).unwrap();
        assert!(e.estimate.abs() <= 5.0 * e.stderr + 1e-15, "{e:?}");
        assert!(matches!(
            estimate_coherence_experiment(&cfg, Estimator::QubitExact, 50, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn noisy_table_settings_sum_to_zero() {
        use crate::interferometry::scheme2_run;
        use crate::linalg::computational_basis;
        let rho = DensityMatrix::basis_state(3, 2);
        let exact = scheme2_run(
            &rho,
            &rho,
            &DensityMatrix::basis_state(3, 2),
            &computational_basis(3),
        )
        .unwrap();
        let noisy = sample_svalue_table(&exact, 1000, 1, 0).unwrap();
        assert!(noisy.table.max_sum_defect() < 1e-12);
        assert_eq!(noisy.table.s_a, exact.s_a);
        assert_eq!(noisy.total_shots, 5000);
    }

    #[test]
    fn noisy_sweep_brackets_the_overlap() {
        use crate::interferometry::scheme2_sweep;
        use crate::linalg::computational_basis;
        use crate::random::random_state_any;
        let mut rng = seeded_rng(8, 0);
        let mut inside = 0;
        for seed in 0..200 {
            let a = random_state_any(3, &mut rng);
            let b = random_state_any(3, &mut rng);
            let tables = scheme2_sweep(&a, &b, &computational_basis(3)).unwrap();
            let (est, err) = sweep_estimate(&sample_sweep(&tables, 20_000, seed).unwrap()).unwrap();
            let exact = crate::state::overlap(&a, &b).unwrap();
            if (est - exact).abs() <= 2.0 * err {
                inside += 1;
            }
        }
        assert!((180..=200).contains(&inside), "{inside}");
    }
}
