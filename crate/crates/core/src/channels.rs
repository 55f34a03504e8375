//! Kraus channels and generators for the channel classes that must not
//! increase K-coherence.
//!
//! Kraus operators always act as `K rho K^dagger`.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, ComplexMatrix, C64, ZERO};
use crate::measures::GroupRep;
use crate::random::{complex_gaussian, random_hermitian_with, seeded_rng};
use crate::state::{check_dim, partial_trace_matrix, DensityMatrix, Observable, DEGENERACY_GAP};

/// Entrywise tolerance on sum K^dagger K - 1.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Selective branches with lower probability are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-14;
/// Largest off-diagonal magnitude an incoherent output may carry.
pub const INCOHERENCE_TOL: f64 = 1e-10;
/// Allowed |V K_tot V^dagger - K_tot|.
pub const COMMUTATION_TOL: f64 = 1e-9;
/// Allowed |[tau, K]| for an environment state.
pub const ENVIRONMENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

/// One outcome of a selective application.
#[derive(Clone, Debug)]
pub struct Branch {
    pub index: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            check_dim(dim_out, k.rows())?;
            check_dim(dim_in, k.cols())?;
        }
        let channel = KrausChannel {
            dim_in,
            dim_out,
            kraus,
            labels: None,
        };
        let defect = channel.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus { defect });
        }
        Ok(channel)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_dim(self.kraus.len(), labels.len())?;
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(alloc::vec![ComplexMatrix::identity(d)]).expect("identity is complete")
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(alloc::vec![u])
    }

    /// Complete dephasing in the eigenbasis of `k`, one rank-1 projector per
    /// eigenvector.
    pub fn dephasing(k: &Observable) -> Self {
        Self::rank_one_measurement(&k.eigenbasis()).expect("eigenprojectors resolve the identity")
    }

    /// Kraus operators |b_n><b_n| in the order the basis is given.
    pub fn rank_one_measurement(basis: &[Vec<C64>]) -> Result<Self> {
        Self::new(basis.iter().map(|v| ComplexMatrix::outer(v)).collect())
    }

    /// Projective measurement onto the (possibly degenerate) eigenspaces of
    /// `k`. Eigenvalues closer than the degeneracy gap share a projector.
    pub fn spectral_measurement(k: &Observable) -> Self {
        let vectors = k.eigenbasis();
        let kraus = eigenspace_blocks(k.eigenvalues())
            .into_iter()
            .map(|(start, end)| {
                let mut p = ComplexMatrix::zeros(k.dim(), k.dim());
                for v in &vectors[start..end] {
                    p = &p + &ComplexMatrix::outer(v);
                }
                p
            })
            .collect();
        Self::new(kraus).expect("eigenprojectors resolve the identity")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// max |sum_n K_n^dagger K_n - 1| entrywise.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc = &acc + &k.adjoint().matmul(k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// sum_n K_n rho K_n^dagger
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?)
    }

    /// The same map on an arbitrary operator, without validation of the output.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim_in, m.rows())?;
        let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc = &acc + &m.conjugate_by(k);
        }
        Ok(acc)
    }

    /// Normalized post-measurement states with their probabilities.
    pub fn apply_selective(&self, rho: &DensityMatrix) -> Result<Vec<Branch>> {
        check_dim(self.dim_in, rho.dim())?;
        let mut branches = Vec::with_capacity(self.kraus.len());
        for (index, k) in self.kraus.iter().enumerate() {
            let out = rho.matrix().conjugate_by(k);
            let probability = out.trace().re;
            if probability < BRANCH_CUTOFF {
                continue;
            }
            let state = DensityMatrix::new(out.scale_real(1.0 / probability))?;
            branches.push(Branch {
                index,
                probability,
                state,
            });
        }
        Ok(branches)
    }

    /// Channel with every Kraus operator written in another basis:
    /// B K_n B^dagger, for square channels.
    pub fn rotated(&self, basis: &ComplexMatrix) -> Result<Self> {
        check_dim(self.dim_in, basis.rows())?;
        check_dim(self.dim_out, basis.rows())?;
        let kraus = self.kraus.iter().map(|k| k.conjugate_by(basis)).collect();
        let mut channel = Self::new(kraus)?;
        channel.labels = self.labels.clone();
        Ok(channel)
    }
}

/// Index ranges of runs of ascending eigenvalues whose neighbouring gaps stay
/// below the degeneracy threshold.
pub fn eigenspace_blocks(values: &[f64]) -> Vec<(usize, usize)> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() >= DEGENERACY_GAP * scale {
            blocks.push((start, i));
            start = i;
        }
    }
    blocks
}

/// Largest off-diagonal magnitude of K_n |b_i><b_i| K_n^dagger in the basis
/// {b}, over all n and i.
pub fn incoherence_defect(channel: &KrausChannel, basis: &[Vec<C64>]) -> f64 {
    if channel.dim_in != channel.dim_out || basis.len() != channel.dim_in {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for k in &channel.kraus {
        for b in basis {
            let image = k.matvec(b);
            let coords: Vec<C64> = basis
                .iter()
                .map(|e| crate::linalg::inner(e, &image))
                .collect();
            for (j, cj) in coords.iter().enumerate() {
                for cl in &coords[j + 1..] {
                    worst = worst.max((cj * cl.conj()).norm());
                }
            }
        }
    }
    worst
}

/// True iff every Kraus operator maps every basis projector to an operator
/// diagonal in the same basis.
pub fn is_incoherent(channel: &KrausChannel, basis: &[Vec<C64>]) -> bool {
    incoherence_defect(channel, basis) <= INCOHERENCE_TOL
}

/// Random incoherent channel in the computational basis.
pub fn random_incoherent(d: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel> {
    random_incoherent_with(
        &ComplexMatrix::identity(d),
        n_kraus,
        &mut seeded_rng(seed, 0),
    )
}

/// Random incoherent channel in the basis given by the columns of `basis`.
///
/// K_n = sum_i c_{ni} |b_{f_n(i)}><b_i| where each f_n is injective on the
/// indices it keeps, every index is kept by at least one n, and the
/// coefficients are normalized so that sum_n |c_{ni}|^2 = 1.
pub fn random_incoherent_with<R: Rng + ?Sized>(
    basis: &ComplexMatrix,
    n_kraus: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if n_kraus == 0 {
        return Err(Error::InvalidArgument("n_kraus must be at least 1".into()));
    }
    let d = basis.rows();
    let maps: Vec<Vec<usize>> = (0..n_kraus)
        .map(|_| {
            let mut perm: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            perm
        })
        .collect();
    let mut coeffs: Vec<Vec<C64>> = (0..n_kraus)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if n_kraus == 1 || rng.random_bool(0.6) {
                        complex_gaussian(rng)
                    } else {
                        ZERO
                    }
                })
                .collect()
        })
        .collect();
    for i in 0..d {
        if coeffs.iter().all(|c| c[i] == ZERO) {
            let n = rng.random_range(0..n_kraus);
            coeffs[n][i] = complex_gaussian(rng);
        }
        let norm: f64 = coeffs.iter().map(|c| c[i].norm_sqr()).sum::<f64>().sqrt();
        for c in coeffs.iter_mut() {
            c[i] /= norm;
        }
    }
    let kraus = maps
        .iter()
        .zip(&coeffs)
        .map(|(f, c)| {
            let mut m = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                m[(f[i], i)] = c[i];
            }
            m.conjugate_by(basis)
        })
        .collect();
    KrausChannel::new(kraus)
}

/// Random Hermitian operator projected onto the commutant of `k`: only the
/// blocks inside each eigenspace survive.
pub fn commutant_hermitian<R: Rng + ?Sized>(k: &Observable, rng: &mut R) -> ComplexMatrix {
    let d = k.dim();
    let w = k.eigenvectors();
    let h = random_hermitian_with(d, rng).in_basis(w);
    let blocks = eigenspace_blocks(k.eigenvalues());
    let mut block_of = alloc::vec![0usize; d];
    for (b, &(s, e)) in blocks.iter().enumerate() {
        for slot in &mut block_of[s..e] {
            *slot = b;
        }
    }
    let projected = ComplexMatrix::from_fn(d, d, |r, c| {
        if block_of[r] == block_of[c] {
            h[(r, c)]
        } else {
            ZERO
        }
    });
    projected.conjugate_by(w)
}

/// Random K-invariant channel rho_A -> Tr_B[V (rho_A (x) tau_B) V^dagger]
/// with V = exp(i H') commuting with K_A (x) 1 + 1 (x) K_B. Returns the
/// channel in Kraus form together with V.
pub fn k_invariant_channel(
    k_a: &Observable,
    k_b: &Observable,
    tau_b: &DensityMatrix,
    seed: u64,
) -> Result<(KrausChannel, ComplexMatrix)> {
    k_invariant_channel_with(k_a, k_b, tau_b, &mut seeded_rng(seed, 0))
}

pub fn k_invariant_channel_with<R: Rng + ?Sized>(
    k_a: &Observable,
    k_b: &Observable,
    tau_b: &DensityMatrix,
    rng: &mut R,
) -> Result<(KrausChannel, ComplexMatrix)> {
    check_dim(k_b.dim(), tau_b.dim())?;
    let defect = tau_b.matrix().commutator(k_b.matrix()).max_abs();
    if defect > ENVIRONMENT_TOL {
        return Err(Error::NonIncoherentEnvironment { defect });
    }
    let k_tot = Observable::local_sum(k_a, k_b);
    let v = expi_hermitian(&commutant_hermitian(&k_tot, rng), 1.0);
    let deviation = k_tot.matrix().conjugate_by(&v).max_abs_diff(k_tot.matrix());
    if deviation > COMMUTATION_TOL {
        return Err(Error::IdentityViolation {
            what: "V K_tot V^dagger = K_tot",
            deviation,
        });
    }
    let channel = dilated_channel(&v, k_a.dim(), tau_b)?;
    Ok((channel, v))
}

/// Kraus form of rho_A -> Tr_B[V (rho_A (x) tau_B) V^dagger]:
/// K_{lm} = sqrt(t_m) (1 (x) <l|) V (1 (x) |m>), with tau_B = sum t_m |m><m|.
pub fn dilated_channel(
    v: &ComplexMatrix,
    da: usize,
    tau_b: &DensityMatrix,
) -> Result<KrausChannel> {
    let db = tau_b.dim();
    check_dim(da * db, v.rows())?;
    let mut kraus = Vec::new();
    for (m, &t) in tau_b.eigenvalues().iter().enumerate() {
        if t < BRANCH_CUTOFF {
            continue;
        }
        let env = tau_b.eigenvectors().column(m);
        let amp = t.sqrt();
        for l in 0..db {
            kraus.push(ComplexMatrix::from_fn(da, da, |r, c| {
                let mut acc = ZERO;
                for (j, e) in env.iter().enumerate() {
                    acc += v[(r * db + l, c * db + j)] * e;
                }
                acc * amp
            }));
        }
    }
    KrausChannel::new(kraus)
}

/// Tr_B[V (rho_A (x) tau_B) V^dagger] computed directly from the dilation.
pub fn dilated_output(
    v: &ComplexMatrix,
    rho_a: &DensityMatrix,
    tau_b: &DensityMatrix,
) -> Result<DensityMatrix> {
    let joint = rho_a.matrix().kron(tau_b.matrix()).conjugate_by(v);
    DensityMatrix::new(partial_trace_matrix(
        &joint,
        &[rho_a.dim(), tau_b.dim()],
        &[0],
    )?)
}

/// sum_n p_n rho_n (x) |b_n><b_n|, flagging each selective branch with its
/// own basis vector of B.
pub fn classical_encoding(
    channel: &KrausChannel,
    rho_a: &DensityMatrix,
    basis_b: &[Vec<C64>],
) -> Result<DensityMatrix> {
    if basis_b.len() < channel.len() {
        return Err(Error::TooFewFlagStates {
            needed: channel.len(),
            available: basis_b.len(),
        });
    }
    let db = basis_b[0].len();
    let da = channel.dim_out();
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    for branch in channel.apply_selective(rho_a)? {
        let flag = ComplexMatrix::outer(&basis_b[branch.index]);
        acc = &acc
            + &branch
                .state
                .matrix()
                .kron(&flag)
                .scale_real(branch.probability);
    }
    DensityMatrix::new(acc)
}

/// max over group elements U of |E(U rho U^dagger) - U E(rho) U^dagger|.
pub fn covariance_defect(
    channel: &KrausChannel,
    rho: &DensityMatrix,
    group: &GroupRep,
) -> Result<f64> {
    let out = channel.apply_matrix(rho.matrix())?;
    let mut worst = 0.0f64;
    for u in group.elements()? {
        let lhs = channel.apply_matrix(&rho.matrix().conjugate_by(&u))?;
        worst = worst.max(lhs.max_abs_diff(&out.conjugate_by(&u)));
    }
    Ok(worst)
}

/// Permutation matrix times a diagonal of phases: |perm(i)><i| e^{i phi_i}.
pub fn permutation_phase(perm: &[usize], phases: &[f64]) -> Result<ComplexMatrix> {
    check_dim(perm.len(), phases.len())?;
    let d = perm.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, (&p, &phi)) in perm.iter().zip(phases).enumerate() {
        if p >= d {
            return Err(Error::InvalidArgument(
                "permutation index out of range".into(),
            ));
        }
        m[(p, i)] = C64::new(0.0, phi).exp();
    }
    let defect = m.unitarity_defect();
    if defect > crate::operators::UNITARY_TOL {
        return Err(Error::InvalidArgument(
            "index map is not a permutation".into(),
        ));
    }
    Ok(m)
}

/// The discrete Fourier unitary, maximally coherent in the computational
/// basis; a qubit gets the Hadamard gate.
pub fn fourier(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    let w = 2.0 * core::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |r, c| C64::new(0.0, w * (r * c) as f64).exp() * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::computational_basis;
    use crate::measures::skew_information;
    use crate::operators::hadamard;
    use crate::random::{
        haar_pure_with, random_incoherent_state, random_observable_with, random_state_any,
    };

    fn plus() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn identity_channel_leaves_state() {
        let rho = random_state_any(3, &mut seeded_rng(4, 0));
        let out = KrausChannel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn dephasing_plus_gives_maximally_mixed() {
        let out = KrausChannel::dephasing(&Observable::sigma_z())
            .apply(&plus())
            .unwrap();
        assert!(
            out.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-15
        );
    }

    #[test]
    fn selective_sigma_z_on_plus() {
        let branches = KrausChannel::dephasing(&Observable::sigma_z())
            .apply_selective(&plus())
            .unwrap();
        assert_eq!(branches.len(), 2);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
            let expect =
                DensityMatrix::basis_state(2, b.state.matrix()[(1, 1)].re.round() as usize);
            assert!(b.state.matrix().max_abs_diff(expect.matrix()) < 1e-12);
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(matches!(
            KrausChannel::new(alloc::vec![half]),
            Err(Error::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn incoherence_classification() {
        let basis = computational_basis(3);
        let pp = KrausChannel::unitary(permutation_phase(&[2, 0, 1], &[0.3, -1.0, 2.0]).unwrap())
            .unwrap();
        assert!(is_incoherent(&pp, &basis));
        let h = KrausChannel::unitary(hadamard()).unwrap();
        assert!(!is_incoherent(&h, &computational_basis(2)));
        for seed in 0..50 {
            let ch = random_incoherent(4, 1 + (seed as usize % 4), seed).unwrap();
            assert!(is_incoherent(&ch, &computational_basis(4)));
            assert!(ch.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn single_kraus_incoherent_is_permutation_phase() {
        for seed in 0..20 {
            let ch = random_incoherent(3, 1, seed).unwrap();
            let k = &ch.kraus()[0];
            assert!(k.unitarity_defect() < 1e-12);
            for r in 0..3 {
                let nonzero = k.row(r).iter().filter(|z| z.norm() > 1e-12).count();
                assert_eq!(nonzero, 1);
            }
        }
    }

    #[test]
    fn incoherent_inputs_stay_incoherent() {
        let mut rng = seeded_rng(77, 0);
        let k = random_observable_with(3, None, &mut rng).unwrap();
        let basis = k.eigenbasis();
        let ch = random_incoherent_with(k.eigenvectors(), 3, &mut rng).unwrap();
        assert!(is_incoherent(&ch, &basis));
        let rho = random_incoherent_state(&k, &mut rng);
        let out = ch.apply(&rho).unwrap();
        assert!(skew_information(&out, &k).unwrap() < 1e-10);
    }

    #[test]
    fn k_invariant_channel_commutes_and_matches_dilation() {
        let mut rng = seeded_rng(11, 0);
        let ka = Observable::diagonal(&[0.0, 1.0, 2.0]);
        let kb = Observable::diagonal(&[0.0, 1.0]);
        let tau = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let (ch, v) = k_invariant_channel_with(&ka, &kb, &tau, &mut rng).unwrap();
        let k_tot = Observable::local_sum(&ka, &kb);
        assert!(k_tot.matrix().conjugate_by(&v).max_abs_diff(k_tot.matrix()) < 1e-9);
        let rho = haar_pure_with(3, &mut rng);
        let direct = dilated_output(&v, &rho, &tau).unwrap();
        assert!(
            ch.apply(&rho)
                .unwrap()
                .matrix()
                .max_abs_diff(direct.matrix())
                < 1e-12
        );
        let before = skew_information(&rho, &ka).unwrap();
        let after = skew_information(&direct, &ka).unwrap();
        assert!(after <= before + 1e-9);
    }

    #[test]
    fn identity_dilation_is_identity_channel() {
        let tau = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let ch = dilated_channel(&ComplexMatrix::identity(4), 2, &tau).unwrap();
        let rho = plus();
        assert!(ch.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn coherent_environment_rejected() {
        let z = Observable::sigma_z();
        assert!(matches!(
            k_invariant_channel(&z, &z, &plus(), 1),
            Err(Error::NonIncoherentEnvironment { .. })
        ));
    }

    #[test]
    fn classical_encoding_examples() {
        let z = Observable::sigma_z();
        let rho = plus();
        let single =
            classical_encoding(&KrausChannel::identity(2), &rho, &computational_basis(2)).unwrap();
        let expect = rho.tensor(&DensityMatrix::basis_state(2, 0));
        assert!(single.matrix().max_abs_diff(expect.matrix()) < 1e-14);
        let zz = z.embed(&[2, 2], 0).unwrap();
        let s0 = skew_information(&rho, &z).unwrap();
        assert!((skew_information(&single, &zz).unwrap() - s0).abs() < 1e-12);

        let deph_z = KrausChannel::rank_one_measurement(&computational_basis(2)).unwrap();
        let deph = classical_encoding(&deph_z, &rho, &computational_basis(2)).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = C64::new(0.5, 0.0);
        expect[(3, 3)] = C64::new(0.5, 0.0);
        assert!(deph.matrix().max_abs_diff(&expect) < 1e-14);
        assert!(skew_information(&deph, &zz).unwrap().abs() < 1e-12);

        let three = KrausChannel::dephasing(&Observable::diagonal(&[1.0, 2.0, 3.0]));
        assert!(matches!(
            classical_encoding(
                &three,
                &DensityMatrix::maximally_mixed(3),
                &computational_basis(2)
            ),
            Err(Error::TooFewFlagStates {
                needed: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn degenerate_measurement_groups_projectors() {
        let k = Observable::diagonal(&[1.0, 1.0, 2.0]);
        let m = KrausChannel::spectral_measurement(&k);
        assert_eq!(m.len(), 2);
        assert_eq!(
            eigenspace_blocks(&[0.0, 1e-12, 1.0]),
            alloc::vec![(0, 2), (2, 3)]
        );
    }

    #[test]
    fn k_invariant_channels_are_covariant() {
        let mut rng = seeded_rng(5, 0);
        let ka = Observable::diagonal(&[0.0, 1.0, 2.0]);
        let kb = Observable::diagonal(&[0.0, 1.0]);
        let tau = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        let (ch, _) = k_invariant_channel_with(&ka, &kb, &tau, &mut rng).unwrap();
        let rho = random_state_any(3, &mut rng);
        let defect = covariance_defect(&ch, &rho, &GroupRep::phase_group(ka.clone())).unwrap();
        assert!(defect < 1e-9, "{defect}");
        let h = KrausChannel::unitary(fourier(3)).unwrap();
        assert!(covariance_defect(&h, &rho, &GroupRep::phase_group(ka)).unwrap() > 1e-3);
    }
}
