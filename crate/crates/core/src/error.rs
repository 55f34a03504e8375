use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not Hermitian: max |A - A^dagger| = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },
    #[error("trace is not one: |Tr - 1| = {defect:e} exceeds {tolerance:e}")]
    NotUnitTrace { defect: f64, tolerance: f64 },
    #[error(
        "not positive semidefinite: minimum eigenvalue {min_eigenvalue:e} below {tolerance:e}"
    )]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },
    #[error("not unitary: max |U^dagger U - 1| = {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("vector is not normalized: |n| = {norm}")]
    NotUnitVector { norm: f64 },
    #[error("Gell-Mann basis needs d >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("exponent p = {0} outside (0, 1)")]
    ExponentOutOfRange(f64),
    #[error("rank {rank} outside 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("subsystem index {site} out of range for {count} subsystems")]
    SiteOutOfRange { site: usize, count: usize },
    #[error("spectrum has no two distinct entries; minimization is trivially zero")]
    DegenerateSpectrum,
    #[error("group representation has no elements")]
    EmptyGroup,
    #[error("Kraus set is not complete: max |sum K^dagger K - 1| = {defect:e}")]
    IncompleteKraus { defect: f64 },
    #[error("environment state does not commute with its charge: max |[tau, K]| = {defect:e}")]
    NonIncoherentEnvironment { defect: f64 },
    #[error("need {needed} flag states, got {available}")]
    TooFewFlagStates { needed: usize, available: usize },
    #[error("ancilla polarization Tr[alpha sigma_z] = {0:e} gives zero sensitivity")]
    ZeroSensitivityAncilla(f64),
    #[error("phase t must be non-zero")]
    ZeroPhase,
    #[error("ancilla is not an element of the measurement basis (overlap defect {0:e})")]
    AncillaNotBasisElement(f64),
    #[error("S-value table is incomplete: {0}")]
    IncompleteTable(String),
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("unknown property suite '{0}'")]
    UnknownSuite(String),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("simulated identity violated: {what} deviates by {deviation:e}")]
    IdentityViolation { what: &'static str, deviation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
