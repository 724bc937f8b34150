use thiserror::Error;

/// Failures raised by the graph model, the solvers and the verification code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex endpoint lists overlap at endpoint {0}")]
    OverlappingEndpoints(usize),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("vertex block {0} is not unitary (defect {1:.3e})")]
    NonUnitaryBlock(usize, f64),
    #[error("coupling matrix is not unitary (defect {0:.3e})")]
    NonUnitary(f64),
    #[error(
        "MinusOneInSpectrum: the coupling matrix U has an eigenvalue within {distance:.3e} of -1 \
         (Dirichlet, standard and delta-type couplings are not supported)"
    )]
    MinusOneInSpectrum { distance: f64 },
    #[error("Hermitian coupling input is not Hermitian (defect {0:.3e})")]
    NonHermitianInput(f64),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("integrator could not meet tolerance {tol:.1e} at x = {x} (step size underflow)")]
    ToleranceNotMet { tol: f64, x: f64 },
    #[error("tolerance {0:e} is outside the supported range (1e-14, 1e-3)")]
    BadTolerance(f64),
    #[error("wavenumber k = 0 is not allowed for asymptotic formulas")]
    ZeroWavenumber,
    #[error(
        "k = {k} lies in a forbidden region: |sin(k l_{edge})| = {sine:.3e} is below the margin"
    )]
    ForbiddenRegion { k: f64, edge: usize, sine: f64 },
    #[error("epsilon {epsilon} exceeds the admissible bound {bound}")]
    EpsilonTooLarge { epsilon: f64, bound: f64 },
    #[error("a zero of the secular function lies too close to the contour (|phi| = {residual:.3e} near k = {at})")]
    BoundaryTooClose { at: String, residual: f64 },
    #[error(
        "contour quadrature did not converge (estimated error {error:.3e}, tolerance {tol:.3e})"
    )]
    QuadratureNotConverged { error: f64, tol: f64 },
    #[error("integrand has a pole on the contour near {0}")]
    PoleOnPath(String),
    #[error(
        "CountMismatch: found {found} eigenvalues below level {level}, Weyl count is {expected}"
    )]
    CountMismatch {
        found: usize,
        expected: usize,
        level: f64,
    },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("sin(k l) vanishes at k = {0}")]
    SineZero(f64),
    #[error("residue kind {kind} is not defined for n = {n}")]
    IncompatibleIndex { kind: char, n: i64 },
    #[error(
        "CommensurateResonance: sin(n pi l_{other} / l_{edge}) vanishes for n = {n}; use the cluster form"
    )]
    CommensurateResonance { edge: usize, other: usize, n: u64 },
    #[error("root refinement failed: {0}")]
    RootNotConverged(String),
    #[error("invalid level sequence: {0}")]
    InvalidLevels(String),
    #[error("contour level {0} is too large: secular values would overflow")]
    LevelTooLarge(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
