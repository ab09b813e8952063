//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state validation, decompositions, and numerics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A covariance matrix has a symplectic eigenvalue below the vacuum floor.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// A covariance matrix is not symmetric within tolerance.
    #[error("asymmetric covariance matrix: max |V - V^T| = {0:.3e}")]
    AsymmetricCov(f64),

    /// Mismatched or invalid dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An iterative eigenproblem failed to converge.
    #[error("eigenproblem did not converge")]
    NonConvergent,

    /// Matrix condition number too large for a reliable decomposition.
    #[error("ill-conditioned matrix: condition number {0:.3e}")]
    IllConditioned(f64),

    /// A scalar argument is outside its documented range.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// The overlap matrix Sigma_s is numerically singular.
    #[error("singular overlap matrix Sigma_s")]
    SingularSigma,

    /// Gibbs matrix undefined: some mode is pure (nu <= 1/2).
    #[error("singular Gibbs matrix: symplectic eigenvalue {0} at the vacuum floor")]
    SingularGibbs(f64),

    /// Relative entropy evaluated to a negative value beyond tolerance.
    #[error("relative entropy {0:.3e} is negative beyond tolerance: numerical failure")]
    NegativeRelativeEntropy(f64),

    /// Link-budget conversion left the high-loss regime (kappa >= 1).
    #[error("not in high-loss regime: kappa = {0}")]
    NotInHighLossRegime(f64),

    /// Exponent fit rejected: the kappa grid is not deep enough in the linear regime.
    #[error("curvature too large in exponent fit: quadratic/linear ratio {0:.3e}")]
    CurvatureTooLarge(f64),

    /// The Fock cutoff cannot represent the requested state or channel.
    #[error("Fock cutoff too small: {0}")]
    CutoffTooSmall(String),

    /// The support of rho0 is not contained in the support of rho1.
    #[error("support mismatch: mass {0:.3e} of rho0 outside supp(rho1)")]
    SupportMismatch(f64),

    /// A special-function argument is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
