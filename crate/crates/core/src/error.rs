use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HeunError>;

/// Failure modes of the evaluators.
///
/// `NonConvergence` and `PathTooClose` carry the term count and error
/// indicator accumulated up to the failing step, so callers can report how
/// far the computation got.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeunError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{z} is outside the convergence disc of radius {radius}")]
    DomainError { z: Complex64, radius: f64 },

    #[error("series at {at} did not terminate within {max_terms} terms")]
    NonConvergence {
        at: Complex64,
        max_terms: usize,
        n_terms: usize,
        r: f64,
    },

    #[error("continuation step at {at} collapsed (radius {radius:e})")]
    PathTooClose {
        at: Complex64,
        radius: f64,
        n_terms: usize,
        r: f64,
    },

    #[error("{z} is a singular point of the equation")]
    SingularPoint { z: Complex64 },

    #[error("{z} lies on a branch cut")]
    OnCut { z: Complex64 },

    #[error("matching system is ill-conditioned (|det| = {det:e}, scale = {scale:e})")]
    IllConditioned { det: f64, scale: f64 },

    #[error("residual estimate unreliable near q = alpha*beta*z")]
    NearApexLoss,

    #[error("invalid path: {0}")]
    InvalidPath(String),
}

impl HeunError {
    /// Adds work done before the failing step to the diagnostics.
    pub(crate) fn accumulate(self, extra_terms: usize, extra_r: f64) -> Self {
        match self {
            HeunError::NonConvergence {
                at,
                max_terms,
                n_terms,
                r,
            } => HeunError::NonConvergence {
                at,
                max_terms,
                n_terms: n_terms + extra_terms,
                r: r + extra_r,
            },
            HeunError::PathTooClose {
                at,
                radius,
                n_terms,
                r,
            } => HeunError::PathTooClose {
                at,
                radius,
                n_terms: n_terms + extra_terms,
                r: r + extra_r,
            },
            other => other,
        }
    }

    /// Short machine-readable name, used by the CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            HeunError::InvalidParams(_) => "invalid_params",
            HeunError::DomainError { .. } => "domain_error",
            HeunError::NonConvergence { .. } => "non_convergence",
            HeunError::PathTooClose { .. } => "path_too_close",
            HeunError::SingularPoint { .. } => "singular_point",
            HeunError::OnCut { .. } => "on_cut",
            HeunError::IllConditioned { .. } => "ill_conditioned",
            HeunError::NearApexLoss => "near_apex_loss",
            HeunError::InvalidPath(_) => "invalid_path",
        }
    }
}
