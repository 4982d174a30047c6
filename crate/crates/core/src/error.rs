//! Error type shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the declared domain (mismatched cutoffs, negative
    /// energies, evaluation outside the transformed region, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A named field of a model or scenario failed validation.
    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, required {required:.3e}")]
    Convergence { achieved: f64, required: f64 },

    /// The oscillatory double integral did not converge; carries the best
    /// estimate and its error bar so callers can still inspect it.
    #[error(
        "oscillatory integral did not converge: best {best} with error bar {error_bar:.3e} (required {required:.3e})"
    )]
    OscillatoryConvergence {
        best: Complex64,
        error_bar: f64,
        required: f64,
    },

    /// Boundary sampling of the argument-principle contour failed to
    /// stabilize, usually because a zero or pole sits on or very near it.
    #[error("winding number did not stabilize: {0}")]
    BoundaryUnresolved(String),

    /// The residue circle quadrature failed to converge at the given radius.
    #[error("residue integration did not converge at radius {radius:.3e} (last change {last_change:.3e})")]
    RadiusInvalid { radius: f64, last_change: f64 },

    /// Rational continuation stagnated above its target residual.
    #[error("rational approximation stagnated at residual {achieved:.3e} (target {target:.3e})")]
    ApproximationFailed { achieved: f64, target: f64 },

    /// Rectangle subdivision ran out of depth before isolating every pole.
    /// Carries what was resolved and the regions that were not.
    #[error("pole subdivision exhausted: {} pole(s) resolved, {} region(s) left", found.len(), unresolved.len())]
    SubdivisionExhausted {
        found: Vec<crate::cpoles::PoleLocation>,
        unresolved: Vec<crate::cpoles::SearchRectangle>,
    },

    /// Decay-fit input did not satisfy its preconditions.
    #[error("fit input error: {0}")]
    FitInput(String),

    /// A physical model was inconsistent (ordering violated, no pole found
    /// in the search window, ...).
    #[error("model error: {0}")]
    Model(String),

    /// Two internal routes that must agree did not.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}
