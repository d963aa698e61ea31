//! Error type shared by every stage of the pipeline.

use alloc::boxed::Box;
use core::fmt;

use crate::solver::SolveDiagnostics;

/// Errors produced by construction, assembly, solving and reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition
    /// (non-finite value, empty set, shape mismatch, ...).
    InvalidArgument(&'static str),
    /// A kernel or potential was evaluated at a point where it is singular
    /// (for example the Green's function at zero distance).
    Singularity(&'static str),
    /// A quantity that must be divided by vanished (for example the norm of
    /// an identically zero reference potential).
    DivisionByZero(&'static str),
    /// Gaussian elimination met an exactly zero pivot column; the matrix is
    /// numerically singular. `pivot_step` is the elimination step (0-based)
    /// at which every remaining candidate pivot was zero.
    SingularSystem {
        /// Elimination step at which the pivot search failed.
        pivot_step: usize,
    },
    /// The regularized iteration exhausted its step budget without meeting
    /// the discrepancy stopping rule. Carries the diagnostics of the failed
    /// run so callers can inspect the discrepancy history.
    NonConvergence(Box<SolveDiagnostics>),
    /// No candidate wavenumber produced an acceptably conditioned amplitude
    /// matrix.
    NoAdmissibleWavenumber,
    /// An error raised while processing one member of a wavenumber sweep,
    /// tagged with the offending wavenumber.
    AtWavenumber {
        /// The wavenumber whose forward or inverse solve failed.
        k: f64,
        /// The underlying failure.
        inner: Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Singularity(msg) => write!(f, "singular evaluation: {msg}"),
            Error::DivisionByZero(msg) => write!(f, "division by zero: {msg}"),
            Error::SingularSystem { pivot_step } => write!(
                f,
                "numerically singular system: zero pivot at elimination step {pivot_step}"
            ),
            Error::NonConvergence(diag) => write!(
                f,
                "regularized iteration did not reach the discrepancy target: \
                 {} steps, final discrepancy {:.6e}, final epsilon {:.6e}",
                diag.steps_taken, diag.final_discrepancy, diag.final_epsilon
            ),
            Error::NoAdmissibleWavenumber => {
                write!(f, "no candidate wavenumber is acceptably conditioned")
            }
            Error::AtWavenumber { k, inner } => {
                write!(f, "at wavenumber k = {k}: {inner}")
            }
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::AtWavenumber { inner, .. } => Some(inner),
            _ => None,
        }
    }
}
