//! Variational R-matrix solver for one-dimensional quantum barrier transmission.
//!
//! The inner region [a, b] is expanded in a cosine basis χᵢ(x) = cos(κᵢx); imposing a
//! logarithmic derivative λ(b) turns the stationarity condition into a generalized
//! eigenproblem whose boundary matrices are rank one, so the solve reduces to one LU
//! factorization per λ(b). Two independent inner solutions are matched to plane waves
//! in the outer regions, yielding reflection and transmission coefficients. The
//! `oracles` module provides independent ground truth: closed forms for the bell-shaped
//! and Eckart barriers, an adaptive Runge-Kutta integration reference for any profile,
//! and an exact matched-pair formula for analytically known solution pairs.
//!
//! Atomic units throughout: m = ħ = 1, energies in hartree, lengths in bohr, so the
//! Schrödinger equation reads ψ″ = −2(E − V)ψ and k = √(2(E − V)).

#![no_std]
// Float validations use negated comparisons (e.g. `!(a < b)`) so NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basis;
pub mod linalg;
pub mod oracles;
pub mod potentials;
pub mod solver;

pub use basis::{BasisSet, EnergyMatrices, QuadratureSpec, VariationalSystem};
pub use potentials::{PotentialProfile, ScatteringSetup};
pub use solver::{ChannelAmplitudes, InnerSolution, TunnelingResult};

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Everything that can go wrong across the solver pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation argument violates its documented constraint.
    InvalidArgument(String),
    /// Basis construction rejected the κ list (ordering, duplicates, size).
    InvalidBasis(String),
    /// Scattering window or energy violates a precondition (a ≥ b, nonfinite values).
    InvalidSetup(String),
    /// E does not exceed an outer-region constant, so a plane-wave channel is closed.
    ClosedChannel { e: f64, v_outer: f64 },
    /// Sampled-profile evaluation outside the knot range.
    SampledDomain { x: f64, lo: f64, hi: f64 },
    /// Panel doubling hit its cap before matrix entries stabilized to tolerance.
    QuadratureNotConverged { residual: f64, tol: f64 },
    /// M = A + λ(b)·v_b v_bᵀ could not be solved; a perturbed λ(b) usually resolves it.
    SingularSystem { lambda_b: f64 },
    /// v_aᵀw vanished: ψ(a) has no component along the boundary vector.
    DegenerateBoundary,
    /// The two inner solutions produced a vanishing matching determinant;
    /// choose a different λ̃(b).
    DependentSolutions,
    /// Closed-form formula evaluated outside its validity domain.
    FormulaDomain(String),
    /// The adaptive integrator could not meet the requested tolerance.
    AccuracyNotReached { achieved: f64, requested: f64 },
    /// A quadratic-form normalization (cᵀRm c) was zero or negative.
    DegenerateNorm,
    /// Error wrapped with pipeline context: which stage, and which λ(b) if relevant.
    Stage {
        stage: &'static str,
        lambda_b: Option<f64>,
        source: Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidBasis(msg) => write!(f, "invalid basis: {msg}"),
            Error::InvalidSetup(msg) => write!(f, "invalid setup: {msg}"),
            Error::ClosedChannel { e, v_outer } => write!(
                f,
                "closed channel: E = {e} does not exceed outer constant {v_outer}"
            ),
            Error::SampledDomain { x, lo, hi } => {
                write!(f, "sampled profile evaluated at x = {x} outside [{lo}, {hi}]")
            }
            Error::QuadratureNotConverged { residual, tol } => write!(
                f,
                "quadrature refinement stalled at residual {residual:.3e} (tolerance {tol:.3e})"
            ),
            Error::SingularSystem { lambda_b } => write!(
                f,
                "linear system singular at λ(b) = {lambda_b}; retry with a perturbed λ(b), e.g. {}",
                lambda_b + 0.5
            ),
            Error::DegenerateBoundary => {
                write!(f, "v_aᵀw = 0: inner solution vanishes at the left boundary")
            }
            Error::DependentSolutions => write!(
                f,
                "matching determinant vanished: the two inner solutions are dependent; \
                 choose a different λ̃(b)"
            ),
            Error::FormulaDomain(msg) => write!(f, "closed form outside validity domain: {msg}"),
            Error::AccuracyNotReached { achieved, requested } => write!(
                f,
                "integrator reached error {achieved:.3e}, requested {requested:.3e}"
            ),
            Error::DegenerateNorm => write!(f, "zero norm in quadratic-form average"),
            Error::Stage {
                stage,
                lambda_b,
                source,
            } => match lambda_b {
                Some(l) => write!(f, "{stage} (λ(b) = {l}): {source}"),
                None => write!(f, "{stage}: {source}"),
            },
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Stage { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

impl Error {
    /// Wrap with the pipeline stage (and λ(b) where meaningful) that produced it.
    pub fn at_stage(self, stage: &'static str, lambda_b: Option<f64>) -> Error {
        Error::Stage {
            stage,
            lambda_b,
            source: Box::new(self),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
