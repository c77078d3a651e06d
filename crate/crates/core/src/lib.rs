//! Scalar-field modes, particle creation and continuous-variable
//! teleportation fidelity on expanding FRW backgrounds.

// Coefficients and oracle values are kept at their published precision;
// `!(x < y)` is used on purpose so NaN fails validation.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod bogoliubov;
pub mod fidelity;
pub mod gaussian;
pub mod modes;
pub mod ode;
pub mod specfun;

pub use num_complex::Complex64;

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Background(#[from] background::BackgroundError),
    #[error(transparent)]
    SpecialFunction(#[from] specfun::SpecialFunctionError),
    #[error(transparent)]
    Mode(#[from] modes::ModeError),
    #[error(transparent)]
    Bogoliubov(#[from] bogoliubov::BogoliubovError),
    #[error(transparent)]
    Fidelity(#[from] fidelity::FidelityError),
    #[error(transparent)]
    Gaussian(#[from] gaussian::GaussianError),
}
