use num_complex::Complex64;
use thiserror::Error;

/// Errors produced while building or evaluating Bergman-kernel objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BergmanError {
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point {0} lies outside the domain")]
    OutsideDomain(Complex64),

    #[error("point {z} is within {margin} of the boundary (distance {distance:e})")]
    MarginViolation {
        z: Complex64,
        margin: f64,
        distance: f64,
    },

    #[error("points are disconnected on the grid at step {step}")]
    DisconnectedAtResolution { step: f64 },

    #[error("kernel underflow at {0}")]
    Underflow(Complex64),

    #[error("ill-conditioned basis: metric coefficient {g:e} at {z}")]
    IllConditioned { z: Complex64, g: f64 },

    #[error("kernel K(z,p) nearly vanishes at z = {z}: relative size {ratio:e}")]
    NearKernelZero { z: Complex64, ratio: f64 },

    #[error("Newton inversion failed for w = {0}")]
    InversionFailure(Complex64),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("branch cut: map {map} is not defined at {z}")]
    Branch { map: String, z: Complex64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
}

pub type Result<T> = std::result::Result<T, BergmanError>;
