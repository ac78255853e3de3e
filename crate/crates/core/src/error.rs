use thiserror::Error;

/// Errors raised by profile validation and the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("profile parse error: {0}")]
    Parse(String),

    #[error("x = {x} lies outside the profile interval ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("x = {y} is a jump location; request a one-sided value instead")]
    AtJump { y: f64 },

    #[error("integral of alpha is not finite")]
    NonFiniteAlpha,

    #[error("jump ratio must be positive, got {0}")]
    NonPositiveGamma(f64),

    #[error("derivative of grid alpha requested at x = {0}, which needs a one-sided difference")]
    BoundaryPoint(f64),

    #[error("series order {0} is too large for the factorial bound")]
    OrderOverflow(usize),

    #[error("evaluation produced a non-finite value")]
    NonFiniteResult,

    #[error("at least {min} steps are required, got {got}")]
    StepCountTooSmall { got: usize, min: usize },

    #[error("Verblunsky coefficient r = {r} at index {index} is outside (-1, 1); increase n")]
    VerblunskyOutOfRange { index: usize, r: f64 },

    #[error("Cosh vanishes; Sech and Tanh are undefined")]
    CoshZero,

    #[error("matrix determinant {0} differs from 1 beyond tolerance")]
    DetNotOne(f64),

    #[error("the (a, b) splitting is undefined at sigma = 0")]
    SigmaZero,

    #[error("step solution requires alpha = 0 on every segment")]
    NonStepProfile,

    #[error("profile has impedance jumps; the S-matrix needs an absolutely continuous impedance")]
    HasJumps,

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("explicit expansion supports n <= {max}, got {n}")]
    NTooLargeForExplicit { n: usize, max: usize },

    #[error("polynomial winds {0} times around the origin on the unit circle")]
    WindingNonzero(i64),

    #[error("Im sigma = {im} is below the reconstruction threshold {delta}")]
    TooCloseToAxis { im: f64, delta: f64 },

    #[error("modulus sample {value} at sigma = {sigma} is not positive")]
    NonPositiveModulus { sigma: f64, value: f64 },

    #[error("step size {0} underflowed")]
    StepUnderflow(f64),

    #[error("contraction needs more than {cap} sub-intervals")]
    ContractionUnachievable { cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
