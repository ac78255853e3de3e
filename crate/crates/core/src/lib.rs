//! Explicit solutions of the impedance-form Schrödinger (Helmholtz) equation
//! `(ζ u′)′ + σ² ζ u = 0` through the harmonic exponential operator.

pub mod acceptance;
pub mod error;
pub mod fixtures;
pub mod hexp;
pub mod numerics;
pub mod opuc;
pub mod oracle;
pub mod outer;
pub mod profile;
pub mod scattering;
pub mod study;
pub mod su11;
pub mod transfer;

pub use error::{Error, Result};
pub use hexp::{Evaluator, HexpValue, HyperbolicSet, Method};
pub use num_complex::Complex64;
pub use profile::{jump_matrix, AlphaSpec, ImpedanceProfile, JumpPoint, Segment, Side};
pub use su11::Su11Matrix;
