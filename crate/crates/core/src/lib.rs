//! High-precision evaluation of the MRB constant and of the oscillatory
//! integral M_I = lim ∫₁^{2N} e^{iπx} x^{1/x} dx.

pub mod error;
pub mod fichtenholz;
pub mod integrand;
pub mod inverse_em;
pub mod mi;
pub mod precision;
pub mod quadrature;
pub mod series_accel;

pub use error::{Error, Result};
pub use precision::{Complex, PrecisionContext, Real};
