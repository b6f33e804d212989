//! ℝ/ℤ-valued pairings between K-theory with circle coefficients and
//! geometric K-homology on a catalog of model manifolds.

pub mod circlevals;
pub mod error;
pub mod eta;
pub mod forms;
pub mod pairing;
pub mod spectra;
pub mod spectral_flow;

pub use circlevals::{circle_add, circle_eq, reduce_mod_z, CircleValue, Scalar};
pub use error::{Error, Result};
