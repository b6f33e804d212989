//! Exterior calculus on catalog manifolds and the Chern–Weil layer.

mod bundle;
mod form;
mod k1;
mod manifold;
mod maps;
mod spectral;

pub use bundle::{ch_bundle, todd_form, BundleData};
pub use form::{Form, GridData, Monomial, DEFAULT_GRID};
pub use k1::{
    exactness_residual, odd_ch, odd_ch_coefficient, transgression, transgression_triple, K1Element, Unitary,
    UnitaryHomotopy, MIN_HOMOTOPY_STEPS, UNITARY_TOLERANCE,
};
pub use manifold::{ModelManifold, Slot};
pub use maps::{pullback, CatalogMap};
