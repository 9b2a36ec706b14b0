//! Representations of K, the Harish-Chandra factorization, Cayley elements, the
//! canonical extension λ₁ and automorphy factors.

pub mod automorphy;
pub mod harish_chandra;
pub mod rep;

pub use automorphy::AutomorphyFactor;
pub use harish_chandra::{
    cayley_element, cayley_on_pairs, extension_compat_check, hc_decompose, hc_decompose_jet, j_factor,
    CanonicalExtension, CompatReport, HcDecomposition,
};
pub use rep::{matrix_from_json, matrix_to_json, RepKind, Representation};
