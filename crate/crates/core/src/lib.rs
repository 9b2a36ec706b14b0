//! Chern–Weil forms of invariant, parabolically induced and patched connections on
//! homogeneous bundles over Hermitian symmetric spaces, with the supporting Lie
//! theory, exterior calculus, stratified partitions of unity and Schubert calculus.

pub mod compact_dual;
pub mod connections;
pub mod error;
pub mod exterior;
pub mod hc;
pub mod invariants;
pub mod jet;
pub mod lie;
pub mod linalg;
pub mod strata;
pub mod suite;

pub use error::{Error, Result};
