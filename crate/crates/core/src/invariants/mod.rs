//! Ad-invariant polynomials, polarization, Chern forms and Jordan decomposition.

pub mod charpoly;
pub mod chern;
pub mod jordan;
pub mod poly;
pub mod springer;

pub use charpoly::{berkowitz, determinant, e_k, elementary_all, elementary_symmetric, Ring};
pub use chern::{chern_factor, chern_form, chern_form_at_identity, chern_weil_form, identity_curvature_form};
pub use jordan::{jordan_decompose, jordan_decompose_exact, jordan_residuals, JordanPair, QMat, QPoly};
pub use poly::{InvariantPolynomial, PolyKind};
pub use springer::{random_commuting_pair, springer_check, springer_check_exact, springer_report, LemmaReport};
