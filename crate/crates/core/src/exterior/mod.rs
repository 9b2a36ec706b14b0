//! Exterior calculus on charts with End(V)-valued forms.

pub mod charts;
pub mod form;
pub mod pifiber;
pub mod quadrature;
pub mod smooth;

pub use charts::{pullback_connection, Chart, SectionFn};
pub use form::{curvature_form, multi_indices, patch_combination_curvature, CoeffFn, PatchReport, VForm};
pub use pifiber::{pifiber_check, pullback_values, Incidence, PiFiberFamily, PiFiberReport, Stratum};
pub use quadrature::{gauss_legendre, integrate_p1};
pub use smooth::{JetFn, PlainFn, Poly, SmoothMap};

#[cfg(test)]
mod tests;
