//! Cohomology of compact duals (projective spaces and Grassmannians) by Schubert calculus.

pub mod chern;
pub mod lr;
pub mod schubert;

pub use chern::{
    chern_class, chern_number, generation_check, generation_check_with, tangent_chern, total_chern, Bundle, ChernMonomial,
    GenerationReport, Space,
};
pub use lr::{lr_coefficient, lr_product};
pub use schubert::{
    integrate_class, multiply_by_sigma, partitions_in_box, pieri_multiply, power, ring_multiply, BoxPartition,
    Grassmannian, SchubertClass,
};
