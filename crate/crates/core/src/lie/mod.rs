//! Classical matrix groups and algebras with Cartan and parabolic decompositions.

pub mod cartan;
pub mod expm;
pub mod group;
pub mod parabolic;

pub use cartan::{cartan_split, CartanSplit};
pub use expm::{exp_grp, expm, log_alg, logm};
pub use group::{bracket, AlgElem, Family, GroupSpec, GrpElem, LieAlgebra, ScalarKind};
pub use parabolic::{Flag, IsotropicFrame, ParabolicData};
