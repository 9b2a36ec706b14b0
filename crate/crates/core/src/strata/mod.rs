//! Control data on flags of strata, partitions of unity and patched connections.

pub mod bump;
pub mod model;
pub mod patch;
pub mod sp4;

pub use bump::BumpProfile;
pub use model::{
    chain_factors, chain_weights, factor_value, family_vanishing_check, localize_stratum, partition_weight,
    partition_weights, start_factor, t_weight, weight_jet, Chain, ChainWeight, ControlData, EpsilonFamily, Forest,
    FlagTubeModel, ModelJson, StratumJson, VanishingReport, WeightFactor,
};
pub use patch::{assemble_all, assemble_patched, chain_closed_form, localized_form, PatchAlgebra, ToyAlgebra, ToyForm};
pub use sp4::{patch_report, PatchedForm, Sp4Model, Sp4PatchReport};
