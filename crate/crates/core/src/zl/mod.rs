//! Finitely generated `Z_l`-modules and inverse limits of `l`-adic towers.

mod compare;
mod limit;
mod module;

pub use compare::{comparison_check, tensor_zl, CohomologyTowerInput, ComparisonReport};
pub use limit::{
    ladic_iff_torsionfree, limit, rank_ql, to_tower, to_tower_with_horizon, TorsionCriterion,
};
pub use module::{parse_zl_module, ZlModule};
