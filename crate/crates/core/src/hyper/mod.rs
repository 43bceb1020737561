//! Hypernatural indices and the functors `Υ_h`, `Ψ_h`.

mod nat;
mod upsilon;

pub use nat::{HnOrdering, HyperNat};
pub use upsilon::{
    check_right_exact, faithfulness_check, independence_check, phi_iso, psi, star_tower, upsilon,
    upsilon_mor, upsilon_with_bound, Faithfulness, PhiIso, StarLevel, UpsilonMor, UpsilonObj,
};
