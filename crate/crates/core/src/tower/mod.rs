//! Projective systems of finite `l`-groups and their morphisms.

mod form;
mod hom;
mod ops;
mod predicates;
mod system;

pub use form::{EventualForm, Piece};
pub use hom::{HomRule, TowerHom};
pub use ops::{
    direct_sum, hom_direct_sum, levelwise_cokernel, levelwise_image, levelwise_kernel, mod_power,
    mod_power_projection, natural_map, shift, stable_image, stable_image_corestriction, truncation,
    truncation_projection, SumTower,
};
pub use predicates::{
    default_bound, is_l_adic, is_zero_system, level_length, LAdicCert, LAdicFailure, LAdicVerdict,
    LAdicWitness, Verdict, ZeroCertificate, ZeroVerdict, ZeroWitness,
};
pub use system::{TailRule, Tower};

pub(crate) use system::{l_power, tag};
