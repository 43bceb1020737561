//! Exact integer linear algebra and the category of finite abelian groups.

mod group;
mod hom;
mod matrix;
mod snf;

pub use group::{canonicalize, present, Element, FinAbGroup, Presentation};
pub use hom::{direct_sum, hom_direct_sum, is_exact_at, quotient_by_integer, DirectSum, GroupHom};
pub use matrix::IntMatrix;
pub use snf::{
    invariant_factors_by_minors, kernel_lattice, row_hermite, smith_normal_form, solve_integer,
    Smith,
};
