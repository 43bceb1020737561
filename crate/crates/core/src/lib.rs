//! Artin–Rees `l`-adic systems over finite abelian groups.
//!
//! The crate is layered bottom-up:
//!
//! * [`abelian`]: integer matrices, Smith form, finite abelian groups and homs.
//! * [`tower`]: projective systems `(F_n, u_n)` with certified tails.
//! * [`arcat`]: morphisms up to shift, stable images, canonical `l`-adic replacement.
//! * [`hyper`]: symbolic hypernatural indices and the functors `Υ_h`, `Ψ_h`.
//! * [`zl`]: finitely generated `Z_l`-modules, inverse limits, cohomology-tower checks.
//! * [`gen`] and [`suites`]: seeded instance generators and property suites.

pub mod abelian;
pub mod arcat;
pub mod error;
pub mod gen;
pub mod hyper;
pub mod suites;
pub mod tower;
pub mod zl;

pub use error::{Error, Result};

/// Trial-division primality test; primes here are small.
pub fn is_prime(l: u64) -> bool {
    l >= 2
        && (2..)
            .take_while(|d| d * d <= l)
            .all(|d| !l.is_multiple_of(d))
}
