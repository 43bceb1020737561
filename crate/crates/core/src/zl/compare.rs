use std::collections::BTreeMap;

use serde::Serialize;

use super::limit::limit;
use super::module::ZlModule;
use crate::arcat::canonical_l_adic;
use crate::error::{Error, Result};
use crate::hyper::{psi, upsilon_with_bound, HyperNat, UpsilonObj};
use crate::tower::{shift, stable_image, truncation, Tower};

/// `Υ_h F ⊗ Z_l`: the limit of `Ψ_h Υ_h F`.
pub fn tensor_zl(u: &UpsilonObj) -> Result<ZlModule> {
    limit(&psi(u))
}

/// Cohomology towers `(H^i(Z/l^{n+1}))_n` by degree, supplied as data.
#[derive(Clone, Debug, Default)]
pub struct CohomologyTowerInput {
    pub degrees: BTreeMap<usize, Tower>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub degree: usize,
    /// Through the image over a larger gap, then `⊗ Z_l`.
    pub left: ZlModule,
    /// Limit of the canonical `l`-adic replacement.
    pub right: ZlModule,
    pub isomorphic: bool,
}

/// Extra Mittag-Leffler gap used for the image side.
const GAP: usize = 2;

/// Compares `im(H^i(Z/l^{d1+d2}) → H^i(Z/l^{d1})) ⊗ Z_l` with `H^i(Z_l)`, operators included.
pub fn comparison_check(
    input: &CohomologyTowerInput,
    degree: usize,
    bound: usize,
) -> Result<ComparisonReport> {
    let tower = input
        .degrees
        .get(&degree)
        .ok_or_else(|| Error::PreconditionViolated {
            context: format!("no tower for degree {degree}"),
        })?;
    let h: HyperNat = "h".parse()?;
    let c = canonical_l_adic(tower, bound)?;
    let right = limit(&c.g)?;
    // the image over an infinite gap is the stable image; take it past the ML bound
    let left = if c.offset == 0 && c.ml_bound == 0 {
        tensor_zl(&upsilon_with_bound(tower, &h, bound)?)?
    } else {
        let (wide, _) = stable_image(tower, c.ml_bound + GAP)?;
        limit(&truncation(&shift(&wide, c.offset)?)?)?
    };
    Ok(ComparisonReport {
        degree,
        isomorphic: left.same_canonical_form(&right),
        left,
        right,
    })
}
