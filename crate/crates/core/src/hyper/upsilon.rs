//! `Υ_h`, `Ψ_h` and `φ` on normal forms.
//!
//! `Υ_h F` is represented by its canonical `l`-adic replacement `G` together with
//! the symbolic index `h-1`: for finite `k` its quotient by `l^k` is `G_{k-1}`,
//! which is all the external information the construction carries.

use serde::{Deserialize, Serialize};

use super::nat::HyperNat;
use crate::abelian::{is_exact_at, quotient_by_integer, FinAbGroup};
use crate::arcat::{
    ar_compose, ar_equal, ar_is_isomorphism, canonical_l_adic, ARMor, CanonicalLAdic,
};
use crate::error::{Error, Result};
use crate::tower::{
    default_bound, is_zero_system, l_power, levelwise_cokernel, levelwise_kernel, shift,
    stable_image, truncation, HomRule, Tower, TowerHom, Verdict,
};
use crate::zl::{limit, ZlModule};

/// Level `index` of the star extension of an `l`-adic tower.
#[derive(Clone, Debug)]
pub struct StarLevel {
    base: Tower,
    index: HyperNat,
}

impl StarLevel {
    pub fn new(base: &Tower, index: HyperNat) -> Self {
        StarLevel {
            base: base.clone(),
            index,
        }
    }

    pub fn base(&self) -> &Tower {
        &self.base
    }

    pub fn index(&self) -> &HyperNat {
        &self.index
    }

    /// The group itself, when the index is finite.
    pub fn resolve(&self) -> Result<Option<FinAbGroup>> {
        match self.index.as_finite() {
            Some(n) => Ok(Some(self.base.level(n as usize)?)),
            None => Ok(None),
        }
    }

    /// Quotient by `l^k`: `G_{k-1}` at an infinite index.
    pub fn quotient(&self, k: usize) -> Result<FinAbGroup> {
        if let Some(g) = self.resolve()? {
            return Ok(quotient_by_integer(&g, &l_power(self.base.l(), k)).0);
        }
        if k == 0 {
            return FinAbGroup::trivial().with_prime(self.base.l());
        }
        self.base.level(k - 1)
    }
}

/// `Υ_h F`, an object killed by `l^h`.
#[derive(Clone, Debug)]
pub struct UpsilonObj {
    star: StarLevel,
    h: HyperNat,
    shift: usize,
}

impl UpsilonObj {
    pub fn star(&self) -> &StarLevel {
        &self.star
    }

    /// The `h` with `l^h · Υ_h F = 0`.
    pub fn annihilator(&self) -> &HyperNat {
        &self.h
    }

    /// The canonical `l`-adic tower behind the object.
    pub fn base(&self) -> &Tower {
        self.star.base()
    }

    /// Shift of the AR-isomorphism onto the base.
    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn quotient(&self, k: usize) -> Result<FinAbGroup> {
        self.star.quotient(k)
    }

    /// Normal form of the object as a `Z_l`-module.
    pub fn normal_form(&self) -> Result<ZlModule> {
        limit(self.base())
    }

    pub fn is_isomorphic(&self, other: &UpsilonObj) -> Result<bool> {
        Ok(self.h == other.h
            && self
                .normal_form()?
                .same_canonical_form(&other.normal_form()?))
    }
}

fn require_infinite(h: &HyperNat) -> Result<()> {
    if !h.is_infinite() {
        return Err(Error::FiniteIndex {
            index: h.to_string(),
        });
    }
    Ok(())
}

fn assemble(c: &CanonicalLAdic, h: &HyperNat) -> Result<UpsilonObj> {
    Ok(UpsilonObj {
        star: StarLevel::new(&c.g, h.add_finite(-1)?),
        h: h.clone(),
        shift: c.shift(),
    })
}

pub fn upsilon(f: &Tower, h: &HyperNat) -> Result<UpsilonObj> {
    upsilon_with_bound(f, h, default_bound(f))
}

pub fn upsilon_with_bound(f: &Tower, h: &HyperNat, bound: usize) -> Result<UpsilonObj> {
    require_infinite(h)?;
    assemble(&canonical_l_adic(f, bound)?, h)
}

/// Recomputes the replacement through the Mittag-Leffler bound `s + extra` and
/// compares normal forms with the one from `s`.
pub fn independence_check(f: &Tower, bound: usize, extra: usize) -> Result<bool> {
    let c = canonical_l_adic(f, bound)?;
    let (stable, _) = stable_image(f, c.ml_bound + extra)?;
    let other = truncation(&shift(&stable, c.offset)?)?;
    Ok(limit(&c.g)?.same_canonical_form(&limit(&other)?))
}

/// `Υ_h f`, as the unique shift-0 morphism between the canonical replacements.
#[derive(Clone, Debug)]
pub struct UpsilonMor {
    pub source: UpsilonObj,
    pub target: UpsilonObj,
    pub hom: TowerHom,
}

impl UpsilonMor {
    /// Levels compared explicitly.
    pub fn window(&self) -> usize {
        self.hom
            .source()
            .settled_from()
            .max(self.hom.target().settled_from())
            + 2
    }

    pub fn is_zero(&self) -> Result<bool> {
        self.hom.is_zero_through(self.window())
    }

    pub fn is_isomorphism(&self) -> Result<bool> {
        for n in 0..=self.window() {
            if !self.hom.level(n)?.is_isomorphism() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn upsilon_mor(f: &ARMor, h: &HyperNat, bound: usize) -> Result<UpsilonMor> {
    require_infinite(h)?;
    let cs = canonical_l_adic(f.source(), bound)?;
    let ct = canonical_l_adic(f.target(), bound)?;
    let through = ar_compose(&ct.iso, &ar_compose(f, &cs.inverse)?)?;
    let hom = through.canonical_representative()?;
    Ok(UpsilonMor {
        source: assemble(&cs, h)?,
        target: assemble(&ct, h)?,
        hom,
    })
}

/// `Ψ_h U = (U/l^{n+1})_n`, which is the base tower.
pub fn psi(u: &UpsilonObj) -> Tower {
    u.base().clone()
}

/// The star extension; on finite levels it changes nothing.
pub fn star_tower(f: &Tower) -> Tower {
    f.marked_star()
}

/// `φ: Ψ_h Υ_h F → Ξ F` and its inverse, as AR-morphisms.
#[derive(Clone, Debug)]
pub struct PhiIso {
    pub iso: ARMor,
    pub inverse: ARMor,
}

pub fn phi_iso(f: &Tower, h: &HyperNat, bound: usize) -> Result<PhiIso> {
    require_infinite(h)?;
    let c = canonical_l_adic(f, bound)?;
    let star = star_tower(f);
    let iso = ARMor::new(&c.g, &star, c.inverse.shift(), c.inverse.rep().clone())?;
    let inverse = ARMor::new(&star, &c.g, c.iso.shift(), c.iso.rep().clone())?;
    Ok(PhiIso { iso, inverse })
}

/// For AR-exact `F → G → H → 0`, whether `Υ_h F → Υ_h G → Υ_h H → 0` is exact on
/// the finite quotients at levels `0..=max(through, window)`, the window being
/// where both morphisms have settled.
pub fn check_right_exact(
    f: &ARMor,
    g: &ARMor,
    h: &HyperNat,
    bound: usize,
    through: usize,
) -> Result<bool> {
    if !f.target().same_as(g.source()) {
        return Err(Error::CompositionMismatch {
            context: "the maps do not form F → G → H".into(),
        });
    }
    let u = upsilon_mor(f, h, bound)?;
    let v = upsilon_mor(g, h, bound)?;
    let violated = |context: &str| Error::PreconditionViolated {
        context: context.into(),
    };
    // AR-exactness of the original sequence, read on the l-adic replacements
    let (_, k_inc) = levelwise_kernel(&v.hom)?;
    let into_kernel = TowerHom::from_rule(
        u.hom.source(),
        k_inc.source(),
        HomRule::LiftThrough {
            along: k_inc.clone(),
            inner: u.hom.clone(),
        },
    );
    let through = u.window().max(v.window()).max(through);
    for n in 0..=through {
        if !v.hom.level(n)?.compose(&u.hom.level(n)?)?.is_zero() {
            return Err(violated("composite is not zero in the AR category"));
        }
    }
    let (homology, _) = levelwise_cokernel(&into_kernel)?;
    if !is_zero_system(&homology, bound)?.is_yes() {
        return Err(violated("sequence is not AR-exact at the middle"));
    }
    let (coker, _) = levelwise_cokernel(&v.hom)?;
    if !is_zero_system(&coker, bound)?.is_yes() {
        return Err(violated("last map is not an AR-epimorphism"));
    }
    for n in 0..=through {
        let (a, b) = (u.hom.level(n)?, v.hom.level(n)?);
        if !b.is_surjective() || !is_exact_at(&a, &b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// What `Υ_h` says about `f` next to what the AR category says.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Faithfulness {
    pub upsilon_zero: bool,
    pub ar_zero: bool,
    pub upsilon_iso: bool,
    pub ar_iso: bool,
}

impl Faithfulness {
    /// `Υ_h f = 0 ⇒ f = 0` and `Υ_h f` iso `⇒ f` iso.
    pub fn holds(&self) -> bool {
        (!self.upsilon_zero || self.ar_zero) && (!self.upsilon_iso || self.ar_iso)
    }
}

pub fn faithfulness_check(f: &ARMor, h: &HyperNat, bound: usize) -> Result<Faithfulness> {
    let u = upsilon_mor(f, h, bound)?;
    let zero = ARMor::zero(f.source(), f.target());
    Ok(Faithfulness {
        upsilon_zero: u.is_zero()?,
        ar_zero: matches!(ar_equal(f, &zero, bound)?, Verdict::Yes(_)),
        upsilon_iso: u.is_isomorphism()?,
        ar_iso: ar_is_isomorphism(f, bound)?.is_yes(),
    })
}
