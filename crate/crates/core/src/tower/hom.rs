use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use super::system::{l_power, Tower};
use crate::abelian::{direct_sum, quotient_by_integer, GroupHom, IntMatrix};
use crate::error::{Error, Result};

/// How the components of a [`TowerHom`] are produced.
#[derive(Clone)]
pub enum HomRule {
    /// Components for levels `0..=len-1` only.
    Explicit(Vec<GroupHom>),
    Identity,
    Zero,
    Scalar(BigInt),
    /// The same integer matrix on every level.
    Uniform(IntMatrix),
    /// `F[r] → F`, component `n` is `F_{n+r} → F_n`.
    Natural {
        r: usize,
    },
    Compose {
        outer: TowerHom,
        inner: TowerHom,
    },
    Add(TowerHom, TowerHom),
    Neg(TowerHom),
    /// `f[r] : F[r] → G[r]`.
    Shifted {
        inner: TowerHom,
        r: usize,
    },
    DirectSum(TowerHom, TowerHom),
    SumInjection {
        index: usize,
    },
    SumProjection {
        index: usize,
    },
    KernelInclusion {
        hom: TowerHom,
    },
    ImageInclusion {
        hom: TowerHom,
    },
    /// `F → im(f)` for `f: F → G`.
    ImageCorestriction {
        hom: TowerHom,
    },
    CokernelProjection {
        hom: TowerHom,
    },
    /// `im(F_{n+s} → F_n) ⊂ F_n`.
    StableImageInclusion {
        s: usize,
    },
    /// `F[s] ↠ im(F_{n+s} → F_n)`.
    StableImageCorestriction {
        s: usize,
    },
    /// `F_n ↠ F_n / l^k`.
    QuotientProjection {
        k: u32,
    },
    /// `F_n ↠ F_n / l^{n+1}`.
    TruncationProjection,
    /// Component `n` is `rule(n)` for a closure-free description: the unique
    /// lift of `inner` through the injective `along` (`along ∘ result = inner`).
    LiftThrough {
        along: TowerHom,
        inner: TowerHom,
    },
    /// The unique factorization of `inner` through the surjective `along` (`result ∘ along = inner`).
    FactorThrough {
        along: TowerHom,
        inner: TowerHom,
    },
}

struct HomData {
    source: Tower,
    target: Tower,
    rule: HomRule,
    cache: Mutex<HashMap<usize, GroupHom>>,
}

/// Morphism of towers `(f_n : F_n → G_n)` commuting with the transitions.
#[derive(Clone)]
pub struct TowerHom(Arc<HomData>);

impl TowerHom {
    pub(crate) fn from_rule(source: &Tower, target: &Tower, rule: HomRule) -> Self {
        TowerHom(Arc::new(HomData {
            source: source.clone(),
            target: target.clone(),
            rule,
            cache: Mutex::new(HashMap::new()),
        }))
    }

    /// Explicit components on levels `0..levels.len()`, with commuting squares checked.
    pub fn explicit(source: &Tower, target: &Tower, levels: Vec<GroupHom>) -> Result<Self> {
        if source.l() != target.l() {
            return Err(Error::PrimeMismatch {
                left: source.l(),
                right: target.l(),
            });
        }
        if levels.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "a tower morphism needs at least one component".into(),
            });
        }
        let mut checked = Vec::with_capacity(levels.len());
        for (n, f) in levels.iter().enumerate() {
            let (s, t) = (source.level(n)?, target.level(n)?);
            checked.push(GroupHom::new(s, t, f.matrix().clone())?);
        }
        let hom = Self::from_rule(source, target, HomRule::Explicit(checked));
        hom.check_commutes(levels.len() - 1)?;
        Ok(hom)
    }

    pub fn identity(f: &Tower) -> Self {
        Self::from_rule(f, f, HomRule::Identity)
    }

    pub fn zero(source: &Tower, target: &Tower) -> Self {
        Self::from_rule(source, target, HomRule::Zero)
    }

    /// Multiplication by `c` on every level.
    pub fn scalar(f: &Tower, c: impl Into<BigInt>) -> Self {
        Self::from_rule(f, f, HomRule::Scalar(c.into()))
    }

    /// One integer matrix on every level, for towers whose level bases line up
    /// (canonical towers of `Z_l`-modules, say). Checked through the settled levels.
    pub fn uniform(source: &Tower, target: &Tower, m: IntMatrix) -> Result<Self> {
        if source.l() != target.l() {
            return Err(Error::PrimeMismatch {
                left: source.l(),
                right: target.l(),
            });
        }
        let hom = Self::from_rule(source, target, HomRule::Uniform(m));
        let through = source.settled_from().max(target.settled_from()) + 1;
        let through = hom.reach().map_or(through, |r| r.min(through));
        for n in 0..=through {
            hom.level(n)?;
        }
        hom.check_commutes(through)?;
        Ok(hom)
    }

    pub fn source(&self) -> &Tower {
        &self.0.source
    }

    pub fn target(&self) -> &Tower {
        &self.0.target
    }

    pub fn rule(&self) -> &HomRule {
        &self.0.rule
    }

    /// Largest level with a component, `None` if unbounded.
    pub fn reach(&self) -> Option<usize> {
        let own = match &self.0.rule {
            HomRule::Explicit(v) => Some(v.len() - 1),
            HomRule::Compose { outer, inner } => min_reach(outer.reach(), inner.reach()),
            HomRule::Add(a, b) | HomRule::DirectSum(a, b) => min_reach(a.reach(), b.reach()),
            HomRule::Neg(a) => a.reach(),
            HomRule::Shifted { inner, r } => inner.reach().map(|m| m.saturating_sub(*r)),
            HomRule::KernelInclusion { hom }
            | HomRule::ImageInclusion { hom }
            | HomRule::ImageCorestriction { hom }
            | HomRule::CokernelProjection { hom } => hom.reach(),
            HomRule::LiftThrough { along, inner } | HomRule::FactorThrough { along, inner } => {
                min_reach(along.reach(), inner.reach())
            }
            _ => None,
        };
        min_reach(own, min_reach(self.source().reach(), self.target().reach()))
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.reach().is_none_or(|r| n <= r)
    }

    /// Component `f_n : F_n → G_n`.
    pub fn level(&self, n: usize) -> Result<GroupHom> {
        if !self.has_level(n) {
            return Err(Error::LevelUnavailable {
                level: n,
                horizon: self.reach().unwrap_or(0),
            });
        }
        if let Some(hit) = self.0.cache.lock().expect("cache lock").get(&n) {
            return Ok(hit.clone());
        }
        let raw = self.compute(n)?;
        let (s, t) = (self.source().level(n)?, self.target().level(n)?);
        if raw.source().factors() != s.factors() || raw.target().factors() != t.factors() {
            return Err(Error::CompositionMismatch {
                context: format!("component {n} does not match the tower levels"),
            });
        }
        let f = GroupHom::from_parts_unchecked(s, t, raw.matrix().clone());
        self.0
            .cache
            .lock()
            .expect("cache lock")
            .insert(n, f.clone());
        Ok(f)
    }

    fn compute(&self, n: usize) -> Result<GroupHom> {
        let (src, tgt) = (self.source(), self.target());
        match &self.0.rule {
            HomRule::Explicit(v) => Ok(v[n].clone()),
            HomRule::Identity => Ok(GroupHom::identity(&src.level(n)?)),
            HomRule::Zero => Ok(GroupHom::zero(&src.level(n)?, &tgt.level(n)?)),
            HomRule::Scalar(c) => Ok(GroupHom::scalar(&src.level(n)?, c)),
            HomRule::Uniform(m) => GroupHom::new(src.level(n)?, tgt.level(n)?, m.clone()),
            HomRule::Natural { r } => tgt.composite(n + r, n),
            HomRule::Compose { outer, inner } => outer.level(n)?.compose(&inner.level(n)?),
            HomRule::Add(a, b) => a.level(n)?.add(&b.level(n)?),
            HomRule::Neg(a) => Ok(a.level(n)?.neg()),
            HomRule::Shifted { inner, r } => inner.level(n + r),
            HomRule::DirectSum(a, b) => {
                Ok(crate::abelian::hom_direct_sum(&a.level(n)?, &b.level(n)?))
            }
            HomRule::SumInjection { index } => {
                let parts = sum_parts(tgt)?;
                let s = direct_sum(&parts.0.level(n)?, &parts.1.level(n)?);
                Ok(s.inj[*index].clone())
            }
            HomRule::SumProjection { index } => {
                let parts = sum_parts(src)?;
                let s = direct_sum(&parts.0.level(n)?, &parts.1.level(n)?);
                Ok(s.proj[*index].clone())
            }
            HomRule::KernelInclusion { hom } => Ok(hom.level(n)?.kernel().1),
            HomRule::ImageInclusion { hom } => Ok(hom.level(n)?.image().1),
            HomRule::ImageCorestriction { hom } => {
                let f = hom.level(n)?;
                f.image().1.lift_through(&f)
            }
            HomRule::CokernelProjection { hom } => Ok(hom.level(n)?.cokernel().1),
            HomRule::StableImageInclusion { s } => Ok(tgt.composite(n + s, n)?.image().1),
            HomRule::StableImageCorestriction { s } => {
                let parent = stable_parent(tgt)?;
                let c = parent.composite(n + s, n)?;
                c.image().1.lift_through(&c)
            }
            HomRule::QuotientProjection { k } => {
                Ok(quotient_by_integer(&src.level(n)?, &l_power(src.l(), *k as usize)).1)
            }
            HomRule::TruncationProjection => {
                Ok(quotient_by_integer(&src.level(n)?, &l_power(src.l(), n + 1)).1)
            }
            HomRule::LiftThrough { along, inner } => along.level(n)?.lift_through(&inner.level(n)?),
            HomRule::FactorThrough { along, inner } => {
                along.level(n)?.factor_through(&inner.level(n)?)
            }
        }
    }

    /// Checks `g_{n+1}`-squares on levels `0..=through` (clipped to the reach).
    pub fn check_commutes(&self, through: usize) -> Result<()> {
        let through = self.reach().map_or(through, |r| r.min(through));
        for n in 1..=through {
            let lhs = self.target().transition(n)?.compose(&self.level(n)?)?;
            let rhs = self.level(n - 1)?.compose(&self.source().transition(n)?)?;
            if lhs.matrix() != rhs.matrix() {
                return Err(Error::NotWellDefined { row: n, col: n - 1 });
            }
        }
        Ok(())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TowerHom) -> Result<TowerHom> {
        if !inner.target().same_as(self.source()) {
            return Err(Error::CompositionMismatch {
                context: "inner target is not the outer source".into(),
            });
        }
        Ok(Self::from_rule(
            inner.source(),
            self.target(),
            HomRule::Compose {
                outer: self.clone(),
                inner: inner.clone(),
            },
        ))
    }

    pub fn add(&self, other: &TowerHom) -> Result<TowerHom> {
        if !self.source().same_as(other.source()) || !self.target().same_as(other.target()) {
            return Err(Error::CompositionMismatch {
                context: "sum of tower morphisms with different endpoints".into(),
            });
        }
        Ok(Self::from_rule(
            self.source(),
            self.target(),
            HomRule::Add(self.clone(), other.clone()),
        ))
    }

    pub fn neg(&self) -> TowerHom {
        Self::from_rule(self.source(), self.target(), HomRule::Neg(self.clone()))
    }

    /// `f[r] : F[r] → G[r]`.
    pub fn shifted(&self, r: usize) -> Result<TowerHom> {
        if r == 0 {
            return Ok(self.clone());
        }
        let s = super::ops::shift(self.source(), r)?;
        let t = super::ops::shift(self.target(), r)?;
        Ok(Self::from_rule(
            &s,
            &t,
            HomRule::Shifted {
                inner: self.clone(),
                r,
            },
        ))
    }

    /// Same endpoints up to the prefix data.
    pub fn same_endpoints(&self, other: &TowerHom) -> bool {
        self.source().same_as(other.source()) && self.target().same_as(other.target())
    }

    /// Component matrices agree on levels `0..=through`.
    pub fn levelwise_equal(&self, other: &TowerHom, through: usize) -> Result<bool> {
        for n in 0..=through {
            if self.level(n)?.matrix() != other.level(n)?.matrix() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_through(&self, through: usize) -> Result<bool> {
        for n in 0..=through {
            if !self.level(n)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every component on `0..=through` is surjective.
    pub fn is_epi_through(&self, through: usize) -> Result<bool> {
        for n in 0..=through {
            if !self.level(n)?.is_surjective() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn min_reach(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn sum_parts(t: &Tower) -> Result<(Tower, Tower)> {
    match t.tail() {
        super::system::TailRule::SumOf { left, right } => Ok((left.clone(), right.clone())),
        _ => Err(Error::PreconditionViolated {
            context: "sum structure maps need a direct-sum tower".into(),
        }),
    }
}

fn stable_parent(t: &Tower) -> Result<Tower> {
    match t.tail() {
        super::system::TailRule::StableImageOf { parent, .. } => Ok(parent.clone()),
        _ => Err(Error::PreconditionViolated {
            context: "corestriction needs a stable-image tower".into(),
        }),
    }
}

impl fmt::Debug for TowerHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerHom({:?} -> {:?})", self.source(), self.target())
    }
}
