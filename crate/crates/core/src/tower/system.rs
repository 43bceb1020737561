use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use super::form::EventualForm;
use super::hom::TowerHom;
use crate::abelian::{direct_sum, hom_direct_sum, quotient_by_integer, FinAbGroup, GroupHom};
use crate::error::{Error, Result};
use crate::zl::ZlModule;

/// How a tower continues past its explicit prefix.
#[derive(Clone)]
pub enum TailRule {
    /// Nothing is known past the prefix; quantified claims are checked up to the horizon.
    Truncated,
    /// `F_n = 0` for `n >= start`.
    ZeroTail {
        start: usize,
    },
    /// `F_n = Λ/l^{n+1}` with canonical projections for `n >= start`.
    EventuallyLAdic {
        start: usize,
        module: ZlModule,
    },
    /// `F_n = F_L` and `u_{n+1} = endo` for every `n >= L`.
    Constant {
        endo: GroupHom,
    },
    ShiftOf {
        parent: Tower,
        r: usize,
    },
    SumOf {
        left: Tower,
        right: Tower,
    },
    /// Levelwise `F_n / l^k`.
    QuotientOf {
        parent: Tower,
        k: u32,
    },
    /// Levelwise `im(F_{n+s} → F_n)`.
    StableImageOf {
        parent: Tower,
        s: usize,
    },
    /// Levelwise `F_n / l^{n+1}`.
    TruncationOf {
        parent: Tower,
    },
    KernelOf {
        hom: TowerHom,
    },
    ImageOf {
        hom: TowerHom,
    },
    CokernelOf {
        hom: TowerHom,
    },
}

impl TailRule {
    pub fn kind(&self) -> &'static str {
        match self {
            TailRule::Truncated => "truncated",
            TailRule::ZeroTail { .. } => "zero",
            TailRule::EventuallyLAdic { .. } => "eventually_ladic",
            TailRule::Constant { .. } => "constant",
            TailRule::ShiftOf { .. } => "shift",
            TailRule::SumOf { .. } => "sum",
            TailRule::QuotientOf { .. } => "quotient",
            TailRule::StableImageOf { .. } => "stable_image",
            TailRule::TruncationOf { .. } => "truncation",
            TailRule::KernelOf { .. } => "kernel",
            TailRule::ImageOf { .. } => "image",
            TailRule::CokernelOf { .. } => "cokernel",
        }
    }

    fn is_derived(&self) -> bool {
        !matches!(
            self,
            TailRule::Truncated
                | TailRule::ZeroTail { .. }
                | TailRule::EventuallyLAdic { .. }
                | TailRule::Constant { .. }
        )
    }
}

type LevelData = (FinAbGroup, Option<GroupHom>);

struct TowerData {
    l: u64,
    levels: Vec<FinAbGroup>,
    /// `transitions[n]` is `u_{n+1}: F_{n+1} → F_n`.
    transitions: Vec<GroupHom>,
    tail: TailRule,
    star: bool,
    // levels past the prefix, memoized; results never depend on it
    cache: Mutex<HashMap<usize, LevelData>>,
}

/// Projective system `(F_{n+1} → F_n)_{n>=0}` of finite `l`-groups.
///
/// Levels `0..=horizon` are stored; the tail rule decides whether (and how)
/// further levels can be produced. Cloning is cheap.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

pub(crate) fn l_power(l: u64, e: usize) -> BigInt {
    BigInt::from(l).pow(e as u32)
}

pub(crate) fn tag(mut g: FinAbGroup, l: u64) -> FinAbGroup {
    g.set_prime(Some(l));
    g
}

pub(crate) fn retag(h: GroupHom, l: u64) -> GroupHom {
    let s = tag(h.source().clone(), l);
    let t = tag(h.target().clone(), l);
    GroupHom::from_parts_unchecked(s, t, h.matrix().clone())
}

impl Tower {
    /// Builds a tower from an explicit prefix and a tail rule, validating everything.
    pub fn new(
        l: u64,
        levels: Vec<FinAbGroup>,
        transitions: Vec<GroupHom>,
        tail: TailRule,
    ) -> Result<Self> {
        if !crate::is_prime(l) {
            return Err(Error::NotPrime { l });
        }
        if levels.is_empty() {
            return Err(Error::InvalidTail {
                context: "a tower needs at least one explicit level".into(),
            });
        }
        if transitions.len() + 1 != levels.len() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} levels need {} transitions, got {}",
                    levels.len(),
                    levels.len() - 1,
                    transitions.len()
                ),
            });
        }
        if tail.is_derived() {
            return Err(Error::InvalidTail {
                context: format!(
                    "{} tails are produced by tower operations, not declared",
                    tail.kind()
                ),
            });
        }
        let levels = levels
            .into_iter()
            .map(|g| g.with_prime(l))
            .collect::<Result<Vec<_>>>()?;
        let mut checked = Vec::with_capacity(transitions.len());
        for (n, u) in transitions.iter().enumerate() {
            if u.source().factors() != levels[n + 1].factors()
                || u.target().factors() != levels[n].factors()
            {
                return Err(Error::CompositionMismatch {
                    context: format!("u_{} does not map level {} to level {}", n + 1, n + 1, n),
                });
            }
            checked.push(GroupHom::new(
                levels[n + 1].clone(),
                levels[n].clone(),
                u.matrix().clone(),
            )?);
        }
        let tail = match tail {
            TailRule::Constant { endo } => {
                let top = levels.last().expect("nonempty");
                if endo.source().factors() != top.factors()
                    || endo.target().factors() != top.factors()
                {
                    return Err(Error::InvalidTail {
                        context: "constant tail endomorphism must act on the last level".into(),
                    });
                }
                TailRule::Constant {
                    endo: GroupHom::new(top.clone(), top.clone(), endo.matrix().clone())?,
                }
            }
            other => other,
        };
        let t = Self::assemble(l, levels, checked, tail, false);
        t.validate_tail()?;
        Ok(t)
    }

    fn assemble(
        l: u64,
        levels: Vec<FinAbGroup>,
        transitions: Vec<GroupHom>,
        tail: TailRule,
        star: bool,
    ) -> Self {
        Tower(Arc::new(TowerData {
            l,
            levels,
            transitions,
            tail,
            star,
            cache: Mutex::new(HashMap::new()),
        }))
    }

    fn validate_tail(&self) -> Result<()> {
        let horizon = self.horizon();
        match &self.0.tail {
            TailRule::ZeroTail { start } => {
                if *start > horizon + 1 {
                    return Err(Error::InvalidTail {
                        context: format!("zero tail starts at {start}, past horizon {horizon} + 1"),
                    });
                }
                if let Some(n) = (*start..=horizon).find(|&n| !self.0.levels[n].is_trivial()) {
                    return Err(Error::InvalidTail {
                        context: format!("level {n} is not trivial under a zero tail from {start}"),
                    });
                }
            }
            TailRule::EventuallyLAdic { start, module } => {
                if module.l() != self.l() {
                    return Err(Error::PrimeMismatch {
                        left: self.l(),
                        right: module.l(),
                    });
                }
                // the junction at L+1 is the canonical projection, so level L must already be Λ/l^{L+1}
                if *start > horizon {
                    return Err(Error::InvalidTail {
                        context: format!("l-adic tail starts at {start}; list level {start} explicitly (horizon is {horizon})"),
                    });
                }
                for n in *start..=horizon {
                    let expect = module.quotient((n + 1) as u32);
                    if !self.0.levels[n].is_isomorphic(&expect) {
                        return Err(Error::InvalidTail {
                            context: format!(
                                "level {n} is {} but the tail requires {expect}",
                                self.0.levels[n]
                            ),
                        });
                    }
                }
                for n in *start..horizon {
                    let canonical =
                        GroupHom::diagonal_projection(&self.0.levels[n + 1], &self.0.levels[n])?;
                    if canonical.matrix() != self.0.transitions[n].matrix() {
                        return Err(Error::InvalidTail {
                            context: format!(
                                "u_{} is not the canonical projection required by the tail",
                                n + 1
                            ),
                        });
                    }
                }
                if !module.supports_level((horizon + 2) as u32) {
                    return Err(Error::InvalidTail {
                        context: "tail module operators are not known to enough precision".into(),
                    });
                }
                let top = module.quotient((horizon + 2) as u32);
                GroupHom::diagonal_projection(&top, &self.0.levels[horizon])?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Materializes levels `0..=horizon` of a derived rule, or fewer when the
    /// parents cannot reach that far.
    pub(crate) fn from_rule(l: u64, rule: TailRule, horizon: usize) -> Result<Self> {
        let max = rule_reach(&rule).map_or(horizon, |m| m.min(horizon));
        let mut levels = Vec::with_capacity(max + 1);
        let mut transitions = Vec::with_capacity(max);
        for n in 0..=max {
            let (g, u) = compute_level(l, &rule, n)?;
            levels.push(g);
            transitions.extend(u);
        }
        Ok(Self::assemble(l, levels, transitions, rule, false))
    }

    /// Single explicit level continued forever by `endo`.
    pub fn constant(l: u64, group: FinAbGroup, endo: GroupHom) -> Result<Self> {
        Self::new(l, vec![group], Vec::new(), TailRule::Constant { endo })
    }

    pub fn trivial(l: u64) -> Self {
        Self::new(
            l,
            vec![FinAbGroup::trivial()],
            Vec::new(),
            TailRule::ZeroTail { start: 0 },
        )
        .expect("trivial tower is valid")
    }

    pub fn l(&self) -> u64 {
        self.0.l
    }

    /// Largest explicitly stored level.
    pub fn horizon(&self) -> usize {
        self.0.levels.len() - 1
    }

    pub fn tail(&self) -> &TailRule {
        &self.0.tail
    }

    pub fn is_star(&self) -> bool {
        self.0.star
    }

    pub(crate) fn marked_star(&self) -> Tower {
        Self::assemble(
            self.l(),
            self.0.levels.clone(),
            self.0.transitions.clone(),
            self.0.tail.clone(),
            true,
        )
    }

    /// Whether arbitrarily high levels can be produced.
    pub fn is_extendable(&self) -> bool {
        self.reach().is_none()
    }

    /// Largest level that can be produced, `None` when unbounded.
    pub fn reach(&self) -> Option<usize> {
        match &self.0.tail {
            TailRule::Truncated => Some(self.horizon()),
            rule if rule.is_derived() => rule_reach(rule),
            _ => None,
        }
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.reach().is_none_or(|r| n <= r)
    }

    pub fn prefix(&self) -> &[FinAbGroup] {
        &self.0.levels
    }

    pub fn level(&self, n: usize) -> Result<FinAbGroup> {
        if let Some(g) = self.0.levels.get(n) {
            return Ok(g.clone());
        }
        self.beyond(n).map(|(g, _)| g)
    }

    /// `u_n : F_n → F_{n-1}` for `n >= 1`.
    pub fn transition(&self, n: usize) -> Result<GroupHom> {
        assert!(n >= 1, "u_0 does not exist");
        if let Some(u) = self.0.transitions.get(n - 1) {
            return Ok(u.clone());
        }
        self.beyond(n)
            .map(|(_, u)| u.expect("n >= 1 has a transition"))
    }

    fn beyond(&self, n: usize) -> Result<LevelData> {
        if let Some(hit) = self.0.cache.lock().expect("cache lock").get(&n) {
            return Ok(hit.clone());
        }
        let data = self.compute_beyond(n)?;
        self.0
            .cache
            .lock()
            .expect("cache lock")
            .insert(n, data.clone());
        Ok(data)
    }

    fn compute_beyond(&self, n: usize) -> Result<LevelData> {
        let horizon = self.horizon();
        if !self.has_level(n) {
            return Err(Error::LevelUnavailable {
                level: n,
                horizon: self.reach().unwrap_or(horizon),
            });
        }
        let l = self.l();
        match &self.0.tail {
            TailRule::Truncated => Err(Error::LevelUnavailable { level: n, horizon }),
            TailRule::ZeroTail { .. } => {
                let z = tag(FinAbGroup::trivial(), l);
                let prev = if n == horizon + 1 {
                    self.0.levels[horizon].clone()
                } else {
                    z.clone()
                };
                let u = GroupHom::zero(&z, &prev);
                Ok((z, Some(u)))
            }
            TailRule::EventuallyLAdic { module, .. } => {
                let g = module.quotient((n + 1) as u32);
                let prev = if n == horizon + 1 {
                    self.0.levels[horizon].clone()
                } else {
                    module.quotient(n as u32)
                };
                let u = GroupHom::diagonal_projection(&g, &prev)?;
                Ok((g, Some(u)))
            }
            TailRule::Constant { endo } => Ok((self.0.levels[horizon].clone(), Some(endo.clone()))),
            rule => compute_level(l, rule, n),
        }
    }

    /// `F_from → F_to` for `from >= to` (identity when equal).
    pub fn composite(&self, from: usize, to: usize) -> Result<GroupHom> {
        assert!(from >= to, "composite goes down the tower");
        let mut acc = GroupHom::identity(&self.level(from)?);
        for n in (to + 1..=from).rev() {
            acc = self.transition(n)?.compose(&acc)?;
        }
        Ok(acc)
    }

    /// What the tail proves about all large levels, if anything.
    pub fn eventual_form(&self) -> Option<EventualForm> {
        if !self.is_extendable() {
            return None;
        }
        let l = self.l();
        match &self.0.tail {
            TailRule::Truncated => None,
            TailRule::ZeroTail { start } => Some(EventualForm::zero(*start)),
            TailRule::EventuallyLAdic { start, module } => Some(EventualForm::canonical(
                *start,
                module.without_operators(),
                0,
            )),
            TailRule::Constant { endo } => {
                Some(EventualForm::stationary(self.horizon(), endo.clone()))
            }
            TailRule::ShiftOf { parent, r } => parent.eventual_form().map(|f| f.shifted(*r)),
            TailRule::SumOf { left, right } => {
                Some(left.eventual_form()?.sum(&right.eventual_form()?))
            }
            TailRule::QuotientOf { parent, k } => parent.eventual_form()?.quotient(l, *k).ok(),
            TailRule::StableImageOf { parent, s } => parent.eventual_form()?.stable_image(*s).ok(),
            TailRule::TruncationOf { parent } => parent.eventual_form().map(|f| f.truncation(l)),
            TailRule::KernelOf { hom } => {
                let src = hom.source().eventual_form()?;
                src.is_zero().then(|| EventualForm::zero(src.start))
            }
            TailRule::ImageOf { hom } => {
                let src = hom.source().eventual_form();
                let tgt = hom.target().eventual_form();
                [src, tgt]
                    .into_iter()
                    .flatten()
                    .find(EventualForm::is_zero)
                    .map(|f| EventualForm::zero(f.start))
            }
            TailRule::CokernelOf { hom } => {
                let tgt = hom.target().eventual_form()?;
                tgt.is_zero().then(|| EventualForm::zero(tgt.start))
            }
        }
    }

    /// Same prime and identical stored data on the common prefix.
    pub fn same_as(&self, other: &Tower) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        let h = self.horizon().min(other.horizon());
        self.l() == other.l()
            && self.0.levels[..=h] == other.0.levels[..=h]
            && self.0.transitions[..h] == other.0.transitions[..h]
    }

    /// Levelwise equality of groups and transitions for levels `0..=through`.
    pub fn levelwise_equal(&self, other: &Tower, through: usize) -> Result<bool> {
        for n in 0..=through {
            if self.level(n)? != other.level(n)? {
                return Ok(false);
            }
            if n >= 1 && self.transition(n)? != other.transition(n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Invariant factors of levels `0..=through`.
    pub fn level_factors(&self, through: usize) -> Result<Vec<Vec<BigInt>>> {
        (0..=through)
            .map(|n| Ok(self.level(n)?.factors().to_vec()))
            .collect()
    }

    /// A copy whose explicit prefix reaches `horizon` (never shrinks).
    pub fn extended_to(&self, horizon: usize) -> Result<Tower> {
        if horizon <= self.horizon() {
            return Ok(self.clone());
        }
        let mut levels = self.0.levels.clone();
        let mut transitions = self.0.transitions.clone();
        for n in self.horizon() + 1..=horizon {
            levels.push(self.level(n)?);
            transitions.push(self.transition(n)?);
        }
        let tail = match &self.0.tail {
            // the stored endo now sits one level higher, which is the same map
            TailRule::Constant { endo } => TailRule::Constant { endo: endo.clone() },
            other => other.clone(),
        };
        Ok(Self::assemble(
            self.l(),
            levels,
            transitions,
            tail,
            self.0.star,
        ))
    }

    /// Keeps levels `0..=horizon` and forgets the tail.
    pub fn truncated(&self, horizon: usize) -> Result<Tower> {
        let ext = self.extended_to(horizon)?;
        Ok(Self::assemble(
            self.l(),
            ext.0.levels[..=horizon].to_vec(),
            ext.0.transitions[..horizon].to_vec(),
            TailRule::Truncated,
            self.0.star,
        ))
    }

    /// Smallest level from which the tail (not just the prefix) describes everything.
    pub fn settled_from(&self) -> usize {
        match self.eventual_form() {
            Some(f) => f.start.max(self.horizon()),
            None => self.horizon(),
        }
    }
}

/// Highest level a derived rule can produce, `None` if unbounded.
fn rule_reach(rule: &TailRule) -> Option<usize> {
    match rule {
        TailRule::ShiftOf { parent, r } => parent.reach().map(|m| m.saturating_sub(*r)),
        TailRule::SumOf { left, right } => match (left.reach(), right.reach()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
        TailRule::QuotientOf { parent, .. } | TailRule::TruncationOf { parent } => parent.reach(),
        TailRule::StableImageOf { parent, s } => parent.reach().map(|m| m.saturating_sub(*s)),
        TailRule::KernelOf { hom } | TailRule::ImageOf { hom } | TailRule::CokernelOf { hom } => {
            hom.reach()
        }
        _ => None,
    }
}

/// Level `n` of a derived rule and (for `n >= 1`) the transition `u_n`.
fn compute_level(l: u64, rule: &TailRule, n: usize) -> Result<LevelData> {
    let prev = n.checked_sub(1);
    match rule {
        TailRule::ShiftOf { parent, r } => {
            let g = parent.level(n + r)?;
            let u = if n >= 1 {
                Some(parent.transition(n + r)?)
            } else {
                None
            };
            Ok((g, u))
        }
        TailRule::SumOf { left, right } => {
            let g = tag(direct_sum(&left.level(n)?, &right.level(n)?).group, l);
            let u = match prev {
                Some(_) => Some(retag(
                    hom_direct_sum(&left.transition(n)?, &right.transition(n)?),
                    l,
                )),
                None => None,
            };
            Ok((g, u))
        }
        TailRule::QuotientOf { parent, k } => {
            let m = l_power(l, *k as usize);
            quotient_level(l, parent, n, &m, prev.map(|_| m.clone()))
        }
        TailRule::TruncationOf { parent } => quotient_level(
            l,
            parent,
            n,
            &l_power(l, n + 1),
            prev.map(|p| l_power(l, p + 1)),
        ),
        TailRule::StableImageOf { parent, s } => {
            let (img, inc) = parent.composite(n + s, n)?.image();
            let u = match prev {
                Some(p) => {
                    let (_, inc_prev) = parent.composite(p + s, p)?.image();
                    let down = parent.transition(n)?.compose(&inc)?;
                    Some(retag(inc_prev.lift_through(&down)?, l))
                }
                None => None,
            };
            Ok((tag(img, l), u))
        }
        TailRule::KernelOf { hom } => {
            let (k, inc) = hom.level(n)?.kernel();
            let u = match prev {
                Some(p) => {
                    let (_, inc_prev) = hom.level(p)?.kernel();
                    let down = hom.source().transition(n)?.compose(&inc)?;
                    Some(retag(inc_prev.lift_through(&down)?, l))
                }
                None => None,
            };
            Ok((tag(k, l), u))
        }
        TailRule::ImageOf { hom } => {
            let (img, inc) = hom.level(n)?.image();
            let u = match prev {
                Some(p) => {
                    let (_, inc_prev) = hom.level(p)?.image();
                    let down = hom.target().transition(n)?.compose(&inc)?;
                    Some(retag(inc_prev.lift_through(&down)?, l))
                }
                None => None,
            };
            Ok((tag(img, l), u))
        }
        TailRule::CokernelOf { hom } => {
            let (q, proj) = hom.level(n)?.cokernel();
            let u = match prev {
                Some(p) => {
                    let (_, proj_prev) = hom.level(p)?.cokernel();
                    let down = proj_prev.compose(&hom.target().transition(n)?)?;
                    Some(retag(proj.factor_through(&down)?, l))
                }
                None => None,
            };
            Ok((tag(q, l), u))
        }
        other => Err(Error::InvalidTail {
            context: format!("{} is not a derived rule", other.kind()),
        }),
    }
}

/// `F_n / m_n` with the transition induced from `F_n → F_{n-1} → F_{n-1}/m_{n-1}`.
fn quotient_level(
    l: u64,
    parent: &Tower,
    n: usize,
    m: &BigInt,
    m_prev: Option<BigInt>,
) -> Result<LevelData> {
    let (q, proj) = quotient_by_integer(&parent.level(n)?, m);
    let u = match m_prev {
        Some(mp) => {
            let (_, proj_prev) = quotient_by_integer(&parent.level(n - 1)?, &mp);
            let down = proj_prev.compose(&parent.transition(n)?)?;
            Some(retag(proj.factor_through(&down)?, l))
        }
        None => None,
    };
    Ok((tag(q, l), u))
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower(l={}, levels=[", self.l())?;
        for (n, g) in self.0.levels.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "], tail={})", self.0.tail.kind())
    }
}
