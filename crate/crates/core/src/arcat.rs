//! Morphisms of towers up to shift, and what can be decided about them.
//!
//! An [`ARMor`] `F → G` is a tower morphism `F[r] → G`; two of them are the
//! same AR-morphism when they agree after precomposing with further natural
//! maps. Every search here is bounded and answers with a [`Verdict`].

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::{is_exact_at, quotient_by_integer};
use crate::error::{Error, Result};
use crate::tower::{
    is_l_adic, is_zero_system, l_power, levelwise_cokernel, levelwise_kernel, natural_map, shift,
    stable_image, stable_image_corestriction, truncation, truncation_projection, HomRule,
    LAdicCert, Tower, TowerHom, Verdict, ZeroCertificate, ZeroWitness,
};

/// A morphism in the Artin–Rees category, represented by `rep: F[shift] → G`.
#[derive(Clone, Debug)]
pub struct ARMor {
    source: Tower,
    target: Tower,
    shift: usize,
    rep: TowerHom,
}

impl ARMor {
    pub fn new(source: &Tower, target: &Tower, shift_by: usize, rep: TowerHom) -> Result<Self> {
        if !rep.source().same_as(&shift(source, shift_by)?) || !rep.target().same_as(target) {
            return Err(Error::CompositionMismatch {
                context: format!("representative is not a map F[{shift_by}] → G"),
            });
        }
        Ok(ARMor {
            source: source.clone(),
            target: target.clone(),
            shift: shift_by,
            rep,
        })
    }

    /// Shift-0 class of a tower morphism.
    pub fn from_hom(f: &TowerHom) -> Self {
        ARMor {
            source: f.source().clone(),
            target: f.target().clone(),
            shift: 0,
            rep: f.clone(),
        }
    }

    pub fn identity(f: &Tower) -> Self {
        Self::from_hom(&TowerHom::identity(f))
    }

    pub fn zero(source: &Tower, target: &Tower) -> Self {
        Self::from_hom(&TowerHom::zero(source, target))
    }

    /// The class of `F[r] → F`; equal to the identity as an AR-morphism.
    pub fn natural(f: &Tower, r: usize) -> Result<Self> {
        Self::new(f, f, r, natural_map(f, r)?)
    }

    pub fn source(&self) -> &Tower {
        &self.source
    }

    pub fn target(&self) -> &Tower {
        &self.target
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn rep(&self) -> &TowerHom {
        &self.rep
    }

    /// Representative on `F[r]` for any `r >= self.shift()`.
    pub fn at_shift(&self, r: usize) -> Result<TowerHom> {
        if r < self.shift {
            return Err(Error::PreconditionViolated {
                context: format!("cannot lower the shift from {} to {r}", self.shift),
            });
        }
        if r == self.shift {
            return Ok(self.rep.clone());
        }
        self.rep
            .compose(&natural_map(self.rep.source(), r - self.shift)?)
    }

    /// The unique shift-0 representative, for `l`-adic endpoints.
    ///
    /// `F_{n+r} → G_n` kills `l^{n+1} F_{n+r}`, which for an `l`-adic source is the
    /// kernel of `F_{n+r} → F_n`, so it factors through `F_n`.
    pub fn canonical_representative(&self) -> Result<TowerHom> {
        if self.shift == 0 {
            return Ok(self.rep.clone());
        }
        let along = natural_map(&self.source, self.shift)?;
        Ok(TowerHom::from_rule(
            &self.source,
            &self.target,
            HomRule::FactorThrough {
                along,
                inner: self.rep.clone(),
            },
        ))
    }
}

/// `g ∘ f`, with shift `r_f + r_g`.
pub fn ar_compose(g: &ARMor, f: &ARMor) -> Result<ARMor> {
    if !f.target.same_as(&g.source) {
        return Err(Error::CompositionMismatch {
            context: "target of f is not the source of g".into(),
        });
    }
    let rep = g.rep.compose(&f.rep.shifted(g.shift)?)?;
    Ok(ARMor {
        source: f.source.clone(),
        target: g.target.clone(),
        shift: f.shift + g.shift,
        rep,
    })
}

pub fn ar_add(f: &ARMor, g: &ARMor) -> Result<ARMor> {
    check_parallel(f, g)?;
    let r = f.shift.max(g.shift);
    let rep = f.at_shift(r)?.add(&g.at_shift(r)?)?;
    Ok(ARMor {
        source: f.source.clone(),
        target: f.target.clone(),
        shift: r,
        rep,
    })
}

pub fn ar_neg(f: &ARMor) -> ARMor {
    ARMor {
        rep: f.rep.neg(),
        ..f.clone()
    }
}

fn check_parallel(f: &ARMor, g: &ARMor) -> Result<()> {
    if !f.source.same_as(&g.source) || !f.target.same_as(&g.target) {
        return Err(Error::CompositionMismatch {
            context: "AR-morphisms with different endpoints".into(),
        });
    }
    Ok(())
}

/// Levels checked explicitly for claims about a morphism.
fn hom_window(h: &TowerHom, extra: usize) -> usize {
    let w = h.source().settled_from().max(h.target().settled_from()) + extra;
    h.reach().map_or(w, |r| r.min(w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualCert {
    /// Common shift at which the representatives agree.
    pub shift: usize,
    pub checked_through: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub level: usize,
    /// The images into this level had stabilized by this shift, so no larger shift helps.
    pub shift: usize,
}

/// Whether `f` and `g` agree after a common shift `<= max(r_f, r_g) + bound`.
///
/// A disagreement is conclusive only at a level whose stable image is already
/// reached: beyond that, further shifts restrict to the same subgroup.
pub fn ar_equal(f: &ARMor, g: &ARMor, bound: usize) -> Result<Verdict<EqualCert, Disagreement>> {
    check_parallel(f, g)?;
    let base = f.shift.max(g.shift);
    let d = f.at_shift(base)?.add(&g.at_shift(base)?.neg())?;
    let src = d.source().clone();
    let through = hom_window(&d, bound + 2);
    let mut last = d.clone();
    for s in 0..=bound {
        let e = if s == 0 {
            d.clone()
        } else {
            d.compose(&natural_map(&src, s)?)?
        };
        let w = e.reach().map_or(through, |r| r.min(through));
        if e.is_zero_through(w)? {
            return Ok(Verdict::Yes(EqualCert {
                shift: base + s,
                checked_through: w,
            }));
        }
        last = e;
    }
    let w = last.reach().map_or(through, |r| r.min(through));
    for n in 0..=w {
        if last.level(n)?.is_zero() {
            continue;
        }
        if image_stabilization(&src, n)?.is_some_and(|j| j <= bound) {
            return Ok(Verdict::No(Disagreement {
                level: n,
                shift: base + bound,
            }));
        }
    }
    Ok(Verdict::Unknown { checked_through: w })
}

/// Zero objects of the AR category are exactly the zero systems.
pub fn is_ar_zero_object(f: &Tower, bound: usize) -> Result<Verdict<ZeroCertificate, ZeroWitness>> {
    is_zero_system(f, bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Kernel,
    Cokernel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCert {
    pub kernel: ZeroCertificate,
    pub cokernel: ZeroCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    pub side: Side,
    pub witness: ZeroWitness,
}

/// Iso in the AR category iff the levelwise kernel and cokernel are zero systems.
pub fn ar_is_isomorphism(f: &ARMor, bound: usize) -> Result<Verdict<IsoCert, IsoWitness>> {
    let (k, _) = levelwise_kernel(&f.rep)?;
    let (c, _) = levelwise_cokernel(&f.rep)?;
    let kv = is_zero_system(&k, bound)?;
    if let Verdict::No(witness) = kv {
        return Ok(Verdict::No(IsoWitness {
            side: Side::Kernel,
            witness,
        }));
    }
    let cv = is_zero_system(&c, bound)?;
    Ok(match (kv, cv) {
        (_, Verdict::No(witness)) => Verdict::No(IsoWitness {
            side: Side::Cokernel,
            witness,
        }),
        (Verdict::Yes(kernel), Verdict::Yes(cokernel)) => {
            Verdict::Yes(IsoCert { kernel, cokernel })
        }
        (Verdict::Unknown { checked_through }, _) | (_, Verdict::Unknown { checked_through }) => {
            Verdict::Unknown { checked_through }
        }
        _ => unreachable!("kernel No returned above"),
    })
}

/// Smallest `s` from which `(e^s)` has a constant image.
fn stationary_stabilization(e: &crate::abelian::GroupHom) -> Result<usize> {
    let mut power = crate::abelian::GroupHom::identity(e.source());
    let mut s = 0;
    loop {
        let next = e.compose(&power)?;
        if next.image().0.order() == power.image().0.order() {
            return Ok(s);
        }
        power = next;
        s += 1;
    }
}

/// Smallest `s` with `im(F_{n+s} → F_n)` equal to every later image, when provable.
pub fn image_stabilization(f: &Tower, n: usize) -> Result<Option<usize>> {
    let order = |s: usize| -> Result<BigInt> { Ok(f.composite(n + s, n)?.image().0.order()) };
    if let Some(form) = f.eventual_form() {
        let s_e = match &form.stationary {
            Some(e) => stationary_stabilization(e)?,
            None => 0,
        };
        // images into F_n factor through F_start, where the form takes over
        let cap = form.start.saturating_sub(n) + s_e;
        let stable = order(cap)?;
        for s in 0..=cap {
            if order(s)? == stable {
                return Ok(Some(s));
            }
        }
        return Ok(Some(cap));
    }
    // without a tail, only a vanished image is known to stay put
    let mut s = 0;
    while f.has_level(n + s) {
        if f.composite(n + s, n)?.is_zero() {
            return Ok(Some(s));
        }
        s += 1;
        if s > f.horizon() + 8 {
            break;
        }
    }
    Ok(None)
}

/// Uniform Mittag-Leffler bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MLBound {
    pub s: usize,
    pub checked_through: usize,
    pub tail_certified: bool,
}

/// Levels examined for towers with no eventual form.
fn open_window(f: &Tower, bound: usize) -> usize {
    f.reach().unwrap_or(f.horizon() + bound.max(4))
}

/// Smallest `s <= bound` with `im(F_{n+s} → F_n) = im(F_{n+s+k} → F_n)` for all `n` and `k`.
pub fn stable_image_bound(f: &Tower, bound: usize) -> Result<Verdict<MLBound, NotARWitness>> {
    if let Some(form) = f.eventual_form() {
        let mut s = 0;
        for n in 0..=form.start {
            s = s.max(image_stabilization(f, n)?.unwrap_or(0));
        }
        let checked_through = form.start + s;
        return Ok(if s <= bound {
            Verdict::Yes(MLBound {
                s,
                checked_through,
                tail_certified: true,
            })
        } else {
            Verdict::Unknown { checked_through }
        });
    }
    let w = open_window(f, bound);
    let Some(s) = window_ml_bound(f, w, bound)? else {
        return Ok(Verdict::Unknown { checked_through: w });
    };
    if let Some(no) = growth_obstruction(f, s, w)? {
        return Ok(Verdict::No(no));
    }
    Ok(Verdict::Yes(MLBound {
        s,
        checked_through: w,
        tail_certified: false,
    }))
}

/// ML bound read off a finite window: the images at `s` must already equal the
/// deepest visible ones, with at least one level confirming it.
fn window_ml_bound(f: &Tower, w: usize, bound: usize) -> Result<Option<usize>> {
    for s in 0..=bound.min(w.saturating_sub(1)) {
        let mut ok = true;
        for n in 0..w - s {
            let here = f.composite(n + s, n)?.image().0.order();
            let deepest = f.composite(w, n)?.image().0.order();
            if here != deepest {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Evidence that a tower is not AR-`l`-adic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotARWitness {
    /// Number of cyclic factors of the stable images, level by level.
    pub ranks: Vec<usize>,
    pub shift: usize,
}

/// Stable images whose rank climbs at every visible level.
///
/// An `l`-adic replacement `F'_{n+r}/l^{n+1}` keeps the rank of `F'_{n+r}`, and
/// `l`-adic towers have constant rank, so unbounded growth rules every `r` out.
/// Only the window is seen; three or more strict increases are taken as growth.
fn growth_obstruction(f: &Tower, s: usize, w: usize) -> Result<Option<NotARWitness>> {
    if w < s + 2 {
        return Ok(None);
    }
    let mut ranks = Vec::new();
    for n in 0..=w - s {
        ranks.push(f.composite(n + s, n)?.image().0.rank());
    }
    let climbing = ranks.windows(2).all(|p| p[1] > p[0]);
    Ok((climbing && ranks.len() >= 3).then_some(NotARWitness { ranks, shift: s }))
}

fn not_ar(reason: impl Into<String>) -> Error {
    Error::NotArLAdic {
        reason: reason.into(),
    }
}

fn ml_bound_or_err(f: &Tower, bound: usize) -> Result<usize> {
    match stable_image_bound(f, bound)? {
        Verdict::Yes(b) => Ok(b.s),
        Verdict::No(w) => Err(not_ar(format!(
            "stable image ranks keep growing: {:?}",
            w.ranks
        ))),
        Verdict::Unknown { checked_through } => Err(not_ar(format!(
            "no Mittag-Leffler bound <= {bound} through level {checked_through}"
        ))),
    }
}

/// The tower of stable images `im(F_{n+s} → F_n)`.
pub fn stable_image_tower(f: &Tower, bound: usize) -> Result<Tower> {
    let s = ml_bound_or_err(f, bound)?;
    Ok(stable_image(f, s)?.0)
}

/// `G = (F'_{n+r}/l^{n+1})` with AR-isomorphisms both ways.
#[derive(Clone, Debug)]
pub struct CanonicalLAdic {
    pub g: Tower,
    /// Mittag-Leffler bound used for `F'`.
    pub ml_bound: usize,
    /// The `r` in `F'_{n+r}`.
    pub offset: usize,
    /// `F[ml_bound + offset] ↠ G`.
    pub iso: ARMor,
    pub inverse: ARMor,
    pub kernel_cert: ZeroCertificate,
    pub l_adic: LAdicCert,
}

impl CanonicalLAdic {
    /// Total shift of the epimorphism onto `G`.
    pub fn shift(&self) -> usize {
        self.iso.shift
    }
}

/// The canonical `l`-adic tower AR-isomorphic to `f`, with the smallest offset `r <= bound`.
pub fn canonical_l_adic(f: &Tower, bound: usize) -> Result<CanonicalLAdic> {
    if let Verdict::Yes(cert) = is_l_adic(f)? {
        return Ok(CanonicalLAdic {
            g: f.clone(),
            ml_bound: 0,
            offset: 0,
            iso: ARMor::identity(f),
            inverse: ARMor::identity(f),
            kernel_cert: ZeroCertificate {
                radius: 0,
                checked_through: cert.checked_through,
                tail_certified: true,
            },
            l_adic: cert,
        });
    }
    let s = ml_bound_or_err(f, bound)?;
    let (stable, onto) = stable_image_corestriction(f, s)?;
    let (_, inclusion) = stable_image(f, s)?;
    for r in 0..=bound {
        let shifted = shift(&stable, r)?;
        let g = truncation(&shifted)?;
        let Verdict::Yes(l_adic) = is_l_adic(&g)? else {
            continue;
        };
        let trunc = truncation_projection(&shifted)?;
        let epi = trunc.compose(&onto.shifted(r)?)?;
        let (k, _) = levelwise_kernel(&epi)?;
        let Verdict::Yes(kernel_cert) = is_zero_system(&k, bound)? else {
            continue;
        };
        let iso = ARMor::new(f, &g, s + r, epi)?;
        let Some(inverse) = inverse_of(f, &inclusion, &trunc, r, &g, bound)? else {
            continue;
        };
        return Ok(CanonicalLAdic {
            g,
            ml_bound: s,
            offset: r,
            iso,
            inverse,
            kernel_cert,
            l_adic,
        });
    }
    Err(not_ar(format!(
        "no l-adic truncation of the stable images within shift {bound}"
    )))
}

/// `G[t] → F`, `F'_{n+r+t}/l^{n+t+1} → F_n`, for the smallest `t <= bound` where the
/// composite `F'_{n+r+t} ⊂ F_{n+r+t} → F_n` kills `l^{n+t+1}`.
fn inverse_of(
    f: &Tower,
    inclusion: &TowerHom,
    trunc: &TowerHom,
    r: usize,
    g: &Tower,
    bound: usize,
) -> Result<Option<ARMor>> {
    for t in 0..=bound {
        let along = trunc.shifted(t)?;
        let inner = natural_map(f, r + t)?.compose(&inclusion.shifted(r + t)?)?;
        let rep = TowerHom::from_rule(&shift(g, t)?, f, HomRule::FactorThrough { along, inner });
        if (0..=hom_window(&rep, bound + 2)).all(|n| rep.level(n).is_ok()) {
            return Ok(Some(ARMor::new(g, f, t, rep)?));
        }
    }
    Ok(None)
}

/// A certified epimorphism from a shift of `F` onto an `l`-adic tower with zero-system kernel.
#[derive(Clone, Debug)]
pub struct ARWitness {
    pub shift: usize,
    pub epi: TowerHom,
    pub g: Tower,
    pub kernel_cert: ZeroCertificate,
    pub l_adic: LAdicCert,
}

pub fn certify_ar_l_adic(f: &Tower, bound: usize) -> Result<Verdict<ARWitness, NotARWitness>> {
    match canonical_l_adic(f, bound) {
        Ok(c) => {
            return Ok(Verdict::Yes(ARWitness {
                shift: c.shift(),
                epi: c.iso.rep.clone(),
                g: c.g,
                kernel_cert: c.kernel_cert,
                l_adic: c.l_adic,
            }))
        }
        Err(Error::NotArLAdic { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(match stable_image_bound(f, bound)? {
        Verdict::No(w) => Verdict::No(w),
        Verdict::Yes(b) => Verdict::Unknown {
            checked_through: b.checked_through,
        },
        Verdict::Unknown { checked_through } => Verdict::Unknown { checked_through },
    })
}

/// For `0 → N → F → G → 0` with `N[r] → N` zero and `G` `l`-adic: does the image of
/// `ker(F_{r+m+n} → F_n)` in `F_{m+n}` lie in `l^{n+1} F_{m+n}`?
#[allow(clippy::too_many_arguments)]
pub fn kernel_bound_check(
    n_tower: &Tower,
    f: &Tower,
    g: &Tower,
    incl: &TowerHom,
    proj: &TowerHom,
    r: usize,
    m: usize,
    n: usize,
) -> Result<bool> {
    let top = r + m + n;
    let violated = |context: String| Err(Error::PreconditionViolated { context });
    if !incl.source().same_as(n_tower)
        || !incl.target().same_as(f)
        || !proj.source().same_as(f)
        || !proj.target().same_as(g)
    {
        return violated("maps do not form N → F → G".into());
    }
    for k in 0..=top {
        let (i, p) = (incl.level(k)?, proj.level(k)?);
        if !i.is_injective() || !p.is_surjective() || !is_exact_at(&i, &p)? {
            return violated(format!("sequence not exact at level {k}"));
        }
    }
    if !is_l_adic(g)?.is_yes() {
        return violated("G is not l-adic".into());
    }
    if !natural_map(n_tower, r)?.is_zero_through(m + n)? {
        return violated(format!("N[{r}] → N is not zero"));
    }
    let (_, k_inc) = f.composite(top, n)?.kernel();
    let into = f.composite(top, m + n)?.compose(&k_inc)?;
    let (_, q) = quotient_by_integer(&f.level(m + n)?, &l_power(f.l(), n + 1));
    Ok(q.compose(&into)?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationCert {
    pub radius: usize,
    pub checked_through: usize,
}

/// Smallest `r <= bound` such that `F_m → F_{m-r}` kills `l^{m+1} F_m` for all checked `m >= r`.
/// `Ok(None)` when no such `r` was found.
pub fn factorization_radius(f: &Tower, bound: usize) -> Result<Option<FactorizationCert>> {
    if let Verdict::No(w) = stable_image_bound(f, bound)? {
        return Err(not_ar(format!(
            "stable image ranks keep growing: {:?}",
            w.ranks
        )));
    }
    let w = f.settled_from() + bound + 2;
    let w = f.reach().map_or(w, |r| r.min(w));
    for r in 0..=bound.min(w) {
        let mut ok = true;
        for m in r..=w {
            let c = f.composite(m, m - r)?;
            if !c.scale(&l_power(f.l(), m + 1)).is_zero() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(FactorizationCert {
                radius: r,
                checked_through: w,
            }));
        }
    }
    Ok(None)
}
