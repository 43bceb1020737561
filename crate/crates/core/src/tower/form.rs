//! Eventual shape of a tower, as proved by its tail rule.
//!
//! From level `start` on the tower is isomorphic, compatibly with the
//! transitions, to
//!
//! ```text
//!     ⊕_i  Λ_i / l^{n + k_i + 1}   ⊕   (A, e)
//! ```
//!
//! where each `Λ_i` is a `Z_l`-module with canonical projections and `(A, e)`
//! is a fixed finite group with a fixed endomorphism as every transition.
//! This is closed under every tower operation with a derived tail, and it
//! decides both the zero-system and the `l`-adic predicates exactly.

use num_bigint::BigInt;

use super::system::{l_power, tag};
use crate::abelian::{hom_direct_sum, quotient_by_integer, GroupHom};
use crate::error::Result;
use crate::zl::ZlModule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub module: ZlModule,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventualForm {
    pub start: usize,
    pub pieces: Vec<Piece>,
    pub stationary: Option<GroupHom>,
}

impl EventualForm {
    pub fn zero(start: usize) -> Self {
        EventualForm {
            start,
            pieces: Vec::new(),
            stationary: None,
        }
    }

    pub fn canonical(start: usize, module: ZlModule, offset: usize) -> Self {
        let pieces = if module.is_zero() {
            Vec::new()
        } else {
            vec![Piece { module, offset }]
        };
        EventualForm {
            start,
            pieces,
            stationary: None,
        }
    }

    pub fn stationary(start: usize, endo: GroupHom) -> Self {
        EventualForm {
            start,
            pieces: Vec::new(),
            stationary: (!endo.source().is_trivial()).then_some(endo),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        self.pieces.retain(|p| !p.module.is_zero());
        if self
            .stationary
            .as_ref()
            .is_some_and(|e| e.source().is_trivial())
        {
            self.stationary = None;
        }
        self
    }

    /// Levels from `start` on are trivial.
    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() && self.stationary.is_none()
    }

    /// Smallest `t` with `e^t = 0` on the stationary part (0 if absent),
    /// `None` when `e` is not nilpotent.
    pub fn stationary_nilpotency(&self) -> Option<usize> {
        match &self.stationary {
            None => Some(0),
            Some(e) => nilpotency_index(e),
        }
    }

    /// First level from which the tower is `l`-adic, `None` if it never is.
    pub fn l_adic_from(&self) -> Option<usize> {
        let mut from = self.start;
        for p in &self.pieces {
            if p.offset == 0 {
                continue;
            }
            // Λ/l^{n+k+1} agrees with Λ/l^{n+1} once n+1 reaches the torsion exponents
            if p.module.free_rank() > 0 {
                return None;
            }
            from = from.max(p.module.max_torsion_exponent() as usize);
        }
        if let Some(e) = &self.stationary {
            if !e.is_isomorphism() {
                return None;
            }
            from = from.max(max_exponent(e) as usize);
        }
        Some(from)
    }

    pub fn shifted(&self, r: usize) -> Self {
        EventualForm {
            start: self.start.saturating_sub(r),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    module: p.module.clone(),
                    offset: p.offset + r,
                })
                .collect(),
            stationary: self.stationary.clone(),
        }
    }

    pub fn sum(&self, other: &EventualForm) -> Self {
        let mut pieces = self.pieces.clone();
        for p in &other.pieces {
            match pieces.iter_mut().find(|q| q.offset == p.offset) {
                Some(q) => q.module = q.module.direct_sum(&p.module).expect("same prime"),
                None => pieces.push(p.clone()),
            }
        }
        pieces.sort_by_key(|p| p.offset);
        let stationary = match (&self.stationary, &other.stationary) {
            (Some(a), Some(b)) => Some(hom_direct_sum(a, b)),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        EventualForm {
            start: self.start.max(other.start),
            pieces,
            stationary,
        }
        .normalized()
    }

    /// Levelwise quotient by `l^k`.
    pub fn quotient(&self, l: u64, k: u32) -> Result<Self> {
        let mut start = self.start;
        let mut pieces = Vec::new();
        for p in &self.pieces {
            // once n+1 >= k the piece is the constant module Λ/l^k, a torsion piece
            start = start.max((k as usize).saturating_sub(1));
            pieces.push(Piece {
                module: p.module.mod_power(k),
                offset: 0,
            });
        }
        let stationary = match &self.stationary {
            Some(e) => {
                let (_, proj) = quotient_by_integer(e.source(), &l_power(l, k as usize));
                Some(proj.factor_through(&proj.compose(e)?)?)
            }
            None => None,
        };
        Ok(EventualForm {
            start,
            pieces,
            stationary,
        }
        .normalized())
    }

    /// Levelwise `im(F_{n+s} → F_n)`.
    pub fn stable_image(&self, s: usize) -> Result<Self> {
        let stationary = match &self.stationary {
            Some(e) => {
                let mut power = GroupHom::identity(e.source());
                for _ in 0..s {
                    power = e.compose(&power)?;
                }
                let (_, inc) = power.image();
                Some(inc.lift_through(&e.compose(&inc)?)?)
            }
            None => None,
        };
        Ok(EventualForm {
            start: self.start,
            pieces: self.pieces.clone(),
            stationary,
        }
        .normalized())
    }

    /// Levelwise `F_n / l^{n+1}`.
    pub fn truncation(&self, l: u64) -> Self {
        let mut start = self.start;
        if let Some(e) = &self.stationary {
            start = start.max((max_exponent(e) as usize).saturating_sub(1));
        }
        EventualForm {
            start,
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    module: p.module.clone(),
                    offset: 0,
                })
                .collect(),
            stationary: self.stationary.as_ref().map(|e| {
                let s = tag(e.source().clone(), l);
                GroupHom::from_parts_unchecked(s.clone(), s, e.matrix().clone())
            }),
        }
    }

    /// `Z_l`-module the tower converges to, when it is eventually `l`-adic.
    pub fn limit(&self) -> Option<ZlModule> {
        self.l_adic_from()?;
        let l = self
            .pieces
            .first()
            .map(|p| p.module.l())
            .or_else(|| self.stationary.as_ref().and_then(|e| e.source().prime()))?;
        let mut acc = ZlModule::zero(l);
        for p in &self.pieces {
            acc = acc.direct_sum(&p.module).ok()?;
        }
        if let Some(e) = &self.stationary {
            let exps = e.source().l_exponents(l);
            acc = acc.direct_sum(&ZlModule::new(l, exps, 0).ok()?).ok()?;
        }
        Some(acc)
    }
}

fn max_exponent(e: &GroupHom) -> u32 {
    let g = e.source();
    if g.is_trivial() {
        return 0;
    }
    let l = g
        .prime()
        .unwrap_or_else(|| smallest_prime_factor(g.exponent()));
    g.l_exponents(l).into_iter().max().unwrap_or(0)
}

fn smallest_prime_factor(n: BigInt) -> u64 {
    let mut p = 2u64;
    while &n % p != BigInt::from(0) {
        p += 1;
    }
    p
}

pub(crate) fn nilpotency_index(e: &GroupHom) -> Option<usize> {
    let g = e.source();
    // a strictly decreasing chain of images is at most as long as the composition length
    let bound: usize = g.factors().iter().map(|d| d.bits() as usize).sum::<usize>() + 1;
    let mut power = GroupHom::identity(g);
    for t in 0..=bound {
        if power.is_zero() {
            return Some(t);
        }
        power = e.compose(&power).ok()?;
    }
    None
}
