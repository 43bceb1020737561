use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::system::{l_power, Tower};
use crate::abelian::quotient_by_integer;
use crate::error::Result;

/// Three-valued answer for claims quantified over all levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict<Y, N> {
    Yes(Y),
    No(N),
    /// Nothing decisive on levels `0..=checked_through`.
    Unknown {
        checked_through: usize,
    },
}

impl<Y, N> Verdict<Y, N> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn yes(&self) -> Option<&Y> {
        match self {
            Verdict::Yes(y) => Some(y),
            _ => None,
        }
    }

    pub fn no(&self) -> Option<&N> {
        match self {
            Verdict::No(n) => Some(n),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// `F[radius] → F` is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCertificate {
    pub radius: usize,
    /// Levels whose composites were computed explicitly.
    pub checked_through: usize,
    /// Whether the tail rule proves the claim for every level beyond.
    pub tail_certified: bool,
}

/// `F_{level+shift} → F_level` is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroWitness {
    pub level: usize,
    pub shift: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LAdicCert {
    pub checked_through: usize,
    pub tail_certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LAdicFailure {
    /// `l^{n+1}` does not kill `F_n`.
    Annihilator,
    /// `u_{n+1}` is not onto `F_n`.
    NotSurjective,
    /// `F_{n+1}/l^{n+1} → F_n` is onto but not injective.
    NotInjective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LAdicWitness {
    pub level: usize,
    pub failure: LAdicFailure,
}

pub type ZeroVerdict = Verdict<ZeroCertificate, ZeroWitness>;
pub type LAdicVerdict = Verdict<LAdicCert, LAdicWitness>;

/// Default search bound: the prefix length.
pub fn default_bound(f: &Tower) -> usize {
    f.horizon() + 1
}

/// Levels examined past the prefix for towers whose tail proves nothing.
const OPEN_WINDOW: usize = 4;

fn open_window(f: &Tower, bound: usize) -> usize {
    match f.reach() {
        Some(r) => r,
        None => f.horizon() + bound.max(OPEN_WINDOW),
    }
}

/// Smallest `r <= bound` with `F[r] → F` zero, decided exactly when the tail has an eventual form.
pub fn is_zero_system(f: &Tower, bound: usize) -> Result<ZeroVerdict> {
    if let Some(form) = f.eventual_form() {
        let start = form.start;
        if !form.pieces.is_empty() {
            return Ok(Verdict::No(ZeroWitness {
                level: start,
                shift: bound,
            }));
        }
        let Some(t) = form.stationary_nilpotency() else {
            return Ok(Verdict::No(ZeroWitness {
                level: start,
                shift: bound,
            }));
        };
        let mut radius = t;
        let mut worst = start;
        for n in 0..start {
            // beyond start + t every composite into level n passes through e^t = 0
            let cap = start + t - n;
            let r_n = (0..=cap.min(bound))
                .find(|&r| f.composite(n + r, n).is_ok_and(|c| c.is_zero()))
                .unwrap_or(cap);
            if r_n > radius {
                radius = r_n;
                worst = n;
            }
        }
        if radius <= bound {
            return Ok(Verdict::Yes(ZeroCertificate {
                radius,
                checked_through: start + t,
                tail_certified: true,
            }));
        }
        return Ok(Verdict::No(ZeroWitness {
            level: worst,
            shift: bound,
        }));
    }
    let window = open_window(f, bound);
    for r in 0..=bound.min(window) {
        let mut all_zero = true;
        for n in 0..=window - r {
            if !f.composite(n + r, n)?.is_zero() {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(Verdict::Yes(ZeroCertificate {
                radius: r,
                checked_through: window,
                tail_certified: false,
            }));
        }
    }
    if bound >= window {
        return Ok(Verdict::Unknown {
            checked_through: window,
        });
    }
    let level = (0..=window - bound)
        .find(|&n| f.composite(n + bound, n).is_ok_and(|c| !c.is_zero()))
        .unwrap_or(0);
    Ok(Verdict::No(ZeroWitness {
        level,
        shift: bound,
    }))
}

fn annihilated(f: &Tower, n: usize) -> Result<bool> {
    let g = f.level(n)?;
    Ok(l_power(f.l(), n + 1).is_multiple_of(&g.exponent()))
}

/// Checks `u_{n+1}` induces `F_{n+1}/l^{n+1} ≅ F_n`.
fn induced_iso(f: &Tower, n: usize) -> Result<Option<LAdicFailure>> {
    let u = f.transition(n + 1)?;
    if !u.is_surjective() {
        return Ok(Some(LAdicFailure::NotSurjective));
    }
    let upper = f.level(n + 1)?;
    let (q, _) = quotient_by_integer(&upper, &l_power(f.l(), n + 1));
    if q.order() != u.target().order() {
        return Ok(Some(LAdicFailure::NotInjective));
    }
    Ok(None)
}

fn first_failure(
    f: &Tower,
    through: usize,
    transitions_through: usize,
) -> Result<Option<LAdicWitness>> {
    for n in 0..=through {
        if !annihilated(f, n)? {
            return Ok(Some(LAdicWitness {
                level: n,
                failure: LAdicFailure::Annihilator,
            }));
        }
        if n < transitions_through {
            if let Some(failure) = induced_iso(f, n)? {
                return Ok(Some(LAdicWitness { level: n, failure }));
            }
        }
    }
    Ok(None)
}

/// `l^{n+1} F_n = 0` and `F_{n+1}/l^{n+1} ≅ F_n` for every level.
pub fn is_l_adic(f: &Tower) -> Result<LAdicVerdict> {
    if let Some(form) = f.eventual_form() {
        return match form.l_adic_from() {
            Some(n0) => {
                let n0 = n0.max(f.horizon());
                Ok(match first_failure(f, n0, n0)? {
                    Some(w) => Verdict::No(w),
                    None => Verdict::Yes(LAdicCert {
                        checked_through: n0,
                        tail_certified: true,
                    }),
                })
            }
            None => {
                let mut limit = form.start.max(f.horizon());
                for p in &form.pieces {
                    limit = limit.max(form.start + p.module.max_torsion_exponent() as usize);
                }
                if let Some(e) = &form.stationary {
                    let exps = e.source().l_exponents(f.l());
                    limit = limit.max(form.start + exps.into_iter().max().unwrap_or(0) as usize);
                }
                Ok(match first_failure(f, limit + 1, limit + 1)? {
                    Some(w) => Verdict::No(w),
                    None => Verdict::Unknown {
                        checked_through: limit + 1,
                    },
                })
            }
        };
    }
    let window = open_window(f, 0);
    let transitions = if f.has_level(window + 1) {
        window + 1
    } else {
        window
    };
    Ok(match first_failure(f, window, transitions)? {
        Some(w) => Verdict::No(w),
        None => Verdict::Yes(LAdicCert {
            checked_through: window,
            tail_certified: false,
        }),
    })
}

/// Order of `F_n` as a power of `l`, handy for growth checks.
pub fn level_length(f: &Tower, n: usize) -> Result<u32> {
    let g = f.level(n)?;
    Ok(g.l_exponents(f.l()).iter().sum())
}
