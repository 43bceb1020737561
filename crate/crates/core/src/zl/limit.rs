use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::module::ZlModule;
use crate::abelian::{FinAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};
use crate::tower::{is_l_adic, TailRule, Tower, Verdict};

/// `(Λ/l^{n+1})_n` with canonical projections, explicit through the point where
/// the torsion has stabilized.
pub fn to_tower(module: &ZlModule) -> Tower {
    let horizon = (module.max_torsion_exponent() as usize).max(1);
    to_tower_with_horizon(module, horizon)
}

pub fn to_tower_with_horizon(module: &ZlModule, horizon: usize) -> Tower {
    let levels: Vec<_> = (0..=horizon)
        .map(|n| module.quotient((n + 1) as u32))
        .collect();
    let transitions = (1..=horizon)
        .map(|n| module.quotient_projection(n as u32))
        .collect();
    Tower::new(
        module.l(),
        levels,
        transitions,
        TailRule::EventuallyLAdic {
            start: 0,
            module: module.clone(),
        },
    )
    .expect("canonical tower of a Z_l-module is valid")
}

/// Inverse limit of an `l`-adic tower.
///
/// Exponents below `n+1` at the top classified level are torsion; exponents
/// still equal to `n+1` there and one level higher are free. The answer is
/// checked by rebuilding every classified level from it.
pub fn limit(tower: &Tower) -> Result<ZlModule> {
    let l = tower.l();
    match is_l_adic(tower)? {
        Verdict::Yes(_) => {}
        Verdict::No(w) => {
            return Err(Error::NotLAdic {
                reason: format!("{:?} at level {}", w.failure, w.level),
            })
        }
        Verdict::Unknown { checked_through } => {
            return Err(Error::NotLAdic {
                reason: format!("undecided through level {checked_through}"),
            })
        }
    }
    let top = match tower.eventual_form() {
        Some(form) => {
            let settled = form.l_adic_from().unwrap_or(form.start);
            let torsion = form
                .limit()
                .map_or(0, |m| m.max_torsion_exponent() as usize);
            settled.max(tower.horizon()).max(torsion) + 1
        }
        None => {
            let reach = tower.reach().unwrap_or(tower.horizon());
            if reach < 1 {
                return Err(Error::NonStabilizing { level: reach });
            }
            reach
        }
    };
    // classify at level n = top - 1, confirmed at level top
    let n = top - 1;
    let below = tower.level(n)?.l_exponents(l);
    let above = tower.level(top)?.l_exponents(l);
    let growing_below = below.iter().filter(|&&e| e as usize == n + 1).count();
    let growing_above = above.iter().filter(|&&e| e as usize == top + 1).count();
    if growing_below != growing_above {
        return Err(Error::NonStabilizing { level: top });
    }
    let torsion: Vec<u32> = below
        .iter()
        .copied()
        .filter(|&e| (e as usize) < n + 1)
        .collect();
    let mut module = ZlModule::new(l, torsion, growing_below)?;
    let g = tower.level(top)?;
    if !g.operators().is_empty() {
        let ops: BTreeMap<_, _> = g.operators().clone();
        module = module.with_operators_at_precision(ops, (top + 1) as u32);
    }
    for k in 0..=top {
        if !tower
            .level(k)?
            .is_isomorphic(&module.quotient((k + 1) as u32))
        {
            return Err(Error::NonStabilizing { level: k });
        }
    }
    Ok(module)
}

/// Dimension over `Q_l`: the free rank.
pub fn rank_ql(module: &ZlModule) -> usize {
    module.free_rank()
}

/// The synthesized tower `H_m = Λ_i/l^{m+1} ⊕ Λ_next[l^{m+1}]` and whether its
/// `l`-adic verdict matches torsion-freeness of `Λ_next`.
#[derive(Clone, Debug)]
pub struct TorsionCriterion {
    pub tower: Tower,
    pub l_adic: bool,
    pub torsion_free: bool,
    /// Level where the `l`-adic check failed, if it did.
    pub witness: Option<usize>,
}

impl TorsionCriterion {
    pub fn verdict(&self) -> bool {
        self.l_adic == self.torsion_free
    }
}

/// Builds the middle terms of `0 → Λ_i/l^m → H(Z/l^m) → Λ_next[l^m] → 0` (split, with
/// `m = n+1`) and checks that the tower is `l`-adic exactly when `Λ_next` has no torsion.
///
/// Transitions are reduction on the first summand and multiplication by `l` on the
/// torsion of the second, as forced by the coefficient sequence `Z/l^{m+1} → Z/l^m`.
pub fn ladic_iff_torsionfree(current: &ZlModule, next: &ZlModule) -> Result<TorsionCriterion> {
    let l = current.l();
    if next.l() != l {
        return Err(Error::PrimeMismatch {
            left: l,
            right: next.l(),
        });
    }
    let horizon = (current
        .max_torsion_exponent()
        .max(next.max_torsion_exponent()) as usize)
        + 2;
    let torsion_next = ZlModule::new(l, next.torsion_exponents().to_vec(), 0)?;
    let mut levels = Vec::with_capacity(horizon + 1);
    let mut sums = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let m = (n + 1) as u32;
        let a = current.quotient(m);
        // Λ[l^m] ≅ ⊕ Z/l^{min(a_i, m)}
        let b = torsion_next.quotient(m);
        let s = crate::abelian::direct_sum(&a, &b);
        levels.push(crate::tower::tag(s.group.clone(), l));
        sums.push((a, b, s));
    }
    let mut transitions = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let (a_hi, b_hi, s_hi) = &sums[n];
        let (a_lo, b_lo, s_lo) = &sums[n - 1];
        let red = GroupHom::diagonal_projection(a_hi, a_lo)?;
        // multiplication by l on Λ[l^{n+1}] → Λ[l^n], in the bases Z/l^{min(a, ·)}
        let times_l =
            multiplication_by_l(l, b_hi, b_lo, torsion_next.torsion_exponents(), n as u32)?;
        let left = s_lo.inj[0].compose(&red)?.compose(&s_hi.proj[0])?;
        let right = s_lo.inj[1].compose(&times_l)?.compose(&s_hi.proj[1])?;
        transitions.push(left.add(&right)?);
    }
    let tower = Tower::new(l, levels, transitions, TailRule::Truncated)?;
    let verdict = is_l_adic(&tower)?;
    Ok(TorsionCriterion {
        l_adic: verdict.is_yes(),
        torsion_free: next.is_torsion_free(),
        witness: verdict.no().map(|w| w.level),
        tower,
    })
}

/// `Λ[l^{m+1}] → Λ[l^m]`, `x ↦ l x`, for torsion exponents `a_i`. The summand
/// `Λ[l^k]` is generated by `l^{a_i - min(a_i,k)}·e_i`, of order `l^{min(a_i,k)}`.
fn multiplication_by_l(
    l: u64,
    hi: &FinAbGroup,
    lo: &FinAbGroup,
    exps: &[u32],
    m: u32,
) -> Result<GroupHom> {
    let mut matrix = IntMatrix::zeros(lo.rank(), hi.rank());
    for (i, &a) in exps.iter().enumerate() {
        let (h, lw) = (a.min(m + 1), a.min(m));
        // l·(l^{a-h} e) = l^{lw-h+1} · (l^{a-lw} e), and lw-h+1 is 0 or 1
        matrix[(i, i)] = BigInt::from(l).pow(lw + 1 - h);
    }
    GroupHom::new(hi.clone(), lo.clone(), matrix)
}
