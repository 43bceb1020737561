//! Seeded random instances.
//!
//! Every generator draws from a [`ChaCha8Rng`], so a `(seed, index, sizes)`
//! triple always rebuilds the same instance. Suites rely on this for replay
//! and for shrinking.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{direct_sum as group_sum, FinAbGroup, GroupHom, IntMatrix};
use crate::arcat::ARMor;
use crate::error::Result;
use crate::tower::{direct_sum, levelwise_cokernel, natural_map, shift, TailRule, Tower, TowerHom};
use crate::zl::{to_tower, ZlModule};

/// Size knobs, the things shrinking turns down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sizes {
    /// Explicit levels `0..levels`.
    pub levels: usize,
    /// Largest torsion exponent of a random module or group.
    pub max_exp: u32,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            levels: 8,
            max_exp: 3,
        }
    }
}

/// The generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_prime(rng: &mut impl Rng, choices: &[u64]) -> u64 {
    choices[rng.gen_range(0..choices.len())]
}

/// `rows × cols` with entries in `-bound..=bound`.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = BigInt::from(rng.gen_range(-bound..=bound));
        }
    }
    m
}

/// A module with at most `max_rank` generators and torsion exponents `<= max_exp`.
pub fn random_zl_module(rng: &mut impl Rng, l: u64, max_exp: u32, max_rank: usize) -> ZlModule {
    let rank = rng.gen_range(0..=max_rank);
    let free = rng.gen_range(0..=rank);
    let torsion = (0..rank - free)
        .map(|_| rng.gen_range(1..=max_exp.max(1)))
        .collect();
    ZlModule::new(l, torsion, free).expect("prime is valid")
}

fn l_pow(l: u64, e: u32) -> BigInt {
    BigInt::from(l).pow(e)
}

/// A random `Z_l`-linear map `Λ1 → Λ2` in generator order (torsion first, then free).
pub fn random_module_hom(rng: &mut impl Rng, src: &ZlModule, tgt: &ZlModule) -> IntMatrix {
    let l = src.l();
    // None stands for a free generator
    let exps = |m: &ZlModule| -> Vec<Option<u32>> {
        m.torsion_exponents()
            .iter()
            .map(|&a| Some(a))
            .chain(std::iter::repeat_n(None, m.free_rank()))
            .collect()
    };
    let (se, te) = (exps(src), exps(tgt));
    let mut m = IntMatrix::zeros(te.len(), se.len());
    for (i, b) in te.iter().enumerate() {
        for (j, a) in se.iter().enumerate() {
            let raw = BigInt::from(rng.gen_range(0..l as i64 * l as i64));
            m[(i, j)] = match (a, b) {
                // torsion cannot map into a free summand
                (Some(_), None) => BigInt::from(0),
                (Some(a), Some(b)) if b > a => raw * l_pow(l, b - a),
                _ => raw,
            };
        }
    }
    m
}

/// An automorphism in generator order: units on the diagonal, `l` times noise above.
/// Exponents never decrease along the order, so entries above the diagonal are always allowed.
fn random_automorphism(rng: &mut impl Rng, l: u64, rank: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(rank, rank);
    for i in 0..rank {
        m[(i, i)] = BigInt::from(unit(rng, l));
        for j in i + 1..rank {
            m[(i, j)] = BigInt::from(rng.gen_range(0..l as i64)) * BigInt::from(l);
        }
    }
    m
}

fn unit(rng: &mut impl Rng, l: u64) -> i64 {
    loop {
        let c = rng.gen_range(1..l as i64 * l as i64);
        if c % l as i64 != 0 {
            return c;
        }
    }
}

/// A zero system: `(Z/l^a)^k` with strictly upper-triangular transitions, so any
/// `k` consecutive transitions compose to zero, then trivial from `start` on.
/// Returns the tower and the bound `min(k, start)` on its radius.
pub fn random_zero_system(rng: &mut impl Rng, l: u64, sizes: Sizes) -> (Tower, usize) {
    let k = rng.gen_range(1..=4usize);
    let a = if k >= 3 {
        1
    } else {
        rng.gen_range(1..=sizes.max_exp.clamp(1, 2))
    };
    let start = rng.gen_range(1..=sizes.levels.max(2) - 1);
    let g = FinAbGroup::l_group(l, &vec![a; k]);
    let trivial = FinAbGroup::l_group(l, &[]);
    let horizon = sizes.levels.max(2) - 1;
    let levels: Vec<_> = (0..=horizon)
        .map(|n| {
            if n < start {
                g.clone()
            } else {
                trivial.clone()
            }
        })
        .collect();
    let transitions = (1..=horizon)
        .map(|n| {
            let (src, tgt) = (&levels[n], &levels[n - 1]);
            let mut m = IntMatrix::zeros(tgt.rank(), src.rank());
            if n < start {
                for i in 0..k {
                    for j in i + 1..k {
                        m[(i, j)] = BigInt::from(rng.gen_range(0..l as i64));
                    }
                }
            }
            GroupHom::new(src.clone(), tgt.clone(), m).expect("maps between equal exponents")
        })
        .collect();
    let tower = Tower::new(l, levels, transitions, TailRule::ZeroTail { start })
        .expect("valid zero system");
    (tower, k.min(start))
}

/// How an AR-`l`-adic instance was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArKind {
    LAdic,
    PlusZeroSystem,
    Shifted,
    PlusConstant,
}

#[derive(Clone, Debug)]
pub struct ArInstance {
    pub tower: Tower,
    pub kind: ArKind,
    /// The inverse limit, computed from the building blocks without tower machinery.
    pub module: ZlModule,
}

/// A constant tower `(Z/l^a)^k` with a random endomorphism; AR-`l`-adic by Fitting.
pub fn random_constant(rng: &mut impl Rng, l: u64, sizes: Sizes) -> Tower {
    let k = rng.gen_range(1..=2usize);
    let a = rng.gen_range(1..=sizes.max_exp.clamp(1, 2));
    let g = FinAbGroup::l_group(l, &vec![a; k]);
    let m = match rng.gen_range(0..3) {
        0 => random_automorphism(rng, l, k),
        _ => random_matrix(rng, k, k, l as i64),
    };
    let e = GroupHom::new(g.clone(), g.clone(), m).expect("equal exponents");
    Tower::constant(l, g, e).expect("valid constant tower")
}

/// An AR-`l`-adic tower of one of the [`ArKind`] shapes.
pub fn random_ar_l_adic(rng: &mut impl Rng, l: u64, sizes: Sizes) -> ArInstance {
    let module = random_zl_module(rng, l, sizes.max_exp, 2);
    let base = to_tower(&module);
    let kind = match rng.gen_range(0..4) {
        0 => ArKind::LAdic,
        1 => ArKind::PlusZeroSystem,
        2 => ArKind::Shifted,
        _ => ArKind::PlusConstant,
    };
    let mut limit = module.clone();
    let tower = match kind {
        ArKind::LAdic => base,
        ArKind::PlusZeroSystem => {
            let (n, _) = random_zero_system(rng, l, sizes);
            direct_sum(&base, &n).expect("same prime").tower
        }
        ArKind::Shifted => shift(&base, rng.gen_range(1..=2)).expect("shift"),
        ArKind::PlusConstant => {
            let c = random_constant(rng, l, sizes);
            // the limit of a constant tower is where the endomorphism becomes bijective
            let e = c.transition(1).expect("constant towers extend");
            let stable = (0..8).fold(e.clone(), |p, _| e.compose(&p).expect("endomorphism"));
            let torsion = stable.image().0.l_exponents(l);
            limit = limit
                .direct_sum(&ZlModule::new(l, torsion, 0).expect("same prime"))
                .expect("same prime");
            direct_sum(&base, &c).expect("same prime").tower
        }
    };
    ArInstance {
        tower,
        kind,
        module: limit,
    }
}

/// `0 → N → F → G → 0` with `G` `l`-adic and `N` a zero system; `F = N ⊕ G` as groups
/// but with transitions twisted by random maps `G_{n+1} → N_n`, so it need not split.
#[derive(Clone, Debug)]
pub struct ExactSequence {
    pub n: Tower,
    pub f: Tower,
    pub g: Tower,
    pub incl: TowerHom,
    pub proj: TowerHom,
    /// Upper bound on the zero radius of `n`.
    pub radius: usize,
}

pub fn random_exact_sequence(rng: &mut impl Rng, l: u64, sizes: Sizes) -> Result<ExactSequence> {
    let (n, radius) = random_zero_system(rng, l, sizes);
    let module = if rng.gen_bool(0.5) {
        random_zl_module(rng, l, sizes.max_exp.min(3), 2)
    } else {
        // torsion only keeps every level within l^6
        ZlModule::new(l, vec![rng.gen_range(1..=sizes.max_exp.clamp(1, 3))], 0)?
    };
    let g = to_tower(&module);
    let horizon = sizes.levels.max(2) - 1;
    let sums: Vec<_> = (0..=horizon)
        .map(|k| Ok(group_sum(&n.level(k)?, &g.level(k)?)))
        .collect::<Result<_>>()?;
    let mut transitions = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let (hi, lo) = (&sums[k], &sums[k - 1]);
        let un = n.transition(k)?;
        let ug = g.transition(k)?;
        let twist = random_group_hom(rng, &g.level(k)?, &n.level(k - 1)?)?;
        let t = lo.inj[0]
            .compose(&un)?
            .compose(&hi.proj[0])?
            .add(&lo.inj[0].compose(&twist)?.compose(&hi.proj[1])?)?
            .add(&lo.inj[1].compose(&ug)?.compose(&hi.proj[1])?)?;
        transitions.push(t);
    }
    let levels = sums.iter().map(|s| s.group.clone()).collect();
    let f = Tower::new(l, levels, transitions, TailRule::Truncated)?;
    let incl = TowerHom::explicit(&n, &f, sums.iter().map(|s| s.inj[0].clone()).collect())?;
    let proj = TowerHom::explicit(&f, &g, sums.iter().map(|s| s.proj[1].clone()).collect())?;
    Ok(ExactSequence {
        n,
        f,
        g,
        incl,
        proj,
        radius,
    })
}

/// A random homomorphism between `l`-groups in their invariant-factor bases.
pub fn random_group_hom(
    rng: &mut impl Rng,
    src: &FinAbGroup,
    tgt: &FinAbGroup,
) -> Result<GroupHom> {
    let mut m = IntMatrix::zeros(tgt.rank(), src.rank());
    for (i, d) in tgt.factors().iter().enumerate() {
        for (j, e) in src.factors().iter().enumerate() {
            // Z/e → Z/d is multiplication by a multiple of d / gcd(d, e)
            let step = d / num_integer::Integer::gcd(d, e);
            m[(i, j)] = step * BigInt::from(rng.gen_range(0..4));
        }
    }
    GroupHom::new(src.clone(), tgt.clone(), m)
}

/// `L1 ⊕ N1 → L2 ⊕ N2` through a random map of the `l`-adic parts, sometimes at shift 1.
/// The parts share their module one time in three, with an automorphism between them.
pub fn random_ar_mor(rng: &mut impl Rng, l: u64, sizes: Sizes) -> Result<ARMor> {
    let m1 = random_zl_module(rng, l, sizes.max_exp, 2);
    let (m2, phi) = match rng.gen_range(0..3) {
        0 => {
            let m = random_automorphism(rng, l, m1.rank());
            (m1.clone(), m)
        }
        _ => {
            let m2 = random_zl_module(rng, l, sizes.max_exp, 2);
            let m = random_module_hom(rng, &m1, &m2);
            (m2, m)
        }
    };
    let (l1, l2) = (to_tower(&m1), to_tower(&m2));
    let phi = TowerHom::uniform(&l1, &l2, phi)?;
    let src = pad(rng, &l1, l, sizes);
    let tgt = pad(rng, &l2, l, sizes);
    let rep = tgt.1.compose(&phi)?.compose(&src.2)?;
    if rng.gen_bool(0.25) {
        let shifted = rep.compose(&natural_map(&src.0, 1)?)?;
        return ARMor::new(&src.0, &tgt.0, 1, shifted);
    }
    Ok(ARMor::from_hom(&rep))
}

/// `L ⊕ N` with its inclusion and projection of `L`, or `L` alone.
fn pad(rng: &mut impl Rng, base: &Tower, l: u64, sizes: Sizes) -> (Tower, TowerHom, TowerHom) {
    if rng.gen_bool(0.5) {
        return (
            base.clone(),
            TowerHom::identity(base),
            TowerHom::identity(base),
        );
    }
    let (n, _) = random_zero_system(rng, l, sizes);
    let s = direct_sum(base, &n).expect("same prime");
    (s.tower, s.inj[0].clone(), s.proj[0].clone())
}

/// `F → G → coker → 0`, AR-exact because it is levelwise exact.
pub fn random_ar_exact(rng: &mut impl Rng, l: u64, sizes: Sizes) -> Result<(ARMor, ARMor)> {
    let f = random_ar_mor(rng, l, sizes)?;
    let (_, proj) = levelwise_cokernel(f.rep())?;
    Ok((f, ARMor::from_hom(&proj)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::is_zero_system;

    #[test]
    fn generators_are_deterministic() {
        let a = random_zl_module(&mut case_rng(7, 3), 3, 3, 3);
        let b = random_zl_module(&mut case_rng(7, 3), 3, 3, 3);
        assert_eq!(a, b);
        let m1 = random_matrix(&mut case_rng(1, 0), 3, 3, 10);
        let m2 = random_matrix(&mut case_rng(1, 1), 3, 3, 10);
        assert_ne!(m1, m2);
    }

    #[test]
    fn zero_systems_respect_their_radius() {
        for i in 0..30 {
            let (t, r) = random_zero_system(&mut case_rng(11, i), 2, Sizes::default());
            let cert = is_zero_system(&t, 8).unwrap();
            assert!(cert.yes().unwrap().radius <= r);
        }
    }

    #[test]
    fn exact_sequences_are_exact() {
        for i in 0..10 {
            let s = random_exact_sequence(&mut case_rng(5, i), 3, Sizes::default()).unwrap();
            for k in 0..8 {
                let (a, b) = (s.incl.level(k).unwrap(), s.proj.level(k).unwrap());
                assert!(crate::abelian::is_exact_at(&a, &b).unwrap());
                assert!(a.is_injective() && b.is_surjective());
            }
        }
    }
}
