use arl_core::abelian::{FinAbGroup, GroupHom, IntMatrix};
use arl_core::tower::*;
use arl_core::zl::{to_tower, ZlModule};
use num_bigint::BigInt;

const L: u64 = 3;

fn zl() -> Tower {
    to_tower(&ZlModule::free(L, 1))
}

fn cyclic(e: u32) -> FinAbGroup {
    FinAbGroup::l_group(L, &[e])
}

fn constant_zl(maps: i64) -> Tower {
    let g = cyclic(1);
    let endo = GroupHom::new(g.clone(), g.clone(), IntMatrix::from_i64(&[&[maps]])).unwrap();
    Tower::constant(L, g, endo).unwrap()
}

/// `N_n = Z/l` for `n <= 3` with identities, trivial from level 4.
fn short_tower() -> Tower {
    let g = cyclic(1);
    let levels = vec![g.clone(); 4];
    let id = GroupHom::identity(&g);
    Tower::new(L, levels, vec![id; 3], TailRule::ZeroTail { start: 4 }).unwrap()
}

fn times_l_tower(horizon: usize) -> Tower {
    let levels: Vec<_> = (0..=horizon).map(|n| cyclic(n as u32 + 1)).collect();
    let transitions = (1..=horizon)
        .map(|n| {
            GroupHom::new(
                levels[n].clone(),
                levels[n - 1].clone(),
                IntMatrix::from_i64(&[&[L as i64]]),
            )
            .unwrap()
        })
        .collect();
    Tower::new(L, levels, transitions, TailRule::Truncated).unwrap()
}

fn exps(t: &Tower, n: usize) -> Vec<u32> {
    t.level(n).unwrap().l_exponents(L)
}

#[test]
fn shift_examples() {
    let f = zl();
    assert!(shift(&f, 0).unwrap().same_as(&f));
    let g = shift(&f, 1).unwrap();
    for n in 0..6 {
        assert_eq!(exps(&g, n), vec![n as u32 + 2]);
    }
    let s = shift(&short_tower(), 4).unwrap();
    for n in 0..5 {
        assert!(s.level(n).unwrap().is_trivial());
    }
}

#[test]
fn shift_composes() {
    let f = zl();
    let a = shift(&shift(&f, 2).unwrap(), 3).unwrap();
    let b = shift(&f, 5).unwrap();
    assert!(a.levelwise_equal(&b, 6).unwrap());
}

#[test]
fn natural_map_examples() {
    let f = zl();
    let id = natural_map(&f, 0).unwrap();
    for n in 0..4 {
        assert_eq!(
            id.level(n).unwrap(),
            GroupHom::identity(&f.level(n).unwrap())
        );
    }
    let red = natural_map(&f, 1).unwrap();
    for n in 0..4 {
        let c = red.level(n).unwrap();
        assert!(c.is_surjective());
        assert_eq!(c.source().l_exponents(L), vec![n as u32 + 2]);
    }
    assert!(natural_map(&constant_zl(0), 1)
        .unwrap()
        .is_zero_through(5)
        .unwrap());
}

#[test]
fn natural_map_coherence() {
    let f = zl();
    let (a, b) = (2, 1);
    let lhs = natural_map(&f, a + b).unwrap();
    let rhs = natural_map(&f, a)
        .unwrap()
        .compose(&natural_map(&shift(&f, a).unwrap(), b).unwrap())
        .unwrap();
    assert!(lhs.levelwise_equal(&rhs, 5).unwrap());
}

#[test]
fn zero_system_examples() {
    let c = is_zero_system(&constant_zl(0), 6).unwrap();
    assert_eq!(c.yes().unwrap().radius, 1);
    assert!(c.yes().unwrap().tail_certified);
    assert!(is_zero_system(&zl(), 6).unwrap().is_no());
    let n = is_zero_system(&short_tower(), 6).unwrap();
    assert_eq!(n.yes().unwrap().radius, 4);
    // radius 4 is out of reach with bound 3
    assert!(is_zero_system(&short_tower(), 3).unwrap().is_no());
}

#[test]
fn zero_certificate_means_zero_natural_map() {
    let t = short_tower();
    let r = is_zero_system(&t, 6).unwrap().yes().unwrap().radius;
    assert!(natural_map(&t, r).unwrap().is_zero_through(8).unwrap());
}

#[test]
fn truncated_zero_system_is_honest() {
    // identities all the way up the prefix: no radius within the prefix works
    let t = short_tower().truncated(3).unwrap();
    assert_eq!(
        is_zero_system(&t, 10).unwrap(),
        Verdict::Unknown { checked_through: 3 }
    );
    // multiplication by l: composites F_{n+r} → F_n vanish once r > n
    let m = times_l_tower(3);
    let c = is_zero_system(&m, 10).unwrap();
    assert_eq!(c.yes().unwrap().radius, 2);
    assert!(!c.yes().unwrap().tail_certified);
    assert!(is_zero_system(&m, 1).unwrap().is_no());
}

#[test]
fn l_adic_examples() {
    let v = is_l_adic(&zl()).unwrap();
    assert!(v.yes().unwrap().tail_certified);
    assert!(is_l_adic(&constant_zl(1)).unwrap().is_yes());
    let w = is_l_adic(&times_l_tower(4)).unwrap();
    assert_eq!(w.no().unwrap().level, 0);
    assert!(is_l_adic(&constant_zl(0)).unwrap().is_no());
}

#[test]
fn l_adic_growth() {
    let t = to_tower(&ZlModule::new(L, vec![2], 1).unwrap());
    for n in 0..6 {
        assert!(level_length(&t, n + 1).unwrap() >= level_length(&t, n).unwrap());
    }
}

#[test]
fn levelwise_examples() {
    let f = zl();
    let (k, _) = levelwise_kernel(&TowerHom::identity(&f)).unwrap();
    for n in 0..5 {
        assert!(k.level(n).unwrap().is_trivial());
    }
    let nat = natural_map(&f, 1).unwrap();
    let (img, _, _) = levelwise_image(&nat).unwrap();
    for n in 0..5 {
        assert!(img.level(n).unwrap().is_isomorphic(&f.level(n).unwrap()));
    }
    let (c, _) = levelwise_cokernel(&TowerHom::zero(&f, &f)).unwrap();
    for n in 0..5 {
        assert!(c.level(n).unwrap().is_isomorphic(&f.level(n).unwrap()));
    }
}

#[test]
fn levelwise_sequences_are_exact() {
    let f = zl();
    let h = TowerHom::scalar(&f, BigInt::from(L));
    let (_, inc) = levelwise_kernel(&h).unwrap();
    let (_, proj) = levelwise_cokernel(&h).unwrap();
    for n in 0..5 {
        assert!(
            arl_core::abelian::is_exact_at(&inc.level(n).unwrap(), &h.level(n).unwrap()).unwrap()
        );
        assert!(
            arl_core::abelian::is_exact_at(&h.level(n).unwrap(), &proj.level(n).unwrap()).unwrap()
        );
    }
}

#[test]
fn mod_power_examples() {
    let f = zl();
    let q0 = mod_power(&f, 0).unwrap();
    for n in 0..4 {
        assert!(q0.level(n).unwrap().is_trivial());
    }
    let q1 = mod_power(&f, 1).unwrap();
    for n in 0..5 {
        assert_eq!(exps(&q1, n), vec![1]);
        if n > 0 {
            assert!(q1.transition(n).unwrap().is_isomorphism());
        }
    }
    let c = constant_zl(1);
    let qc = mod_power(&c, 1).unwrap();
    assert!(qc.levelwise_equal(&c, 4).unwrap());
}

#[test]
fn direct_sum_examples() {
    let f = zl();
    let s = direct_sum(&f, &Tower::trivial(L)).unwrap();
    assert!(s.tower.levelwise_equal(&f, 5).unwrap());
    let two = direct_sum(&f, &to_tower(&ZlModule::new(L, vec![2], 0).unwrap())).unwrap();
    assert!(is_l_adic(&two.tower).unwrap().yes().unwrap().tail_certified);
    let mixed = direct_sum(&f, &short_tower()).unwrap();
    assert!(is_l_adic(&mixed.tower).unwrap().is_no());
}

#[test]
fn direct_sum_structure_maps() {
    let f = zl();
    let g = constant_zl(0);
    let s = direct_sum(&f, &g).unwrap();
    for n in 0..4 {
        let back = s.proj[0]
            .level(n)
            .unwrap()
            .compose(&s.inj[0].level(n).unwrap())
            .unwrap();
        assert_eq!(
            back.matrix(),
            GroupHom::identity(&f.level(n).unwrap()).matrix()
        );
    }
    s.inj[1].check_commutes(5).unwrap();
    s.proj[0].check_commutes(5).unwrap();
}

#[test]
fn epi_from_l_adic_onto_zero_system_forces_trivial() {
    // the only levelwise epimorphism Z/l^{n+1} ↠ (constant Z/l, zero maps) would have to commute
    // with the zero transitions, which kills it
    let f = zl();
    let n = constant_zl(0);
    let candidate: Vec<GroupHom> = (0..4)
        .map(|k| {
            GroupHom::new(
                f.level(k).unwrap(),
                n.level(k).unwrap(),
                IntMatrix::from_i64(&[&[1]]),
            )
            .unwrap()
        })
        .collect();
    assert!(TowerHom::explicit(&f, &n, candidate).is_err());
}

#[test]
fn declared_tails_are_validated() {
    let g = cyclic(1);
    assert!(Tower::new(L, vec![g.clone()], vec![], TailRule::ZeroTail { start: 0 }).is_err());
    let m = ZlModule::free(L, 1);
    assert!(Tower::new(
        L,
        vec![cyclic(2)],
        vec![],
        TailRule::EventuallyLAdic {
            start: 0,
            module: m.clone()
        }
    )
    .is_err());
    assert!(Tower::new(
        L,
        vec![cyclic(1)],
        vec![],
        TailRule::EventuallyLAdic {
            start: 0,
            module: m
        }
    )
    .is_ok());
    assert!(Tower::new(L, vec![FinAbGroup::cyclic(6)], vec![], TailRule::Truncated).is_err());
}
