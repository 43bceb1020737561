use arl_core::abelian::{FinAbGroup, GroupHom, IntMatrix};
use arl_core::arcat::*;
use arl_core::hyper::*;
use arl_core::tower::*;
use arl_core::zl::{limit, to_tower, ZlModule};

const L: u64 = 3;
const BOUND: usize = 8;

fn h() -> HyperNat {
    "h".parse().unwrap()
}

fn zl() -> Tower {
    to_tower(&ZlModule::free(L, 1))
}

fn constant(endo: i64) -> Tower {
    let g = FinAbGroup::l_group(L, &[1]);
    let e = GroupHom::new(g.clone(), g.clone(), IntMatrix::from_i64(&[&[endo]])).unwrap();
    Tower::constant(L, g, e).unwrap()
}

fn radius_three() -> Tower {
    let g = FinAbGroup::l_group(L, &[1]);
    let id = GroupHom::identity(&g);
    Tower::new(L, vec![g; 3], vec![id; 2], TailRule::ZeroTail { start: 3 }).unwrap()
}

fn exps(g: &FinAbGroup) -> Vec<u32> {
    g.l_exponents(L)
}

#[test]
fn upsilon_examples() {
    let f = zl();
    let u = upsilon_with_bound(&f, &h(), BOUND).unwrap();
    assert_eq!(u.star().index().to_string(), "h-1");
    assert_eq!(u.annihilator(), &h());
    for k in 1..6 {
        assert_eq!(exps(&u.quotient(k).unwrap()), vec![k as u32]);
    }
    assert!(u.quotient(0).unwrap().is_trivial());

    let s = direct_sum(&f, &radius_three()).unwrap();
    let v = upsilon_with_bound(&s.tower, &h(), BOUND).unwrap();
    assert!(v.is_isomorphic(&u).unwrap());

    let t = upsilon_with_bound(&Tower::trivial(L), &h(), BOUND).unwrap();
    for k in 0..4 {
        assert!(t.quotient(k).unwrap().is_trivial());
    }
    assert!(matches!(
        upsilon(&f, &HyperNat::finite(4)),
        Err(arl_core::Error::FiniteIndex { .. })
    ));
}

#[test]
fn finite_star_levels_resolve() {
    let s = StarLevel::new(&zl(), HyperNat::finite(3));
    assert_eq!(exps(&s.resolve().unwrap().unwrap()), vec![4]);
    assert_eq!(exps(&s.quotient(2).unwrap()), vec![2]);
}

#[test]
fn upsilon_mor_examples() {
    let f = zl();
    let id = upsilon_mor(&ARMor::identity(&f), &h(), BOUND).unwrap();
    assert!(id.hom.levelwise_equal(&TowerHom::identity(&f), 6).unwrap());

    let times_l = upsilon_mor(&ARMor::from_hom(&TowerHom::scalar(&f, L)), &h(), BOUND).unwrap();
    assert!(!times_l.is_zero().unwrap());
    assert!(times_l
        .hom
        .levelwise_equal(&TowerHom::scalar(&f, L), 6)
        .unwrap());

    // e = inclusion ∘ projection of the zero-system summand
    let s = direct_sum(&f, &radius_three()).unwrap();
    let e = s.inj[1].compose(&s.proj[1]).unwrap();
    let u = upsilon_mor(&ARMor::from_hom(&e), &h(), BOUND).unwrap();
    assert!(u.is_zero().unwrap());
}

#[test]
fn psi_examples() {
    let f = zl();
    let back = psi(&upsilon_with_bound(&f, &h(), BOUND).unwrap());
    assert!(back.levelwise_equal(&f, 6).unwrap());
    assert!(
        psi(&upsilon_with_bound(&Tower::trivial(L), &h(), BOUND).unwrap())
            .level(3)
            .unwrap()
            .is_trivial()
    );
    let c = constant(1);
    assert!(psi(&upsilon_with_bound(&c, &h(), BOUND).unwrap())
        .levelwise_equal(&c, 5)
        .unwrap());
}

#[test]
fn star_tower_examples() {
    let f = zl();
    let s = star_tower(&f);
    assert!(s.is_star());
    assert!(s.levelwise_equal(&f, 6).unwrap());
    assert!(is_l_adic(&s).unwrap().yes().unwrap().tail_certified);
    let n = star_tower(&radius_three());
    assert_eq!(is_zero_system(&n, BOUND).unwrap().yes().unwrap().radius, 3);
}

#[test]
fn phi_examples() {
    let f = zl();
    let p = phi_iso(&f, &h(), BOUND).unwrap();
    assert_eq!(p.iso.shift(), 0);
    assert!(p
        .iso
        .rep()
        .levelwise_equal(&TowerHom::identity(&f), 6)
        .unwrap());

    for t in [
        direct_sum(&f, &radius_three()).unwrap().tower,
        Tower::trivial(L),
        shift(&f, 2).unwrap(),
    ] {
        let p = phi_iso(&t, &h(), BOUND).unwrap();
        assert!(ar_is_isomorphism(&p.iso, BOUND).unwrap().is_yes());
        assert!(ar_is_isomorphism(&p.inverse, BOUND).unwrap().is_yes());
    }
}

#[test]
fn right_exactness_examples() {
    let f = zl();
    let id = ARMor::identity(&f);
    let to_zero = ARMor::zero(&f, &Tower::trivial(L));
    assert!(check_right_exact(&id, &to_zero, &h(), BOUND, 6).unwrap());

    let times_l = ARMor::from_hom(&TowerHom::scalar(&f, L));
    let reduce = ARMor::from_hom(&mod_power_projection(&f, 1).unwrap());
    assert!(check_right_exact(&times_l, &reduce, &h(), BOUND, 6).unwrap());

    // identity followed by reduction is not exact in the middle
    assert!(check_right_exact(&id, &reduce, &h(), BOUND, 6).is_err());
}

#[test]
fn faithfulness_examples() {
    let f = zl();
    let r = faithfulness_check(&ARMor::identity(&f), &h(), BOUND).unwrap();
    assert!(r.upsilon_iso && r.ar_iso && r.holds());

    let s = direct_sum(&f, &radius_three()).unwrap();
    let r = faithfulness_check(&ARMor::from_hom(&s.proj[0]), &h(), BOUND).unwrap();
    assert!(r.upsilon_iso && r.ar_iso && r.holds());

    let r = faithfulness_check(&ARMor::from_hom(&TowerHom::scalar(&f, L)), &h(), BOUND).unwrap();
    assert!(!r.upsilon_zero && !r.ar_zero && !r.upsilon_iso && r.holds());
}

#[test]
fn upsilon_is_additive() {
    let a = direct_sum(&zl(), &radius_three()).unwrap().tower;
    let b = to_tower(&ZlModule::new(L, vec![2], 0).unwrap());
    let s = direct_sum(&a, &b).unwrap();
    let us = upsilon_with_bound(&s.tower, &h(), BOUND)
        .unwrap()
        .normal_form()
        .unwrap();
    let ua = upsilon_with_bound(&a, &h(), BOUND)
        .unwrap()
        .normal_form()
        .unwrap();
    let ub = upsilon_with_bound(&b, &h(), BOUND)
        .unwrap()
        .normal_form()
        .unwrap();
    assert!(us.same_canonical_form(&ua.direct_sum(&ub).unwrap()));
}

#[test]
fn upsilon_does_not_depend_on_ml_bound() {
    let s = direct_sum(&zl(), &radius_three()).unwrap();
    assert!(independence_check(&s.tower, BOUND, 2).unwrap());
    assert!(independence_check(&zl(), BOUND, 2).unwrap());
}

#[test]
fn upsilon_mor_is_functorial() {
    let f = zl();
    let s = direct_sum(&f, &radius_three()).unwrap();
    let a = ARMor::from_hom(&s.proj[0]);
    let b = ARMor::from_hom(&TowerHom::scalar(&f, L));
    let ba = ar_compose(&b, &a).unwrap();
    let lhs = upsilon_mor(&ba, &h(), BOUND).unwrap();
    let ua = upsilon_mor(&a, &h(), BOUND).unwrap();
    let ub = upsilon_mor(&b, &h(), BOUND).unwrap();
    let rhs = ub.hom.compose(&ua.hom).unwrap();
    assert!(lhs.hom.levelwise_equal(&rhs, 6).unwrap());
}

#[test]
fn upsilon_mor_only_depends_on_the_class() {
    let f = zl();
    let m = TowerHom::scalar(&f, 2);
    let a = ARMor::from_hom(&m);
    let b = ARMor::new(&f, &f, 2, m.compose(&natural_map(&f, 2).unwrap()).unwrap()).unwrap();
    let ua = upsilon_mor(&a, &h(), BOUND).unwrap();
    let ub = upsilon_mor(&b, &h(), BOUND).unwrap();
    assert!(ua.hom.levelwise_equal(&ub.hom, 6).unwrap());
}

#[test]
fn psi_upsilon_of_l_adic_is_literal() {
    let t = to_tower(&ZlModule::new(L, vec![1, 3], 2).unwrap());
    let back = psi(&upsilon_with_bound(&t, &h(), BOUND).unwrap());
    assert!(back.levelwise_equal(&t, 6).unwrap());
    assert!(limit(&back)
        .unwrap()
        .same_canonical_form(&limit(&t).unwrap()));
}
