use arl_core::abelian::{FinAbGroup, GroupHom, IntMatrix};
use arl_core::hyper::{upsilon_with_bound, HyperNat};
use arl_core::tower::*;
use arl_core::zl::*;

const L: u64 = 3;
const BOUND: usize = 8;

fn module(torsion: &[u32], free: usize) -> ZlModule {
    ZlModule::new(L, torsion.to_vec(), free).unwrap()
}

fn zl() -> Tower {
    to_tower(&ZlModule::free(L, 1))
}

fn radius_three() -> Tower {
    let g = FinAbGroup::l_group(L, &[1]);
    let id = GroupHom::identity(&g);
    Tower::new(L, vec![g; 3], vec![id; 2], TailRule::ZeroTail { start: 3 }).unwrap()
}

fn constant_identity() -> Tower {
    let g = FinAbGroup::l_group(L, &[1]);
    Tower::constant(L, g.clone(), GroupHom::identity(&g)).unwrap()
}

fn h() -> HyperNat {
    "h".parse().unwrap()
}

#[test]
fn limit_examples() {
    assert!(limit(&zl())
        .unwrap()
        .same_canonical_form(&ZlModule::free(L, 1)));
    assert!(limit(&constant_identity())
        .unwrap()
        .same_canonical_form(&module(&[1], 0)));

    // Z/l^{min(2,n+1)} ⊕ Z/l^{n+1}, given explicitly on levels 0..5
    let levels: Vec<_> = (0..6u32)
        .map(|n| FinAbGroup::l_group(L, &[(n + 1).min(2), n + 1]))
        .collect();
    let transitions = (1..6)
        .map(|n| GroupHom::diagonal_projection(&levels[n], &levels[n - 1]).unwrap())
        .collect();
    let t = Tower::new(L, levels, transitions, TailRule::Truncated).unwrap();
    let m = limit(&t).unwrap();
    assert_eq!(m.to_string(), "Z/l^2 + Zl^1");
    assert_eq!(rank_ql(&m), 1);
}

#[test]
fn limit_rejects_non_l_adic() {
    assert!(matches!(
        limit(&radius_three()),
        Err(arl_core::Error::NotLAdic { .. })
    ));
}

#[test]
fn to_tower_examples() {
    let t = to_tower(&ZlModule::free(L, 1));
    for n in 0..5 {
        assert_eq!(t.level(n).unwrap().l_exponents(L), vec![n as u32 + 1]);
    }
    let t = to_tower(&module(&[2], 0));
    let exps: Vec<_> = (0..4).map(|n| t.level(n).unwrap().l_exponents(L)).collect();
    assert_eq!(exps, vec![vec![1], vec![2], vec![2], vec![2]]);
    let t = to_tower(&ZlModule::zero(L));
    for n in 0..4 {
        assert!(t.level(n).unwrap().is_trivial());
    }
}

#[test]
fn rank_examples() {
    assert_eq!(rank_ql(&ZlModule::free(L, 1)), 1);
    assert_eq!(rank_ql(&module(&[5], 2)), 2);
    assert_eq!(rank_ql(&ZlModule::zero(L)), 0);
}

#[test]
fn round_trips() {
    for torsion in [vec![], vec![1], vec![2, 5], vec![1, 1, 3]] {
        for free in 0..3 {
            let m = module(&torsion, free);
            let t = to_tower(&m);
            assert!(limit(&t).unwrap().same_canonical_form(&m), "{m}");
            let back = to_tower(&limit(&t).unwrap());
            for n in 0..7 {
                assert!(back.level(n).unwrap().is_isomorphic(&t.level(n).unwrap()));
            }
        }
    }
}

#[test]
fn tensor_examples() {
    let u = upsilon_with_bound(&zl(), &h(), BOUND).unwrap();
    assert!(tensor_zl(&u)
        .unwrap()
        .same_canonical_form(&ZlModule::free(L, 1)));
    let u = upsilon_with_bound(&constant_identity(), &h(), BOUND).unwrap();
    assert!(tensor_zl(&u).unwrap().same_canonical_form(&module(&[1], 0)));
    let s = direct_sum(&to_tower(&module(&[2], 1)), &radius_three()).unwrap();
    let u = upsilon_with_bound(&s.tower, &h(), BOUND).unwrap();
    assert!(tensor_zl(&u).unwrap().same_canonical_form(&module(&[2], 1)));
}

fn frobenius_tower(c: i64) -> Tower {
    let m = ZlModule::free(L, 1)
        .with_operator("frob", IntMatrix::from_i64(&[&[c]]))
        .unwrap();
    to_tower(&m)
}

#[test]
fn comparison_examples() {
    let mut input = CohomologyTowerInput::default();
    input.degrees.insert(0, frobenius_tower(2));
    input.degrees.insert(
        1,
        direct_sum(&frobenius_tower(4), &radius_three().extended_to(3).unwrap())
            .unwrap()
            .tower,
    );
    input.degrees.insert(2, Tower::trivial(L));
    let r = comparison_check(&input, 0, BOUND).unwrap();
    assert!(r.isomorphic);
    assert_eq!(r.left.operators()["frob"], IntMatrix::from_i64(&[&[2]]));
    let r = comparison_check(&input, 1, BOUND).unwrap();
    assert!(r.isomorphic, "{r:?}");
    assert_eq!(r.left.free_rank(), 1);
    let r = comparison_check(&input, 2, BOUND).unwrap();
    assert!(r.isomorphic && r.left.is_zero() && r.right.is_zero());
    assert!(comparison_check(&input, 7, BOUND).is_err());
}

#[test]
fn torsion_criterion_examples() {
    let c = ladic_iff_torsionfree(&ZlModule::free(L, 1), &ZlModule::free(L, 2)).unwrap();
    assert!(c.l_adic && c.torsion_free && c.verdict());
    let c = ladic_iff_torsionfree(&ZlModule::free(L, 1), &module(&[1], 0)).unwrap();
    assert!(!c.l_adic && !c.torsion_free && c.verdict());
    assert!(c.witness.is_some());
    let c = ladic_iff_torsionfree(&ZlModule::zero(L), &ZlModule::zero(L)).unwrap();
    assert!(c.l_adic && c.verdict());
}
