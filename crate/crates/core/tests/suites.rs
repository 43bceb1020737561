use arl_core::gen::Sizes;
use arl_core::suites::*;

#[test]
fn every_suite_passes_a_small_run() {
    for s in Suite::ALL {
        let r = run_suite(s, 7, 12, Sizes::default(), 8).unwrap();
        for c in &r.cases {
            assert_eq!(
                c.outcome,
                Outcome::Pass,
                "{s} case {}: {:?} {:?}",
                c.index,
                c.witness,
                c.shrunk
            );
        }
    }
}

#[test]
fn reports_replay_identically() {
    let r = run_suite(Suite::Faithful, 3, 8, Sizes::default(), 8).unwrap();
    assert!(replay(&r).is_empty());
    let again = run_suite(Suite::Faithful, 3, 8, Sizes::default(), 8).unwrap();
    assert_eq!(
        serde_json::to_string(&r).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn small_exhaustive_torsion_criterion() {
    let (pairs, failures) = torsion_criterion_exhaustive(&[2], 2, 1).unwrap();
    assert_eq!(pairs, 16);
    assert!(failures.is_empty(), "{failures:?}");
}
