//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Every check is exact; the time limits are part of each criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use arl_core::abelian::{invariant_factors_by_minors, smith_normal_form, IntMatrix};
use arl_core::arcat::canonical_l_adic;
use arl_core::gen::{
    case_rng, random_ar_exact, random_ar_l_adic, random_matrix, random_module_hom, random_prime,
    random_zl_module, Sizes,
};
use arl_core::hyper::{check_right_exact, independence_check, psi, upsilon_with_bound, HyperNat};
use arl_core::suites::{run_suite, torsion_criterion_exhaustive, Suite, SuiteReport};
use arl_core::zl::{limit, tensor_zl, to_tower};
use num_bigint::BigInt;
use rand::Rng;

const SEED: u64 = 20_240_517;
const BOUND: usize = 8;

struct Line {
    name: &'static str,
    ok: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn criterion(
    name: &'static str,
    limit_secs: u64,
    run: impl FnOnce() -> Result<String, String>,
) -> Line {
    let start = Instant::now();
    let result = run();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (ok, detail) = match result {
        Ok(d) => (elapsed <= limit, d),
        Err(d) => (false, d),
    };
    Line {
        name,
        ok,
        detail,
        elapsed,
        limit,
    }
}

fn h() -> HyperNat {
    HyperNat::symbol("h").unwrap()
}

fn all_pass(r: &SuiteReport) -> Result<String, String> {
    let msg = format!(
        "{} pass, {} fail, {} unknown",
        r.passed, r.failed, r.unknown
    );
    if r.all_passed() {
        Ok(msg)
    } else {
        let first = r
            .cases
            .iter()
            .find(|c| c.outcome != arl_core::suites::Outcome::Pass);
        Err(format!("{msg}; first: {first:?}"))
    }
}

fn suite(s: Suite, cases: u64) -> Result<SuiteReport, String> {
    run_suite(s, SEED, cases, Sizes::default(), BOUND).map_err(|e| e.to_string())
}

fn is_unit(x: &BigInt) -> bool {
    *x == BigInt::from(1) || *x == BigInt::from(-1)
}

fn snf_oracle() -> Result<String, String> {
    let mut rng = case_rng(SEED, 0);
    for i in 0..1000 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m = random_matrix(&mut rng, r, c, 10);
        let s = smith_normal_form(&m);
        let d = s.diagonal();
        let chain = d.windows(2).all(|w| {
            w[1] == BigInt::from(0)
                || (w[0] != BigInt::from(0) && (&w[1] % &w[0]) == BigInt::from(0))
        });
        let ok = s.u.mul(&m).mul(&s.v) == s.d
            && s.d.is_diagonal()
            && is_unit(&s.u.determinant())
            && is_unit(&s.v.determinant())
            && s.u.mul(&s.u_inv) == IntMatrix::identity(r)
            && s.v.mul(&s.v_inv) == IntMatrix::identity(c)
            && d.iter().all(|x| *x >= BigInt::from(0))
            && chain
            && d == invariant_factors_by_minors(&m);
        if !ok {
            return Err(format!("matrix {i}: {m}"));
        }
    }
    Ok("1000 matrices: UMV = D, unimodular, divisibility chain, minors oracle".into())
}

fn upsilon_normal_form() -> Result<String, String> {
    let mut rng = case_rng(SEED, 1);
    for i in 0..100 {
        let l = random_prime(&mut rng, &[2, 3, 5]);
        let m = random_zl_module(&mut rng, l, 3, 3);
        let m = if rng.gen_bool(0.5) {
            let frob = random_module_hom(&mut rng, &m, &m);
            m.with_operator("frob", frob).map_err(|e| e.to_string())?
        } else {
            m
        };
        let t = to_tower(&m);
        let back = psi(&upsilon_with_bound(&t, &h(), BOUND).map_err(|e| e.to_string())?);
        if !back
            .levelwise_equal(&t, t.settled_from() + 3)
            .map_err(|e| e.to_string())?
        {
            return Err(format!(
                "l-adic tower {i} ({m:?}) changed under psi(upsilon)"
            ));
        }
    }
    let r = all_pass(&suite(Suite::Phi, 100)?)?;
    Ok(format!("100 l-adic towers recovered exactly; phi: {r}"))
}

fn choice_independence() -> Result<String, String> {
    let mut rng = case_rng(SEED, 2);
    for i in 0..100 {
        let l = random_prime(&mut rng, &[2, 3, 5]);
        let inst = random_ar_l_adic(&mut rng, l, Sizes::default());
        if !independence_check(&inst.tower, BOUND, 2).map_err(|e| e.to_string())? {
            return Err(format!(
                "instance {i} ({:?}) depends on the ML bound",
                inst.kind
            ));
        }
    }
    Ok("100 instances, bounds s and s+2 agree".into())
}

fn right_exactness() -> Result<String, String> {
    let mut rng = case_rng(SEED, 3);
    for i in 0..100 {
        let l = random_prime(&mut rng, &[2, 3, 5]);
        let (f, g) = random_ar_exact(&mut rng, l, Sizes::default()).map_err(|e| e.to_string())?;
        if !check_right_exact(&f, &g, &h(), BOUND, 6).map_err(|e| e.to_string())? {
            return Err(format!("sequence {i} is not exact after upsilon"));
        }
    }
    Ok("100 AR-exact sequences exact at levels 0..6".into())
}

fn zl_equivalence() -> Result<String, String> {
    let mut rng = case_rng(SEED, 4);
    for i in 0..200 {
        let l = random_prime(&mut rng, &[2, 3, 5]);
        let m = random_zl_module(&mut rng, l, 5, 3);
        let back = limit(&to_tower(&m)).map_err(|e| e.to_string())?;
        if !back.same_canonical_form(&m) {
            return Err(format!("module {i}: {m} came back as {back}"));
        }
    }
    let mut kinds = [0usize; 4];
    for i in 0..100 {
        let l = random_prime(&mut rng, &[2, 3, 5]);
        let inst = random_ar_l_adic(&mut rng, l, Sizes::default());
        kinds[inst.kind as usize] += 1;
        let err = |e: arl_core::Error| e.to_string();
        let tensor =
            tensor_zl(&upsilon_with_bound(&inst.tower, &h(), BOUND).map_err(err)?).map_err(err)?;
        let direct = limit(&canonical_l_adic(&inst.tower, BOUND).map_err(err)?.g).map_err(err)?;
        if !tensor.same_canonical_form(&direct) || !direct.same_canonical_form(&inst.module) {
            return Err(format!(
                "instance {i}: tensor {tensor}, limit {direct}, built from {}",
                inst.module
            ));
        }
    }
    Ok(format!("200 modules round-trip; 100 AR-l-adic towers agree (l-adic, +zero system, shifted, +constant: {kinds:?})"))
}

fn cli_determinism() -> Result<String, String> {
    let run = |s: &str| {
        Command::new(env!("CARGO_BIN_EXE_arl"))
            .args(["verify", "--suite", s, "--seed", "11", "--cases", "25"])
            .env_remove("ARL_DEFAULT_BOUND")
            .output()
            .map_err(|e| e.to_string())
    };
    for s in Suite::ALL {
        let (a, b) = (run(s.name())?, run(s.name())?);
        if !a.status.success() || a.stdout.is_empty() {
            return Err(format!(
                "{s}: exit {:?}: {}",
                a.status.code(),
                String::from_utf8_lossy(&a.stderr)
            ));
        }
        if a.stdout != b.stdout {
            return Err(format!("{s}: report bodies differ"));
        }
    }
    Ok(format!(
        "{} suites, two runs each, byte-identical stdout",
        Suite::ALL.len()
    ))
}

fn main() -> ExitCode {
    let total = Instant::now();
    let lines = [
        criterion("snf-oracle", 10, snf_oracle),
        criterion("lemma-kernel", 60, || {
            all_pass(&suite(Suite::LemmaKernel, 200)?)
        }),
        criterion("ml-property", 30, || all_pass(&suite(Suite::Ml, 200)?)),
        criterion("upsilon-normal-form", 60, upsilon_normal_form),
        criterion("choice-independence", 30, choice_independence),
        criterion("faithfulness", 60, || {
            all_pass(&suite(Suite::Faithful, 100)?)
        }),
        criterion("right-exactness", 60, right_exactness),
        criterion("zl-equivalence", 60, zl_equivalence),
        criterion("torsion-criterion", 30, || {
            let (pairs, failures) =
                torsion_criterion_exhaustive(&[2, 3], 3, 2).map_err(|e| e.to_string())?;
            if failures.is_empty() {
                Ok(format!(
                    "all {pairs} pairs, exponents <= 3, rank <= 2, l in {{2, 3}}"
                ))
            } else {
                Err(format!(
                    "{} of {pairs} pairs fail, first {}",
                    failures.len(),
                    failures[0]
                ))
            }
        }),
        criterion("cli-determinism", 60, cli_determinism),
    ];
    for l in &lines {
        println!(
            "{} {:<20} {:>7.2}s (limit {}s)  {}",
            if l.ok { "PASS" } else { "FAIL" },
            l.name,
            l.elapsed.as_secs_f64(),
            l.limit.as_secs(),
            l.detail
        );
    }
    let total = total.elapsed();
    let in_time = total <= Duration::from_secs(300);
    println!(
        "{} {:<20} {:>7.2}s (limit 300s)",
        if in_time { "PASS" } else { "FAIL" },
        "total-runtime",
        total.as_secs_f64()
    );
    if lines.iter().all(|l| l.ok) && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
