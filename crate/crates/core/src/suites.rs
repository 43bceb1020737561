//! Randomized property suites with replayable certificates.
//!
//! Case `i` of a run with seed `s` is generated from `case_rng(s, i)` at a given
//! [`Sizes`]; its certificate is plain JSON, so a report can be re-run and
//! compared byte for byte. Failing cases are shrunk by regenerating at smaller
//! sizes, levels first and group orders second.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arcat::{
    ar_is_isomorphism, canonical_l_adic, kernel_bound_check, stable_image_bound, ARMor,
};
use crate::error::{Error, Result};
use crate::gen::{
    case_rng, random_ar_exact, random_ar_l_adic, random_ar_mor, random_exact_sequence,
    random_module_hom, random_prime, random_zl_module, ArKind, Sizes,
};
use crate::hyper::{
    check_right_exact, faithfulness_check, independence_check, phi_iso, psi, upsilon_with_bound,
    HyperNat,
};
use crate::tower::{is_zero_system, shift, stable_image, Tower, Verdict};
use crate::zl::{
    comparison_check, ladic_iff_torsionfree, limit, tensor_zl, to_tower, CohomologyTowerInput,
    ZlModule,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmaKernel,
    Ml,
    Upsilon,
    Phi,
    Faithful,
    Comparison,
    Torsionfree,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::LemmaKernel,
        Suite::Ml,
        Suite::Upsilon,
        Suite::Phi,
        Suite::Faithful,
        Suite::Comparison,
        Suite::Torsionfree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaKernel => "lemma-kernel",
            Suite::Ml => "ml",
            Suite::Upsilon => "upsilon",
            Suite::Phi => "phi",
            Suite::Faithful => "faithful",
            Suite::Comparison => "comparison",
            Suite::Torsionfree => "torsionfree",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub index: u64,
    pub sizes: Sizes,
    pub outcome: Outcome,
    pub certificate: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Smallest sizes that still fail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<Sizes>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub bound: usize,
    pub passed: usize,
    pub failed: usize,
    pub unknown: usize,
    pub cases: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.cases.len()
    }
}

/// Result of one property evaluation before it is wrapped into a [`CaseReport`].
struct Checked {
    outcome: Outcome,
    certificate: Value,
    witness: Option<String>,
}

impl Checked {
    fn verdict(ok: bool, certificate: Value, witness: impl FnOnce() -> String) -> Self {
        Checked {
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
            witness: (!ok).then(witness),
            certificate,
        }
    }

    fn unknown(certificate: Value, why: String) -> Self {
        Checked {
            outcome: Outcome::Unknown,
            certificate,
            witness: Some(why),
        }
    }
}

/// Runs `cases` cases of `suite` in parallel; results are ordered by case index.
pub fn run_suite(
    suite: Suite,
    seed: u64,
    cases: u64,
    sizes: Sizes,
    bound: usize,
) -> Result<SuiteReport> {
    if cases == 0 {
        return Err(Error::PreconditionViolated {
            context: "at least one case is required".into(),
        });
    }
    if sizes.levels < 2 || sizes.max_exp < 1 {
        return Err(Error::PreconditionViolated {
            context: format!(
                "sizes too small: {} levels, exponents up to {}",
                sizes.levels, sizes.max_exp
            ),
        });
    }
    let results: Vec<CaseReport> = (0..cases)
        .into_par_iter()
        .map(|index| run_case_shrinking(suite, seed, index, sizes, bound))
        .collect();
    Ok(summarize(suite, seed, bound, results))
}

fn summarize(suite: Suite, seed: u64, bound: usize, cases: Vec<CaseReport>) -> SuiteReport {
    let count = |o: Outcome| cases.iter().filter(|c| c.outcome == o).count();
    SuiteReport {
        suite,
        seed,
        bound,
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        unknown: count(Outcome::Unknown),
        cases,
    }
}

/// One case, shrunk when it fails.
pub fn run_case_shrinking(
    suite: Suite,
    seed: u64,
    index: u64,
    sizes: Sizes,
    bound: usize,
) -> CaseReport {
    let mut report = run_case(suite, seed, index, sizes, bound);
    if report.outcome == Outcome::Fail {
        let fails = |s: Sizes| run_case(suite, seed, index, s, bound).outcome == Outcome::Fail;
        report.shrunk = Some(shrink(sizes, fails));
    }
    report
}

/// Levels first, then exponents; each knob goes down while the failure persists.
pub fn shrink(mut sizes: Sizes, mut fails: impl FnMut(Sizes) -> bool) -> Sizes {
    while sizes.levels > 2 {
        let smaller = Sizes {
            levels: sizes.levels - 1,
            ..sizes
        };
        if !fails(smaller) {
            break;
        }
        sizes = smaller;
    }
    while sizes.max_exp > 1 {
        let smaller = Sizes {
            max_exp: sizes.max_exp - 1,
            ..sizes
        };
        if !fails(smaller) {
            break;
        }
        sizes = smaller;
    }
    sizes
}

pub fn run_case(suite: Suite, seed: u64, index: u64, sizes: Sizes, bound: usize) -> CaseReport {
    let mut rng = case_rng(seed, index);
    let checked = match suite {
        Suite::LemmaKernel => lemma_kernel(&mut rng, sizes),
        Suite::Ml => ml(&mut rng, sizes, bound),
        Suite::Upsilon => upsilon(&mut rng, sizes, bound),
        Suite::Phi => phi(&mut rng, sizes, bound),
        Suite::Faithful => faithful(&mut rng, sizes, bound),
        Suite::Comparison => comparison(&mut rng, sizes, bound),
        Suite::Torsionfree => torsionfree(&mut rng, sizes),
    };
    let checked = checked.unwrap_or_else(|e| Checked {
        outcome: Outcome::Fail,
        certificate: Value::Null,
        witness: Some(e.to_string()),
    });
    CaseReport {
        index,
        sizes,
        outcome: checked.outcome,
        certificate: checked.certificate,
        witness: checked.witness,
        shrunk: None,
    }
}

/// Re-runs every case of a report and lists the indices whose outcome or certificate changed.
pub fn replay(report: &SuiteReport) -> Vec<u64> {
    report
        .cases
        .par_iter()
        .filter(|c| {
            let again = run_case(report.suite, report.seed, c.index, c.sizes, report.bound);
            again.outcome != c.outcome || again.certificate != c.certificate
        })
        .map(|c| c.index)
        .collect()
}

const PRIMES: [u64; 3] = [2, 3, 5];

/// Right exactness is read on the quotients at levels `0..=6` at least.
const RIGHT_EXACT_THROUGH: usize = 6;

fn h() -> HyperNat {
    HyperNat::symbol("h").expect("valid symbol")
}

fn kind_name(k: ArKind) -> String {
    format!("{k:?}")
}

fn lemma_kernel(rng: &mut impl Rng, sizes: Sizes) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    let seq = random_exact_sequence(rng, l, sizes)?;
    let radius = match is_zero_system(&seq.n, seq.radius)? {
        Verdict::Yes(c) => c.radius,
        _ => {
            return Ok(Checked::verdict(false, json!({ "l": l }), || {
                format!(
                    "generated N is not a zero system within radius {}",
                    seq.radius
                )
            }))
        }
    };
    let top = 6.min(sizes.levels.saturating_sub(1));
    let mut checked = 0;
    for r in radius..=top {
        for m in 0..=top - r {
            for n in 0..=top - r - m {
                if !kernel_bound_check(&seq.n, &seq.f, &seq.g, &seq.incl, &seq.proj, r, m, n)? {
                    return Ok(Checked::verdict(
                        false,
                        json!({ "l": l, "radius": radius }),
                        || {
                            format!(
                                "image of the kernel escapes l^{}F at r={r}, m={m}, n={n}",
                                n + 1
                            )
                        },
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(Checked::verdict(
        true,
        json!({ "l": l, "radius": radius, "triples": checked }),
        String::new,
    ))
}

fn ml(rng: &mut impl Rng, sizes: Sizes, bound: usize) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    let inst = random_ar_l_adic(rng, l, sizes);
    let cert = json!({ "l": l, "kind": kind_name(inst.kind) });
    let b = match stable_image_bound(&inst.tower, bound)? {
        Verdict::Yes(b) => b,
        other => {
            return Ok(Checked::unknown(
                cert,
                format!("no ML bound within {bound}: {}", other.label()),
            ))
        }
    };
    let through = b.checked_through + 2;
    let a = stable_image(&inst.tower, b.s)?.0;
    let c = stable_image(&inst.tower, b.s + 1)?.0;
    let same = a.levelwise_equal(&c, through)?;
    Ok(Checked::verdict(
        same,
        json!({ "l": l, "kind": kind_name(inst.kind), "s": b.s, "checked_through": through }),
        || format!("stable images at s={} and s+1 differ", b.s),
    ))
}

fn normal_form(f: &Tower, bound: usize) -> Result<ZlModule> {
    upsilon_with_bound(f, &h(), bound)?.normal_form()
}

fn upsilon(rng: &mut impl Rng, sizes: Sizes, bound: usize) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    let inst = random_ar_l_adic(rng, l, sizes);
    let independent = independence_check(&inst.tower, bound, 2)?;
    let (f, g) = random_ar_exact(rng, l, sizes)?;
    let exact = check_right_exact(&f, &g, &h(), bound, RIGHT_EXACT_THROUGH)?;
    let form = normal_form(&inst.tower, bound)?;
    Ok(Checked::verdict(
        independent && exact,
        json!({
            "l": l,
            "kind": kind_name(inst.kind),
            "normal_form": form.to_string(),
            "independent": independent,
            "right_exact": exact,
        }),
        || format!("independent={independent}, right_exact={exact}"),
    ))
}

fn phi(rng: &mut impl Rng, sizes: Sizes, bound: usize) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    let inst = random_ar_l_adic(rng, l, sizes);
    let p = phi_iso(&inst.tower, &h(), bound)?;
    let cert = json!({ "l": l, "kind": kind_name(inst.kind), "shift": p.iso.shift() });
    let iso = ar_is_isomorphism(&p.iso, bound)?;
    let Verdict::Yes(c) = iso else {
        return Ok(Checked::verdict(false, cert, || {
            format!("phi is not an AR-isomorphism: {}", iso.label())
        }));
    };
    // for l-adic input Ψ_h Υ_h L is L itself
    let literal = if inst.kind == ArKind::LAdic {
        let back = psi(&upsilon_with_bound(&inst.tower, &h(), bound)?);
        back.levelwise_equal(&inst.tower, inst.tower.settled_from() + 2)?
    } else {
        true
    };
    Ok(Checked::verdict(
        literal,
        json!({
            "l": l,
            "kind": kind_name(inst.kind),
            "shift": p.iso.shift(),
            "kernel_radius": c.kernel.radius,
            "cokernel_radius": c.cokernel.radius,
        }),
        || "psi(upsilon(L)) differs from L".into(),
    ))
}

fn faithful(rng: &mut impl Rng, sizes: Sizes, bound: usize) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    let f: ARMor = random_ar_mor(rng, l, sizes)?;
    let r = faithfulness_check(&f, &h(), bound)?;
    let ok = r.upsilon_zero == r.ar_zero && r.holds();
    Ok(Checked::verdict(
        ok,
        json!({ "l": l, "shift": f.shift(), "report": r }),
        || format!("{r:?}"),
    ))
}

fn comparison(rng: &mut impl Rng, sizes: Sizes, bound: usize) -> Result<Checked> {
    let l = random_prime(rng, &PRIMES);
    // the expected limit comes from the generator, not from the tower code
    let (tower, expected) = if rng.gen_bool(0.5) {
        // an l-adic tower carrying a Frobenius, possibly shifted
        let m = random_zl_module(rng, l, sizes.max_exp, 2);
        let frob = random_module_hom(rng, &m, &m);
        let base = to_tower(&m.clone().with_operator("frob", frob)?);
        let t = if rng.gen_bool(0.5) {
            shift(&base, rng.gen_range(1..=2))?
        } else {
            base
        };
        (t, m)
    } else {
        let inst = random_ar_l_adic(rng, l, sizes);
        (inst.tower, inst.module)
    };
    let mut input = CohomologyTowerInput::default();
    input.degrees.insert(0, tower.clone());
    let report = comparison_check(&input, 0, bound)?;
    let tensor = tensor_zl(&upsilon_with_bound(&tower, &h(), bound)?)?;
    let direct = limit(&canonical_l_adic(&tower, bound)?.g)?;
    let agree = tensor.same_canonical_form(&direct);
    let expected_ok = direct.without_operators() == expected.without_operators();
    Ok(Checked::verdict(
        report.isomorphic && agree && expected_ok,
        json!({ "l": l, "left": format!("{:?}", report.left), "right": format!("{:?}", report.right) }),
        || {
            format!(
                "left={:?} right={:?} tensor={tensor:?} expected={expected}",
                report.left, report.right
            )
        },
    ))
}

fn torsionfree(rng: &mut impl Rng, sizes: Sizes) -> Result<Checked> {
    let l = random_prime(rng, &[2, 3]);
    let max_exp = sizes.max_exp.min(3);
    let current = random_zl_module(rng, l, max_exp, 2);
    let next = random_zl_module(rng, l, max_exp, 2);
    torsion_case(&current, &next)
}

fn torsion_case(current: &ZlModule, next: &ZlModule) -> Result<Checked> {
    let c = ladic_iff_torsionfree(current, next)?;
    Ok(Checked::verdict(
        c.verdict(),
        json!({
            "l": current.l(),
            "current": current.to_string(),
            "next": next.to_string(),
            "l_adic": c.l_adic,
            "witness": c.witness,
        }),
        || format!("l_adic={} but torsion_free={}", c.l_adic, c.torsion_free),
    ))
}

/// Every module with exponents `<= max_exp` and at most `max_rank` generators.
pub fn all_modules(l: u64, max_exp: u32, max_rank: usize) -> Vec<ZlModule> {
    // non-decreasing exponent lists, so each torsion part appears once
    let mut torsions: Vec<Vec<u32>> = vec![vec![]];
    let mut frontier = torsions.clone();
    for _ in 0..max_rank {
        let next: Vec<Vec<u32>> = frontier
            .iter()
            .flat_map(|t| {
                let from = t.last().copied().unwrap_or(1);
                (from..=max_exp).map(move |e| {
                    let mut u = t.clone();
                    u.push(e);
                    u
                })
            })
            .collect();
        torsions.extend(next.iter().cloned());
        frontier = next;
    }
    torsions
        .iter()
        .flat_map(|t| {
            (0..=max_rank - t.len())
                .map(move |free| ZlModule::new(l, t.clone(), free).expect("valid module"))
        })
        .collect()
}

/// The torsion criterion over every pair of small modules; returns `(pairs, failures)`.
pub fn torsion_criterion_exhaustive(
    primes: &[u64],
    max_exp: u32,
    max_rank: usize,
) -> Result<(usize, Vec<String>)> {
    let mut pairs = Vec::new();
    for &l in primes {
        let ms = all_modules(l, max_exp, max_rank);
        for a in &ms {
            for b in &ms {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let failures: Vec<String> = pairs
        .par_iter()
        .map(|(a, b)| {
            torsion_case(a, b)
                .map(|c| (c.outcome != Outcome::Pass).then(|| format!("l={} ({a}, {b})", a.l())))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((pairs.len(), failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn shrinking_goes_levels_first() {
        // fails whenever there are at least 4 levels and exponent 2
        let s = shrink(
            Sizes {
                levels: 8,
                max_exp: 3,
            },
            |s| s.levels >= 4 && s.max_exp >= 2,
        );
        assert_eq!(
            s,
            Sizes {
                levels: 4,
                max_exp: 2
            }
        );
    }

    #[test]
    fn zero_cases_are_rejected() {
        assert!(run_suite(Suite::Ml, 1, 0, Sizes::default(), 8).is_err());
    }

    #[test]
    fn module_enumeration_counts() {
        // rank <= 1 over exponents 1..=2: 0, Zl, Z/l, Z/l^2
        assert_eq!(all_modules(2, 2, 1).len(), 4);
        // rank <= 2 over exponents 1..=3: 3 + 3*2 + 6
        assert_eq!(all_modules(3, 3, 2).len(), 15);
    }
}
