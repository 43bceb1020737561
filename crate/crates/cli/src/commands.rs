use std::collections::BTreeMap;
use std::path::Path;

use arl_core::abelian::{FinAbGroup, IntMatrix};
use arl_core::arcat::{ar_is_isomorphism, canonical_l_adic, certify_ar_l_adic};
use arl_core::gen::Sizes;
use arl_core::hyper::{psi, upsilon_with_bound, HyperNat, UpsilonObj};
use arl_core::suites::{replay, run_suite, Outcome, Suite, SuiteReport};
use arl_core::tower::{Tower, Verdict};
use arl_core::zl::{limit, ZlModule};
use arl_core::Error;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::file::Loaded;

/// What a command prints: a deterministic JSON body, a one-line summary and the exit code.
#[derive(Debug)]
pub struct Report {
    pub body: Value,
    pub summary: String,
    pub exit: u8,
}

impl Report {
    fn ok(body: Value, summary: String) -> Self {
        Report {
            body,
            summary,
            exit: 0,
        }
    }

    /// Pretty JSON followed by a newline; this is the part that must be reproducible.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}

fn matrix_json(m: &IntMatrix) -> Value {
    m.to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| Value::String(x.to_string()))
                .collect::<Value>()
        })
        .collect()
}

fn operators_json(ops: &BTreeMap<String, IntMatrix>) -> Value {
    ops.iter()
        .map(|(k, m)| (k.clone(), matrix_json(m)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn group_json(g: &FinAbGroup) -> Value {
    if g.operators().is_empty() {
        Value::String(g.to_string())
    } else {
        json!({ "group": g.to_string(), "operators": operators_json(g.operators()) })
    }
}

fn levels_json(t: &Tower, count: usize) -> Result<Value, CliError> {
    Ok((0..count)
        .map(|n| t.level(n).map(|g| group_json(&g)))
        .collect::<Result<Vec<_>, _>>()?
        .into())
}

fn module_json(m: &ZlModule) -> Value {
    json!({
        "module": m.to_string(),
        "torsion": m.torsion_exponents(),
        "free_rank": m.free_rank(),
        "operators": operators_json(m.operators()),
        "operator_precision": m.operator_precision(),
    })
}

pub fn normalize(
    file: &Loaded,
    name: &str,
    levels: usize,
    bound: usize,
) -> Result<Report, CliError> {
    let f = file.tower(name)?;
    let witness = match certify_ar_l_adic(&f, bound)? {
        Verdict::Yes(w) => w,
        Verdict::No(n) => {
            return Err(Error::NotArLAdic {
                reason: format!(
                    "image ranks {:?} keep growing at shift {}",
                    n.ranks, n.shift
                ),
            }
            .into())
        }
        Verdict::Unknown { checked_through } => {
            return Err(Error::NotArLAdic {
                reason: format!(
                    "no certificate within bound {bound} (checked through level {checked_through})"
                ),
            }
            .into())
        }
    };
    let c = canonical_l_adic(&f, bound)?;
    let iso = match ar_is_isomorphism(&c.iso, bound)? {
        Verdict::Yes(cert) => serde_json::to_value(cert).expect("plain data"),
        other => {
            return Err(Error::NotArLAdic {
                reason: format!("replacement is not an AR-isomorphism: {}", other.label()),
            }
            .into())
        }
    };
    let body = json!({
        "command": "normalize",
        "tower": name,
        "l": file.l,
        "bound": bound,
        "shift": c.shift(),
        "ml_bound": c.ml_bound,
        "offset": c.offset,
        "levels": levels_json(&c.g, levels)?,
        "certificates": {
            "ar_iso": iso,
            "kernel": serde_json::to_value(&c.kernel_cert).expect("plain data"),
            "l_adic": serde_json::to_value(&c.l_adic).expect("plain data"),
            "epi": { "shift": witness.shift, "kernel": serde_json::to_value(&witness.kernel_cert).expect("plain data") },
        },
    });
    Ok(Report::ok(
        body,
        format!(
            "{name}: canonical l-adic replacement at shift {}",
            c.shift()
        ),
    ))
}

pub fn limit_cmd(file: &Loaded, name: &str, bound: usize) -> Result<Report, CliError> {
    let f = file.tower(name)?;
    let c = canonical_l_adic(&f, bound)?;
    let m = limit(&c.g)?;
    let body = json!({
        "command": "limit",
        "tower": name,
        "l": file.l,
        "bound": bound,
        "limit": module_json(&m),
    });
    Ok(Report::ok(body, format!("{name}: {m}")))
}

/// Parses an index expression, insisting it is infinite and uses declared symbols.
pub fn parse_index(file: &Loaded, text: &str) -> Result<HyperNat, CliError> {
    let h: HyperNat = text.parse()?;
    if let Some(s) = h
        .coefficients()
        .keys()
        .find(|s| !file.symbols.is_empty() && s.as_str() != "h" && !file.symbols.contains(*s))
    {
        return Err(CliError::Usage(format!(
            "symbol '{s}' is not declared in the file"
        )));
    }
    if !h.is_infinite() {
        return Err(Error::FiniteIndex {
            index: h.to_string(),
        }
        .into());
    }
    Ok(h)
}

fn upsilon_of(
    file: &Loaded,
    name: &str,
    h: &str,
    bound: usize,
) -> Result<(HyperNat, UpsilonObj), CliError> {
    let h = parse_index(file, h)?;
    let f = file.tower(name)?;
    let u = upsilon_with_bound(&f, &h, bound)?;
    Ok((h, u))
}

pub fn upsilon_cmd(
    file: &Loaded,
    name: &str,
    h: &str,
    levels: usize,
    bound: usize,
) -> Result<Report, CliError> {
    let (h, u) = upsilon_of(file, name, h, bound)?;
    let quotients = (1..=levels)
        .map(|k| u.quotient(k).map(|g| group_json(&g)))
        .collect::<Result<Vec<_>, _>>()?;
    let form = u.normal_form()?;
    let body = json!({
        "command": "upsilon",
        "tower": name,
        "l": file.l,
        "bound": bound,
        "h": h.to_string(),
        "index": u.star().index().to_string(),
        "annihilator": u.annihilator().to_string(),
        "shift": u.shift(),
        "base": levels_json(u.base(), levels)?,
        "normal_form": module_json(&form),
        "quotients": quotients,
    });
    Ok(Report::ok(
        body,
        format!("{name}: base at index {}, limit {form}", u.star().index()),
    ))
}

pub fn psi_cmd(
    file: &Loaded,
    name: &str,
    h: &str,
    levels: usize,
    bound: usize,
) -> Result<Report, CliError> {
    let (h, u) = upsilon_of(file, name, h, bound)?;
    let t = psi(&u);
    let body = json!({
        "command": "psi",
        "tower": name,
        "l": file.l,
        "bound": bound,
        "h": h.to_string(),
        "levels": levels_json(&t, levels)?,
    });
    Ok(Report::ok(body, format!("{name}: psi at {h}")))
}

pub fn verify(
    suite: Suite,
    seed: u64,
    cases: u64,
    levels: usize,
    bound: usize,
) -> Result<Report, CliError> {
    let sizes = Sizes {
        levels,
        ..Sizes::default()
    };
    let r = run_suite(suite, seed, cases, sizes, bound)?;
    let summary = format!(
        "{suite}: {} pass, {} fail, {} unknown",
        r.passed, r.failed, r.unknown
    );
    let exit = if r.all_passed() { 0 } else { 1 };
    let body = json!({
        "command": format!("verify --suite {suite} --seed {seed} --cases {cases} --levels {levels}"),
        "report": r,
    });
    Ok(Report {
        body,
        summary,
        exit,
    })
}

/// Re-runs a saved `verify` report. Accepts either the full body or the bare report.
pub fn verify_replay(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed report: {e}")))?;
    let inner = value.get("report").cloned().unwrap_or(value);
    let r: SuiteReport = serde_json::from_value(inner)
        .map_err(|e| CliError::Usage(format!("malformed report: {e}")))?;
    let mismatched = replay(&r);
    let not_passing: Vec<u64> = r
        .cases
        .iter()
        .filter(|c| c.outcome != Outcome::Pass)
        .map(|c| c.index)
        .collect();
    let exit = if mismatched.is_empty() && not_passing.is_empty() {
        0
    } else {
        1
    };
    let summary = format!(
        "{}: replayed {} cases, {} mismatched, {} not passing",
        r.suite,
        r.cases.len(),
        mismatched.len(),
        not_passing.len()
    );
    let body = json!({
        "command": "verify --replay",
        "suite": r.suite,
        "seed": r.seed,
        "cases": r.cases.len(),
        "mismatched": mismatched,
        "not_passing": not_passing,
    });
    Ok(Report {
        body,
        summary,
        exit,
    })
}
