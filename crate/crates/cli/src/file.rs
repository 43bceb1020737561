//! `.arl.json` tower description files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "l": 3,
//!   "symbols": ["d1"],
//!   "groups": { "A": { "exponents": [1] }, "B": { "exponents": [2] } },
//!   "homs": { "p": { "source": "B", "target": "A", "matrix": [[1]] } },
//!   "towers": {
//!     "T": { "kind": "explicit", "levels": ["A", "B"], "transitions": ["p"],
//!            "tail": { "rule": "eventually_ladic", "start": 1, "module": "Zl" } },
//!     "M": { "kind": "module", "module": "Zl + Z/l^2" },
//!     "S": { "kind": "sum", "of": ["T", "M"] }
//!   }
//! }
//! ```
//!
//! Matrix entries are JSON integers or decimal strings for values past `i64`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use arl_core::abelian::{FinAbGroup, GroupHom, IntMatrix};
use arl_core::tower::{direct_sum, shift, TailRule, Tower};
use arl_core::zl::{parse_zl_module, to_tower};
use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub version: u32,
    pub l: u64,
    /// Names usable in `--h` expressions besides `h`; empty means any.
    #[serde(default)]
    pub symbols: Vec<String>,
    #[serde(default)]
    pub groups: BTreeMap<String, GroupDecl>,
    #[serde(default)]
    pub homs: BTreeMap<String, HomDecl>,
    pub towers: BTreeMap<String, TowerDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDecl {
    /// `Z/l^{a_1} ⊕ ... ⊕ Z/l^{a_k}`.
    pub exponents: Vec<u32>,
    #[serde(default)]
    pub operators: BTreeMap<String, Vec<Vec<Entry>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDecl {
    pub source: String,
    pub target: String,
    pub matrix: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Small(i64),
    Big(String),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TowerDecl {
    Explicit {
        levels: Vec<String>,
        #[serde(default)]
        transitions: Vec<String>,
        #[serde(default)]
        tail: TailDecl,
    },
    /// `(Λ/l^{n+1})_n` for a module in textual form.
    Module {
        module: String,
    },
    Sum {
        of: Vec<String>,
    },
    Shift {
        of: String,
        by: usize,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailDecl {
    #[default]
    Truncated,
    Zero {
        start: usize,
    },
    EventuallyLadic {
        start: usize,
        module: String,
    },
    Constant {
        endo: String,
    },
}

/// A parsed file with every group and hom validated.
#[derive(Debug)]
pub struct Loaded {
    pub l: u64,
    pub symbols: BTreeSet<String>,
    groups: BTreeMap<String, FinAbGroup>,
    homs: BTreeMap<String, GroupHom>,
    decls: BTreeMap<String, TowerDecl>,
}

fn invalid(context: impl Into<String>, source: arl_core::Error) -> CliError {
    CliError::Invalid {
        context: context.into(),
        source,
    }
}

fn matrix(rows: &[Vec<Entry>], cols: usize, context: &str) -> Result<IntMatrix, CliError> {
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(CliError::Usage(format!(
                "{context}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(cols);
        for (j, e) in row.iter().enumerate() {
            out.push(match e {
                Entry::Small(v) => BigInt::from(*v),
                Entry::Big(s) => s.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "{context}: entry at row {i}, col {j} is not an integer: '{s}'"
                    ))
                })?,
            });
        }
        parsed.push(out);
    }
    IntMatrix::from_rows(&parsed, cols).map_err(|e| invalid(context, e))
}

impl TowerFile {
    pub fn parse(text: &str) -> Result<TowerFile, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("malformed tower file: {e}")))
    }

    pub fn load(self) -> Result<Loaded, CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Usage(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        let l = self.l;
        if !arl_core::is_prime(l) {
            return Err(invalid("l", arl_core::Error::NotPrime { l }));
        }
        let mut groups = BTreeMap::new();
        for (name, g) in &self.groups {
            let mut group = FinAbGroup::l_group(l, &g.exponents);
            for (label, rows) in &g.operators {
                let ctx = format!("operator '{label}' on group '{name}'");
                let m = matrix(rows, group.rank(), &ctx)?;
                group = group
                    .with_operator(label.clone(), m)
                    .map_err(|e| invalid(ctx, e))?;
            }
            groups.insert(name.clone(), group);
        }
        let group = |name: &str, ctx: &str| {
            groups
                .get(name)
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("{ctx}: unknown group '{name}'")))
        };
        let mut homs = BTreeMap::new();
        for (name, h) in &self.homs {
            let ctx = format!("hom '{name}'");
            let source = group(&h.source, &ctx)?;
            let target = group(&h.target, &ctx)?;
            if h.matrix.len() != target.rank() {
                return Err(CliError::Usage(format!(
                    "{ctx}: matrix has {} rows, target '{}' has rank {}",
                    h.matrix.len(),
                    h.target,
                    target.rank()
                )));
            }
            let m = matrix(&h.matrix, source.rank(), &ctx)?;
            let hom = GroupHom::new(source, target, m).map_err(|e| invalid(ctx, e))?;
            homs.insert(name.clone(), hom);
        }
        let loaded = Loaded {
            l,
            symbols: self.symbols.into_iter().collect(),
            groups,
            homs,
            decls: self.towers,
        };
        // build every tower once so bad files fail at load time
        for name in loaded.decls.keys() {
            loaded.tower(name)?;
        }
        Ok(loaded)
    }
}

pub fn load_path(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    TowerFile::parse(&text)?.load()
}

impl Loaded {
    pub fn tower_names(&self) -> impl Iterator<Item = &str> {
        self.decls.keys().map(String::as_str)
    }

    pub fn tower(&self, name: &str) -> Result<Tower, CliError> {
        self.build(name, &mut Vec::new())
    }

    fn hom(&self, name: &str, ctx: &str) -> Result<GroupHom, CliError> {
        self.homs
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{ctx}: unknown hom '{name}'")))
    }

    fn build(&self, name: &str, stack: &mut Vec<String>) -> Result<Tower, CliError> {
        if stack.iter().any(|s| s == name) {
            stack.push(name.to_string());
            return Err(CliError::Usage(format!(
                "towers refer to each other: {}",
                stack.join(" -> ")
            )));
        }
        let decl = self
            .decls
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown tower '{name}'")))?;
        let ctx = format!("tower '{name}'");
        stack.push(name.to_string());
        let tower = match decl {
            TowerDecl::Explicit {
                levels,
                transitions,
                tail,
            } => {
                let levels = levels
                    .iter()
                    .map(|g| {
                        self.groups
                            .get(g)
                            .cloned()
                            .ok_or_else(|| CliError::Usage(format!("{ctx}: unknown group '{g}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let transitions = transitions
                    .iter()
                    .map(|h| self.hom(h, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                let tail = match tail {
                    TailDecl::Truncated => TailRule::Truncated,
                    TailDecl::Zero { start } => TailRule::ZeroTail { start: *start },
                    TailDecl::EventuallyLadic { start, module } => TailRule::EventuallyLAdic {
                        start: *start,
                        module: parse_zl_module(self.l, module).map_err(|e| invalid(&ctx, e))?,
                    },
                    TailDecl::Constant { endo } => TailRule::Constant {
                        endo: self.hom(endo, &ctx)?,
                    },
                };
                Tower::new(self.l, levels, transitions, tail).map_err(|e| invalid(&ctx, e))?
            }
            TowerDecl::Module { module } => {
                to_tower(&parse_zl_module(self.l, module).map_err(|e| invalid(&ctx, e))?)
            }
            TowerDecl::Sum { of } => {
                let mut parts = of.iter();
                let first = parts.next().ok_or_else(|| {
                    CliError::Usage(format!("{ctx}: a sum needs at least one summand"))
                })?;
                let mut acc = self.build(first, stack)?;
                for p in parts {
                    let next = self.build(p, stack)?;
                    acc = direct_sum(&acc, &next).map_err(|e| invalid(&ctx, e))?.tower;
                }
                acc
            }
            TowerDecl::Shift { of, by } => {
                shift(&self.build(of, stack)?, *by).map_err(|e| invalid(&ctx, e))?
            }
        };
        stack.pop();
        Ok(tower)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIXED: &str = r#"{
        "version": 1, "l": 3,
        "groups": { "A": { "exponents": [1] }, "B": { "exponents": [2] } },
        "homs": { "p": { "source": "B", "target": "A", "matrix": [[1]] } },
        "towers": {
            "T": { "kind": "explicit", "levels": ["A", "B"], "transitions": ["p"],
                   "tail": { "rule": "eventually_ladic", "start": 1, "module": "Zl" } },
            "M": { "kind": "module", "module": "Z/l^2" },
            "S": { "kind": "sum", "of": ["T", "M"] },
            "R": { "kind": "shift", "of": "S", "by": 1 }
        }
    }"#;

    #[test]
    fn loads_all_declaration_kinds() {
        let f = TowerFile::parse(MIXED).unwrap().load().unwrap();
        let s = f.tower("R").unwrap();
        assert_eq!(s.level(0).unwrap().l_exponents(3), vec![2, 2]);
        assert_eq!(f.tower_names().count(), 4);
    }

    #[test]
    fn ill_defined_matrix_names_the_entry() {
        let text = MIXED.replace(
            r#""source": "B", "target": "A", "matrix": [[1]]"#,
            r#""source": "A", "target": "B", "matrix": [[1]]"#,
        );
        let err = TowerFile::parse(&text).unwrap().load().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("row 0, col 0"), "{err}");
    }

    #[test]
    fn ragged_rows_and_cycles_are_rejected() {
        let text = MIXED.replace(r#""matrix": [[1]]"#, r#""matrix": [[1, 2]]"#);
        let err = TowerFile::parse(&text).unwrap().load().unwrap_err();
        assert!(err.to_string().contains("row 0 has 2 entries"), "{err}");

        let text = MIXED.replace(r#""of": "S", "by": 1"#, r#""of": "R", "by": 1"#);
        let err = TowerFile::parse(&text).unwrap().load().unwrap_err();
        assert!(err.to_string().contains("R -> R"), "{err}");
    }

    #[test]
    fn big_entries_parse() {
        let text = MIXED.replace(
            r#""matrix": [[1]]"#,
            r#""matrix": [["100000000000000000000000000001"]]"#,
        );
        assert!(TowerFile::parse(&text).unwrap().load().is_ok());
    }
}
