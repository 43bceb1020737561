use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::abelian::{FinAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};

/// Finitely generated `Z_l`-module `⊕ Z/l^{a_i} ⊕ Z_l^ρ` in canonical form.
///
/// Generators are ordered torsion first (ascending exponents), then the free
/// part. Operators are integer matrices in that basis; when they come from a
/// finite computation they are only meaningful modulo `l^precision`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZlModule {
    l: u64,
    torsion: Vec<u32>,
    free_rank: usize,
    operators: BTreeMap<String, IntMatrix>,
    operator_precision: Option<u32>,
}

impl ZlModule {
    pub fn new(l: u64, mut torsion: Vec<u32>, free_rank: usize) -> Result<Self> {
        if !crate::is_prime(l) {
            return Err(Error::NotPrime { l });
        }
        torsion.retain(|&a| a > 0);
        torsion.sort_unstable();
        Ok(ZlModule {
            l,
            torsion,
            free_rank,
            operators: BTreeMap::new(),
            operator_precision: None,
        })
    }

    pub fn zero(l: u64) -> Self {
        Self::new(l, Vec::new(), 0).expect("prime checked by caller")
    }

    pub fn free(l: u64, rank: usize) -> Self {
        Self::new(l, Vec::new(), rank).expect("prime checked by caller")
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn torsion_exponents(&self) -> &[u32] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn rank(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn max_torsion_exponent(&self) -> u32 {
        self.torsion.last().copied().unwrap_or(0)
    }

    pub fn operators(&self) -> &BTreeMap<String, IntMatrix> {
        &self.operators
    }

    pub fn operator_precision(&self) -> Option<u32> {
        self.operator_precision
    }

    /// Adds an operator known exactly (integer matrix acting on the generators).
    pub fn with_operator(mut self, label: impl Into<String>, m: IntMatrix) -> Result<Self> {
        self.check_operator(&m)?;
        self.operators.insert(label.into(), m);
        Ok(self)
    }

    pub(crate) fn with_operators_at_precision(
        mut self,
        ops: BTreeMap<String, IntMatrix>,
        precision: u32,
    ) -> Self {
        self.operators = ops;
        self.operator_precision = Some(precision);
        self
    }

    pub fn without_operators(&self) -> Self {
        ZlModule {
            operators: BTreeMap::new(),
            operator_precision: None,
            ..self.clone()
        }
    }

    fn check_operator(&self, m: &IntMatrix) -> Result<()> {
        let r = self.rank();
        if m.rows() != r || m.cols() != r {
            return Err(Error::DimensionMismatch {
                context: format!("operator is {}x{}, module rank {r}", m.rows(), m.cols()),
            });
        }
        let t = self.torsion.len();
        let lb = BigInt::from(self.l);
        for j in 0..t {
            for i in 0..r {
                let ok = if i >= t {
                    m[(i, j)].is_zero()
                } else {
                    (lb.pow(self.torsion[j]) * &m[(i, j)]).is_multiple_of(&lb.pow(self.torsion[i]))
                };
                if !ok {
                    return Err(Error::NotWellDefined { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Exponents of `Λ / l^m` in generator order.
    pub fn quotient_exponents(&self, m: u32) -> Vec<u32> {
        self.torsion
            .iter()
            .map(|&a| a.min(m))
            .chain(std::iter::repeat_n(m, self.free_rank))
            .filter(|&e| e > 0)
            .collect()
    }

    /// `Λ / l^m` as a finite group, operators reduced.
    pub fn quotient(&self, m: u32) -> FinAbGroup {
        let exps = self.quotient_exponents(m);
        let g = FinAbGroup::l_group(self.l, &exps);
        if m == 0 {
            return g;
        }
        let ops = self
            .operators
            .iter()
            .map(|(k, v)| (k.clone(), v.reduce_rows_mod(g.factors())))
            .collect();
        g.with_operators_unchecked(ops)
    }

    /// Canonical projection `Λ/l^{m+1} → Λ/l^m`.
    pub fn quotient_projection(&self, m: u32) -> GroupHom {
        GroupHom::diagonal_projection(&self.quotient(m + 1), &self.quotient(m))
            .expect("canonical projection is well defined")
    }

    /// Whether operators can be reduced to `Λ/l^m`.
    pub fn supports_level(&self, m: u32) -> bool {
        self.operators.is_empty() || self.operator_precision.is_none_or(|p| m <= p)
    }

    /// `Λ / l^k` as a `Z_l`-module (torsion).
    pub fn mod_power(&self, k: u32) -> ZlModule {
        let mut torsion: Vec<u32> = self.torsion.iter().map(|&a| a.min(k)).collect();
        torsion.extend(std::iter::repeat_n(k, self.free_rank));
        ZlModule::new(self.l, torsion, 0).expect("same prime")
    }

    pub fn direct_sum(&self, other: &ZlModule) -> Result<ZlModule> {
        if self.l != other.l {
            return Err(Error::PrimeMismatch {
                left: self.l,
                right: other.l,
            });
        }
        let mut t = self.torsion.clone();
        t.extend_from_slice(&other.torsion);
        ZlModule::new(self.l, t, self.free_rank + other.free_rank)
    }

    /// Equality of canonical forms, operators compared at the common precision.
    pub fn same_canonical_form(&self, other: &ZlModule) -> bool {
        if self.l != other.l || self.torsion != other.torsion || self.free_rank != other.free_rank {
            return false;
        }
        if self.operators.keys().ne(other.operators.keys()) {
            return false;
        }
        let prec = match (self.operator_precision, other.operator_precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let moduli: Vec<BigInt> = match prec {
            Some(p) => self
                .quotient_exponents(p)
                .iter()
                .map(|&e| BigInt::from(self.l).pow(e))
                .collect(),
            None => vec![BigInt::zero(); self.rank()],
        };
        if moduli.len() != self.rank() {
            return prec == Some(0);
        }
        self.operators.iter().all(|(k, a)| {
            let b = &other.operators[k];
            a.reduce_rows_mod(&moduli) == b.reduce_rows_mod(&moduli)
        })
    }
}

impl fmt::Display for ZlModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|&a| {
                if a == 1 {
                    "Z/l".to_string()
                } else {
                    format!("Z/l^{a}")
                }
            })
            .collect();
        if self.free_rank > 0 {
            parts.push(format!("Zl^{}", self.free_rank));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ZlModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZlModule(l={}, {self}", self.l)?;
        for (k, v) in &self.operators {
            write!(f, ", {k}={v}")?;
        }
        if let Some(p) = self.operator_precision {
            write!(f, " mod l^{p}")?;
        }
        write!(f, ")")
    }
}

/// Parses `Zl^2 + Z/l^3 + Z/l` (or `0`) for a prime bound from context.
pub fn parse_zl_module(l: u64, text: &str) -> Result<ZlModule> {
    let text = text.trim();
    if text == "0" {
        return ZlModule::new(l, Vec::new(), 0);
    }
    let mut torsion = Vec::new();
    let mut free = 0usize;
    for term in text.split('+') {
        let term: String = term.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("unrecognised Z_l-module term '{term}'"));
        if let Some(rest) = term.strip_prefix("Z/l") {
            let e = match rest.strip_prefix('^') {
                Some(x) => u32::from_str(x).map_err(|_| bad())?,
                None if rest.is_empty() => 1,
                None => return Err(bad()),
            };
            if e == 0 {
                return Err(bad());
            }
            torsion.push(e);
        } else if let Some(rest) = term.strip_prefix("Zl") {
            free += match rest.strip_prefix('^') {
                Some(x) => usize::from_str(x).map_err(|_| bad())?,
                None if rest.is_empty() => 1,
                None => return Err(bad()),
            };
        } else if term != "0" {
            return Err(bad());
        }
    }
    ZlModule::new(l, torsion, free)
}
