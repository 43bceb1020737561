use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `offset + Σ c_s · s` over declared infinite symbols `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperNat {
    offset: i64,
    infinite: BTreeMap<String, u64>,
}

/// Outcome of comparing two hypernaturals; distinct symbols are not ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HnOrdering {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl From<Ordering> for HnOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => HnOrdering::Less,
            Ordering::Equal => HnOrdering::Equal,
            Ordering::Greater => HnOrdering::Greater,
        }
    }
}

impl HyperNat {
    pub fn finite(n: u64) -> Self {
        HyperNat {
            offset: n as i64,
            infinite: BTreeMap::new(),
        }
    }

    /// A declared infinite symbol such as `h` or `d1`.
    pub fn symbol(name: &str) -> Result<Self> {
        if !is_symbol(name) {
            return Err(Error::Parse(format!("'{name}' is not a symbol name")));
        }
        Ok(HyperNat {
            offset: 0,
            infinite: BTreeMap::from([(name.to_string(), 1)]),
        })
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coefficients(&self) -> &BTreeMap<String, u64> {
        &self.infinite
    }

    pub fn is_infinite(&self) -> bool {
        !self.infinite.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        (!self.is_infinite()).then_some(self.offset as u64)
    }

    pub fn add(&self, other: &HyperNat) -> HyperNat {
        let mut infinite = self.infinite.clone();
        for (s, c) in &other.infinite {
            *infinite.entry(s.clone()).or_insert(0) += c;
        }
        HyperNat {
            offset: self.offset + other.offset,
            infinite,
        }
    }

    pub fn add_finite(&self, k: i64) -> Result<HyperNat> {
        let out = HyperNat {
            offset: self.offset + k,
            infinite: self.infinite.clone(),
        };
        out.checked(|| format!("{self} {k:+}"))
    }

    pub fn sub(&self, other: &HyperNat) -> Result<HyperNat> {
        let mut infinite = self.infinite.clone();
        for (s, c) in &other.infinite {
            let have = infinite.get(s).copied().unwrap_or(0);
            if have < *c {
                return Err(Error::NegativeResult {
                    context: format!("{self} - {other}"),
                });
            }
            if have == *c {
                infinite.remove(s);
            } else {
                infinite.insert(s.clone(), have - c);
            }
        }
        HyperNat {
            offset: self.offset - other.offset,
            infinite,
        }
        .checked(|| format!("{self} - {other}"))
    }

    fn checked(self, context: impl FnOnce() -> String) -> Result<HyperNat> {
        if !self.is_infinite() && self.offset < 0 {
            return Err(Error::NegativeResult { context: context() });
        }
        Ok(self)
    }

    /// Infinite beats finite; infinite terms compare only when their coefficients
    /// are componentwise ordered, with offsets breaking exact ties.
    pub fn compare(&self, other: &HyperNat) -> HnOrdering {
        match (self.is_infinite(), other.is_infinite()) {
            (false, false) => self.offset.cmp(&other.offset).into(),
            (true, false) => HnOrdering::Greater,
            (false, true) => HnOrdering::Less,
            (true, true) => {
                let keys: std::collections::BTreeSet<_> =
                    self.infinite.keys().chain(other.infinite.keys()).collect();
                let (mut ge, mut le) = (true, true);
                for k in keys {
                    let a = self.infinite.get(k).copied().unwrap_or(0);
                    let b = other.infinite.get(k).copied().unwrap_or(0);
                    ge &= a >= b;
                    le &= a <= b;
                }
                match (ge, le) {
                    (true, true) => self.offset.cmp(&other.offset).into(),
                    (true, false) => HnOrdering::Greater,
                    (false, true) => HnOrdering::Less,
                    (false, false) => HnOrdering::Incomparable,
                }
            }
        }
    }
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `symbol`, `k symbol` (as in `2h`) or a plain integer.
fn parse_atom(atom: &str) -> Option<HyperNat> {
    if let Ok(n) = atom.parse::<u64>() {
        return Some(HyperNat::finite(n));
    }
    let split = atom.find(|c: char| !c.is_ascii_digit())?;
    let (digits, name) = atom.split_at(split);
    let k = if digits.is_empty() {
        1
    } else {
        digits.parse::<u64>().ok()?
    };
    if k == 0 || !is_symbol(name) {
        return None;
    }
    let one = HyperNat::symbol(name).ok()?;
    Some((1..k).fold(one.clone(), |acc, _| acc.add(&one)))
}

impl FromStr for HyperNat {
    type Err = Error;

    /// `term := symbol (('+'|'-') atom)* | integer`, where an atom is a symbol or an
    /// integer. Symbols may carry a coefficient, `2h`, which is how sums print.
    fn from_str(text: &str) -> Result<Self> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::Parse("empty hypernatural".into()));
        }
        if let Ok(n) = text.parse::<u64>() {
            return Ok(HyperNat::finite(n));
        }
        let mut atoms = Vec::new();
        let mut sign = '+';
        let mut current = String::new();
        for c in text.chars() {
            if c == '+' || c == '-' {
                atoms.push((sign, std::mem::take(&mut current)));
                sign = c;
            } else {
                current.push(c);
            }
        }
        atoms.push((sign, current));
        let mut acc = match parse_atom(&atoms[0].1) {
            Some(x) if x.is_infinite() => x,
            _ => {
                return Err(Error::Parse(format!(
                    "'{text}' must start with a symbol or be an integer"
                )))
            }
        };
        for (sign, atom) in &atoms[1..] {
            let term = parse_atom(atom)
                .ok_or_else(|| Error::Parse(format!("bad atom '{atom}' in '{text}'")))?;
            acc = if *sign == '+' {
                acc.add(&term)
            } else {
                acc.sub(&term)?
            };
        }
        Ok(acc)
    }
}

impl fmt::Display for HyperNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_infinite() {
            return write!(f, "{}", self.offset);
        }
        let mut first = true;
        for (s, c) in &self.infinite {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if *c == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{c}{s}")?;
            }
        }
        match self.offset.cmp(&0) {
            Ordering::Greater => write!(f, "+{}", self.offset),
            Ordering::Less => write!(f, "{}", self.offset),
            Ordering::Equal => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hn(s: &str) -> HyperNat {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(
            hn("h").compare(&HyperNat::finite(1_000_000)),
            HnOrdering::Greater
        );
        assert_eq!(hn("h+d1").sub(&hn("h")).unwrap(), hn("d1"));
        assert_eq!(hn("h").compare(&hn("d1")), HnOrdering::Incomparable);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(hn("h-1").offset(), -1);
        assert!(hn("h-1").is_infinite());
        assert!(HyperNat::finite(1).sub(&hn("h")).is_err());
        assert!(hn("3").sub(&hn("5")).is_err());
        assert_eq!(hn("h+d1+d2-2").to_string(), "d1+d2+h-2");
        assert_eq!(hn("h+h").to_string(), "2h");
        assert_eq!(hn("2h+d1-1"), hn("h+h+d1-1"));
        assert!("0h".parse::<HyperNat>().is_err());
        assert!("h+2".parse::<HyperNat>().is_ok());
        assert!("h+".parse::<HyperNat>().is_err());
        assert_eq!(hn("h+d1").compare(&hn("h+5")), HnOrdering::Greater);
        assert_eq!(hn("h-1").compare(&hn("h")), HnOrdering::Less);
        assert!("1+h".parse::<HyperNat>().is_err());
        assert!("h*2".parse::<HyperNat>().is_err());
    }
}
