use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hom::GroupHom;
use super::matrix::IntMatrix;
use super::snf::{kernel_lattice, row_hermite, smith_normal_form, solve_lower_triangular};
use crate::error::{Error, Result};

/// Finite abelian group `Z/d_1 ⊕ … ⊕ Z/d_k` with `d_1 | d_2 | … | d_k`, each `d_i >= 2`.
///
/// Operators are named endomorphisms written in the generator basis (column `j`
/// is the image of generator `j`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    prime: Option<u64>,
    factors: Vec<BigInt>,
    operators: BTreeMap<String, IntMatrix>,
}

/// Output of [`present`]: the canonical group of a presentation `Z^n / R Z^p`,
/// together with coordinate maps in both directions.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: FinAbGroup,
    /// `rank × n`: canonical coordinates of the class of `x ∈ Z^n` are `projection · x`.
    pub projection: IntMatrix,
    /// `n × rank`: a lift to `Z^n` of each canonical generator.
    pub section: IntMatrix,
}

/// Invariant-factor form of `Z^n / column-span(relations)`.
pub fn present(relations: &IntMatrix) -> Result<Presentation> {
    let n = relations.rows();
    let s = smith_normal_form(relations);
    let diag = s.diagonal();
    let mut keep = Vec::new();
    let mut factors = Vec::new();
    let mut free = 0;
    for i in 0..n {
        let d = diag.get(i).cloned().unwrap_or_default();
        if d.is_zero() {
            free += 1;
        } else if !d.is_one() {
            keep.push(i);
            factors.push(d);
        }
    }
    if free > 0 {
        return Err(Error::InfiniteGroup { free_rank: free });
    }
    let projection = s.u.select_rows(&keep).reduce_rows_mod(&factors);
    let section = s.u_inv.select_cols(&keep);
    Ok(Presentation {
        group: FinAbGroup {
            prime: None,
            factors,
            operators: BTreeMap::new(),
        },
        projection,
        section,
    })
}

/// Canonical form of the cokernel of a relation matrix.
pub fn canonicalize(relations: &IntMatrix) -> Result<FinAbGroup> {
    present(relations).map(|p| p.group)
}

impl FinAbGroup {
    pub fn new(factors: Vec<BigInt>) -> Result<Self> {
        let ok = factors.iter().all(|d| *d >= BigInt::from(2))
            && factors.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !ok {
            return Err(Error::NotInvariantFactors {
                factors: factors.iter().map(ToString::to_string).collect(),
            });
        }
        Ok(FinAbGroup {
            prime: None,
            factors,
            operators: BTreeMap::new(),
        })
    }

    pub fn from_factors(factors: &[u64]) -> Result<Self> {
        Self::new(factors.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            prime: None,
            factors: Vec::new(),
            operators: BTreeMap::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 1 {
            Self::trivial()
        } else {
            Self::from_factors(&[n]).expect("cyclic order must be positive")
        }
    }

    /// `⊕ Z/l^{e_i}` for the given exponents (any order, zeros dropped).
    pub fn l_group(l: u64, exponents: &[u32]) -> Self {
        let mut e: Vec<u32> = exponents.iter().copied().filter(|&x| x > 0).collect();
        e.sort_unstable();
        let factors = e.iter().map(|&x| BigInt::from(l).pow(x)).collect();
        FinAbGroup {
            prime: Some(l),
            factors,
            operators: BTreeMap::new(),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn operators(&self) -> &BTreeMap<String, IntMatrix> {
        &self.operators
    }

    pub fn operator(&self, label: &str) -> Option<&IntMatrix> {
        self.operators.get(label)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// `l`-adic valuations of the invariant factors. Only meaningful for `l`-groups.
    pub fn l_exponents(&self, l: u64) -> Vec<u32> {
        let lb = BigInt::from(l);
        self.factors
            .iter()
            .map(|d| {
                let mut d = d.clone();
                let mut e = 0;
                while d.is_multiple_of(&lb) && !d.is_zero() {
                    d /= &lb;
                    e += 1;
                }
                e
            })
            .collect()
    }

    /// Same invariant factors; operators and prime tag are ignored.
    pub fn is_isomorphic(&self, other: &FinAbGroup) -> bool {
        self.factors == other.factors
    }

    /// Marks the group as `l`-local; fails unless the order is a power of `l`.
    pub fn with_prime(mut self, l: u64) -> Result<Self> {
        let lb = BigInt::from(l);
        for d in &self.factors {
            let mut d = d.clone();
            while d.is_multiple_of(&lb) {
                d /= &lb;
            }
            if !d.is_one() {
                return Err(Error::NotLPrimary {
                    l,
                    order: self.order().to_string(),
                });
            }
        }
        self.prime = Some(l);
        Ok(self)
    }

    pub(crate) fn set_prime(&mut self, prime: Option<u64>) {
        self.prime = prime;
    }

    /// Attaches a named endomorphism, checking that it respects the relations.
    pub fn with_operator(mut self, label: impl Into<String>, matrix: IntMatrix) -> Result<Self> {
        let label = label.into();
        let reduced = self.check_hom_matrix(&self, &matrix)?;
        self.operators.insert(label, reduced);
        Ok(self)
    }

    pub(crate) fn with_operators_unchecked(mut self, ops: BTreeMap<String, IntMatrix>) -> Self {
        self.operators = ops;
        self
    }

    pub fn without_operators(&self) -> Self {
        FinAbGroup {
            prime: self.prime,
            factors: self.factors.clone(),
            operators: BTreeMap::new(),
        }
    }

    /// Validates a `self → target` matrix and reduces it modulo the target factors.
    pub(crate) fn check_hom_matrix(&self, target: &FinAbGroup, m: &IntMatrix) -> Result<IntMatrix> {
        if m.rows() != target.rank() || m.cols() != self.rank() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "hom matrix is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.rank(),
                    self.rank()
                ),
            });
        }
        for j in 0..self.rank() {
            for i in 0..target.rank() {
                if !(&self.factors[j] * &m[(i, j)]).is_multiple_of(&target.factors[i]) {
                    return Err(Error::NotWellDefined { row: i, col: j });
                }
            }
        }
        Ok(m.reduce_rows_mod(&target.factors))
    }

    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        coords
            .iter()
            .zip(&self.factors)
            .map(|(c, d)| c.mod_floor(d))
            .collect()
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} coordinates for a rank {} group",
                    coords.len(),
                    self.rank()
                ),
            });
        }
        Ok(Element {
            coords: self.reduce(&coords),
            group: self.clone(),
        })
    }

    pub fn zero_element(&self) -> Element {
        Element {
            coords: vec![BigInt::zero(); self.rank()],
            group: self.clone(),
        }
    }

    /// All elements in lexicographic coordinate order. Intended for small test groups.
    pub fn elements(&self) -> Vec<Element> {
        let bounds: Vec<u64> = self
            .factors
            .iter()
            .map(|d| d.to_u64().expect("group too large to enumerate"))
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0u64; bounds.len()];
        loop {
            out.push(Element {
                coords: cur.iter().map(|&c| BigInt::from(c)).collect(),
                group: self.clone(),
            });
            let mut k = bounds.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] < bounds[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.factors)
    }

    /// The subgroup generated by the columns of `gens`, in canonical form, with its inclusion.
    ///
    /// The canonical basis depends only on the subgroup, not on the generating set.
    pub fn subgroup(&self, gens: &IntMatrix) -> Result<(FinAbGroup, GroupHom)> {
        Ok(self.subgroup_data(gens)?.into_parts(self))
    }

    pub(crate) fn subgroup_data(&self, gens: &IntMatrix) -> Result<SubgroupData> {
        let k = self.rank();
        if gens.rows() != k {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "subgroup generators have {} rows, group rank {k}",
                    gens.rows()
                ),
            });
        }
        // Lattice gens + diag(d); its Hermite basis is canonical.
        let lattice = gens.hstack(&self.relation_matrix());
        let basis = row_hermite(&lattice.transpose()).transpose();
        debug_assert_eq!(basis.cols(), k);
        let mut rel_cols = Vec::with_capacity(k);
        for j in 0..k {
            let mut t = vec![BigInt::zero(); k];
            t[j] = self.factors[j].clone();
            let x =
                solve_lower_triangular(&basis, &t).expect("relation lattice not contained in span");
            rel_cols.push(x);
        }
        let rel = IntMatrix::from_columns(k, &rel_cols);
        let p = present(&rel)?;
        let mut sub = p.group;
        sub.prime = self.prime;
        let inclusion = basis.mul(&p.section).reduce_rows_mod(&self.factors);
        let mut data = SubgroupData {
            basis,
            projection: p.projection,
            sub,
            inclusion,
        };
        let mut ops = BTreeMap::new();
        for (label, op) in &self.operators {
            let images = op.mul(&data.inclusion);
            let cols: Option<Vec<Vec<BigInt>>> = (0..images.cols())
                .map(|j| data.coords_of(&images.column(j)))
                .collect();
            if let Some(cols) = cols {
                ops.insert(
                    label.clone(),
                    IntMatrix::from_columns(data.sub.rank(), &cols),
                );
            }
        }
        data.sub.operators = ops;
        Ok(data)
    }
}

/// Internal description of a subgroup: `sub ≅ basis·Z^k / diag(d)Z^k`.
pub(crate) struct SubgroupData {
    basis: IntMatrix,
    projection: IntMatrix,
    pub(crate) sub: FinAbGroup,
    pub(crate) inclusion: IntMatrix,
}

impl SubgroupData {
    /// Coordinates in the subgroup of an ambient element, or `None` if it lies outside.
    pub(crate) fn coords_of(&self, ambient: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = solve_lower_triangular(&self.basis, ambient)?;
        Some(self.sub.reduce(&self.projection.mul_vec(&y)))
    }

    fn into_parts(self, ambient: &FinAbGroup) -> (FinAbGroup, GroupHom) {
        let inc = GroupHom::from_parts_unchecked(self.sub.clone(), ambient.clone(), self.inclusion);
        (self.sub, inc)
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")?;
        if !self.operators.is_empty() {
            write!(f, " {{")?;
            for (k, v) in &self.operators {
                write!(f, " {k}={v}")?;
            }
            write!(f, " }}")?;
        }
        Ok(())
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of a finite abelian group, coordinates reduced modulo the invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Element {
    group: FinAbGroup,
    coords: Vec<BigInt>,
}

impl Element {
    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Element) -> Element {
        let sum: Vec<BigInt> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Element {
            coords: self.group.reduce(&sum),
            group: self.group.clone(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Element {
        let v: Vec<BigInt> = self.coords.iter().map(|a| a * c).collect();
        Element {
            coords: self.group.reduce(&v),
            group: self.group.clone(),
        }
    }
}

/// Kernel of `M: Z^m → Z^k / diag(t)`, as column generators in `Z^m`.
pub(crate) fn preimage_of_zero(m: &IntMatrix, target_factors: &[BigInt]) -> IntMatrix {
    let cols = m.cols();
    let stacked = m.hstack(&IntMatrix::diagonal(target_factors));
    let ker = kernel_lattice(&stacked);
    let idx: Vec<usize> = (0..cols).collect();
    ker.select_rows(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn canonicalize_examples() {
        let g = canonicalize(&IntMatrix::from_i64(&[&[2, 0], &[0, 4]])).unwrap();
        assert_eq!(g.factors(), &[b(2), b(4)]);
        let g = canonicalize(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(g.factors(), &[b(6)]);
        let g = canonicalize(&IntMatrix::identity(2)).unwrap();
        assert!(g.is_trivial());
    }

    #[test]
    fn canonicalize_rejects_free_part() {
        let err = canonicalize(&IntMatrix::from_i64(&[&[2, 0], &[0, 0]])).unwrap_err();
        assert_eq!(err, Error::InfiniteGroup { free_rank: 1 });
    }

    #[test]
    fn canonicalize_idempotent() {
        let g = FinAbGroup::from_factors(&[2, 6, 12]).unwrap();
        assert_eq!(
            canonicalize(&g.relation_matrix()).unwrap().factors(),
            g.factors()
        );
    }

    #[test]
    fn factor_validation() {
        assert!(FinAbGroup::from_factors(&[4, 2]).is_err());
        assert!(FinAbGroup::from_factors(&[1, 2]).is_err());
        assert!(FinAbGroup::from_factors(&[3, 9]).is_ok());
    }

    #[test]
    fn l_local_constructor_rejects_other_primes() {
        let g = FinAbGroup::from_factors(&[6]).unwrap();
        assert!(matches!(g.with_prime(2), Err(Error::NotLPrimary { .. })));
        let g = FinAbGroup::from_factors(&[2, 8]).unwrap();
        assert_eq!(g.with_prime(2).unwrap().prime(), Some(2));
    }

    #[test]
    fn subgroup_is_generator_independent() {
        let g = FinAbGroup::from_factors(&[4, 8]).unwrap();
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]);
        let c = IntMatrix::from_i64(&[&[2, 2, 0], &[2, 0, 6]]);
        let (s1, i1) = g.subgroup(&a).unwrap();
        let (s2, i2) = g.subgroup(&c).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(i1.matrix(), i2.matrix());
        assert_eq!(s1.order(), b(8));
    }

    #[test]
    fn enumerate_elements() {
        let g = FinAbGroup::from_factors(&[2, 4]).unwrap();
        assert_eq!(g.elements().len(), 8);
        assert_eq!(FinAbGroup::trivial().elements().len(), 1);
    }
}
