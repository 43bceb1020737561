use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::group::{preimage_of_zero, present, FinAbGroup};
use super::matrix::IntMatrix;
use super::snf::solve_integer;
use crate::error::{Error, Result};

/// Homomorphism between finite abelian groups in their canonical bases.
///
/// Column `j` of the matrix holds the image of source generator `j`, reduced
/// modulo the target invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupHom {
    source: FinAbGroup,
    target: FinAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks well-definedness and operator equivariance for every label both groups carry.
    pub fn new(source: FinAbGroup, target: FinAbGroup, matrix: IntMatrix) -> Result<Self> {
        let matrix = source.check_hom_matrix(&target, &matrix)?;
        let f = GroupHom {
            source,
            target,
            matrix,
        };
        f.check_equivariant()?;
        Ok(f)
    }

    pub(crate) fn from_parts_unchecked(
        source: FinAbGroup,
        target: FinAbGroup,
        matrix: IntMatrix,
    ) -> Self {
        let matrix = matrix.reduce_rows_mod(target.factors());
        GroupHom {
            source,
            target,
            matrix,
        }
    }

    pub fn identity(g: &FinAbGroup) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMatrix::identity(g.rank()).reduce_rows_mod(g.factors()),
        }
    }

    pub fn zero(source: &FinAbGroup, target: &FinAbGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.rank(), source.rank()),
        }
    }

    /// Multiplication by `c` on `g`.
    pub fn scalar(g: &FinAbGroup, c: &BigInt) -> Self {
        Self::from_parts_unchecked(g.clone(), g.clone(), IntMatrix::identity(g.rank()).scale(c))
    }

    /// The map sending generator `i` of `source` to generator `i` of `target`.
    ///
    /// Defined when the source factors are divisible by the target factors
    /// position by position, e.g. the reduction `Z/l^{n+2} → Z/l^{n+1}`.
    pub fn diagonal_projection(source: &FinAbGroup, target: &FinAbGroup) -> Result<Self> {
        if source.rank() < target.rank() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "cannot project rank {} onto rank {}",
                    source.rank(),
                    target.rank()
                ),
            });
        }
        // Targets may have dropped leading trivial factors; align from the top.
        let offset = source.rank() - target.rank();
        let mut m = IntMatrix::zeros(target.rank(), source.rank());
        for i in 0..target.rank() {
            m[(i, i + offset)] = BigInt::from(1);
        }
        Self::new(source.clone(), target.clone(), m)
    }

    pub fn source(&self) -> &FinAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FinAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn apply(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(coords))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target.factors() != self.source.factors() {
            return Err(Error::CompositionMismatch {
                context: format!(
                    "cannot compose {} -> {} after -> {}",
                    self.source, self.target, inner.target
                ),
            });
        }
        Ok(Self::from_parts_unchecked(
            inner.source.clone(),
            self.target.clone(),
            self.matrix.mul(&inner.matrix),
        ))
    }

    pub fn add(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.source.factors() != other.source.factors()
            || self.target.factors() != other.target.factors()
        {
            return Err(Error::CompositionMismatch {
                context: "sum of homs with different source or target".into(),
            });
        }
        Ok(Self::from_parts_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.add(&other.matrix),
        ))
    }

    pub fn neg(&self) -> GroupHom {
        Self::from_parts_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.scale(&BigInt::from(-1)),
        )
    }

    pub fn scale(&self, c: &BigInt) -> GroupHom {
        Self::from_parts_unchecked(
            self.source.clone(),
            self.target.clone(),
            self.matrix.scale(c),
        )
    }

    /// Checks `f ∘ σ_source = σ_target ∘ f` for every label carried by both groups.
    pub fn check_equivariant(&self) -> Result<()> {
        for (label, s_op) in self.source.operators() {
            if let Some(t_op) = self.target.operator(label) {
                let lhs = self.matrix.mul(s_op).reduce_rows_mod(self.target.factors());
                let rhs = t_op
                    .mul(&self.matrix)
                    .reduce_rows_mod(self.target.factors());
                if lhs != rhs {
                    return Err(Error::NotEquivariant {
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn kernel(&self) -> (FinAbGroup, GroupHom) {
        let gens = preimage_of_zero(&self.matrix, self.target.factors());
        self.source
            .subgroup(&gens)
            .expect("kernel generators have source rank")
    }

    pub fn image(&self) -> (FinAbGroup, GroupHom) {
        self.target
            .subgroup(&self.matrix)
            .expect("image generators have target rank")
    }

    pub fn cokernel(&self) -> (FinAbGroup, GroupHom) {
        let rel = self.matrix.hstack(&self.target.relation_matrix());
        let p = present(&rel).expect("cokernel of a finite group is finite");
        let mut q = p.group;
        q.set_prime(self.target.prime());
        let mut ops = BTreeMap::new();
        for (label, op) in self.target.operators() {
            ops.insert(
                label.clone(),
                p.projection
                    .mul(op)
                    .mul(&p.section)
                    .reduce_rows_mod(q.factors()),
            );
        }
        let q = q.with_operators_unchecked(ops);
        let proj = GroupHom::from_parts_unchecked(self.target.clone(), q.clone(), p.projection);
        (q, proj)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// A preimage of `y` under `self`, if `y` lies in the image.
    pub fn preimage(&self, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let stacked = self.matrix.hstack(&self.target.relation_matrix());
        let x = solve_integer(&stacked, y)?;
        Some(self.source.reduce(&x[..self.source.rank()]))
    }

    /// For surjective `self`, a set-theoretic section on generators:
    /// column `j` is a preimage of target generator `j`.
    pub fn section_matrix(&self) -> Option<IntMatrix> {
        let k = self.target.rank();
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let mut e = vec![BigInt::zero(); k];
            e[j] = BigInt::from(1);
            cols.push(self.preimage(&e)?);
        }
        Some(IntMatrix::from_columns(self.source.rank(), &cols))
    }

    /// The map `target → other` induced by `g: source → other` when `g` kills `ker(self)`;
    /// `self` must be surjective.
    pub fn factor_through(&self, g: &GroupHom) -> Result<GroupHom> {
        if g.source.factors() != self.source.factors() {
            return Err(Error::CompositionMismatch {
                context: "factor_through needs maps with a common source".into(),
            });
        }
        let (_, k_inc) = self.kernel();
        if !g.compose(&k_inc)?.is_zero() {
            return Err(Error::PreconditionViolated {
                context: "map does not vanish on the kernel".into(),
            });
        }
        let sec = self
            .section_matrix()
            .ok_or_else(|| Error::PreconditionViolated {
                context: "factor_through needs a surjection".into(),
            })?;
        Ok(Self::from_parts_unchecked(
            self.target.clone(),
            g.target.clone(),
            g.matrix.mul(&sec),
        ))
    }

    /// The map `other → source` through which `g: other → target` lifts when
    /// `self` is injective and `im g ⊆ im self`.
    pub fn lift_through(&self, g: &GroupHom) -> Result<GroupHom> {
        if g.target.factors() != self.target.factors() {
            return Err(Error::CompositionMismatch {
                context: "lift_through needs maps with a common target".into(),
            });
        }
        let mut cols = Vec::with_capacity(g.source.rank());
        for j in 0..g.source.rank() {
            let y = g.matrix.column(j);
            let x = self
                .preimage(&y)
                .ok_or_else(|| Error::PreconditionViolated {
                    context: format!("generator {j} does not lift"),
                })?;
            cols.push(x);
        }
        Ok(Self::from_parts_unchecked(
            g.source.clone(),
            self.source.clone(),
            IntMatrix::from_columns(self.source.rank(), &cols),
        ))
    }
}

/// Whether `im(f) = ker(g)` inside `target(f) = source(g)`.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> Result<bool> {
    if f.target().factors() != g.source().factors() {
        return Err(Error::CompositionMismatch {
            context: format!("target {} differs from source {}", f.target(), g.source()),
        });
    }
    if !g.compose(f)?.is_zero() {
        return Ok(false);
    }
    Ok(f.image().0.order() == g.kernel().0.order())
}

/// `G / N·G` with its projection.
pub fn quotient_by_integer(g: &FinAbGroup, n: &BigInt) -> (FinAbGroup, GroupHom) {
    GroupHom::scalar(g, n).cokernel()
}

/// Direct sum with canonical structure maps `inj_left, inj_right, proj_left, proj_right`.
pub struct DirectSum {
    pub group: FinAbGroup,
    pub inj: [GroupHom; 2],
    pub proj: [GroupHom; 2],
}

pub fn direct_sum(a: &FinAbGroup, b: &FinAbGroup) -> DirectSum {
    let rel = a.relation_matrix().block_diag(&b.relation_matrix());
    let p = present(&rel).expect("direct sum of finite groups is finite");
    let mut group = p.group;
    group.set_prime(match (a.prime(), b.prime()) {
        (Some(x), Some(y)) if x == y => Some(x),
        (Some(x), None) if b.is_trivial() => Some(x),
        (None, Some(y)) if a.is_trivial() => Some(y),
        _ => None,
    });
    let (ra, rb) = (a.rank(), b.rank());
    let mut ops = BTreeMap::new();
    for (label, oa) in a.operators() {
        if let Some(ob) = b.operator(label) {
            let big = oa.block_diag(ob);
            ops.insert(
                label.clone(),
                p.projection
                    .mul(&big)
                    .mul(&p.section)
                    .reduce_rows_mod(group.factors()),
            );
        }
    }
    let group = group.with_operators_unchecked(ops);
    let left_cols: Vec<usize> = (0..ra).collect();
    let right_cols: Vec<usize> = (ra..ra + rb).collect();
    let inj_a = GroupHom::from_parts_unchecked(
        a.clone(),
        group.clone(),
        p.projection.select_cols(&left_cols),
    );
    let inj_b = GroupHom::from_parts_unchecked(
        b.clone(),
        group.clone(),
        p.projection.select_cols(&right_cols),
    );
    let proj_a =
        GroupHom::from_parts_unchecked(group.clone(), a.clone(), p.section.select_rows(&left_cols));
    let proj_b = GroupHom::from_parts_unchecked(
        group.clone(),
        b.clone(),
        p.section.select_rows(&right_cols),
    );
    DirectSum {
        group,
        inj: [inj_a, inj_b],
        proj: [proj_a, proj_b],
    }
}

/// `f ⊕ g : A ⊕ B → C ⊕ D` on the canonical direct sums.
pub fn hom_direct_sum(f: &GroupHom, g: &GroupHom) -> GroupHom {
    let s = direct_sum(f.source(), g.source());
    let t = direct_sum(f.target(), g.target());
    let left = t.inj[0].compose(f).unwrap().compose(&s.proj[0]).unwrap();
    let right = t.inj[1].compose(g).unwrap().compose(&s.proj[1]).unwrap();
    left.add(&right).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn brute_image_size(f: &GroupHom) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for e in f.source().elements() {
            seen.insert(f.apply(e.coords()));
        }
        seen.len()
    }

    fn brute_kernel_size(f: &GroupHom) -> usize {
        f.source()
            .elements()
            .iter()
            .filter(|e| f.apply(e.coords()).iter().all(Zero::is_zero))
            .count()
    }

    #[test]
    fn times_two_on_z4() {
        let z4 = FinAbGroup::cyclic(4);
        let f = GroupHom::scalar(&z4, &b(2));
        assert_eq!(brute_kernel_size(&f), 2);
        assert_eq!(brute_image_size(&f), 2);
        assert_eq!(f.kernel().0.factors(), &[b(2)]);
        assert_eq!(f.image().0.factors(), &[b(2)]);
        assert_eq!(f.cokernel().0.factors(), &[b(2)]);
    }

    #[test]
    fn identity_and_zero_maps() {
        let z6 = FinAbGroup::cyclic(6);
        let id = GroupHom::identity(&z6);
        assert!(id.kernel().0.is_trivial());
        assert_eq!(id.image().0, z6);
        assert!(id.cokernel().0.is_trivial());

        let z = GroupHom::zero(&FinAbGroup::cyclic(3), &FinAbGroup::cyclic(5));
        assert_eq!(z.kernel().0.factors(), &[b(3)]);
        assert!(z.image().0.is_trivial());
        assert_eq!(z.cokernel().0.factors(), &[b(5)]);
    }

    #[test]
    fn ill_defined_matrix_rejected() {
        // Z/2 -> Z/4 sending 1 to 1 is not a homomorphism.
        let err = GroupHom::new(
            FinAbGroup::cyclic(2),
            FinAbGroup::cyclic(4),
            IntMatrix::from_i64(&[&[1]]),
        );
        assert_eq!(err.unwrap_err(), Error::NotWellDefined { row: 0, col: 0 });
    }

    #[test]
    fn quotient_by_integer_examples() {
        let (q, _) = quotient_by_integer(&FinAbGroup::cyclic(8), &b(4));
        assert_eq!(q.factors(), &[b(4)]);
        let g = FinAbGroup::from_factors(&[3, 9]).unwrap();
        let (q, _) = quotient_by_integer(&g, &b(3));
        assert_eq!(q.factors(), &[b(3), b(3)]);
        let (q, _) = quotient_by_integer(&g, &b(1));
        assert!(q.is_trivial());
    }

    #[test]
    fn exactness_examples() {
        let z2 = FinAbGroup::cyclic(2);
        let z4 = FinAbGroup::cyclic(4);
        let inc = GroupHom::new(z2.clone(), z4.clone(), IntMatrix::from_i64(&[&[2]])).unwrap();
        let proj = GroupHom::new(z4.clone(), z2.clone(), IntMatrix::from_i64(&[&[1]])).unwrap();
        assert!(is_exact_at(&inc, &proj).unwrap());
        let id = GroupHom::identity(&z2);
        assert!(!is_exact_at(&id, &id).unwrap());
        let zero = GroupHom::zero(&z4, &z4);
        assert!(!is_exact_at(&zero, &zero).unwrap());
        assert!(matches!(
            is_exact_at(&id, &zero),
            Err(Error::CompositionMismatch { .. })
        ));
    }

    #[test]
    fn direct_sum_mixes_coprime_factors() {
        let s = direct_sum(&FinAbGroup::cyclic(2), &FinAbGroup::cyclic(3));
        assert_eq!(s.group.factors(), &[b(6)]);
        for k in 0..2 {
            let id = s.proj[k].compose(&s.inj[k]).unwrap();
            assert_eq!(id, GroupHom::identity(s.inj[k].source()));
        }
        let cross = s.proj[1].compose(&s.inj[0]).unwrap();
        assert!(cross.is_zero());
    }

    #[test]
    fn operators_follow_kernels() {
        let g = FinAbGroup::from_factors(&[4, 4])
            .unwrap()
            .with_operator("swap", IntMatrix::from_i64(&[&[0, 1], &[1, 0]]))
            .unwrap();
        let f = GroupHom::scalar(&g, &b(2));
        let (k, inc) = f.kernel();
        assert!(k.operator("swap").is_some());
        inc.check_equivariant().unwrap();
        let (_, proj) = f.cokernel();
        proj.check_equivariant().unwrap();
    }

    #[test]
    fn factor_and_lift() {
        let z8 = FinAbGroup::cyclic(8);
        let z4 = FinAbGroup::cyclic(4);
        let red = GroupHom::diagonal_projection(&z8, &z4).unwrap();
        // the identity of Z/8 does not kill 4Z/8, so it does not factor through Z/4
        assert!(red.factor_through(&GroupHom::identity(&z8)).is_err());
        let h = GroupHom::new(
            z8.clone(),
            FinAbGroup::cyclic(2),
            IntMatrix::from_i64(&[&[1]]),
        )
        .unwrap();
        let hbar = red.factor_through(&h).unwrap();
        assert_eq!(hbar.compose(&red).unwrap(), h);
    }
}
