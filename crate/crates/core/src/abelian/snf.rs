//! Smith and Hermite normal forms over the integers.
//!
//! Pivot selection is deterministic: each round takes the nonzero entry of
//! minimal absolute value in the active block, ties going to the lowest
//! `(row, col)`. Fixtures and reports depend on this order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `U · M · V = D`, with inverses of both transforms tracked alongside.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries `d_0 | d_1 | ...` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = find_pivot(&a, t) else {
                return Smith {
                    u,
                    u_inv,
                    d: a,
                    v,
                    v_inv,
                };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&p);
                let nq = -&q;
                a.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                // inverse of (row_i += c row_t) is col_t -= c col_i on the left factor
                u_inv.add_col_multiple(t, i, &q);
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&p);
                let nq = -&q;
                a.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                v_inv.add_row_multiple(t, j, &q);
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let bad_row =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&p)));
            match bad_row {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    Smith {
        u,
        u_inv,
        d: a,
        v,
        v_inv,
    }
}

/// Basis (as columns) of the integer kernel `{x : M x = 0}`.
pub fn kernel_lattice(m: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(m);
    let r = s.rank();
    let idx: Vec<usize> = (r..m.cols()).collect();
    s.v.select_cols(&idx)
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
///
/// Returns the nonzero rows: echelon form, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. The result depends only on the lattice.
pub fn row_hermite(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if a[(b, c)].abs() <= a[(i, c)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(b) = best else { break };
            a.swap_rows(r, b);
            let p = a[(r, c)].clone();
            let mut done = true;
            for i in r + 1..rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let q = a[(i, c)].div_floor(&p);
                a.add_row_multiple(i, r, &-q);
                done &= a[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if r < rows && !a[(r, c)].is_zero() {
            if a[(r, c)].is_negative() {
                a.negate_row(r);
            }
            pivots.push((r, c));
            r += 1;
        }
    }
    for &(pr, pc) in &pivots {
        let p = a[(pr, pc)].clone();
        for i in 0..pr {
            let q = a[(i, pc)].div_floor(&p);
            a.add_row_multiple(i, pr, &-q);
        }
    }
    let keep: Vec<usize> = (0..r).collect();
    a.select_rows(&keep)
}

/// Solves `L x = b` for square lower-triangular `L` with nonzero diagonal.
/// Returns `None` when the solution is not integral.
pub fn solve_lower_triangular(l: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = l.rows();
    let mut x = vec![BigInt::zero(); n];
    for i in 0..n {
        let mut acc = b[i].clone();
        for (j, xj) in x.iter().enumerate().take(i) {
            acc -= &l[(i, j)] * xj;
        }
        let (q, rem) = acc.div_rem(&l[(i, i)]);
        if !rem.is_zero() {
            return None;
        }
        x[i] = q;
    }
    Some(x)
}

/// Some integer solution of `M x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(m);
    let ub = s.u.mul_vec(b);
    let diag = s.diagonal();
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, c) in ub.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                let (q, r) = c.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            _ => {
                if !c.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(s.v.mul_vec(&y))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Invariant factors from determinantal divisors: `d_k = gcd` of the `k × k`
/// minors and `D_k = d_k / d_{k-1}`. Exponential in the size; a reference for
/// testing [`smith_normal_form`] on small matrices.
pub fn invariant_factors_by_minors(m: &IntMatrix) -> Vec<BigInt> {
    let k_max = m.rows().min(m.cols());
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut g = BigInt::zero();
        for rows in subsets(m.rows(), k) {
            let sub = m.select_rows(&rows);
            for cols in subsets(m.cols(), k) {
                g = g.gcd(&sub.select_cols(&cols).determinant());
            }
        }
        if g.is_zero() {
            out.resize(k_max, BigInt::zero());
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Smith {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(m.cols()));
        assert!(s.d.is_diagonal());
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check(&IntMatrix::zeros(2, 2));
        assert_eq!(s.d, IntMatrix::zeros(2, 2));
    }

    #[test]
    fn rectangular_and_empty() {
        check(&IntMatrix::from_i64(&[&[4, 6, 2], &[2, 8, 10]]));
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(2, 0));
    }

    #[test]
    fn kernel_of_row() {
        let m = IntMatrix::from_i64(&[&[2, 4]]);
        let k = kernel_lattice(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn hermite_is_lattice_invariant() {
        let a = IntMatrix::from_i64(&[&[4, 0], &[0, 6]]);
        let b = IntMatrix::from_i64(&[&[4, 6], &[4, 0], &[8, 6]]);
        assert_eq!(row_hermite(&a), row_hermite(&b));
    }

    #[test]
    fn integer_solve() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let b = vec![BigInt::from(4), BigInt::from(9)];
        let x = solve_integer(&m, &b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        assert!(solve_integer(&m, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}
