//! Fraction-free row reduction over the scalar domain. Pivoting is leftmost
//! column first, so canonical forms are reproducible. Rows are kept mutually
//! reduced (zeros at every other row's pivot column); reduction of an actual
//! vector against the span divides by pivots and therefore requires the
//! division to be exact, which it is for every construction in this crate.

use crate::scalars::Scalar;

#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    pub k: usize,
    /// (pivot column, row); every row vanishes at the other rows' pivots.
    pub rows: Vec<(usize, Vec<Scalar>)>,
}

impl Echelon {
    pub fn new(ncols: usize, k: usize) -> Self {
        Echelon { ncols, k, rows: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(c, _)| *c).collect();
        p.sort_unstable();
        p
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        let p = self.pivots();
        (0..self.ncols).filter(|c| !p.contains(c)).collect()
    }

    /// Add a vector to the span. Returns true if the rank grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let mut v = v.to_vec();
        // Fraction-free elimination against existing rows.
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let pivot = row[*p].clone();
                let c = v[*p].clone();
                for j in 0..self.ncols {
                    v[j] = v[j].mul(&pivot).sub(&c.mul(&row[j]));
                }
            }
        }
        let pivot_col = match v.iter().position(|x| !x.is_zero()) {
            Some(c) => c,
            None => return false,
        };
        // Clear the new pivot column from the existing rows.
        let pv = v[pivot_col].clone();
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot_col].is_zero() {
                let c = row[pivot_col].clone();
                for j in 0..self.ncols {
                    row[j] = row[j].mul(&pv).sub(&c.mul(&v[j]));
                }
            }
        }
        self.rows.push((pivot_col, v));
        self.rows.sort_by_key(|(c, _)| *c);
        true
    }

    /// Canonical coset representative: the unique vector in v + span with
    /// zeros at every pivot column. None if a needed division is inexact.
    pub fn reduce(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ncols);
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let q = v[*p].exact_div(&row[*p])?;
                for j in 0..self.ncols {
                    v[j] = v[j].sub(&q.mul(&row[j]));
                }
            }
        }
        Some(v)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        match self.reduce(v) {
            Some(r) => r.iter().all(|x| x.is_zero()),
            None => false,
        }
    }
}

/// Basis of the right nullspace of the matrix (rows of length ncols).
/// None when a pivot division is inexact.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize, k: usize) -> Option<Vec<Vec<Scalar>>> {
    let mut ech = Echelon::new(ncols, k);
    for r in rows {
        ech.insert(r);
    }
    let mut basis = vec![];
    for free in ech.non_pivots() {
        // x[free] = 1, x at other non-pivots = 0; solve pivot coordinates.
        let mut x = vec![Scalar::zero(k); ncols];
        x[free] = Scalar::one(k);
        for (p, row) in ech.rows.iter().rev() {
            // row . x = 0  =>  x[p] = -(sum of row[j] x[j], j != p) / row[p]
            let mut s = Scalar::zero(k);
            for j in 0..ncols {
                if j != *p && !x[j].is_zero() {
                    s = s.add(&row[j].mul(&x[j]));
                }
            }
            x[*p] = s.neg().exact_div(&row[*p])?;
        }
        basis.push(x);
    }
    Some(basis)
}

pub type Matrix = Vec<Vec<Scalar>>;

pub fn mat_identity(n: usize, k: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one(k) } else { Scalar::zero(k) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let t = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = a[i][0].mul(&b[0][j]);
                    for l in 1..t {
                        s = s.add(&a[i][l].mul(&b[l][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_apply(m: &Matrix, v: &[Scalar], k: usize) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            let mut s = Scalar::zero(k);
            for (j, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    s = s.add(&row[j].mul(x));
                }
            }
            s
        })
        .collect()
}

/// Solve a x = b exactly. None if a is singular or a division is inexact.
pub fn solve(a: &Matrix, b: &[Scalar], k: usize) -> Option<Vec<Scalar>> {
    let n = a.len();
    // x solves a x = b iff (x, -1) spans the nullspace of the augmented matrix.
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut r = a[i].clone();
            r.push(b[i].clone());
            r
        })
        .collect();
    let ns = nullspace(&rows, n + 1, k)?;
    if ns.len() != 1 {
        return None;
    }
    let v = &ns[0];
    if v[n].is_zero() {
        return None;
    }
    // Free variable is set to one at the single non-pivot column, which must
    // be the augmented column when a is invertible.
    if !v[n].is_one() {
        return None;
    }
    Some(v[..n].iter().map(|x| x.neg()).collect())
}

pub fn mat_inverse(a: &Matrix, k: usize) -> Option<Matrix> {
    let n = a.len();
    let mut cols = vec![];
    for j in 0..n {
        let e: Vec<Scalar> = (0..n)
            .map(|i| if i == j { Scalar::one(k) } else { Scalar::zero(k) })
            .collect();
        cols.push(solve(a, &e, k)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Scalar;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(0, n)
    }

    #[test]
    fn echelon_rank_and_reduce() {
        let mut e = Echelon::new(3, 0);
        assert!(e.insert(&[s(1), s(2), s(0)]));
        assert!(e.insert(&[s(0), s(1), s(1)]));
        assert!(!e.insert(&[s(1), s(3), s(1)]));
        assert_eq!(e.rank(), 2);
        let r = e.reduce(&[s(2), s(4), s(0)]).unwrap();
        assert!(r.iter().all(|x| x.is_zero()));
        let r2 = e.reduce(&[s(0), s(0), s(5)]).unwrap();
        assert_eq!(r2[0], s(0));
        assert!(!r2.iter().all(|x| x.is_zero()));
        assert_eq!(e.non_pivots(), vec![2]);
    }

    #[test]
    fn inverse_of_small_matrix() {
        let a = vec![vec![s(1), s(2)], vec![s(3), s(5)]];
        let inv = mat_inverse(&a, 0).unwrap();
        assert_eq!(mat_mul(&a, &inv), mat_identity(2, 0));
        assert_eq!(mat_mul(&inv, &a), mat_identity(2, 0));
        let singular = vec![vec![s(1), s(2)], vec![s(2), s(4)]];
        assert!(mat_inverse(&singular, 0).is_none());
    }

    #[test]
    fn nullspace_of_rank_one() {
        let rows = vec![vec![s(1), s(2)]];
        let ns = nullspace(&rows, 2, 0).unwrap();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!(v[0].add(&s(2).mul(&v[1])).is_zero());
    }
}
