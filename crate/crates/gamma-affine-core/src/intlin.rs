//! Small exact integer linear algebra: Hermite/Smith style eliminations used
//! for kernels of characters and quotients of finitely generated abelian
//! groups. Matrices here are tiny (ranks at most a handful), so the plain
//! i128 schoolbook algorithms are plenty.

pub type Mat = Vec<Vec<i128>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// Smith normal form: returns (d, u, v) with u * a * v = d, u and v unimodular,
/// d diagonal with d[i][i] dividing d[i+1][i+1].
pub fn smith_normal_form(a: &Mat) -> (Mat, Mat, Mat) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // Find a pivot with minimal absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        swap_rows(&mut d, &mut u, t, pi);
        swap_cols(&mut d, &mut v, t, pj);
        // Reduce row and column t; repeat until clean.
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if d[i][t] != 0 {
                    let q = div_round(d[i][t], d[t][t]);
                    row_op(&mut d, &mut u, i, t, -q);
                    if d[i][t] != 0 {
                        swap_rows(&mut d, &mut u, t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if d[t][j] != 0 {
                    let q = div_round(d[t][j], d[t][t]);
                    col_op(&mut d, &mut v, j, t, -q);
                    if d[t][j] != 0 {
                        swap_cols(&mut d, &mut v, t, j);
                        dirty = true;
                    }
                }
            }
        }
        // Divisibility fix-up: fold any entry not divisible by the pivot.
        let mut fixed = false;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if d[i][j] % d[t][t] != 0 {
                    row_op(&mut d, &mut u, t, i, 1);
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if d[t][t] < 0 {
            negate_row(&mut d, &mut u, t);
        }
        t += 1;
    }
    (d, u, v)
}

fn div_round(a: i128, b: i128) -> i128 {
    // Round toward nearest to keep entries small; any quotient works.
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r > 0) == (b > 0) { 1 } else { -1 }
    } else {
        q
    }
}

fn swap_rows(d: &mut Mat, u: &mut Mat, a: usize, b: usize) {
    if a != b {
        d.swap(a, b);
        u.swap(a, b);
    }
}

fn swap_cols(d: &mut Mat, v: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in d.iter_mut() {
        row.swap(a, b);
    }
    for row in v.iter_mut() {
        row.swap(a, b);
    }
}

fn row_op(d: &mut Mat, u: &mut Mat, i: usize, j: usize, c: i128) {
    // row_i += c * row_j
    for t in 0..d[i].len() {
        d[i][t] += c * d[j][t];
    }
    for t in 0..u[i].len() {
        u[i][t] += c * u[j][t];
    }
}

fn col_op(d: &mut Mat, v: &mut Mat, j: usize, i: usize, c: i128) {
    // col_j += c * col_i
    for row in d.iter_mut() {
        row[j] += c * row[i];
    }
    for row in v.iter_mut() {
        row[j] += c * row[i];
    }
}

fn negate_row(d: &mut Mat, u: &mut Mat, i: usize) {
    for x in d[i].iter_mut() {
        *x = -*x;
    }
    for x in u[i].iter_mut() {
        *x = -*x;
    }
}

/// Basis of the integer kernel of a (rows x cols) matrix: vectors x in Z^cols
/// with a x = 0, as rows of the returned matrix.
pub fn integer_kernel(a: &Mat) -> Mat {
    if a.is_empty() || a[0].is_empty() {
        // Kernel of an empty map is everything / nothing.
        let cols = if a.is_empty() { 0 } else { a[0].len() };
        return identity(cols);
    }
    let (d, _u, v) = smith_normal_form(a);
    let rows = a.len();
    let cols = a[0].len();
    let rank = (0..rows.min(cols)).take_while(|&i| d[i][i] != 0).count();
    // Kernel basis: last cols-rank columns of v.
    (rank..cols)
        .map(|j| (0..cols).map(|i| v[i][j]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: Mat) {
        let (d, u, v) = smith_normal_form(&a);
        assert_eq!(mat_mul(&mat_mul(&u, &a), &v), d);
        let n = d.len().min(d[0].len());
        for i in 0..n {
            for j in 0..d[0].len() {
                if i != j {
                    assert_eq!(d[i][j], 0);
                }
            }
            if i + 1 < n && d[i + 1][i + 1] != 0 {
                assert!(d[i][i] != 0 && d[i + 1][i + 1] % d[i][i] == 0);
            }
        }
    }

    #[test]
    fn snf_examples() {
        check_snf(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        check_snf(vec![vec![0, 0], vec![0, 0]]);
        check_snf(vec![vec![1, 2, 3]]);
        check_snf(vec![vec![6], vec![10]]);
        check_snf(vec![vec![2, 0], vec![0, 3], vec![5, 7]]);
    }

    #[test]
    fn kernel_examples() {
        // Kernel of (1 2): spanned by (2, -1) up to sign.
        let k = integer_kernel(&vec![vec![1, 2]]);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0] + 2 * v[1], 0);
        assert_eq!(v[0].abs().max(v[1].abs()), 2);

        // Full-rank map: trivial kernel.
        assert!(integer_kernel(&vec![vec![2, 1], vec![1, 1]]).is_empty());

        // Zero map: full kernel.
        assert_eq!(integer_kernel(&vec![vec![0, 0]]).len(), 2);
    }
}
