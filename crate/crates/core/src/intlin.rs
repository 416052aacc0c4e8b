//! Integer linear systems E·a = e over Z via unimodular column reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Column-style Hermite reduction: returns (H, U) with E·U = H, U unimodular,
/// H in column echelon form (each nonzero column has a leading entry in a
/// strictly later row than the previous one).
pub fn column_echelon(e: &[Vec<BigInt>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = e.len();
    let mut h: Vec<Vec<BigInt>> = e.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let col_op = |mat: &mut Vec<Vec<BigInt>>, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt| {
        // (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for row in mat.iter_mut() {
            let (x, y) = (row[i].clone(), row[j].clone());
            row[i] = a * &x + b * &y;
            row[j] = c * &x + d * &y;
        }
    };
    let mut piv_col = 0;
    for r in 0..m {
        if piv_col == ncols {
            break;
        }
        for j in piv_col + 1..ncols {
            if h[r][j].is_zero() {
                continue;
            }
            let (x, y) = (h[r][piv_col].clone(), h[r][j].clone());
            let g = x.extended_gcd(&y);
            let (p, q) = (g.x.clone(), g.y.clone());
            let (xg, yg) = (&x / &g.gcd, &y / &g.gcd);
            let neg_yg = -&yg;
            col_op(&mut h, piv_col, j, &p, &q, &neg_yg, &xg);
            col_op(&mut u, piv_col, j, &p, &q, &neg_yg, &xg);
        }
        if !h[r][piv_col].is_zero() {
            if h[r][piv_col].is_negative() {
                for row in h.iter_mut() {
                    row[piv_col] = -&row[piv_col];
                }
                for row in u.iter_mut() {
                    row[piv_col] = -&row[piv_col];
                }
            }
            piv_col += 1;
        }
    }
    (h, u)
}

/// Integer solutions of E·a = e: a particular solution and a basis of the
/// integer kernel (each basis vector has length `ncols`). None if infeasible.
pub fn solve_integer_system(e: &[Vec<BigInt>], rhs: &[BigInt], ncols: usize) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let (h, u) = column_echelon(e, ncols);
    let m = e.len();
    // forward substitution on the echelon columns
    let mut y = vec![BigInt::zero(); ncols];
    let mut col = 0;
    for r in 0..m {
        let mut acc = rhs[r].clone();
        for c in 0..col {
            acc -= &h[r][c] * &y[c];
        }
        if col < ncols && !h[r][col].is_zero() {
            let (q, rem) = acc.div_rem(&h[r][col]);
            if !rem.is_zero() {
                return None;
            }
            y[col] = q;
            col += 1;
        } else if !acc.is_zero() {
            return None;
        }
    }
    let a: Vec<BigInt> = (0..ncols).map(|i| (0..ncols).map(|j| &u[i][j] * &y[j]).sum()).collect();
    let kernel: Vec<Vec<BigInt>> = (col..ncols).map(|j| (0..ncols).map(|i| u[i][j].clone()).collect()).collect();
    Some((a, kernel))
}

/// Hermite normal form of the row lattice spanned by `rows` (upper echelon,
/// positive pivots, entries above pivots reduced into [0, pivot)). Zero rows
/// are dropped, so the result is a canonical basis.
pub fn row_hnf(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let t: Vec<Vec<BigInt>> = (0..ncols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect();
    let (h, _) = column_echelon(&t, rows.len());
    let mut basis: Vec<Vec<BigInt>> = (0..rows.len())
        .map(|j| (0..ncols).map(|c| h[c][j].clone()).collect::<Vec<_>>())
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    // reduce above-pivot entries
    let pivots: Vec<usize> = basis.iter().map(|v| v.iter().position(|x| !x.is_zero()).unwrap()).collect();
    for i in 0..basis.len() {
        for k in 0..i {
            let pc = pivots[i];
            let p = basis[i][pc].clone();
            let q = basis[k][pc].div_floor(&p);
            if !q.is_zero() {
                let bi = basis[i].clone();
                for (x, y) in basis[k].iter_mut().zip(bi.iter()) {
                    *x -= &q * y;
                }
            }
        }
    }
    basis
}

/// Reduces `a` modulo the row lattice given by an HNF basis so that the
/// result is a canonical coset representative.
pub fn reduce_mod_hnf(a: &[BigInt], hnf: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut v = a.to_vec();
    for row in hnf {
        let pc = row.iter().position(|x| !x.is_zero()).unwrap();
        let q = v[pc].div_floor(&row[pc]);
        if !q.is_zero() {
            for (x, y) in v.iter_mut().zip(row.iter()) {
                *x -= &q * y;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn solves_and_reports_kernel() {
        let e = vec![b(&[2, 4, 6])];
        let (a, k) = solve_integer_system(&e, &b(&[8]), 3).unwrap();
        let dot = |v: &[BigInt]| -> BigInt { v.iter().zip(&e[0]).map(|(x, y)| x * y).sum() };
        assert_eq!(dot(&a), BigInt::from(8));
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(v).is_zero());
        }
        assert!(solve_integer_system(&e, &b(&[7]), 3).is_none());
    }

    #[test]
    fn inconsistent_rows() {
        let e = vec![b(&[1, 1]), b(&[2, 2])];
        assert!(solve_integer_system(&e, &b(&[1, 3]), 2).is_none());
        let (a, k) = solve_integer_system(&e, &b(&[1, 2]), 2).unwrap();
        assert_eq!(&a[0] + &a[1], BigInt::from(1));
        assert_eq!(k.len(), 1);
    }

    #[test]
    fn hnf_canonical() {
        let h1 = row_hnf(&[b(&[2, 4]), b(&[1, 3])], 2);
        let h2 = row_hnf(&[b(&[1, 3]), b(&[3, 7])], 2);
        assert_eq!(h1, h2);
        assert_eq!(h1, vec![b(&[1, 1]), b(&[0, 2])]);
        assert_eq!(reduce_mod_hnf(&b(&[5, 9]), &h1), b(&[0, 0]));
    }
}
