//! Exact linear algebra over Q and over K.

use std::fmt;

use rayon::prelude::*;

use crate::field::NFElement;
use crate::poly::Q;
use num_traits::{One, Zero};

/// Exact field scalars. `zero_like`/`one_like` exist because NFElement needs
/// its field to build constants.
pub trait Scalar: Clone + PartialEq + Send + Sync + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_s(&self) -> bool;
    fn add_s(&self, o: &Self) -> Self;
    fn sub_s(&self, o: &Self) -> Self;
    fn mul_s(&self, o: &Self) -> Self;
    /// Exact quotient; `o` is nonzero.
    fn div_s(&self, o: &Self) -> Self;
    fn neg_s(&self) -> Self {
        self.zero_like().sub_s(self)
    }
}

impl Scalar for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_s(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_s(&self, o: &Self) -> Self {
        self * o
    }
    fn div_s(&self, o: &Self) -> Self {
        self / o
    }
}

impl Scalar for NFElement {
    fn zero_like(&self) -> Self {
        NFElement::zero(self.field())
    }
    fn one_like(&self) -> Self {
        NFElement::one(self.field())
    }
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn add_s(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_s(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_s(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn div_s(&self, o: &Self) -> Self {
        self.div(o).expect("exact division by nonzero pivot")
    }
}

/// Row-major dense matrix. `zero` is kept so that empty matrices still know
/// their scalar domain.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Scalar> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<T>,
    zero: T,
}

pub type NFMatrix = Matrix<NFElement>;
pub type QMatrix = Matrix<Q>;

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>, zero: T) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, entries, zero: zero.zero_like() }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, zero: T) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let entries: Vec<T> = rows.into_iter().flatten().collect();
        Matrix::new(r, c, entries, zero)
    }

    pub fn zeros(rows: usize, cols: usize, zero: T) -> Self {
        Matrix::new(rows, cols, vec![zero.zero_like(); rows * cols], zero)
    }

    pub fn identity(n: usize, zero: T) -> Self {
        let mut m = Matrix::zeros(n, n, zero.clone());
        for i in 0..n {
            m.set(i, i, zero.one_like());
        }
        m
    }

    pub fn zero_scalar(&self) -> &T {
        &self.zero
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<T> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut e = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                e.push(self.get(r, c).clone());
            }
        }
        Matrix::new(self.cols, self.rows, e, self.zero.clone())
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows);
        let mut e = Vec::with_capacity(self.rows * o.cols);
        for r in 0..self.rows {
            for c in 0..o.cols {
                let mut acc = self.zero.clone();
                for k in 0..self.cols {
                    let (a, b) = (self.get(r, k), o.get(k, c));
                    if !a.is_zero_s() && !b.is_zero_s() {
                        acc = acc.add_s(&a.mul_s(b));
                    }
                }
                e.push(acc);
            }
        }
        Matrix::new(self.rows, o.cols, e, self.zero.clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix<T> {
        let mut e = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                e.push(self.get(r, c).clone());
            }
        }
        Matrix::new(self.rows, cols.len(), e, self.zero.clone())
    }

    /// Column j multiplied by s[j].
    pub fn scale_columns(&self, s: &[T]) -> Matrix<T> {
        let mut m = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c).mul_s(&s[c]);
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero_s())
    }

    pub fn rank(&self) -> usize {
        rref_fraction_free(self).1.len()
    }
}

/// Reduced row echelon form by fraction-free Gauss-Jordan elimination: every
/// intermediate entry is a minor of the input, so each division by the
/// previous pivot is exact. Pivot rows are normalized at the end.
pub fn rref_fraction_free<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<T>> = m.to_rows();
    let mut pivots = Vec::new();
    let mut prev = m.zero.one_like();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero_s()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let v = piv.mul_s(&a[i][j]).sub_s(&f.mul_s(&a[r][j]));
                a[i][j] = if v.is_zero_s() { v } else { v.div_s(&prev) };
            }
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    for (i, &c) in pivots.iter().enumerate() {
        let p = a[i][c].clone();
        for j in 0..cols {
            if !a[i][j].is_zero_s() {
                a[i][j] = a[i][j].div_s(&p);
            }
        }
    }
    (Matrix::from_rows_sized(a, rows, cols, m.zero.clone()), pivots)
}

impl<T: Scalar> Matrix<T> {
    fn from_rows_sized(rows_v: Vec<Vec<T>>, rows: usize, cols: usize, zero: T) -> Self {
        let e: Vec<T> = rows_v.into_iter().flatten().collect();
        Matrix::new(rows, cols, e, zero)
    }
}

/// Basis of {v : M v = 0}, one vector per row of the result.
pub fn kernel_basis<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let (r, pivots) = rref_fraction_free(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![m.zero.clone(); m.cols];
        v[f] = m.zero.one_like();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = r.get(i, f).neg_s();
        }
        out.push(v);
    }
    let n = out.len();
    Matrix::from_rows_sized(out, n, m.cols, m.zero.clone())
}

pub fn column_subset_rank<T: Scalar>(m: &Matrix<T>, cols: &[usize]) -> usize {
    m.select_columns(cols).rank()
}

/// All t-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < t - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t <= n {
        go(0, n, t, &mut Vec::new(), &mut out);
    }
    out
}

/// Checks that every t-column subset has rank min(t, rows). Returns the
/// lexicographically first failing subset, independent of the thread count.
pub fn check_rank_hypothesis<T: Scalar>(m: &Matrix<T>, t: usize) -> Result<(), Vec<usize>> {
    let want = t.min(m.rows);
    let subsets = combinations(m.cols, t);
    match subsets.par_iter().find_first(|s| column_subset_rank(m, s) != want) {
        Some(s) => Err(s.clone()),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::poly::q;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), q(0))
    }

    #[test]
    fn identity_and_simple_rows() {
        let (r, p) = rref_fraction_free(&Matrix::identity(3, q(0)));
        assert_eq!(r, Matrix::identity(3, q(0)));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = rref_fraction_free(&qm(&[&[3, 5]]));
        assert_eq!(r.row(0), vec![q(1), Q::new(5.into(), 3.into())]);
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn kernel_shapes() {
        assert_eq!(kernel_basis(&Matrix::identity(4, q(0))).rows, 0);
        let z = Matrix::zeros(2, 4, q(0));
        assert_eq!(kernel_basis(&z).rows, 4);
        let m = qm(&[&[1, 2, 3], &[2, 4, 7]]);
        let k = kernel_basis(&m);
        assert_eq!(k.rows, 1);
        assert!(m.mul(&k.transpose()).is_zero());
    }

    #[test]
    fn rref_idempotent_and_ranks() {
        let m = qm(&[&[0, 2, 4, 1], &[1, 1, 1, 1], &[1, 3, 5, 2]]);
        let (r, p) = rref_fraction_free(&m);
        assert_eq!(p.len(), 2);
        let (r2, _) = rref_fraction_free(&r);
        assert_eq!(r, r2);
        assert_eq!(column_subset_rank(&m, &[0]), 1);
        let dup = qm(&[&[1, 1], &[2, 2]]);
        assert_eq!(column_subset_rank(&dup, &[0, 1]), 1);
    }

    #[test]
    fn vandermonde_columns() {
        let nodes = [1i64, 2, 3, 5, 7, 11, 13, 17];
        let rows: Vec<Vec<Q>> = (0..4).map(|i| nodes.iter().map(|&x| q(x.pow(i))).collect()).collect();
        let m = Matrix::from_rows(rows, q(0));
        assert_eq!(column_subset_rank(&m, &[0, 3, 5, 7]), 4);
        assert!(check_rank_hypothesis(&m, 4).is_ok());
    }

    #[test]
    fn rank_hypothesis_witness() {
        let m = qm(&[&[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(check_rank_hypothesis(&m, 1), Err(vec![1]));
        assert!(check_rank_hypothesis(&Matrix::identity(3, q(0)), 3).is_ok());
    }

    #[test]
    fn combinations_lex() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn kernel_over_cyclotomic() {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let z = NFElement::theta(&k);
        let one = NFElement::one(&k);
        let m = Matrix::from_rows(vec![vec![one.clone(), z.clone(), z.square()], vec![z.clone(), z.square(), one.clone()]], one.zero_like());
        let ker = kernel_basis(&m);
        assert_eq!(ker.rows, 1);
        assert!(m.mul(&ker.transpose()).is_zero());
    }
}
