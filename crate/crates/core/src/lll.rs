//! Integral LLL reduction (all Gram–Schmidt data kept as exact integers).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Q;

#[derive(Clone, Debug)]
pub struct Reduced {
    /// Reduced basis, rows are vectors.
    pub basis: Vec<Vec<BigInt>>,
    /// d[0] = 1, d[i] = Gram determinant of the first i vectors.
    pub d: Vec<BigInt>,
}

impl Reduced {
    /// ||b*_i||² = d_{i+1}/d_i (0-based i).
    pub fn gs_norm_sq(&self, i: usize) -> Q {
        Q::new(self.d[i + 1].clone(), self.d[i].clone())
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rounds a/b to the nearest integer (b > 0), ties away from zero.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let num = a * &two + b;
    let den = b * &two;
    num.div_floor(&den)
}

/// LLL with δ = 99/100 on linearly independent rows.
pub fn lll(basis: Vec<Vec<BigInt>>) -> Reduced {
    let n = basis.len();
    let mut b = basis;
    if n == 0 {
        return Reduced { basis: b, d: vec![BigInt::one()] };
    }
    // 1-based bookkeeping as in the integral algorithm; d[0] = 1.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    d[1] = dot(&b[0], &b[0]);
    let (dp, dq) = (BigInt::from(99), BigInt::from(100));
    let mut k = 2usize;
    let mut kmax = 1usize;

    let redi = |k: usize, l: usize, b: &mut Vec<Vec<BigInt>>, lam: &mut Vec<Vec<BigInt>>, d: &Vec<BigInt>| {
        let two_l: BigInt = &lam[k][l] * 2;
        if two_l.abs() > d[l] {
            let qv = round_div(&lam[k][l], &d[l]);
            let bl = b[l - 1].clone();
            for (x, y) in b[k - 1].iter_mut().zip(bl.iter()) {
                *x -= &qv * y;
            }
            lam[k][l] -= &qv * &d[l];
            for i in 1..l {
                let t = &qv * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                    assert!(!d[k].is_zero(), "LLL input rows are linearly dependent");
                }
            }
        }
        loop {
            redi(k, k - 1, &mut b, &mut lam, &d);
            let lhs = &dq * &d[k] * &d[k - 2];
            let rhs = &dp * &d[k - 1] * &d[k - 1] - &dq * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                // swap k and k-1
                b.swap(k - 1, k - 2);
                for j in 1..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = t;
                }
                let l = lam[k][k - 1].clone();
                let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                    lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
                }
                d[k - 1] = bb;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    redi(k, l, &mut b, &mut lam, &d);
                }
                k += 1;
                break;
            }
        }
    }
    Reduced { basis: b, d }
}

/// Solves x·B = y for rational x, with B square (rows = basis vectors).
/// All integer coefficient vectors x with ‖Σ x_i b_i − y‖² ≤ radius_sq, for
/// a basis of full rank. None when more than `limit` vectors qualify or the
/// search tree would visit more than 64·limit nodes.
pub fn close_vectors(basis: &[Vec<BigInt>], y: &[BigInt], radius_sq: &Q, limit: usize) -> Option<Vec<Vec<BigInt>>> {
    let n = basis.len();
    let qv = |v: &[BigInt]| -> Vec<Q> { v.iter().map(|x| Q::from_integer(x.clone())).collect() };
    let qdot = |a: &[Q], b: &[Q]| -> Q { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // exact Gram–Schmidt
    let mut bstar: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut bnorm: Vec<Q> = Vec::with_capacity(n);
    let mut mu = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        let bi = qv(&basis[i]);
        let mut v = bi.clone();
        for j in 0..i {
            mu[i][j] = &qdot(&bi, &bstar[j]) / &bnorm[j];
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x = &*x - &mu[i][j] * y;
            }
        }
        let nn = qdot(&v, &v);
        if nn.is_zero() {
            return None;
        }
        bnorm.push(nn);
        bstar.push(v);
    }
    let yq = qv(y);
    let tau: Vec<Q> = (0..n).map(|i| &qdot(&yq, &bstar[i]) / &bnorm[i]).collect();
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    // Crude size estimate of the search tree before walking it.
    let mut est = 1f64;
    for b in &bnorm {
        est *= 2.0 * (radius_sq / b).to_f64().unwrap_or(f64::INFINITY).sqrt() + 3.0;
    }
    if !(est <= 64.0 * limit as f64) {
        return None;
    }
    fn rec(
        i: usize,
        rem: Q,
        x: &mut Vec<BigInt>,
        mu: &[Vec<Q>],
        bnorm: &[Q],
        tau: &[Q],
        out: &mut Vec<Vec<BigInt>>,
        limit: usize,
    ) -> bool {
        let n = x.len();
        let mut c = tau[i].clone();
        for j in i + 1..n {
            c = &c - &mu[j][i] * &Q::from_integer(x[j].clone());
        }
        // |x_i − c| ≤ sqrt(rem/B_i); widen by one and test exactly
        let span = (&rem / &bnorm[i]).to_f64().unwrap_or(f64::INFINITY).sqrt();
        if !span.is_finite() {
            return false;
        }
        let lo: BigInt = (&c - &Q::from_float(span).unwrap_or_else(Q::zero)).floor().to_integer() - 1;
        let hi: BigInt = (&c + &Q::from_float(span).unwrap_or_else(Q::zero)).ceil().to_integer() + 1;
        let mut xi = lo;
        while xi <= hi {
            let d = &Q::from_integer(xi.clone()) - &c;
            let cost = &d * &d * &bnorm[i];
            if cost <= rem {
                x[i] = xi.clone();
                let left = &rem - &cost;
                if i == 0 {
                    out.push(x.clone());
                    if out.len() > limit {
                        return false;
                    }
                } else if !rec(i - 1, left, x, mu, bnorm, tau, out, limit) {
                    return false;
                }
            }
            xi += 1;
        }
        x[i] = BigInt::zero();
        true
    }
    if n == 0 {
        return Some(out);
    }
    if !rec(n - 1, radius_sq.clone(), &mut x, &mu, bnorm.as_slice(), &tau, &mut out, limit) {
        return None;
    }
    Some(out)
}

pub fn coordinates(basis: &[Vec<BigInt>], y: &[BigInt]) -> Option<Vec<Q>> {
    let n = basis.len();
    if n == 0 || basis[0].len() != n {
        return None;
    }
    // transpose system: Bᵀ x = y
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = (0..n).map(|c| Q::from_integer(basis[c][r].clone())).collect();
            row.push(Q::from_integer(y[r].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pr = m[c].clone();
                for (x, yv) in m[r].iter_mut().zip(pr.iter()) {
                    *x = &*x - &f * yv;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn textbook_example() {
        let r = lll(vec![v(&[1, 1, 1]), v(&[-1, 0, 2]), v(&[3, 5, 6])]);
        assert_eq!(r.basis[0], v(&[0, 1, 0]));
        // determinant preserved: d_3 = det(B)^2 = 9
        assert_eq!(r.d[3], BigInt::from(9));
    }

    #[test]
    fn finds_integer_relation() {
        // relation 3*a - 2*b + c = 0 among a=1, b=sqrt2 approximations
        let c = 1_000_000_000i64;
        let x = [1.0f64, 2f64.sqrt(), 3.0 - 2.0 * 2f64.sqrt()];
        let rows = (0..3)
            .map(|i| {
                let mut r = vec![0i64; 4];
                r[i] = 1;
                r[3] = (x[i] * c as f64).round() as i64;
                v(&r)
            })
            .collect();
        let red = lll(rows);
        let first = &red.basis[0];
        let rel: Vec<i64> = first[..3].iter().map(|z| z.to_string().parse().unwrap()).collect();
        assert!(rel == vec![-3, 2, 1] || rel == vec![3, -2, -1], "{:?}", rel);
    }

    #[test]
    fn close_vectors_match_brute_force() {
        let b = vec![v(&[3, 1, 0]), v(&[1, -2, 1]), v(&[0, 1, 4])];
        let y = v(&[5, -3, 7]);
        let r2 = Q::from_integer(30.into());
        let mut got = close_vectors(&b, &y, &r2, 1000).unwrap();
        got.sort();
        let mut want = Vec::new();
        for x0 in -10i64..=10 {
            for x1 in -10i64..=10 {
                for x2 in -10i64..=10 {
                    let p: Vec<i64> = (0..3).map(|c| x0 * [3, 1, 0][c] + x1 * [1, -2, 1][c] + x2 * [0, 1, 4][c]).collect();
                    let d: i64 = p.iter().zip([5, -3, 7]).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d <= 30 {
                        want.push(v(&[x0, x1, x2]));
                    }
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert!(!got.is_empty());
    }

    #[test]
    fn coordinates_roundtrip() {
        let b = vec![v(&[2, 1]), v(&[0, 3])];
        let x = coordinates(&b, &v(&[4, 11])).unwrap();
        assert_eq!(x, vec![Q::from_integer(2.into()), Q::from_integer(3.into())]);
    }
}
