//! Exact arithmetic in K = Q[θ]/(f) for a monic integer polynomial f.
//!
//! Elements are stored as integer numerators over a single positive
//! denominator, kept in lowest terms, so equality and hashing are structural.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{q, QPoly, Q};

#[derive(Debug)]
pub struct NumberField {
    pub label: String,
    /// Monic defining polynomial, constant term first.
    pub poly: Vec<BigInt>,
    pub n: usize,
    fpoly: QPoly,
}

impl NumberField {
    pub fn new(label: &str, poly: Vec<BigInt>) -> Result<Arc<NumberField>> {
        if poly.len() < 2 {
            return Err(Error::InvalidInput("defining polynomial must have degree >= 1".into()));
        }
        if !poly.last().unwrap().is_one() {
            return Err(Error::InvalidInput("defining polynomial must be monic".into()));
        }
        let n = poly.len() - 1;
        let fpoly = QPoly::from_ints(&poly);
        Ok(Arc::new(NumberField { label: label.to_string(), poly, n, fpoly }))
    }

    pub fn from_i64(label: &str, poly: &[i64]) -> Result<Arc<NumberField>> {
        NumberField::new(label, poly.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn defining_poly(&self) -> &QPoly {
        &self.fpoly
    }

    /// gcd(f, f') = 1 over Q.
    pub fn is_squarefree(&self) -> bool {
        self.fpoly.gcd(&self.fpoly.derivative()).degree() == Some(0)
    }
}

#[derive(Clone)]
pub struct NFElement {
    field: Arc<NumberField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for NFElement {
    fn eq(&self, o: &Self) -> bool {
        self.den == o.den && self.num == o.num
    }
}

impl Eq for NFElement {}

impl Hash for NFElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.num.hash(h);
        self.den.hash(h);
    }
}

impl fmt::Debug for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{}", i),
            };
            let coef = if i > 0 && c.is_one() {
                String::new()
            } else if i > 0 && (-c).is_one() {
                "-".to_string()
            } else if i > 0 {
                format!("{}*", c)
            } else {
                c.to_string()
            };
            terms.push(format!("{}{}", coef, mono));
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ").replace("+ -", "- ") };
        if self.den.is_one() {
            write!(f, "{}", body)
        } else {
            write!(f, "({})/{}", body, self.den)
        }
    }
}

impl NFElement {
    fn normalized(field: Arc<NumberField>, mut num: Vec<BigInt>, mut den: BigInt) -> NFElement {
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        if !den.is_one() {
            let mut g = den.clone();
            for c in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(c);
            }
            if num.iter().all(|c| c.is_zero()) {
                g = den.clone();
            }
            if !g.is_one() {
                for c in num.iter_mut() {
                    *c = &*c / &g;
                }
                den = &den / &g;
            }
        }
        NFElement { field, num, den }
    }

    pub fn from_coords(field: &Arc<NumberField>, coords: &[Q]) -> NFElement {
        assert_eq!(coords.len(), field.n, "coordinate vector has wrong length");
        let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        NFElement::normalized(field.clone(), num, den)
    }

    pub fn from_int_coords(field: &Arc<NumberField>, coords: &[BigInt]) -> NFElement {
        assert_eq!(coords.len(), field.n, "coordinate vector has wrong length");
        NFElement { field: field.clone(), num: coords.to_vec(), den: BigInt::one() }
    }

    pub fn from_i64_coords(field: &Arc<NumberField>, coords: &[i64]) -> NFElement {
        let mut c: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        c.resize(field.n, BigInt::zero());
        NFElement { field: field.clone(), num: c, den: BigInt::one() }
    }

    pub fn from_q(field: &Arc<NumberField>, x: &Q) -> NFElement {
        let mut num = vec![BigInt::zero(); field.n];
        num[0] = x.numer().clone();
        NFElement::normalized(field.clone(), num, x.denom().clone())
    }

    pub fn from_int(field: &Arc<NumberField>, x: i64) -> NFElement {
        NFElement::from_q(field, &q(x))
    }

    pub fn zero(field: &Arc<NumberField>) -> NFElement {
        NFElement::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> NFElement {
        NFElement::from_int(field, 1)
    }

    /// θ^k reduced modulo f.
    pub fn theta_pow(field: &Arc<NumberField>, k: usize) -> NFElement {
        if k < field.n {
            let mut num = vec![BigInt::zero(); field.n];
            num[k] = BigInt::one();
            return NFElement { field: field.clone(), num, den: BigInt::one() };
        }
        NFElement::theta(field).pow(k as i64).expect("theta is nonzero")
    }

    pub fn theta(field: &Arc<NumberField>) -> NFElement {
        if field.n == 1 {
            return NFElement::from_q(field, &(-qi_(&field.poly[0])));
        }
        NFElement::theta_pow(field, 1)
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &QPoly) -> NFElement {
        let r = p.rem(field.defining_poly());
        let mut c = r.0.clone();
        c.resize(field.n, Q::zero());
        NFElement::from_coords(field, &c)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> Vec<Q> {
        self.num.iter().map(|c| Q::new(c.clone(), self.den.clone())).collect()
    }

    pub fn coord(&self, i: usize) -> Q {
        Q::new(self.num[i].clone(), self.den.clone())
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral_coords(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_poly(&self) -> QPoly {
        QPoly::new(self.coords())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.is_rational().then(|| self.coord(0))
    }

    pub fn add(&self, o: &NFElement) -> NFElement {
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect();
            return NFElement::normalized(self.field.clone(), num, self.den.clone());
        }
        let num = self.num.iter().zip(&o.num).map(|(a, b)| a * &o.den + b * &self.den).collect();
        NFElement::normalized(self.field.clone(), num, &self.den * &o.den)
    }

    pub fn sub(&self, o: &NFElement) -> NFElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> NFElement {
        NFElement { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn scale(&self, s: &Q) -> NFElement {
        let num = self.num.iter().map(|c| c * s.numer()).collect();
        NFElement::normalized(self.field.clone(), num, &self.den * s.denom())
    }

    pub fn scale_int(&self, s: &BigInt) -> NFElement {
        let num = self.num.iter().map(|c| c * s).collect();
        NFElement::normalized(self.field.clone(), num, self.den.clone())
    }

    pub fn mul(&self, o: &NFElement) -> NFElement {
        let n = self.field.n;
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let f = &self.field.poly;
        for i in (n..2 * n - 1).rev() {
            let c = std::mem::take(&mut prod[i]);
            if c.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().enumerate().take(n) {
                if !fj.is_zero() {
                    prod[i - n + j] -= &c * fj;
                }
            }
        }
        prod.truncate(n);
        NFElement::normalized(self.field.clone(), prod, &self.den * &o.den)
    }

    pub fn square(&self) -> NFElement {
        self.mul(self)
    }

    pub fn inv(&self) -> Result<NFElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(NFElement::from_q(&self.field, &r.recip()));
        }
        let (g, s, _) = self.to_poly().xgcd(self.field.defining_poly());
        debug_assert_eq!(g, QPoly::one(), "defining polynomial is not irreducible");
        if g != QPoly::one() {
            return Err(Error::DivisionByZero);
        }
        Ok(NFElement::from_poly(&self.field, &s))
    }

    pub fn div(&self, o: &NFElement) -> Result<NFElement> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<NFElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(base.pow_u(e.unsigned_abs()))
    }

    pub fn pow_u(&self, mut e: u64) -> NFElement {
        let mut result = NFElement::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.square();
            }
        }
        result
    }

    /// Field norm N_{K/Q}, as Res(f, a) (f monic).
    pub fn norm(&self) -> Q {
        if self.is_zero() {
            return Q::zero();
        }
        self.field.defining_poly().resultant(&self.to_poly())
    }

    /// Multiplication-by-self matrix on the power basis: column j = self·θ^j.
    pub fn mult_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.field.n;
        let mut m = vec![vec![Q::zero(); n]; n];
        let mut cur = self.clone();
        let theta = NFElement::theta_pow(&self.field, 1);
        for j in 0..n {
            let c = cur.coords();
            for i in 0..n {
                m[i][j] = c[i].clone();
            }
            if j + 1 < n {
                cur = cur.mul(&theta);
            }
        }
        m
    }

    pub fn trace(&self) -> Q {
        let m = self.mult_matrix();
        (0..self.field.n).map(|i| m[i][i].clone()).sum()
    }

    /// Evaluates the polynomial representative of `self` at `x`; the result lives in `x`'s field.
    pub fn compose(&self, x: &NFElement) -> NFElement {
        let mut acc = NFElement::zero(&x.field);
        for i in (0..self.field.n).rev() {
            acc = acc.mul(x);
            if !self.num[i].is_zero() {
                acc = acc.add(&NFElement::from_q(&x.field, &self.coord(i)));
            }
        }
        acc
    }

    /// Primitive integer minimal polynomial over Q with positive leading
    /// coefficient, constant term first.
    pub fn minimal_polynomial(&self) -> Vec<BigInt> {
        let n = self.field.n;
        let mut powers: Vec<Vec<Q>> = vec![NFElement::one(&self.field).coords()];
        let mut cur = NFElement::one(&self.field);
        for d in 1..=n {
            cur = cur.mul(self);
            powers.push(cur.coords());
            if let Some(rel) = dependency(&powers) {
                debug_assert_eq!(rel.len(), d + 1);
                return primitive_int(&rel);
            }
        }
        unreachable!("n+1 powers in an n-dimensional space are dependent")
    }

    pub fn is_algebraic_integer(&self) -> bool {
        let mp = self.minimal_polynomial();
        mp.last().map(|c| c.is_one()).unwrap_or(false)
    }
}

fn qi_(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// If the last vector is a Q-combination of the previous ones (assumed
/// independent), returns coefficients c with Σ c_i v_i = 0 and c_last = 1.
fn dependency(vs: &[Vec<Q>]) -> Option<Vec<Q>> {
    let k = vs.len() - 1;
    let n = vs[0].len();
    // Solve Σ_{i<k} y_i v_i = v_k over Q by Gaussian elimination.
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = (0..k).map(|i| vs[i][r].clone()).collect();
            row.push(vs[k][r].clone());
            row
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut prow = 0;
    for c in 0..k {
        let Some(p) = (prow..n).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(prow, p);
        let inv = rows[prow][c].recip();
        for x in rows[prow].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != prow && !rows[r][c].is_zero() {
                let f = rows[r][c].clone();
                let pr = rows[prow].clone();
                for (x, y) in rows[r].iter_mut().zip(pr.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        piv_cols.push(c);
        prow += 1;
    }
    if rows[prow..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut y = vec![Q::zero(); k];
    for (i, &c) in piv_cols.iter().enumerate() {
        y[c] = rows[i][k].clone();
    }
    let mut rel: Vec<Q> = y.into_iter().map(|v| -v).collect();
    rel.push(q(1));
    Some(rel)
}

fn primitive_int(rel: &[Q]) -> Vec<BigInt> {
    let l = rel.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = rel.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
    if out.last().unwrap().is_negative() {
        out = out.into_iter().map(|c| -c).collect();
    }
    out
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&NFElement> for &NFElement {
            type Output = NFElement;
            fn $m(self, o: &NFElement) -> NFElement {
                self.$f(o)
            }
        }
        impl std::ops::$tr<NFElement> for NFElement {
            type Output = NFElement;
            fn $m(self, o: NFElement) -> NFElement {
                (&self).$f(&o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &NFElement {
    type Output = NFElement;
    fn neg(self) -> NFElement {
        NFElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z7() -> Arc<NumberField> {
        NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn reduction_mod_phi7() {
        let k = z7();
        let z = NFElement::theta(&k);
        let z5 = z.pow(5).unwrap();
        let p = z.mul(&z5);
        assert_eq!(p, NFElement::from_i64_coords(&k, &[-1, -1, -1, -1, -1, -1]));
        assert!(z.pow(7).unwrap().is_one());
    }

    #[test]
    fn cancellation_and_division() {
        let k = z7();
        let a = NFElement::from_i64_coords(&k, &[1, 1]);
        let b = NFElement::from_i64_coords(&k, &[1, -1]);
        assert_eq!(a.add(&b), NFElement::from_int(&k, 2));
        assert!(a.div(&a).unwrap().is_one());
        assert_eq!(a.div(&NFElement::zero(&k)), Err(Error::DivisionByZero));
        let c = NFElement::from_coords(&k, &[Q::new(1.into(), 3.into()), q(0), q(2), q(0), q(0), q(-5)]);
        let ci = c.inv().unwrap();
        assert!(c.mul(&ci).is_one());
    }

    #[test]
    fn norms() {
        let k = z7();
        assert_eq!(NFElement::from_int(&k, 3).norm(), q(729));
        assert_eq!(NFElement::theta(&k).norm(), q(1));
        assert_eq!(NFElement::from_i64_coords(&k, &[1, -1]).norm(), q(7));
        // 1 + z + ... + z^4 = (z^5 - 1)/(z - 1)
        assert_eq!(NFElement::from_i64_coords(&k, &[1, 1, 1, 1, 1]).norm(), q(1));
    }

    #[test]
    fn minimal_polynomials() {
        let k = z7();
        let z = NFElement::theta(&k);
        let mp = z.minimal_polynomial();
        assert_eq!(mp, vec![1, 1, 1, 1, 1, 1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let half = NFElement::from_q(&k, &Q::new(1.into(), 2.into()));
        assert_eq!(half.minimal_polynomial(), vec![BigInt::from(-1), BigInt::from(2)]);
        let r = z.add(&z.inv().unwrap());
        let mp = r.minimal_polynomial();
        assert_eq!(mp, vec![-1, -2, 1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
        // cross-check against numeric roots 2cos(2πj/7)
        for j in 1..=3 {
            let x = 2.0 * (2.0 * std::f64::consts::PI * j as f64 / 7.0).cos();
            let v = x * x * x + x * x - 2.0 * x - 1.0;
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn trace_and_compose() {
        let k = z7();
        let z = NFElement::theta(&k);
        assert_eq!(z.trace(), q(-1));
        let z3 = z.pow(3).unwrap();
        let z2 = z.pow(2).unwrap();
        assert_eq!(z2.compose(&z3), z.pow(6).unwrap());
    }
}
