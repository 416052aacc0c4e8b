//! Dense univariate polynomials over Q, plus a small mod-p toolkit used for
//! factorization-degree screens.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// Parses "p" or "p/q" (optionally signed) into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
        Some((p, d)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(p, d))
        }
    }
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Coefficients low degree first, no trailing zeros. The zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly(pub Vec<Q>);

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly(c)
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![q(1)])
    }

    pub fn x() -> Self {
        QPoly(vec![q(0), q(1)])
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        QPoly::new(c.iter().map(qi).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }

    pub fn scale(&self, s: &Q) -> QPoly {
        QPoly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let lc_inv = d.lc().recip();
        let mut quo = vec![Q::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = &r[i] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[i - dd + j] -= &c * dj;
            }
            quo[i - dd] = c;
        }
        r.truncate(dd);
        (QPoly::new(quo), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·o = g, g monic.
    pub fn xgcd(&self, o: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (QPoly::one(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&qq.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&qq.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Resultant by the Euclidean recurrence over Q.
    pub fn resultant(&self, o: &QPoly) -> Q {
        let (Some(m), Some(n)) = (self.degree(), o.degree()) else {
            return Q::zero();
        };
        if n == 0 {
            return pow_q(&o.lc(), m);
        }
        if m == 0 {
            return pow_q(&self.lc(), n);
        }
        if m < n {
            let sign = if (m * n) % 2 == 1 { q(-1) } else { q(1) };
            return sign * o.resultant(self);
        }
        let r = self.rem(o);
        let Some(dr) = r.degree() else {
            return Q::zero();
        };
        let sign = if (m * n) % 2 == 1 { q(-1) } else { q(1) };
        sign * pow_q(&o.lc(), m - dr) * o.resultant(&r)
    }
}

pub fn pow_q(x: &Q, e: usize) -> Q {
    num_traits::pow(x.clone(), e)
}

/// Rational roots of an integer polynomial (rational root theorem).
pub fn has_rational_root(f: &[BigInt]) -> bool {
    let p = QPoly::from_ints(f);
    let Some(n) = p.degree() else { return false };
    if n == 0 {
        return false;
    }
    if f[0].is_zero() {
        return true;
    }
    let divisors = |v: &BigInt| -> Vec<BigInt> {
        let v = v.abs();
        let mut out = Vec::new();
        let lim = v.to_u64().unwrap_or(u64::MAX);
        let mut d = 1u64;
        while d.saturating_mul(d) <= lim {
            let bd = BigInt::from(d);
            if (&v % &bd).is_zero() {
                out.push(bd.clone());
                out.push(&v / &bd);
            }
            d += 1;
            if d > 1_000_000 {
                break;
            }
        }
        out
    };
    for a in divisors(&f[0]) {
        for b in divisors(&f[n]) {
            for s in [1, -1] {
                let r = Q::new(&a * s, b.clone());
                if p.eval(&r).is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

/// Arithmetic in F_p[x] with u64 coefficients, low degree first, trimmed.
pub mod modp {
    fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b, p);
            }
            b = mulmod(b, b, p);
            e >>= 1;
        }
        r
    }

    pub fn reduce_int(c: &[num_bigint::BigInt], p: u64) -> Vec<u64> {
        use num_traits::ToPrimitive;
        let bp = num_bigint::BigInt::from(p);
        trim(
            c.iter()
                .map(|x| {
                    let r = ((x % &bp) + &bp) % &bp;
                    r.to_u64().unwrap()
                })
                .collect(),
        )
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    (x + p - y) % p
                })
                .collect(),
        )
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut c = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + mulmod(x, y, p)) % p;
            }
        }
        trim(c)
    }

    pub fn rem(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let dd = d.len() - 1;
        let li = inv(d[dd], p);
        while r.len() > dd {
            let top = r.len() - 1;
            let c = mulmod(r[top], li, p);
            for (j, &dj) in d.iter().enumerate() {
                let idx = top - dd + j;
                r[idx] = (r[idx] + p - mulmod(c, dj, p)) % p;
            }
            r = trim(r);
            if r.len() > top {
                r.pop();
            }
        }
        trim(r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if x.is_empty() {
            return x;
        }
        let li = inv(*x.last().unwrap(), p);
        x.iter().map(|&c| mulmod(c, li, p)).collect()
    }

    pub fn derivative(a: &[u64], p: u64) -> Vec<u64> {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mulmod(c, i as u64 % p, p))
                .collect(),
        )
    }

    fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    /// Degrees of the irreducible factors of a squarefree `f` over F_p,
    /// by distinct-degree factorization. Returns None if f is not squarefree mod p
    /// or its degree drops.
    pub fn factor_degrees(f: &[num_bigint::BigInt], p: u64) -> Option<Vec<usize>> {
        let g0 = reduce_int(f, p);
        if g0.len() != f.len() {
            return None;
        }
        let dg = derivative(&g0, p);
        if gcd(&g0, &dg, p).len() != 1 {
            return None;
        }
        let lc_inv = inv(*g0.last().unwrap(), p);
        let mut g: Vec<u64> = g0.iter().map(|&c| mulmod(c, lc_inv, p)).collect();
        let mut degs = Vec::new();
        let mut h = vec![0u64, 1u64];
        let mut d = 0usize;
        while g.len() > 1 {
            d += 1;
            if 2 * d > g.len() - 1 {
                degs.push(g.len() - 1);
                break;
            }
            h = powmod(&h, p, &g, p);
            let t = gcd(&g, &sub(&h, &[0, 1], p), p);
            let td = t.len() - 1;
            if td > 0 {
                for _ in 0..td / d {
                    degs.push(d);
                }
                g = div_exact(&g, &t, p);
                h = rem(&h, &g, p);
            }
        }
        degs.sort_unstable();
        Some(degs)
    }

    fn div_exact(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
        let dd = d.len() - 1;
        let li = inv(d[dd], p);
        let mut r = a.to_vec();
        let mut qv = vec![0u64; a.len() - dd];
        for i in (dd..a.len()).rev() {
            let c = mulmod(r[i], li, p);
            qv[i - dd] = c;
            for (j, &dj) in d.iter().enumerate() {
                r[i - dd + j] = (r[i - dd + j] + p - mulmod(c, dj, p)) % p;
            }
        }
        trim(qv)
    }
}

pub fn small_primes(count: usize, start: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = start.max(2);
    while out.len() < count {
        if (2..).take_while(|d: &u64| d * d <= c).all(|d| c % d != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(c: &[i64]) -> QPoly {
        QPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn resultant_cyclotomic() {
        let phi7 = zp(&[1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(phi7.resultant(&zp(&[1, -1])), q(7));
        assert_eq!(phi7.resultant(&zp(&[0, 1])), q(1));
        assert_eq!(phi7.resultant(&zp(&[3])), q(729));
    }

    #[test]
    fn resultant_matches_root_product() {
        // x^2+1 has roots ±i; (x+2) evaluated: (2+i)(2-i) = 5
        assert_eq!(zp(&[1, 0, 1]).resultant(&zp(&[2, 1])), q(5));
    }

    #[test]
    fn xgcd_identity() {
        let a = zp(&[1, 1, 1, 1, 1, 1, 1]);
        let b = zp(&[2, 0, 3, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(g, QPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), QPoly::one());
    }

    #[test]
    fn rational_parse_roundtrip() {
        for s in ["0", "-3", "7/2", "-1/6"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn mod_p_degrees() {
        let phi7: Vec<BigInt> = vec![1, 1, 1, 1, 1, 1, 1].into_iter().map(BigInt::from).collect();
        // 2 has order 3 mod 7
        assert_eq!(modp::factor_degrees(&phi7, 2), Some(vec![3, 3]));
        assert_eq!(modp::factor_degrees(&phi7, 29), Some(vec![1; 6]));
        assert_eq!(modp::factor_degrees(&phi7, 3), Some(vec![6]));
        assert_eq!(modp::factor_degrees(&phi7, 7), None);
    }

    #[test]
    fn rational_roots() {
        let f: Vec<BigInt> = vec![-2, 1, 1].into_iter().map(BigInt::from).collect();
        assert!(has_rational_root(&f));
        let g: Vec<BigInt> = vec![1, 0, 1].into_iter().map(BigInt::from).collect();
        assert!(!has_rational_root(&g));
    }
}
