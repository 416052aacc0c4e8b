//! Reduction of field elements modulo primes that split completely, used as a
//! cheap prefilter before exact checks.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::field::{NFElement, NumberField};
use crate::poly::{modp, small_primes};

#[derive(Clone, Debug)]
pub struct SplitPrime {
    pub p: u64,
    /// The n distinct roots of f modulo p.
    pub roots: Vec<u64>,
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

fn bigmod(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r < BigInt::zero() { r + BigInt::from(p) } else { r };
    r.to_u64().unwrap()
}

/// `count` primes ≥ `start` modulo which f splits into distinct linear factors.
pub fn split_primes(field: &NumberField, count: usize, start: u64) -> Vec<SplitPrime> {
    let mut out = Vec::new();
    let mut from = start;
    while out.len() < count {
        for p in small_primes(64, from) {
            from = p + 1;
            if out.len() == count {
                break;
            }
            match modp::factor_degrees(&field.poly, p) {
                Some(d) if d.iter().all(|&x| x == 1) => {}
                _ => continue,
            }
            let f: Vec<u64> = field.poly.iter().map(|c| bigmod(c, p)).collect();
            let roots: Vec<u64> = (0..p)
                .filter(|&x| f.iter().rev().fold(0u64, |acc, &c| (mulmod(acc, x, p) + c) % p) == 0)
                .collect();
            if roots.len() == field.n {
                out.push(SplitPrime { p, roots });
            }
        }
    }
    out
}

impl SplitPrime {
    /// Images of `a` at the n roots; None if p divides the denominator.
    pub fn eval(&self, a: &NFElement) -> Option<Vec<u64>> {
        let p = self.p;
        let den = bigmod(a.denominator(), p);
        if den == 0 {
            return None;
        }
        let dinv = modp::inv(den, p);
        let num: Vec<u64> = a.numerators().iter().map(|c| bigmod(c, p)).collect();
        Some(
            self.roots
                .iter()
                .map(|&r| mulmod(num.iter().rev().fold(0u64, |acc, &c| (mulmod(acc, r, p) + c) % p), dinv, p))
                .collect(),
        )
    }

    pub fn norm(&self, img: &[u64]) -> u64 {
        img.iter().fold(1u64, |acc, &x| mulmod(acc, x, self.p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_respect_multiplication_and_norm() {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let sps = split_primes(&k, 2, 1000);
        assert_eq!(sps.len(), 2);
        for sp in &sps {
            assert_eq!(sp.p % 7, 1);
            let a = NFElement::from_i64_coords(&k, &[1, -1]);
            let b = NFElement::from_i64_coords(&k, &[2, 0, 3]);
            let ia = sp.eval(&a).unwrap();
            let ib = sp.eval(&b).unwrap();
            let iab = sp.eval(&a.mul(&b)).unwrap();
            for j in 0..6 {
                assert_eq!(iab[j], mulmod(ia[j], ib[j], sp.p));
            }
            assert_eq!(sp.norm(&ia), 7);
        }
    }
}
