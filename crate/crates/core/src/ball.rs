//! Midpoint-radius ball arithmetic over MPFR floats.
//!
//! Midpoints are rounded to nearest at the working precision and the rounding
//! error is folded into the radius, which is itself always rounded up.

use num_bigint::BigInt;
use rug::float::{Constant, Round};
use rug::Float;

use crate::poly::Q;

pub const RAD_PREC: u32 = 64;

fn up<T>(v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Up).0
}

fn down<T>(v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    Float::with_val_round(RAD_PREC, v, Round::Down).0
}

fn upp<T>(p: u32, v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    Float::with_val_round(p, v, Round::Up).0
}

fn dnp<T>(p: u32, v: T) -> Float
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    Float::with_val_round(p, v, Round::Down).0
}

/// Rounds to nearest and reports a bound on the rounding error (zero if exact).
fn nearest<T>(p: u32, v: T) -> (Float, Float)
where
    Float: rug::Assign<T> + rug::ops::AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    let (f, o) = Float::with_val_round(p, v, Round::Nearest);
    let e = if o == std::cmp::Ordering::Equal { zero_rad() } else { rounding_err(&f, p, 0) };
    (f, e)
}

fn zero_rad() -> Float {
    Float::new(RAD_PREC)
}

/// Upper bound on the rounding error of a value produced at precision `prec`,
/// allowing `ops` chained roundings.
fn rounding_err(v: &Float, prec: u32, ops: i32) -> Float {
    if v.is_zero() {
        return zero_rad();
    }
    let a = up(&*v.as_abs());
    up(a << (ops - prec as i32))
}

pub fn bigint_to_integer(n: &BigInt) -> rug::Integer {
    let (sign, bytes) = n.to_bytes_le();
    let mag = rug::Integer::from_digits(&bytes, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        -mag
    } else {
        mag
    }
}

pub fn integer_to_bigint(i: &rug::Integer) -> BigInt {
    BigInt::parse_bytes(i.to_string_radix(16).as_bytes(), 16).expect("hex digits")
}

pub fn float_from_bigint(n: &BigInt, prec: u32) -> (Float, Float) {
    let i = bigint_to_integer(n);
    let f = Float::with_val(prec, &i);
    let err = if i.significant_bits() <= prec { zero_rad() } else { rounding_err(&f, prec, 1) };
    (f, err)
}

pub fn float_to_bigint_round(x: &Float) -> Option<BigInt> {
    x.to_integer().map(|i| integer_to_bigint(&i))
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

#[derive(Clone, Debug)]
pub struct RBall {
    pub mid: Float,
    pub rad: Float,
}

impl RBall {
    pub fn exact(mid: Float) -> Self {
        RBall { mid, rad: zero_rad() }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        RBall::exact(Float::with_val(prec, x))
    }

    pub fn from_q(x: &Q, prec: u32) -> Self {
        let (n, en) = float_from_bigint(x.numer(), prec);
        if x.denom() == &BigInt::from(1) {
            return RBall { mid: n, rad: en };
        }
        let (d, ed) = float_from_bigint(x.denom(), prec);
        let nb = RBall { mid: n, rad: en };
        let db = RBall { mid: d, rad: ed };
        nb.div(&db)
    }

    pub fn zero(prec: u32) -> Self {
        RBall::exact(Float::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn lower(&self) -> Float {
        dnp(self.prec(), &self.mid - &self.rad)
    }

    pub fn upper(&self) -> Float {
        upp(self.prec(), &self.mid + &self.rad)
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower().to_f64_round(Round::Down)
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper().to_f64_round(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }

    pub fn contains_zero(&self) -> bool {
        *self.mid.as_abs() <= self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.upper() < 0
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let d = up(Float::with_val(self.prec() + 8, &self.mid - Float::with_val(self.prec(), x)).abs());
        d <= self.rad
    }

    pub fn contains_ball(&self, o: &RBall) -> bool {
        let d = up(Float::with_val(self.prec().max(o.prec()) + 8, &self.mid - &o.mid).abs());
        up(&d + &o.rad) <= self.rad
    }

    pub fn overlaps(&self, o: &RBall) -> bool {
        let d = down(Float::with_val(self.prec().max(o.prec()) + 8, &self.mid - &o.mid).abs());
        d <= up(&self.rad + &o.rad)
    }

    pub fn neg(&self) -> RBall {
        RBall { mid: -self.mid.clone(), rad: self.rad.clone() }
    }

    pub fn add(&self, o: &RBall) -> RBall {
        let p = self.prec().max(o.prec());
        let (mid, e) = nearest(p, &self.mid + &o.mid);
        let rad = up(&self.rad + &o.rad);
        let rad = up(&rad + &e);
        RBall { mid, rad }
    }

    pub fn sub(&self, o: &RBall) -> RBall {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RBall) -> RBall {
        let p = self.prec().max(o.prec());
        let (mid, e) = nearest(p, &self.mid * &o.mid);
        let a = up(&*self.mid.as_abs());
        let b = up(&*o.mid.as_abs());
        let r = up(&a * &o.rad);
        let r = up(&r + &up(&b * &self.rad));
        let r = up(&r + &up(&self.rad * &o.rad));
        let r = up(&r + &e);
        RBall { mid, rad: r }
    }

    pub fn mul_f64(&self, x: f64) -> RBall {
        self.mul(&RBall::from_f64(x, self.prec()))
    }

    /// Division; the denominator ball must exclude zero.
    pub fn div(&self, o: &RBall) -> RBall {
        assert!(!o.contains_zero(), "ball division by a ball containing zero");
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid / &o.mid);
        // |a/b - m_a/m_b| <= (r_a + |m_a/m_b| r_b) / (|m_b| - r_b)
        let lo = down(&down(&*o.mid.as_abs()) - &o.rad);
        let q = up(&*mid.as_abs());
        let num = up(&self.rad + &up(&q * &o.rad));
        let r = up(&num / &lo);
        let r = up(&r + &rounding_err(&mid, p, 1));
        RBall { mid, rad: r }
    }

    pub fn abs(&self) -> RBall {
        if self.contains_zero() {
            let hi = self.upper().max(&(-self.lower()));
            let half = up(&hi / 2u32);
            RBall { mid: Float::with_val(self.prec(), &half), rad: half }
        } else {
            RBall { mid: self.mid.clone().abs(), rad: self.rad.clone() }
        }
    }

    pub fn max0(&self) -> RBall {
        if self.lower() >= 0 {
            self.clone()
        } else if self.upper() <= 0 {
            RBall::zero(self.prec())
        } else {
            let hi = self.upper();
            let half = up(&hi / 2u32);
            RBall { mid: Float::with_val(self.prec(), &half), rad: half }
        }
    }

    pub fn max(&self, o: &RBall) -> RBall {
        let lo = self.lower().max(&o.lower());
        let hi = self.upper().max(&o.upper());
        RBall::from_bounds(&lo, &hi, self.prec().max(o.prec()))
    }

    pub fn from_bounds(lo: &Float, hi: &Float, prec: u32) -> RBall {
        let s = Float::with_val(prec + 8, lo + hi);
        let mid = Float::with_val(prec, &s / 2u32);
        let r1 = up(&Float::with_val(prec + 8, hi - &mid));
        let r2 = up(&Float::with_val(prec + 8, &mid - lo));
        RBall { mid, rad: r1.max(&r2) }
    }

    /// Natural logarithm of a strictly positive ball.
    pub fn ln(&self) -> Option<RBall> {
        let lo = self.lower();
        if lo <= 0 {
            return None;
        }
        let p = self.prec();
        let lo_p = Float::with_val_round(p, &self.mid - &self.rad, Round::Down).0;
        let hi_p = Float::with_val_round(p, &self.mid + &self.rad, Round::Up).0;
        let l = Float::with_val_round(p, lo_p.ln_ref(), Round::Down).0;
        let h = Float::with_val_round(p, hi_p.ln_ref(), Round::Up).0;
        Some(RBall::from_bounds(&l, &h, p))
    }

    pub fn exp(&self) -> RBall {
        let p = self.prec();
        let lo = Float::with_val_round(p, &self.mid - &self.rad, Round::Down).0;
        let hi = Float::with_val_round(p, &self.mid + &self.rad, Round::Up).0;
        let l = Float::with_val_round(p, lo.exp_ref(), Round::Down).0;
        let h = Float::with_val_round(p, hi.exp_ref(), Round::Up).0;
        RBall::from_bounds(&l, &h, p)
    }

    pub fn sqr(&self) -> RBall {
        self.mul(self)
    }
}

/// A complex disk: center (re, im), radius rad.
#[derive(Clone, Debug)]
pub struct CBall {
    pub re: Float,
    pub im: Float,
    pub rad: Float,
}

impl CBall {
    pub fn new(re: Float, im: Float, rad: Float) -> Self {
        CBall { re, im, rad }
    }

    pub fn zero(prec: u32) -> Self {
        CBall { re: Float::new(prec), im: Float::new(prec), rad: zero_rad() }
    }

    pub fn one(prec: u32) -> Self {
        CBall::from_f64(1.0, 0.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        CBall { re: Float::with_val(prec, re), im: Float::with_val(prec, im), rad: zero_rad() }
    }

    pub fn from_real(r: &RBall) -> Self {
        CBall { re: r.mid.clone(), im: Float::new(r.prec()), rad: r.rad.clone() }
    }

    pub fn from_q(x: &Q, prec: u32) -> Self {
        CBall::from_real(&RBall::from_q(x, prec))
    }

    pub fn from_bigint(x: &BigInt, prec: u32) -> Self {
        let (f, e) = float_from_bigint(x, prec);
        CBall { re: f, im: Float::new(prec), rad: e }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> CBall {
        let re = Float::with_val(prec, &self.re);
        let im = Float::with_val(prec, &self.im);
        let mut rad = self.rad.clone();
        if prec < self.prec() {
            rad = up(&rad + &rounding_err(&re, prec, 1));
            rad = up(&rad + &rounding_err(&im, prec, 1));
        }
        CBall { re, im, rad }
    }

    fn mag_upper(&self) -> Float {
        let a = up(&*self.re.as_abs());
        let b = up(&*self.im.as_abs());
        up(&a + &b)
    }

    /// Upper bound on |center|.
    pub fn center_abs_upper(&self) -> Float {
        let p = self.prec() + 8;
        let a = upp(p, self.re.square_ref());
        let b = upp(p, self.im.square_ref());
        upp(p, upp(p, &a + &b).sqrt())
    }

    /// Lower bound on |center|.
    pub fn center_abs_lower(&self) -> Float {
        let p = self.prec() + 8;
        let a = dnp(p, self.re.square_ref());
        let b = dnp(p, self.im.square_ref());
        dnp(p, dnp(p, &a + &b).sqrt())
    }

    pub fn abs_upper(&self) -> Float {
        upp(self.prec() + 8, &self.center_abs_upper() + &self.rad)
    }

    pub fn abs_lower(&self) -> Float {
        let l = dnp(self.prec() + 8, &self.center_abs_lower() - &self.rad);
        if l < 0 {
            zero_rad()
        } else {
            l
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.center_abs_lower() <= self.rad
    }

    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: -self.im.clone(), rad: self.rad.clone() }
    }

    pub fn neg(&self) -> CBall {
        CBall { re: -self.re.clone(), im: -self.im.clone(), rad: self.rad.clone() }
    }

    pub fn add(&self, o: &CBall) -> CBall {
        let p = self.prec().max(o.prec());
        let (re, e1) = nearest(p, &self.re + &o.re);
        let (im, e2) = nearest(p, &self.im + &o.im);
        let mut rad = up(&self.rad + &o.rad);
        rad = up(&rad + &e1);
        rad = up(&rad + &e2);
        CBall { re, im, rad }
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        let p = self.prec().max(o.prec());
        let (a, e1) = nearest(2 * p, &self.re * &o.re);
        let (b, e2) = nearest(2 * p, &self.im * &o.im);
        let (c, e3) = nearest(2 * p, &self.re * &o.im);
        let (d, e4) = nearest(2 * p, &self.im * &o.re);
        let (re, e5) = nearest(p, &a - &b);
        let (im, e6) = nearest(p, &c + &d);
        let m1 = self.mag_upper();
        let m2 = o.mag_upper();
        let mut rad = up(&m1 * &o.rad);
        rad = up(&rad + &up(&m2 * &self.rad));
        rad = up(&rad + &up(&self.rad * &o.rad));
        for e in [e1, e2, e3, e4, e5, e6] {
            rad = up(&rad + &e);
        }
        CBall { re, im, rad }
    }

    pub fn mul_real(&self, r: &RBall) -> CBall {
        self.mul(&CBall::from_real(r))
    }

    pub fn sqr_abs(&self) -> RBall {
        let p = self.prec();
        let lo = self.abs_lower();
        let hi = self.abs_upper();
        let l = down(lo.square_ref());
        let h = up(hi.square_ref());
        RBall::from_bounds(&Float::with_val(p, &l), &Float::with_val(p, &h), p)
    }

    pub fn abs(&self) -> RBall {
        let p = self.prec();
        let c = Float::with_val(p, Float::with_val(p + 8, self.re.square_ref()) + Float::with_val(p + 8, self.im.square_ref())).sqrt();
        let lo = self.abs_lower();
        let hi = self.abs_upper();
        let r1 = up(&Float::with_val(p + 8, &hi - &c));
        let r2 = up(&Float::with_val(p + 8, &c - &lo));
        RBall { mid: c, rad: r1.max(&r2) }
    }

    /// Reciprocal of a disk not containing zero.
    pub fn recip(&self) -> Option<CBall> {
        let lo = self.center_abs_lower();
        if lo <= self.rad {
            return None;
        }
        let p = self.prec();
        let n2 = Float::with_val(p + 8, Float::with_val(p + 8, self.re.square_ref()) + Float::with_val(p + 8, self.im.square_ref()));
        let re = Float::with_val(p, &self.re / &n2);
        let im = Float::with_val(p, -Float::with_val(p + 8, &self.im / &n2));
        // |1/z - 1/c| <= r / (|c| (|c| - r))
        let gap = down(&lo - &self.rad);
        let den = down(&lo * &gap);
        let mut rad = up(&self.rad / &den);
        let hi = up(&self.center_abs_upper().recip());
        rad = up(&rad + &up(&hi >> (p as i32 - 4)));
        Some(CBall { re, im, rad })
    }

    pub fn div(&self, o: &CBall) -> Option<CBall> {
        o.recip().map(|r| self.mul(&r))
    }

    /// log|z| as a real ball; None if the disk meets zero.
    pub fn log_abs(&self) -> Option<RBall> {
        let p = self.prec();
        let lo = self.abs_lower();
        if lo <= 0 {
            return None;
        }
        let hi = self.abs_upper();
        let l = Float::with_val_round(p, Float::with_val_round(p, &lo, Round::Down).0.ln_ref(), Round::Down).0;
        let h = Float::with_val_round(p, Float::with_val_round(p, &hi, Round::Up).0.ln_ref(), Round::Up).0;
        // The radius working precision is only 64 bits; recenter using the
        // precise center modulus to keep the output tight.
        let c = Float::with_val(p, Float::with_val(p + 8, self.re.square_ref()) + Float::with_val(p + 8, self.im.square_ref()));
        let lc = Float::with_val(p, c.ln() / 2u32);
        let r1 = up(&Float::with_val(p + 8, &h - &lc));
        let r2 = up(&Float::with_val(p + 8, &lc - &l));
        let lc_err = rounding_err(&lc, p, 3);
        let rad = up(&r1.max(&r2) + &lc_err);
        // fall back to the direct bounds if the recentred radius is worse
        let direct = RBall::from_bounds(&l, &h, p);
        if direct.rad < rad {
            Some(direct)
        } else {
            Some(RBall { mid: lc, rad })
        }
    }

    /// A determination of arg z in (-π/2, 3π/2]: the principal value unless the
    /// disk may meet the negative real axis, in which case π + arg(-z).
    pub fn arg(&self) -> Option<RBall> {
        let p = self.prec();
        let lo = self.center_abs_lower();
        if lo <= self.rad {
            return None;
        }
        let straddles = {
            let re_hi = up(&self.re + &self.rad);
            let im_abs = down(&*self.im.as_abs());
            re_hi <= 0 || (down(&self.re - &self.rad) < 0 && im_abs <= self.rad)
        };
        let (y, x, shift) = if straddles {
            (-self.im.clone(), -self.re.clone(), true)
        } else {
            (self.im.clone(), self.re.clone(), false)
        };
        let mut a = Float::with_val(p, y.atan2_ref(&x));
        if shift {
            a = Float::with_val(p, &a + &pi(p + 8));
        }
        // |arg z - arg c| <= asin(r/|c|) <= (π/2) r/|c|
        let ratio = up(&self.rad / &lo);
        let mut rad = up(&ratio * &up(Float::with_val(RAD_PREC, 1.5707963267948967f64)));
        rad = up(&rad + &rounding_err(&a, p, 3));
        Some(RBall { mid: a, rad })
    }

    pub fn contains_point(&self, re: &Float, im: &Float) -> bool {
        let dr = Float::with_val(self.prec() + 8, &self.re - re);
        let di = Float::with_val(self.prec() + 8, &self.im - im);
        let d = up(up(up(dr.square_ref()) + up(di.square_ref())).sqrt());
        d <= self.rad
    }

    /// Distance between centers, lower bound.
    pub fn center_dist_lower(&self, o: &CBall) -> Float {
        let p = self.prec().max(o.prec()) + 8;
        let dr = Float::with_val(p, &self.re - &o.re);
        let di = Float::with_val(p, &self.im - &o.im);
        down(down(down(dr.square_ref()) + down(di.square_ref())).sqrt())
    }

    pub fn center_dist_upper(&self, o: &CBall) -> Float {
        let p = self.prec().max(o.prec()) + 8;
        let dr = Float::with_val(p, &self.re - &o.re);
        let di = Float::with_val(p, &self.im - &o.im);
        up(up(up(dr.square_ref()) + up(di.square_ref())).sqrt())
    }

    pub fn disjoint(&self, o: &CBall) -> bool {
        self.center_dist_lower(o) > up(&self.rad + &o.rad)
    }

    pub fn overlaps(&self, o: &CBall) -> bool {
        !self.disjoint(o)
    }

    pub fn contains(&self, o: &CBall) -> bool {
        up(&self.center_dist_upper(o) + &o.rad) <= self.rad
    }

    pub fn re_ball(&self) -> RBall {
        RBall { mid: self.re.clone(), rad: self.rad.clone() }
    }

    pub fn im_ball(&self) -> RBall {
        RBall { mid: self.im.clone(), rad: self.rad.clone() }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn rational_enclosure() {
        let b = RBall::from_q(&Q::new(1.into(), 3.into()), 128);
        assert!(b.rad_f64() < 1e-36);
        let three = b.mul(&RBall::from_f64(3.0, 128));
        assert!(three.contains_f64(1.0));
    }

    #[test]
    fn complex_ops_contain_exact() {
        let p = 200;
        let a = CBall::from_f64(0.25, -1.25, p);
        let b = CBall::from_f64(2.0, 0.5, p);
        let c = a.mul(&b);
        assert!(c.contains_point(&Float::with_val(p, 1.125), &Float::with_val(p, -2.375)));
        let inv = b.recip().unwrap();
        let one = inv.mul(&b);
        assert!(one.contains_point(&Float::with_val(p, 1), &Float::with_val(p, 0)));
    }

    #[test]
    fn log_and_arg() {
        let p = 256;
        let z = CBall::from_f64(-1.0, 0.0, p);
        let a = z.arg().unwrap();
        assert!((a.mid_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(a.rad_f64() < 1e-60);
        let l = CBall::from_f64(0.0, 2.0, p).log_abs().unwrap();
        assert!((l.mid_f64() - 2f64.ln()).abs() < 1e-15);
        assert!(l.rad_f64() < 1e-60);
        let third = RBall::from_q(&Q::new(1.into(), 3.into()), p);
        let l3 = third.ln().unwrap();
        assert!(l3.add(&RBall::from_q(&q(3), p).ln().unwrap()).contains_zero());
        assert!(l3.rad_f64() < 1e-60);
    }
}
