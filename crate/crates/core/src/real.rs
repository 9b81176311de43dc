//! Binary floating point with a per-value precision: `mant * 2^exp`, the
//! mantissa rounded to `prec` bits (round half away from zero).
//!
//! Binary operations run at the larger operand precision. Transcendental
//! functions use 24 guard bits internally.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{LazyLock, Mutex};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::poly::Rational;

const GUARD_BITS: u32 = 24;

#[derive(Clone)]
pub struct Real {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

/// Bits needed for `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

fn round_shift(mant: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return mant.clone();
    }
    let (sign, mag) = (mant.sign(), mant.magnitude());
    let half = num_bigint::BigUint::one() << (shift - 1);
    let rounded = (mag + half) >> shift;
    BigInt::from_biguint(if rounded.is_zero() { Sign::NoSign } else { sign }, rounded)
}

impl Real {
    fn normalized(mant: BigInt, exp: i64, prec: u32) -> Real {
        if mant.is_zero() {
            return Real::zero(prec);
        }
        let bits = mant.bits();
        if bits <= prec as u64 {
            return Real { mant, exp, prec };
        }
        let shift = bits - prec as u64;
        let mut mant = round_shift(&mant, shift);
        let mut exp = exp + shift as i64;
        if mant.bits() > prec as u64 {
            mant >>= 1;
            exp += 1;
        }
        Real { mant, exp, prec }
    }

    pub fn zero(prec: u32) -> Real {
        Real {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Real {
        Real::from_int(1, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Real {
        Real::normalized(BigInt::from(n), 0, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Real {
        Real::normalized(n.clone(), 0, prec)
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Real {
        let num = Real::normalized(q.numer().clone(), 0, prec + 2);
        let den = Real::normalized(q.denom().clone(), 0, prec + 2);
        (&num / &den).with_prec(prec)
    }

    /// `2^k`.
    pub fn pow2(k: i64, prec: u32) -> Real {
        Real {
            mant: BigInt::one(),
            exp: k,
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Real {
        Real::normalized(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Real {
        Real {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero.
    pub fn magnitude_bits(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.exp + self.mant.bits() as i64)
    }

    pub fn mul_pow2(&self, k: i64) -> Real {
        if self.is_zero() {
            return self.clone();
        }
        Real {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: i64) -> Real {
        Real::normalized(&self.mant * n, self.exp, self.prec)
    }

    pub fn mul_rational(&self, q: &Rational) -> Real {
        let num = Real::normalized(&self.mant * q.numer(), self.exp, self.prec + 2);
        (&num / &Real::from_bigint(q.denom(), self.prec + 2)).with_prec(self.prec)
    }

    pub fn div_int(&self, n: i64) -> Real {
        self / &Real::from_int(n, self.prec)
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub fn powi(&self, n: i64) -> Real {
        if n < 0 {
            return &Real::one(self.prec) / &self.powi(-n);
        }
        let mut result = Real::one(self.prec);
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            base = base.square();
            n >>= 1;
        }
        result
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(62);
        let top = (&self.mant >> shift).to_i64().expect("62-bit mantissa") as f64;
        let e = self.exp + shift as i64;
        if e > 2100 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        let half = (e / 2) as i32;
        top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Rounds to the nearest integer.
    pub fn round(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            round_shift(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            let den = BigInt::one() << (-self.exp) as u64;
            self.mant.div_floor(&den)
        }
    }

    /// Exact dyadic value as a rational.
    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn ln2(prec: u32) -> Real {
        static CACHE: LazyLock<Mutex<HashMap<u32, Real>>> = LazyLock::new(|| Mutex::new(HashMap::new()));
        if let Some(v) = CACHE.lock().expect("ln2 cache poisoned").get(&prec) {
            return v.clone();
        }
        // ln 2 = 2 atanh(1/3)
        let work = prec + GUARD_BITS;
        let third = Real::from_rational(&Rational::new(1.into(), 3.into()), work);
        let value = atanh_series(&third, work).mul_pow2(1).with_prec(prec);
        CACHE
            .lock()
            .expect("ln2 cache poisoned")
            .insert(prec, value.clone());
        value
    }

    pub fn exp(&self) -> Real {
        let prec = self.prec;
        if self.is_zero() {
            return Real::one(prec);
        }
        let mag = self.magnitude_bits().unwrap_or(0);
        assert!(mag < 62, "exp argument out of range: {self}");
        let work = prec + GUARD_BITS + mag.max(0) as u32;
        let x = self.with_prec(work);
        let ln2 = Real::ln2(work);
        let n = (&x / &ln2).round();
        let n_i64 = n.to_i64().expect("exponent fits in i64");
        let r = &x - &ln2.mul_int(n_i64);
        // Halve the reduced argument further, then square back.
        let halvings = (work as f64).sqrt() as i64 / 2 + 1;
        let r = r.mul_pow2(-halvings);
        let eps = Real::pow2(-(work as i64) - 4, work);
        let mut sum = Real::one(work);
        let mut term = Real::one(work);
        let mut k = 1i64;
        loop {
            term = (&term * &r).div_int(k);
            if term.abs() < eps {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        for _ in 0..halvings {
            sum = sum.square();
        }
        sum.mul_pow2(n_i64).with_prec(prec)
    }

    /// Natural logarithm; panics on non-positive input (callers check the branch).
    pub fn ln(&self) -> Real {
        assert!(self.signum() > 0, "ln of non-positive value {self}");
        let prec = self.prec;
        let work = prec + GUARD_BITS;
        let bits = self.mant.bits() as i64;
        let mut e = self.exp + bits;
        // f in [1/2, 1)
        let mut f = Real::normalized(self.mant.clone(), -bits, work);
        let sqrt_half = Real::from_rational(&Rational::new(7071067811865475i64.into(), 10000000000000000i64.into()), 64);
        if f < sqrt_half {
            f = f.mul_pow2(1);
            e -= 1;
        }
        let one = Real::one(work);
        let u = &(&f - &one) / &(&f + &one);
        let ln_f = atanh_series(&u, work).mul_pow2(1);
        (&ln_f + &Real::ln2(work).mul_int(e)).with_prec(prec)
    }

    pub fn pow(&self, y: &Real) -> Real {
        (&self.ln() * y).exp()
    }

    /// Scientific notation with `digits` significant digits, e.g. `-1.2500e-3`.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(digits - 1));
        }
        let neg = self.signum() < 0;
        let mag = self.abs();
        let mut e10 = ((mag.magnitude_bits().unwrap() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut text;
        loop {
            let k = digits as i64 - 1 - e10;
            let scaled = scaled_round(&mag.mant, mag.exp, k);
            text = scaled.to_string();
            if text.len() > digits {
                e10 += 1;
            } else if text.len() < digits {
                e10 -= 1;
            } else {
                break;
            }
        }
        let (head, tail) = text.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        }
    }

    /// Decimal digits this value's precision supports.
    pub fn decimal_digits(&self) -> usize {
        ((self.prec.saturating_sub(8)) as f64 / std::f64::consts::LOG2_10).floor().max(1.0) as usize
    }
}

/// `round(mant * 2^exp * 10^k)`.
fn scaled_round(mant: &BigInt, exp: i64, k: i64) -> BigInt {
    let ten = BigInt::from(10);
    let mut num = mant.clone();
    let mut den = BigInt::one();
    if k >= 0 {
        num *= num_traits::pow(ten, k as usize);
    } else {
        den *= num_traits::pow(ten, (-k) as usize);
    }
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    let (q, r) = num.div_rem(&den);
    if (r << 1u32) >= den {
        q + 1
    } else {
        q
    }
}

/// `atanh(u) = sum u^{2k+1}/(2k+1)` for `|u| <= 1/3`.
fn atanh_series(u: &Real, work: u32) -> Real {
    let u2 = u.square();
    let eps = Real::pow2(-(work as i64) - 4, work);
    let mut power = u.clone();
    let mut sum = u.clone();
    let mut k = 1i64;
    loop {
        power = &power * &u2;
        let term = power.div_int(2 * k + 1);
        if term.abs() < eps {
            break;
        }
        sum = &sum + &term;
        k += 1;
    }
    sum
}

fn add_impl(a: &Real, b: &Real, negate_b: bool) -> Real {
    let prec = a.prec.max(b.prec);
    let b_mant = if negate_b { -&b.mant } else { b.mant.clone() };
    if b.is_zero() {
        return a.with_prec(prec);
    }
    if a.is_zero() {
        return Real::normalized(b_mant, b.exp, prec);
    }
    let top_a = a.exp + a.mant.bits() as i64;
    let top_b = b.exp + b.mant.bits() as i64;
    let slack = prec as i64 + 4;
    if top_a - top_b > slack {
        return a.with_prec(prec);
    }
    if top_b - top_a > slack {
        return Real::normalized(b_mant, b.exp, prec);
    }
    let (mant, exp) = match a.exp.cmp(&b.exp) {
        Ordering::Greater => ((&a.mant << (a.exp - b.exp) as u64) + b_mant, b.exp),
        Ordering::Less => (&a.mant + (b_mant << (b.exp - a.exp) as u64), a.exp),
        Ordering::Equal => (&a.mant + b_mant, a.exp),
    };
    Real::normalized(mant, exp, prec)
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        add_impl(self, rhs, false)
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        add_impl(self, rhs, true)
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real::normalized(&self.mant * &rhs.mant, self.exp + rhs.exp, self.prec.max(rhs.prec))
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert!(!rhs.is_zero(), "Real division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return Real::zero(prec);
        }
        let shift = (prec as i64 + 2 + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0);
        let q = (&self.mant << shift as u64) / &rhs.mant;
        Real::normalized(q, self.exp - rhs.exp - shift, prec)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -&self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Real) -> Ordering {
        // Exact comparison of dyadic values.
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_sci_string(digits))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci_string(20))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_sci_string(self.decimal_digits()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    const LN2_50: &str = "6.9314718055994530941723212145817656807550013436026e-1";
    const E_50: &str = "2.7182818284590452353602874713526624977572470937000e0";

    fn p() -> u32 {
        bits_for_digits(60)
    }

    #[test]
    fn constants() {
        assert_eq!(Real::ln2(p()).to_sci_string(50), LN2_50);
        assert_eq!(Real::one(p()).exp().to_sci_string(50), E_50);
    }

    #[test]
    fn arithmetic_roundtrip() {
        let x = Real::from_rational(&rat(1, 3), p());
        let three = Real::from_int(3, p());
        let one = &x * &three;
        assert!((&one - &Real::one(p())).abs() < Real::pow2(-190, p()));
        assert_eq!(x.to_sci_string(5), "3.3333e-1");
        assert_eq!(Real::from_int(-1250, p()).mul_pow2(0).to_sci_string(3), "-1.25e3");
        assert_eq!(Real::from_rational(&rat(1, 800), p()).to_sci_string(3), "1.25e-3");
    }

    #[test]
    fn exp_ln_inverse() {
        let tol = Real::pow2(-185, p());
        for q in [rat(1, 5), rat(-7, 3), rat(40, 1), rat(-300, 7), rat(1, 1000000)] {
            let x = Real::from_rational(&q, p());
            let back = x.exp().ln();
            assert!((&back - &x).abs() <= tol.clone().max(&x.abs() * &tol), "{q}");
        }
        let a = Real::from_rational(&rat(3, 7), p());
        let b = Real::from_rational(&rat(-11, 5), p());
        let lhs = (&a + &b).exp();
        let rhs = &a.exp() * &b.exp();
        assert!((&lhs - &rhs).abs() < &lhs.abs() * &tol);
    }

    #[test]
    fn matches_f64() {
        for v in [0.1f64, 2.5, -3.75, 100.0] {
            let x = Real::from_rational(&Rational::from_float(v).unwrap(), p());
            assert!((x.exp().to_f64() - v.exp()).abs() <= 1e-14 * v.exp());
        }
        assert!((Real::from_int(10, p()).ln().to_f64() - 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ordering_and_cancellation() {
        let a = Real::from_rational(&rat(1, 3), p());
        let b = Real::from_rational(&rat(1, 3), p());
        assert!((&a - &b).is_zero());
        assert!(Real::from_int(2, p()) > a);
        assert!(-&a < Real::zero(p()));
        let tiny = Real::pow2(-1000, p());
        assert_eq!(&(&a + &tiny) - &a, Real::zero(p()));
    }
}
