//! Exact coefficient ring: rational combinations of monomials
//! `s^a e^{m beta s} beta^b (log Q)^l Q^q e^{n beta} c_1^{e_1} c_2^{e_2} ...`
//! with `m, q, n` possibly negative. Closed under shift and d/ds.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Coeff;
use crate::jet::Jet;
use crate::poly::Rational;
use crate::real::Real;

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// `m` in `e^{m beta s}`.
    pub exp_beta_s: i32,
    pub s: u32,
    pub beta: u32,
    pub log_q: u32,
    /// Laurent power of `Q`.
    pub q: i32,
    /// Laurent power of `e^beta`.
    pub exp_beta: i32,
    /// Powers of `c_1, c_2, ...`; no trailing zeros.
    pub c: Vec<u32>,
}

impl Monomial {
    fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.c.len().max(other.c.len());
        let mut c: Vec<u32> = (0..len)
            .map(|i| self.c.get(i).copied().unwrap_or(0) + other.c.get(i).copied().unwrap_or(0))
            .collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Monomial {
            exp_beta_s: self.exp_beta_s + other.exp_beta_s,
            s: self.s + other.s,
            beta: self.beta + other.beta,
            log_q: self.log_q + other.log_q,
            q: self.q + other.q,
            exp_beta: self.exp_beta + other.exp_beta,
            c,
        }
    }

    fn is_one(&self) -> bool {
        *self == Monomial::default()
    }
}

/// Numeric values substituted for the formal parameters.
#[derive(Debug, Clone)]
pub struct ParamValues {
    pub beta: Real,
    pub q: Real,
    pub log_q: Real,
    pub exp_beta: Real,
    pub c: Vec<Real>,
}

impl ParamValues {
    pub fn new(beta: &Rational, q: &Rational, c: &[Rational], prec: u32) -> ParamValues {
        let beta = Real::from_rational(beta, prec);
        let q_real = Real::from_rational(q, prec);
        ParamValues {
            log_q: q_real.ln(),
            exp_beta: beta.exp(),
            beta,
            q: q_real,
            c: c.iter().map(|ci| Real::from_rational(ci, prec)).collect(),
        }
    }

    pub fn prec(&self) -> u32 {
        self.beta.prec()
    }

    /// Value of everything except the `s`-dependent factors.
    fn constant_part(&self, m: &Monomial) -> Real {
        let mut v = self.beta.powi(m.beta as i64);
        v = &v * &self.log_q.powi(m.log_q as i64);
        v = &v * &self.q.powi(m.q as i64);
        v = &v * &self.exp_beta.powi(m.exp_beta as i64);
        for (i, &e) in m.c.iter().enumerate() {
            if e > 0 {
                let ci = self.c.get(i).cloned().unwrap_or_else(|| Real::zero(self.prec()));
                v = &v * &ci.powi(e as i64);
            }
        }
        v
    }
}

#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct ExpPolyFunc {
    terms: BTreeMap<Monomial, Rational>,
}

impl ExpPolyFunc {
    pub fn zero() -> Self {
        ExpPolyFunc::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Self::monomial(Monomial::default(), q)
    }

    pub fn monomial(m: Monomial, q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        ExpPolyFunc { terms }
    }

    pub fn s() -> Self {
        Self::monomial(Monomial { s: 1, ..Default::default() }, Rational::one())
    }

    pub fn beta() -> Self {
        Self::monomial(Monomial { beta: 1, ..Default::default() }, Rational::one())
    }

    pub fn log_q() -> Self {
        Self::monomial(Monomial { log_q: 1, ..Default::default() }, Rational::one())
    }

    pub fn q_pow(n: i32) -> Self {
        Self::monomial(Monomial { q: n, ..Default::default() }, Rational::one())
    }

    /// `e^{n beta}`.
    pub fn exp_beta(n: i32) -> Self {
        Self::monomial(Monomial { exp_beta: n, ..Default::default() }, Rational::one())
    }

    /// `e^{m beta s}`.
    pub fn exp_beta_s(m: i32) -> Self {
        Self::monomial(Monomial { exp_beta_s: m, ..Default::default() }, Rational::one())
    }

    /// `c_k`, one-based.
    pub fn c(k: usize) -> Self {
        assert!(k >= 1, "constants are indexed from 1");
        let mut c = vec![0; k];
        c[k - 1] = 1;
        Self::monomial(Monomial { c, ..Default::default() }, Rational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: Monomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// The constant rational value, if the function is one.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, q) = self.terms.iter().next()?;
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    /// Numeric value at `s`.
    pub fn eval(&self, params: &ParamValues, s: &Real) -> Real {
        self.eval_jet(params, s, 0).coeffs()[0].clone()
    }

    /// Taylor jet at `s0`.
    pub fn eval_jet(&self, params: &ParamValues, s0: &Real, order: usize) -> Jet {
        let prec = params.prec();
        let s_jet = Jet::variable(s0.with_prec(prec), order);
        let mut acc = Jet::constant(Real::zero(prec), order);
        for (m, q) in &self.terms {
            let mut jet = Jet::constant(params.constant_part(m).mul_rational(q), order);
            for _ in 0..m.s {
                jet = jet.mul(&s_jet);
            }
            if m.exp_beta_s != 0 {
                let rate = params.beta.mul_int(m.exp_beta_s as i64);
                jet = jet.mul(&Jet::exp_linear(&(&rate * s0), &rate, order));
            }
            acc = acc.add(&jet);
        }
        acc
    }

    /// `exp(self)` when `self` is an integer combination of `beta s`, `beta`
    /// and `log Q`, the only exponentials the ring carries.
    pub fn exp_linear(&self) -> Option<ExpPolyFunc> {
        let mut out = Monomial::default();
        for (m, q) in &self.terms {
            if !q.is_integer() {
                return None;
            }
            let n = q.to_integer().to_i32()?;
            let base = Monomial::default();
            if *m == (Monomial { s: 1, beta: 1, ..base.clone() }) {
                out.exp_beta_s += n;
            } else if *m == (Monomial { beta: 1, ..base.clone() }) {
                out.exp_beta += n;
            } else if *m == (Monomial { log_q: 1, ..base }) {
                out.q += n;
            } else {
                return None;
            }
        }
        Some(Self::monomial(out, Rational::one()))
    }
}

impl Coeff for ExpPolyFunc {
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, q) in &other.terms {
            out.insert(m.clone(), q.clone());
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = ExpPolyFunc::zero();
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                out.insert(ma.mul(mb), qa * qb);
            }
        }
        out
    }

    fn neg(&self) -> Self {
        ExpPolyFunc {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), -q)).collect(),
        }
    }

    fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return ExpPolyFunc::zero();
        }
        ExpPolyFunc {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    fn shift(&self, j: i64) -> Self {
        if j == 0 {
            return self.clone();
        }
        let jr = BigInt::from(j);
        let mut out = ExpPolyFunc::zero();
        for (m, q) in &self.terms {
            let exp_beta = m.exp_beta + m.exp_beta_s * j as i32;
            // (s + j)^p = sum_i C(p, i) j^{p-i} s^i
            let mut binom = BigInt::one();
            for i in (0..=m.s).rev() {
                let power = num_traits::pow(jr.clone(), (m.s - i) as usize);
                let coeff = q * Rational::from_integer(&binom * power);
                out.insert(Monomial { s: i, exp_beta, ..m.clone() }, coeff);
                binom = binom * BigInt::from(i) / BigInt::from(m.s - i + 1);
            }
        }
        out
    }

    fn derivative(&self) -> Self {
        let mut out = ExpPolyFunc::zero();
        for (m, q) in &self.terms {
            if m.s > 0 {
                out.insert(Monomial { s: m.s - 1, ..m.clone() }, q * Rational::from_integer(m.s.into()));
            }
            if m.exp_beta_s != 0 {
                let rate = Rational::from_integer(m.exp_beta_s.into());
                out.insert(Monomial { beta: m.beta + 1, ..m.clone() }, q * rate);
            }
        }
        out
    }

    fn exp(&self) -> Option<Self> {
        self.exp_linear()
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, sym: &str, e: i64, first: &mut bool) -> fmt::Result {
    if e == 0 {
        return Ok(());
    }
    if !*first {
        f.write_str("*")?;
    }
    *first = false;
    if e == 1 {
        f.write_str(sym)
    } else {
        write!(f, "{sym}^{e}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write_power(f, "beta", self.beta as i64, &mut first)?;
        write_power(f, "logQ", self.log_q as i64, &mut first)?;
        for (i, &e) in self.c.iter().enumerate() {
            write_power(f, &format!("c{}", i + 1), e as i64, &mut first)?;
        }
        write_power(f, "Q", self.q as i64, &mut first)?;
        if self.exp_beta != 0 {
            write_power(f, &format!("exp({}*beta)", self.exp_beta), 1, &mut first)?;
        }
        if self.exp_beta_s != 0 {
            write_power(f, &format!("exp({}*beta*s)", self.exp_beta_s), 1, &mut first)?;
        }
        write_power(f, "s", self.s as i64, &mut first)?;
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Display for ExpPolyFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let sep = if i == 0 {
                if q.is_negative() { "-" } else { "" }
            } else if q.is_negative() {
                " - "
            } else {
                " + "
            };
            f.write_str(sep)?;
            let mag = q.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpPolyFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpPolyFunc({self})")
    }
}
