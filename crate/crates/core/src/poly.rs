//! Sparse multivariate polynomials with exact rational coefficients in the
//! time variables `t_1, ..., t_m` (stored 0-based).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    #[serde(with = "terms_serde")]
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable `t_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range {nvars}");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-embeds into `nvars` variables; dropped variables must not occur.
    pub fn with_nvars(&self, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            if nvars < self.nvars {
                assert!(
                    exps[nvars..].iter().all(|&x| x == 0),
                    "cannot drop a variable that occurs"
                );
            }
            exps.resize(nvars, 0);
            p.add_term(exps, c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to variable `index` (0-based).
    pub fn partial(&self, index: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[index];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[index] -= 1;
            p.add_term(exps, c * int(k as i64));
        }
        p
    }

    /// Mixed partial derivative with `orders[i]` derivatives in variable `i`.
    pub fn derivative(&self, orders: &[usize]) -> Self {
        let mut p = self.clone();
        for (i, &n) in orders.iter().enumerate() {
            for _ in 0..n {
                if i >= self.nvars {
                    return Self::zero(self.nvars);
                }
                p = p.partial(i);
            }
        }
        p
    }

    /// Exact evaluation; missing trailing coordinates are zero.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match point.get(i) {
                    Some(x) => term *= num_traits::pow(x.clone(), k as usize),
                    None => {
                        term = Rational::zero();
                        break;
                    }
                }
            }
            total += term;
        }
        total
    }

    /// Substitutes a univariate polynomial (coefficient list, lowest degree first)
    /// for each variable and returns the resulting univariate polynomial.
    pub fn substitute_univariate(&self, subs: &[Vec<Rational>]) -> Vec<Rational> {
        let mut powers: Vec<Vec<Vec<Rational>>> = vec![vec![vec![Rational::one()]]; self.nvars];
        let mut total: Vec<Rational> = Vec::new();
        for (e, c) in &self.terms {
            let mut term = vec![c.clone()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let base: &[Rational] = subs.get(i).map(Vec::as_slice).unwrap_or(&[]);
                while powers[i].len() <= k as usize {
                    let next = uni_mul(powers[i].last().expect("nonempty"), base);
                    powers[i].push(next);
                }
                term = uni_mul(&term, &powers[i][k as usize]);
            }
            uni_add_assign(&mut total, &term);
        }
        while total.last().is_some_and(Zero::is_zero) {
            total.pop();
        }
        total
    }

    /// Substitutes `t_k -> a^k t_k` (weights `1, 2, 3, ...`).
    pub fn weighted_rescale(&self, a: &Rational) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let w = weighted_degree(e);
            p.add_term(e.clone(), c * num_traits::pow(a.clone(), w));
        }
        p
    }

    /// Whether every monomial has the same weighted degree `deg`.
    pub fn is_weighted_homogeneous(&self, deg: usize) -> bool {
        self.terms.keys().all(|e| weighted_degree(e) == deg)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

fn weighted_degree(e: &[u32]) -> usize {
    e.iter()
        .enumerate()
        .map(|(i, &k)| (i + 1) * k as usize)
        .sum()
}

fn uni_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn uni_add_assign(acc: &mut Vec<Rational>, other: &[Rational]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Rational::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let nvars = self.nvars.max(rhs.nvars);
        let mut p = self.with_nvars(nvars);
        for (e, c) in &rhs.terms {
            let mut exps = e.clone();
            exps.resize(nvars, 0);
            p.add_term(exps, c.clone());
        }
        p
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let nvars = self.nvars.max(rhs.nvars);
        let mut p = MultiPoly::zero(nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps = (0..nvars)
                    .map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0))
                    .collect();
                p.add_term(exps, ca * cb);
            }
        }
        p
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

mod terms_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        terms: &BTreeMap<Exponents, Rational>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<(&Exponents, String)> =
            terms.iter().map(|(e, c)| (e, c.to_string())).collect();
        list.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<Exponents, Rational>, D::Error> {
        let list: Vec<(Exponents, String)> = Vec::deserialize(de)?;
        list.into_iter()
            .map(|(e, c)| {
                c.parse::<Rational>()
                    .map(|c| (e, c))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let t1 = MultiPoly::var(2, 0);
        let t2 = MultiPoly::var(2, 1);
        let p = &(&t1 * &t1) - &t2;
        assert_eq!(p.eval(&[int(3), int(4)]), int(5));
        assert_eq!(p.partial(0), t1.scale(&int(2)));
        assert!((&p - &p).is_zero());
        assert!(p.is_weighted_homogeneous(2));
    }

    #[test]
    fn univariate_substitution() {
        // t1^2 + t2 at t1 = 1 - z, t2 = z^2 / 2
        let p = &MultiPoly::var(2, 0).pow(2) + &MultiPoly::var(2, 1);
        let out = p.substitute_univariate(&[vec![int(1), int(-1)], vec![int(0), int(0), rat(1, 2)]]);
        assert_eq!(out, vec![int(1), int(-2), rat(3, 2)]);
    }

    #[test]
    fn serde_roundtrip() {
        let p = &MultiPoly::var(3, 2).scale(&rat(-2, 3)) + &MultiPoly::one(3);
        let json = serde_json::to_string(&p).unwrap();
        let back: MultiPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
