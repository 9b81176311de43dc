//! Difference-differential operators `sum a_{j,k}(s) D^j E^k` in normal form
//! (`D = d/ds`, `E = exp(d/ds)`), truncated to a window of shift degrees
//! and D-degrees. Coefficients come from a pluggable [`Coeff`] backend.
//!
//! Normal-ordering rules: `E a(s) = a(s+1) E`, `D a(s) = a(s) D + a'(s)`,
//! `D E = E D`. Terms falling outside the window are dropped and the
//! operator is flagged as clipped.

mod exppoly;
mod numeric;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use exppoly::{ExpPolyFunc, Monomial, ParamValues};
pub use numeric::{apply_grid, apply_to_testfunc, exp_action, Sampled, TestFunc};

use crate::error::{Error, Result};
use crate::poly::Rational;

/// Coefficient ring of an operator: functions of `s` closed under shift and d/ds.
pub trait Coeff: Clone + fmt::Debug + PartialEq {
    fn from_rational(q: &Rational) -> Self;
    /// True only when the coefficient is known to vanish.
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    /// `a(s) -> a(s + j)`.
    fn shift(&self, j: i64) -> Self;
    fn derivative(&self) -> Self;
    /// `exp(a(s))` when representable in the backend.
    fn exp(&self) -> Option<Self>;
}

/// Allowed shift degrees `k_min..=k_max` and maximal D-degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Window {
    pub k_min: i64,
    pub k_max: i64,
    pub j_max: u32,
}

impl Window {
    pub fn new(k_min: i64, k_max: i64, j_max: u32) -> Window {
        assert!(k_min <= 0 && k_max >= 0, "window must contain shift degree 0");
        Window { k_min, k_max, j_max }
    }

    fn intersect(&self, other: &Window) -> Window {
        Window {
            k_min: self.k_min.max(other.k_min),
            k_max: self.k_max.min(other.k_max),
            j_max: self.j_max.min(other.j_max),
        }
    }

    fn contains(&self, j: u32, k: i64) -> bool {
        (self.k_min..=self.k_max).contains(&k) && j <= self.j_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// Shift degree `k >= 0` (D counts as degree 0).
    NonNegative,
    /// Shift degree `k < 0`.
    Negative,
}

/// Equality compares terms only; the window and clipping flag are metadata.
#[derive(Clone)]
pub struct DiffOp<C> {
    window: Window,
    /// `(j, k) -> a_{j,k}` for the term `a D^j E^k`.
    terms: BTreeMap<(u32, i64), C>,
    clipped: bool,
}

impl<C: PartialEq> PartialEq for DiffOp<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

/// Result of an adjoint-series conjugation.
#[derive(Debug, Clone)]
pub struct Conjugated<C> {
    pub op: DiffOp<C>,
    /// The series vanished (or a closed form applied) before `n_ad` terms.
    pub terminated: bool,
}

fn binomial(n: u32, r: u32) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

impl<C: Coeff> DiffOp<C> {
    pub fn zero(window: Window) -> Self {
        DiffOp {
            window,
            terms: BTreeMap::new(),
            clipped: false,
        }
    }

    pub fn identity(window: Window) -> Self {
        Self::term(C::from_rational(&Rational::one()), 0, 0, window)
    }

    /// Multiplication by `a(s)`.
    pub fn mult(a: C, window: Window) -> Self {
        Self::term(a, 0, 0, window)
    }

    /// `E^k`.
    pub fn shift_op(k: i64, window: Window) -> Self {
        Self::term(C::from_rational(&Rational::one()), 0, k, window)
    }

    /// `D`.
    pub fn d(window: Window) -> Self {
        Self::term(C::from_rational(&Rational::one()), 1, 0, window)
    }

    /// `a D^j E^k`.
    pub fn term(a: C, j: u32, k: i64, window: Window) -> Self {
        let mut op = Self::zero(window);
        op.accumulate(j, k, a);
        op
    }

    pub fn from_terms(window: Window, terms: impl IntoIterator<Item = ((u32, i64), C)>) -> Self {
        let mut op = Self::zero(window);
        for ((j, k), a) in terms {
            op.accumulate(j, k, a);
        }
        op
    }

    fn accumulate(&mut self, j: u32, k: i64, a: C) {
        if a.is_zero() {
            return;
        }
        if !self.window.contains(j, k) {
            self.clipped = true;
            return;
        }
        match self.terms.get_mut(&(j, k)) {
            Some(existing) => {
                let sum = existing.add(&a);
                if sum.is_zero() {
                    self.terms.remove(&(j, k));
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert((j, k), a);
            }
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Whether any nonzero term was dropped while building this operator.
    pub fn clipped(&self) -> bool {
        self.clipped
    }

    pub fn mark_clipped(mut self, clipped: bool) -> Self {
        self.clipped |= clipped;
        self
    }

    pub fn with_window(&self, window: Window) -> Self {
        let mut op = Self::zero(window);
        op.clipped = self.clipped;
        for (&(j, k), a) in &self.terms {
            op.accumulate(j, k, a.clone());
        }
        op
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, i64), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, j: u32, k: i64) -> Option<&C> {
        self.terms.get(&(j, k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn binary(&self, other: &Self, f: impl Fn(&C) -> C) -> Self {
        let mut out = self.with_window(self.window.intersect(&other.window));
        out.clipped |= other.clipped;
        for (&(j, k), b) in &other.terms {
            out.accumulate(j, k, f(b));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, C::clone)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, C::neg)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(C::neg)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map_coeffs(|a| a.scale(q))
    }

    fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(self.window);
        out.clipped = self.clipped;
        for (&(j, k), a) in &self.terms {
            out.accumulate(j, k, f(a));
        }
        out
    }

    /// Normal-ordered product `self * other`, clipped to the common window.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.window.intersect(&other.window));
        out.clipped = self.clipped || other.clipped;
        for (&(i, k), a) in &self.terms {
            for (&(j, l), b) in &other.terms {
                // a D^i E^k b D^j E^l = sum_r C(i,r) a b^{(r)}(s+k) D^{i-r+j} E^{k+l}
                let mut b_r = b.shift(k);
                for r in 0..=i {
                    if r > 0 {
                        b_r = b_r.derivative();
                    }
                    if b_r.is_zero() {
                        break;
                    }
                    let c = a.mul(&b_r).scale(&binomial(i, r));
                    out.accumulate(i - r + j, k + l, c);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other).sub(&other.multiply(self))
    }

    pub fn project(&self, part: Part) -> Self {
        let mut out = Self::zero(self.window);
        out.clipped = self.clipped;
        for (&(j, k), a) in &self.terms {
            let keep = match part {
                Part::NonNegative => k >= 0,
                Part::Negative => k < 0,
            };
            if keep {
                out.accumulate(j, k, a.clone());
            }
        }
        out
    }

    /// Smallest and largest shift degree present.
    pub fn shift_span(&self) -> Option<(i64, i64)> {
        let ks = self.terms.keys().map(|&(_, k)| k);
        Some((ks.clone().min()?, ks.max()?))
    }

    pub fn max_d_degree(&self) -> u32 {
        self.terms.keys().map(|&(j, _)| j).max().unwrap_or(0)
    }

    pub fn is_strictly_lowering(&self) -> bool {
        self.terms.keys().all(|&(_, k)| k < 0)
    }

    pub fn is_strictly_raising(&self) -> bool {
        self.terms.keys().all(|&(_, k)| k > 0)
    }

    /// Only a `(0,0)` term: a multiplication operator.
    pub fn as_multiplication(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::from_rational(&Rational::zero())),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn require_strict(&self, what: &str) -> Result<()> {
        if self.is_strictly_lowering() || self.is_strictly_raising() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} needs a strictly shift-lowering or strictly shift-raising operator"
            )))
        }
    }

    /// Number of powers after which a strict operator must vanish in the window.
    fn nilpotency_bound(&self) -> usize {
        (self.window.k_max - self.window.k_min) as usize + 2
    }

    /// `sum_n C^n / n!` for strict `C`; the series terminates inside the window.
    pub fn exp_strict(&self) -> Result<Self> {
        self.require_strict("exp_strict")?;
        let mut sum = Self::identity(self.window).add(self);
        let mut power = self.clone();
        for n in 2..=self.nilpotency_bound() {
            power = power.multiply(self).scale(&Rational::new(BigInt::one(), BigInt::from(n)));
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
        }
        Ok(sum.mark_clipped(power.clipped))
    }

    fn unitriangular_part(&self, what: &str) -> Result<Self> {
        let x = self.sub(&Self::identity(self.window));
        x.require_strict(what)?;
        Ok(x)
    }

    /// `log(1 + X) = sum (-1)^{n+1} X^n / n` for strict `X`.
    pub fn log_unitriangular(&self) -> Result<Self> {
        let x = self.unitriangular_part("log_unitriangular")?;
        let mut sum = x.clone();
        let mut power = x.clone();
        for n in 2..=x.nilpotency_bound() {
            power = power.multiply(&x);
            if power.is_zero() {
                break;
            }
            let sign = if n % 2 == 0 { -1 } else { 1 };
            sum = sum.add(&power.scale(&Rational::new(BigInt::from(sign), BigInt::from(n))));
        }
        Ok(sum)
    }

    /// `(1 + X)^{-1} = sum (-X)^n` for strict `X`.
    pub fn inverse_unitriangular(&self) -> Result<Self> {
        let x = self.unitriangular_part("inverse_unitriangular")?.neg();
        let mut sum = Self::identity(self.window).add(&x);
        let mut power = x.clone();
        for _ in 2..=x.nilpotency_bound() {
            power = power.multiply(&x);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
        }
        Ok(sum)
    }

    /// `e^C X e^{-C}`.
    ///
    /// A multiplication operator `C = c(s)` is handled in closed form:
    /// `e^c a D^j E^k e^{-c} = a e^{c(s) - c(s+k)} (D - c'(s+k))^j E^k`,
    /// provided the backend can exponentiate `c(s) - c(s+k)`. Otherwise the
    /// adjoint series `sum ad_C^n(X) / n!` is summed up to `n_ad` terms.
    pub fn conjugate_by_exp(&self, c_op: &Self, n_ad: usize) -> Conjugated<C> {
        if let Some(c) = c_op.as_multiplication() {
            if let Some(op) = self.conjugate_by_multiplication(&c) {
                return Conjugated {
                    op: op.mark_clipped(c_op.clipped),
                    terminated: true,
                };
            }
        }
        let mut sum = self.clone();
        let mut term = self.clone();
        for n in 1..=n_ad {
            term = c_op
                .commutator(&term)
                .scale(&Rational::new(BigInt::one(), BigInt::from(n)));
            if term.is_zero() {
                return Conjugated {
                    op: sum.mark_clipped(term.clipped),
                    terminated: true,
                };
            }
            sum = sum.add(&term);
        }
        Conjugated {
            op: sum,
            terminated: false,
        }
    }

    fn conjugate_by_multiplication(&self, c: &C) -> Option<Self> {
        let window = self.window;
        let mut out = Self::zero(window);
        out.clipped = self.clipped;
        for (&(j, k), a) in &self.terms {
            let shifted = c.shift(k);
            let factor = c.sub(&shifted).exp()?;
            let d_minus = Self::d(window).sub(&Self::mult(shifted.derivative(), window));
            let mut power = Self::identity(window);
            for _ in 0..j {
                power = power.multiply(&d_minus);
            }
            let head = Self::mult(a.mul(&factor), window);
            out = out.add(&head.multiply(&power).multiply(&Self::shift_op(k, window)));
        }
        Some(out)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for DiffOp<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(j, k), a) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({a})")?;
            match j {
                0 => {}
                1 => f.write_str("*D")?,
                _ => write!(f, "*D^{j}")?,
            }
            match k {
                0 => {}
                1 => f.write_str("*E")?,
                _ => write!(f, "*E^{k}")?,
            }
        }
        if self.clipped {
            f.write_str(" [clipped]")?;
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for DiffOp<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffOp")
            .field("window", &self.window)
            .field("terms", &self.terms)
            .field("clipped", &self.clipped)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    type Op = DiffOp<ExpPolyFunc>;

    fn w() -> Window {
        Window::new(-6, 6, 4)
    }

    fn s_op() -> Op {
        Op::mult(ExpPolyFunc::s(), w())
    }

    #[test]
    fn defining_relations() {
        let e = Op::shift_op(1, w());
        let lhs = e.multiply(&s_op());
        let rhs = Op::term(ExpPolyFunc::s().add(&ExpPolyFunc::constant(int(1))), 0, 1, w());
        assert_eq!(lhs, rhs);
        assert_eq!(Op::d(w()).commutator(&s_op()), Op::identity(w()));
        let e3 = Op::shift_op(3, w());
        assert_eq!(s_op().commutator(&e3), e3.scale(&int(-3)));
        let a = ExpPolyFunc::exp_beta_s(2).mul(&ExpPolyFunc::s());
        assert_eq!(Op::d(w()).commutator(&Op::mult(a.clone(), w())), Op::mult(a.derivative(), w()));
    }

    #[test]
    fn projections() {
        let u1 = ExpPolyFunc::c(1);
        let u2 = ExpPolyFunc::c(2);
        let l = Op::from_terms(w(), [((0, 1), ExpPolyFunc::one()), ((0, 0), u1.clone()), ((0, -1), u2)]);
        let plus = l.project(Part::NonNegative);
        assert_eq!(plus, Op::from_terms(w(), [((0, 1), ExpPolyFunc::one()), ((0, 0), u1)]));
        assert_eq!(plus.add(&l.project(Part::Negative)), l);
        let v = ExpPolyFunc::c(1);
        let frak = Op::d(w()).sub(&Op::term(v.clone(), 0, -1, w()));
        assert_eq!(frak.project(Part::Negative), Op::term(v.neg(), 0, -1, w()));
    }

    #[test]
    fn exp_and_log_of_strict() {
        let c = Op::term(ExpPolyFunc::c(1), 0, -1, w());
        let e = c.exp_strict().unwrap();
        assert_eq!(e.coeff(0, -2), Some(&ExpPolyFunc::c(1).mul(&ExpPolyFunc::c(1)).scale(&rat(1, 2))));
        assert_eq!(e.log_unitriangular().unwrap(), c);
        assert_eq!(Op::zero(w()).exp_strict().unwrap(), Op::identity(w()));
        let inv = e.inverse_unitriangular().unwrap();
        assert_eq!(e.multiply(&inv), Op::identity(w()));
        assert!(Op::identity(w()).exp_strict().is_err());
    }

    #[test]
    fn adjoint_conjugation() {
        let c = Op::term(ExpPolyFunc::c(1), 0, -1, w());
        let conj = s_op().conjugate_by_exp(&c, 10);
        assert!(conj.terminated);
        // [E^{-1}, s] = -E^{-1}, so e^C s e^{-C} = s - c1 E^{-1}.
        assert_eq!(conj.op, s_op().sub(&c));
        let constant = Op::term(ExpPolyFunc::c(2), 0, -2, w());
        assert_eq!(Op::d(w()).conjugate_by_exp(&constant, 10).op, Op::d(w()));
    }

    #[test]
    fn gauge_conjugation_closed_form() {
        // G = exp(beta (s - 1/2)^2 / 2 + s log Q)
        let half = rat(1, 2);
        let sm = ExpPolyFunc::s().sub(&ExpPolyFunc::constant(half.clone()));
        let g = ExpPolyFunc::beta()
            .mul(&sm)
            .mul(&sm)
            .scale(&half)
            .add(&ExpPolyFunc::log_q().mul(&ExpPolyFunc::s()));
        let g_op = Op::mult(g, w());
        for k in 1..=3i64 {
            let conj = Op::shift_op(-k, w()).conjugate_by_exp(&g_op, 4);
            assert!(conj.terminated);
            let expected = ExpPolyFunc::q_pow(k as i32)
                .mul(&ExpPolyFunc::exp_beta(-(k * (k + 1) / 2) as i32))
                .mul(&ExpPolyFunc::exp_beta_s(k as i32));
            assert_eq!(conj.op, Op::term(expected, 0, -k, w()));
        }
        let conj_d = Op::d(w()).conjugate_by_exp(&g_op, 4).op;
        let expected = Op::d(w())
            .sub(&Op::mult(ExpPolyFunc::beta().mul(&sm), w()))
            .sub(&Op::mult(ExpPolyFunc::log_q(), w()));
        assert_eq!(conj_d, expected);
    }

    #[test]
    fn clipping_is_recorded() {
        let small = Window::new(-2, 2, 2);
        let e = Op::shift_op(-2, small);
        let sq = e.multiply(&e);
        assert!(sq.is_zero());
        assert!(sq.clipped());
        assert!(!e.clipped());
    }
}
