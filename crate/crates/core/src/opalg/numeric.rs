//! Numeric backend: coefficients as [`GridFn`] jets on the lattice `s0 + j`,
//! and the action of operators on functions (`D` as d/ds, `E` as `s -> s+1`).

use super::{Coeff, DiffOp, ExpPolyFunc, ParamValues};
use crate::error::{Error, Result};
use crate::jet::{GridFn, Jet};
use crate::poly::Rational;
use crate::real::Real;

impl Coeff for GridFn {
    fn from_rational(q: &Rational) -> Self {
        GridFn::Exact(q.clone())
    }

    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }

    fn add(&self, other: &Self) -> Self {
        GridFn::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        GridFn::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return GridFn::Exact(Rational::from_integer(0.into()));
        }
        GridFn::mul(self, other)
    }

    fn neg(&self) -> Self {
        GridFn::neg(self)
    }

    fn scale(&self, q: &Rational) -> Self {
        if num_traits::Zero::is_zero(q) {
            return GridFn::Exact(q.clone());
        }
        self.scale_rational(q)
    }

    fn shift(&self, j: i64) -> Self {
        GridFn::shift(self, j)
    }

    fn derivative(&self) -> Self {
        GridFn::derivative(self)
    }

    fn exp(&self) -> Option<Self> {
        match self {
            GridFn::Exact(q) if num_traits::Zero::is_zero(q) => Some(GridFn::Exact(Rational::from_integer(1.into()))),
            GridFn::Exact(_) => None,
            GridFn::Const(c) => Some(GridFn::Const(c.exp())),
            GridFn::Grid { lo, jets } => Some(GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(Jet::exp).collect(),
            }),
        }
    }
}

/// Coefficients that can be sampled as jets on the lattice around a base point.
pub trait Sampled: Coeff {
    type Ctx;
    fn sample(&self, ctx: &Self::Ctx, lo: i64, hi: i64, order: usize) -> Result<GridFn>;
}

impl Sampled for GridFn {
    type Ctx = ();
    fn sample(&self, _: &(), _lo: i64, _hi: i64, _order: usize) -> Result<GridFn> {
        Ok(self.clone())
    }
}

impl Sampled for ExpPolyFunc {
    /// Parameter values and the base point `s0`.
    type Ctx = (ParamValues, Real);
    fn sample(&self, ctx: &Self::Ctx, lo: i64, hi: i64, order: usize) -> Result<GridFn> {
        let (params, s0) = ctx;
        if let Some(q) = self.as_rational() {
            return Ok(GridFn::Exact(q));
        }
        GridFn::sample(lo, hi, |j| {
            let s = s0 + &Real::from_int(j, params.prec());
            Ok(self.eval_jet(params, &s, order))
        })
    }
}

impl<C: Sampled> DiffOp<C> {
    /// Numeric copy with every coefficient sampled on offsets `lo..=hi`.
    pub fn to_grid(&self, ctx: &C::Ctx, lo: i64, hi: i64, order: usize) -> Result<DiffOp<GridFn>> {
        let terms = self
            .terms()
            .map(|(&key, a)| Ok((key, a.sample(ctx, lo, hi, order)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiffOp::from_terms(self.window(), terms).mark_clipped(self.clipped()))
    }
}

/// `(A f)(s) = sum a_{j,k}(s) f^{(j)}(s + k)` on the lattice.
pub fn apply_grid(op: &DiffOp<GridFn>, f: &GridFn) -> GridFn {
    let mut acc: Option<GridFn> = None;
    for (&(j, k), a) in op.terms() {
        let mut g = f.clone();
        for _ in 0..j {
            g = g.derivative();
        }
        let term = Coeff::mul(a, &g.shift(k));
        acc = Some(match acc {
            None => term,
            Some(prev) => prev.add(&term),
        });
    }
    acc.unwrap_or(GridFn::Exact(Rational::from_integer(0.into())))
}

/// Test function `s^power e^{gamma s}`.
#[derive(Debug, Clone)]
pub struct TestFunc {
    pub power: u32,
    pub gamma: Real,
}

impl TestFunc {
    pub fn new(power: u32, gamma: Real) -> TestFunc {
        TestFunc { power, gamma }
    }

    pub fn jet(&self, s: &Real, order: usize) -> Jet {
        let mut jet = Jet::exp_linear(&(&self.gamma * s), &self.gamma, order);
        let var = Jet::variable(s.clone(), order);
        for _ in 0..self.power {
            jet = jet.mul(&var);
        }
        jet
    }

    /// Jets at `s0 + j` for `j` in `lo..=hi`.
    pub fn grid(&self, s0: &Real, lo: i64, hi: i64, order: usize) -> GridFn {
        let prec = s0.prec();
        GridFn::sample::<()>(lo, hi, |j| Ok(self.jet(&(s0 + &Real::from_int(j, prec)), order)))
            .expect("infallible sampler")
    }
}

/// `(A f)(s0)` for a test function.
pub fn apply_to_testfunc<C: Sampled>(op: &DiffOp<C>, ctx: &C::Ctx, f: &TestFunc, s0: &Real) -> Result<Real> {
    let (k_lo, k_hi) = op.shift_span().unwrap_or((0, 0));
    let numeric = op.to_grid(ctx, 0, 0, 0)?;
    let fg = f.grid(s0, k_lo.min(0), k_hi.max(0), op.max_d_degree() as usize);
    apply_grid(&numeric, &fg)
        .value_at(0, s0.prec())
        .ok_or_else(|| Error::Backend("operator action lost the base point".into()))
}

/// Partial sums of `exp(A) f = sum_n A^n f / n!`.
#[derive(Debug, Clone)]
pub struct ExpAction {
    pub value: GridFn,
    /// `A^N f / N!` for the last included `N`.
    pub last_term: GridFn,
    pub terms: usize,
}

pub fn exp_action(op: &DiffOp<GridFn>, f: &GridFn, n_terms: usize) -> ExpAction {
    let mut value = f.clone();
    let mut term = f.clone();
    for n in 1..=n_terms {
        term = apply_grid(op, &term).scale_rational(&Rational::new(1.into(), (n as i64).into()));
        value = value.add(&term);
    }
    ExpAction {
        value,
        last_term: term,
        terms: n_terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::Window;
    use crate::poly::rat;
    use crate::real::bits_for_digits;

    fn prec() -> u32 {
        bits_for_digits(40)
    }

    fn ctx() -> (ParamValues, Real) {
        let prec = prec();
        (
            ParamValues::new(&rat(1, 5), &rat(1, 10), &[], prec),
            Real::from_rational(&rat(1, 3), prec),
        )
    }

    #[test]
    fn action_examples() {
        let w = Window::new(-4, 4, 3);
        let (params, s0) = ctx();
        let gamma = params.beta.clone();
        let f = TestFunc::new(0, gamma.clone());
        let e = DiffOp::<ExpPolyFunc>::shift_op(1, w);
        let got = apply_to_testfunc(&e, &ctx(), &f, &s0).unwrap();
        let expected = (&gamma * &(&s0 + &Real::one(prec()))).exp();
        assert!((&got - &expected).abs().to_f64() < 1e-30);

        let g = TestFunc::new(1, gamma.clone());
        let d = DiffOp::<ExpPolyFunc>::d(w);
        let got = apply_to_testfunc(&d, &ctx(), &g, &s0).unwrap();
        let expected = &(&Real::one(prec()) + &(&gamma * &s0)) * &(&gamma * &s0).exp();
        assert!((&got - &expected).abs().to_f64() < 1e-30);
    }

    #[test]
    fn relation_annihilates() {
        let w = Window::new(-4, 4, 3);
        let s = DiffOp::mult(ExpPolyFunc::s(), w);
        let e = DiffOp::<ExpPolyFunc>::shift_op(1, w);
        let rel_lhs = e.multiply(&s);
        let rel_rhs = DiffOp::mult(ExpPolyFunc::s().add(&ExpPolyFunc::one()), w).multiply(&e);
        let (params, s0) = ctx();
        for m in 0..=3 {
            let f = TestFunc::new(m, params.beta.mul_int(2));
            let a = apply_to_testfunc(&rel_lhs, &ctx(), &f, &s0).unwrap();
            let b = apply_to_testfunc(&rel_rhs, &ctx(), &f, &s0).unwrap();
            assert!((&a - &b).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn exp_of_shift_generator() {
        // exp(D) acts as E on polynomials times exponentials, up to the series tail.
        let w = Window::new(-2, 2, 30);
        let (params, s0) = ctx();
        let f = TestFunc::new(2, params.beta.clone());
        let d = DiffOp::<GridFn>::d(w);
        let out = exp_action(&d, &f.grid(&s0, 0, 0, 30), 25);
        let got = out.value.value_at(0, prec()).unwrap();
        let s1 = &s0 + &Real::one(prec());
        let expected = f.jet(&s1, 0).coeffs()[0].clone();
        assert!((&got - &expected).abs().to_f64() < 1e-20);
    }
}
