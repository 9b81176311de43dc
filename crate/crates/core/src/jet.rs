//! Truncated Taylor series in one variable (`Jet`) and functions of `s`
//! sampled as jets on the integer lattice `s0 + j` (`GridFn`).

use std::fmt;

use crate::poly::Rational;
use crate::real::Real;

/// `sum_n c_n eps^n` with `c_n = f^(n)(s0) / n!`, truncated after the last
/// stored coefficient. An empty coefficient list carries no information.
#[derive(Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Real>,
}

impl Jet {
    pub fn from_coeffs(coeffs: Vec<Real>) -> Jet {
        Jet { coeffs }
    }

    pub fn constant(value: Real, order: usize) -> Jet {
        let prec = value.prec();
        let mut coeffs = vec![Real::zero(prec); order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The identity function around `s0`.
    pub fn variable(s0: Real, order: usize) -> Jet {
        let prec = s0.prec();
        let mut jet = Jet::constant(s0, order);
        if order >= 1 {
            jet.coeffs[1] = Real::one(prec);
        }
        jet
    }

    /// `exp(a + b eps)`.
    pub fn exp_linear(a: &Real, b: &Real, order: usize) -> Jet {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = a.exp();
        for n in 0..=order {
            if n > 0 {
                c = (&c * b).div_int(n as i64);
            }
            coeffs.push(c.clone());
        }
        Jet { coeffs }
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Number of known coefficients minus one; `None` when empty.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().take(order + 1).cloned().collect(),
        }
    }

    pub fn value(&self) -> Option<&Real> {
        self.coeffs.first()
    }

    /// `f^(n)(s0)`.
    pub fn derivative_value(&self, n: usize) -> Option<Real> {
        let c = self.coeffs.get(n)?;
        let mut fact = c.clone();
        for k in 2..=n {
            fact = fact.mul_int(k as i64);
        }
        Some(fact)
    }

    pub fn derivative(&self) -> Jet {
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c.mul_int(n as i64))
                .collect(),
        }
    }

    pub fn scale(&self, a: &Real) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c.mul_rational(q)).collect(),
        }
    }

    pub fn add_constant(&self, a: &Real) -> Jet {
        let mut out = self.clone();
        if let Some(c0) = out.coeffs.first_mut() {
            *c0 = &*c0 + a;
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let len = self.len().min(other.len());
        let coeffs = (0..len)
            .map(|n| {
                let mut acc = &self.coeffs[0] * &other.coeffs[n];
                for k in 1..=n {
                    acc = &acc + &(&self.coeffs[k] * &other.coeffs[n - k]);
                }
                acc
            })
            .collect();
        Jet { coeffs }
    }

    /// Series quotient; the caller guarantees a nonzero constant term.
    pub fn div(&self, other: &Jet) -> Jet {
        let len = self.len().min(other.len());
        let mut q: Vec<Real> = Vec::with_capacity(len);
        for n in 0..len {
            let mut acc = self.coeffs[n].clone();
            for k in 1..=n {
                acc = &acc - &(&other.coeffs[k] * &q[n - k]);
            }
            q.push(&acc / &other.coeffs[0]);
        }
        Jet { coeffs: q }
    }

    pub fn exp(&self) -> Jet {
        let len = self.len();
        if len == 0 {
            return self.clone();
        }
        let mut g = vec![self.coeffs[0].exp()];
        for n in 1..len {
            let mut acc = Real::zero(self.coeffs[0].prec());
            for k in 1..=n {
                acc = &acc + &(&self.coeffs[k] * &g[n - k]).mul_int(k as i64);
            }
            g.push(acc.div_int(n as i64));
        }
        Jet { coeffs: g }
    }

    /// Series logarithm; the caller guarantees a positive constant term.
    pub fn ln(&self) -> Jet {
        let len = self.len();
        if len == 0 {
            return self.clone();
        }
        let f0 = &self.coeffs[0];
        let mut h = vec![f0.ln()];
        for n in 1..len {
            let mut acc = self.coeffs[n].mul_int(n as i64);
            for (k, hk) in h.iter().enumerate().skip(1) {
                acc = &acc - &(hk * &self.coeffs[n - k]).mul_int(k as i64);
            }
            h.push((&acc / f0).div_int(n as i64));
        }
        Jet { coeffs: h }
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// A function of `s` known through jets at the lattice points `s0 + lo + i`.
/// `Exact` and `Const` are constants, the former carried without rounding.
#[derive(Clone, Debug, PartialEq)]
pub enum GridFn {
    Exact(Rational),
    Const(Real),
    Grid { lo: i64, jets: Vec<Jet> },
}

impl GridFn {
    pub fn grid(lo: i64, jets: Vec<Jet>) -> GridFn {
        GridFn::Grid { lo, jets }
    }

    /// Builds a grid over offsets `lo..=hi` from a jet-valued sampler.
    pub fn sample<E>(lo: i64, hi: i64, f: impl FnMut(i64) -> Result<Jet, E>) -> Result<GridFn, E> {
        let jets = (lo..=hi).map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(GridFn::Grid { lo, jets })
    }

    /// Offsets covered, inclusive; `None` for constants or empty grids.
    pub fn range(&self) -> Option<(i64, i64)> {
        match self {
            GridFn::Grid { lo, jets } if !jets.is_empty() => Some((*lo, *lo + jets.len() as i64 - 1)),
            _ => None,
        }
    }

    fn const_jet(&self, prec: u32, order: usize) -> Option<Jet> {
        match self {
            GridFn::Exact(q) => Some(Jet::constant(Real::from_rational(q, prec), order)),
            GridFn::Const(c) => Some(Jet::constant(c.with_prec(prec.max(c.prec())), order)),
            GridFn::Grid { .. } => None,
        }
    }

    pub fn jet_at(&self, offset: i64, prec: u32, order: usize) -> Option<Jet> {
        match self {
            GridFn::Grid { lo, jets } => {
                let idx = offset.checked_sub(*lo)?;
                if idx < 0 {
                    return None;
                }
                jets.get(idx as usize).filter(|j| !j.is_empty()).cloned()
            }
            _ => self.const_jet(prec, order),
        }
    }

    /// Value at `s0 + offset`.
    pub fn value_at(&self, offset: i64, prec: u32) -> Option<Real> {
        self.jet_at(offset, prec, 0).and_then(|j| j.value().cloned())
    }

    /// `f^(n)(s0 + offset)`.
    pub fn derivative_at(&self, offset: i64, n: usize, prec: u32) -> Option<Real> {
        match self {
            GridFn::Grid { .. } => self.jet_at(offset, prec, n)?.derivative_value(n),
            _ if n > 0 => Some(Real::zero(prec)),
            _ => self.value_at(offset, prec),
        }
    }

    fn zip_with(
        &self,
        other: &GridFn,
        exact: impl Fn(&Rational, &Rational) -> Rational,
        f: impl Fn(&Jet, &Jet) -> Jet,
    ) -> GridFn {
        match (self, other) {
            (GridFn::Exact(a), GridFn::Exact(b)) => GridFn::Exact(exact(a, b)),
            (GridFn::Grid { lo: la, jets: ja }, GridFn::Grid { lo: lb, jets: jb }) => {
                let lo = (*la).max(*lb);
                let hi = (*la + ja.len() as i64).min(*lb + jb.len() as i64);
                let jets = (lo..hi)
                    .map(|o| f(&ja[(o - la) as usize], &jb[(o - lb) as usize]))
                    .collect();
                GridFn::Grid { lo, jets }
            }
            (GridFn::Grid { lo, jets }, c) => GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(|j| f(j, &c.const_like(j))).collect(),
            },
            (c, GridFn::Grid { lo, jets }) => GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(|j| f(&c.const_like(j), j)).collect(),
            },
            (a, b) => {
                let prec = a.const_prec().max(b.const_prec());
                let ja = a.const_jet(prec, 0).expect("constant");
                let jb = b.const_jet(prec, 0).expect("constant");
                GridFn::Const(f(&ja, &jb).coeffs()[0].clone())
            }
        }
    }

    fn const_prec(&self) -> u32 {
        match self {
            GridFn::Const(c) => c.prec(),
            _ => 0,
        }
    }

    fn const_like(&self, like: &Jet) -> Jet {
        let prec = like.coeffs().first().map_or(64, Real::prec);
        self.const_jet(prec, like.order().unwrap_or(0)).expect("constant")
    }

    pub fn add(&self, other: &GridFn) -> GridFn {
        self.zip_with(other, |a, b| a + b, Jet::add)
    }

    pub fn sub(&self, other: &GridFn) -> GridFn {
        self.zip_with(other, |a, b| a - b, Jet::sub)
    }

    pub fn mul(&self, other: &GridFn) -> GridFn {
        match (self, other) {
            (GridFn::Exact(a), GridFn::Grid { lo, jets }) | (GridFn::Grid { lo, jets }, GridFn::Exact(a)) => {
                GridFn::Grid {
                    lo: *lo,
                    jets: jets.iter().map(|j| j.scale_rational(a)).collect(),
                }
            }
            (GridFn::Const(a), GridFn::Grid { lo, jets }) | (GridFn::Grid { lo, jets }, GridFn::Const(a)) => {
                GridFn::Grid {
                    lo: *lo,
                    jets: jets.iter().map(|j| j.scale(a)).collect(),
                }
            }
            _ => self.zip_with(other, |a, b| a * b, Jet::mul),
        }
    }

    /// Pointwise quotient; the divisor must not vanish on the common range.
    pub fn div(&self, other: &GridFn) -> GridFn {
        self.zip_with(other, |a, b| a / b, Jet::div)
    }

    /// Applies `f` to every jet; constants are treated as order-0 jets.
    pub fn map_jets(&self, f: impl Fn(&Jet) -> Jet) -> GridFn {
        match self {
            GridFn::Grid { lo, jets } => GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(f).collect(),
            },
            _ => {
                let prec = self.const_prec().max(64);
                GridFn::Const(f(&self.const_jet(prec, 0).expect("constant")).coeffs()[0].clone())
            }
        }
    }

    pub fn neg(&self) -> GridFn {
        match self {
            GridFn::Exact(a) => GridFn::Exact(-a),
            GridFn::Const(c) => GridFn::Const(-c),
            GridFn::Grid { lo, jets } => GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(Jet::neg).collect(),
            },
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> GridFn {
        self.mul(&GridFn::Exact(q.clone()))
    }

    pub fn scale_real(&self, a: &Real) -> GridFn {
        self.mul(&GridFn::Const(a.clone()))
    }

    /// `f(s + j)`.
    pub fn shift(&self, j: i64) -> GridFn {
        match self {
            GridFn::Grid { lo, jets } => GridFn::Grid {
                lo: lo - j,
                jets: jets.clone(),
            },
            _ => self.clone(),
        }
    }

    /// `f'(s)`; each jet loses one order.
    pub fn derivative(&self) -> GridFn {
        match self {
            GridFn::Grid { lo, jets } => GridFn::Grid {
                lo: *lo,
                jets: jets.iter().map(Jet::derivative).collect(),
            },
            _ => GridFn::Exact(Rational::from_integer(0.into())),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, GridFn::Exact(q) if num_traits::Zero::is_zero(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::real::bits_for_digits;

    fn prec() -> u32 {
        bits_for_digits(50)
    }

    fn close(a: &Real, b: &Real) -> bool {
        (a - b).abs() < Real::pow2(-150, prec())
    }

    #[test]
    fn exp_ln_series() {
        let s = Jet::variable(Real::from_rational(&rat(1, 3), prec()), 6);
        let e = s.exp();
        for n in 0..=6 {
            assert!(close(&e.derivative_value(n).unwrap(), &e.coeffs()[0]));
        }
        let back = e.ln();
        assert!(close(&back.coeffs()[0], &s.coeffs()[0]));
        assert!(close(&back.coeffs()[1], &Real::one(prec())));
        assert!(back.coeffs()[2].abs() < Real::pow2(-150, prec()));
    }

    #[test]
    fn quotient_and_product() {
        let s = Jet::variable(Real::from_int(2, prec()), 4);
        let sq = s.mul(&s);
        assert!(close(&sq.derivative_value(2).unwrap(), &Real::from_int(2, prec())));
        let back = sq.div(&s);
        assert!(close(&back.coeffs()[0], &Real::from_int(2, prec())));
        assert!(close(&back.coeffs()[1], &Real::one(prec())));
        assert!(back.coeffs()[2].abs() < Real::pow2(-150, prec()));
        assert_eq!(sq.derivative().order(), Some(3));
    }

    #[test]
    fn grid_ranges() {
        let f = GridFn::sample::<()>(-2, 2, |j| Ok(Jet::constant(Real::from_int(j, prec()), 1))).unwrap();
        let g = f.shift(1);
        assert_eq!(g.range(), Some((-3, 1)));
        assert_eq!(g.value_at(0, prec()), Some(Real::one(prec())));
        let h = f.mul(&g);
        assert_eq!(h.range(), Some((-2, 1)));
        assert_eq!(h.value_at(1, prec()), Some(Real::from_int(2, prec())));
        assert_eq!(f.add(&GridFn::Exact(rat(1, 2))).value_at(0, prec()), Some(Real::from_rational(&rat(1, 2), prec())));
        assert!(f.derivative().derivative().value_at(0, prec()).is_none());
    }
}
