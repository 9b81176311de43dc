//! Truncated evaluation of the Hurwitz tau functions
//!
//! ```text
//! Z(s, t, tb)  = P(s) * Zt(s, t, tb)
//! P(s)         = exp(beta (4 s^3 - s) / 24) * Q^{s (s + 1) / 2}
//! Zt(s, t, tb) = sum_lambda e^{beta kappa / 2} (Q e^{beta s})^{|lambda|} S_lambda(t) S_lambda(-tb)
//! ```
//!
//! summed over `|lambda| <= D`. The `t` and `tb` dependence is exact
//! rational arithmetic on Schur polynomials, grouped by `(|lambda|, kappa)`;
//! the `s` dependence is a closed-form Taylor jet, so derivatives of every
//! order are analytic. In the single sector `tb = (tb1, 0, ...)` and
//! `S_lambda(-tb) = dim(lambda) / |lambda|! * (-tb1)^{|lambda|}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::opalg::{Coeff, ExpPolyFunc};
use crate::partitions::{enumerate_partitions, factorial, Partition};
use crate::poly::{MultiPoly, Rational};
use crate::real::{bits_for_digits, Real};
use crate::report::{CheckReport, ExactCheck};
use crate::schur::schur_poly;

/// Extra degrees examined past `D` when summing the tail majorant.
pub const TAIL_HORIZON: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Double,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TauKind {
    /// `Z(s, t, tb)` including the prefactor `P(s)`.
    Z,
    /// `Zt = Z / P(s)`.
    Ztilde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSpec {
    pub degree: usize,
    pub nvars: usize,
    #[serde(with = "crate::report::rational_string")]
    pub beta: Rational,
    #[serde(with = "crate::report::rational_string")]
    pub q: Rational,
    pub sector: Sector,
    /// Working precision in decimal digits.
    pub precision: u32,
    /// Declared `s` range for the convergence precondition.
    #[serde(with = "range_strings")]
    pub s_range: (Rational, Rational),
    /// Fail evaluations whose tail bound exceeds this.
    #[serde(with = "crate::report::rational_string_opt", default)]
    pub tolerance: Option<Rational>,
}

mod range_strings {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::poly::Rational;

    pub fn serialize<S: Serializer>(r: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
        [r.0.to_string(), r.1.to_string()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rational, Rational), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let parse = |x: &str| x.parse::<Rational>().map_err(serde::de::Error::custom);
        Ok((parse(&a)?, parse(&b)?))
    }
}

impl TauSpec {
    /// Single-sector spec with `m = D` variables, 50 digits and `s` in `[-2, 2]`.
    pub fn new(degree: usize, beta: Rational, q: Rational) -> TauSpec {
        TauSpec {
            degree,
            nvars: degree.max(1),
            beta,
            q,
            sector: Sector::Single,
            precision: 50,
            s_range: (Rational::from_integer((-2).into()), Rational::from_integer(2.into())),
            tolerance: None,
        }
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn with_precision(mut self, digits: u32) -> Self {
        self.precision = digits;
        self
    }

    pub fn with_nvars(mut self, nvars: usize) -> Self {
        self.nvars = nvars;
        self
    }

    pub fn bits(&self) -> u32 {
        bits_for_digits(self.precision)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nvars < self.degree {
            return Err(Error::Precondition(format!(
                "{} time variables cannot represent Schur polynomials of degree {}",
                self.nvars, self.degree
            )));
        }
        if self.precision < 30 {
            return Err(Error::Precondition(format!(
                "precision {} digits is below the minimum of 30",
                self.precision
            )));
        }
        if !self.q.is_positive() {
            return Err(Error::Precondition(format!("Q = {} must be positive", self.q)));
        }
        if self.s_range.0 > self.s_range.1 {
            return Err(Error::Precondition("empty s range".into()));
        }
        Ok(())
    }

    /// `|Q e^{beta s} tb1| < 1` at the end of the `s` range where it is largest.
    pub fn check_convergence_region(&self, tbar1: &Rational) -> Result<()> {
        let prec = bits_for_digits(30);
        let s_max = if self.beta.is_negative() {
            &self.s_range.0
        } else {
            &self.s_range.1
        };
        let x = &(&Real::from_rational(&self.beta, prec) * &Real::from_rational(s_max, prec)).exp()
            * &Real::from_rational(&(&self.q * tbar1.abs()), prec);
        if x >= Real::one(prec) {
            return Err(Error::Precondition(format!(
                "|Q e^(beta s) tb1| = {} >= 1 on the declared s range",
                x.to_sci_string(6)
            )));
        }
        Ok(())
    }
}

/// Evaluation point. In the single sector `tbar = [tb1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TauPoint {
    #[serde(with = "crate::report::rational_string")]
    pub s: Rational,
    #[serde(with = "rational_vec")]
    pub t: Vec<Rational>,
    #[serde(with = "rational_vec")]
    pub tbar: Vec<Rational>,
}

pub(crate) mod rational_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::poly::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse::<Rational>().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl TauPoint {
    pub fn new(s: Rational, t: Vec<Rational>, tbar: Vec<Rational>) -> TauPoint {
        TauPoint { s, t, tbar }
    }

    pub fn single(s: Rational, t: Vec<Rational>, tbar1: Rational) -> TauPoint {
        TauPoint { s, t, tbar: vec![tbar1] }
    }

    pub fn tbar1(&self) -> Rational {
        self.tbar.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn with_s(&self, s: Rational) -> TauPoint {
        TauPoint { s, ..self.clone() }
    }

    pub fn with_t(&self, t: Vec<Rational>) -> TauPoint {
        TauPoint { t, ..self.clone() }
    }
}

/// Partial-derivative orders: `s`, then `t_1, t_2, ...`, then `tb_1, tb_2, ...`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deriv {
    pub s: usize,
    pub t: Vec<usize>,
    pub tbar: Vec<usize>,
}

impl Deriv {
    pub fn none() -> Deriv {
        Deriv::default()
    }

    pub fn s(n: usize) -> Deriv {
        Deriv { s: n, ..Default::default() }
    }

    /// `n`-th derivative in `t_k` (one-based `k`).
    pub fn t(k: usize, n: usize) -> Deriv {
        Deriv::none().and_t(k, n)
    }

    pub fn tbar1(n: usize) -> Deriv {
        Deriv::none().and_tbar(1, n)
    }

    pub fn and_s(mut self, n: usize) -> Deriv {
        self.s += n;
        self
    }

    pub fn and_t(mut self, k: usize, n: usize) -> Deriv {
        if self.t.len() < k {
            self.t.resize(k, 0);
        }
        self.t[k - 1] += n;
        self
    }

    pub fn and_tbar(mut self, k: usize, n: usize) -> Deriv {
        if self.tbar.len() < k {
            self.tbar.resize(k, 0);
        }
        self.tbar[k - 1] += n;
        self
    }

    fn normalized(&self) -> Deriv {
        let trim = |v: &[usize]| {
            let mut v = v.to_vec();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        Deriv {
            s: self.s,
            t: trim(&self.t),
            tbar: trim(&self.tbar),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TauValue {
    /// The requested partial derivative (the value itself for `Deriv::none()`).
    pub value: Real,
    /// Bound on the truncation error of the undifferentiated value; `None`
    /// when the majorant does not decrease past `D`.
    pub tail_bound: Option<Real>,
    /// Number of partitions summed.
    pub terms: usize,
}

struct PartData {
    kappa: i64,
    dim_over_fact: Rational,
    schur: MultiPoly,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct CoeffKey {
    t: Vec<Rational>,
    tbar: Vec<Rational>,
    dt: Vec<usize>,
    dtbar: Vec<usize>,
}

/// Per-degree exact coefficients grouped by `kappa`.
pub type KappaGroups = Vec<BTreeMap<i64, Rational>>;

/// A truncated tau function with precomputed Schur data and an internal
/// cache of `t`-coefficients (safe for concurrent use).
pub struct Tau {
    spec: TauSpec,
    prec: u32,
    beta: Real,
    log_q: Real,
    levels: Vec<Vec<PartData>>,
    kappa_exp: Mutex<HashMap<i64, Real>>,
    coeff_cache: Mutex<HashMap<CoeffKey, Arc<Vec<Real>>>>,
    zeta_cache: Mutex<HashMap<CoeffKey, Arc<Vec<Vec<Real>>>>>,
}

impl Tau {
    pub fn new(spec: TauSpec) -> Result<Tau> {
        spec.validate()?;
        let prec = spec.bits();
        let levels = (0..=spec.degree)
            .map(|d| {
                let fact = BigInt::from(factorial(d));
                enumerate_partitions(d)
                    .into_iter()
                    .map(|lambda| PartData {
                        kappa: lambda.kappa(),
                        dim_over_fact: Rational::new(BigInt::from(lambda.dim()), fact.clone()),
                        schur: schur_poly(&lambda, spec.nvars),
                    })
                    .collect()
            })
            .collect();
        Ok(Tau {
            beta: Real::from_rational(&spec.beta, prec),
            log_q: Real::from_rational(&spec.q, prec).ln(),
            prec,
            spec,
            levels,
            kappa_exp: Mutex::new(HashMap::new()),
            coeff_cache: Mutex::new(HashMap::new()),
            zeta_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &TauSpec {
        &self.spec
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn beta(&self) -> &Real {
        &self.beta
    }

    pub fn log_q(&self) -> &Real {
        &self.log_q
    }

    pub fn real(&self, q: &Rational) -> Real {
        Real::from_rational(q, self.prec)
    }

    pub fn term_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    fn key(&self, t: &[Rational], tbar: &[Rational], dt: &[usize], dtbar: &[usize]) -> Result<CoeffKey> {
        let trim_r = |v: &[Rational], n: usize| {
            let mut v: Vec<Rational> = v.iter().take(n).cloned().collect();
            while v.last().is_some_and(Zero::is_zero) {
                v.pop();
            }
            v
        };
        let trim_u = |v: &[usize]| {
            let mut v = v.to_vec();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        let tbar_key = match self.spec.sector {
            Sector::Double => trim_r(tbar, self.spec.nvars),
            Sector::Single => {
                if tbar.iter().skip(1).any(|x| !x.is_zero()) {
                    return Err(Error::Precondition("single sector takes tb = (tb1, 0, 0, ...)".into()));
                }
                if dtbar.iter().skip(1).any(|&n| n > 0) {
                    return Err(Error::Precondition("single sector has no tb_k derivatives for k > 1".into()));
                }
                trim_r(tbar, 1)
            }
        };
        Ok(CoeffKey {
            t: trim_r(t, self.spec.nvars),
            tbar: tbar_key,
            dt: trim_u(dt),
            dtbar: trim_u(dtbar),
        })
    }

    /// `d^c / d tb^c [S_lambda(-tb)]`.
    fn tbar_factor(&self, part: &PartData, d: usize, key: &CoeffKey) -> Rational {
        match self.spec.sector {
            Sector::Single => {
                let c = key.dtbar.first().copied().unwrap_or(0);
                if c > d {
                    return Rational::zero();
                }
                let tb = key.tbar.first().cloned().unwrap_or_else(Rational::zero);
                // dim/d! (-1)^d d!/(d-c)! tb^{d-c}
                let falling = Rational::from_integer(BigInt::from(factorial(d) / factorial(d - c)));
                let sign = if d.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
                &part.dim_over_fact * falling * sign * num_traits::pow(tb, d - c)
            }
            Sector::Double => {
                let neg: Vec<Rational> = key.tbar.iter().map(|x| -x).collect();
                let order: usize = key.dtbar.iter().sum();
                let value = part.schur.derivative(&key.dtbar).eval(&neg);
                if order.is_multiple_of(2) {
                    value
                } else {
                    -value
                }
            }
        }
    }

    /// Exact `Q^d sum_{|lambda| = d, kappa} d^a S_lambda(t) d^c S_lambda(-tb)`, grouped by `kappa`.
    pub fn exact_coefficients(
        &self,
        t: &[Rational],
        tbar: &[Rational],
        dt: &[usize],
        dtbar: &[usize],
    ) -> Result<KappaGroups> {
        let key = self.key(t, tbar, dt, dtbar)?;
        Ok(self.exact_from_key(&key))
    }

    fn exact_from_key(&self, key: &CoeffKey) -> KappaGroups {
        self.levels
            .iter()
            .enumerate()
            .map(|(d, parts)| {
                let qd = num_traits::pow(self.spec.q.clone(), d);
                let mut groups: BTreeMap<i64, Rational> = BTreeMap::new();
                for part in parts {
                    let left = part.schur.derivative(&key.dt).eval(&key.t);
                    if left.is_zero() {
                        continue;
                    }
                    let right = self.tbar_factor(part, d, key);
                    if right.is_zero() {
                        continue;
                    }
                    *groups.entry(part.kappa).or_insert_with(Rational::zero) += &qd * left * right;
                }
                groups.retain(|_, v| !v.is_zero());
                groups
            })
            .collect()
    }

    /// Exact coefficients of `zeta^n` in the expansion of the `t -> t - [zeta]`
    /// shifted sum, `[n][d]` grouped by `kappa`.
    pub fn exact_zeta_coefficients(&self, t: &[Rational], tbar: &[Rational]) -> Result<Vec<KappaGroups>> {
        let key = self.key(t, tbar, &[], &[])?;
        Ok(self.zeta_from_key(&key))
    }

    fn zeta_from_key(&self, key: &CoeffKey) -> Vec<KappaGroups> {
        let nvars = self.spec.nvars;
        // t_k - zeta^k / k
        let subs: Vec<Vec<Rational>> = (0..nvars)
            .map(|i| {
                let mut v = vec![Rational::zero(); i + 2];
                v[0] = key.t.get(i).cloned().unwrap_or_else(Rational::zero);
                v[i + 1] = -Rational::new(BigInt::one(), BigInt::from(i + 1));
                v
            })
            .collect();
        let n_max = self.spec.degree;
        let mut out: Vec<KappaGroups> = vec![vec![BTreeMap::new(); self.levels.len()]; n_max + 1];
        for (d, parts) in self.levels.iter().enumerate() {
            let qd = num_traits::pow(self.spec.q.clone(), d);
            for part in parts {
                let right = self.tbar_factor(part, d, key);
                if right.is_zero() {
                    continue;
                }
                let series = part.schur.substitute_univariate(&subs);
                for (n, c) in series.into_iter().enumerate().take(n_max + 1) {
                    if c.is_zero() {
                        continue;
                    }
                    *out[n][d].entry(part.kappa).or_insert_with(Rational::zero) += &qd * c * &right;
                }
            }
        }
        out
    }

    fn kappa_weight(&self, kappa: i64) -> Real {
        let mut cache = self.kappa_exp.lock().expect("kappa cache poisoned");
        cache
            .entry(kappa)
            .or_insert_with(|| self.beta.mul_int(kappa).mul_pow2(-1).exp())
            .clone()
    }

    fn fold(&self, groups: &BTreeMap<i64, Rational>) -> Real {
        groups.iter().fold(Real::zero(self.prec), |acc, (&kappa, r)| {
            &acc + &self.kappa_weight(kappa).mul_rational(r)
        })
    }

    /// `F_d = sum_kappa e^{beta kappa / 2} R_{d,kappa}` as floats, cached.
    fn degree_values(&self, t: &[Rational], tbar: &[Rational], dt: &[usize], dtbar: &[usize]) -> Result<Arc<Vec<Real>>> {
        let key = self.key(t, tbar, dt, dtbar)?;
        if let Some(v) = self.coeff_cache.lock().expect("tau cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let values: Vec<Real> = self.exact_from_key(&key).iter().map(|g| self.fold(g)).collect();
        let values = Arc::new(values);
        self.coeff_cache
            .lock()
            .expect("tau cache poisoned")
            .insert(key, values.clone());
        Ok(values)
    }

    fn zeta_values(&self, t: &[Rational], tbar: &[Rational]) -> Result<Arc<Vec<Vec<Real>>>> {
        let key = self.key(t, tbar, &[], &[])?;
        if let Some(v) = self.zeta_cache.lock().expect("tau cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let values: Vec<Vec<Real>> = self
            .zeta_from_key(&key)
            .iter()
            .map(|per_n| per_n.iter().map(|g| self.fold(g)).collect())
            .collect();
        let values = Arc::new(values);
        self.zeta_cache
            .lock()
            .expect("tau cache poisoned")
            .insert(key, values.clone());
        Ok(values)
    }

    /// Jet of `P(s) = exp(beta (4 s^3 - s)/24 + log Q * s (s+1)/2)` at `s0`.
    pub fn prefactor_jet(&self, s0: &Real, order: usize) -> Jet {
        let b = &self.beta;
        let l = &self.log_q;
        let s2 = s0.square();
        let s3 = &s2 * s0;
        let g0 = &(b * &(&s3.mul_int(4) - s0)).div_int(24) + &(l * &(&s2 + s0)).mul_pow2(-1);
        let g1 = &(b * &(&s2.mul_int(12) - &Real::one(self.prec))).div_int(24) + &(l * &(&s0.mul_int(2) + &Real::one(self.prec))).mul_pow2(-1);
        let g2 = (&(b * s0) + l).mul_pow2(-1);
        let g3 = b.div_int(6);
        let mut coeffs = vec![g0, g1, g2, g3];
        coeffs.resize(order.max(3) + 1, Real::zero(self.prec));
        coeffs.truncate(order + 1);
        Jet::from_coeffs(coeffs).exp()
    }

    fn assemble(&self, kind: TauKind, values: &[Real], s0: &Real, order: usize) -> Jet {
        let mut acc = Jet::constant(Real::zero(self.prec), order);
        for (d, f) in values.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let rate = self.beta.mul_int(d as i64);
            let e = Jet::exp_linear(&(&rate * s0), &rate, order);
            acc = acc.add(&e.scale(f));
        }
        match kind {
            TauKind::Z => acc.mul(&self.prefactor_jet(s0, order)),
            TauKind::Ztilde => acc,
        }
    }

    /// Taylor jet in `s` of `d^a_t d^c_tb Z` at `point.s` (the `s` order of
    /// `deriv` is ignored; `order` sets the jet length).
    pub fn s_jet(&self, kind: TauKind, point: &TauPoint, deriv: &Deriv, order: usize) -> Result<Jet> {
        let values = self.degree_values(&point.t, &point.tbar, &deriv.t, &deriv.tbar)?;
        Ok(self.assemble(kind, &values, &self.real(&point.s), order))
    }

    /// Same as [`Tau::s_jet`] at a real `s`.
    pub fn s_jet_at(&self, kind: TauKind, s: &Real, t: &[Rational], tbar: &[Rational], deriv: &Deriv, order: usize) -> Result<Jet> {
        let values = self.degree_values(t, tbar, &deriv.t, &deriv.tbar)?;
        Ok(self.assemble(kind, &values, s, order))
    }

    /// Jets of the `zeta^n` coefficients (`n = 0..=D`) of `Z(s, t - [zeta], tb)`.
    pub fn zeta_jets(&self, kind: TauKind, s: &Real, t: &[Rational], tbar: &[Rational], order: usize) -> Result<Vec<Jet>> {
        let values = self.zeta_values(t, tbar)?;
        Ok(values.iter().map(|per_d| self.assemble(kind, per_d, s, order)).collect())
    }

    /// Value of the requested partial derivative, with the truncation tail bound.
    pub fn eval(&self, kind: TauKind, point: &TauPoint, deriv: &Deriv) -> Result<TauValue> {
        let deriv = deriv.normalized();
        let jet = self.s_jet(kind, point, &deriv, deriv.s)?;
        let value = jet.derivative_value(deriv.s).expect("jet has the requested order");
        let tail_bound = match self.tail_bound(kind, point) {
            Ok(b) => Some(b),
            Err(Error::Divergence { .. }) => None,
            Err(e) => return Err(e),
        };
        if let (Some(tol), Some(bound)) = (&self.spec.tolerance, &tail_bound) {
            if *bound > self.real(tol) {
                return Err(Error::PrecisionExhausted {
                    bound: bound.to_sci_string(6),
                    tolerance: tol.to_string(),
                });
            }
        }
        Ok(TauValue {
            value,
            tail_bound,
            terms: self.term_count(),
        })
    }

    /// `Z(s, t, tb)` or a partial derivative of it.
    pub fn eval_z(&self, point: &TauPoint, deriv: &Deriv) -> Result<TauValue> {
        self.eval(TauKind::Z, point, deriv)
    }

    /// Single-sector `Zt(s, t, tb1)` or a partial derivative of it.
    pub fn eval_ztilde_single(&self, s: &Rational, t: &[Rational], tbar1: &Rational, deriv: &Deriv) -> Result<TauValue> {
        if self.spec.sector != Sector::Single {
            return Err(Error::Precondition("eval_ztilde_single needs a single-sector spec".into()));
        }
        self.eval(TauKind::Ztilde, &TauPoint::single(s.clone(), t.to_vec(), tbar1.clone()), deriv)
    }

    /// Upper bound on `|sum_{|lambda| > D} term|`.
    ///
    /// With `chi^lambda(mu) <= dim lambda`, `|S_lambda(t)| <= dim(lambda) M(t)`,
    /// `M(t) = exp(sum |t_k|)`. The degree-`d` majorant is
    /// `m_d = x^d M(t) sum_{|lambda|=d} dim^2/d! e^{beta kappa/2}` in the single
    /// sector (`x = Q e^{beta s} |tb1|`) and `(Q e^{beta s})^d M(t) M(tb) sum dim^2 e^{beta kappa/2}`
    /// in the double sector. For `beta > 0` the majorant eventually grows; the
    /// bound sums `m_d` for `d > D` up to the first degree where it stops
    /// decreasing (at most `D + TAIL_HORIZON`), and adds a geometric tail when
    /// it is still decreasing there. A majorant that already grows at `D + 1`
    /// is a divergence error.
    pub fn tail_bound(&self, kind: TauKind, point: &TauPoint) -> Result<Real> {
        let prec = self.prec;
        let zero = Real::zero(prec);
        let d0 = self.spec.degree;
        let l1 = |v: &[Rational]| v.iter().fold(Rational::zero(), |acc, x| acc + x.abs());
        let m_t = self.real(&l1(&point.t)).exp();
        let s = self.real(&point.s);
        let growth = &self.real(&self.spec.q) * &(&self.beta * &s).exp();
        let (x, scale, double) = match self.spec.sector {
            Sector::Single => {
                let tb1 = point.tbar1().abs();
                if tb1.is_zero() {
                    return Ok(zero);
                }
                (&growth * &self.real(&tb1), m_t, false)
            }
            Sector::Double => {
                if point.tbar.iter().all(Zero::is_zero) {
                    return Ok(zero);
                }
                let m_tb = self.real(&l1(&point.tbar)).exp();
                (growth, &m_t * &m_tb, true)
            }
        };
        let majorant = |d: usize| -> Real {
            let weights = plancherel_weights(d);
            let mut w = weights.iter().fold(Real::zero(prec), |acc, (&kappa, r)| {
                &acc + &self.beta.mul_int(kappa).mul_pow2(-1).exp().mul_rational(r)
            });
            if double {
                w = &w * &Real::from_bigint(&BigInt::from(factorial(d)), prec);
            }
            &(&x.powi(d as i64) * &w) * &scale
        };
        let mut total = Real::zero(prec);
        let mut prev = majorant(d0 + 1);
        let mut ratio = Real::zero(prec);
        total = &total + &prev;
        for d in d0 + 2..=d0 + TAIL_HORIZON {
            let next = majorant(d);
            ratio = &next / &prev;
            if ratio >= Real::one(prec) {
                if d == d0 + 2 {
                    return Err(Error::Divergence {
                        degree: d,
                        ratio: ratio.to_sci_string(6),
                    });
                }
                ratio = Real::zero(prec);
                break;
            }
            total = &total + &next;
            prev = next;
        }
        if !ratio.is_zero() {
            // Still decreasing at the horizon: bound the rest geometrically.
            total = &total + &(&(&prev * &ratio) / &(&Real::one(prec) - &ratio));
        }
        if kind == TauKind::Z {
            total = &total * &self.prefactor_jet(&s, 0).coeffs()[0].abs();
        }
        Ok(total)
    }

    /// `max(10 * tail, 10^{-(P - 10)})`.
    pub fn zero_tolerance(&self, tail: Option<&Real>) -> Real {
        let floor = Real::from_int(10, self.prec).powi(-(self.spec.precision as i64 - 10));
        match tail {
            Some(t) => t.mul_int(10).max(floor),
            None => floor,
        }
    }

    /// `dZt/ds = beta tb1 dZt/dtb1` in the single sector: exactly per term,
    /// and numerically at `point`.
    pub fn check_linear_s_tbar1(&self, point: &TauPoint, tolerance: &Real) -> Result<CheckReport> {
        if self.spec.sector != Sector::Single {
            return Err(Error::Precondition("the s/tb1 flow identity is a single-sector statement".into()));
        }
        let mut report = CheckReport::new("linear-s-tbar1", "dZt/ds = beta tb1 dZt/dtb1")
            .param("D", self.spec.degree)
            .param("beta", &self.spec.beta)
            .param("Q", &self.spec.q)
            .param("point", format!("{point:?}"));

        // Each term depends on (s, tb1) only through (e^{beta s} tb1)^d.
        let mut nonzero = 0;
        for (d, parts) in self.levels.iter().enumerate() {
            let e = ExpPolyFunc::exp_beta_s(d as i32);
            let ds = e.derivative();
            let tb_side = e.scale(&Rational::from_integer(BigInt::from(d))).mul(&ExpPolyFunc::beta());
            if !ds.sub(&tb_side).is_zero() {
                nonzero += parts.len();
            }
        }
        report.exact(ExactCheck::new("per-term symbolic residual", nonzero, None));

        let lhs = self.eval(TauKind::Ztilde, point, &Deriv::s(1))?;
        let rhs = self.eval(TauKind::Ztilde, point, &Deriv::tbar1(1))?;
        let tb1 = self.real(&point.tbar1());
        let residual = &lhs.value - &(&(&self.beta * &tb1) * &rhs.value);
        report.measure("numeric residual", residual.abs(), tolerance.clone());
        if lhs.tail_bound.is_none() {
            report.mark_inconclusive("tail majorant diverges");
        }
        report.tail_bound = lhs.tail_bound;
        Ok(report.finish())
    }
}

type KappaWeights = Arc<BTreeMap<i64, Rational>>;

static PLANCHEREL: LazyLock<Mutex<HashMap<usize, KappaWeights>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// `sum_{|lambda| = d} dim(lambda)^2 / d!`, grouped by `kappa`.
pub fn plancherel_weights(d: usize) -> Arc<BTreeMap<i64, Rational>> {
    if let Some(w) = PLANCHEREL.lock().expect("plancherel memo poisoned").get(&d) {
        return w.clone();
    }
    let fact = BigInt::from(factorial(d));
    let mut groups: BTreeMap<i64, Rational> = BTreeMap::new();
    for lambda in enumerate_partitions(d) {
        let dim = BigInt::from(lambda.dim());
        *groups.entry(lambda.kappa()).or_insert_with(Rational::zero) += Rational::new(&dim * &dim, fact.clone());
    }
    let groups = Arc::new(groups);
    PLANCHEREL
        .lock()
        .expect("plancherel memo poisoned")
        .insert(d, groups.clone());
    groups
}

/// Partitions contributing to a truncation of degree `D`.
pub fn truncation_partitions(degree: usize) -> Vec<Partition> {
    (0..=degree).flat_map(enumerate_partitions).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn default_tau(d: usize) -> Tau {
        Tau::new(TauSpec::new(d, rat(1, 5), rat(1, 10))).unwrap()
    }

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn empty_partition_at_zero_times() {
        let tau = default_tau(6);
        let s = rat(1, 3);
        let point = TauPoint::single(s.clone(), vec![], rat(1, 2));
        let z = tau.eval_z(&point, &Deriv::none()).unwrap();
        let sr = tau.real(&s);
        let expected = tau.prefactor_jet(&sr, 0).coeffs()[0].clone();
        assert!(close(&z.value, &expected, 1e-45));
        let zt = tau.eval(TauKind::Ztilde, &point, &Deriv::none()).unwrap();
        assert!(close(&zt.value, &Real::one(tau.prec()), 1e-45));
    }

    #[test]
    fn single_box_derivatives() {
        let tau = default_tau(6);
        let s = rat(1, 3);
        let v = tau
            .eval_ztilde_single(&s, &[], &rat(0, 1), &Deriv::t(1, 1).and_tbar(1, 1))
            .unwrap();
        let expected = -&(&tau.real(&rat(1, 10)) * &(tau.beta() * &tau.real(&s)).exp());
        assert!(close(&v.value, &expected, 1e-45));
        let w = tau.eval_ztilde_single(&s, &[], &rat(1, 2), &Deriv::t(1, 1)).unwrap();
        assert!(close(&w.value, &expected.mul_rational(&rat(1, 2)), 1e-45));
        let one = tau.eval_ztilde_single(&s, &[rat(1, 10)], &rat(0, 1), &Deriv::none()).unwrap();
        assert!(close(&one.value, &Real::one(tau.prec()), 1e-45));
    }

    #[test]
    fn s_zero_drops_prefactor() {
        let tau = Tau::new(TauSpec::new(4, rat(1, 5), rat(1, 10)).with_sector(Sector::Double)).unwrap();
        let point = TauPoint::new(int(0), vec![rat(1, 10), rat(1, 20)], vec![rat(1, 3), rat(-1, 7)]);
        let z = tau.eval(TauKind::Z, &point, &Deriv::none()).unwrap();
        let zt = tau.eval(TauKind::Ztilde, &point, &Deriv::none()).unwrap();
        assert!(close(&z.value, &zt.value, 1e-45));
    }

    #[test]
    fn single_matches_double_on_first_time() {
        let single = default_tau(5);
        let double = Tau::new(TauSpec::new(5, rat(1, 5), rat(1, 10)).with_sector(Sector::Double)).unwrap();
        let point = TauPoint::single(rat(-1, 2), vec![rat(1, 10), rat(1, 20)], rat(1, 2));
        for deriv in [Deriv::none(), Deriv::t(2, 1), Deriv::tbar1(2).and_s(1)] {
            let a = single.eval(TauKind::Z, &point, &deriv).unwrap();
            let b = double.eval(TauKind::Z, &point, &deriv).unwrap();
            assert!(close(&a.value, &b.value, 1e-45), "{deriv:?}");
        }
    }

    #[test]
    fn tail_bound_behaviour() {
        let tau = default_tau(8);
        let zero_tb = TauPoint::single(int(0), vec![], int(0));
        assert!(tau.tail_bound(TauKind::Z, &zero_tb).unwrap().is_zero());
        let point = TauPoint::single(int(2), vec![], rat(1, 2));
        let b8 = tau.tail_bound(TauKind::Ztilde, &point).unwrap();
        assert!(b8.to_f64() < 1e-6);
        let b10 = default_tau(10).tail_bound(TauKind::Ztilde, &point).unwrap();
        assert!(b10 <= b8);
        let huge = TauPoint::single(int(0), vec![], int(400));
        assert!(matches!(tau.tail_bound(TauKind::Z, &huge), Err(Error::Divergence { .. })));
    }

    #[test]
    fn linear_flow_identity() {
        let tau = Tau::new(TauSpec::new(6, rat(1, 5), rat(1, 10))).unwrap();
        let point = TauPoint::single(rat(1, 3), vec![rat(1, 10), rat(1, 20)], rat(1, 2));
        let tol = Real::from_int(10, tau.prec()).powi(-30);
        let report = tau.check_linear_s_tbar1(&point, &tol).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
