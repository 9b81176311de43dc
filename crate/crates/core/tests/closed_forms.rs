//! Closed forms at `t = 0` and an empirical check of the truncation bound.

use std::sync::Arc;

use hurwitz_toda::dressing::{BAPoint, Dressing};
use hurwitz_toda::poly::rat;
use hurwitz_toda::tau::{Deriv, Tau, TauKind, TauPoint, TauSpec};
use hurwitz_toda::{Rational, Real};

const PREC: u32 = 50;

fn tau(degree: usize) -> Arc<Tau> {
    Arc::new(Tau::new(TauSpec::new(degree, rat(1, 5), rat(1, 10)).with_precision(PREC)).unwrap())
}

fn real(q: &Rational) -> Real {
    Real::from_rational(q, hurwitz_toda::real::bits_for_digits(PREC))
}

fn assert_close(got: &Real, want: &Real, what: &str) {
    let err = (got - want).abs();
    let scale = want.abs().to_f64().max(1.0);
    assert!(err.to_f64() <= 1e-40 * scale, "{what}: got {got:?}, want {want:?}");
}

/// `Q e^{beta x}` evaluated independently of the tau machinery.
fn q_exp(x: &Rational) -> Real {
    (&real(&rat(1, 5)) * &real(x)).exp().mul_rational(&rat(1, 10))
}

#[test]
fn coefficient_functions_at_zero_times() {
    let one = rat(1, 1);
    for (s, tb) in [(rat(1, 3), rat(1, 3)), (rat(-3, 2), rat(1, 2)), (rat(2, 1), rat(7, 10))] {
        let d = Dressing::new(tau(6), BAPoint::new(s.clone(), vec![], tb.clone(), rat(2, 1))).unwrap();
        let c = d.coeff_functions(0, 0, 0).unwrap();
        let prec = d.prec();
        let ubar = c.ubar0.value_at(0, prec).unwrap();
        let v = c.v.value_at(0, prec).unwrap();
        let u1 = c.u1.value_at(0, prec).unwrap();

        let e_prev = q_exp(&(&s - &one));
        let e_here = q_exp(&s);
        assert_close(&ubar, &e_prev, "ubar0");
        assert_close(&v, &e_prev.mul_rational(&(rat(1, 5) * &tb)), "v");
        let want_u1 = (&e_here - &e_prev).mul_rational(&-tb.clone());
        assert_close(&u1, &want_u1, "u1");

        let w = d.w_coeffs(1).unwrap();
        assert_close(&w[0], &e_prev.mul_rational(&tb), "w1");
    }
}

#[test]
fn tau_derivatives_at_zero_times() {
    let t = tau(6);
    for s in [rat(1, 3), rat(-1, 2), rat(3, 2)] {
        for tb in [rat(1, 2), rat(-1, 4)] {
            let value = t.eval_ztilde_single(&s, &[], &tb, &Deriv::none()).unwrap();
            assert_close(&value.value, &Real::one(t.prec()), "Zt");
            let d1 = t.eval_ztilde_single(&s, &[], &tb, &Deriv::t(1, 1)).unwrap();
            assert_close(&d1.value, &q_exp(&s).mul_rational(&-tb.clone()), "dZt/dt1");
        }
    }
}

#[test]
fn baker_akhiezer_matches_its_series_at_zero_times() {
    let s = rat(1, 3);
    let z = rat(2, 1);
    let d = Dressing::new(tau(8), BAPoint::new(s.clone(), vec![], rat(1, 2), z.clone())).unwrap();
    let psi = d.eval_psi().unwrap();
    let prec = d.prec();
    let w = d.w_coeffs(8).unwrap();
    let z_inv = real(&(rat(1, 1) / &z));
    let mut series = Real::one(prec);
    let mut power = Real::one(prec);
    for wn in &w {
        power = &power * &z_inv;
        series = &series + &(wn * &power);
    }
    let z_s = (&real(&z).ln() * &real(&s)).exp();
    let expected = &series * &z_s;
    let err = (&psi - &expected).abs().to_f64();
    assert!(err < 1e-12, "psi {psi:?} vs series {expected:?}: {err:e}");
}

#[test]
fn truncation_bound_covers_the_observed_tail() {
    let low = tau(8);
    let high = tau(12);
    for s in [rat(-2, 1), rat(0, 1), rat(2, 1)] {
        let point = TauPoint::single(s.clone(), vec![rat(1, 10), rat(1, 20)], rat(1, 2));
        let a = low.eval(TauKind::Z, &point, &Deriv::none()).unwrap();
        let b = high.eval(TauKind::Z, &point, &Deriv::none()).unwrap();
        let bound = a.tail_bound.clone().expect("majorant converges");
        let diff = (&a.value - &b.value).abs();
        assert!(diff <= bound, "s = {s}: |Z8 - Z12| = {diff:?} exceeds {bound:?}");
        assert!(bound.to_f64() < 1e-6, "s = {s}: bound {bound:?}");
        assert!(b.tail_bound.unwrap() < bound);
    }
}
