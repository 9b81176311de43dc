//! Property tests for the combinatorial and operator-algebra invariants.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use hurwitz_toda::config::parse_rational;
use hurwitz_toda::opalg::{Coeff, DiffOp, ExpPolyFunc, Part, Window};
use hurwitz_toda::partitions::{enumerate_partitions, factorial, mn_character};
use hurwitz_toda::poly::rat;
use hurwitz_toda::schur::{eval_special_c, jacobi_trudi, schur_poly};
use hurwitz_toda::{MultiPoly, Partition, Rational};

type Op = DiffOp<ExpPolyFunc>;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn partition_of_size(max: usize) -> impl Strategy<Value = Partition> {
    (0..=max).prop_flat_map(|d| {
        let parts = enumerate_partitions(d);
        (0..parts.len()).prop_map(move |i| parts[i].clone())
    })
}

/// Coefficients drawn from `{1, s, e^{beta s}, beta, c_1}` with rational weights.
fn coefficient() -> impl Strategy<Value = ExpPolyFunc> {
    (small_rational(), 0usize..5).prop_map(|(q, kind)| {
        let base = match kind {
            0 => ExpPolyFunc::one(),
            1 => ExpPolyFunc::s(),
            2 => ExpPolyFunc::exp_beta_s(1),
            3 => ExpPolyFunc::beta(),
            _ => ExpPolyFunc::c(1),
        };
        base.scale(&q)
    })
}

fn operator(window: Window, shifts: std::ops::RangeInclusive<i64>, max_j: u32) -> impl Strategy<Value = Op> {
    proptest::collection::vec(((0..=max_j), shifts, coefficient()), 0..4)
        .prop_map(move |terms| Op::from_terms(window, terms.into_iter().map(|(j, k, a)| ((j, k), a))))
}

fn wide() -> Window {
    Window::new(-10, 10, 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dimensions_square_sum_to_factorial(d in 0usize..=9) {
        let total: BigInt = enumerate_partitions(d).iter().map(|l| BigInt::from(l.dim()) * BigInt::from(l.dim())).sum();
        prop_assert_eq!(total, BigInt::from(factorial(d)));
    }

    #[test]
    fn conjugation_is_an_involution(lambda in partition_of_size(10)) {
        let c = lambda.conjugate();
        prop_assert_eq!(c.conjugate(), lambda.clone());
        prop_assert_eq!(c.dim(), lambda.dim());
        prop_assert_eq!(c.kappa(), -lambda.kappa());
    }

    #[test]
    fn character_columns_are_orthogonal(d in 1usize..=6, i in 0usize..11, j in 0usize..11) {
        let parts = enumerate_partitions(d);
        let (mu, nu) = (&parts[i % parts.len()], &parts[j % parts.len()]);
        let sum: i64 = parts
            .iter()
            .map(|l| mn_character(l, mu).unwrap() * mn_character(l, nu).unwrap())
            .sum();
        let expected = if mu == nu { BigInt::from(mu.centralizer()) } else { BigInt::zero() };
        prop_assert_eq!(BigInt::from(sum), expected);
    }

    #[test]
    fn jacobi_trudi_is_stable_in_size(lambda in partition_of_size(8)) {
        let nvars = lambda.size().max(1);
        let n = lambda.len();
        prop_assert_eq!(jacobi_trudi(&lambda, nvars, n), jacobi_trudi(&lambda, nvars, n + 2));
    }

    #[test]
    fn special_value_matches_evaluation(lambda in partition_of_size(8), c in small_rational()) {
        let nvars = lambda.size().max(1);
        let mut at = vec![Rational::zero(); nvars];
        at[0] = c.clone();
        prop_assert_eq!(schur_poly(&lambda, nvars).eval(&at), eval_special_c(&lambda, &c));
    }

    #[test]
    fn schur_is_weighted_homogeneous(lambda in partition_of_size(6), a in small_rational()) {
        let nvars = lambda.size().max(1);
        let p = schur_poly(&lambda, nvars);
        let scale = num_traits::pow(a.clone(), lambda.size());
        prop_assert_eq!(p.weighted_rescale(&a), p.scale(&scale));
    }

    #[test]
    fn operator_product_is_associative(
        a in operator(wide(), -2..=2, 1),
        b in operator(wide(), -2..=2, 1),
        c in operator(wide(), -2..=2, 1),
    ) {
        prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
    }

    #[test]
    fn commutators_satisfy_jacobi(
        a in operator(wide(), -2..=2, 1),
        b in operator(wide(), -2..=2, 1),
        c in operator(wide(), -2..=2, 1),
    ) {
        let jacobi = a.commutator(&b.commutator(&c))
            .add(&b.commutator(&c.commutator(&a)))
            .add(&c.commutator(&a.commutator(&b)));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn projections_split_the_operator(a in operator(wide(), -3..=3, 2)) {
        prop_assert_eq!(a.project(Part::NonNegative).add(&a.project(Part::Negative)), a);
    }

    #[test]
    fn exp_log_round_trip_on_strictly_lower(x in operator(Window::new(-6, 6, 2), -3..=-1, 0)) {
        let e = x.exp_strict().unwrap();
        prop_assert_eq!(e.log_unitriangular().unwrap(), x);
    }

    #[test]
    fn unitriangular_inverse(x in operator(Window::new(-6, 6, 2), -3..=-1, 0)) {
        let w = Op::identity(x.window()).add(&x);
        let inv = w.inverse_unitriangular().unwrap();
        prop_assert_eq!(w.multiply(&inv), Op::identity(x.window()));
        prop_assert_eq!(inv.multiply(&w), Op::identity(x.window()));
    }

    #[test]
    fn rationals_parse_from_their_display(n in -1000i64..1000, d in 1i64..1000) {
        let q = rat(n, d);
        prop_assert_eq!(parse_rational(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn decimals_parse_exactly(n in -100000i64..100000, places in 0u32..6) {
        let text = format!("{}e-{places}", n);
        let expected = Rational::new(BigInt::from(n), num_traits::pow(BigInt::from(10), places as usize));
        prop_assert_eq!(parse_rational(&text).unwrap(), expected);
    }
}

#[test]
fn cauchy_sum_of_dimension_weighted_schurs() {
    for d in 0..=6usize {
        let nvars = d.max(1);
        let mut total = MultiPoly::zero(nvars);
        for lambda in enumerate_partitions(d) {
            let w = Rational::from_integer(BigInt::from(lambda.dim()));
            total = &total + &schur_poly(&lambda, nvars).scale(&w);
        }
        let t1 = MultiPoly::var(nvars, 0);
        let mut expected = MultiPoly::one(nvars);
        for _ in 0..d {
            expected = &expected * &t1;
        }
        assert_eq!(total, expected, "d = {d}");
    }
}
