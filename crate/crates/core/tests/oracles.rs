//! Independent oracles written only for the tests, plus values frozen from them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use hurwitz_toda::hurwitz::{double_hurwitz_coeff, hurwitz_bruteforce, hurwitz_frobenius, RamificationProfile};
use hurwitz_toda::partitions::{enumerate_partitions, factorial, mn_character};
use hurwitz_toda::poly::{int, rat};
use hurwitz_toda::schur::{schur_in_power_sums, schur_poly};
use hurwitz_toda::{MultiPoly, Partition, Rational};

// ---- partitions -------------------------------------------------------

/// All multisets of positive integers summing to `d`, built from compositions.
fn oracle_partitions(d: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    if d == 0 {
        out.insert(Vec::new());
        return out;
    }
    // Bitmask over the d-1 gaps of a row of d boxes.
    for mask in 0u32..(1 << (d - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for gap in 0..d - 1 {
            if mask & (1 << gap) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        out.insert(parts);
    }
    out
}

/// Standard Young tableaux counted by removing corners recursively.
fn oracle_syt(shape: &[usize]) -> u64 {
    if shape.iter().sum::<usize>() == 0 {
        return 1;
    }
    let mut total = 0;
    for i in 0..shape.len() {
        let below = shape.get(i + 1).copied().unwrap_or(0);
        if shape[i] > below {
            let mut s = shape.to_vec();
            s[i] -= 1;
            while s.last() == Some(&0) {
                s.pop();
            }
            total += oracle_syt(&s);
        }
    }
    total
}

/// `2 * sum of contents (col - row)`.
fn oracle_kappa(shape: &[usize]) -> i64 {
    let mut sum = 0i64;
    for (i, &len) in shape.iter().enumerate() {
        for j in 0..len {
            sum += j as i64 - i as i64;
        }
    }
    2 * sum
}

// ---- characters via the alternant formula ------------------------------

type Poly = BTreeMap<Vec<i64>, i64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `chi^lambda(mu)` = coefficient of `x^{lambda + delta}` in `a_delta * p_mu`, `n` variables.
fn oracle_character(lambda: &[usize], mu: &[usize]) -> i64 {
    let n = lambda.len().max(1);
    let mut vandermonde = Poly::new();
    for p in permutations(n) {
        let e: Vec<i64> = p.iter().map(|&i| (n - 1 - i) as i64).collect();
        vandermonde.insert(e, perm_sign(&p));
    }
    let mut prod = vandermonde;
    for &k in mu {
        let mut pk = Poly::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = k as i64;
            pk.insert(e, 1);
        }
        prod = poly_mul(&prod, &pk);
    }
    let target: Vec<i64> = (0..n)
        .map(|i| lambda.get(i).copied().unwrap_or(0) as i64 + (n - 1 - i) as i64)
        .collect();
    prod.get(&target).copied().unwrap_or(0)
}

// ---- Hurwitz numbers by direct tuple enumeration -----------------------

fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut lens = Vec::new();
    for i in 0..p.len() {
        if !seen[i] {
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p[j];
                len += 1;
            }
            lens.push(len);
        }
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// `#{(s_1..s_k) : type(s_i) = profile_i, s_1...s_k = id} / d!`.
fn oracle_hurwitz(d: usize, profile: &[Vec<usize>]) -> Rational {
    let perms = permutations(d);
    let classes: Vec<Vec<&Vec<usize>>> = profile
        .iter()
        .map(|mu| perms.iter().filter(|p| cycle_type(p) == *mu).collect())
        .collect();
    fn count(classes: &[Vec<&Vec<usize>>], acc: Vec<usize>) -> u64 {
        match classes.split_first() {
            None => u64::from(acc.iter().enumerate().all(|(i, &x)| i == x)),
            Some((first, rest)) => first.iter().map(|p| count(rest, compose(&acc, p))).sum(),
        }
    }
    let identity: Vec<usize> = (0..d).collect();
    Rational::new(BigInt::from(count(&classes, identity)), BigInt::from(factorial(d)))
}

fn part(v: &[usize]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

#[test]
fn partitions_match_composition_oracle() {
    for d in 0..=9 {
        let ours: Vec<Vec<usize>> = enumerate_partitions(d).iter().map(|p| p.parts().to_vec()).collect();
        let set: BTreeSet<Vec<usize>> = ours.iter().cloned().collect();
        assert_eq!(set.len(), ours.len(), "duplicates at d = {d}");
        assert_eq!(set, oracle_partitions(d), "d = {d}");
        // Reverse-lexicographic order.
        assert!(ours.windows(2).all(|w| w[0] > w[1]), "order at d = {d}");
    }
    // Frozen: d = 4.
    let four: Vec<Vec<usize>> = enumerate_partitions(4).iter().map(|p| p.parts().to_vec()).collect();
    assert_eq!(four, vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
}

#[test]
fn dimensions_and_kappa_match_oracles() {
    for d in 0..=8 {
        for lambda in enumerate_partitions(d) {
            assert_eq!(lambda.dim().to_u64().unwrap(), oracle_syt(lambda.parts()), "dim {lambda}");
            assert_eq!(lambda.kappa(), oracle_kappa(lambda.parts()), "kappa {lambda}");
        }
    }
    // Frozen values.
    assert_eq!(part(&[2]).kappa(), 2);
    assert_eq!(part(&[1, 1]).kappa(), -2);
    assert_eq!(part(&[2, 1]).dim().to_u64(), Some(2));
    assert_eq!(part(&[2, 2]).dim().to_u64(), Some(2));
    assert_eq!(part(&[3, 1]).conjugate(), part(&[2, 1, 1]));
}

#[test]
fn characters_match_alternant_oracle() {
    for d in 1..=6 {
        let parts = enumerate_partitions(d);
        for lambda in &parts {
            for mu in &parts {
                assert_eq!(
                    mn_character(lambda, mu).unwrap(),
                    oracle_character(lambda.parts(), mu.parts()),
                    "chi^{lambda}({mu})"
                );
            }
        }
    }
    // Frozen.
    assert_eq!(mn_character(&part(&[1, 1]), &part(&[2])).unwrap(), -1);
    assert_eq!(mn_character(&part(&[2, 1]), &part(&[3])).unwrap(), -1);
    let s4 = [
        [1, 1, 1, 1, 1],
        [-1, 0, -1, 1, 3],
        [0, -1, 2, 0, 2],
        [1, 0, -1, -1, 3],
        [-1, 1, 1, -1, 1],
    ];
    let parts = enumerate_partitions(4);
    for (i, lambda) in parts.iter().enumerate() {
        for (j, mu) in parts.iter().enumerate() {
            assert_eq!(mn_character(lambda, mu).unwrap(), s4[i][j]);
        }
    }
}

/// `S_lambda = sum_mu chi^lambda(mu) p_mu / z_mu` with `p_k = k t_k`, from the oracle characters.
fn oracle_schur(lambda: &Partition, nvars: usize) -> MultiPoly {
    let mut total = MultiPoly::zero(nvars);
    for mu in enumerate_partitions(lambda.size()) {
        let chi = oracle_character(lambda.parts(), mu.parts());
        if chi == 0 {
            continue;
        }
        let mut term = MultiPoly::constant(nvars, Rational::new(BigInt::from(chi), BigInt::from(mu.centralizer())));
        for &k in mu.parts() {
            term = &term * &MultiPoly::var(nvars, k - 1).scale(&int(k as i64));
        }
        total = &total + &term;
    }
    total
}

#[test]
fn schur_polys_match_character_oracle() {
    for d in 0..=6 {
        for lambda in enumerate_partitions(d) {
            let nvars = d.max(1);
            assert_eq!(schur_poly(&lambda, nvars), oracle_schur(&lambda, nvars), "S_{lambda}");
        }
    }
    // Frozen: S_(1,1) = t1^2/2 - t2, S_(2,1) = t1^3/3 - t3.
    let t = |k: usize| MultiPoly::var(3, k - 1);
    let s11 = &(&t(1) * &t(1)).scale(&rat(1, 2)) - &t(2);
    assert_eq!(schur_poly(&part(&[1, 1]), 3), s11);
    let s21 = &(&(&t(1) * &t(1)) * &t(1)).scale(&rat(1, 3)) - &t(3);
    assert_eq!(schur_poly(&part(&[2, 1]), 3), s21);
    let expansion = schur_in_power_sums(&part(&[1, 1]));
    assert_eq!(expansion.get(&part(&[2])), Some(&rat(-1, 2)));
    assert_eq!(expansion.get(&part(&[1, 1])), Some(&rat(1, 2)));
}

#[test]
fn hurwitz_numbers_match_tuple_oracle() {
    for d in 1..=4usize {
        let parts = enumerate_partitions(d);
        let r_max = if d == 4 { 1 } else { 3 };
        for r in 0..=r_max {
            if r > 0 && d < 2 {
                continue;
            }
            for mu in &parts {
                for nu in &parts {
                    let mut profile = vec![mu.parts().to_vec(), nu.parts().to_vec()];
                    let mut tr = vec![2];
                    tr.extend(std::iter::repeat_n(1, d.saturating_sub(2)));
                    profile.extend(std::iter::repeat_n(tr, r));
                    let expected = oracle_hurwitz(d, &profile);
                    assert_eq!(double_hurwitz_coeff(d, r, mu, nu).unwrap(), expected, "d={d} r={r} {mu} {nu}");
                }
            }
        }
    }
    // Frozen examples.
    let p = |v: &[&[usize]]| RamificationProfile::new(v[0].iter().sum(), v.iter().map(|x| part(x)).collect()).unwrap();
    assert_eq!(hurwitz_bruteforce(&p(&[&[2], &[2]])).unwrap(), rat(1, 2));
    assert_eq!(hurwitz_bruteforce(&p(&[&[3], &[2, 1], &[2, 1]])).unwrap(), int(1));
    assert_eq!(hurwitz_frobenius(&p(&[&[2], &[2], &[2]])).unwrap(), Rational::zero());
    assert_eq!(double_hurwitz_coeff(2, 1, &part(&[2]), &part(&[2])).unwrap(), Rational::zero());
    assert_eq!(double_hurwitz_coeff(2, 2, &part(&[2]), &part(&[2])).unwrap(), rat(1, 2));
    assert_eq!(double_hurwitz_coeff(3, 0, &part(&[3]), &part(&[2, 1])).unwrap(), Rational::zero());
}
