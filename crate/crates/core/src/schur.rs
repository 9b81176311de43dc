//! Schur polynomials `S_lambda(t)` in the power-sum-scaled times
//! `t_k = p_k / k`, built from the complete-homogeneous series
//! `sum_n S_n(t) z^n = exp(sum_k t_k z^k)` and the Jacobi-Trudi determinant.

use std::collections::{BTreeMap, HashMap};
use std::sync::{LazyLock, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::partitions::{enumerate_partitions, factorial, mn_character, Partition};
use crate::poly::{int, MultiPoly, Rational};

/// `S_n(t)` in `nvars` variables: the sum over partitions `mu` of `n` of
/// `prod_k t_k^{m_k} / m_k!`.
///
/// Panics if `n > 0` needs a variable beyond `nvars` (i.e. `nvars < n`).
pub fn elementary_series(n: usize, nvars: usize) -> MultiPoly {
    assert!(n == 0 || nvars >= n, "S_{n} needs at least {n} variables");
    let terms = enumerate_partitions(n).into_iter().map(|mu| {
        let mult = mu.multiplicities();
        let mut exps = vec![0u32; nvars];
        let mut denom = num_bigint::BigUint::one();
        for (k, &m) in mult.iter().enumerate().skip(1) {
            exps[k - 1] = m as u32;
            denom *= factorial(m);
        }
        (exps, Rational::new(BigInt::one(), BigInt::from(denom)))
    });
    MultiPoly::from_terms(nvars, terms)
}

static SCHUR_MEMO: LazyLock<Mutex<HashMap<(Partition, usize), MultiPoly>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// `S_lambda(t)` via the Jacobi-Trudi determinant of size `len(lambda)`; memoized per `(lambda, nvars)`.
pub fn schur_poly(lambda: &Partition, nvars: usize) -> MultiPoly {
    let key = (lambda.clone(), nvars);
    if let Some(p) = SCHUR_MEMO.lock().expect("schur memo poisoned").get(&key) {
        return p.clone();
    }
    let p = jacobi_trudi(lambda, nvars, lambda.len());
    SCHUR_MEMO
        .lock()
        .expect("schur memo poisoned")
        .insert(key, p.clone());
    p
}

/// Seeds the Schur memo, e.g. from a persisted cache.
pub fn seed_schur(entries: impl IntoIterator<Item = (Partition, usize, MultiPoly)>) {
    let mut memo = SCHUR_MEMO.lock().expect("schur memo poisoned");
    for (lambda, nvars, poly) in entries {
        memo.insert((lambda, nvars), poly);
    }
}

/// `det(S_{lambda_i - i + j})_{i,j=1..size}` for any `size >= len(lambda)`.
pub fn jacobi_trudi(lambda: &Partition, nvars: usize, size: usize) -> MultiPoly {
    assert!(size >= lambda.len(), "determinant smaller than the partition length");
    assert!(size <= 20, "Jacobi-Trudi determinant of size {size} is too large");
    if size == 0 {
        return MultiPoly::one(nvars);
    }
    // The weighted degree is |lambda|, but individual entries reach S_{lambda_1 + size - 1}.
    let work_vars = nvars.max(lambda.part(0) + size - 1);
    let series: Vec<MultiPoly> = (0..=lambda.part(0) + size - 1)
        .map(|n| elementary_series(n, work_vars))
        .collect();
    let entry = |i: usize, j: usize| -> Option<&MultiPoly> {
        let idx = lambda.part(i) as i64 - i as i64 + j as i64;
        (idx >= 0).then(|| &series[idx as usize])
    };

    // Laplace expansion along rows, memoized on the set of used columns.
    fn expand<'a>(
        mask: u32,
        size: usize,
        work_vars: usize,
        entry: &dyn Fn(usize, usize) -> Option<&'a MultiPoly>,
        memo: &mut HashMap<u32, MultiPoly>,
    ) -> MultiPoly {
        let row = mask.count_ones() as usize;
        if row == size {
            return MultiPoly::one(work_vars);
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let mut acc = MultiPoly::zero(work_vars);
        let mut free_before = 0usize;
        for col in 0..size {
            if mask & (1 << col) != 0 {
                continue;
            }
            if let Some(a) = entry(row, col) {
                let minor = expand(mask | (1 << col), size, work_vars, entry, memo);
                if !minor.is_zero() {
                    let term = a * &minor;
                    acc = if free_before.is_multiple_of(2) {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
            }
            free_before += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }

    let mut memo = HashMap::new();
    let det = expand(0, size, work_vars, &entry, &mut memo);
    det.with_nvars(nvars)
}

/// Closed form `S_lambda(c, 0, 0, ...) = dim(lambda) / |lambda|! * c^{|lambda|}`.
pub fn eval_special_c(lambda: &Partition, c: &Rational) -> Rational {
    let d = lambda.size();
    let ratio = Rational::new(BigInt::from(lambda.dim()), BigInt::from(factorial(d)));
    ratio * num_traits::pow(c.clone(), d)
}

/// Power-sum expansion: `s_lambda = sum_mu chi^lambda(mu) / z_mu * p_mu`.
pub fn schur_in_power_sums(lambda: &Partition) -> BTreeMap<Partition, Rational> {
    let d = lambda.size();
    enumerate_partitions(d)
        .into_iter()
        .filter_map(|mu| {
            let chi = mn_character(lambda, &mu).expect("same size");
            if chi == 0 {
                return None;
            }
            let coeff = Rational::new(BigInt::from(chi), BigInt::from(mu.centralizer()));
            Some((mu, coeff))
        })
        .collect()
}

/// `p_mu` written in the times, `p_k = k t_k`.
pub fn power_sum_poly(mu: &Partition, nvars: usize) -> MultiPoly {
    mu.parts().iter().fold(MultiPoly::one(nvars), |acc, &k| {
        &acc * &MultiPoly::var(nvars, k - 1).scale(&int(k as i64))
    })
}

/// Rebuilds a polynomial in the times from a power-sum expansion.
pub fn from_power_sums(expansion: &BTreeMap<Partition, Rational>, nvars: usize) -> MultiPoly {
    expansion.iter().fold(MultiPoly::zero(nvars), |acc, (mu, c)| {
        if c.is_zero() {
            acc
        } else {
            &acc + &power_sum_poly(mu, nvars).scale(c)
        }
    })
}
