//! Ground-truth disconnected Hurwitz numbers of the sphere.
//!
//! Two independent routes: counting monodromy tuples in `S_d` directly, and
//! the Frobenius character sum. `double_hurwitz_coeff` is the character-sum
//! coefficient of the double Hurwitz generating function, which must agree
//! with the monodromy count on `(mu, nu, transposition x r)`.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, factorial, mn_character, Partition};
use crate::poly::Rational;

/// Default degree bound for the brute-force count.
pub const DEFAULT_BRUTEFORCE_LIMIT: usize = 6;
/// Character tables are computed on demand; beyond this they get slow.
pub const FROBENIUS_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationProfile {
    degree: usize,
    partitions: Vec<Partition>,
}

impl RamificationProfile {
    pub fn new(degree: usize, partitions: Vec<Partition>) -> Result<Self> {
        if let Some(bad) = partitions.iter().find(|p| p.size() != degree) {
            return Err(Error::SizeMismatch {
                left: bad.to_string(),
                left_size: bad.size(),
                right: format!("degree {degree}"),
                right_size: degree,
            });
        }
        Ok(RamificationProfile { degree, partitions })
    }

    /// `(mu, nu, (2,1^{d-2}) x r)`.
    pub fn double(mu: &Partition, nu: &Partition, r: usize) -> Result<Self> {
        let d = mu.size();
        let mut partitions = vec![mu.clone(), nu.clone()];
        if r > 0 {
            let tau = Partition::transposition(d)?;
            partitions.extend(std::iter::repeat_n(tau, r));
        }
        Self::new(d, partitions)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }
}

type Perm = Vec<u8>;

fn cycle_type(perm: &[u8]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        parts.push(len);
    }
    Partition::from_unsorted(parts)
}

fn compose(a: &[u8], b: &[u8]) -> Perm {
    // (a . b)(i) = a(b(i))
    b.iter().map(|&i| a[i as usize]).collect()
}

fn class_elements(d: usize, mu: &Partition) -> Vec<Perm> {
    (0..d as u8)
        .permutations(d)
        .filter(|p| &cycle_type(p) == mu)
        .collect()
}

/// `H_d = #{(s_1..s_r) : type(s_j) = mu_j, s_1 ... s_r = id} / d!` with the default degree limit.
pub fn hurwitz_bruteforce(profile: &RamificationProfile) -> Result<Rational> {
    hurwitz_bruteforce_with_limit(profile, DEFAULT_BRUTEFORCE_LIMIT)
}

pub fn hurwitz_bruteforce_with_limit(
    profile: &RamificationProfile,
    limit: usize,
) -> Result<Rational> {
    let d = profile.degree;
    if d > limit {
        return Err(Error::DegreeLimit { degree: d, limit });
    }
    let count = monodromy_count(d, &profile.partitions);
    Ok(Rational::new(BigInt::from(count), BigInt::from(factorial(d))))
}

fn monodromy_count(d: usize, classes: &[Partition]) -> u64 {
    if classes.is_empty() {
        return 1;
    }
    // A product equal to the identity stays so under cyclic rotation, so the
    // largest class can be moved last and solved for instead of enumerated.
    let largest = classes
        .iter()
        .enumerate()
        .max_by_key(|(_, mu)| mu.class_size())
        .map(|(i, _)| i)
        .expect("nonempty");
    let rotated: Vec<&Partition> = classes[largest + 1..]
        .iter()
        .chain(&classes[..=largest])
        .collect();
    let (last, free) = rotated.split_last().expect("nonempty");

    let mut elements: HashMap<&Partition, Vec<Perm>> = HashMap::new();
    for mu in free {
        elements.entry(*mu).or_insert_with(|| class_elements(d, mu));
    }
    let lists: Vec<&Vec<Perm>> = free.iter().map(|mu| &elements[*mu]).collect();

    fn walk(prefix: &[u8], rest: &[&Vec<Perm>], last: &Partition) -> u64 {
        match rest.split_first() {
            None => u64::from(cycle_type(prefix) == *last),
            Some((head, tail)) => head
                .iter()
                .map(|sigma| walk(&compose(prefix, sigma), tail, last))
                .sum(),
        }
    }

    let identity: Perm = (0..d as u8).collect();
    walk(&identity, &lists, last)
}

/// Frobenius character formula
/// `H = sum_lambda (dim/d!)^2 prod_j (d! chi^lambda(mu_j) / (z_{mu_j} dim))`.
pub fn hurwitz_frobenius(profile: &RamificationProfile) -> Result<Rational> {
    let d = profile.degree;
    if d > FROBENIUS_LIMIT {
        return Err(Error::DegreeLimit {
            degree: d,
            limit: FROBENIUS_LIMIT,
        });
    }
    let d_fact = BigInt::from(factorial(d));
    let mut total = Rational::zero();
    for lambda in enumerate_partitions(d) {
        let dim = BigInt::from(lambda.dim());
        let mut term = Rational::new(dim.clone() * &dim, d_fact.clone() * &d_fact);
        for mu in &profile.partitions {
            let chi = mn_character(&lambda, mu)?;
            if chi == 0 {
                term = Rational::zero();
                break;
            }
            let central = BigInt::from(mu.centralizer());
            term *= Rational::new(&d_fact * BigInt::from(chi), central * &dim);
        }
        total += term;
    }
    Ok(total)
}

/// Coefficient of `beta^r / r! * Q^d * p_mu * pbar_nu` in the double Hurwitz
/// generating function, from its Schur-function (character) form:
/// `sum_{|lambda| = d} (kappa/2)^r chi^lambda(mu) chi^lambda(nu) / (z_mu z_nu)`.
pub fn double_hurwitz_coeff(d: usize, r: usize, mu: &Partition, nu: &Partition) -> Result<Rational> {
    for p in [mu, nu] {
        if p.size() != d {
            return Err(Error::SizeMismatch {
                left: p.to_string(),
                left_size: p.size(),
                right: format!("degree {d}"),
                right_size: d,
            });
        }
    }
    if r > 0 && d < 2 {
        return Err(Error::NoTransposition(d));
    }
    let denom = BigInt::from(mu.centralizer()) * BigInt::from(nu.centralizer());
    let mut total = Rational::zero();
    for lambda in enumerate_partitions(d) {
        let chi = mn_character(&lambda, mu)? * mn_character(&lambda, nu)?;
        if chi == 0 {
            continue;
        }
        let half_kappa = Rational::new(BigInt::from(lambda.kappa()), BigInt::from(2));
        total += num_traits::pow(half_kappa, r) * Rational::from_integer(BigInt::from(chi));
    }
    Ok(total / Rational::from_integer(denom))
}

/// One row of the double Hurwitz table with its brute-force cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzRow {
    pub degree: usize,
    pub r: usize,
    pub mu: Partition,
    pub nu: Partition,
    #[serde(with = "crate::report::rational_string")]
    pub coefficient: Rational,
    #[serde(with = "crate::report::rational_string_opt")]
    pub bruteforce: Option<Rational>,
    pub matches: Option<bool>,
}

/// Every `double_hurwitz_coeff` with `d <= d_max`, `r <= r_max`, cross-checked
/// by brute force up to `bruteforce_limit`. Rows needing a transposition at `d < 2` are omitted.
pub fn hurwitz_table(d_max: usize, r_max: usize, bruteforce_limit: usize) -> Result<Vec<HurwitzRow>> {
    if d_max > FROBENIUS_LIMIT {
        return Err(Error::DegreeLimit {
            degree: d_max,
            limit: FROBENIUS_LIMIT,
        });
    }
    let mut rows = Vec::new();
    for d in 0..=d_max {
        let parts = enumerate_partitions(d);
        for r in 0..=r_max {
            if r > 0 && d < 2 {
                continue;
            }
            for mu in &parts {
                for nu in &parts {
                    let coefficient = double_hurwitz_coeff(d, r, mu, nu)?;
                    let bruteforce = if d <= bruteforce_limit {
                        let profile = RamificationProfile::double(mu, nu, r)?;
                        Some(hurwitz_bruteforce_with_limit(&profile, bruteforce_limit)?)
                    } else {
                        None
                    };
                    let matches = bruteforce.as_ref().map(|b| *b == coefficient);
                    rows.push(HurwitzRow {
                        degree: d,
                        r,
                        mu: mu.clone(),
                        nu: nu.clone(),
                        coefficient,
                        bruteforce,
                        matches,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// `H_0 = 1` for the empty covering.
pub fn empty_covering() -> Rational {
    Rational::one()
}
