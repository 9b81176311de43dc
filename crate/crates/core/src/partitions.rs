//! Integer partitions and the symmetric-group statistics attached to them:
//! the content sum `kappa`, the dimension `dim` of the irreducible
//! representation, centralizer orders and irreducible characters.

use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// The unique partition of zero.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Validating constructor. Trailing zeros are not accepted.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let decreasing = parts.windows(2).all(|w| w[0] >= w[1]);
        if !decreasing || parts.contains(&0) {
            return Err(Error::InvalidPartition(parts));
        }
        Ok(Partition { parts })
    }

    /// Sorts and drops zeros; never fails.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// The single-row partition `(d)`, or the empty partition for `d = 0`.
    pub fn row(d: usize) -> Self {
        Self::from_unsorted(vec![d])
    }

    /// `1^d`.
    pub fn column(d: usize) -> Self {
        Partition { parts: vec![1; d] }
    }

    /// The cycle type of a transposition in `S_d`, `(2, 1^{d-2})`.
    pub fn transposition(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::NoTransposition(d));
        }
        let mut parts = vec![2];
        parts.extend(std::iter::repeat_n(1, d - 2));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// `sum_i lambda_i (lambda_i - 2i + 1)` with 1-based `i`; twice the content sum.
    pub fn kappa(&self) -> i64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let p = p as i64;
                p * (p - 2 * (i as i64 + 1) + 1)
            })
            .sum()
    }

    /// Transposed Young diagram.
    pub fn conjugate(&self) -> Self {
        let width = self.part(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// Hook lengths, row by row.
    pub fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut hooks = Vec::with_capacity(self.size());
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                hooks.push(row - j + conj.part(j) - i - 1);
            }
        }
        hooks
    }

    /// Dimension of the irreducible representation of `S_{|lambda|}`, by the hook-length formula.
    pub fn dim(&self) -> BigUint {
        let hooks: BigUint = self.hooks().into_iter().map(BigUint::from).product();
        factorial(self.size()) / hooks
    }

    /// Multiplicities `m_k` of each part size `k`, indexed by `k` (index 0 unused).
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut mult = vec![0; self.part(0) + 1];
        for &p in &self.parts {
            mult[p] += 1;
        }
        mult
    }

    /// Centralizer order `z_mu = prod_k k^{m_k} m_k!` of a permutation with cycle type `self`.
    pub fn centralizer(&self) -> BigUint {
        self.multiplicities()
            .iter()
            .enumerate()
            .skip(1)
            .fold(BigUint::one(), |acc, (k, &m)| {
                acc * BigUint::from(k).pow(m as u32) * factorial(m)
            })
    }

    /// Size of the conjugacy class of cycle type `self` in `S_{|self|}`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.size()) / self.centralizer()
    }

    /// Sign of any permutation of this cycle type.
    pub fn sign(&self) -> i64 {
        let even_cycles = self.parts.iter().filter(|&&p| p % 2 == 0).count();
        if even_cycles % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn beta_set(&self) -> Vec<usize> {
        let len = self.len();
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| p + len - 1 - i)
            .collect()
    }

    fn from_beta_set(mut beta: Vec<usize>) -> Self {
        beta.sort_unstable_by(|a, b| b.cmp(a));
        let len = beta.len();
        let parts = beta
            .into_iter()
            .enumerate()
            .map(|(i, b)| b - (len - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        Partition { parts }
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        f.pad(&format!("({})", parts.join(",")))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// All partitions of `d` in reverse-lexicographic order, e.g. `4 -> (4),(3,1),(2,2),(2,1,1),(1,1,1,1)`.
pub fn enumerate_partitions(d: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for first in (1..=rest.min(max)).rev() {
            prefix.push(first);
            rec(rest - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// All partitions of size at most `max_size`, grouped by size and in canonical order within each size.
pub fn partitions_up_to(max_size: usize) -> Vec<Partition> {
    (0..=max_size).flat_map(enumerate_partitions).collect()
}

/// Number of partitions `p(d)`.
pub fn partition_count(d: usize) -> usize {
    let mut table = vec![0usize; d + 1];
    table[0] = 1;
    for part in 1..=d {
        for n in part..=d {
            table[n] += table[n - part];
        }
    }
    table[d]
}

type CharKey = (Partition, Partition);

static CHARACTERS: LazyLock<Mutex<HashMap<CharKey, i64>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Irreducible character `chi^lambda` evaluated on the class of cycle type `mu`
/// (Murnaghan-Nakayama rule on beta-sets, memoized process-wide).
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch {
            left: lambda.to_string(),
            left_size: lambda.size(),
            right: mu.to_string(),
            right_size: mu.size(),
        });
    }
    Ok(mn_unchecked(lambda, mu))
}

fn mn_unchecked(lambda: &Partition, mu: &Partition) -> i64 {
    if mu.is_empty() {
        return i64::from(lambda.is_empty());
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(&v) = CHARACTERS.lock().expect("character table poisoned").get(&key) {
        return v;
    }

    let hook = mu.parts[0];
    let rest = Partition {
        parts: mu.parts[1..].to_vec(),
    };
    let beta = lambda.beta_set();
    let mut total = 0i64;
    for (idx, &b) in beta.iter().enumerate() {
        if b < hook {
            continue;
        }
        let target = b - hook;
        if beta.contains(&target) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beta.clone();
        moved[idx] = target;
        let smaller = Partition::from_beta_set(moved);
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn_unchecked(&smaller, &rest);
    }

    CHARACTERS
        .lock()
        .expect("character table poisoned")
        .insert(key, total);
    total
}

/// Snapshot of every memoized character with `|lambda| = d`, in canonical order.
pub fn character_table(d: usize) -> Vec<(Partition, Partition, i64)> {
    let parts = enumerate_partitions(d);
    let mut table = Vec::with_capacity(parts.len() * parts.len());
    for lambda in &parts {
        for mu in &parts {
            table.push((lambda.clone(), mu.clone(), mn_unchecked(lambda, mu)));
        }
    }
    table
}

/// Seeds the in-process character memo, e.g. from a persisted cache.
pub fn seed_characters(entries: impl IntoIterator<Item = (Partition, Partition, i64)>) {
    let mut table = CHARACTERS.lock().expect("character table poisoned");
    for (lambda, mu, value) in entries {
        table.insert((lambda, mu), value);
    }
}
