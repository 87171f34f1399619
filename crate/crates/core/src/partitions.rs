//! Two-row partitions, symmetric-group characters and generalized Kronecker
//! coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{factorial, Rational};

/// A Young diagram with at most two rows, `lambda1 >= lambda2 >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u32; 2]", into = "[u32; 2]")]
pub struct TwoRowPartition {
    lambda1: u32,
    lambda2: u32,
}

impl TwoRowPartition {
    pub fn new(lambda1: u32, lambda2: u32) -> Result<Self> {
        if lambda1 < lambda2 {
            return invalid(format!("({lambda1},{lambda2}) is not a partition"));
        }
        Ok(TwoRowPartition { lambda1, lambda2 })
    }

    pub fn lambda1(&self) -> u32 {
        self.lambda1
    }

    pub fn lambda2(&self) -> u32 {
        self.lambda2
    }

    pub fn size(&self) -> u32 {
        self.lambda1 + self.lambda2
    }

    /// Row difference `lambda1 - lambda2`, the SL2 degree of the sector.
    pub fn nu(&self) -> u32 {
        self.lambda1 - self.lambda2
    }

    /// The diagram obtained by removing one box from row `row` (0 or 1).
    pub fn remove_box(&self, row: u8) -> Option<TwoRowPartition> {
        let (a, b) = match row {
            0 => (self.lambda1.checked_sub(1)?, self.lambda2),
            _ => (self.lambda1, self.lambda2.checked_sub(1)?),
        };
        TwoRowPartition::new(a, b).ok()
    }

    /// Whether `omega` is a valid weight of the GL2 irrep.
    pub fn contains_weight(&self, omega: u32) -> bool {
        self.lambda2 <= omega && omega <= self.lambda1
    }
}

impl TryFrom<[u32; 2]> for TwoRowPartition {
    type Error = Error;
    fn try_from(v: [u32; 2]) -> Result<Self> {
        TwoRowPartition::new(v[0], v[1])
    }
}

impl From<TwoRowPartition> for [u32; 2] {
    fn from(p: TwoRowPartition) -> [u32; 2] {
        [p.lambda1, p.lambda2]
    }
}

impl fmt::Display for TwoRowPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lambda1, self.lambda2)
    }
}

impl FromStr for TwoRowPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b] = parts.as_slice() else {
            return invalid(format!("expected \"l1,l2\", got {s:?}"));
        };
        let parse = |x: &str| {
            x.parse::<u32>().map_err(|_| Error::InvalidInput(format!("bad row length {x:?}")))
        };
        TwoRowPartition::new(parse(a)?, parse(b)?)
    }
}

/// One two-row partition per party, all of the same size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<TwoRowPartition>", into = "Vec<TwoRowPartition>")]
pub struct PartitionTuple(Vec<TwoRowPartition>);

impl PartitionTuple {
    pub fn new(parts: Vec<TwoRowPartition>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return invalid("empty partition tuple");
        };
        let n = first.size();
        if parts.iter().any(|p| p.size() != n) {
            return invalid("partition tuple entries must all have the same size");
        }
        Ok(PartitionTuple(parts))
    }

    /// `N` copies of the same partition.
    pub fn uniform(lambda: TwoRowPartition, parties: usize) -> Self {
        PartitionTuple(vec![lambda; parties])
    }

    pub fn parts(&self) -> &[TwoRowPartition] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    /// The common size `n`.
    pub fn size(&self) -> u32 {
        self.0[0].size()
    }

    pub fn second_row_sum(&self) -> u32 {
        self.0.iter().map(|p| p.lambda2).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TwoRowPartition> {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for PartitionTuple {
    type Output = TwoRowPartition;
    fn index(&self, i: usize) -> &TwoRowPartition {
        &self.0[i]
    }
}

impl TryFrom<Vec<TwoRowPartition>> for PartitionTuple {
    type Error = Error;
    fn try_from(v: Vec<TwoRowPartition>) -> Result<Self> {
        PartitionTuple::new(v)
    }
}

impl From<PartitionTuple> for Vec<TwoRowPartition> {
    fn from(t: PartitionTuple) -> Self {
        t.0
    }
}

impl fmt::Display for PartitionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(";"))
    }
}

impl FromStr for PartitionTuple {
    type Err = Error;
    /// Parses `"5,2;5,2;5,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(TwoRowPartition::from_str)
            .collect::<Result<Vec<_>>>()?;
        PartitionTuple::new(parts)
    }
}

/// Cycle type of a permutation: positive parts summing to `n`, descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType(Vec<u32>);

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("cycle lengths must be positive");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Order of the centralizer, `prod_i i^{m_i} m_i!`.
    pub fn centralizer_order(&self) -> Rational {
        let mut z = num_bigint::BigUint::from(1u32);
        let mut i = 0;
        while i < self.0.len() {
            let len = self.0[i];
            let mut m = 0u64;
            while i < self.0.len() && self.0[i] == len {
                z *= len;
                m += 1;
                i += 1;
            }
            z *= factorial(m);
        }
        BigRational::from_integer(BigInt::from(z))
    }
}

/// All two-row partitions of `n`, by descending first row.
pub fn list_partitions(n: u32) -> Vec<TwoRowPartition> {
    (0..=n / 2).map(|k| TwoRowPartition { lambda1: n - k, lambda2: k }).collect()
}

/// Every tuple of `parties` two-row partitions of `n`, in lexicographic order
/// of [`list_partitions`] indices.
pub fn all_tuples(parties: usize, n: u32) -> Vec<PartitionTuple> {
    let base = list_partitions(n);
    let mut out = vec![Vec::with_capacity(parties)];
    for _ in 0..parties {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                base.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(*p);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(PartitionTuple).collect()
}

/// Dimension of the symmetric-group irrep, i.e. the number of standard
/// tableaux: `(lambda1 - lambda2 + 1) / (lambda1 + 1) * C(n, lambda2)`.
pub fn dim_irrep(lambda: &TwoRowPartition) -> u64 {
    let n = u128::from(lambda.size());
    let k = u128::from(lambda.lambda2);
    let mut binom: u128 = 1;
    for i in 0..k {
        binom = binom * (n - i) / (i + 1);
    }
    let v = binom * u128::from(lambda.nu() + 1) / u128::from(lambda.lambda1 + 1);
    u64::try_from(v).expect("dimension fits in u64 for n <= 64")
}

/// Product of the party dimensions.
pub fn dim_tuple(t: &PartitionTuple) -> u64 {
    t.iter().map(dim_irrep).product()
}

/// All partitions of `n` (arbitrary number of rows), i.e. all cycle types.
pub fn cycle_types(n: u32) -> Vec<CycleType> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<CycleType>) {
        if rem == 0 {
            out.push(CycleType(cur.clone()));
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Murnaghan-Nakayama on an abacus: `beta` is a set of distinct bead
/// positions encoding the shape; each cycle removes a rim hook.
fn mn_beta(beta: &mut Vec<u32>, cycles: &[u32]) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return 1;
    };
    let mut total = 0i64;
    for idx in 0..beta.len() {
        let b = beta[idx];
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        beta[idx] = target;
        total += sign * mn_beta(beta, rest);
        beta[idx] = b;
    }
    total
}

/// Irreducible character of S_n at a cycle type (Murnaghan-Nakayama rule).
pub fn character(lambda: &TwoRowPartition, cycle: &CycleType) -> Result<i64> {
    if cycle.size() != lambda.size() {
        return invalid(format!(
            "cycle type of size {} does not match partition of size {}",
            cycle.size(),
            lambda.size()
        ));
    }
    // two rows -> beads at lambda1 + 1 and lambda2
    let mut beta = vec![lambda.lambda1 + 1, lambda.lambda2];
    Ok(mn_beta(&mut beta, cycle.parts()))
}

/// Dimension of the jointly S_n-invariant subspace of the tensor product of
/// the party irreps: `sum_c prod_i chi_i(c) / z_c`.
pub fn kron_coeff(t: &PartitionTuple) -> u64 {
    let n = t.size();
    let mut acc = Rational::zero();
    for c in cycle_types(n) {
        let prod: i64 = t
            .iter()
            .map(|p| character(p, &c).expect("sizes agree"))
            .product();
        if prod != 0 {
            acc += BigRational::from_integer(prod.into()) / c.centralizer_order();
        }
    }
    assert!(acc.is_integer(), "Kronecker coefficient {acc} is not an integer");
    acc.to_integer().to_u64().expect("nonnegative Kronecker coefficient")
}

/// Membership in the W-class support: `2*lambda2_i <= sum_j lambda2_j <= n`
/// for every party.
pub fn w_admissible(t: &PartitionTuple) -> bool {
    let s = t.second_row_sum();
    s <= t.size() && t.iter().all(|p| 2 * p.lambda2 <= s)
}

/// Shannon entropy (bits) of the reduced partition `lambda / n`.
pub fn reduced_entropy(lambda: &TwoRowPartition) -> f64 {
    let n = f64::from(lambda.size());
    [lambda.lambda1, lambda.lambda2]
        .iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let p = f64::from(x) / n;
            p * (1.0 / p).log2()
        })
        .sum()
}
