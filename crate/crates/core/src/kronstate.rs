//! W-class Kronecker states from the `F`-coefficient recurrence, their
//! normalization, single-party marginals and table export.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{int, parse_rational, rat, RadicalSum, Rational, SqrtRational};
use crate::partitions::{kron_coeff, w_admissible, PartitionTuple, TwoRowPartition};
use crate::schur::{standard_paths, PathSequence};
use crate::wstates::{w_normal_form, z_norm};

/// One path sequence per party.
pub type QTuple = Vec<PathSequence>;

/// Sparse vector in `[lambda_1] ⊗ .. ⊗ [lambda_N]`; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerVector {
    pub lambdas: PartitionTuple,
    pub coeffs: BTreeMap<QTuple, SqrtRational>,
}

impl KroneckerVector {
    pub fn empty(lambdas: PartitionTuple) -> Self {
        KroneckerVector { lambdas, coeffs: BTreeMap::new() }
    }

    pub fn get(&self, q: &[PathSequence]) -> SqrtRational {
        self.coeffs.get(q).cloned().unwrap_or_else(SqrtRational::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sq(&self) -> Rational {
        self.coeffs.values().map(SqrtRational::square).sum()
    }

    /// Entries keyed by 1-based path labels instead of path sequences.
    pub fn labeled(&self) -> BTreeMap<Vec<usize>, SqrtRational> {
        let paths: Vec<Vec<PathSequence>> = self.lambdas.iter().map(standard_paths).collect();
        self.coeffs
            .iter()
            .map(|(qs, v)| {
                let label = qs
                    .iter()
                    .zip(&paths)
                    .map(|(q, ps)| ps.binary_search(q).expect("path of the right shape") + 1)
                    .collect();
                (label, v.clone())
            })
            .collect()
    }
}

/// `F = [n - sum_i qn_i (lambda1_i + 1) - sum_i (1 - qn_i) lambda2_i]
///      / sqrt(prod_i (lambda1_i - lambda2_i + 2 qn_i))`, zero when the
/// denominator vanishes.
pub fn f_coeff(lambdas: &PartitionTuple, qn: &[u8]) -> Result<SqrtRational> {
    if qn.len() != lambdas.parties() {
        return invalid("one final path step per party is required");
    }
    let n = i64::from(lambdas.size());
    let mut num = n;
    let mut den = 1i64;
    for (lambda, &q) in lambdas.iter().zip(qn) {
        if lambda.remove_box(q).is_none() {
            return invalid(format!("cannot remove a box from row {} of ({lambda})", q + 1));
        }
        let (l1, l2) = (i64::from(lambda.lambda1()), i64::from(lambda.lambda2()));
        num -= if q == 1 { l1 + 1 } else { l2 };
        den *= l1 - l2 + 2 * i64::from(q);
    }
    if den == 0 || num == 0 {
        return Ok(SqrtRational::zero());
    }
    SqrtRational::new(num.signum() as i8, rat(num * num, den))
}

fn remove_boxes(lambdas: &PartitionTuple, qn: &[u8]) -> Option<PartitionTuple> {
    let parts = lambdas
        .iter()
        .zip(qn)
        .map(|(l, &q)| l.remove_box(q))
        .collect::<Option<Vec<TwoRowPartition>>>()?;
    PartitionTuple::new(parts).ok()
}

type Coeffs = Arc<BTreeMap<QTuple, SqrtRational>>;

/// Memo table for the recurrence, shareable across many target tuples.
#[derive(Default)]
pub struct KhatCache {
    memo: HashMap<PartitionTuple, Coeffs>,
}

impl KhatCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `K-hat_lambda`: `K_{lambda,q} = F(lambda, q_n) K_{lambda',q'}` from
    /// `K = 1` at `n = 1`, zeroed on every tuple outside the admissible set.
    pub fn khat(&mut self, lambdas: &PartitionTuple) -> KroneckerVector {
        KroneckerVector { lambdas: lambdas.clone(), coeffs: (*self.coeffs(lambdas)).clone() }
    }

    fn coeffs(&mut self, lambdas: &PartitionTuple) -> Coeffs {
        if let Some(c) = self.memo.get(lambdas) {
            return c.clone();
        }
        let parties = lambdas.parties();
        let mut out = BTreeMap::new();
        if !w_admissible(lambdas) {
            // the recurrence is only meaningful on the admissible set
        } else if lambdas.size() == 1 {
            let root = PathSequence::new(&[0]).expect("valid");
            out.insert(vec![root; parties], SqrtRational::one());
        } else {
            for mask in 0..(1u32 << parties) {
                let qn: Vec<u8> = (0..parties).map(|i| ((mask >> (parties - 1 - i)) & 1) as u8).collect();
                let Some(prev) = remove_boxes(lambdas, &qn) else { continue };
                let f = f_coeff(lambdas, &qn).expect("boxes removable");
                if f.is_zero() {
                    continue;
                }
                for (qs, v) in self.coeffs(&prev).iter() {
                    let key = qs
                        .iter()
                        .zip(&qn)
                        .map(|(q, &b)| extend(q, b))
                        .collect::<QTuple>();
                    out.insert(key, &f * v);
                }
            }
        }
        let out = Arc::new(out);
        self.memo.insert(lambdas.clone(), out.clone());
        out
    }
}

fn extend(q: &PathSequence, bit: u8) -> PathSequence {
    let mut bits: Vec<u8> = (0..q.len()).map(|k| q.get(k)).collect();
    bits.push(bit);
    PathSequence::new(&bits).expect("extension stays in the Young lattice")
}

/// `K-hat_lambda` with a fresh memo table.
pub fn khat(lambdas: &PartitionTuple) -> KroneckerVector {
    KhatCache::new().khat(lambdas)
}

/// `eta = ||K-hat||`.
pub fn eta(k: &KroneckerVector) -> SqrtRational {
    SqrtRational::sqrt(k.norm_sq()).expect("nonnegative")
}

/// Unit-norm rescaling of `k`.
pub fn normalized(k: &KroneckerVector) -> Result<KroneckerVector> {
    let e = eta(k);
    if e.is_zero() {
        return invalid("cannot normalize the zero vector");
    }
    let coeffs = k
        .coeffs
        .iter()
        .map(|(q, v)| (q.clone(), v.checked_div(&e).expect("nonzero norm")))
        .collect();
    Ok(KroneckerVector { lambdas: k.lambdas.clone(), coeffs })
}

/// Reduced density matrix of `party` over its path basis (lexicographic).
pub fn reduced_density_exact(k: &KroneckerVector, party: usize) -> Result<Vec<Vec<RadicalSum>>> {
    if party >= k.lambdas.parties() {
        return invalid(format!("party {party} out of range"));
    }
    let paths = standard_paths(&k.lambdas[party]);
    let dim = paths.len();
    let mut groups: BTreeMap<QTuple, Vec<(usize, &SqrtRational)>> = BTreeMap::new();
    for (qs, v) in &k.coeffs {
        let mut rest = qs.clone();
        let q = rest.remove(party);
        let idx = paths.binary_search(&q).expect("path of the right shape");
        groups.entry(rest).or_default().push((idx, v));
    }
    let mut rho = vec![vec![RadicalSum::zero(); dim]; dim];
    for entries in groups.values() {
        for (a, va) in entries {
            for (b, vb) in entries {
                rho[*a][*b] += &RadicalSum::from(&(*va * *vb));
            }
        }
    }
    Ok(rho)
}

/// Floating-point reduced density matrix of `party`.
pub fn reduced_density_f64(k: &KroneckerVector, party: usize) -> Result<Vec<Vec<f64>>> {
    if party >= k.lambdas.parties() {
        return invalid(format!("party {party} out of range"));
    }
    let paths = standard_paths(&k.lambdas[party]);
    let dim = paths.len();
    let mut groups: BTreeMap<QTuple, Vec<(usize, f64)>> = BTreeMap::new();
    for (qs, v) in &k.coeffs {
        let mut rest = qs.clone();
        let q = rest.remove(party);
        let idx = paths.binary_search(&q).expect("path of the right shape");
        groups.entry(rest).or_default().push((idx, v.to_f64()));
    }
    let mut rho = vec![vec![0.0; dim]; dim];
    for entries in groups.values() {
        for (a, va) in entries {
            for (b, vb) in entries {
                rho[*a][*b] += va * vb;
            }
        }
    }
    Ok(rho)
}

/// Largest `|rho_ab - delta_ab / dim|` for the marginal of `party`.
///
/// Up to `n = 5` the comparison is exact and any nonzero deviation is
/// reported through its float value; beyond that it is done in floats.
pub fn verify_lemma1(k: &KroneckerVector, party: usize) -> Result<f64> {
    let dim = standard_paths(&k.lambdas[party.min(k.lambdas.parties() - 1)]).len();
    if k.lambdas.size() <= 5 {
        let rho = reduced_density_exact(k, party)?;
        let target = RadicalSum::from_rational(Rational::one() / int(dim as i64));
        let mut worst = 0.0f64;
        for (a, row) in rho.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                let diff = if a == b { x - &target } else { x.clone() };
                if !diff.is_zero() {
                    worst = worst.max(diff.to_f64().abs().max(f64::MIN_POSITIVE));
                }
            }
        }
        return Ok(worst);
    }
    let rho = reduced_density_f64(k, party)?;
    let mut worst = 0.0f64;
    for (a, row) in rho.iter().enumerate() {
        for (b, x) in row.iter().enumerate() {
            let t = if a == b { 1.0 / dim as f64 } else { 0.0 };
            worst = worst.max((x - t).abs());
        }
    }
    Ok(worst)
}

/// `p(lambda|W) = eta^2 Z_lambda(W)` through the recurrence.
pub fn p_w_via_eta(k: &KroneckerVector) -> Rational {
    let w = w_normal_form(k.lambdas.parties()).expect("at least two parties");
    k.norm_sq() * z_norm(&w, &k.lambdas)
}

/// One coefficient of an exported table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    /// 1-based path labels, one per party.
    pub q: Vec<usize>,
    #[serde(flatten)]
    pub value: SqrtRational,
}

/// JSON coefficient table of a Kronecker state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KronTable {
    #[serde(rename = "N")]
    pub parties: usize,
    pub n: u32,
    pub lambdas: PartitionTuple,
    /// Path strings of each party in label order, keyed by 1-based party.
    pub labels: BTreeMap<String, Vec<String>>,
    pub entries: Vec<TableEntry>,
    pub eta: SqrtRational,
    pub p_w: String,
    pub kron_coeff: u64,
    pub normalized: bool,
}

/// Table for `K-hat` (unnormalized) or its normalization.
pub fn to_table(k: &KroneckerVector, normalize: bool) -> Result<KronTable> {
    let lambdas = &k.lambdas;
    let body = if normalize { normalized(k)? } else { k.clone() };
    let labels = lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| ((i + 1).to_string(), standard_paths(l).iter().map(ToString::to_string).collect()))
        .collect();
    let entries = body
        .labeled()
        .into_iter()
        .map(|(q, value)| TableEntry { q, value })
        .collect();
    Ok(KronTable {
        parties: lambdas.parties(),
        n: lambdas.size(),
        lambdas: lambdas.clone(),
        labels,
        entries,
        eta: eta(k),
        p_w: p_w_via_eta(k).to_string(),
        kron_coeff: kron_coeff(lambdas),
        normalized: normalize,
    })
}

/// Rebuilds the coefficient vector stored in a table.
pub fn from_table(t: &KronTable) -> Result<KroneckerVector> {
    if t.lambdas.parties() != t.parties || t.lambdas.size() != t.n {
        return Err(Error::InvalidInput("table header disagrees with lambdas".into()));
    }
    let paths: Vec<Vec<PathSequence>> = t.lambdas.iter().map(standard_paths).collect();
    let mut coeffs = BTreeMap::new();
    for e in &t.entries {
        if e.q.len() != t.parties {
            return invalid("entry label has the wrong number of parties");
        }
        let key = e
            .q
            .iter()
            .zip(&paths)
            .map(|(&i, ps)| {
                i.checked_sub(1)
                    .and_then(|i| ps.get(i).copied())
                    .ok_or_else(|| Error::InvalidInput(format!("label {i} out of range")))
            })
            .collect::<Result<QTuple>>()?;
        if !e.value.is_zero() {
            coeffs.insert(key, e.value.clone());
        }
    }
    Ok(KroneckerVector { lambdas: t.lambdas.clone(), coeffs })
}

/// A published coefficient table, stored as signed squared values.
#[derive(Clone, Debug)]
pub struct ReferenceTable {
    pub name: &'static str,
    pub lambdas: PartitionTuple,
    /// Whether only one representative per party-permutation orbit is listed.
    pub orbit_representatives: bool,
    pub entries: Vec<(Vec<usize>, Rational)>,
}

impl ReferenceTable {
    /// Full support, with orbit representatives expanded by permuting labels.
    pub fn expanded(&self) -> BTreeMap<Vec<usize>, Rational> {
        let mut out = BTreeMap::new();
        for (q, v) in &self.entries {
            if self.orbit_representatives {
                for perm in label_permutations(q) {
                    out.insert(perm, v.clone());
                }
            } else {
                out.insert(q.clone(), v.clone());
            }
        }
        out
    }
}

fn label_permutations(q: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut v = q.to_vec();
    v.sort_unstable();
    let mut out = BTreeSet::new();
    loop {
        out.insert(v.clone());
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { break };
        let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
        v.swap(i - 1, j);
        v[i..].reverse();
    }
    out
}

fn parse_entries(labels: &str, values: &str) -> Vec<(Vec<usize>, Rational)> {
    let ks = labels
        .split_whitespace()
        .map(|k| k.split(',').map(|x| x.parse().expect("label")).collect::<Vec<usize>>());
    let vs = values.split_whitespace().map(|v| parse_rational(v).expect("rational"));
    let out: Vec<_> = ks.zip(vs).collect();
    assert_eq!(out.len(), labels.split_whitespace().count());
    out
}

/// The published W-class coefficient tables (values are signed squares).
pub fn reference_tables() -> Vec<ReferenceTable> {
    let t = |s: &str| s.parse::<PartitionTuple>().expect("tuple");
    vec![
        ReferenceTable {
            name: "I",
            lambdas: t("2,1;2,1;2,1"),
            orbit_representatives: false,
            entries: parse_entries("1,1,1 1,2,1 2,1,1 1,1,2", "1/4 -1/4 -1/4 -1/4"),
        },
        ReferenceTable {
            name: "II",
            lambdas: t("3,1;3,1;3,1"),
            orbit_representatives: false,
            entries: parse_entries(
                "1,1,1 1,2,2 1,3,3 2,1,2 2,2,1 2,2,2 2,3,3 3,1,3 3,2,3 3,3,1 3,3,2",
                "2/9 -1/18 -1/18 -1/18 -1/18 1/9 -1/9 -1/18 -1/9 -1/18 -1/9",
            ),
        },
        ReferenceTable {
            name: "III",
            lambdas: t("3,1;3,1;2,2"),
            orbit_representatives: false,
            entries: parse_entries(
                "1,2,1 1,3,2 2,1,1 2,2,1 2,3,2 3,1,2 3,2,2 3,3,3",
                "1/6 1/6 1/6 1/12 -1/12 1/6 -1/12 -1/12",
            ),
        },
        ReferenceTable {
            name: "IV",
            lambdas: t("3,2;4,1;4,1"),
            orbit_representatives: false,
            entries: parse_entries(
                "1,1,2 1,2,1 1,2,2 1,3,3 1,4,4 2,1,3 2,2,3 2,3,1 2,3,2 2,3,3 2,4,4 3,2,3 3,3,2 \
                 3,3,3 3,4,4 4,1,4 4,2,4 4,3,4 4,4,1 4,4,2 4,4,3 5,2,4 5,3,4 5,4,2 5,4,3",
                "1/12 1/12 1/45 -1/180 -1/180 1/12 -1/180 1/12 -1/180 1/90 -1/90 1/15 1/15 \
                 1/30 -1/30 1/12 -1/180 -1/90 1/12 -1/180 -1/90 1/15 -1/30 1/15 -1/30",
            ),
        },
        ReferenceTable {
            name: "V",
            lambdas: t("3,2;3,2;4,1"),
            orbit_representatives: false,
            entries: parse_entries(
                "1,1,1 1,1,2 1,2,3 1,3,3 1,4,4 1,5,4 2,1,3 2,2,1 2,2,2 2,2,3 2,3,2 2,3,3 2,4,4 \
                 2,5,4 3,3,3 3,5,2 3,2,3 3,3,1 3,4,4 4,1,4 4,2,4 4,3,4 4,4,1 4,4,2 4,4,3 4,5,2 \
                 4,5,3 5,1,4 5,2,4 5,4,3 5,4,2 5,5,1",
                "1/30 1/18 -1/72 -1/24 -1/72 -1/24 -1/72 1/30 -1/72 1/36 -1/24 -1/48 -1/36 \
                 1/48 -1/24 -1/24 -1/48 -3/40 1/48 -1/72 -1/36 1/48 1/30 -1/72 -1/36 -1/24 \
                 1/48 -1/24 1/48 -1/24 1/48 -3/40",
            ),
        },
        ReferenceTable {
            name: "VI",
            lambdas: t("4,2;4,2;4,2"),
            orbit_representatives: true,
            entries: parse_entries(
                "1,1,1 1,2,2 1,2,3 1,3,3 1,4,4 1,4,5 1,5,5 1,6,6 1,7,7 1,7,8 1,8,8 1,9,9 2,2,2 \
                 2,2,3 2,3,3 2,4,4 2,4,5 2,4,6 2,5,5 2,5,6 2,7,7 2,7,8 2,7,9 2,8,8 2,8,9 3,4,4 \
                 3,4,5 3,4,6 3,7,7 3,7,8 3,7,9 4,4,4 4,4,5 4,4,6 4,5,5 4,5,6 4,7,7 4,7,8 4,7,9 \
                 4,8,8 4,8,9 5,7,7 5,7,8 5,7,9 6,7,7 6,7,8",
                "3/296 -1/888 -25/3996 -8/999 -1/888 -25/3996 -8/999 2/111 -1/888 -25/3996 \
                 -8/999 2/111 5/666 -5/2997 -40/2997 -5/2664 5/11988 -5/999 10/2997 10/999 \
                 -5/2664 5/11988 -5/999 10/2997 10/999 5/11988 10/2997 10/999 5/11988 10/2997 \
                 10/999 5/1332 -5/5994 -5/1998 -20/2997 5/999 -5/1332 5/5994 5/1998 20/2997 \
                 -5/999 5/5994 20/2997 -5/999 5/1998 -5/999",
            ),
        },
        ReferenceTable {
            name: "VII",
            lambdas: t("3,1;3,1;3,1;3,1"),
            orbit_representatives: true,
            entries: parse_entries(
                "1,1,1,1 1,1,2,2 1,1,3,3 1,2,2,2 1,2,3,3",
                "-1/45 1/45 1/45 2/45 -2/45",
            ),
        },
    ]
}

/// Outcome of checking a computed state against a published table.
#[derive(Clone, Debug, Serialize)]
pub struct TableComparison {
    pub name: String,
    pub lambdas: PartitionTuple,
    pub computed_entries: usize,
    pub reference_entries: usize,
    /// Sorted `|value|^2` multisets agree exactly.
    pub multiset_match: bool,
    pub support_match: bool,
    pub only_computed: Vec<Vec<usize>>,
    pub only_reference: Vec<Vec<usize>>,
    /// Shared labels whose squared magnitudes differ.
    pub magnitude_mismatches: Vec<Vec<usize>>,
    /// Shared labels with equal magnitude and opposite sign.
    pub sign_flips: Vec<Vec<usize>>,
    /// Every shared label of equal magnitude flips: an overall phase.
    pub global_sign_flip: bool,
}

/// Signed squares `sign * v^2` of a state's labeled coefficients.
pub fn signed_squares(k: &KroneckerVector) -> BTreeMap<Vec<usize>, Rational> {
    k.labeled()
        .into_iter()
        .map(|(q, v)| {
            let s = if v.sign() < 0 { -v.square() } else { v.square() };
            (q, s)
        })
        .collect()
}

/// Compares a state, after normalization, against a reference table.
pub fn compare_with_reference(k: &KroneckerVector, table: &ReferenceTable) -> TableComparison {
    let ours = signed_squares(&normalized(k).unwrap_or_else(|_| k.clone()));
    let theirs = table.expanded();
    let sorted_abs = |m: &BTreeMap<Vec<usize>, Rational>| {
        let mut v: Vec<Rational> = m.values().map(Signed::abs).collect();
        v.sort();
        v
    };
    let mut magnitude_mismatches = Vec::new();
    let mut sign_flips = Vec::new();
    let mut same_magnitude = 0;
    for (q, a) in &ours {
        if let Some(b) = theirs.get(q) {
            if a.abs() != b.abs() {
                magnitude_mismatches.push(q.clone());
                continue;
            }
            same_magnitude += 1;
            if a != b {
                sign_flips.push(q.clone());
            }
        }
    }
    let global_sign_flip = !sign_flips.is_empty() && sign_flips.len() == same_magnitude;
    TableComparison {
        name: table.name.to_string(),
        lambdas: table.lambdas.clone(),
        computed_entries: ours.len(),
        reference_entries: theirs.len(),
        multiset_match: sorted_abs(&ours) == sorted_abs(&theirs),
        support_match: ours.keys().eq(theirs.keys()),
        only_computed: ours.keys().filter(|q| !theirs.contains_key(*q)).cloned().collect(),
        only_reference: theirs.keys().filter(|q| !ours.contains_key(*q)).cloned().collect(),
        magnitude_mismatches,
        sign_flips,
        global_sign_flip,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::all_tuples;

    fn t(s: &str) -> PartitionTuple {
        s.parse().unwrap()
    }

    fn sr(sign: i8, n: i64, d: i64) -> SqrtRational {
        SqrtRational::new(sign, rat(n, d)).unwrap()
    }

    fn qs(s: &str) -> QTuple {
        s.split(',').map(|x| x.parse().unwrap()).collect()
    }

    #[test]
    fn f_examples() {
        assert!(f_coeff(&t("2,1;2,1;2,1"), &[0, 0, 0]).unwrap().is_zero());
        assert_eq!(f_coeff(&t("2,1;2,1;2,1"), &[1, 1, 1]).unwrap(), sr(-1, 4, 3));
        assert_eq!(f_coeff(&t("2,0;2,0;2,0"), &[0, 0, 0]).unwrap(), sr(1, 1, 2));
        assert!(f_coeff(&t("2,0;2,0;2,0"), &[1, 0, 0]).is_err());
    }

    #[test]
    fn khat_examples() {
        let k = khat(&t("2,0;2,0;2,0"));
        assert_eq!(k.coeffs.len(), 1);
        assert_eq!(k.get(&qs("00,00,00")), sr(1, 1, 2));
        let k = khat(&t("2,0;1,1;1,1"));
        assert_eq!(k.coeffs.len(), 1);
        assert_eq!(k.get(&qs("00,01,01")), sr(-1, 1, 2));
        let k = khat(&t("2,1;2,1;2,1"));
        assert_eq!(k.coeffs.len(), 4);
        assert_eq!(k.get(&qs("001,001,001")), sr(-1, 2, 3));
        for key in ["001,010,010", "010,001,010", "010,010,001"] {
            assert_eq!(k.get(&qs(key)), sr(1, 2, 3));
        }
        assert!(khat(&t("1,1;1,1;1,1")).is_empty());
    }

    #[test]
    fn eta_and_normalization() {
        assert_eq!(eta(&khat(&t("2,1;2,1;2,1"))), sr(1, 8, 3));
        assert_eq!(eta(&khat(&t("2,0;2,0;2,0"))), sr(1, 1, 2));
        assert!(eta(&KroneckerVector::empty(t("1,1;1,1;1,1"))).is_zero());
        let n = normalized(&khat(&t("2,1;2,1;2,1"))).unwrap();
        assert!(n.coeffs.values().all(|v| v.square() == rat(1, 4)));
        let n = normalized(&khat(&t("2,0;1,1;1,1"))).unwrap();
        assert_eq!(n.coeffs.values().next().unwrap(), &SqrtRational::from_int(-1));
        assert!(normalized(&KroneckerVector::empty(t("1,1;1,1;1,1"))).is_err());
    }

    #[test]
    fn lemma1_small() {
        for tuple in ["2,1;2,1;2,1", "2,0;2,0;2,0", "3,1;3,1;2,2"] {
            let k = normalized(&khat(&t(tuple))).unwrap();
            for party in 0..3 {
                assert_eq!(verify_lemma1(&k, party).unwrap(), 0.0, "{tuple} party {party}");
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        for (parties, max_n) in [(3, 5), (4, 3)] {
            let mut cache = KhatCache::new();
            for n in 1..=max_n {
                let total: Rational = all_tuples(parties, n)
                    .iter()
                    .map(|tuple| p_w_via_eta(&cache.khat(tuple)))
                    .sum();
                assert_eq!(total, Rational::one(), "N={parties} n={n}");
            }
        }
    }

    #[test]
    fn table_round_trip() {
        let k = khat(&t("3,1;3,1;2,2"));
        for normalize in [false, true] {
            let table = to_table(&k, normalize).unwrap();
            let json = serde_json::to_string(&table).unwrap();
            let back: KronTable = serde_json::from_str(&json).unwrap();
            assert_eq!(back, table);
            let expect = if normalize { normalized(&k).unwrap() } else { k.clone() };
            assert_eq!(from_table(&back).unwrap(), expect);
        }
        let table = to_table(&khat(&t("2,1;2,1;2,1")), true).unwrap();
        assert_eq!(table.labels["1"], vec!["001", "010"]);
        assert_eq!(table.p_w, "8/81");
        let v = serde_json::to_value(&table).unwrap();
        assert_eq!(v["entries"][0], serde_json::json!({"q": [1, 1, 1], "sign": -1, "num": 1, "den": 4}));
    }

    #[test]
    fn reference_data_is_normalized() {
        for table in reference_tables() {
            let total: Rational = table.expanded().values().map(Signed::abs).sum();
            assert_eq!(total, Rational::one(), "table {}", table.name);
        }
        let vi = &reference_tables()[5];
        assert_eq!(vi.entries.len(), 46);
        assert_eq!(vi.expanded().len(), 192);
        assert_eq!(reference_tables()[6].expanded().len(), 29);
    }
}
