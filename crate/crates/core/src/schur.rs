//! The recursive single-party qubit Schur transform.
//!
//! A computational string `s` of `n` qubits is stored in a `u64` with `s_1`
//! as the most significant of its `n` low bits. Path sequences use the same
//! layout, so integer order on paths of equal length is lexicographic order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{rat, RadicalSum, SqrtRational};
use crate::partitions::{CycleType, TwoRowPartition};

/// Largest `n` for which [`schur_block`] will materialize a block.
pub const MAX_BLOCK_COPIES: u32 = 24;
/// Largest `n` for which [`rep_matrix`] is available.
pub const MAX_REP_COPIES: u32 = 8;

/// A Young-diagram growth sequence: `q_k = 0` adds a box to the first row,
/// `q_k = 1` to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSequence {
    len: u8,
    bits: u64,
}

impl PathSequence {
    pub fn new(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() || bits.len() > 64 {
            return invalid("path sequences have length 1..=64");
        }
        let mut p = PathSequence { len: 0, bits: 0 };
        let (mut a, mut b) = (0u32, 0u32);
        for &x in bits {
            match x {
                0 => a += 1,
                1 => b += 1,
                _ => return invalid("path sequence entries must be 0 or 1"),
            }
            if b > a {
                return invalid("path sequence leaves the two-row Young lattice");
            }
            p = p.push(x);
        }
        Ok(p)
    }

    fn push(self, bit: u8) -> Self {
        PathSequence { len: self.len + 1, bits: (self.bits << 1) | u64::from(bit) }
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `q_{k+1}` (0-based `k`).
    pub fn get(&self, k: usize) -> u8 {
        ((self.bits >> (self.len() - 1 - k)) & 1) as u8
    }

    pub fn last(&self) -> u8 {
        (self.bits & 1) as u8
    }

    /// The sequence with its last step removed.
    pub fn prefix(&self) -> PathSequence {
        PathSequence { len: self.len - 1, bits: self.bits >> 1 }
    }

    /// The packed bits, `q_1` most significant.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Terminal partition `(#zeros, #ones)`.
    pub fn shape(&self) -> TwoRowPartition {
        let ones = self.bits.count_ones();
        TwoRowPartition::new(u32::from(self.len) - ones, ones).expect("valid path")
    }
}

impl fmt::Display for PathSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            write!(f, "{}", self.get(k))?;
        }
        Ok(())
    }
}

impl FromStr for PathSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(Error::InvalidInput(format!("bad path character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        PathSequence::new(&bits)
    }
}

impl Serialize for PathSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PathSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Basis label `|lambda, omega, q>` of the Schur-Weyl basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchurLabel {
    pub lambda: TwoRowPartition,
    pub omega: u32,
    pub q: PathSequence,
}

impl SchurLabel {
    pub fn new(lambda: TwoRowPartition, omega: u32, q: PathSequence) -> Result<Self> {
        if !lambda.contains_weight(omega) {
            return invalid(format!("weight {omega} outside [{}, {}]", lambda.lambda2(), lambda.lambda1()));
        }
        if q.shape() != lambda {
            return invalid(format!("path {q} does not terminate at ({lambda})"));
        }
        Ok(SchurLabel { lambda, omega, q })
    }
}

/// Standard paths for `lambda`, in lexicographic order. Label `i` (1-based)
/// in the exported tables is position `i - 1` of this list.
pub fn standard_paths(lambda: &TwoRowPartition) -> Vec<PathSequence> {
    fn rec(l1: u32, l2: u32, a: u32, b: u32, cur: PathSequence, out: &mut Vec<PathSequence>) {
        if a == l1 && b == l2 {
            out.push(cur);
            return;
        }
        if a < l1 {
            rec(l1, l2, a + 1, b, cur.push(0), out);
        }
        if b < l2 && b < a {
            rec(l1, l2, a, b + 1, cur.push(1), out);
        }
    }
    let mut out = Vec::new();
    if lambda.size() > 0 {
        rec(lambda.lambda1(), lambda.lambda2(), 0, 0, PathSequence { len: 0, bits: 0 }, &mut out);
    }
    out
}

/// Single Clebsch-Gordan entry `Gamma^{lambda,omega}_{qn,sn}`; zero when
/// `omega` is outside the weight range.
pub(crate) fn gamma_entry(l1: u32, l2: u32, omega: u32, qn: u8, sn: u8) -> SqrtRational {
    if omega < l2 || omega > l1 {
        return SqrtRational::zero();
    }
    let (l1, l2, w) = (i64::from(l1), i64::from(l2), i64::from(omega));
    match (qn, sn) {
        (0, _) if l1 == l2 => SqrtRational::zero(),
        (0, 0) => SqrtRational::sqrt_nonneg(rat(l1 - w, l1 - l2)),
        (0, _) => SqrtRational::sqrt_nonneg(rat(w - l2, l1 - l2)),
        (_, 0) => SqrtRational::sqrt_nonneg(rat(w - l2 + 1, l1 - l2 + 2)),
        _ => -SqrtRational::sqrt_nonneg(rat(l1 - w + 1, l1 - l2 + 2)),
    }
}

/// The 2x2 matrix `Gamma^{lambda,omega}`, rows by `q_n`, columns by `s_n`.
pub fn gamma(lambda: &TwoRowPartition, omega: u32) -> Result<[[SqrtRational; 2]; 2]> {
    if !lambda.contains_weight(omega) {
        return invalid(format!("weight {omega} outside the range of ({lambda})"));
    }
    let g = |q, s| gamma_entry(lambda.lambda1(), lambda.lambda2(), omega, q, s);
    Ok([[g(0, 0), g(0, 1)], [g(1, 0), g(1, 1)]])
}

/// `B^{lambda,omega,q}_s` for packed `s` of length `q.len()`.
pub(crate) fn b_coeff_bits(q: &PathSequence, omega: u32, s: u64) -> SqrtRational {
    let n = q.len();
    if s.count_ones() != omega {
        return SqrtRational::zero();
    }
    let mut acc = SqrtRational::one();
    let (mut a, mut b, mut w) = (0u32, 0u32, 0u32);
    for k in 0..n {
        let qk = q.get(k);
        let sk = ((s >> (n - 1 - k)) & 1) as u8;
        if qk == 0 {
            a += 1;
        } else {
            b += 1;
        }
        w += u32::from(sk);
        let g = gamma_entry(a, b, w, qk, sk);
        if g.is_zero() {
            return g;
        }
        acc = &acc * &g;
    }
    acc
}

/// Transformation coefficient `<lambda, omega, q | s>`. Zero unless `s` has
/// length `n = |lambda|` and Hamming weight `omega`.
pub fn b_coeff(label: &SchurLabel, s: &[u8]) -> SqrtRational {
    if s.len() != label.q.len() || s.iter().any(|&x| x > 1) {
        return SqrtRational::zero();
    }
    let packed = s.iter().fold(0u64, |acc, &x| (acc << 1) | u64::from(x));
    b_coeff_bits(&label.q, label.omega, packed)
}

/// All nonzero `(s, B)` with `B = <lambda, omega, q | s>`, by depth-first
/// search over prefixes of `s`.
fn block_row(q: &PathSequence, omega: u32) -> Vec<(u64, SqrtRational)> {
    struct Ctx<'a> {
        q: &'a PathSequence,
        n: usize,
        omega: u32,
        out: Vec<(u64, SqrtRational)>,
    }
    fn rec(ctx: &mut Ctx<'_>, k: usize, a: u32, b: u32, w: u32, s: u64, acc: SqrtRational) {
        if k == ctx.n {
            if w == ctx.omega {
                ctx.out.push((s, acc));
            }
            return;
        }
        let qk = ctx.q.get(k);
        let (a, b) = if qk == 0 { (a + 1, b) } else { (a, b + 1) };
        let remaining = (ctx.n - k - 1) as u32;
        for sk in 0..=1u8 {
            let w2 = w + u32::from(sk);
            if w2 > ctx.omega || w2 + remaining < ctx.omega {
                continue;
            }
            let g = gamma_entry(a, b, w2, qk, sk);
            if g.is_zero() {
                continue;
            }
            rec(ctx, k + 1, a, b, w2, (s << 1) | u64::from(sk), &acc * &g);
        }
    }
    let mut ctx = Ctx { q, n: q.len(), omega, out: Vec::new() };
    rec(&mut ctx, 0, 0, 0, 0, 0, SqrtRational::one());
    ctx.out.sort_by_key(|e| e.0);
    ctx.out
}

/// The rows `<lambda, omega, q|` of the Schur transform for one `lambda`,
/// stored sparsely over computational strings.
#[derive(Clone, Debug)]
pub struct SchurBlock {
    lambda: TwoRowPartition,
    paths: Vec<PathSequence>,
    /// `(omega, path index)` per row, ordered by weight then path.
    rows: Vec<(u32, usize)>,
    entries: Vec<Vec<(u64, SqrtRational)>>,
}

impl SchurBlock {
    pub fn lambda(&self) -> TwoRowPartition {
        self.lambda
    }

    pub fn paths(&self) -> &[PathSequence] {
        &self.paths
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row_label(&self, r: usize) -> SchurLabel {
        let (omega, qi) = self.rows[r];
        SchurLabel { lambda: self.lambda, omega, q: self.paths[qi] }
    }

    /// Row index of `(omega, path index)`.
    pub fn row_index(&self, omega: u32, q_index: usize) -> Option<usize> {
        self.rows.binary_search(&(omega, q_index)).ok()
    }

    /// Nonzero entries of row `r`, sorted by `s`.
    pub fn row(&self, r: usize) -> &[(u64, SqrtRational)] {
        &self.entries[r]
    }

    /// For every computational string, the nonzero `(path index, B)` pairs.
    /// The weight of each pair is the Hamming weight of the key.
    pub fn columns(&self) -> HashMap<u64, Vec<(usize, SqrtRational)>> {
        let mut cols: HashMap<u64, Vec<(usize, SqrtRational)>> = HashMap::new();
        for (r, row) in self.entries.iter().enumerate() {
            let qi = self.rows[r].1;
            for (s, b) in row {
                cols.entry(*s).or_default().push((qi, b.clone()));
            }
        }
        cols
    }

    /// Floating-point version of [`SchurBlock::columns`].
    pub fn columns_f64(&self) -> HashMap<u64, Vec<(usize, f64)>> {
        self.columns()
            .into_iter()
            .map(|(s, v)| (s, v.into_iter().map(|(q, b)| (q, b.to_f64())).collect()))
            .collect()
    }
}

/// The full Schur-transform block for `lambda`.
pub fn schur_block(lambda: &TwoRowPartition) -> Result<SchurBlock> {
    if lambda.size() > MAX_BLOCK_COPIES {
        return Err(Error::ResourceLimit(format!(
            "schur_block supports n <= {MAX_BLOCK_COPIES}, got {}",
            lambda.size()
        )));
    }
    let paths = standard_paths(lambda);
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for omega in lambda.lambda2()..=lambda.lambda1() {
        for (qi, q) in paths.iter().enumerate() {
            rows.push((omega, qi));
            entries.push(block_row(q, omega));
        }
    }
    Ok(SchurBlock { lambda: *lambda, paths, rows, entries })
}

/// A permutation of `{0, .., n-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return invalid("not a permutation");
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Permutation(v)
    }

    /// All permutations of `n` letters in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(cur.clone())];
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation(cur.clone()));
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// Moves the letter at position `j` of a packed `n`-bit string to
    /// position `pi(j)`, i.e. `(pi.s)_k = s_{pi^-1(k)}`.
    pub fn apply_bits(&self, s: u64) -> u64 {
        let n = self.0.len();
        let mut out = 0u64;
        for (j, &pj) in self.0.iter().enumerate() {
            let bit = (s >> (n - 1 - j)) & 1;
            out |= bit << (n - 1 - pj);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut seen = vec![false; self.0.len()];
        let mut parts = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            parts.push(len);
        }
        CycleType::new(parts).expect("positive cycle lengths")
    }
}

/// Orthogonal matrix of `pi` on `[lambda]` in the path basis:
/// `B^q(pi.s) = sum_q' S_{q,q'} B^{q'}(s)`.
pub fn rep_matrix(lambda: &TwoRowPartition, pi: &Permutation) -> Result<Vec<Vec<RadicalSum>>> {
    let n = lambda.size();
    if n > MAX_REP_COPIES {
        return Err(Error::ResourceLimit(format!("rep_matrix supports n <= {MAX_REP_COPIES}")));
    }
    if pi.len() != n as usize {
        return invalid(format!("permutation of {} letters for n = {n}", pi.len()));
    }
    let block = schur_block(lambda)?;
    let omega = lambda.lambda2();
    let dim = block.paths.len();
    let cols = block.columns();
    let mut m = vec![vec![RadicalSum::zero(); dim]; dim];
    for qp in 0..dim {
        let r = block.row_index(omega, qp).expect("row exists");
        for (s, b) in block.row(r) {
            let Some(col) = cols.get(&pi.apply_bits(*s)) else { continue };
            let b = RadicalSum::from(b);
            for (q, bq) in col {
                m[*q][qp].add_product(&RadicalSum::from(bq), &b);
            }
        }
    }
    Ok(m)
}

/// Trace of a square matrix of radical sums.
pub fn trace(m: &[Vec<RadicalSum>]) -> RadicalSum {
    let mut t = RadicalSum::zero();
    for (i, row) in m.iter().enumerate() {
        t += &row[i];
    }
    t
}

/// Exact product of square matrices of radical sums.
pub fn mat_mul(a: &[Vec<RadicalSum>], b: &[Vec<RadicalSum>]) -> Vec<Vec<RadicalSum>> {
    let n = a.len();
    let mut out = vec![vec![RadicalSum::zero(); b.first().map_or(0, Vec::len)]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for (j, bkj) in bk.iter().enumerate() {
                out[i][j].add_product(&a[i][k], bkj);
            }
        }
    }
    out
}

/// Whether `m` is exactly the identity.
pub fn is_identity(m: &[Vec<RadicalSum>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| {
            if i == j {
                *x == RadicalSum::one()
            } else {
                x.is_zero()
            }
        })
    })
}

/// Exact inner product of two sparse rows.
#[cfg(test)]
pub(crate) fn sparse_dot(a: &[(u64, SqrtRational)], b: &[(u64, SqrtRational)]) -> RadicalSum {
    let mut acc = RadicalSum::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &RadicalSum::from(&(&a[i].1 * &b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;
    use crate::partitions::{character, dim_irrep, list_partitions};
    use num_traits::One;

    fn p(a: u32, b: u32) -> TwoRowPartition {
        TwoRowPartition::new(a, b).unwrap()
    }

    fn sr(sign: i8, n: i64, d: i64) -> SqrtRational {
        SqrtRational::new(sign, rat(n, d)).unwrap()
    }

    fn q(s: &str) -> PathSequence {
        s.parse().unwrap()
    }

    #[test]
    fn gamma_rows() {
        let g = gamma(&p(2, 1), 1).unwrap();
        assert_eq!(g[1], [sr(1, 1, 3), sr(-1, 2, 3)]);
        let g = gamma(&p(1, 1), 1).unwrap();
        assert_eq!(g[1], [sr(1, 1, 2), sr(-1, 1, 2)]);
        let g = gamma(&p(2, 2), 2).unwrap();
        assert_eq!(g[0], [SqrtRational::zero(), SqrtRational::zero()]);
        assert!(gamma(&p(2, 1), 3).is_err());
    }

    #[test]
    fn gamma_rows_are_orthonormal_when_defined() {
        for n in 1..=10 {
            for l in list_partitions(n) {
                for w in l.lambda2()..=l.lambda1() {
                    let g = gamma(&l, w).unwrap();
                    let norm = |r: &[SqrtRational; 2]| r[0].square() + r[1].square();
                    assert_eq!(norm(&g[1]), Rational::one());
                    if l.nu() > 0 {
                        assert_eq!(norm(&g[0]), Rational::one());
                    }
                }
            }
        }
    }

    #[test]
    fn paths() {
        assert_eq!(standard_paths(&p(2, 1)), vec![q("001"), q("010")]);
        assert_eq!(standard_paths(&p(4, 0)), vec![q("0000")]);
        assert_eq!(standard_paths(&p(2, 2)), vec![q("0011"), q("0101")]);
        assert!("10".parse::<PathSequence>().is_err());
        assert!("0110".parse::<PathSequence>().is_err());
        assert_eq!(q("0101").shape(), p(2, 2));
        for n in 1..=12 {
            for l in list_partitions(n) {
                let ps = standard_paths(&l);
                assert_eq!(ps.len() as u64, dim_irrep(&l));
                assert!(ps.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn b_examples() {
        let lab = |l, w, s: &str| SchurLabel::new(l, w, q(s)).unwrap();
        assert_eq!(b_coeff(&lab(p(1, 0), 0, "0"), &[0]), SqrtRational::one());
        assert_eq!(b_coeff(&lab(p(1, 0), 1, "0"), &[1]), SqrtRational::one());
        let singlet = lab(p(1, 1), 1, "01");
        assert_eq!(b_coeff(&singlet, &[1, 0]), sr(1, 1, 2));
        assert_eq!(b_coeff(&singlet, &[0, 1]), sr(-1, 1, 2));
        let l = lab(p(2, 1), 1, "010");
        assert_eq!(b_coeff(&l, &[1, 0, 0]), sr(1, 1, 2));
        assert_eq!(b_coeff(&l, &[0, 1, 0]), sr(-1, 1, 2));
        assert!(b_coeff(&l, &[0, 0, 1]).is_zero());
        assert!(b_coeff(&l, &[1, 1, 0]).is_zero());
    }

    #[test]
    fn small_blocks() {
        let b = schur_block(&p(1, 0)).unwrap();
        assert_eq!(b.num_rows(), 2);
        assert_eq!(b.row(0), &[(0, SqrtRational::one())]);
        assert_eq!(b.row(1), &[(1, SqrtRational::one())]);
        let b = schur_block(&p(2, 0)).unwrap();
        assert_eq!(b.row(1), &[(0b01, sr(1, 1, 2)), (0b10, sr(1, 1, 2))]);
        let b = schur_block(&p(2, 1)).unwrap();
        assert_eq!(b.num_rows(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let d = sparse_dot(b.row(i), b.row(j));
                assert_eq!(d, if i == j { RadicalSum::one() } else { RadicalSum::zero() });
            }
        }
        assert!(matches!(schur_block(&p(13, 12)), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn rep_matrix_examples() {
        let id = rep_matrix(&p(2, 1), &Permutation::identity(3)).unwrap();
        assert!(is_identity(&id));
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let m = rep_matrix(&p(1, 1), &swap).unwrap();
        assert_eq!(m, vec![vec![RadicalSum::from_rational(rat(-1, 1))]]);
        let cyc = Permutation::new(vec![1, 2, 0]).unwrap();
        let m = rep_matrix(&p(2, 1), &cyc).unwrap();
        assert_eq!(trace(&m), RadicalSum::from_rational(rat(-1, 1)));
        let c = cyc.cycle_type();
        assert_eq!(character(&p(2, 1), &c).unwrap(), -1);
    }

    #[test]
    fn permutation_basics() {
        assert_eq!(Permutation::all(4).len(), 24);
        let a = Permutation::new(vec![1, 2, 0, 3]).unwrap();
        let b = Permutation::new(vec![3, 0, 1, 2]).unwrap();
        let s = 0b1100;
        assert_eq!(a.compose(&b).apply_bits(s), a.apply_bits(b.apply_bits(s)));
        assert_eq!(a.compose(&a.inverse()), Permutation::identity(4));
        assert_eq!(a.cycle_type().parts(), &[3, 1]);
        assert!(Permutation::new(vec![0, 0]).is_err());
    }
}
