//! Dense brute-force oracle and protocol simulator.
//!
//! Global basis index layout is party-major and MSB-first: with `N` parties
//! and `n` copies, party `i` copy `k` sits at position `i*n + k`, counted from
//! the most significant of the `N*n` low bits. A single copy (`n = 1`) puts
//! party 0 in the top bit, so the W state reads `100 + 010 + 001`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{RadicalSum, Rational, SqrtRational};
use crate::ghz;
use crate::kronstate::{khat, normalized, to_table, KronTable, KroneckerVector, QTuple};
use crate::partitions::{all_tuples, list_partitions, w_admissible, PartitionTuple, TwoRowPartition};
use crate::probw;
use crate::schur::{schur_block, SchurBlock};
use crate::wstates::{phi_hat, w_normal_form, WClassState, WeightTuple};

/// Largest `N*n` handled in exact mode.
pub const MAX_EXACT_QUBITS: u32 = 18;
/// Largest `N*n` handled at all.
pub const MAX_QUBITS: u32 = 24;

/// Arithmetic used for dense amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    /// Exact up to [`MAX_EXACT_QUBITS`], float beyond.
    pub fn auto(qubits: u32) -> Mode {
        if qubits <= MAX_EXACT_QUBITS {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

/// A single-copy input state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputState {
    W(WClassState),
    /// `sqrt(1-alpha)|0..0> + sqrt(alpha)|1..1>`.
    Ghz { parties: usize, alpha: Rational },
    /// `2^N` amplitudes, party 0 in the top bit; must be normalized.
    Raw { parties: usize, amplitudes: Vec<SqrtRational> },
}

impl InputState {
    pub fn ghz(parties: usize, alpha: Rational) -> Result<Self> {
        if parties < 2 || alpha < Rational::zero() || alpha > Rational::one() {
            return invalid("GHZ needs N >= 2 and alpha in [0, 1]");
        }
        Ok(InputState::Ghz { parties, alpha })
    }

    pub fn raw(amplitudes: Vec<SqrtRational>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 4 || !len.is_power_of_two() {
            return invalid("raw state needs 2^N amplitudes with N >= 2");
        }
        let norm: Rational = amplitudes.iter().map(SqrtRational::square).sum();
        if norm != Rational::one() {
            return invalid(format!("raw state has squared norm {norm}"));
        }
        Ok(InputState::Raw { parties: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn parties(&self) -> usize {
        match self {
            InputState::W(s) => s.parties(),
            InputState::Ghz { parties, .. } | InputState::Raw { parties, .. } => *parties,
        }
    }

    /// Nonzero single-copy amplitudes.
    pub fn single_copy(&self) -> Vec<(u64, SqrtRational)> {
        let n_par = self.parties();
        let mut out = Vec::new();
        match self {
            InputState::W(s) => {
                out.push((0, s.amplitude(0)));
                for i in 0..n_par {
                    out.push((1u64 << (n_par - 1 - i), s.amplitude(i + 1)));
                }
            }
            InputState::Ghz { alpha, .. } => {
                let one = Rational::one();
                out.push((0, SqrtRational::sqrt(one - alpha).expect("alpha <= 1")));
                out.push(((1u64 << n_par) - 1, SqrtRational::sqrt(alpha.clone()).expect("alpha >= 0")));
            }
            InputState::Raw { amplitudes, .. } => {
                out.extend(amplitudes.iter().enumerate().map(|(i, a)| (i as u64, a.clone())));
            }
        }
        out.retain(|(_, a)| !a.is_zero());
        out.sort_by_key(|(i, _)| *i);
        out
    }
}

/// Nonzero amplitudes of `psi^{⊗n}`, sorted by index.
#[derive(Clone, Debug, PartialEq)]
pub enum Amplitudes {
    Exact(Vec<(u64, SqrtRational)>),
    Float(Vec<(u64, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub parties: usize,
    pub copies: u32,
    pub amplitudes: Amplitudes,
}

impl DenseState {
    pub fn mode(&self) -> Mode {
        match self.amplitudes {
            Amplitudes::Exact(_) => Mode::Exact,
            Amplitudes::Float(_) => Mode::Float,
        }
    }

    pub fn num_nonzero(&self) -> usize {
        match &self.amplitudes {
            Amplitudes::Exact(v) => v.len(),
            Amplitudes::Float(v) => v.len(),
        }
    }

    /// Party `i`'s `n`-bit string inside a global index.
    fn party_bits(&self, index: u64, party: usize) -> u64 {
        let n = self.copies as usize;
        (index >> ((self.parties - 1 - party) * n)) & ((1u64 << n) - 1)
    }
}

/// Moves copy-major bits (copy `k`, party `i`) to the party-major layout.
fn interleave(single: &[u64], parties: usize) -> u64 {
    let n = single.len();
    let mut out = 0u64;
    for (k, &u) in single.iter().enumerate() {
        for i in 0..parties {
            if (u >> (parties - 1 - i)) & 1 == 1 {
                out |= 1u64 << ((parties - 1 - i) * n + (n - 1 - k));
            }
        }
    }
    out
}

/// `psi^{⊗n}` in the mode chosen by [`Mode::auto`].
pub fn tensor_power(state: &InputState, n: u32) -> Result<DenseState> {
    let qubits = state.parties() as u32 * n;
    tensor_power_mode(state, n, Mode::auto(qubits))
}

pub fn tensor_power_mode(state: &InputState, n: u32, mode: Mode) -> Result<DenseState> {
    let parties = state.parties();
    let qubits = parties as u32 * n;
    if n == 0 {
        return invalid("need at least one copy");
    }
    if qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("N*n = {qubits} exceeds {MAX_QUBITS}")));
    }
    if mode == Mode::Exact && qubits > MAX_EXACT_QUBITS {
        return Err(Error::ResourceLimit(format!("exact mode needs N*n <= {MAX_EXACT_QUBITS}")));
    }
    let single = state.single_copy();
    let total = single.len().pow(n);
    let mut digits = vec![0usize; n as usize];
    let mut idx = vec![0u64; n as usize];
    let mut exact = Vec::new();
    let mut float = Vec::new();
    for mut code in 0..total {
        for d in digits.iter_mut().rev() {
            *d = code % single.len();
            code /= single.len();
        }
        for (slot, &d) in idx.iter_mut().zip(&digits) {
            *slot = single[d].0;
        }
        let index = interleave(&idx, parties);
        match mode {
            Mode::Exact => {
                let amp = digits.iter().fold(SqrtRational::one(), |acc, &d| &acc * &single[d].1);
                exact.push((index, amp));
            }
            Mode::Float => {
                float.push((index, digits.iter().map(|&d| single[d].1.to_f64()).product::<f64>()));
            }
        }
    }
    let amplitudes = match mode {
        Mode::Exact => {
            exact.sort_by_key(|(i, _)| *i);
            Amplitudes::Exact(exact)
        }
        Mode::Float => {
            float.sort_by_key(|(i, _)| *i);
            Amplitudes::Float(float)
        }
    };
    Ok(DenseState { parties, copies: n, amplitudes })
}

/// Row and column label of one sector-block entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorKey {
    pub omega: WeightTuple,
    /// 0-based positions in `standard_paths` per party.
    pub q: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SectorEntries {
    Exact(BTreeMap<SectorKey, RadicalSum>),
    Float(BTreeMap<SectorKey, f64>),
}

/// Projection of `psi^{⊗n}` onto one sector, as a matrix from joint weights
/// to joint paths. Zero entries are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBlock {
    pub lambdas: PartitionTuple,
    pub entries: SectorEntries,
}

impl SectorBlock {
    pub fn is_empty(&self) -> bool {
        match &self.entries {
            SectorEntries::Exact(m) => m.is_empty(),
            SectorEntries::Float(m) => m.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match &self.entries {
            SectorEntries::Exact(m) => m.len(),
            SectorEntries::Float(m) => m.len(),
        }
    }

    /// Exact sector probability; `None` in float mode.
    pub fn norm_sq(&self) -> Option<Rational> {
        match &self.entries {
            SectorEntries::Exact(m) => {
                let mut acc = RadicalSum::zero();
                for v in m.values() {
                    acc += &v.square();
                }
                acc.to_rational()
            }
            SectorEntries::Float(_) => None,
        }
    }

    pub fn norm_sq_f64(&self) -> f64 {
        self.float_entries().values().map(|v| v * v).sum()
    }

    pub fn float_entries(&self) -> BTreeMap<SectorKey, f64> {
        match &self.entries {
            SectorEntries::Exact(m) => m.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
            SectorEntries::Float(m) => m.clone(),
        }
    }

    /// Path sequences for a column label.
    pub fn q_tuple(&self, q: &[usize]) -> QTuple {
        self.lambdas
            .iter()
            .zip(q)
            .map(|(l, &i)| crate::schur::standard_paths(l)[i])
            .collect()
    }

    /// Dense float matrix with its row (weight) and column (path) labels.
    pub fn matrix(&self) -> (Vec<WeightTuple>, Vec<Vec<usize>>, DMatrix<f64>) {
        let entries = self.float_entries();
        let mut rows: Vec<WeightTuple> = entries.keys().map(|k| k.omega.clone()).collect();
        rows.sort();
        rows.dedup();
        let mut cols: Vec<Vec<usize>> = entries.keys().map(|k| k.q.clone()).collect();
        cols.sort();
        cols.dedup();
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (k, v) in entries {
            let r = rows.binary_search(&k.omega).expect("row label");
            let c = cols.binary_search(&k.q).expect("column label");
            m[(r, c)] = v;
        }
        (rows, cols, m)
    }

    /// Exact Gram matrix `G = M M^T / |M|^2` over weight rows.
    pub fn gram_exact(&self) -> Option<(Vec<WeightTuple>, Vec<Vec<RadicalSum>>)> {
        let SectorEntries::Exact(m) = &self.entries else {
            return None;
        };
        let norm = self.norm_sq()?;
        if norm.is_zero() {
            return None;
        }
        let mut rows: Vec<WeightTuple> = m.keys().map(|k| k.omega.clone()).collect();
        rows.sort();
        rows.dedup();
        let mut by_q: BTreeMap<&Vec<usize>, Vec<(usize, &RadicalSum)>> = BTreeMap::new();
        for (k, v) in m {
            by_q.entry(&k.q).or_default().push((rows.binary_search(&k.omega).expect("row"), v));
        }
        let mut g = vec![vec![RadicalSum::zero(); rows.len()]; rows.len()];
        for col in by_q.values() {
            for (a, va) in col {
                for (b, vb) in col {
                    g[*a][*b].add_product(va, vb);
                }
            }
        }
        let inv = Rational::one() / norm;
        let g = g.into_iter().map(|row| row.into_iter().map(|x| x.scale(&inv)).collect()).collect();
        Some((rows, g))
    }
}

struct Columns {
    exact: HashMap<u64, Vec<(usize, SqrtRational)>>,
    float: HashMap<u64, Vec<(usize, f64)>>,
}

fn columns_for(block: &SchurBlock, mode: Mode) -> Columns {
    match mode {
        Mode::Exact => Columns { exact: block.columns(), float: HashMap::new() },
        Mode::Float => Columns { exact: HashMap::new(), float: block.columns_f64() },
    }
}

fn project(state: &DenseState, lambdas: &PartitionTuple, cols: &[&Columns]) -> SectorBlock {
    let parties = state.parties;
    match &state.amplitudes {
        Amplitudes::Exact(amps) => {
            let mut acc: BTreeMap<SectorKey, RadicalSum> = BTreeMap::new();
            for (index, amp) in amps {
                let strings: Vec<u64> = (0..parties).map(|i| state.party_bits(*index, i)).collect();
                let lists: Option<Vec<&Vec<(usize, SqrtRational)>>> =
                    strings.iter().zip(cols).map(|(s, c)| c.exact.get(s)).collect();
                let Some(lists) = lists else { continue };
                let omega = WeightTuple(strings.iter().map(|s| s.count_ones()).collect());
                for_each_choice(&lists, |choice| {
                    let mut v = amp.clone();
                    for (list, &j) in lists.iter().zip(choice) {
                        v = &v * &list[j].1;
                    }
                    let q = lists.iter().zip(choice).map(|(list, &j)| list[j].0).collect();
                    *acc.entry(SectorKey { omega: omega.clone(), q }).or_insert_with(RadicalSum::zero) +=
                        &RadicalSum::from(&v);
                });
            }
            acc.retain(|_, v| !v.is_zero());
            SectorBlock { lambdas: lambdas.clone(), entries: SectorEntries::Exact(acc) }
        }
        Amplitudes::Float(amps) => {
            let mut acc: BTreeMap<SectorKey, f64> = BTreeMap::new();
            for (index, amp) in amps {
                let strings: Vec<u64> = (0..parties).map(|i| state.party_bits(*index, i)).collect();
                let lists: Option<Vec<&Vec<(usize, f64)>>> =
                    strings.iter().zip(cols).map(|(s, c)| c.float.get(s)).collect();
                let Some(lists) = lists else { continue };
                let omega = WeightTuple(strings.iter().map(|s| s.count_ones()).collect());
                for_each_choice(&lists, |choice| {
                    let v = lists.iter().zip(choice).fold(*amp, |a, (list, &j)| a * list[j].1);
                    let q = lists.iter().zip(choice).map(|(list, &j)| list[j].0).collect();
                    *acc.entry(SectorKey { omega: omega.clone(), q }).or_insert(0.0) += v;
                });
            }
            acc.retain(|_, v| v.abs() > 1e-14);
            SectorBlock { lambdas: lambdas.clone(), entries: SectorEntries::Float(acc) }
        }
    }
}

fn for_each_choice<T>(lists: &[&Vec<T>], mut f: impl FnMut(&[usize])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut choice = vec![0usize; lists.len()];
    loop {
        f(&choice);
        let mut i = 0;
        while i < lists.len() {
            choice[i] += 1;
            if choice[i] < lists[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == lists.len() {
            return;
        }
    }
}

/// The projection of `state` onto a single sector.
pub fn sector_block(state: &DenseState, lambdas: &PartitionTuple) -> Result<SectorBlock> {
    if lambdas.parties() != state.parties || lambdas.size() != state.copies {
        return invalid("partition tuple does not match the state's shape");
    }
    let mode = state.mode();
    let mut cache: HashMap<TwoRowPartition, Columns> = HashMap::new();
    for l in lambdas.iter() {
        if !cache.contains_key(l) {
            cache.insert(*l, columns_for(&schur_block(l)?, mode));
        }
    }
    let cols: Vec<&Columns> = lambdas.iter().map(|l| &cache[l]).collect();
    Ok(project(state, lambdas, &cols))
}

/// All nonzero sectors of `state`.
pub fn multilocal_schur(state: &DenseState) -> Result<BTreeMap<PartitionTuple, SectorBlock>> {
    let mode = state.mode();
    let mut cache: HashMap<TwoRowPartition, Columns> = HashMap::new();
    for l in list_partitions(state.copies) {
        cache.insert(l, columns_for(&schur_block(&l)?, mode));
    }
    let out = all_tuples(state.parties, state.copies)
        .into_par_iter()
        .map(|t| {
            let cols: Vec<&Columns> = t.iter().map(|l| &cache[l]).collect();
            project(state, &t, &cols)
        })
        .filter(|b| !b.is_empty())
        .map(|b| (b.lambdas.clone(), b))
        .collect();
    Ok(out)
}

/// Singular values of the weight-by-path matrix, normalized to unit square sum.
pub fn residual_schmidt(b: &SectorBlock) -> Result<Vec<f64>> {
    Ok(residual_factor(b)?.0)
}

/// Normalized singular values and the leading path-side singular vector.
pub fn residual_factor(b: &SectorBlock) -> Result<(Vec<f64>, BTreeMap<Vec<usize>, f64>)> {
    if b.is_empty() {
        return invalid(format!("sector {} is zero", b.lambdas));
    }
    let (_, cols, m) = b.matrix();
    let svd = m.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &c| svd.singular_values[c].total_cmp(&svd.singular_values[a]));
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum::<f64>().sqrt();
    let values = order.iter().map(|&i| svd.singular_values[i] / total).collect();
    let top = order[0];
    let factor = cols.into_iter().enumerate().map(|(c, q)| (q, v_t[(top, c)])).collect();
    Ok((values, factor))
}

/// `|<u, khat>| / (|u| |khat|)` for a path-side vector from [`residual_factor`].
pub fn alignment(factor: &BTreeMap<Vec<usize>, f64>, k: &KroneckerVector) -> f64 {
    let labeled = k.labeled();
    let mut dot = 0.0;
    for (q, v) in factor {
        let label: Vec<usize> = q.iter().map(|i| i + 1).collect();
        if let Some(x) = labeled.get(&label) {
            dot += v * x.to_f64();
        }
    }
    let nu: f64 = factor.values().map(|v| v * v).sum::<f64>().sqrt();
    let nk = crate::exact::rational_to_f64(&k.norm_sq()).sqrt();
    (dot / (nu * nk)).abs()
}

/// Kronecker vector read off the rank-one sector of `W^{⊗n}`, scaled so the
/// weight-side factor is exactly `phi_hat(W)`.
pub fn oracle_khat(lambdas: &PartitionTuple) -> Result<KroneckerVector> {
    oracle_khat_for(&w_normal_form(lambdas.parties())?, lambdas)
}

/// As [`oracle_khat`], from any W-class state.
pub fn oracle_khat_for(state: &WClassState, lambdas: &PartitionTuple) -> Result<KroneckerVector> {
    if state.parties() != lambdas.parties() {
        return invalid("state and partition tuple disagree on the number of parties");
    }
    let dense = tensor_power_mode(&InputState::W(state.clone()), lambdas.size(), Mode::Exact)?;
    let block = sector_block(&dense, lambdas)?;
    factor_block(&block, state)
}

fn factor_block(block: &SectorBlock, state: &WClassState) -> Result<KroneckerVector> {
    let lambdas = &block.lambdas;
    let SectorEntries::Exact(m) = &block.entries else {
        return invalid("oracle factorization needs an exact block");
    };
    let phi = phi_hat(state, lambdas);
    let mismatch = |what: String| Error::Inconsistency(format!("sector {lambdas}: {what}"));
    let Some((omega_star, phi_star)) = phi.coeffs.iter().find(|(_, v)| !v.is_zero()) else {
        if m.is_empty() {
            return Ok(KroneckerVector::empty(lambdas.clone()));
        }
        return Err(mismatch("block is nonzero where phi_hat vanishes".into()));
    };
    let inv = SqrtRational::one().checked_div(phi_star).expect("nonzero");
    let mut coeffs = BTreeMap::new();
    for (key, v) in m.range(SectorKey { omega: omega_star.clone(), q: vec![] }..) {
        if &key.omega != omega_star {
            break;
        }
        let k = v
            .mul_sqrt(&inv)
            .to_sqrt_rational()
            .ok_or_else(|| mismatch(format!("entry {:?} is not a single radical", key.q)))?;
        coeffs.insert(block.q_tuple(&key.q), k);
    }
    let kv = KroneckerVector { lambdas: lambdas.clone(), coeffs };
    let support = phi.coeffs.values().filter(|v| !v.is_zero()).count();
    if support * kv.len() != m.len() {
        return Err(mismatch(format!("block has {} entries, expected {}", m.len(), support * kv.len())));
    }
    for (key, v) in m {
        let expected = &phi.get(&key.omega) * &kv.get(&block.q_tuple(&key.q));
        if RadicalSum::from(&expected) != *v {
            return Err(mismatch(format!("block is not rank one at {:?}", key)));
        }
    }
    Ok(kv)
}

/// One exact sector probability per outcome, in tuple order.
#[derive(Clone, Debug)]
pub enum Distribution {
    Exact(Vec<(PartitionTuple, Rational)>),
    Float(Vec<(PartitionTuple, f64)>),
}

impl Distribution {
    pub fn outcomes(&self) -> Vec<&PartitionTuple> {
        match self {
            Distribution::Exact(v) => v.iter().map(|(t, _)| t).collect(),
            Distribution::Float(v) => v.iter().map(|(t, _)| t).collect(),
        }
    }

    pub fn probability_f64(&self, t: &PartitionTuple) -> f64 {
        match self {
            Distribution::Exact(v) => {
                v.iter().find(|(u, _)| u == t).map_or(0.0, |(_, p)| crate::exact::rational_to_f64(p))
            }
            Distribution::Float(v) => v.iter().find(|(u, _)| u == t).map_or(0.0, |(_, p)| *p),
        }
    }

    /// Inverse CDF at the uniform variate `u / 2^64`.
    fn draw(&self, u: u64) -> PartitionTuple {
        match self {
            Distribution::Exact(v) => {
                let scaled = BigInt::from(u);
                let two64 = BigInt::from(1u8) << 64;
                let mut cum = Rational::zero();
                for (t, p) in v {
                    cum += p;
                    if &scaled * cum.denom() < cum.numer() * &two64 {
                        return t.clone();
                    }
                }
                v.iter().rev().find(|(_, p)| !p.is_zero()).expect("nonempty").0.clone()
            }
            Distribution::Float(v) => {
                let x = u as f64 / 2f64.powi(64);
                let mut cum = 0.0;
                for (t, p) in v {
                    cum += p;
                    if x < cum {
                        return t.clone();
                    }
                }
                v.iter().rev().find(|(_, p)| *p > 0.0).expect("nonempty").0.clone()
            }
        }
    }
}

/// Sector probabilities of `psi^{⊗n}`: closed form for W-class inputs,
/// dense oracle norms otherwise.
pub fn distribution(state: &InputState, n: u32) -> Result<Distribution> {
    match state {
        InputState::W(s) if s.weights()[1..].iter().filter(|c| !c.is_zero()).count() >= 2 => {
            Ok(Distribution::Exact(probw::distribution_psi(s, n)?.into_iter().filter(|(_, p)| !p.is_zero()).collect()))
        }
        _ => {
            let dense = tensor_power(state, n)?;
            let sectors = multilocal_schur(&dense)?;
            Ok(match dense.mode() {
                Mode::Exact => Distribution::Exact(
                    sectors
                        .into_iter()
                        .map(|(t, b)| {
                            let p = b.norm_sq().ok_or_else(|| {
                                Error::Inconsistency(format!("sector {t} has an irrational norm"))
                            })?;
                            Ok((t, p))
                        })
                        .collect::<Result<_>>()?,
                ),
                Mode::Float => Distribution::Float(sectors.into_iter().map(|(t, b)| (t, b.norm_sq_f64())).collect()),
            })
        }
    }
}

/// What is left after the measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Concentrated {
    /// The normalized W-class Kronecker state.
    Kronecker { table: KronTable },
    /// Residual Schmidt spectrum between weight and path sides.
    Residual { schmidt: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub lambdas: PartitionTuple,
    pub probability: f64,
    pub state: Concentrated,
}

/// `runs` outcomes drawn from one ChaCha8 stream seeded with `seed`.
pub fn sample_many(state: &InputState, n: u32, seed: u64, runs: usize) -> Result<Vec<PartitionTuple>> {
    let dist = distribution(state, n)?;
    Ok(sample_from(&dist, seed, runs))
}

pub fn sample_from(dist: &Distribution, seed: u64, runs: usize) -> Vec<PartitionTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..runs).map(|_| dist.draw(rng.next_u64())).collect()
}

/// One protocol run: measure the sector and describe the post-measurement state.
pub fn sample_run(state: &InputState, n: u32, seed: u64) -> Result<SampleOutcome> {
    let dist = distribution(state, n)?;
    let lambdas = sample_from(&dist, seed, 1).remove(0);
    let probability = dist.probability_f64(&lambdas);
    let concentrated = match state {
        InputState::W(_) if w_admissible(&lambdas) => {
            Concentrated::Kronecker { table: to_table(&normalized(&khat(&lambdas))?, true)? }
        }
        InputState::Ghz { alpha, .. } if alpha.is_positive() && *alpha < Rational::one() => {
            let g = ghz::gram(&lambdas, alpha)?;
            Concentrated::Residual { schmidt: ghz::schmidt_spectrum(&g)? }
        }
        _ => {
            let dense = tensor_power(state, n)?;
            Concentrated::Residual { schmidt: residual_schmidt(&sector_block(&dense, &lambdas)?)? }
        }
    };
    Ok(SampleOutcome { lambdas, probability, state: concentrated })
}

/// Von Neumann entropy (bits) of one party's single-copy marginal.
pub fn marginal_entropy(state: &InputState, party: usize) -> Result<f64> {
    let n_par = state.parties();
    if party >= n_par {
        return invalid(format!("party {party} out of range for N = {n_par}"));
    }
    let shift = n_par - 1 - party;
    let amps: HashMap<u64, f64> = state.single_copy().into_iter().map(|(i, a)| (i, a.to_f64())).collect();
    let mut rho = [[0.0f64; 2]; 2];
    for (&i, &a) in &amps {
        let bi = ((i >> shift) & 1) as usize;
        for bj in 0..2usize {
            let j = (i & !(1 << shift)) | ((bj as u64) << shift);
            if let Some(&b) = amps.get(&j) {
                rho[bi][bj] += a * b;
            }
        }
    }
    let eig = crate::exact::sym_eig(&[rho[0].to_vec(), rho[1].to_vec()])?;
    Ok(eig.into_iter().filter(|&p| p > 1e-15).map(|p| p * (1.0 / p).log2()).sum())
}

/// Sample mean of `H(lambda_party / n)`.
pub fn mean_reduced_entropy(outcomes: &[PartitionTuple], party: usize) -> f64 {
    let total: f64 = outcomes.iter().map(|t| crate::partitions::reduced_entropy(&t.parts()[party])).sum();
    total / outcomes.len().max(1) as f64
}
