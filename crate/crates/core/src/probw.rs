//! Sector probabilities of W-class tensor powers from joint-weight counting.
//!
//! For W sequence pairs `(s, s')` each copy position carries a pair of
//! excited parties `(a, b)`; `Q[a][b]` counts them. With equal weights on
//! both sides, party `i` sees `theta_11 = Q[i][i] = omega_i - x_i` and the
//! off-diagonal row and column sums of `Q` both equal `x_i`.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exact::{factorial, int, rational_pow, Rational};
use crate::ghz::{louck, JointWeight};
use crate::partitions::{all_tuples, dim_tuple, w_admissible, PartitionTuple};
use crate::wstates::{uniform_weight, w_normal_form, z_norm, WClassState};

/// Pair-count matrix of a W joint sequence: `Q[a][b]` positions where the
/// first sequence excites party `a` and the second party `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QTensor(pub Vec<Vec<u32>>);

impl QTensor {
    /// The per-party joint weights determined by `Q`.
    pub fn thetas(&self) -> Vec<JointWeight> {
        let n_par = self.0.len();
        let n: u32 = self.0.iter().flatten().sum();
        (0..n_par)
            .map(|i| {
                let t11 = self.0[i][i];
                let t10: u32 = (0..n_par).filter(|&b| b != i).map(|b| self.0[i][b]).sum();
                let t01: u32 = (0..n_par).filter(|&a| a != i).map(|a| self.0[a][i]).sum();
                JointWeight { theta: [[n - t11 - t10 - t01, t01], [t10, t11]] }
            })
            .collect()
    }
}

fn weights_and_x(thetas: &[JointWeight]) -> Result<(u32, Vec<u32>, Vec<u32>)> {
    let Some(first) = thetas.first() else {
        return invalid("no parties");
    };
    let n = first.n();
    let mut omega = Vec::with_capacity(thetas.len());
    let mut x = Vec::with_capacity(thetas.len());
    for th in thetas {
        if th.n() != n || th.omega() != th.omega_p() {
            return invalid("joint weights must share n and have equal margins");
        }
        omega.push(th.omega());
        x.push(th.x());
    }
    if omega.iter().sum::<u32>() != n {
        return invalid("W sequences need weights summing to n");
    }
    Ok((n, omega, x))
}

/// Visits every zero-diagonal matrix with the given off-diagonal row and
/// column sums, in row-major order.
fn for_each_offdiag(rows: &[u32], cols: &[u32], mut f: impl FnMut(&[Vec<u32>])) {
    fn rec(
        i: usize,
        j: usize,
        row_left: u32,
        rows: &[u32],
        cols: &mut Vec<u32>,
        m: &mut Vec<Vec<u32>>,
        f: &mut dyn FnMut(&[Vec<u32>]),
    ) {
        let n = rows.len();
        if i == n {
            if cols.iter().all(|&c| c == 0) {
                f(m);
            }
            return;
        }
        if j == n {
            if row_left == 0 {
                let next = if i + 1 < n { rows[i + 1] } else { 0 };
                rec(i + 1, 0, next, rows, cols, m, f);
            }
            return;
        }
        if j == i {
            return rec(i, j + 1, row_left, rows, cols, m, f);
        }
        let cap = row_left.min(cols[j]);
        for v in 0..=cap {
            m[i][j] = v;
            cols[j] -= v;
            rec(i, j + 1, row_left - v, rows, cols, m, f);
            cols[j] += v;
        }
        m[i][j] = 0;
    }
    let n = rows.len();
    if n == 0 {
        return;
    }
    let mut m = vec![vec![0; n]; n];
    let mut cols = cols.to_vec();
    rec(0, 0, rows[0], rows, &mut cols, &mut m, &mut f);
}

/// All `Q` compatible with weights `omega` and parameters `x`.
pub fn q_solutions(omega: &[u32], x: &[u32]) -> Vec<QTensor> {
    let mut out = Vec::new();
    if omega.iter().zip(x).any(|(w, x)| x > w) {
        return out;
    }
    for_each_offdiag(x, x, |m| {
        let mut q = m.to_vec();
        for i in 0..omega.len() {
            q[i][i] = omega[i] - x[i];
        }
        out.push(QTensor(q));
    });
    out
}

fn z_from(n: u32, omega: &[u32], x: &[u32]) -> BigUint {
    if omega.iter().zip(x).any(|(w, x)| x > w || w + x > n) {
        return BigUint::zero();
    }
    let nf = factorial(u64::from(n));
    let mut total = BigUint::zero();
    let diag: BigUint = omega.iter().zip(x).map(|(w, x)| factorial(u64::from(w - x))).product();
    for_each_offdiag(x, x, |m| {
        let d: BigUint = m.iter().flatten().map(|&v| factorial(u64::from(v))).product();
        total += &nf / (&diag * d);
    });
    total
}

/// `Z(Theta, omega)`: number of W sequence pairs with per-party joint
/// weights `thetas`, by direct enumeration of `Q`.
pub fn z_count(thetas: &[JointWeight]) -> Result<BigUint> {
    let (n, omega, x) = weights_and_x(thetas)?;
    Ok(z_from(n, &omega, &x))
}

/// The same count as the constant term of
/// `n! prod_i [(sum_{k != i} z_k) / z_i]^{x_i} / ((omega_i - x_i)! x_i!)`.
pub fn z_count_ct(thetas: &[JointWeight]) -> Result<BigUint> {
    let (n, omega, x) = weights_and_x(thetas)?;
    let parties = omega.len();
    if omega.iter().zip(&x).any(|(w, x)| x > w) {
        return Ok(BigUint::zero());
    }
    // Laurent polynomial: exponent vector -> integer coefficient
    let mut poly: HashMap<Vec<i32>, BigInt> = HashMap::new();
    poly.insert(vec![0; parties], BigInt::one());
    for i in 0..parties {
        for _ in 0..x[i] {
            let mut next: HashMap<Vec<i32>, BigInt> = HashMap::new();
            for (exps, c) in &poly {
                for k in (0..parties).filter(|&k| k != i) {
                    let mut e = exps.clone();
                    e[k] += 1;
                    e[i] -= 1;
                    *next.entry(e).or_default() += c;
                }
            }
            poly = next;
        }
    }
    let ct = poly.get(&vec![0; parties]).cloned().unwrap_or_default();
    let denom: BigUint = omega
        .iter()
        .zip(&x)
        .map(|(w, x)| factorial(u64::from(w - x)) * factorial(u64::from(*x)))
        .product();
    let total = BigInt::from(factorial(u64::from(n))) * ct;
    let (q, r) = (&total / BigInt::from(denom.clone()), &total % BigInt::from(denom));
    if !r.is_zero() {
        return Err(Error::Inconsistency("constant-term count is not an integer".into()));
    }
    Ok(q.to_biguint().expect("nonnegative count"))
}

/// Memoized `Z` values for a fixed `n`, keyed up to party permutation.
#[derive(Default)]
pub struct ZTable {
    cache: RwLock<HashMap<Vec<(u32, u32)>, Rational>>,
}

impl ZTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, n: u32, omega: &[u32], x: &[u32]) -> Rational {
        let mut key: Vec<(u32, u32)> = omega.iter().copied().zip(x.iter().copied()).collect();
        key.sort_unstable();
        if let Some(v) = self.cache.read().expect("lock").get(&key) {
            return v.clone();
        }
        let v = Rational::from_integer(BigInt::from(z_from(n, omega, x)));
        self.cache.write().expect("lock").insert(key, v.clone());
        v
    }
}

/// Weight tuples with `sum omega_i = n` inside every party's range.
fn w_weights(lambdas: &PartitionTuple) -> Vec<Vec<u32>> {
    crate::wstates::weight_lattice(lambdas, lambdas.size())
        .into_iter()
        .filter(|w| w.total() == lambdas.size())
        .map(|w| w.0)
        .collect()
}

/// `p(lambda|W) = N^{-n} f_lambda sum_omega sum_Theta Z(Theta, omega) prod_i C`.
pub fn p_w(lambdas: &PartitionTuple) -> Rational {
    p_w_with(&ZTable::new(), lambdas)
}

/// [`p_w`] with a shared `Z` table.
pub fn p_w_with(table: &ZTable, lambdas: &PartitionTuple) -> Rational {
    let n = lambdas.size();
    let parties = lambdas.parties();
    // diagonal Louck values C^{lambda_i}_{omega,omega}(x), rational
    let louck_diag: Vec<Vec<Vec<Rational>>> = lambdas
        .iter()
        .map(|l| {
            (0..=n)
                .map(|w| {
                    if !l.contains_weight(w) {
                        return vec![];
                    }
                    (0..=w.min(n - w))
                        .map(|x| {
                            let th = JointWeight::new(n, w, w, x).expect("feasible");
                            louck(l, &th).expect("compatible").to_rational().expect("diagonal Louck values are rational")
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut total = Rational::zero();
    for omega in w_weights(lambdas) {
        let ranges: Vec<u32> = omega.iter().map(|&w| w.min(n - w)).collect();
        let mut x = vec![0u32; parties];
        loop {
            let c: Rational = (0..parties).map(|i| &louck_diag[i][omega[i] as usize][x[i] as usize]).product();
            if !c.is_zero() {
                let z = table.get(n, &omega, &x);
                if !z.is_zero() {
                    total += z * c;
                }
            }
            // odometer over x
            let mut i = 0;
            while i < parties {
                if x[i] < ranges[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == parties {
                break;
            }
        }
    }
    let f = int(dim_tuple(lambdas) as i64);
    total * f * rational_pow(&uniform_weight(parties), u64::from(n))
}

/// `p(lambda|W)` for every partition tuple, in [`all_tuples`] order.
pub fn distribution_w(parties: usize, n: u32) -> Vec<(PartitionTuple, Rational)> {
    let table = ZTable::new();
    all_tuples(parties, n)
        .into_par_iter()
        .map(|t| {
            let p = if w_admissible(&t) { p_w_with(&table, &t) } else { Rational::zero() };
            (t, p)
        })
        .collect()
}

/// Most likely outcome for the W state (ties broken by tuple order).
pub fn mode_w(parties: usize, n: u32) -> (PartitionTuple, Rational) {
    distribution_w(parties, n)
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one tuple")
}

/// `p(lambda|psi) = eta^2 Z_lambda(psi)` with `eta^2 = p(lambda|W) / Z_lambda(W)`.
pub fn p_psi(state: &WClassState, lambdas: &PartitionTuple) -> Result<Rational> {
    p_psi_with(&ZTable::new(), state, lambdas)
}

pub fn p_psi_with(table: &ZTable, state: &WClassState, lambdas: &PartitionTuple) -> Result<Rational> {
    if lambdas.parties() != state.parties() {
        return invalid("state and partition tuple disagree on the number of parties");
    }
    if !w_admissible(lambdas) {
        return Ok(Rational::zero());
    }
    let w = w_normal_form(state.parties())?;
    let zw = z_norm(&w, lambdas);
    if zw.is_zero() {
        return Err(Error::Inconsistency(format!("Z(W) vanishes on admissible tuple {lambdas}")));
    }
    Ok(p_w_with(table, lambdas) / zw * z_norm(state, lambdas))
}

/// `p(lambda|psi)` over every tuple.
pub fn distribution_psi(state: &WClassState, n: u32) -> Result<Vec<(PartitionTuple, Rational)>> {
    let table = ZTable::new();
    all_tuples(state.parties(), n)
        .into_par_iter()
        .map(|t| p_psi_with(&table, state, &t).map(|p| (t, p)))
        .collect()
}

/// Float rendering used for CSV output.
pub fn to_f64(r: &Rational) -> f64 {
    crate::exact::rational_to_f64(r)
}
