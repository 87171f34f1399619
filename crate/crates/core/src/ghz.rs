//! Louck and Hahn-Eberlein polynomials, Kronecker-sector overlaps and the
//! residual Gram spectrum of GHZ-class tensor powers.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exact::{factorial_q, int, rational_pow, sym_eig, RadicalSum, Rational, SqrtRational};
use crate::partitions::{dim_irrep, dim_tuple, PartitionTuple, TwoRowPartition};
use crate::schur::{b_coeff_bits, standard_paths};
use crate::wstates::a_factor;

/// Joint type of a pair of `n`-bit strings `(s, s')`: `theta[a][b]` counts
/// the positions with `s_k = a`, `s'_k = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct JointWeight {
    pub theta: [[u32; 2]; 2],
}

impl JointWeight {
    /// The joint weight with row weight `omega`, column weight `omega_p`
    /// and free parameter `x = theta_01`.
    pub fn new(n: u32, omega: u32, omega_p: u32, x: u32) -> Result<Self> {
        let t01 = i64::from(x);
        let t11 = i64::from(omega_p) - t01;
        let t10 = i64::from(omega) - t11;
        let t00 = i64::from(n) - t01 - t11 - t10;
        if [t00, t10, t11].iter().any(|&v| v < 0) {
            return invalid(format!("no joint weight with n={n}, omega={omega}, omega'={omega_p}, x={x}"));
        }
        let c = |v: i64| v as u32;
        Ok(JointWeight { theta: [[c(t00), c(t01)], [c(t10), c(t11)]] })
    }

    pub fn from_strings(s: u64, sp: u64, n: u32) -> Self {
        let mut theta = [[0u32; 2]; 2];
        for k in 0..n {
            let a = ((s >> k) & 1) as usize;
            let b = ((sp >> k) & 1) as usize;
            theta[a][b] += 1;
        }
        JointWeight { theta }
    }

    pub fn n(&self) -> u32 {
        self.theta.iter().flatten().sum()
    }

    /// Weight of the first string.
    pub fn omega(&self) -> u32 {
        self.theta[1][0] + self.theta[1][1]
    }

    /// Weight of the second string.
    pub fn omega_p(&self) -> u32 {
        self.theta[0][1] + self.theta[1][1]
    }

    pub fn x(&self) -> u32 {
        self.theta[0][1]
    }

    /// Number of string pairs of this type, `n! / prod theta_ij!`.
    pub fn multiplicity(&self) -> Rational {
        let denom: Rational = self.theta.iter().flatten().map(|&t| factorial_q(u64::from(t))).product();
        factorial_q(u64::from(self.n())) / denom
    }

    /// A representative pair: `00` positions first, then `01`, `10`, `11`.
    pub fn representative(&self) -> (u64, u64) {
        let (mut s, mut sp) = (0u64, 0u64);
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for _ in 0..self.theta[a][b] {
                s = (s << 1) | a as u64;
                sp = (sp << 1) | b as u64;
            }
        }
        (s, sp)
    }

    /// Every joint weight with the given margins, by increasing `x`.
    pub fn all(n: u32, omega: u32, omega_p: u32) -> Vec<JointWeight> {
        (0..=omega_p).filter_map(|x| JointWeight::new(n, omega, omega_p, x).ok()).collect()
    }
}

fn pochhammer(a: i64, k: u32) -> Rational {
    (0..i64::from(k)).map(|i| int(a + i)).product()
}

/// Terminating `3F2(-lambda2, -x, lambda2 - n - 1; -omega_lo, omega_hi - n; 1)`.
///
/// `x` counts the positions where the lower-weight string has a 1 and the
/// higher-weight string a 0.
pub fn hahn_eberlein(lambda: &TwoRowPartition, omega_lo: u32, omega_hi: u32, x: u32) -> Rational {
    let n = i64::from(lambda.size());
    let l2 = i64::from(lambda.lambda2());
    let (lo, hi) = (i64::from(omega_lo), i64::from(omega_hi));
    let kmax = lambda.lambda2().min(x);
    let mut sum = Rational::zero();
    for k in 0..=kmax {
        let num = pochhammer(-l2, k) * pochhammer(-i64::from(x), k) * pochhammer(l2 - n - 1, k);
        if num.is_zero() {
            break;
        }
        let den = pochhammer(-lo, k) * pochhammer(hi - n, k) * factorial_q(u64::from(k));
        assert!(!den.is_zero(), "hypergeometric denominator vanished before termination");
        sum += num / den;
    }
    sum
}

fn check_compatible(lambda: &TwoRowPartition, theta: &JointWeight) -> Result<()> {
    if theta.n() != lambda.size() {
        return invalid(format!("joint weight of size {} for ({lambda})", theta.n()));
    }
    Ok(())
}

/// `C^lambda_{omega,omega'}(Theta)` from the Hahn-Eberlein closed form. The
/// weights are read off `theta`; out-of-range weights give zero.
pub fn louck(lambda: &TwoRowPartition, theta: &JointWeight) -> Result<SqrtRational> {
    check_compatible(lambda, theta)?;
    let (w, wp) = (theta.omega(), theta.omega_p());
    if !lambda.contains_weight(w) || !lambda.contains_weight(wp) {
        return Ok(SqrtRational::zero());
    }
    let n = u64::from(lambda.size());
    let (lo, hi) = (w.min(wp), w.max(wp));
    let x = if w <= wp { theta.theta[1][0] } else { theta.theta[0][1] };
    let pre = factorial_q(u64::from(lo)) * factorial_q(n - u64::from(hi)) / factorial_q(n);
    let radical = SqrtRational::sqrt(a_factor(lambda, lo)? / a_factor(lambda, hi)?)?;
    let e = hahn_eberlein(lambda, lo, hi, x);
    Ok(radical.scale(&(pre * e)))
}

/// `C^lambda_{omega,omega'}(Theta) = (1/f) sum_q B^q_s B^q_{s'}` at a
/// representative pair of strings.
pub fn louck_bsum(lambda: &TwoRowPartition, theta: &JointWeight) -> Result<SqrtRational> {
    check_compatible(lambda, theta)?;
    let (s, sp) = theta.representative();
    let (w, wp) = (theta.omega(), theta.omega_p());
    let mut acc = RadicalSum::zero();
    for q in standard_paths(lambda) {
        let b = b_coeff_bits(&q, w, s);
        if b.is_zero() {
            continue;
        }
        acc += &RadicalSum::from(&(&b * &b_coeff_bits(&q, wp, sp)));
    }
    let f = Rational::one() / int(dim_irrep(lambda) as i64);
    acc.scale(&f)
        .to_sqrt_rational()
        .ok_or_else(|| crate::Error::Inconsistency("louck B-sum is not a single radical".into()))
}

/// `<K_omega | K_omega'>` for the GHZ sector `lambdas`, summed over joint
/// weights. All parties share one `Theta`, so the radical prefactor factors
/// out of the sum.
pub fn overlap(lambdas: &PartitionTuple, omega: u32, omega_p: u32) -> Result<SqrtRational> {
    let n = lambdas.size();
    if lambdas.iter().any(|l| !l.contains_weight(omega) || !l.contains_weight(omega_p)) {
        return Ok(SqrtRational::zero());
    }
    let (lo, hi) = (omega.min(omega_p), omega.max(omega_p));
    let mut prefactor = SqrtRational::one();
    for l in lambdas.iter() {
        prefactor = &prefactor * &SqrtRational::sqrt(a_factor(l, lo)? / a_factor(l, hi)?)?;
    }
    let scale = factorial_q(u64::from(lo)) * factorial_q(u64::from(n - hi)) / factorial_q(u64::from(n));
    let scale_all = rational_pow(&scale, lambdas.parties() as u64);
    let mut sum = Rational::zero();
    for theta in JointWeight::all(n, omega, omega_p) {
        let x = if omega <= omega_p { theta.theta[1][0] } else { theta.theta[0][1] };
        let e: Rational = lambdas.iter().map(|l| hahn_eberlein(l, lo, hi, x)).product();
        sum += theta.multiplicity() * e;
    }
    let f = int(dim_tuple(lambdas) as i64);
    Ok(prefactor.scale(&(f * scale_all * sum)))
}

/// Normalized Gram matrix of the weight components of a GHZ sector.
#[derive(Clone, Debug, Serialize)]
pub struct GramMatrix {
    pub lambdas: PartitionTuple,
    pub weights: Vec<u32>,
    /// Exact entries `G_{omega,omega'}`.
    pub exact: Vec<Vec<SqrtRational>>,
    pub entries: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn trace(&self) -> Rational {
        (0..self.weights.len()).map(|i| self.exact[i][i].to_rational().expect("diagonal is rational")).sum()
    }
}

/// `xi^omega(alpha) = alpha^{omega/2} (1 - alpha)^{(n - omega)/2}`.
pub fn xi(alpha: &Rational, n: u32, omega: u32) -> SqrtRational {
    let r = rational_pow(alpha, u64::from(omega)) * rational_pow(&(Rational::one() - alpha), u64::from(n - omega));
    SqrtRational::sqrt(r).expect("alpha in (0,1)")
}

/// Gram matrix `G_{omega,omega'}` over `omega in [max lambda2, min lambda1]`.
/// Empty when that range is empty or the sector has no GHZ component.
pub fn gram(lambdas: &PartitionTuple, alpha: &Rational) -> Result<GramMatrix> {
    if !alpha.is_positive() || *alpha >= Rational::one() {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let n = lambdas.size();
    let lo = lambdas.iter().map(TwoRowPartition::lambda2).max().expect("nonempty");
    let hi = lambdas.iter().map(TwoRowPartition::lambda1).min().expect("nonempty");
    let empty = GramMatrix { lambdas: lambdas.clone(), weights: vec![], exact: vec![], entries: vec![] };
    if lo > hi {
        return Ok(empty);
    }
    let weights: Vec<u32> = (lo..=hi).collect();
    let xis: Vec<SqrtRational> = weights.iter().map(|&w| xi(alpha, n, w)).collect();
    let mut raw = vec![vec![SqrtRational::zero(); weights.len()]; weights.len()];
    for (a, &w) in weights.iter().enumerate() {
        for (b, &wp) in weights.iter().enumerate().skip(a) {
            let v = &(&xis[a] * &xis[b]) * &overlap(lambdas, w, wp)?;
            raw[a][b] = v.clone();
            raw[b][a] = v;
        }
    }
    let norm: Rational = (0..weights.len()).map(|i| raw[i][i].to_rational().expect("diagonal is rational")).sum();
    if norm.is_zero() {
        return Ok(empty);
    }
    let inv = Rational::one() / norm;
    let exact: Vec<Vec<SqrtRational>> = raw.iter().map(|r| r.iter().map(|v| v.scale(&inv)).collect()).collect();
    let entries = exact.iter().map(|r| r.iter().map(SqrtRational::to_f64).collect()).collect();
    Ok(GramMatrix { lambdas: lambdas.clone(), weights, exact, entries })
}

/// Eigenvalues `gamma` of the Gram matrix, descending. These are the squared
/// Schmidt coefficients of the residual state on `V_lambda ⊗ [lambda]^{S_n}`.
pub fn schmidt_spectrum(g: &GramMatrix) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Ok(vec![]);
    }
    sym_eig(&g.entries)
}

/// Number of eigenvalues above `tol`.
pub fn numerical_rank(spectrum: &[f64], tol: f64) -> usize {
    spectrum.iter().filter(|&&g| g > tol).count()
}

/// The balanced tuple `(n - floor(n/3), floor(n/3))` for every party.
pub fn typical_tuple(parties: usize, n: u32) -> PartitionTuple {
    PartitionTuple::uniform(TwoRowPartition::new(n - n / 3, n / 3).expect("valid"), parties)
}

/// One row of spectrum figure data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub lambda: String,
    pub rank_index: usize,
    pub gamma: f64,
}

/// Ranked Gram eigenvalues of the typical sector for each `n`, dropping
/// eigenvalues at round-off level.
pub fn spectrum_rows(parties: usize, ns: &[u32], alpha: &Rational) -> Result<Vec<SpectrumRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let t = typical_tuple(parties, n);
        let g = gram(&t, alpha)?;
        let spectrum = schmidt_spectrum(&g)?;
        for (i, gamma) in spectrum.into_iter().filter(|&x| x > 1e-12).enumerate() {
            rows.push(SpectrumRow { n, lambda: t.to_string(), rank_index: i + 1, gamma });
        }
    }
    Ok(rows)
}
