//! Exact scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction. [`SqrtRational`] is a
//! signed square root `sign * sqrt(radicand)` and is closed under
//! multiplication and division but not addition. Sums that mix different
//! radicals are accumulated in [`RadicalSum`], a linear combination of
//! square-free square roots with rational coefficients; it is a field, and a
//! sum that is known to collapse back to a single radical can be converted
//! with [`RadicalSum::to_sqrt_rational`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Reduced fraction with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(num.into(), den.into())
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(n.into())
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn factorial_q(n: u64) -> Rational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return invalid(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn perfect_square_root(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact square root of a rational when it is itself rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = perfect_square_root(&r.numer().to_biguint()?)?;
    let d = perfect_square_root(&r.denom().to_biguint()?)?;
    Some(BigRational::new(n.into(), d.into()))
}

/// Signed square root of a nonnegative rational: `sign * sqrt(radicand)`.
///
/// The representation is canonical (`sign == 0` iff `radicand == 0`, radicand
/// in lowest terms), so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqrtRational {
    sign: i8,
    radicand: Rational,
}

impl SqrtRational {
    pub fn zero() -> Self {
        SqrtRational { sign: 0, radicand: Rational::zero() }
    }

    pub fn one() -> Self {
        SqrtRational { sign: 1, radicand: Rational::one() }
    }

    pub fn new(sign: i8, radicand: Rational) -> Result<Self> {
        if radicand.is_negative() {
            return invalid(format!("negative radicand {radicand}"));
        }
        match (sign, radicand.is_zero()) {
            (0, true) => Ok(Self::zero()),
            (0, false) => invalid("sign 0 with nonzero radicand"),
            (-1 | 1, true) => Ok(Self::zero()),
            (-1 | 1, false) => Ok(SqrtRational { sign, radicand }),
            _ => invalid(format!("sign must be -1, 0 or 1, got {sign}")),
        }
    }

    /// `+sqrt(r)` for `r >= 0`.
    pub fn sqrt(r: Rational) -> Result<Self> {
        Self::new(1, r)
    }

    /// Same as [`SqrtRational::sqrt`] for arguments that are known to be
    /// nonnegative.
    pub(crate) fn sqrt_nonneg(r: Rational) -> Self {
        debug_assert!(!r.is_negative());
        if r.is_zero() {
            Self::zero()
        } else {
            SqrtRational { sign: 1, radicand: r }
        }
    }

    pub fn from_rational(r: &Rational) -> Self {
        let sign = if r.is_zero() {
            0
        } else if r.is_negative() {
            -1
        } else {
            1
        };
        SqrtRational { sign, radicand: r * r }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The exact square `sign^2 * radicand`.
    pub fn square(&self) -> Rational {
        self.radicand.clone()
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * rational_to_f64(&self.radicand).sqrt()
    }

    pub fn abs(&self) -> Self {
        SqrtRational { sign: self.sign.abs(), radicand: self.radicand.clone() }
    }

    /// The value as a rational, when the radicand is a perfect square.
    pub fn to_rational(&self) -> Option<Rational> {
        rational_sqrt(&self.radicand).map(|r| if self.sign < 0 { -r } else { r })
    }

    pub fn checked_div(&self, rhs: &SqrtRational) -> Option<SqrtRational> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        Some(SqrtRational {
            sign: self.sign * rhs.sign,
            radicand: &self.radicand / &rhs.radicand,
        })
    }

    pub fn pow(&self, e: u32) -> SqrtRational {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, r: &Rational) -> SqrtRational {
        self * &SqrtRational::from_rational(r)
    }
}

impl Default for SqrtRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Mul<&SqrtRational> for &SqrtRational {
    type Output = SqrtRational;
    fn mul(self, rhs: &SqrtRational) -> SqrtRational {
        if self.is_zero() || rhs.is_zero() {
            return SqrtRational::zero();
        }
        SqrtRational { sign: self.sign * rhs.sign, radicand: &self.radicand * &rhs.radicand }
    }
}

impl Mul for SqrtRational {
    type Output = SqrtRational;
    fn mul(self, rhs: SqrtRational) -> SqrtRational {
        &self * &rhs
    }
}

impl Neg for SqrtRational {
    type Output = SqrtRational;
    fn neg(self) -> SqrtRational {
        SqrtRational { sign: -self.sign, radicand: self.radicand }
    }
}

impl Neg for &SqrtRational {
    type Output = SqrtRational;
    fn neg(self) -> SqrtRational {
        -self.clone()
    }
}

impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let minus = if s < 0 { "-" } else { "" };
                match rational_sqrt(&self.radicand) {
                    Some(r) => write!(f, "{minus}{r}"),
                    None => write!(f, "{minus}sqrt({})", self.radicand),
                }
            }
        }
    }
}

impl SqrtRational {
    /// Numerator and denominator of the radicand as decimal strings.
    pub fn radicand_parts(&self) -> (String, String) {
        (self.radicand.numer().to_string(), self.radicand.denom().to_string())
    }

    pub fn from_parts(sign: i8, num: &str, den: &str) -> Result<Self> {
        let r = parse_rational(&format!("{num}/{den}"))?;
        Self::new(sign, r)
    }
}

impl Serialize for SqrtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (num, den) = self.radicand_parts();
        // integers serialize as JSON numbers when they fit, strings otherwise
        let num_v = num.parse::<i64>().map(serde_json::Value::from).unwrap_or(num.into());
        let den_v = den.parse::<i64>().map(serde_json::Value::from).unwrap_or(den.into());
        serde_json::json!({"sign": self.sign, "num": num_v, "den": den_v}).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SqrtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let sign = v
            .get("sign")
            .and_then(|s| s.as_i64())
            .ok_or_else(|| serde::de::Error::custom("missing sign"))?;
        let text = |key: &str| -> std::result::Result<String, D::Error> {
            match v.get(key) {
                Some(serde_json::Value::Number(n)) => Ok(n.to_string()),
                Some(serde_json::Value::String(s)) => Ok(s.clone()),
                _ => Err(serde::de::Error::custom(format!("missing {key}"))),
            }
        };
        let sign = i8::try_from(sign).map_err(serde::de::Error::custom)?;
        SqrtRational::from_parts(sign, &text("num")?, &text("den")?)
            .map_err(serde::de::Error::custom)
    }
}

/// Writes `m = a^2 * k` with `k` square-free.
pub(crate) fn squarefree_split(m: &BigUint) -> (BigUint, BigUint) {
    if m.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rem = m.clone();
    let mut a = BigUint::one();
    let mut k = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rem {
        let mut e = 0u32;
        while (&rem % &p).is_zero() {
            rem /= &p;
            e += 1;
        }
        if e > 0 {
            a *= p.pow(e / 2);
            if e % 2 == 1 {
                k *= &p;
            }
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    k *= rem;
    (a, k)
}

fn prime_factors_squarefree(k: &BigUint) -> Vec<BigUint> {
    let mut rem = k.clone();
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rem {
        if (&rem % &p).is_zero() {
            rem /= &p;
            out.push(p.clone());
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if rem > BigUint::one() {
        out.push(rem);
    }
    out
}

/// Finite sum `sum_k coeff_k * sqrt(k)` over distinct square-free `k >= 1`.
///
/// Square roots of distinct square-free integers are linearly independent
/// over the rationals, so this representation is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl RadicalSum {
    pub fn zero() -> Self {
        RadicalSum::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(BigUint::one(), r);
        }
        RadicalSum { terms }
    }

    /// A single term `coeff * sqrt(k)`; `k` must already be square-free.
    fn term(coeff: Rational, k: BigUint) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(k, coeff);
        }
        RadicalSum { terms }
    }

    pub fn from_sqrt_rational(x: &SqrtRational) -> Self {
        if x.is_zero() {
            return Self::zero();
        }
        // sqrt(p/q) = sqrt(p*q) / q
        let p = x.radicand.numer().to_biguint().expect("nonnegative radicand");
        let q = x.radicand.denom().to_biguint().expect("positive denominator");
        let (a, k) = squarefree_split(&(&p * &q));
        let coeff = BigRational::new(BigInt::from(a), BigInt::from(q));
        let coeff = if x.sign < 0 { -coeff } else { coeff };
        Self::term(coeff, k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    /// The value as a single signed square root, if it is one.
    pub fn to_sqrt_rational(&self) -> Option<SqrtRational> {
        match self.terms.len() {
            0 => Some(SqrtRational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                let sign = if c.is_negative() { -1 } else { 1 };
                let radicand = c * c * BigRational::from_integer(BigInt::from(k.clone()));
                Some(SqrtRational { sign, radicand })
            }
            _ => None,
        }
    }

    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| rational_to_f64(c) * k.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    fn add_term(&mut self, k: BigUint, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        RadicalSum { terms: self.terms.iter().map(|(k, c)| (k.clone(), c * r)).collect() }
    }

    /// `self * x` for a single radical `x`.
    pub fn mul_sqrt(&self, x: &SqrtRational) -> Self {
        self * &RadicalSum::from_sqrt_rational(x)
    }

    /// Adds `a * b` where both factors are single radicals.
    pub fn add_product(&mut self, a: &RadicalSum, b: &RadicalSum) {
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let (k, g) = mul_squarefree(ka, kb);
                self.add_term(k, ca * cb * BigRational::from_integer(BigInt::from(g)));
            }
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Multiplicative inverse, `None` for zero.
    ///
    /// Radicals are eliminated one prime at a time: writing
    /// `x = a + b*sqrt(p)` with `a, b` free of `sqrt(p)`, the product
    /// `x * (a - b*sqrt(p)) = a^2 - p*b^2` no longer involves `p`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut num = RadicalSum::one();
        let mut den = self.clone();
        loop {
            let prime = den
                .terms
                .keys()
                .filter(|k| !k.is_one())
                .flat_map(prime_factors_squarefree)
                .max();
            let Some(p) = prime else { break };
            let mut conj = RadicalSum::zero();
            for (k, c) in &den.terms {
                if (k % &p).is_zero() {
                    conj.add_term(k.clone(), -c.clone());
                } else {
                    conj.add_term(k.clone(), c.clone());
                }
            }
            num = &num * &conj;
            den = &den * &conj;
        }
        let d = den.to_rational().expect("all radicals eliminated");
        Some(num.scale(&d.recip()))
    }

    pub fn checked_div(&self, rhs: &RadicalSum) -> Option<Self> {
        rhs.inverse().map(|inv| self * &inv)
    }
}

/// `sqrt(a) * sqrt(b) = g * sqrt(k)` for square-free `a`, `b`.
fn mul_squarefree(a: &BigUint, b: &BigUint) -> (BigUint, BigUint) {
    let g = a.gcd(b);
    ((a / &g) * (b / &g), g)
}

impl Add<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn add(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&RadicalSum> for RadicalSum {
    fn add_assign(&mut self, rhs: &RadicalSum) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl SubAssign<&RadicalSum> for RadicalSum {
    fn sub_assign(&mut self, rhs: &RadicalSum) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), -c.clone());
        }
    }
}

impl Sub<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn sub(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&RadicalSum> for &RadicalSum {
    type Output = RadicalSum;
    fn mul(self, rhs: &RadicalSum) -> RadicalSum {
        let mut out = RadicalSum::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &RadicalSum {
    type Output = RadicalSum;
    fn neg(self) -> RadicalSum {
        RadicalSum { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }
}

impl From<&SqrtRational> for RadicalSum {
    fn from(x: &SqrtRational) -> Self {
        RadicalSum::from_sqrt_rational(x)
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let (sep, c) = match (i, c.is_negative()) {
                (0, true) => ("-", -c.clone()),
                (0, false) => ("", c.clone()),
                (_, true) => (" - ", -c.clone()),
                (_, false) => (" + ", c.clone()),
            };
            if k.is_one() {
                write!(f, "{sep}{c}")?;
            } else if c.is_one() {
                write!(f, "{sep}sqrt({k})")?;
            } else {
                write!(f, "{sep}{c}*sqrt({k})")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn rational_pow(r: &Rational, e: u64) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * r)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of a symmetric matrix, descending.
pub fn sym_eig(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    sym_eig_decompose(m).map(|e| e.values)
}

pub fn sym_eig_decompose(m: &[Vec<f64>]) -> Result<SymEig> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::ContractViolation("matrix is not square".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::ContractViolation(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    m[i][j], m[j][i]
                )));
            }
        }
    }
    if n == 0 {
        return Ok(SymEig { values: Vec::new(), vectors: DMatrix::zeros(0, 0) });
    }
    let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let eig = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sr(sign: i8, n: i64, d: i64) -> SqrtRational {
        SqrtRational::new(sign, rat(n, d)).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&sr(1, 1, 2) * &sr(-1, 1, 3), sr(-1, 1, 6));
        assert_eq!(&sr(1, 7, 5) * &SqrtRational::zero(), SqrtRational::zero());
        assert_eq!(&sr(-1, 4, 3) * &sr(-1, 1, 2), sr(1, 2, 3));
    }

    #[test]
    fn square_and_float() {
        assert_eq!(sr(-1, 2, 3).square(), rat(2, 3));
        assert_eq!(SqrtRational::zero().square(), rat(0, 1));
        assert_eq!(sr(1, 8, 3).square(), rat(8, 3));
        assert_eq!(sr(1, 1, 4).to_f64(), 0.5);
        assert!((sr(-1, 2, 3).to_f64() + 0.816_496_580_927_726).abs() < 1e-15);
        assert_eq!(SqrtRational::zero().to_f64(), 0.0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(SqrtRational::new(1, rat(-1, 2)).is_err());
        assert!(SqrtRational::new(0, rat(1, 2)).is_err());
        assert!(SqrtRational::new(2, rat(1, 2)).is_err());
        assert_eq!(SqrtRational::new(-1, rat(0, 1)).unwrap(), SqrtRational::zero());
    }

    #[test]
    fn json_shape() {
        let x = sr(-1, 2, 3);
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(v, serde_json::json!({"sign": -1, "num": 2, "den": 3}));
        let back: SqrtRational = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn radical_sums_collapse() {
        // sqrt(1/6) + sqrt(2/3) = 3 sqrt(1/6)
        let mut s = RadicalSum::from(&sr(1, 1, 6));
        s += &RadicalSum::from(&sr(1, 2, 3));
        assert_eq!(s.to_sqrt_rational().unwrap(), sr(1, 3, 2));
        // sqrt(2) + sqrt(3) does not
        let t = &RadicalSum::from(&sr(1, 2, 1)) + &RadicalSum::from(&sr(1, 3, 1));
        assert!(t.to_sqrt_rational().is_none());
        let inv = t.inverse().unwrap();
        assert_eq!(&inv * &t, RadicalSum::one());
    }

    #[test]
    fn inverse_of_three_radicals() {
        let x = &(&RadicalSum::from(&sr(1, 2, 1)) + &RadicalSum::from(&sr(-1, 3, 1)))
            + &RadicalSum::from(&sr(1, 5, 7));
        let inv = x.inverse().unwrap();
        assert_eq!(&inv * &x, RadicalSum::one());
    }

    #[test]
    fn squarefree_parts() {
        let (a, k) = squarefree_split(&BigUint::from(72u32));
        assert_eq!((a, k), (BigUint::from(6u32), BigUint::from(2u32)));
        let (a, k) = squarefree_split(&BigUint::from(1u32));
        assert_eq!((a, k), (BigUint::one(), BigUint::one()));
    }

    #[test]
    fn factorial_64_is_exact() {
        let f = factorial(64);
        assert_eq!(f.to_string(), "126886932185884164103433389335161480802865516174545192198801894375214704230400000000000000");
        assert_eq!(binomial(7, 2), BigUint::from(21u32));
    }

    #[test]
    fn sym_eig_examples() {
        assert_eq!(sym_eig(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(), vec![1.0, 0.0]);
        let v = sym_eig(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!(matches!(
            sym_eig(&[vec![1.0, 2.0], vec![0.0, 1.0]]),
            Err(Error::ContractViolation(_))
        ));
    }

    fn arb_sr() -> impl Strategy<Value = SqrtRational> {
        (-1i8..=1, 0i64..50, 1i64..50).prop_map(|(s, n, d)| {
            if s == 0 || n == 0 {
                SqrtRational::zero()
            } else {
                SqrtRational::new(s, rat(n, d)).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn mul_commutes_and_associates(a in arb_sr(), b in arb_sr(), c in arb_sr()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!((&a * &b).square(), a.square() * b.square());
        }

        #[test]
        fn radical_conversion_preserves_value(a in arb_sr()) {
            let r = RadicalSum::from(&a);
            prop_assert_eq!(r.to_sqrt_rational().unwrap(), a.clone());
            prop_assert!((r.to_f64() - a.to_f64()).abs() < 1e-12);
        }

        #[test]
        fn psd_eigenvalues_sum_to_trace(entries in proptest::collection::vec(-3.0f64..3.0, 16)) {
            // B^T B is positive semidefinite
            let b = DMatrix::from_row_slice(4, 4, &entries);
            let m = b.transpose() * &b;
            let rows: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect();
            let e = sym_eig_decompose(&rows).unwrap();
            let trace: f64 = (0..4).map(|i| m[(i, i)]).sum();
            prop_assert!(e.values.iter().all(|&v| v > -1e-10));
            prop_assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-10 * trace.max(1.0));
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
            let recon = &e.vectors * lam * e.vectors.transpose();
            prop_assert!((recon - &m).norm() <= 1e-10 * m.norm().max(1.0));
        }
    }
}
