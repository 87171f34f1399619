//! W-class normal forms and the fiducial weight-space states `Phi-hat`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{factorial_q, int, parse_rational, rational_pow, Rational, SqrtRational};
use crate::partitions::{w_admissible, PartitionTuple, TwoRowPartition};

/// LU-normal form `sqrt(c0)|0..0> + sum_i sqrt(c_i)|0..1_i..0>`, stored as the
/// probabilities `c0, c1, .., cN`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WClassState {
    c: Vec<Rational>,
}

impl WClassState {
    /// A genuine W-class state: weights nonnegative, summing to one, with at
    /// least two positive single-excitation weights.
    pub fn new(c: Vec<Rational>) -> Result<Self> {
        let s = Self::normal_form(c)?;
        if s.c[1..].iter().filter(|x| x.is_positive()).count() < 2 {
            return invalid("a W-class state needs at least two positive c_i with i >= 1");
        }
        Ok(s)
    }

    /// Any normalized state of the normal-form shape, including product and
    /// biseparable degenerations.
    pub fn normal_form(c: Vec<Rational>) -> Result<Self> {
        if c.len() < 3 {
            return invalid("need c0 and at least two parties");
        }
        if c.iter().any(Signed::is_negative) {
            return invalid("weights must be nonnegative");
        }
        let total: Rational = c.iter().sum();
        if !total.is_one() {
            return invalid(format!("weights sum to {total}, not 1"));
        }
        Ok(WClassState { c })
    }

    /// A pseudorandom genuine W-class state with small denominators.
    pub fn random<R: Rng + ?Sized>(parties: usize, rng: &mut R) -> Self {
        let mut raw: Vec<i64> = vec![rng.gen_range(0..=6)];
        raw.extend((0..parties).map(|_| rng.gen_range(1..=9)));
        let total: i64 = raw.iter().sum();
        let c = raw.into_iter().map(|x| Rational::new(x.into(), total.into())).collect();
        WClassState::new(c).expect("positive weights")
    }

    pub fn parties(&self) -> usize {
        self.c.len() - 1
    }

    /// `c^(i)`; index 0 is the `|0..0>` weight.
    pub fn c(&self, i: usize) -> &Rational {
        &self.c[i]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.c
    }

    /// Amplitude `sqrt(c^(i))`.
    pub fn amplitude(&self, i: usize) -> SqrtRational {
        SqrtRational::sqrt(self.c[i].clone()).expect("nonnegative weight")
    }
}

impl fmt::Display for WClassState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.c.iter().map(ToString::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for WClassState {
    type Err = Error;
    /// Parses `"c0,c1,..,cN"` with entries like `1/3`.
    fn from_str(s: &str) -> Result<Self> {
        let c = s.split(',').map(|x| parse_rational(x.trim())).collect::<Result<Vec<_>>>()?;
        WClassState::new(c)
    }
}

/// The W state of `parties` qubits: `c0 = 0`, `c_i = 1/N`.
pub fn w_normal_form(parties: usize) -> Result<WClassState> {
    if parties < 2 {
        return invalid("the W state needs at least two parties");
    }
    let mut c = vec![Rational::zero()];
    c.extend((0..parties).map(|_| Rational::new(1.into(), (parties as i64).into())));
    WClassState::new(c)
}

/// `A_{lambda,omega} = (lambda1 - omega)! / (omega - lambda2)!`.
pub fn a_factor(lambda: &TwoRowPartition, omega: u32) -> Result<Rational> {
    if !lambda.contains_weight(omega) {
        return invalid(format!("weight {omega} outside the range of ({lambda})"));
    }
    Ok(factorial_q(u64::from(lambda.lambda1() - omega))
        / factorial_q(u64::from(omega - lambda.lambda2())))
}

/// One weight per party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightTuple(pub Vec<u32>);

impl WeightTuple {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for WeightTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All weight tuples with `lambda2_i <= omega_i <= lambda1_i` and
/// `sum omega_i <= max_total`, in lexicographic order.
pub fn weight_lattice(lambdas: &PartitionTuple, max_total: u32) -> Vec<WeightTuple> {
    fn rec(parts: &[TwoRowPartition], budget: u32, cur: &mut Vec<u32>, out: &mut Vec<WeightTuple>) {
        let Some((first, rest)) = parts.split_first() else {
            out.push(WeightTuple(cur.clone()));
            return;
        };
        let min_rest: u32 = rest.iter().map(TwoRowPartition::lambda2).sum();
        for w in first.lambda2()..=first.lambda1() {
            if w + min_rest > budget {
                break;
            }
            cur.push(w);
            rec(rest, budget - w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(lambdas.parts(), max_total, &mut Vec::new(), &mut out);
    out
}

/// The unnormalized state `Phi-hat_lambda(psi)` over weight tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiState {
    pub lambdas: PartitionTuple,
    pub coeffs: BTreeMap<WeightTuple, SqrtRational>,
}

impl PhiState {
    pub fn get(&self, w: &WeightTuple) -> SqrtRational {
        self.coeffs.get(w).cloned().unwrap_or_else(SqrtRational::zero)
    }

    pub fn norm_sq(&self) -> Rational {
        self.coeffs.values().map(SqrtRational::square).sum()
    }
}

/// Coefficient of `Phi-hat` at `omega` (`omega0 = n - sum omega_i`).
pub fn phi_coeff(state: &WClassState, lambdas: &PartitionTuple, omega: &WeightTuple) -> SqrtRational {
    let n = lambdas.size();
    let total = omega.total();
    if total > n || omega.0.len() != state.parties() {
        return SqrtRational::zero();
    }
    let w0 = n - total;
    let mut radicand =
        rational_pow(state.c(0), u64::from(w0)) / (factorial_q(u64::from(w0)) * factorial_q(u64::from(w0)));
    for (i, (&w, lambda)) in omega.0.iter().zip(lambdas.iter()).enumerate() {
        match a_factor(lambda, w) {
            Ok(a) => radicand *= rational_pow(state.c(i + 1), u64::from(w)) * a,
            Err(_) => return SqrtRational::zero(),
        }
        if radicand.is_zero() {
            break;
        }
    }
    SqrtRational::sqrt(radicand).expect("nonnegative")
}

/// Expansion of `Phi-hat` over its weight lattice.
///
/// The expansion comes from a covariant that vanishes outside the admissible
/// set, so inadmissible tuples give the empty state even where the weight
/// formula alone would not.
pub fn phi_hat(state: &WClassState, lambdas: &PartitionTuple) -> PhiState {
    if !w_admissible(lambdas) {
        return PhiState { lambdas: lambdas.clone(), coeffs: BTreeMap::new() };
    }
    let coeffs = weight_lattice(lambdas, lambdas.size())
        .into_iter()
        .filter_map(|w| {
            let v = phi_coeff(state, lambdas, &w);
            (!v.is_zero()).then_some((w, v))
        })
        .collect();
    PhiState { lambdas: lambdas.clone(), coeffs }
}

/// `Z_lambda(psi) = ||Phi-hat||^2`.
pub fn z_norm(state: &WClassState, lambdas: &PartitionTuple) -> Rational {
    phi_hat(state, lambdas).norm_sq()
}

pub(crate) fn uniform_weight(parties: usize) -> Rational {
    Rational::one() / int(parties as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::partitions::all_tuples;

    fn t(s: &str) -> PartitionTuple {
        s.parse().unwrap()
    }

    fn p(a: u32, b: u32) -> TwoRowPartition {
        TwoRowPartition::new(a, b).unwrap()
    }

    #[test]
    fn normal_forms() {
        assert_eq!(w_normal_form(3).unwrap().weights(), &[rat(0, 1), rat(1, 3), rat(1, 3), rat(1, 3)]);
        assert_eq!(w_normal_form(2).unwrap().weights(), &[rat(0, 1), rat(1, 2), rat(1, 2)]);
        assert_eq!(w_normal_form(4).unwrap().c(4), &rat(1, 4));
        assert_eq!(uniform_weight(4), rat(1, 4));
        assert!(w_normal_form(1).is_err());
        assert!("1/2,1/2,0,0".parse::<WClassState>().is_err());
        assert!("0,1/2,1/4".parse::<WClassState>().is_err());
        let s: WClassState = "1/4,1/4,1/4,1/4".parse().unwrap();
        assert_eq!(s.parties(), 3);
        assert!(WClassState::normal_form(vec![rat(1, 1), rat(0, 1), rat(0, 1)]).is_ok());
    }

    #[test]
    fn a_factors() {
        assert_eq!(a_factor(&p(2, 0), 0).unwrap(), rat(2, 1));
        assert_eq!(a_factor(&p(2, 1), 1).unwrap(), rat(1, 1));
        assert_eq!(a_factor(&p(2, 0), 2).unwrap(), rat(1, 2));
        assert!(a_factor(&p(2, 1), 0).is_err());
    }

    #[test]
    fn phi_examples() {
        let w = w_normal_form(3).unwrap();
        let phi = phi_hat(&w, &t("1,0;1,0;1,0"));
        assert_eq!(phi.coeffs.len(), 3);
        let third = SqrtRational::sqrt(rat(1, 3)).unwrap();
        assert!(phi.coeffs.values().all(|v| *v == third));
        assert!(phi_hat(&w, &t("1,1;1,1;1,1")).coeffs.is_empty());
        let phi = phi_hat(&w, &t("2,0;1,1;1,1"));
        assert_eq!(phi.coeffs.len(), 1);
        assert_eq!(phi.get(&WeightTuple(vec![0, 1, 1])), SqrtRational::sqrt(rat(2, 9)).unwrap());
    }

    #[test]
    fn z_examples() {
        let w = w_normal_form(3).unwrap();
        assert_eq!(z_norm(&w, &t("2,0;2,0;2,0")), rat(4, 3));
        assert_eq!(z_norm(&w, &t("2,0;1,1;1,1")), rat(2, 9));
        assert_eq!(z_norm(&w, &t("1,1;1,1;1,1")), rat(0, 1));
    }

    #[test]
    fn inadmissible_tuples_are_empty_even_with_c0() {
        let s = WClassState::new(vec![rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)]).unwrap();
        let tuple = t("2,0;2,0;1,1");
        assert!(!phi_coeff(&s, &tuple, &WeightTuple(vec![1, 0, 1])).is_zero());
        assert!(phi_hat(&s, &tuple).coeffs.is_empty());
    }

    #[test]
    fn support_implies_admissible() {
        let w = w_normal_form(3).unwrap();
        for n in 1..=5 {
            for tuple in all_tuples(3, n) {
                let z = z_norm(&w, &tuple);
                if !z.is_zero() {
                    assert!(w_admissible(&tuple), "{tuple}");
                }
            }
        }
    }

    #[test]
    fn z_positive_on_admissible() {
        let s = WClassState::new(vec![rat(1, 10), rat(2, 10), rat(3, 10), rat(4, 10)]).unwrap();
        let w = w_normal_form(3).unwrap();
        for n in 1..=5 {
            for tuple in all_tuples(3, n) {
                if w_admissible(&tuple) {
                    assert!(z_norm(&s, &tuple).is_positive(), "{tuple}");
                    assert!(z_norm(&w, &tuple).is_positive(), "{tuple}");
                }
            }
        }
    }
}
