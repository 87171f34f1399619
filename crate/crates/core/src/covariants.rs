//! Multihomogeneous polynomials in the auxiliary variables `x0^(i), x1^(i)`
//! and Cayley's Omega process.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{invalid, Result};
use crate::exact::{binomial, factorial, int, RadicalSum, Rational, SqrtRational};
use crate::wstates::WClassState;

/// Polynomial over `2N` variables; exponent slot `2i` is `x0^(i)` and `2i+1`
/// is `x1^(i)`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    parties: usize,
    terms: BTreeMap<Vec<u32>, RadicalSum>,
}

/// Degree `n` in the state and `nu` in the auxiliary variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree {
    pub n: u32,
    pub nu: Vec<u32>,
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nu: Vec<String> = self.nu.iter().map(ToString::to_string).collect();
        write!(f, "({}; {})", self.n, nu.join(","))
    }
}

impl MultiPoly {
    pub fn zero(parties: usize) -> Self {
        MultiPoly { parties, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<u32>, coeff: RadicalSum) -> Self {
        let parties = exps.len() / 2;
        let mut p = Self::zero(parties);
        p.add_term(exps, coeff);
        p
    }

    pub fn one(parties: usize) -> Self {
        Self::monomial(vec![0; 2 * parties], RadicalSum::one())
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, RadicalSum> {
        &self.terms
    }

    pub fn coefficient(&self, exps: &[u32]) -> RadicalSum {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: RadicalSum) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(RadicalSum::zero);
        *slot += &coeff;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.parties);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, s: &RadicalSum) -> MultiPoly {
        let mut out = MultiPoly::zero(self.parties);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        (0..k).fold(MultiPoly::one(self.parties), |acc, _| acc.mul(self))
    }

    /// `d^times / d(var)^times`.
    pub fn derivative(&self, var: usize, times: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.parties);
        for (e, c) in &self.terms {
            if e[var] < times {
                continue;
            }
            let falling = factorial(u64::from(e[var])) / factorial(u64::from(e[var] - times));
            let mut e2 = e.clone();
            e2[var] -= times;
            out.add_term(e2, c.scale(&Rational::from_integer(falling.into())));
        }
        out
    }

    /// Per-party total degree, or `None` if the polynomial is zero or not
    /// multihomogeneous.
    pub fn multidegree(&self) -> Option<Vec<u32>> {
        let mut it = self.terms.keys();
        let first: Vec<u32> = party_degrees(it.next()?);
        it.all(|e| party_degrees(e) == first).then_some(first)
    }
}

fn party_degrees(e: &[u32]) -> Vec<u32> {
    e.chunks(2).map(|c| c[0] + c[1]).collect()
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}_{}", v % 2, v / 2 + 1)?,
                    _ => write!(f, "*x{}_{}^{k}", v % 2, v / 2 + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// `A_psi = [sqrt(c0) + sum_i sqrt(c_i) x1^(i)/x0^(i)] x0^(1)..x0^(N)`.
pub fn base_form(state: &WClassState) -> MultiPoly {
    let parties = state.parties();
    let all_x0: Vec<u32> = (0..2 * parties).map(|v| u32::from(v % 2 == 0)).collect();
    let mut a = MultiPoly::zero(parties);
    a.add_term(all_x0.clone(), RadicalSum::from(&state.amplitude(0)));
    for i in 0..parties {
        let mut e = all_x0.clone();
        e[2 * i] = 0;
        e[2 * i + 1] = 1;
        a.add_term(e, RadicalSum::from(&state.amplitude(i + 1)));
    }
    a
}

/// `(F, G)^l = Omega^{l_1}..Omega^{l_N} F(x) G(x') |_{x' = x}`.
pub fn transvectant(f: &MultiPoly, g: &MultiPoly, l: &[u32]) -> Result<MultiPoly> {
    let parties = f.parties;
    if g.parties != parties || l.len() != parties {
        return invalid("transvectant operands and order must share the number of parties");
    }
    // Omega^l = sum_k C(l,k) (-1)^k [d0^{l-k} d1^k F] [d1'^{l-k} d0'^k G]
    let mut pairs = vec![(Rational::one(), f.clone(), g.clone())];
    for (i, &li) in l.iter().enumerate() {
        let mut next = Vec::new();
        for (c, pf, pg) in &pairs {
            for k in 0..=li {
                let df = pf.derivative(2 * i, li - k).derivative(2 * i + 1, k);
                let dg = pg.derivative(2 * i + 1, li - k).derivative(2 * i, k);
                if df.is_zero() || dg.is_zero() {
                    continue;
                }
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let b = Rational::from_integer(binomial(u64::from(li), u64::from(k)).into());
                next.push((c * b * int(sign), df, dg));
            }
        }
        pairs = next;
    }
    let mut out = MultiPoly::zero(parties);
    for (c, pf, pg) in pairs {
        out = out.add(&pf.mul(&pg).scale(&RadicalSum::from_rational(c)));
    }
    Ok(out)
}

/// `w` when conditions (i)-(iii) and `nu_i <= n` hold, else `None`.
pub fn theorem2_weight(n: u32, nu: &[u32]) -> Option<u32> {
    let parties = nu.len() as i64;
    if nu.iter().any(|&v| v > n || !(n - v).is_multiple_of(2)) {
        return None;
    }
    let twice_w = nu.iter().map(|&v| i64::from(v)).sum::<i64>() - (parties - 2) * i64::from(n);
    if twice_w < 0 || twice_w % 2 != 0 {
        return None;
    }
    let w = (twice_w / 2) as u32;
    nu.iter().all(|&v| v >= w).then_some(w)
}

/// `c^{(n e - nu)/4} x0^{nu - w e} A_psi^w`, or `None` where the selection
/// rules force every covariant of this multidegree to vanish.
pub fn theorem2_form(state: &WClassState, degree: &Multidegree) -> Result<Option<MultiPoly>> {
    let parties = state.parties();
    if degree.nu.len() != parties {
        return invalid("multidegree has the wrong number of parties");
    }
    let Some(w) = theorem2_weight(degree.n, &degree.nu) else {
        return Ok(None);
    };
    let mut prefactor = SqrtRational::one();
    for i in 0..parties {
        let li = (degree.n - degree.nu[i]) / 2;
        prefactor = &prefactor * &state.amplitude(i + 1).pow(li);
    }
    let x0: Vec<u32> = (0..2 * parties).map(|v| if v % 2 == 0 { degree.nu[v / 2] - w } else { 0 }).collect();
    let mono = MultiPoly::monomial(x0, RadicalSum::from(&prefactor));
    Ok(Some(mono.mul(&base_form(state).pow(w))))
}

/// The ratio `F / G` when `F` is an exact multiple of `G`; its square is the
/// rational proportionality constant. `F = 0` gives ratio zero.
pub fn verify_proportional(f: &MultiPoly, g: &MultiPoly) -> Option<RadicalSum> {
    if f.is_zero() {
        return Some(RadicalSum::zero());
    }
    let (e, gc) = g.terms.iter().next()?;
    let ratio = f.coefficient(e).checked_div(gc)?;
    (g.scale(&ratio) == *f).then_some(ratio)
}

/// A covariant together with the transvectant tree that produced it.
#[derive(Clone, Debug)]
pub struct Covariant {
    pub degree: Multidegree,
    pub poly: MultiPoly,
    pub expr: String,
}

/// Every covariant from nested transvectants of `A_psi` with state degree
/// at most `max_n`. Zero results are kept, since vanishing is informative.
pub fn generate_covariants(state: &WClassState, max_n: u32) -> Vec<Covariant> {
    let parties = state.parties();
    let a = Covariant {
        degree: Multidegree { n: 1, nu: vec![1; parties] },
        poly: base_form(state),
        expr: "A".into(),
    };
    let mut by_n: Vec<Vec<Covariant>> = vec![vec![], vec![a]];
    for n in 2..=max_n {
        let mut level = Vec::new();
        for na in 1..n {
            let nb = n - na;
            for fa in &by_n[na as usize] {
                for gb in &by_n[nb as usize] {
                    for l in orders(&fa.degree.nu, &gb.degree.nu) {
                        let poly = transvectant(&fa.poly, &gb.poly, &l).expect("matching parties");
                        let nu = fa.degree.nu.iter().zip(&gb.degree.nu).zip(&l).map(|((a, b), l)| a + b - 2 * l).collect();
                        let ls: Vec<String> = l.iter().map(ToString::to_string).collect();
                        level.push(Covariant {
                            degree: Multidegree { n, nu },
                            poly,
                            expr: format!("({}, {})^[{}]", fa.expr, gb.expr, ls.join(",")),
                        });
                    }
                }
            }
        }
        by_n.push(level);
    }
    by_n.into_iter().flatten().collect()
}

fn orders(f: &[u32], g: &[u32]) -> Vec<Vec<u32>> {
    let caps: Vec<u32> = f.iter().zip(g).map(|(a, b)| *a.min(b)).collect();
    let mut out = vec![vec![]];
    for cap in caps {
        out = out.into_iter().flat_map(|p| (0..=cap).map(move |k| [p.clone(), vec![k]].concat())).collect();
    }
    out
}

/// Polynomial in the projective coordinates `p_i = x1^(i) / x0^(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePoly {
    pub terms: BTreeMap<Vec<u32>, RadicalSum>,
}

impl ProjectivePoly {
    fn derivative(&self, var: usize, times: u32) -> ProjectivePoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] < times {
                continue;
            }
            let falling = factorial(u64::from(e[var])) / factorial(u64::from(e[var] - times));
            let mut e2 = e.clone();
            e2[var] -= times;
            terms.insert(e2, c.scale(&Rational::from_integer(falling.into())));
        }
        ProjectivePoly { terms }
    }

    fn mul(&self, other: &ProjectivePoly) -> ProjectivePoly {
        let mut terms: BTreeMap<Vec<u32>, RadicalSum> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_default() += &(ca * cb);
            }
        }
        terms.retain(|_, v| !v.is_zero());
        ProjectivePoly { terms }
    }
}

/// `F-hat` with `F = x0^f F-hat(x1/x0)`, together with `f`.
pub fn dehomogenize(f: &MultiPoly) -> Result<(ProjectivePoly, Vec<u32>)> {
    let Some(deg) = f.multidegree() else {
        return invalid("dehomogenize needs a nonzero multihomogeneous polynomial");
    };
    let terms = f.terms.iter().map(|(e, c)| (e.chunks(2).map(|p| p[1]).collect(), c.clone())).collect();
    Ok((ProjectivePoly { terms }, deg))
}

pub fn rehomogenize(p: &ProjectivePoly, deg: &[u32]) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(deg.len());
    for (e, c) in &p.terms {
        if e.iter().zip(deg).any(|(k, d)| k > d) {
            return invalid("projective degree exceeds the homogeneous degree");
        }
        let exps = e.iter().zip(deg).flat_map(|(&k, &d)| [d - k, k]).collect();
        out.add_term(exps, c.clone());
    }
    Ok(out)
}

/// `sum_k c(l,k,f,g) d^{l-k} F-hat d^k G-hat` in `p_party`, with
/// `c(l,k,f,g) = l! (-1)^k C(f-l+k, k) C(g-k, l-k)`. For `p = x1/x0` this is
/// `(-1)^l` times the homogeneous transvectant of order `l` at that party.
pub fn projective_transvectant(
    f: &ProjectivePoly,
    g: &ProjectivePoly,
    fdeg: u32,
    gdeg: u32,
    party: usize,
    l: u32,
) -> ProjectivePoly {
    let mut terms: BTreeMap<Vec<u32>, RadicalSum> = BTreeMap::new();
    if l > fdeg.min(gdeg) {
        return ProjectivePoly { terms };
    }
    for k in 0..=l {
        let c = factorial(u64::from(l))
            * binomial(u64::from(fdeg - l + k), u64::from(k))
            * binomial(u64::from(gdeg - k), u64::from(l - k));
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = Rational::from_integer(c.into()) * int(sign);
        let prod = f.derivative(party, l - k).mul(&g.derivative(party, k));
        for (e, v) in prod.terms {
            *terms.entry(e).or_default() += &v.scale(&c);
        }
    }
    terms.retain(|_, v| !v.is_zero());
    ProjectivePoly { terms }
}
