use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wkron::covariants::{theorem2_form, verify_proportional, MultiPoly, Multidegree};
use wkron::exact::{binomial, rat, RadicalSum, Rational, SqrtRational};
use wkron::ghz::gram;
use wkron::partitions::{all_tuples, w_admissible};
use wkron::probw::p_psi;
use wkron::protocol::{
    marginal_entropy, mean_reduced_entropy, multilocal_schur, oracle_khat_for, sample_many, tensor_power,
    InputState,
};
use wkron::wstates::{phi_hat, w_normal_form, WClassState};

#[test]
fn sector_norms_match_closed_form_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..4 {
        let state = WClassState::random(3, &mut rng);
        for n in 1..=3 {
            let dense = tensor_power(&InputState::W(state.clone()), n).unwrap();
            let sectors = multilocal_schur(&dense).unwrap();
            for t in all_tuples(3, n) {
                let from_oracle = sectors.get(&t).and_then(|b| b.norm_sq()).unwrap_or_else(Rational::zero);
                assert_eq!(from_oracle, p_psi(&state, &t).unwrap(), "{state}, {t}");
            }
        }
    }
}

#[test]
fn oracle_factors_random_states_through_khat() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let state = WClassState::random(3, &mut rng);
    for n in 1..=4 {
        for t in all_tuples(3, n).into_iter().filter(w_admissible) {
            oracle_khat_for(&state, &t).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
    }
}

#[test]
fn ghz_gram_matches_dense_projection() {
    let alpha = rat(1, 3);
    let input = InputState::ghz(3, alpha.clone()).unwrap();
    for n in 1..=5 {
        let dense = tensor_power(&input, n).unwrap();
        let sectors = multilocal_schur(&dense).unwrap();
        for t in all_tuples(3, n) {
            let g = gram(&t, &alpha).unwrap();
            let Some(block) = sectors.get(&t) else {
                assert!(g.is_empty() || g.trace().is_zero(), "{t}");
                continue;
            };
            let (rows, dense_g) = block.gram_exact().unwrap();
            for (a, ra) in rows.iter().enumerate() {
                assert!(ra.0.iter().all(|&w| w == ra.0[0]), "GHZ rows have equal weights");
                let ia = g.weights.iter().position(|&w| w == ra.0[0]).unwrap();
                for (b, rb) in rows.iter().enumerate() {
                    let ib = g.weights.iter().position(|&w| w == rb.0[0]).unwrap();
                    assert_eq!(dense_g[a][b], RadicalSum::from(&g.exact[ia][ib]), "{t}");
                }
            }
            let diag_nonzero = g.weights.iter().enumerate().filter(|(i, _)| !g.exact[*i][*i].is_zero()).count();
            assert_eq!(diag_nonzero, rows.len(), "{t}");
        }
    }
}

fn phi_as_form(state: &WClassState, t: &wkron::PartitionTuple) -> MultiPoly {
    let mut form = MultiPoly::zero(3);
    for (omega, v) in &phi_hat(state, t).coeffs {
        let mut exps = Vec::new();
        let mut coeff = RadicalSum::from(v);
        for (l, &w) in t.iter().zip(&omega.0) {
            exps.extend([l.lambda1() - w, w - l.lambda2()]);
            let b = binomial(u64::from(l.nu()), u64::from(w - l.lambda2()));
            coeff = coeff.mul_sqrt(&SqrtRational::sqrt(Rational::from_integer(BigInt::from(b))).unwrap());
        }
        form = form.add(&MultiPoly::monomial(exps, coeff));
    }
    form
}

#[test]
fn phi_hat_is_proportional_to_the_predicted_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let states = [w_normal_form(3).unwrap(), WClassState::random(3, &mut rng)];
    for state in &states {
        for n in 1..=4 {
            for t in all_tuples(3, n) {
                let degree = Multidegree { n, nu: t.iter().map(|l| l.nu()).collect() };
                let predicted = theorem2_form(state, &degree).unwrap();
                let phi = phi_as_form(state, &t);
                match predicted {
                    None => assert!(phi.is_zero(), "{state}, {t}"),
                    Some(c) if phi.is_zero() => assert!(!w_admissible(&t) || c.is_zero(), "{state}, {t}"),
                    Some(c) => assert!(verify_proportional(&phi, &c).is_some(), "{state}, {t}"),
                }
            }
        }
    }
}

#[test]
fn per_copy_yield_approaches_marginal_entropy() {
    let input = InputState::W(w_normal_form(3).unwrap());
    let outcomes = sample_many(&input, 12, 17, 2000).unwrap();
    for party in 0..3 {
        let h = marginal_entropy(&input, party).unwrap();
        let mean = mean_reduced_entropy(&outcomes, party);
        assert!((mean - h).abs() <= 0.15, "party {party}: mean {mean}, marginal {h}");
    }
}
