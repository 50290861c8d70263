//! Signed actions on tensor powers: cocycle, group actions, θ_σ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superinv::grassmann::Grassmann;
use superinv::supermodule::{sample_gl, SuperDim, SuperMatrix};
use superinv::tensor::{
    as_endomorphism, derivation_act, ev_pairing, gamma, gl_diag_act, index_tuples, perm_act, theta_sigma,
    Permutation, Slot, TensorElement,
};

fn random_tensor(dim: SuperDim, budget: u8, signature: Vec<Slot>, rng: &mut ChaCha8Rng) -> TensorElement {
    let mut t = TensorElement::zero(dim, budget, signature.clone());
    for idx in index_tuples(dim.total(), signature.len()) {
        if rng.gen_bool(0.5) {
            t.add_term(idx, Grassmann::random(budget, 3, None, 1, rng));
        }
    }
    t
}

#[test]
fn gamma_cocycle_small_k() {
    for k in 1..=4 {
        let perms = Permutation::all(k);
        for bits in 0..1u32 << k {
            let p: Vec<u8> = (0..k).map(|i| (bits >> i & 1) as u8).collect();
            for s in &perms {
                let shifted = s.inverse().act_on(&p);
                for t in &perms {
                    assert_eq!(gamma(&p, &s.compose(t)), gamma(&shifted, t) * gamma(&p, s));
                }
            }
        }
    }
}

#[test]
fn perm_act_is_a_left_action_on_mixed_tensors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dim = SuperDim::new(1, 2);
    let sig = vec![Slot::Up, Slot::Down, Slot::Up];
    let perms = Permutation::all(3);
    for _ in 0..5 {
        let t = random_tensor(dim, 5, sig.clone(), &mut rng);
        for s in &perms {
            for u in &perms {
                let lhs = perm_act(&s.compose(u), &t).unwrap();
                let rhs = perm_act(s, &perm_act(u, &t).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn gl_action_is_a_group_action_and_commutes_with_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dim = SuperDim::new(2, 1);
    let sig = vec![Slot::Up, Slot::Up, Slot::Down];
    for _ in 0..4 {
        let g = sample_gl(dim, 6, 4, &mut rng);
        let h = sample_gl(dim, 6, 4, &mut rng);
        let t = random_tensor(dim, 6, sig.clone(), &mut rng);
        let gh = g.mat_mul(&h).unwrap();
        assert_eq!(gl_diag_act(&gh, &t).unwrap(), gl_diag_act(&g, &gl_diag_act(&h, &t).unwrap()).unwrap());
        for s in Permutation::all(3) {
            let a = gl_diag_act(&g, &perm_act(&s, &t).unwrap()).unwrap();
            let b = perm_act(&s, &gl_diag_act(&g, &t).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn pairing_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dim = SuperDim::new(1, 1);
    for k in 1..=3 {
        for _ in 0..4 {
            let g = sample_gl(dim, 6, 4, &mut rng);
            let f = random_tensor(dim, 6, vec![Slot::Down; k], &mut rng);
            let v = random_tensor(dim, 6, vec![Slot::Up; k], &mut rng);
            let before = ev_pairing(&f, &v).unwrap();
            let after = ev_pairing(&gl_diag_act(&g, &f).unwrap(), &gl_diag_act(&g, &v).unwrap()).unwrap();
            assert_eq!(before, after);
        }
    }
}

#[test]
fn pairing_matrix_is_signed_permutation() {
    let dim = SuperDim::new(2, 1);
    for idx in index_tuples(3, 2) {
        let f = TensorElement::basis(dim, 2, vec![Slot::Down; 2], idx.clone());
        let mut hits = 0;
        for jdx in index_tuples(3, 2) {
            let v = TensorElement::basis(dim, 2, vec![Slot::Up; 2], jdx.clone());
            let x = ev_pairing(&f, &v).unwrap();
            if !x.is_zero() {
                hits += 1;
                assert_eq!(idx, jdx);
                assert!(x.is_one() || (-&x).is_one());
            }
        }
        assert_eq!(hits, 1);
    }
}

#[test]
fn theta_is_killed_by_every_elementary_derivation() {
    for dim in [SuperDim::new(1, 1), SuperDim::new(2, 1)] {
        for k in 1..=3 {
            for sigma in Permutation::all(k) {
                let th = theta_sigma(dim, 1, &sigma);
                for a in 0..dim.total() {
                    for b in 0..dim.total() {
                        assert!(derivation_act(a, b, &th).unwrap().is_zero(), "{dim} σ={sigma} E{a}{b}");
                    }
                }
            }
        }
    }
}

#[test]
fn theta_represents_the_permutation_action() {
    for dim in [SuperDim::new(1, 1), SuperDim::new(2, 1)] {
        for k in 1..=3 {
            for sigma in Permutation::all(k) {
                let th = theta_sigma(dim, 1, &sigma);
                for j in index_tuples(dim.total(), k) {
                    let e = TensorElement::basis(dim, 1, TensorElement::all_up(k), j);
                    assert_eq!(as_endomorphism(&th, &e).unwrap(), perm_act(&sigma, &e).unwrap());
                }
            }
        }
    }
}

#[test]
fn identity_matrix_acts_trivially() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dim = SuperDim::new(1, 1);
    let t = random_tensor(dim, 4, vec![Slot::Down, Slot::Up], &mut rng);
    assert_eq!(gl_diag_act(&SuperMatrix::identity(dim, 4), &t).unwrap(), t);
}
