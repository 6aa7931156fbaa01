use std::f64::consts::PI;
use std::sync::Arc;

use nctorus_core::{
    box_indices, product_theta, tensor_embed, tensor_embed_with, Complex64, ThetaMatrix, TorusElement,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn random_theta(n: usize, rng: &mut ChaCha8Rng) -> Arc<ThetaMatrix> {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random_range(-1.0..1.0)).collect();
    Arc::new(ThetaMatrix::from_upper(n, &upper))
}

fn random_element(theta: &Arc<ThetaMatrix>, rng: &mut ChaCha8Rng) -> TorusElement {
    let radius = rng.random_range(0..=3);
    // Sparse supports keep the cubic sweeps fast while still mixing phases.
    let dense = TorusElement::random(theta, radius, 1.0, rng);
    let keep: Vec<bool> = (0..dense.support_len()).map(|_| rng.random_bool(0.3)).collect();
    let mut i = 0;
    dense.filter_support(|_| {
        i += 1;
        keep[i - 1]
    })
}

/// Computes `U^r U^s` by writing both monomials as generator words and bubble-sorting
/// adjacent letters with `U_k^a U_m^b = e(Θ_mk a b) U_m^b U_k^a`.
fn word_oracle(theta: &ThetaMatrix, r: &[i32], s: &[i32]) -> (Vec<i32>, Complex64) {
    let mut word: Vec<(usize, i32)> = Vec::new();
    for exps in [r, s] {
        for (k, &e) in exps.iter().enumerate() {
            for _ in 0..e.unsigned_abs() {
                word.push((k, e.signum()));
            }
        }
    }
    let mut phase = Complex64::new(1.0, 0.0);
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 0..word.len().saturating_sub(1) {
            let (k, a) = word[i];
            let (m, b) = word[i + 1];
            if k > m {
                let angle = 2.0 * PI * theta.get(m, k) * (a * b) as f64;
                phase *= Complex64::from_polar(1.0, angle);
                word.swap(i, i + 1);
                swapped = true;
            }
        }
    }
    let mut total = vec![0; theta.n()];
    for (k, e) in word {
        total[k] += e;
    }
    (total, phase)
}

#[test]
fn cocycle_matches_generator_reordering() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let theta = random_theta(n, &mut rng);
        for _ in 0..200 {
            let r: Vec<i32> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            let s: Vec<i32> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            let (idx, phase) = word_oracle(&theta, &r, &s);
            let a = TorusElement::monomial(&theta, &r, Complex64::new(1.0, 0.0));
            let b = TorusElement::monomial(&theta, &s, Complex64::new(1.0, 0.0));
            let ab = &a * &b;
            assert_eq!(ab.support_len(), 1);
            assert!((ab.coeff(&idx) - phase).norm() < TOL, "r = {r:?}, s = {s:?}");
        }
    }
}

#[test]
fn commutation_relation_for_all_generator_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let theta = random_theta(3, &mut rng);
    for k in 1..=3 {
        for m in 1..=3 {
            let uk = TorusElement::generator(&theta, k);
            let um = TorusElement::generator(&theta, m);
            let lhs = &uk * &um;
            let rhs = &(&um * &uk) * Complex64::from_polar(1.0, 2.0 * PI * theta.get(m - 1, k - 1));
            assert!(lhs.max_abs_diff(&rhs) < TOL, "k = {k}, m = {m}");
        }
    }
}

#[test]
fn associativity_sweep() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 2) as usize;
        let theta = random_theta(n, &mut rng);
        let a = random_element(&theta, &mut rng);
        let b = random_element(&theta, &mut rng);
        let c = random_element(&theta, &mut rng);
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        assert!(left.max_abs_diff(&right) < TOL, "seed {seed}");
    }
}

#[test]
fn involution_and_trace_sweep() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = 2 + (seed % 2) as usize;
        let theta = random_theta(n, &mut rng);
        let a = random_element(&theta, &mut rng);
        let b = random_element(&theta, &mut rng);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!(lhs.max_abs_diff(&rhs) < TOL, "seed {seed}");
        assert!(a.adjoint().adjoint().max_abs_diff(&a) < TOL);
        assert!(((&a * &b).trace() - (&b * &a).trace()).norm() < TOL);
        let t = (&a.adjoint() * &a).trace();
        assert!((t - Complex64::new(a.norm_sq(), 0.0)).norm() < TOL * (1.0 + a.norm_sq()));
        assert!(t.re >= 0.0);
    }
}

#[test]
fn leibniz_sweep() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let n = 2 + (seed % 2) as usize;
        let theta = random_theta(n, &mut rng);
        let a = random_element(&theta, &mut rng);
        let b = random_element(&theta, &mut rng);
        for j in 1..=n {
            let lhs = (&a * &b).derivation(j).unwrap();
            let rhs = &(&a.derivation(j).unwrap() * &b) + &(&a * &b.derivation(j).unwrap());
            let scale = 1.0 + lhs.l1_norm();
            assert!(lhs.max_abs_diff(&rhs) < TOL * scale, "seed {seed}, j = {j}");
        }
    }
}

#[test]
fn monomials_unitary_up_to_radius_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let theta = random_theta(2, &mut rng);
    let one = TorusElement::one(&theta);
    for r in box_indices(2, 5) {
        let u = TorusElement::monomial(&theta, &r, Complex64::new(1.0, 0.0));
        assert!((&u.adjoint() * &u).max_abs_diff(&one) < TOL);
        assert!((&u * &u.adjoint()).max_abs_diff(&one) < TOL);
    }
    let u = TorusElement::monomial(&theta, &[2, -1], Complex64::new(1.0, 0.0));
    assert!((&u.adjoint() * &u).max_abs_diff(&one) < TOL);
}

#[test]
fn commutative_case_has_trivial_cocycle() {
    let theta = Arc::new(ThetaMatrix::zero(3));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = random_element(&theta, &mut rng);
        let b = random_element(&theta, &mut rng);
        assert!((&a * &b).max_abs_diff(&(&b * &a)) < TOL);
    }
    assert_eq!(theta.cocycle(&[1, -2, 3], &[2, 2, -1]), Complex64::new(1.0, 0.0));
}

#[test]
fn tensor_embedding_is_multiplicative() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let th = random_theta(2, &mut rng);
        let ph = random_theta(2, &mut rng);
        let psi = Arc::new(product_theta(&th, &ph));
        let a = random_element(&th, &mut rng);
        let a2 = random_element(&th, &mut rng);
        let b = random_element(&ph, &mut rng);
        let b2 = random_element(&ph, &mut rng);
        let lhs = tensor_embed_with(&psi, &(&a * &a2), &(&b * &b2));
        let rhs = &tensor_embed_with(&psi, &a, &b) * &tensor_embed_with(&psi, &a2, &b2);
        assert!(lhs.max_abs_diff(&rhs) < TOL, "seed {seed}");
        let t = tensor_embed(&a, &b).trace();
        assert!((t - a.trace() * b.trace()).norm() < TOL);
    }
}

#[test]
fn embedded_factors_commute() {
    let th = Arc::new(ThetaMatrix::two_torus(0.37));
    let ph = Arc::new(ThetaMatrix::two_torus(-0.81));
    let psi = Arc::new(product_theta(&th, &ph));
    for i in 1..=2 {
        for j in 1..=2 {
            let x = tensor_embed_with(&psi, &TorusElement::generator(&th, i), &TorusElement::one(&ph));
            let y = tensor_embed_with(&psi, &TorusElement::one(&th), &TorusElement::generator(&ph, j));
            assert!((&x * &y).max_abs_diff(&(&y * &x)) < TOL);
        }
    }
}

proptest! {
    #[test]
    fn monomial_products_have_unit_modulus(
        t in -2.0f64..2.0,
        r in prop::collection::vec(-6i32..=6, 2),
        s in prop::collection::vec(-6i32..=6, 2),
    ) {
        let theta = Arc::new(ThetaMatrix::two_torus(t));
        let a = TorusElement::monomial(&theta, &r, Complex64::new(1.0, 0.0));
        let b = TorusElement::monomial(&theta, &s, Complex64::new(1.0, 0.0));
        let ab = &a * &b;
        let sum: Vec<i32> = r.iter().zip(&s).map(|(x, y)| x + y).collect();
        prop_assert!((ab.coeff(&sum).norm() - 1.0).abs() < TOL);
    }
}
