use finite_triple_lab::*;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn real(r: usize, cols: usize, v: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(r, cols, &v.iter().map(|&x| c(x)).collect::<Vec<_>>())
}

fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&m + m.adjoint()) * c(0.5)
}

fn numerical_rank(m: &CMatrix, scale: f64) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > 1e-8 * scale).count()
}

/// Junk dimension straight from the definition: raw basis pairs, full SVD kernel, image rank.
fn junk_dim_oracle(t: &FiniteTriple) -> usize {
    let basis = t.algebra_basis();
    let m = basis.len();
    let d2 = t.dim_h() * t.dim_h();
    let comm = |a: &CMatrix| t.d() * a - a * t.d();
    let mut relation = CMatrix::zeros(d2, m * m);
    let mut image = CMatrix::zeros(d2, m * m);
    for i in 0..m {
        for j in 0..m {
            let col = i * m + j;
            relation.set_column(col, &vectorize(&(&basis[i] * comm(&basis[j]))));
            image.set_column(col, &vectorize(&(comm(&basis[i]) * comm(&basis[j]))));
        }
    }
    // Pad to a square matrix so the SVD returns a complete right basis.
    let mut padded = CMatrix::zeros(d2.max(m * m), m * m);
    padded.view_mut((0, 0), (d2, m * m)).copy_from(&relation);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let kernel: Vec<DVector<Complex64>> = (0..m * m)
        .filter(|&k| svd.singular_values[k] <= 1e-10 * smax)
        .map(|k| vt.row(k).adjoint())
        .collect();
    let mut pushed = CMatrix::zeros(d2, kernel.len());
    for (k, v) in kernel.iter().enumerate() {
        pushed.set_column(k, &(&image * v));
    }
    numerical_rank(&pushed, image.norm().max(1.0))
}

fn random_odd_triple(seed: u64) -> FiniteTriple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_hermitian(3, &mut rng);
    // M_2 ⊕ C on C³, or the diagonal algebra, depending on the seed.
    let gens = if seed % 2 == 0 {
        vec![unit(3, 0, 0), unit(3, 0, 1), unit(3, 1, 0), unit(3, 1, 1), unit(3, 2, 2)]
    } else {
        vec![unit(3, 0, 0), unit(3, 1, 1), unit(3, 2, 2)]
    };
    FiniteTriple::from_generators(&gens, d, None).unwrap()
}

#[test]
fn classification_table() {
    assert_eq!(classify_matrix_case(&real(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap(), MatrixCase::Case1);
    assert_eq!(classify_matrix_case(&real(1, 1, &[3.0])).unwrap(), MatrixCase::Case1);
    assert_eq!(classify_matrix_case(&real(2, 2, &[1.0, 0.0, 0.0, 2.0])).unwrap(), MatrixCase::Case2);
    assert_eq!(classify_matrix_case(&real(2, 1, &[1.0, 0.0])).unwrap(), MatrixCase::Case3);
    assert_eq!(classify_matrix_case(&real(1, 2, &[1.0, 0.0])).unwrap(), MatrixCase::Case3);
    assert!(matches!(classify_matrix_case(&CMatrix::zeros(2, 1)), Err(TripleError::ZeroMu)));
}

#[test]
fn block_triples_have_expected_two_forms() {
    let case1 = form_report(&matrix_case_triple(&real(1, 1, &[1.0])).unwrap());
    assert_eq!((case1.dim_omega1, case1.dim_omega2), (2, 2));
    let case1_big = form_report(&matrix_case_triple(&real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap());
    assert_eq!(case1_big.dim_omega2, 8);
    let case2 = form_report(&matrix_case_triple(&real(2, 2, &[1.0, 0.0, 0.0, 2.0])).unwrap());
    assert_eq!(case2.dim_omega1, 8);
    assert_eq!(case2.dim_junk, case2.dim_pi_omega2);
    assert_eq!(case2.dim_omega2, 0);
}

#[test]
fn rank_deficient_block_leaves_only_small_block() {
    // p = 2, q = 1, μ = e₁. Ω¹ is all of the off-diagonal blocks, π(Ω²) is M_2 ⊕ C.
    let t = matrix_case_triple(&real(2, 1, &[1.0, 0.0])).unwrap();
    let report = form_report(&t);
    assert_eq!(report.dim_omega1, 4);
    assert_eq!(report.dim_pi_omega2, 5);

    // Hand-built relations Σ b[D,c] = 0 whose images sweep out every p-block matrix unit.
    let e = |i, j| unit(3, i, j);
    let comm = |a: &CMatrix| t.d() * a - a * t.d();
    let junk = junk_space(&t);
    let mut found = Vec::new();
    // b = E₂₁, c = E₁₂: the single term already vanishes.
    assert!((e(1, 0) * comm(&e(0, 1))).norm() < 1e-15);
    found.push(comm(&e(1, 0)) * comm(&e(0, 1)));
    // b = E₁₁, c = E₁₂.
    assert!((e(0, 0) * comm(&e(0, 1))).norm() < 1e-15);
    found.push(comm(&e(0, 0)) * comm(&e(0, 1)));
    // E₁₁[D,E₁₁] − E₁₂[D,E₂₁] = 0.
    let pairs = [(e(0, 0), e(0, 0)), (-e(0, 1), e(1, 0))];
    let rel: CMatrix = pairs.iter().map(|(b, cc)| b * comm(cc)).sum();
    assert!(rel.norm() < 1e-15);
    found.push(pairs.iter().map(|(b, cc)| comm(b) * comm(cc)).sum());
    // E₂₁[D,E₁₁] − E₂₂[D,E₂₁] = 0.
    let pairs = [(e(1, 0), e(0, 0)), (-e(1, 1), e(1, 0))];
    let rel: CMatrix = pairs.iter().map(|(b, cc)| b * comm(cc)).sum();
    assert!(rel.norm() < 1e-15);
    found.push(pairs.iter().map(|(b, cc)| comm(b) * comm(cc)).sum());

    let hand = OperatorSubspace::span(3, &found);
    let p_block = OperatorSubspace::span(3, &[e(0, 0), e(0, 1), e(1, 0), e(1, 1)]);
    assert!(hand.equals(&p_block));
    assert!(junk.contains(&p_block));
    assert_eq!(junk_dim_oracle(&t), 4);
    assert_eq!(report.dim_omega2, 1);
}

#[test]
fn junk_agrees_with_definition_oracle() {
    let mut fixtures = vec![
        matrix_case_triple(&real(1, 1, &[1.0])).unwrap(),
        matrix_case_triple(&real(2, 2, &[1.0, 0.0, 0.0, 2.0])).unwrap(),
        matrix_case_triple(&real(2, 1, &[0.6, 0.8])).unwrap(),
    ];
    fixtures.extend((0..6).map(random_odd_triple));
    for t in &fixtures {
        let report = form_report(t);
        assert_eq!(report.dim_junk, junk_dim_oracle(t));
        assert!(report.junk_containment_residual < 1e-10);
        assert_eq!(report.dim_omega2, report.dim_pi_omega2 - report.dim_junk);
    }
}

#[test]
fn diagonal_algebra_with_flip() {
    let d = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let t = FiniteTriple::new(vec![unit(2, 0, 0), unit(2, 1, 1)], d, None).unwrap();
    let report = form_report(&t);
    // [D, e₁]² = −1, so π(Ω²) is the diagonal; the relations only produce [D, e₁][D, 1] = 0.
    assert_eq!(report.dim_omega1, 2);
    assert_eq!(report.dim_pi_omega2, 2);
    assert_eq!(report.dim_junk, junk_dim_oracle(&t));
    assert_eq!(report.dim_junk, 0);
}

#[test]
fn vanishing_dirac_operator_has_no_forms() {
    let gens = vec![unit(2, 0, 0), unit(2, 1, 1)];
    let t = FiniteTriple::from_generators(&gens, CMatrix::zeros(2, 2), None).unwrap();
    let report = form_report(&t);
    assert_eq!((report.dim_omega1, report.dim_pi_omega2, report.dim_junk, report.dim_omega2), (0, 0, 0, 0));

    let scalars = FiniteTriple::new(vec![CMatrix::identity(2, 2)], real(2, 2, &[1.0, 2.0, 2.0, -1.0]), None).unwrap();
    assert_eq!(omega1_space(&scalars).dim(), 0);
}

#[test]
fn two_forms_grow_with_the_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = random_hermitian(3, &mut rng);
    let small = FiniteTriple::from_generators(&[unit(3, 0, 0), unit(3, 1, 1), unit(3, 2, 2)], d.clone(), None).unwrap();
    let big = FiniteTriple::from_generators(&[unit(3, 0, 0), unit(3, 0, 1), unit(3, 1, 0), unit(3, 2, 2)], d, None).unwrap();
    let (ps, pb) = (pi_omega2_space(&small), pi_omega2_space(&big));
    assert!(ps.dim() <= pb.dim());
    assert!(pb.contains(&ps));
}

#[test]
fn junk_projector_is_an_orthogonal_projection() {
    for t in [
        matrix_case_triple(&real(2, 1, &[1.0, 0.0])).unwrap(),
        random_odd_triple(2),
        random_odd_triple(3),
    ] {
        for weight in [TraceWeight::Identity, TraceWeight::DPower { exponent: 2.0 }] {
            let report = form_report_weighted(&t, weight);
            let p = &report.junk_projector;
            assert!((p * p - p).norm() < 1e-10);
            let trace = p.trace();
            assert!((trace.re - report.dim_omega2 as f64).abs() < 1e-9 && trace.im.abs() < 1e-9);
            if weight == TraceWeight::Identity {
                assert!((p - p.adjoint()).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn power_weight_reports_kernel_directions() {
    // μ = e₁ with p = 2 leaves one zero mode of D.
    let t = matrix_case_triple(&real(2, 1, &[1.0, 0.0])).unwrap();
    assert_eq!(form_report_weighted(&t, TraceWeight::DPower { exponent: 1.0 }).excluded_kernel_dim, 1);
    assert_eq!(form_report(&t).excluded_kernel_dim, 0);
}

#[test]
fn doubling_preserves_form_dimensions() {
    for seed in 0..6 {
        let t = random_odd_triple(seed);
        let doubled = double_odd(&t).unwrap();
        assert_eq!(doubled.dim_h(), 2 * t.dim_h());
        let g = doubled.gamma().unwrap();
        let n = doubled.dim_h();
        assert!((g * g - CMatrix::identity(n, n)).norm() < 1e-15);
        assert!((g * doubled.d() + doubled.d() * g).norm() < 1e-15);
        let (a, b) = (form_report(&t), form_report(&doubled));
        assert_eq!((a.dim_omega1, a.dim_omega2), (b.dim_omega1, b.dim_omega2));
    }
    let one_dim = FiniteTriple::new(vec![CMatrix::identity(1, 1)], real(1, 1, &[2.5]), None).unwrap();
    let report = form_report(&double_odd(&one_dim).unwrap());
    assert_eq!((report.dim_omega1, report.dim_pi_omega2, report.dim_omega2), (0, 0, 0));
    let even = matrix_case_triple(&real(1, 1, &[1.0])).unwrap();
    assert!(matches!(double_odd(&even), Err(TripleError::AlreadyEven)));
}

#[test]
fn triple_spec_round_trip() {
    let t = matrix_case_triple(&real(2, 1, &[0.6, 0.8])).unwrap();
    let text = serde_json::to_string(&t.to_spec()).unwrap();
    let back = FiniteTriple::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.d(), t.d());
    assert_eq!(back.gamma(), t.gamma());
    assert_eq!(form_report(&back).dim_omega2, form_report(&t).dim_omega2);
}
