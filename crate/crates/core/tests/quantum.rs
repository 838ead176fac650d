use std::f64::consts::PI;

use monogamy_core::quantum::{
    behavior_from_state, block_decompose, chsh_operator, eigensystem, kcbs_operator, m_closed_form, real_block, ComplexMatrix,
    Ket, JOINT_DIM,
};
use monogamy_core::{Error, CANONICAL_PIVOT};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All three eigenvalues of a real symmetric 3x3 matrix, ascending, from the
/// trigonometric roots of the characteristic cubic.
fn cubic_eigenvalues(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: [[f64; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| (a[i][j] - if i == j { q } else { 0.0 }) / p));
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

#[test]
fn m_spectrum_against_characteristic_polynomial() {
    let m = m_closed_form();
    let oracle = cubic_eigenvalues(&m);
    let es = eigensystem(&ComplexMatrix::from_real(&m.map(|r| r.to_vec()))).unwrap();
    for k in 0..3 {
        assert!((es.values[k] - oracle[k]).abs() < 1e-10);
    }
    assert!((oracle[0] + 2.808).abs() < 1e-3);
    assert!((oracle[1] - 0.336).abs() < 1e-3);
    assert!((oracle[2] - 2.0).abs() < 1e-10);
}

#[test]
fn restricted_block_matches_closed_form() {
    let blocks = block_decompose(&chsh_operator()).unwrap();
    let m = real_block(&blocks.m);
    let closed = m_closed_form();
    for i in 0..3 {
        for j in 0..3 {
            assert!((m[i][j] - closed[i][j]).abs() < 1e-12);
        }
    }
    assert!(blocks.cross_block < 1e-12);
    assert!((&blocks.m + &blocks.minus_block).max_abs() < 1e-12);
}

#[test]
fn kcbs_spectrum_is_closed_form() {
    let k = kcbs_operator();
    assert!(k.max_off_diagonal() < 1e-12);
    let es = eigensystem(&k).unwrap();
    let r5 = 5f64.sqrt();
    let expected = [5.0 - 4.0 * r5, 5.0 - 4.0 * r5, -5.0 + 2.0 * r5, -5.0 + 2.0 * r5, -5.0 + 2.0 * r5, -5.0 + 2.0 * r5];
    for (v, e) in es.values.iter().zip(expected) {
        assert!((v - e).abs() < 1e-10);
    }
}

#[test]
fn chsh_spectrum_is_m_and_minus_m() {
    let es = eigensystem(&chsh_operator()).unwrap();
    let m = cubic_eigenvalues(&m_closed_form());
    let mut expected: Vec<f64> = m.iter().flat_map(|&x| [x, -x]).collect();
    expected.sort_by(f64::total_cmp);
    for (v, e) in es.values.iter().zip(&expected) {
        assert!((v - e).abs() < 1e-10);
    }
}

#[test]
fn perturbed_operator_breaks_block_structure() {
    let mut op = chsh_operator();
    op[(0, 1)] += Complex64::new(1e-6, 0.0);
    op[(1, 0)] += Complex64::new(1e-6, 0.0);
    assert!(matches!(block_decompose(&op), Err(Error::BlockStructureViolated(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_states_give_nd_behaviors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = Ket::random(&mut rng, JOINT_DIM);
        let b = behavior_from_state(&psi).unwrap();
        prop_assert!(b.is_no_disturbance(1e-10));
        prop_assert!((b.kcbs_value() - kcbs_operator().expectation_real(&psi)).abs() < 1e-10);
        prop_assert!((b.chsh_value(CANONICAL_PIVOT) - chsh_operator().expectation_real(&psi)).abs() < 1e-10);
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian(entries in prop::collection::vec(-1.0..1.0f64, 72)) {
        let n = 6;
        let g = ComplexMatrix::from_fn(n, |i, j| Complex64::new(entries[2 * (i * n + j)], entries[2 * (i * n + j) + 1]));
        let h = &g + &g.adjoint();
        let es = eigensystem(&h).unwrap();
        prop_assert!((&es.reconstruct() - &h).max_abs() < 1e-10);
        let trace: f64 = es.values.iter().sum();
        prop_assert!((trace - h.trace().re).abs() < 1e-10);
    }
}
