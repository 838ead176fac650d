//! The qutrit-qubit measurement settings and the KCBS and CHSH operators.
//!
//! Basis ordering is qutrit major, qubit minor:
//! `|00>, |01>, |10>, |11>, |20>, |21>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::{c, ComplexMatrix, Ket};
use crate::classical::{chsh_expression, LinearExpression, CANONICAL_PIVOT};
use crate::error::{Error, Result};
use crate::scenario::{canonical_scenario, MeasurementId, NUM_ALICE};

pub const QUTRIT: usize = 3;
pub const QUBIT: usize = 2;
pub const JOINT_DIM: usize = QUTRIT * QUBIT;

/// Allowed cross-block leakage of the CHSH operator.
pub const BLOCK_TOL: f64 = 1e-10;

/// `|qutrit, qubit>` as a basis index.
pub fn joint_index(qutrit: usize, qubit: usize) -> usize {
    qutrit * QUBIT + qubit
}

/// `|v_i> ∝ (cos(4πi/5), sin(4πi/5), sqrt(cos(π/5)))`, `i = 1..=5`.
pub fn kcbs_vectors() -> [Ket; NUM_ALICE] {
    std::array::from_fn(|k| {
        let angle = 4.0 * PI * (k as f64 + 1.0) / 5.0;
        Ket::from_real(&[angle.cos(), angle.sin(), (PI / 5.0).cos().sqrt()]).expect("nonzero vector")
    })
}

/// Normalization constant of the KCBS vectors, `1/sqrt(1 + cos(π/5))`.
pub fn kcbs_normalization() -> f64 {
    1.0 / (1.0 + (PI / 5.0).cos()).sqrt()
}

/// `A_i = 2|v_i><v_i| - 1`.
pub fn kcbs_observables() -> [ComplexMatrix; NUM_ALICE] {
    let id = ComplexMatrix::identity(QUTRIT);
    kcbs_vectors().map(|v| &ComplexMatrix::outer(&v).scale(2.0) - &id)
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

/// Bob's observables `B1 = Z`, `B2 = X`.
pub fn bob_observables() -> [ComplexMatrix; 2] {
    [pauli_z(), pauli_x()]
}

/// Fixed measurement settings on the qutrit-qubit system.
#[derive(Clone, Debug)]
pub struct QuantumSettings {
    pub alice: [ComplexMatrix; NUM_ALICE],
    pub bob: [ComplexMatrix; 2],
}

impl QuantumSettings {
    pub fn canonical() -> Self {
        Self {
            alice: kcbs_observables(),
            bob: bob_observables(),
        }
    }

    pub fn observable(&self, id: MeasurementId) -> &ComplexMatrix {
        if id.0 < NUM_ALICE {
            &self.alice[id.0]
        } else {
            &self.bob[id.0 - NUM_ALICE]
        }
    }

    /// Operator whose expectation is `<prod subset>`; the subset must be
    /// jointly measurable.
    pub fn product_operator(&self, subset: &[MeasurementId]) -> Result<ComplexMatrix> {
        let scenario = canonical_scenario();
        if subset.is_empty() || scenario.find_context(subset).is_none() {
            return Err(Error::SubsetNotMeasurable(scenario.subset_label(subset)));
        }
        let mut alice = ComplexMatrix::identity(QUTRIT);
        let mut bob = ComplexMatrix::identity(QUBIT);
        for &m in subset {
            if m.0 < NUM_ALICE {
                alice = &alice * &self.alice[m.0];
            } else {
                bob = &bob * &self.bob[m.0 - NUM_ALICE];
            }
        }
        Ok(alice.kron(&bob))
    }

    /// `sum_k c_k prod(subset_k)` on the joint space.
    pub fn expression_operator(&self, expr: &LinearExpression) -> Result<ComplexMatrix> {
        let mut total = ComplexMatrix::zeros(JOINT_DIM);
        for (coef, subset) in expr.terms() {
            total = &total + &self.product_operator(subset)?.scale(*coef);
        }
        Ok(total)
    }
}

/// `sum_i A_i A_{i+1} ⊗ 1`.
pub fn kcbs_operator() -> ComplexMatrix {
    let a = kcbs_observables();
    let mut sum = ComplexMatrix::zeros(QUTRIT);
    for i in 0..NUM_ALICE {
        sum = &sum + &(&a[i] * &a[(i + 1) % NUM_ALICE]);
    }
    sum.kron(&ComplexMatrix::identity(QUBIT))
}

/// `A1⊗B1 + A1⊗B2 + A4⊗B1 - A4⊗B2`.
pub fn chsh_operator() -> ComplexMatrix {
    let a = kcbs_observables();
    let [z, x] = bob_observables();
    let (a1, a4) = (&a[0], &a[3]);
    let terms = [a1.kron(&z), a1.kron(&x), a4.kron(&z), a4.kron(&x).scale(-1.0)];
    terms.iter().fold(ComplexMatrix::zeros(JOINT_DIM), |acc, t| &acc + t)
}

/// The CHSH expression used throughout the quantum analysis (pivot 5).
pub fn canonical_chsh_expression() -> LinearExpression {
    chsh_expression(CANONICAL_PIVOT)
}

/// `{|01>, |10>, |21>}`.
pub fn plus_basis() -> [Ket; 3] {
    [
        Ket::basis(JOINT_DIM, joint_index(0, 1)),
        Ket::basis(JOINT_DIM, joint_index(1, 0)),
        Ket::basis(JOINT_DIM, joint_index(2, 1)),
    ]
}

/// `{|00>, -|11>, |20>}`. The sign on `|11>` makes the CHSH operator act as
/// exactly `-M` in this basis.
pub fn minus_basis() -> [Ket; 3] {
    let mut flipped = vec![c(0.0); JOINT_DIM];
    flipped[joint_index(1, 1)] = c(-1.0);
    [
        Ket::basis(JOINT_DIM, joint_index(0, 0)),
        Ket::new(flipped).expect("unit vector"),
        Ket::basis(JOINT_DIM, joint_index(2, 0)),
    ]
}

/// CHSH operator split as `M ⊕ -M`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    /// Restriction to [`plus_basis`].
    pub m: ComplexMatrix,
    /// Restriction to [`minus_basis`]; equals `-m`.
    pub minus_block: ComplexMatrix,
    pub basis_plus: [Ket; 3],
    pub basis_minus: [Ket; 3],
    /// Largest entry coupling the two blocks.
    pub cross_block: f64,
}

pub fn block_decompose(chsh: &ComplexMatrix) -> Result<BlockDecomposition> {
    if chsh.dim() != JOINT_DIM {
        return Err(Error::InvalidArgument(format!("expected a {JOINT_DIM}x{JOINT_DIM} operator")));
    }
    let basis_plus = plus_basis();
    let basis_minus = minus_basis();
    let mut cross_block: f64 = 0.0;
    for u in &basis_plus {
        for v in &basis_minus {
            cross_block = cross_block.max(chsh.element(u, v).norm()).max(chsh.element(v, u).norm());
        }
    }
    let m = chsh.restrict(&basis_plus);
    let minus_block = chsh.restrict(&basis_minus);
    let mismatch = (&m + &minus_block).max_abs();
    if cross_block > BLOCK_TOL || mismatch > BLOCK_TOL {
        return Err(Error::BlockStructureViolated(cross_block.max(mismatch)));
    }
    Ok(BlockDecomposition {
        m,
        minus_block,
        basis_plus,
        basis_minus,
        cross_block,
    })
}

/// `M` from its closed-form entries, in the basis `{|01>, |10>, |21>}`.
pub fn m_closed_form() -> [[f64; 3]; 3] {
    let r5 = 5f64.sqrt();
    let m01 = -(2.0 - 2.0 / r5).sqrt();
    let m02 = (4.0 / 5.0 + 4.0 / r5).sqrt();
    let m12 = 2.0 * (-1.0 + 3.0 / r5).sqrt();
    [
        [1.0 - 1.0 / r5, m01, m02],
        [m01, 1.0 - r5, m12],
        [m02, m12, 2.0 - 4.0 / r5],
    ]
}

/// `N = diag(-5+2√5, -5+2√5, 5-4√5)`: the KCBS operator on either block.
pub fn n_matrix() -> [[f64; 3]; 3] {
    let r5 = 5f64.sqrt();
    [[-5.0 + 2.0 * r5, 0.0, 0.0], [0.0, -5.0 + 2.0 * r5, 0.0], [0.0, 0.0, 5.0 - 4.0 * r5]]
}

/// Closed-form KCBS operator eigenvalues.
pub fn kcbs_upper_eigenvalue() -> f64 {
    -5.0 + 2.0 * 5f64.sqrt()
}

pub fn kcbs_min_eigenvalue() -> f64 {
    5.0 - 4.0 * 5f64.sqrt()
}

/// Real part of a 3x3 block as an array.
pub fn real_block(m: &ComplexMatrix) -> [[f64; 3]; 3] {
    assert_eq!(m.dim(), 3);
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re))
}

/// Embeds a 3-vector given in `basis` into the joint space.
pub fn embed(coords: &[Complex64; 3], basis: &[Ket; 3]) -> Result<Ket> {
    let mut amps = vec![c(0.0); JOINT_DIM];
    for (coef, b) in coords.iter().zip(basis) {
        for (slot, a) in amps.iter_mut().zip(b.amplitudes()) {
            *slot += coef * a;
        }
    }
    Ket::normalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::eigen::eigensystem;

    #[test]
    fn vectors_are_orthogonal_neighbours() {
        let v = kcbs_vectors();
        for i in 0..5 {
            assert!((v[i].norm() - 1.0).abs() < 1e-15);
            assert!(v[i].inner(&v[(i + 1) % 5]).norm() < 1e-15);
            assert!(v[i].inner(&v[(i + 2) % 5]).norm() > 0.1);
        }
        assert!((kcbs_normalization() - 0.743_5).abs() < 1e-4);
        assert!((v[0].amplitudes()[2].re - kcbs_normalization() * (PI / 5.0).cos().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn observables_are_reflections() {
        let id = ComplexMatrix::identity(3);
        let a = kcbs_observables();
        for i in 0..5 {
            assert!(a[i].is_hermitian(1e-12));
            assert!((&(&a[i] * &a[i]) - &id).max_abs() < 1e-12);
            assert!(a[i].commutator(&a[(i + 1) % 5]).max_abs() < 1e-12);
            let es = eigensystem(&a[i]).unwrap();
            assert!((es.values[0] + 1.0).abs() < 1e-12);
            assert!((es.values[1] + 1.0).abs() < 1e-12);
            assert!((es.values[2] - 1.0).abs() < 1e-12);
        }
        assert!(a[0].commutator(&a[3]).max_abs() > 0.1);
    }

    #[test]
    fn kcbs_operator_is_diagonal() {
        let k = kcbs_operator();
        assert!(k.max_off_diagonal() < 1e-12);
        let diag: Vec<f64> = (0..6).map(|i| k[(i, i)].re).collect();
        for (i, d) in diag.iter().enumerate() {
            let want = if i < 4 { kcbs_upper_eigenvalue() } else { kcbs_min_eigenvalue() };
            assert!((d - want).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_operator_blocks() {
        let ch = chsh_operator();
        assert!(ch.is_hermitian(1e-12));
        assert!(ch.trace().norm() < 1e-12);
        let blocks = block_decompose(&ch).unwrap();
        assert!(blocks.cross_block < 1e-12);
        assert!((&blocks.m + &blocks.minus_block).max_abs() < 1e-12);
        let closed = m_closed_form();
        for i in 0..3 {
            for j in 0..3 {
                assert!((blocks.m[(i, j)] - c(closed[i][j])).norm() < 1e-10);
            }
        }
        assert!((blocks.m[(0, 0)].re - 0.552_786).abs() < 1e-6);
    }

    #[test]
    fn plain_minus_basis_is_not_minus_m() {
        // without the sign on |11> the lower block differs from -M
        let ch = chsh_operator();
        let plain = [
            Ket::basis(6, joint_index(0, 0)),
            Ket::basis(6, joint_index(1, 1)),
            Ket::basis(6, joint_index(2, 0)),
        ];
        let m = ch.restrict(&plus_basis());
        assert!((&m + &ch.restrict(&plain)).max_abs() > 1.0);
    }

    #[test]
    fn perturbed_operator_fails_block_check() {
        let mut ch = chsh_operator();
        ch[(1, 0)] += c(1e-3);
        ch[(0, 1)] += c(1e-3);
        assert!(matches!(block_decompose(&ch), Err(Error::BlockStructureViolated(_))));
    }

    #[test]
    fn expression_operator_matches_hand_built() {
        let s = QuantumSettings::canonical();
        let ch = s.expression_operator(&canonical_chsh_expression()).unwrap();
        assert!((&ch - &chsh_operator()).max_abs() < 1e-14);
        let k = s.expression_operator(&crate::classical::kcbs_expression()).unwrap();
        assert!((&k - &kcbs_operator()).max_abs() < 1e-14);
        assert!(s.product_operator(&[MeasurementId::alice(1), MeasurementId::alice(3)]).is_err());
    }
}
