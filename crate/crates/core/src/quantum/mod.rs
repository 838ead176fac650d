//! Quantum implementation of the scenario on a qutrit (Alice) and a qubit
//! (Bob).

mod eigen;
mod matrix;
mod operators;

pub use eigen::{eigensystem, Eigensystem, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{c, ComplexMatrix, Ket, KetJson, MatrixJson, HERMITIAN_TOL, NORM_TOL};
pub use operators::{
    block_decompose, bob_observables, canonical_chsh_expression, chsh_operator, embed, joint_index,
    kcbs_min_eigenvalue, kcbs_normalization, kcbs_observables, kcbs_operator, kcbs_upper_eigenvalue, kcbs_vectors,
    m_closed_form, minus_basis, n_matrix, pauli_x, pauli_z, plus_basis, real_block, BlockDecomposition,
    QuantumSettings, BLOCK_TOL, JOINT_DIM, QUBIT, QUTRIT,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{canonical_scenario, outcome_sign, Behavior, CONTEXT_OUTCOMES, NUM_CONTEXTS};

/// `(1 + s X) / 2`: projector onto the `s = ±1` eigenspace of a ±1 observable.
fn spectral_projector(observable: &ComplexMatrix, sign: i8) -> ComplexMatrix {
    let id = ComplexMatrix::identity(observable.dim());
    (&id + &observable.scale(f64::from(sign))).scale(0.5)
}

/// Born-rule behavior of `state` under `settings`:
/// `p(a, a', b) = <ψ| Π^a_{A_i} Π^{a'}_{A_{i+1}} ⊗ Π^b_{B_j} |ψ>`.
pub fn behavior_from_state_with(state: &Ket, settings: &QuantumSettings) -> Result<Behavior> {
    if state.dim() != JOINT_DIM {
        return Err(Error::InvalidArgument(format!("expected a {JOINT_DIM}-dimensional state")));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let scenario = canonical_scenario();
    let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
    for (k, ctx) in scenario.contexts().iter().enumerate() {
        let [first, second, bob] = [0, 1, 2].map(|p| settings.observable(ctx.members()[p]));
        for (o, slot) in tables[k].iter_mut().enumerate() {
            let alice = &spectral_projector(first, outcome_sign(o, 0, 3)) * &spectral_projector(second, outcome_sign(o, 1, 3));
            let proj = alice.kron(&spectral_projector(bob, outcome_sign(o, 2, 3)));
            *slot = proj.expectation_real(state).max(0.0);
        }
    }
    Behavior::from_approximate(tables)
}

/// Born-rule behavior under the canonical settings.
pub fn behavior_from_state(state: &Ket) -> Result<Behavior> {
    behavior_from_state_with(state, &QuantumSettings::canonical())
}

/// Uniform mixture of the behaviors of the six computational basis states.
pub fn maximally_mixed_behavior() -> Behavior {
    let behaviors: Vec<Behavior> = (0..JOINT_DIM)
        .map(|k| behavior_from_state(&Ket::basis(JOINT_DIM, k)).expect("basis state"))
        .collect();
    let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
    for b in &behaviors {
        for (row, brow) in tables.iter_mut().zip(b.tables()) {
            for (p, q) in row.iter_mut().zip(brow) {
                *p += q / JOINT_DIM as f64;
            }
        }
    }
    Behavior::from_approximate(tables).expect("mixture of behaviors")
}

/// One CSV row of an exported spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub operator: String,
    pub index: usize,
    pub eigenvalue: f64,
}

/// Spectra of the named operators: KCBS, CHSH and the block `M`.
pub fn canonical_spectra() -> Result<Vec<SpectrumRow>> {
    let chsh = chsh_operator();
    let m = block_decompose(&chsh)?.m;
    let named = [("kcbs", kcbs_operator()), ("chsh", chsh), ("M", m)];
    let mut rows = Vec::new();
    for (name, op) in named {
        let es = eigensystem(&op)?;
        rows.extend(es.values.iter().enumerate().map(|(index, &eigenvalue)| SpectrumRow {
            operator: name.to_string(),
            index,
            eigenvalue,
        }));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{c1_expression, c2_expression, kcbs_expression, CANONICAL_PIVOT};
    use crate::scenario::MeasurementId;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quantum_behaviors_are_nd() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let psi = Ket::random(&mut rng, JOINT_DIM);
            let b = behavior_from_state(&psi).unwrap();
            assert!(b.check_no_disturbance(1e-10).is_empty());
        }
    }

    #[test]
    fn behavior_path_matches_operator_path() {
        let settings = QuantumSettings::canonical();
        let kop = kcbs_operator();
        let cop = chsh_operator();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let psi = Ket::random(&mut rng, JOINT_DIM);
            let b = behavior_from_state(&psi).unwrap();
            assert!((b.kcbs_value() - kop.expectation_real(&psi)).abs() < 1e-10);
            assert!((b.chsh_value(CANONICAL_PIVOT) - cop.expectation_real(&psi)).abs() < 1e-10);
            for i in 1..=5 {
                for e in [c1_expression(i), c2_expression(i)] {
                    let op = settings.expression_operator(&e).unwrap();
                    assert!((e.evaluate_behavior(&b).unwrap() - op.expectation_real(&psi)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn correlator_matches_trace() {
        // |20>: <A1 A2> = Tr(rho A1 A2 ⊗ 1)
        let psi = Ket::basis(JOINT_DIM, joint_index(2, 0));
        let b = behavior_from_state(&psi).unwrap();
        let a = kcbs_observables();
        let op = (&a[0] * &a[1]).kron(&ComplexMatrix::identity(QUBIT));
        let direct = op.expectation_real(&psi);
        let corr = b.correlator(&[MeasurementId::alice(1), MeasurementId::alice(2)]).unwrap();
        assert!((corr - direct).abs() < 1e-12);
        assert!((b.kcbs_value() - kcbs_min_eigenvalue()).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_kcbs() {
        let b = maximally_mixed_behavior();
        for i in 1..=5 {
            let v = b.correlator(&[MeasurementId::alice(i), MeasurementId::alice(i + 1)]).unwrap();
            assert!((v + 1.0 / 3.0).abs() < 1e-12);
        }
        assert!((kcbs_expression().evaluate_behavior(&b).unwrap() + 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(behavior_from_state(&Ket::basis(JOINT_DIM, 0)).is_ok());
        assert!(matches!(behavior_from_state(&Ket::basis(3, 0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn spectra_rows() {
        let rows = canonical_spectra().unwrap();
        assert_eq!(rows.len(), 6 + 6 + 3);
        let m: Vec<f64> = rows.iter().filter(|r| r.operator == "M").map(|r| r.eigenvalue).collect();
        assert!((m[1] - 0.336).abs() < 1e-3);
        assert!((m[2] - 2.0).abs() < 1e-10);
    }
}
