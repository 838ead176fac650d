//! Monogamy between KCBS contextuality and CHSH nonlocality.
//!
//! Alice measures five cyclically compatible ±1 observables `A1..A5` on her
//! system while Bob measures one of two incompatible observables `B1, B2`.
//! This crate computes, for that scenario:
//!
//! * classical bounds by exhaustive enumeration of deterministic
//!   assignments ([`classical`]),
//! * no-disturbance bounds by linear programming, together with the
//!   joint-distribution constructions that prove `kappa + beta >= -5`
//!   ([`nodisturbance`]),
//! * the qutrit-qubit quantum operators, their spectra and block structure
//!   ([`quantum`]),
//! * the quantum region of attainable `(<CHSH>, <KCBS>)` pairs, its boundary
//!   and the point where it touches the no-disturbance line ([`region`]).

pub mod classical;
pub mod error;
pub mod lp;
pub mod nodisturbance;
pub mod quantum;
pub mod region;
pub mod scenario;

pub use classical::{
    c1_expression, c2_expression, chsh_expression, classical_bound, cycle_bound, enumerate_assignments,
    kcbs_expression, monogamy_expression, ClassicalBound, DeterministicAssignment, LinearExpression,
    CANONICAL_PIVOT,
};
pub use error::{Error, Result};
pub use nodisturbance::{
    fine_join_c1, fine_join_c2, monogamy_certificate, nd_optimum, JointDistribution, MonogamyReport, NdSampler,
    Sense,
};
pub use quantum::{ComplexMatrix, Eigensystem, Ket};
pub use region::{Branch, RegionPoint};
pub use scenario::{Behavior, Context, Correlator, Measurement, MeasurementId, NdViolation, Scenario};
