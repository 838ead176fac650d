//! No-disturbance (ND) theories: joint-distribution constructions, the ND
//! polytope as a linear program, random ND behaviors, and the monogamy
//! certificate `kappa + beta >= -5`.

mod fine;
mod polytope;
mod sampling;

pub use fine::{fine_join_c1, fine_join_c2, JointDistribution};
pub use polytope::{nd_optimum, objective_vector, LinearProgram, NdConstraints, NdOptimum, Sense, NUM_VARIABLES};
pub use sampling::NdSampler;

use serde::Serialize;

use crate::error::Result;
use crate::scenario::{Behavior, EIGEN_TOL, NUM_ALICE};

/// Classical bound of the KCBS expression.
pub const KCBS_CLASSICAL: f64 = -3.0;
/// Classical bound of the CHSH expression.
pub const CHSH_CLASSICAL: f64 = -2.0;
/// ND lower bound of `kappa + beta`.
pub const MONOGAMY_BOUND: f64 = -5.0;
/// Slack used when deciding whether an inequality is violated.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonogamyReport {
    pub kcbs: f64,
    /// `beta` for pivots `i = 1..=5`.
    pub chsh: [f64; NUM_ALICE],
    /// `kappa + beta` for pivots `i = 1..=5`.
    pub sums: [f64; NUM_ALICE],
    pub kcbs_violated: bool,
    pub chsh_violated: [bool; NUM_ALICE],
    /// No pivot has both inequalities violated.
    pub at_most_one_violated: bool,
}

impl MonogamyReport {
    pub fn min_sum(&self) -> f64 {
        self.sums.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn monogamy_certificate(behavior: &Behavior) -> Result<MonogamyReport> {
    behavior.require_no_disturbance(EIGEN_TOL)?;
    let kcbs = behavior.kcbs_value();
    let chsh: [f64; NUM_ALICE] = std::array::from_fn(|k| behavior.chsh_value(k as i64 + 1));
    let sums = chsh.map(|b| kcbs + b);
    let kcbs_violated = kcbs < KCBS_CLASSICAL - VIOLATION_TOL;
    let chsh_violated = chsh.map(|b| b < CHSH_CLASSICAL - VIOLATION_TOL);
    let at_most_one_violated = !(kcbs_violated && chsh_violated.iter().any(|&v| v));
    Ok(MonogamyReport {
        kcbs,
        chsh,
        sums,
        kcbs_violated,
        chsh_violated,
        at_most_one_violated,
    })
}
