//! Joint distributions glued together from context marginals.
//!
//! Under no-disturbance the two constructions below are genuine probability
//! distributions that reproduce every marginal entering `C1` and `C2`, so
//! those groups inherit the classical bounds `-3` and `-2`.

use serde::Serialize;

use crate::classical::LinearExpression;
use crate::error::{Error, Result};
use crate::scenario::{Behavior, MeasurementId, DEFAULT_TOL, EIGEN_TOL};

/// Distribution over all outcome tuples of an ordered list of measurements.
/// Entries are laid out lexicographically: first variable most significant,
/// `-1` before `+1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointDistribution {
    variables: Vec<MeasurementId>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(variables: Vec<MeasurementId>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1 << variables.len() {
            return Err(Error::InvalidArgument(format!(
                "{} variables need {} probabilities, got {}",
                variables.len(),
                1 << variables.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -DEFAULT_TOL) {
            return Err(Error::InvalidArgument("negative or non-finite probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        Ok(Self { variables, probs })
    }

    pub fn variables(&self) -> &[MeasurementId] {
        &self.variables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn positions(&self, subset: &[MeasurementId]) -> Result<Vec<usize>> {
        subset
            .iter()
            .map(|m| {
                self.variables
                    .iter()
                    .position(|v| v == m)
                    .ok_or_else(|| Error::SubsetNotMeasurable(format!("{m:?} not in joint")))
            })
            .collect()
    }

    fn sign(&self, tuple: usize, pos: usize) -> i8 {
        crate::scenario::outcome_sign(tuple, pos, self.variables.len())
    }

    /// Marginal over `subset`, laid out in the order given.
    pub fn marginal(&self, subset: &[MeasurementId]) -> Result<Vec<f64>> {
        let positions = self.positions(subset)?;
        let mut out = vec![0.0; 1 << subset.len()];
        for (tuple, p) in self.probs.iter().enumerate() {
            let idx = positions
                .iter()
                .fold(0usize, |acc, &pos| (acc << 1) | usize::from(self.sign(tuple, pos) > 0));
            out[idx] += p;
        }
        Ok(out)
    }

    pub fn correlator(&self, subset: &[MeasurementId]) -> Result<f64> {
        let positions = self.positions(subset)?;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(tuple, p)| {
                let s: i8 = positions.iter().map(|&pos| self.sign(tuple, pos)).product();
                f64::from(s) * p
            })
            .sum())
    }

    pub fn evaluate(&self, expr: &LinearExpression) -> Result<f64> {
        expr.terms()
            .iter()
            .map(|(c, subset)| Ok(c * self.correlator(subset)?))
            .sum()
    }
}

fn alice(i: i64) -> MeasurementId {
    MeasurementId::alice(i)
}

fn ratio(num: f64, den: f64) -> f64 {
    // A vanishing marginal forces every numerator containing the event to
    // vanish too, so the entry is zero.
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Joint over `(A_{i+1}, A_{i+2}, A_{i-1}, A_{i-2}, B1)`:
///
/// `p(a_{i+1},a_{i+2},b1) p(a_{i+2},a_{i-2},b1) p(a_{i-1},a_{i-2},b1) / (p(a_{i+2},b1) p(a_{i-2},b1))`.
pub fn fine_join_c1(behavior: &Behavior, pivot: i64) -> Result<JointDistribution> {
    behavior.require_no_disturbance(EIGEN_TOL)?;
    let (n1, n2, p1, p2) = (alice(pivot + 1), alice(pivot + 2), alice(pivot - 1), alice(pivot - 2));
    let b1 = MeasurementId::bob(1);
    let t_a = behavior.marginal(&[n1, n2, b1])?;
    let t_b = behavior.marginal(&[n2, p2, b1])?;
    let t_c = behavior.marginal(&[p1, p2, b1])?;
    let d_a = behavior.marginal(&[n2, b1])?;
    let d_b = behavior.marginal(&[p2, b1])?;

    let mut probs = vec![0.0; 32];
    for (tuple, slot) in probs.iter_mut().enumerate() {
        // bits, most significant first: a_{i+1} a_{i+2} a_{i-1} a_{i-2} b1
        let bit = |k: usize| (tuple >> (4 - k)) & 1;
        let (x1, x2, x3, x4, b) = (bit(0), bit(1), bit(2), bit(3), bit(4));
        let first = t_a[(x1 << 2) | (x2 << 1) | b];
        let middle = ratio(t_b[(x2 << 2) | (x4 << 1) | b], d_a[(x2 << 1) | b]);
        let last = ratio(t_c[(x3 << 2) | (x4 << 1) | b], d_b[(x4 << 1) | b]);
        *slot = first * middle * last;
    }
    Ok(JointDistribution {
        variables: vec![n1, n2, p1, p2, b1],
        probs,
    })
}

/// Joint over `(A_{i-1}, A_i, A_{i+1}, B2)`:
///
/// `p(a_i,a_{i-1},b2) p(a_i,a_{i+1},b2) / p(a_i,b2)`.
pub fn fine_join_c2(behavior: &Behavior, pivot: i64) -> Result<JointDistribution> {
    behavior.require_no_disturbance(EIGEN_TOL)?;
    let (prev, mid, next) = (alice(pivot - 1), alice(pivot), alice(pivot + 1));
    let b2 = MeasurementId::bob(2);
    let left = behavior.marginal(&[mid, prev, b2])?;
    let right = behavior.marginal(&[mid, next, b2])?;
    let den = behavior.marginal(&[mid, b2])?;

    let mut probs = vec![0.0; 16];
    for (tuple, slot) in probs.iter_mut().enumerate() {
        // bits: a_{i-1} a_i a_{i+1} b2
        let bit = |k: usize| (tuple >> (3 - k)) & 1;
        let (xp, xm, xn, b) = (bit(0), bit(1), bit(2), bit(3));
        *slot = left[(xm << 2) | (xp << 1) | b] * ratio(right[(xm << 2) | (xn << 1) | b], den[(xm << 1) | b]);
    }
    Ok(JointDistribution {
        variables: vec![prev, mid, next, b2],
        probs,
    })
}
