//! Deterministic hidden-variable models: exhaustive enumeration of ±1
//! assignments and the classical (NCHV/LHV) bounds of correlator
//! expressions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{Behavior, MeasurementId, Scenario, NUM_ALICE};

/// Largest scenario [`enumerate_assignments`] accepts.
pub const MAX_ENUMERATION: usize = 24;
/// Largest cycle [`cycle_bound`] accepts.
pub const MAX_CYCLE: usize = 20;

/// One ±1 value per measurement, indexed by measurement id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DeterministicAssignment {
    values: Vec<i8>,
}

impl DeterministicAssignment {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument("assignment values must be +1 or -1".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn value(&self, id: MeasurementId) -> i8 {
        self.values[id.0]
    }

    /// Product of the assigned values over `subset`.
    pub fn product(&self, subset: &[MeasurementId]) -> i8 {
        subset.iter().map(|&m| self.values[m.0]).product()
    }
}

impl fmt::Display for DeterministicAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            f.write_str(if *v > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Iterator over all `2^n` assignments in lexicographic order: the first
/// measurement is most significant and `-1` precedes `+1`.
#[derive(Clone, Debug)]
pub struct Assignments {
    n: usize,
    next: u64,
    end: u64,
}

impl Iterator for Assignments {
    type Item = DeterministicAssignment;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let k = self.next;
        self.next += 1;
        let values = (0..self.n)
            .map(|m| if (k >> (self.n - 1 - m)) & 1 == 1 { 1 } else { -1 })
            .collect();
        Some(DeterministicAssignment { values })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Assignments {}

pub fn enumerate_assignments(scenario: &Scenario) -> Result<Assignments> {
    let n = scenario.num_measurements();
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge { n, max: MAX_ENUMERATION });
    }
    Ok(Assignments { n, next: 0, end: 1u64 << n })
}

/// `sum_k coefficient_k * <prod subset_k>`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearExpression {
    terms: Vec<(f64, Vec<MeasurementId>)>,
}

impl LinearExpression {
    pub fn new(terms: Vec<(f64, Vec<MeasurementId>)>) -> Result<Self> {
        for (c, subset) in &terms {
            if subset.is_empty() {
                return Err(Error::InvalidArgument("expression term with empty subset".into()));
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient {c}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, Vec<MeasurementId>)] {
        &self.terms
    }

    pub fn plus(&self, other: &LinearExpression) -> LinearExpression {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LinearExpression { terms }
    }

    /// Relabels every Alice measurement `A_i -> A_{i+shift}`; Bob's
    /// measurements are untouched.
    pub fn shift_alice(&self, shift: i64) -> LinearExpression {
        let terms = self
            .terms
            .iter()
            .map(|(c, subset)| {
                let subset = subset
                    .iter()
                    .map(|&m| {
                        if m.0 < NUM_ALICE {
                            MeasurementId::alice(m.0 as i64 + 1 + shift)
                        } else {
                            m
                        }
                    })
                    .collect();
                (*c, subset)
            })
            .collect();
        LinearExpression { terms }
    }

    pub fn evaluate_assignment(&self, assignment: &DeterministicAssignment) -> f64 {
        self.terms
            .iter()
            .map(|(c, subset)| c * f64::from(assignment.product(subset)))
            .sum()
    }

    pub fn evaluate_behavior(&self, behavior: &Behavior) -> Result<f64> {
        self.terms
            .iter()
            .map(|(c, subset)| Ok(c * behavior.correlator(subset)?))
            .sum()
    }

    pub fn check_scenario(&self, scenario: &Scenario) -> Result<()> {
        let n = scenario.num_measurements();
        match self.terms.iter().flat_map(|(_, s)| s).find(|m| m.0 >= n) {
            Some(m) => Err(Error::InvalidArgument(format!("measurement {} not in scenario", m.0))),
            None => Ok(()),
        }
    }

    pub fn describe(&self, scenario: &Scenario) -> String {
        let mut out = String::new();
        for (k, (c, subset)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else if k > 0 { "+" } else { "" };
            if k > 0 {
                out.push(' ');
            }
            out.push_str(sign);
            if k > 0 {
                out.push(' ');
            }
            if (c.abs() - 1.0).abs() > 0.0 {
                out.push_str(&format!("{}*", c.abs()));
            }
            out.push('<');
            out.push_str(&subset.iter().map(|&m| scenario.label(m)).collect::<Vec<_>>().join(" "));
            out.push('>');
        }
        out
    }
}

fn alice(i: i64) -> MeasurementId {
    MeasurementId::alice(i)
}

fn bob(j: usize) -> MeasurementId {
    MeasurementId::bob(j)
}

/// Pivot for which the CHSH expression uses `A1` and `A4`.
pub const CANONICAL_PIVOT: i64 = 5;

/// KCBS: `sum_i <A_i A_{i+1}>`.
pub fn kcbs_expression() -> LinearExpression {
    LinearExpression {
        terms: (1..=NUM_ALICE as i64).map(|i| (1.0, vec![alice(i), alice(i + 1)])).collect(),
    }
}

/// CHSH: `<A_{i+1}B1> + <A_{i+1}B2> + <A_{i-1}B1> - <A_{i-1}B2>`.
pub fn chsh_expression(pivot: i64) -> LinearExpression {
    let (next, prev) = (alice(pivot + 1), alice(pivot - 1));
    LinearExpression {
        terms: vec![
            (1.0, vec![next, bob(1)]),
            (1.0, vec![next, bob(2)]),
            (1.0, vec![prev, bob(1)]),
            (-1.0, vec![prev, bob(2)]),
        ],
    }
}

/// `kappa + beta` for the given CHSH pivot.
pub fn monogamy_expression(pivot: i64) -> LinearExpression {
    kcbs_expression().plus(&chsh_expression(pivot))
}

/// The KCBS-shaped group `C1`:
/// `<A_{i+1}B1> + <A_{i+1}A_{i+2}> + <A_{i+2}A_{i-2}> + <A_{i-2}A_{i-1}> + <A_{i-1}B1>`.
pub fn c1_expression(pivot: i64) -> LinearExpression {
    let i = pivot;
    LinearExpression {
        terms: vec![
            (1.0, vec![alice(i + 1), bob(1)]),
            (1.0, vec![alice(i + 1), alice(i + 2)]),
            (1.0, vec![alice(i + 2), alice(i - 2)]),
            (1.0, vec![alice(i - 2), alice(i - 1)]),
            (1.0, vec![alice(i - 1), bob(1)]),
        ],
    }
}

/// The CHSH-shaped group `C2`:
/// `<A_{i+1}A_i> + <A_{i-1}A_i> + <A_{i+1}B2> - <A_{i-1}B2>`.
pub fn c2_expression(pivot: i64) -> LinearExpression {
    let i = pivot;
    LinearExpression {
        terms: vec![
            (1.0, vec![alice(i + 1), alice(i)]),
            (1.0, vec![alice(i - 1), alice(i)]),
            (1.0, vec![alice(i + 1), bob(2)]),
            (-1.0, vec![alice(i - 1), bob(2)]),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub min: f64,
    pub max: f64,
    /// First minimizing assignment in lexicographic order.
    pub argmin: DeterministicAssignment,
    pub argmax: DeterministicAssignment,
}

/// Minimum and maximum of `expr` over every deterministic assignment of
/// `scenario`.
pub fn classical_bound(expr: &LinearExpression, scenario: &Scenario) -> Result<ClassicalBound> {
    expr.check_scenario(scenario)?;
    let mut best: Option<ClassicalBound> = None;
    for assignment in enumerate_assignments(scenario)? {
        let v = expr.evaluate_assignment(&assignment);
        match best.as_mut() {
            None => {
                best = Some(ClassicalBound {
                    min: v,
                    max: v,
                    argmin: assignment.clone(),
                    argmax: assignment,
                })
            }
            Some(b) => {
                if v < b.min {
                    b.min = v;
                    b.argmin = assignment;
                } else if v > b.max {
                    b.max = v;
                    b.argmax = assignment;
                }
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("scenario has no measurements".into()))
}

/// NCHV minimum of `sum_i <X_i X_{i+1}>` over an `n`-cycle.
pub fn cycle_bound(n: usize) -> Result<f64> {
    if n > MAX_CYCLE {
        return Err(Error::TooLarge { n, max: MAX_CYCLE });
    }
    let scenario = Scenario::cycle(n)?;
    let expr = LinearExpression {
        terms: (0..n)
            .map(|k| (1.0, vec![MeasurementId(k), MeasurementId((k + 1) % n)]))
            .collect(),
    };
    Ok(classical_bound(&expr, &scenario)?.min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_assignments(&Scenario::canonical()).unwrap().count(), 128);
        assert_eq!(enumerate_assignments(&Scenario::kcbs()).unwrap().count(), 32);
        assert_eq!(enumerate_assignments(&Scenario::independent(2)).unwrap().count(), 4);
        assert!(matches!(
            enumerate_assignments(&Scenario::independent(25)),
            Err(Error::TooLarge { n: 25, .. })
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_unique() {
        let all: Vec<_> = enumerate_assignments(&Scenario::independent(3)).unwrap().collect();
        assert_eq!(all[0].values(), &[-1, -1, -1]);
        assert_eq!(all[1].values(), &[-1, -1, 1]);
        assert_eq!(all[7].values(), &[1, 1, 1]);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn textbook_bounds() {
        let s = Scenario::canonical();
        assert_eq!(classical_bound(&kcbs_expression(), &s).unwrap().min, -3.0);
        assert_eq!(classical_bound(&kcbs_expression(), &Scenario::kcbs()).unwrap().min, -3.0);
        assert_eq!(classical_bound(&chsh_expression(CANONICAL_PIVOT), &s).unwrap().min, -2.0);
        assert_eq!(classical_bound(&monogamy_expression(CANONICAL_PIVOT), &s).unwrap().min, -5.0);
        for i in 1..=5 {
            assert_eq!(classical_bound(&c1_expression(i), &s).unwrap().min, -3.0);
            assert_eq!(classical_bound(&c2_expression(i), &s).unwrap().min, -2.0);
            assert_eq!(classical_bound(&chsh_expression(i), &s).unwrap().min, -2.0);
        }
    }

    #[test]
    fn c1_plus_c2_is_kcbs_plus_chsh() {
        let s = Scenario::canonical();
        for i in 1..=5 {
            let split = c1_expression(i).plus(&c2_expression(i));
            let joint = monogamy_expression(i);
            for a in enumerate_assignments(&s).unwrap() {
                assert_eq!(split.evaluate_assignment(&a), joint.evaluate_assignment(&a));
            }
        }
    }

    #[test]
    fn argmin_attains_both_optima() {
        let s = Scenario::canonical();
        let b = classical_bound(&monogamy_expression(CANONICAL_PIVOT), &s).unwrap();
        assert_eq!(kcbs_expression().evaluate_assignment(&b.argmin), -3.0);
        assert_eq!(chsh_expression(CANONICAL_PIVOT).evaluate_assignment(&b.argmin), -2.0);
    }

    #[test]
    fn argmin_is_first_in_lexicographic_order() {
        let s = Scenario::kcbs();
        let b = classical_bound(&kcbs_expression(), &s).unwrap();
        let first = enumerate_assignments(&s)
            .unwrap()
            .find(|a| kcbs_expression().evaluate_assignment(a) == -3.0)
            .unwrap();
        assert_eq!(b.argmin, first);
    }

    #[test]
    fn cycle_bounds() {
        assert_eq!(cycle_bound(5).unwrap(), -3.0);
        assert_eq!(cycle_bound(4).unwrap(), -4.0);
        assert_eq!(cycle_bound(3).unwrap(), -1.0);
        assert!(matches!(cycle_bound(21), Err(Error::TooLarge { .. })));
        assert!(matches!(cycle_bound(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rejects_foreign_measurements() {
        let expr = chsh_expression(5);
        assert!(classical_bound(&expr, &Scenario::kcbs()).is_err());
        assert!(LinearExpression::new(vec![(1.0, vec![])]).is_err());
        assert!(LinearExpression::new(vec![(f64::NAN, vec![MeasurementId(0)])]).is_err());
    }

    #[test]
    fn describe_reads_like_the_formula() {
        let s = Scenario::canonical();
        assert_eq!(
            chsh_expression(5).describe(&s),
            "<A1 B1> + <A1 B2> + <A4 B1> - <A4 B2>"
        );
    }
}
