//! The no-disturbance polytope of the canonical scenario as a linear
//! program over the 80 context-outcome probabilities.

use serde::{Deserialize, Serialize};

use crate::classical::LinearExpression;
use crate::error::{Error, Result};
use crate::lp;
use crate::scenario::{
    canonical_scenario, outcome_sign, Behavior, CONTEXT_OUTCOMES, NUM_CONTEXTS,
};

pub const NUM_VARIABLES: usize = NUM_CONTEXTS * CONTEXT_OUTCOMES;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

#[inline]
pub fn variable(context: usize, outcome: usize) -> usize {
    context * CONTEXT_OUTCOMES + outcome
}

/// Equality system of the polytope: rows `0..NUM_CONTEXTS` normalize each
/// context, the rest tie every shared marginal to its value in the first
/// context containing it.
#[derive(Clone, Debug)]
pub struct NdConstraints {
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl NdConstraints {
    pub fn canonical() -> Self {
        let scenario = canonical_scenario();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..NUM_CONTEXTS {
            let mut row = vec![0.0; NUM_VARIABLES];
            for o in 0..CONTEXT_OUTCOMES {
                row[variable(k, o)] = 1.0;
            }
            rows.push(row);
            rhs.push(1.0);
        }
        for subset in scenario.shared_subsets() {
            let containing = scenario.contexts_containing(&subset);
            let reference = containing[0];
            for &other in &containing[1..] {
                for event in 0..(1usize << subset.len()) {
                    let mut row = vec![0.0; NUM_VARIABLES];
                    for (k, sign) in [(reference, 1.0), (other, -1.0)] {
                        let ctx = &scenario.contexts()[k];
                        for o in 0..CONTEXT_OUTCOMES {
                            if restrict(ctx.members(), o, &subset) == event {
                                row[variable(k, o)] += sign;
                            }
                        }
                    }
                    rows.push(row);
                    rhs.push(0.0);
                }
            }
        }
        Self { rows, rhs }
    }

    pub fn normalization_rows(&self) -> usize {
        NUM_CONTEXTS
    }

    pub fn marginal_rows(&self) -> usize {
        self.rows.len() - NUM_CONTEXTS
    }

    /// Largest equality residual of `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Index of the event `subset` takes within context outcome `o`.
fn restrict(
    members: &[crate::scenario::MeasurementId],
    o: usize,
    subset: &[crate::scenario::MeasurementId],
) -> usize {
    subset.iter().fold(0usize, |acc, m| {
        let pos = members.iter().position(|x| x == m).expect("subset inside context");
        (acc << 1) | usize::from(outcome_sign(o, pos, members.len()) > 0)
    })
}

/// Linear functional on the 80 probabilities equal to `expr` on every
/// behavior. Each term is read off the first context containing it.
pub fn objective_vector(expr: &LinearExpression) -> Result<Vec<f64>> {
    let scenario = canonical_scenario();
    let mut c = vec![0.0; NUM_VARIABLES];
    for (coef, subset) in expr.terms() {
        let k = scenario
            .find_context(subset)
            .ok_or_else(|| Error::SubsetNotMeasurable(scenario.subset_label(subset)))?;
        let members = scenario.contexts()[k].members();
        let positions: Vec<usize> = subset
            .iter()
            .map(|m| members.iter().position(|x| x == m).unwrap())
            .collect();
        for o in 0..CONTEXT_OUTCOMES {
            let s: i8 = positions.iter().map(|&p| outcome_sign(o, p, members.len())).product();
            c[variable(k, o)] += coef * f64::from(s);
        }
    }
    Ok(c)
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub constraints: NdConstraints,
    pub objective: Vec<f64>,
    pub sense: Sense,
}

#[derive(Clone, Debug, Serialize)]
pub struct NdOptimum {
    pub value: f64,
    pub witness: Behavior,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(expr: &LinearExpression, sense: Sense) -> Result<Self> {
        Ok(Self::with_objective(objective_vector(expr)?, sense))
    }

    pub fn with_objective(objective: Vec<f64>, sense: Sense) -> Self {
        assert_eq!(objective.len(), NUM_VARIABLES);
        Self {
            constraints: NdConstraints::canonical(),
            objective,
            sense,
        }
    }

    pub fn solve(&self) -> Result<NdOptimum> {
        let flip = match self.sense {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let cost: Vec<f64> = self.objective.iter().map(|c| flip * c).collect();
        let sol = lp::minimize(&cost, &self.constraints.rows, &self.constraints.rhs)?;
        let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
        for (k, table) in tables.iter_mut().enumerate() {
            for (o, p) in table.iter_mut().enumerate() {
                *p = sol.x[variable(k, o)];
            }
        }
        let witness = Behavior::from_approximate(tables)?;
        Ok(NdOptimum {
            value: flip * sol.objective,
            witness,
            iterations: sol.iterations,
        })
    }
}

/// Exact optimum of `expr` over all no-disturbance behaviors.
pub fn nd_optimum(expr: &LinearExpression, sense: Sense) -> Result<NdOptimum> {
    LinearProgram::new(expr, sense)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{c1_expression, c2_expression, chsh_expression, kcbs_expression, monogamy_expression};

    #[test]
    fn constraint_counts() {
        let c = NdConstraints::canonical();
        assert_eq!(c.normalization_rows(), 10);
        // singletons: A_i in 4 contexts (3 ties x 2 events) x5, B_j in 5 (4 x 2) x2
        // pairs: A_iA_{i+1} 5 x 1 x 4, A_iB_j 10 x 1 x 4
        assert_eq!(c.marginal_rows(), 30 + 16 + 20 + 40);
        assert!(c.residual(&Behavior::uniform().to_vector()) < 1e-15);
    }

    #[test]
    fn objective_matches_direct_evaluation() {
        let p = Behavior::deterministic(&[1, -1, 1, 1, -1, 1, -1]).mix(&Behavior::uniform(), 0.6);
        for expr in [kcbs_expression(), chsh_expression(5), c1_expression(2), c2_expression(4)] {
            let c = objective_vector(&expr).unwrap();
            let lin: f64 = c.iter().zip(p.to_vector()).map(|(a, b)| a * b).sum();
            assert!((lin - expr.evaluate_behavior(&p).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn nd_bounds() {
        let k = nd_optimum(&kcbs_expression(), Sense::Min).unwrap();
        assert!((k.value + 5.0).abs() < 1e-9);
        assert!((k.witness.kcbs_value() + 5.0).abs() < 1e-8);
        assert!(k.witness.is_no_disturbance(1e-9));
        let b = nd_optimum(&chsh_expression(5), Sense::Min).unwrap();
        assert!((b.value + 4.0).abs() < 1e-9);
        let m = nd_optimum(&monogamy_expression(5), Sense::Min).unwrap();
        assert!((m.value + 5.0).abs() < 1e-9);
        let kmax = nd_optimum(&kcbs_expression(), Sense::Max).unwrap();
        assert!((kmax.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn unmeasurable_objective() {
        use crate::scenario::MeasurementId;
        let e = LinearExpression::new(vec![(1.0, vec![MeasurementId::bob(1), MeasurementId::bob(2)])]).unwrap();
        assert!(matches!(nd_optimum(&e, Sense::Min), Err(Error::SubsetNotMeasurable(_))));
    }
}
