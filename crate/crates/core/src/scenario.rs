//! The measurement scenario: Alice's five cyclically compatible measurements
//! `A1..A5`, Bob's two incompatible measurements `B1, B2`, the ten maximal
//! contexts `{Ai, Ai+1, Bj}` and behaviors over them.
//!
//! Only maximal contexts are stored. Pair and singleton marginals are always
//! derived from the context tables.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_ALICE: usize = 5;
pub const NUM_MEASUREMENTS: usize = 7;
pub const NUM_CONTEXTS: usize = 10;
pub const CONTEXT_OUTCOMES: usize = 8;

/// Default tolerance for constructed data.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Tolerance for data derived from eigensolver output.
pub const EIGEN_TOL: f64 = 1e-10;

/// Index of a measurement inside its scenario.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementId(pub usize);

impl MeasurementId {
    /// Alice's `A_i`. The index is taken modulo 5 with representatives `1..=5`,
    /// so `alice(0) == alice(5)` and `alice(6) == alice(1)`.
    pub fn alice(i: i64) -> Self {
        Self((i - 1).rem_euclid(NUM_ALICE as i64) as usize)
    }

    /// Bob's `B_j`, `j` in `{1, 2}`.
    pub fn bob(j: usize) -> Self {
        assert!(j == 1 || j == 2, "Bob has measurements B1 and B2 only, got B{j}");
        Self(NUM_ALICE + j - 1)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub id: MeasurementId,
    pub label: String,
}

impl Measurement {
    /// Every measurement is dichotomic.
    pub const OUTCOMES: [i8; 2] = [-1, 1];
}

/// A set of jointly measurable measurements, in a fixed order. The order
/// fixes the layout of the outcome table: leftmost member most significant,
/// `-1` before `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    members: Vec<MeasurementId>,
}

impl Context {
    pub fn new(members: Vec<MeasurementId>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[MeasurementId] {
        &self.members
    }

    pub fn arity(&self) -> usize {
        self.members.len()
    }

    pub fn position(&self, id: MeasurementId) -> Option<usize> {
        self.members.iter().position(|&m| m == id)
    }

    pub fn contains(&self, id: MeasurementId) -> bool {
        self.members.contains(&id)
    }

    pub fn contains_all(&self, subset: &[MeasurementId]) -> bool {
        subset.iter().all(|&m| self.contains(m))
    }
}

/// Sign (`-1` or `+1`) of the measurement at `pos` within outcome index
/// `outcome` of a context with `arity` members.
#[inline]
pub fn outcome_sign(outcome: usize, pos: usize, arity: usize) -> i8 {
    if (outcome >> (arity - 1 - pos)) & 1 == 1 {
        1
    } else {
        -1
    }
}

/// Compatibility structure plus measurement labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    measurements: Vec<Measurement>,
    contexts: Vec<Context>,
}

impl Scenario {
    fn from_labels(labels: Vec<String>, contexts: Vec<Context>) -> Self {
        let measurements = labels
            .into_iter()
            .enumerate()
            .map(|(k, label)| Measurement {
                id: MeasurementId(k),
                label,
            })
            .collect();
        Self {
            measurements,
            contexts,
        }
    }

    /// The seven-measurement, ten-context scenario. Context `k` is
    /// `{A_i, A_{i+1}, B_j}` with `k = 2(i-1) + (j-1)`.
    pub fn canonical() -> Self {
        let mut labels: Vec<String> = (1..=NUM_ALICE).map(|i| format!("A{i}")).collect();
        labels.push("B1".into());
        labels.push("B2".into());
        let contexts = (1..=NUM_ALICE as i64)
            .flat_map(|i| {
                (1..=2).map(move |j| {
                    Context::new(vec![
                        MeasurementId::alice(i),
                        MeasurementId::alice(i + 1),
                        MeasurementId::bob(j),
                    ])
                })
            })
            .collect();
        Self::from_labels(labels, contexts)
    }

    /// Alice's side only: the KCBS 5-cycle with labels `A1..A5`. Measurement
    /// ids coincide with those of the canonical scenario.
    pub fn kcbs() -> Self {
        let labels = (1..=NUM_ALICE).map(|i| format!("A{i}")).collect();
        let contexts = (1..=NUM_ALICE as i64)
            .map(|i| Context::new(vec![MeasurementId::alice(i), MeasurementId::alice(i + 1)]))
            .collect();
        Self::from_labels(labels, contexts)
    }

    /// An `n`-cycle `X1..Xn` whose contexts are the edges `{Xi, Xi+1}`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("a cycle needs at least 3 vertices, got {n}")));
        }
        let labels = (1..=n).map(|i| format!("X{i}")).collect();
        let contexts = (0..n)
            .map(|k| Context::new(vec![MeasurementId(k), MeasurementId((k + 1) % n)]))
            .collect();
        Ok(Self::from_labels(labels, contexts))
    }

    /// Independent measurements `X1..Xn` with no compatibilities beyond
    /// singletons.
    pub fn independent(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("X{i}")).collect();
        let contexts = (0..n).map(|k| Context::new(vec![MeasurementId(k)])).collect();
        Self::from_labels(labels, contexts)
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn num_measurements(&self) -> usize {
        self.measurements.len()
    }

    pub fn label(&self, id: MeasurementId) -> &str {
        &self.measurements[id.0].label
    }

    pub fn id_of(&self, label: &str) -> Option<MeasurementId> {
        self.measurements.iter().find(|m| m.label == label).map(|m| m.id)
    }

    pub fn subset_label(&self, subset: &[MeasurementId]) -> String {
        subset.iter().map(|&m| self.label(m)).collect::<Vec<_>>().join(",")
    }

    pub fn context_label(&self, k: usize) -> String {
        self.subset_label(self.contexts[k].members())
    }

    /// Two distinct measurements are compatible when some context holds both.
    pub fn compatible(&self, a: MeasurementId, b: MeasurementId) -> bool {
        a != b && self.contexts.iter().any(|c| c.contains(a) && c.contains(b))
    }

    /// First context (in scenario order) containing every member of `subset`.
    pub fn find_context(&self, subset: &[MeasurementId]) -> Option<usize> {
        self.contexts.iter().position(|c| c.contains_all(subset))
    }

    /// Contexts containing every member of `subset`, in scenario order.
    pub fn contexts_containing(&self, subset: &[MeasurementId]) -> Vec<usize> {
        (0..self.contexts.len())
            .filter(|&k| self.contexts[k].contains_all(subset))
            .collect()
    }

    /// Proper sub-marginals that are shared by two or more contexts. These
    /// are exactly the marginals the no-disturbance principle constrains.
    /// Each subset is sorted by measurement id.
    pub fn shared_subsets(&self) -> Vec<Vec<MeasurementId>> {
        let mut out: Vec<Vec<MeasurementId>> = Vec::new();
        for ctx in &self.contexts {
            let n = ctx.arity();
            for mask in 1u32..(1 << n) - 1 {
                let mut subset: Vec<MeasurementId> = (0..n)
                    .filter(|&p| mask & (1 << p) != 0)
                    .map(|p| ctx.members()[p])
                    .collect();
                subset.sort();
                if !out.contains(&subset) && self.contexts_containing(&subset).len() > 1 {
                    out.push(subset);
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// The shared canonical scenario.
pub fn canonical_scenario() -> &'static Scenario {
    static SCENARIO: OnceLock<Scenario> = OnceLock::new();
    SCENARIO.get_or_init(Scenario::canonical)
}

/// Index of the canonical context `{A_i, A_{i+1}, B_j}`; `i` is cyclic.
pub fn canonical_context_index(i: i64, j: usize) -> usize {
    2 * MeasurementId::alice(i).0 + (j - 1)
}

/// Mean value of a product of outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlator {
    pub subset: Vec<MeasurementId>,
    pub value: f64,
}

/// A marginal that disagrees between two contexts containing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NdViolation {
    pub subset: Vec<MeasurementId>,
    pub label: String,
    pub contexts: (usize, usize),
    pub deviation: f64,
}

/// Outcome distributions for every canonical context.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    tables: [[f64; CONTEXT_OUTCOMES]; NUM_CONTEXTS],
}

impl Behavior {
    /// Validates nonnegativity and normalization of each table within
    /// [`DEFAULT_TOL`].
    pub fn new(tables: [[f64; CONTEXT_OUTCOMES]; NUM_CONTEXTS]) -> Result<Self> {
        let scenario = canonical_scenario();
        for (k, table) in tables.iter().enumerate() {
            if let Some(p) = table.iter().find(|p| !p.is_finite() || **p < -DEFAULT_TOL || **p > 1.0 + DEFAULT_TOL) {
                return Err(Error::InvalidBehavior(format!(
                    "context {} has probability {p} outside [0, 1]",
                    scenario.context_label(k)
                )));
            }
            let sum: f64 = table.iter().sum();
            if (sum - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::InvalidBehavior(format!(
                    "context {} sums to {sum}",
                    scenario.context_label(k)
                )));
            }
        }
        Ok(Self { tables })
    }

    /// Clips negative entries to zero and rescales every table to sum to one.
    /// Intended for numerically produced tables that are feasible up to
    /// rounding.
    pub fn from_approximate(mut tables: [[f64; CONTEXT_OUTCOMES]; NUM_CONTEXTS]) -> Result<Self> {
        for table in tables.iter_mut() {
            for p in table.iter_mut() {
                *p = p.max(0.0);
            }
            let sum: f64 = table.iter().sum();
            if !(sum > 0.0) || !sum.is_finite() {
                return Err(Error::InvalidBehavior("context table has no mass".into()));
            }
            for p in table.iter_mut() {
                *p /= sum;
            }
        }
        Self::new(tables)
    }

    pub fn uniform() -> Self {
        Self {
            tables: [[1.0 / CONTEXT_OUTCOMES as f64; CONTEXT_OUTCOMES]; NUM_CONTEXTS],
        }
    }

    /// Point-mass behavior of a deterministic ±1 value per measurement
    /// (indexed by measurement id).
    pub fn deterministic(values: &[i8; NUM_MEASUREMENTS]) -> Self {
        let scenario = canonical_scenario();
        let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
        for (k, ctx) in scenario.contexts().iter().enumerate() {
            let idx = ctx
                .members()
                .iter()
                .fold(0usize, |acc, m| (acc << 1) | usize::from(values[m.0] > 0));
            tables[k][idx] = 1.0;
        }
        Self { tables }
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Behavior, lambda: f64) -> Self {
        let mut tables = self.tables;
        for (row, orow) in tables.iter_mut().zip(other.tables.iter()) {
            for (p, q) in row.iter_mut().zip(orow.iter()) {
                *p = lambda * *p + (1.0 - lambda) * q;
            }
        }
        Self { tables }
    }

    pub fn tables(&self) -> &[[f64; CONTEXT_OUTCOMES]; NUM_CONTEXTS] {
        &self.tables
    }

    pub fn table(&self, context: usize) -> &[f64; CONTEXT_OUTCOMES] {
        &self.tables[context]
    }

    /// Flattened probabilities, context-major.
    pub fn to_vector(&self) -> Vec<f64> {
        self.tables.iter().flatten().copied().collect()
    }

    /// Distribution of `subset` (in the given order) computed inside one
    /// context. Panics if the context does not contain the subset.
    pub fn marginal_in_context(&self, context: usize, subset: &[MeasurementId]) -> Vec<f64> {
        let ctx = &canonical_scenario().contexts()[context];
        let positions: Vec<usize> = subset
            .iter()
            .map(|&m| ctx.position(m).expect("subset must lie inside the context"))
            .collect();
        let arity = ctx.arity();
        let mut out = vec![0.0; 1 << subset.len()];
        for (outcome, p) in self.tables[context].iter().enumerate() {
            let idx = positions.iter().fold(0usize, |acc, &pos| {
                (acc << 1) | usize::from(outcome_sign(outcome, pos, arity) > 0)
            });
            out[idx] += p;
        }
        out
    }

    /// Marginal of `subset` taken from the first context containing it.
    pub fn marginal(&self, subset: &[MeasurementId]) -> Result<Vec<f64>> {
        let k = measurable_context(subset)?;
        Ok(self.marginal_in_context(k, subset))
    }

    pub fn correlator_in_context(&self, context: usize, subset: &[MeasurementId]) -> f64 {
        let ctx = &canonical_scenario().contexts()[context];
        let positions: Vec<usize> = subset
            .iter()
            .map(|&m| ctx.position(m).expect("subset must lie inside the context"))
            .collect();
        self.tables[context]
            .iter()
            .enumerate()
            .map(|(outcome, p)| {
                let sign: i8 = positions
                    .iter()
                    .map(|&pos| outcome_sign(outcome, pos, ctx.arity()))
                    .product();
                f64::from(sign) * p
            })
            .sum()
    }

    /// `<prod_{m in subset} m>` from the first context containing `subset`.
    pub fn correlator(&self, subset: &[MeasurementId]) -> Result<f64> {
        let k = measurable_context(subset)?;
        Ok(self.correlator_in_context(k, subset))
    }

    /// Every correlator an experiment on this scenario can estimate:
    /// `<Ai Ai+1>`, `<Ai Bj>` and `<Ai Ai+1 Bj>`.
    pub fn correlators(&self) -> Vec<Correlator> {
        let mut subsets: Vec<Vec<MeasurementId>> = Vec::new();
        for i in 1..=NUM_ALICE as i64 {
            subsets.push(vec![MeasurementId::alice(i), MeasurementId::alice(i + 1)]);
        }
        for i in 1..=NUM_ALICE as i64 {
            for j in 1..=2 {
                subsets.push(vec![MeasurementId::alice(i), MeasurementId::bob(j)]);
            }
        }
        for i in 1..=NUM_ALICE as i64 {
            for j in 1..=2 {
                subsets.push(vec![MeasurementId::alice(i), MeasurementId::alice(i + 1), MeasurementId::bob(j)]);
            }
        }
        subsets
            .into_iter()
            .map(|subset| {
                let value = self.correlator(&subset).expect("canonical subsets are measurable");
                Correlator { subset, value }
            })
            .collect()
    }

    /// `sum_i <A_i A_{i+1}>`.
    pub fn kcbs_value(&self) -> f64 {
        (1..=NUM_ALICE as i64)
            .map(|i| self.pair(MeasurementId::alice(i), MeasurementId::alice(i + 1)))
            .sum()
    }

    /// `<A_{i+1} B1> + <A_{i+1} B2> + <A_{i-1} B1> - <A_{i-1} B2>`. Pivot
    /// `i = 5` uses `A1` and `A4`.
    pub fn chsh_value(&self, pivot: i64) -> f64 {
        let (next, prev) = (MeasurementId::alice(pivot + 1), MeasurementId::alice(pivot - 1));
        let (b1, b2) = (MeasurementId::bob(1), MeasurementId::bob(2));
        self.pair(next, b1) + self.pair(next, b2) + self.pair(prev, b1) - self.pair(prev, b2)
    }

    fn pair(&self, a: MeasurementId, b: MeasurementId) -> f64 {
        self.correlator(&[a, b]).expect("canonical pair is measurable")
    }

    /// Every shared marginal whose distributions differ by more than `tol`
    /// between two containing contexts. One entry per marginal, reporting
    /// the worst context pair.
    pub fn check_no_disturbance(&self, tol: f64) -> Vec<NdViolation> {
        let scenario = canonical_scenario();
        let mut violations = Vec::new();
        for subset in scenario.shared_subsets() {
            let containing = scenario.contexts_containing(&subset);
            let marginals: Vec<Vec<f64>> = containing
                .iter()
                .map(|&k| self.marginal_in_context(k, &subset))
                .collect();
            let mut worst: Option<(f64, usize, usize)> = None;
            for a in 0..containing.len() {
                for b in a + 1..containing.len() {
                    let dev = marginals[a]
                        .iter()
                        .zip(&marginals[b])
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    if dev > tol && worst.map_or(true, |(w, _, _)| dev > w) {
                        worst = Some((dev, containing[a], containing[b]));
                    }
                }
            }
            if let Some((deviation, ka, kb)) = worst {
                violations.push(NdViolation {
                    label: scenario.subset_label(&subset),
                    subset,
                    contexts: (ka, kb),
                    deviation,
                });
            }
        }
        violations
    }

    pub fn is_no_disturbance(&self, tol: f64) -> bool {
        self.check_no_disturbance(tol).is_empty()
    }

    pub(crate) fn require_no_disturbance(&self, tol: f64) -> Result<()> {
        let violations = self.check_no_disturbance(tol);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::NotNoDisturbance {
                count: violations.len(),
                worst: violations.iter().map(|v| v.deviation).fold(0.0, f64::max),
            })
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn measurable_context(subset: &[MeasurementId]) -> Result<usize> {
    let scenario = canonical_scenario();
    if subset.is_empty() || subset.iter().any(|m| m.0 >= NUM_MEASUREMENTS) {
        return Err(Error::SubsetNotMeasurable(format!("{subset:?}")));
    }
    scenario
        .find_context(subset)
        .ok_or_else(|| Error::SubsetNotMeasurable(scenario.subset_label(subset)))
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scenario = canonical_scenario();
        for (k, table) in self.tables.iter().enumerate() {
            write!(f, "{:>9}:", scenario.context_label(k))?;
            for p in table {
                write!(f, " {p:.6}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// JSON: {"A1,A2,B1": [8 probabilities], ...}. Keys sort lexicographically,
// which coincides with the canonical context order.
impl Serialize for Behavior {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let scenario = canonical_scenario();
        let map: BTreeMap<String, [f64; CONTEXT_OUTCOMES]> = self
            .tables
            .iter()
            .enumerate()
            .map(|(k, t)| (scenario.context_label(k), *t))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Behavior {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let scenario = canonical_scenario();
        let mut map = BTreeMap::<String, [f64; CONTEXT_OUTCOMES]>::deserialize(deserializer)?;
        let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
        for (k, table) in tables.iter_mut().enumerate() {
            let label = scenario.context_label(k);
            *table = map
                .remove(&label)
                .ok_or_else(|| D::Error::custom(format!("missing context {label}")))?;
        }
        if let Some(extra) = map.keys().next() {
            return Err(D::Error::custom(format!("unknown context {extra}")));
        }
        Behavior::new(tables).map_err(D::Error::custom)
    }
}
