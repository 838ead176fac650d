//! Random pure-state sweep of the region.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::nodisturbance::{CHSH_CLASSICAL, KCBS_CLASSICAL, MONOGAMY_BOUND};
use crate::quantum::{chsh_operator, kcbs_min_eigenvalue, kcbs_operator, Ket, JOINT_DIM};

use super::canonical_region;

const CHUNK: usize = 4096;
/// Violations kept in each list; the counts are always exact.
pub const MAX_LISTED: usize = 100;
pub const SWEEP_TOL: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct SweepViolation {
    pub index: usize,
    pub chsh: f64,
    pub kcbs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    pub chsh_min: f64,
    pub chsh_max: f64,
    pub kcbs_min: f64,
    pub kcbs_max: f64,
    pub sum_min: f64,
    pub monogamy_violation_count: usize,
    pub kcbs_floor_violation_count: usize,
    pub chsh_floor_violation_count: usize,
    pub monogamy_violations: Vec<SweepViolation>,
    pub kcbs_floor_violations: Vec<SweepViolation>,
    pub chsh_floor_violations: Vec<SweepViolation>,
    /// `kcbs < -3` and `chsh > -2`.
    pub contextual_only: usize,
    /// `chsh < -2` and `kcbs > -3`.
    pub nonlocal_only: usize,
    pub both_violated: usize,
}

impl SweepReport {
    fn empty(seed: u64) -> Self {
        Self {
            samples: 0,
            seed,
            chsh_min: f64::INFINITY,
            chsh_max: f64::NEG_INFINITY,
            kcbs_min: f64::INFINITY,
            kcbs_max: f64::NEG_INFINITY,
            sum_min: f64::INFINITY,
            monogamy_violation_count: 0,
            kcbs_floor_violation_count: 0,
            chsh_floor_violation_count: 0,
            monogamy_violations: Vec::new(),
            kcbs_floor_violations: Vec::new(),
            chsh_floor_violations: Vec::new(),
            contextual_only: 0,
            nonlocal_only: 0,
            both_violated: 0,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.monogamy_violation_count == 0 && self.kcbs_floor_violation_count == 0 && self.chsh_floor_violation_count == 0
    }

    pub fn is_two_sided(&self) -> bool {
        self.contextual_only > 0 && self.nonlocal_only > 0
    }

    fn merge(&mut self, other: SweepReport) {
        self.samples += other.samples;
        self.chsh_min = self.chsh_min.min(other.chsh_min);
        self.chsh_max = self.chsh_max.max(other.chsh_max);
        self.kcbs_min = self.kcbs_min.min(other.kcbs_min);
        self.kcbs_max = self.kcbs_max.max(other.kcbs_max);
        self.sum_min = self.sum_min.min(other.sum_min);
        self.monogamy_violation_count += other.monogamy_violation_count;
        self.kcbs_floor_violation_count += other.kcbs_floor_violation_count;
        self.chsh_floor_violation_count += other.chsh_floor_violation_count;
        for (mine, theirs) in [
            (&mut self.monogamy_violations, other.monogamy_violations),
            (&mut self.kcbs_floor_violations, other.kcbs_floor_violations),
            (&mut self.chsh_floor_violations, other.chsh_floor_violations),
        ] {
            let room = MAX_LISTED - mine.len();
            mine.extend(theirs.into_iter().take(room));
        }
        self.contextual_only += other.contextual_only;
        self.nonlocal_only += other.nonlocal_only;
        self.both_violated += other.both_violated;
    }

    fn record(&mut self, index: usize, chsh: f64, kcbs: f64, chsh_floor: f64, kcbs_floor: f64) {
        self.samples += 1;
        self.chsh_min = self.chsh_min.min(chsh);
        self.chsh_max = self.chsh_max.max(chsh);
        self.kcbs_min = self.kcbs_min.min(kcbs);
        self.kcbs_max = self.kcbs_max.max(kcbs);
        self.sum_min = self.sum_min.min(chsh + kcbs);
        let v = SweepViolation { index, chsh, kcbs };
        let checks = [
            (chsh + kcbs < MONOGAMY_BOUND - SWEEP_TOL, &mut self.monogamy_violation_count, &mut self.monogamy_violations),
            (kcbs < kcbs_floor - SWEEP_TOL, &mut self.kcbs_floor_violation_count, &mut self.kcbs_floor_violations),
            (chsh < chsh_floor - SWEEP_TOL, &mut self.chsh_floor_violation_count, &mut self.chsh_floor_violations),
        ];
        for (failed, count, list) in checks {
            if failed {
                *count += 1;
                if list.len() < MAX_LISTED {
                    list.push(v);
                }
            }
        }
        let contextual = kcbs < KCBS_CLASSICAL;
        let nonlocal = chsh < CHSH_CLASSICAL;
        match (contextual, nonlocal) {
            (true, true) => self.both_violated += 1,
            (true, false) => self.contextual_only += 1,
            (false, true) => self.nonlocal_only += 1,
            _ => {}
        }
    }
}

/// Maps `samples` Haar-random pure states to `(<CHSH>, <KCBS>)` and checks
/// the monogamy line and both spectral floors. Chunk `k` draws from stream
/// `k` of a ChaCha8 generator seeded with `seed`, so the report does not
/// depend on the thread count.
pub fn region_membership_sweep(samples: usize, seed: u64) -> SweepReport {
    let chsh = chsh_operator();
    let kcbs = kcbs_operator();
    let chsh_floor = canonical_region().m_spectrum()[0];
    let kcbs_floor = kcbs_min_eigenvalue();
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<SweepReport> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut report = SweepReport::empty(seed);
            let start = k * CHUNK;
            for index in start..(start + CHUNK).min(samples) {
                let psi = Ket::random(&mut rng, JOINT_DIM);
                report.record(index, chsh.expectation_real(&psi), kcbs.expectation_real(&psi), chsh_floor, kcbs_floor);
            }
            report
        })
        .collect();
    let mut total = SweepReport::empty(seed);
    for p in partial {
        total.merge(p);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_is_clean_and_deterministic() {
        let a = region_membership_sweep(5000, 7);
        let b = region_membership_sweep(5000, 7);
        assert_eq!(a, b);
        assert_eq!(a.samples, 5000);
        assert!(a.is_clean());
        assert!(a.sum_min >= MONOGAMY_BOUND - SWEEP_TOL);
    }

    #[test]
    fn different_seeds_differ() {
        assert_ne!(region_membership_sweep(100, 1).chsh_min, region_membership_sweep(100, 2).chsh_min);
    }

    #[test]
    fn record_classifies() {
        let mut r = SweepReport::empty(0);
        r.record(0, -1.0, -3.5, -2.8, -3.95);
        r.record(1, -2.5, -2.0, -2.8, -3.95);
        r.record(2, -3.0, -4.0, -2.8, -3.95);
        assert_eq!((r.contextual_only, r.nonlocal_only, r.both_violated), (1, 1, 1));
        assert_eq!(r.monogamy_violation_count, 1);
        assert_eq!(r.kcbs_floor_violation_count, 1);
        assert_eq!(r.chsh_floor_violation_count, 1);
        assert_eq!(r.monogamy_violations[0].index, 2);
    }
}
