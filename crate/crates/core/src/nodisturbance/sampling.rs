//! Random no-disturbance behaviors.
//!
//! Two generators:
//! * [`NdSampler::projected`] draws independent random context tables,
//!   projects them onto the affine hull of the polytope and rejects draws
//!   with negative entries.
//! * [`NdSampler::vertex_mixture`] mixes a few polytope vertices (found as
//!   LP optima of random objectives) with the uniform behavior, which
//!   reaches much closer to the boundary.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::polytope::{LinearProgram, NdConstraints, Sense, NUM_VARIABLES};
use crate::error::Result;
use crate::scenario::{Behavior, CONTEXT_OUTCOMES, NUM_CONTEXTS};

const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct NdSampler {
    /// Orthogonal projector onto the null space of the equality system,
    /// row-major `NUM_VARIABLES x NUM_VARIABLES`.
    projector: Vec<f64>,
    dimension: usize,
    vertices: Vec<Behavior>,
}

impl NdSampler {
    /// Sampler without a vertex pool; [`NdSampler::vertex_mixture`] then
    /// falls back to projected draws.
    pub fn new() -> Self {
        let constraints = NdConstraints::canonical();
        let basis = orthonormal_row_basis(&constraints.rows);
        let mut projector = vec![0.0; NUM_VARIABLES * NUM_VARIABLES];
        for r in 0..NUM_VARIABLES {
            projector[r * NUM_VARIABLES + r] = 1.0;
        }
        for q in &basis {
            for r in 0..NUM_VARIABLES {
                for c in 0..NUM_VARIABLES {
                    projector[r * NUM_VARIABLES + c] -= q[r] * q[c];
                }
            }
        }
        Self {
            projector,
            dimension: NUM_VARIABLES - basis.len(),
            vertices: Vec::new(),
        }
    }

    /// Adds `count` vertices, each the optimum of a random Gaussian
    /// objective.
    pub fn with_vertices<R: Rng + ?Sized>(mut self, rng: &mut R, count: usize) -> Result<Self> {
        for _ in 0..count {
            let objective: Vec<f64> = (0..NUM_VARIABLES).map(|_| StandardNormal.sample(rng)).collect();
            let opt = LinearProgram::with_objective(objective, Sense::Min).solve()?;
            self.vertices.push(opt.witness);
        }
        Ok(self)
    }

    /// Dimension of the affine hull of the polytope.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Behavior] {
        &self.vertices
    }

    /// Uniform behavior plus a random scaled step inside the affine hull;
    /// steps leaving the positive orthant are redrawn.
    pub fn projected<R: Rng + ?Sized>(&self, rng: &mut R) -> Behavior {
        let uniform = 1.0 / CONTEXT_OUTCOMES as f64;
        loop {
            let mut step = [0.0; NUM_VARIABLES];
            for k in 0..NUM_CONTEXTS {
                // Dirichlet(1) table minus the uniform table
                let draws: [f64; CONTEXT_OUTCOMES] = std::array::from_fn(|_| Exp1.sample(rng));
                let total: f64 = draws.iter().sum();
                for o in 0..CONTEXT_OUTCOMES {
                    step[k * CONTEXT_OUTCOMES + o] = draws[o] / total - uniform;
                }
            }
            let scale: f64 = rng.random();
            let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
            let mut negative = false;
            for r in 0..NUM_VARIABLES {
                let row = &self.projector[r * NUM_VARIABLES..(r + 1) * NUM_VARIABLES];
                let v = uniform + scale * row.iter().zip(&step).map(|(a, b)| a * b).sum::<f64>();
                if v < 0.0 {
                    negative = true;
                    break;
                }
                tables[r / CONTEXT_OUTCOMES][r % CONTEXT_OUTCOMES] = v;
            }
            if negative {
                continue;
            }
            if let Ok(b) = Behavior::new(tables) {
                return b;
            }
        }
    }

    /// Convex combination of one to four random pool vertices and the
    /// uniform behavior (uniform weight in `[0, 0.5)`).
    pub fn vertex_mixture<R: Rng + ?Sized>(&self, rng: &mut R) -> Behavior {
        if self.vertices.is_empty() {
            return self.projected(rng);
        }
        let parts = rng.random_range(1..=4usize);
        let weights: Vec<f64> = (0..parts).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = weights.iter().sum();
        let uniform_weight: f64 = 0.5 * rng.random::<f64>();
        let mut tables = [[0.0; CONTEXT_OUTCOMES]; NUM_CONTEXTS];
        for w in &weights {
            let v = &self.vertices[rng.random_range(0..self.vertices.len())];
            let w = (1.0 - uniform_weight) * w / total;
            for (row, vrow) in tables.iter_mut().zip(v.tables()) {
                for (p, q) in row.iter_mut().zip(vrow) {
                    *p += w * q;
                }
            }
        }
        for row in tables.iter_mut() {
            for p in row.iter_mut() {
                *p += uniform_weight / CONTEXT_OUTCOMES as f64;
            }
        }
        Behavior::from_approximate(tables).expect("mixture of behaviors is a behavior")
    }
}

impl Default for NdSampler {
    fn default() -> Self {
        Self::new()
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass; rows whose
/// residual falls below [`RANK_TOL`] are dependent and dropped.
fn orthonormal_row_basis(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > RANK_TOL {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}
