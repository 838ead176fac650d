//! The quantum region of attainable `(<CHSH>, <KCBS>)` pairs.
//!
//! The KCBS operator is `N ⊕ N` and the CHSH operator `M ⊕ -M` on the two
//! three-dimensional blocks spanned by `{|01>, |10>, |21>}` (plus branch) and
//! `{|00>, -|11>, |20>}` (minus branch). Within a block every real unit
//! vector is
//!
//! `|θ, φ> = cos θ |a> + sin θ cos φ |b> + sin θ sin φ |c>`
//!
//! with `|a> = (0, 0, 1)` and `|b>, |c>` the eigenvectors of the upper-left
//! 2x2 corner of `M`. `<N>` depends on `θ` only, so each boundary point is an
//! extremum of `<M>` over `φ` at fixed `θ`.

mod boundary;
mod sweep;

pub use boundary::{
    in_boundary_domain, region_coordinates, BoundarySample, FgCoefficients, Side, TouchingPoint, BOUNDARY_CSV_HEADER,
    CURVE_EXCLUSION,
};
pub use sweep::{region_membership_sweep, SweepReport, SweepViolation, MAX_LISTED, SWEEP_TOL};

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    block_decompose, chsh_operator, eigensystem, kcbs_min_eigenvalue, n_matrix, real_block, ComplexMatrix,
};

/// Window around multiples of π/2 where the closed-form `θ(φ)` is
/// rejected outright.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// `+1` for the plus block (`M`), `-1` for the minus block (`-M`).
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub chsh: f64,
    pub kcbs: f64,
    pub branch: Branch,
}

impl RegionPoint {
    pub fn sum(&self) -> f64 {
        self.chsh + self.kcbs
    }

    pub fn distance_to(&self, chsh: f64, kcbs: f64) -> f64 {
        (self.chsh - chsh).hypot(self.kcbs - kcbs)
    }
}

/// `a = (0,0,1)`, `b = (α, β, 0)`, `c = (-β, α, 0)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct RegionBasis {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub alpha: f64,
    pub beta: f64,
}

/// Coefficients of `<M>_{θ,φ} = γ1 cos²θ + (γ2 + γ3 cos 2φ) sin²θ + cos θ sin θ (γ4 cos φ + γ5 sin φ)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Gammas {
    pub gamma: [f64; 5],
}

impl Gammas {
    /// `γ_k`, one-based.
    pub fn get(&self, k: usize) -> f64 {
        self.gamma[k - 1]
    }
}

type Mat3 = [[f64; 3]; 3];

fn quad(m: &Mat3, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|j| u[i] * m[i][j] * v[j]).sum::<f64>()).sum()
}

/// All constants of the region, computed from `M`.
#[derive(Clone, Debug)]
pub struct QuantumRegion {
    m: Mat3,
    n: Mat3,
    basis: RegionBasis,
    gammas: Gammas,
    m_spectrum: [f64; 3],
}

impl QuantumRegion {
    /// Region of the canonical CHSH operator.
    pub fn new() -> Result<Self> {
        Self::from_chsh(&chsh_operator())
    }

    /// Region of a CHSH-like operator that must split as `M ⊕ -M`.
    pub fn from_chsh(chsh: &ComplexMatrix) -> Result<Self> {
        let blocks = block_decompose(chsh)?;
        if blocks.m.entries().iter().any(|z| z.im.abs() > 1e-12) {
            return Err(Error::InvalidArgument("block M must be real".into()));
        }
        Self::from_m(real_block(&blocks.m))
    }

    pub fn from_m(m: Mat3) -> Result<Self> {
        let corner = ComplexMatrix::from_real(&[vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]);
        let es = eigensystem(&corner)?;
        // b minimizes the corner, c maximizes it
        let low = es.vector(0);
        let (mut alpha, mut beta) = (low.amplitudes()[0].re, low.amplitudes()[1].re);
        if alpha < 0.0 || (alpha == 0.0 && beta < 0.0) {
            alpha = -alpha;
            beta = -beta;
        }
        let basis = RegionBasis {
            a: [0.0, 0.0, 1.0],
            b: [alpha, beta, 0.0],
            c: [-beta, alpha, 0.0],
            alpha,
            beta,
        };
        let (a, b, c) = (&basis.a, &basis.b, &basis.c);
        let gammas = Gammas {
            gamma: [
                quad(&m, a, a),
                (quad(&m, b, b) + quad(&m, c, c)) / 2.0,
                (quad(&m, b, b) - quad(&m, c, c)) / 2.0,
                2.0 * quad(&m, a, b),
                2.0 * quad(&m, a, c),
            ],
        };
        let spectrum = eigensystem(&ComplexMatrix::from_real(&m.map(|r| r.to_vec())))?;
        Ok(Self {
            m,
            n: n_matrix(),
            basis,
            gammas,
            m_spectrum: [spectrum.values[0], spectrum.values[1], spectrum.values[2]],
        })
    }

    pub fn m(&self) -> &Mat3 {
        &self.m
    }

    pub fn n(&self) -> &Mat3 {
        &self.n
    }

    pub fn basis(&self) -> &RegionBasis {
        &self.basis
    }

    pub fn gammas(&self) -> &Gammas {
        &self.gammas
    }

    /// Eigenvalues of `M`, ascending.
    pub fn m_spectrum(&self) -> [f64; 3] {
        self.m_spectrum
    }

    /// `|θ, φ>` in block coordinates.
    pub fn state(&self, theta: f64, phi: f64) -> [f64; 3] {
        let (ca, cb, cc) = (theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin());
        let RegionBasis { a, b, c, .. } = &self.basis;
        std::array::from_fn(|i| ca * a[i] + cb * b[i] + cc * c[i])
    }

    /// Closed form of `<M>_{θ,φ}`.
    pub fn expectation_m(&self, theta: f64, phi: f64) -> f64 {
        let g = &self.gammas.gamma;
        let (ct, st) = (theta.cos(), theta.sin());
        g[0] * ct * ct + (g[1] + g[2] * (2.0 * phi).cos()) * st * st + ct * st * (g[3] * phi.cos() + g[4] * phi.sin())
    }

    /// Closed form of `<N>_θ = -√5 + (5 - 3√5) cos 2θ`.
    pub fn expectation_n(&self, theta: f64) -> f64 {
        let r5 = 5f64.sqrt();
        -r5 + (5.0 - 3.0 * r5) * (2.0 * theta).cos()
    }

    /// `<θ,φ|M|θ,φ>` by direct matrix evaluation.
    pub fn matrix_expectation_m(&self, theta: f64, phi: f64) -> f64 {
        let v = self.state(theta, phi);
        quad(&self.m, &v, &v)
    }

    /// `<θ,φ|N|θ,φ>` by direct matrix evaluation.
    pub fn matrix_expectation_n(&self, theta: f64, phi: f64) -> f64 {
        let v = self.state(theta, phi);
        quad(&self.n, &v, &v)
    }

    /// `∂<M>/∂φ`.
    pub fn dm_dphi(&self, theta: f64, phi: f64) -> f64 {
        let g = &self.gammas.gamma;
        let (ct, st) = (theta.cos(), theta.sin());
        -2.0 * g[2] * (2.0 * phi).sin() * st * st + ct * st * (g[4] * phi.cos() - g[3] * phi.sin())
    }

    /// `∂<M>/∂θ`.
    pub fn dm_dtheta(&self, theta: f64, phi: f64) -> f64 {
        let g = &self.gammas.gamma;
        let big_g = g[1] + g[2] * (2.0 * phi).cos();
        let h = g[3] * phi.cos() + g[4] * phi.sin();
        (big_g - g[0]) * (2.0 * theta).sin() + h * (2.0 * theta).cos()
    }

    /// Point of `|θ,φ>` in the given block.
    pub fn point(&self, theta: f64, phi: f64, branch: Branch) -> RegionPoint {
        RegionPoint {
            chsh: branch.sign() * self.expectation_m(theta, phi),
            kcbs: self.expectation_n(theta),
            branch,
        }
    }

    /// `θ ∈ [0, π)` at which `<M>` is stationary in `φ`:
    ///
    /// `tan θ = csc 2φ (γ5 cos φ - γ4 sin φ) / (2 γ3)`.
    pub fn boundary_theta(&self, phi: f64) -> Result<f64> {
        let s2 = (2.0 * phi).sin();
        if s2.abs() < SINGULAR_EPS {
            return Err(Error::SingularParameter(phi));
        }
        let g = &self.gammas.gamma;
        let tan = (g[4] * phi.cos() - g[3] * phi.sin()) / (s2 * 2.0 * g[2]);
        let theta = tan.atan();
        Ok(if theta < 0.0 { theta + std::f64::consts::PI } else { theta })
    }

    /// Lowest KCBS value in the region, `5 - 4√5`.
    pub fn kcbs_min(&self) -> f64 {
        kcbs_min_eigenvalue()
    }
}

/// The region of the canonical operators, computed once.
pub fn canonical_region() -> &'static QuantumRegion {
    static REGION: OnceLock<QuantumRegion> = OnceLock::new();
    REGION.get_or_init(|| QuantumRegion::new().expect("canonical CHSH operator splits into blocks"))
}

pub fn region_basis() -> RegionBasis {
    *canonical_region().basis()
}

pub fn gammas() -> Gammas {
    *canonical_region().gammas()
}

pub fn expectation_m(theta: f64, phi: f64) -> f64 {
    canonical_region().expectation_m(theta, phi)
}

pub fn expectation_n(theta: f64) -> f64 {
    canonical_region().expectation_n(theta)
}

pub fn boundary_theta(phi: f64) -> Result<f64> {
    canonical_region().boundary_theta(phi)
}

pub fn sample_boundary(n: usize) -> Result<Vec<BoundarySample>> {
    canonical_region().sample_boundary(n)
}

pub fn touching_point() -> TouchingPoint {
    canonical_region().touching_point()
}

pub fn boundary_state(phi: f64, branch: Branch) -> Result<crate::quantum::Ket> {
    canonical_region().boundary_state(phi, branch)
}
