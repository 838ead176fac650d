//! Boundary of the region: φ-extrema of `<M>` at fixed θ, the point touching
//! the line `chsh + kcbs = -5`, and the explicit boundary state families.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::{Branch, QuantumRegion, RegionPoint};
use crate::error::{Error, Result};
use crate::quantum::{c, chsh_operator, embed, kcbs_operator, minus_basis, plus_basis, Ket};

/// φ-grid used to bracket the extrema of `<M>` at fixed θ.
const PHI_GRID: usize = 720;
const BISECTION_STEPS: usize = 80;
const THETA_GRID: usize = 2000;
const GOLDEN_TOL: f64 = 1e-10;
/// Half-width of the window around multiples of π/2 skipped when tracing the
/// stationary curve.
pub const CURVE_EXCLUSION: f64 = 1e-4;
/// Below this `|sin φ|` or `|cos φ|` the boundary state coefficients diverge.
const STATE_SINGULAR_EPS: f64 = 1e-9;

/// Lower or upper boundary in the chsh direction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct BoundarySample {
    pub side: Side,
    pub theta: f64,
    pub phi: f64,
    pub point: RegionPoint,
}

impl BoundarySample {
    /// `branch,phi,theta,chsh,kcbs` with 17 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.point.branch, self.phi, self.theta, self.point.chsh, self.point.kcbs
        )
    }
}

pub const BOUNDARY_CSV_HEADER: &str = "branch,phi,theta,chsh,kcbs";

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct TouchingPoint {
    pub theta: f64,
    pub phi: f64,
    pub point: RegionPoint,
}

impl TouchingPoint {
    pub fn sum(&self) -> f64 {
        self.point.sum()
    }
}

/// `f(φ) = f0 + f_cot cot φ + f_tan tan φ`, likewise for `g`. Stored as
/// `[constant, cot, tan]`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct FgCoefficients {
    pub f: [f64; 3],
    pub g: [f64; 3],
}

impl FgCoefficients {
    /// Two-decimal reference coefficients.
    pub fn reference() -> Self {
        Self {
            f: [-0.05, 0.15, -0.57],
            g: [0.72, 0.32, 0.26],
        }
    }

    fn eval(coef: &[f64; 3], phi: f64) -> f64 {
        coef[0] + coef[1] / phi.tan() + coef[2] * phi.tan()
    }

    pub fn f_at(&self, phi: f64) -> Result<f64> {
        check_state_phi(phi)?;
        Ok(Self::eval(&self.f, phi))
    }

    pub fn g_at(&self, phi: f64) -> Result<f64> {
        check_state_phi(phi)?;
        Ok(Self::eval(&self.g, phi))
    }
}

fn check_state_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi.sin().abs() < STATE_SINGULAR_EPS || phi.cos().abs() < STATE_SINGULAR_EPS {
        return Err(Error::SingularParameter(phi));
    }
    Ok(())
}

/// φ where the explicit boundary states lie on the outer boundary: `sin 2φ < 0`.
pub fn in_boundary_domain(phi: f64) -> bool {
    (2.0 * phi).sin() < -STATE_SINGULAR_EPS
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv * (hi - lo);
    let mut x2 = lo + inv * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

impl QuantumRegion {
    /// Global minimum (`sign = 1`) or maximum (`sign = -1`) of `<M>` over φ
    /// at fixed θ, as `(φ, <M>)`. The grid optimum is refined by bisection
    /// on `∂<M>/∂φ` when the neighbouring grid points bracket a root.
    fn phi_extremum(&self, theta: f64, sign: f64) -> (f64, f64) {
        let step = 2.0 * PI / PHI_GRID as f64;
        let obj = |phi: f64| sign * self.expectation_m(theta, phi);
        let best = (0..PHI_GRID)
            .min_by(|&i, &j| obj(i as f64 * step).total_cmp(&obj(j as f64 * step)))
            .expect("nonempty grid");
        let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
        let d = |phi: f64| sign * self.dm_dphi(theta, phi);
        let mut phi = best as f64 * step;
        if d(lo) < 0.0 && d(hi) > 0.0 {
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if d(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            if obj(root) <= obj(phi) {
                phi = root;
            }
        }
        let phi = phi.rem_euclid(2.0 * PI);
        (phi, self.expectation_m(theta, phi))
    }

    /// `((φ_min, min <M>), (φ_max, max <M>))` at fixed θ.
    pub fn phi_extrema(&self, theta: f64) -> ((f64, f64), (f64, f64)) {
        (self.phi_extremum(theta, 1.0), self.phi_extremum(theta, -1.0))
    }

    fn samples_at(&self, theta: f64, branch: Branch) -> [BoundarySample; 2] {
        let ((phi_min, _), (phi_max, _)) = self.phi_extrema(theta);
        let (lower, upper) = match branch {
            Branch::Plus => (phi_min, phi_max),
            Branch::Minus => (phi_max, phi_min),
        };
        [(Side::Lower, lower), (Side::Upper, upper)].map(|(side, phi)| BoundarySample {
            side,
            theta,
            phi,
            point: self.point(theta, phi, branch),
        })
    }

    /// Boundary of both branches at `n` equally spaced θ in `[0, π/2]`.
    /// Every θ contributes a lower and an upper point per branch. Samples
    /// are sorted by kcbs, then branch, then side.
    pub fn sample_boundary(&self, n: usize) -> Result<Vec<BoundarySample>> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 boundary samples, got {n}")));
        }
        let mut out = Vec::with_capacity(4 * n);
        for k in 0..n {
            let theta = FRAC_PI_2 * k as f64 / (n - 1) as f64;
            for branch in [Branch::Plus, Branch::Minus] {
                out.extend(self.samples_at(theta, branch));
            }
        }
        out.sort_by(|x, y| {
            x.point
                .kcbs
                .total_cmp(&y.point.kcbs)
                .then((x.point.branch as u8).cmp(&(y.point.branch as u8)))
                .then((x.side as u8).cmp(&(y.side as u8)))
        });
        Ok(out)
    }

    /// Outer envelope over both branches: at each θ level the smaller lower
    /// point and the larger upper point, as `(lower, upper)` pairs in
    /// increasing kcbs.
    pub fn envelope(&self, n: usize) -> Result<Vec<(BoundarySample, BoundarySample)>> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 boundary samples, got {n}")));
        }
        Ok((0..n)
            .map(|k| {
                let theta = FRAC_PI_2 * k as f64 / (n - 1) as f64;
                let [pl, pu] = self.samples_at(theta, Branch::Plus);
                let [ml, mu] = self.samples_at(theta, Branch::Minus);
                let lower = if pl.point.chsh <= ml.point.chsh { pl } else { ml };
                let upper = if pu.point.chsh >= mu.point.chsh { pu } else { mu };
                (lower, upper)
            })
            .collect())
    }

    /// Points `(φ, θ(φ))` of the φ-stationary curve on an even φ grid over
    /// `[0, 2π)`, skipping windows of [`CURVE_EXCLUSION`] around multiples
    /// of π/2.
    pub fn stationary_curve(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64)
            .filter(|phi| {
                let r = phi.rem_euclid(FRAC_PI_2);
                r > CURVE_EXCLUSION && FRAC_PI_2 - r > CURVE_EXCLUSION
            })
            .filter_map(|phi| self.boundary_theta(phi).ok().map(|t| (phi, t)))
            .collect()
    }

    /// The boundary point minimizing `chsh + kcbs`.
    pub fn touching_point(&self) -> TouchingPoint {
        let step = FRAC_PI_2 / THETA_GRID as f64;
        let mut best: Option<(f64, Branch, f64)> = None;
        for branch in [Branch::Plus, Branch::Minus] {
            let h = |theta: f64| self.lower_sum(theta, branch);
            let k = (0..=THETA_GRID)
                .min_by(|&i, &j| h(i as f64 * step).total_cmp(&h(j as f64 * step)))
                .expect("nonempty grid");
            let lo = (k as f64 - 1.0).max(0.0) * step;
            let hi = ((k + 1) as f64 * step).min(FRAC_PI_2);
            let theta = golden_min(h, lo, hi, GOLDEN_TOL);
            let value = h(theta);
            if best.map_or(true, |(v, _, _)| value < v) {
                best = Some((value, branch, theta));
            }
        }
        let (_, branch, theta) = best.expect("two branches");
        let [lower, _] = self.samples_at(theta, branch);
        TouchingPoint {
            theta,
            phi: lower.phi,
            point: lower.point,
        }
    }

    fn lower_sum(&self, theta: f64, branch: Branch) -> f64 {
        let [lower, _] = self.samples_at(theta, branch);
        lower.point.sum()
    }

    /// Coefficients of `f` and `g` recomputed from α, β and the γ's.
    pub fn fg_coefficients(&self) -> FgCoefficients {
        let g = &self.gammas.gamma;
        let (alpha, beta) = (self.basis.alpha, self.basis.beta);
        let d = 4.0 * g[2];
        FgCoefficients {
            f: [-(g[4] * beta + g[3] * alpha) / d, g[4] * alpha / d, g[3] * beta / d],
            g: [(g[4] * alpha - g[3] * beta) / d, g[4] * beta / d, -g[3] * alpha / d],
        }
    }

    /// Normalized `f|01> + g|10> + |21>` (plus) or `f|00> - g|11> + |20>`
    /// (minus) with the recomputed coefficients.
    pub fn boundary_state(&self, phi: f64, branch: Branch) -> Result<Ket> {
        self.boundary_state_with(phi, branch, &self.fg_coefficients())
    }

    pub fn boundary_state_with(&self, phi: f64, branch: Branch, coef: &FgCoefficients) -> Result<Ket> {
        let (f, g) = (coef.f_at(phi)?, coef.g_at(phi)?);
        let basis = match branch {
            Branch::Plus => plus_basis(),
            Branch::Minus => minus_basis(),
        };
        embed(&[c(f), c(g), c(1.0)], &basis)
    }

    /// Minimum Euclidean distance from `(chsh, kcbs)` to the lower and upper
    /// boundary polylines of `branch`.
    pub fn distance_to_boundary(&self, chsh: f64, kcbs: f64, branch: Branch, samples: &[BoundarySample]) -> f64 {
        let mut best = f64::INFINITY;
        for side in [Side::Lower, Side::Upper] {
            let line: Vec<&BoundarySample> =
                samples.iter().filter(|s| s.side == side && s.point.branch == branch).collect();
            for w in line.windows(2) {
                best = best.min(segment_distance(
                    (chsh, kcbs),
                    (w[0].point.chsh, w[0].point.kcbs),
                    (w[1].point.chsh, w[1].point.kcbs),
                ));
            }
        }
        best
    }
}

/// `(<CHSH>, <KCBS>)` of a joint state.
pub fn region_coordinates(state: &Ket) -> (f64, f64) {
    (chsh_operator().expectation_real(state), kcbs_operator().expectation_real(state))
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}
