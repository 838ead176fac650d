//! The invariant suite behind `monogamy verify`.

use std::f64::consts::{FRAC_PI_2, PI};

use monogamy_core::classical::{c1_expression, c2_expression, chsh_expression, kcbs_expression, monogamy_expression};
use monogamy_core::quantum::{block_decompose, c, chsh_operator, eigensystem, joint_index, kcbs_operator};
use monogamy_core::region::{
    canonical_region, in_boundary_domain, region_coordinates, region_membership_sweep, FgCoefficients,
};
use monogamy_core::scenario::canonical_scenario;
use monogamy_core::{
    classical_bound, fine_join_c1, fine_join_c2, monogamy_certificate, nd_optimum, Branch, MeasurementId, NdSampler,
    Sense,
};
use rand_chacha::rand_core::SeedableRng;
use serde::Serialize;

use crate::output::{csv_string, emit, json_string, CliError};
use crate::{Format, RunConfig, DEFAULT_SAMPLES};

const MAX_BEHAVIORS: usize = 1000;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type Check = Result<String, String>;

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn classical_bounds() -> Check {
    let s = canonical_scenario();
    let min = |e| classical_bound(&e, s).map(|b| b.min).map_err(|e| e.to_string());
    for (name, value, expected) in [
        ("kappa", min(kcbs_expression())?, -3.0),
        ("beta", min(chsh_expression(5))?, -2.0),
        ("kappa+beta", min(monogamy_expression(5))?, -5.0),
    ] {
        if value != expected {
            return Err(format!("{name}: {value} != {expected}"));
        }
    }
    for i in 1..=5 {
        if min(c1_expression(i))? != -3.0 || min(c2_expression(i))? != -2.0 {
            return Err(format!("pivot {i}"));
        }
    }
    Ok("kappa -3, beta -2, C1 -3, C2 -2, kappa+beta -5".into())
}

fn nd_bounds() -> Check {
    for (name, e, expected) in [
        ("kappa", kcbs_expression(), -5.0),
        ("beta", chsh_expression(5), -4.0),
        ("kappa+beta", monogamy_expression(5), -5.0),
    ] {
        let v = nd_optimum(&e, Sense::Min).map_err(|e| e.to_string())?.value;
        if !close(v, expected, 1e-6) {
            return Err(format!("{name}: {v} != {expected}"));
        }
    }
    Ok("kappa -5, beta -4, kappa+beta -5".into())
}

fn nd_samples(samples: usize, seed: u64, tol: f64) -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sampler = NdSampler::new().with_vertices(&mut rng, 32).map_err(|e| e.to_string())?;
    let a = MeasurementId::alice;
    let (b1, b2) = (MeasurementId::bob(1), MeasurementId::bob(2));
    let count = samples.min(MAX_BEHAVIORS);
    for k in 0..count {
        let b = if k % 2 == 0 { sampler.projected(&mut rng) } else { sampler.vertex_mixture(&mut rng) };
        let report = monogamy_certificate(&b).map_err(|e| e.to_string())?;
        if !report.at_most_one_violated || report.min_sum() < -5.0 - tol {
            return Err(format!("behavior {k}: kappa+beta = {}", report.min_sum()));
        }
        for i in 1..=5 {
            let j1 = fine_join_c1(&b, i).map_err(|e| e.to_string())?;
            let j2 = fine_join_c2(&b, i).map_err(|e| e.to_string())?;
            let subsets1 = [vec![a(i + 1), a(i + 2), b1], vec![a(i + 2), a(i - 2), b1], vec![a(i - 1), a(i - 2), b1]];
            let subsets2 = [vec![a(i), a(i - 1), b2], vec![a(i), a(i + 1), b2], vec![a(i - 1), a(i)], vec![a(i), a(i + 1)]];
            for (joint, subsets) in [(&j1, &subsets1[..]), (&j2, &subsets2[..])] {
                for s in subsets {
                    let x = joint.marginal(s).map_err(|e| e.to_string())?;
                    let y = b.marginal(s).map_err(|e| e.to_string())?;
                    if x.iter().zip(&y).any(|(p, q)| (p - q).abs() > 1e-10) {
                        return Err(format!("behavior {k}, pivot {i}: marginal {s:?} not recovered"));
                    }
                }
            }
        }
    }
    Ok(format!("{count} behaviors, all pivots"))
}

fn kcbs_spectrum() -> Check {
    let k = kcbs_operator();
    if k.max_off_diagonal() > 1e-12 {
        return Err("KCBS operator is not diagonal".into());
    }
    let es = eigensystem(&k).map_err(|e| e.to_string())?;
    let r5 = 5f64.sqrt();
    let ok = es.values[..2].iter().all(|&v| close(v, 5.0 - 4.0 * r5, 1e-10))
        && es.values[2..].iter().all(|&v| close(v, -5.0 + 2.0 * r5, 1e-10));
    ok.then(|| "5-4√5 x2, -5+2√5 x4".to_string()).ok_or_else(|| format!("{:?}", es.values))
}

fn block_structure(perturb: Option<f64>) -> Check {
    let mut op = chsh_operator();
    if let Some(eps) = perturb {
        let (u, v) = (joint_index(0, 1), joint_index(0, 0));
        op[(u, v)] += c(eps);
        op[(v, u)] += c(eps);
    }
    let blocks = block_decompose(&op).map_err(|e| e.to_string())?;
    let es = eigensystem(&blocks.m).map_err(|e| e.to_string())?;
    let reference = [-2.808, 0.336, 2.0];
    if es.values.iter().zip(reference).any(|(v, p)| !close(*v, p, 1e-3)) || !close(es.values[2], 2.0, 1e-10) {
        return Err(format!("eig(M) = {:?}", es.values));
    }
    Ok(format!("M ⊕ -M, eig(M) = ({:.6}, {:.6}, {:.6})", es.values[0], es.values[1], es.values[2]))
}

fn region_constants() -> Check {
    let r = canonical_region();
    let (b, g) = (r.basis(), r.gammas().gamma);
    let reference = [0.21, -0.34, -1.38, 3.47, -1.94];
    if !close(b.alpha, 0.42, 0.01) || !close(b.beta, 0.91, 0.01) || g.iter().zip(reference).any(|(x, p)| !close(*x, p, 0.01)) {
        return Err(format!("alpha {}, beta {}, gamma {g:?}", b.alpha, b.beta));
    }
    Ok(format!("alpha {:.5}, beta {:.5}", b.alpha, b.beta))
}

fn closed_forms() -> Check {
    let r = canonical_region();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        for j in 0..100 {
            let (t, p) = (PI * i as f64 / 99.0, 2.0 * PI * j as f64 / 100.0);
            worst = worst.max((r.expectation_m(t, p) - r.matrix_expectation_m(t, p)).abs());
            worst = worst.max((r.expectation_n(t) - r.matrix_expectation_n(t, p)).abs());
        }
    }
    (worst < 1e-10).then(|| format!("worst {worst:.1e}")).ok_or_else(|| format!("worst {worst:e}"))
}

fn stationarity() -> Check {
    let r = canonical_region();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let phi = 0.03 + 2.0 * PI * k as f64 / 100.0;
        let theta = r.boundary_theta(phi).map_err(|e| e.to_string())?;
        worst = worst.max(((r.expectation_m(theta, phi + h) - r.expectation_m(theta, phi - h)) / (2.0 * h)).abs());
    }
    (worst < 1e-8).then(|| format!("worst {worst:.1e}")).ok_or_else(|| format!("worst {worst:e}"))
}

fn touching_point() -> Check {
    let p = canonical_region().touching_point().point;
    if !close(p.sum(), -5.0, 1e-6) || !close(p.chsh, -2.08, 0.01) || !close(p.kcbs, -2.92, 0.01) || p.distance_to(-2.0, -3.0) <= 0.05 {
        return Err(format!("({}, {})", p.chsh, p.kcbs));
    }
    Ok(format!("({:.6}, {:.6})", p.chsh, p.kcbs))
}

fn boundary_states() -> Check {
    let r = canonical_region();
    let samples = r.sample_boundary(2000).map_err(|e| e.to_string())?;
    let reference = FgCoefficients::reference();
    let mut worst: f64 = 0.0;
    for branch in [Branch::Plus, Branch::Minus] {
        for k in 0..100 {
            let phi = FRAC_PI_2 + PI * (k as f64 + 0.5) / 100.0 + if k >= 50 { FRAC_PI_2 } else { 0.0 };
            if !in_boundary_domain(phi) {
                continue;
            }
            let psi = r.boundary_state_with(phi, branch, &reference).map_err(|e| e.to_string())?;
            let (x, y) = region_coordinates(&psi);
            worst = worst.max(r.distance_to_boundary(x, y, branch, &samples));
        }
    }
    (worst < 2e-2).then(|| format!("worst distance {worst:.1e}")).ok_or_else(|| format!("worst distance {worst:e}"))
}

fn membership(samples: usize, seed: u64) -> Check {
    let report = region_membership_sweep(samples, seed);
    if !report.is_clean() {
        return Err(format!(
            "{} monogamy, {} kcbs, {} chsh violations",
            report.monogamy_violation_count, report.kcbs_floor_violation_count, report.chsh_floor_violation_count
        ));
    }
    Ok(format!(
        "{} states, min sum {:.6}, contextual-only {}, nonlocal-only {}",
        report.samples, report.sum_min, report.contextual_only, report.nonlocal_only
    ))
}

pub fn summary(config: &RunConfig, perturb_m: Option<f64>) -> Summary {
    let samples = config.samples_or(DEFAULT_SAMPLES);
    let seed = config.seed;
    let checks: Vec<(&'static str, Check)> = vec![
        ("classical-bounds", classical_bounds()),
        ("nd-bounds", nd_bounds()),
        ("nd-samples", nd_samples(samples, seed, config.tol)),
        ("kcbs-spectrum", kcbs_spectrum()),
        ("block-structure", block_structure(perturb_m)),
        ("region-constants", region_constants()),
        ("closed-forms", closed_forms()),
        ("stationarity", stationarity()),
        ("touching-point", touching_point()),
        ("boundary-states", boundary_states()),
        ("region-membership", membership(samples, seed)),
    ];
    let checks: Vec<CheckResult> = checks
        .into_iter()
        .map(|(name, r)| CheckResult {
            name,
            passed: r.is_ok(),
            detail: r.unwrap_or_else(|e| e),
        })
        .collect();
    Summary {
        seed,
        samples,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn run(config: &RunConfig, perturb_m: Option<f64>) -> Result<(), CliError> {
    let summary = summary(config, perturb_m);
    let text = match config.format {
        Format::Json => json_string(&summary),
        Format::Csv => csv_string(
            &["check", "passed", "detail"],
            &summary
                .checks
                .iter()
                .map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()])
                .collect::<Vec<_>>(),
        ),
    };
    emit(config.out.as_deref(), &text)?;
    match summary.checks.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(CliError::Invariant(format!("{}: {}", c.name, c.detail))),
    }
}
