use std::fs;
use std::path::Path;

use monogamy_core::classical::{c1_expression, c2_expression, chsh_expression, kcbs_expression, monogamy_expression};
use monogamy_core::quantum::{
    block_decompose, canonical_spectra, chsh_operator, eigensystem, kcbs_operator, MatrixJson, QuantumSettings,
};
use monogamy_core::region::{canonical_region, region_membership_sweep, BOUNDARY_CSV_HEADER};
use monogamy_core::scenario::{canonical_scenario, outcome_sign, CONTEXT_OUTCOMES};
use monogamy_core::{
    classical_bound, monogamy_certificate, nd_optimum, Behavior, LinearExpression, Sense, CANONICAL_PIVOT,
};
use serde::Serialize;

use crate::output::{create_dir, csv_string, emit, exact, json_string, sig12, CliError};
use crate::{ExprKind, Format, RunConfig, DEFAULT_REGION_POINTS, DEFAULT_SAMPLES};

#[derive(Debug, Serialize)]
pub struct BoundRow {
    pub quantity: String,
    pub classical: f64,
    pub no_disturbance: f64,
    pub quantum: f64,
}

pub fn bound_rows() -> Result<Vec<BoundRow>, CliError> {
    let mut named: Vec<(String, LinearExpression)> = vec![
        ("kappa".into(), kcbs_expression()),
        ("beta".into(), chsh_expression(CANONICAL_PIVOT)),
    ];
    for i in 1..=5 {
        named.push((format!("C1({i})"), c1_expression(i)));
    }
    for i in 1..=5 {
        named.push((format!("C2({i})"), c2_expression(i)));
    }
    named.push(("kappa+beta".into(), monogamy_expression(CANONICAL_PIVOT)));

    let settings = QuantumSettings::canonical();
    named
        .into_iter()
        .map(|(quantity, expr)| {
            let classical = classical_bound(&expr, canonical_scenario())?.min;
            let no_disturbance = nd_optimum(&expr, Sense::Min)?.value;
            let quantum = eigensystem(&settings.expression_operator(&expr)?)?.min();
            Ok(BoundRow {
                quantity,
                classical,
                no_disturbance,
                quantum,
            })
        })
        .collect()
}

pub fn bounds(config: &RunConfig) -> Result<(), CliError> {
    let rows = bound_rows()?;
    for r in &rows {
        // every quantum behavior is no-disturbing and every classical one is quantum
        if r.no_disturbance > r.quantum + config.tol || r.quantum > r.classical + config.tol {
            return Err(CliError::Invariant(format!(
                "bounds ordering for {}: nd {} quantum {} classical {}",
                r.quantity, r.no_disturbance, r.quantum, r.classical
            )));
        }
    }
    let text = match config.format {
        Format::Json => json_string(&rows),
        Format::Csv => csv_string(
            &["quantity", "classical", "no_disturbance", "quantum"],
            &rows
                .iter()
                .map(|r| vec![r.quantity.clone(), sig12(r.classical), sig12(r.no_disturbance), sig12(r.quantum)])
                .collect::<Vec<_>>(),
        ),
    };
    emit(config.out.as_deref(), &text)
}

const ND_LINE_POINTS: usize = 101;

#[derive(Serialize)]
struct RegionJson<'a> {
    boundary: &'a [monogamy_core::region::BoundarySample],
    nd_line: Vec<[f64; 2]>,
    touching_point: monogamy_core::region::TouchingPoint,
}

pub fn region(config: &RunConfig) -> Result<(), CliError> {
    let out = config
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("region needs --out <directory>".into()))?;
    let n = config.samples_or(DEFAULT_REGION_POINTS);
    if n < 2 {
        return Err(CliError::Usage("region needs --samples >= 2".into()));
    }
    let r = canonical_region();
    let samples = r.sample_boundary(n)?;
    if let Some(bad) = samples.iter().find(|s| s.point.sum() < -5.0 - config.tol) {
        return Err(CliError::Invariant(format!(
            "boundary point ({}, {}) below the monogamy line",
            bad.point.chsh, bad.point.kcbs
        )));
    }
    let tp = r.touching_point();
    let nd_line: Vec<[f64; 2]> = (0..ND_LINE_POINTS)
        .map(|k| {
            let chsh = -4.0 + 4.0 * k as f64 / (ND_LINE_POINTS - 1) as f64;
            [chsh, -5.0 - chsh]
        })
        .collect();

    let dir = create_dir(out)?;
    let mut written = Vec::new();
    match config.format {
        Format::Json => {
            let path = dir.join("region.json");
            let doc = RegionJson {
                boundary: &samples,
                nd_line,
                touching_point: tp,
            };
            write_file(&path, &json_string(&doc))?;
            written.push(path);
        }
        Format::Csv => {
            let mut boundary = String::from(BOUNDARY_CSV_HEADER);
            boundary.push('\n');
            for s in &samples {
                boundary.push_str(&s.csv_row());
                boundary.push('\n');
            }
            let line = csv_string(
                &["chsh", "kcbs"],
                &nd_line.iter().map(|p| vec![exact(p[0]), exact(p[1])]).collect::<Vec<_>>(),
            );
            let touch = csv_string(
                &["branch", "phi", "theta", "chsh", "kcbs", "sum"],
                &[vec![
                    tp.point.branch.to_string(),
                    exact(tp.phi),
                    exact(tp.theta),
                    exact(tp.point.chsh),
                    exact(tp.point.kcbs),
                    exact(tp.sum()),
                ]],
            );
            for (name, text) in [("boundary.csv", boundary), ("nd_line.csv", line), ("touching_point.csv", touch)] {
                let path = dir.join(name);
                write_file(&path, &text)?;
                written.push(path);
            }
        }
    }
    let listing: String = written.iter().map(|p| format!("{}\n", p.display())).collect();
    emit(None, &listing)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn sweep(config: &RunConfig) -> Result<(), CliError> {
    let report = region_membership_sweep(config.samples_or(DEFAULT_SAMPLES), config.seed);
    let text = match config.format {
        Format::Json => json_string(&report),
        Format::Csv => {
            let fields = [
                ("samples", report.samples.to_string()),
                ("seed", report.seed.to_string()),
                ("chsh_min", exact(report.chsh_min)),
                ("chsh_max", exact(report.chsh_max)),
                ("kcbs_min", exact(report.kcbs_min)),
                ("kcbs_max", exact(report.kcbs_max)),
                ("sum_min", exact(report.sum_min)),
                ("monogamy_violations", report.monogamy_violation_count.to_string()),
                ("kcbs_floor_violations", report.kcbs_floor_violation_count.to_string()),
                ("chsh_floor_violations", report.chsh_floor_violation_count.to_string()),
                ("contextual_only", report.contextual_only.to_string()),
                ("nonlocal_only", report.nonlocal_only.to_string()),
                ("both_violated", report.both_violated.to_string()),
            ];
            csv_string(
                &["field", "value"],
                &fields.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect::<Vec<_>>(),
            )
        }
    };
    emit(config.out.as_deref(), &text)?;
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::Invariant("region membership: sampled states outside the quantum bounds".into()))
    }
}

pub fn spectra(config: &RunConfig) -> Result<(), CliError> {
    let rows = canonical_spectra()?;
    let text = match config.format {
        Format::Json => json_string(&rows),
        Format::Csv => csv_string(
            &["operator", "index", "eigenvalue"],
            &rows
                .iter()
                .map(|r| vec![r.operator.clone(), r.index.to_string(), exact(r.eigenvalue)])
                .collect::<Vec<_>>(),
        ),
    };
    emit(config.out.as_deref(), &text)
}

pub fn operators(config: &RunConfig) -> Result<(), CliError> {
    let chsh = chsh_operator();
    let m = block_decompose(&chsh)?.m;
    let named = [("kcbs", kcbs_operator()), ("chsh", chsh), ("M", m)];
    let text = match config.format {
        Format::Json => {
            let map: std::collections::BTreeMap<&str, MatrixJson> =
                named.iter().map(|(n, op)| (*n, MatrixJson::from(op))).collect();
            json_string(&map)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, op) in &named {
                for i in 0..op.dim() {
                    for j in 0..op.dim() {
                        let z = op[(i, j)];
                        rows.push(vec![name.to_string(), i.to_string(), j.to_string(), exact(z.re), exact(z.im)]);
                    }
                }
            }
            csv_string(&["operator", "row", "col", "re", "im"], &rows)
        }
    };
    emit(config.out.as_deref(), &text)
}

#[derive(Serialize)]
struct WitnessJson {
    expression: String,
    sense: Sense,
    value: f64,
    witness: Behavior,
}

pub fn nd_witness(config: &RunConfig, kind: ExprKind, pivot: i64, sense: Sense) -> Result<(), CliError> {
    let expr = match kind {
        ExprKind::Kcbs => kcbs_expression(),
        ExprKind::Chsh => chsh_expression(pivot),
        ExprKind::Monogamy => monogamy_expression(pivot),
        ExprKind::C1 => c1_expression(pivot),
        ExprKind::C2 => c2_expression(pivot),
    };
    let opt = nd_optimum(&expr, sense)?;
    if !opt.witness.is_no_disturbance(config.tol) {
        return Err(CliError::Invariant("LP witness is not no-disturbing".into()));
    }
    let scenario = canonical_scenario();
    let text = match config.format {
        Format::Json => json_string(&WitnessJson {
            expression: expr.describe(scenario),
            sense,
            value: opt.value,
            witness: opt.witness,
        }),
        Format::Csv => {
            let mut rows = Vec::new();
            for (k, table) in opt.witness.tables().iter().enumerate() {
                for (o, p) in table.iter().enumerate() {
                    let signs: String = (0..3).map(|pos| if outcome_sign(o, pos, 3) > 0 { '+' } else { '-' }).collect();
                    rows.push(vec![scenario.context_label(k), signs, exact(*p)]);
                }
            }
            debug_assert_eq!(rows.len(), 10 * CONTEXT_OUTCOMES);
            csv_string(&["context", "outcome", "probability"], &rows)
        }
    };
    emit(config.out.as_deref(), &text)
}

pub fn certify(config: &RunConfig, input: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let behavior =
        Behavior::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let report = monogamy_certificate(&behavior)?;
    let out = match config.format {
        Format::Json => json_string(&report),
        Format::Csv => csv_string(
            &["pivot", "kcbs", "chsh", "sum", "kcbs_violated", "chsh_violated"],
            &(0..5)
                .map(|k| {
                    vec![
                        (k + 1).to_string(),
                        exact(report.kcbs),
                        exact(report.chsh[k]),
                        exact(report.sums[k]),
                        report.kcbs_violated.to_string(),
                        report.chsh_violated[k].to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(config.out.as_deref(), &out)?;
    if report.at_most_one_violated && report.min_sum() >= -5.0 - config.tol {
        Ok(())
    } else {
        Err(CliError::Invariant("monogamy certificate: both inequalities violated".into()))
    }
}
