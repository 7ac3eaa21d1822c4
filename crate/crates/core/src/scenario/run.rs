//! Executes a prepared scenario: every run request becomes one outcome with
//! a pass flag and a structured detail payload, plus CSV tables for the
//! trace-like runs. The report is deterministic for a fixed config and seed
//! except for the wall-clock field.

use crate::cyclic::{
    composite_hybrid_certificate, cyclic_contraction_certificate, hybrid_certificate,
    validate_cyclicity, LambdaSpec, PointFn,
};
use crate::engine::cesaro::{averaging_identity_check, cesaro_sequence};
use crate::engine::search::{
    find_fixed_point, find_proximity_cycle, fixed_point_set_convexity_probe,
    quasi_nonexpansive_certificate, FixedPointStatus,
};
use crate::engine::{bregman_trajectory, geometric_bound_check, orbit};
use crate::error::{Error, Result};
use crate::moduli::{total_convexity_modulus, uniform_convexity_modulus};
use crate::point::Point;
use crate::scenario::{
    CertCheck, ConvergenceExpectation, Expectation, PreparedScenario, RunRequest,
};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

/// Ordering slack when comparing the pointwise modulus against the uniform
/// one: both values come out of a bounded search, so the exact inequality is
/// blurred by the search resolution.
pub const MODULI_ORDERING_SLACK: f64 = 1e-8;

#[derive(Debug, Serialize)]
pub struct RunOutcome {
    pub name: String,
    pub kind: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub all_passed: bool,
    /// Only nondeterministic field; drop it when comparing reports.
    pub wall_time_ms: u64,
    pub runs: Vec<RunOutcome>,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub report: RunReport,
    /// `(file stem, contents)` pairs; stems get a `.csv` extension on disk.
    pub csvs: Vec<(String, String)>,
}

fn jval<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// CSV with one row per point: `n,component_0,...,component_{d-1}`.
fn points_csv(points: &[Point]) -> String {
    let dim = points.first().map_or(0, Point::dim);
    let mut out = String::from("n");
    for c in 0..dim {
        out.push_str(&format!(",component_{c}"));
    }
    out.push('\n');
    for (n, p) in points.iter().enumerate() {
        out.push_str(&n.to_string());
        for v in p.coords() {
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

/// CSV with one row per value: `n,value`.
fn values_csv(values: &[f64]) -> String {
    let mut out = String::from("n,value\n");
    for (n, v) in values.iter().enumerate() {
        out.push_str(&format!("{n},{v:.16e}\n"));
    }
    out
}

fn run_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Executes every run of the scenario. `seed_override` replaces the config
/// seed wholesale when given (the per-run derivation stays the same).
pub fn run_scenario(
    prepared: &PreparedScenario,
    seed_override: Option<u64>,
) -> Result<RunArtifacts> {
    let started = Instant::now();
    let base_seed = seed_override.unwrap_or(prepared.config.seed);
    let mut outcomes = Vec::with_capacity(prepared.config.runs.len());
    let mut csvs = Vec::new();

    for (index, request) in prepared.config.runs.iter().enumerate() {
        let seed = run_seed(base_seed, index);
        let (passed, detail) = execute(prepared, request, seed, &mut csvs)?;
        outcomes.push(RunOutcome {
            name: request.name().to_string(),
            kind: request.kind_label(),
            passed,
            detail,
        });
    }

    let all_passed = outcomes.iter().all(|o| o.passed);
    Ok(RunArtifacts {
        report: RunReport {
            scenario: prepared.config.name.clone(),
            seed: base_seed,
            all_passed,
            wall_time_ms: started.elapsed().as_millis() as u64,
            runs: outcomes,
        },
        csvs,
    })
}

fn start_set_of(
    prepared: &PreparedScenario,
    start: &Point,
    start_set: Option<usize>,
) -> Result<usize> {
    match start_set {
        Some(i) => Ok(i),
        None => prepared
            .system
            .member_index(start)
            .ok_or(Error::NotInSystem),
    }
}

fn completed_orbit(
    prepared: &PreparedScenario,
    start: &[f64],
    start_set: Option<usize>,
    steps: usize,
) -> Result<(crate::engine::OrbitTrace, usize)> {
    let start = Point::new(start.to_vec())?;
    let set = start_set_of(prepared, &start, start_set)?;
    let trace = orbit(&prepared.system, &start, set, steps)?;
    if let Some(info) = trace.escape() {
        return Err(Error::OrbitEscape {
            stage: info.stage,
            set_index: info.set_index,
            signed_distance: info.signed_distance,
        });
    }
    Ok((trace, set))
}

fn execute(
    prepared: &PreparedScenario,
    request: &RunRequest,
    seed: u64,
    csvs: &mut Vec<(String, String)>,
) -> Result<(bool, Value)> {
    let system = &prepared.system;
    let handle = &prepared.handle;
    match request {
        RunRequest::Orbit {
            name,
            start,
            start_set,
            steps,
            expect_escape,
            divergence_anchor,
        } => {
            let start = Point::new(start.to_vec())?;
            let set = start_set_of(prepared, &start, *start_set)?;
            let trace = orbit(system, &start, set, *steps)?;
            csvs.push((name.clone(), points_csv(trace.points())));
            let mut detail = json!({
                "requested_steps": trace.requested_steps(),
                "points_recorded": trace.len(),
                "escaped": trace.escape().is_some(),
                "escape": jval(&trace.escape()),
                "final_point": trace.point(trace.len() - 1).coords(),
            });
            if let Some(anchor) = divergence_anchor {
                let anchor = Point::new(anchor.to_vec())?;
                let trajectory = bregman_trajectory(handle, &trace, &anchor)?;
                detail["final_divergence"] = json!(trajectory.last().copied());
                csvs.push((format!("{name}_divergence"), values_csv(&trajectory)));
            }
            Ok((trace.escape().is_some() == *expect_escape, detail))
        }

        RunRequest::Cesaro {
            name,
            start,
            start_set,
            steps,
            average,
            n_max,
            expect_limit,
            limit_tolerance,
        } => {
            let (trace, _) = completed_orbit(prepared, start, *start_set, *steps)?;
            let averages = cesaro_sequence(&trace, average, *n_max)?;
            csvs.push((name.clone(), points_csv(&averages)));
            let last = averages.last().expect("n_max >= 0 gives one average");
            let mut passed = true;
            let mut detail = json!({
                "average": jval(average),
                "n_max": n_max,
                "final_average": last.coords(),
                "final_norm": last.norm(),
            });
            if let Some(limit) = expect_limit {
                let limit = Point::new(limit.to_vec())?;
                let distance = last.dist(&limit);
                passed = distance <= *limit_tolerance;
                detail["distance_to_limit"] = json!(distance);
                detail["limit_tolerance"] = json!(limit_tolerance);
            }
            Ok((passed, detail))
        }

        RunRequest::FixedPoint {
            start,
            start_set,
            max_iter,
            tol,
            expect,
            expect_point,
            point_tolerance,
            ..
        } => {
            let start = Point::new(start.to_vec())?;
            let set = start_set_of(prepared, &start, *start_set)?;
            let outcome =
                find_fixed_point(system, set, &start, Some(handle), *max_iter, *tol)?;
            let status_expected = match expect {
                ConvergenceExpectation::Converged => FixedPointStatus::Converged,
                ConvergenceExpectation::NoConvergence => FixedPointStatus::NoConvergence,
            };
            let mut passed = outcome.status == status_expected;
            let mut detail = json!({
                "outcome": jval(&outcome),
                "expect": jval(expect),
            });
            if let (Some(q), FixedPointStatus::Converged) = (expect_point, outcome.status) {
                let q = Point::new(q.to_vec())?;
                let found = Point::new(outcome.point.clone())?;
                let distance = found.dist(&q);
                passed = passed && distance <= *point_tolerance;
                detail["distance_to_expected"] = json!(distance);
                detail["point_tolerance"] = json!(point_tolerance);
            }
            Ok((passed, detail))
        }

        RunRequest::Proximity {
            start,
            start_set,
            max_iter,
            tol,
            match_tolerance,
            ..
        } => {
            let start = Point::new(start.to_vec())?;
            let set = start_set_of(prepared, &start, *start_set)?;
            let cycle = find_proximity_cycle(system, set, &start, *max_iter, *tol)?;
            let scale = 1.0
                + cycle
                    .set_distances
                    .iter()
                    .fold(0.0f64, |acc, d| acc.max(*d));
            let passed = cycle.converged
                && cycle.closure_gap <= match_tolerance * scale
                && cycle.max_leg_mismatch <= match_tolerance * scale;
            let detail = json!({
                "cycle": jval(&cycle),
                "match_tolerance": match_tolerance,
            });
            Ok((passed, detail))
        }

        RunRequest::Identities {
            start,
            start_set,
            steps,
            p,
            j,
            n,
            ..
        } => {
            let (trace, _) = completed_orbit(prepared, start, *start_set, *steps)?;
            let stride = p.unwrap_or(system.p());
            let reports = averaging_identity_check(system, &trace, stride, *j, *n)?;
            let passed = reports.iter().all(|r| r.acceptable());
            Ok((passed, json!({ "identities": jval(&reports) })))
        }

        RunRequest::Moduli {
            name,
            anchor,
            t_values,
            region_set,
            budget,
            expect_ordering,
        } => {
            let anchor = Point::new(anchor.to_vec())?;
            let region = system.set(*region_set);
            let mut rows = Vec::with_capacity(t_values.len());
            let mut pointwise = Vec::with_capacity(t_values.len());
            let mut uniform = Vec::with_capacity(t_values.len());
            let mut ordering_ok = true;
            for t in t_values {
                let pw = total_convexity_modulus(handle, &anchor, *t, *budget)?;
                let un = uniform_convexity_modulus(handle, *t, region, *budget)?;
                let margin = pw.value - un.value;
                if margin < -MODULI_ORDERING_SLACK {
                    ordering_ok = false;
                }
                pointwise.push(pw.value);
                uniform.push(un.value);
                rows.push(json!({
                    "t": t,
                    "pointwise": jval(&pw),
                    "uniform": jval(&un),
                    "ordering_margin": margin,
                }));
            }
            csvs.push((format!("{name}_pointwise"), values_csv(&pointwise)));
            csvs.push((format!("{name}_uniform"), values_csv(&uniform)));
            let passed = !*expect_ordering || ordering_ok;
            let detail = json!({
                "rows": rows,
                "ordering_ok": ordering_ok,
                "expect_ordering": expect_ordering,
            });
            Ok((passed, detail))
        }

        RunRequest::Certificate { check, expect, .. } => {
            let (verdict_passed, report) = run_check(prepared, check, seed)?;
            let passed = match expect {
                Expectation::Pass => verdict_passed,
                Expectation::Fail => !verdict_passed,
            };
            let detail = json!({
                "expect": jval(expect),
                "verdict_passed": verdict_passed,
                "report": report,
            });
            Ok((passed, detail))
        }
    }
}

fn run_check(
    prepared: &PreparedScenario,
    check: &CertCheck,
    seed: u64,
) -> Result<(bool, Value)> {
    let system = &prepared.system;
    let handle = &prepared.handle;
    match check {
        CertCheck::Cyclicity { n_samples } => {
            let cert = validate_cyclicity(system, *n_samples, seed)?;
            Ok((cert.passed(), jval(&cert)))
        }
        CertCheck::Hybrid { n_samples } => {
            let params = prepared
                .hybrid
                .as_ref()
                .expect("validated: hybrid block present");
            let report = hybrid_certificate(system, handle, params, *n_samples, seed)?;
            Ok((report.passed(), jval(&report)))
        }
        CertCheck::CompositeHybrid {
            set_index,
            k,
            n_samples,
        } => {
            let k = *k;
            let k_fn: PointFn = Arc::new(move |_: &Point| k);
            let cert = composite_hybrid_certificate(
                system,
                handle,
                *set_index,
                &k_fn,
                k,
                &LambdaSpec::Zero,
                *n_samples,
                seed,
            )?;
            Ok((cert.passed(), jval(&cert)))
        }
        CertCheck::Contraction { k, n_samples } => {
            let report = cyclic_contraction_certificate(system, *k, *n_samples, seed)?;
            Ok((report.passed(), jval(&report)))
        }
        CertCheck::QuasiNonexpansive {
            set_index,
            anchor,
            n_samples,
            m_steps,
        } => {
            let anchor = Point::new(anchor.to_vec())?;
            let report = quasi_nonexpansive_certificate(
                system, handle, *set_index, &anchor, *n_samples, *m_steps, seed,
            )?;
            Ok((report.passed(), jval(&report)))
        }
        CertCheck::FixedPointSetConvexity {
            set_index,
            points,
            n_samples,
        } => {
            let points: Vec<Point> = points
                .iter()
                .map(|q| Point::new(q.clone()))
                .collect::<Result<_>>()?;
            let cert = fixed_point_set_convexity_probe(
                system, *set_index, &points, *n_samples, seed,
            )?;
            Ok((cert.passed(), jval(&cert)))
        }
        CertCheck::GeometricBound {
            set_index,
            x0,
            y0,
            n_cycles,
        } => {
            let params = prepared
                .hybrid
                .as_ref()
                .expect("validated: hybrid block present");
            let x0 = Point::new(x0.to_vec())?;
            let y0 = Point::new(y0.to_vec())?;
            let report = geometric_bound_check(
                system, handle, params, *set_index, &x0, &y0, *n_cycles,
            )?;
            Ok((report.passed(), jval(&report)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

/// Writes a file atomically: the content lands under a temporary name in the
/// same directory and is renamed into place, so a crash never leaves a
/// half-written report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| io_error_at("writing", &tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error_at("renaming into", path, e))?;
    Ok(())
}

/// Re-wraps an I/O error so the message names the path and the operation;
/// the bare OS error ("File exists (os error 17)") is useless without them.
fn io_error_at(action: &str, path: &Path, err: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        err.kind(),
        format!("{action} {}: {err}", path.display()),
    ))
}

/// Writes `report.json` and/or the CSV tables into `out_dir`, returning the
/// paths written.
pub fn write_artifacts(
    artifacts: &RunArtifacts,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| io_error_at("creating artifact directory", out_dir, e))?;
    let mut written = Vec::new();
    if format != OutputFormat::Csv {
        let path = out_dir.join("report.json");
        let mut text = serde_json::to_string_pretty(&artifacts.report)
            .map_err(|e| Error::InvalidInput(format!("report serialization: {e}")))?;
        text.push('\n');
        write_atomic(&path, &text)?;
        written.push(path);
    }
    if format != OutputFormat::Json {
        for (stem, contents) in &artifacts.csvs {
            let path = out_dir.join(format!("{stem}.csv"));
            write_atomic(&path, contents)?;
            written.push(path);
        }
    }
    Ok(written)
}
