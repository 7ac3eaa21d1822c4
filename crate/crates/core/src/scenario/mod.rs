//! Scenario configs: a JSON description of one laboratory setup — a convex
//! function, the sets, the map, optional hybrid coefficients — plus the list
//! of runs to execute against it. Parsing reports line/column positions;
//! semantic validation reports the JSON path of the offending field.
//!
//! A handful of ready-made scenarios ship embedded in the binary; anything
//! that is not a readable file is looked up among them by name.

pub mod run;

use crate::convex::ConvexFunctionHandle;
use crate::cyclic::{CyclicSystem, HybridParams, MapPiece, PiecewiseMap};
use crate::engine::cesaro::CesaroKind;
use crate::error::{Error, Result};
use crate::functions::{build, FunctionSpec};
use crate::point::Point;
use crate::sets::{ConvexSetDescriptor, SetSpec, DEFAULT_MEMBERSHIP_TOLERANCE};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetConfig {
    #[serde(flatten)]
    pub spec: SetSpec,
    /// Membership slack override; the default admits exact-boundary images.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridConfig {
    /// One constant coefficient per leg, each in (0, 1].
    pub k: Vec<f64>,
    /// Constant pairing coefficient in [0, 1).
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Pass,
    Fail,
}

impl Default for Expectation {
    fn default() -> Self {
        Expectation::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceExpectation {
    Converged,
    NoConvergence,
}

impl Default for ConvergenceExpectation {
    fn default() -> Self {
        ConvergenceExpectation::Converged
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertCheck {
    /// Images of each set land in the successor set.
    Cyclicity { n_samples: usize },
    /// The per-leg hybrid inequality with the scenario's constant
    /// coefficients.
    Hybrid { n_samples: usize },
    /// The hybrid inequality for the return map of one set, with constant k.
    CompositeHybrid {
        set_index: usize,
        k: f64,
        n_samples: usize,
    },
    /// Distance contraction with offset toward the between-set distance.
    Contraction { k: f64, n_samples: usize },
    /// Divergence to the anchor never increases along sampled orbits.
    QuasiNonexpansive {
        set_index: usize,
        anchor: Vec<f64>,
        n_samples: usize,
        m_steps: usize,
    },
    /// Convex combinations of the listed fixed points stay fixed.
    FixedPointSetConvexity {
        set_index: usize,
        points: Vec<Vec<f64>>,
        n_samples: usize,
    },
    /// Chained per-step decay along one concrete pair of orbits.
    GeometricBound {
        set_index: usize,
        x0: Vec<f64>,
        y0: Vec<f64>,
        n_cycles: usize,
    },
}

impl CertCheck {
    pub fn label(&self) -> &'static str {
        match self {
            CertCheck::Cyclicity { .. } => "cyclicity",
            CertCheck::Hybrid { .. } => "hybrid",
            CertCheck::CompositeHybrid { .. } => "composite_hybrid",
            CertCheck::Contraction { .. } => "contraction",
            CertCheck::QuasiNonexpansive { .. } => "quasi_nonexpansive",
            CertCheck::FixedPointSetConvexity { .. } => "fixed_point_set_convexity",
            CertCheck::GeometricBound { .. } => "geometric_bound",
        }
    }
}

fn default_point_tolerance() -> f64 {
    1e-8
}

fn default_limit_tolerance() -> f64 {
    1e-6
}

fn default_match_tolerance() -> f64 {
    1e-6
}

fn default_moduli_budget() -> usize {
    60_000
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunRequest {
    /// Record an orbit (and optionally the divergence to an anchor along it).
    Orbit {
        name: String,
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_set: Option<usize>,
        steps: usize,
        #[serde(default)]
        expect_escape: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        divergence_anchor: Option<Vec<f64>>,
    },
    /// Averaged iterates along an orbit, optionally checked against a limit.
    Cesaro {
        name: String,
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_set: Option<usize>,
        steps: usize,
        average: CesaroKind,
        n_max: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_limit: Option<Vec<f64>>,
        #[serde(default = "default_limit_tolerance")]
        limit_tolerance: f64,
    },
    /// Drive the return map to a fixed point (or assert it never settles).
    FixedPoint {
        name: String,
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_set: Option<usize>,
        max_iter: usize,
        tol: f64,
        #[serde(default)]
        expect: ConvergenceExpectation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_point: Option<Vec<f64>>,
        #[serde(default = "default_point_tolerance")]
        point_tolerance: f64,
    },
    /// Fixed point of the return map plus a full cycle whose legs must
    /// realize the between-set distances.
    Proximity {
        name: String,
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_set: Option<usize>,
        max_iter: usize,
        tol: f64,
        #[serde(default = "default_match_tolerance")]
        match_tolerance: f64,
    },
    /// The four averaging identities on a recorded orbit.
    Identities {
        name: String,
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_set: Option<usize>,
        steps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<usize>,
        j: usize,
        n: usize,
    },
    /// Pointwise and uniform convexity moduli on a grid of radii.
    Moduli {
        name: String,
        anchor: Vec<f64>,
        t_values: Vec<f64>,
        #[serde(default)]
        region_set: usize,
        #[serde(default = "default_moduli_budget")]
        budget: usize,
        #[serde(default = "default_true")]
        expect_ordering: bool,
    },
    /// One sampled certificate, with an expectation so that deliberately
    /// broken fixtures still count as successful runs when they fail.
    Certificate {
        name: String,
        check: CertCheck,
        #[serde(default)]
        expect: Expectation,
    },
}

impl RunRequest {
    pub fn name(&self) -> &str {
        match self {
            RunRequest::Orbit { name, .. }
            | RunRequest::Cesaro { name, .. }
            | RunRequest::FixedPoint { name, .. }
            | RunRequest::Proximity { name, .. }
            | RunRequest::Identities { name, .. }
            | RunRequest::Moduli { name, .. }
            | RunRequest::Certificate { name, .. } => name,
        }
    }

    pub fn kind_label(&self) -> String {
        match self {
            RunRequest::Orbit { .. } => "orbit".into(),
            RunRequest::Cesaro { .. } => "cesaro".into(),
            RunRequest::FixedPoint { .. } => "fixed_point".into(),
            RunRequest::Proximity { .. } => "proximity".into(),
            RunRequest::Identities { .. } => "identities".into(),
            RunRequest::Moduli { .. } => "moduli".into(),
            RunRequest::Certificate { check, .. } => {
                format!("certificate/{}", check.label())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub function: FunctionSpec,
    pub sets: Vec<SetConfig>,
    pub map: Vec<MapPiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridConfig>,
    #[serde(default)]
    pub seed: u64,
    pub runs: Vec<RunRequest>,
}

/// A config whose pieces all built: ready to run.
pub struct PreparedScenario {
    pub config: ScenarioConfig,
    pub handle: ConvexFunctionHandle,
    pub system: CyclicSystem,
    pub hybrid: Option<HybridParams>,
}

impl std::fmt::Debug for PreparedScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreparedScenario")
            .field("name", &self.config.name)
            .field("sets", &self.system.p())
            .field("runs", &self.config.runs.len())
            .finish_non_exhaustive()
    }
}

/// Parses JSON, mapping syntax errors to line/column diagnostics.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn semantic(path: impl Into<String>, message: impl ToString) -> Error {
    Error::ConfigSemantic {
        path: path.into(),
        message: message.to_string(),
    }
}

fn valid_slug(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

fn point_at(path: &str, coords: &[f64], dim: usize) -> Result<Point> {
    let p = Point::new(coords.to_vec()).map_err(|e| semantic(path, e))?;
    if p.dim() != dim {
        return Err(semantic(
            path,
            format!("has dimension {}, scenario dimension is {dim}", p.dim()),
        ));
    }
    Ok(p)
}

/// Resolves the starting set of a run: the explicit index when given, the
/// first containing set otherwise.
fn resolve_start_set(
    system: &CyclicSystem,
    path: &str,
    start: &Point,
    start_set: Option<usize>,
) -> Result<usize> {
    match start_set {
        Some(i) => {
            if i >= system.p() {
                return Err(semantic(
                    format!("{path}.start_set"),
                    format!("index {i} out of range for p = {}", system.p()),
                ));
            }
            system
                .require_member(start, i)
                .map_err(|e| semantic(format!("{path}.start"), e))?;
            Ok(i)
        }
        None => system.member_index(start).ok_or_else(|| {
            semantic(
                format!("{path}.start"),
                "belongs to no set of the system; give start_set explicitly",
            )
        }),
    }
}

/// Semantic validation: builds every component and cross-checks the runs,
/// attributing failures to config paths.
pub fn prepare(config: ScenarioConfig) -> Result<PreparedScenario> {
    if !valid_slug(&config.name) {
        return Err(semantic(
            "name",
            "must be non-empty lowercase letters, digits, '-' or '_'",
        ));
    }
    let handle = build(&config.function).map_err(|e| semantic("function", e))?;
    let dim = handle.dim();

    if config.sets.is_empty() {
        return Err(semantic("sets", "needs at least one set"));
    }
    let mut sets = Vec::with_capacity(config.sets.len());
    for (i, sc) in config.sets.iter().enumerate() {
        let tol = sc.tolerance.unwrap_or(DEFAULT_MEMBERSHIP_TOLERANCE);
        let set = ConvexSetDescriptor::with_tolerance(sc.spec.clone(), tol)
            .map_err(|e| semantic(format!("sets[{i}]"), e))?;
        if set.dim() != dim {
            return Err(semantic(
                format!("sets[{i}]"),
                format!("has dimension {}, function has {dim}", set.dim()),
            ));
        }
        sets.push(set);
    }
    let p = sets.len();

    if config.map.len() != p {
        return Err(semantic(
            "map",
            format!("has {} pieces, needs one per set ({p})", config.map.len()),
        ));
    }
    let map = PiecewiseMap::new(config.map.clone(), dim).map_err(|e| semantic("map", e))?;
    let system = CyclicSystem::new(config.name.clone(), sets, Arc::new(map))
        .map_err(|e| semantic("sets", e))?;

    let hybrid = match &config.hybrid {
        Some(h) => {
            if h.k.len() != p {
                return Err(semantic(
                    "hybrid.k",
                    format!("has {} entries, needs one per leg ({p})", h.k.len()),
                ));
            }
            Some(
                HybridParams::constant(&h.k, h.lambda)
                    .map_err(|e| semantic("hybrid", e))?,
            )
        }
        None => None,
    };

    let mut seen = std::collections::BTreeSet::new();
    for (i, run) in config.runs.iter().enumerate() {
        let path = format!("runs[{i}]");
        if !valid_slug(run.name()) {
            return Err(semantic(
                format!("{path}.name"),
                "must be non-empty lowercase letters, digits, '-' or '_'",
            ));
        }
        if !seen.insert(run.name().to_string()) {
            return Err(semantic(
                format!("{path}.name"),
                format!("duplicate run name `{}`", run.name()),
            ));
        }
        validate_run(&path, run, &system, &handle, hybrid.is_some())?;
    }

    Ok(PreparedScenario {
        config,
        handle,
        system,
        hybrid,
    })
}

fn require_count(path: &str, what: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(semantic(path, format!("{what} must be at least 1")));
    }
    Ok(())
}

fn require_positive(path: &str, what: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(semantic(
            path,
            format!("{what} = {value} must be positive and finite"),
        ));
    }
    Ok(())
}

fn validate_run(
    path: &str,
    run: &RunRequest,
    system: &CyclicSystem,
    handle: &ConvexFunctionHandle,
    has_hybrid: bool,
) -> Result<()> {
    let dim = handle.dim();
    match run {
        RunRequest::Orbit {
            start,
            start_set,
            steps,
            divergence_anchor,
            ..
        } => {
            let start = point_at(&format!("{path}.start"), start, dim)?;
            resolve_start_set(system, path, &start, *start_set)?;
            require_count(path, "steps", *steps)?;
            if let Some(anchor) = divergence_anchor {
                let anchor =
                    point_at(&format!("{path}.divergence_anchor"), anchor, dim)?;
                handle
                    .gradient(&anchor)
                    .map_err(|e| semantic(format!("{path}.divergence_anchor"), e))?;
            }
        }
        RunRequest::Cesaro {
            start,
            start_set,
            steps,
            average,
            n_max,
            expect_limit,
            limit_tolerance,
            ..
        } => {
            let start = point_at(&format!("{path}.start"), start, dim)?;
            resolve_start_set(system, path, &start, *start_set)?;
            require_count(path, "steps", *steps)?;
            let max_index = average
                .max_index(*n_max)
                .map_err(|e| semantic(format!("{path}.average"), e))?;
            if max_index > *steps {
                return Err(semantic(
                    format!("{path}.n_max"),
                    format!("average reads trace index {max_index}, orbit has only {steps} steps"),
                ));
            }
            if let Some(limit) = expect_limit {
                point_at(&format!("{path}.expect_limit"), limit, dim)?;
                require_positive(
                    &format!("{path}.limit_tolerance"),
                    "limit_tolerance",
                    *limit_tolerance,
                )?;
            }
        }
        RunRequest::FixedPoint {
            start,
            start_set,
            max_iter,
            tol,
            expect_point,
            point_tolerance,
            ..
        } => {
            let start = point_at(&format!("{path}.start"), start, dim)?;
            resolve_start_set(system, path, &start, *start_set)?;
            require_count(path, "max_iter", *max_iter)?;
            require_positive(&format!("{path}.tol"), "tol", *tol)?;
            if let Some(q) = expect_point {
                point_at(&format!("{path}.expect_point"), q, dim)?;
                require_positive(
                    &format!("{path}.point_tolerance"),
                    "point_tolerance",
                    *point_tolerance,
                )?;
            }
        }
        RunRequest::Proximity {
            start,
            start_set,
            max_iter,
            tol,
            match_tolerance,
            ..
        } => {
            let start = point_at(&format!("{path}.start"), start, dim)?;
            resolve_start_set(system, path, &start, *start_set)?;
            require_count(path, "max_iter", *max_iter)?;
            require_positive(&format!("{path}.tol"), "tol", *tol)?;
            require_positive(
                &format!("{path}.match_tolerance"),
                "match_tolerance",
                *match_tolerance,
            )?;
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
            let start = point_at(&format!("{path}.start"), start, dim)?;
            resolve_start_set(system, path, &start, *start_set)?;
            require_count(path, "steps", *steps)?;
            let stride = p.unwrap_or(system.p());
            if stride == 0 {
                return Err(semantic(format!("{path}.p"), "stride must be at least 1"));
            }
            let needed = (n + j).max(n * stride + j).max((n + j) * stride);
            if needed > *steps {
                return Err(semantic(
                    format!("{path}.n"),
                    format!("identities read trace index {needed}, orbit has only {steps} steps"),
                ));
            }
        }
        RunRequest::Moduli {
            anchor,
            t_values,
            region_set,
            budget,
            ..
        } => {
            let anchor = point_at(&format!("{path}.anchor"), anchor, dim)?;
            handle
                .finite_value(&anchor)
                .map_err(|e| semantic(format!("{path}.anchor"), e))?;
            if t_values.is_empty() {
                return Err(semantic(
                    format!("{path}.t_values"),
                    "needs at least one radius",
                ));
            }
            for (k, t) in t_values.iter().enumerate() {
                if !(t.is_finite() && *t >= 0.0) {
                    return Err(semantic(
                        format!("{path}.t_values[{k}]"),
                        format!("radius {t} must be finite and nonnegative"),
                    ));
                }
            }
            if *region_set >= system.p() {
                return Err(semantic(
                    format!("{path}.region_set"),
                    format!("index {region_set} out of range for p = {}", system.p()),
                ));
            }
            require_count(path, "budget", *budget)?;
        }
        RunRequest::Certificate { check, .. } => {
            validate_check(path, check, system, handle, has_hybrid)?;
        }
    }
    Ok(())
}

fn validate_check(
    path: &str,
    check: &CertCheck,
    system: &CyclicSystem,
    handle: &ConvexFunctionHandle,
    has_hybrid: bool,
) -> Result<()> {
    let dim = handle.dim();
    let check_path = format!("{path}.check");
    match check {
        CertCheck::Cyclicity { n_samples } => {
            require_count(&check_path, "n_samples", *n_samples)?;
        }
        CertCheck::Hybrid { n_samples } => {
            require_count(&check_path, "n_samples", *n_samples)?;
            if !has_hybrid {
                return Err(semantic(
                    check_path,
                    "hybrid certificate needs a `hybrid` block in the scenario",
                ));
            }
        }
        CertCheck::CompositeHybrid {
            set_index,
            k,
            n_samples,
        } => {
            require_count(&check_path, "n_samples", *n_samples)?;
            if *set_index >= system.p() {
                return Err(semantic(
                    format!("{check_path}.set_index"),
                    format!("index {set_index} out of range for p = {}", system.p()),
                ));
            }
            if !(k.is_finite() && *k > 0.0 && *k <= 1.0) {
                return Err(semantic(
                    format!("{check_path}.k"),
                    format!("k = {k} must lie in (0, 1]"),
                ));
            }
        }
        CertCheck::Contraction { k, n_samples } => {
            require_count(&check_path, "n_samples", *n_samples)?;
            if system.p() < 2 {
                return Err(semantic(
                    check_path,
                    "distance contraction needs at least two sets",
                ));
            }
            if !(k.is_finite() && *k > 0.0 && *k < 1.0) {
                return Err(semantic(
                    format!("{check_path}.k"),
                    format!("k = {k} must lie in (0, 1)"),
                ));
            }
        }
        CertCheck::QuasiNonexpansive {
            set_index,
            anchor,
            n_samples,
            m_steps,
        } => {
            require_count(&check_path, "n_samples", *n_samples)?;
            require_count(&check_path, "m_steps", *m_steps)?;
            if *set_index >= system.p() {
                return Err(semantic(
                    format!("{check_path}.set_index"),
                    format!("index {set_index} out of range for p = {}", system.p()),
                ));
            }
            let anchor = point_at(&format!("{check_path}.anchor"), anchor, dim)?;
            system
                .require_member(&anchor, *set_index)
                .map_err(|e| semantic(format!("{check_path}.anchor"), e))?;
        }
        CertCheck::FixedPointSetConvexity {
            set_index,
            points,
            n_samples,
        } => {
            require_count(&check_path, "n_samples", *n_samples)?;
            if *set_index >= system.p() {
                return Err(semantic(
                    format!("{check_path}.set_index"),
                    format!("index {set_index} out of range for p = {}", system.p()),
                ));
            }
            if points.len() < 2 {
                return Err(semantic(
                    format!("{check_path}.points"),
                    "needs at least two fixed points",
                ));
            }
            for (k, q) in points.iter().enumerate() {
                let q = point_at(&format!("{check_path}.points[{k}]"), q, dim)?;
                system
                    .require_member(&q, *set_index)
                    .map_err(|e| semantic(format!("{check_path}.points[{k}]"), e))?;
            }
        }
        CertCheck::GeometricBound {
            set_index,
            x0,
            y0,
            n_cycles,
        } => {
            require_count(&check_path, "n_cycles", *n_cycles)?;
            if !has_hybrid {
                return Err(semantic(
                    check_path,
                    "the decay chain needs a `hybrid` block in the scenario",
                ));
            }
            if *set_index >= system.p() {
                return Err(semantic(
                    format!("{check_path}.set_index"),
                    format!("index {set_index} out of range for p = {}", system.p()),
                ));
            }
            let x0 = point_at(&format!("{check_path}.x0"), x0, dim)?;
            system
                .require_member(&x0, *set_index)
                .map_err(|e| semantic(format!("{check_path}.x0"), e))?;
            let y0 = point_at(&format!("{check_path}.y0"), y0, dim)?;
            system
                .require_member(&y0, system.next_index(*set_index))
                .map_err(|e| semantic(format!("{check_path}.y0"), e))?;
        }
    }
    Ok(())
}

/// Name, embedded JSON, one-line description.
pub const BUILTIN_SCENARIOS: &[(&str, &str, &str)] = &[
    (
        "contraction",
        include_str!("../../scenarios/contraction.json"),
        "halving map on one interval: hybrid coefficient 1/4, decay chain, fixed point, averages",
    ),
    (
        "proximity",
        include_str!("../../scenarios/proximity.json"),
        "two separated intervals: distance contraction, return-map hybrid, best-approximation cycle",
    ),
    (
        "rotation",
        include_str!("../../scenarios/rotation.json"),
        "quarter-turn isometry: orbit never settles while its averages collapse to the center",
    ),
    (
        "plane_shrink",
        include_str!("../../scenarios/plane_shrink.json"),
        "one-axis shrink of a box: anchored monotonicity and a convex fixed-point segment",
    ),
    (
        "entropy_lab",
        include_str!("../../scenarios/entropy_lab.json"),
        "entropy divergence on a positive box: hybrid coefficient 1/2, moduli grid, identities",
    ),
    (
        "moduli_grid",
        include_str!("../../scenarios/moduli_grid.json"),
        "anisotropic quadratic: pointwise vs uniform convexity moduli across radii",
    ),
    (
        "hybrid_fail",
        include_str!("../../scenarios/hybrid_fail.json"),
        "deliberately overclaimed hybrid coefficient: the certificate must fail",
    ),
    (
        "noncyclic",
        include_str!("../../scenarios/noncyclic.json"),
        "map that misses its target set: the cyclicity certificate must fail",
    ),
    (
        "expanding",
        include_str!("../../scenarios/expanding.json"),
        "clipped doubling: monotonicity and fixed-set convexity certificates must fail",
    ),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN_SCENARIOS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, text, _)| *text)
}

/// Reads a scenario from a file path, falling back to the builtin registry
/// when no such file exists.
pub fn load_config(source: &str) -> Result<ScenarioConfig> {
    let path = Path::new(source);
    if path.is_file() {
        return parse_config(&std::fs::read_to_string(path)?);
    }
    match builtin(source) {
        Some(text) => parse_config(text),
        None => Err(Error::InvalidInput(format!(
            "`{source}` is neither a readable file nor a built-in scenario \
             (see `list-examples`)"
        ))),
    }
}
