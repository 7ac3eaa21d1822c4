//! Convex function handles, the Bregman divergence, and the probes that hold
//! a claimed handle to account.
//!
//! A handle packages an evaluator, a gradient, a domain, and a set of
//! convexity *claims*. The claims are never trusted: each one has a sampled
//! probe here (gradient monotonicity, strict positivity of the divergence,
//! midpoint convexity) that either certifies it on a batch of points or
//! returns a concrete witness of failure.
//!
//! The divergence of `f` between `y` and `x` is
//! `f(y) - f(x) - <y - x, grad f(x)>`: the gap at `y` between `f` and its
//! linearization at `x`. It is nonnegative for convex `f`, zero on the
//! diagonal, and generally asymmetric; two exact algebraic identities tie the
//! symmetrized sum and the asymmetry to gradient pairings, and
//! [`symmetric_sum_check`] / [`asymmetry_check`] evaluate both sides of each
//! independently so tests can pin the residual.

use crate::certificate::{Certificate, MarginTracker};
use crate::error::{Error, Result};
use crate::point::{inner_product, Point};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Value of an extended-real-valued function: finite, or plus infinity
/// outside the effective domain. Kept as an enum so infinities never leak
/// into downstream arithmetic unnoticed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }
}

/// Effective domain of a handle. Gradients are defined on the interior.
#[derive(Clone, Debug)]
pub enum Domain {
    All { dim: usize },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::All { dim } => *dim,
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Domain::All { dim } => x.dim() == *dim,
            Domain::Box { lo, hi } => {
                x.dim() == lo.len()
                    && x.coords()
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(c, (l, h))| *l <= *c && *c <= *h)
            }
        }
    }

    pub fn interior_contains(&self, x: &Point) -> bool {
        match self {
            Domain::All { dim } => x.dim() == *dim,
            Domain::Box { lo, hi } => {
                x.dim() == lo.len()
                    && x.coords()
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(c, (l, h))| *l < *c && *c < *h)
            }
        }
    }
}

/// Convexity properties a handle claims for itself. Probes verify; nothing
/// else in the crate assumes a claim without one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConvexityFlags {
    pub strictly_convex: bool,
    pub totally_convex: bool,
    pub uniformly_convex: bool,
}

type EvalFn = dyn Fn(&Point) -> ExtendedReal + Send + Sync;
type GradFn = dyn Fn(&Point) -> Point + Send + Sync;

#[derive(Clone)]
pub struct ConvexFunctionHandle {
    name: String,
    domain: Domain,
    eval: Arc<EvalFn>,
    grad: Arc<GradFn>,
    flags: ConvexityFlags,
}

impl fmt::Debug for ConvexFunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctionHandle")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("flags", &self.flags)
            .finish()
    }
}

impl ConvexFunctionHandle {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        eval: Arc<EvalFn>,
        grad: Arc<GradFn>,
        flags: ConvexityFlags,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            eval,
            grad,
            flags,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn flags(&self) -> ConvexityFlags {
        self.flags
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Extended-real value of the function at `x`.
    pub fn value(&self, x: &Point) -> Result<ExtendedReal> {
        self.check_dim(x)?;
        Ok((self.eval)(x))
    }

    /// Finite value, erroring outside the effective domain.
    pub fn finite_value(&self, x: &Point) -> Result<f64> {
        self.value(x)?.finite().ok_or_else(|| Error::OutsideDomain {
            function: self.name.clone(),
        })
    }

    /// Gradient at `x`; errors outside the domain interior.
    pub fn gradient(&self, x: &Point) -> Result<Point> {
        self.check_dim(x)?;
        if !self.domain.interior_contains(x) {
            return Err(Error::OutsideDomain {
                function: self.name.clone(),
            });
        }
        Ok((self.grad)(x))
    }
}

/// Divergence of `handle` between `y` and `x` (gap at `y` of the
/// linearization at `x`). Requires `x` in the domain interior and `y` in the
/// domain; result is nonnegative for convex handles up to roundoff.
pub fn bregman(handle: &ConvexFunctionHandle, y: &Point, x: &Point) -> Result<f64> {
    let fy = handle.finite_value(y)?;
    let fx = handle.finite_value(x)?;
    let gx = handle.gradient(x)?;
    Ok(fy - fx - y.sub(x).dot(&gx))
}

/// One sampled finite-difference comparison of [`directional_derivative_check`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscrepancyStep {
    pub step: f64,
    /// `|(f(x + t y) - f(x)) / t - <y, grad f(x)>|`, or `None` when
    /// `x + t y` left the domain and the step was skipped.
    pub discrepancy: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionalDerivativeReport {
    pub steps: Vec<DiscrepancyStep>,
    /// Broad decreasing trend over the evaluated steps (25% per-step noise
    /// allowance plus a 1e-9 floor for values at the roundoff level).
    pub decreasing_trend: bool,
    pub final_discrepancy: Option<f64>,
    pub skipped: usize,
}

/// Compares one-sided difference quotients against the gradient pairing along
/// direction `y`, over a decreasing step schedule.
///
/// The schedule must be strictly decreasing with smallest step `>= 1e-8`
/// (below that the quotient is dominated by cancellation and says nothing
/// about the gradient).
pub fn directional_derivative_check(
    handle: &ConvexFunctionHandle,
    x: &Point,
    y: &Point,
    steps: &[f64],
) -> Result<DirectionalDerivativeReport> {
    handle.check_dim(x)?;
    handle.check_dim(y)?;
    if !handle.domain.interior_contains(x) {
        return Err(Error::OutsideDomain {
            function: handle.name.clone(),
        });
    }
    if steps.is_empty() {
        return Err(Error::InvalidInput("step schedule is empty".into()));
    }
    for pair in steps.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::InvalidInput(
                "step schedule must be strictly decreasing".into(),
            ));
        }
    }
    let smallest = *steps.last().unwrap();
    if smallest < 1e-8 {
        return Err(Error::InvalidInput(format!(
            "smallest step {smallest:e} is below 1e-8; the quotient would be pure roundoff"
        )));
    }

    let fx = handle.finite_value(x)?;
    let pairing = y.dot(&handle.gradient(x)?);
    let mut out = Vec::with_capacity(steps.len());
    let mut skipped = 0;
    for &t in steps {
        let shifted = x.lin_comb(1.0, y, t);
        let discrepancy = match handle.value(&shifted)?.finite() {
            Some(f_shifted) => Some(((f_shifted - fx) / t - pairing).abs()),
            None => {
                skipped += 1;
                None
            }
        };
        out.push(DiscrepancyStep {
            step: t,
            discrepancy,
        });
    }

    let present: Vec<f64> = out.iter().filter_map(|s| s.discrepancy).collect();
    let mut trend = !present.is_empty();
    for pair in present.windows(2) {
        if pair[1] > pair[0] * 1.25 + 1e-9 {
            trend = false;
        }
    }
    if let (Some(first), Some(last)) = (present.first(), present.last()) {
        // Same 1e-9 floor as the per-step check: for an affine function the
        // discrepancy is pure roundoff amplified by 1/t, which grows as the
        // step shrinks without saying anything about the gradient.
        if *last > (*first + 1e-12).max(1e-9) {
            trend = false;
        }
    }

    Ok(DirectionalDerivativeReport {
        decreasing_trend: trend,
        final_discrepancy: present.last().copied(),
        skipped,
        steps: out,
    })
}

/// Witness for pairwise probes: the offending pair plus both sides of the
/// violated inequality.
#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

fn validate_pairs(
    handle: &ConvexFunctionHandle,
    pairs: &[(Point, Point)],
    min_separation: f64,
) -> Result<()> {
    for (index, (x, y)) in pairs.iter().enumerate() {
        handle.check_dim(x)?;
        handle.check_dim(y)?;
        if !handle.domain.interior_contains(x) || !handle.domain.interior_contains(y) {
            return Err(Error::OutsideDomain {
                function: handle.name.clone(),
            });
        }
        let separation = x.dist(y);
        if separation <= min_separation {
            return Err(Error::DegeneratePair {
                index,
                separation,
                min_separation,
            });
        }
    }
    Ok(())
}

/// Checks `<x - y, grad f(x) - grad f(y)> > 0` over the given pairs — the
/// gradient-monotonicity form of strict convexity. Pairs closer than `1e-9`
/// are rejected as degenerate.
pub fn gradient_monotonicity_probe(
    handle: &ConvexFunctionHandle,
    pairs: &[(Point, Point)],
) -> Result<Certificate<PairWitness>> {
    validate_pairs(handle, pairs, 1e-9)?;
    let mut tracker = MarginTracker::new();
    for (x, y) in pairs {
        let gx = handle.gradient(x)?;
        let gy = handle.gradient(y)?;
        let margin = x.sub(y).dot(&gx.sub(&gy));
        tracker.observe(
            margin,
            PairWitness {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
                lhs: margin,
                rhs: 0.0,
            },
        );
    }
    Ok(tracker.certify(f64::MIN_POSITIVE))
}

/// Checks strict positivity of the divergence off the diagonal:
/// `D(y, x) > 0` for every pair with separation above `1e-6`. Closer pairs
/// are rejected rather than silently weakening the check.
pub fn strict_positivity_probe(
    handle: &ConvexFunctionHandle,
    pairs: &[(Point, Point)],
) -> Result<Certificate<PairWitness>> {
    validate_pairs(handle, pairs, 1e-6)?;
    let mut tracker = MarginTracker::new();
    for (x, y) in pairs {
        let d = bregman(handle, y, x)?;
        tracker.observe(
            d,
            PairWitness {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
                lhs: d,
                rhs: 0.0,
            },
        );
    }
    Ok(tracker.certify(f64::MIN_POSITIVE))
}

/// One midpoint-convexity sample: `alpha` must lie in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct ConvexitySample {
    pub x: Point,
    pub y: Point,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha: f64,
    /// `alpha f(x) + (1 - alpha) f(y) - f(alpha x + (1 - alpha) y)`.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityCertificates {
    /// Plain convexity, margin allowed down to `-1e-12` for roundoff.
    pub plain: Certificate<ConvexityWitness>,
    /// Strict convexity on the eligible samples (`alpha` in `(0.05, 0.95)`,
    /// separation above `1e-6`); requires a strictly positive margin.
    pub strict: Certificate<ConvexityWitness>,
    pub strict_eligible: usize,
}

/// Samples the defining inequality of convexity, reporting plain and strict
/// verdicts separately (an affine function passes plain and fails strict).
pub fn convexity_probe(
    handle: &ConvexFunctionHandle,
    samples: &[ConvexitySample],
) -> Result<ConvexityCertificates> {
    let mut plain = MarginTracker::new();
    let mut strict = MarginTracker::new();
    for (index, sample) in samples.iter().enumerate() {
        handle.check_dim(&sample.x)?;
        handle.check_dim(&sample.y)?;
        if !(0.0..=1.0).contains(&sample.alpha) {
            return Err(Error::InvalidInput(format!(
                "sample {index}: alpha {} outside [0, 1]",
                sample.alpha
            )));
        }
        if !handle.domain.contains(&sample.x) || !handle.domain.contains(&sample.y) {
            return Err(Error::OutsideDomain {
                function: handle.name.clone(),
            });
        }
        let alpha = sample.alpha;
        let combo = sample.x.lin_comb(alpha, &sample.y, 1.0 - alpha);
        let fx = handle.finite_value(&sample.x)?;
        let fy = handle.finite_value(&sample.y)?;
        let fc = handle.finite_value(&combo)?;
        let margin = alpha * fx + (1.0 - alpha) * fy - fc;
        let witness = ConvexityWitness {
            x: sample.x.coords().to_vec(),
            y: sample.y.coords().to_vec(),
            alpha,
            margin,
        };
        plain.observe(margin, witness.clone());
        if alpha > 0.05 && alpha < 0.95 && sample.x.dist(&sample.y) > 1e-6 {
            strict.observe(margin, witness);
        }
    }
    let strict_eligible = strict.samples;
    Ok(ConvexityCertificates {
        plain: plain.certify(-1e-12),
        strict: strict.certify(f64::MIN_POSITIVE),
        strict_eligible,
    })
}

/// Two independently evaluated sides of an algebraic identity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `residual < 1e-10 * (1 + |lhs|)`.
    pub within_tolerance: bool,
}

fn identity_check(lhs: f64, rhs: f64) -> IdentityCheck {
    let residual = (lhs - rhs).abs();
    IdentityCheck {
        lhs,
        rhs,
        residual,
        within_tolerance: residual < 1e-10 * (1.0 + lhs.abs()),
    }
}

/// Symmetrized divergence identity: the left side is `D(y,x) + D(x,y)`, the
/// right side is `-<y - x, grad f(x) - grad f(y)>`; both are nonnegative for
/// convex `f` and agree exactly in exact arithmetic.
pub fn symmetric_sum_check(
    handle: &ConvexFunctionHandle,
    x: &Point,
    y: &Point,
) -> Result<IdentityCheck> {
    let lhs = bregman(handle, y, x)? + bregman(handle, x, y)?;
    let gx = handle.gradient(x)?;
    let gy = handle.gradient(y)?;
    let rhs = -inner_product(&y.sub(x), &gx.sub(&gy))?;
    Ok(identity_check(lhs, rhs))
}

/// Asymmetry identity: the left side is `D(y,x) - D(x,y)`, the right side is
/// `2 (f(y) - f(x)) - <y - x, grad f(x) + grad f(y)>`.
pub fn asymmetry_check(
    handle: &ConvexFunctionHandle,
    x: &Point,
    y: &Point,
) -> Result<IdentityCheck> {
    let lhs = bregman(handle, y, x)? - bregman(handle, x, y)?;
    let fy = handle.finite_value(y)?;
    let fx = handle.finite_value(x)?;
    let gx = handle.gradient(x)?;
    let gy = handle.gradient(y)?;
    let rhs = 2.0 * (fy - fx) - inner_product(&y.sub(x), &gx.add(&gy))?;
    Ok(identity_check(lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceVerdict {
    /// Gap shrank below `1e-3` and the final divergence is below `1e-8`.
    Pass,
    /// Gap shrank but the divergence did not follow.
    Fail,
    /// The paired sequences never became close; the check does not apply.
    HypothesisNotMet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceDiagnostic {
    pub final_gap: f64,
    pub final_divergence: f64,
    pub verdict: SequenceVerdict,
    /// Converse direction, reported for information only: did a vanishing
    /// divergence come with a vanishing gap on this sequence?
    pub converse_gap_small: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequentialConsistencyReport {
    pub sequences: Vec<SequenceDiagnostic>,
    pub all_passed: bool,
}

/// Sequential consistency probe: along each paired sequence, if the norm gap
/// `|x_n - y_n|` vanishes then the divergence `D(x_n, y_n)` must vanish too.
/// "Vanishes" is judged at the final index: gap below `1e-3`, divergence
/// below `1e-8`. Sequences whose gap never shrinks are labeled
/// `hypothesis_not_met` rather than pass or fail.
pub fn sequential_consistency_probe(
    handle: &ConvexFunctionHandle,
    sequences: &[Vec<(Point, Point)>],
) -> Result<SequentialConsistencyReport> {
    let mut out = Vec::with_capacity(sequences.len());
    let mut all_passed = true;
    for (index, seq) in sequences.iter().enumerate() {
        if seq.is_empty() {
            return Err(Error::InvalidInput(format!("sequence {index} is empty")));
        }
        let (last_x, last_y) = seq.last().unwrap();
        let final_gap = last_x.dist(last_y);
        let final_divergence = bregman(handle, last_x, last_y)?;
        let hypothesis_met = final_gap <= 1e-3;
        let verdict = if !hypothesis_met {
            SequenceVerdict::HypothesisNotMet
        } else if final_divergence.abs() <= 1e-8 {
            SequenceVerdict::Pass
        } else {
            SequenceVerdict::Fail
        };
        if verdict == SequenceVerdict::Fail {
            all_passed = false;
        }
        out.push(SequenceDiagnostic {
            final_gap,
            final_divergence,
            verdict,
            converse_gap_small: final_divergence.abs() <= 1e-8 && final_gap <= 1e-3,
        });
    }
    Ok(SequentialConsistencyReport {
        sequences: out,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{build, FunctionSpec};

    fn squared_norm(dim: usize) -> ConvexFunctionHandle {
        build(&FunctionSpec::SquaredNorm { dim }).unwrap()
    }

    fn entropy_2d() -> ConvexFunctionHandle {
        build(&FunctionSpec::NegativeEntropy {
            dim: 2,
            lo: 0.1,
            hi: 10.0,
        })
        .unwrap()
    }

    fn affine(coeffs: Vec<f64>) -> ConvexFunctionHandle {
        build(&FunctionSpec::AffineStub { coeffs }).unwrap()
    }

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn bregman_squared_norm_closed_form() {
        // f(u) = u^2 in one dimension: D(y, x) = (y - x)^2 by expanding
        // y^2 - x^2 - (y - x) * 2x. Hand value at y=3, x=1: 4.
        let f = squared_norm(1);
        let d = bregman(&f, &pt(&[3.0]), &pt(&[1.0])).unwrap();
        assert_eq!(d, 4.0);
    }

    #[test]
    fn bregman_vanishes_exactly_on_the_diagonal() {
        let f = entropy_2d();
        let x = pt(&[0.7, 3.2]);
        assert_eq!(bregman(&f, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn bregman_entropy_closed_form() {
        // Relative-entropy form: D(y, x) = sum y ln(y/x) - y + x.
        // At y=2, x=1 (one active coordinate): 2 ln 2 - 1.
        let f = build(&FunctionSpec::NegativeEntropy {
            dim: 1,
            lo: 0.1,
            hi: 10.0,
        })
        .unwrap();
        let d = bregman(&f, &pt(&[2.0]), &pt(&[1.0])).unwrap();
        let oracle = 2.0 * (2.0f64).ln() - 1.0;
        assert!((d - oracle).abs() < 1e-14);
    }

    #[test]
    fn bregman_errors_outside_domain() {
        let f = entropy_2d();
        let inside = pt(&[1.0, 1.0]);
        let outside = pt(&[0.01, 1.0]);
        assert!(matches!(
            bregman(&f, &outside, &inside),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn directional_derivative_squared_norm_exact_error() {
        // f(u) = u^2: (f(x+ty) - f(x))/t - 2xy = t y^2 exactly, so the
        // discrepancy at t = 1e-4 with y = 1 is 1e-4 up to roundoff.
        let f = squared_norm(1);
        let report =
            directional_derivative_check(&f, &pt(&[2.0]), &pt(&[1.0]), &[1e-2, 1e-3, 1e-4])
                .unwrap();
        let last = report.final_discrepancy.unwrap();
        assert!((last - 1e-4).abs() < 1e-10, "got {last}");
        assert!(report.decreasing_trend);
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn directional_derivative_affine_within_roundoff() {
        // The quotient equals the pairing identically, but dividing the
        // cancellation error of `f(x + ty) - f(x)` by t leaves roundoff of
        // order eps/t — about 1e-10 at the smallest step here.
        let f = affine(vec![2.0, -1.0]);
        let report = directional_derivative_check(
            &f,
            &pt(&[0.3, 0.4]),
            &pt(&[1.0, 1.0]),
            &[1e-2, 1e-4, 1e-6],
        )
        .unwrap();
        for step in &report.steps {
            let disc = step.discrepancy.unwrap();
            assert!(disc.abs() <= 1e-9, "step {}: {disc}", step.step);
        }
        assert!(report.decreasing_trend);
    }

    #[test]
    fn directional_derivative_skips_steps_that_leave_the_domain() {
        // x = (9.5, 9.5) heading toward the upper corner of the box: the
        // largest step exits, the small ones stay in.
        let f = entropy_2d();
        let report = directional_derivative_check(
            &f,
            &pt(&[9.5, 9.5]),
            &pt(&[1.0, 1.0]),
            &[1.0, 1e-2, 1e-4],
        )
        .unwrap();
        assert_eq!(report.skipped, 1);
        assert!(report.steps[0].discrepancy.is_none());
        assert!(report.final_discrepancy.unwrap() < 1e-3);
    }

    #[test]
    fn directional_derivative_rejects_bad_schedules() {
        let f = squared_norm(1);
        let x = pt(&[0.0]);
        let y = pt(&[1.0]);
        assert!(directional_derivative_check(&f, &x, &y, &[]).is_err());
        assert!(directional_derivative_check(&f, &x, &y, &[1e-3, 1e-3]).is_err());
        assert!(directional_derivative_check(&f, &x, &y, &[1e-4, 1e-9]).is_err());
    }

    #[test]
    fn monotonicity_hand_values() {
        // f(u) = u^2: <x - y, 2x - 2y> = 2 (x - y)^2 = 2 at x=1, y=0.
        let f = squared_norm(1);
        let cert = gradient_monotonicity_probe(&f, &[(pt(&[1.0]), pt(&[0.0]))]).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.worst_margin, 2.0);

        // Entropy: <x - y, ln x - ln y> = ln 2 at x=2, y=1.
        let f = build(&FunctionSpec::NegativeEntropy {
            dim: 1,
            lo: 0.1,
            hi: 10.0,
        })
        .unwrap();
        let cert = gradient_monotonicity_probe(&f, &[(pt(&[2.0]), pt(&[1.0]))]).unwrap();
        assert!((cert.worst_margin - (2.0f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn monotonicity_fails_for_affine_with_witness() {
        let f = affine(vec![1.0]);
        let cert = gradient_monotonicity_probe(&f, &[(pt(&[1.0]), pt(&[0.0]))]).unwrap();
        assert!(!cert.passed());
        let w = cert.witness.unwrap();
        assert_eq!(w.lhs, 0.0);
    }

    #[test]
    fn monotonicity_rejects_degenerate_pairs() {
        let f = squared_norm(1);
        let err = gradient_monotonicity_probe(&f, &[(pt(&[1.0]), pt(&[1.0]))]);
        assert!(matches!(err, Err(Error::DegeneratePair { index: 0, .. })));
    }

    #[test]
    fn strict_positivity_affine_fails_with_reproducible_witness() {
        let f = affine(vec![3.0, -2.0]);
        let cert =
            strict_positivity_probe(&f, &[(pt(&[0.0, 0.0]), pt(&[1.0, 1.0]))]).unwrap();
        assert!(!cert.passed());
        let w = cert.witness.unwrap();
        // Re-evaluating the witness reproduces the violation exactly.
        let d = bregman(&f, &pt(&w.y), &pt(&w.x)).unwrap();
        assert_eq!(d, w.lhs);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn convexity_probe_hand_margin() {
        // f(u) = u^2, x=0, y=2, alpha=1/2: margin = 2 - 1 = 1.
        let f = squared_norm(1);
        let certs = convexity_probe(
            &f,
            &[ConvexitySample {
                x: pt(&[0.0]),
                y: pt(&[2.0]),
                alpha: 0.5,
            }],
        )
        .unwrap();
        assert_eq!(certs.plain.worst_margin, 1.0);
        assert!(certs.plain.passed());
        assert!(certs.strict.passed());
    }

    #[test]
    fn convexity_probe_affine_plain_passes_strict_fails() {
        let f = affine(vec![1.0]);
        let samples: Vec<ConvexitySample> = (1..=10)
            .map(|k| ConvexitySample {
                x: pt(&[-(k as f64)]),
                y: pt(&[k as f64]),
                alpha: 0.5,
            })
            .collect();
        let certs = convexity_probe(&f, &samples).unwrap();
        assert!(certs.plain.passed());
        assert!(!certs.strict.passed());
        assert_eq!(certs.strict.worst_margin, 0.0);
    }

    #[test]
    fn convexity_probe_endpoint_alpha_counts_only_for_plain() {
        let f = squared_norm(1);
        let certs = convexity_probe(
            &f,
            &[ConvexitySample {
                x: pt(&[0.0]),
                y: pt(&[1.0]),
                alpha: 0.0,
            }],
        )
        .unwrap();
        assert_eq!(certs.strict_eligible, 0);
        assert!(certs.plain.passed());
    }

    #[test]
    fn symmetric_sum_hand_values() {
        // f(u) = u^2: both sides equal 2 (y - x)^2 = 8 at x=1, y=3.
        let f = squared_norm(1);
        let check = symmetric_sum_check(&f, &pt(&[1.0]), &pt(&[3.0])).unwrap();
        assert_eq!(check.lhs, 8.0);
        assert_eq!(check.rhs, 8.0);
        assert!(check.within_tolerance);

        // Entropy at x=1, y=2: both sides equal (2-1) ln(2/1) = ln 2.
        let f = build(&FunctionSpec::NegativeEntropy {
            dim: 1,
            lo: 0.1,
            hi: 10.0,
        })
        .unwrap();
        let check = symmetric_sum_check(&f, &pt(&[1.0]), &pt(&[2.0])).unwrap();
        assert!((check.lhs - (2.0f64).ln()).abs() < 1e-14);
        assert!(check.within_tolerance);
        assert!(check.lhs >= 0.0);
    }

    #[test]
    fn asymmetry_hand_values() {
        // f(u) = u^2 is symmetric: lhs = 0, and the right side collapses to
        // 2 (y^2 - x^2) - (y - x) * 2 (x + y) = 0.
        let f = squared_norm(1);
        let check = asymmetry_check(&f, &pt(&[1.0]), &pt(&[3.0])).unwrap();
        assert_eq!(check.lhs, 0.0);
        assert_eq!(check.rhs, 0.0);

        // Entropy at x=1, y=2: D(y,x) = 2 ln 2 - 1, D(x,y) = 1 - ln 2, so the
        // difference is 3 ln 2 - 2; the right side must agree.
        let f = build(&FunctionSpec::NegativeEntropy {
            dim: 1,
            lo: 0.1,
            hi: 10.0,
        })
        .unwrap();
        let check = asymmetry_check(&f, &pt(&[1.0]), &pt(&[2.0])).unwrap();
        let oracle = 3.0 * (2.0f64).ln() - 2.0;
        assert!((check.lhs - oracle).abs() < 1e-14);
        assert!(check.within_tolerance);
    }

    #[test]
    fn identity_checks_on_the_diagonal_are_exact() {
        let f = entropy_2d();
        let x = pt(&[1.3, 2.4]);
        let sym = symmetric_sum_check(&f, &x, &x).unwrap();
        assert_eq!(sym.lhs, 0.0);
        assert_eq!(sym.residual, 0.0);
        let asym = asymmetry_check(&f, &x, &x).unwrap();
        assert_eq!(asym.lhs, 0.0);
        assert_eq!(asym.residual, 0.0);
    }

    #[test]
    fn sequential_consistency_converging_pair_passes() {
        // x_n = 1 + 1/n, y_n = 1: gap -> 0 and D -> 0 for the square.
        let f = squared_norm(1);
        let seq: Vec<(Point, Point)> = (1..=20_000)
            .map(|n| (pt(&[1.0 + 1.0 / n as f64]), pt(&[1.0])))
            .collect();
        let report = sequential_consistency_probe(&f, &[seq]).unwrap();
        assert!(report.all_passed);
        assert_eq!(report.sequences[0].verdict, SequenceVerdict::Pass);
    }

    #[test]
    fn sequential_consistency_flags_hypothesis_not_met() {
        let f = squared_norm(1);
        let seq: Vec<(Point, Point)> = (1..=100).map(|_| (pt(&[0.0]), pt(&[1.0]))).collect();
        let report = sequential_consistency_probe(&f, &[seq]).unwrap();
        assert_eq!(
            report.sequences[0].verdict,
            SequenceVerdict::HypothesisNotMet
        );
        // Not-met is not a failure.
        assert!(report.all_passed);
    }

    #[test]
    fn sequential_consistency_entropy_passes() {
        let f = entropy_2d();
        let seq: Vec<(Point, Point)> = (1..=20_000)
            .map(|n| {
                let t = 1.0 / n as f64;
                (pt(&[1.0 + t, 2.0 - t]), pt(&[1.0, 2.0]))
            })
            .collect();
        let report = sequential_consistency_probe(&f, &[seq]).unwrap();
        assert!(report.all_passed);
    }
}
