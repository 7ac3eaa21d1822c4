//! Orbit-driven searches: fixed points of the return map, proximity cycles
//! that realize the between-set distances, and the sampled certificates for
//! quasi-nonexpansiveness and convexity of the fixed-point set.

use crate::certificate::{Certificate, MarginTracker};
use crate::convex::{bregman, ConvexFunctionHandle};
use crate::cyclic::{composite_map, set_distance, CyclicSystem};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::sampling;
use rand::Rng;
use serde::Serialize;

/// Residual below which a supplied point is accepted as fixed before a
/// certificate runs. Claims worse than this are caller errors, not sampled
/// failures.
pub const FIXED_POINT_PRE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointStatus {
    Converged,
    NoConvergence,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointOutcome {
    pub status: FixedPointStatus,
    pub point: Vec<f64>,
    /// Applications of the return map performed.
    pub iterations: usize,
    /// Step length between the final two iterates.
    pub residual: f64,
    /// Divergence between the final two iterates, when a handle was given.
    pub divergence_residual: Option<f64>,
}

/// Iterates the return map of set `i` from `x0` until two consecutive steps
/// both move less than `tol` (a single small step can be a plateau artifact;
/// two in a row is the stopping rule). Non-convergence within `max_iter` is
/// an outcome, not an error — callers that expect divergence assert on it.
pub fn find_fixed_point(
    system: &CyclicSystem,
    i: usize,
    x0: &Point,
    f: Option<&ConvexFunctionHandle>,
    max_iter: usize,
    tol: f64,
) -> Result<FixedPointOutcome> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be positive and finite"
        )));
    }
    system.require_member(x0, i)?;
    let mut z = x0.clone();
    let mut previous_diff = f64::INFINITY;
    for m in 0..max_iter {
        let z_next = composite_map(system, i, &z)?;
        let diff = z_next.dist(&z);
        if diff <= tol && previous_diff <= tol {
            let divergence_residual = match f {
                Some(handle) => Some(bregman(handle, &z_next, &z)?),
                None => None,
            };
            return Ok(FixedPointOutcome {
                status: FixedPointStatus::Converged,
                point: z_next.into_coords(),
                iterations: m + 1,
                residual: diff,
                divergence_residual,
            });
        }
        previous_diff = diff;
        z = z_next;
    }
    let divergence_residual = None;
    Ok(FixedPointOutcome {
        status: FixedPointStatus::NoConvergence,
        point: z.into_coords(),
        iterations: max_iter,
        residual: previous_diff,
        divergence_residual,
    })
}

const PROXIMITY_DISTANCE_SEED: u64 = 0x70c5;
const PROXIMITY_DISTANCE_BUDGET: usize = 20_000;

#[derive(Clone, Debug, Serialize)]
pub struct ProximityCycle {
    pub converged: bool,
    pub iterations: usize,
    /// `points[t]` lives in set `i + t`; applying the map to the last one
    /// should come back to the first.
    pub points: Vec<Vec<f64>>,
    /// `leg_lengths[t] = |c_{t+1} - c_t|`, the last entry closing the loop.
    pub leg_lengths: Vec<f64>,
    /// Independently estimated distances between consecutive sets.
    pub set_distances: Vec<f64>,
    pub closure_gap: f64,
    pub max_leg_mismatch: f64,
}

/// Drives the return map of set `i` to its fixed point, then walks one full
/// cycle from it and compares every leg length against the independently
/// estimated distance between the corresponding sets. For a map whose return
/// map contracts onto a best-approximation point, every leg should realize
/// its set distance and the cycle should close.
pub fn find_proximity_cycle(
    system: &CyclicSystem,
    i: usize,
    x0: &Point,
    max_iter: usize,
    tol: f64,
) -> Result<ProximityCycle> {
    let fp = find_fixed_point(system, i, x0, None, max_iter, tol)?;
    let converged = fp.status == FixedPointStatus::Converged;
    let anchor = Point::new(fp.point.clone())?;

    let p = system.p();
    let mut points = vec![anchor.clone()];
    let mut idx = i;
    for _ in 0..p {
        let next = system.apply(points.last().unwrap(), idx);
        idx = system.next_index(idx);
        let sd = system.set(idx).signed_distance(&next);
        if sd > system.set(idx).tolerance() {
            return Err(Error::NotInSet {
                set_index: idx,
                signed_distance: sd,
            });
        }
        points.push(next);
    }
    let closure_gap = points[p].dist(&points[0]);

    let mut leg_lengths = Vec::with_capacity(p);
    let mut set_distances = Vec::with_capacity(p);
    let mut max_leg_mismatch = 0.0f64;
    for t in 0..p {
        let leg = points[t + 1].dist(&points[t]);
        let d = set_distance(
            system.set((i + t) % p),
            system.set((i + t + 1) % p),
            PROXIMITY_DISTANCE_BUDGET,
            PROXIMITY_DISTANCE_SEED,
        )?;
        max_leg_mismatch = max_leg_mismatch.max((leg - d.value).abs());
        leg_lengths.push(leg);
        set_distances.push(d.value);
    }

    Ok(ProximityCycle {
        converged,
        iterations: fp.iterations,
        points: points.into_iter().take(p).map(Point::into_coords).collect(),
        leg_lengths,
        set_distances,
        closure_gap,
        max_leg_mismatch,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiWitness {
    pub start: Vec<f64>,
    pub step: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Serialize)]
pub struct QuasiReport {
    /// Step length of the return map at the supplied anchor.
    pub anchor_residual: f64,
    pub certificate: Certificate<QuasiWitness>,
}

impl QuasiReport {
    pub fn passed(&self) -> bool {
        self.certificate.passed()
    }
}

/// Per-step slack for the monotonicity of `D(v, x_t)`: each comparison may
/// hold with equality, so roundoff needs room.
pub const QUASI_SLACK: f64 = 1e-10;

/// Checks divergence-quasi-nonexpansiveness of the return map of set `i` at
/// the fixed anchor `v`: along sampled orbits, `D(v, x_{t+1}) <= D(v, x_t)`
/// at every step. The anchor must actually be fixed (within
/// [`FIXED_POINT_PRE_TOL`]); a bad anchor is an error, not a counterexample.
pub fn quasi_nonexpansive_certificate(
    system: &CyclicSystem,
    f: &ConvexFunctionHandle,
    i: usize,
    v: &Point,
    n_samples: usize,
    m_steps: usize,
    seed: u64,
) -> Result<QuasiReport> {
    system.require_member(v, i)?;
    let image = composite_map(system, i, v)?;
    let anchor_residual = image.dist(v);
    if anchor_residual > FIXED_POINT_PRE_TOL {
        return Err(Error::NotFixed {
            residual: anchor_residual,
            tol: FIXED_POINT_PRE_TOL,
        });
    }

    let mut tracker = MarginTracker::new();
    let mut rng = sampling::stream(seed, 3);
    for _ in 0..n_samples {
        let start = system.set(i).sample(&mut rng)?;
        let mut x = start.clone();
        let mut before = bregman(f, v, &x)?;
        for step in 0..m_steps {
            x = composite_map(system, i, &x)?;
            let after = bregman(f, v, &x)?;
            tracker.observe(
                (before - after) / (1.0 + before.abs()),
                QuasiWitness {
                    start: start.coords().to_vec(),
                    step,
                    before,
                    after,
                },
            );
            before = after;
        }
    }
    Ok(QuasiReport {
        anchor_residual,
        certificate: tracker.certify(-QUASI_SLACK),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ComboWitness {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub alpha: f64,
    pub z: Vec<f64>,
    pub residual: f64,
}

/// Probes convexity of the fixed-point set of the return map of set `i`:
/// every supplied point must be fixed (else the claim itself is wrong and
/// the call errs), and then sampled strict convex combinations of pairs must
/// be fixed too, within `FIXED_POINT_PRE_TOL * (1 + |z|)`.
pub fn fixed_point_set_convexity_probe(
    system: &CyclicSystem,
    i: usize,
    known: &[Point],
    n_samples: usize,
    seed: u64,
) -> Result<Certificate<ComboWitness>> {
    if known.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two fixed points to combine".into(),
        ));
    }
    for q in known {
        system.require_member(q, i)?;
        let image = composite_map(system, i, q)?;
        let residual = image.dist(q);
        if residual > FIXED_POINT_PRE_TOL {
            return Err(Error::NotFixed {
                residual,
                tol: FIXED_POINT_PRE_TOL,
            });
        }
    }

    let mut tracker = MarginTracker::new();
    let mut rng = sampling::stream(seed, 4);
    for _ in 0..n_samples {
        let a = rng.gen_range(0..known.len());
        let mut b = rng.gen_range(0..known.len() - 1);
        if b >= a {
            b += 1;
        }
        let alpha = sampling::uniform(&mut rng, 0.0, 1.0);
        let z = known[a].lin_comb(alpha, &known[b], 1.0 - alpha);
        let image = composite_map(system, i, &z)?;
        let residual = image.dist(&z);
        let tol = FIXED_POINT_PRE_TOL * (1.0 + z.norm());
        tracker.observe(
            tol - residual,
            ComboWitness {
                a: known[a].coords().to_vec(),
                b: known[b].coords().to_vec(),
                alpha,
                z: z.coords().to_vec(),
                residual,
            },
        );
    }
    Ok(tracker.certify(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::{MapPiece, PiecewiseMap};
    use crate::functions::{build, FunctionSpec};
    use crate::sets::{ConvexSetDescriptor, SetSpec};
    use std::sync::Arc;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn interval(lo: f64, hi: f64) -> ConvexSetDescriptor {
        ConvexSetDescriptor::new(SetSpec::Interval { lo, hi }).unwrap()
    }

    fn affine1(a: f64, b: f64) -> MapPiece {
        MapPiece::Affine {
            matrix: vec![vec![a]],
            offset: vec![b],
            clip_lo: None,
            clip_hi: None,
        }
    }

    fn halving_system() -> CyclicSystem {
        let map = PiecewiseMap::new(vec![affine1(0.5, 0.0)], 1).unwrap();
        CyclicSystem::new("halving", vec![interval(-1.0, 1.0)], Arc::new(map)).unwrap()
    }

    fn two_interval_system() -> CyclicSystem {
        let map = PiecewiseMap::new(vec![affine1(-0.5, -0.5), affine1(-0.5, 0.5)], 1).unwrap();
        CyclicSystem::new(
            "two-intervals",
            vec![interval(1.0, 3.0), interval(-3.0, -1.0)],
            Arc::new(map),
        )
        .unwrap()
    }

    /// Shrinks the first coordinate, keeps the second: fixed-point set is
    /// the segment {0} x [-1, 1].
    fn shrink_x_system() -> CyclicSystem {
        let map = PiecewiseMap::new(
            vec![MapPiece::Affine {
                matrix: vec![vec![0.5, 0.0], vec![0.0, 1.0]],
                offset: vec![0.0, 0.0],
                clip_lo: None,
                clip_hi: None,
            }],
            2,
        )
        .unwrap();
        let set = ConvexSetDescriptor::new(SetSpec::Box {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
        })
        .unwrap();
        CyclicSystem::new("shrink-x", vec![set], Arc::new(map)).unwrap()
    }

    fn clipped_doubling_system() -> CyclicSystem {
        let map = PiecewiseMap::new(
            vec![MapPiece::Affine {
                matrix: vec![vec![2.0]],
                offset: vec![0.0],
                clip_lo: Some(vec![-1.0]),
                clip_hi: Some(vec![1.0]),
            }],
            1,
        )
        .unwrap();
        CyclicSystem::new("clipped-doubling", vec![interval(-1.0, 1.0)], Arc::new(map))
            .unwrap()
    }

    #[test]
    fn halving_fixed_point_converges_quickly() {
        let sys = halving_system();
        let f = build(&FunctionSpec::SquaredNorm { dim: 1 }).unwrap();
        let out =
            find_fixed_point(&sys, 0, &pt(&[1.0]), Some(&f), 100, 1e-10).unwrap();
        assert_eq!(out.status, FixedPointStatus::Converged);
        assert!(out.iterations <= 40, "took {}", out.iterations);
        assert!(out.point[0].abs() <= 1e-9);
        assert!(out.residual <= 1e-10);
        assert!(out.divergence_residual.unwrap() < 1e-20);
    }

    #[test]
    fn return_map_of_the_interval_pair_finds_the_anchor() {
        // The return map is x -> (x + 3)/4 with fixed point 1.
        let sys = two_interval_system();
        let out = find_fixed_point(&sys, 0, &pt(&[3.0]), None, 200, 1e-12).unwrap();
        assert_eq!(out.status, FixedPointStatus::Converged);
        assert!((out.point[0] - 1.0).abs() < 1e-11);
        assert!(out.iterations <= 30);
    }

    #[test]
    fn rotation_does_not_converge() {
        let map = PiecewiseMap::new(
            vec![MapPiece::Affine {
                matrix: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
                offset: vec![0.0, 0.0],
                clip_lo: None,
                clip_hi: None,
            }],
            2,
        )
        .unwrap();
        let set = ConvexSetDescriptor::new(SetSpec::Box {
            lo: vec![-2.0, -2.0],
            hi: vec![2.0, 2.0],
        })
        .unwrap();
        let sys = CyclicSystem::new("rotation", vec![set], Arc::new(map)).unwrap();
        let out = find_fixed_point(&sys, 0, &pt(&[1.0, 0.0]), None, 200, 1e-9).unwrap();
        assert_eq!(out.status, FixedPointStatus::NoConvergence);
        assert_eq!(out.iterations, 200);
        // Steps of a quarter turn on the unit circle have length sqrt(2).
        assert!((out.residual - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn proximity_cycle_of_the_interval_pair() {
        let sys = two_interval_system();
        let cycle = find_proximity_cycle(&sys, 0, &pt(&[3.0]), 500, 1e-12).unwrap();
        assert!(cycle.converged);
        assert!((cycle.points[0][0] - 1.0).abs() < 1e-10);
        assert!((cycle.points[1][0] + 1.0).abs() < 1e-10);
        for (leg, dist) in cycle.leg_lengths.iter().zip(&cycle.set_distances) {
            assert!((leg - 2.0).abs() < 1e-9);
            assert!((dist - 2.0).abs() < 1e-8);
        }
        assert!(cycle.closure_gap < 1e-10);
        assert!(cycle.max_leg_mismatch < 1e-8);
    }

    #[test]
    fn quasi_nonexpansive_passes_for_the_shrink_map() {
        let sys = shrink_x_system();
        let f = build(&FunctionSpec::SquaredNorm { dim: 2 }).unwrap();
        let report =
            quasi_nonexpansive_certificate(&sys, &f, 0, &pt(&[0.0, 0.3]), 100, 6, 0)
                .unwrap();
        assert!(report.passed(), "worst {}", report.certificate.worst_margin);
        assert_eq!(report.anchor_residual, 0.0);
        assert_eq!(report.certificate.samples_checked, 600);
    }

    #[test]
    fn quasi_nonexpansive_fails_for_clipped_doubling() {
        let sys = clipped_doubling_system();
        let f = build(&FunctionSpec::SquaredNorm { dim: 1 }).unwrap();
        let report =
            quasi_nonexpansive_certificate(&sys, &f, 0, &pt(&[0.0]), 100, 4, 0).unwrap();
        assert!(!report.passed());
        let w = report.certificate.witness.unwrap();
        assert!(w.after > w.before);
    }

    #[test]
    fn quasi_nonexpansive_rejects_a_moving_anchor() {
        let sys = halving_system();
        let f = build(&FunctionSpec::SquaredNorm { dim: 1 }).unwrap();
        assert!(matches!(
            quasi_nonexpansive_certificate(&sys, &f, 0, &pt(&[0.5]), 10, 2, 0),
            Err(Error::NotFixed { .. })
        ));
    }

    #[test]
    fn fixed_point_segment_is_convex_for_the_shrink_map() {
        let sys = shrink_x_system();
        let known = vec![pt(&[0.0, -1.0]), pt(&[0.0, 1.0]), pt(&[0.0, 0.25])];
        let cert = fixed_point_set_convexity_probe(&sys, 0, &known, 200, 0).unwrap();
        assert!(cert.passed(), "worst {}", cert.worst_margin);
    }

    #[test]
    fn isolated_endpoints_fail_the_convexity_probe() {
        // -1, 0, 1 are all fixed under clipped doubling, but combinations of
        // the endpoints are not: the probe must fail with a reproducible
        // witness.
        let sys = clipped_doubling_system();
        let known = vec![pt(&[-1.0]), pt(&[1.0])];
        let cert = fixed_point_set_convexity_probe(&sys, 0, &known, 100, 0).unwrap();
        assert!(!cert.passed());
        let w = cert.witness.unwrap();
        let image = composite_map(&sys, 0, &pt(&w.z)).unwrap();
        assert_eq!(image.dist(&pt(&w.z)), w.residual);
        assert!(w.residual > FIXED_POINT_PRE_TOL);
    }

    #[test]
    fn convexity_probe_rejects_spurious_claims() {
        let sys = halving_system();
        let known = vec![pt(&[0.0]), pt(&[0.5])];
        assert!(matches!(
            fixed_point_set_convexity_probe(&sys, 0, &known, 10, 0),
            Err(Error::NotFixed { .. })
        ));
        assert!(matches!(
            fixed_point_set_convexity_probe(&sys, 0, &[pt(&[0.0])], 10, 0),
            Err(Error::InvalidInput(_))
        ));
    }
}
