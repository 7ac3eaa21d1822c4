//! Convexity moduli, estimated by multi-start local search.
//!
//! Two gauges of how strongly a handle bends:
//!
//! * the *pointwise* modulus at anchor `x` and radius `t` — the infimum of
//!   the divergence `D(x, y)` over `y` on the sphere `|y - x| = t`;
//! * the *uniform* modulus at radius `t` over a region — the infimum of the
//!   midpoint gap `f(x) + f(y) - 2 f((x+y)/2)` over pairs in the region at
//!   distance `t`.
//!
//! The first dominates the second wherever both are defined (take the
//! gradient inequality at the midpoint), and the acceptance suite checks that
//! ordering numerically. Both infima are estimated the same way: spheres are
//! parametrized by hyperspherical angles, pair midpoints by region samples,
//! and a compass search runs from 32 deterministic starts; estimates are
//! therefore upper bounds that the shipped closed forms pin down exactly.

use crate::convex::{bregman, ConvexFunctionHandle};
use crate::error::{Error, Result};
use crate::optimize::compass_search;
use crate::point::Point;
use crate::sampling;
use crate::sets::ConvexSetDescriptor;
use serde::Serialize;

pub const MODULUS_STARTS: usize = 32;
const MODULUS_SEED: u64 = 0x6d6f_6475_6c75_7300; // fixed; keyed per start index
const MIN_STEP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// Every feasible start ran its step size below threshold.
    Converged,
    /// At least one start stopped on the evaluation budget instead.
    BudgetExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusEstimate {
    pub t: f64,
    pub value: f64,
    /// Best point(s) found: `[y]` for the pointwise modulus, `[x, y]` for
    /// the uniform one. Empty only in the trivial `t = 0` case.
    pub witness: Vec<Vec<f64>>,
    pub status: SearchStatus,
    pub evaluations: usize,
}

fn validate_t(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "radius t = {t} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Direction on the unit sphere of `R^dim` from `dim - 1` hyperspherical
/// angles (for `dim = 1` the empty angle vector gives the direction `[1]`,
/// and the search also polls `[-1]` via the angle-free special case).
fn direction_from_angles(angles: &[f64], dim: usize) -> Vec<f64> {
    debug_assert_eq!(angles.len() + 1, dim.max(1));
    let mut u = vec![0.0; dim];
    let mut sin_prod = 1.0;
    for (i, theta) in angles.iter().enumerate() {
        u[i] = sin_prod * theta.cos();
        sin_prod *= theta.sin();
    }
    u[dim - 1] = sin_prod;
    u
}

/// Pointwise modulus: infimum of `D(x, y)` over the sphere `|y - x| = t`.
/// The anchor must have a finite value; spheres that miss the domain
/// entirely are an error.
pub fn total_convexity_modulus(
    handle: &ConvexFunctionHandle,
    x: &Point,
    t: f64,
    budget: usize,
) -> Result<ModulusEstimate> {
    validate_t(t)?;
    handle.finite_value(x)?;
    if t == 0.0 {
        return Ok(ModulusEstimate {
            t,
            value: 0.0,
            witness: vec![x.coords().to_vec()],
            status: SearchStatus::Converged,
            evaluations: 0,
        });
    }
    let dim = handle.dim();

    let evaluate = |y: Point| -> Option<(f64, Point)> {
        if !handle.domain().interior_contains(&y) {
            return None;
        }
        bregman(handle, x, &y).ok().map(|d| (d, y))
    };

    if dim == 1 {
        // The sphere is two points; no search needed.
        let mut best: Option<(f64, Point)> = None;
        let mut evaluations = 0;
        for sign in [1.0, -1.0] {
            evaluations += 1;
            let y = Point::from_raw(vec![x.get(0) + sign * t]);
            if let Some((d, y)) = evaluate(y) {
                if best.as_ref().map_or(true, |(b, _)| d < *b) {
                    best = Some((d, y));
                }
            }
        }
        let (value, y) = best.ok_or(Error::SphereOutsideDomain { t })?;
        return Ok(ModulusEstimate {
            t,
            value,
            witness: vec![y.into_coords()],
            status: SearchStatus::Converged,
            evaluations,
        });
    }

    let slice = (budget / MODULUS_STARTS).max(16);
    let mut total_evals = 0usize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut all_converged = true;
    let mut any_feasible = false;
    for start in 0..MODULUS_STARTS {
        let mut rng = sampling::stream(MODULUS_SEED, start as u64);
        let angles: Vec<f64> = (0..dim - 1)
            .map(|_| sampling::uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI))
            .collect();
        let mut objective = |params: &[f64]| -> Option<f64> {
            let u = direction_from_angles(params, dim);
            let y = Point::from_raw(
                x.coords().iter().zip(&u).map(|(c, d)| c + t * d).collect(),
            );
            evaluate(y).map(|(d, _)| d)
        };
        let steps = vec![std::f64::consts::FRAC_PI_4; dim - 1];
        if let Some(out) = compass_search(&mut objective, &angles, &steps, MIN_STEP, slice) {
            any_feasible = true;
            total_evals += out.evaluations;
            all_converged &= out.converged;
            if best.as_ref().map_or(true, |(b, _)| out.value < *b) {
                let u = direction_from_angles(&out.params, dim);
                let y: Vec<f64> = x.coords().iter().zip(&u).map(|(c, d)| c + t * d).collect();
                best = Some((out.value, y));
            }
        } else {
            total_evals += 1; // the rejected start evaluation
        }
    }
    let (value, y) = best.ok_or(Error::SphereOutsideDomain { t })?;
    let _ = any_feasible;
    Ok(ModulusEstimate {
        t,
        value,
        witness: vec![y],
        status: if all_converged {
            SearchStatus::Converged
        } else {
            SearchStatus::BudgetExhausted
        },
        evaluations: total_evals,
    })
}

/// Uniform modulus over `region`: infimum of the midpoint gap over pairs
/// `x, y` in the region (and the handle's domain) with `|x - y| = t`.
/// Pairs are parametrized as midpoint plus half-chord direction.
pub fn uniform_convexity_modulus(
    handle: &ConvexFunctionHandle,
    t: f64,
    region: &ConvexSetDescriptor,
    budget: usize,
) -> Result<ModulusEstimate> {
    validate_t(t)?;
    if region.dim() != handle.dim() {
        return Err(Error::DimensionMismatch {
            expected: handle.dim(),
            got: region.dim(),
        });
    }
    if t == 0.0 {
        return Ok(ModulusEstimate {
            t,
            value: 0.0,
            witness: Vec::new(),
            status: SearchStatus::Converged,
            evaluations: 0,
        });
    }
    let diam = region.diameter();
    if t > diam + 1e-12 {
        return Err(Error::NoFeasiblePair { t });
    }
    let dim = handle.dim();
    let n_angles = dim - 1;

    let pair_from = |params: &[f64]| -> (Point, Point) {
        let (m, angles) = params.split_at(dim);
        let u = if dim == 1 {
            vec![1.0]
        } else {
            direction_from_angles(angles, dim)
        };
        let x = Point::from_raw(
            m.iter().zip(&u).map(|(c, d)| c - 0.5 * t * d).collect(),
        );
        let y = Point::from_raw(
            m.iter().zip(&u).map(|(c, d)| c + 0.5 * t * d).collect(),
        );
        (x, y)
    };

    let gap = |x: &Point, y: &Point| -> Option<f64> {
        if !region.contains(x) || !region.contains(y) {
            return None;
        }
        let mid = x.lin_comb(0.5, y, 0.5);
        let fx = handle.value(x).ok()?.finite()?;
        let fy = handle.value(y).ok()?.finite()?;
        let fm = handle.value(&mid).ok()?.finite()?;
        Some(fx + fy - 2.0 * fm)
    };

    let slice = (budget / MODULUS_STARTS).max(32);
    let mut total_evals = 0usize;
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut all_converged = true;
    for start in 0..MODULUS_STARTS {
        let mut rng = sampling::stream(MODULUS_SEED ^ 1, start as u64);
        // Find a feasible start: sample a midpoint and direction, retrying a
        // bounded number of times before giving the start up.
        let mut start_params: Option<Vec<f64>> = None;
        for _ in 0..64 {
            let m = match region.sample(&mut rng) {
                Ok(p) => p,
                Err(_) => break,
            };
            let angles: Vec<f64> = (0..n_angles)
                .map(|_| sampling::uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI))
                .collect();
            let mut params = m.into_coords();
            params.extend_from_slice(&angles);
            let (x, y) = pair_from(&params);
            total_evals += 1;
            if gap(&x, &y).is_some() {
                start_params = Some(params);
                break;
            }
        }
        let Some(start_params) = start_params else {
            continue;
        };
        let mut objective = |params: &[f64]| -> Option<f64> {
            let (x, y) = pair_from(params);
            gap(&x, &y)
        };
        let mut steps = vec![diam / 8.0; dim];
        steps.extend(vec![std::f64::consts::FRAC_PI_4; n_angles]);
        if let Some(out) = compass_search(&mut objective, &start_params, &steps, MIN_STEP, slice)
        {
            total_evals += out.evaluations;
            all_converged &= out.converged;
            if best.as_ref().map_or(true, |(b, _, _)| out.value < *b) {
                let (x, y) = pair_from(&out.params);
                best = Some((out.value, x.into_coords(), y.into_coords()));
            }
        }
    }
    let (value, x, y) = best.ok_or(Error::NoFeasiblePair { t })?;
    Ok(ModulusEstimate {
        t,
        value,
        witness: vec![x, y],
        status: if all_converged {
            SearchStatus::Converged
        } else {
            SearchStatus::BudgetExhausted
        },
        evaluations: total_evals,
    })
}
