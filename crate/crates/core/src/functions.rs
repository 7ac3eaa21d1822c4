//! Shipped library of convex functions.
//!
//! Each spec names a function with a closed-form gradient *and* a closed-form
//! divergence. [`build`] turns a spec into a runtime handle;
//! [`oracle_bregman`] evaluates the closed form directly, bypassing the
//! handle, so tests can pin the two against each other.

use crate::convex::{ConvexFunctionHandle, ConvexityFlags, Domain, ExtendedReal};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::sampling;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const ENTROPY_MIN_LO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `f(x) = |x|^2` on all of the space.
    SquaredNorm { dim: usize },
    /// `f(x) = x' Q x` for symmetric positive definite `q`.
    WeightedQuadratic { q: Vec<Vec<f64>> },
    /// `f(x) = sum_k x_k ln x_k` restricted to the box `[lo, hi]^dim`.
    /// The floor keeps gradients bounded; it may not go below 1e-6.
    NegativeEntropy {
        dim: usize,
        #[serde(default = "default_entropy_lo")]
        lo: f64,
        #[serde(default = "default_entropy_hi")]
        hi: f64,
    },
    /// `f(x) = <c, x>` — convex but nowhere strictly convex; its divergence
    /// is identically zero. Shipped as the canonical negative example.
    AffineStub { coeffs: Vec<f64> },
}

fn default_entropy_lo() -> f64 {
    ENTROPY_MIN_LO
}

fn default_entropy_hi() -> f64 {
    1e6
}

impl FunctionSpec {
    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::SquaredNorm { dim } => *dim,
            FunctionSpec::WeightedQuadratic { q } => q.len(),
            FunctionSpec::NegativeEntropy { dim, .. } => *dim,
            FunctionSpec::AffineStub { coeffs } => coeffs.len(),
        }
    }
}

/// Number of random directions used to screen `q` for positive definiteness.
/// A sampled check, not a factorization: it is decisive for the matrices this
/// crate ships and keeps the build path free of linear-algebra machinery.
const PD_SCREEN_DIRECTIONS: usize = 64;

const fn pd_seed() -> u64 {
    0x517c_c1b7_2722_0a95 // arbitrary fixed constant; the value is irrelevant, stability matters
}

fn validate_quadratic(q: &[Vec<f64>]) -> Result<()> {
    let d = q.len();
    if d == 0 {
        return Err(Error::InvalidFunction("matrix must be nonempty".into()));
    }
    for (i, row) in q.iter().enumerate() {
        if row.len() != d {
            return Err(Error::InvalidFunction(format!(
                "matrix row {i} has length {}, expected {d}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidFunction(format!(
                    "matrix entry ({i}, {j}) is not finite"
                )));
            }
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            if (q[i][j] - q[j][i]).abs() > 1e-12 {
                return Err(Error::InvalidFunction(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    // Positive definiteness, screened on random unit directions.
    let mut rng = sampling::stream(pd_seed(), 0);
    for _ in 0..PD_SCREEN_DIRECTIONS {
        let u = sampling::unit_direction(&mut rng, d);
        let quad = quadratic_form(q, &u);
        if quad <= 0.0 {
            return Err(Error::InvalidFunction(format!(
                "matrix is not positive definite: u'Qu = {quad:e} along {u:?}"
            )));
        }
    }
    Ok(())
}

fn quadratic_form(q: &[Vec<f64>], v: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in q.iter().enumerate() {
        let mut rowdot = 0.0;
        for (j, qij) in row.iter().enumerate() {
            rowdot += qij * v[j];
        }
        total += v[i] * rowdot;
    }
    total
}

fn matvec(q: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    q.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Builds the runtime handle for a spec, validating it first (symmetry and
/// screened positive definiteness for quadratics; floor/ceiling sanity for
/// the entropy box; finiteness everywhere).
pub fn build(spec: &FunctionSpec) -> Result<ConvexFunctionHandle> {
    match spec {
        FunctionSpec::SquaredNorm { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidFunction("dimension must be >= 1".into()));
            }
            Ok(ConvexFunctionHandle::new(
                "squared_norm",
                Domain::All { dim: *dim },
                Arc::new(|x: &Point| {
                    ExtendedReal::Finite(x.coords().iter().map(|c| c * c).sum())
                }),
                Arc::new(|x: &Point| x.scale(2.0)),
                ConvexityFlags {
                    strictly_convex: true,
                    totally_convex: true,
                    uniformly_convex: true,
                },
            ))
        }
        FunctionSpec::WeightedQuadratic { q } => {
            validate_quadratic(q)?;
            let q_eval = q.clone();
            let q_grad = q.clone();
            Ok(ConvexFunctionHandle::new(
                "weighted_quadratic",
                Domain::All { dim: q.len() },
                Arc::new(move |x: &Point| {
                    ExtendedReal::Finite(quadratic_form(&q_eval, x.coords()))
                }),
                Arc::new(move |x: &Point| {
                    Point::from_raw(matvec(&q_grad, x.coords())).scale(2.0)
                }),
                ConvexityFlags {
                    strictly_convex: true,
                    totally_convex: true,
                    uniformly_convex: true,
                },
            ))
        }
        FunctionSpec::NegativeEntropy { dim, lo, hi } => {
            if *dim == 0 {
                return Err(Error::InvalidFunction("dimension must be >= 1".into()));
            }
            if !lo.is_finite() || !hi.is_finite() || *lo < ENTROPY_MIN_LO || *lo >= *hi {
                return Err(Error::InvalidFunction(format!(
                    "entropy box [{lo}, {hi}] must satisfy 1e-6 <= lo < hi"
                )));
            }
            let (lo_v, hi_v) = (vec![*lo; *dim], vec![*hi; *dim]);
            let domain = Domain::Box {
                lo: lo_v.clone(),
                hi: hi_v.clone(),
            };
            let eval_domain = Domain::Box { lo: lo_v, hi: hi_v };
            Ok(ConvexFunctionHandle::new(
                "negative_entropy",
                domain,
                Arc::new(move |x: &Point| {
                    if eval_domain.contains(x) {
                        ExtendedReal::Finite(x.coords().iter().map(|c| c * c.ln()).sum())
                    } else {
                        ExtendedReal::PosInfinity
                    }
                }),
                Arc::new(|x: &Point| {
                    Point::from_raw(x.coords().iter().map(|c| c.ln() + 1.0).collect())
                }),
                ConvexityFlags {
                    strictly_convex: true,
                    totally_convex: true,
                    uniformly_convex: true, // on the bounded box, where f'' >= 1/hi
                },
            ))
        }
        FunctionSpec::AffineStub { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::InvalidFunction("dimension must be >= 1".into()));
            }
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFunction(
                    "affine coefficients must be finite".into(),
                ));
            }
            let c_eval = Point::new(coeffs.clone())?;
            let c_grad = c_eval.clone();
            Ok(ConvexFunctionHandle::new(
                "affine_stub",
                Domain::All { dim: coeffs.len() },
                Arc::new(move |x: &Point| ExtendedReal::Finite(c_eval.dot(x))),
                Arc::new(move |_x: &Point| c_grad.clone()),
                ConvexityFlags::default(),
            ))
        }
    }
}

/// Closed-form divergence for a spec, evaluated without going through the
/// handle's `f(y) - f(x) - <y-x, grad f(x)>` path. Domain rules match the
/// handle's.
pub fn oracle_bregman(spec: &FunctionSpec, y: &Point, x: &Point) -> Result<f64> {
    let dim = spec.dim();
    for p in [y, x] {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    match spec {
        FunctionSpec::SquaredNorm { .. } => Ok(y
            .coords()
            .iter()
            .zip(x.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()),
        FunctionSpec::WeightedQuadratic { q } => {
            let diff: Vec<f64> = y
                .coords()
                .iter()
                .zip(x.coords())
                .map(|(a, b)| a - b)
                .collect();
            Ok(quadratic_form(q, &diff))
        }
        FunctionSpec::NegativeEntropy { lo, hi, .. } => {
            let inside = |p: &Point| p.coords().iter().all(|c| *lo <= *c && *c <= *hi);
            if !inside(y) || !inside(x) {
                return Err(Error::OutsideDomain {
                    function: "negative_entropy".into(),
                });
            }
            Ok(y.coords()
                .iter()
                .zip(x.coords())
                .map(|(yi, xi)| yi * (yi / xi).ln() - yi + xi)
                .sum())
        }
        FunctionSpec::AffineStub { .. } => Ok(0.0),
    }
}
