//! Closed bounded convex sets: membership, projection, sampling, geometry.
//!
//! Four kinds are supported: intervals, boxes, Euclidean balls, and bounded
//! intersections of halfspaces (dimension at most 3). Halfspace
//! intersections are validated eagerly at construction: vertices are
//! enumerated by solving the d-subsets of active boundaries, nonemptiness
//! requires at least one feasible vertex, and boundedness is decided by
//! checking that the recession cone meets the unit cube only at the origin.

use crate::error::{Error, Result};
use crate::point::Point;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default membership slack: a point within this Euclidean distance of the
/// set counts as a member. Orbit checks would otherwise flag exact boundary
/// images (for example a map that lands on an endpoint) as escapes.
pub const DEFAULT_MEMBERSHIP_TOLERANCE: f64 = 1e-9;

const MAX_POLYTOPE_DIM: usize = 3;
const SAMPLER_MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    /// Outward normal `a` of the constraint `a . x <= offset`.
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    HalfspaceIntersection { halfspaces: Vec<Halfspace> },
}

/// A validated set. Construction proves nonemptiness and boundedness, and
/// (for polytopes) caches the vertex list that `diameter`, `bounding_box`,
/// and the sampler reuse.
#[derive(Clone, Debug)]
pub struct ConvexSetDescriptor {
    spec: SetSpec,
    tolerance: f64,
    dim: usize,
    /// Vertices, exact for polytopes; empty for the other kinds.
    vertices: Vec<Vec<f64>>,
    bbox_lo: Vec<f64>,
    bbox_hi: Vec<f64>,
}

impl ConvexSetDescriptor {
    pub fn new(spec: SetSpec) -> Result<Self> {
        Self::with_tolerance(spec, DEFAULT_MEMBERSHIP_TOLERANCE)
    }

    pub fn with_tolerance(spec: SetSpec, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::InvalidSet(format!(
                "membership tolerance {tolerance} must be finite and nonnegative"
            )));
        }
        let (dim, vertices, bbox_lo, bbox_hi) = match &spec {
            SetSpec::Interval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::InvalidSet(format!(
                        "interval [{lo}, {hi}] must be finite with lo <= hi"
                    )));
                }
                (1, Vec::new(), vec![*lo], vec![*hi])
            }
            SetSpec::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidSet(
                        "box bounds must be nonempty and of equal length".into(),
                    ));
                }
                for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
                    if !l.is_finite() || !h.is_finite() || l > h {
                        return Err(Error::InvalidSet(format!(
                            "box coordinate {i}: [{l}, {h}] must be finite with lo <= hi"
                        )));
                    }
                }
                (lo.len(), Vec::new(), lo.clone(), hi.clone())
            }
            SetSpec::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSet(
                        "ball center must be nonempty and finite".into(),
                    ));
                }
                if !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::InvalidSet(format!(
                        "ball radius {radius} must be finite and positive"
                    )));
                }
                let lo = center.iter().map(|c| c - radius).collect();
                let hi = center.iter().map(|c| c + radius).collect();
                (center.len(), Vec::new(), lo, hi)
            }
            SetSpec::HalfspaceIntersection { halfspaces } => {
                let (dim, vertices) = validate_polytope(halfspaces)?;
                let mut lo = vec![f64::MAX; dim];
                let mut hi = vec![f64::MIN; dim];
                for v in &vertices {
                    for i in 0..dim {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (dim, vertices, lo, hi)
            }
        };
        Ok(Self {
            spec,
            tolerance,
            dim,
            vertices,
            bbox_lo,
            bbox_hi,
        })
    }

    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Membership within the set's tolerance.
    pub fn contains(&self, x: &Point) -> bool {
        self.signed_distance(x) <= self.tolerance
    }

    /// Euclidean distance to the set: positive outside, zero on the
    /// boundary, negative (depth to the nearest face) inside. Non-finite
    /// points report `+inf` (definitely outside).
    pub fn signed_distance(&self, x: &Point) -> f64 {
        if x.dim() != self.dim || !x.is_finite() {
            return f64::INFINITY;
        }
        match &self.spec {
            SetSpec::Interval { lo, hi } => signed_distance_box(x.coords(), &[*lo], &[*hi]),
            SetSpec::Box { lo, hi } => signed_distance_box(x.coords(), lo, hi),
            SetSpec::Ball { center, radius } => {
                let dist: f64 = x
                    .coords()
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist - radius
            }
            SetSpec::HalfspaceIntersection { halfspaces } => {
                let mut worst_inside = f64::MAX;
                let mut any_violated = false;
                for hs in halfspaces {
                    let norm = norm_of(&hs.normal);
                    let slack = (hs.offset - dot(&hs.normal, x.coords())) / norm;
                    if slack < 0.0 {
                        any_violated = true;
                    }
                    worst_inside = worst_inside.min(slack);
                }
                if !any_violated {
                    -worst_inside
                } else {
                    // True Euclidean distance needs the projection.
                    let p = self.project(x);
                    p.dist(x)
                }
            }
        }
    }

    /// Euclidean projection onto the set. Exact for intervals, boxes, and
    /// balls; Dykstra's alternating scheme over the halfspaces for
    /// polytopes, run to a 1e-13 stall.
    pub fn project(&self, x: &Point) -> Point {
        match &self.spec {
            SetSpec::Interval { lo, hi } => {
                Point::from_raw(vec![x.get(0).clamp(*lo, *hi)])
            }
            SetSpec::Box { lo, hi } => Point::from_raw(
                x.coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (l, h))| c.clamp(*l, *h))
                    .collect(),
            ),
            SetSpec::Ball { center, radius } => {
                let c = Point::from_raw(center.clone());
                let offset = x.sub(&c);
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    c.add(&offset.scale(radius / dist))
                }
            }
            SetSpec::HalfspaceIntersection { halfspaces } => {
                dykstra_project(halfspaces, x)
            }
        }
    }

    /// Uniform sample. Rejection from the bounding box for polytopes, which
    /// fails with an error on sets too thin to hit.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Point> {
        match &self.spec {
            SetSpec::Interval { lo, hi } => Ok(Point::from_raw(vec![
                crate::sampling::uniform(rng, *lo, *hi),
            ])),
            SetSpec::Box { lo, hi } => Ok(Point::from_raw(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| crate::sampling::uniform(rng, *l, *h))
                    .collect(),
            )),
            SetSpec::Ball { center, radius } => {
                let dir = crate::sampling::unit_direction(rng, self.dim);
                let r = *radius * rng.gen::<f64>().powf(1.0 / self.dim as f64);
                Ok(Point::from_raw(
                    center.iter().zip(&dir).map(|(c, d)| c + r * d).collect(),
                ))
            }
            SetSpec::HalfspaceIntersection { halfspaces } => {
                for _ in 0..SAMPLER_MAX_ATTEMPTS {
                    let candidate: Vec<f64> = self
                        .bbox_lo
                        .iter()
                        .zip(&self.bbox_hi)
                        .map(|(l, h)| crate::sampling::uniform(rng, *l, *h))
                        .collect();
                    let feasible = halfspaces
                        .iter()
                        .all(|hs| dot(&hs.normal, &candidate) <= hs.offset + 1e-12);
                    if feasible {
                        return Ok(Point::from_raw(candidate));
                    }
                }
                Err(Error::SamplerFailure {
                    set: "halfspace_intersection".into(),
                    attempts: SAMPLER_MAX_ATTEMPTS,
                })
            }
        }
    }

    /// Diameter: exact for every kind (max pairwise vertex distance for
    /// polytopes, box diagonal, interval length, twice the radius).
    pub fn diameter(&self) -> f64 {
        match &self.spec {
            SetSpec::Interval { lo, hi } => hi - lo,
            SetSpec::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| (h - l) * (h - l))
                .sum::<f64>()
                .sqrt(),
            SetSpec::Ball { radius, .. } => 2.0 * radius,
            SetSpec::HalfspaceIntersection { .. } => {
                let mut best = 0.0f64;
                for (i, u) in self.vertices.iter().enumerate() {
                    for w in &self.vertices[i + 1..] {
                        let d = u
                            .iter()
                            .zip(w)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt();
                        best = best.max(d);
                    }
                }
                best
            }
        }
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox_lo, &self.bbox_hi)
    }

    /// Polytope vertices (empty for other kinds).
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_of(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn signed_distance_box(x: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut outside_sq = 0.0;
    let mut inside_margin = f64::MAX;
    for ((c, l), h) in x.iter().zip(lo).zip(hi) {
        let below = l - c;
        let above = c - h;
        if below > 0.0 {
            outside_sq += below * below;
        } else if above > 0.0 {
            outside_sq += above * above;
        }
        inside_margin = inside_margin.min((c - l).min(h - c));
    }
    if outside_sq > 0.0 {
        outside_sq.sqrt()
    } else {
        -inside_margin
    }
}

/// Gaussian elimination with partial pivoting; `None` when near-singular.
fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot_abs < 1e-12 {
            return None;
        }
        m.swap(col, pivot_row);
        for r in 0..n {
            if r != col {
                let factor = m[r][col] / m[col][col];
                for c in col..=n {
                    let sub = factor * m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        // Advance to the next lexicographic combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Validates a halfspace list: consistent dimension (at most 3), nonzero
/// normals, nonempty and bounded intersection. Returns `(dim, vertices)`.
fn validate_polytope(halfspaces: &[Halfspace]) -> Result<(usize, Vec<Vec<f64>>)> {
    if halfspaces.is_empty() {
        return Err(Error::InvalidSet("halfspace list is empty".into()));
    }
    let dim = halfspaces[0].normal.len();
    if dim == 0 || dim > MAX_POLYTOPE_DIM {
        return Err(Error::InvalidSet(format!(
            "halfspace intersections support dimensions 1 through {MAX_POLYTOPE_DIM}, got {dim}"
        )));
    }
    for (i, hs) in halfspaces.iter().enumerate() {
        if hs.normal.len() != dim {
            return Err(Error::InvalidSet(format!(
                "halfspace {i} has dimension {}, expected {dim}",
                hs.normal.len()
            )));
        }
        if hs.normal.iter().any(|c| !c.is_finite()) || !hs.offset.is_finite() {
            return Err(Error::InvalidSet(format!("halfspace {i} is not finite")));
        }
        if norm_of(&hs.normal) < 1e-12 {
            return Err(Error::InvalidSet(format!(
                "halfspace {i} has a zero normal"
            )));
        }
    }

    // Boundedness: the recession cone {u : a_j . u <= 0} must be {0}.
    // Intersect it with the unit cube and enumerate vertices; any vertex away
    // from the origin exhibits an unbounded direction.
    let mut cone_rows: Vec<(Vec<f64>, f64)> = halfspaces
        .iter()
        .map(|hs| (hs.normal.clone(), 0.0))
        .collect();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        cone_rows.push((e.clone(), 1.0));
        e[i] = -1.0;
        cone_rows.push((e, 1.0));
    }
    let mut unbounded_direction: Option<Vec<f64>> = None;
    for_each_combination(cone_rows.len(), dim, |combo| {
        if unbounded_direction.is_some() {
            return;
        }
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| cone_rows[i].0.clone()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| cone_rows[i].1).collect();
        if let Some(u) = solve_small(&a, &b) {
            let feasible = halfspaces.iter().all(|hs| dot(&hs.normal, &u) <= 1e-9)
                && u.iter().all(|c| c.abs() <= 1.0 + 1e-9);
            let nonzero = u.iter().any(|c| c.abs() > 1e-6);
            if feasible && nonzero {
                unbounded_direction = Some(u);
            }
        }
    });
    if let Some(u) = unbounded_direction {
        return Err(Error::InvalidSet(format!(
            "halfspace intersection is unbounded along {u:?}"
        )));
    }

    // Vertex enumeration: d-subsets of active boundaries.
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for_each_combination(halfspaces.len(), dim, |combo| {
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| halfspaces[i].normal.clone()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| halfspaces[i].offset).collect();
        if let Some(v) = solve_small(&a, &b) {
            let feasible = halfspaces
                .iter()
                .all(|hs| dot(&hs.normal, &v) <= hs.offset + 1e-9);
            if feasible {
                let duplicate = vertices.iter().any(|w| {
                    w.iter()
                        .zip(&v)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt()
                        < 1e-9
                });
                if !duplicate {
                    vertices.push(v);
                }
            }
        }
    });
    if vertices.is_empty() {
        return Err(Error::InvalidSet(
            "halfspace intersection is empty or has no vertex".into(),
        ));
    }
    Ok((dim, vertices))
}

/// Dykstra's projection algorithm over the halfspace list. Unlike plain
/// cyclic projection, Dykstra converges to the nearest point of the
/// intersection, which the idempotence tests rely on.
fn dykstra_project(halfspaces: &[Halfspace], x: &Point) -> Point {
    const MAX_PASSES: usize = 5_000;
    let dim = x.dim();
    let mut current: Vec<f64> = x.coords().to_vec();
    let mut increments: Vec<Vec<f64>> = vec![vec![0.0; dim]; halfspaces.len()];
    for _ in 0..MAX_PASSES {
        let mut pass_change = 0.0f64;
        for (hs, inc) in halfspaces.iter().zip(&mut increments) {
            let shifted: Vec<f64> = current.iter().zip(inc.iter()).map(|(c, p)| c + p).collect();
            let viol = dot(&hs.normal, &shifted) - hs.offset;
            let nn = dot(&hs.normal, &hs.normal);
            let projected: Vec<f64> = if viol > 0.0 {
                shifted
                    .iter()
                    .zip(&hs.normal)
                    .map(|(s, a)| s - viol / nn * a)
                    .collect()
            } else {
                shifted.clone()
            };
            for i in 0..dim {
                inc[i] = shifted[i] - projected[i];
                pass_change = pass_change.max((projected[i] - current[i]).abs());
            }
            current = projected;
        }
        if pass_change <= 1e-13 * (1.0 + norm_of(&current)) {
            break;
        }
    }
    Point::from_raw(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    fn triangle() -> ConvexSetDescriptor {
        // x >= 0, y >= 0, x + y <= 1.
        ConvexSetDescriptor::new(SetSpec::HalfspaceIntersection {
            halfspaces: vec![
                Halfspace {
                    normal: vec![-1.0, 0.0],
                    offset: 0.0,
                },
                Halfspace {
                    normal: vec![0.0, -1.0],
                    offset: 0.0,
                },
                Halfspace {
                    normal: vec![1.0, 1.0],
                    offset: 1.0,
                },
            ],
        })
        .unwrap()
    }

    #[test]
    fn interval_membership_and_signed_distance() {
        let set = ConvexSetDescriptor::new(SetSpec::Interval { lo: 1.0, hi: 3.0 }).unwrap();
        assert!(set.contains(&pt(&[2.0])));
        assert!(set.contains(&pt(&[3.0])));
        assert!(!set.contains(&pt(&[3.1])));
        assert_eq!(set.signed_distance(&pt(&[4.0])), 1.0);
        assert_eq!(set.signed_distance(&pt(&[2.0])), -1.0);
        assert_eq!(set.signed_distance(&pt(&[1.0])), 0.0);
        assert_eq!(set.diameter(), 2.0);
    }

    #[test]
    fn membership_tolerance_is_respected() {
        let set = ConvexSetDescriptor::new(SetSpec::Interval { lo: 0.0, hi: 1.0 }).unwrap();
        assert!(set.contains(&pt(&[1.0 + 0.5e-9])));
        assert!(!set.contains(&pt(&[1.0 + 2e-9])));
        let loose =
            ConvexSetDescriptor::with_tolerance(SetSpec::Interval { lo: 0.0, hi: 1.0 }, 1e-3)
                .unwrap();
        assert!(loose.contains(&pt(&[1.0005])));
    }

    #[test]
    fn ball_projection_lands_on_sphere() {
        let set = ConvexSetDescriptor::new(SetSpec::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        })
        .unwrap();
        let p = set.project(&pt(&[3.0, 4.0]));
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert!((p.get(0) - 0.6).abs() < 1e-15);
        assert!((p.get(1) - 0.8).abs() < 1e-15);
        assert_eq!(set.signed_distance(&pt(&[3.0, 4.0])), 4.0);
    }

    #[test]
    fn triangle_vertices_are_enumerated() {
        let set = triangle();
        let mut vs: Vec<Vec<f64>> = set.vertices().to_vec();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vs.len(), 3);
        let expect = [vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        for (v, e) in vs.iter().zip(&expect) {
            for (a, b) in v.iter().zip(e) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!((set.diameter() - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unbounded_intersection_is_rejected() {
        // A single halfspace in the plane.
        let err = ConvexSetDescriptor::new(SetSpec::HalfspaceIntersection {
            halfspaces: vec![Halfspace {
                normal: vec![1.0, 0.0],
                offset: 0.0,
            }],
        });
        assert!(matches!(err, Err(Error::InvalidSet(_))));

        // Two parallel constraints leave a strip: still unbounded.
        let err = ConvexSetDescriptor::new(SetSpec::HalfspaceIntersection {
            halfspaces: vec![
                Halfspace {
                    normal: vec![1.0, 0.0],
                    offset: 1.0,
                },
                Halfspace {
                    normal: vec![-1.0, 0.0],
                    offset: 1.0,
                },
            ],
        });
        assert!(matches!(err, Err(Error::InvalidSet(_))));
    }

    #[test]
    fn empty_intersection_is_rejected() {
        // x <= -1 and x >= 1 simultaneously.
        let err = ConvexSetDescriptor::new(SetSpec::HalfspaceIntersection {
            halfspaces: vec![
                Halfspace {
                    normal: vec![1.0, 0.0],
                    offset: -1.0,
                },
                Halfspace {
                    normal: vec![-1.0, 0.0],
                    offset: -1.0,
                },
                Halfspace {
                    normal: vec![0.0, 1.0],
                    offset: 1.0,
                },
                Halfspace {
                    normal: vec![0.0, -1.0],
                    offset: 1.0,
                },
            ],
        });
        assert!(matches!(err, Err(Error::InvalidSet(_))));
    }

    #[test]
    fn polytope_dimension_cap_is_enforced() {
        let err = ConvexSetDescriptor::new(SetSpec::HalfspaceIntersection {
            halfspaces: vec![Halfspace {
                normal: vec![1.0, 0.0, 0.0, 0.0],
                offset: 1.0,
            }],
        });
        assert!(matches!(err, Err(Error::InvalidSet(_))));
    }

    #[test]
    fn triangle_projection_matches_hand_values() {
        let set = triangle();
        // Interior stays put.
        let inside = pt(&[0.2, 0.2]);
        assert!(set.project(&inside).dist(&inside) < 1e-12);
        // Past the hypotenuse: nearest point is the foot of the perpendicular.
        let p = set.project(&pt(&[1.0, 1.0]));
        assert!((p.get(0) - 0.5).abs() < 1e-9);
        assert!((p.get(1) - 0.5).abs() < 1e-9);
        // Past a corner: nearest point is the corner itself.
        let p = set.project(&pt(&[-1.0, -1.0]));
        assert!(p.norm() < 1e-9);
    }

    #[test]
    fn projection_is_idempotent_and_feasible_across_kinds() {
        let sets = vec![
            ConvexSetDescriptor::new(SetSpec::Interval { lo: -2.0, hi: 5.0 }).unwrap(),
            ConvexSetDescriptor::new(SetSpec::Box {
                lo: vec![-1.0, 0.0],
                hi: vec![1.0, 2.0],
            })
            .unwrap(),
            ConvexSetDescriptor::new(SetSpec::Ball {
                center: vec![1.0, -1.0],
                radius: 2.0,
            })
            .unwrap(),
            triangle(),
        ];
        for set in &sets {
            let mut rng = sampling::stream(23, 0);
            for _ in 0..1_000 {
                let raw: Vec<f64> = (0..set.dim())
                    .map(|_| sampling::uniform(&mut rng, -6.0, 6.0))
                    .collect();
                let x = pt(&raw);
                let p = set.project(&x);
                assert!(
                    set.signed_distance(&p) <= 1e-9,
                    "projection left the set: {:?}",
                    p
                );
                let pp = set.project(&p);
                assert!(p.dist(&pp) <= 1e-9, "projection not idempotent");
            }
        }
    }

    #[test]
    fn samples_are_members() {
        let sets = vec![
            ConvexSetDescriptor::new(SetSpec::Interval { lo: 1.0, hi: 3.0 }).unwrap(),
            ConvexSetDescriptor::new(SetSpec::Ball {
                center: vec![0.0, 0.0, 1.0],
                radius: 0.5,
            })
            .unwrap(),
            triangle(),
        ];
        for set in &sets {
            let mut rng = sampling::stream(29, 1);
            for _ in 0..500 {
                let s = set.sample(&mut rng).unwrap();
                assert!(set.contains(&s));
            }
        }
    }

    #[test]
    fn degenerate_interval_is_a_point() {
        let set = ConvexSetDescriptor::new(SetSpec::Interval { lo: 2.0, hi: 2.0 }).unwrap();
        let mut rng = sampling::stream(0, 0);
        assert_eq!(set.sample(&mut rng).unwrap().coords(), &[2.0]);
        assert_eq!(set.diameter(), 0.0);
    }

    #[test]
    fn non_finite_points_are_never_members() {
        let set = ConvexSetDescriptor::new(SetSpec::Interval { lo: 0.0, hi: 1.0 }).unwrap();
        let bad = Point::from_raw(vec![f64::NAN]);
        assert!(!set.contains(&bad));
        assert_eq!(set.signed_distance(&bad), f64::INFINITY);
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = SetSpec::HalfspaceIntersection {
            halfspaces: vec![Halfspace {
                normal: vec![1.0, 1.0],
                offset: 1.0,
            }],
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: SetSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
