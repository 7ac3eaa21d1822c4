//! Derivative-free local search shared by the moduli estimators and the
//! set-distance solver. Deliberately simple: a compass (coordinate pattern)
//! search with step halving, run from many deterministic starts by the
//! callers. Objectives return `None` for infeasible parameters.

pub(crate) struct CompassOutcome {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `objective` starting at `start` (which must be feasible).
/// Each iteration polls `+/- step` along every coordinate and takes the best
/// improving move; when none improves, every step is halved. Terminates when
/// all steps drop below `min_step` (converged) or the evaluation budget runs
/// out.
pub(crate) fn compass_search(
    objective: &mut dyn FnMut(&[f64]) -> Option<f64>,
    start: &[f64],
    initial_steps: &[f64],
    min_step: f64,
    budget: usize,
) -> Option<CompassOutcome> {
    debug_assert_eq!(start.len(), initial_steps.len());
    let mut evaluations = 0usize;
    let mut best_params = start.to_vec();
    let mut best_value = {
        evaluations += 1;
        objective(start)?
    };
    let mut steps = initial_steps.to_vec();
    loop {
        if steps.iter().all(|s| *s < min_step) {
            return Some(CompassOutcome {
                params: best_params,
                value: best_value,
                evaluations,
                converged: true,
            });
        }
        let mut improved = false;
        let mut candidate_params = best_params.clone();
        let mut candidate_value = best_value;
        for axis in 0..best_params.len() {
            for sign in [1.0, -1.0] {
                if evaluations >= budget {
                    return Some(CompassOutcome {
                        params: best_params,
                        value: best_value,
                        evaluations,
                        converged: false,
                    });
                }
                let mut trial = best_params.clone();
                trial[axis] += sign * steps[axis];
                evaluations += 1;
                if let Some(v) = objective(&trial) {
                    if v < candidate_value {
                        candidate_value = v;
                        candidate_params = trial;
                        improved = true;
                    }
                }
            }
        }
        if improved {
            best_params = candidate_params;
            best_value = candidate_value;
        } else {
            for s in &mut steps {
                *s *= 0.5;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_shifted_parabola() {
        let mut objective = |p: &[f64]| Some((p[0] - 3.0).powi(2) + (p[1] + 1.0).powi(2));
        let out = compass_search(&mut objective, &[0.0, 0.0], &[1.0, 1.0], 1e-10, 10_000).unwrap();
        assert!(out.converged);
        assert!((out.params[0] - 3.0).abs() < 1e-9);
        assert!((out.params[1] + 1.0).abs() < 1e-9);
        assert!(out.value < 1e-17);
    }

    #[test]
    fn respects_infeasible_regions() {
        // Constrained to p[0] >= 1: the minimum of (p[0])^2 on the feasible
        // side is at the boundary.
        let mut objective = |p: &[f64]| {
            if p[0] >= 1.0 {
                Some(p[0] * p[0])
            } else {
                None
            }
        };
        let out = compass_search(&mut objective, &[2.0], &[1.0], 1e-12, 10_000).unwrap();
        assert!((out.params[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn infeasible_start_returns_none() {
        let mut objective = |p: &[f64]| if p[0] > 0.0 { Some(p[0]) } else { None };
        assert!(compass_search(&mut objective, &[-1.0], &[0.1], 1e-10, 100).is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut objective = |p: &[f64]| Some(p[0] * p[0]);
        let out = compass_search(&mut objective, &[100.0], &[1e-3], 1e-14, 10).unwrap();
        assert!(!out.converged);
        assert!(out.evaluations <= 11);
    }
}
