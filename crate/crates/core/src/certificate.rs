//! Pass/fail certificates produced by sampled checks.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a sampled inequality check. A `Fail` verdict always carries a
/// witness, and the witness stores enough data (the points plus both sides of
/// the inequality) that re-evaluating it reproduces the violation; tests lean
/// on that to keep failures honest.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate<W> {
    pub verdict: Verdict,
    pub samples_checked: usize,
    /// Smallest margin seen; negative exactly when the verdict is `Fail`.
    pub worst_margin: f64,
    pub witness: Option<W>,
}

impl<W> Certificate<W> {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Accumulates (margin, witness) pairs and keeps the worst one.
pub(crate) struct MarginTracker<W> {
    pub samples: usize,
    worst: Option<(f64, W)>,
}

impl<W> MarginTracker<W> {
    pub fn new() -> Self {
        Self {
            samples: 0,
            worst: None,
        }
    }

    pub fn observe(&mut self, margin: f64, witness: W) {
        self.samples += 1;
        match &self.worst {
            Some((m, _)) if *m <= margin => {}
            _ => self.worst = Some((margin, witness)),
        }
    }

    /// Certificate that passes when the worst margin is `>= threshold`.
    pub fn certify(self, threshold: f64) -> Certificate<W> {
        match self.worst {
            Some((margin, witness)) => Certificate {
                verdict: if margin >= threshold {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                },
                samples_checked: self.samples,
                worst_margin: margin,
                witness: Some(witness),
            },
            None => Certificate {
                verdict: Verdict::Pass,
                samples_checked: 0,
                worst_margin: f64::INFINITY,
                witness: None,
            },
        }
    }
}
