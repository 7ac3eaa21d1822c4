//! Compensated summation used by the averaging engine.

/// Kahan–Babuška accumulator. Running averages of long orbits are the one
/// place in the crate where naive summation visibly drifts, and byte-stable
/// reports require the same rounding on every run, so all prefix sums go
/// through this type in a fixed order.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
