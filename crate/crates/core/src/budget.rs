//! Attack budget accounting: `sum_t |c(t)| <= C`.

/// Running spend against a total corruption budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLedger {
    capacity: f64,
    spent: f64,
}

impl BudgetLedger {
    /// Panics if `capacity` is negative or not finite.
    pub fn new(capacity: f64) -> Self {
        assert!(
            capacity.is_finite() && capacity >= 0.0,
            "budget capacity must be finite and nonnegative, got {capacity}"
        );
        Self {
            capacity,
            spent: 0.0,
        }
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn remaining(&self) -> f64 {
        (self.capacity - self.spent).max(0.0)
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0.0
    }

    /// Grants as much of `desired` as the remaining budget allows.
    ///
    /// The grant keeps the sign of `desired` and has magnitude
    /// `min(|desired|, remaining)`. When the request reaches the remainder the
    /// ledger is pinned to `capacity` exactly so that `spent <= capacity`
    /// survives floating-point rounding.
    pub fn charge(&mut self, desired: f64) -> f64 {
        if !desired.is_finite() || desired == 0.0 {
            return 0.0;
        }
        let remaining = self.remaining();
        let magnitude = desired.abs();
        if magnitude >= remaining {
            self.spent = self.capacity;
            remaining.copysign(desired)
        } else {
            self.spent = (self.spent + magnitude).min(self.capacity);
            desired
        }
    }
}
