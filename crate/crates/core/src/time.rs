//! Extended (possibly infinite) times.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A point of `[0, ∞]`: a finite time or the distinguished value `Infinite`.
///
/// Finite values are ordered as reals and every finite value is strictly
/// smaller than `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeValue {
    Finite(f64),
    Infinite,
}

impl TimeValue {
    pub fn is_finite(self) -> bool {
        matches!(self, TimeValue::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            TimeValue::Finite(t) => Some(t),
            TimeValue::Infinite => None,
        }
    }

    /// Maps `[0, ∞]` onto `[0, 1]` by `t / (1 + t)`, sending `∞` to `1`.
    pub fn compactify(self) -> f64 {
        compactify(self)
    }
}

/// `t / (1 + t)` for finite `t`, `1` for `∞`. Computed as `1 − 1/(1 + t)`:
/// every step is a correctly rounded monotone operation, so the result is
/// nondecreasing in `t` in floating point too (`t / (1 + t)` is not).
pub fn compactify(t: TimeValue) -> f64 {
    match t {
        TimeValue::Finite(t) => 1.0 - 1.0 / (1.0 + t),
        TimeValue::Infinite => 1.0,
    }
}

impl PartialOrd for TimeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (TimeValue::Finite(a), TimeValue::Finite(b)) => a.partial_cmp(b),
            (TimeValue::Finite(_), TimeValue::Infinite) => Some(Ordering::Less),
            (TimeValue::Infinite, TimeValue::Finite(_)) => Some(Ordering::Greater),
            (TimeValue::Infinite, TimeValue::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for TimeValue {
    fn from(t: f64) -> Self {
        if t.is_infinite() && t > 0.0 {
            TimeValue::Infinite
        } else {
            TimeValue::Finite(t)
        }
    }
}

impl fmt::Display for TimeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeValue::Finite(t) => write!(f, "{t}"),
            TimeValue::Infinite => f.write_str("INF"),
        }
    }
}

/// Finite times serialize as numbers, `∞` as the string `"INF"`.
impl Serialize for TimeValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TimeValue::Finite(t) => s.serialize_f64(*t),
            TimeValue::Infinite => s.serialize_str("INF"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compactify_values() {
        assert_eq!(compactify(TimeValue::Finite(0.0)), 0.0);
        assert_eq!(compactify(TimeValue::Infinite), 1.0);
        assert_eq!(compactify(TimeValue::Finite(1.0)), 0.5);
    }

    #[test]
    fn ordering() {
        assert!(TimeValue::Finite(1e300) < TimeValue::Infinite);
        assert!(TimeValue::Finite(1.0) < TimeValue::Finite(2.0));
        assert_eq!(TimeValue::from(f64::INFINITY), TimeValue::Infinite);
    }

    #[test]
    fn compactify_strictly_increasing() {
        let ts = [0.0, 1e-9, 0.5, 1.0, 10.0, 1e6];
        for w in ts.windows(2) {
            assert!(compactify(TimeValue::Finite(w[0])) < compactify(TimeValue::Finite(w[1])));
        }
        assert!(compactify(TimeValue::Finite(1e6)) < 1.0);
    }
}
