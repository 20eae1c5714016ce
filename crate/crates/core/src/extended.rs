use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonnegative real extended with a genuine point at infinity.
///
/// Half-widths and blow-up distances can legitimately be infinite and we
/// want that case to survive serialization and comparisons without leaning
/// on IEEE infinities sneaking through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// Panics if infinite; for call sites that have already checked.
    pub fn unwrap_finite(self) -> f64 {
        self.finite().expect("expected a finite value")
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), Infinite) => Some(std::cmp::Ordering::Less),
            (Infinite, Finite(_)) => Some(std::cmp::Ordering::Greater),
            (Infinite, Infinite) => Some(std::cmp::Ordering::Equal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinity_last() {
        assert!(ExtendedReal::Finite(1e300) < ExtendedReal::Infinite);
        assert!(ExtendedReal::Finite(2.0) > ExtendedReal::Finite(1.0));
    }

    #[test]
    fn serde_round_trip() {
        let v = ExtendedReal::Infinite;
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"infinite"}"#);
        let back: ExtendedReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);

        let v = ExtendedReal::Finite(1.5);
        let s = serde_json::to_string(&v).unwrap();
        let back: ExtendedReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
