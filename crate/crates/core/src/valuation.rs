use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A p-adic valuation: a finite exponent or `Infinite` (the valuation of 0).
///
/// Finite values are non-negative for integers and may be negative for
/// rationals. `Infinite` compares greater than every finite value, so it is
/// absorbing under `max` and neutral under `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }

    /// Shift a finite valuation by `delta`; `Infinite` stays `Infinite`.
    pub fn shift(self, delta: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + delta),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl From<u32> for Valuation {
    fn from(v: u32) -> Self {
        Valuation::Finite(v as i64)
    }
}

impl From<u64> for Valuation {
    fn from(v: u64) -> Self {
        Valuation::Finite(v as i64)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

// JSON: finite values are numbers, the infinite valuation is the string "inf".
impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Valuation::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Valuation::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

/// Result of a modular valuation computation: either a sound valuation or a
/// report that the residue vanished at the precision ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationOutcome {
    Exact(Valuation),
    PrecisionExceeded { bits: u32 },
}

impl ValuationOutcome {
    pub fn valuation(self) -> Option<Valuation> {
        match self {
            ValuationOutcome::Exact(v) => Some(v),
            ValuationOutcome::PrecisionExceeded { .. } => None,
        }
    }

    /// Convert to a `Result`, attaching `(n, k)` to the precision error.
    pub fn into_result(self, n: u64, k: u32) -> Result<Valuation> {
        match self {
            ValuationOutcome::Exact(v) => Ok(v),
            ValuationOutcome::PrecisionExceeded { bits } => Err(Error::PrecisionExceeded { n, k, bits }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_is_top() {
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinite);
        assert_eq!(Valuation::Finite(3).min(Valuation::Infinite), Valuation::Finite(3));
        assert_eq!(Valuation::Finite(3) + Valuation::Infinite, Valuation::Infinite);
        assert_eq!(Valuation::Infinite.shift(-5), Valuation::Infinite);
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&Valuation::Finite(-3)).unwrap(), "-3");
        assert_eq!(serde_json::to_string(&Valuation::Infinite).unwrap(), "\"inf\"");
        let v: Valuation = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, Valuation::Infinite);
        let v: Valuation = serde_json::from_str("7").unwrap();
        assert_eq!(v, Valuation::Finite(7));
    }
}
