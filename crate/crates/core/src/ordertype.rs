//! The small closed grammar of order-types used by the classifications:
//! `0`, finite `n`, and the four countable dense types `eta`, `1+eta`,
//! `eta+1`, `1+eta+1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalOrderType {
    Empty,
    /// A finite linear order with `n >= 1` elements.
    Finite(u64),
    /// A countable dense order, with or without endpoints.
    Dense {
        has_min: bool,
        has_max: bool,
    },
}

use CanonicalOrderType::*;

pub const ETA: CanonicalOrderType = Dense {
    has_min: false,
    has_max: false,
};
pub const ONE_ETA: CanonicalOrderType = Dense {
    has_min: true,
    has_max: false,
};
pub const ETA_ONE: CanonicalOrderType = Dense {
    has_min: false,
    has_max: true,
};
pub const ONE_ETA_ONE: CanonicalOrderType = Dense {
    has_min: true,
    has_max: true,
};
pub const ONE: CanonicalOrderType = Finite(1);

/// The six types that can occur as invariants.
pub const INVARIANT_TYPES: [CanonicalOrderType; 6] = [Empty, ONE, ETA, ONE_ETA, ETA_ONE, ONE_ETA_ONE];

/// Cardinality class of an order-type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cardinality {
    Zero,
    Finite(u64),
    Aleph0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Features {
    pub is_empty: bool,
    pub has_min: bool,
    pub has_max: bool,
    pub is_dense: bool,
    pub cardinality: Cardinality,
}

impl CanonicalOrderType {
    /// Returns `None` for `Finite(0)`, which is spelled `Empty`.
    pub fn finite(n: u64) -> Option<Self> {
        (n >= 1).then_some(Finite(n))
    }

    pub fn reverse(self) -> Self {
        match self {
            Dense { has_min, has_max } => Dense {
                has_min: has_max,
                has_max: has_min,
            },
            other => other,
        }
    }

    pub fn features(self) -> Features {
        match self {
            Empty => Features {
                is_empty: true,
                has_min: false,
                has_max: false,
                is_dense: false,
                cardinality: Cardinality::Zero,
            },
            Finite(n) => Features {
                is_empty: false,
                has_min: true,
                has_max: true,
                is_dense: false,
                cardinality: Cardinality::Finite(n),
            },
            Dense { has_min, has_max } => Features {
                is_empty: false,
                has_min,
                has_max,
                is_dense: true,
                cardinality: Cardinality::Aleph0,
            },
        }
    }

    pub fn has_min(self) -> bool {
        self.features().has_min
    }

    pub fn has_max(self) -> bool {
        self.features().has_max
    }

    pub fn is_dense(self) -> bool {
        matches!(self, Dense { .. })
    }

    /// Order sum `self + rhs`, when the result stays inside the grammar.
    pub fn sum(self, rhs: Self) -> Option<Self> {
        match (self, rhs) {
            (Empty, t) | (t, Empty) => Some(t),
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (
                Finite(1),
                Dense {
                    has_min: false,
                    has_max,
                },
            ) => Some(Dense { has_min: true, has_max }),
            (
                Dense {
                    has_min,
                    has_max: false,
                },
                Finite(1),
            ) => Some(Dense { has_min, has_max: true }),
            // Two adjacent endpoints would give an element with an
            // immediate successor.
            (Dense { has_min, has_max: l }, Dense { has_min: r, has_max }) if !(l && r) => {
                Some(Dense { has_min, has_max })
            }
            _ => None,
        }
    }

    /// The serialization name: `0`, `n`, `eta`, `1+eta`, `eta+1`, `1+eta+1`.
    pub fn name(self) -> String {
        match self {
            Empty => "0".into(),
            Finite(n) => n.to_string(),
            Dense { has_min, has_max } => format!(
                "{}eta{}",
                if has_min { "1+" } else { "" },
                if has_max { "+1" } else { "" }
            ),
        }
    }
}

impl fmt::Display for CanonicalOrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown order-type name {0:?} (expected 0, a positive integer, eta, 1+eta, eta+1 or 1+eta+1)")]
pub struct ParseOrderTypeError(pub String);

impl FromStr for CanonicalOrderType {
    type Err = ParseOrderTypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Empty),
            "eta" => Ok(ETA),
            "1+eta" => Ok(ONE_ETA),
            "eta+1" => Ok(ETA_ONE),
            "1+eta+1" => Ok(ONE_ETA_ONE),
            n if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) && !n.starts_with('0') => {
                n.parse::<u64>().map(Finite).map_err(|_| ParseOrderTypeError(s.into()))
            }
            _ => Err(ParseOrderTypeError(s.into())),
        }
    }
}

impl Serialize for CanonicalOrderType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for CanonicalOrderType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An order-type term built from leaves by ordered sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderTypeExpr {
    Leaf(CanonicalOrderType),
    Sum(Vec<OrderTypeExpr>),
}

impl From<CanonicalOrderType> for OrderTypeExpr {
    fn from(t: CanonicalOrderType) -> Self {
        OrderTypeExpr::Leaf(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("empty sum")]
    EmptySum,
    #[error("{left} + {right} falls outside the supported grammar")]
    Unsupported {
        left: CanonicalOrderType,
        right: CanonicalOrderType,
    },
}

/// Collapses a sum expression to its canonical type.
pub fn normalize(expr: &OrderTypeExpr) -> Result<CanonicalOrderType, NormalizeError> {
    match expr {
        OrderTypeExpr::Leaf(t) => Ok(*t),
        OrderTypeExpr::Sum(terms) => {
            if terms.is_empty() {
                return Err(NormalizeError::EmptySum);
            }
            let mut acc = Empty;
            for term in terms {
                let t = normalize(term)?;
                acc = acc.sum(t).ok_or(NormalizeError::Unsupported { left: acc, right: t })?;
            }
            Ok(acc)
        }
    }
}
