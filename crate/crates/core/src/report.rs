//! The comparison record emitted by the command-line tool.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::simulator::TailEstimate;

/// Slack allowed between an exact probability and the bound it must respect.
pub const EXACT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl Theorem {
    pub fn from_number(n: u8) -> Option<Self> {
        Some(match n {
            1 => Theorem::T1,
            2 => Theorem::T2,
            3 => Theorem::T3,
            4 => Theorem::T4,
            5 => Theorem::T5,
            _ => return None,
        })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A real that may be `+inf`; serialized as a JSON number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedReal(pub f64);

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedReal, E> {
                match v {
                    "inf" => Ok(ExtendedReal(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// One comparison row: bound values next to exact and simulated probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub inputs: BTreeMap<String, f64>,
    pub exponent: Option<ExtendedReal>,
    pub bound_raw: f64,
    pub bound_clamped: f64,
    pub exact: Option<f64>,
    pub mc_estimate: Option<TailEstimate>,
    pub metadata: BTreeMap<String, String>,
}

impl BoundReport {
    pub fn new(theorem: Theorem, bound_raw: f64) -> Self {
        Self {
            theorem,
            inputs: BTreeMap::new(),
            exponent: None,
            bound_raw,
            bound_clamped: bound_raw.min(1.0),
            exact: None,
            mc_estimate: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.to_owned(), value);
        self
    }

    pub fn exponent(mut self, value: f64) -> Self {
        self.exponent = Some(ExtendedReal(value));
        self
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_owned(), value.to_string());
        self
    }

    /// `exact <= bound_raw + 1e-12` when an exact value is attached.
    pub fn exact_within_bound(&self) -> bool {
        self.exact.is_none_or(|p| p <= self.bound_raw + EXACT_SLACK)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
