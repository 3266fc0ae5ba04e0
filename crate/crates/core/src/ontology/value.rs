use std::cmp::Ordering;
use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

/// A typed property value asserted by an instance or used in a constraint.
///
/// On the wire values are plain JSON scalars. Integers that appear where a
/// decimal is expected are widened by [`Value::coerce`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Boolean(bool),
    Integer(i64),
    Decimal(f64),
    Text(String),
}

/// Value space of a datatype property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatatypeRange {
    Integer,
    Decimal,
    Text,
    Boolean,
}

impl DatatypeRange {
    pub const ALL: [DatatypeRange; 4] =
        [DatatypeRange::Integer, DatatypeRange::Decimal, DatatypeRange::Text, DatatypeRange::Boolean];

    pub fn as_str(self) -> &'static str {
        match self {
            DatatypeRange::Integer => "integer",
            DatatypeRange::Decimal => "decimal",
            DatatypeRange::Text => "text",
            DatatypeRange::Boolean => "boolean",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, DatatypeRange::Integer | DatatypeRange::Decimal)
    }
}

impl fmt::Display for DatatypeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Range of a property: a datatype for datatype properties, a class name for
/// object properties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyRange {
    Datatype(DatatypeRange),
    Class(String),
}

impl fmt::Display for PropertyRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyRange::Datatype(d) => d.fmt(f),
            PropertyRange::Class(c) => write!(f, "class {c}"),
        }
    }
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Boolean(_) => "boolean",
            Value::Integer(_) => "integer",
            Value::Decimal(_) => "decimal",
            Value::Text(_) => "text",
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Integer(i) => Some(*i as f64),
            Value::Decimal(d) => Some(*d),
            _ => None,
        }
    }

    /// Whether the value lies in the value space of `range`. Object property
    /// values are instance identifiers, i.e. non-empty text.
    pub fn conforms_to(&self, range: &PropertyRange) -> bool {
        match (range, self) {
            (PropertyRange::Datatype(DatatypeRange::Integer), Value::Integer(_)) => true,
            (PropertyRange::Datatype(DatatypeRange::Decimal), Value::Integer(_) | Value::Decimal(_)) => true,
            (PropertyRange::Datatype(DatatypeRange::Text), Value::Text(_)) => true,
            (PropertyRange::Datatype(DatatypeRange::Boolean), Value::Boolean(_)) => true,
            (PropertyRange::Class(_), Value::Text(s)) => !s.is_empty(),
            _ => false,
        }
    }

    /// Converts the value into the canonical representation for `range`
    /// (integers become decimals on decimal ranges). Returns the value
    /// unchanged in the error position if it does not conform.
    pub fn coerce(self, range: &PropertyRange) -> Result<Value, Value> {
        if !self.conforms_to(range) {
            return Err(self);
        }
        Ok(match (range, self) {
            (PropertyRange::Datatype(DatatypeRange::Decimal), Value::Integer(i)) => Value::Decimal(i as f64),
            (_, v) => v,
        })
    }

    /// Equality across comparable kinds; integers and decimals compare by
    /// numeric value. `None` when the kinds are incomparable.
    pub fn equals(&self, other: &Value) -> Option<bool> {
        match (self, other) {
            (Value::Boolean(a), Value::Boolean(b)) => Some(a == b),
            (Value::Text(a), Value::Text(b)) => Some(a == b),
            (Value::Integer(a), Value::Integer(b)) => Some(a == b),
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => Some(a == b),
                _ => None,
            },
        }
    }

    /// Total order on numerics and on text (lexical, which orders ISO-8601
    /// dates correctly). `None` for booleans and mixed kinds.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Integer(a), Value::Integer(b)) => Some(a.cmp(b)),
            (Value::Text(a), Value::Text(b)) => Some(a.cmp(b)),
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => a.partial_cmp(&b),
                _ => None,
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Boolean(b) => write!(f, "{b}"),
            Value::Integer(i) => write!(f, "{i}"),
            Value::Decimal(d) if d.fract() == 0.0 && d.abs() < 1e15 => write!(f, "{}", *d as i64),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Integer(i)
    }
}

impl From<f64> for Value {
    fn from(d: f64) -> Self {
        Value::Decimal(d)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Boolean(b)
    }
}

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM:SS` and RFC 3339 timestamps.
pub fn is_iso_date(s: &str) -> bool {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").is_ok()
        || DateTime::parse_from_rfc3339(s).is_ok()
}
