use std::fmt;

use serde::{Deserialize, Serialize};

use super::MatchError;
use crate::ontology::Value;

/// How compulsory a predicate is, on a 1..=10 scale; 10 is mandatory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Confidence(u8);

impl Confidence {
    pub const MANDATORY: Confidence = Confidence(10);

    pub fn new(level: u8) -> Result<Self, MatchError> {
        if (1..=10).contains(&level) {
            Ok(Confidence(level))
        } else {
            Err(MatchError::InvalidConfidence(level))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Weight in tenths, the unit conflict counters accumulate in.
    pub fn tenths(self) -> u32 {
        u32::from(self.0)
    }

    pub fn weight(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl Default for Confidence {
    fn default() -> Self {
        Self::MANDATORY
    }
}

impl TryFrom<u8> for Confidence {
    type Error = MatchError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Confidence::new(v)
    }
}

impl From<Confidence> for u8 {
    fn from(c: Confidence) -> u8 {
        c.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Range,
}

impl ConstraintOp {
    pub fn is_ordering(self) -> bool {
        !matches!(self, ConstraintOp::Eq | ConstraintOp::Ne)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintOp::Eq => "eq",
            ConstraintOp::Ne => "ne",
            ConstraintOp::Lt => "lt",
            ConstraintOp::Le => "le",
            ConstraintOp::Gt => "gt",
            ConstraintOp::Ge => "ge",
            ConstraintOp::Range => "range",
        }
    }
}

impl fmt::Display for ConstraintOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Operand of a constraint; `range` takes an inclusive `[low, high]` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstraintValue {
    Range(Value, Value),
    Single(Value),
}

impl fmt::Display for ConstraintValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintValue::Single(v) => v.fmt(f),
            ConstraintValue::Range(lo, hi) => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub property: String,
    pub op: ConstraintOp,
    pub value: ConstraintValue,
    #[serde(default)]
    pub confidence: Confidence,
}

impl Constraint {
    pub fn new(property: impl Into<String>, op: ConstraintOp, value: impl Into<Value>) -> Self {
        Self {
            property: property.into(),
            op,
            value: ConstraintValue::Single(value.into()),
            confidence: Confidence::MANDATORY,
        }
    }

    pub fn range(property: impl Into<String>, low: impl Into<Value>, high: impl Into<Value>) -> Self {
        Self {
            property: property.into(),
            op: ConstraintOp::Range,
            value: ConstraintValue::Range(low.into(), high.into()),
            confidence: Confidence::MANDATORY,
        }
    }

    pub fn eq(property: impl Into<String>, value: impl Into<Value>) -> Self {
        Self::new(property, ConstraintOp::Eq, value)
    }

    pub fn ge(property: impl Into<String>, value: impl Into<Value>) -> Self {
        Self::new(property, ConstraintOp::Ge, value)
    }

    pub fn with_confidence(mut self, confidence: Confidence) -> Self {
        self.confidence = confidence;
        self
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} (confidence {})", self.property, self.op, self.value, self.confidence.get())
    }
}

/// Evaluates the constraint's predicate on a single asserted value.
pub fn satisfies(c: &Constraint, v: &Value) -> Result<bool, MatchError> {
    let incomparable = |operand: &Value| MatchError::Incomparable {
        property: c.property.clone(),
        left: v.kind_name(),
        right: operand.kind_name(),
    };
    match (&c.value, c.op) {
        (ConstraintValue::Single(operand), ConstraintOp::Eq) => v.equals(operand).ok_or_else(|| incomparable(operand)),
        (ConstraintValue::Single(operand), ConstraintOp::Ne) => {
            v.equals(operand).map(|e| !e).ok_or_else(|| incomparable(operand))
        }
        (
            ConstraintValue::Single(operand),
            op @ (ConstraintOp::Lt | ConstraintOp::Le | ConstraintOp::Gt | ConstraintOp::Ge),
        ) => {
            let ord = v.compare(operand).ok_or_else(|| incomparable(operand))?;
            Ok(match op {
                ConstraintOp::Lt => ord.is_lt(),
                ConstraintOp::Le => ord.is_le(),
                ConstraintOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        (ConstraintValue::Range(low, high), ConstraintOp::Range) => {
            let lo = v.compare(low).ok_or_else(|| incomparable(low))?;
            let hi = v.compare(high).ok_or_else(|| incomparable(high))?;
            Ok(lo.is_ge() && hi.is_le())
        }
        _ => Err(MatchError::OperandShape { property: c.property.clone(), op: c.op }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warranty_at_least_two() {
        assert!(satisfies(&Constraint::ge("warrantyYears", 2), &Value::Integer(3)).unwrap());
        assert!(satisfies(&Constraint::ge("warrantyYears", 2), &Value::Integer(2)).unwrap());
        assert!(!satisfies(&Constraint::ge("warrantyYears", 2), &Value::Integer(1)).unwrap());
    }

    #[test]
    fn colour_identity() {
        assert!(satisfies(&Constraint::eq("colour", "white"), &"white".into()).unwrap());
        assert!(!satisfies(&Constraint::eq("colour", "white"), &"black".into()).unwrap());
        assert!(satisfies(&Constraint::new("colour", ConstraintOp::Ne, "white"), &"black".into()).unwrap());
    }

    #[test]
    fn range_is_inclusive() {
        let c = Constraint::range("cost", 1000, 2000);
        assert!(satisfies(&c, &Value::Decimal(1500.0)).unwrap());
        assert!(satisfies(&c, &Value::Decimal(2000.0)).unwrap());
        assert!(satisfies(&c, &Value::Decimal(1000.0)).unwrap());
        assert!(!satisfies(&c, &Value::Decimal(2001.0)).unwrap());
    }

    #[test]
    fn iso_dates_compare() {
        let c = Constraint::new("due", ConstraintOp::Le, "2009-02-27");
        assert!(satisfies(&c, &"2009-02-26".into()).unwrap());
        assert!(!satisfies(&c, &"2009-03-01".into()).unwrap());
    }

    #[test]
    fn incomparable_types() {
        let err = satisfies(&Constraint::ge("warrantyYears", 2), &"two".into()).unwrap_err();
        assert!(matches!(err, MatchError::Incomparable { .. }));
        assert!(satisfies(&Constraint::new("b", ConstraintOp::Lt, true), &Value::Boolean(false)).is_err());
    }

    #[test]
    fn confidence_bounds() {
        assert!(Confidence::new(0).is_err());
        assert!(Confidence::new(11).is_err());
        assert_eq!(Confidence::new(3).unwrap().weight(), 0.3);
        assert_eq!(Confidence::default().get(), 10);
    }

    #[test]
    fn constraint_json() {
        let c: Constraint =
            serde_json::from_str(r#"{"property":"cost","op":"range","value":[1000,2000],"confidence":3}"#).unwrap();
        assert_eq!(c.value, ConstraintValue::Range(Value::Integer(1000), Value::Integer(2000)));
        assert_eq!(c.confidence.get(), 3);
        let d: Constraint = serde_json::from_str(r#"{"property":"colour","op":"eq","value":"white"}"#).unwrap();
        assert_eq!(d.confidence, Confidence::MANDATORY);
        assert!(serde_json::from_str::<Constraint>(r#"{"property":"c","op":"eq","value":1,"confidence":0}"#).is_err());
    }
}
