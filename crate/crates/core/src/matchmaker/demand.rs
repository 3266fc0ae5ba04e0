use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::constraint::{Confidence, Constraint, ConstraintOp, ConstraintValue};
use crate::ontology::{is_iso_date, DatatypeRange, OntologySchema, PropertyRange, Value};

/// A client query: a target concept plus weighted property predicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub concept: String,
    #[serde(default)]
    pub concept_confidence: Confidence,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    pub ontology_uri: String,
}

impl Demand {
    pub fn new(concept: impl Into<String>, ontology_uri: impl Into<String>) -> Self {
        Self {
            concept: concept.into(),
            concept_confidence: Confidence::MANDATORY,
            constraints: Vec::new(),
            ontology_uri: ontology_uri.into(),
        }
    }

    pub fn with(mut self, constraint: Constraint) -> Self {
        self.constraints.push(constraint);
        self
    }

    pub fn constraint_for(&self, property: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.property == property)
    }

    /// Checks the demand against a schema; empty when the demand is valid.
    pub fn validate(&self, schema: &OntologySchema) -> Vec<DemandViolation> {
        let mut out = Vec::new();
        if schema.class(&self.concept).is_none() {
            out.push(DemandViolation::UnknownConcept(self.concept.clone()));
        }
        let mut seen = HashSet::new();
        for c in &self.constraints {
            if !seen.insert(c.property.as_str()) {
                out.push(DemandViolation::DuplicateProperty(c.property.clone()));
                continue;
            }
            let Some(p) = schema.property(&c.property) else {
                out.push(DemandViolation::UnknownProperty(c.property.clone()));
                continue;
            };
            let operands: Vec<&Value> = match (&c.value, c.op) {
                (ConstraintValue::Range(lo, hi), ConstraintOp::Range) => vec![lo, hi],
                (ConstraintValue::Single(v), op) if op != ConstraintOp::Range => vec![v],
                _ => {
                    out.push(DemandViolation::OperandShape { property: c.property.clone(), op: c.op });
                    continue;
                }
            };
            let mut typed = true;
            for v in &operands {
                if !v.conforms_to(&p.range) {
                    typed = false;
                    out.push(DemandViolation::ValueType {
                        property: c.property.clone(),
                        value: (*v).clone(),
                        expected: p.range.to_string(),
                    });
                }
            }
            if !typed {
                continue;
            }
            if c.op.is_ordering() {
                let orderable = match &p.range {
                    PropertyRange::Datatype(d) if d.is_numeric() => true,
                    PropertyRange::Datatype(DatatypeRange::Text) => {
                        operands.iter().all(|v| v.as_text().is_some_and(is_iso_date))
                    }
                    _ => false,
                };
                if !orderable {
                    out.push(DemandViolation::OperatorRange {
                        property: c.property.clone(),
                        op: c.op,
                        range: p.range.to_string(),
                    });
                    continue;
                }
            }
            if let [lo, hi] = operands.as_slice() {
                if lo.compare(hi).is_some_and(|o| o.is_gt()) {
                    out.push(DemandViolation::UnorderedBounds(c.property.clone()));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum DemandViolation {
    UnknownConcept(String),
    UnknownProperty(String),
    DuplicateProperty(String),
    OperandShape { property: String, op: ConstraintOp },
    ValueType { property: String, value: Value, expected: String },
    OperatorRange { property: String, op: ConstraintOp, range: String },
    UnorderedBounds(String),
}

impl fmt::Display for DemandViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DemandViolation::UnknownConcept(c) => write!(f, "unknown concept `{c}`"),
            DemandViolation::UnknownProperty(p) => write!(f, "unknown property `{p}`"),
            DemandViolation::DuplicateProperty(p) => write!(f, "property `{p}` constrained more than once"),
            DemandViolation::OperandShape { property, op } => {
                write!(f, "property `{property}`: operator `{op}` has the wrong operand shape")
            }
            DemandViolation::ValueType { property, value, expected } => {
                write!(f, "property `{property}`: value `{value}` does not fit {expected}")
            }
            DemandViolation::OperatorRange { property, op, range } => {
                write!(f, "property `{property}`: operator `{op}` not applicable to {range}")
            }
            DemandViolation::UnorderedBounds(p) => write!(f, "property `{p}`: range bounds out of order"),
        }
    }
}
