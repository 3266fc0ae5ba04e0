//! TBox/ABox data model, the `.onto.json` interchange format, and the
//! class-level closure queried by the matchmaker.

mod document;
mod fingerprint;
mod model;
mod taxonomy;
mod value;

pub use document::{load_ontology, parse_ontology, serialize_ontology, OntologyDocument};
pub use fingerprint::tbox_fingerprint;
pub use model::{validate_instance, ClassDef, Instance, OntologySchema, PropertyDef, PropertyKind, Violation};
pub use taxonomy::{ClassId, Taxonomy};
pub use value::{is_iso_date, DatatypeRange, PropertyRange, Value};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("class `{0}` declared more than once")]
    DuplicateClass(String),
    #[error("property `{0}` declared more than once")]
    DuplicateProperty(String),
    #[error("instance `{0}` declared more than once")]
    DuplicateInstance(String),
    #[error("undeclared class `{name}` referenced by {referenced_by}")]
    UndeclaredClass { name: String, referenced_by: String },
    #[error("invalid axiom on class `{class}`: {reason}")]
    InvalidAxiom { class: String, reason: String },
    #[error("invalid property `{property}`: {reason}")]
    InvalidProperty { property: String, reason: String },
    #[error("class `{0}` lies on a subclass cycle")]
    SubsumptionCycle(String),
    #[error("{}", join_violations(.0))]
    InvalidInstances(Vec<Violation>),
    #[error("inconsistent schema: class `{class}` is subsumed by disjoint classes `{first}` and `{second}`")]
    Inconsistent { class: String, first: String, second: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
