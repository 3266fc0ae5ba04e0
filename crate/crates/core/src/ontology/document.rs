use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{validate_instance, ClassDef, Instance, OntologySchema, PropertyDef};
use super::OntologyError;

/// A parsed `.onto.json` document: the TBox plus the advertisements it ships.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OntologyDocument {
    pub schema: OntologySchema,
    pub instances: Vec<Instance>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    uri: String,
    keywords: Vec<String>,
    classes: Vec<ClassDef>,
    properties: Vec<PropertyDef>,
    #[serde(default)]
    instances: Vec<Instance>,
}

/// Parses and validates an ontology document.
///
/// Keywords are lowercased, instance values are widened to their property
/// ranges, and every schema and instance invariant is checked.
pub fn parse_ontology(document: &str) -> Result<OntologyDocument, OntologyError> {
    let raw: RawDocument = serde_json::from_str(document).map_err(|e| OntologyError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let schema = OntologySchema {
        uri: raw.uri,
        keywords: raw.keywords.into_iter().map(|k| k.to_lowercase()).collect(),
        classes: raw.classes,
        properties: raw.properties,
    };
    schema.validate()?;

    let mut seen = HashSet::new();
    let mut instances = Vec::with_capacity(raw.instances.len());
    let mut violations = Vec::new();
    for instance in raw.instances {
        if !seen.insert(instance.id.clone()) {
            return Err(OntologyError::DuplicateInstance(instance.id));
        }
        let instance = instance.coerce(&schema);
        violations.extend(validate_instance(&schema, &instance));
        instances.push(instance);
    }
    if !violations.is_empty() {
        return Err(OntologyError::InvalidInstances(violations));
    }
    Ok(OntologyDocument { schema, instances })
}

pub fn serialize_ontology(doc: &OntologyDocument) -> String {
    let raw = RawDocument {
        uri: doc.schema.uri.clone(),
        keywords: doc.schema.keywords.clone(),
        classes: doc.schema.classes.clone(),
        properties: doc.schema.properties.clone(),
        instances: doc.instances.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("ontology documents always serialize")
}

pub fn load_ontology(path: impl AsRef<Path>) -> Result<OntologyDocument, OntologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| OntologyError::Io { path: path.display().to_string(), source })?;
    parse_ontology(&text)
}
