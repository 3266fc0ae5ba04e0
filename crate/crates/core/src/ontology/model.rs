use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::value::{DatatypeRange, PropertyRange, Value};
use super::OntologyError;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDef {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub equivalent_to: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub subclass_of: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub disjoint_with: BTreeSet<String>,
}

impl ClassDef {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn equivalent(mut self, other: impl Into<String>) -> Self {
        self.equivalent_to.insert(other.into());
        self
    }

    pub fn subclass(mut self, sup: impl Into<String>) -> Self {
        self.subclass_of.insert(sup.into());
        self
    }

    pub fn disjoint(mut self, other: impl Into<String>) -> Self {
        self.disjoint_with.insert(other.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Datatype,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPropertyDef", into = "RawPropertyDef")]
pub struct PropertyDef {
    pub name: String,
    pub kind: PropertyKind,
    pub range: PropertyRange,
    pub functional: bool,
    pub inverse_of: Option<String>,
    pub max_cardinality: Option<u32>,
}

impl PropertyDef {
    pub fn datatype(name: impl Into<String>, range: DatatypeRange) -> Self {
        Self {
            name: name.into(),
            kind: PropertyKind::Datatype,
            range: PropertyRange::Datatype(range),
            functional: false,
            inverse_of: None,
            max_cardinality: None,
        }
    }

    pub fn object(name: impl Into<String>, range_class: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: PropertyKind::Object,
            range: PropertyRange::Class(range_class.into()),
            functional: false,
            inverse_of: None,
            max_cardinality: None,
        }
    }

    pub fn functional(mut self) -> Self {
        self.functional = true;
        self
    }

    pub fn max_cardinality(mut self, n: u32) -> Self {
        self.max_cardinality = Some(n);
        self
    }

    pub fn inverse_of(mut self, other: impl Into<String>) -> Self {
        self.inverse_of = Some(other.into());
        self
    }

    /// Upper bound on asserted values per instance, if any.
    pub fn value_limit(&self) -> Option<u32> {
        if self.functional {
            Some(1)
        } else {
            self.max_cardinality
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropertyDef {
    name: String,
    kind: PropertyKind,
    range: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    functional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverse_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_cardinality: Option<u32>,
}

impl TryFrom<RawPropertyDef> for PropertyDef {
    type Error = String;

    fn try_from(raw: RawPropertyDef) -> Result<Self, Self::Error> {
        let range = match raw.kind {
            PropertyKind::Datatype => PropertyRange::Datatype(DatatypeRange::parse(&raw.range).ok_or_else(|| {
                format!(
                    "property `{}`: datatype range must be integer, decimal, text or boolean, got `{}`",
                    raw.name, raw.range
                )
            })?),
            PropertyKind::Object => PropertyRange::Class(raw.range),
        };
        Ok(PropertyDef {
            name: raw.name,
            kind: raw.kind,
            range,
            functional: raw.functional,
            inverse_of: raw.inverse_of,
            max_cardinality: raw.max_cardinality,
        })
    }
}

impl From<PropertyDef> for RawPropertyDef {
    fn from(p: PropertyDef) -> Self {
        RawPropertyDef {
            name: p.name,
            kind: p.kind,
            range: match p.range {
                PropertyRange::Datatype(d) => d.as_str().to_owned(),
                PropertyRange::Class(c) => c,
            },
            functional: p.functional,
            inverse_of: p.inverse_of,
            max_cardinality: p.max_cardinality,
        }
    }
}

/// TBox of an ontology: classes with their axioms and the property
/// declarations advertisements are written against.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OntologySchema {
    pub uri: String,
    pub keywords: Vec<String>,
    pub classes: Vec<ClassDef>,
    pub properties: Vec<PropertyDef>,
}

impl OntologySchema {
    pub fn new(uri: impl Into<String>) -> Self {
        Self { uri: uri.into(), ..Default::default() }
    }

    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyDef> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn datatype_property_count(&self) -> usize {
        self.properties.iter().filter(|p| p.kind == PropertyKind::Datatype).count()
    }

    pub fn object_property_count(&self) -> usize {
        self.properties.iter().filter(|p| p.kind == PropertyKind::Object).count()
    }

    /// Checks the declaration-level invariants: unique names, declared
    /// references, well-formed axioms and property characteristics, and an
    /// acyclic subclass graph once equivalences are merged.
    pub fn validate(&self) -> Result<(), OntologyError> {
        let mut class_names = HashSet::new();
        for c in &self.classes {
            if !class_names.insert(c.name.as_str()) {
                return Err(OntologyError::DuplicateClass(c.name.clone()));
            }
        }
        let mut property_names = HashSet::new();
        for p in &self.properties {
            if !property_names.insert(p.name.as_str()) {
                return Err(OntologyError::DuplicateProperty(p.name.clone()));
            }
        }

        for c in &self.classes {
            for referenced in c.equivalent_to.iter().chain(&c.subclass_of).chain(&c.disjoint_with) {
                if !class_names.contains(referenced.as_str()) {
                    return Err(OntologyError::UndeclaredClass {
                        name: referenced.clone(),
                        referenced_by: format!("class `{}`", c.name),
                    });
                }
            }
            if c.disjoint_with.contains(&c.name) {
                return Err(OntologyError::InvalidAxiom {
                    class: c.name.clone(),
                    reason: "declared disjoint with itself".into(),
                });
            }
            if let Some(both) = c.equivalent_to.intersection(&c.disjoint_with).next() {
                return Err(OntologyError::InvalidAxiom {
                    class: c.name.clone(),
                    reason: format!("declared both equivalent to and disjoint with `{both}`"),
                });
            }
        }

        for p in &self.properties {
            if let PropertyRange::Class(range) = &p.range {
                if !class_names.contains(range.as_str()) {
                    return Err(OntologyError::UndeclaredClass {
                        name: range.clone(),
                        referenced_by: format!("range of property `{}`", p.name),
                    });
                }
            }
            if p.functional && p.max_cardinality.is_some_and(|m| m != 1) {
                return Err(OntologyError::InvalidProperty {
                    property: p.name.clone(),
                    reason: "functional property with max_cardinality other than 1".into(),
                });
            }
            if let Some(inverse) = &p.inverse_of {
                if p.kind != PropertyKind::Object {
                    return Err(OntologyError::InvalidProperty {
                        property: p.name.clone(),
                        reason: "inverse_of is only allowed on object properties".into(),
                    });
                }
                // An undeclared inverse is a name only; a declared one must
                // be an object property pointing back.
                if let Some(q) = self.property(inverse) {
                    if q.kind != PropertyKind::Object || q.inverse_of.as_deref() != Some(p.name.as_str()) {
                        return Err(OntologyError::InvalidProperty {
                            property: p.name.clone(),
                            reason: format!("inverse `{inverse}` does not declare `{}` as its inverse", p.name),
                        });
                    }
                }
            }
        }

        if let Some(class) = self.find_subclass_cycle() {
            return Err(OntologyError::SubsumptionCycle(class));
        }
        Ok(())
    }

    /// Finds a class lying on a subclass cycle between distinct equivalence
    /// groups. Reflexive `subclass_of` entries and edges inside one group are
    /// ignored.
    fn find_subclass_cycle(&self) -> Option<String> {
        let index: HashMap<&str, usize> = self.classes.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
        let mut groups = UnionFind::new(self.classes.len());
        for (i, c) in self.classes.iter().enumerate() {
            for e in &c.equivalent_to {
                groups.union(i, index[e.as_str()]);
            }
        }
        let n = self.classes.len();
        let mut edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, c) in self.classes.iter().enumerate() {
            for s in &c.subclass_of {
                let (a, b) = (groups.find(i), groups.find(index[s.as_str()]));
                if a != b {
                    edges[a].insert(b);
                }
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, edges[start].iter().copied().collect::<Vec<_>>())];
            state[start] = 1;
            while let Some((node, pending)) = stack.last_mut() {
                match pending.pop() {
                    Some(next) => match state[next] {
                        0 => {
                            state[next] = 1;
                            let succ = edges[next].iter().copied().collect();
                            stack.push((next, succ));
                        }
                        1 => return Some(self.classes[next].name.clone()),
                        _ => {}
                    },
                    None => {
                        state[*node] = 2;
                        stack.pop();
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Unites two sets; the smaller index becomes the root.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// An advertisement: an ABox individual with its asserted property values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    pub id: String,
    pub class_name: String,
    pub values: BTreeMap<String, Vec<Value>>,
    pub categories: BTreeSet<String>,
}

impl Instance {
    pub fn new(id: impl Into<String>, class_name: impl Into<String>) -> Self {
        Self { id: id.into(), class_name: class_name.into(), ..Default::default() }
    }

    pub fn with_value(mut self, property: impl Into<String>, value: impl Into<Value>) -> Self {
        self.values.entry(property.into()).or_default().push(value.into());
        self
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.categories.insert(category.into());
        self
    }

    /// Names of properties carrying at least one value.
    pub fn asserted_properties(&self) -> impl Iterator<Item = &str> {
        self.values.iter().filter(|(_, v)| !v.is_empty()).map(|(k, _)| k.as_str())
    }

    /// Widens values to the canonical representation of each property's
    /// range. Values that do not conform are left untouched for
    /// [`validate_instance`] to report.
    pub fn coerce(mut self, schema: &OntologySchema) -> Self {
        for (name, values) in self.values.iter_mut() {
            if let Some(p) = schema.property(name) {
                for v in values.iter_mut() {
                    let taken = std::mem::replace(v, Value::Boolean(false));
                    *v = match taken.coerce(&p.range) {
                        Ok(c) | Err(c) => c,
                    };
                }
            }
        }
        self
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<Value>),
    One(Value),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    id: String,
    class: String,
    #[serde(default)]
    values: BTreeMap<String, OneOrMany>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    categories: BTreeSet<String>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = String;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        let values = raw
            .values
            .into_iter()
            .map(|(k, v)| {
                let list = match v {
                    OneOrMany::Many(list) => list,
                    OneOrMany::One(single) => vec![single],
                };
                (k, list)
            })
            .filter(|(_, v)| !v.is_empty())
            .collect();
        Ok(Instance { id: raw.id, class_name: raw.class, values, categories: raw.categories })
    }
}

impl From<Instance> for RawInstance {
    fn from(i: Instance) -> Self {
        RawInstance {
            id: i.id,
            class: i.class_name,
            values: i
                .values
                .into_iter()
                .map(|(k, mut v)| {
                    let entry = if v.len() == 1 { OneOrMany::One(v.remove(0)) } else { OneOrMany::Many(v) };
                    (k, entry)
                })
                .collect(),
            categories: i.categories,
        }
    }
}

/// One breach of an instance invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownClass { instance: String, class: String },
    UnknownProperty { instance: String, property: String },
    Range { instance: String, property: String, value: Value, expected: String },
    Cardinality { instance: String, property: String, count: usize, max: u32 },
}

impl Violation {
    /// The schema name the violation is about.
    pub fn offending_name(&self) -> &str {
        match self {
            Violation::UnknownClass { class, .. } => class,
            Violation::UnknownProperty { property, .. }
            | Violation::Range { property, .. }
            | Violation::Cardinality { property, .. } => property,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownClass { instance, class } => {
                write!(f, "instance `{instance}`: unknown class `{class}`")
            }
            Violation::UnknownProperty { instance, property } => {
                write!(f, "instance `{instance}`: undeclared property `{property}`")
            }
            Violation::Range { instance, property, value, expected } => write!(
                f,
                "instance `{instance}`: value `{value}` ({}) out of range {expected} for property `{property}`",
                value.kind_name()
            ),
            Violation::Cardinality { instance, property, count, max } => {
                write!(f, "instance `{instance}`: property `{property}` carries {count} values, at most {max} allowed")
            }
        }
    }
}

/// Returns one violation per breached instance invariant; empty when the
/// instance is valid against `schema`.
pub fn validate_instance(schema: &OntologySchema, instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if schema.class(&instance.class_name).is_none() {
        out.push(Violation::UnknownClass { instance: instance.id.clone(), class: instance.class_name.clone() });
    }
    for (name, values) in &instance.values {
        let Some(p) = schema.property(name) else {
            out.push(Violation::UnknownProperty { instance: instance.id.clone(), property: name.clone() });
            continue;
        };
        for v in values {
            if !v.conforms_to(&p.range) {
                out.push(Violation::Range {
                    instance: instance.id.clone(),
                    property: name.clone(),
                    value: v.clone(),
                    expected: p.range.to_string(),
                });
            }
        }
        if let Some(max) = p.value_limit() {
            if values.len() > max as usize {
                out.push(Violation::Cardinality {
                    instance: instance.id.clone(),
                    property: name.clone(),
                    count: values.len(),
                    max,
                });
            }
        }
    }
    out
}
