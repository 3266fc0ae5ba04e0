use std::collections::BTreeSet;
use std::fmt::Write;

use sha2::{Digest, Sha256};

use super::model::{OntologySchema, PropertyKind};

/// Digest of the terminological part of a schema.
///
/// Classes, axioms and properties are written in a canonical order before
/// hashing: declaration order, the schema URI, keywords and instances do not
/// influence the result. Equivalence and disjointness axioms are unordered
/// pairs, so `A ≡ B` declared on either class hashes the same.
pub fn tbox_fingerprint(schema: &OntologySchema) -> String {
    let mut lines = BTreeSet::new();
    for c in &schema.classes {
        lines.insert(format!("class {}", c.name));
        for s in &c.subclass_of {
            lines.insert(format!("sub {} {}", c.name, s));
        }
        for e in &c.equivalent_to {
            let (a, b) = ordered(&c.name, e);
            lines.insert(format!("eq {a} {b}"));
        }
        for d in &c.disjoint_with {
            let (a, b) = ordered(&c.name, d);
            lines.insert(format!("disj {a} {b}"));
        }
    }
    for p in &schema.properties {
        let kind = match p.kind {
            PropertyKind::Datatype => "datatype",
            PropertyKind::Object => "object",
        };
        lines.insert(format!(
            "prop {} {} {} functional={} inverse={} max={}",
            p.name,
            kind,
            p.range,
            p.functional,
            p.inverse_of.as_deref().unwrap_or("-"),
            p.max_cardinality.map(|m| m.to_string()).unwrap_or_else(|| "-".into()),
        ));
    }

    let mut canonical = String::new();
    for line in &lines {
        let _ = writeln!(canonical, "{line}");
    }
    format!("sha256:{}", hex::encode(Sha256::digest(canonical.as_bytes())))
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
