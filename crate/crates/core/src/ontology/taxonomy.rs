//! Subsumption, equivalence and disjointness closure over a schema's classes.
//!
//! Equivalent classes are collapsed onto a canonical representative before
//! the closure is computed, so every member of a group answers queries
//! identically. Disjointness is propagated downward through subsumption on
//! both arguments; a class that ends up disjoint with itself makes the
//! schema inconsistent.

use std::collections::HashMap;

use super::model::{OntologySchema, UnionFind};
use super::OntologyError;

/// Dense handle for a class inside one [`Taxonomy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub(crate) usize);

impl ClassId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    names: Vec<String>,
    index: HashMap<String, ClassId>,
    representative: Vec<usize>,
    /// Row-major `n * n`; `subsumed[a * n + b]` holds `a ⊑ b`.
    subsumed: Vec<bool>,
    disjoint: Vec<bool>,
}

impl Taxonomy {
    pub fn build(schema: &OntologySchema) -> Result<Self, OntologyError> {
        schema.validate()?;

        let n = schema.classes.len();
        let names: Vec<String> = schema.classes.iter().map(|c| c.name.clone()).collect();
        let index: HashMap<String, ClassId> =
            names.iter().enumerate().map(|(i, name)| (name.clone(), ClassId(i))).collect();
        let id = |name: &str| index[name].0;

        let mut groups = UnionFind::new(n);
        for (i, c) in schema.classes.iter().enumerate() {
            for e in &c.equivalent_to {
                groups.union(i, id(e));
            }
        }
        let representative: Vec<usize> = (0..n).map(|i| groups.find(i)).collect();

        // Direct subclass edges between representatives.
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, c) in schema.classes.iter().enumerate() {
            for s in &c.subclass_of {
                let (a, b) = (representative[i], representative[id(s)]);
                if a != b && !parents[a].contains(&b) {
                    parents[a].push(b);
                }
            }
        }

        // Reflexive-transitive closure on representatives.
        let mut rep_up = vec![false; n * n];
        for r in (0..n).filter(|&i| representative[i] == i) {
            let mut stack = vec![r];
            rep_up[r * n + r] = true;
            while let Some(x) = stack.pop() {
                for &p in &parents[x] {
                    if !rep_up[r * n + p] {
                        rep_up[r * n + p] = true;
                        stack.push(p);
                    }
                }
            }
        }

        let mut subsumed = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                subsumed[a * n + b] = rep_up[representative[a] * n + representative[b]];
            }
        }

        // Declared disjoint pairs lifted to representatives, both orientations.
        let mut declared = Vec::new();
        for (i, c) in schema.classes.iter().enumerate() {
            for d in &c.disjoint_with {
                let (a, b) = (representative[i], representative[id(d)]);
                declared.push((a, b));
                declared.push((b, a));
            }
        }
        declared.sort_unstable();
        declared.dedup();

        let mut disjoint = vec![false; n * n];
        for &(x, y) in &declared {
            for c in (0..n).filter(|&c| subsumed[c * n + x]) {
                for d in (0..n).filter(|&d| subsumed[d * n + y]) {
                    disjoint[c * n + d] = true;
                }
            }
        }

        for c in 0..n {
            if disjoint[c * n + c] {
                let (x, y) = declared
                    .iter()
                    .copied()
                    .find(|&(x, y)| subsumed[c * n + x] && subsumed[c * n + y])
                    .expect("self-disjointness stems from a declared pair");
                return Err(OntologyError::Inconsistent {
                    class: names[c].clone(),
                    first: names[x].clone(),
                    second: names[y].clone(),
                });
            }
        }

        Ok(Self { names, index, representative, subsumed, disjoint })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ClassId) -> &str {
        &self.names[id.0]
    }

    fn require(&self, name: &str) -> Result<ClassId, OntologyError> {
        self.class_id(name).ok_or_else(|| OntologyError::UnknownClass(name.to_owned()))
    }

    /// Canonical representative of the class's equivalence group.
    pub fn representative(&self, id: ClassId) -> ClassId {
        ClassId(self.representative[id.0])
    }

    pub fn subsumes_id(&self, sub: ClassId, sup: ClassId) -> bool {
        self.subsumed[sub.0 * self.names.len() + sup.0]
    }

    pub fn disjoint_id(&self, a: ClassId, b: ClassId) -> bool {
        self.disjoint[a.0 * self.names.len() + b.0]
    }

    /// `sub ⊑ sup` in the closure; equivalent classes subsume each other.
    pub fn subsumes(&self, sub: &str, sup: &str) -> Result<bool, OntologyError> {
        Ok(self.subsumes_id(self.require(sub)?, self.require(sup)?))
    }

    pub fn disjoint(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        Ok(self.disjoint_id(self.require(a)?, self.require(b)?))
    }

    pub fn equivalent(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        let (a, b) = (self.require(a)?, self.require(b)?);
        Ok(self.representative(a) == self.representative(b))
    }

    /// All members of the class's equivalence group, itself included.
    pub fn equivalents(&self, name: &str) -> Result<Vec<&str>, OntologyError> {
        let rep = self.representative(self.require(name)?);
        Ok((0..self.names.len()).filter(|&i| self.representative[i] == rep.0).map(|i| self.names[i].as_str()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::model::ClassDef;

    fn schema(classes: Vec<ClassDef>) -> OntologySchema {
        OntologySchema { uri: "urn:test".into(), classes, ..Default::default() }
    }

    #[test]
    fn downward_closure() {
        let t = Taxonomy::build(&schema(vec![
            ClassDef::new("Laptop").disjoint("Desktop"),
            ClassDef::new("Desktop"),
            ClassDef::new("Netbook").subclass("Laptop"),
        ]))
        .unwrap();
        assert!(t.disjoint("Netbook", "Desktop").unwrap());
        assert!(t.disjoint("Desktop", "Netbook").unwrap());
        assert!(!t.disjoint("Laptop", "Laptop").unwrap());
    }

    #[test]
    fn equivalence_lifting() {
        let t = Taxonomy::build(&schema(vec![
            ClassDef::new("Laptop").equivalent("PortableComputer").disjoint("Desktop"),
            ClassDef::new("PortableComputer"),
            ClassDef::new("Desktop"),
        ]))
        .unwrap();
        assert!(t.disjoint("PortableComputer", "Desktop").unwrap());
        assert!(t.subsumes("Laptop", "PortableComputer").unwrap());
        assert!(t.subsumes("PortableComputer", "Laptop").unwrap());
    }

    #[test]
    fn transitivity_and_antisymmetry() {
        let t = Taxonomy::build(&schema(vec![
            ClassDef::new("Computer"),
            ClassDef::new("Laptop").subclass("Computer"),
            ClassDef::new("Netbook").subclass("Laptop"),
        ]))
        .unwrap();
        assert!(t.subsumes("Netbook", "Computer").unwrap());
        assert!(!t.subsumes("Computer", "Netbook").unwrap());
        assert!(t.subsumes("Laptop", "Laptop").unwrap());
    }

    #[test]
    fn unknown_names_are_errors() {
        let t = Taxonomy::build(&schema(vec![ClassDef::new("A")])).unwrap();
        assert!(matches!(t.subsumes("A", "B"), Err(OntologyError::UnknownClass(n)) if n == "B"));
        assert!(matches!(t.disjoint("Z", "A"), Err(OntologyError::UnknownClass(n)) if n == "Z"));
    }

    #[test]
    fn disjoint_with_superclass_is_inconsistent() {
        let err = Taxonomy::build(&schema(vec![
            ClassDef::new("Computer"),
            ClassDef::new("Laptop").subclass("Computer").disjoint("Computer"),
        ]))
        .unwrap_err();
        assert!(matches!(err, OntologyError::Inconsistent { class, .. } if class == "Laptop"));
    }

    #[test]
    fn disjoint_equivalents_via_closure_are_inconsistent() {
        let err = Taxonomy::build(&schema(vec![
            ClassDef::new("A").equivalent("B"),
            ClassDef::new("B").equivalent("C"),
            ClassDef::new("C").disjoint("A"),
        ]))
        .unwrap_err();
        assert!(matches!(err, OntologyError::Inconsistent { .. }));
    }

    #[test]
    fn subclass_cycle_rejected() {
        let err = Taxonomy::build(&schema(vec![ClassDef::new("A").subclass("B"), ClassDef::new("B").subclass("A")]))
            .unwrap_err();
        assert!(matches!(err, OntologyError::SubsumptionCycle(_)));
    }

    #[test]
    fn reflexive_subclass_tolerated() {
        let t = Taxonomy::build(&schema(vec![ClassDef::new("A").subclass("A")])).unwrap();
        assert!(t.subsumes("A", "A").unwrap());
    }

    #[test]
    fn empty_schema() {
        let t = Taxonomy::build(&schema(vec![])).unwrap();
        assert!(t.is_empty());
    }
}
