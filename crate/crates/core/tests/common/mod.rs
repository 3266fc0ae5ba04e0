//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use ontomatch::matchmaker::{Confidence, Constraint, ConstraintOp, ConstraintValue, Demand};
use ontomatch::ontology::{
    parse_ontology, ClassDef, DatatypeRange, Instance, OntologyDocument, OntologySchema, PropertyDef, PropertyRange,
    Taxonomy, Value,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LAPTOPS: &str = include_str!("../../fixtures/laptops.onto.json");

pub fn laptops() -> OntologyDocument {
    parse_ontology(LAPTOPS).expect("laptop fixture parses")
}

pub fn white_laptop_demand() -> Demand {
    Demand::new("Laptop", "http://shopping.example.org/computer.owl")
        .with(Constraint::eq("colour", "white"))
        .with(Constraint::ge("warrantyYears", 2))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const DATES: [&str; 6] = ["2009-02-20", "2009-02-27", "2009-03-01", "2009-03-15", "2010-01-01", "2010-06-30"];
const OBJECTS: [&str; 4] = ["obj0", "obj1", "obj2", "obj3"];

/// Random schema, possibly cyclic or inconsistent: up to `max_classes`
/// classes with random subclass, equivalence and disjointness axioms.
pub fn random_schema_raw(r: &mut ChaCha8Rng, max_classes: usize, max_properties: usize) -> OntologySchema {
    let n = r.random_range(1..=max_classes);
    let mut classes: Vec<ClassDef> = (0..n).map(|i| ClassDef::new(format!("K{i}"))).collect();
    for i in 0..n {
        if i > 0 && r.random_bool(0.6) {
            let j = r.random_range(0..i);
            classes[i] = classes[i].clone().subclass(format!("K{j}"));
        }
        if i > 1 && r.random_bool(0.2) {
            let j = r.random_range(0..i);
            classes[i] = classes[i].clone().subclass(format!("K{j}"));
        }
        if r.random_bool(0.12) {
            let j = r.random_range(0..n);
            if j != i {
                classes[i] = classes[i].clone().equivalent(format!("K{j}"));
            }
        }
        if r.random_bool(0.25) {
            let j = r.random_range(0..n);
            if j != i {
                classes[i] = classes[i].clone().disjoint(format!("K{j}"));
            }
        }
    }
    let p = r.random_range(1..=max_properties);
    let properties = (0..p)
        .map(|j| {
            let name = format!("p{j}");
            let mut def = match r.random_range(0..5) {
                0 => PropertyDef::datatype(name, DatatypeRange::Integer),
                1 => PropertyDef::datatype(name, DatatypeRange::Decimal),
                2 => PropertyDef::datatype(name, DatatypeRange::Text),
                3 => PropertyDef::datatype(name, DatatypeRange::Boolean),
                _ => PropertyDef::object(name, format!("K{}", r.random_range(0..n))),
            };
            if r.random_bool(0.4) {
                def = def.functional();
            }
            def
        })
        .collect();
    OntologySchema { uri: "urn:random".into(), keywords: vec!["random".into()], classes, properties }
}

/// Random schema that builds into a taxonomy.
pub fn random_schema(r: &mut ChaCha8Rng, max_classes: usize, max_properties: usize) -> (OntologySchema, Taxonomy) {
    loop {
        let s = random_schema_raw(r, max_classes, max_properties);
        if let Ok(t) = Taxonomy::build(&s) {
            return (s, t);
        }
    }
}

pub fn random_value(r: &mut ChaCha8Rng, range: &PropertyRange) -> Value {
    match range {
        PropertyRange::Datatype(DatatypeRange::Integer) => Value::Integer(r.random_range(0..10)),
        PropertyRange::Datatype(DatatypeRange::Decimal) => Value::Decimal(f64::from(r.random_range(0..20u8)) / 2.0),
        PropertyRange::Datatype(DatatypeRange::Text) => Value::from(*DATES.choose(r).unwrap()),
        PropertyRange::Datatype(DatatypeRange::Boolean) => Value::Boolean(r.random_bool(0.5)),
        PropertyRange::Class(_) => Value::from(*OBJECTS.choose(r).unwrap()),
    }
}

pub fn random_supplies(r: &mut ChaCha8Rng, schema: &OntologySchema, max: usize) -> Vec<Instance> {
    let count = r.random_range(0..=max);
    (0..count)
        .map(|i| {
            let class = schema.classes.choose(r).unwrap().name.clone();
            let mut inst = Instance::new(format!("S{i}"), class);
            for p in &schema.properties {
                if r.random_bool(0.6) {
                    let n = if p.functional { 1 } else { r.random_range(1..=2) };
                    for _ in 0..n {
                        inst = inst.with_value(p.name.clone(), random_value(r, &p.range));
                    }
                }
            }
            inst
        })
        .collect()
}

pub fn random_demand(r: &mut ChaCha8Rng, schema: &OntologySchema, max_constraints: usize) -> Demand {
    let concept = schema.classes.choose(r).unwrap().name.clone();
    let mut demand = Demand::new(concept, schema.uri.clone());
    demand.concept_confidence = Confidence::new(r.random_range(1..=10)).unwrap();
    let k = r.random_range(0..=max_constraints.min(schema.properties.len()));
    let chosen: Vec<&PropertyDef> = schema.properties.choose_multiple(r, k).collect();
    for p in chosen {
        let ordered = matches!(
            p.range,
            PropertyRange::Datatype(DatatypeRange::Integer | DatatypeRange::Decimal | DatatypeRange::Text)
        );
        let ops: &[ConstraintOp] = if ordered {
            &[
                ConstraintOp::Eq,
                ConstraintOp::Ne,
                ConstraintOp::Lt,
                ConstraintOp::Le,
                ConstraintOp::Gt,
                ConstraintOp::Ge,
                ConstraintOp::Range,
            ]
        } else {
            &[ConstraintOp::Eq, ConstraintOp::Ne]
        };
        let op = *ops.choose(r).unwrap();
        let mut c = if op == ConstraintOp::Range {
            let a = random_value(r, &p.range);
            let b = random_value(r, &p.range);
            let (lo, hi) = if a.compare(&b).unwrap().is_le() { (a, b) } else { (b, a) };
            Constraint::range(p.name.clone(), lo, hi)
        } else {
            Constraint::new(p.name.clone(), op, random_value(r, &p.range))
        };
        c.confidence = Confidence::new(r.random_range(1..=10)).unwrap();
        demand = demand.with(c);
    }
    demand
}

/// Reachability closure by fixpoint iteration over declared axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureOracle {
    pub names: Vec<String>,
    pub sub: Vec<Vec<bool>>,
    pub disjoint: Vec<Vec<bool>>,
    pub equivalent: Vec<Vec<bool>>,
    pub cyclic: bool,
    pub inconsistent: bool,
}

pub fn closure_oracle(schema: &OntologySchema) -> ClosureOracle {
    let names: Vec<String> = schema.classes.iter().map(|c| c.name.clone()).collect();
    let n = names.len();
    let idx = |s: &str| names.iter().position(|x| x == s).unwrap();

    let mut eq = vec![vec![false; n]; n];
    for i in 0..n {
        eq[i][i] = true;
    }
    for (i, c) in schema.classes.iter().enumerate() {
        for e in &c.equivalent_to {
            let j = idx(e);
            eq[i][j] = true;
            eq[j][i] = true;
        }
    }
    let mut sub = eq.clone();
    for (i, c) in schema.classes.iter().enumerate() {
        for s in &c.subclass_of {
            sub[i][idx(s)] = true;
        }
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if eq[a][b] && eq[b][c] && !eq[a][c] {
                        eq[a][c] = true;
                        changed = true;
                    }
                    if sub[a][b] && sub[b][c] && !sub[a][c] {
                        sub[a][c] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let cyclic = (0..n).any(|a| (0..n).any(|b| sub[a][b] && sub[b][a] && !eq[a][b]));

    let mut disjoint = vec![vec![false; n]; n];
    for (x, c) in schema.classes.iter().enumerate() {
        for d in &c.disjoint_with {
            let y = idx(d);
            for a in 0..n {
                for b in 0..n {
                    if (sub[a][x] && sub[b][y]) || (sub[a][y] && sub[b][x]) {
                        disjoint[a][b] = true;
                    }
                }
            }
        }
    }
    let inconsistent = (0..n).any(|a| disjoint[a][a]);
    ClosureOracle { names, sub, disjoint, equivalent: eq, cyclic, inconsistent }
}

/// Counters of one supply as the naive matcher computes them.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveCounts {
    pub id: String,
    pub par_tenths: u32,
    pub pot: u32,
    pub additional: BTreeSet<String>,
}

fn naive_holds(op: ConstraintOp, value: &ConstraintValue, v: &Value) -> bool {
    let num = |x: &Value| match x {
        Value::Integer(i) => Some(*i as f64),
        Value::Decimal(d) => Some(*d),
        _ => None,
    };
    let cmp = |a: &Value, b: &Value| -> std::cmp::Ordering {
        match (a, b) {
            (Value::Text(x), Value::Text(y)) => x.cmp(y),
            _ => num(a).unwrap().partial_cmp(&num(b).unwrap()).unwrap(),
        }
    };
    let same = |a: &Value, b: &Value| match (a, b) {
        (Value::Text(x), Value::Text(y)) => x == y,
        (Value::Boolean(x), Value::Boolean(y)) => x == y,
        _ => num(a).unwrap() == num(b).unwrap(),
    };
    match (op, value) {
        (ConstraintOp::Eq, ConstraintValue::Single(o)) => same(v, o),
        (ConstraintOp::Ne, ConstraintValue::Single(o)) => !same(v, o),
        (ConstraintOp::Lt, ConstraintValue::Single(o)) => cmp(v, o).is_lt(),
        (ConstraintOp::Le, ConstraintValue::Single(o)) => cmp(v, o).is_le(),
        (ConstraintOp::Gt, ConstraintValue::Single(o)) => cmp(v, o).is_gt(),
        (ConstraintOp::Ge, ConstraintValue::Single(o)) => cmp(v, o).is_ge(),
        (ConstraintOp::Range, ConstraintValue::Range(lo, hi)) => cmp(v, lo).is_ge() && cmp(v, hi).is_le(),
        _ => panic!("shape mismatch in generated demand"),
    }
}

/// Re-derives every verdict from the closure oracle, without caching.
pub fn naive_match(schema: &OntologySchema, demand: &Demand, supplies: &[Instance]) -> Vec<NaiveCounts> {
    let oracle = closure_oracle(schema);
    let idx = |s: &str| oracle.names.iter().position(|x| x == s).unwrap();
    let d = idx(&demand.concept);
    let named: BTreeSet<&str> = demand.constraints.iter().map(|c| c.property.as_str()).collect();
    supplies
        .iter()
        .map(|s| {
            let c = idx(&s.class_name);
            let mut par_tenths = 0;
            let mut pot = 0;
            if oracle.disjoint[c][d] {
                par_tenths += u32::from(demand.concept_confidence.get());
            } else if !oracle.sub[c][d] {
                pot += 1;
            }
            for k in &demand.constraints {
                let values: &[Value] = s.values.get(&k.property).map(Vec::as_slice).unwrap_or(&[]);
                if values.is_empty() {
                    pot += 1;
                } else if !values.iter().any(|v| naive_holds(k.op, &k.value, v)) {
                    par_tenths += u32::from(k.confidence.get());
                }
            }
            let additional = s
                .values
                .iter()
                .filter(|(name, vs)| !vs.is_empty() && !named.contains(name.as_str()))
                .map(|(name, _)| name.clone())
                .collect();
            NaiveCounts { id: s.id.clone(), par_tenths, pot, additional }
        })
        .collect()
}

/// Replays registry operations over a plain map keyed by URI.
#[derive(Debug, Clone)]
pub enum RegistryOp {
    Register { uri: String, keywords: Vec<String>, address: String },
    Deregister { uri: String },
}

pub fn fold_registry(ops: &[RegistryOp]) -> BTreeMap<String, (BTreeSet<String>, String)> {
    let mut map = BTreeMap::new();
    for op in ops {
        match op {
            RegistryOp::Register { uri, keywords, address } => {
                map.insert(uri.clone(), (keywords.iter().map(|k| k.to_lowercase()).collect(), address.clone()));
            }
            RegistryOp::Deregister { uri } => {
                map.remove(uri);
            }
        }
    }
    map
}

pub fn random_registry_ops(r: &mut ChaCha8Rng, len: usize) -> Vec<RegistryOp> {
    const KEYWORDS: [&str; 6] = ["laptop", "Computer", "wine", "BOOK", "egov", "tax"];
    (0..len)
        .map(|_| {
            let uri = format!("urn:onto:{}", r.random_range(0..8));
            if r.random_bool(0.7) {
                let k = r.random_range(1..=3);
                let keywords = KEYWORDS.choose_multiple(r, k).map(|s| s.to_string()).collect();
                RegistryOp::Register {
                    uri,
                    keywords,
                    address: format!("peer{}:{}", r.random_range(0..4), 7000 + r.random_range(0..10)),
                }
            } else {
                RegistryOp::Deregister { uri }
            }
        })
        .collect()
}
