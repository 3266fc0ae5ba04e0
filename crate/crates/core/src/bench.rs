//! Synthetic ontologies shaped like real ones, demand series of growing
//! size, and a timing harness for centralized and fanned-out matchmaking.

use std::sync::Arc;
use std::time::Duration;

use cpu_time::ThreadTime;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matchmaker::{
    match_one, normalize, sort_scores, ComparisonCache, Constraint, ConstraintOp, Demand, RankComposition, RawMatch,
};
use crate::net::{
    fanout, serve_provider, FanoutMode, FanoutPlan, NetError, PeerClient, ProviderConfig, ProviderNode, ProviderTarget,
};
use crate::ontology::{
    ClassDef, DatatypeRange, Instance, OntologyDocument, OntologySchema, PropertyDef, PropertyKind, PropertyRange,
    Taxonomy, Value,
};
use crate::profile::ProfileStore;

/// Size of an ontology: concepts, object properties, datatype properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyProfile {
    pub classes: usize,
    pub object_properties: usize,
    pub datatype_properties: usize,
}

impl OntologyProfile {
    pub const COMPUTER: Self = Self::new(13, 6, 0);
    pub const BOOKS: Self = Self::new(9, 2, 13);
    pub const DOC_EGOV: Self = Self::new(22, 10, 67);
    pub const WINE: Self = Self::new(80, 12, 9);

    pub const NAMED: [(&'static str, Self); 4] =
        [("computer", Self::COMPUTER), ("books", Self::BOOKS), ("doc-egov", Self::DOC_EGOV), ("wine", Self::WINE)];

    pub const fn new(classes: usize, object_properties: usize, datatype_properties: usize) -> Self {
        Self { classes, object_properties, datatype_properties }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        let name = name.to_ascii_lowercase();
        Self::NAMED.iter().find(|(n, _)| *n == name).map(|(_, p)| *p)
    }

    pub fn property_count(&self) -> usize {
        self.object_properties + self.datatype_properties
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench spec: {0}")]
    InvalidSpec(String),
    #[error("generated ontology rejected: {0}")]
    Generation(#[from] crate::ontology::OntologyError),
    #[error("matchmaking failed: {0}")]
    Match(#[from] crate::matchmaker::MatchError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
}

const TEXT_VOCABULARY: [&str; 8] = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"];
const ASSERT_PROBABILITY: f64 = 0.7;

fn class_name(i: usize) -> String {
    format!("C{i}")
}

fn instance_id(i: usize) -> String {
    format!("I{i}")
}

/// Generates a consistent schema with exactly the profile's counts.
///
/// Classes form a tree rooted at `C0`; sibling pairs are declared disjoint
/// at random, which can never make a class disjoint with itself. Datatype
/// ranges cycle through integer, decimal, text, boolean.
pub fn generate_schema(profile: OntologyProfile, seed: u64) -> OntologySchema {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schema = OntologySchema::new(format!(
        "urn:synthetic:{}-{}-{}:{seed}",
        profile.classes, profile.object_properties, profile.datatype_properties
    ));
    schema.keywords = vec!["synthetic".into()];

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); profile.classes];
    for i in 0..profile.classes {
        let mut def = ClassDef::new(class_name(i));
        if i > 0 {
            let parent = rng.random_range(0..i);
            children[parent].push(i);
            def = def.subclass(class_name(parent));
        }
        schema.classes.push(def);
    }
    for siblings in &children {
        for pair in siblings.windows(2) {
            if rng.random_bool(0.5) {
                schema.classes[pair[0]] = schema.classes[pair[0]].clone().disjoint(class_name(pair[1]));
            }
        }
    }

    for j in 0..profile.datatype_properties {
        let range = DatatypeRange::ALL[j % DatatypeRange::ALL.len()];
        schema.properties.push(PropertyDef::datatype(format!("d{j}"), range).functional());
    }
    for j in 0..profile.object_properties {
        let range = rng.random_range(0..profile.classes.max(1));
        schema.properties.push(PropertyDef::object(format!("o{j}"), class_name(range)));
    }
    schema
}

fn random_value(rng: &mut ChaCha8Rng, range: &PropertyRange, instance_count: usize) -> Value {
    match range {
        PropertyRange::Datatype(DatatypeRange::Integer) => Value::Integer(rng.random_range(0..100)),
        PropertyRange::Datatype(DatatypeRange::Decimal) => {
            Value::Decimal(f64::from(rng.random_range(0..100_000u32)) / 100.0)
        }
        PropertyRange::Datatype(DatatypeRange::Text) => Value::from(*TEXT_VOCABULARY.choose(rng).expect("non-empty")),
        PropertyRange::Datatype(DatatypeRange::Boolean) => Value::Boolean(rng.random_bool(0.5)),
        PropertyRange::Class(_) => Value::Text(instance_id(rng.random_range(0..instance_count.max(1)))),
    }
}

/// Generates a schema plus `instance_count` supplies asserting each
/// property with a fixed probability.
pub fn generate_ontology(profile: OntologyProfile, instance_count: usize, seed: u64) -> OntologyDocument {
    let schema = generate_schema(profile, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let instances = (0..instance_count)
        .map(|i| {
            let class = rng.random_range(0..profile.classes);
            let mut inst = Instance::new(instance_id(i), class_name(class));
            for p in &schema.properties {
                if rng.random_bool(ASSERT_PROBABILITY) {
                    inst = inst.with_value(p.name.clone(), random_value(&mut rng, &p.range, instance_count));
                }
            }
            inst
        })
        .collect();
    OntologyDocument { schema, instances }
}

/// A demand on the root concept constraining the first `property_count`
/// properties of the schema, so larger queries extend smaller ones.
pub fn synthetic_demand(schema: &OntologySchema, property_count: usize) -> Result<Demand, BenchError> {
    if property_count > schema.properties.len() {
        return Err(BenchError::InvalidSpec(format!(
            "query needs {property_count} properties, ontology has {}",
            schema.properties.len()
        )));
    }
    let root = schema.classes.first().ok_or_else(|| BenchError::InvalidSpec("ontology has no classes".into()))?;
    let mut demand = Demand::new(root.name.clone(), schema.uri.clone());
    for p in schema.properties.iter().take(property_count) {
        let c = match (&p.kind, &p.range) {
            (PropertyKind::Object, _) => Constraint::eq(p.name.clone(), instance_id(0)),
            (_, PropertyRange::Datatype(DatatypeRange::Integer)) => Constraint::ge(p.name.clone(), 50i64),
            (_, PropertyRange::Datatype(DatatypeRange::Decimal)) => {
                Constraint::new(p.name.clone(), ConstraintOp::Le, 500.0)
            }
            (_, PropertyRange::Datatype(DatatypeRange::Boolean)) => Constraint::eq(p.name.clone(), true),
            (_, _) => Constraint::eq(p.name.clone(), TEXT_VOCABULARY[0]),
        };
        demand = demand.with(c);
    }
    Ok(demand)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub profile: OntologyProfile,
    pub instance_count: usize,
    /// Property count of each query in the series.
    pub query_series: Vec<usize>,
    /// 0 runs matchmaking in-process; otherwise that many local providers.
    pub peers: usize,
    pub mode: FanoutMode,
    pub repetitions: usize,
    pub seed: u64,
    /// Every provider holds all supplies instead of a disjoint share.
    #[serde(default)]
    pub replicate: bool,
    /// Server-side delay per provider, cycled over providers.
    #[serde(default)]
    pub inject_delays_ms: Vec<u64>,
}

impl BenchSpec {
    pub fn centralized(profile: OntologyProfile, instance_count: usize, query_series: Vec<usize>) -> Self {
        Self {
            profile,
            instance_count,
            query_series,
            peers: 0,
            mode: FanoutMode::Sync,
            repetitions: 3,
            seed: 42,
            replicate: false,
            inject_delays_ms: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let fail = |m: &str| Err(BenchError::InvalidSpec(m.to_owned()));
        if self.repetitions < 2 {
            return fail("repetitions must be at least 2");
        }
        if self.profile.classes == 0 {
            return fail("profile needs at least one class");
        }
        if self.profile.property_count() == 0 {
            return fail("profile needs at least one property");
        }
        if self.instance_count == 0 {
            return fail("instance count must be positive");
        }
        if self.query_series.is_empty() {
            return fail("query series is empty");
        }
        if let Some(&bad) = self.query_series.iter().find(|&&k| k == 0 || k > self.profile.property_count()) {
            return Err(BenchError::InvalidSpec(format!(
                "query with {bad} properties outside 1..={}",
                self.profile.property_count()
            )));
        }
        Ok(())
    }
}

/// One line of the timing table; all times are means over repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub query: String,
    pub properties: usize,
    pub peers: usize,
    pub resources: usize,
    pub matchmaking_ms: f64,
    pub latency_ms: f64,
    pub total_ms: f64,
}

fn label(index: usize, properties: usize, peers: usize, mode: Option<FanoutMode>) -> String {
    match mode {
        None => format!("Q{}-{properties}", index + 1),
        Some(m) => format!("Q{}-{properties}-{peers}-{}", index + 1, m.as_str()),
    }
}

/// In-process runs, timed in thread CPU time.
///
/// Every supply is scored against all queries back to back, the query order
/// rotating by one position from one supply to the next.
/// `matchmaking_ms` covers scoring, `total_ms` adds normalization and
/// ordering. One untimed warm-up pass precedes the timed repetitions.
pub fn run_centralized(spec: &BenchSpec) -> Result<Vec<BenchRow>, BenchError> {
    spec.validate()?;
    let doc = generate_ontology(spec.profile, spec.instance_count, spec.seed);
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let demands = spec.query_series.iter().map(|&k| synthetic_demand(&doc.schema, k)).collect::<Result<Vec<_>, _>>()?;
    let q = demands.len();

    let pass = || -> Result<Vec<(f64, f64)>, BenchError> {
        let mut caches: Vec<ComparisonCache> = (0..q).map(|_| ComparisonCache::new()).collect();
        let mut raws: Vec<Vec<RawMatch>> = (0..q).map(|_| Vec::with_capacity(doc.instances.len())).collect();
        let mut scoring = vec![Duration::ZERO; q];
        for (n, supply) in doc.instances.iter().enumerate() {
            for j in 0..q {
                let i = (n + j) % q;
                let started = ThreadTime::now();
                let raw = match_one(&taxonomy, &demands[i], supply, &mut caches[i])?;
                scoring[i] += started.elapsed();
                raws[i].push(raw);
            }
        }
        let mut out = Vec::with_capacity(q);
        for (i, raws) in raws.iter().enumerate() {
            let started = ThreadTime::now();
            let mut scores = normalize(raws, RankComposition::default());
            sort_scores(&mut scores);
            std::hint::black_box(&scores);
            let ordering = started.elapsed();
            out.push((millis(scoring[i]), millis(scoring[i] + ordering)));
        }
        Ok(out)
    };

    pass()?;
    let mut sums = vec![(0.0, 0.0); q];
    for _ in 0..spec.repetitions {
        for (sum, (mm, total)) in sums.iter_mut().zip(pass()?) {
            sum.0 += mm;
            sum.1 += total;
        }
    }
    let reps = spec.repetitions as f64;
    Ok(spec
        .query_series
        .iter()
        .enumerate()
        .map(|(i, &k)| BenchRow {
            query: label(i, k, 1, None),
            properties: k,
            peers: 1,
            resources: doc.instances.len(),
            matchmaking_ms: sums[i].0 / reps,
            latency_ms: 0.0,
            total_ms: sums[i].1 / reps,
        })
        .collect())
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Spawns `spec.peers` bench-mode providers on loopback and fans each query
/// out to them. Per row, `matchmaking_ms` and `latency_ms` are summed over
/// providers and `total_ms` is the client's wall time including the merge.
pub async fn run_distributed(spec: &BenchSpec) -> Result<Vec<BenchRow>, BenchError> {
    spec.validate()?;
    if spec.peers == 0 {
        return Err(BenchError::InvalidSpec("distributed run needs at least one peer".into()));
    }
    let doc = generate_ontology(spec.profile, spec.instance_count, spec.seed);
    let mut handles = Vec::with_capacity(spec.peers);
    let mut targets = Vec::with_capacity(spec.peers);
    for p in 0..spec.peers {
        let instances = if spec.replicate {
            doc.instances.clone()
        } else {
            doc.instances.iter().skip(p).step_by(spec.peers).cloned().collect()
        };
        let config = ProviderConfig { provider_id: format!("peer-{}", p + 1), bench_mode: true, ui_dir: None };
        let node = ProviderNode::new(
            config,
            OntologyDocument { schema: doc.schema.clone(), instances },
            ProfileStore::in_memory(),
        )?;
        let fingerprint = node.fingerprint().to_owned();
        let handle = serve_provider(Arc::new(node), "127.0.0.1:0").await?;
        let mut target = ProviderTarget::new(handle.address()).with_fingerprint(fingerprint);
        if !spec.inject_delays_ms.is_empty() {
            target = target.with_delay(spec.inject_delays_ms[p % spec.inject_delays_ms.len()]);
        }
        targets.push(target);
        handles.push(handle);
    }
    let plan = FanoutPlan { providers: targets, mode: spec.mode, per_request_timeout_ms: 60_000 };
    let client = PeerClient::new();
    let demands = spec.query_series.iter().map(|&k| synthetic_demand(&doc.schema, k)).collect::<Result<Vec<_>, _>>()?;

    for d in &demands {
        fanout(&client, &plan, d).await?;
    }
    let mut sums = vec![(0.0, 0.0, 0.0, 0usize); demands.len()];
    for _ in 0..spec.repetitions {
        for (i, d) in demands.iter().enumerate() {
            let outcome = fanout(&client, &plan, d).await?;
            if let Some(f) = outcome.failures.first() {
                return Err(BenchError::Net(NetError::Transport {
                    address: f.address.clone(),
                    message: f.error.clone(),
                }));
            }
            let t = &outcome.timing;
            sums[i].0 += t.per_provider.iter().map(|p| p.matchmaking_ms).sum::<f64>();
            sums[i].1 += t.per_provider.iter().map(|p| p.latency_ms).sum::<f64>();
            sums[i].2 += t.total_wall_ms;
            sums[i].3 = outcome.merged.entries.len();
        }
    }
    for h in handles {
        h.shutdown().await;
    }
    let reps = spec.repetitions as f64;
    Ok(spec
        .query_series
        .iter()
        .enumerate()
        .map(|(i, &k)| BenchRow {
            query: label(i, k, spec.peers, Some(spec.mode)),
            properties: k,
            peers: spec.peers,
            resources: sums[i].3,
            matchmaking_ms: sums[i].0 / reps,
            latency_ms: sums[i].1 / reps,
            total_ms: sums[i].2 / reps,
        })
        .collect())
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<16} {:>6} {:>6} {:>10} {:>14} {:>12} {:>12}\n",
        "query", "props", "peers", "resources", "matchmaking_ms", "latency_ms", "total_ms"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<16} {:>6} {:>6} {:>10} {:>14.3} {:>12.3} {:>12.3}\n",
            r.query, r.properties, r.peers, r.resources, r.matchmaking_ms, r.latency_ms, r.total_ms
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::validate_instance;

    #[test]
    fn generator_honors_profiles() {
        for (name, profile) in OntologyProfile::NAMED {
            let doc = generate_ontology(profile, 50, 7);
            assert_eq!(doc.schema.classes.len(), profile.classes, "{name}");
            assert_eq!(doc.schema.object_property_count(), profile.object_properties, "{name}");
            assert_eq!(doc.schema.datatype_property_count(), profile.datatype_properties, "{name}");
            Taxonomy::build(&doc.schema).unwrap();
            assert!(doc.instances.iter().all(|i| validate_instance(&doc.schema, i).is_empty()));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_ontology(OntologyProfile::BOOKS, 20, 3), generate_ontology(OntologyProfile::BOOKS, 20, 3));
        assert_ne!(generate_ontology(OntologyProfile::BOOKS, 20, 3), generate_ontology(OntologyProfile::BOOKS, 20, 4));
    }

    #[test]
    fn demands_nest_and_validate() {
        let schema = generate_schema(OntologyProfile::DOC_EGOV, 1);
        let d3 = synthetic_demand(&schema, 3).unwrap();
        let d4 = synthetic_demand(&schema, 4).unwrap();
        assert_eq!(&d4.constraints[..3], &d3.constraints[..]);
        assert!(d4.validate(&schema).is_empty());
        assert!(synthetic_demand(&schema, 78).is_err());
        let computer = generate_schema(OntologyProfile::COMPUTER, 1);
        assert!(synthetic_demand(&computer, 6).unwrap().validate(&computer).is_empty());
    }

    #[test]
    fn spec_invariants() {
        let mut spec = BenchSpec::centralized(OntologyProfile::COMPUTER, 10, vec![1, 2]);
        assert!(spec.validate().is_ok());
        spec.repetitions = 1;
        assert!(spec.validate().is_err());
        spec.repetitions = 2;
        spec.query_series = vec![7];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn csv_columns() {
        let rows = run_centralized(&BenchSpec::centralized(OntologyProfile::BOOKS, 30, vec![1, 2])).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("query,properties,peers,resources,matchmaking_ms,latency_ms,total_ms\n"));
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("Q2-2,2,1,30,"));
    }
}
