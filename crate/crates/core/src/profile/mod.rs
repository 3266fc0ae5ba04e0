//! PUSH mode: user profiles, saved queries with validity, conjunctive
//! classification rules, and the login/publication triggers that turn them
//! into recommendations.

mod store;

pub use store::ProfileStore;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matchmaker::{match_all, match_one, ComparisonCache, Demand, RawMatch};
use crate::ontology::{Instance, OntologySchema, Taxonomy, Value};

/// Class the profiler schema must declare for profile instances.
pub const PROFILE_CLASS: &str = "Profile";

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("rule `{rule}`: attribute `{attribute}` holds {found}, not comparable with operator `{op}` on {expected}")]
    TypeMismatch { rule: String, attribute: String, op: RuleOp, found: &'static str, expected: &'static str },
    #[error("rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },
    #[error("invalid user id `{0}`")]
    InvalidUserId(String),
    #[error("saved query `{query_id}` already exists for user `{user_id}`")]
    DuplicateQuery { user_id: String, query_id: String },
    #[error("saved query `{0}` is already expired")]
    Expired(String),
    #[error("profile store I/O on `{path}`: {message}")]
    Storage { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedQuery {
    pub query_id: String,
    pub demand: Demand,
    pub valid_until: DateTime<Utc>,
}

impl SavedQuery {
    pub fn is_valid_at(&self, now: DateTime<Utc>) -> bool {
        self.valid_until >= now
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    /// The user's instance of the profiler schema's `Profile` class.
    #[serde(default)]
    pub attributes: BTreeMap<String, Value>,
    #[serde(default)]
    pub saved_queries: Vec<SavedQuery>,
}

impl UserProfile {
    pub fn new(user_id: impl Into<String>) -> Self {
        Self { user_id: user_id.into(), ..Default::default() }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    pub fn with_query(mut self, query: SavedQuery) -> Self {
        self.saved_queries.push(query);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for RuleOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleOp::Eq => "eq",
            RuleOp::Ne => "ne",
            RuleOp::Lt => "lt",
            RuleOp::Le => "le",
            RuleOp::Gt => "gt",
            RuleOp::Ge => "ge",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: String,
    pub op: RuleOp,
    pub value: Value,
}

impl Condition {
    pub fn new(attribute: impl Into<String>, op: RuleOp, value: impl Into<Value>) -> Self {
        Self { attribute: attribute.into(), op, value: value.into() }
    }
}

/// Conjunctive classification rule: all conditions hold ⇒ user in `category`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub conditions: Vec<Condition>,
    pub category: String,
}

/// Checks rules against the profiler schema: conditions non-empty and every
/// attribute declared as a property. `age` is accepted when `birthdate` is
/// declared, since it is derived at evaluation time.
pub fn validate_rules(rules: &[Rule], profiler: &OntologySchema) -> Result<(), ProfileError> {
    if profiler.class(PROFILE_CLASS).is_none() {
        return Err(ProfileError::InvalidRule {
            rule: "*".into(),
            reason: format!("profiler schema declares no `{PROFILE_CLASS}` class"),
        });
    }
    for rule in rules {
        if rule.conditions.is_empty() {
            return Err(ProfileError::InvalidRule { rule: rule.name.clone(), reason: "no conditions".into() });
        }
        for c in &rule.conditions {
            let declared = profiler.property(&c.attribute).is_some()
                || (c.attribute == "age" && profiler.property("birthdate").is_some());
            if !declared {
                return Err(ProfileError::InvalidRule {
                    rule: rule.name.clone(),
                    reason: format!("attribute `{}` not declared in the profiler schema", c.attribute),
                });
            }
        }
    }
    Ok(())
}

/// Attributes after deriving time-dependent ones: `age` in whole years from
/// an ISO `birthdate` when no explicit age is stored.
fn effective_attributes(profile: &UserProfile, now: DateTime<Utc>) -> BTreeMap<String, Value> {
    let mut attrs = profile.attributes.clone();
    if !attrs.contains_key("age") {
        let birth =
            attrs.get("birthdate").and_then(Value::as_text).and_then(|s| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok());
        if let Some(birth) = birth {
            let today = now.date_naive();
            let mut years = today.year() - birth.year();
            if (today.month(), today.day()) < (birth.month(), birth.day()) {
                years -= 1;
            }
            attrs.insert("age".into(), Value::Integer(i64::from(years)));
        }
    }
    attrs
}

fn condition_holds(rule: &Rule, c: &Condition, attrs: &BTreeMap<String, Value>) -> Result<bool, ProfileError> {
    let Some(actual) = attrs.get(&c.attribute) else {
        return Ok(false);
    };
    let mismatch = || ProfileError::TypeMismatch {
        rule: rule.name.clone(),
        attribute: c.attribute.clone(),
        op: c.op,
        found: actual.kind_name(),
        expected: c.value.kind_name(),
    };
    Ok(match c.op {
        RuleOp::Eq => actual.equals(&c.value).ok_or_else(mismatch)?,
        RuleOp::Ne => !actual.equals(&c.value).ok_or_else(mismatch)?,
        op => {
            let ord = actual.compare(&c.value).ok_or_else(mismatch)?;
            match op {
                RuleOp::Lt => ord.is_lt(),
                RuleOp::Le => ord.is_le(),
                RuleOp::Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }
        }
    })
}

/// Categories whose rule has all conditions satisfied by the profile.
/// A condition on an attribute the profile lacks does not hold.
pub fn evaluate_rules(
    rules: &[Rule],
    profile: &UserProfile,
    now: DateTime<Utc>,
) -> Result<BTreeSet<String>, ProfileError> {
    let attrs = effective_attributes(profile, now);
    let mut categories = BTreeSet::new();
    for rule in rules {
        let mut all = true;
        for c in &rule.conditions {
            if !condition_holds(rule, c, &attrs)? {
                all = false;
                break;
            }
        }
        if all {
            categories.insert(rule.category.clone());
        }
    }
    Ok(categories)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum RecommendationSource {
    Category(String),
    SavedQuery(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub instance_id: String,
    pub source: RecommendationSource,
    /// Rank from the replayed query; category matches carry the worst rank, 1.
    pub rank: f64,
}

/// Recommendations shown on login: resources classified under the user's
/// inferred categories plus a replay of every still-valid saved query.
/// One entry per instance, the better-ranked variant winning.
pub fn on_login(
    profile: &UserProfile,
    rules: &[Rule],
    resources: &[Instance],
    taxonomy: &Taxonomy,
    now: DateTime<Utc>,
) -> Result<Vec<Recommendation>, ProfileError> {
    let categories = evaluate_rules(rules, profile, now)?;
    let mut best: BTreeMap<String, Recommendation> = BTreeMap::new();
    let mut offer = |rec: Recommendation| match best.get(&rec.instance_id) {
        Some(existing) if existing.rank <= rec.rank => {}
        _ => {
            best.insert(rec.instance_id.clone(), rec);
        }
    };

    for query in profile.saved_queries.iter().filter(|q| q.is_valid_at(now)) {
        match match_all(taxonomy, &query.demand, resources) {
            Ok(scores) => {
                for s in scores {
                    offer(Recommendation {
                        instance_id: s.instance_id,
                        source: RecommendationSource::SavedQuery(query.query_id.clone()),
                        rank: s.rank,
                    });
                }
            }
            Err(e) => tracing::warn!(query = %query.query_id, error = %e, "saved query could not be replayed"),
        }
    }
    for resource in resources {
        if let Some(category) = resource.categories.intersection(&categories).next() {
            offer(Recommendation {
                instance_id: resource.id.clone(),
                source: RecommendationSource::Category(category.clone()),
                rank: 1.0,
            });
        }
    }

    let mut out: Vec<Recommendation> = best.into_values().collect();
    out.sort_by(|a, b| a.rank.total_cmp(&b.rank).then_with(|| a.instance_id.cmp(&b.instance_id)));
    Ok(out)
}

/// Drops saved queries whose validity ended before `now`.
pub fn expire_queries(mut profile: UserProfile, now: DateTime<Utc>) -> UserProfile {
    profile.saved_queries.retain(|q| q.is_valid_at(now));
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ResourcePublished,
    UserLogin,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    /// Instance id for publications, user id for logins.
    pub payload: String,
    pub at: DateTime<Utc>,
}

impl EventRecord {
    pub fn published(instance_id: impl Into<String>, at: DateTime<Utc>) -> Self {
        Self { kind: EventKind::ResourcePublished, payload: instance_id.into(), at }
    }

    pub fn key(&self) -> String {
        format!("{:?}:{}:{}", self.kind, self.payload, self.at.to_rfc3339())
    }
}

/// A PUSH notification waiting in a user's inbox.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InboxEntry {
    pub query_id: String,
    pub event_at: DateTime<Utc>,
    pub counts: RawMatch,
    pub instance: Instance,
}

/// Matches a newly published instance against every valid saved query and
/// returns one inbox entry per non-conflicting (`n_par = 0`) match.
pub fn on_resource_published(
    event: &EventRecord,
    instance: &Instance,
    profiles: &[UserProfile],
    taxonomy: &Taxonomy,
) -> Vec<(String, InboxEntry)> {
    if event.kind != EventKind::ResourcePublished || event.payload != instance.id {
        return Vec::new();
    }
    let mut cache = ComparisonCache::new();
    let mut out = Vec::new();
    for profile in profiles {
        for query in profile.saved_queries.iter().filter(|q| q.is_valid_at(event.at)) {
            match match_one(taxonomy, &query.demand, instance, &mut cache) {
                Ok(counts) if counts.n_par == 0.0 => out.push((
                    profile.user_id.clone(),
                    InboxEntry {
                        query_id: query.query_id.clone(),
                        event_at: event.at,
                        counts,
                        instance: instance.clone(),
                    },
                )),
                Ok(_) => {}
                Err(e) => {
                    tracing::warn!(user = %profile.user_id, query = %query.query_id, error = %e, "publication not matched")
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchmaker::Constraint;
    use crate::ontology::parse_ontology;
    use chrono::{Duration, TimeZone};

    fn now() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2026, 5, 1, 12, 0, 0).unwrap()
    }

    fn student_rule() -> Rule {
        Rule {
            name: "young".into(),
            conditions: vec![Condition::new("age", RuleOp::Lt, 30)],
            category: "Student".into(),
        }
    }

    fn laptops() -> (Vec<Instance>, Taxonomy) {
        let doc = parse_ontology(include_str!("../../fixtures/laptops.onto.json")).unwrap();
        (doc.instances, Taxonomy::build(&doc.schema).unwrap())
    }

    fn white_query(valid_until: DateTime<Utc>) -> SavedQuery {
        SavedQuery {
            query_id: "white".into(),
            demand: Demand::new("Laptop", "u")
                .with(Constraint::eq("colour", "white"))
                .with(Constraint::ge("warrantyYears", 2)),
            valid_until,
        }
    }

    #[test]
    fn single_condition_rule() {
        let p = UserProfile::new("u").with_attribute("age", 25);
        assert_eq!(evaluate_rules(&[student_rule()], &p, now()).unwrap(), BTreeSet::from(["Student".to_string()]));
        assert!(evaluate_rules(&[], &p, now()).unwrap().is_empty());
    }

    #[test]
    fn age_derived_from_birthdate() {
        let p = UserProfile::new("u").with_attribute("birthdate", "1997-05-02");
        let birthday_eve = Utc.with_ymd_and_hms(2027, 5, 1, 23, 59, 59).unwrap();
        assert!(evaluate_rules(&[student_rule()], &p, now()).unwrap().contains("Student"));
        assert!(evaluate_rules(&[student_rule()], &p, birthday_eve).unwrap().contains("Student"));
        let birthday = Utc.with_ymd_and_hms(2027, 5, 2, 0, 0, 0).unwrap();
        assert!(evaluate_rules(&[student_rule()], &p, birthday).unwrap().is_empty());
    }

    #[test]
    fn type_mismatch_is_error() {
        let p = UserProfile::new("u").with_attribute("age", "young");
        assert!(matches!(evaluate_rules(&[student_rule()], &p, now()), Err(ProfileError::TypeMismatch { .. })));
    }

    #[test]
    fn missing_attribute_does_not_hold() {
        assert!(evaluate_rules(&[student_rule()], &UserProfile::new("u"), now()).unwrap().is_empty());
    }

    #[test]
    fn rule_validation() {
        let profiler = OntologySchema {
            uri: "urn:profiler".into(),
            keywords: vec![],
            classes: vec![crate::ontology::ClassDef::new(PROFILE_CLASS)],
            properties: vec![crate::ontology::PropertyDef::datatype("birthdate", crate::ontology::DatatypeRange::Text)],
        };
        assert!(validate_rules(&[student_rule()], &profiler).is_ok());
        let bad = Rule {
            name: "r".into(),
            conditions: vec![Condition::new("salary", RuleOp::Gt, 1)],
            category: "Rich".into(),
        };
        assert!(validate_rules(&[bad], &profiler).is_err());
        let empty = Rule { name: "e".into(), conditions: vec![], category: "All".into() };
        assert!(validate_rules(&[empty], &profiler).is_err());
    }

    #[test]
    fn login_category_match() {
        let (_, t) = laptops();
        let resources =
            vec![Instance::new("Laptop#9", "Laptop").with_category("Student"), Instance::new("Laptop#8", "Laptop")];
        let p = UserProfile::new("u").with_attribute("age", 25);
        let recs = on_login(&p, &[student_rule()], &resources, &t, now()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].instance_id, "Laptop#9");
        assert_eq!(recs[0].source, RecommendationSource::Category("Student".into()));
    }

    #[test]
    fn login_replays_valid_queries_only() {
        let (laptops, t) = laptops();
        let valid = UserProfile::new("u").with_query(white_query(now() + Duration::days(1)));
        let recs = on_login(&valid, &[], &laptops, &t, now()).unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.instance_id.as_str()).collect();
        assert_eq!(ids, ["Laptop#1", "Laptop#2", "Laptop#3", "Laptop#4"]);

        let expired = UserProfile::new("u").with_query(white_query(now() - Duration::days(1)));
        assert!(on_login(&expired, &[], &laptops, &t, now()).unwrap().is_empty());
        assert!(on_login(&UserProfile::new("u"), &[], &laptops, &t, now()).unwrap().is_empty());
    }

    #[test]
    fn login_dedup_keeps_better_rank() {
        let (mut laptops, t) = laptops();
        laptops[0].categories.insert("Student".into());
        let p = UserProfile::new("u").with_attribute("age", 20).with_query(white_query(now() + Duration::days(1)));
        let recs = on_login(&p, &[student_rule()], &laptops, &t, now()).unwrap();
        assert_eq!(recs.len(), 4);
        let first = recs.iter().find(|r| r.instance_id == "Laptop#1").unwrap();
        assert_eq!(first.source, RecommendationSource::SavedQuery("white".into()));
        assert_eq!(first.rank, 0.0);
    }

    #[test]
    fn publication_triggers() {
        let (_, t) = laptops();
        let profiles = vec![UserProfile::new("alice").with_query(white_query(now() + Duration::days(1)))];
        let white = Instance::new("new", "Laptop").with_value("colour", "white").with_value("warrantyYears", 2i64);
        let hits = on_resource_published(&EventRecord::published("new", now()), &white, &profiles, &t);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, "alice");

        let black = Instance::new("blk", "Laptop").with_value("colour", "black").with_value("warrantyYears", 2i64);
        assert!(on_resource_published(&EventRecord::published("blk", now()), &black, &profiles, &t).is_empty());

        let late = EventRecord::published("new", now() + Duration::days(2));
        assert!(on_resource_published(&late, &white, &profiles, &t).is_empty());
    }

    #[test]
    fn expiry() {
        let p = UserProfile::new("u")
            .with_query(white_query(now() + Duration::days(1)))
            .with_query(SavedQuery { query_id: "old".into(), ..white_query(now() - Duration::seconds(1)) });
        let pruned = expire_queries(p.clone(), now());
        assert_eq!(pruned.saved_queries.len(), 1);
        assert_eq!(pruned.saved_queries[0].query_id, "white");
        assert!(expire_queries(p, now() + Duration::days(3)).saved_queries.is_empty());
    }
}
