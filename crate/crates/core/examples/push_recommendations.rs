//! Profile rules, saved queries and publication events: the login
//! recommendations and the inbox notification a new resource triggers.
//!
//! `cargo run --example push_recommendations`

use chrono::{Duration, Utc};
use ontomatch::matchmaker::{Constraint, Demand};
use ontomatch::ontology::{parse_ontology, Instance, Taxonomy};
use ontomatch::profile::{
    on_login, on_resource_published, validate_rules, EventRecord, ProfileStore, Rule, SavedQuery, UserProfile,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_ontology(include_str!("../fixtures/laptops.onto.json"))?;
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let profiler = parse_ontology(include_str!("../fixtures/profiler.onto.json"))?;
    let rules: Vec<Rule> = serde_json::from_str(include_str!("../fixtures/student.rules.json"))?;
    validate_rules(&rules, &profiler.schema)?;

    let now = Utc::now();
    let mut store = ProfileStore::in_memory();
    store.set_rules(rules)?;
    store.upsert_profile(UserProfile::new("ana").with_attribute("age", 24))?;
    store.upsert_profile(UserProfile::new("ben").with_attribute("birthdate", "2003-06-30"))?;
    let cheap_white = Demand::new("Laptop", &doc.schema.uri)
        .with(Constraint::eq("colour", "white"))
        .with(Constraint::new("cost", ontomatch::matchmaker::ConstraintOp::Lt, 500));
    store.save_query(
        "ana",
        SavedQuery { query_id: "cheap-white".into(), demand: cheap_white, valid_until: now + Duration::days(30) },
        now,
    )?;

    let fresh: Instance =
        serde_json::from_str::<Instance>(include_str!("../fixtures/new_laptop.instance.json"))?.coerce(&doc.schema);
    let profiles: Vec<UserProfile> = store.profiles().cloned().collect();
    for (user, entry) in on_resource_published(&EventRecord::published(&fresh.id, now), &fresh, &profiles, &taxonomy) {
        if store.deliver(&user, entry)? {
            println!("pushed {} to {user}", fresh.id);
        }
    }
    for entry in store.inbox("ana") {
        println!("inbox of ana: {} via query {}", entry.instance.id, entry.query_id);
    }

    let mut catalogue = doc.instances.clone();
    catalogue.push(fresh);
    for user in store.profiles() {
        for rec in on_login(user, store.rules(), &catalogue, &taxonomy, now)? {
            println!("{} login: {} ({:?}, rank {:.3})", user.user_id, rec.instance_id, rec.source, rec.rank);
        }
    }
    Ok(())
}
