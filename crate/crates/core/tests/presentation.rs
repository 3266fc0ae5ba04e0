mod common;

use std::collections::BTreeSet;

use common::*;
use ontomatch::matchmaker::{match_all, match_one, ComparisonCache};
use ontomatch::ontology::tbox_fingerprint;
use ontomatch::presentation::*;
use proptest::prelude::*;
use rand::Rng;

fn sig(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn golden_groups_desc() {
    let doc = laptops();
    let t = ontomatch::ontology::Taxonomy::build(&doc.schema).unwrap();
    let scores = match_all(&t, &white_laptop_demand(), &doc.instances).unwrap();
    let grouped = group_by_additional(&render_flat(&scores, &doc.instances), GroupOrder::Desc);
    let shape: Vec<(BTreeSet<String>, Vec<String>)> = grouped
        .groups
        .iter()
        .map(|g| (g.signature.clone(), g.members.iter().map(|m| m.score.instance_id.clone()).collect()))
        .collect();
    assert_eq!(
        shape,
        vec![
            (sig(&["cost", "hasSerialNumber", "model", "operatingSystem"]), vec!["Laptop#1".into(), "Laptop#2".into()]),
            (sig(&["cost", "model", "operatingSystem"]), vec!["Laptop#3".into(), "Laptop#4".into()]),
        ]
    );
    let text = render_text_grouped(&grouped);
    assert!(text.starts_with("Group#1 (cost, hasSerialNumber, model, operatingSystem)\n-----\nLaptop#1"));
    assert!(text.ends_with("4 results\n"));
}

#[test]
fn grouped_json_shape() {
    let doc = laptops();
    let t = ontomatch::ontology::Taxonomy::build(&doc.schema).unwrap();
    let scores = match_all(&t, &white_laptop_demand(), &doc.instances).unwrap();
    let json = serde_json::to_value(group_by_additional(&scores, GroupOrder::Asc)).unwrap();
    assert_eq!(json["groups"][0]["signature"], serde_json::json!(["cost", "model", "operatingSystem"]));
    assert_eq!(json["groups"][0]["members"][0]["instance_id"], "Laptop#3");
    assert_eq!(json["order_mode"], "asc");
}

#[test]
fn merge_rejects_duplicate_instance() {
    let doc = laptops();
    let t = ontomatch::ontology::Taxonomy::build(&doc.schema).unwrap();
    let counts = match_one(&t, &white_laptop_demand(), &doc.instances[0], &mut ComparisonCache::new()).unwrap();
    let raw = RawResult { counts, instance: doc.instances[0].clone() };
    let batch = ProviderBatch {
        provider: ProvenanceTag::new("a", "u"),
        tbox_fingerprint: "sha256:1".into(),
        results: vec![raw.clone(), raw],
    };
    assert!(matches!(merge_multi_provider(vec![batch]), Err(PresentationError::DuplicateEntry { .. })));
}

#[test]
fn merge_rejects_foreign_tbox() {
    let batch = |provider: &str, fp: &str| ProviderBatch {
        provider: ProvenanceTag::new(provider, "u"),
        tbox_fingerprint: fp.into(),
        results: vec![],
    };
    match merge_multi_provider(vec![batch("a", "sha256:1"), batch("b", "sha256:2")]) {
        Err(PresentationError::FingerprintMismatch { provider_id, .. }) => assert_eq!(provider_id, "b"),
        other => panic!("{other:?}"),
    }
}

fn batches_for(seed: u64) -> (Vec<ProviderBatch>, Vec<ontomatch::matchmaker::MatchScore>) {
    let mut r = rng(seed);
    let (schema, t) = random_schema(&mut r, 10, 8);
    let supplies = random_supplies(&mut r, &schema, 20);
    let demand = random_demand(&mut r, &schema, 6);
    let k = r.random_range(2..=4);
    let fp = tbox_fingerprint(&schema);
    let mut batches: Vec<ProviderBatch> = (0..k)
        .map(|i| ProviderBatch {
            provider: ProvenanceTag::new(format!("p{i}"), "u"),
            tbox_fingerprint: fp.clone(),
            results: vec![],
        })
        .collect();
    let mut cache = ComparisonCache::new();
    for s in &supplies {
        let counts = match_one(&t, &demand, s, &mut cache).unwrap();
        batches[r.random_range(0..k)].results.push(RawResult { counts, instance: s.clone() });
    }
    (batches, match_all(&t, &demand, &supplies).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn merged_equals_centralized(seed in any::<u64>()) {
        let (batches, centralized) = batches_for(seed);
        let merged = merge_multi_provider(batches).unwrap();
        prop_assert_eq!(merged.scores(), centralized);
        prop_assert!(merged.entries.iter().all(|e| e.provenance.is_some() && e.instance.is_some()));
    }

    #[test]
    fn grouping_is_a_partition(seed in any::<u64>(), desc in any::<bool>()) {
        let (_, scores) = batches_for(seed);
        let order = if desc { GroupOrder::Desc } else { GroupOrder::Asc };
        let grouped = group_by_additional(&scores, order);
        prop_assert_eq!(grouped.member_count(), scores.len());
        let signatures: BTreeSet<_> = grouped.groups.iter().map(|g| g.signature.clone()).collect();
        prop_assert_eq!(signatures.len(), grouped.groups.len());
        for g in &grouped.groups {
            prop_assert!(!g.members.is_empty());
            for m in &g.members {
                prop_assert_eq!(&m.additional_properties, &g.signature);
            }
            let positions: Vec<usize> = g.members.iter().map(|m| scores.iter().position(|s| s == m).unwrap()).collect();
            prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        }
        for w in grouped.groups.windows(2) {
            let (a, b) = (w[0].signature.len(), w[1].signature.len());
            let ordered = if desc { a >= b } else { a <= b };
            prop_assert!(ordered);
        }
    }
}
