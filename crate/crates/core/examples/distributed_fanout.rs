//! Two providers share one TBox but hold different laptops. A registry
//! lookup finds them, the demand is fanned out in both modes, and the merged
//! ranking is shown with provenance and the timing breakdown.
//!
//! `cargo run --example distributed_fanout`

use std::sync::Arc;

use chrono::Utc;
use ontomatch::matchmaker::{Constraint, Demand};
use ontomatch::net::{
    fanout, serve_provider, serve_registry, FanoutMode, FanoutPlan, PeerClient, ProviderConfig, ProviderNode,
    ProviderTarget,
};
use ontomatch::ontology::parse_ontology;
use ontomatch::presentation::{provider_sections, render_text_providers};
use ontomatch::profile::ProfileStore;
use ontomatch::registry::{Registration, Registry};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = serve_registry(Registry::in_memory(), "127.0.0.1:0").await?;
    let client = PeerClient::new();
    let mut providers = Vec::new();
    for (id, source) in [
        ("peer-a", include_str!("../fixtures/laptops_peer_a.onto.json")),
        ("peer-b", include_str!("../fixtures/laptops_peer_b.onto.json")),
    ] {
        let doc = parse_ontology(source)?;
        let keywords = doc.schema.keywords.clone();
        let uri = doc.schema.uri.clone();
        let config = ProviderConfig { provider_id: id.into(), ..Default::default() };
        let node = Arc::new(ProviderNode::new(config, doc, ProfileStore::in_memory())?);
        let handle = serve_provider(node.clone(), "127.0.0.1:0").await?;
        client
            .register(&registry.address(), &Registration::new(uri, keywords, node.fingerprint(), handle.address()))
            .await?;
        providers.push(handle);
    }

    let entries = client.search(&registry.address(), &["laptop".to_string()]).await?;
    println!("discovered {} providers at {}", entries.len(), Utc::now().format("%H:%M:%S"));
    let targets: Vec<ProviderTarget> = entries
        .iter()
        .map(|e| ProviderTarget::new(&e.provider_address).with_fingerprint(&e.tbox_fingerprint))
        .collect();

    let demand = Demand::new("Laptop", "http://shopping.example.org/computer.owl")
        .with(Constraint::eq("colour", "white"))
        .with(Constraint::ge("warrantyYears", 2));
    for mode in [FanoutMode::Sync, FanoutMode::Async] {
        let plan = FanoutPlan { providers: targets.clone(), mode, per_request_timeout_ms: 5_000 };
        let outcome = fanout(&client, &plan, &demand).await?;
        println!("\n== {} fan-out ==", mode.as_str());
        print!("{}", render_text_providers(&provider_sections(&outcome.merged.entries, &outcome.merged.providers)));
        for t in &outcome.timing.per_provider {
            println!("{}: matchmaking {:.3} ms, latency {:.3} ms", t.provider_id, t.matchmaking_ms, t.latency_ms);
        }
        println!("merge {:.3} ms, total {:.3} ms", outcome.timing.merge_ms, outcome.timing.total_wall_ms);
    }
    for p in providers {
        p.shutdown().await;
    }
    registry.shutdown().await;
    Ok(())
}
