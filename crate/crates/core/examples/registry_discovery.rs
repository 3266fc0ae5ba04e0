//! Runs a registry on loopback, registers two ontologies over HTTP and
//! discovers them by keyword.
//!
//! `cargo run --example registry_discovery`

use ontomatch::net::{serve_registry, PeerClient};
use ontomatch::registry::{Registration, Registry};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = serve_registry(Registry::in_memory(), "127.0.0.1:0").await?;
    let client = PeerClient::new();
    let address = registry.address();
    println!("registry listening on {address}");

    for (uri, keywords, provider) in [
        ("http://peer-a.example.org/computer.owl", vec!["computer", "Laptop"], "127.0.0.1:7101"),
        ("http://egov.example.org/payments.owl", vec!["egov", "tax"], "127.0.0.1:7102"),
    ] {
        let reply = client.register(&address, &Registration::new(uri, keywords, "sha256:demo", provider)).await?;
        println!("{:?}: {}", reply.ack, reply.entry.ontology_uri);
    }
    for keywords in [vec!["laptop".to_string()], vec!["TAX".into(), "wine".into()], vec!["wine".into()]] {
        let hits = client.search(&address, &keywords).await?;
        let uris: Vec<&str> = hits.iter().map(|e| e.ontology_uri.as_str()).collect();
        println!("search {keywords:?}: {uris:?}");
    }
    client.deregister(&address, "http://egov.example.org/payments.owl").await?;
    println!("after deregistration: {} entries", client.search(&address, &[]).await?.len());
    registry.shutdown().await;
    Ok(())
}
