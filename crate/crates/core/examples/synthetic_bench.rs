//! Times centralized matchmaking on the four reference ontology shapes with
//! queries of one to four properties, then a small distributed run.
//!
//! `cargo run --release --example synthetic_bench`

use ontomatch::bench::{render_table, run_centralized, run_distributed, BenchSpec, OntologyProfile};
use ontomatch::net::FanoutMode;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, profile) in OntologyProfile::NAMED {
        let rows = run_centralized(&BenchSpec::centralized(profile, 1000, vec![1, 2, 3, 4]))?;
        println!("{name}\n{}", render_table(&rows));
    }
    let spec = BenchSpec {
        peers: 3,
        mode: FanoutMode::Async,
        inject_delays_ms: vec![10, 20, 30],
        ..BenchSpec::centralized(OntologyProfile::BOOKS, 900, vec![1, 4])
    };
    println!("books over 3 peers, async\n{}", render_table(&run_distributed(&spec).await?));
    Ok(())
}
