//! The refinement loop: expand a result, pick one of its elicited values as
//! a new equality constraint, and re-run the query.
//!
//! `cargo run --example query_refinement`

use ontomatch::matchmaker::{match_all, Constraint, Demand};
use ontomatch::ontology::{parse_ontology, Taxonomy};
use ontomatch::presentation::{group_by_additional, render_flat, render_text_grouped, GroupOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_ontology(include_str!("../fixtures/laptops.onto.json"))?;
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let mut demand = Demand::new("Laptop", &doc.schema.uri)
        .with(Constraint::eq("colour", "white"))
        .with(Constraint::ge("warrantyYears", 2));

    let show = |demand: &Demand,
                title: &str|
     -> Result<Vec<ontomatch::presentation::ResultEntry>, Box<dyn std::error::Error>> {
        let scores = match_all(&taxonomy, demand, &doc.instances)?;
        let entries = render_flat(&scores, &doc.instances);
        println!("{title}\n{}", "-".repeat(title.len()));
        print!("{}", render_text_grouped(&group_by_additional(&entries, GroupOrder::Desc)));
        Ok(entries)
    };

    let first = show(&demand, "Initial query")?;
    let top = first[0].instance.as_ref().expect("results carry their instance");
    let picked = top.values["operatingSystem"][0].clone();
    println!("\nclicked operatingSystem = {picked} on {}\n", top.id);
    demand = demand.with(Constraint::eq("operatingSystem", picked));

    let refined = show(&demand, "Refined query")?;
    for e in refined.iter().filter(|e| e.score.n_par > 0.0) {
        println!("{} now conflicts with the demand (n_par {})", e.score.instance_id, e.score.n_par);
    }
    Ok(())
}
