//! Ranks the four-laptop catalogue against "white, warranty of at least two
//! years" and shows the flat and grouped views.
//!
//! `cargo run --example laptop_golden`

use ontomatch::matchmaker::{match_all, Constraint, Demand};
use ontomatch::ontology::{parse_ontology, Taxonomy};
use ontomatch::presentation::{group_by_additional, render_flat, render_text_flat, render_text_grouped, GroupOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_ontology(include_str!("../fixtures/laptops.onto.json"))?;
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let demand = Demand::new("Laptop", &doc.schema.uri)
        .with(Constraint::eq("colour", "white"))
        .with(Constraint::ge("warrantyYears", 2));

    let scores = match_all(&taxonomy, &demand, &doc.instances)?;
    let entries = render_flat(&scores, &doc.instances);
    println!("Flat ranking\n============\n{}", render_text_flat(&entries));
    println!("Grouped by elicitable properties\n================================");
    print!("{}", render_text_grouped(&group_by_additional(&entries, GroupOrder::Desc)));
    Ok(())
}
