//! How constraint confidence scales a conflict, and how the two rank
//! compositions treat elicitable properties.
//!
//! `cargo run --example confidence_weights`

use ontomatch::matchmaker::{
    match_all_with, match_one, ComparisonCache, Confidence, Constraint, Demand, RankComposition,
};
use ontomatch::ontology::{parse_ontology, Taxonomy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_ontology(include_str!("../fixtures/laptops.onto.json"))?;
    let taxonomy = Taxonomy::build(&doc.schema)?;
    let laptop = &doc.instances[0];

    println!("{} is {}; demanding black at each confidence level:", laptop.id, laptop.values["colour"][0]);
    for level in [1, 3, 5, 10] {
        let demand = Demand::new("Laptop", &doc.schema.uri)
            .with(Constraint::eq("colour", "black").with_confidence(Confidence::new(level)?));
        let raw = match_one(&taxonomy, &demand, laptop, &mut ComparisonCache::new())?;
        println!("  confidence {level:>2}: n_par = {}", raw.n_par);
    }

    let demand = Demand::new("Laptop", &doc.schema.uri).with(Constraint::eq("colour", "white"));
    for composition in [RankComposition::AdditionalAsBonus, RankComposition::AdditionalAsPenalty] {
        let scores = match_all_with(&taxonomy, &demand, &doc.instances, composition)?;
        let order: Vec<String> = scores.iter().map(|s| format!("{} ({:.3})", s.instance_id, s.rank)).collect();
        println!("{composition:?}: {}", order.join(", "));
    }
    Ok(())
}
