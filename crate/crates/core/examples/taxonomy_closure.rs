//! Builds a small taxonomy and queries subsumption, equivalence and the
//! downward-propagated disjointness; also shows the rejected schemas.
//!
//! `cargo run --example taxonomy_closure`

use ontomatch::ontology::{tbox_fingerprint, ClassDef, OntologySchema, Taxonomy};

fn schema(classes: Vec<ClassDef>) -> OntologySchema {
    OntologySchema { uri: "urn:example:computers".into(), classes, ..Default::default() }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let computers = schema(vec![
        ClassDef::new("Computer"),
        ClassDef::new("Laptop").subclass("Computer").equivalent("Notebook").disjoint("Desktop"),
        ClassDef::new("Notebook"),
        ClassDef::new("Desktop").subclass("Computer"),
        ClassDef::new("Netbook").subclass("Laptop"),
        ClassDef::new("Workstation").subclass("Desktop"),
    ]);
    let t = Taxonomy::build(&computers)?;
    for (a, b) in [("Netbook", "Computer"), ("Notebook", "Computer"), ("Computer", "Laptop")] {
        println!("{a} subsumed by {b}: {}", t.subsumes(a, b)?);
    }
    println!("Laptop equivalents: {:?}", t.equivalents("Laptop")?);
    for (a, b) in [("Netbook", "Workstation"), ("Notebook", "Desktop"), ("Netbook", "Laptop")] {
        println!("{a} disjoint with {b}: {}", t.disjoint(a, b)?);
    }
    println!("fingerprint: {}", tbox_fingerprint(&computers));

    let cyclic = schema(vec![ClassDef::new("A").subclass("B"), ClassDef::new("B").subclass("A")]);
    println!("cyclic schema: {}", Taxonomy::build(&cyclic).unwrap_err());
    let inconsistent =
        schema(vec![ClassDef::new("Computer"), ClassDef::new("Laptop").subclass("Computer").disjoint("Computer")]);
    println!("inconsistent schema: {}", Taxonomy::build(&inconsistent).unwrap_err());
    Ok(())
}
