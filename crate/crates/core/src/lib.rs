pub mod bench;
pub mod cli;
pub mod matchmaker;
pub mod net;
pub mod ontology;
pub mod presentation;
pub mod profile;
pub mod registry;
