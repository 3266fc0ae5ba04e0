use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cache::ComparisonCache;
use super::constraint::satisfies;
use super::demand::Demand;
use super::MatchError;
use crate::ontology::{Instance, Taxonomy};

/// Unnormalized counters for one supply against one demand.
///
/// This is what providers ship over the wire: counters are comparable across
/// providers, normalized ranks are not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMatch {
    pub instance_id: String,
    pub n_par: f64,
    pub n_pot: f64,
    pub n_add: usize,
    pub additional_properties: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub instance_id: String,
    pub n_par: f64,
    pub n_pot: f64,
    pub n_add: usize,
    pub additional_properties: BTreeSet<String>,
    pub rank_par: f64,
    pub rank_pot: f64,
    pub rank_add: f64,
    pub rank: f64,
}

/// How the elicitation component enters the unified rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankComposition {
    /// More additional properties is better: contributes `1 - rank_add`.
    #[default]
    AdditionalAsBonus,
    /// More additional properties is worse: contributes `rank_add`.
    AdditionalAsPenalty,
}

/// Scores one supply.
///
/// Conflicts (disjoint concept, asserted values of which none satisfy a
/// constraint) add the confidence weight to `n_par`. Requirements the supply
/// neither meets nor contradicts (concept not subsumed, property absent) add
/// one to `n_pot`. Asserted properties the demand does not mention are the
/// elicitable ones and make up `n_add`.
pub fn match_one(
    taxonomy: &Taxonomy,
    demand: &Demand,
    supply: &Instance,
    cache: &mut ComparisonCache,
) -> Result<RawMatch, MatchError> {
    let demanded = taxonomy.class_id(&demand.concept).ok_or_else(|| {
        MatchError::SchemaMismatch(format!("demand concept `{}` is not in the taxonomy", demand.concept))
    })?;
    let offered = taxonomy.class_id(&supply.class_name).ok_or_else(|| {
        MatchError::SchemaMismatch(format!(
            "supply `{}` has class `{}` outside the taxonomy",
            supply.id, supply.class_name
        ))
    })?;

    // Conflict weight in tenths of a unit.
    let mut par_tenths: u32 = 0;
    let mut pot: u32 = 0;

    if cache.disjoint(taxonomy, offered, demanded) {
        par_tenths += demand.concept_confidence.tenths();
    } else if !taxonomy.subsumes_id(offered, demanded) {
        pot += 1;
    }

    for constraint in &demand.constraints {
        match supply.values.get(&constraint.property).filter(|v| !v.is_empty()) {
            None => pot += 1,
            Some(values) => {
                let mut any = false;
                for v in values {
                    if satisfies(constraint, v)? {
                        any = true;
                        break;
                    }
                }
                if !any {
                    par_tenths += constraint.confidence.tenths();
                }
            }
        }
    }

    let additional_properties: BTreeSet<String> = supply
        .asserted_properties()
        .filter(|name| !demand.constraints.iter().any(|c| c.property == *name))
        .map(str::to_owned)
        .collect();

    Ok(RawMatch {
        instance_id: supply.id.clone(),
        n_par: f64::from(par_tenths) / 10.0,
        n_pot: f64::from(pot),
        n_add: additional_properties.len(),
        additional_properties,
    })
}

/// Scores and ranks all supplies; lower rank is a better match.
pub fn match_all(taxonomy: &Taxonomy, demand: &Demand, supplies: &[Instance]) -> Result<Vec<MatchScore>, MatchError> {
    match_all_with(taxonomy, demand, supplies, RankComposition::default())
}

pub fn match_all_with(
    taxonomy: &Taxonomy,
    demand: &Demand,
    supplies: &[Instance],
    composition: RankComposition,
) -> Result<Vec<MatchScore>, MatchError> {
    let mut cache = ComparisonCache::new();
    let raws = supplies.iter().map(|s| match_one(taxonomy, demand, s, &mut cache)).collect::<Result<Vec<_>, _>>()?;
    let mut scores = normalize(&raws, composition);
    sort_scores(&mut scores);
    Ok(scores)
}

/// Normalizes each counter by its maximum over the batch and composes the
/// unified rank. Output order follows the input.
pub fn normalize(raws: &[RawMatch], composition: RankComposition) -> Vec<MatchScore> {
    let max_par = raws.iter().map(|r| r.n_par).fold(0.0, f64::max);
    let max_pot = raws.iter().map(|r| r.n_pot).fold(0.0, f64::max);
    let max_add = raws.iter().map(|r| r.n_add).max().unwrap_or(0);
    let ratio = |n: f64, max: f64| if max != 0.0 { n / max } else { 0.0 };

    raws.iter()
        .map(|r| {
            let rank_par = ratio(r.n_par, max_par);
            let rank_pot = ratio(r.n_pot, max_pot);
            let rank_add = ratio(r.n_add as f64, max_add as f64);
            let add_term = match (max_add, composition) {
                (0, _) => 0.0,
                (_, RankComposition::AdditionalAsBonus) => 1.0 - rank_add,
                (_, RankComposition::AdditionalAsPenalty) => rank_add,
            };
            MatchScore {
                instance_id: r.instance_id.clone(),
                n_par: r.n_par,
                n_pot: r.n_pot,
                n_add: r.n_add,
                additional_properties: r.additional_properties.clone(),
                rank_par,
                rank_pot,
                rank_add,
                rank: (rank_par + rank_pot + add_term) / 3.0,
            }
        })
        .collect()
}

/// Ascending rank, ties by instance id.
pub fn rank_order(a: &MatchScore, b: &MatchScore) -> Ordering {
    a.rank.total_cmp(&b.rank).then_with(|| a.instance_id.cmp(&b.instance_id))
}

pub fn sort_scores(scores: &mut [MatchScore]) {
    scores.sort_by(rank_order);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchmaker::{Confidence, Constraint};
    use crate::ontology::{parse_ontology, OntologyDocument};

    fn laptops() -> (OntologyDocument, Taxonomy) {
        let doc = parse_ontology(include_str!("../../fixtures/laptops.onto.json")).unwrap();
        let t = Taxonomy::build(&doc.schema).unwrap();
        (doc, t)
    }

    fn white_warranty() -> Demand {
        Demand::new("Laptop", "u").with(Constraint::eq("colour", "white")).with(Constraint::ge("warrantyYears", 2))
    }

    #[test]
    fn laptop1_counters() {
        let (doc, t) = laptops();
        let r = match_one(&t, &white_warranty(), &doc.instances[0], &mut ComparisonCache::new()).unwrap();
        assert_eq!((r.n_par, r.n_pot, r.n_add), (0.0, 0.0, 4));
        let expected: BTreeSet<String> =
            ["cost", "hasSerialNumber", "model", "operatingSystem"].map(String::from).into();
        assert_eq!(r.additional_properties, expected);
    }

    #[test]
    fn laptop3_counters() {
        let (doc, t) = laptops();
        let r = match_one(&t, &white_warranty(), &doc.instances[2], &mut ComparisonCache::new()).unwrap();
        assert_eq!((r.n_par, r.n_pot, r.n_add), (0.0, 0.0, 3));
        assert!(!r.additional_properties.contains("hasSerialNumber"));
    }

    #[test]
    fn no_constraints_counts_every_property() {
        let (doc, t) = laptops();
        let r = match_one(&t, &Demand::new("Laptop", "u"), &doc.instances[0], &mut ComparisonCache::new()).unwrap();
        assert_eq!((r.n_par, r.n_pot, r.n_add), (0.0, 0.0, 6));
    }

    #[test]
    fn weighted_conflict() {
        let (doc, t) = laptops();
        let d = Demand::new("Laptop", "u")
            .with(Constraint::eq("colour", "black").with_confidence(Confidence::new(3).unwrap()));
        let r = match_one(&t, &d, &doc.instances[0], &mut ComparisonCache::new()).unwrap();
        assert_eq!(r.n_par, 0.3);
    }

    #[test]
    fn absent_property_is_potential() {
        let (doc, t) = laptops();
        let d = Demand::new("Laptop", "u").with(Constraint::eq("hasSerialNumber", "X"));
        let r = match_one(&t, &d, &doc.instances[3], &mut ComparisonCache::new()).unwrap();
        assert_eq!((r.n_par, r.n_pot), (0.0, 1.0));
    }

    #[test]
    fn unknown_supply_class() {
        let (_, t) = laptops();
        let err =
            match_one(&t, &white_warranty(), &Instance::new("x", "Tablet"), &mut ComparisonCache::new()).unwrap_err();
        assert!(matches!(err, MatchError::SchemaMismatch(_)));
    }

    #[test]
    fn golden_order_and_ranks() {
        let (doc, t) = laptops();
        let scores = match_all(&t, &white_warranty(), &doc.instances).unwrap();
        let ids: Vec<_> = scores.iter().map(|s| s.instance_id.as_str()).collect();
        assert_eq!(ids, ["Laptop#1", "Laptop#2", "Laptop#3", "Laptop#4"]);
        assert_eq!(scores[0].rank, 0.0);
        assert_eq!(scores[1].rank, 0.0);
        assert!((scores[2].rank - 0.25 / 3.0).abs() < 1e-12);
        assert!((scores[3].rank - 0.25 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn penalty_composition_inverts_order() {
        let (doc, t) = laptops();
        let scores =
            match_all_with(&t, &white_warranty(), &doc.instances, RankComposition::AdditionalAsPenalty).unwrap();
        assert_eq!(scores[0].instance_id, "Laptop#3");
    }

    #[test]
    fn perfect_singleton() {
        let (_, t) = laptops();
        let supply = Instance::new("only", "Laptop").with_value("colour", "white");
        let d = Demand::new("Laptop", "u").with(Constraint::eq("colour", "white"));
        let s = match_all(&t, &d, &[supply]).unwrap();
        assert_eq!((s[0].n_par, s[0].n_pot, s[0].n_add, s[0].rank), (0.0, 0.0, 0, 0.0));
    }

    #[test]
    fn empty_supplies() {
        let (_, t) = laptops();
        assert!(match_all(&t, &white_warranty(), &[]).unwrap().is_empty());
    }
}
