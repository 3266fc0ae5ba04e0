//! Naive (flat) and Grouping renderings of ranked results, provenance
//! tagging, and the multi-provider merge.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matchmaker::{normalize, rank_order, MatchScore, RankComposition, RawMatch};
use crate::ontology::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Naive,
    Grouping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GroupOrder {
    /// Fewest additional properties first.
    #[default]
    Asc,
    /// Most additional properties first.
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProvenanceTag {
    pub provider_id: String,
    pub ontology_uri: String,
}

impl ProvenanceTag {
    pub fn new(provider_id: impl Into<String>, ontology_uri: impl Into<String>) -> Self {
        Self { provider_id: provider_id.into(), ontology_uri: ontology_uri.into() }
    }
}

/// A ranked result with its expandable detail and, after fan-out, its origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub score: MatchScore,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceTag>,
}

/// Anything carrying a [`MatchScore`] can be grouped.
pub trait Ranked {
    fn score(&self) -> &MatchScore;
}

impl Ranked for MatchScore {
    fn score(&self) -> &MatchScore {
        self
    }
}

impl Ranked for ResultEntry {
    fn score(&self) -> &MatchScore {
        &self.score
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group<T> {
    pub signature: BTreeSet<String>,
    pub members: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedResults<T> {
    pub groups: Vec<Group<T>>,
    pub order_mode: GroupOrder,
}

impl<T> GroupedResults<T> {
    pub fn member_count(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }
}

/// Keeps the ranking order and attaches each supply's asserted values.
pub fn render_flat(scores: &[MatchScore], supplies: &[Instance]) -> Vec<ResultEntry> {
    let by_id: HashMap<&str, &Instance> = supplies.iter().map(|i| (i.id.as_str(), i)).collect();
    scores
        .iter()
        .map(|s| ResultEntry {
            score: s.clone(),
            instance: by_id.get(s.instance_id.as_str()).map(|i| (*i).clone()),
            provenance: None,
        })
        .collect()
}

/// Partitions results by their set of demand-unspecified properties.
///
/// Groups are ordered by signature size per `order`, ties by the joined
/// signature; members keep their input order.
pub fn group_by_additional<T: Ranked + Clone>(items: &[T], order: GroupOrder) -> GroupedResults<T> {
    let mut groups: Vec<Group<T>> = Vec::new();
    let mut slot: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    for item in items {
        let signature = &item.score().additional_properties;
        match slot.get(signature) {
            Some(&i) => groups[i].members.push(item.clone()),
            None => {
                slot.insert(signature, groups.len());
                groups.push(Group { signature: signature.clone(), members: vec![item.clone()] });
            }
        }
    }
    groups.sort_by(|a, b| {
        let by_size = a.signature.len().cmp(&b.signature.len());
        let by_size = match order {
            GroupOrder::Asc => by_size,
            GroupOrder::Desc => by_size.reverse(),
        };
        by_size.then_with(|| joined(&a.signature).cmp(&joined(&b.signature)))
    });
    GroupedResults { groups, order_mode: order }
}

fn joined(signature: &BTreeSet<String>) -> String {
    signature.iter().map(String::as_str).collect::<Vec<_>>().join(",")
}

/// Tags every entry with `tag`, replacing any earlier tag.
pub fn annotate_provenance(entries: Vec<ResultEntry>, tag: &ProvenanceTag) -> Vec<ResultEntry> {
    entries
        .into_iter()
        .map(|mut e| {
            e.provenance = Some(tag.clone());
            e
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderSection {
    pub provider: ProvenanceTag,
    pub entries: Vec<ResultEntry>,
}

/// Splits entries into one section per provider. Sections follow
/// `registration_order`; providers missing from it come after, in order of
/// first appearance. Untagged entries are dropped.
pub fn provider_sections(entries: &[ResultEntry], registration_order: &[ProvenanceTag]) -> Vec<ProviderSection> {
    let mut order: Vec<ProvenanceTag> = registration_order.to_vec();
    for e in entries {
        if let Some(tag) = &e.provenance {
            if !order.contains(tag) {
                order.push(tag.clone());
            }
        }
    }
    order
        .into_iter()
        .map(|provider| {
            let entries =
                entries.iter().filter(|e| e.provenance.as_ref() == Some(&provider)).cloned().collect::<Vec<_>>();
            ProviderSection { provider, entries }
        })
        .filter(|s| !s.entries.is_empty())
        .collect()
}

/// A supply's raw counters together with the supply itself, as returned by
/// a provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResult {
    pub counts: RawMatch,
    pub instance: Instance,
}

/// One provider's contribution to a merge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderBatch {
    pub provider: ProvenanceTag,
    pub tbox_fingerprint: String,
    pub results: Vec<RawResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedResults {
    /// Contributing providers in input order.
    pub providers: Vec<ProvenanceTag>,
    pub entries: Vec<ResultEntry>,
}

impl MergedResults {
    pub fn scores(&self) -> Vec<MatchScore> {
        self.entries.iter().map(|e| e.score.clone()).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PresentationError {
    #[error("provider `{provider_id}` serves TBox {found}, expected {expected}")]
    FingerprintMismatch { provider_id: String, expected: String, found: String },
    #[error("provider `{provider_id}` returned instance `{instance_id}` more than once")]
    DuplicateEntry { provider_id: String, instance_id: String },
}

/// Pools raw counters from every provider and normalizes once over the
/// pooled set, so the result equals a centralized ranking of the union.
pub fn merge_multi_provider(batches: Vec<ProviderBatch>) -> Result<MergedResults, PresentationError> {
    if let Some(first) = batches.first() {
        let expected = &first.tbox_fingerprint;
        if let Some(divergent) = batches.iter().find(|b| &b.tbox_fingerprint != expected) {
            return Err(PresentationError::FingerprintMismatch {
                provider_id: divergent.provider.provider_id.clone(),
                expected: expected.clone(),
                found: divergent.tbox_fingerprint.clone(),
            });
        }
    }

    let mut seen = HashSet::new();
    let mut raws = Vec::new();
    let mut origin = Vec::new();
    let mut providers = Vec::new();
    for batch in batches {
        providers.push(batch.provider.clone());
        for result in batch.results {
            if !seen.insert((batch.provider.provider_id.clone(), result.counts.instance_id.clone())) {
                return Err(PresentationError::DuplicateEntry {
                    provider_id: batch.provider.provider_id.clone(),
                    instance_id: result.counts.instance_id,
                });
            }
            raws.push(result.counts);
            origin.push((batch.provider.clone(), result.instance));
        }
    }

    let mut entries: Vec<ResultEntry> = normalize(&raws, RankComposition::default())
        .into_iter()
        .zip(origin)
        .map(|(score, (tag, instance))| ResultEntry { score, instance: Some(instance), provenance: Some(tag) })
        .collect();
    entries.sort_by(|a, b| {
        rank_order(&a.score, &b.score).then_with(|| {
            let pa = a.provenance.as_ref().map(|p| p.provider_id.as_str());
            let pb = b.provenance.as_ref().map(|p| p.provider_id.as_str());
            pa.cmp(&pb)
        })
    });
    Ok(MergedResults { providers, entries })
}

/// `n` followed by the singular or plural noun.
pub(crate) fn counted(n: usize, singular: &str, plural: &str) -> String {
    format!("{n} {}", if n == 1 { singular } else { plural })
}

fn write_entry(out: &mut String, entry: &ResultEntry) {
    let _ = write!(out, "{}", entry.score.instance_id);
    if let Some(instance) = &entry.instance {
        for (name, values) in &instance.values {
            let rendered = values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            let _ = write!(out, "  {name}: {rendered}");
        }
    }
    let _ = writeln!(out, "  [rank {:.4}]", entry.score.rank);
}

pub fn render_text_flat(entries: &[ResultEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        write_entry(&mut out, e);
    }
    let _ = writeln!(out, "{}", counted(entries.len(), "result", "results"));
    out
}

pub fn render_text_grouped(grouped: &GroupedResults<ResultEntry>) -> String {
    let mut out = String::new();
    for (i, g) in grouped.groups.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "Group#{} ({})", i + 1, g.signature.iter().cloned().collect::<Vec<_>>().join(", "));
        let _ = writeln!(out, "-----");
        for e in &g.members {
            write_entry(&mut out, e);
        }
    }
    let _ = writeln!(out, "{}", counted(grouped.member_count(), "result", "results"));
    out
}

pub fn render_text_providers(sections: &[ProviderSection]) -> String {
    let mut out = String::new();
    for (i, s) in sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{} at <{}>", s.provider.provider_id, s.provider.ontology_uri);
        for e in &s.entries {
            write_entry(&mut out, e);
        }
    }
    out
}
