//! Ontology registry: which providers serve which ontology, under which
//! keywords and TBox fingerprint.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SNAPSHOT_FILE: &str = "registry.json";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("malformed registry entry: {0}")]
    Malformed(String),
    #[error("registry snapshot `{path}`: {message}")]
    Storage { path: String, message: String },
}

/// Body of a registration: an entry without its server-assigned timestamp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registration {
    pub ontology_uri: String,
    pub keywords: BTreeSet<String>,
    pub tbox_fingerprint: String,
    pub provider_address: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub ontology_uri: String,
    pub keywords: BTreeSet<String>,
    pub tbox_fingerprint: String,
    pub provider_address: String,
    pub registered_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegisterAck {
    Registered,
    Replaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeregisterAck {
    Removed,
    NotFound,
}

/// Accepts `host:port` where host is a DNS name, IPv4 or bracketed IPv6
/// literal and port is non-zero.
pub fn is_valid_address(address: &str) -> bool {
    if address.is_empty() || address.contains(['/', '?', '#', '@', ' ']) {
        return false;
    }
    let Some((host, port)) = address.rsplit_once(':') else { return false };
    if host.is_empty() || !matches!(port.parse::<u16>(), Ok(p) if p > 0) {
        return false;
    }
    url::Url::parse(&format!("http://{address}")).is_ok_and(|u| u.host().is_some() && u.port().is_some())
}

impl Registration {
    pub fn new(
        ontology_uri: impl Into<String>,
        keywords: impl IntoIterator<Item = impl Into<String>>,
        tbox_fingerprint: impl Into<String>,
        provider_address: impl Into<String>,
    ) -> Self {
        Self {
            ontology_uri: ontology_uri.into(),
            keywords: keywords.into_iter().map(Into::into).collect(),
            tbox_fingerprint: tbox_fingerprint.into(),
            provider_address: provider_address.into(),
        }
    }

    /// Validates and normalizes (trims, lowercases keywords) into an entry.
    pub fn into_entry(self, now: DateTime<Utc>) -> Result<RegistryEntry, RegistryError> {
        let ontology_uri = self.ontology_uri.trim().to_owned();
        if ontology_uri.is_empty() {
            return Err(RegistryError::Malformed("empty ontology_uri".into()));
        }
        let keywords: BTreeSet<String> =
            self.keywords.iter().map(|k| k.trim().to_lowercase()).filter(|k| !k.is_empty()).collect();
        if keywords.is_empty() {
            return Err(RegistryError::Malformed(format!("`{ontology_uri}` has no keywords")));
        }
        if self.tbox_fingerprint.trim().is_empty() {
            return Err(RegistryError::Malformed(format!("`{ontology_uri}` has no TBox fingerprint")));
        }
        if !is_valid_address(&self.provider_address) {
            return Err(RegistryError::Malformed(format!(
                "provider address `{}` is not host:port",
                self.provider_address
            )));
        }
        Ok(RegistryEntry {
            ontology_uri,
            keywords,
            tbox_fingerprint: self.tbox_fingerprint,
            provider_address: self.provider_address,
            registered_at: now,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    entries: Vec<RegistryEntry>,
}

/// Entries keyed by ontology URI, optionally mirrored to a JSON snapshot
/// rewritten on every mutation.
#[derive(Debug, Default, Clone)]
pub struct Registry {
    entries: BTreeMap<String, RegistryEntry>,
    snapshot: Option<PathBuf>,
}

fn storage(path: &Path, e: impl std::fmt::Display) -> RegistryError {
    RegistryError::Storage { path: path.display().to_string(), message: e.to_string() }
}

impl Registry {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `registry.json` from `dir` if present; later mutations rewrite it.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| storage(dir, e))?;
        let path = dir.join(SNAPSHOT_FILE);
        let mut registry = Self { entries: BTreeMap::new(), snapshot: Some(path.clone()) };
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| storage(&path, e))?;
            let snap: Snapshot = serde_json::from_str(&text).map_err(|e| storage(&path, e))?;
            registry.entries = snap.entries.into_iter().map(|e| (e.ontology_uri.clone(), e)).collect();
        }
        Ok(registry)
    }

    fn persist(&self) -> Result<(), RegistryError> {
        let Some(path) = &self.snapshot else { return Ok(()) };
        let snap = Snapshot { entries: self.entries.values().cloned().collect() };
        let json = serde_json::to_vec_pretty(&snap).map_err(|e| storage(path, e))?;
        let tmp = path.with_extension("json.tmp");
        let mut f = fs::File::create(&tmp).map_err(|e| storage(&tmp, e))?;
        f.write_all(&json).and_then(|()| f.sync_all()).map_err(|e| storage(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| storage(path, e))
    }

    /// Stores the entry; an existing entry with the same URI is replaced.
    pub fn register(&mut self, registration: Registration, now: DateTime<Utc>) -> Result<RegisterAck, RegistryError> {
        let entry = registration.into_entry(now)?;
        let ack = match self.entries.insert(entry.ontology_uri.clone(), entry) {
            Some(_) => RegisterAck::Replaced,
            None => RegisterAck::Registered,
        };
        self.persist()?;
        Ok(ack)
    }

    pub fn deregister(&mut self, uri: &str) -> Result<DeregisterAck, RegistryError> {
        if self.entries.remove(uri.trim()).is_none() {
            return Ok(DeregisterAck::NotFound);
        }
        self.persist()?;
        Ok(DeregisterAck::Removed)
    }

    pub fn get(&self, uri: &str) -> Option<&RegistryEntry> {
        self.entries.get(uri)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All entries ordered by registration time, then URI.
    pub fn list_all(&self) -> Vec<RegistryEntry> {
        self.search_by_keyword::<&str>(&[])
    }

    /// Entries sharing at least one keyword with the query, compared
    /// case-insensitively. An empty query matches everything.
    pub fn search_by_keyword<S: AsRef<str>>(&self, keywords: &[S]) -> Vec<RegistryEntry> {
        let wanted: BTreeSet<String> =
            keywords.iter().map(|k| k.as_ref().trim().to_lowercase()).filter(|k| !k.is_empty()).collect();
        let mut hits: Vec<RegistryEntry> =
            self.entries.values().filter(|e| wanted.is_empty() || !e.keywords.is_disjoint(&wanted)).cloned().collect();
        hits.sort_by(|a, b| a.registered_at.cmp(&b.registered_at).then_with(|| a.ontology_uri.cmp(&b.ontology_uri)));
        hits
    }
}
