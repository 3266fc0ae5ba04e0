use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use super::{expire_queries, InboxEntry, ProfileError, Rule, SavedQuery, UserProfile};

const RULES_FILE: &str = "rules.json";
const PROFILE_SUFFIX: &str = ".json";
const INBOX_SUFFIX: &str = ".inbox.jsonl";

type DeliveryKey = (String, String, String, DateTime<Utc>);

/// Profiles, rules and PUSH inboxes, optionally persisted under a directory
/// as `<user>.json`, `<user>.inbox.jsonl` and `rules.json`.
///
/// A notification for a given (user, query, instance, event time) is
/// delivered at most once, also across restarts.
#[derive(Debug, Default)]
pub struct ProfileStore {
    dir: Option<PathBuf>,
    profiles: BTreeMap<String, UserProfile>,
    rules: Vec<Rule>,
    inboxes: BTreeMap<String, Vec<InboxEntry>>,
    delivered: HashSet<DeliveryKey>,
}

fn storage(path: &Path, e: impl std::fmt::Display) -> ProfileError {
    ProfileError::Storage { path: path.display().to_string(), message: e.to_string() }
}

fn check_user_id(id: &str) -> Result<(), ProfileError> {
    let ok = !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '@'));
    if ok {
        Ok(())
    } else {
        Err(ProfileError::InvalidUserId(id.to_owned()))
    }
}

fn delivery_key(user: &str, entry: &InboxEntry) -> DeliveryKey {
    (user.to_owned(), entry.query_id.clone(), entry.instance.id.clone(), entry.event_at)
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ProfileError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| storage(&tmp, e))?;
    f.write_all(contents).and_then(|()| f.sync_all()).map_err(|e| storage(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| storage(path, e))
}

impl ProfileStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) a persisted store and loads its contents.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ProfileError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| storage(&dir, e))?;
        let mut store = Self { dir: Some(dir.clone()), ..Self::default() };

        let rules_path = dir.join(RULES_FILE);
        if rules_path.exists() {
            let text = fs::read_to_string(&rules_path).map_err(|e| storage(&rules_path, e))?;
            store.rules = serde_json::from_str(&text).map_err(|e| storage(&rules_path, e))?;
        }

        for entry in fs::read_dir(&dir).map_err(|e| storage(&dir, e))? {
            let path = entry.map_err(|e| storage(&dir, e))?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            if name == RULES_FILE {
                continue;
            }
            if let Some(user) = name.strip_suffix(INBOX_SUFFIX) {
                let text = fs::read_to_string(&path).map_err(|e| storage(&path, e))?;
                let mut entries = Vec::new();
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    let e: InboxEntry = serde_json::from_str(line).map_err(|e| storage(&path, e))?;
                    store.delivered.insert(delivery_key(user, &e));
                    entries.push(e);
                }
                store.inboxes.insert(user.to_owned(), entries);
            } else if name.ends_with(PROFILE_SUFFIX) {
                let text = fs::read_to_string(&path).map_err(|e| storage(&path, e))?;
                let p: UserProfile = serde_json::from_str(&text).map_err(|e| storage(&path, e))?;
                store.profiles.insert(p.user_id.clone(), p);
            }
        }
        Ok(store)
    }

    pub fn directory(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn persist_profile(&self, user_id: &str) -> Result<(), ProfileError> {
        if let (Some(dir), Some(p)) = (&self.dir, self.profiles.get(user_id)) {
            let json = serde_json::to_vec_pretty(p).map_err(|e| storage(dir, e))?;
            write_atomic(&dir.join(format!("{user_id}{PROFILE_SUFFIX}")), &json)?;
        }
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn set_rules(&mut self, rules: Vec<Rule>) -> Result<(), ProfileError> {
        self.rules = rules;
        if let Some(dir) = &self.dir {
            let json = serde_json::to_vec_pretty(&self.rules).map_err(|e| storage(dir, e))?;
            write_atomic(&dir.join(RULES_FILE), &json)?;
        }
        Ok(())
    }

    pub fn profile(&self, user_id: &str) -> Option<&UserProfile> {
        self.profiles.get(user_id)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &UserProfile> {
        self.profiles.values()
    }

    /// Inserts or replaces a profile.
    pub fn upsert_profile(&mut self, profile: UserProfile) -> Result<(), ProfileError> {
        check_user_id(&profile.user_id)?;
        let id = profile.user_id.clone();
        self.profiles.insert(id.clone(), profile);
        self.persist_profile(&id)
    }

    /// Adds a saved query, creating the profile if the user is new.
    pub fn save_query(&mut self, user_id: &str, query: SavedQuery, now: DateTime<Utc>) -> Result<(), ProfileError> {
        check_user_id(user_id)?;
        if !query.is_valid_at(now) {
            return Err(ProfileError::Expired(query.query_id));
        }
        let profile = self.profiles.entry(user_id.to_owned()).or_insert_with(|| UserProfile::new(user_id));
        if profile.saved_queries.iter().any(|q| q.query_id == query.query_id) {
            return Err(ProfileError::DuplicateQuery { user_id: user_id.to_owned(), query_id: query.query_id });
        }
        profile.saved_queries.push(query);
        self.persist_profile(user_id)
    }

    /// Removes expired saved queries from every profile; returns how many went.
    pub fn expire(&mut self, now: DateTime<Utc>) -> Result<usize, ProfileError> {
        let mut removed = 0;
        let ids: Vec<String> = self.profiles.keys().cloned().collect();
        for id in ids {
            let p = self.profiles.remove(&id).expect("key just listed");
            let before = p.saved_queries.len();
            let p = expire_queries(p, now);
            let gone = before - p.saved_queries.len();
            self.profiles.insert(id.clone(), p);
            if gone > 0 {
                removed += gone;
                self.persist_profile(&id)?;
            }
        }
        Ok(removed)
    }

    /// Appends a notification unless this exact one was delivered before.
    /// Returns whether it was newly delivered.
    pub fn deliver(&mut self, user_id: &str, entry: InboxEntry) -> Result<bool, ProfileError> {
        check_user_id(user_id)?;
        if !self.delivered.insert(delivery_key(user_id, &entry)) {
            return Ok(false);
        }
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{user_id}{INBOX_SUFFIX}"));
            let mut line = serde_json::to_string(&entry).map_err(|e| storage(&path, e))?;
            line.push('\n');
            let mut f = fs::OpenOptions::new().create(true).append(true).open(&path).map_err(|e| storage(&path, e))?;
            f.write_all(line.as_bytes()).and_then(|()| f.sync_data()).map_err(|e| storage(&path, e))?;
        }
        self.inboxes.entry(user_id.to_owned()).or_default().push(entry);
        Ok(true)
    }

    /// Pending notifications for a user, oldest first. Reading does not
    /// consume them.
    pub fn inbox(&self, user_id: &str) -> &[InboxEntry] {
        self.inboxes.get(user_id).map(Vec::as_slice).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchmaker::{Demand, RawMatch};
    use crate::ontology::Instance;
    use chrono::{Duration, TimeZone};

    fn now() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2026, 5, 1, 12, 0, 0).unwrap()
    }

    fn query(id: &str, until: DateTime<Utc>) -> SavedQuery {
        SavedQuery { query_id: id.into(), demand: Demand::new("Laptop", "u"), valid_until: until }
    }

    fn entry() -> InboxEntry {
        InboxEntry {
            query_id: "q".into(),
            event_at: now(),
            counts: RawMatch {
                instance_id: "L".into(),
                n_par: 0.0,
                n_pot: 0.0,
                n_add: 0,
                additional_properties: Default::default(),
            },
            instance: Instance::new("L", "Laptop"),
        }
    }

    #[test]
    fn rejects_path_like_user_ids() {
        let mut s = ProfileStore::in_memory();
        for bad in ["", "../x", "a/b", ".hidden"] {
            assert!(s.upsert_profile(UserProfile::new(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn save_query_rules() {
        let mut s = ProfileStore::in_memory();
        s.save_query("u", query("q", now() + Duration::hours(1)), now()).unwrap();
        assert!(matches!(
            s.save_query("u", query("q", now() + Duration::hours(1)), now()),
            Err(ProfileError::DuplicateQuery { .. })
        ));
        assert!(matches!(
            s.save_query("u", query("old", now() - Duration::hours(1)), now()),
            Err(ProfileError::Expired(_))
        ));
        assert_eq!(s.expire(now() + Duration::hours(2)).unwrap(), 1);
        assert!(s.profile("u").unwrap().saved_queries.is_empty());
    }

    #[test]
    fn exactly_once_delivery_survives_reopen() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut s = ProfileStore::open(dir.path()).unwrap();
            s.save_query("u", query("q", now() + Duration::hours(1)), now()).unwrap();
            assert!(s.deliver("u", entry()).unwrap());
            assert!(!s.deliver("u", entry()).unwrap());
            assert_eq!(s.inbox("u").len(), 1);
            assert_eq!(s.inbox("u").len(), 1);
        }
        let mut s = ProfileStore::open(dir.path()).unwrap();
        assert_eq!(s.profile("u").unwrap().saved_queries.len(), 1);
        assert_eq!(s.inbox("u").len(), 1);
        assert!(!s.deliver("u", entry()).unwrap());
        assert!(s.inbox("nobody").is_empty());
    }
}
