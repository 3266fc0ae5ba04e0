use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::Serialize;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use super::wire::*;
use super::{NetError, ServerHandle};
use crate::matchmaker::{match_one, ComparisonCache, Demand, MatchError};
use crate::ontology::{
    tbox_fingerprint, validate_instance, Instance, OntologyDocument, OntologyError, OntologySchema, Taxonomy,
};
use crate::presentation::RawResult;
use crate::profile::{on_resource_published, EventRecord, ProfileStore, SavedQuery};

#[derive(Debug, Clone, Default)]
pub struct ProviderConfig {
    pub provider_id: String,
    /// Honor the delay-injection header.
    pub bench_mode: bool,
    /// Static web client served under `/ui`.
    pub ui_dir: Option<PathBuf>,
}

/// One provider: a schema, its supplies, and the PUSH profile store.
#[derive(Debug)]
pub struct ProviderNode {
    config: ProviderConfig,
    schema: OntologySchema,
    taxonomy: Taxonomy,
    fingerprint: String,
    /// Matches score against a cloned snapshot; publication swaps in a new one.
    supplies: RwLock<Arc<Vec<Instance>>>,
    profiles: Mutex<ProfileStore>,
}

/// Scores every supply and times the scoring loop alone.
pub fn score_supplies(
    taxonomy: &Taxonomy,
    demand: &Demand,
    supplies: &[Instance],
) -> Result<(Vec<RawResult>, f64), MatchError> {
    let started = Instant::now();
    let mut cache = ComparisonCache::new();
    let mut counts = Vec::with_capacity(supplies.len());
    for s in supplies {
        counts.push(match_one(taxonomy, demand, s, &mut cache)?);
    }
    let matchmaking_ms = started.elapsed().as_secs_f64() * 1000.0;
    let results =
        counts.into_iter().zip(supplies).map(|(counts, s)| RawResult { counts, instance: s.clone() }).collect();
    Ok((results, matchmaking_ms))
}

impl ProviderNode {
    pub fn new(
        config: ProviderConfig,
        document: OntologyDocument,
        profiles: ProfileStore,
    ) -> Result<Self, OntologyError> {
        let taxonomy = Taxonomy::build(&document.schema)?;
        let fingerprint = tbox_fingerprint(&document.schema);
        Ok(Self {
            config,
            schema: document.schema,
            taxonomy,
            fingerprint,
            supplies: RwLock::new(Arc::new(document.instances)),
            profiles: Mutex::new(profiles),
        })
    }

    pub fn provider_id(&self) -> &str {
        &self.config.provider_id
    }

    pub fn schema(&self) -> &OntologySchema {
        &self.schema
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn supplies(&self) -> Arc<Vec<Instance>> {
        Arc::clone(&self.supplies.read().expect("supply lock poisoned"))
    }

    pub fn router(self: Arc<Self>) -> Router {
        let mut router = Router::new()
            .route("/tbox", get(tbox))
            .route("/health", get(health))
            .route("/match", post(match_handler))
            .route("/resources", post(publish))
            .route("/subscriptions", post(subscribe))
            .route("/subscriptions/{user_id}/inbox", get(inbox))
            .with_state(Arc::clone(&self));
        if let Some(dir) = &self.config.ui_dir {
            router = router.nest_service("/ui", ServeDir::new(dir));
        }
        router.layer(CorsLayer::permissive())
    }

    /// Validates and stores a new supply, then runs the publication trigger.
    /// Returns the number of inbox entries delivered.
    pub fn publish(&self, instance: Instance) -> Result<usize, (StatusCode, ErrorBody)> {
        let instance = instance.coerce(&self.schema);
        let violations = validate_instance(&self.schema, &instance);
        if !violations.is_empty() {
            return Err((StatusCode::BAD_REQUEST, ErrorBody::with_violations("invalid instance", &violations)));
        }
        {
            let mut guard = self.supplies.write().expect("supply lock poisoned");
            if guard.iter().any(|s| s.id == instance.id) {
                return Err((
                    StatusCode::CONFLICT,
                    ErrorBody::new(format!("instance `{}` already published", instance.id)),
                ));
            }
            let mut next = Vec::with_capacity(guard.len() + 1);
            next.extend(guard.iter().cloned());
            next.push(instance.clone());
            *guard = Arc::new(next);
        }

        let event = EventRecord::published(&instance.id, Utc::now());
        let mut store = self.profiles.lock().expect("profile lock poisoned");
        let profiles: Vec<_> = store.profiles().cloned().collect();
        let mut delivered = 0;
        for (user, entry) in on_resource_published(&event, &instance, &profiles, &self.taxonomy) {
            match store.deliver(&user, entry) {
                Ok(true) => delivered += 1,
                Ok(false) => {}
                Err(e) => tracing::warn!(user = %user, error = %e, "inbox delivery failed"),
            }
        }
        Ok(delivered)
    }
}

/// Binds `bind` (e.g. `127.0.0.1:0`) and serves the provider in the background.
pub async fn serve_provider(node: Arc<ProviderNode>, bind: &str) -> Result<ServerHandle, NetError> {
    ServerHandle::spawn(bind, node.router()).await
}

fn reply<T: Serialize>(status: StatusCode, body: T) -> Response {
    (status, Json(body)).into_response()
}

fn error(status: StatusCode, body: ErrorBody) -> Response {
    reply(status, body)
}

async fn health(State(node): State<Arc<ProviderNode>>) -> Response {
    reply(
        StatusCode::OK,
        Health { status: "ok".into(), provider_id: node.config.provider_id.clone(), instances: node.supplies().len() },
    )
}

async fn tbox(State(node): State<Arc<ProviderNode>>) -> Response {
    reply(
        StatusCode::OK,
        TboxSummary {
            provider_id: node.config.provider_id.clone(),
            tbox_fingerprint: node.fingerprint.clone(),
            datatype_property_count: node.schema.datatype_property_count(),
            object_property_count: node.schema.object_property_count(),
            schema: node.schema.clone(),
        },
    )
}

async fn match_handler(State(node): State<Arc<ProviderNode>>, headers: HeaderMap, body: Bytes) -> Response {
    let request: MatchRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, ErrorBody::new(format!("malformed match request: {e}"))),
    };
    if let Some(expected) = &request.expected_fingerprint {
        if *expected != node.fingerprint {
            return error(
                StatusCode::CONFLICT,
                ErrorBody::new(format!(
                    "TBox fingerprint mismatch: provider has {}, request expects {expected}",
                    node.fingerprint
                )),
            );
        }
    }
    let violations = request.demand.validate(&node.schema);
    if !violations.is_empty() {
        return error(StatusCode::BAD_REQUEST, ErrorBody::with_violations("invalid demand", &violations));
    }
    if node.config.bench_mode {
        let delay =
            headers.get(INJECT_DELAY_HEADER).and_then(|v| v.to_str().ok()).and_then(|v| v.trim().parse::<u64>().ok());
        if let Some(ms) = delay {
            tokio::time::sleep(Duration::from_millis(ms)).await;
        }
    }

    let supplies = node.supplies();
    match score_supplies(&node.taxonomy, &request.demand, &supplies) {
        Ok((results, matchmaking_ms)) => reply(
            StatusCode::OK,
            MatchResponse {
                provider_id: node.config.provider_id.clone(),
                ontology_uri: node.schema.uri.clone(),
                tbox_fingerprint: node.fingerprint.clone(),
                results,
                matchmaking_ms,
                request_id: request.request_id,
            },
        ),
        Err(e) => error(StatusCode::BAD_REQUEST, ErrorBody::new(e.to_string())),
    }
}

async fn publish(State(node): State<Arc<ProviderNode>>, body: Bytes) -> Response {
    let instance: Instance = match serde_json::from_slice(&body) {
        Ok(i) => i,
        Err(e) => return error(StatusCode::BAD_REQUEST, ErrorBody::new(format!("malformed instance: {e}"))),
    };
    let id = instance.id.clone();
    match node.publish(instance) {
        Ok(notifications) => reply(StatusCode::CREATED, PublishAck { instance_id: id, notifications }),
        Err((status, body)) => error(status, body),
    }
}

async fn subscribe(State(node): State<Arc<ProviderNode>>, body: Bytes) -> Response {
    let request: SubscriptionRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, ErrorBody::new(format!("malformed subscription: {e}"))),
    };
    let violations = request.demand.validate(&node.schema);
    if !violations.is_empty() {
        return error(StatusCode::BAD_REQUEST, ErrorBody::with_violations("invalid demand", &violations));
    }
    let mut store = node.profiles.lock().expect("profile lock poisoned");
    let query_id = request.query_id.clone().unwrap_or_else(|| {
        let taken = |id: &str| {
            store.profile(&request.user_id).is_some_and(|p| p.saved_queries.iter().any(|q| q.query_id == id))
        };
        (1..).map(|n| format!("q{n}")).find(|id| !taken(id)).expect("unbounded id space")
    });
    let query = SavedQuery { query_id: query_id.clone(), demand: request.demand, valid_until: request.valid_until };
    match store.save_query(&request.user_id, query, Utc::now()) {
        Ok(()) => reply(
            StatusCode::CREATED,
            SubscriptionAck { user_id: request.user_id, query_id, valid_until: request.valid_until },
        ),
        Err(e @ crate::profile::ProfileError::DuplicateQuery { .. }) => {
            error(StatusCode::CONFLICT, ErrorBody::new(e.to_string()))
        }
        Err(e @ crate::profile::ProfileError::Storage { .. }) => {
            error(StatusCode::INTERNAL_SERVER_ERROR, ErrorBody::new(e.to_string()))
        }
        Err(e) => error(StatusCode::BAD_REQUEST, ErrorBody::new(e.to_string())),
    }
}

async fn inbox(State(node): State<Arc<ProviderNode>>, Path(user_id): Path<String>) -> Response {
    let store = node.profiles.lock().expect("profile lock poisoned");
    reply(StatusCode::OK, store.inbox(&user_id).to_vec())
}
