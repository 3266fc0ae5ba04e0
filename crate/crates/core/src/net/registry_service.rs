use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{RawQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use super::wire::ErrorBody;
use super::{NetError, ServerHandle};
use crate::registry::{DeregisterAck, RegisterAck, Registration, Registry, RegistryEntry, RegistryError};

type Shared = Arc<RwLock<Registry>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterReply {
    pub ack: RegisterAck,
    pub entry: RegistryEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeregisterReply {
    pub ack: DeregisterAck,
    pub ontology_uri: String,
}

pub fn router(registry: Shared) -> Router {
    Router::new()
        .route("/ontologies", get(search).post(register).delete(deregister))
        .with_state(registry)
        .layer(CorsLayer::permissive())
}

/// Serves the registry on `bind` in the background.
pub async fn serve_registry(registry: Registry, bind: &str) -> Result<ServerHandle, NetError> {
    ServerHandle::spawn(bind, router(Arc::new(RwLock::new(registry)))).await
}

fn query_values(raw: Option<&str>, key: &str) -> Vec<String> {
    raw.map(|q| {
        url::form_urlencoded::parse(q.as_bytes()).filter(|(k, _)| k == key).map(|(_, v)| v.into_owned()).collect()
    })
    .unwrap_or_default()
}

fn failure(e: RegistryError) -> Response {
    let status = match e {
        RegistryError::Malformed(_) => StatusCode::BAD_REQUEST,
        RegistryError::Storage { .. } => StatusCode::INTERNAL_SERVER_ERROR,
    };
    (status, Json(ErrorBody::new(e.to_string()))).into_response()
}

async fn search(State(registry): State<Shared>, RawQuery(raw): RawQuery) -> Response {
    let keywords = query_values(raw.as_deref(), "keyword");
    let hits = registry.read().expect("registry lock poisoned").search_by_keyword(&keywords);
    Json(hits).into_response()
}

async fn register(State(registry): State<Shared>, body: Bytes) -> Response {
    let registration: Registration = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return failure(RegistryError::Malformed(e.to_string())),
    };
    let mut guard = registry.write().expect("registry lock poisoned");
    match guard.register(registration.clone(), Utc::now()) {
        Ok(ack) => {
            let entry = guard.get(registration.ontology_uri.trim()).cloned().expect("just registered");
            (StatusCode::CREATED, Json(RegisterReply { ack, entry })).into_response()
        }
        Err(e) => failure(e),
    }
}

async fn deregister(State(registry): State<Shared>, RawQuery(raw): RawQuery) -> Response {
    let Some(uri) = query_values(raw.as_deref(), "uri").into_iter().next() else {
        return failure(RegistryError::Malformed("missing `uri` query parameter".into()));
    };
    match registry.write().expect("registry lock poisoned").deregister(&uri) {
        Ok(ack) => {
            let status = if ack == DeregisterAck::Removed { StatusCode::OK } else { StatusCode::NOT_FOUND };
            (status, Json(DeregisterReply { ack, ontology_uri: uri })).into_response()
        }
        Err(e) => failure(e),
    }
}
