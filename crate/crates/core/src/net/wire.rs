use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::matchmaker::Demand;
use crate::ontology::OntologySchema;
use crate::presentation::RawResult;

/// Header carrying an artificial server-side delay, honored in bench mode only.
pub const INJECT_DELAY_HEADER: &str = "x-inject-delay-ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRequest {
    pub demand: Demand,
    pub request_id: String,
    /// Set by fan-out clients; a provider with a different TBox answers 409.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_fingerprint: Option<String>,
}

/// A provider's answer: unnormalized counters plus the time spent scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResponse {
    pub provider_id: String,
    pub ontology_uri: String,
    pub tbox_fingerprint: String,
    pub results: Vec<RawResult>,
    pub matchmaking_ms: f64,
    pub request_id: String,
}

/// Everything a client needs to build a query form for a provider's ontology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TboxSummary {
    pub provider_id: String,
    pub tbox_fingerprint: String,
    pub datatype_property_count: usize,
    pub object_property_count: usize,
    pub schema: OntologySchema,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubscriptionRequest {
    pub user_id: String,
    pub demand: Demand,
    pub valid_until: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubscriptionAck {
    pub user_id: String,
    pub query_id: String,
    pub valid_until: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishAck {
    pub instance_id: String,
    /// Inbox entries created by this publication.
    pub notifications: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub provider_id: String,
    pub instances: usize,
}

/// Error payload for every non-2xx reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<serde_json::Value>,
}

impl ErrorBody {
    pub fn new(error: impl Into<String>) -> Self {
        Self { error: error.into(), violations: Vec::new() }
    }

    pub fn with_violations<T: Serialize>(error: impl Into<String>, violations: &[T]) -> Self {
        Self {
            error: error.into(),
            violations: violations.iter().filter_map(|v| serde_json::to_value(v).ok()).collect(),
        }
    }
}
