use std::time::{Duration, Instant};

use futures::future::join_all;
use serde::{Deserialize, Serialize};

use super::client::PeerClient;
use super::wire::{MatchRequest, MatchResponse};
use super::NetError;
use crate::matchmaker::Demand;
use crate::presentation::{merge_multi_provider, MergedResults, ProvenanceTag, ProviderBatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FanoutMode {
    /// One provider after another.
    Sync,
    /// All providers concurrently.
    #[default]
    Async,
}

impl FanoutMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FanoutMode::Sync => "sync",
            FanoutMode::Async => "async",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderTarget {
    pub address: String,
    /// Fingerprint advertised for this provider (e.g. by the registry).
    #[serde(default)]
    pub fingerprint: Option<String>,
    /// Server-side delay requested from bench-mode providers.
    #[serde(default)]
    pub inject_delay_ms: Option<u64>,
}

impl ProviderTarget {
    pub fn new(address: impl Into<String>) -> Self {
        Self { address: address.into(), fingerprint: None, inject_delay_ms: None }
    }

    pub fn with_fingerprint(mut self, fingerprint: impl Into<String>) -> Self {
        self.fingerprint = Some(fingerprint.into());
        self
    }

    pub fn with_delay(mut self, ms: u64) -> Self {
        self.inject_delay_ms = Some(ms);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoutPlan {
    pub providers: Vec<ProviderTarget>,
    pub mode: FanoutMode,
    pub per_request_timeout_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderTiming {
    pub provider_id: String,
    pub address: String,
    pub matchmaking_ms: f64,
    pub latency_ms: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimingBreakdown {
    pub per_provider: Vec<ProviderTiming>,
    pub merge_ms: f64,
    pub total_wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderFailure {
    pub address: String,
    pub error: String,
    /// Transport failure or timeout, as opposed to an error reply.
    pub unreachable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoutOutcome {
    pub merged: MergedResults,
    pub timing: TimingBreakdown,
    pub failures: Vec<ProviderFailure>,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

async fn ask(
    client: &PeerClient,
    target: &ProviderTarget,
    request: &MatchRequest,
    timeout: Duration,
) -> (Result<MatchResponse, NetError>, f64) {
    let started = Instant::now();
    let result = client.match_demand(&target.address, request, target.inject_delay_ms, Some(timeout)).await;
    (result, millis(started.elapsed()))
}

/// Sends the demand to every provider, merges the raw counters and
/// normalizes once. Providers that fail are reported, not fatal, unless all fail.
pub async fn fanout(client: &PeerClient, plan: &FanoutPlan, demand: &Demand) -> Result<FanoutOutcome, NetError> {
    if plan.providers.is_empty() {
        return Err(NetError::NoProviders);
    }
    if plan.per_request_timeout_ms == 0 {
        return Err(NetError::InvalidPlan("per-request timeout must be positive".into()));
    }
    let mut expected: Option<&str> = None;
    for target in &plan.providers {
        if let Some(fp) = &target.fingerprint {
            match expected {
                None => expected = Some(fp),
                Some(e) if e != fp => {
                    return Err(NetError::FingerprintMismatch {
                        address: target.address.clone(),
                        expected: e.to_owned(),
                        found: fp.clone(),
                    })
                }
                Some(_) => {}
            }
        }
    }

    let started = Instant::now();
    let timeout = Duration::from_millis(plan.per_request_timeout_ms);
    let request_id = format!("fanout-{}", chrono::Utc::now().timestamp_nanos_opt().unwrap_or_default());
    let request =
        MatchRequest { demand: demand.clone(), request_id, expected_fingerprint: expected.map(str::to_owned) };

    let answers: Vec<(Result<MatchResponse, NetError>, f64)> = match plan.mode {
        FanoutMode::Sync => {
            let mut out = Vec::with_capacity(plan.providers.len());
            for target in &plan.providers {
                out.push(ask(client, target, &request, timeout).await);
            }
            out
        }
        FanoutMode::Async => join_all(plan.providers.iter().map(|t| ask(client, t, &request, timeout))).await,
    };

    let mut timing = TimingBreakdown::default();
    let mut failures = Vec::new();
    let mut batches = Vec::new();
    for (target, (result, wall_ms)) in plan.providers.iter().zip(answers) {
        match result {
            Ok(response) => {
                let raw_latency = wall_ms - response.matchmaking_ms;
                if raw_latency < 0.0 {
                    tracing::warn!(provider = %response.provider_id, wall_ms, matchmaking_ms = response.matchmaking_ms, "negative latency clamped to 0");
                }
                timing.per_provider.push(ProviderTiming {
                    provider_id: response.provider_id.clone(),
                    address: target.address.clone(),
                    matchmaking_ms: response.matchmaking_ms.max(0.0),
                    latency_ms: raw_latency.max(0.0),
                    wall_ms,
                });
                batches.push(ProviderBatch {
                    provider: ProvenanceTag::new(response.provider_id, response.ontology_uri),
                    tbox_fingerprint: response.tbox_fingerprint,
                    results: response.results,
                });
            }
            Err(e) => {
                tracing::warn!(address = %target.address, error = %e, "provider failed");
                failures.push(ProviderFailure {
                    address: target.address.clone(),
                    unreachable: e.is_unreachable(),
                    error: e.to_string(),
                });
            }
        }
    }
    if batches.is_empty() {
        return Err(NetError::AllFailed(failures));
    }

    let merge_started = Instant::now();
    let merged = merge_multi_provider(batches)?;
    timing.merge_ms = millis(merge_started.elapsed());
    timing.total_wall_ms = millis(started.elapsed());
    Ok(FanoutOutcome { merged, timing, failures })
}
