//! Wire layer: provider and registry HTTP services, their clients, and
//! multi-provider fan-out with timing decomposition.

mod client;
mod fanout;
mod provider;
mod registry_service;
mod wire;

pub use client::{http_base, PeerClient};
pub use fanout::{
    fanout, FanoutMode, FanoutOutcome, FanoutPlan, ProviderFailure, ProviderTarget, ProviderTiming, TimingBreakdown,
};
pub use provider::{score_supplies, serve_provider, ProviderConfig, ProviderNode};
pub use registry_service::{serve_registry, DeregisterReply, RegisterReply};
pub use wire::{
    ErrorBody, Health, MatchRequest, MatchResponse, PublishAck, SubscriptionAck, SubscriptionRequest, TboxSummary,
    INJECT_DELAY_HEADER,
};

use std::net::SocketAddr;

use thiserror::Error;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use crate::presentation::PresentationError;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("cannot bind {address}: {message}")]
    Bind { address: String, message: String },
    #[error("{address} unreachable: {message}")]
    Transport { address: String, message: String },
    #[error("{address} did not answer within {timeout_ms} ms")]
    Timeout { address: String, timeout_ms: u64 },
    #[error("{address} answered {status}: {}", body.error)]
    Status { address: String, status: u16, body: ErrorBody },
    #[error("{address} sent a malformed reply: {message}")]
    Malformed { address: String, message: String },
    #[error("providers do not share one TBox: {address} has {found}, expected {expected}")]
    FingerprintMismatch { address: String, expected: String, found: String },
    #[error("no providers")]
    NoProviders,
    #[error("invalid fan-out plan: {0}")]
    InvalidPlan(String),
    #[error("all {} providers failed", .0.len())]
    AllFailed(Vec<ProviderFailure>),
    #[error(transparent)]
    Merge(#[from] PresentationError),
}

impl NetError {
    /// Whether the failure is a reachability problem rather than a protocol one.
    pub fn is_unreachable(&self) -> bool {
        match self {
            NetError::Transport { .. } | NetError::Timeout { .. } | NetError::NoProviders => true,
            NetError::AllFailed(failures) => failures.iter().all(|f| f.unreachable),
            _ => false,
        }
    }
}

/// A running HTTP service. Dropping the handle stops it.
#[derive(Debug)]
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub(crate) async fn spawn(bind: &str, app: axum::Router) -> Result<Self, NetError> {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| NetError::Bind { address: bind.to_owned(), message: e.to_string() })?;
        let addr =
            listener.local_addr().map_err(|e| NetError::Bind { address: bind.to_owned(), message: e.to_string() })?;
        let (tx, rx) = oneshot::channel::<()>();
        let task = tokio::spawn(async move {
            let server = axum::serve(listener, app).with_graceful_shutdown(async {
                let _ = rx.await;
            });
            if let Err(e) = server.await {
                tracing::error!(error = %e, "server stopped");
            }
        });
        Ok(Self { addr, shutdown: Some(tx), task: Some(task) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// `host:port` form used in registry entries and fan-out plans.
    pub fn address(&self) -> String {
        self.addr.to_string()
    }

    /// Runs until the service stops on its own.
    pub async fn wait(mut self) {
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }

    pub async fn shutdown(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}
