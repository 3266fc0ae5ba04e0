use std::time::Duration;

use reqwest::{Method, RequestBuilder};
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::registry_service::{DeregisterReply, RegisterReply};
use super::wire::*;
use super::NetError;
use crate::ontology::Instance;
use crate::profile::InboxEntry;
use crate::registry::{Registration, RegistryEntry};

/// `host:port` or a full URL, normalized to a base URL without trailing slash.
pub fn http_base(address: &str) -> String {
    let trimmed = address.trim().trim_end_matches('/');
    if trimmed.starts_with("http://") || trimmed.starts_with("https://") {
        trimmed.to_owned()
    } else {
        format!("http://{trimmed}")
    }
}

/// HTTP client for providers and registries.
#[derive(Debug, Clone, Default)]
pub struct PeerClient {
    http: reqwest::Client,
}

impl PeerClient {
    pub fn new() -> Self {
        Self::default()
    }

    fn request(&self, method: Method, address: &str, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}{path}", http_base(address)))
    }

    async fn send<T: DeserializeOwned>(
        &self,
        address: &str,
        builder: RequestBuilder,
        timeout: Option<Duration>,
    ) -> Result<(u16, T), NetError> {
        let fut = async {
            let response = builder
                .send()
                .await
                .map_err(|e| NetError::Transport { address: address.to_owned(), message: e.to_string() })?;
            let status = response.status();
            let bytes = response
                .bytes()
                .await
                .map_err(|e| NetError::Transport { address: address.to_owned(), message: e.to_string() })?;
            if !status.is_success() && status != reqwest::StatusCode::NOT_FOUND {
                let body = serde_json::from_slice::<ErrorBody>(&bytes)
                    .unwrap_or_else(|_| ErrorBody::new(String::from_utf8_lossy(&bytes).into_owned()));
                return Err(NetError::Status { address: address.to_owned(), status: status.as_u16(), body });
            }
            let value = serde_json::from_slice::<T>(&bytes).map_err(|e| {
                if status.is_success() {
                    NetError::Malformed { address: address.to_owned(), message: e.to_string() }
                } else {
                    NetError::Status {
                        address: address.to_owned(),
                        status: status.as_u16(),
                        body: ErrorBody::new(String::from_utf8_lossy(&bytes).into_owned()),
                    }
                }
            })?;
            Ok((status.as_u16(), value))
        };
        match timeout {
            None => fut.await,
            Some(limit) => tokio::time::timeout(limit, fut).await.unwrap_or_else(|_| {
                Err(NetError::Timeout { address: address.to_owned(), timeout_ms: limit.as_millis() as u64 })
            }),
        }
    }

    async fn json<T: DeserializeOwned>(&self, address: &str, builder: RequestBuilder) -> Result<T, NetError> {
        match self.send(address, builder, None).await? {
            (404, _) => {
                Err(NetError::Status { address: address.to_owned(), status: 404, body: ErrorBody::new("not found") })
            }
            (_, v) => Ok(v),
        }
    }

    fn with_body<B: Serialize>(builder: RequestBuilder, body: &B) -> RequestBuilder {
        builder.json(body)
    }

    pub async fn health(&self, address: &str) -> Result<Health, NetError> {
        self.json(address, self.request(Method::GET, address, "/health")).await
    }

    pub async fn fetch_tbox(&self, address: &str) -> Result<TboxSummary, NetError> {
        self.json(address, self.request(Method::GET, address, "/tbox")).await
    }

    /// Sends a match request; `inject_delay_ms` only has an effect on
    /// providers running in bench mode.
    pub async fn match_demand(
        &self,
        address: &str,
        request: &MatchRequest,
        inject_delay_ms: Option<u64>,
        timeout: Option<Duration>,
    ) -> Result<MatchResponse, NetError> {
        let mut builder = Self::with_body(self.request(Method::POST, address, "/match"), request);
        if let Some(ms) = inject_delay_ms {
            builder = builder.header(INJECT_DELAY_HEADER, ms.to_string());
        }
        match self.send(address, builder, timeout).await? {
            (404, _) => {
                Err(NetError::Status { address: address.to_owned(), status: 404, body: ErrorBody::new("not found") })
            }
            (_, v) => Ok(v),
        }
    }

    pub async fn publish(&self, address: &str, instance: &Instance) -> Result<PublishAck, NetError> {
        self.json(address, Self::with_body(self.request(Method::POST, address, "/resources"), instance)).await
    }

    pub async fn subscribe(&self, address: &str, request: &SubscriptionRequest) -> Result<SubscriptionAck, NetError> {
        self.json(address, Self::with_body(self.request(Method::POST, address, "/subscriptions"), request)).await
    }

    pub async fn poll_inbox(&self, address: &str, user_id: &str) -> Result<Vec<InboxEntry>, NetError> {
        let path = format!("/subscriptions/{}/inbox", encode_segment(user_id));
        self.json(address, self.request(Method::GET, address, &path)).await
    }

    pub async fn register(&self, registry: &str, registration: &Registration) -> Result<RegisterReply, NetError> {
        self.json(registry, Self::with_body(self.request(Method::POST, registry, "/ontologies"), registration)).await
    }

    /// `Ok` for both outcomes; the reply's `ack` tells removal from not-found.
    pub async fn deregister(&self, registry: &str, uri: &str) -> Result<DeregisterReply, NetError> {
        let query = url::form_urlencoded::Serializer::new(String::new()).append_pair("uri", uri).finish();
        let builder = self.request(Method::DELETE, registry, &format!("/ontologies?{query}"));
        Ok(self.send(registry, builder, None).await?.1)
    }

    pub async fn search(&self, registry: &str, keywords: &[String]) -> Result<Vec<RegistryEntry>, NetError> {
        let mut query = url::form_urlencoded::Serializer::new(String::new());
        for k in keywords {
            query.append_pair("keyword", k);
        }
        let query = query.finish();
        let path = if query.is_empty() { "/ontologies".to_owned() } else { format!("/ontologies?{query}") };
        self.json(registry, self.request(Method::GET, registry, &path)).await
    }
}

fn encode_segment(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect::<String>().replace('+', "%20")
}
