//! Where queries run: an in-memory dataset or a SPARQL protocol endpoint.
//!
//! Both targets accept the same query type, so preference evaluation and
//! rewriting never care which one they talk to. The remote side sends
//! `application/sparql-query` over POST and reads
//! `application/sparql-results+json` back.

pub mod results;

use std::time::Duration;

use crate::rdf::{Dataset, SolutionSeq};
use crate::sparql::{eval_ask, eval_select, query_to_string, EvalError, Query};

const REQUEST_TIMEOUT: Duration = Duration::from_secs(30);

/// Additional attempts after a failed one. Only transport failures are
/// retried; an HTTP error status is a definitive answer.
const TRANSPORT_RETRIES: u32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("transport error contacting the endpoint: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    Protocol(String),
}

// Backends are created once per run, never collected; the size gap between
// a dataset and an endpoint handle is irrelevant here.
#[allow(clippy::large_enum_variant)]
pub enum Backend {
    Local(Dataset),
    Remote(RemoteEndpoint),
}

impl Backend {
    pub fn select(&self, query: &Query) -> Result<SolutionSeq, BackendError> {
        match self {
            Backend::Local(ds) => Ok(eval_select(query, ds)?),
            Backend::Remote(remote) => {
                let body = remote.request(&query_to_string(query))?;
                results::solutions_from_json(&body).map_err(BackendError::Protocol)
            }
        }
    }

    pub fn ask(&self, query: &Query) -> Result<bool, BackendError> {
        match self {
            Backend::Local(ds) => Ok(eval_ask(query, ds)?),
            Backend::Remote(remote) => {
                let body = remote.request(&query_to_string(query))?;
                results::ask_from_json(&body).map_err(BackendError::Protocol)
            }
        }
    }
}

pub struct RemoteEndpoint {
    url: String,
    agent: ureq::Agent,
    retries: u32,
}

impl RemoteEndpoint {
    pub fn new(url: impl Into<String>) -> RemoteEndpoint {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(REQUEST_TIMEOUT))
            .build()
            .new_agent();
        RemoteEndpoint { url: url.into(), agent, retries: TRANSPORT_RETRIES }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// POSTs the query text; retries transport failures, propagates HTTP
    /// error statuses untouched. Queries are read-only, so a retry after a
    /// half-completed exchange is safe.
    fn request(&self, query_text: &str) -> Result<String, BackendError> {
        let mut attempt = 0;
        loop {
            match self.request_once(query_text) {
                Err(BackendError::Transport(e)) if attempt < self.retries => {
                    attempt += 1;
                    let _ = e;
                }
                other => return other,
            }
        }
    }

    fn request_once(&self, query_text: &str) -> Result<String, BackendError> {
        let mut response = self
            .agent
            .post(&self.url)
            .header("Content-Type", "application/sparql-query")
            .header("Accept", "application/sparql-results+json")
            .send(query_text)
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if status >= 400 {
            return Err(BackendError::Status { status, body });
        }
        Ok(body)
    }
}
