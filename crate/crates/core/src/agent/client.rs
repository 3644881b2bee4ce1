//! Language-model clients: a deterministic scripted replayer, the
//! reference-encoder stand-in, and an HTTP chat-completion backend.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{encode, EncodeError};
use crate::puzzle::Puzzle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("backend returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed backend reply: {0}")]
    Malformed(String),
    #[error("scripted client has no response for call {0}")]
    Exhausted(u32),
    #[error("scripted failure injected at call {0}")]
    Injected(u32),
    #[error("client configuration: {0}")]
    Config(String),
}

/// A chat model. Implementations are shared across concurrent runs.
pub trait LlmClient: Send + Sync {
    fn complete(&self, messages: &[Message], temperature: f64) -> Result<String, ClientError>;
}

/// On-disk form of a scripted client: responses keyed by 1-based call
/// ordinal (retries and decomposition requests included).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptSpec {
    #[serde(default)]
    pub responses: BTreeMap<u32, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
    /// Call ordinals that fail with a transport-style error.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub fail: BTreeSet<u32>,
}

impl ScriptSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClientError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))
    }
}

/// Replays fixed responses in call order. Offline and deterministic.
#[derive(Debug)]
pub struct ScriptedClient {
    spec: ScriptSpec,
    calls: AtomicU32,
}

impl ScriptedClient {
    pub fn new(spec: ScriptSpec) -> Self {
        ScriptedClient { spec, calls: AtomicU32::new(0) }
    }

    /// Always answers with `text`.
    pub fn constant(text: impl Into<String>) -> Self {
        ScriptedClient::new(ScriptSpec { default: Some(text.into()), ..ScriptSpec::default() })
    }

    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for ScriptedClient {
    fn complete(&self, _messages: &[Message], _temperature: f64) -> Result<String, ClientError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        if self.spec.fail.contains(&n) {
            return Err(ClientError::Injected(n));
        }
        self.spec.responses.get(&n).or(self.spec.default.as_ref()).cloned().ok_or(ClientError::Exhausted(n))
    }
}

/// Answers every solving request with the reference encoding of one puzzle,
/// and decomposition requests with the puzzle's clue lines.
#[derive(Debug, Clone)]
pub struct ReferenceClient {
    reply: String,
    clues: String,
}

impl ReferenceClient {
    pub fn new(puzzle: &Puzzle) -> Result<Self, EncodeError> {
        let script = encode(puzzle)?;
        Ok(ReferenceClient { reply: format!("```smt2\n{}```\n", script.text), clues: puzzle.clues.join("\n") })
    }
}

impl LlmClient for ReferenceClient {
    fn complete(&self, messages: &[Message], _temperature: f64) -> Result<String, ClientError> {
        let first = messages.first().map(|m| m.content.as_str()).unwrap_or("");
        if first.starts_with(super::DECOMPOSER_PROMPT) {
            Ok(self.clues.clone())
        } else {
            Ok(self.reply.clone())
        }
    }
}

/// OpenAI-compatible `POST {base_url}/chat/completions` backend.
#[derive(Debug)]
pub struct LiveClient {
    http: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    api_key: Option<String>,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

impl LiveClient {
    /// `api_key` is sent as a bearer token when present.
    pub fn new(base_url: &str, model: &str, api_key: Option<String>, timeout: Duration) -> Result<Self, ClientError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ClientError::Config(e.to_string()))?;
        Ok(LiveClient {
            http,
            endpoint: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            model: model.to_string(),
            api_key,
        })
    }
}

impl LlmClient for LiveClient {
    fn complete(&self, messages: &[Message], temperature: f64) -> Result<String, ClientError> {
        let mut req = self.http.post(&self.endpoint).json(&ChatRequest { model: &self.model, messages, temperature });
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| ClientError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ClientError::Status { status: status.as_u16(), body });
        }
        let reply: ChatReply = serde_json::from_str(&body).map_err(|e| ClientError::Malformed(e.to_string()))?;
        reply
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| ClientError::Malformed("no choices in reply".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_replays_by_ordinal() {
        let spec: ScriptSpec =
            serde_json::from_str(r#"{"responses": {"1": "a", "3": "c"}, "default": "z", "fail": [2]}"#).unwrap();
        let c = ScriptedClient::new(spec);
        assert_eq!(c.complete(&[], 0.0).unwrap(), "a");
        assert_eq!(c.complete(&[], 0.0), Err(ClientError::Injected(2)));
        assert_eq!(c.complete(&[], 0.0).unwrap(), "c");
        assert_eq!(c.complete(&[], 0.0).unwrap(), "z");
        assert_eq!(c.calls(), 4);
    }

    #[test]
    fn scripted_without_default_runs_out() {
        let c = ScriptedClient::new(ScriptSpec::default());
        assert_eq!(c.complete(&[], 0.0), Err(ClientError::Exhausted(1)));
    }

    #[test]
    fn live_client_rejects_unreachable_backend() {
        let c = LiveClient::new("http://127.0.0.1:9", "m", None, Duration::from_millis(500)).unwrap();
        assert!(matches!(c.complete(&[Message::user("hi")], 0.0), Err(ClientError::Transport(_))));
    }
}
