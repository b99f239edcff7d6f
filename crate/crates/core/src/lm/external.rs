//! Client for a scorer running in a child process, speaking newline-delimited
//! JSON over stdio.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use super::{Scorer, TokenId};
use crate::error::{Error, Result};

const PROTOCOL_VERSION: u64 = 1;

struct Channel {
    child: Child,
    writer: BufWriter<ChildStdin>,
    reader: BufReader<ChildStdout>,
}

impl Channel {
    fn request(&mut self, body: &Value) -> Result<Value> {
        let io = |e| Error::Protocol(format!("sidecar I/O failed: {e}"));
        serde_json::to_writer(&mut self.writer, body)?;
        self.writer.write_all(b"\n").map_err(io)?;
        self.writer.flush().map_err(io)?;
        let mut line = String::new();
        let n = self.reader.read_line(&mut line).map_err(io)?;
        if n == 0 {
            return Err(Error::Protocol("sidecar closed its output".into()));
        }
        let value: Value = serde_json::from_str(line.trim_end())
            .map_err(|e| Error::Protocol(format!("invalid response {:?}: {e}", line.trim_end())))?;
        if let Some(err) = value.get("error") {
            return Err(Error::Protocol(format!("sidecar error: {err}")));
        }
        match value.get("v").and_then(Value::as_u64) {
            Some(PROTOCOL_VERSION) => Ok(value),
            other => Err(Error::Protocol(format!(
                "unsupported protocol version {other:?}"
            ))),
        }
    }
}

/// Scorer backed by an external process. Requests are serialized through one
/// pipe, so concurrent callers wait on each other.
pub struct ExternalScorer {
    channel: Mutex<Channel>,
    window: Option<usize>,
    cache: Mutex<HashMap<String, Vec<TokenId>>>,
}

/// Full token context, shared between branches that extend it.
pub type ExternalState = Arc<[TokenId]>;

impl ExternalScorer {
    /// Launches `command` through the shell and performs the ping handshake.
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Protocol(format!("cannot start {command:?}: {e}")))?;
        let writer = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let reader = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut channel = Channel {
            child,
            writer,
            reader,
        };
        let pong = channel.request(&json!({"op": "ping"}))?;
        if pong.get("ok") != Some(&Value::Bool(true)) {
            return Err(Error::Protocol(format!("bad ping response {pong}")));
        }
        let window = pong
            .get("window")
            .and_then(Value::as_u64)
            .map(|w| w as usize);
        log::info!("external scorer ready (window {window:?})");
        Ok(Self {
            channel: Mutex::new(channel),
            window,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Context length the sidecar reported, if any.
    pub fn window(&self) -> Option<usize> {
        self.window
    }

    fn call(&self, body: &Value) -> Result<Value> {
        self.channel
            .lock()
            .map_err(|_| Error::Protocol("scorer channel poisoned".into()))?
            .request(body)
    }

    pub fn detokenize(&self, ids: &[TokenId]) -> Result<String> {
        let resp = self.call(&json!({"op": "detokenize", "ids": ids}))?;
        resp.get("text")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::Protocol(format!("detokenize response lacks text: {resp}")))
    }

    /// Log probability of each continuation sequence after `context`.
    pub fn score(&self, context: &[TokenId], continuations: &[Vec<TokenId>]) -> Result<Vec<f64>> {
        let resp = self.call(&json!({
            "op": "score",
            "context": context,
            "continuations": continuations,
        }))?;
        let values = resp
            .get("logprobs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Protocol(format!("score response lacks logprobs: {resp}")))?;
        if values.len() != continuations.len() {
            return Err(Error::Protocol(format!(
                "asked for {} scores, got {}",
                continuations.len(),
                values.len()
            )));
        }
        values
            .iter()
            .map(|v| match v.as_f64() {
                Some(lp) if lp.is_finite() && lp <= 0.0 => Ok(lp),
                _ => Err(Error::Protocol(format!("invalid log probability {v}"))),
            })
            .collect()
    }

    fn next_state(&self, state: &ExternalState, token: TokenId) -> ExternalState {
        let mut ctx = state.to_vec();
        ctx.push(token);
        // Keep a little more than the window so the sidecar still decides
        // what to drop.
        if let Some(w) = self.window {
            let keep = w.saturating_mul(2).max(1);
            if ctx.len() > keep {
                ctx.drain(..ctx.len() - keep);
            }
        }
        ctx.into()
    }
}

impl Scorer for ExternalScorer {
    type State = ExternalState;

    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        if word.trim().is_empty() {
            return Err(Error::domain("cannot tokenize an empty word"));
        }
        if let Some(ids) = self.cache.lock().ok().and_then(|c| c.get(word).cloned()) {
            return Ok(ids);
        }
        let resp = self.call(&json!({"op": "tokenize", "word": word}))?;
        let ids: Vec<TokenId> = resp
            .get("ids")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Protocol(format!("tokenize response lacks ids: {resp}")))?
            .iter()
            .map(|v| {
                v.as_u64()
                    .and_then(|x| TokenId::try_from(x).ok())
                    .ok_or_else(|| Error::Protocol(format!("invalid token id {v}")))
            })
            .collect::<Result<_>>()?;
        if ids.is_empty() {
            return Err(Error::Protocol(format!(
                "sidecar returned no tokens for {word:?}"
            )));
        }
        if let Ok(mut cache) = self.cache.lock() {
            cache.insert(word.to_string(), ids.clone());
        }
        Ok(ids)
    }

    fn begin(&self) -> ExternalState {
        Arc::from(Vec::new())
    }

    fn extend(&self, state: &ExternalState, token: TokenId) -> Result<(ExternalState, f64)> {
        let lp = self.score(state, &[vec![token]])?[0];
        Ok((self.next_state(state, token), lp))
    }

    fn extend_many(
        &self,
        state: &ExternalState,
        tokens: &[TokenId],
    ) -> Result<Vec<(ExternalState, f64)>> {
        if tokens.is_empty() {
            return Ok(Vec::new());
        }
        let conts: Vec<Vec<TokenId>> = tokens.iter().map(|&t| vec![t]).collect();
        let scores = self.score(state, &conts)?;
        Ok(tokens
            .iter()
            .zip(scores)
            .map(|(&t, lp)| (self.next_state(state, t), lp))
            .collect())
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        if let Ok(channel) = self.channel.get_mut() {
            let _ = channel.writer.flush();
            let _ = channel.child.kill();
            let _ = channel.child.wait();
        }
    }
}
