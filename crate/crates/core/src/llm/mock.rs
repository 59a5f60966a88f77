use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use serde::Deserialize;

use crate::analyzer::{invocation_names, ExtractOptions};
use crate::graph::CodeGraph;
use crate::http::{HttpReply, Transport, TransportError};
use crate::lexer::{code_tokens, is_reserved, TokenKind};

use super::LlmError;

/// Ground-truth bodies by block id, for the echo and dropper backends.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub bodies: BTreeMap<String, String>,
}

impl GroundTruth {
    pub fn from_graph(graph: &CodeGraph) -> Self {
        Self {
            bodies: graph.blocks().map(|b| (b.block_id.clone(), b.dedented_body())).collect(),
        }
    }
}

/// One scripted reply. `content` is wrapped in a completion response that
/// both API modes understand; `body` is sent verbatim; `error` simulates a
/// transport failure ("timeout", "connect" or anything else).
#[derive(Debug, Clone, Deserialize)]
pub struct ScriptStep {
    #[serde(default = "ok_status")]
    pub status: u16,
    #[serde(default)]
    pub content: Option<String>,
    #[serde(default)]
    pub body: Option<String>,
    #[serde(default)]
    pub error: Option<String>,
}

fn ok_status() -> u16 {
    200
}

/// Replays a list of steps in order, one per request.
pub struct ScriptTransport {
    steps: Mutex<Vec<ScriptStep>>,
}

impl ScriptTransport {
    pub fn new(mut steps: Vec<ScriptStep>) -> Self {
        steps.reverse();
        Self { steps: Mutex::new(steps) }
    }

    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::Config(format!("script {}: {e}", path.display())))?;
        let steps: Vec<ScriptStep> = serde_json::from_str(&text)
            .map_err(|e| LlmError::Config(format!("script {}: {e}", path.display())))?;
        Ok(Self::new(steps))
    }
}

pub(crate) fn completion_body(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}, "text": content}],
    })
    .to_string()
}

impl Transport for ScriptTransport {
    fn post_json(&self, _url: &str, _body: &str, _bearer: Option<&str>) -> Result<HttpReply, TransportError> {
        let step = self
            .steps
            .lock()
            .expect("script lock")
            .pop()
            .ok_or_else(|| TransportError::Other("script exhausted".into()))?;
        match step.error.as_deref() {
            Some("timeout") => return Err(TransportError::Timeout("scripted".into())),
            Some("connect") => return Err(TransportError::Connect("scripted".into())),
            Some(other) => return Err(TransportError::Other(other.to_string())),
            None => {}
        }
        let body = match (step.body, step.content) {
            (Some(b), _) => b,
            (None, Some(c)) => completion_body(&c),
            (None, None) => String::new(),
        };
        Ok(HttpReply {
            status: step.status,
            body,
        })
    }
}

/// Reply used by the echo backend for a description with no ground truth.
pub fn skeleton(tcbd: &str, opts: &ExtractOptions) -> String {
    format!("{}(\"{tcbd}\");\n{}();", opts.conventions.begin, opts.conventions.end)
}

/// Remove every call site of the lexicographically smallest invocation
/// name in `body`, leaving the argument lists in place (`a.foo(x)` becomes
/// `a.(x)`). Names that also appear in declaration position are never
/// chosen, since deleting them would turn the preceding type into a call.
/// Returns the mutated text and the dropped name, or the text unchanged
/// when no name can be dropped.
pub fn drop_invocation(body: &str, opts: &ExtractOptions) -> (String, Option<String>) {
    let toks = code_tokens(body);
    let sites = |name: &str| -> Option<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            if t.kind != TokenKind::Ident || t.text(body) != name {
                continue;
            }
            if !toks.get(i + 1).is_some_and(|n| n.is_punct(body, "(")) {
                continue;
            }
            if i > 0 {
                let prev = &toks[i - 1];
                let prev_text = prev.text(body);
                let declares = (prev.kind == TokenKind::Ident && !is_reserved(prev_text))
                    || prev.is_punct(body, ">")
                    || prev.is_punct(body, "]");
                if declares {
                    return None;
                }
            }
            out.push((t.start, t.end));
        }
        Some(out)
    };
    for name in invocation_names(body, opts) {
        let Some(spans) = sites(&name) else { continue };
        let mut out = String::with_capacity(body.len());
        let mut last = 0;
        for (s, e) in spans {
            out.push_str(&body[last..s]);
            last = e;
        }
        out.push_str(&body[last..]);
        return (out, Some(name));
    }
    (body.to_string(), None)
}
