//! Language-model style oracle: prompt construction, reply parsing and a
//! thin HTTP client.

use std::collections::BTreeMap;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::layout::LayoutNode;
use crate::model::{StyleProps, StyleValue};

use super::css::fmt_px;
use super::oracle::{OracleOutput, StyleOracle};
use super::{is_layout_property, is_visual_property, Declaration};

/// Environment variable holding the API key.
pub const LLM_KEY_ENV: &str = "P2C_LLM_API_KEY";
/// Optional override of the chat-completions endpoint.
pub const LLM_ENDPOINT_ENV: &str = "P2C_LLM_ENDPOINT";
/// Optional override of the model name.
pub const LLM_MODEL_ENV: &str = "P2C_LLM_MODEL";

const ROLE_PLAYING: &str = "You are an experienced front-end developer. You turn the visual style of one \
design-prototype layer into the CSS declarations a production stylesheet would use.";

const OUTPUT_REQUIREMENT: &str = "Return a parsable JSON object and nothing else. Each key is a CSS property \
name and each value is its CSS value as a string, with px units for lengths. Only emit visual properties \
(colors, backgrounds, borders, radii, shadows, fonts, opacity). Never emit position, display, flex, margin, \
padding, top, left, width or height.";

const BUNDLED_FIELD_DOCS: &str = include_str!("../../data/field_docs.json");

#[derive(Debug, Error, PartialEq)]
pub enum LlmError {
    #[error("empty reply")]
    EmptyReply,
    #[error("no JSON object found in reply")]
    UnparsableReply,
    #[error("{LLM_KEY_ENV} is not set")]
    MissingKey,
    #[error("field docs: {0}")]
    FieldDocs(String),
    #[error("request failed: {0}")]
    Transport(String),
}

/// Property explanations sent with every prompt.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldDocs(pub BTreeMap<String, String>);

impl FieldDocs {
    pub fn from_json(src: &str) -> Result<Self, LlmError> {
        serde_json::from_str(src)
            .map(FieldDocs)
            .map_err(|e| LlmError::FieldDocs(e.to_string()))
    }
}

/// The table bundled with the crate.
pub fn default_field_docs() -> FieldDocs {
    FieldDocs::from_json(BUNDLED_FIELD_DOCS).expect("bundled field docs are valid JSON")
}

/// Four-part prompt: role, user input, field explanation, output requirement.
#[derive(Debug, Clone, PartialEq)]
pub struct LlmPrompt {
    pub role_playing: String,
    /// Style key-values with layout keys removed.
    pub user_input: Value,
    pub field_explanation: Value,
    pub output_requirement: String,
    pub warnings: Vec<String>,
}

impl LlmPrompt {
    pub fn render(&self) -> String {
        format!(
            "[Role-playing]\n{}\n\n[User Input]\n{}\n\n[Field Explanation]\n{}\n\n[Output Requirement]\n{}\n",
            self.role_playing,
            serde_json::to_string_pretty(&self.user_input).expect("json value"),
            serde_json::to_string_pretty(&self.field_explanation).expect("json value"),
            self.output_requirement
        )
    }

    /// Every part is present and non-empty.
    pub fn is_complete(&self) -> bool {
        !self.role_playing.is_empty()
            && self.user_input.is_object()
            && self.field_explanation.as_object().is_some_and(|m| !m.is_empty())
            && !self.output_requirement.is_empty()
    }
}

fn style_json(v: &StyleValue) -> Value {
    match v {
        StyleValue::Number(n) => serde_json::Number::from_f64(*n).map(Value::Number).unwrap_or(Value::Null),
        StyleValue::Text(s) => Value::String(s.clone()),
        StyleValue::Flag(b) => Value::Bool(*b),
    }
}

/// Assembles the prompt for one node. Layout keys are stripped from the
/// user input; used keys without an explanation are flagged in `warnings`.
pub fn build_llm_prompt(node: &LayoutNode, style: &StyleProps, docs: &FieldDocs) -> LlmPrompt {
    let mut input = Map::new();
    let mut warnings = Vec::new();
    for (k, v) in style.iter() {
        if is_layout_property(k) {
            continue;
        }
        if !docs.0.contains_key(k) {
            warnings.push(format!("{}: no field explanation for `{k}`", node.id));
        }
        input.insert(k.clone(), style_json(v));
    }
    let explanation = docs.0.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    LlmPrompt {
        role_playing: ROLE_PLAYING.to_string(),
        user_input: Value::Object(input),
        field_explanation: Value::Object(explanation),
        output_requirement: OUTPUT_REQUIREMENT.to_string(),
        warnings,
    }
}

fn first_object(text: &str) -> Option<Map<String, Value>> {
    for (i, _) in text.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        if let Some(Ok(Value::Object(m))) = stream.next() {
            return Some(m);
        }
    }
    None
}

const PX_PROPERTIES: &[&str] = &["border-radius", "border-width", "font-size", "letter-spacing", "line-height"];

/// Extracts declarations from a model reply: the first JSON object in the
/// text (code fences and surrounding prose are ignored). Layout and unknown
/// properties are dropped with warnings.
pub fn parse_llm_reply(text: &str) -> Result<OracleOutput, LlmError> {
    if text.trim().is_empty() {
        return Err(LlmError::EmptyReply);
    }
    let obj = first_object(text).ok_or(LlmError::UnparsableReply)?;
    let mut out = OracleOutput::default();
    for (prop, value) in obj {
        let prop = prop.trim().to_ascii_lowercase();
        if is_layout_property(&prop) {
            out.warnings.push(format!("layout property `{prop}` dropped"));
            continue;
        }
        if !is_visual_property(&prop) {
            out.warnings.push(format!("unknown property `{prop}` dropped"));
            continue;
        }
        let v = match value {
            Value::String(s) => s.trim().to_string(),
            Value::Number(n) => match n.as_f64() {
                Some(f) if PX_PROPERTIES.contains(&prop.as_str()) => fmt_px(f),
                _ => n.to_string(),
            },
            _ => String::new(),
        };
        if v.is_empty() || v.contains([';', '{', '}', '<', '>']) {
            out.warnings.push(format!("unusable value for `{prop}` dropped"));
            continue;
        }
        out.declarations.push(Declaration { property: prop, value: v });
    }
    Ok(out)
}

/// Sends a prompt, returns the model's text.
pub trait LlmClient {
    fn complete(&self, prompt: &str) -> Result<String, LlmError>;
}

/// Style oracle backed by a language model.
pub struct LlmOracle<C> {
    pub client: C,
    pub docs: FieldDocs,
}

impl<C: LlmClient> StyleOracle for LlmOracle<C> {
    fn name(&self) -> &'static str {
        "llm"
    }

    fn declarations(&self, node: &LayoutNode, style: &StyleProps) -> Result<OracleOutput, String> {
        let prompt = build_llm_prompt(node, style, &self.docs);
        let reply = self.client.complete(&prompt.render()).map_err(|e| e.to_string())?;
        let mut out = parse_llm_reply(&reply).map_err(|e| e.to_string())?;
        out.warnings.splice(0..0, prompt.warnings);
        Ok(out)
    }
}

#[cfg(feature = "llm-http")]
pub use http::HttpLlmClient;

#[cfg(feature = "llm-http")]
mod http {
    use std::time::Duration;

    use serde_json::{json, Value};

    use super::{LlmClient, LlmError, LLM_ENDPOINT_ENV, LLM_KEY_ENV, LLM_MODEL_ENV};

    const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
    const DEFAULT_MODEL: &str = "gpt-4";
    const TIMEOUT: Duration = Duration::from_secs(30);
    const MAX_RETRIES: usize = 2;

    /// Chat-completions client.
    pub struct HttpLlmClient {
        pub endpoint: String,
        pub model: String,
        key: String,
        agent: ureq::Agent,
    }

    impl HttpLlmClient {
        pub fn new(endpoint: &str, model: &str, key: &str) -> Self {
            let config = ureq::Agent::config_builder().timeout_global(Some(TIMEOUT)).build();
            HttpLlmClient {
                endpoint: endpoint.to_string(),
                model: model.to_string(),
                key: key.to_string(),
                agent: config.into(),
            }
        }

        /// Reads the key (required), endpoint and model from the environment.
        pub fn from_env() -> Result<Self, LlmError> {
            let key = std::env::var(LLM_KEY_ENV)
                .ok()
                .filter(|k| !k.trim().is_empty())
                .ok_or(LlmError::MissingKey)?;
            let endpoint = std::env::var(LLM_ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string());
            let model = std::env::var(LLM_MODEL_ENV).unwrap_or_else(|_| DEFAULT_MODEL.to_string());
            Ok(HttpLlmClient::new(&endpoint, &model, &key))
        }

        fn attempt(&self, body: &Value) -> Result<String, LlmError> {
            let mut resp = self
                .agent
                .post(&self.endpoint)
                .header("Authorization", &format!("Bearer {}", self.key))
                .send_json(body)
                .map_err(|e| LlmError::Transport(e.to_string()))?;
            let v: Value = resp
                .body_mut()
                .read_json()
                .map_err(|e| LlmError::Transport(e.to_string()))?;
            v.pointer("/choices/0/message/content")
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or(LlmError::UnparsableReply)
        }
    }

    impl LlmClient for HttpLlmClient {
        fn complete(&self, prompt: &str) -> Result<String, LlmError> {
            let body = json!({
                "model": self.model,
                "temperature": 0,
                "messages": [{"role": "user", "content": prompt}],
            });
            let mut last = LlmError::EmptyReply;
            for attempt in 0..=MAX_RETRIES {
                match self.attempt(&body) {
                    Ok(text) => return Ok(text),
                    Err(e) => {
                        log::warn!("llm request attempt {} failed: {e}", attempt + 1);
                        last = e;
                    }
                }
            }
            Err(last)
        }
    }
}
