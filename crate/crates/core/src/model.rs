//! Prototype documents: the layer tree exported from a design tool.
//!
//! Coordinates are absolute canvas pixels. The wire format is a small JSON
//! schema:
//!
//! ```json
//! { "canvas": {"w": 375, "h": 812},
//!   "layers": [ {"id": "bg", "name": "Background", "kind": "shape",
//!                "rect": {"x": 0, "y": 0, "w": 375, "h": 812},
//!                "style": {"fill": "#FFFFFF"}} ] }
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Rect;

/// Visual style keys understood by the style oracles.
pub const STYLE_WHITELIST: &[&str] = &[
    "fill",
    "color",
    "font-family",
    "font-size",
    "font-weight",
    "line-height",
    "border-radius",
    "border-width",
    "border-color",
    "opacity",
    "shadow",
    "background",
];

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate layer id `{0}`")]
    DuplicateId(String),
    #[error("layer `{id}` has a negative size ({w} x {h})")]
    NegativeSize { id: String, w: f64, h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Text,
    Image,
    Vector,
    Shape,
    Group,
}

impl LayerKind {
    pub fn is_leaf_kind(self) -> bool {
        self != LayerKind::Group
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Text => "text",
            LayerKind::Image => "image",
            LayerKind::Vector => "vector",
            LayerKind::Shape => "shape",
            LayerKind::Group => "group",
        }
    }
}

/// A single style value: a number, a string, or a flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StyleValue {
    Number(f64),
    Text(String),
    Flag(bool),
}

impl StyleValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            StyleValue::Number(n) => Some(*n),
            StyleValue::Text(s) => s.trim().trim_end_matches("px").trim().parse().ok(),
            StyleValue::Flag(_) => None,
        }
    }
}

impl From<f64> for StyleValue {
    fn from(v: f64) -> Self {
        StyleValue::Number(v)
    }
}

impl From<&str> for StyleValue {
    fn from(v: &str) -> Self {
        StyleValue::Text(v.to_string())
    }
}

/// Open key/value map of visual properties. Keys outside
/// [`STYLE_WHITELIST`] are kept and reported by [`StyleProps::unknown_keys`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StyleProps(pub BTreeMap<String, StyleValue>);

impl StyleProps {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<StyleValue>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&StyleValue> {
        self.0.get(key)
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(StyleValue::as_f64)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &StyleValue)> {
        self.0.iter()
    }

    pub fn unknown_keys(&self) -> Vec<&str> {
        self.0
            .keys()
            .map(String::as_str)
            .filter(|k| !STYLE_WHITELIST.contains(k))
            .collect()
    }

    /// Background fill or an explicit background.
    pub fn has_fill(&self) -> bool {
        self.get("fill").is_some() || self.get("background").is_some()
    }

    pub fn radius(&self) -> f64 {
        self.number("border-radius").unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub id: String,
    pub name: String,
    pub kind: LayerKind,
    pub rect: Rect,
    pub text: Option<String>,
    pub style: StyleProps,
    pub children: Vec<Layer>,
}

impl Layer {
    pub fn leaf(id: &str, kind: LayerKind, rect: Rect) -> Self {
        Layer {
            id: id.to_string(),
            name: id.to_string(),
            kind,
            rect,
            text: None,
            style: StyleProps::default(),
            children: Vec::new(),
        }
    }

    pub fn text(id: &str, rect: Rect, text: &str) -> Self {
        Layer {
            text: Some(text.to_string()),
            ..Layer::leaf(id, LayerKind::Text, rect)
        }
    }

    pub fn group(id: &str, rect: Rect, children: Vec<Layer>) -> Self {
        Layer {
            children,
            ..Layer::leaf(id, LayerKind::Group, rect)
        }
    }

    pub fn with_style(mut self, style: StyleProps) -> Self {
        self.style = style;
        self
    }
}

/// A parsed, validated prototype.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeDoc {
    pub canvas: Rect,
    pub layers: Vec<Layer>,
}

impl PrototypeDoc {
    pub fn new(width: f64, height: f64, layers: Vec<Layer>) -> Self {
        PrototypeDoc {
            canvas: Rect::new(0.0, 0.0, width, height),
            layers,
        }
    }

    /// All layers in document pre-order.
    pub fn all_layers(&self) -> Vec<&Layer> {
        fn walk<'a>(layers: &'a [Layer], out: &mut Vec<&'a Layer>) {
            for l in layers {
                out.push(l);
                walk(&l.children, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.layers, &mut out);
        out
    }

    /// Non-group layers in document pre-order.
    pub fn leaf_layers(&self) -> Vec<&Layer> {
        self.all_layers()
            .into_iter()
            .filter(|l| l.kind.is_leaf_kind())
            .collect()
    }

    pub fn layer_index(&self) -> HashMap<&str, &Layer> {
        self.all_layers().into_iter().map(|l| (l.id.as_str(), l)).collect()
    }

    /// Checks every document invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.canvas.w > 0.0 && self.canvas.h > 0.0) || !self.canvas.is_finite() {
            return Err(ModelError::Schema(format!(
                "canvas must have positive finite size, got {} x {}",
                self.canvas.w, self.canvas.h
            )));
        }
        let mut seen = HashSet::new();
        for layer in self.all_layers() {
            if !seen.insert(layer.id.as_str()) {
                return Err(ModelError::DuplicateId(layer.id.clone()));
            }
            if !layer.rect.is_finite() {
                return Err(ModelError::Schema(format!("layer `{}` has a non-finite rect", layer.id)));
            }
            if layer.rect.w < 0.0 || layer.rect.h < 0.0 {
                return Err(ModelError::NegativeSize {
                    id: layer.id.clone(),
                    w: layer.rect.w,
                    h: layer.rect.h,
                });
            }
            if layer.kind.is_leaf_kind() && !layer.children.is_empty() {
                return Err(ModelError::Schema(format!(
                    "{} layer `{}` cannot have children",
                    layer.kind.as_str(),
                    layer.id
                )));
            }
            match (layer.kind, &layer.text) {
                (LayerKind::Text, None) => {
                    return Err(ModelError::Schema(format!("text layer `{}` has no text", layer.id)))
                }
                (k, Some(_)) if k != LayerKind::Text => {
                    return Err(ModelError::Schema(format!(
                        "only text layers carry text (layer `{}`)",
                        layer.id
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let raw = RawDoc {
            canvas: RawCanvas {
                w: self.canvas.w,
                h: self.canvas.h,
            },
            layers: self.layers.iter().map(RawLayer::from).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("prototype serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCanvas {
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDoc {
    canvas: RawCanvas,
    layers: Vec<RawLayer>,
}

#[derive(Serialize, Deserialize)]
struct RawLayer {
    id: String,
    name: String,
    kind: LayerKind,
    rect: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "StyleProps::is_empty")]
    style: StyleProps,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<RawLayer>>,
}

impl From<&Layer> for RawLayer {
    fn from(l: &Layer) -> Self {
        RawLayer {
            id: l.id.clone(),
            name: l.name.clone(),
            kind: l.kind,
            rect: l.rect,
            text: l.text.clone(),
            style: l.style.clone(),
            children: if l.kind == LayerKind::Group || !l.children.is_empty() {
                Some(l.children.iter().map(RawLayer::from).collect())
            } else {
                None
            },
        }
    }
}

impl From<RawLayer> for Layer {
    fn from(r: RawLayer) -> Self {
        Layer {
            id: r.id,
            name: r.name,
            kind: r.kind,
            rect: r.rect,
            text: r.text,
            style: r.style,
            children: r.children.unwrap_or_default().into_iter().map(Layer::from).collect(),
        }
    }
}

/// Parses and validates a prototype JSON document.
pub fn parse_prototype(bytes: &[u8]) -> Result<PrototypeDoc, ModelError> {
    let raw: RawDoc = serde_json::from_slice(bytes).map_err(|e| ModelError::Schema(e.to_string()))?;
    let doc = PrototypeDoc {
        canvas: Rect::new(0.0, 0.0, raw.canvas.w, raw.canvas.h),
        layers: raw.layers.into_iter().map(Layer::from).collect(),
    };
    doc.validate()?;
    Ok(doc)
}
