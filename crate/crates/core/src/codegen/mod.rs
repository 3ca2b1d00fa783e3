//! HTML and CSS emission.
//!
//! The HTML skeleton mirrors the layout tree: containers become `div`s,
//! text leaves `span`s and every other leaf an `img` placeholder. Layout CSS
//! (flex direction, margins, absolute offsets, sizes) comes from the tree
//! alone; visual CSS comes from a style oracle.

mod css;
mod html;
mod llm;
mod oracle;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

pub use css::{emit_layout_css, fmt_px, render_stylesheet, CssRule, Declaration};
pub use html::{emit_html, HtmlDoc, HtmlNode, Tag};
pub use llm::{
    build_llm_prompt, default_field_docs, parse_llm_reply, FieldDocs, LlmClient, LlmError, LlmOracle, LlmPrompt,
    LLM_ENDPOINT_ENV, LLM_KEY_ENV, LLM_MODEL_ENV,
};
#[cfg(feature = "llm-http")]
pub use llm::HttpLlmClient;
pub use oracle::{style_oracle_rules, OracleOutput, RulesOracle, StyleOracle};

use crate::geometry::Rect;
use crate::layout::{LayoutKind, LayoutNode, LayoutTree};
use crate::model::{LayerKind, PrototypeDoc};

#[derive(Debug, Error, PartialEq)]
pub enum CodegenError {
    #[error("node `{0}` has no element type")]
    UntypedNode(String),
    #[error("style oracle failed on `{node}`: {message}")]
    Oracle { node: String, message: String },
}

/// CSS properties owned by the layout emitter. Style oracles never emit
/// these, and they are filtered from prompts and replies.
pub const LAYOUT_PROPERTIES: &[&str] = &[
    "display",
    "flex-direction",
    "flex",
    "flex-grow",
    "flex-shrink",
    "flex-basis",
    "flex-wrap",
    "flex-flow",
    "align-items",
    "align-self",
    "align-content",
    "justify-content",
    "gap",
    "position",
    "top",
    "left",
    "right",
    "bottom",
    "inset",
    "x",
    "y",
    "width",
    "height",
    "min-width",
    "min-height",
    "max-width",
    "max-height",
    "margin",
    "margin-top",
    "margin-left",
    "margin-right",
    "margin-bottom",
    "padding",
    "padding-top",
    "padding-left",
    "padding-right",
    "padding-bottom",
    "float",
    "z-index",
];

/// Visual properties an oracle may emit.
pub const VISUAL_PROPERTIES: &[&str] = &[
    "background",
    "background-color",
    "background-image",
    "border",
    "border-color",
    "border-radius",
    "border-style",
    "border-width",
    "box-shadow",
    "color",
    "font-family",
    "font-size",
    "font-style",
    "font-weight",
    "letter-spacing",
    "line-height",
    "opacity",
    "text-align",
    "text-decoration",
    "text-transform",
    "white-space",
];

pub fn is_layout_property(name: &str) -> bool {
    LAYOUT_PROPERTIES.contains(&name)
}

pub fn is_visual_property(name: &str) -> bool {
    VISUAL_PROPERTIES.contains(&name)
}

/// Writes element types and `<label>-<k>` classnames into the tree, `k`
/// counting per label in pre-order.
pub fn label_tree(tree: &mut LayoutTree, types: &BTreeMap<String, String>) -> Result<(), CodegenError> {
    let mut counters: HashMap<String, usize> = HashMap::new();
    let mut missing = None;
    tree.root.visit_mut(&mut |n| {
        if missing.is_some() {
            return;
        }
        match types.get(&n.id) {
            Some(label) => {
                let k = counters.entry(label.clone()).or_insert(0);
                *k += 1;
                n.classname = Some(format!("{label}-{k}"));
                n.element_type = Some(label.clone());
            }
            None => missing = Some(n.id.clone()),
        }
    });
    match missing {
        Some(id) => Err(CodegenError::UntypedNode(id)),
        None => Ok(()),
    }
}

/// Placeholder source for a rasterized leaf.
pub fn asset_path(id: &str) -> String {
    format!("assets/{id}.png")
}

/// Whether a leaf is emitted as an `img`.
pub fn is_asset_leaf(node: &LayoutNode) -> bool {
    node.is_leaf() && !matches!(node.kind, LayoutKind::Layer(LayerKind::Text) | LayoutKind::Root)
}

#[derive(Debug, Serialize)]
struct AssetEntry<'a> {
    src: String,
    rect: Rect,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    fragments: &'a [String],
}

/// JSON manifest of image placeholders: node id to path and source rect.
pub fn assets_manifest(tree: &LayoutTree) -> String {
    let mut map = BTreeMap::new();
    tree.root.visit(&mut |n| {
        if is_asset_leaf(n) {
            map.insert(
                n.id.as_str(),
                AssetEntry {
                    src: asset_path(&n.id),
                    rect: n.rect,
                    fragments: &n.fragments,
                },
            );
        }
    });
    let mut s = serde_json::to_string_pretty(&map).expect("manifest serialization cannot fail");
    s.push('\n');
    s
}

/// Everything `build` writes.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub html: String,
    pub css: String,
    pub manifest: String,
    pub rules: usize,
    pub warnings: Vec<String>,
}

/// Emits HTML, CSS (layout plus oracle declarations) and the asset manifest
/// for a labeled tree.
pub fn emit_all(tree: &LayoutTree, doc: &PrototypeDoc, oracle: &dyn StyleOracle) -> Result<Emitted, CodegenError> {
    let html = emit_html(tree, doc)?;
    let mut rules = emit_layout_css(tree);
    let mut warnings = Vec::new();
    let layers = doc.layer_index();
    let nodes = tree.nodes();
    for (rule, node) in rules.iter_mut().zip(&nodes) {
        let Some(layer) = layers.get(node.id.as_str()) else {
            continue;
        };
        if layer.style.is_empty() {
            continue;
        }
        let out = oracle
            .declarations(node, &layer.style)
            .map_err(|message| CodegenError::Oracle {
                node: node.id.clone(),
                message,
            })?;
        warnings.extend(out.warnings.into_iter().map(|w| format!("{}: {w}", node.id)));
        let mut visual: Vec<Declaration> = Vec::new();
        for d in out.declarations {
            if is_layout_property(&d.property) {
                warnings.push(format!("{}: oracle emitted layout property `{}`; dropped", node.id, d.property));
            } else if let Some(prev) = visual.iter_mut().find(|p| p.property == d.property) {
                warnings.push(format!("{}: duplicate property `{}`; last value wins", node.id, d.property));
                *prev = d;
            } else {
                visual.push(d);
            }
        }
        visual.sort_by(|a, b| a.property.cmp(&b.property));
        rule.declarations.extend(visual);
    }
    Ok(Emitted {
        html: html.to_html(),
        css: render_stylesheet(&rules),
        manifest: assets_manifest(tree),
        rules: rules.len(),
        warnings,
    })
}
