use std::collections::HashMap;

use crate::geometry::Rect;
use crate::layout::{LayoutKind, LayoutNode, LayoutTree};
use crate::model::{Layer, LayerKind, PrototypeDoc};

use super::TypeMap;

/// Tallest leaf still treated as a status bar.
pub const STATUS_BAR_MAX_HEIGHT: f64 = 32.0;
const BUTTON_MAX_ASPECT: f64 = 6.0;
const BUTTON_MAX_HEIGHT: f64 = 64.0;

/// Assigns one label to every node of a layout tree.
pub trait Classifier {
    fn name(&self) -> &'static str;
    fn classify(&self, tree: &LayoutTree, doc: &PrototypeDoc) -> TypeMap;
}

/// Rule-based reference classifier.
#[derive(Debug, Clone)]
pub struct HeuristicClassifier {
    pub max_icon_px: f64,
    pub eps: f64,
}

impl Default for HeuristicClassifier {
    fn default() -> Self {
        HeuristicClassifier {
            max_icon_px: 64.0,
            eps: 0.5,
        }
    }
}

impl Classifier for HeuristicClassifier {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn classify(&self, tree: &LayoutTree, doc: &PrototypeDoc) -> TypeMap {
        classify_heuristic(tree, doc, self.max_icon_px, self.eps)
    }
}

fn button_shaped(node: &LayoutNode, layers: &HashMap<&str, &Layer>) -> bool {
    let Some(layer) = layers.get(node.id.as_str()) else {
        return false;
    };
    let r = node.rect;
    layer.style.has_fill()
        && layer.style.radius() > 0.0
        && r.h > 0.0
        && r.w / r.h <= BUTTON_MAX_ASPECT
        && r.h <= BUTTON_MAX_HEIGHT
}

fn sole_text_child(node: &LayoutNode) -> bool {
    node.children.len() == 1 && node.children[0].kind == LayoutKind::Layer(LayerKind::Text)
}

fn fits(r: &Rect, max: f64) -> bool {
    r.w <= max && r.h <= max
}

/// Labels every node of `tree`, root and wrappers included.
///
/// Rules, first match wins: group nodes take their group label; merged
/// fragments are icons; a leaf flush with the top edge, at most 32 px tall
/// and spanning the canvas is a status bar; text is `text`, or `text-button`
/// when it is the only child of a button-shaped parent (filled, rounded,
/// aspect at most 6, at most 64 px tall); images and vectors are icons when
/// they fit `max_icon_px` square and images otherwise; a button-shaped node
/// holding a single text is a button; everything else is a container.
pub fn classify_heuristic(tree: &LayoutTree, doc: &PrototypeDoc, max_icon_px: f64, eps: f64) -> TypeMap {
    let layers = doc.layer_index();
    let canvas = doc.canvas;
    let mut out = TypeMap::new();

    fn walk(
        node: &LayoutNode,
        parent: Option<&LayoutNode>,
        ctx: &(HashMap<&str, &Layer>, Rect, f64, f64),
        out: &mut TypeMap,
    ) {
        let (layers, canvas, max_icon, eps) = ctx;
        let label = match node.kind {
            LayoutKind::Group(g) => g.label(),
            LayoutKind::Merged => "icon",
            LayoutKind::Layer(_)
                if node.is_leaf()
                    && (node.rect.y - canvas.y).abs() <= *eps
                    && node.rect.h <= STATUS_BAR_MAX_HEIGHT
                    && node.rect.w >= 0.9 * canvas.w =>
            {
                "status-bar"
            }
            LayoutKind::Layer(LayerKind::Text) => match parent {
                Some(p) if sole_text_child(p) && button_shaped(p, layers) => "text-button",
                _ => "text",
            },
            LayoutKind::Layer(LayerKind::Image | LayerKind::Vector) if node.is_leaf() => {
                if fits(&node.rect, *max_icon) {
                    "icon"
                } else {
                    "image"
                }
            }
            _ if sole_text_child(node) && button_shaped(node, layers) => "button",
            _ => "container",
        };
        out.insert(node.id.clone(), label.to_string());
        for c in &node.children {
            walk(c, Some(node), ctx, out);
        }
    }

    let ctx = (layers, canvas, max_icon_px, eps);
    walk(&tree.root, None, &ctx, &mut out);
    out
}
