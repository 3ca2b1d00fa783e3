use std::fmt::Write as _;

use crate::geometry::Rect;
use crate::layout::{FlexDirection, LayoutNode, LayoutTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub property: String,
    pub value: String,
}

impl Declaration {
    pub fn new(property: &str, value: impl Into<String>) -> Self {
        Declaration {
            property: property.to_string(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssRule {
    pub selector: String,
    pub declarations: Vec<Declaration>,
}

impl CssRule {
    pub fn get(&self, property: &str) -> Option<&str> {
        self.declarations
            .iter()
            .find(|d| d.property == property)
            .map(|d| d.value.as_str())
    }
}

pub(crate) fn round2(v: f64) -> f64 {
    let r = (v * 100.0).round() / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Formats a pixel length rounded to two decimals, without trailing zeros.
pub fn fmt_px(v: f64) -> String {
    let s = format!("{:.2}", round2(v));
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}px")
}

/// Rounded offset and size of `r` relative to `origin`.
fn rel(r: &Rect, origin: &Rect) -> (f64, f64, f64, f64) {
    (round2(r.x - origin.x), round2(r.y - origin.y), round2(r.w), round2(r.h))
}

/// One layout rule per node, in pre-order.
///
/// A `need_absolute` node is `position: relative` and its children are
/// `position: absolute` at their offset from it. Any other parent is a flex
/// container; each flex child gets `margin-left`/`margin-top` from its gap
/// to the previous sibling along the main axis (the parent edge for the
/// first child) and from the parent edge on the cross axis. Margins are
/// computed from rounded offsets so they do not accumulate error.
pub fn emit_layout_css(tree: &LayoutTree) -> Vec<CssRule> {
    let mut out = Vec::new();
    emit_node(&tree.root, None, &mut out);
    out
}

fn selector(node: &LayoutNode) -> String {
    format!(".{}", node.classname.as_deref().unwrap_or(&node.id))
}

fn emit_node(node: &LayoutNode, placement: Option<Vec<Declaration>>, out: &mut Vec<CssRule>) {
    let mut decls = Vec::new();
    let absolute_child = placement
        .as_ref()
        .is_some_and(|p| p.iter().any(|d| d.property == "position"));
    if !node.children.is_empty() && !node.need_absolute {
        decls.push(Declaration::new("display", "flex"));
        if let Some(dir) = node.flex_direction {
            decls.push(Declaration::new("flex-direction", dir.as_str()));
        }
    }
    if node.need_absolute && !absolute_child {
        decls.push(Declaration::new("position", "relative"));
    }
    let placement = placement.unwrap_or_default();
    let (pos, rest): (Vec<_>, Vec<_>) = placement
        .into_iter()
        .partition(|d| matches!(d.property.as_str(), "position" | "top" | "left"));
    decls.extend(pos);
    decls.push(Declaration::new("width", fmt_px(node.rect.w)));
    decls.push(Declaration::new("height", fmt_px(node.rect.h)));
    decls.extend(rest);
    out.push(CssRule {
        selector: selector(node),
        declarations: decls,
    });

    let placements = child_placements(node);
    for (child, p) in node.children.iter().zip(placements) {
        emit_node(child, Some(p), out);
    }
}

fn child_placements(node: &LayoutNode) -> Vec<Vec<Declaration>> {
    let origin = node.rect;
    if node.need_absolute {
        return node
            .children
            .iter()
            .map(|c| {
                let (x, y, _, _) = rel(&c.rect, &origin);
                vec![
                    Declaration::new("position", "absolute"),
                    Declaration::new("top", fmt_px(y)),
                    Declaration::new("left", fmt_px(x)),
                ]
            })
            .collect();
    }
    let column = node.flex_direction == Some(FlexDirection::Column);
    let mut cursor = 0.0;
    node.children
        .iter()
        .map(|c| {
            let (x, y, w, h) = rel(&c.rect, &origin);
            let (mt, ml) = if column {
                let m = round2(y - cursor);
                cursor = y + h;
                (m, x)
            } else {
                let m = round2(x - cursor);
                cursor = x + w;
                (y, m)
            };
            vec![
                Declaration::new("margin-top", fmt_px(mt)),
                Declaration::new("margin-left", fmt_px(ml)),
                Declaration::new("flex-shrink", "0"),
            ]
        })
        .collect()
}

/// Serializes rules, one declaration per line, blank line between rules.
pub fn render_stylesheet(rules: &[CssRule]) -> String {
    let mut s = String::new();
    for (i, r) in rules.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "{} {{", r.selector);
        for d in &r.declarations {
            let _ = writeln!(s, "  {}: {};", d.property, d.value);
        }
        s.push_str("}\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{root_node, LayoutKind};
    use crate::model::LayerKind;

    fn el(id: &str, x: f64, y: f64, w: f64, h: f64) -> LayoutNode {
        let mut n = LayoutNode::new(id.into(), Rect::new(x, y, w, h), LayoutKind::Layer(LayerKind::Shape), 0);
        n.classname = Some(id.into());
        n
    }

    #[test]
    fn px_formatting() {
        assert_eq!(fmt_px(20.0), "20px");
        assert_eq!(fmt_px(12.345), "12.35px");
        assert_eq!(fmt_px(0.1 + 0.2), "0.3px");
        assert_eq!(fmt_px(-0.001), "0px");
        assert_eq!(fmt_px(-3.5), "-3.5px");
    }

    #[test]
    fn row_margin_is_the_gap() {
        let mut root = root_node(Rect::new(0.0, 0.0, 100.0, 50.0));
        root.flex_direction = Some(FlexDirection::Row);
        root.children = vec![el("a", 0.0, 0.0, 10.0, 10.0), el("b", 30.0, 5.0, 10.0, 10.0)];
        let rules = emit_layout_css(&LayoutTree { root });
        assert_eq!(rules[0].get("flex-direction"), Some("row"));
        assert_eq!(rules[2].get("margin-left"), Some("20px"));
        assert_eq!(rules[2].get("margin-top"), Some("5px"));
    }

    #[test]
    fn absolute_children_are_offsets() {
        let mut root = root_node(Rect::new(0.0, 0.0, 100.0, 100.0));
        let mut w = el("w", 10.0, 10.0, 50.0, 50.0);
        w.need_absolute = true;
        w.children = vec![el("c", 15.0, 22.0, 5.0, 5.0)];
        root.children = vec![w];
        let rules = emit_layout_css(&LayoutTree { root });
        assert_eq!(rules[1].get("position"), Some("relative"));
        assert_eq!(rules[2].get("position"), Some("absolute"));
        assert_eq!(rules[2].get("top"), Some("12px"));
        assert_eq!(rules[2].get("left"), Some("5px"));
    }

    #[test]
    fn root_only_tree() {
        let mut root = root_node(Rect::new(0.0, 0.0, 375.0, 812.0));
        root.classname = Some("container-1".into());
        let rules = emit_layout_css(&LayoutTree { root });
        assert_eq!(rules.len(), 1);
        assert_eq!(
            render_stylesheet(&rules),
            ".container-1 {\n  width: 375px;\n  height: 812px;\n}\n"
        );
    }
}
