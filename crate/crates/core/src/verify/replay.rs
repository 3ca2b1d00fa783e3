use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::codegen::{is_visual_property, CssRule, HtmlDoc, HtmlNode};
use crate::geometry::Rect;

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("unsupported property `{property}` in `{selector}`")]
    UnsupportedProperty { selector: String, property: String },
    #[error("unsupported value `{value}` for `{property}` in `{selector}`")]
    UnsupportedValue {
        selector: String,
        property: String,
        value: String,
    },
    #[error("unsupported selector `{0}`")]
    UnsupportedSelector(String),
}

/// A computed border box, keyed by classname.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayBox {
    pub id: String,
    pub rect: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Position {
    #[default]
    Static,
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Default)]
struct Style {
    flex: bool,
    column: bool,
    position: Position,
    top: f64,
    left: f64,
    width: Option<f64>,
    height: Option<f64>,
    margin_top: f64,
    margin_left: f64,
}

fn length(selector: &str, property: &str, value: &str) -> Result<f64, ReplayError> {
    let bad = || ReplayError::UnsupportedValue {
        selector: selector.to_string(),
        property: property.to_string(),
        value: value.to_string(),
    };
    let num = value.strip_suffix("px").unwrap_or(if value == "0" { value } else { "" });
    let v: f64 = num.trim().parse().map_err(|_| bad())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn compile(rules: &[CssRule]) -> Result<HashMap<String, Style>, ReplayError> {
    let mut out = HashMap::new();
    for rule in rules {
        let sel = rule.selector.as_str();
        let class = sel
            .strip_prefix('.')
            .filter(|c| !c.is_empty() && !c.contains([' ', '.', '>', ':', '#', '[', ',']))
            .ok_or_else(|| ReplayError::UnsupportedSelector(sel.to_string()))?;
        let style: &mut Style = out.entry(class.to_string()).or_default();
        for d in &rule.declarations {
            let (p, v) = (d.property.as_str(), d.value.as_str());
            let bad_value = || ReplayError::UnsupportedValue {
                selector: sel.to_string(),
                property: p.to_string(),
                value: v.to_string(),
            };
            match p {
                "display" => match v {
                    "flex" => style.flex = true,
                    "block" => style.flex = false,
                    _ => return Err(bad_value()),
                },
                "flex-direction" => match v {
                    "row" => style.column = false,
                    "column" => style.column = true,
                    _ => return Err(bad_value()),
                },
                "position" => {
                    style.position = match v {
                        "static" => Position::Static,
                        "relative" => Position::Relative,
                        "absolute" => Position::Absolute,
                        _ => return Err(bad_value()),
                    }
                }
                "flex-shrink" => {
                    v.parse::<f64>().map_err(|_| bad_value())?;
                }
                "top" => style.top = length(sel, p, v)?,
                "left" => style.left = length(sel, p, v)?,
                "width" => style.width = Some(length(sel, p, v)?),
                "height" => style.height = Some(length(sel, p, v)?),
                "margin-top" => style.margin_top = length(sel, p, v)?,
                "margin-left" => style.margin_left = length(sel, p, v)?,
                _ if is_visual_property(p) => {}
                _ => {
                    return Err(ReplayError::UnsupportedProperty {
                        selector: sel.to_string(),
                        property: p.to_string(),
                    })
                }
            }
        }
    }
    Ok(out)
}

/// Computes every element's box from the emitted HTML and CSS, in
/// pre-order.
///
/// Supports exactly the emitted subset: flex rows and columns whose items
/// advance a cursor by margin plus size, block flow, `relative` containers
/// with `absolute` children offset by `top`/`left`, and fixed sizes. Visual
/// properties are ignored; anything else is rejected.
pub fn replay_layout(html: &HtmlDoc, css: &[CssRule], viewport: Rect) -> Result<Vec<ReplayBox>, ReplayError> {
    let styles = compile(css)?;
    let mut out = Vec::new();
    let default = Style::default();
    let root_style = styles.get(&html.root.class).unwrap_or(&default);
    let x = viewport.x + root_style.margin_left;
    let y = viewport.y + root_style.margin_top;
    place(&html.root, x, y, viewport.w, viewport, &styles, &mut out);
    Ok(out)
}

fn place(
    node: &HtmlNode,
    x: f64,
    y: f64,
    avail_w: f64,
    positioned: Rect,
    styles: &HashMap<String, Style>,
    out: &mut Vec<ReplayBox>,
) -> Rect {
    let default = Style::default();
    let style = styles.get(&node.class).unwrap_or(&default);
    let (x, y) = if style.position == Position::Relative {
        (x + style.left, y + style.top)
    } else {
        (x, y)
    };
    let w = style.width.unwrap_or(avail_w);
    let slot = out.len();
    out.push(ReplayBox {
        id: node.class.clone(),
        rect: Rect::new(x, y, w, style.height.unwrap_or(0.0)),
    });

    let provisional = Rect::new(x, y, w, style.height.unwrap_or(0.0));
    let anchor = if style.position == Position::Static {
        positioned
    } else {
        provisional
    };
    let mut cursor = if style.flex && !style.column { x } else { y };
    let mut bottom = y;
    for child in &node.children {
        let cs = styles.get(&child.class).unwrap_or(&default);
        let r = if cs.position == Position::Absolute {
            place(child, anchor.x + cs.left, anchor.y + cs.top, w, anchor, styles, out)
        } else if style.flex && !style.column {
            let r = place(child, cursor + cs.margin_left, y + cs.margin_top, w, anchor, styles, out);
            cursor = r.right();
            r
        } else {
            let r = place(child, x + cs.margin_left, cursor + cs.margin_top, w, anchor, styles, out);
            cursor = r.bottom();
            r
        };
        if cs.position != Position::Absolute {
            bottom = bottom.max(r.bottom());
        }
    }
    let h = style.height.unwrap_or(bottom - y);
    out[slot].rect.h = h;
    Rect::new(x, y, w, h)
}

/// Per-node difference between replayed and expected boxes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDeviation {
    pub id: String,
    pub classname: String,
    pub expected: Rect,
    pub replayed: Rect,
    /// Largest absolute difference over x, y, w and h.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub nodes: Vec<NodeDeviation>,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    /// Expected classnames with no replayed box.
    pub missing: Vec<String>,
}

/// Compares replayed boxes with expected rects, matched by classname.
/// `expected` pairs are `(node id, classname, rect)`.
pub fn deviation_report(boxes: &[ReplayBox], expected: &[(String, String, Rect)]) -> DeviationReport {
    let by_class: HashMap<&str, &Rect> = boxes.iter().map(|b| (b.id.as_str(), &b.rect)).collect();
    let mut nodes = Vec::new();
    let mut missing = Vec::new();
    for (id, class, rect) in expected {
        match by_class.get(class.as_str()) {
            Some(r) => {
                let deviation = [r.x - rect.x, r.y - rect.y, r.w - rect.w, r.h - rect.h]
                    .iter()
                    .fold(0.0f64, |m, d| m.max(d.abs()));
                nodes.push(NodeDeviation {
                    id: id.clone(),
                    classname: class.clone(),
                    expected: *rect,
                    replayed: **r,
                    deviation,
                });
            }
            None => missing.push(class.clone()),
        }
    }
    let max_deviation = nodes.iter().fold(0.0f64, |m, n| m.max(n.deviation));
    let mean_deviation = if nodes.is_empty() {
        0.0
    } else {
        nodes.iter().map(|n| n.deviation).sum::<f64>() / nodes.len() as f64
    };
    DeviationReport {
        nodes,
        max_deviation,
        mean_deviation,
        missing,
    }
}
