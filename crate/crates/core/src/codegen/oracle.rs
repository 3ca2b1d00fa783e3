use crate::layout::{LayoutKind, LayoutNode};
use crate::model::{LayerKind, StyleProps, StyleValue};

use super::css::fmt_px;
use super::Declaration;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleOutput {
    pub declarations: Vec<Declaration>,
    pub warnings: Vec<String>,
}

/// Produces visual CSS for one node from its layer style.
pub trait StyleOracle {
    fn name(&self) -> &'static str;
    fn declarations(&self, node: &LayoutNode, style: &StyleProps) -> Result<OracleOutput, String>;
}

/// Offline oracle: maps style keys straight onto CSS properties.
#[derive(Debug, Clone, Copy, Default)]
pub struct RulesOracle;

impl StyleOracle for RulesOracle {
    fn name(&self) -> &'static str {
        "rules"
    }

    fn declarations(&self, node: &LayoutNode, style: &StyleProps) -> Result<OracleOutput, String> {
        Ok(style_oracle_rules(node, style))
    }
}

fn text_value(v: &StyleValue) -> Option<String> {
    let s = match v {
        StyleValue::Text(s) => s.trim().to_string(),
        StyleValue::Number(n) => format!("{n}"),
        StyleValue::Flag(_) => return None,
    };
    // Keep values inside a single declaration.
    if s.is_empty() || s.contains([';', '{', '}', '<', '>']) {
        None
    } else {
        Some(s)
    }
}

fn px_value(v: &StyleValue) -> Option<String> {
    match v {
        StyleValue::Number(n) if n.is_finite() => Some(fmt_px(*n)),
        other => other.as_f64().filter(|n| n.is_finite()).map(fmt_px).or_else(|| text_value(other)),
    }
}

/// Direct style-to-CSS mapping. `fill` is the text color on text layers and
/// the background color elsewhere; lengths get `px` units; keys with no
/// mapping are skipped with a warning.
pub fn style_oracle_rules(node: &LayoutNode, style: &StyleProps) -> OracleOutput {
    let is_text = node.kind == LayoutKind::Layer(LayerKind::Text);
    let mut out = OracleOutput::default();
    for (key, value) in style.iter() {
        let mapped: Option<Vec<(&str, Option<String>)>> = match key.as_str() {
            "fill" => Some(vec![(if is_text { "color" } else { "background-color" }, text_value(value))]),
            "color" => Some(vec![("color", text_value(value))]),
            "background" => Some(vec![("background", text_value(value))]),
            "font-family" => Some(vec![("font-family", text_value(value))]),
            "font-weight" => Some(vec![("font-weight", text_value(value))]),
            "font-size" => Some(vec![("font-size", px_value(value))]),
            "line-height" => Some(vec![("line-height", px_value(value))]),
            "border-radius" => Some(vec![("border-radius", px_value(value))]),
            "border-width" => Some(vec![
                ("border-width", px_value(value)),
                ("border-style", Some("solid".to_string())),
            ]),
            "border-color" => Some(vec![("border-color", text_value(value))]),
            "opacity" => Some(vec![("opacity", text_value(value))]),
            "shadow" => Some(vec![("box-shadow", text_value(value))]),
            _ => None,
        };
        match mapped {
            None => out.warnings.push(format!("unknown style key `{key}` skipped")),
            Some(pairs) => {
                for (prop, v) in pairs {
                    match v {
                        Some(v) => out.declarations.push(Declaration::new(prop, v)),
                        None => out.warnings.push(format!("unusable value for `{key}` skipped")),
                    }
                }
            }
        }
    }
    out
}
