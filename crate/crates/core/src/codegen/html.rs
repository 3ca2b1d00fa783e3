use std::fmt::Write as _;

use crate::layout::{LayoutKind, LayoutNode, LayoutTree};
use crate::model::{LayerKind, PrototypeDoc};

use super::{asset_path, is_asset_leaf, CodegenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Div,
    Span,
    Img,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Div => "div",
            Tag::Span => "span",
            Tag::Img => "img",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        match s {
            "div" => Some(Tag::Div),
            "span" => Some(Tag::Span),
            "img" => Some(Tag::Img),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HtmlNode {
    pub tag: Tag,
    pub class: String,
    /// Text content of a span.
    pub text: Option<String>,
    /// Placeholder path of an img.
    pub src: Option<String>,
    pub children: Vec<HtmlNode>,
}

impl HtmlNode {
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a HtmlNode)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }
}

/// An HTML page whose body holds a single root element.
#[derive(Debug, Clone, PartialEq)]
pub struct HtmlDoc {
    pub root: HtmlNode,
    pub stylesheet: String,
}

pub(crate) fn escape(s: &str, attr: bool) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attr => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

impl HtmlDoc {
    /// Serializes with 2-space indentation and a trailing newline.
    pub fn to_html(&self) -> String {
        let mut s = String::new();
        s.push_str("<!DOCTYPE html>\n<html>\n<head>\n");
        s.push_str("  <meta charset=\"utf-8\">\n");
        let _ = writeln!(s, "  <link rel=\"stylesheet\" href=\"{}\">", escape(&self.stylesheet, true));
        s.push_str("</head>\n<body style=\"margin: 0\">\n");
        write_node(&mut s, &self.root, 1);
        s.push_str("</body>\n</html>\n");
        s
    }

    pub fn count(&self, tag: Tag) -> usize {
        let mut n = 0;
        self.root.visit(&mut |h| {
            if h.tag == tag {
                n += 1;
            }
        });
        n
    }

    pub fn classnames(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.visit(&mut |h| out.push(h.class.as_str()));
        out
    }
}

fn write_node(s: &mut String, node: &HtmlNode, depth: usize) {
    let pad = "  ".repeat(depth);
    let class = escape(&node.class, true);
    match node.tag {
        Tag::Img => {
            let src = escape(node.src.as_deref().unwrap_or(""), true);
            let _ = writeln!(s, "{pad}<img class=\"{class}\" src=\"{src}\">");
        }
        Tag::Span => {
            let text = escape(node.text.as_deref().unwrap_or(""), false);
            let _ = writeln!(s, "{pad}<span class=\"{class}\">{text}</span>");
        }
        Tag::Div if node.children.is_empty() => {
            let _ = writeln!(s, "{pad}<div class=\"{class}\"></div>");
        }
        Tag::Div => {
            let _ = writeln!(s, "{pad}<div class=\"{class}\">");
            for c in &node.children {
                write_node(s, c, depth + 1);
            }
            let _ = writeln!(s, "{pad}</div>");
        }
    }
}

/// Builds the HTML skeleton of a labeled layout tree.
///
/// The root and every non-leaf become `div`s, text leaves `span`s carrying
/// the layer text, and the remaining leaves (images, icons, merged
/// fragments, shapes) `img` placeholders at `assets/<id>.png`.
pub fn emit_html(tree: &LayoutTree, doc: &PrototypeDoc) -> Result<HtmlDoc, CodegenError> {
    let layers = doc.layer_index();
    fn build(
        node: &LayoutNode,
        layers: &std::collections::HashMap<&str, &crate::model::Layer>,
    ) -> Result<HtmlNode, CodegenError> {
        let class = node
            .classname
            .clone()
            .ok_or_else(|| CodegenError::UntypedNode(node.id.clone()))?;
        if node.kind == LayoutKind::Layer(LayerKind::Text) && node.is_leaf() {
            let text = layers.get(node.id.as_str()).and_then(|l| l.text.clone()).unwrap_or_default();
            return Ok(HtmlNode {
                tag: Tag::Span,
                class,
                text: Some(text),
                src: None,
                children: Vec::new(),
            });
        }
        if is_asset_leaf(node) {
            return Ok(HtmlNode {
                tag: Tag::Img,
                class,
                text: None,
                src: Some(asset_path(&node.id)),
                children: Vec::new(),
            });
        }
        let children = node
            .children
            .iter()
            .map(|c| build(c, layers))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HtmlNode {
            tag: Tag::Div,
            class,
            text: None,
            src: None,
            children,
        })
    }
    Ok(HtmlDoc {
        root: build(&tree.root, &layers)?,
        stylesheet: "style.css".to_string(),
    })
}
