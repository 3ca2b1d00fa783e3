//! Strict parsers for the emitted HTML and CSS subsets.

use thiserror::Error;

use crate::codegen::{CssRule, Declaration, HtmlDoc, HtmlNode, Tag};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unterminated tag at byte {0}")]
    UnterminatedTag(usize),
    #[error("unexpected closing tag </{found}> at byte {at}, expected {expected}")]
    Mismatched { found: String, expected: String, at: usize },
    #[error("unclosed tag <{0}>")]
    Unclosed(String),
    #[error("unsupported element <{0}> in body")]
    UnsupportedTag(String),
    #[error("document has no body element with a single root")]
    NoRoot,
    #[error("css: {0}")]
    Css(String),
}

const VOID: &[&str] = &["img", "meta", "link", "br", "hr", "input"];

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open { name: String, attrs: Vec<(String, String)>, at: usize },
    Close { name: String, at: usize },
    Text(String),
}

fn unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

fn parse_attrs(src: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        let name_end = rest.find(|c: char| c == '=' || c.is_whitespace()).unwrap_or(rest.len());
        let name = rest[..name_end].to_ascii_lowercase();
        rest = rest[name_end..].trim_start();
        let mut value = String::new();
        if let Some(r) = rest.strip_prefix('=') {
            let r = r.trim_start();
            if let Some(q) = r.chars().next().filter(|c| *c == '"' || *c == '\'') {
                let body = &r[1..];
                let end = body.find(q).unwrap_or(body.len());
                value = unescape(&body[..end]);
                rest = body.get(end + 1..).unwrap_or("").trim_start();
            } else {
                let end = r.find(char::is_whitespace).unwrap_or(r.len());
                value = unescape(&r[..end]);
                rest = r[end..].trim_start();
            }
        }
        if !name.is_empty() {
            out.push((name, value));
        }
    }
    out
}

fn tokenize(html: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < html.len() {
        let rest = &html[i..];
        if rest.starts_with("<!--") {
            let end = rest.find("-->").ok_or(ParseError::UnterminatedTag(i))?;
            i += end + 3;
        } else if rest.starts_with("<!") {
            let end = rest.find('>').ok_or(ParseError::UnterminatedTag(i))?;
            i += end + 1;
        } else if let Some(r) = rest.strip_prefix("</") {
            let end = r.find('>').ok_or(ParseError::UnterminatedTag(i))?;
            out.push(Token::Close {
                name: r[..end].trim().to_ascii_lowercase(),
                at: i,
            });
            i += end + 3;
        } else if let Some(r) = rest.strip_prefix('<') {
            let end = r.find('>').ok_or(ParseError::UnterminatedTag(i))?;
            let inner = r[..end].trim_end_matches('/');
            let name_end = inner.find(char::is_whitespace).unwrap_or(inner.len());
            out.push(Token::Open {
                name: inner[..name_end].to_ascii_lowercase(),
                attrs: parse_attrs(&inner[name_end..]),
                at: i,
            });
            i += end + 2;
        } else {
            let end = rest.find('<').unwrap_or(rest.len());
            out.push(Token::Text(unescape(&rest[..end])));
            i += end;
        }
    }
    Ok(out)
}

/// Checks that every non-void element is closed, in nesting order.
pub fn check_tag_balance(html: &str) -> Result<(), ParseError> {
    let mut stack: Vec<String> = Vec::new();
    for tok in tokenize(html)? {
        match tok {
            Token::Open { name, .. } if !VOID.contains(&name.as_str()) => stack.push(name),
            Token::Close { name, at } => match stack.pop() {
                Some(open) if open == name => {}
                Some(open) => {
                    return Err(ParseError::Mismatched {
                        found: name,
                        expected: format!("</{open}>"),
                        at,
                    })
                }
                None => {
                    return Err(ParseError::Mismatched {
                        found: name,
                        expected: "no closing tag".into(),
                        at,
                    })
                }
            },
            _ => {}
        }
    }
    match stack.pop() {
        Some(open) => Err(ParseError::Unclosed(open)),
        None => Ok(()),
    }
}

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    text: String,
    children: Vec<Element>,
}

impl Element {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn find(&self, name: &str) -> Option<&Element> {
        if self.name == name {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(name))
    }
}

fn to_html_node(e: &Element) -> Result<HtmlNode, ParseError> {
    let tag = Tag::parse(&e.name).ok_or_else(|| ParseError::UnsupportedTag(e.name.clone()))?;
    Ok(HtmlNode {
        tag,
        class: e.attr("class").unwrap_or("").to_string(),
        text: (tag == Tag::Span).then(|| e.text.clone()),
        src: e.attr("src").map(str::to_string),
        children: e.children.iter().map(to_html_node).collect::<Result<_, _>>()?,
    })
}

/// Parses an emitted page back into its [`HtmlDoc`].
pub fn parse_html(html: &str) -> Result<HtmlDoc, ParseError> {
    check_tag_balance(html)?;
    let mut stack = vec![Element {
        name: "#document".into(),
        attrs: Vec::new(),
        text: String::new(),
        children: Vec::new(),
    }];
    for tok in tokenize(html)? {
        match tok {
            Token::Open { name, attrs, .. } => {
                let void = VOID.contains(&name.as_str());
                let el = Element {
                    name,
                    attrs,
                    text: String::new(),
                    children: Vec::new(),
                };
                if void {
                    stack.last_mut().expect("document").children.push(el);
                } else {
                    stack.push(el);
                }
            }
            Token::Close { .. } => {
                let el = stack.pop().expect("balanced");
                stack.last_mut().expect("document").children.push(el);
            }
            Token::Text(t) => stack.last_mut().expect("document").text.push_str(&t),
        }
    }
    let doc = stack.pop().expect("document");
    let stylesheet = doc
        .find("link")
        .and_then(|l| l.attr("href"))
        .unwrap_or("style.css")
        .to_string();
    let body = doc.find("body").ok_or(ParseError::NoRoot)?;
    let [root] = body.children.as_slice() else {
        return Err(ParseError::NoRoot);
    };
    Ok(HtmlDoc {
        root: to_html_node(root)?,
        stylesheet,
    })
}

/// Parses `selector { property: value; ... }` blocks.
pub fn parse_css(css: &str) -> Result<Vec<CssRule>, ParseError> {
    let mut clean = String::with_capacity(css.len());
    let mut rest = css;
    while let Some(start) = rest.find("/*") {
        clean.push_str(&rest[..start]);
        let end = rest[start..]
            .find("*/")
            .ok_or_else(|| ParseError::Css("unterminated comment".into()))?;
        rest = &rest[start + end + 2..];
    }
    clean.push_str(rest);

    let mut rules = Vec::new();
    let mut rest = clean.as_str();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let open = rest.find('{').ok_or_else(|| ParseError::Css(format!("expected `{{` after `{}`", rest.trim())))?;
        let close = rest.find('}').ok_or_else(|| ParseError::Css("unterminated rule".into()))?;
        if close < open {
            return Err(ParseError::Css("unexpected `}`".into()));
        }
        let selector = rest[..open].trim().to_string();
        if selector.is_empty() {
            return Err(ParseError::Css("empty selector".into()));
        }
        let mut declarations = Vec::new();
        for decl in rest[open + 1..close].split(';') {
            let decl = decl.trim();
            if decl.is_empty() {
                continue;
            }
            let (p, v) = decl
                .split_once(':')
                .ok_or_else(|| ParseError::Css(format!("declaration `{decl}` has no value")))?;
            declarations.push(Declaration::new(p.trim(), v.trim()));
        }
        rules.push(CssRule { selector, declarations });
        rest = &rest[close + 1..];
    }
    Ok(rules)
}
