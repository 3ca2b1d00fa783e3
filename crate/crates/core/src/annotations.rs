//! Human or model annotations attached to a prototype: fragment merge sets and
//! perceptual group boxes.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Rect;
use crate::model::{Layer, LayerKind, PrototypeDoc};

#[derive(Debug, Error, PartialEq)]
pub enum AnnotationError {
    #[error("annotation schema error: {0}")]
    Schema(String),
    #[error("annotation references unknown layer id `{0}`")]
    UnknownLayerId(String),
    #[error("layer `{0}` appears in more than one merge set")]
    OverlappingMergeSets(String),
    #[error("unknown perceptual group type `{0}`")]
    UnknownGroupType(String),
}

/// The five perceptual group classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupType {
    Toolbar,
    NavigationBar,
    Card,
    ListItem,
    Container,
}

impl GroupType {
    pub const ALL: [GroupType; 5] = [
        GroupType::Toolbar,
        GroupType::NavigationBar,
        GroupType::Card,
        GroupType::ListItem,
        GroupType::Container,
    ];

    pub fn parse(s: &str) -> Option<GroupType> {
        GroupType::ALL.into_iter().find(|g| g.as_str() == s)
    }

    /// Wire name, e.g. `navigation_bar`.
    pub fn as_str(self) -> &'static str {
        match self {
            GroupType::Toolbar => "toolbar",
            GroupType::NavigationBar => "navigation_bar",
            GroupType::Card => "card",
            GroupType::ListItem => "list_item",
            GroupType::Container => "container",
        }
    }

    /// Element-type label, e.g. `navigation-bar`.
    pub fn label(self) -> &'static str {
        match self {
            GroupType::Toolbar => "toolbar",
            GroupType::NavigationBar => "navigation-bar",
            GroupType::Card => "card",
            GroupType::ListItem => "list-item",
            GroupType::Container => "container",
        }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedGroup {
    #[serde(rename = "type")]
    pub group_type: GroupType,
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationSet {
    /// Each set lists leaf layer ids that form one fragmented element.
    pub merge_groups: Vec<Vec<String>>,
    pub perceptual_groups: Vec<AnnotatedGroup>,
}

impl AnnotationSet {
    pub fn is_empty(&self) -> bool {
        self.merge_groups.is_empty() && self.perceptual_groups.is_empty()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnnotations {
    #[serde(default)]
    merge_groups: Vec<Vec<String>>,
    #[serde(default)]
    perceptual_groups: Vec<RawGroup>,
}

#[derive(Deserialize)]
struct RawGroup {
    #[serde(rename = "type")]
    group_type: String,
    rect: Rect,
}

/// Parses an annotation file and resolves every id against `doc`.
///
/// Ids naming a group layer expand to that group's leaf layers. An empty
/// file is an empty annotation set.
pub fn parse_annotations(bytes: &[u8], doc: &PrototypeDoc) -> Result<AnnotationSet, AnnotationError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(AnnotationSet::default());
    }
    let raw: RawAnnotations =
        serde_json::from_slice(bytes).map_err(|e| AnnotationError::Schema(e.to_string()))?;
    let index = doc.layer_index();

    let mut claimed: HashMap<String, usize> = HashMap::new();
    let mut merge_groups = Vec::with_capacity(raw.merge_groups.len());
    for (set_idx, set) in raw.merge_groups.into_iter().enumerate() {
        let mut resolved = Vec::new();
        let mut local = HashSet::new();
        for id in set {
            let layer = index
                .get(id.as_str())
                .ok_or_else(|| AnnotationError::UnknownLayerId(id.clone()))?;
            for leaf in leaf_ids(layer) {
                if !local.insert(leaf.clone()) {
                    continue;
                }
                if let Some(prev) = claimed.insert(leaf.clone(), set_idx) {
                    if prev != set_idx {
                        return Err(AnnotationError::OverlappingMergeSets(leaf));
                    }
                }
                resolved.push(leaf);
            }
        }
        merge_groups.push(resolved);
    }

    let perceptual_groups = raw
        .perceptual_groups
        .into_iter()
        .map(|g| {
            let group_type =
                GroupType::parse(&g.group_type).ok_or(AnnotationError::UnknownGroupType(g.group_type))?;
            if g.rect.w < 0.0 || g.rect.h < 0.0 || !g.rect.is_finite() {
                return Err(AnnotationError::Schema(format!("invalid group rect {:?}", g.rect)));
            }
            Ok(AnnotatedGroup {
                group_type,
                rect: g.rect,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(AnnotationSet {
        merge_groups,
        perceptual_groups,
    })
}

fn leaf_ids(layer: &Layer) -> Vec<String> {
    if layer.kind != LayerKind::Group {
        return vec![layer.id.clone()];
    }
    layer.children.iter().flat_map(leaf_ids).collect()
}
