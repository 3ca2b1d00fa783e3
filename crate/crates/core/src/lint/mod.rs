//! Prototype linting: rebuild the containment hierarchy from geometry, mark
//! fragmented elements for merging, and wrap perceptual groups.
//!
//! Detection itself is pluggable through [`Detector`]. Two implementations
//! ship: [`Passthrough`] echoes an [`AnnotationSet`], [`Heuristic`] applies
//! fixed geometric rules.

mod fragments;
mod groups;
mod hierarchy;

use std::collections::HashSet;

use serde::Serialize;

pub use fragments::{apply_merge_attr, detect_fragments_heuristic, detect_fragments_passthrough};
pub use groups::{assign_group_membership, detect_groups_heuristic, passthrough_groups, GroupRules};
pub use hierarchy::rebuild_hierarchy;

use crate::annotations::{AnnotationSet, GroupType};
use crate::config::{DetectorKind, PipelineConfig};
use crate::geometry::Rect;
use crate::model::{LayerKind, PrototypeDoc};

/// Identifier of the synthetic canvas root.
pub const ROOT_ID: &str = "root";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "layer")]
pub enum HierarchyKind {
    /// Synthetic node covering the canvas.
    Root,
    /// One prototype leaf layer.
    Layer(LayerKind),
    /// Node introduced by linting (merge or group wrapper).
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AttrSet {
    pub merge: bool,
    pub group: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_type: Option<GroupType>,
}

impl AttrSet {
    pub fn grouped(group_type: GroupType) -> Self {
        AttrSet {
            merge: false,
            group: true,
            group_type: Some(group_type),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyNode {
    pub id: String,
    pub rect: Rect,
    pub kind: HierarchyKind,
    /// Document order of the layer; synthetic nodes take their first member's.
    pub order: usize,
    pub attrs: AttrSet,
    pub children: Vec<HierarchyNode>,
}

impl HierarchyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn layer_kind(&self) -> Option<LayerKind> {
        match self.kind {
            HierarchyKind::Layer(k) => Some(k),
            _ => None,
        }
    }

    /// Merge and group nodes are treated as single units.
    pub fn is_atomic(&self) -> bool {
        self.attrs.merge || self.attrs.group
    }

    /// Ids of every layer node in this subtree, self included, in pre-order.
    pub fn layer_ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if n.layer_kind().is_some() {
                out.push(n.id.clone());
            }
        });
        out
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a HierarchyNode)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    pub fn find(&self, id: &str) -> Option<&HierarchyNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(HierarchyNode::node_count).sum::<usize>()
    }

    pub(crate) fn all_ids(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        self.visit(&mut |n| {
            out.insert(n.id.clone());
        });
        out
    }

    pub(crate) fn sort_children(&mut self) {
        self.children.sort_by_key(|c| c.order);
    }
}

/// A detected perceptual region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerceptualGroup {
    #[serde(rename = "type")]
    pub group_type: GroupType,
    pub rect: Rect,
    pub member_ids: Vec<String>,
    pub confidence: f64,
}

/// Fragment and group detection. Implementations must be deterministic.
pub trait Detector {
    fn name(&self) -> &'static str;

    /// Merge sets of fragmented leaf layers, plus warnings.
    fn fragments(&self, hierarchy: &HierarchyNode, annotations: &AnnotationSet) -> (Vec<Vec<String>>, Vec<String>);

    /// Perceptual groups over the merged hierarchy.
    fn groups(&self, doc: &PrototypeDoc, hierarchy: &HierarchyNode, annotations: &AnnotationSet) -> Vec<PerceptualGroup>;
}

/// Echoes whatever the annotation file says.
#[derive(Debug, Clone)]
pub struct Passthrough {
    pub eps: f64,
}

impl Detector for Passthrough {
    fn name(&self) -> &'static str {
        "passthrough"
    }

    fn fragments(&self, hierarchy: &HierarchyNode, annotations: &AnnotationSet) -> (Vec<Vec<String>>, Vec<String>) {
        detect_fragments_passthrough(hierarchy, annotations)
    }

    fn groups(&self, _doc: &PrototypeDoc, hierarchy: &HierarchyNode, annotations: &AnnotationSet) -> Vec<PerceptualGroup> {
        passthrough_groups(hierarchy, annotations, self.eps)
    }
}

/// Geometric reference detector.
#[derive(Debug, Clone)]
pub struct Heuristic {
    pub max_icon_px: f64,
    pub gap_px: f64,
    pub rules: GroupRules,
}

impl Detector for Heuristic {
    fn name(&self) -> &'static str {
        "heuristic"
    }

    fn fragments(&self, hierarchy: &HierarchyNode, _annotations: &AnnotationSet) -> (Vec<Vec<String>>, Vec<String>) {
        (detect_fragments_heuristic(hierarchy, self.max_icon_px, self.gap_px), Vec::new())
    }

    fn groups(&self, doc: &PrototypeDoc, hierarchy: &HierarchyNode, _annotations: &AnnotationSet) -> Vec<PerceptualGroup> {
        detect_groups_heuristic(doc, hierarchy, &self.rules)
    }
}

/// Resolves the configured detector.
pub fn detector_for(config: &PipelineConfig) -> Box<dyn Detector> {
    match config.detector {
        DetectorKind::Passthrough => Box::new(Passthrough {
            eps: config.eps_containment,
        }),
        DetectorKind::Heuristic => Box::new(Heuristic {
            max_icon_px: config.max_icon_px,
            gap_px: config.gap_px,
            rules: GroupRules::from_config(config),
        }),
    }
}

/// Output of the linting stage.
#[derive(Debug, Clone, PartialEq)]
pub struct LintOutcome {
    pub hierarchy: HierarchyNode,
    pub merge_groups: Vec<Vec<String>>,
    pub perceptual_groups: Vec<PerceptualGroup>,
    pub warnings: Vec<String>,
}

/// The JSON lint report.
#[derive(Debug, Serialize)]
pub struct LintReport<'a> {
    pub detector: &'a str,
    pub merge_groups: &'a [Vec<String>],
    pub perceptual_groups: &'a [PerceptualGroup],
    pub warnings: &'a [String],
}

impl LintOutcome {
    pub fn report<'a>(&'a self, detector: &'a str) -> LintReport<'a> {
        LintReport {
            detector,
            merge_groups: &self.merge_groups,
            perceptual_groups: &self.perceptual_groups,
            warnings: &self.warnings,
        }
    }
}

/// Runs the whole linting stage.
pub fn lint(
    doc: &PrototypeDoc,
    annotations: &AnnotationSet,
    detector: &dyn Detector,
    config: &PipelineConfig,
) -> LintOutcome {
    let mut warnings = Vec::new();
    let hierarchy = rebuild_hierarchy(doc, config.eps_containment);
    let (merge_groups, w) = detector.fragments(&hierarchy, annotations);
    warnings.extend(w);
    let merged = apply_merge_attr(hierarchy, &merge_groups);
    let perceptual_groups = detector.groups(doc, &merged, annotations);
    let (hierarchy, w) = assign_group_membership(merged, &perceptual_groups, config.iou_threshold);
    warnings.extend(w);
    LintOutcome {
        hierarchy,
        merge_groups,
        perceptual_groups,
        warnings,
    }
}

pub(crate) fn fresh_id(prefix: &str, counter: &mut usize, taken: &HashSet<String>) -> String {
    loop {
        *counter += 1;
        let id = format!("{prefix}-{counter}");
        if !taken.contains(&id) {
            return id;
        }
    }
}

/// Child-index path from `root` to the node with `id`.
pub(crate) fn path_to(root: &HierarchyNode, id: &str) -> Option<Vec<usize>> {
    if root.id == id {
        return Some(Vec::new());
    }
    for (i, c) in root.children.iter().enumerate() {
        if let Some(mut p) = path_to(c, id) {
            p.insert(0, i);
            return Some(p);
        }
    }
    None
}

pub(crate) fn node_at_mut<'a>(root: &'a mut HierarchyNode, path: &[usize]) -> &'a mut HierarchyNode {
    path.iter().fold(root, |n, &i| &mut n.children[i])
}

pub(crate) fn node_at<'a>(root: &'a HierarchyNode, path: &[usize]) -> &'a HierarchyNode {
    path.iter().fold(root, |n, &i| &n.children[i])
}

pub(crate) fn common_prefix(paths: &[Vec<usize>]) -> Vec<usize> {
    let Some(first) = paths.first() else {
        return Vec::new();
    };
    let mut len = first.len();
    for p in &paths[1..] {
        len = len.min(first.iter().zip(p).take_while(|(a, b)| a == b).count());
    }
    first[..len].to_vec()
}

/// Detaches the subtrees at `paths` (none an ancestor of another).
pub(crate) fn detach_all(root: &mut HierarchyNode, mut paths: Vec<Vec<usize>>) -> Vec<HierarchyNode> {
    // Removing deeper/later indices first keeps the remaining paths valid.
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for p in paths.into_iter().rev() {
        let (last, parent) = p.split_last().expect("cannot detach the root");
        out.push(node_at_mut(root, parent).children.remove(*last));
    }
    out.sort_by_key(|n| n.order);
    out
}
