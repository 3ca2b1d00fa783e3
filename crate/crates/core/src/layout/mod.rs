//! The UI layout tree.
//!
//! Construction runs in two phases. Initialization extracts element units
//! from the linted hierarchy and nests them by containment, then wraps
//! overlapping siblings under absolutely positioned containers. The second
//! phase re-segments every parent's children into rows and columns with a
//! recursive XY-cut so each container gets a single flex direction.

mod elements;
mod overlaps;
mod reseg;
mod segment;

use std::collections::HashSet;

use serde::Serialize;

pub use elements::{extract_elements, init_layout_tree, ElementUnit};
pub use overlaps::wrap_overlaps;
pub use reseg::resegment_rows_cols;
pub use segment::{segment_depth, xy_segment, Segment};

use crate::annotations::GroupType;
use crate::geometry::Rect;
use crate::lint::{HierarchyNode, ROOT_ID};
use crate::model::LayerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlexDirection {
    Row,
    Column,
}

impl FlexDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            FlexDirection::Row => "row",
            FlexDirection::Column => "column",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum LayoutKind {
    Root,
    /// A prototype leaf layer.
    Layer(LayerKind),
    /// A merged fragment group, rendered as one element.
    Merged,
    /// A perceptual group container.
    Group(GroupType),
    /// A row, column, or absolute wrapper added during layout.
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutNode {
    pub id: String,
    pub rect: Rect,
    pub kind: LayoutKind,
    pub flex_direction: Option<FlexDirection>,
    pub need_absolute: bool,
    pub classname: Option<String>,
    pub element_type: Option<String>,
    /// Layer ids folded into a merged node.
    pub fragments: Vec<String>,
    /// Document order (first member for synthetic nodes).
    pub order: usize,
    pub children: Vec<LayoutNode>,
}

impl LayoutNode {
    pub(crate) fn new(id: String, rect: Rect, kind: LayoutKind, order: usize) -> Self {
        LayoutNode {
            id,
            rect,
            kind,
            flex_direction: None,
            need_absolute: false,
            classname: None,
            element_type: None,
            fragments: Vec::new(),
            order,
            children: Vec::new(),
        }
    }

    pub(crate) fn wrapper(children: Vec<LayoutNode>) -> Self {
        let rect = Rect::bounding(children.iter().map(|c| &c.rect)).unwrap_or_default();
        let order = children.iter().map(|c| c.order).min().unwrap_or(0);
        let mut node = LayoutNode::new(String::new(), rect, LayoutKind::Synthetic, order);
        node.children = children;
        node
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self.kind, LayoutKind::Root | LayoutKind::Synthetic)
    }

    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a LayoutNode)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    pub fn visit_mut(&mut self, f: &mut impl FnMut(&mut LayoutNode)) {
        f(self);
        for c in &mut self.children {
            c.visit_mut(f);
        }
    }

    /// Ids of the element leaves (layers and merged nodes) in this subtree.
    pub fn element_ids(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if matches!(n.kind, LayoutKind::Layer(_) | LayoutKind::Merged) {
                out.push(n.id.clone());
            }
        });
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutTree {
    pub root: LayoutNode,
}

impl LayoutTree {
    /// Nodes in pre-order; index 0 is the root.
    pub fn nodes(&self) -> Vec<&LayoutNode> {
        let mut out = Vec::new();
        self.root.visit(&mut |n| out.push(n));
        out
    }

    /// Parent index of each node in [`LayoutTree::nodes`] order.
    pub fn parents(&self) -> Vec<Option<usize>> {
        fn walk(n: &LayoutNode, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            let me = out.len();
            out.push(parent);
            for c in &n.children {
                walk(c, Some(me), out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, None, &mut out);
        out
    }

    /// `m[i][j]` is true iff node `i` is the parent of node `j`.
    pub fn relation_matrix(&self) -> Vec<Vec<bool>> {
        let parents = self.parents();
        let n = parents.len();
        let mut m = vec![vec![false; n]; n];
        for (j, p) in parents.into_iter().enumerate() {
            if let Some(i) = p {
                m[i][j] = true;
            }
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    pub fn find(&self, id: &str) -> Option<&LayoutNode> {
        self.nodes().into_iter().find(|n| n.id == id)
    }

    /// Indented JSON dump of the tree.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DumpNode::from(&self.root)).expect("layout dump cannot fail")
    }
}

#[derive(Serialize)]
struct DumpNode<'a> {
    id: &'a str,
    #[serde(flatten)]
    kind: LayoutKind,
    rect: Rect,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<FlexDirection>,
    need_absolute: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    element_type: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classname: Option<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    children: Vec<DumpNode<'a>>,
}

impl<'a> From<&'a LayoutNode> for DumpNode<'a> {
    fn from(n: &'a LayoutNode) -> Self {
        DumpNode {
            id: &n.id,
            kind: n.kind,
            rect: n.rect,
            direction: n.flex_direction,
            need_absolute: n.need_absolute,
            element_type: n.element_type.as_deref(),
            classname: n.classname.as_deref(),
            children: n.children.iter().map(DumpNode::from).collect(),
        }
    }
}

/// Gives every synthetic wrapper a `seg-<k>` id in pre-order.
pub fn renumber_synthetic(tree: &mut LayoutTree) {
    let mut taken = HashSet::new();
    tree.root.visit(&mut |n| {
        if n.kind != LayoutKind::Synthetic {
            taken.insert(n.id.clone());
        }
    });
    let mut counter = 0;
    tree.root.visit_mut(&mut |n| {
        if n.kind == LayoutKind::Synthetic {
            loop {
                counter += 1;
                let id = format!("seg-{counter}");
                if !taken.contains(&id) {
                    n.id = id;
                    break;
                }
            }
        }
    });
}

/// Runs both construction phases on a linted hierarchy.
pub fn build_layout_tree(hierarchy: &HierarchyNode, eps: f64, overlap_eps: f64) -> LayoutTree {
    let elements = extract_elements(hierarchy);
    let tree = init_layout_tree(&elements, hierarchy.rect, eps);
    let tree = wrap_overlaps(tree, overlap_eps);
    let mut tree = resegment_rows_cols(tree);
    renumber_synthetic(&mut tree);
    tree
}

pub(crate) fn root_node(canvas: Rect) -> LayoutNode {
    LayoutNode::new(ROOT_ID.to_string(), canvas, LayoutKind::Root, 0)
}
