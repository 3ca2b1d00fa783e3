use std::cmp::Ordering;

use crate::geometry::Rect;
use crate::lint::{HierarchyKind, HierarchyNode};

use super::{root_node, LayoutKind, LayoutNode, LayoutTree};

/// One element of the layout: a leaf layer, a merged fragment group, or a
/// perceptual group together with the elements inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementUnit {
    pub id: String,
    pub rect: Rect,
    pub kind: LayoutKind,
    pub order: usize,
    /// Layer ids folded into a merged unit.
    pub fragments: Vec<String>,
    /// Elements inside a group unit, in descending area order.
    pub members: Vec<ElementUnit>,
}

fn by_area_desc(a: &ElementUnit, b: &ElementUnit) -> Ordering {
    b.rect.area().total_cmp(&a.rect.area()).then(a.order.cmp(&b.order))
}

/// Collects the element units of a linted hierarchy.
///
/// Every leaf layer is an element unless it sits inside a merge or group
/// node, in which case its smallest such ancestor stands in for it. Group
/// units carry their own interior elements. Units come back in descending
/// area order, ties by document order.
pub fn extract_elements(root: &HierarchyNode) -> Vec<ElementUnit> {
    fn collect(node: &HierarchyNode, out: &mut Vec<ElementUnit>) {
        for child in &node.children {
            if child.attrs.merge {
                let fragments = child.layer_ids();
                let rects: Vec<Rect> = {
                    let mut v = Vec::new();
                    child.visit(&mut |n| {
                        if n.layer_kind().is_some() {
                            v.push(n.rect);
                        }
                    });
                    v
                };
                out.push(ElementUnit {
                    id: child.id.clone(),
                    rect: Rect::bounding(&rects).unwrap_or(child.rect),
                    kind: LayoutKind::Merged,
                    order: child.order,
                    fragments,
                    members: Vec::new(),
                });
            } else if child.attrs.group {
                let mut members = Vec::new();
                collect(child, &mut members);
                members.sort_by(by_area_desc);
                out.push(ElementUnit {
                    id: child.id.clone(),
                    rect: child.rect,
                    kind: LayoutKind::Group(child.attrs.group_type.expect("group node without a type")),
                    order: child.order,
                    fragments: Vec::new(),
                    members,
                });
            } else {
                if let HierarchyKind::Layer(k) = child.kind {
                    out.push(ElementUnit {
                        id: child.id.clone(),
                        rect: child.rect,
                        kind: LayoutKind::Layer(k),
                        order: child.order,
                        fragments: Vec::new(),
                        members: Vec::new(),
                    });
                }
                collect(child, out);
            }
        }
    }
    let mut out = Vec::new();
    collect(root, &mut out);
    out.sort_by(by_area_desc);
    out
}

struct Slot {
    node: LayoutNode,
    children: Vec<usize>,
}

/// Phase-one initialization: inserts units largest first, each under the
/// smallest already-inserted unit that contains it (within `eps`), else
/// under the root. Group interiors are built the same way beneath their
/// group node and are closed to outside elements.
pub fn init_layout_tree(elements: &[ElementUnit], canvas: Rect, eps: f64) -> LayoutTree {
    let mut slots = vec![Slot {
        node: root_node(canvas),
        children: Vec::new(),
    }];
    insert_scope(&mut slots, 0, elements, eps);

    fn assemble(slots: &mut Vec<Slot>, i: usize) -> LayoutNode {
        let kids = std::mem::take(&mut slots[i].children);
        let mut children: Vec<LayoutNode> = kids.into_iter().map(|c| assemble(slots, c)).collect();
        children.sort_by_key(|c| c.order);
        let mut node = std::mem::replace(
            &mut slots[i].node,
            LayoutNode::new(String::new(), Rect::default(), LayoutKind::Synthetic, 0),
        );
        node.children = children;
        node
    }
    LayoutTree {
        root: assemble(&mut slots, 0),
    }
}

fn insert_scope(slots: &mut Vec<Slot>, scope_root: usize, units: &[ElementUnit], eps: f64) {
    let mut scope: Vec<usize> = Vec::new();
    for unit in units {
        let mut best: Option<usize> = None;
        for &cand in &scope {
            let c = &slots[cand].node;
            if matches!(c.kind, LayoutKind::Group(_)) {
                continue;
            }
            if !(c.rect.contains(&unit.rect, eps) && !unit.rect.contains(&c.rect, eps)) {
                continue;
            }
            match best {
                Some(b) if slots[b].node.rect.area() <= c.rect.area() => {}
                _ => best = Some(cand),
            }
        }
        let parent = best.unwrap_or(scope_root);
        let mut node = LayoutNode::new(unit.id.clone(), unit.rect, unit.kind, unit.order);
        node.fragments = unit.fragments.clone();
        let idx = slots.len();
        slots.push(Slot {
            node,
            children: Vec::new(),
        });
        slots[parent].children.push(idx);
        scope.push(idx);
        if !unit.members.is_empty() {
            insert_scope(slots, idx, &unit.members, eps);
        }
    }
}
