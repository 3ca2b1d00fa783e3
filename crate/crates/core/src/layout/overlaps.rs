use super::{LayoutNode, LayoutTree};

/// Wraps overlapping siblings under absolutely positioned containers.
///
/// For each parent, children are split into connected components of the
/// "intersection area > `overlap_eps`" relation. Each component of two or
/// more becomes the child list of a new `need_absolute` wrapper whose rect is
/// the component's bounding box. Wrappers that end up overlapping other
/// siblings absorb them, until no two siblings overlap.
pub fn wrap_overlaps(mut tree: LayoutTree, overlap_eps: f64) -> LayoutTree {
    wrap_node(&mut tree.root, overlap_eps);
    tree
}

fn wrap_node(node: &mut LayoutNode, overlap_eps: f64) {
    if !node.need_absolute {
        // `fresh[i]` marks wrappers created in this pass.
        let mut fresh = vec![false; node.children.len()];
        loop {
            let comps = components(&node.children, overlap_eps);
            if comps.iter().all(|c| c.len() < 2) {
                break;
            }
            let mut old: Vec<Option<LayoutNode>> = std::mem::take(&mut node.children).into_iter().map(Some).collect();
            let mut next = Vec::with_capacity(comps.len());
            let mut next_fresh = Vec::with_capacity(comps.len());
            for comp in comps {
                if comp.len() == 1 {
                    next_fresh.push(fresh[comp[0]]);
                    next.push(old[comp[0]].take().expect("each child is used once"));
                    continue;
                }
                let mut members = Vec::new();
                for i in comp {
                    let child = old[i].take().expect("each child is used once");
                    if fresh[i] {
                        members.extend(child.children);
                    } else {
                        members.push(child);
                    }
                }
                members.sort_by_key(|m| m.order);
                let mut wrapper = LayoutNode::wrapper(members);
                wrapper.need_absolute = true;
                next.push(wrapper);
                next_fresh.push(true);
            }
            let mut order: Vec<usize> = (0..next.len()).collect();
            order.sort_by_key(|&i| next[i].order);
            let mut slots: Vec<Option<LayoutNode>> = next.into_iter().map(Some).collect();
            node.children = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();
            fresh = order.iter().map(|&i| next_fresh[i]).collect();
        }
    }
    for child in &mut node.children {
        if child.need_absolute && child.is_synthetic() {
            // Fresh wrapper: its members stay overlapped, but their subtrees
            // still need attention.
            for grandchild in &mut child.children {
                wrap_node(grandchild, overlap_eps);
            }
        } else {
            wrap_node(child, overlap_eps);
        }
    }
}

/// Connected components of the overlap relation, each sorted, listed by
/// smallest member.
fn components(children: &[LayoutNode], overlap_eps: f64) -> Vec<Vec<usize>> {
    let n = children.len();
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[start] = id;
        let mut members = vec![start];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && children[i].rect.intersection_area(&children[j].rect) > overlap_eps {
                    comp[j] = id;
                    members.push(j);
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::layout::{root_node, LayoutKind};
    use crate::model::LayerKind;

    fn el(id: &str, x: f64, y: f64, w: f64, h: f64, order: usize) -> LayoutNode {
        LayoutNode::new(id.into(), Rect::new(x, y, w, h), LayoutKind::Layer(LayerKind::Shape), order)
    }

    fn tree(children: Vec<LayoutNode>) -> LayoutTree {
        let mut root = root_node(Rect::new(0.0, 0.0, 500.0, 500.0));
        root.children = children;
        LayoutTree { root }
    }

    #[test]
    fn no_overlap_is_identity() {
        let t = tree(vec![el("a", 0.0, 0.0, 10.0, 10.0, 0), el("b", 10.0, 0.0, 10.0, 10.0, 1)]);
        assert_eq!(wrap_overlaps(t.clone(), 1.0), t);
    }

    #[test]
    fn badge_over_avatar_is_wrapped() {
        let t = tree(vec![
            el("avatar", 0.0, 0.0, 40.0, 40.0, 0),
            el("badge", 30.0, 0.0, 16.0, 16.0, 1),
            el("name", 60.0, 10.0, 80.0, 20.0, 2),
        ]);
        let t = wrap_overlaps(t, 1.0);
        assert_eq!(t.root.children.len(), 2);
        let w = &t.root.children[0];
        assert!(w.need_absolute);
        assert_eq!(w.rect, Rect::new(0.0, 0.0, 46.0, 40.0));
        assert_eq!(w.element_ids(), ["avatar", "badge"]);
    }

    #[test]
    fn chained_overlaps_form_one_component() {
        let t = tree(vec![
            el("a", 0.0, 0.0, 10.0, 10.0, 0),
            el("b", 8.0, 0.0, 10.0, 10.0, 1),
            el("c", 16.0, 0.0, 10.0, 10.0, 2),
        ]);
        let t = wrap_overlaps(t, 1.0);
        assert_eq!(t.root.children.len(), 1);
        assert_eq!(t.root.children[0].element_ids(), ["a", "b", "c"]);
    }

    #[test]
    fn wrapper_bbox_absorbs_newly_overlapped_sibling() {
        // a and b overlap; their bbox then covers c.
        let t = tree(vec![
            el("a", 0.0, 0.0, 30.0, 10.0, 0),
            el("b", 20.0, 5.0, 10.0, 30.0, 1),
            el("c", 2.0, 20.0, 10.0, 10.0, 2),
        ]);
        let t = wrap_overlaps(t, 1.0);
        assert_eq!(t.root.children.len(), 1);
        assert_eq!(t.root.children[0].children.len(), 3);
    }

    #[test]
    fn touching_edges_do_not_overlap() {
        let t = tree(vec![el("a", 0.0, 0.0, 10.0, 10.0, 0), el("b", 10.0, 0.0, 10.0, 10.0, 1)]);
        assert!(wrap_overlaps(t, 1.0).root.children.iter().all(|c| !c.need_absolute));
    }
}
