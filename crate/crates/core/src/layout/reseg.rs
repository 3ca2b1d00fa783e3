use super::{xy_segment, FlexDirection, LayoutNode, LayoutTree, Segment};

/// Phase two: gives every container a single flex direction.
///
/// Each parent's children are XY-cut. Side-by-side runs become
/// `flex-direction: row` wrappers, stacked runs become columns, and a parent
/// whose children form a single run takes that direction itself. Children
/// that no straight cut separates fall back to absolute positioning.
/// Subtrees under `need_absolute` nodes keep their own arrangement.
pub fn resegment_rows_cols(mut tree: LayoutTree) -> LayoutTree {
    reseg(&mut tree.root);
    tree
}

fn reseg(node: &mut LayoutNode) {
    if !node.need_absolute && !node.children.is_empty() {
        let rects: Vec<_> = node.children.iter().map(|c| c.rect).collect();
        let seg = xy_segment(&rects);
        let mut pool: Vec<Option<LayoutNode>> = std::mem::take(&mut node.children).into_iter().map(Some).collect();
        match seg {
            Segment::Item(i) => {
                node.flex_direction = None;
                node.children = vec![pool[i].take().expect("single child")];
            }
            Segment::Row(parts) => {
                node.flex_direction = Some(FlexDirection::Row);
                node.children = parts.into_iter().map(|p| materialize(p, &mut pool)).collect();
            }
            Segment::Column(parts) => {
                node.flex_direction = Some(FlexDirection::Column);
                node.children = parts.into_iter().map(|p| materialize(p, &mut pool)).collect();
            }
            Segment::Stuck(idx) => {
                node.flex_direction = None;
                node.need_absolute = true;
                node.children = idx.into_iter().map(|i| pool[i].take().expect("stuck child")).collect();
                node.children.sort_by_key(|c| c.order);
            }
        }
    }
    for child in &mut node.children {
        reseg(child);
    }
}

/// Turns a nested segment into a node: an item stays as is, anything larger
/// gets a wrapper whose own arrangement is resolved when recursion reaches it.
fn materialize(seg: Segment, pool: &mut [Option<LayoutNode>]) -> LayoutNode {
    match seg {
        Segment::Item(i) => pool[i].take().expect("each child placed once"),
        other => {
            let children: Vec<LayoutNode> = other
                .indices()
                .into_iter()
                .map(|i| pool[i].take().expect("each child placed once"))
                .collect();
            LayoutNode::wrapper(children)
        }
    }
}
