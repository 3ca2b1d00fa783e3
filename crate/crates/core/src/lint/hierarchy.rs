use crate::geometry::Rect;
use crate::model::PrototypeDoc;

use super::{AttrSet, HierarchyKind, HierarchyNode, ROOT_ID};

struct Item {
    id: String,
    rect: Rect,
    kind: HierarchyKind,
    order: usize,
}

/// Rebuilds the layer hierarchy from geometry alone.
///
/// The prototype's own grouping is discarded: every leaf layer becomes a node
/// parented to the smallest-area layer that contains it (within `eps`), or to
/// a synthetic root covering the canvas. Two rects that contain each other are
/// siblings. Among equal-area containers the earlier layer wins, and a layer
/// may only parent layers that rank after it (larger area first, then
/// document order), which keeps the result acyclic.
pub fn rebuild_hierarchy(doc: &PrototypeDoc, eps: f64) -> HierarchyNode {
    let items: Vec<Item> = doc
        .leaf_layers()
        .into_iter()
        .enumerate()
        .map(|(order, l)| Item {
            id: l.id.clone(),
            rect: l.rect,
            kind: HierarchyKind::Layer(l.kind),
            order,
        })
        .collect();

    // Descending area, ties by document order.
    let mut ranked: Vec<usize> = (0..items.len()).collect();
    ranked.sort_by(|&a, &b| {
        items[b]
            .rect
            .area()
            .total_cmp(&items[a].rect.area())
            .then(items[a].order.cmp(&items[b].order))
    });

    let strictly_contains = |p: &Item, c: &Item| p.rect.contains(&c.rect, eps) && !c.rect.contains(&p.rect, eps);

    let mut parent: Vec<Option<usize>> = vec![None; items.len()];
    for (pos, &child) in ranked.iter().enumerate() {
        let mut best: Option<usize> = None;
        // Walk towards larger areas; stop once past the best area found.
        for &cand in ranked[..pos].iter().rev() {
            if let Some(b) = best {
                if items[cand].rect.area() > items[b].rect.area() {
                    break;
                }
            }
            if strictly_contains(&items[cand], &items[child]) {
                best = Some(cand);
            }
        }
        parent[child] = best;
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); items.len()];
    let mut top = Vec::new();
    for i in 0..items.len() {
        match parent[i] {
            Some(p) => children[p].push(i),
            None => top.push(i),
        }
    }

    fn build(i: usize, items: &[Item], children: &[Vec<usize>]) -> HierarchyNode {
        let it = &items[i];
        HierarchyNode {
            id: it.id.clone(),
            rect: it.rect,
            kind: it.kind,
            order: it.order,
            attrs: AttrSet::default(),
            children: children[i].iter().map(|&c| build(c, items, children)).collect(),
        }
    }

    HierarchyNode {
        id: ROOT_ID.to_string(),
        rect: doc.canvas,
        kind: HierarchyKind::Root,
        order: 0,
        attrs: AttrSet::default(),
        children: top.into_iter().map(|i| build(i, &items, &children)).collect(),
    }
}
