use std::collections::{BTreeSet, HashSet};

use crate::annotations::AnnotationSet;
use crate::geometry::Rect;
use crate::model::LayerKind;

use super::{
    common_prefix, detach_all, fresh_id, node_at, node_at_mut, path_to, AttrSet, HierarchyKind, HierarchyNode,
};

/// Echoes the annotated merge sets. Sets whose members do not share a parent
/// in the rebuilt hierarchy are kept, with a warning.
pub fn detect_fragments_passthrough(
    hierarchy: &HierarchyNode,
    annotations: &AnnotationSet,
) -> (Vec<Vec<String>>, Vec<String>) {
    let mut warnings = Vec::new();
    for set in &annotations.merge_groups {
        let parents: BTreeSet<Vec<usize>> = set
            .iter()
            .filter_map(|id| path_to(hierarchy, id))
            .map(|mut p| {
                p.pop();
                p
            })
            .collect();
        if parents.len() > 1 {
            warnings.push(format!(
                "merge set [{}] spans disjoint subtrees of the rebuilt hierarchy",
                set.join(", ")
            ));
        }
    }
    (annotations.merge_groups.clone(), warnings)
}

/// Clusters small vector/shape leaves that sit within `gap_px` of each other
/// (transitively) into merge sets, keeping only clusters of two or more whose
/// bounding box fits inside `max_icon_px` square.
pub fn detect_fragments_heuristic(hierarchy: &HierarchyNode, max_icon_px: f64, gap_px: f64) -> Vec<Vec<String>> {
    let mut cands: Vec<&HierarchyNode> = Vec::new();
    hierarchy.visit(&mut |n| {
        if n.is_leaf()
            && matches!(n.layer_kind(), Some(LayerKind::Vector | LayerKind::Shape))
            && n.rect.w <= max_icon_px
            && n.rect.h <= max_icon_px
        {
            cands.push(n);
        }
    });
    cands.sort_by_key(|n| n.order);

    let mut parent: Vec<usize> = (0..cands.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            if cands[i].rect.gap(&cands[j].rect) <= gap_px {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; cands.len()];
    for i in 0..cands.len() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[r]].push(i);
    }

    clusters
        .into_iter()
        .filter(|c| c.len() >= 2)
        .filter(|c| {
            let bbox = Rect::bounding(c.iter().map(|&i| &cands[i].rect)).expect("non-empty cluster");
            bbox.w <= max_icon_px && bbox.h <= max_icon_px
        })
        .map(|c| c.into_iter().map(|i| cands[i].id.clone()).collect())
        .collect()
}

/// Marks each merge set in the hierarchy.
///
/// When the lowest common ancestor of a set holds exactly those layers, it is
/// flagged `merge`. Otherwise the members move under a new `merge` node
/// attached to the ancestor, whose rect is the members' bounding box.
pub fn apply_merge_attr(mut root: HierarchyNode, merge_groups: &[Vec<String>]) -> HierarchyNode {
    let mut taken = root.all_ids();
    let mut counter = 0;
    for group in merge_groups {
        let members: HashSet<&str> = group.iter().map(String::as_str).collect();
        let paths: Vec<Vec<usize>> = group.iter().filter_map(|id| path_to(&root, id)).collect();
        if paths.is_empty() {
            continue;
        }
        let lca = common_prefix(&paths);
        let lca_node = node_at(&root, &lca);
        // A layer that is not itself a member keeps its own element, so it
        // is never flagged; the members move under a new node instead.
        let lca_ids: HashSet<String> = lca_node.layer_ids().into_iter().collect();
        if !lca.is_empty() && lca_ids.len() == members.len() && lca_ids.iter().all(|id| members.contains(id.as_str()))
        {
            node_at_mut(&mut root, &lca).attrs.merge = true;
            continue;
        }

        // Members with no member ancestor.
        let maximal: Vec<Vec<usize>> = paths
            .iter()
            .filter(|p| !paths.iter().any(|q| q.len() < p.len() && p.starts_with(q)))
            .cloned()
            .collect();
        if maximal.len() == 1 {
            if !maximal[0].is_empty() {
                node_at_mut(&mut root, &maximal[0]).attrs.merge = true;
            }
            continue;
        }

        let moved = detach_all(&mut root, maximal);
        let rect = Rect::bounding(moved.iter().map(|n| &n.rect)).expect("non-empty merge set");
        let node = HierarchyNode {
            id: fresh_id("merge", &mut counter, &taken),
            rect,
            kind: HierarchyKind::Synthetic,
            order: moved.iter().map(|n| n.order).min().unwrap_or(0),
            attrs: AttrSet {
                merge: true,
                ..AttrSet::default()
            },
            children: moved,
        };
        taken.insert(node.id.clone());
        let host = node_at_mut(&mut root, &lca);
        host.children.push(node);
        host.sort_children();
    }
    root
}
