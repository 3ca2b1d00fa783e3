use std::collections::HashSet;

use crate::annotations::{AnnotationSet, GroupType};
use crate::config::PipelineConfig;
use crate::geometry::Rect;
use crate::model::PrototypeDoc;

use super::{
    common_prefix, detach_all, fresh_id, node_at_mut, AttrSet, HierarchyKind, HierarchyNode,
    PerceptualGroup,
};

/// Thresholds for the heuristic group detector.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRules {
    /// Top/bottom band, as a fraction of canvas height, for navigation bars
    /// and toolbars. Bars must also be no taller than the band.
    pub bar_band: f64,
    /// Minimum bar width as a fraction of canvas width.
    pub bar_min_width: f64,
    /// Relative size tolerance between list items.
    pub list_size_tolerance: f64,
    /// Alignment tolerance in pixels.
    pub align_eps: f64,
}

impl Default for GroupRules {
    fn default() -> Self {
        GroupRules {
            bar_band: 0.15,
            bar_min_width: 0.9,
            list_size_tolerance: 0.1,
            align_eps: 0.5,
        }
    }
}

impl GroupRules {
    pub fn from_config(c: &PipelineConfig) -> Self {
        GroupRules {
            bar_band: c.bar_band,
            bar_min_width: c.bar_min_width,
            list_size_tolerance: c.list_size_tolerance,
            align_eps: c.eps_containment,
        }
    }
}

fn similar(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.max(b)
}

/// Reference rules for perceptual groups, evaluated per hierarchy node in
/// priority order: navigation bar, toolbar, list item, card, container.
pub fn detect_groups_heuristic(doc: &PrototypeDoc, root: &HierarchyNode, rules: &GroupRules) -> Vec<PerceptualGroup> {
    let canvas = doc.canvas;
    let styles = doc.layer_index();

    // List items: sibling runs sharing an alignment axis with similar sizes.
    let mut list_items: HashSet<&str> = HashSet::new();
    root.visit(&mut |parent| {
        if parent.attrs.merge {
            return;
        }
        let kids = &parent.children;
        for axis in [Axis::Left, Axis::Top] {
            let mut used = vec![false; kids.len()];
            for i in 0..kids.len() {
                if used[i] || list_items.contains(kids[i].id.as_str()) {
                    continue;
                }
                let mut run = vec![i];
                for j in i + 1..kids.len() {
                    if used[j] || list_items.contains(kids[j].id.as_str()) {
                        continue;
                    }
                    let fits = run.iter().all(|&k| {
                        let (a, b) = (&kids[k].rect, &kids[j].rect);
                        (axis.coord(a) - axis.coord(b)).abs() <= rules.align_eps
                            && similar(a.w, b.w, rules.list_size_tolerance)
                            && similar(a.h, b.h, rules.list_size_tolerance)
                    });
                    if fits {
                        run.push(j);
                    }
                }
                if run.len() >= 2 {
                    for &k in &run {
                        used[k] = true;
                        list_items.insert(kids[k].id.as_str());
                    }
                }
            }
        }
    });

    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        // Merge nodes are opaque.
        if !node.attrs.merge {
            stack.extend(node.children.iter().rev());
        }
        if node.kind == HierarchyKind::Root {
            continue;
        }
        let r = node.rect;
        let non_leaf = !node.is_leaf() && !node.attrs.merge;
        let wide = r.w >= rules.bar_min_width * canvas.w;
        let short = r.h <= rules.bar_band * canvas.h;
        let group_type = if non_leaf && wide && short && r.y <= rules.bar_band * canvas.h {
            Some(GroupType::NavigationBar)
        } else if non_leaf && wide && short && r.bottom() >= (1.0 - rules.bar_band) * canvas.h {
            Some(GroupType::Toolbar)
        } else if list_items.contains(node.id.as_str()) {
            Some(GroupType::ListItem)
        } else if non_leaf && is_card(node, &styles) {
            Some(GroupType::Card)
        } else if non_leaf && node.children.len() >= 2 {
            Some(GroupType::Container)
        } else {
            None
        };
        if let Some(group_type) = group_type {
            out.push(PerceptualGroup {
                group_type,
                rect: r,
                member_ids: node.layer_ids(),
                confidence: 1.0,
            });
        }
    }
    out
}

fn is_card(node: &HierarchyNode, styles: &std::collections::HashMap<&str, &crate::model::Layer>) -> bool {
    let Some(layer) = styles.get(node.id.as_str()) else {
        return false;
    };
    if !(layer.style.has_fill() || layer.style.radius() > 0.0) {
        return false;
    }
    let mut leaves = 0;
    node.visit(&mut |n| {
        if n.is_leaf() && n.id != node.id {
            leaves += 1;
        }
    });
    leaves >= 2
}

#[derive(Clone, Copy)]
enum Axis {
    Left,
    Top,
}

impl Axis {
    fn coord(self, r: &Rect) -> f64 {
        match self {
            Axis::Left => r.x,
            Axis::Top => r.y,
        }
    }
}

/// Converts annotated group boxes into [`PerceptualGroup`]s; members are the
/// layers the box contains.
pub fn passthrough_groups(root: &HierarchyNode, annotations: &AnnotationSet, eps: f64) -> Vec<PerceptualGroup> {
    annotations
        .perceptual_groups
        .iter()
        .map(|g| {
            let mut member_ids = Vec::new();
            root.visit(&mut |n| {
                if n.layer_kind().is_some() && g.rect.contains(&n.rect, eps) {
                    member_ids.push(n.id.clone());
                }
            });
            PerceptualGroup {
                group_type: g.group_type,
                rect: g.rect,
                member_ids,
                confidence: 1.0,
            }
        })
        .collect()
}

/// Wraps the members of each perceptual group under a `group` node.
///
/// Groups are processed smallest first (ties by top, left, then type). A node
/// joins a group when the share of its own area inside the group rect is at
/// least `threshold`. Merge and group nodes join as units and are never split.
/// Returns the new tree and any warnings.
pub fn assign_group_membership(
    mut root: HierarchyNode,
    groups: &[PerceptualGroup],
    threshold: f64,
) -> (HierarchyNode, Vec<String>) {
    let mut warnings = Vec::new();
    let mut sorted: Vec<&PerceptualGroup> = groups.iter().collect();
    sorted.sort_by(|a, b| {
        a.rect
            .area()
            .total_cmp(&b.rect.area())
            .then(a.rect.y.total_cmp(&b.rect.y))
            .then(a.rect.x.total_cmp(&b.rect.x))
            .then(a.group_type.as_str().cmp(b.group_type.as_str()))
    });

    ambiguity_warnings(&root, &sorted, threshold, &mut warnings);

    let mut taken = root.all_ids();
    let mut counter = 0;
    for g in sorted {
        let mut units = Vec::new();
        collect_units(&root, &g.rect, threshold, &mut Vec::new(), &mut units, &mut warnings);
        if units.is_empty() {
            continue;
        }
        // Already applied: a group of this type holds exactly these layers.
        let mut members: Vec<String> = units
            .iter()
            .flat_map(|p| super::node_at(&root, p).layer_ids())
            .collect();
        members.sort();
        let mut applied = false;
        root.visit(&mut |n| {
            if !applied && n.attrs.group && n.attrs.group_type == Some(g.group_type) {
                let mut ids = n.layer_ids();
                ids.sort();
                applied = ids == members;
            }
        });
        if applied {
            continue;
        }
        let host = if units.len() == 1 {
            units[0][..units[0].len() - 1].to_vec()
        } else {
            common_prefix(&units)
        };
        let moved = detach_all(&mut root, units);
        let node = HierarchyNode {
            id: fresh_id("group", &mut counter, &taken),
            rect: Rect::bounding(moved.iter().map(|n| &n.rect)).expect("non-empty group"),
            kind: HierarchyKind::Synthetic,
            order: moved.iter().map(|n| n.order).min().unwrap_or(0),
            attrs: AttrSet::grouped(g.group_type),
            children: moved,
        };
        taken.insert(node.id.clone());
        let host = node_at_mut(&mut root, &host);
        host.children.push(node);
        host.sort_children();
    }
    (root, warnings)
}

fn collect_units(
    node: &HierarchyNode,
    rect: &Rect,
    threshold: f64,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    warnings: &mut Vec<String>,
) {
    for (i, child) in node.children.iter().enumerate() {
        path.push(i);
        if child.rect.coverage_by(rect) >= threshold {
            out.push(path.clone());
        } else if child.attrs.merge {
            let mut inside = false;
            child.visit(&mut |n| inside |= n.id != child.id && n.rect.coverage_by(rect) >= threshold);
            if inside {
                warnings.push(format!("merge node `{}` spans a perceptual group boundary", child.id));
            }
        } else if !child.attrs.group {
            collect_units(child, rect, threshold, path, out, warnings);
        }
        path.pop();
    }
}

fn ambiguity_warnings(root: &HierarchyNode, sorted: &[&PerceptualGroup], threshold: f64, warnings: &mut Vec<String>) {
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if a.rect.area() != b.rect.area() {
                break;
            }
            if a.rect.contains(&b.rect, 0.0) || b.rect.contains(&a.rect, 0.0) {
                continue;
            }
            root.visit(&mut |n| {
                if n.layer_kind().is_some()
                    && n.rect.coverage_by(&a.rect) >= threshold
                    && n.rect.coverage_by(&b.rect) >= threshold
                {
                    warnings.push(format!(
                        "layer `{}` qualifies for two equal-area {} / {} groups; assigned to the first",
                        n.id, a.group_type, b.group_type
                    ));
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lint::rebuild_hierarchy;
    use crate::model::{Layer, LayerKind, StyleProps};

    fn shape(id: &str, x: f64, y: f64, w: f64, h: f64) -> Layer {
        Layer::leaf(id, LayerKind::Shape, Rect::new(x, y, w, h))
    }

    fn text(id: &str, x: f64, y: f64, w: f64, h: f64) -> Layer {
        Layer::text(id, Rect::new(x, y, w, h), id)
    }

    #[test]
    fn full_width_top_group_is_a_navigation_bar() {
        let doc = PrototypeDoc::new(
            400.0,
            800.0,
            vec![
                shape("bar", 0.0, 0.0, 400.0, 60.0),
                text("title", 150.0, 20.0, 100.0, 20.0),
                text("back", 10.0, 20.0, 40.0, 20.0),
            ],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = detect_groups_heuristic(&doc, &h, &GroupRules::default());
        let bar = groups.iter().find(|g| g.rect == Rect::new(0.0, 0.0, 400.0, 60.0)).unwrap();
        assert_eq!(bar.group_type, GroupType::NavigationBar);
        assert_eq!(bar.member_ids, ["bar", "title", "back"]);
    }

    #[test]
    fn bottom_bar_is_a_toolbar() {
        let doc = PrototypeDoc::new(
            400.0,
            800.0,
            vec![shape("bar", 0.0, 740.0, 400.0, 60.0), text("t", 10.0, 760.0, 40.0, 20.0)],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = detect_groups_heuristic(&doc, &h, &GroupRules::default());
        assert_eq!(groups[0].group_type, GroupType::Toolbar);
    }

    #[test]
    fn stacked_equal_siblings_are_list_items() {
        let doc = PrototypeDoc::new(
            400.0,
            800.0,
            vec![
                shape("r1", 20.0, 200.0, 100.0, 80.0),
                shape("r2", 20.0, 300.0, 100.0, 80.0),
                shape("r3", 20.0, 400.0, 100.0, 80.0),
            ],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = detect_groups_heuristic(&doc, &h, &GroupRules::default());
        assert_eq!(groups.len(), 3);
        assert!(groups.iter().all(|g| g.group_type == GroupType::ListItem));
    }

    #[test]
    fn styled_parent_with_leaves_is_a_card() {
        let card = shape("card", 20.0, 200.0, 300.0, 200.0)
            .with_style(StyleProps::new().with("fill", "#FFF").with("border-radius", 8.0));
        let doc = PrototypeDoc::new(
            400.0,
            800.0,
            vec![card, text("a", 30.0, 210.0, 100.0, 20.0), text("b", 30.0, 300.0, 200.0, 40.0)],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = detect_groups_heuristic(&doc, &h, &GroupRules::default());
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].group_type, GroupType::Card);
    }

    #[test]
    fn empty_page_has_no_groups() {
        let doc = PrototypeDoc::new(400.0, 800.0, vec![]);
        let h = rebuild_hierarchy(&doc, 0.5);
        assert!(detect_groups_heuristic(&doc, &h, &GroupRules::default()).is_empty());
    }

    fn group(t: GroupType, r: Rect) -> PerceptualGroup {
        PerceptualGroup {
            group_type: t,
            rect: r,
            member_ids: vec![],
            confidence: 1.0,
        }
    }

    #[test]
    fn membership_uses_layer_area_ratio() {
        let doc = PrototypeDoc::new(
            400.0,
            400.0,
            vec![shape("in", 10.0, 10.0, 10.0, 10.0), shape("half", 95.0, 10.0, 10.0, 10.0)],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let g = group(GroupType::Container, Rect::new(0.0, 0.0, 100.0, 100.0));
        let (tree, _) = assign_group_membership(h, &[g], 0.7);
        let gnode = tree.children.iter().find(|c| c.attrs.group).unwrap();
        assert_eq!(gnode.layer_ids(), ["in"]);
        assert_eq!(gnode.attrs.group_type, Some(GroupType::Container));
        assert!(tree.children.iter().any(|c| c.id == "half"));
    }

    #[test]
    fn small_group_is_claimed_whole_by_larger_one() {
        let doc = PrototypeDoc::new(
            400.0,
            400.0,
            vec![
                shape("c1", 20.0, 20.0, 20.0, 20.0),
                shape("c2", 50.0, 20.0, 20.0, 20.0),
                shape("other", 20.0, 150.0, 20.0, 20.0),
            ],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = [
            group(GroupType::Container, Rect::new(0.0, 0.0, 200.0, 200.0)),
            group(GroupType::Card, Rect::new(10.0, 10.0, 70.0, 40.0)),
        ];
        let (tree, _) = assign_group_membership(h, &groups, 0.7);
        assert_eq!(tree.children.len(), 1);
        let container = &tree.children[0];
        assert_eq!(container.attrs.group_type, Some(GroupType::Container));
        let card = container.children.iter().find(|c| c.attrs.group).unwrap();
        assert_eq!(card.attrs.group_type, Some(GroupType::Card));
        assert_eq!(card.layer_ids(), ["c1", "c2"]);
        assert_eq!(container.children.len(), 2);
    }

    #[test]
    fn membership_is_idempotent() {
        let doc = PrototypeDoc::new(
            400.0,
            400.0,
            vec![shape("c1", 20.0, 20.0, 20.0, 20.0), shape("c2", 50.0, 20.0, 20.0, 20.0)],
        );
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = [
            group(GroupType::Container, Rect::new(0.0, 0.0, 200.0, 200.0)),
            group(GroupType::Card, Rect::new(10.0, 10.0, 70.0, 40.0)),
        ];
        let (once, _) = assign_group_membership(h, &groups, 0.7);
        let (twice, _) = assign_group_membership(once.clone(), &groups, 0.7);
        assert_eq!(once, twice);
    }

    #[test]
    fn equal_area_disjoint_groups_warn() {
        let doc = PrototypeDoc::new(400.0, 400.0, vec![shape("x", 45.0, 0.0, 10.0, 10.0)]);
        let h = rebuild_hierarchy(&doc, 0.5);
        let groups = [
            group(GroupType::Card, Rect::new(0.0, 0.0, 60.0, 60.0)),
            group(GroupType::Card, Rect::new(40.0, 0.0, 60.0, 60.0)),
        ];
        let (_, warnings) = assign_group_membership(h, &groups, 0.7);
        assert_eq!(warnings.len(), 1);
    }
}
