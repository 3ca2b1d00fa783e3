//! Generators and independent reference implementations shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use std::path::PathBuf;

use p2c_core::codegen::Emitted;
use p2c_core::geometry::Rect;
use p2c_core::layout::{renumber_synthetic, resegment_rows_cols, FlexDirection, LayoutKind, LayoutNode, LayoutTree, Segment};
use p2c_core::lint::HierarchyNode;
use p2c_core::model::{parse_prototype, Layer, LayerKind, PrototypeDoc, StyleProps};
use p2c_core::pipeline::verify_emitted;
use p2c_core::verify::{parse_css, parse_html, replay_layout, RasterImage};
use p2c_core::{build, AnnotationSet, PipelineConfig, RulesOracle};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const KINDS: [LayerKind; 4] = [LayerKind::Text, LayerKind::Image, LayerKind::Vector, LayerKind::Shape];

fn random_style(rng: &mut ChaCha8Rng) -> StyleProps {
    let mut s = StyleProps::new();
    if rng.random_bool(0.4) {
        s = s.with("fill", *["#FFFFFF", "#3366FF", "#222222"].choose(rng).unwrap());
    }
    if rng.random_bool(0.3) {
        s = s.with("border-radius", rng.random_range(0..12) as f64);
    }
    if rng.random_bool(0.2) {
        s = s.with("font-size", rng.random_range(10..24) as f64);
    }
    s
}

pub fn leaf(id: String, kind: LayerKind, rect: Rect, style: StyleProps) -> Layer {
    let mut l = if kind == LayerKind::Text {
        Layer::text(&id, rect, &format!("text {id}"))
    } else {
        Layer::leaf(&id, kind, rect)
    };
    l.style = style;
    l
}

/// Integer-coordinate leaves anywhere on the canvas (overlaps, duplicates
/// and nesting all allowed), randomly wrapped in group layers.
pub fn random_doc(rng: &mut ChaCha8Rng, max_leaves: usize) -> PrototypeDoc {
    let (cw, ch) = (400.0, 800.0);
    let n = rng.random_range(0..=max_leaves);
    let mut leaves = Vec::with_capacity(n);
    for i in 0..n {
        let rect = if i > 0 && rng.random_bool(0.1) {
            // Exact duplicate of an earlier rect.
            let prev: &Layer = &leaves[rng.random_range(0..i)];
            prev.rect
        } else {
            // Many small rects, so fragment clusters show up.
            let side = if rng.random_bool(0.4) { 24 } else { 200 };
            let w = rng.random_range(1..=side) as f64;
            let h = rng.random_range(1..=side) as f64;
            let x = rng.random_range(0..=(cw as i32 - w as i32)) as f64;
            let y = rng.random_range(0..=(ch as i32 - h as i32)) as f64;
            Rect::new(x, y, w, h)
        };
        let kind = *KINDS.choose(rng).unwrap();
        leaves.push(leaf(format!("l{i}"), kind, rect, random_style(rng)));
    }
    let mut layers = Vec::new();
    let mut g = 0;
    while !leaves.is_empty() {
        let take = rng.random_range(1..=leaves.len().min(4));
        let chunk: Vec<Layer> = leaves.drain(..take).collect();
        if rng.random_bool(0.3) {
            g += 1;
            let rect = Rect::bounding(chunk.iter().map(|l| &l.rect)).unwrap();
            layers.push(Layer::group(&format!("g{g}"), rect, chunk));
        } else {
            layers.extend(chunk);
        }
    }
    PrototypeDoc::new(cw, ch, layers)
}

/// Integer leaves where most rects are drawn inside an earlier one, giving
/// deep containment chains, equal-area siblings and shared edges.
pub fn nested_doc(rng: &mut ChaCha8Rng, max_leaves: usize) -> PrototypeDoc {
    let n = rng.random_range(1..=max_leaves);
    let mut rects: Vec<Rect> = vec![Rect::new(0.0, 0.0, 360.0, 640.0)];
    let mut leaves = Vec::new();
    for i in 0..n {
        let host = rects[rng.random_range(0..rects.len())];
        let w = rng.random_range(1..=host.w as i32);
        let h = rng.random_range(1..=host.h as i32);
        let x = host.x + rng.random_range(0..=host.w as i32 - w) as f64;
        let y = host.y + rng.random_range(0..=host.h as i32 - h) as f64;
        let r = Rect::new(x, y, w as f64, h as f64);
        rects.push(r);
        let kind = *KINDS.choose(rng).unwrap();
        leaves.push(leaf(format!("l{i}"), kind, r, StyleProps::new()));
    }
    // Shuffle so containers do not always precede their contents.
    use rand::seq::SliceRandom;
    leaves.shuffle(rng);
    PrototypeDoc::new(360.0, 640.0, leaves)
}

/// Rejection-samples up to `n` integer rects inside `bounds` whose pairwise
/// overlap area is zero (shared edges allowed).
pub fn overlap_free_rects(rng: &mut ChaCha8Rng, n: usize, bounds: Rect, max_side: i32) -> Vec<Rect> {
    let mut out: Vec<Rect> = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < n * 50 {
        tries += 1;
        let w = rng.random_range(1..=max_side.min(bounds.w as i32)) as f64;
        let h = rng.random_range(1..=max_side.min(bounds.h as i32)) as f64;
        let x = bounds.x + rng.random_range(0..=(bounds.w - w) as i32) as f64;
        let y = bounds.y + rng.random_range(0..=(bounds.h - h) as i32) as f64;
        let r = Rect::new(x, y, w, h);
        if out.iter().all(|o| o.intersection_area(&r) == 0.0) {
            out.push(r);
        }
    }
    out
}

/// Overlap-free prototype: separated top-level rects, some holding their
/// own separated children, on quarter-pixel coordinates.
pub fn overlap_free_doc(rng: &mut ChaCha8Rng, max_top: usize) -> PrototypeDoc {
    let (cw, ch) = (375.0, 812.0);
    let mut layers = Vec::new();
    let mut next = 0;
    let mut id = || {
        next += 1;
        format!("n{next}")
    };
    let frac = |rng: &mut ChaCha8Rng| *[0.0, 0.25, 0.5, 0.75].choose(rng).unwrap();
    // Sample on a coarse grid, then shrink each rect to keep a clear gap.
    let count = rng.random_range(1..=max_top);
    let tops = overlap_free_rects(rng, count, Rect::new(0.0, 0.0, cw, ch), 160);
    for t in tops {
        let (dx, dy) = (frac(rng), frac(rng));
        let r = Rect::new(t.x + dx, t.y + dy, (t.w - 1.0).max(0.5), (t.h - 1.0).max(0.5));
        let big = r.w >= 40.0 && r.h >= 30.0;
        if big && rng.random_bool(0.5) {
            let inner = Rect::new(r.x + 2.0, r.y + 2.0, r.w - 4.0, r.h - 4.0);
            let count = rng.random_range(1..=5);
            let kids = overlap_free_rects(rng, count, Rect::new(0.0, 0.0, inner.w.floor(), inner.h.floor()), 40);
            let card = leaf(
                id(),
                LayerKind::Shape,
                r,
                StyleProps::new().with("fill", "#FFFFFF").with("border-radius", 6.0),
            );
            let mut group = vec![card];
            for k in kids {
                let kr = Rect::new(inner.x + k.x, inner.y + k.y, (k.w - 1.0).max(0.5), (k.h - 1.0).max(0.5));
                let kind = *[LayerKind::Text, LayerKind::Image, LayerKind::Shape].choose(rng).unwrap();
                group.push(leaf(id(), kind, kr, StyleProps::new()));
            }
            let gr = Rect::bounding(group.iter().map(|l| &l.rect)).unwrap();
            layers.push(Layer::group(&id(), gr, group));
        } else {
            let kind = *KINDS.choose(rng).unwrap();
            layers.push(leaf(id(), kind, r, random_style(rng)));
        }
    }
    PrototypeDoc::new(cw, ch, layers)
}

/// Smallest strict container of every leaf by exhaustive comparison; ties
/// go to the earlier layer, and mutually containing rects are unrelated.
pub fn brute_force_parents(doc: &PrototypeDoc, eps: f64) -> BTreeMap<String, String> {
    let leaves = doc.leaf_layers();
    let mut out = BTreeMap::new();
    for (i, c) in leaves.iter().enumerate() {
        let mut best: Option<usize> = None;
        for (j, p) in leaves.iter().enumerate() {
            if i == j || !p.rect.contains(&c.rect, eps) || c.rect.contains(&p.rect, eps) {
                continue;
            }
            best = match best {
                Some(b) if leaves[b].rect.area() < p.rect.area() => Some(b),
                Some(b) if leaves[b].rect.area() == p.rect.area() && b < j => Some(b),
                _ => Some(j),
            };
        }
        let parent = best.map(|b| leaves[b].id.clone()).unwrap_or_else(|| "root".into());
        out.insert(c.id.clone(), parent);
    }
    out
}

pub fn parent_map(root: &HierarchyNode) -> BTreeMap<String, String> {
    fn walk(n: &HierarchyNode, out: &mut BTreeMap<String, String>) {
        for c in &n.children {
            out.insert(c.id.clone(), n.id.clone());
            walk(c, out);
        }
    }
    let mut out = BTreeMap::new();
    walk(root, &mut out);
    out
}

/// XY-cut by testing every integer cut line against every rect. Needs
/// integer coordinates and positive sizes.
pub fn sweep_segment(rects: &[Rect]) -> Segment {
    fn bands(rects: &[Rect], idx: &[usize], horizontal: bool) -> Vec<Vec<usize>> {
        let lo = |r: &Rect| if horizontal { r.y } else { r.x };
        let hi = |r: &Rect| if horizontal { r.bottom() } else { r.right() };
        let start = idx.iter().map(|&i| lo(&rects[i])).fold(f64::INFINITY, f64::min) as i64;
        let end = idx.iter().map(|&i| hi(&rects[i])).fold(f64::NEG_INFINITY, f64::max) as i64;
        // Free lines: no rect strictly crosses them.
        let mut cuts = vec![start];
        for line in start + 1..end {
            let l = line as f64;
            if idx.iter().all(|&i| !(lo(&rects[i]) < l && l < hi(&rects[i]))) {
                cuts.push(line);
            }
        }
        cuts.push(end);
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0] as f64, w[1] as f64);
            let mut band: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| lo(&rects[i]) >= a && hi(&rects[i]) <= b)
                .collect();
            if !band.is_empty() {
                band.sort_by(|&p, &q| {
                    lo(&rects[p])
                        .total_cmp(&lo(&rects[q]))
                        .then(hi(&rects[p]).total_cmp(&hi(&rects[q])))
                        .then(p.cmp(&q))
                });
                out.push(band);
            }
        }
        out
    }

    fn go(rects: &[Rect], idx: Vec<usize>) -> Segment {
        if idx.len() == 1 {
            return Segment::Item(idx[0]);
        }
        let h = bands(rects, &idx, true);
        if h.len() > 1 {
            return Segment::Column(h.into_iter().map(|b| go(rects, b)).collect());
        }
        let v = bands(rects, &idx, false);
        if v.len() > 1 {
            return Segment::Row(v.into_iter().map(|b| go(rects, b)).collect());
        }
        let mut idx = idx;
        idx.sort_unstable();
        Segment::Stuck(idx)
    }

    if rects.is_empty() {
        return Segment::Column(Vec::new());
    }
    go(rects, (0..rects.len()).collect())
}

pub fn direct_encoding(rect: &Rect, canvas: &Rect, l: usize) -> Vec<f64> {
    let zs = [rect.x / canvas.w, rect.y / canvas.h, rect.w / canvas.w, rect.h / canvas.h];
    let mut v = Vec::new();
    for z in zs {
        for k in 0..l {
            let a = 2f64.powi(k as i32) * PI * z;
            v.push(a.sin());
            v.push(a.cos());
        }
    }
    v
}

pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, channels: usize) -> RasterImage {
    let pixels = (0..w * h * channels).map(|_| rng.random_range(0.0..=1.0)).collect();
    RasterImage::new(w, h, channels, pixels).unwrap()
}

fn luma(img: &RasterImage) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; img.width]; img.height];
    for (y, row) in out.iter_mut().enumerate() {
        for (x, v) in row.iter_mut().enumerate() {
            let base = (y * img.width + x) * img.channels;
            *v = if img.channels == 1 {
                img.pixels[base]
            } else {
                0.299 * img.pixels[base] + 0.587 * img.pixels[base + 1] + 0.114 * img.pixels[base + 2]
            };
        }
    }
    out
}

pub fn naive_mse(a: &RasterImage, b: &RasterImage) -> f64 {
    let mut s = 0.0;
    for i in 0..a.pixels.len() {
        s += (a.pixels[i] - b.pixels[i]).powi(2);
    }
    s / a.pixels.len() as f64
}

pub fn naive_psnr(a: &RasterImage, b: &RasterImage) -> f64 {
    10.0 * (1.0 / naive_mse(a, b)).log10()
}

/// Windowed SSIM with explicit loops over every 8x8 window.
pub fn naive_ssim(a: &RasterImage, b: &RasterImage) -> f64 {
    let (la, lb) = (luma(a), luma(b));
    let n = 8;
    let c1 = 0.01f64.powi(2);
    let c2 = 0.03f64.powi(2);
    let mut total = 0.0;
    let mut count = 0;
    for y0 in 0..=a.height - n {
        for x0 in 0..=a.width - n {
            let (mut ma, mut mb) = (0.0, 0.0);
            for y in y0..y0 + n {
                for x in x0..x0 + n {
                    ma += la[y][x];
                    mb += lb[y][x];
                }
            }
            ma /= (n * n) as f64;
            mb /= (n * n) as f64;
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for y in y0..y0 + n {
                for x in x0..x0 + n {
                    va += (la[y][x] - ma).powi(2);
                    vb += (lb[y][x] - mb).powi(2);
                    cov += (la[y][x] - ma) * (lb[y][x] - mb);
                }
            }
            va /= (n * n) as f64;
            vb /= (n * n) as f64;
            cov /= (n * n) as f64;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// Per-label (tp, fp, fn) by direct counting.
pub fn count_confusions(
    pred: &BTreeMap<String, String>,
    truth: &BTreeMap<String, String>,
    label: &str,
) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for (id, t) in truth {
        let p = &pred[id];
        match (p == label, t == label) {
            (true, true) => c.0 += 1,
            (true, false) => c.1 += 1,
            (false, true) => c.2 += 1,
            _ => {}
        }
    }
    c
}

pub const TAXONOMY: [&str; 12] = [
    "text",
    "image",
    "icon",
    "button",
    "text-button",
    "toolbar",
    "navigation-bar",
    "card",
    "list-item",
    "container",
    "status-bar",
    "input",
];

pub fn taxonomy() -> Vec<String> {
    TAXONOMY.iter().map(|s| s.to_string()).collect()
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub const GOLDEN_FIXTURES: [&str; 3] = ["listing", "login", "feed"];

pub fn load_fixture(name: &str) -> PrototypeDoc {
    let bytes = std::fs::read(fixture_path(&format!("{name}.json"))).unwrap();
    parse_prototype(&bytes).unwrap()
}

pub fn build_default(doc: &PrototypeDoc) -> p2c_core::BuildOutput {
    build(doc, &AnnotationSet::default(), &PipelineConfig::default(), &RulesOracle).unwrap()
}

pub fn emit_fixture(name: &str) -> Emitted {
    build_default(&load_fixture(name)).emitted
}

fn axis_start(r: &Rect, dir: FlexDirection) -> f64 {
    match dir {
        FlexDirection::Row => r.x,
        FlexDirection::Column => r.y,
    }
}

/// Every violated layout-tree invariant, as readable messages.
pub fn layout_violations(doc: &PrototypeDoc, tree: &LayoutTree) -> Vec<String> {
    const TOL: f64 = 1e-6;
    let mut out = Vec::new();

    let mut got = Vec::new();
    tree.root.visit(&mut |n| match n.kind {
        LayoutKind::Layer(_) => got.push(n.id.clone()),
        LayoutKind::Merged => got.extend(n.fragments.iter().cloned()),
        _ => {}
    });
    got.sort();
    let mut want: Vec<String> = doc.leaf_layers().iter().map(|l| l.id.clone()).collect();
    want.sort();
    if got != want {
        out.push(format!("leaf multiset changed: {} vs {} leaves", got.len(), want.len()));
    }

    tree.root.visit(&mut |n: &LayoutNode| {
        if n.need_absolute || n.children.len() < 2 {
            return;
        }
        let Some(dir) = n.flex_direction else {
            out.push(format!("{}: {} children but no flex direction", n.id, n.children.len()));
            return;
        };
        for w in n.children.windows(2) {
            let (a, b) = (&w[0].rect, &w[1].rect);
            let ordered = match dir {
                FlexDirection::Row => a.right() <= b.x + TOL,
                FlexDirection::Column => a.bottom() <= b.y + TOL,
            };
            if !ordered {
                out.push(format!("{}: children {} and {} out of {} order", n.id, w[0].id, w[1].id, dir.as_str()));
            }
        }
        if dir == FlexDirection::Row {
            // Row members share one connected vertical band.
            let mut spans: Vec<(f64, f64)> = n.children.iter().map(|c| (c.rect.y, c.rect.bottom())).collect();
            spans.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut reach = spans[0].1;
            for &(s, e) in &spans[1..] {
                if s >= reach + TOL {
                    out.push(format!("{}: row children split into separate bands", n.id));
                    break;
                }
                reach = reach.max(e);
            }
        }
    });

    let mut again = resegment_rows_cols(tree.clone());
    renumber_synthetic(&mut again);
    if &again != tree {
        out.push("resegmentation is not idempotent".into());
    }
    out
}

fn classname_boxes(html: &str, css: &str, viewport: Rect) -> BTreeMap<String, Rect> {
    let doc = parse_html(html).unwrap();
    let rules = parse_css(css).unwrap();
    replay_layout(&doc, &rules, viewport)
        .unwrap()
        .into_iter()
        .map(|b| (b.id, b.rect))
        .collect()
}

/// Child order along the flex axis of every flex container, by classname.
fn flex_orders(tree: &LayoutTree, boxes: &BTreeMap<String, Rect>) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    tree.root.visit(&mut |n| {
        let Some(dir) = n.flex_direction else { return };
        if n.need_absolute || n.children.len() < 2 {
            return;
        }
        let mut kids: Vec<(f64, String)> = n
            .children
            .iter()
            .map(|c| {
                let class = c.classname.clone().unwrap_or_default();
                (axis_start(&boxes[&class], dir), class)
            })
            .collect();
        kids.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.push(kids.into_iter().map(|k| k.1).collect());
    });
    out
}

/// Builds `doc`, replays the output and checks positions and, at a wider
/// viewport, flex child orderings. Returns the node count.
pub fn roundtrip(doc: &PrototypeDoc, max_dev: f64, widen: f64) -> Result<usize, String> {
    let out = build_default(doc);
    let (html, css, tree) = (&out.emitted.html, &out.emitted.css, &out.analysis.tree);
    let report = verify_emitted(html, css, tree, doc.canvas).map_err(|e| e.to_string())?;
    if !report.missing.is_empty() {
        return Err(format!("no replayed box for {:?}", report.missing));
    }
    if report.max_deviation > max_dev {
        let worst = report
            .nodes
            .iter()
            .max_by(|a, b| a.deviation.total_cmp(&b.deviation))
            .map(|n| n.id.clone())
            .unwrap_or_default();
        return Err(format!("max deviation {} at {worst}", report.max_deviation));
    }
    let base = flex_orders(tree, &classname_boxes(html, css, doc.canvas));
    let wide = Rect::new(0.0, 0.0, doc.canvas.w * widen, doc.canvas.h);
    let widened = flex_orders(tree, &classname_boxes(html, css, wide));
    if base != widened {
        return Err("flex child order changed at the wider viewport".into());
    }
    let expected: Vec<Vec<String>> = {
        let mut v = Vec::new();
        tree.root.visit(&mut |n| {
            if n.flex_direction.is_some() && !n.need_absolute && n.children.len() >= 2 {
                v.push(n.children.iter().map(|c| c.classname.clone().unwrap_or_default()).collect());
            }
        });
        v
    };
    if base != expected {
        return Err("replayed flex order differs from the tree".into());
    }
    Ok(tree.node_count())
}

/// A stacked list of `cards` cards with five layers each.
pub fn card_list(cards: usize) -> PrototypeDoc {
    let mut layers = Vec::new();
    for i in 0..cards {
        let y = 16.0 + i as f64 * 100.0;
        let card = vec![
            leaf(
                format!("c{i}-bg"),
                LayerKind::Shape,
                Rect::new(16.0, y, 343.0, 88.0),
                StyleProps::new().with("fill", "#FFFFFF").with("border-radius", 8.0),
            ),
            leaf(format!("c{i}-thumb"), LayerKind::Image, Rect::new(28.0, y + 12.0, 64.0, 64.0), StyleProps::new()),
            leaf(
                format!("c{i}-title"),
                LayerKind::Text,
                Rect::new(104.0, y + 14.0, 200.0, 22.0),
                StyleProps::new().with("font-size", 17.0),
            ),
            leaf(format!("c{i}-meta"), LayerKind::Text, Rect::new(104.0, y + 44.0, 150.0, 18.0), StyleProps::new()),
            leaf(format!("c{i}-star"), LayerKind::Vector, Rect::new(323.0, y + 14.0, 20.0, 20.0), StyleProps::new()),
        ];
        layers.push(Layer::group(&format!("c{i}"), Rect::new(16.0, y, 343.0, 88.0), card));
    }
    PrototypeDoc::new(375.0, 16.0 + cards as f64 * 100.0, layers)
}
