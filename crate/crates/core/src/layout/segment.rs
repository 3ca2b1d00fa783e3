//! Recursive XY-cut over sibling rectangles.

use crate::geometry::Rect;

/// Tolerance when deciding whether two extents are disjoint.
const CUT_TOLERANCE: f64 = 1e-6;

/// Result of segmenting a set of rects, by index into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Item(usize),
    /// Side-by-side segments, left to right.
    Row(Vec<Segment>),
    /// Stacked segments, top to bottom.
    Column(Vec<Segment>),
    /// Rects that no straight cut separates (an interlocking arrangement).
    Stuck(Vec<usize>),
}

impl Segment {
    /// Input indices in segment order.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            Segment::Item(i) => out.push(*i),
            Segment::Row(s) | Segment::Column(s) => s.iter().for_each(|c| c.collect(out)),
            Segment::Stuck(v) => out.extend(v),
        }
    }
}

/// Nesting depth of a segmentation (an item has depth 0).
pub fn segment_depth(seg: &Segment) -> usize {
    match seg {
        Segment::Item(_) | Segment::Stuck(_) => 0,
        Segment::Row(s) | Segment::Column(s) => 1 + s.iter().map(segment_depth).max().unwrap_or(0),
    }
}

/// Segments `rects` top-down: first into horizontal bands separated by gap
/// lines that cross no rect, then each band into columns the same way along
/// x, recursing until nothing more splits.
///
/// The input is expected to be overlap-free; touching edges count as a gap.
pub fn xy_segment(rects: &[Rect]) -> Segment {
    let all: Vec<usize> = (0..rects.len()).collect();
    if all.is_empty() {
        return Segment::Column(Vec::new());
    }
    cut(rects, all)
}

fn cut(rects: &[Rect], idx: Vec<usize>) -> Segment {
    if idx.len() == 1 {
        return Segment::Item(idx[0]);
    }
    let bands = split(rects, &idx, |r| (r.y, r.bottom()));
    if bands.len() > 1 {
        return Segment::Column(bands.into_iter().map(|b| cut(rects, b)).collect());
    }
    let cols = split(rects, &idx, |r| (r.x, r.right()));
    if cols.len() > 1 {
        return Segment::Row(cols.into_iter().map(|c| cut(rects, c)).collect());
    }
    let mut idx = idx;
    idx.sort_unstable();
    Segment::Stuck(idx)
}

/// Groups indices into maximal runs whose extents (as given by `extent`)
/// chain-overlap, ordered along the axis.
fn split(rects: &[Rect], idx: &[usize], extent: impl Fn(&Rect) -> (f64, f64)) -> Vec<Vec<usize>> {
    let mut sorted = idx.to_vec();
    sorted.sort_by(|&a, &b| {
        let (sa, ea) = extent(&rects[a]);
        let (sb, eb) = extent(&rects[b]);
        sa.total_cmp(&sb).then(ea.total_cmp(&eb)).then(a.cmp(&b))
    });
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for i in sorted {
        let (start, end) = extent(&rects[i]);
        match out.last_mut() {
            Some(run) if start < reach - CUT_TOLERANCE => {
                run.push(i);
                reach = reach.max(end);
            }
            _ => {
                out.push(vec![i]);
                reach = end;
            }
        }
    }
    out
}
