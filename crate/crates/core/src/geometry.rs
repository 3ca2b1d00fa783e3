//! Axis-aligned rectangles in canvas pixels.

use serde::{Deserialize, Serialize};

/// Default slack, in pixels, used for containment tests.
pub const DEFAULT_CONTAINMENT_EPS: f64 = 0.5;

/// An axis-aligned rectangle. `x`/`y` are the top-left corner, `w`/`h` are
/// non-negative extents.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    /// Builds a rect from its top-left and bottom-right corners.
    pub fn from_corners(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self {
            x: left,
            y: top,
            w: (right - left).max(0.0),
            h: (bottom - top).max(0.0),
        }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite()
    }

    /// Intersection rectangle, or `None` when the two do not meet. Rects that
    /// merely touch produce a zero-area intersection.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let left = self.x.max(other.x);
        let top = self.y.max(other.y);
        let right = self.right().min(other.right());
        let bottom = self.bottom().min(other.bottom());
        if right < left || bottom < top {
            return None;
        }
        Some(Rect::from_corners(left, top, right, bottom))
    }

    pub fn intersection_area(&self, other: &Rect) -> f64 {
        self.intersection(other).map_or(0.0, |r| r.area())
    }

    /// Smallest rect covering both, from the smallest top-left point to the
    /// largest bottom-right point.
    pub fn union(&self, other: &Rect) -> Rect {
        Rect::from_corners(
            self.x.min(other.x),
            self.y.min(other.y),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    /// Bounding box of a non-empty sequence of rects.
    pub fn bounding<'a, I>(rects: I) -> Option<Rect>
    where
        I: IntoIterator<Item = &'a Rect>,
    {
        rects.into_iter().fold(None, |acc, r| match acc {
            None => Some(*r),
            Some(b) => Some(b.union(r)),
        })
    }

    /// Intersection over union; 0 when the union has no area.
    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            (inter / union).clamp(0.0, 1.0)
        }
    }

    /// True iff `inner` lies within `self` grown by `eps` on every side.
    pub fn contains(&self, inner: &Rect, eps: f64) -> bool {
        inner.x >= self.x - eps
            && inner.y >= self.y - eps
            && inner.right() <= self.right() + eps
            && inner.bottom() <= self.bottom() + eps
    }

    /// Fraction of `self`'s area covered by `other`. Zero-area rects count as
    /// fully covered when they sit inside `other`.
    pub fn coverage_by(&self, other: &Rect) -> f64 {
        let area = self.area();
        if area <= 0.0 {
            return if other.contains(self, 0.0) { 1.0 } else { 0.0 };
        }
        (self.intersection_area(other) / area).clamp(0.0, 1.0)
    }

    /// Largest axis gap between two rects (0 when they touch or overlap).
    pub fn gap(&self, other: &Rect) -> f64 {
        let gx = (other.x - self.right()).max(self.x - other.right()).max(0.0);
        let gy = (other.y - self.bottom()).max(self.y - other.bottom()).max(0.0);
        gx.max(gy)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.w, self.h)
    }
}

/// IoU of two rects.
pub fn rect_iou(a: &Rect, b: &Rect) -> f64 {
    a.iou(b)
}

/// Containment test with an `eps` pixel tolerance on all sides.
pub fn rect_contains(outer: &Rect, inner: &Rect, eps: f64) -> bool {
    outer.contains(inner, eps)
}
