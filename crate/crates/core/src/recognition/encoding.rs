use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Rect;

/// Default frequency count: 4 scalars x 2 sinusoids x 16 = 128 dimensions.
pub const DEFAULT_FREQUENCIES: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("canvas has zero width or height")]
    DegenerateCanvas,
    #[error("frequency count must be at least 1")]
    NoFrequencies,
}

/// High-frequency sinusoidal encoding of an element's position and size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialEncoding {
    /// `(x/W, y/H, w/W, h/H)`.
    pub source: [f64; 4],
    pub frequencies: usize,
    /// `8 * frequencies` components, grouped per scalar in x, y, w, h order.
    pub vector: Vec<f64>,
}

/// Encodes each canvas-normalized scalar `z` as
/// `(sin(2^0 πz), cos(2^0 πz), ..., sin(2^(L-1) πz), cos(2^(L-1) πz))`
/// and concatenates the four expansions.
pub fn spatial_encode(rect: &Rect, canvas: &Rect, frequencies: usize) -> Result<SpatialEncoding, EncodingError> {
    if canvas.w == 0.0 || canvas.h == 0.0 {
        return Err(EncodingError::DegenerateCanvas);
    }
    if frequencies == 0 {
        return Err(EncodingError::NoFrequencies);
    }
    let source = [
        rect.x / canvas.w,
        rect.y / canvas.h,
        rect.w / canvas.w,
        rect.h / canvas.h,
    ];
    let mut vector = Vec::with_capacity(8 * frequencies);
    for z in source {
        let mut scale = 1.0;
        for _ in 0..frequencies {
            let angle = scale * PI * z;
            vector.push(angle.sin());
            vector.push(angle.cos());
            scale *= 2.0;
        }
    }
    Ok(SpatialEncoding {
        source,
        frequencies,
        vector,
    })
}
