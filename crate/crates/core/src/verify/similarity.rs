use serde::{Serialize, Serializer};
use thiserror::Error;

use super::RasterImage;

/// SSIM window side.
pub const SSIM_WINDOW: usize = 8;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("image dimensions differ: {0}x{1}x{2} vs {3}x{4}x{5}")]
    DimensionMismatch(usize, usize, usize, usize, usize, usize),
    #[error("image {0}x{1} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")]
    TooSmall(usize, usize),
}

fn check(a: &RasterImage, b: &RasterImage) -> Result<(), MetricError> {
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels) {
        return Err(MetricError::DimensionMismatch(
            a.width, a.height, a.channels, b.width, b.height, b.channels,
        ));
    }
    Ok(())
}

/// Mean squared difference over all pixels and channels.
pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64, MetricError> {
    check(a, b)?;
    if a.pixels.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a.pixels.iter().zip(&b.pixels).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.pixels.len() as f64)
}

/// Peak signal-to-noise ratio in dB with peak 1.0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    /// The images are identical.
    Infinite,
}

impl Psnr {
    pub fn is_infinite(self) -> bool {
        self == Psnr::Infinite
    }

    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }
}

pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<Psnr, MetricError> {
    let m = mse(a, b)?;
    Ok(if m == 0.0 {
        Psnr::Infinite
    } else {
        Psnr::Finite(10.0 * (1.0 / m).log10())
    })
}

/// Summed-area table with a zero border row and column.
fn integral(values: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut t = vec![0.0; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += values[y * w + x];
            t[(y + 1) * (w + 1) + x + 1] = t[y * (w + 1) + x + 1] + row;
        }
    }
    t
}

fn window_sum(t: &[f64], w: usize, x: usize, y: usize, n: usize) -> f64 {
    let s = w + 1;
    t[(y + n) * s + x + n] - t[y * s + x + n] - t[(y + n) * s + x] + t[y * s + x]
}

/// Mean structural similarity over every 8x8 window (stride 1) of the luma
/// channel, with population variances and `C1 = (0.01)^2`, `C2 = (0.03)^2`.
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64, MetricError> {
    check(a, b)?;
    let (w, h) = (a.width, a.height);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricError::TooSmall(w, h));
    }
    let ga = a.to_gray().pixels;
    let gb = b.to_gray().pixels;
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let prod: Vec<f64> = ga.iter().zip(&gb).map(|(x, y)| x * y).collect();
    let (ta, tb) = (integral(&ga, w, h), integral(&gb, w, h));
    let (taa, tbb, tab) = (integral(&sq(&ga), w, h), integral(&sq(&gb), w, h), integral(&prod, w, h));

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let n = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let mut total = 0.0;
    for y in 0..=h - SSIM_WINDOW {
        for x in 0..=w - SSIM_WINDOW {
            let ws = |t: &[f64]| window_sum(t, w, x, y, SSIM_WINDOW) / n;
            let (ma, mb) = (ws(&ta), ws(&tb));
            let va = ws(&taa) - ma * ma;
            let vb = ws(&tbb) - mb * mb;
            let cov = ws(&tab) - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
    }
    let windows = ((w - SSIM_WINDOW + 1) * (h - SSIM_WINDOW + 1)) as f64;
    Ok(total / windows)
}

/// The three similarity figures for one image pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub ssim: f64,
    #[serde(serialize_with = "psnr_db")]
    pub psnr: Psnr,
    pub psnr_infinite: bool,
    pub mse: f64,
}

fn psnr_db<S: Serializer>(p: &Psnr, s: S) -> Result<S::Ok, S::Error> {
    p.db().serialize(s)
}

pub fn similarity(a: &RasterImage, b: &RasterImage) -> Result<SimilarityReport, MetricError> {
    let p = psnr(a, b)?;
    Ok(SimilarityReport {
        ssim: ssim(a, b)?,
        psnr: p,
        psnr_infinite: p.is_infinite(),
        mse: mse(a, b)?,
    })
}
