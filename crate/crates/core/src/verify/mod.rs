//! Browser-free verification: a replay interpreter for the emitted CSS
//! subset, and SSIM/PSNR/MSE between raster images.

mod parse;
mod raster;
mod replay;
mod similarity;

pub use parse::{check_tag_balance, parse_css, parse_html, ParseError};
pub use raster::{RasterError, RasterImage};
pub use replay::{deviation_report, replay_layout, DeviationReport, NodeDeviation, ReplayBox, ReplayError};
pub use similarity::{mse, psnr, similarity, ssim, MetricError, Psnr, SimilarityReport, SSIM_K1, SSIM_K2, SSIM_WINDOW};
