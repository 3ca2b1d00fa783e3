use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
    #[error("invalid raster: {0}")]
    Invalid(String),
}

/// Row-major pixels in `[0, 1]` with one (gray) or three (RGB) channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub pixels: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<f64>) -> Result<Self, RasterError> {
        if channels != 1 && channels != 3 {
            return Err(RasterError::Invalid(format!("{channels} channels")));
        }
        if pixels.len() != width * height * channels {
            return Err(RasterError::Invalid(format!(
                "{} values for {width}x{height}x{channels}",
                pixels.len()
            )));
        }
        if let Some(v) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(RasterError::Invalid(format!("value {v} outside [0, 1]")));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn gray(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, RasterError> {
        RasterImage::new(width, height, 1, pixels)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        RasterImage {
            width,
            height,
            channels: 1,
            pixels: vec![value; width * height],
        }
    }

    /// Single-channel copy; RGB uses luma weights 0.299, 0.587, 0.114.
    pub fn to_gray(&self) -> RasterImage {
        if self.channels == 1 {
            return self.clone();
        }
        let pixels = self
            .pixels
            .chunks_exact(3)
            .map(|p| (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).clamp(0.0, 1.0))
            .collect();
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 1,
            pixels,
        }
    }

    /// Loads an 8-bit PNG. Gray images stay single-channel, anything else is
    /// read as RGB (alpha is dropped).
    pub fn load_png(path: &Path) -> Result<Self, RasterError> {
        let img = image::ImageReader::open(path)
            .map_err(image::ImageError::IoError)?
            .with_guessed_format()
            .map_err(image::ImageError::IoError)?
            .decode()?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let gray = matches!(img.color(), image::ColorType::L8 | image::ColorType::La8 | image::ColorType::L16);
        if gray {
            let buf = img.to_luma8();
            Ok(RasterImage {
                width: w,
                height: h,
                channels: 1,
                pixels: buf.as_raw().iter().map(|&v| v as f64 / 255.0).collect(),
            })
        } else {
            let buf = img.to_rgb8();
            Ok(RasterImage {
                width: w,
                height: h,
                channels: 3,
                pixels: buf.as_raw().iter().map(|&v| v as f64 / 255.0).collect(),
            })
        }
    }

    /// Writes an 8-bit PNG (values rounded to the nearest level).
    pub fn save_png(&self, path: &Path) -> Result<(), RasterError> {
        let bytes: Vec<u8> = self.pixels.iter().map(|v| (v * 255.0).round() as u8).collect();
        let color = if self.channels == 1 {
            image::ExtendedColorType::L8
        } else {
            image::ExtendedColorType::Rgb8
        };
        image::save_buffer_with_format(
            path,
            &bytes,
            self.width as u32,
            self.height as u32,
            color,
            image::ImageFormat::Png,
        )?;
        Ok(())
    }
}
