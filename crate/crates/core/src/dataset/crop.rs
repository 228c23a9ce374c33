use image::{DynamicImage, GenericImageView};

use super::DatasetError;
use crate::model::BBox;

/// Pixel rectangle actually cut from an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

/// Set when the requested box had to be clipped to the image.
#[derive(Debug, Clone, PartialEq)]
pub struct CropWarning {
    pub requested: [f64; 4],
    pub applied: PixelRect,
}

/// Integer pixel rectangle covering `bbox`: minima floored, maxima ceiled,
/// then clipped to the image. `None` when nothing remains.
pub fn pixel_rect(bbox: &BBox, width: u32, height: u32) -> Option<PixelRect> {
    let [x0, y0, x1, y1] = bbox.to_array();
    let x0 = (x0.floor().max(0.0) as u64).min(width as u64) as u32;
    let y0 = (y0.floor().max(0.0) as u64).min(height as u64) as u32;
    let x1 = (x1.ceil().max(0.0) as u64).min(width as u64) as u32;
    let y1 = (y1.ceil().max(0.0) as u64).min(height as u64) as u32;
    (x1 > x0 && y1 > y0).then(|| PixelRect {
        x: x0,
        y: y0,
        width: x1 - x0,
        height: y1 - y0,
    })
}

/// Cuts the sign region out of `image`.
pub fn crop_sign(image: &DynamicImage, bbox: &BBox) -> Result<(DynamicImage, Option<CropWarning>), DatasetError> {
    let (w, h) = image.dimensions();
    let rect = pixel_rect(bbox, w, h).ok_or_else(|| DatasetError::EmptyCrop {
        bbox: bbox.to_array(),
        width: w,
        height: h,
    })?;
    let clipped = !bbox.within(w as f64, h as f64);
    let warning = clipped.then(|| {
        log::warn!("crop {:?} clipped to {}x{} image", bbox.to_array(), w, h);
        CropWarning {
            requested: bbox.to_array(),
            applied: rect,
        }
    });
    Ok((image.crop_imm(rect.x, rect.y, rect.width, rect.height), warning))
}
