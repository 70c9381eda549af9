//! PSNR, SSIM and transform-domain energy compaction.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::catalog::Transform;
use crate::codec::{self, BlockGrid};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::matrix::N;
use crate::plan::OpCount;

const PEAK: f64 = 255.0;

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.same_size(b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum();
    Ok(sum as f64 / a.pixels().len() as f64)
}

/// `10·log10(255² / MSE)`; `+∞` for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    let e = mse(a, b)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / e).log10())
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable Gaussian filter over the valid region.
fn filter_valid(src: &[f64], width: usize, height: usize, w: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = width - SSIM_WINDOW + 1;
    let oh = height - SSIM_WINDOW + 1;
    let mut rows = vec![0.0; ow * height];
    for y in 0..height {
        let line = &src[y * width..(y + 1) * width];
        for x in 0..ow {
            rows[y * ow + x] = w.iter().zip(&line[x..]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = w.iter().enumerate().map(|(i, a)| a * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// Mean SSIM over 11×11 Gaussian windows (σ = 1.5) fully inside the image,
/// `K1 = 0.01`, `K2 = 0.03`, `L = 255`, no downsampling.
pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.same_size(b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::ImageTooSmall(w, h));
    }
    let win = gaussian_window();
    let x: Vec<f64> = a.pixels().iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = b.pixels().iter().map(|&v| v as f64).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let maps: Vec<Vec<f64>> = [&x, &y, &xx, &yy, &xy].par_iter().map(|src| filter_valid(src, w, h, &win)).collect();
    let (mx, my, mxx, myy, mxy) = (&maps[0], &maps[1], &maps[2], &maps[3], &maps[4]);
    let c1 = (SSIM_K1 * PEAK).powi(2);
    let c2 = (SSIM_K2 * PEAK).powi(2);
    let total: f64 = (0..mx.len())
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = mxx[i] - ux * ux;
            let vy = myy[i] - uy * uy;
            let cov = mxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / mx.len() as f64)
}

/// How pixel blocks are offset before measuring energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DcConvention {
    /// Pixels in `0..=255`.
    Raw,
    /// Pixels shifted by −128, as in the codec.
    LevelShifted,
}

impl DcConvention {
    pub const ALL: [DcConvention; 2] = [DcConvention::Raw, DcConvention::LevelShifted];

    pub fn offset(self) -> f64 {
        match self {
            DcConvention::Raw => 0.0,
            DcConvention::LevelShifted => 128.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DcConvention::Raw => "raw",
            DcConvention::LevelShifted => "level-shifted",
        }
    }
}

/// Fraction of the 2-D coefficient energy of one image held in the
/// upper-left `k×k` corner of each block. An image with no energy counts as
/// fully compacted.
pub fn image_energy_ratio(t: &Transform, k: usize, img: &GrayImage, convention: DcConvention) -> Result<f64> {
    if t.is_pruned() {
        return Err(Error::AlreadyPruned(t.name()));
    }
    if k == 0 || k > N {
        return Err(Error::PruneRange(k));
    }
    let grid = BlockGrid::partition(img);
    let off = convention.offset();
    let per_block: Vec<(f64, f64)> = grid
        .blocks
        .par_iter()
        .map(|b| {
            let mut a = [[0.0; N]; N];
            for (row, src) in a.iter_mut().zip(b) {
                for (v, &p) in row.iter_mut().zip(src) {
                    *v = p as f64 - off;
                }
            }
            let c = codec::forward_2d(t, &a);
            (c.corner_energy(k), c.energy())
        })
        .collect();
    let (corner, total) = per_block.iter().fold((0.0, 0.0), |acc, b| (acc.0 + b.0, acc.1 + b.1));
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok(corner / total)
}

/// Arithmetic mean of the per-image ratios over `images`.
pub fn energy_compaction(t: &Transform, k: usize, images: &[GrayImage], convention: DcConvention) -> Result<f64> {
    if images.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let ratios = images.iter().map(|img| image_energy_ratio(t, k, img, convention)).collect::<Result<Vec<_>>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Quality and cost of one transform on one image, or averaged over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    pub transform: String,
    pub prune_k: usize,
    pub quality: u32,
    /// `+∞` (serialized as `"inf"`) for a lossless reconstruction.
    #[serde(serialize_with = "ser_db")]
    pub psnr_db: f64,
    /// `None` when the image is smaller than the SSIM window.
    pub ssim: Option<f64>,
    pub energy_ratio: Option<f64>,
    pub op_count_2d: OpCount,
}

impl QualityReport {
    /// Averages PSNR, SSIM and energy over reports of the same transform.
    /// SSIM and energy are averaged only when every report carries them.
    pub fn mean(reports: &[QualityReport]) -> Result<QualityReport> {
        let first = reports.first().ok_or(Error::EmptyCorpus)?;
        let n = reports.len() as f64;
        let avg = |f: &dyn Fn(&QualityReport) -> Option<f64>| -> Option<f64> {
            reports.iter().map(f).sum::<Option<f64>>().map(|s| s / n)
        };
        Ok(QualityReport {
            transform: first.transform.clone(),
            prune_k: first.prune_k,
            quality: first.quality,
            psnr_db: reports.iter().map(|r| r.psnr_db).sum::<f64>() / n,
            ssim: avg(&|r| r.ssim),
            energy_ratio: avg(&|r| r.energy_ratio),
            op_count_2d: first.op_count_2d,
        })
    }
}
