//! JPEG-like block codec used to measure transform quality.
//!
//! Pipeline per 8×8 block: level shift by −128, forward 2-D transform to a
//! `K×K` coefficient block, quantize with the top-left `K×K` of the JPEG
//! luminance table, dequantize, inverse transform, shift back, round and
//! clamp. No entropy coding is done.

use rayon::prelude::*;

use crate::catalog::Transform;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::matrix::N;
use crate::metrics::{self, QualityReport};

pub type Block = [[f64; N]; N];

/// Standard JPEG luminance quantization table (ITU-T T.81 Annex K), row-major.
#[rustfmt::skip]
pub const JPEG_LUMINANCE: [u16; 64] = [
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
];

pub const DEFAULT_QUALITY: u32 = 50;

/// An image cut into 8×8 blocks, padded on the right and bottom by edge
/// replication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    pub width: usize,
    pub height: usize,
    pub pad_right: usize,
    pub pad_bottom: usize,
    pub blocks_x: usize,
    pub blocks_y: usize,
    /// Row-major blocks, each row-major.
    pub blocks: Vec<[[u8; N]; N]>,
}

impl BlockGrid {
    pub fn partition(img: &GrayImage) -> Self {
        let (w, h) = (img.width(), img.height());
        let blocks_x = w.div_ceil(N);
        let blocks_y = h.div_ceil(N);
        let mut blocks = Vec::with_capacity(blocks_x * blocks_y);
        for by in 0..blocks_y {
            for bx in 0..blocks_x {
                let mut b = [[0u8; N]; N];
                for (r, row) in b.iter_mut().enumerate() {
                    let y = (by * N + r).min(h - 1);
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = img.get((bx * N + c).min(w - 1), y);
                    }
                }
                blocks.push(b);
            }
        }
        BlockGrid {
            width: w,
            height: h,
            pad_right: blocks_x * N - w,
            pad_bottom: blocks_y * N - h,
            blocks_x,
            blocks_y,
            blocks,
        }
    }

    /// Reassembles the blocks and strips the padding.
    pub fn reassemble(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| self.blocks[(y / N) * self.blocks_x + x / N][y % N][x % N])
            .expect("grid dimensions are non-zero")
    }

    pub fn with_blocks(&self, blocks: Vec<[[u8; N]; N]>) -> Self {
        assert_eq!(blocks.len(), self.blocks.len());
        BlockGrid { blocks, ..self.clone() }
    }
}

/// `K×K` quantization step sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantTable {
    k: usize,
    steps: Vec<u16>,
}

impl QuantTable {
    /// JPEG luminance table scaled with the libjpeg quality formula
    /// (`5000/Q` below 50, `200 − 2Q` above), clamped to `1..=255`.
    pub fn luminance(quality: u32) -> Result<Self> {
        if !(1..=100).contains(&quality) {
            return Err(Error::Quality(quality));
        }
        let scale = if quality < 50 { 5000 / quality } else { 200 - 2 * quality };
        let steps = JPEG_LUMINANCE.iter().map(|&q| ((q as u32 * scale + 50) / 100).clamp(1, 255) as u16).collect();
        Ok(QuantTable { k: N, steps })
    }

    /// All steps equal to one.
    pub fn unit(k: usize) -> Self {
        QuantTable { k, steps: vec![1; k * k] }
    }

    pub fn new(k: usize, steps: Vec<u16>) -> Result<Self> {
        if steps.len() != k * k {
            return Err(Error::Dimension { expected: k * k, actual: steps.len() });
        }
        if steps.contains(&0) {
            return Err(Error::InvalidMatrix("quantization step of zero".into()));
        }
        Ok(QuantTable { k, steps })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn step(&self, i: usize, j: usize) -> u16 {
        self.steps[i * self.k + j]
    }

    /// Upper-left `k×k` corner.
    pub fn top_left(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k {
            return Err(Error::PruneRange(k));
        }
        let steps = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| self.step(i, j)).collect();
        Ok(QuantTable { k, steps })
    }
}

/// Square block of transform coefficients, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientBlock {
    pub k: usize,
    pub data: Vec<f64>,
}

impl CoefficientBlock {
    pub fn zeros(k: usize) -> Self {
        CoefficientBlock { k, data: vec![0.0; k * k] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    /// Squared sum of every coefficient.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Squared sum of the upper-left `k×k` corner.
    pub fn corner_energy(&self, k: usize) -> f64 {
        (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| self.get(i, j).powi(2)).sum()
    }
}

/// Quantized coefficients, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedBlock {
    pub k: usize,
    pub data: Vec<i32>,
}

/// `T⟨K⟩·A·T⟨K⟩ᵀ` without the scaling diagonal: eight column passes then `K`
/// row passes of the 1-D transform.
pub fn forward_2d_unscaled(t: &Transform, block: &Block) -> CoefficientBlock {
    let k = t.prune_k();
    let mut scratch = Vec::with_capacity(64);
    let mut col = [0.0; N];
    let mut tmp = vec![0.0; k];
    // partial[i][c] = (T·A)[i][c]
    let mut partial = vec![[0.0; N]; k];
    for c in 0..N {
        for r in 0..N {
            col[r] = block[r][c];
        }
        t.forward_1d(&col, &mut scratch, &mut tmp).expect("block is 8 wide");
        for i in 0..k {
            partial[i][c] = tmp[i];
        }
    }
    let mut out = CoefficientBlock::zeros(k);
    for (i, row) in partial.iter().enumerate() {
        t.forward_1d(row, &mut scratch, &mut out.data[i * k..(i + 1) * k]).expect("row is 8 wide");
    }
    out
}

/// Forward 2-D transform `Ĉ⟨K⟩·A·Ĉ⟨K⟩ᵀ`, the scaling applied as `s_i·s_j`.
pub fn forward_2d(t: &Transform, block: &Block) -> CoefficientBlock {
    let mut b = forward_2d_unscaled(t, block);
    let s = t.scaling();
    for i in 0..b.k {
        for j in 0..b.k {
            b.data[i * b.k + j] *= s[i] * s[j];
        }
    }
    b
}

/// Reconstruction `Ĉ⟨K⟩ᵀ·B·Ĉ⟨K⟩`.
pub fn inverse_2d(t: &Transform, coeffs: &CoefficientBlock) -> Result<Block> {
    let k = t.prune_k();
    if coeffs.k != k {
        return Err(Error::Dimension { expected: k, actual: coeffs.k });
    }
    let basis = t.basis();
    // tmp = B·Ĉ, K×8
    let mut tmp = vec![[0.0; N]; k];
    for (i, row) in tmp.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = (0..k).map(|j| coeffs.get(i, j) * basis[j][n]).sum();
        }
    }
    let mut out = [[0.0; N]; N];
    for (m, row) in out.iter_mut().enumerate() {
        for (n, v) in row.iter_mut().enumerate() {
            *v = (0..k).map(|i| basis[i][m] * tmp[i][n]).sum();
        }
    }
    Ok(out)
}

/// `round(coeff / step)`, ties away from zero.
pub fn quantize(coeffs: &CoefficientBlock, table: &QuantTable) -> Result<QuantizedBlock> {
    if coeffs.k != table.k() {
        return Err(Error::Dimension { expected: table.k(), actual: coeffs.k });
    }
    let data = coeffs.data.iter().zip(&table.steps).map(|(&c, &q)| (c / q as f64).round() as i32).collect();
    Ok(QuantizedBlock { k: coeffs.k, data })
}

pub fn dequantize(q: &QuantizedBlock, table: &QuantTable) -> Result<CoefficientBlock> {
    if q.k != table.k() {
        return Err(Error::Dimension { expected: table.k(), actual: q.k });
    }
    let data = q.data.iter().zip(&table.steps).map(|(&v, &s)| v as f64 * s as f64).collect();
    Ok(CoefficientBlock { k: q.k, data })
}

/// Quantizes unscaled coefficients with `s_i·s_j` merged into the quantizer.
/// The product `s_i·s_j` is formed exactly as in [`forward_2d`], so both
/// paths round ties identically.
pub fn quantize_folded(unscaled: &CoefficientBlock, table: &QuantTable, scaling: &[f64]) -> Result<QuantizedBlock> {
    let k = unscaled.k;
    if k != table.k() || scaling.len() != k {
        return Err(Error::Dimension { expected: table.k(), actual: k });
    }
    let data = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            (unscaled.data[idx] * (scaling[i] * scaling[j]) / table.step(i, j) as f64).round() as i32
        })
        .collect();
    Ok(QuantizedBlock { k, data })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressOptions {
    pub quality: u32,
    /// Force every quantization step to 1.
    pub quant_unit: bool,
    /// Merge the scaling diagonal into the quantizer.
    pub folded: bool,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions { quality: DEFAULT_QUALITY, quant_unit: false, folded: false }
    }
}

impl CompressOptions {
    pub fn table(&self, k: usize) -> Result<QuantTable> {
        if self.quant_unit {
            // still validate the quality so reports never carry a bad value
            QuantTable::luminance(self.quality)?;
            return Ok(QuantTable::unit(k));
        }
        QuantTable::luminance(self.quality)?.top_left(k)
    }
}

fn level_shifted(b: &[[u8; N]; N]) -> Block {
    let mut out = [[0.0; N]; N];
    for (o, row) in out.iter_mut().zip(b) {
        for (v, &p) in o.iter_mut().zip(row) {
            *v = p as f64 - 128.0;
        }
    }
    out
}

/// Quantized coefficients of one level-shifted block.
pub fn encode_block(t: &Transform, block: &[[u8; N]; N], table: &QuantTable, folded: bool) -> Result<QuantizedBlock> {
    let a = level_shifted(block);
    if folded {
        quantize_folded(&forward_2d_unscaled(t, &a), table, &t.scaling())
    } else {
        quantize(&forward_2d(t, &a), table)
    }
}

/// 8-bit reconstruction of one block from its quantized coefficients.
pub fn decode_block(t: &Transform, q: &QuantizedBlock, table: &QuantTable) -> Result<[[u8; N]; N]> {
    let rec = inverse_2d(t, &dequantize(q, table)?)?;
    let mut out = [[0u8; N]; N];
    for (o, row) in out.iter_mut().zip(&rec) {
        for (p, &v) in o.iter_mut().zip(row) {
            *p = (v + 128.0).round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}

/// Runs the whole pipeline and measures the reconstruction against `img`.
pub fn compress_image(img: &GrayImage, t: &Transform, opts: &CompressOptions) -> Result<(GrayImage, QualityReport)> {
    let table = opts.table(t.prune_k())?;
    let grid = BlockGrid::partition(img);
    let blocks = grid
        .blocks
        .par_iter()
        .map(|b| decode_block(t, &encode_block(t, b, &table, opts.folded)?, &table))
        .collect::<Result<Vec<_>>>()?;
    let rec = grid.with_blocks(blocks).reassemble();
    let report = QualityReport {
        transform: t.name(),
        prune_k: t.prune_k(),
        quality: opts.quality,
        psnr_db: metrics::psnr(img, &rec)?,
        ssim: metrics::ssim(img, &rec).ok(),
        energy_ratio: None,
        op_count_2d: t.op_count_2d(),
    };
    Ok((rec, report))
}
