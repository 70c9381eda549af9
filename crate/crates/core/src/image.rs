//! 8-bit grayscale images and binary PGM/PPM I/O.
//!
//! `P5` is read and written; `P6` colour input is converted to luminance with
//! integer BT.601 weights. With the `png` feature, 8-bit PNG files are also
//! accepted.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::Dimension { expected: width * height, actual: data.len() });
        }
        Ok(GrayImage { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let data = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        GrayImage::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn same_size(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::ImageMismatch(self.width, self.height, other.width, other.height));
        }
        Ok(())
    }
}

/// Integer BT.601 luma, `(299 R + 587 G + 114 B) / 1000` rounded.
pub fn luma_bt601(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

struct Header<'a> {
    magic: &'a [u8],
    width: usize,
    height: usize,
    maxval: u32,
    data: &'a [u8],
}

fn parse_header(bytes: &[u8]) -> Result<Header<'_>> {
    if bytes.len() < 2 {
        return Err(Error::Format("file too short".into()));
    }
    let magic = &bytes[..2];
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap_or("");
        *field = text.parse().map_err(|_| Error::Format(format!("bad header field at byte {start}")))?;
    }
    // exactly one whitespace byte before the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("missing whitespace after header".into()));
    }
    Ok(Header {
        magic,
        width: fields[0] as usize,
        height: fields[1] as usize,
        maxval: fields[2],
        data: &bytes[pos + 1..],
    })
}

/// Decodes binary PGM (`P5`) or PPM (`P6`, converted to luma) with maxval 255.
pub fn decode_pnm(bytes: &[u8]) -> Result<GrayImage> {
    let h = parse_header(bytes)?;
    let channels = match h.magic {
        b"P5" => 1,
        b"P6" => 3,
        m => {
            return Err(Error::Format(format!("unsupported magic {:?}, expected P5 or P6", String::from_utf8_lossy(m))))
        }
    };
    if h.maxval != 255 {
        return Err(Error::BitDepth(h.maxval));
    }
    if h.width == 0 || h.height == 0 {
        return Err(Error::EmptyImage);
    }
    let n = h.width * h.height * channels;
    if h.data.len() < n {
        return Err(Error::Format(format!("raster has {} bytes, need {n}", h.data.len())));
    }
    let raster = &h.data[..n];
    let data = if channels == 1 {
        raster.to_vec()
    } else {
        raster.chunks_exact(3).map(|p| luma_bt601(p[0], p[1], p[2])).collect()
    };
    GrayImage::new(h.width, h.height, data)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Reads a PGM/PPM file, or a PNG when built with the `png` feature.
pub fn load(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    if is_png(path) {
        return load_png(path);
    }
    decode_pnm(&fs::read(path)?)
}

pub fn save(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    if is_png(path) {
        return save_png(path, img);
    }
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

#[cfg(feature = "png")]
fn load_png(path: &Path) -> Result<GrayImage> {
    let decoded = image::open(path).map_err(|e| Error::Format(e.to_string()))?;
    if decoded.color().bits_per_pixel() / decoded.color().channel_count() as u16 != 8 {
        return Err(Error::BitDepth(decoded.color().bits_per_pixel() as u32));
    }
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    let data = rgb.pixels().map(|p| luma_bt601(p[0], p[1], p[2])).collect();
    GrayImage::new(w as usize, h as usize, data)
}

#[cfg(not(feature = "png"))]
fn no_png(path: &Path) -> Error {
    Error::Format(format!("{}: PNG support not built in (enable the `png` feature)", path.display()))
}

#[cfg(not(feature = "png"))]
fn load_png(path: &Path) -> Result<GrayImage> {
    Err(no_png(path))
}

#[cfg(feature = "png")]
fn save_png(path: &Path, img: &GrayImage) -> Result<()> {
    image::save_buffer(path, &img.data, img.width as u32, img.height as u32, image::ExtendedColorType::L8)
        .map_err(|e| Error::Format(e.to_string()))
}

#[cfg(not(feature = "png"))]
fn save_png(path: &Path, _img: &GrayImage) -> Result<()> {
    Err(no_png(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 40 + y) as u8).unwrap();
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(b"P5\n5 3\n255\n"));
        assert_eq!(decode_pnm(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5 # made by hand\n2 # width\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let img = decode_pnm(&bytes).unwrap();
        assert_eq!(img.pixels(), [7, 9]);
    }

    #[test]
    fn ppm_is_converted_to_luma() {
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 10, 200, 30]);
        let img = decode_pnm(&bytes).unwrap();
        assert_eq!(img.pixels(), [luma_bt601(255, 0, 0), luma_bt601(10, 200, 30)]);
        assert_eq!(luma_bt601(255, 0, 0), 76);
        assert_eq!(luma_bt601(255, 255, 255), 255);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(decode_pnm(b"P5\n1 1\n65535\n\0\0"), Err(Error::BitDepth(65535))));
        assert!(matches!(decode_pnm(b"P2\n1 1\n255\n0"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P5\n2 2\n255\n\0"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P5\n0 4\n255\n"), Err(Error::EmptyImage)));
        assert!(matches!(decode_pnm(b"P"), Err(Error::Format(_))));
    }

    #[cfg(feature = "png")]
    #[test]
    fn png_round_trip() {
        let img = GrayImage::from_fn(9, 4, |x, y| (x * 25 + y) as u8).unwrap();
        let path = std::env::temp_dir().join(format!("dctprune-png-{}.png", std::process::id()));
        save(&path, &img).unwrap();
        assert_eq!(load(&path).unwrap(), img);
        std::fs::remove_file(path).unwrap();
    }

    #[cfg(not(feature = "png"))]
    #[test]
    fn png_needs_the_feature() {
        assert!(matches!(load("x.png"), Err(Error::Format(_))));
    }
}
