//! PNG and PPM files for [`Canvas`] images.
//!
//! PNG output uses fixed encoder settings (8-bit RGB, no interlacing, `Up`
//! filter, fast deflate) and writes no ancillary chunks, so equal
//! canvases always give equal bytes. PPM is the plain-text `P3` variant, one
//! pixel per line, meant for debugging.

use std::fmt::Write as _;
use std::fs;
use std::io::Cursor;
use std::path::Path;
use std::str::FromStr;

use vispad_core::{Canvas, Color};

use crate::error::{IoContext, PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImageFormat {
    #[default]
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Ppm => "ppm",
        }
    }
}

impl FromStr for ImageFormat {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "png" => Ok(ImageFormat::Png),
            "ppm" => Ok(ImageFormat::Ppm),
            other => Err(PipelineError::Config(format!("unknown image format {other:?}"))),
        }
    }
}

pub fn encode_png(canvas: &Canvas) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, canvas.width() as u32, canvas.height() as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_compression(png::Compression::Fast);
    enc.set_filter(png::Filter::Up);
    let mut writer = enc
        .write_header()
        .map_err(|e| PipelineError::Format(format!("png header: {e}")))?;
    writer
        .write_image_data(&canvas.to_rgb_bytes())
        .map_err(|e| PipelineError::Format(format!("png data: {e}")))?;
    writer
        .finish()
        .map_err(|e| PipelineError::Format(format!("png finish: {e}")))?;
    Ok(out)
}

/// Decodes any 8- or 16-bit PNG into RGB, dropping alpha.
pub fn decode_png(bytes: &[u8]) -> Result<Canvas> {
    let bad = |e: png::DecodingError| PipelineError::Format(format!("png: {e}"));
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info().map_err(bad)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| PipelineError::Format("png too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(bad)?;
    let data = &buf[..info.buffer_size()];
    let (w, h) = (info.width as usize, info.height as usize);
    let pixels: Vec<Color> = match info.color_type {
        png::ColorType::Rgb => data.chunks_exact(3).map(|p| Color::rgb(p[0], p[1], p[2])).collect(),
        png::ColorType::Rgba => data.chunks_exact(4).map(|p| Color::rgb(p[0], p[1], p[2])).collect(),
        png::ColorType::Grayscale => data.iter().map(|&g| Color::rgb(g, g, g)).collect(),
        png::ColorType::GrayscaleAlpha => data.chunks_exact(2).map(|p| Color::rgb(p[0], p[0], p[0])).collect(),
        png::ColorType::Indexed => return Err(PipelineError::Format("png palette was not expanded".into())),
    };
    Ok(Canvas::from_pixels(w, h, pixels)?)
}

pub fn encode_ppm(canvas: &Canvas) -> Vec<u8> {
    let mut s = String::with_capacity(16 + canvas.pixels().len() * 12);
    let _ = write!(s, "P3\n{} {}\n255\n", canvas.width(), canvas.height());
    for c in canvas.pixels() {
        let _ = writeln!(s, "{} {} {}", c.r, c.g, c.b);
    }
    s.into_bytes()
}

/// Decodes binary `P6` or plain `P3` pixmaps with a maximum value of 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<Canvas> {
    let bad = |msg: &str| PipelineError::Format(format!("ppm: {msg}"));
    let mut pos = 0;
    let next_token = |pos: &mut usize| -> Option<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = next_token(&mut pos).ok_or_else(|| bad("empty file"))?;
    let num = |pos: &mut usize, what: &str| -> Result<usize> {
        next_token(pos)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad(&format!("bad {what}")))
    };
    let w = num(&mut pos, "width")?;
    let h = num(&mut pos, "height")?;
    if num(&mut pos, "maxval")? != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    let mut rgb = Vec::with_capacity(w * h * 3);
    match magic.as_str() {
        "P3" => {
            for _ in 0..w * h * 3 {
                let v = num(&mut pos, "sample")?;
                rgb.push(u8::try_from(v).map_err(|_| bad("sample above 255"))?);
            }
        }
        "P6" => {
            let start = pos + 1;
            let end = start + w * h * 3;
            if end > bytes.len() {
                return Err(bad("truncated pixel data"));
            }
            rgb.extend_from_slice(&bytes[start..end]);
        }
        _ => return Err(bad("unsupported magic")),
    }
    Ok(Canvas::from_rgb_bytes(w, h, &rgb)?)
}

pub fn encode(canvas: &Canvas, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Png => encode_png(canvas),
        ImageFormat::Ppm => Ok(encode_ppm(canvas)),
    }
}

/// Decodes by content: PNG signature, otherwise PPM.
pub fn decode(bytes: &[u8]) -> Result<Canvas> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else {
        decode_ppm(bytes)
    }
}

pub fn write_image(path: &Path, canvas: &Canvas, format: ImageFormat) -> Result<()> {
    fs::write(path, encode(canvas, format)?).at(path)
}

pub fn read_image(path: &Path) -> Result<Canvas> {
    decode(&fs::read(path).at(path)?)
}
