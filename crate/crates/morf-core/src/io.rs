//! Frame I/O, descriptor export (CSV and binary), and float-plane dumps.
//!
//! Frames load from 8/16-bit PNG or PGM; color inputs collapse to Rec.601
//! luma. Integer samples normalize by their max code value.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use image::DynamicImage;

use crate::error::{MorfError, Result};
use crate::frame::GrayFrame;
use crate::morf::{AmplifyMode, MorfParams};

pub fn load_gray_frame(path: &Path) -> Result<GrayFrame> {
    let img = image::open(path)?;
    let frame = match img {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            GrayFrame::new(
                w as usize,
                h as usize,
                buf.into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
            )?
        }
        DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            GrayFrame::new(
                w as usize,
                h as usize,
                buf.into_raw().into_iter().map(|v| v as f64 / 65535.0).collect(),
            )?
        }
        DynamicImage::ImageLumaA8(buf) => {
            let (w, h) = buf.dimensions();
            GrayFrame::from_fn(w as usize, h as usize, |x, y| {
                buf.get_pixel(x as u32, y as u32)[0] as f64 / 255.0
            })
        }
        DynamicImage::ImageLumaA16(buf) => {
            let (w, h) = buf.dimensions();
            GrayFrame::from_fn(w as usize, h as usize, |x, y| {
                buf.get_pixel(x as u32, y as u32)[0] as f64 / 65535.0
            })
        }
        other => {
            // Color input: Rec.601 luma at 16-bit working precision.
            let rgb = other.into_rgb16();
            let (w, h) = rgb.dimensions();
            GrayFrame::from_fn(w as usize, h as usize, |x, y| {
                let p = rgb.get_pixel(x as u32, y as u32);
                (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 65535.0
            })
        }
    };
    frame.validate_finite()?;
    Ok(frame)
}

/// 16-bit binary PGM (big-endian samples per the Netpbm spec), values
/// clamped to [0,1].
pub fn write_pgm16(path: &Path, frame: &GrayFrame) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write!(w, "P5\n{} {}\n65535\n", frame.width(), frame.height())?;
    for &v in frame.data() {
        let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        w.write_all(&q.to_be_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Descriptor export
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorRow {
    pub id: String,
    pub label: String,
    pub values: Vec<f64>,
}

/// CSV: one row per sequence (id, label, v0, v1, ...), headerless.
pub fn write_descriptors_csv(path: &Path, rows: &[DescriptorRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| MorfError::Parse(format!("csv open: {e}")))?;
    for row in rows {
        let mut rec = Vec::with_capacity(row.values.len() + 2);
        rec.push(row.id.clone());
        rec.push(row.label.clone());
        // {:?} prints f64 with round-trip precision
        rec.extend(row.values.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec)
            .map_err(|e| MorfError::Parse(format!("csv write: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_descriptors_csv(path: &Path) -> Result<Vec<DescriptorRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| MorfError::Parse(format!("csv open: {e}")))?;
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| MorfError::Parse(format!("csv read: {e}")))?;
        if rec.len() < 2 {
            return Err(MorfError::Parse("descriptor row needs id and label".into()));
        }
        let values = rec
            .iter()
            .skip(2)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| MorfError::Parse(format!("bad float '{s}': {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(DescriptorRow {
            id: rec[0].to_string(),
            label: rec[1].to_string(),
            values,
        });
    }
    Ok(rows)
}

const MORF_MAGIC: &[u8; 4] = b"MORF";
const MORF_VERSION: u32 = 1;

/// Binary descriptor file: magic, version, params block, then length-prefixed
/// records of (id, label, f64 vector). Bit-exact round trip.
pub fn write_descriptors_bin(
    path: &Path,
    params: &MorfParams,
    rows: &[DescriptorRow],
) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MORF_MAGIC)?;
    w.write_all(&MORF_VERSION.to_le_bytes())?;
    w.write_all(&(params.gx as u32).to_le_bytes())?;
    w.write_all(&(params.gy as u32).to_le_bytes())?;
    w.write_all(&(params.o as u32).to_le_bytes())?;
    w.write_all(&(params.normalize as u32).to_le_bytes())?;
    let mode = match params.amplify_mode {
        AmplifyMode::Sine => 0u32,
        AmplifyMode::Linear => 1u32,
    };
    w.write_all(&mode.to_le_bytes())?;
    w.write_all(&params.alpha.to_le_bytes())?;
    w.write_all(&(params.levels.len() as u32).to_le_bytes())?;
    for &l in &params.levels {
        w.write_all(&(l as u32).to_le_bytes())?;
    }
    w.write_all(&(rows.len() as u32).to_le_bytes())?;
    for row in rows {
        write_str(&mut w, &row.id)?;
        write_str(&mut w, &row.label)?;
        w.write_all(&(row.values.len() as u64).to_le_bytes())?;
        for v in &row.values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_descriptors_bin(path: &Path) -> Result<(MorfParams, Vec<DescriptorRow>)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MORF_MAGIC {
        return Err(MorfError::Parse("not a MORF descriptor file".into()));
    }
    let version = read_u32(&mut r)?;
    if version != MORF_VERSION {
        return Err(MorfError::Parse(format!("unsupported MORF version {version}")));
    }
    let gx = read_u32(&mut r)? as usize;
    let gy = read_u32(&mut r)? as usize;
    let o = read_u32(&mut r)? as usize;
    let normalize = read_u32(&mut r)? != 0;
    let amplify_mode = match read_u32(&mut r)? {
        0 => AmplifyMode::Sine,
        1 => AmplifyMode::Linear,
        m => return Err(MorfError::Parse(format!("unknown amplify mode {m}"))),
    };
    let alpha = read_f64(&mut r)?;
    let n_levels = read_u32(&mut r)? as usize;
    let mut levels = Vec::with_capacity(n_levels);
    for _ in 0..n_levels {
        levels.push(read_u32(&mut r)? as usize);
    }
    let params = MorfParams { gx, gy, o, levels, alpha, normalize, amplify_mode };
    let n_rows = read_u32(&mut r)? as usize;
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let id = read_str(&mut r)?;
        let label = read_str(&mut r)?;
        let mut len8 = [0u8; 8];
        r.read_exact(&mut len8)?;
        let len = u64::from_le_bytes(len8) as usize;
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(read_f64(&mut r)?);
        }
        rows.push(DescriptorRow { id, label, values });
    }
    Ok((params, rows))
}

fn write_str(w: &mut impl Write, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_str(r: &mut impl Read) -> Result<String> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| MorfError::Parse(format!("bad utf8: {e}")))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

// ---------------------------------------------------------------------------
// Debug float planes
// ---------------------------------------------------------------------------

/// Raw float plane: 16-byte header (width, height, level, channel as u32 LE)
/// followed by row-major little-endian f32 samples.
pub fn write_float_plane(path: &Path, frame: &GrayFrame, level: u32, channel: u32) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(&(frame.width() as u32).to_le_bytes())?;
    w.write_all(&(frame.height() as u32).to_le_bytes())?;
    w.write_all(&level.to_le_bytes())?;
    w.write_all(&channel.to_le_bytes())?;
    for &v in frame.data() {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_float_plane(path: &Path) -> Result<(GrayFrame, u32, u32)> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let width = read_u32(&mut r)? as usize;
    let height = read_u32(&mut r)? as usize;
    let level = read_u32(&mut r)?;
    let channel = read_u32(&mut r)?;
    let mut data = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        data.push(f32::from_le_bytes(b) as f64);
    }
    Ok((GrayFrame::new(width, height, data)?, level, channel))
}
