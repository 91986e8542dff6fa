//! Binary Netpbm exchange formats.
//!
//! Maps are P6 (8-bit RGB): red marks occupied cells, green the start cell
//! and blue the goal cell, each as 255 or 0. Masks are P5 (8-bit grey):
//! 255 inside the predicted region, 0 elsewhere. Headers are written as
//! `P6\n<w> <h>\n255\n` with a single whitespace byte before the raster.

use std::fs;
use std::path::Path;

use super::GridMap;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::guidance::GuidanceMask;

pub fn encode_ppm(map: &GridMap) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", map.width, map.height).into_bytes();
    let start = map.start_cell();
    let goal = map.goal_cell();
    out.reserve(map.width * map.height * 3);
    for r in 0..map.height {
        for c in 0..map.width {
            let on = |flag: bool| if flag { 255u8 } else { 0 };
            out.push(on(map.is_occupied(r, c)));
            out.push(on(start == Some((r, c))));
            out.push(on(goal == Some((r, c))));
        }
    }
    out
}

/// Decodes a P6 map. Start and goal are placed at the centres of the
/// unique green and blue cells.
pub fn decode_ppm(bytes: &[u8]) -> Result<GridMap> {
    let (header, raster) = parse_header(bytes, b"P6")?;
    let (w, h) = (header.width, header.height);
    if raster.len() != w * h * 3 {
        return Err(Error::Format(format!(
            "P6 raster holds {} bytes, expected {}",
            raster.len(),
            w * h * 3
        )));
    }
    let mut map = GridMap::new(w, h);
    let mut start = None;
    let mut goal = None;
    for (i, px) in raster.chunks_exact(3).enumerate() {
        let (r, c) = (i / w, i % w);
        map.occupancy[i] = px[0] >= 128;
        if px[1] >= 128 && start.replace((r, c)).is_some() {
            return Err(Error::Format("more than one start cell".into()));
        }
        if px[2] >= 128 && goal.replace((r, c)).is_some() {
            return Err(Error::Format("more than one goal cell".into()));
        }
    }
    let (sr, sc) = start.ok_or_else(|| Error::Format("no start cell (green channel)".into()))?;
    let (gr, gc) = goal.ok_or_else(|| Error::Format("no goal cell (blue channel)".into()))?;
    Ok(map.with_query(Point::cell_center(sr, sc), Point::cell_center(gr, gc)))
}

pub fn encode_pgm(mask: &GuidanceMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.bits.iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GuidanceMask> {
    let (header, raster) = parse_header(bytes, b"P5")?;
    if raster.len() != header.width * header.height {
        return Err(Error::Format(format!(
            "P5 raster holds {} bytes, expected {}",
            raster.len(),
            header.width * header.height
        )));
    }
    Ok(GuidanceMask {
        width: header.width,
        height: header.height,
        bits: raster.iter().map(|&v| v >= 128).collect(),
    })
}

pub fn save_map(map: &GridMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ppm(map)).map_err(|e| Error::io(path, e))
}

pub fn load_map(path: impl AsRef<Path>) -> Result<GridMap> {
    let path = path.as_ref();
    decode_ppm(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn save_mask(mask: &GuidanceMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(mask)).map_err(|e| Error::io(path, e))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<GuidanceMask> {
    let path = path.as_ref();
    decode_pgm(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Loads a mask and checks it pairs with `map`.
pub fn load_mask_for(map: &GridMap, path: impl AsRef<Path>) -> Result<GuidanceMask> {
    let mask = load_mask(path)?;
    mask.check_dims(map)?;
    Ok(mask)
}

struct Header {
    width: usize,
    height: usize,
}

/// Parses `magic width height maxval` and returns the raster that follows
/// the single whitespace byte after maxval. `#` comments are skipped.
fn parse_header<'a>(bytes: &'a [u8], magic: &[u8]) -> Result<(Header, &'a [u8])> {
    if !bytes.starts_with(magic) {
        return Err(Error::Format(format!(
            "expected magic {}",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut pos = magic.len();
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
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
        let begin = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if begin == pos {
            return Err(Error::Format("truncated or non-numeric header".into()));
        }
        *field = std::str::from_utf8(&bytes[begin..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("header value out of range".into()))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}, expected 255")));
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Format("missing whitespace after maxval".into())),
    }
    Ok((Header { width, height }, &bytes[pos..]))
}
