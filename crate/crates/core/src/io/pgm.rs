//! Binary PGM (P5) reading and writing, plus directory loading.

use std::fs;
use std::path::{Path, PathBuf};

use crate::appearance::Frame;
use crate::error::{Error, Result};

/// Lists `*.pgm` files in `dir`, sorted by byte-wise lexicographic file name.
pub fn list_pgm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().map_or(false, |e| e == "pgm") {
            files.push(path);
        }
    }
    files.sort_by(|a, b| {
        a.file_name()
            .map(|n| n.as_encoded_bytes())
            .cmp(&b.file_name().map(|n| n.as_encoded_bytes()))
    });
    Ok(files)
}

/// Loads every `*.pgm` frame in a directory, in file-name order, indexed
/// from 1. All frames must share one size.
pub fn load_frames(dir: &Path) -> Result<Vec<Frame>> {
    let files = list_pgm_files(dir)?;
    if files.is_empty() {
        return Err(Error::invalid_input(format!(
            "no .pgm files in {}",
            dir.display()
        )));
    }
    let mut frames = Vec::with_capacity(files.len());
    for (i, path) in files.iter().enumerate() {
        let (w, h, pixels) = read_pgm(path)?;
        if let Some(first) = frames.first() {
            let first: &Frame = first;
            if first.width() != w || first.height() != h {
                return Err(Error::format(
                    path,
                    format!(
                        "frame size {}x{} differs from first frame {}x{}",
                        w,
                        h,
                        first.width(),
                        first.height()
                    ),
                ));
            }
        }
        frames.push(
            Frame::new(w, h, pixels, (i + 1) as u32)
                .map_err(|e| Error::format(path, e.to_string()))?,
        );
    }
    Ok(frames)
}

/// Reads one binary PGM: `P5`, dimensions, maxval 255, then raw bytes.
/// `#` comments are allowed anywhere in the header.
pub fn read_pgm(path: &Path) -> Result<(u32, u32, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;

    let magic = next_token(&bytes, &mut pos)
        .ok_or_else(|| Error::format(path, "missing PGM header"))?;
    if magic != b"P5" {
        return Err(Error::format(
            path,
            format!("expected magic P5, got {:?}", String::from_utf8_lossy(magic)),
        ));
    }
    let width: u32 = parse_header_number(&bytes, &mut pos, path, "width")?;
    let height: u32 = parse_header_number(&bytes, &mut pos, path, "height")?;
    let maxval: u32 = parse_header_number(&bytes, &mut pos, path, "maxval")?;
    if maxval != 255 {
        return Err(Error::format(path, format!("unsupported maxval {}", maxval)));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(path, "zero frame dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format(path, "missing raster separator"));
    }
    pos += 1;
    let need = width as usize * height as usize;
    if bytes.len() - pos < need {
        return Err(Error::format(
            path,
            format!("raster truncated: need {} bytes, have {}", need, bytes.len() - pos),
        ));
    }
    Ok((width, height, bytes[pos..pos + need].to_vec()))
}

/// Writes one binary PGM with maxval 255.
pub fn write_pgm(path: &Path, width: u32, height: u32, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width as usize * height as usize {
        return Err(Error::invalid_input(format!(
            "pixel buffer length {} does not match {}x{}",
            pixels.len(),
            width,
            height
        )));
    }
    let mut out = Vec::with_capacity(pixels.len() + 32);
    out.extend_from_slice(format!("P5\n{} {}\n255\n", width, height).as_bytes());
    out.extend_from_slice(pixels);
    fs::write(path, out)?;
    Ok(())
}

/// Skips whitespace and `#` comments, then returns the next header token.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
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
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn parse_header_number(bytes: &[u8], pos: &mut usize, path: &Path, what: &str) -> Result<u32> {
    let token = next_token(bytes, pos)
        .ok_or_else(|| Error::format(path, format!("missing {}", what)))?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::format(
                path,
                format!("bad {}: {:?}", what, String::from_utf8_lossy(token)),
            )
        })
}
