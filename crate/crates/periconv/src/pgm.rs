//! PGM image files: ASCII `P2` and binary `P5`, maxval up to 65535
//! (two-byte big-endian samples above 255).

use crate::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub rows: usize,
    pub cols: usize,
    pub maxval: u32,
    /// Row-major samples, each `<= maxval`.
    pub pixels: Vec<u32>,
}

/// True when the bytes start with a PGM magic number.
pub fn looks_like_pgm(bytes: &[u8]) -> bool {
    bytes.starts_with(b"P2") || bytes.starts_with(b"P5")
}

fn parse_err(context: &str, msg: impl Into<String>) -> AppError {
    AppError::Parse { context: context.into(), msg: msg.into() }
}

/// Reads past whitespace and `#` comments, returning the next token's
/// bytes and the offset just after it.
fn next_token(bytes: &[u8], mut pos: usize) -> Option<(&[u8], usize)> {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        break;
    }
    if pos >= bytes.len() {
        return None;
    }
    let start = pos;
    while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    Some((&bytes[start..pos], pos))
}

fn token_u32(context: &str, bytes: &[u8], pos: usize, what: &str) -> AppResult<(u32, usize)> {
    let (tok, next) =
        next_token(bytes, pos).ok_or_else(|| parse_err(context, format!("missing {what}")))?;
    let s = core::str::from_utf8(tok).map_err(|_| parse_err(context, format!("bad {what}")))?;
    let v = s.parse::<u32>().map_err(|_| parse_err(context, format!("bad {what}: {s:?}")))?;
    Ok((v, next))
}

pub fn read_pgm(context: &str, bytes: &[u8]) -> AppResult<PgmImage> {
    let (magic, mut pos) =
        next_token(bytes, 0).ok_or_else(|| parse_err(context, "empty file"))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => {
            return Err(parse_err(
                context,
                format!("not a PGM file (magic {:?})", String::from_utf8_lossy(other)),
            ))
        }
    };
    let (cols, p) = token_u32(context, bytes, pos, "width")?;
    let (rows, p) = token_u32(context, bytes, p, "height")?;
    let (maxval, p) = token_u32(context, bytes, p, "maxval")?;
    pos = p;
    if rows == 0 || cols == 0 {
        return Err(parse_err(context, "zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(context, format!("maxval {maxval} outside 1..=65535")));
    }
    let count = rows as usize * cols as usize;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(parse_err(context, "missing raster separator"));
        }
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| parse_err(context, "raster shorter than width*height"))?;
        if wide {
            for pair in raster.chunks_exact(2) {
                pixels.push(u32::from(pair[0]) << 8 | u32::from(pair[1]));
            }
        } else {
            pixels.extend(raster.iter().map(|&b| u32::from(b)));
        }
    } else {
        for _ in 0..count {
            let (v, p) = token_u32(context, bytes, pos, "pixel")?;
            pixels.push(v);
            pos = p;
        }
    }
    if let Some(&bad) = pixels.iter().find(|&&v| v > maxval) {
        return Err(parse_err(context, format!("pixel {bad} exceeds maxval {maxval}")));
    }
    Ok(PgmImage { rows: rows as usize, cols: cols as usize, maxval, pixels })
}

pub fn write_pgm(img: &PgmImage, binary: bool) -> Vec<u8> {
    debug_assert_eq!(img.pixels.len(), img.rows * img.cols);
    let mut out = Vec::new();
    let magic = if binary { "P5" } else { "P2" };
    out.extend_from_slice(format!("{magic}\n{} {}\n{}\n", img.cols, img.rows, img.maxval).as_bytes());
    if binary {
        if img.maxval > 255 {
            for &v in &img.pixels {
                out.push((v >> 8) as u8);
                out.push((v & 0xff) as u8);
            }
        } else {
            out.extend(img.pixels.iter().map(|&v| v as u8));
        }
    } else {
        for r in 0..img.rows {
            let row = &img.pixels[r * img.cols..(r + 1) * img.cols];
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    out
}
