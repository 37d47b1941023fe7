//! Netpbm graymaps, ASCII (`P2`) and binary (`P5`, 8- or 16-bit).

use symspace_core::descriptors::GrayImage;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self, what: &str) -> CliResult<&str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CliError::data(format!("PGM: missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| CliError::data(format!("PGM: bad {what}")))
    }

    fn number(&mut self, what: &str) -> CliResult<usize> {
        let t = self.token(what)?;
        t.parse().map_err(|_| CliError::data(format!("PGM: {what} `{t}` is not a positive integer")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> CliResult<GrayImage> {
    let mut c = Cursor { bytes, pos: 0 };
    let encoding = match c.token("magic number")? {
        "P2" => PgmEncoding::Ascii,
        "P5" => PgmEncoding::Binary,
        other => return Err(CliError::data(format!("PGM: unsupported magic number `{other}`"))),
    };
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(CliError::data(format!("PGM: maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| CliError::data("PGM: image dimensions overflow"))?;
    let mut pixels = Vec::with_capacity(count);
    match encoding {
        PgmEncoding::Ascii => {
            for i in 0..count {
                let v = c.number("pixel").map_err(|_| CliError::data(format!("PGM: pixel {i} missing or malformed")))?;
                pixels.push(v);
            }
        }
        PgmEncoding::Binary => {
            // Exactly one whitespace byte separates the header from the data.
            if !bytes.get(c.pos).is_some_and(u8::is_ascii_whitespace) {
                return Err(CliError::data("PGM: missing separator before binary data"));
            }
            let data = &bytes[c.pos + 1..];
            let width_bytes = if maxval < 256 { 1 } else { 2 };
            if data.len() < count * width_bytes {
                return Err(CliError::data(format!(
                    "PGM: truncated data ({} of {} bytes)",
                    data.len(),
                    count * width_bytes
                )));
            }
            if width_bytes == 1 {
                pixels.extend(data[..count].iter().map(|&b| b as usize));
            } else {
                pixels.extend(data[..2 * count].chunks(2).map(|p| u16::from_be_bytes([p[0], p[1]]) as usize));
            }
        }
    }
    if let Some(v) = pixels.iter().find(|&&v| v > maxval) {
        return Err(CliError::data(format!("PGM: pixel value {v} exceeds maxval {maxval}")));
    }
    Ok(GrayImage::new(width, height, pixels.into_iter().map(|v| v as f64 / maxval as f64).collect())?)
}

/// Quantizes intensities in `[0, 1]` to `0..=maxval`.
pub fn encode_pgm(img: &GrayImage, maxval: u16, encoding: PgmEncoding) -> Vec<u8> {
    let maxval = maxval.max(1);
    let q = |p: f64| (p.clamp(0.0, 1.0) * maxval as f64).round() as u16;
    let (w, h) = (img.width(), img.height());
    match encoding {
        PgmEncoding::Ascii => {
            let mut s = format!("P2\n{w} {h}\n{maxval}\n");
            for row in img.pixels().chunks(w) {
                let line: Vec<String> = row.iter().map(|&p| q(p).to_string()).collect();
                s.push_str(&line.join(" "));
                s.push('\n');
            }
            s.into_bytes()
        }
        PgmEncoding::Binary => {
            let mut out = format!("P5\n{w} {h}\n{maxval}\n").into_bytes();
            for &p in img.pixels() {
                if maxval < 256 {
                    out.push(q(p) as u8);
                } else {
                    out.extend_from_slice(&q(p).to_be_bytes());
                }
            }
            out
        }
    }
}
