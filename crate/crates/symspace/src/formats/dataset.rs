//! Point datasets as CSV.
//!
//! ```text
//! # symspace sample manifold=pd:2 n=2 seed=7
//! label,m,x11,x12,x21,x22
//! 1,2,1.3,0.2,0.2,0.9
//! ```
//!
//! Each row holds a label, the size field (matrix order or vector length)
//! and the point's entries: row-major matrix entries for PD points,
//! interleaved `(re, im)` pairs for Siegel points, coordinates for vectors.
//! Lines starting with `#` are comments; a `manifold=` token in a comment
//! names the manifold, otherwise a `label,m,…` header with rows of `m²`
//! entries is read as PD(m).

use std::fmt::Write as _;

use symspace_core::linalg::{CMatrix, PdMatrix};
use symspace_core::manifolds::{siegel_point, Manifold, ManifoldPoint};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub manifold: Manifold,
    pub points: Vec<ManifoldPoint>,
    pub labels: Vec<usize>,
}

/// Shortest text that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn header(manifold: Manifold) -> String {
    let mut h = String::from("label,");
    match manifold {
        Manifold::Pd(m) => {
            h.push('m');
            for i in 1..=m {
                for j in 1..=m {
                    let _ = write!(h, ",x{i}{j}");
                }
            }
        }
        Manifold::SiegelDisk(m) => {
            h.push('m');
            for i in 1..=m {
                for j in 1..=m {
                    let _ = write!(h, ",re{i}{j},im{i}{j}");
                }
            }
        }
        Manifold::Euclidean(d) | Manifold::PoincareBall(d) => {
            h.push('d');
            for i in 1..=d {
                let _ = write!(h, ",x{i}");
            }
        }
    }
    h
}

fn entries(p: &ManifoldPoint) -> (usize, Vec<f64>) {
    match p {
        ManifoldPoint::Vector(v) => (v.len(), v.clone()),
        ManifoldPoint::Pd(x) => (x.order(), x.as_slice().to_vec()),
        ManifoldPoint::Siegel(z) => (z.order(), z.as_slice().iter().flat_map(|c| [c.re, c.im]).collect()),
    }
}

/// Writes the echo line (without `#`), the header and one row per point.
pub fn write_dataset(echo: &str, manifold: Manifold, points: &[ManifoldPoint], labels: &[usize]) -> String {
    let mut out = format!("# {echo}\n{}\n", header(manifold));
    for (p, l) in points.iter().zip(labels) {
        let (size, vals) = entries(p);
        let _ = write!(out, "{l},{size}");
        for v in vals {
            out.push(',');
            out.push_str(&format_f64(v));
        }
        out.push('\n');
    }
    out
}

fn manifold_from_comments(text: &str) -> CliResult<Option<Manifold>> {
    for line in text.lines().filter(|l| l.trim_start().starts_with('#')) {
        if let Some(tok) = line.split_whitespace().find_map(|t| t.strip_prefix("manifold=")) {
            return tok.parse().map(Some).map_err(|e| CliError::data(format!("bad manifold in comment: {e}")));
        }
    }
    Ok(None)
}

fn point_from_row(manifold: Manifold, size: usize, vals: Vec<f64>) -> symspace_core::Result<ManifoldPoint> {
    let p = match manifold {
        Manifold::Pd(_) => ManifoldPoint::Pd(PdMatrix::from_row_major(size, vals)?),
        Manifold::SiegelDisk(_) => {
            let pairs: Vec<(f64, f64)> = vals.chunks(2).map(|c| (c[0], c[1])).collect();
            let z: CMatrix = siegel_point(size, &pairs)?;
            ManifoldPoint::Siegel(z)
        }
        Manifold::Euclidean(_) | Manifold::PoincareBall(_) => ManifoldPoint::Vector(vals),
    };
    manifold.validate(&p)?;
    Ok(p)
}

/// Parses a dataset. `manifold` overrides whatever the file declares.
pub fn read_dataset(text: &str, manifold: Option<Manifold>) -> CliResult<Dataset> {
    let declared = match manifold {
        Some(m) => Some(m),
        None => manifold_from_comments(text)?,
    };
    let mut rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    // Only a matrix-order header (`label,m,…`) allows PD inference.
    let matrix_header = match rows.next() {
        Some((_, h)) if h.trim_start().starts_with("label") => h.split(',').nth(1).map(str::trim) == Some("m"),
        Some((i, _)) => return Err(CliError::data(format!("line {}: expected a `label,...` header", i + 1))),
        None => return Err(CliError::data("dataset has no header")),
    };
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut found = declared;
    for (i, line) in rows {
        let line_no = i + 1;
        let bad = |what: &str| CliError::data(format!("line {line_no}: {what}"));
        let mut fields = line.split(',').map(str::trim);
        let label: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("label is not a non-negative integer"))?;
        let size: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| bad("size field is not an integer"))?;
        let vals = fields
            .map(|f| f.parse::<f64>().map_err(|_| bad(&format!("`{f}` is not a number"))))
            .collect::<CliResult<Vec<f64>>>()?;
        let m = match found {
            Some(m) => m,
            None if matrix_header && vals.len() == size * size && size > 0 => Manifold::Pd(size),
            None => return Err(bad("cannot infer the manifold; pass --manifold")),
        };
        found = Some(m);
        let expected = match m {
            Manifold::Pd(k) => (k, k * k),
            Manifold::SiegelDisk(k) => (k, 2 * k * k),
            Manifold::Euclidean(d) | Manifold::PoincareBall(d) => (d, d),
        };
        if size != expected.0 || vals.len() != expected.1 {
            return Err(bad(&format!(
                "expected size {} and {} entries for {m}, found size {size} and {} entries",
                expected.0,
                expected.1,
                vals.len()
            )));
        }
        let p = point_from_row(m, size, vals).map_err(|e| bad(&e.to_string()))?;
        points.push(p);
        labels.push(label);
    }
    let manifold = found.ok_or_else(|| CliError::data("empty dataset without a declared manifold"))?;
    Ok(Dataset {
        manifold,
        points,
        labels,
    })
}
