//! AHF, a line-based text format for adaptive grids.
//!
//! ```text
//! AHF 1
//! domain <min_x> <min_y> <max_x> <max_y>
//! min_cell <size>
//! cells <count>
//! <center_x> <center_y> <size> <terrain_height> <water_depth>
//! ...
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use hfcast_core::{AdaptiveGrid, Cell, GridError, Rect, Vec2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AhfError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("expected {expected} cells, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("line {line}: unexpected content after the last cell")]
    TrailingContent { line: usize },
    #[error("{0}")]
    Grid(#[from] GridError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn syntax(line: usize, msg: impl Into<String>) -> AhfError {
    AhfError::Syntax { line, msg: msg.into() }
}

fn numbers<const N: usize>(line: usize, fields: &[&str]) -> Result<[f64; N], AhfError> {
    if fields.len() != N {
        return Err(syntax(line, format!("expected {N} numbers, found {}", fields.len())));
    }
    let mut out = [0.0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| syntax(line, format!("invalid number `{f}`")))?;
    }
    Ok(out)
}

/// Parses AHF text. Overlap checking can be switched off for large inputs.
pub fn parse_ahf(text: &str, check_overlap: bool) -> Result<AdaptiveGrid, AhfError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str| -> Result<(usize, Vec<&str>), AhfError> {
        let (n, l) = lines.next().ok_or_else(|| syntax(0, format!("missing `{key}` line")))?;
        let mut f: Vec<&str> = l.split_whitespace().collect();
        if f.first() != Some(&key) {
            return Err(syntax(n, format!("expected `{key}`")));
        }
        f.remove(0);
        Ok((n, f))
    };

    let (n, v) = header("AHF")?;
    if v != ["1"] {
        return Err(syntax(n, "unsupported AHF version"));
    }
    let (n, v) = header("domain")?;
    let [x0, y0, x1, y1] = numbers::<4>(n, &v)?;
    let (n, v) = header("min_cell")?;
    let [min_cell] = numbers::<1>(n, &v)?;
    let (n, v) = header("cells")?;
    let count: usize = match v.as_slice() {
        [c] => c.parse().map_err(|_| syntax(n, format!("invalid cell count `{c}`")))?,
        _ => return Err(syntax(n, "expected one cell count")),
    };

    let mut cells = Vec::with_capacity(count.min(1 << 24));
    for (n, l) in lines {
        if cells.len() == count {
            return Err(AhfError::TrailingContent { line: n });
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        let [cx, cy, size, h, d] = numbers::<5>(n, &f)?;
        cells.push(Cell::new(Vec2::new(cx, cy), size, h, d));
    }
    if cells.len() != count {
        return Err(AhfError::CountMismatch { expected: count, found: cells.len() });
    }
    let domain = Rect::new(Vec2::new(x0, y0), Vec2::new(x1, y1));
    Ok(AdaptiveGrid::new(domain, min_cell, cells, check_overlap)?)
}

pub fn load_ahf(path: &Path, check_overlap: bool) -> Result<AdaptiveGrid, AhfError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| AhfError::Io { path: path.display().to_string(), source })?;
    parse_ahf(&text, check_overlap)
}

/// Serializes with shortest round-trip decimals, so parsing the output
/// restores every value exactly.
pub fn write_ahf(grid: &AdaptiveGrid) -> String {
    let d = grid.domain();
    let mut s = String::with_capacity(48 * grid.len() + 64);
    let _ = writeln!(s, "AHF 1");
    let _ = writeln!(s, "domain {} {} {} {}", d.min.x, d.min.y, d.max.x, d.max.y);
    let _ = writeln!(s, "min_cell {}", grid.min_cell_size());
    let _ = writeln!(s, "cells {}", grid.len());
    for c in grid.cells() {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            c.center.x, c.center.y, c.size, c.terrain_height, c.water_depth
        );
    }
    s
}

pub fn save_ahf(grid: &AdaptiveGrid, path: &Path) -> Result<(), AhfError> {
    std::fs::write(path, write_ahf(grid))
        .map_err(|source| AhfError::Io { path: path.display().to_string(), source })
}
