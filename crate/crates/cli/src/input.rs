//! Point-cloud input: one point per row, comma and/or whitespace separated.

use thiserror::Error;
use witnesskit::{Geometry, GeometryKind, Point};

/// Sphere inputs within this distance of unit norm are normalized.
const RENORMALIZE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

/// Parsed rows with their 1-based line numbers. Blank lines and lines
/// starting with `#` are skipped; a first row whose first token is not a
/// number is taken as a header.
pub fn parse_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>, ParseError> {
    let mut rows = Vec::new();
    let mut seen_first = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = tokens(trimmed).collect();
        if !seen_first {
            seen_first = true;
            if toks.first().is_some_and(|t| t.parse::<f64>().is_err()) {
                continue;
            }
        }
        let mut row = Vec::with_capacity(toks.len());
        for t in toks {
            let v: f64 = t.parse().map_err(|_| err(line, format!("cannot parse {t:?} as a number")))?;
            if !v.is_finite() {
                return Err(err(line, format!("non-finite value {t:?}")));
            }
            row.push(v);
        }
        if let Some((first_line, first)) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(err(
                    line,
                    format!("expected {} columns (as on line {first_line}), found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push((line, row));
    }
    if rows.is_empty() {
        return Err(err(text.lines().count().max(1), "no points in input"));
    }
    Ok(rows)
}

/// Intrinsic dimension implied by the column count.
pub fn infer_dim(kind: GeometryKind, columns: usize) -> Option<usize> {
    let d = match kind {
        GeometryKind::Weighted => columns.checked_sub(1)?,
        GeometryKind::Sphere | GeometryKind::Hemisphere => columns.checked_sub(1)?,
        _ => columns,
    };
    (d >= 1).then_some(d)
}

/// Parses and validates points for `kind`; the dimension comes from the
/// columns unless `dim` is given, in which case they must agree.
pub fn parse_points(text: &str, kind: GeometryKind, dim: Option<usize>) -> Result<(Geometry, Vec<Point>), ParseError> {
    let rows = parse_rows(text)?;
    let (first_line, first) = &rows[0];
    let inferred = infer_dim(kind, first.len())
        .ok_or_else(|| err(*first_line, format!("{} columns are too few for {kind} points", first.len())))?;
    if let Some(d) = dim {
        if d != inferred {
            return Err(err(
                *first_line,
                format!("--dim {d} disagrees with the {} columns of the input ({kind} dimension {inferred})", first.len()),
            ));
        }
    }
    let g = Geometry::new(kind, inferred).map_err(|e| err(*first_line, e.to_string()))?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let p = match kind {
            GeometryKind::Weighted => {
                let (w, c) = row.split_last().expect("nonempty row");
                Point::weighted(c.to_vec(), *w)
            }
            GeometryKind::Sphere | GeometryKind::Hemisphere => {
                let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > RENORMALIZE_TOLERANCE {
                    return Err(err(line, format!("point has norm {norm}, not on the unit sphere")));
                }
                Point::new(row.iter().map(|v| v / norm).collect())
            }
            _ => Point::new(row),
        };
        g.validate(&p).map_err(|e| err(line, e.to_string()))?;
        points.push(p);
    }
    Ok((g, points))
}
